//! Command-line surface: catalog listing, model construction, theorem
//! checks, curvature/soliton/isometry/moduli reports and the full
//! verification matrix.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;

use trisym::catalog;
use trisym::config::Config;
use trisym::error::Error;
use trisym::geometry::{
    self, background_metric_spec, foliation_check, geometry_of, metric_from_s, reducibility_test,
    semidirect_geometry_checks, soliton_check, MetricSpec,
};
use trisym::isometry::{build_killing_algebra, dichotomy, i_filtration, isometry_invariants};
use trisym::lie;
use trisym::moduli::{delta_grid, g_lambda, moduli_space, ricci_spectrum_invariant, NormalForm};
use trisym::rep::{background_metric, casimir, centralizer_split, check_admissible, AlgebraType};
use trisym::report::{Check, RunReport};
use trisym::semidirect::{
    block_structure_residual, build_type_model, structural_report, SemidirectModel,
};
use trisym::threesym::{curvature_nullity_w, nijenhuis, verify_model_identities};
use trisym::Tolerances;

#[derive(Parser)]
#[command(name = "trisym", about = "Riemannian 3-symmetric Lie algebra models")]
struct Cli {
    /// JSON config file with rank bounds and tolerance overrides.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    json: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog ids at the configured rank bounds.
    Catalog,
    /// Build a representation or model and print its dimensions.
    Build { id: String },
    /// Run the admissibility, background and Casimir checks on an entry.
    Check { id: String },
    /// Curvature consistency checks for a model and metric.
    Curvature {
        id: String,
        #[arg(long, default_value = "S=0,t=1")]
        metric: String,
    },
    /// Algebraic Ricci soliton check for a model and metric.
    Soliton {
        id: String,
        #[arg(long, default_value = "S=0,t=1")]
        metric: String,
    },
    /// Isometry algebra dimension through the stabilizer filtration.
    Isometry {
        id: String,
        #[arg(long, default_value = "S=0,t=1")]
        metric: String,
    },
    /// Moduli description of the invariant metrics of an entry.
    Moduli { id: String },
    /// Sweep the ordered-lambda domain on a grid and emit CSV.
    ModuliScan {
        id: String,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long)]
        csv: Option<String>,
        #[arg(long, default_value_t = 0.9)]
        lmax: f64,
    },
    /// Run the full theorem-check matrix over the catalog.
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let tol = config.tolerances();
    match run(&cli, &config, &tol) {
        Ok(report) => {
            if let Some(r) = &report {
                print!("{}", r.render());
                if let Some(path) = &cli.json {
                    if let Err(e) = std::fs::write(path, r.to_json_string().unwrap_or_default()) {
                        eprintln!("error writing json: {e}");
                        return ExitCode::from(1);
                    }
                }
                if !r.all_pass() {
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownModelId(_) => ExitCode::from(2),
                Error::BadMetricFlag(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(path: &Option<String>) -> Result<Config, Error> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
        None => Ok(Config::default()),
    }
}

fn strip_model(id: &str) -> &str {
    id.strip_prefix("model:").unwrap_or(id)
}

/// Parses `--metric` flags: `S=0,t=1`, `S=<json matrix>,t=...`,
/// `S=c0:0.3;c1:-0.2,t=...` (named skew-centralizer generators) or
/// `lambda=0.2,0.5`.
fn parse_metric(sm: &SemidirectModel, flag: &str, tol: &Tolerances) -> Result<MetricSpec, Error> {
    let bad = |m: &str| Error::BadMetricFlag(m.to_string());
    if let Some(rest) = flag.strip_prefix("lambda=") {
        let lambdas: Result<Vec<f64>, _> = rest.split(',').map(str::parse::<f64>).collect();
        let lambdas = lambdas.map_err(|_| bad("lambda list must be comma-separated floats"))?;
        return g_lambda(sm, &lambdas, tol);
    }
    // Split on top-level commas (not inside a JSON matrix).
    let mut parts: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in flag.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    let nv = sm.rep.dim_v;
    let mut s = DMatrix::<f64>::zeros(nv, nv);
    let mut t = 1.0;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad("metric parts must be key=value"))?;
        match key.trim() {
            "t" => {
                t = value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("t must be a float"))?;
            }
            "S" => {
                let v = value.trim();
                if v == "0" {
                    s = DMatrix::zeros(nv, nv);
                } else if v.starts_with('[') {
                    let rows: Vec<Vec<f64>> =
                        serde_json::from_str(v).map_err(|_| bad("S matrix must be JSON"))?;
                    if rows.len() != nv || rows.iter().any(|r| r.len() != nv) {
                        return Err(bad("S matrix has wrong dimensions"));
                    }
                    s = DMatrix::from_fn(nv, nv, |r, c| rows[r][c]);
                } else {
                    // Named generators from the skew centralizer basis.
                    let split = centralizer_split(&sm.rep, &sm.rep.h_v, tol);
                    s = DMatrix::zeros(nv, nv);
                    for term in v.split(';') {
                        let (name, coeff) = term
                            .split_once(':')
                            .ok_or_else(|| bad("named generators look like c0:0.5"))?;
                        let idx: usize = name
                            .trim()
                            .strip_prefix('c')
                            .and_then(|x| x.parse().ok())
                            .ok_or_else(|| bad("generator names are c0, c1, ..."))?;
                        let coeff: f64 =
                            coeff.trim().parse().map_err(|_| bad("bad coefficient"))?;
                        let gen = split
                            .c_minus
                            .get(idx)
                            .ok_or_else(|| bad("generator index out of range"))?;
                        // S = A J with A in the skew centralizer.
                        let j_v = sm.rep.j_v.as_ref().expect("catalog reps carry J_V");
                        s += coeff * gen * j_v;
                    }
                }
            }
            other => return Err(bad(&format!("unknown metric key `{other}`"))),
        }
    }
    metric_from_s(sm, s, t, tol)
}

fn run(cli: &Cli, config: &Config, tol: &Tolerances) -> Result<Option<RunReport>, Error> {
    match &cli.command {
        Command::Catalog => {
            for id in catalog::catalog_ids(&config.ranks) {
                let rep = catalog::build_rep(&id, tol)?;
                println!(
                    "{:22} dim L = {:3}  dim V = {:3}  {}",
                    id,
                    rep.dim_l(),
                    rep.dim_v,
                    match rep.type_flag {
                        AlgebraType::NonCompact => "non-compact (type III block)",
                        AlgebraType::Compact => "compact (type IV block)",
                    }
                );
            }
            Ok(None)
        }
        Command::Build { id } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let sm = build_type_model(&rep, tol)?;
            let mut report = RunReport::new("build", id);
            report.push(Check::new(
                "jacobi_residual",
                lie::jacobi_residual(&sm.model.algebra),
                tol.residual,
            ));
            report.push(Check::flag("built", true));
            report.artifacts = serde_json::json!({
                "dim_algebra": sm.dim(),
                "dim_v_block": sm.rep.dim_v,
                "dim_k": sm.k_range.len(),
                "dim_h": sm.h_range.len(),
                "algebra": serde_json::to_value(sm.model.algebra.to_json())?,
                "sigma_row_major": matrix_rows(&sm.model.sigma),
                "v_range": [sm.v_range.start, sm.v_range.end],
                "k_range": [sm.k_range.start, sm.k_range.end],
                "h_range": [sm.h_range.start, sm.h_range.end],
            });
            Ok(Some(report))
        }
        Command::Check { id } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let mut report = RunReport::new("check", id);
            report.push(Check::new(
                "jacobi_residual",
                lie::jacobi_residual(&rep.algebra),
                tol.residual,
            ));
            let adm = check_admissible(&rep, tol);
            report.push(Check::flag("faithful", adm.faithful));
            report.push(Check::ints("fixed_vectors", adm.fixed_vectors_dim, 0));
            report.push(Check::new("rep_residual", adm.rep_residual, tol.residual));
            report.push(Check::new("k_preserves_j", adm.k_preserves_j, tol.residual));
            report.push(Check::new(
                "h_anticommutes_j",
                adm.h_anticommutes_j,
                tol.residual,
            ));
            report.push(Check::new("pairing", adm.eq_ad_ma, tol.residual));
            report.push(Check::new("jordan", adm.jordan_residual, tol.residual));
            report.push(Check::new("trace_free", adm.trace_free, tol.residual));
            report.push(Check::flag("admissible", adm.verdict));
            report.push(Check::flag(
                "background_metric",
                background_metric(&rep, tol).is_ok(),
            ));
            let (g_h, _) = g_h_of(&rep, tol);
            let cas = casimir(&rep, &g_h, tol)?;
            report.push(Check::new(
                "casimir_identity",
                cas.identity_residual,
                tol.residual,
            ));
            report.push(Check::flag(
                "casimir_invertible",
                cas.casimir_invertible && cas.rho_z_invertible,
            ));
            report.push(Check::new(
                "symplectic_embedding",
                if rep.type_flag == AlgebraType::NonCompact {
                    trisym::rep::symplectic_residual(&rep)
                } else {
                    0.0
                },
                tol.residual,
            ));
            report.push(Check::new(
                "central_eigenvalue_counts",
                trisym::rep::rho_z_eigenvalue_residual(&rep, tol),
                0.5,
            ));
            report.push(Check::ints(
                "mixed_intertwiners",
                trisym::rep::mixed_intertwiner_dim(&rep, tol),
                0,
            ));
            Ok(Some(report))
        }
        Command::Curvature { id, metric } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let sm = build_type_model(&rep, tol)?;
            let spec = parse_metric(&sm, metric, tol)?;
            let pkg = geometry_of(&sm, &spec, tol)?;
            let mut report = RunReport::new("curvature", id);
            let r = &pkg.report;
            report.push(Check::new("eta_skew", r.eta_skew, tol.residual * 100.0));
            report.push(Check::new("eta_j", r.eta_j_relations, tol.residual * 100.0));
            report.push(Check::new(
                "riemann_pair_symmetry",
                r.riemann_pair_symmetry,
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "riemann_bianchi",
                r.riemann_first_bianchi,
                tol.residual * 100.0,
            ));
            report.push(Check::new("gray_g2", r.gray_g2, tol.residual * 100.0));
            let checks = semidirect_geometry_checks(&sm, &spec, &pkg, tol);
            report.push(Check::new(
                "eta_blocks",
                checks.eta_blocks,
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "component_hh",
                checks.curv_component_hh,
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "component_mixed",
                checks.curv_component_mixed,
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "component_vv",
                checks.curv_component_vv,
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "ricci_blocks",
                checks
                    .ricci_v_block
                    .max(checks.ricci_mixed_zero)
                    .max(checks.ricci_h_block),
                tol.residual * 100.0,
            ));
            report.push(Check::new(
                "q_identity",
                checks.q_identity,
                tol.residual * 100.0,
            ));
            let fol = foliation_check(&sm, &pkg, tol);
            report.push(Check::flag("polar_foliation", fol.polar));
            let red = reducibility_test(&sm.model, &pkg, tol);
            // Whether the metric is almost-Kaehler or the model splits depends
            // on the branch and the deformation; reported, not asserted.
            report.artifacts = serde_json::json!({
                "almost_kahler": r.almost_kahler,
                "irreducible": red.irreducible,
                "d_omega_norm": r.d_omega_norm,
                "quasi_kahler_type": r.quasi_kahler_type,
                "curvature_nullity_dim": red.curvature_nullity_dim,
                "geometry": pkg.to_json_value(16),
            });
            Ok(Some(report))
        }
        Command::Soliton { id, metric } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let sm = build_type_model(&rep, tol)?;
            let spec = parse_metric(&sm, metric, tol)?;
            let pkg = geometry_of(&sm, &spec, tol)?;
            let sol = soliton_check(&sm, &pkg, tol);
            let mut report = RunReport::new("soliton", id);
            report.push(Check::new(
                "soliton_residual",
                sol.relative_residual,
                tol.soliton_yes,
            ));
            report.push(Check::flag("is_soliton", sol.is_soliton()));
            report.push(Check::flag("expanding", sol.expanding));
            report.artifacts = serde_json::json!({
                "lambda": sol.lambda,
                "verdict": format!("{:?}", sol.verdict),
                "almost_kahler": pkg.report.almost_kahler,
                "derivation_coords": sol.derivation_coords,
            });
            println!(
                "soliton verdict: {:?}, lambda = {:.6}, residual = {:.3e}",
                sol.verdict, sol.lambda, sol.relative_residual
            );
            Ok(Some(report))
        }
        Command::Isometry { id, metric } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let sm = build_type_model(&rep, tol)?;
            let spec = parse_metric(&sm, metric, tol)?;
            let pkg = geometry_of(&sm, &spec, tol)?;
            let iso = i_filtration(&pkg, tol);
            let gb = build_killing_algebra(&sm.model, &pkg, &iso, tol)?;
            let d = dichotomy(&sm.model, &iso, tol);
            let inv = isometry_invariants(&sm.model, &pkg, &iso, tol);
            let mut report = RunReport::new("isometry", id);
            report.push(Check::new(
                "gb_jacobi",
                lie::jacobi_residual(&gb),
                tol.residual,
            ));
            report.push(Check::new(
                "stabilizer_residual",
                inv.stabilizer_residual,
                tol.residual * 100.0,
            ));
            report.push(Check::new("closure", inv.closure_residual, 1e-7));
            report.push(Check::new("nomizu_contained", inv.nomizu_contained, 1e-7));
            if sm.is_type_iii() {
                let split = centralizer_split(&sm.rep, &spec.g_v, tol);
                report.push(Check::ints(
                    "dim_gb_reconciliation",
                    gb.dim,
                    sm.rep.dim_v + sm.rep.dim_l() + split.c_minus.len(),
                ));
                report.push(Check::ints("i_minus_dim", d.i_minus_dim, 0));
            }
            report.artifacts = serde_json::json!({
                "dim_i": iso.i_basis.len(),
                "k_stabilized": iso.k_stabilized,
                "dims": iso.dims,
                "dim_gb": gb.dim,
                "dichotomy": serde_json::to_value(&d)?,
            });
            println!(
                "dim i = {}, stabilized after {} refinements, dim g_b = {}, classification: {}",
                iso.i_basis.len(),
                iso.k_stabilized,
                gb.dim,
                d.classification
            );
            Ok(Some(report))
        }
        Command::Moduli { id } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let desc = moduli_space(&rep, tol)?;
            let mut report = RunReport::new("moduli", id);
            report.push(Check::ints(
                "c_minus_dim",
                desc.c_minus_dim,
                desc.generators.len(),
            ));
            report.artifacts = serde_json::json!({
                "c_minus_dim": desc.c_minus_dim,
                "normal_form": format!("{:?}", desc.normal_form),
                "domain": desc.domain,
                "generators": desc.generators.iter().map(matrix_rows).collect::<Vec<_>>(),
            });
            println!(
                "c- dimension {}, normal form {:?}, domain {}",
                desc.c_minus_dim, desc.normal_form, desc.domain
            );
            Ok(Some(report))
        }
        Command::ModuliScan {
            id,
            grid,
            csv,
            lmax,
        } => {
            let rep = catalog::build_rep(strip_model(id), tol)?;
            let sm = build_type_model(&rep, tol)?;
            let desc = moduli_space(&rep, tol)?;
            let d = match desc.normal_form {
                NormalForm::ComplexDelta(d) => d,
                _ => {
                    return Err(Error::OutOfDomain(
                        "moduli-scan needs a complex-type normal form".into(),
                    ))
                }
            };
            let mut lines = vec!["lambda;spectrum;soliton_residual".to_string()];
            for lambda in delta_grid(d, *grid, *lmax) {
                let spec = g_lambda(&sm, &lambda, tol)?;
                let pkg = geometry_of(&sm, &spec, tol)?;
                let sol = soliton_check(&sm, &pkg, tol);
                let s = ricci_spectrum_invariant(&sm, &pkg);
                lines.push(format!(
                    "{};{};{:.6e}",
                    lambda
                        .iter()
                        .map(|x| format!("{x:.4}"))
                        .collect::<Vec<_>>()
                        .join(","),
                    s.spectrum
                        .iter()
                        .map(|x| format!("{x:.10e}"))
                        .collect::<Vec<_>>()
                        .join(","),
                    sol.relative_residual
                ));
            }
            let body = lines.join("\n") + "\n";
            match csv {
                Some(path) => std::fs::write(path, &body)?,
                None => {
                    std::io::stdout().write_all(body.as_bytes())?;
                }
            }
            Ok(None)
        }
        Command::VerifyAll => {
            let mut report = RunReport::new("verify-all", "catalog");
            for id in catalog::catalog_ids(&config.ranks) {
                verify_one(&id, tol, &mut report)?;
            }
            println!("{} checks", report.checks.len());
            Ok(Some(report))
        }
    }
}

fn g_h_of(rep: &trisym::rep::Representation, tol: &Tolerances) -> (DMatrix<f64>, f64) {
    let b = lie::killing_form(&rep.algebra, tol);
    let hn = rep.cartan.h_indices.len();
    let sign = match rep.type_flag {
        AlgebraType::NonCompact => 1.0,
        AlgebraType::Compact => -1.0,
    };
    let mut g_h = DMatrix::zeros(hn, hn);
    for (a, &i) in rep.cartan.h_indices.iter().enumerate() {
        for (c, &j) in rep.cartan.h_indices.iter().enumerate() {
            g_h[(a, c)] = sign * b.matrix[(i, j)];
        }
    }
    (g_h, sign)
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// The per-entry verification block used by verify-all.
fn verify_one(id: &str, tol: &Tolerances, report: &mut RunReport) -> Result<(), Error> {
    let rep = catalog::build_rep(id, tol)?;
    let adm = check_admissible(&rep, tol);
    report.push(Check::flag(&format!("{id}/admissible"), adm.verdict));
    report.push(Check::flag(
        &format!("{id}/background"),
        background_metric(&rep, tol).is_ok(),
    ));
    let (g_h, _) = g_h_of(&rep, tol);
    let cas = casimir(&rep, &g_h, tol)?;
    report.push(Check::new(
        &format!("{id}/casimir"),
        cas.identity_residual,
        tol.residual,
    ));
    let sm = build_type_model(&rep, tol)?;
    report.push(Check::new(
        &format!("{id}/jacobi"),
        lie::jacobi_residual(&sm.model.algebra),
        tol.residual,
    ));
    let model_report = verify_model_identities(&sm.model, tol);
    report.push(Check::flag(
        &format!("{id}/model_identities"),
        model_report.all_pass,
    ));
    report.push(Check::new(
        &format!("{id}/block_structure"),
        block_structure_residual(&sm, tol)?,
        tol.angle,
    ));
    let nij = nijenhuis(&sm.model, tol);
    report.push(Check::new(
        &format!("{id}/nijenhuis_vs_torsion"),
        nij.residual_vs_torsion,
        tol.residual,
    ));
    report.push(Check::ints(
        &format!("{id}/nijenhuis_kernel"),
        nij.kernel_dim,
        0,
    ));
    let w = curvature_nullity_w(&sm.model, tol)?;
    report.push(Check::new(
        &format!("{id}/nullity_agreement"),
        w.agreement,
        tol.angle,
    ));
    let sr = structural_report(&sm, tol)?;
    report.push(Check::flag(&format!("{id}/structure"), sr.pass));
    let spec = background_metric_spec(&sm, 1.0, tol)?;
    let pkg = geometry_of(&sm, &spec, tol)?;
    report.push(Check::new(
        &format!("{id}/gray_g2"),
        pkg.report.gray_g2,
        tol.residual * 100.0,
    ));
    let checks = semidirect_geometry_checks(&sm, &spec, &pkg, tol);
    let comp = checks
        .curv_component_hh
        .max(checks.curv_component_mixed)
        .max(checks.curv_component_vv)
        .max(checks.curv_component_vanishing);
    report.push(Check::new(
        &format!("{id}/curvature_components"),
        comp,
        tol.residual * 100.0,
    ));
    match rep.type_flag {
        AlgebraType::NonCompact => {
            report.push(Check::flag(
                &format!("{id}/almost_kahler"),
                pkg.report.almost_kahler,
            ));
            let sol = soliton_check(&sm, &pkg, tol);
            report.push(Check::flag(
                &format!("{id}/soliton_expanding"),
                sol.is_soliton() && sol.expanding,
            ));
            let fol = foliation_check(&sm, &pkg, tol);
            report.push(Check::flag(&format!("{id}/polar"), fol.polar));
            // Local irreducibility is a theorem only for simple L; the
            // degenerate entries with product L split correctly.
            if lie::is_simple(&rep.algebra, tol) {
                let red = reducibility_test(&sm.model, &pkg, tol);
                report.push(Check::flag(&format!("{id}/irreducible"), red.irreducible));
            }
        }
        AlgebraType::Compact => {
            report.push(Check::flag(
                &format!("{id}/not_almost_kahler"),
                !pkg.report.almost_kahler,
            ));
            let red = reducibility_test(&sm.model, &pkg, tol);
            let vb = geometry::v_block_subspace(&sm);
            let split_ok = !red.irreducible
                && red
                    .splitting
                    .as_ref()
                    .map(|s| s.distance(&vb) < tol.angle * 100.0)
                    .unwrap_or(false);
            report.push(Check::flag(&format!("{id}/reducible_v_h"), split_ok));
        }
    }
    Ok(())
}
