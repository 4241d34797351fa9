//! Invariant metrics, intrinsic torsion, Riemannian curvature, Ricci,
//! algebraic soliton verification, Kaehler-type condition checks, the polar
//! foliation structure and de Rham reducibility testing, all at infinitesimal
//! model level.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lie;
use crate::linalg::{self, Subspace};
use crate::rep::AlgebraType;
use crate::semidirect::{derivation_basis, SemidirectModel};
use crate::threesym::{coordinate_subspace, ThreeSymModel};

/// An invariant metric on the moving part of a semidirect model, encoded as
/// background metric, centralizer deformation S and scale t on the H block:
/// g = h_V((1 + S) ., .) + t g_H with g_H = B_L|_H (sign-flipped in the
/// compact branch so it stays positive definite).
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub s: DMatrix<f64>,
    pub t: f64,
    /// Metric matrix on the V block: h_V (1 + S).
    pub g_v: DMatrix<f64>,
    /// Metric matrix on the H block: t (+/- B_L|_H).
    pub g_h: DMatrix<f64>,
    /// Block metric on the moving part (V block then H block).
    pub g: DMatrix<f64>,
    pub branch: AlgebraType,
}

/// Builds and validates a metric from the deformation S and scale t.
pub fn metric_from_s(
    sm: &SemidirectModel,
    s: DMatrix<f64>,
    t: f64,
    tol: &Tolerances,
) -> Result<MetricSpec> {
    let rep = &sm.rep;
    let nv = rep.dim_v;
    if s.nrows() != nv || s.ncols() != nv {
        return Err(Error::InvalidDimension(format!("S must be {nv} x {nv}")));
    }
    if t <= 0.0 {
        return Err(Error::OutOfDomain("scale t must be positive".into()));
    }
    let h = &rep.h_v;
    let h_inv = h
        .clone()
        .try_inverse()
        .expect("background metric invertible");
    let j_v = rep.j_v.as_ref().expect("catalog representations carry J_V");

    // S must be symmetric for h and lie in the right centralizer branch.
    let s_sym = linalg::max_abs(&(linalg::metric_transpose(&s, h, &h_inv) - &s));
    let branch_elt = match rep.type_flag {
        AlgebraType::NonCompact => &s * j_v,
        AlgebraType::Compact => s.clone(),
    };
    let mut cent_res = s_sym;
    for r in &rep.rho {
        cent_res = cent_res.max(linalg::max_abs(&linalg::comm(&branch_elt, r)));
    }
    if rep.type_flag == AlgebraType::NonCompact {
        // S J_V must be skew: equivalent to [S, J_V] = 0 given symmetry.
        cent_res = cent_res.max(linalg::max_abs(&linalg::comm(&s, j_v)));
    }
    let scale = linalg::max_abs(&s).max(1.0);
    if cent_res > tol.residual * scale * 100.0 {
        return Err(Error::NotInCentralizer { residual: cent_res });
    }

    // 1 + S positive definite (as an h-symmetric operator).
    let one_plus = DMatrix::<f64>::identity(nv, nv) + &s;
    let g_v = h * &one_plus;
    let g_v = 0.5 * (&g_v + g_v.transpose());
    let min_eig = linalg::sym_eigenvalues(&g_v)
        .first()
        .cloned()
        .unwrap_or(0.0);
    if min_eig <= 0.0 {
        return Err(Error::NotPositive { min_eig });
    }

    // J-invariance and isotropy invariance of g_V.
    let jinv = linalg::max_abs(&(j_v.transpose() * &g_v * j_v - &g_v));
    let mut iso = jinv;
    for &k in &rep.cartan.k_indices {
        iso = iso.max(linalg::max_abs(
            &(rep.rho[k].transpose() * &g_v + &g_v * &rep.rho[k]),
        ));
    }
    if iso > tol.residual * scale * 100.0 {
        return Err(Error::NotInCentralizer { residual: iso });
    }

    // H-block metric: +/- B_L restricted to H.
    let b = lie::killing_form(&rep.algebra, tol);
    let hn = rep.cartan.h_indices.len();
    let sign = match rep.type_flag {
        AlgebraType::NonCompact => 1.0,
        AlgebraType::Compact => -1.0,
    };
    let mut g_h = DMatrix::zeros(hn, hn);
    for (a, &i) in rep.cartan.h_indices.iter().enumerate() {
        for (c, &j) in rep.cartan.h_indices.iter().enumerate() {
            g_h[(a, c)] = sign * t * b.matrix[(i, j)];
        }
    }

    let mut g = DMatrix::zeros(nv + hn, nv + hn);
    g.view_mut((0, 0), (nv, nv)).copy_from(&g_v);
    g.view_mut((nv, nv), (hn, hn)).copy_from(&g_h);
    Ok(MetricSpec {
        s,
        t,
        g_v,
        g_h,
        g,
        branch: rep.type_flag,
    })
}

/// The background metric (S = 0) at scale t.
pub fn background_metric_spec(
    sm: &SemidirectModel,
    t: f64,
    tol: &Tolerances,
) -> Result<MetricSpec> {
    let nv = sm.rep.dim_v;
    metric_from_s(sm, DMatrix::zeros(nv, nv), t, tol)
}

/// Residual report carried by a geometry package.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    pub eta_skew: f64,
    pub eta_j_relations: f64,
    pub riemann_skew_last_pair: f64,
    pub riemann_pair_symmetry: f64,
    pub riemann_first_bianchi: f64,
    pub gray_g1: f64,
    pub gray_g2: f64,
    pub gray_g3: f64,
    pub d_omega_norm: f64,
    pub quasi_kahler_type: f64,
    pub almost_kahler: bool,
}

/// Intrinsic torsion, curvature, Ricci and Kaehler data of a model with an
/// invariant metric on its moving part.
pub struct GeometryPackage {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub j: DMatrix<f64>,
    /// eta[a] = operator eta_{e_a} on the moving part.
    pub eta: Vec<DMatrix<f64>>,
    /// r_op[a][b] = Riemann operator R(e_a, e_b).
    pub r_op: Vec<Vec<DMatrix<f64>>>,
    /// r_low[a][b] = lowered matrix (c, d) -> R(e_a, e_b, e_c, e_d).
    pub r_low: Vec<Vec<DMatrix<f64>>>,
    pub ric: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub report: GeometryReport,
}

impl GeometryPackage {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// JSON form with tensors as row-major nested arrays. The rank-four
    /// curvature tensor is included up to the given dimension bound and
    /// marked as omitted beyond it.
    pub fn to_json_value(&self, full_tensor_max_dim: usize) -> serde_json::Value {
        let n = self.dim();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                .collect()
        };
        let eta: Vec<Vec<Vec<f64>>> = self.eta.iter().map(&rows).collect();
        let riemann = if n <= full_tensor_max_dim {
            serde_json::json!(self
                .r_low
                .iter()
                .map(|row| row.iter().map(&rows).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        } else {
            serde_json::json!("omitted (dimension above bound)")
        };
        serde_json::json!({
            "g": rows(&self.g),
            "j": rows(&self.j),
            "omega": rows(&self.omega),
            "ric": rows(&self.ric),
            "eta": eta,
            "riemann_lowered": riemann,
            "report": self.report,
        })
    }

    pub fn eta_vec(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            if x[a] != 0.0 {
                m += x[a] * &self.eta[a];
            }
        }
        m
    }

    pub fn r_lowered(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.r_low[a][b][(c, d)]
    }

    /// Ricci operator g^-1 ric.
    pub fn ricci_operator(&self) -> DMatrix<f64> {
        &self.g_inv * &self.ric
    }
}

/// Computes the geometry package for any model and metric matrix on the
/// moving part. Fails with `SymmetryViolation` when the curvature does not
/// acquire the Riemann pair symmetry, which signals a metric/torsion
/// inconsistency.
pub fn compute_geometry(
    m: &ThreeSymModel,
    g: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<GeometryPackage> {
    let nv = m.dim_v();
    let g = 0.5 * (g + g.transpose());
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositive { min_eig: 0.0 })?;
    let j = m.j.clone();

    // Intrinsic torsion from the invariant formula
    // 2 g(eta_a b, c) = g(tau(a,b), c) - g(tau(b,c), a) + g(tau(c,a), b).
    // Lowered torsion lt[a][b] = g tau(a, b), hoisted out of the triple loop.
    let mut lt = vec![vec![DVector::<f64>::zeros(nv); nv]; nv];
    for a in 0..nv {
        for b in 0..nv {
            lt[a][b] = &g * m.tau(a, b);
        }
    }
    let mut eta = Vec::with_capacity(nv);
    for a in 0..nv {
        let mut lowered = DMatrix::zeros(nv, nv); // (b, c) -> g(eta_a b, c)
        for b in 0..nv {
            for c in 0..nv {
                let val = lt[a][b][c] - lt[b][c][a] + lt[c][a][b];
                lowered[(b, c)] = 0.5 * val;
            }
        }
        // eta_a column b solves g(eta_a b, .) = lowered[b, .].
        eta.push(&g_inv * lowered.transpose());
    }

    // Residuals: skewness and the J relations eta_{Jv} = eta_v J = -J eta_v.
    let mut eta_skew: f64 = 0.0;
    let mut eta_j: f64 = 0.0;
    for a in 0..nv {
        eta_skew = eta_skew.max(linalg::max_abs(&(eta[a].transpose() * &g + &g * &eta[a])));
        let mut eta_ja = DMatrix::zeros(nv, nv);
        for p in 0..nv {
            if m.j[(p, a)] != 0.0 {
                eta_ja += m.j[(p, a)] * &eta[p];
            }
        }
        eta_j = eta_j.max(linalg::max_abs(&(&eta_ja - &eta[a] * &j)));
        eta_j = eta_j.max(linalg::max_abs(&(&eta_ja + &j * &eta[a])));
    }

    // Curvature operators: R^g(a, b) = R^D(a, b) - [eta_a, eta_b] + eta_{tau(a,b)}.
    let mut r_op = vec![vec![DMatrix::zeros(nv, nv); nv]; nv];
    let mut r_low = vec![vec![DMatrix::zeros(nv, nv); nv]; nv];
    for a in 0..nv {
        for b in 0..nv {
            let mut op = m.rd(a, b).clone();
            op -= linalg::comm(&eta[a], &eta[b]);
            let t_ab = m.tau(a, b);
            let mut eta_t = DMatrix::zeros(nv, nv);
            for p in 0..nv {
                if t_ab[p] != 0.0 {
                    eta_t += t_ab[p] * &eta[p];
                }
            }
            op += eta_t;
            r_low[a][b] = op.transpose() * &g;
            r_op[a][b] = op;
        }
    }

    let gscale = linalg::max_abs(&g).max(1.0);
    let mut skew_cd: f64 = 0.0;
    let mut pair_sym: f64 = 0.0;
    let mut bianchi: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            skew_cd = skew_cd.max(linalg::max_abs(
                &(r_low[a][b].clone() + r_low[a][b].transpose()),
            ));
            for c in 0..nv {
                for d in 0..nv {
                    pair_sym = pair_sym.max((r_low[a][b][(c, d)] - r_low[c][d][(a, b)]).abs());
                    let cyc = r_low[a][b][(c, d)] + r_low[b][c][(a, d)] + r_low[c][a][(b, d)];
                    bianchi = bianchi.max(cyc.abs());
                }
            }
        }
    }
    let rscale = r_low
        .iter()
        .flatten()
        .map(linalg::max_abs)
        .fold(1.0f64, f64::max);
    if pair_sym > tol.residual * rscale * 1000.0 {
        return Err(Error::SymmetryViolation { residual: pair_sym });
    }

    // Ricci: ric(a, b) = sum_{c,d} g^{cd} R(a, e_c, b, e_d).
    let mut ric = DMatrix::zeros(nv, nv);
    for a in 0..nv {
        for b in 0..nv {
            let mut s = 0.0;
            for c in 0..nv {
                for d in 0..nv {
                    if g_inv[(c, d)] != 0.0 {
                        s += g_inv[(c, d)] * r_low[a][c][(b, d)];
                    }
                }
            }
            ric[(a, b)] = s;
        }
    }

    // Gray curvature residuals. J columns are sparse (signed permutations in
    // the catalog bases), so contractions iterate nonzero entries only.
    let jmat = &j;
    let jcols: Vec<Vec<(usize, f64)>> = (0..nv)
        .map(|a| {
            (0..nv)
                .filter(|&p| jmat[(p, a)] != 0.0)
                .map(|p| (p, jmat[(p, a)]))
                .collect()
        })
        .collect();
    let twist1 = |slot: usize, a: usize, b: usize, c: usize, d: usize| -> f64 {
        let idx = [a, b, c, d];
        let mut total = 0.0;
        for &(p, w) in &jcols[idx[slot]] {
            let mut nw = idx;
            nw[slot] = p;
            total += w * r_low[nw[0]][nw[1]][(nw[2], nw[3])];
        }
        total
    };
    let mut g1: f64 = 0.0;
    let mut g2: f64 = 0.0;
    let mut g3: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            for c in 0..nv {
                for d in 0..nv {
                    let r = r_low[a][b][(c, d)];
                    let mut t12 = 0.0;
                    for &(p, wp) in &jcols[a] {
                        for &(q, wq) in &jcols[b] {
                            t12 += wp * wq * r_low[p][q][(c, d)];
                        }
                    }
                    g1 = g1.max((t12 - r).abs());
                    let sum4 = twist1(0, a, b, c, d)
                        + twist1(1, a, b, c, d)
                        + twist1(2, a, b, c, d)
                        + twist1(3, a, b, c, d);
                    g2 = g2.max(sum4.abs());
                    let mut t1234 = 0.0;
                    for &(p, wp) in &jcols[a] {
                        for &(q, wq) in &jcols[b] {
                            for &(u, wu) in &jcols[c] {
                                for &(v, wv) in &jcols[d] {
                                    t1234 += wp * wq * wu * wv * r_low[p][q][(u, v)];
                                }
                            }
                        }
                    }
                    g3 = g3.max((t1234 - r).abs());
                }
            }
        }
    }

    // Kaehler form and its exterior derivative: omega(tau(a, b), .) hoisted
    // as lowered vectors.
    let omega = j.transpose() * &g;
    let mut om_tau = vec![vec![DVector::<f64>::zeros(nv); nv]; nv];
    for a in 0..nv {
        for b in 0..nv {
            om_tau[a][b] = omega.transpose() * m.tau(a, b);
        }
    }
    let mut domega = vec![0.0; nv * nv * nv];
    let mut d_omega_norm: f64 = 0.0;
    let mut quasi: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            for c in 0..nv {
                let val = -om_tau[a][b][c] - om_tau[b][c][a] - om_tau[c][a][b];
                domega[(a * nv + b) * nv + c] = val;
                d_omega_norm = d_omega_norm.max(val.abs());
            }
        }
    }
    for a in 0..nv {
        for b in 0..nv {
            for c in 0..nv {
                // Type (3,0)+(0,3): d_omega(J., J., .) = -d_omega.
                let mut tj = 0.0;
                for &(p, wp) in &jcols[a] {
                    for &(q, wq) in &jcols[b] {
                        tj += wp * wq * domega[(p * nv + q) * nv + c];
                    }
                }
                quasi = quasi.max((tj + domega[(a * nv + b) * nv + c]).abs());
            }
        }
    }
    let almost_kahler = d_omega_norm < tol.residual * gscale * 100.0;

    let report = GeometryReport {
        eta_skew,
        eta_j_relations: eta_j,
        riemann_skew_last_pair: skew_cd,
        riemann_pair_symmetry: pair_sym,
        riemann_first_bianchi: bianchi,
        gray_g1: g1,
        gray_g2: g2,
        gray_g3: g3,
        d_omega_norm,
        quasi_kahler_type: quasi,
        almost_kahler,
    };
    Ok(GeometryPackage {
        g,
        g_inv,
        j,
        eta,
        r_op,
        r_low,
        ric,
        omega,
        report,
    })
}

/// A symmetric-space metric for a model with vanishing torsion: the Killing
/// form restricted to the moving part, sign-corrected to be positive definite.
pub fn symmetric_space_metric(m: &ThreeSymModel, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let b = lie::killing_form(&m.algebra, tol);
    let b_vv = m.v_basis.basis.transpose() * &b.matrix * &m.v_basis.basis;
    let ev = linalg::sym_eigenvalues(&b_vv);
    if ev.iter().all(|&x| x > 0.0) {
        Ok(b_vv)
    } else if ev.iter().all(|&x| x < 0.0) {
        Ok(-b_vv)
    } else {
        Err(Error::BackgroundCheckFailed(
            "Killing form is indefinite on the moving part".into(),
        ))
    }
}

/// Residuals of the semidirect block identities of the intrinsic torsion and
/// the component formulas for curvature and Ricci.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemidirectGeometryReport {
    pub eta_blocks: f64,
    pub eta_vs_rho_plus: f64,
    pub eta_vs_rho_minus: f64,
    pub curv_component_hh: f64,
    pub curv_component_mixed: f64,
    pub curv_component_vv: f64,
    pub curv_component_vanishing: f64,
    pub ricci_v_block: f64,
    pub ricci_mixed_zero: f64,
    pub ricci_h_block: f64,
    pub q_identity: f64,
    pub trace_identity: f64,
}

/// rho split into g_V-symmetric and skew parts for every H generator, plus
/// the Casimir-type operator and Q, all over a g_H-orthonormal basis.
pub struct RhoSplit {
    pub rho_h: Vec<DMatrix<f64>>,
    pub rho_plus: Vec<DMatrix<f64>>,
    pub rho_minus: Vec<DMatrix<f64>>,
    /// Same data over a g_H-orthonormal basis of H.
    pub rho_on: Vec<DMatrix<f64>>,
    pub rho_on_plus: Vec<DMatrix<f64>>,
    pub rho_on_minus: Vec<DMatrix<f64>>,
    pub casimir: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

pub fn rho_split(sm: &SemidirectModel, spec: &MetricSpec) -> RhoSplit {
    let rep = &sm.rep;
    let nv = rep.dim_v;
    let hn = rep.cartan.h_indices.len();
    let g_v = &spec.g_v;
    let g_v_inv = g_v.clone().try_inverse().expect("metric invertible");
    let split = |r: &DMatrix<f64>| -> (DMatrix<f64>, DMatrix<f64>) {
        let star = linalg::metric_transpose(r, g_v, &g_v_inv);
        (0.5 * (r + &star), 0.5 * (r - &star))
    };
    let mut rho_h = Vec::new();
    let mut rho_plus = Vec::new();
    let mut rho_minus = Vec::new();
    for &h in &rep.cartan.h_indices {
        let r = rep.rho[h].clone();
        let (p, mn) = split(&r);
        rho_h.push(r);
        rho_plus.push(p);
        rho_minus.push(mn);
    }
    // Orthonormal basis of H for g_H.
    let chol = spec
        .g_h
        .clone()
        .cholesky()
        .expect("H metric positive definite");
    let l_inv_t = chol
        .l()
        .try_inverse()
        .expect("cholesky factor invertible")
        .transpose();
    let mut rho_on = Vec::new();
    let mut rho_on_plus = Vec::new();
    let mut rho_on_minus = Vec::new();
    let mut casimir = DMatrix::zeros(nv, nv);
    let mut q = DMatrix::zeros(nv, nv);
    for k in 0..hn {
        let mut r = DMatrix::zeros(nv, nv);
        for a in 0..hn {
            let coef = l_inv_t[(a, k)];
            if coef != 0.0 {
                r += coef * &rho_h[a];
            }
        }
        let (p, mn) = split(&r);
        casimir += &r * &r;
        q += linalg::comm(&mn, &p);
        rho_on.push(r);
        rho_on_plus.push(p);
        rho_on_minus.push(mn);
    }
    RhoSplit {
        rho_h,
        rho_plus,
        rho_minus,
        rho_on,
        rho_on_plus,
        rho_on_minus,
        casimir,
        q,
    }
}

/// Verifies the block structure of the intrinsic torsion, the curvature
/// component formulas and the Ricci block formulas on a semidirect model.
pub fn semidirect_geometry_checks(
    sm: &SemidirectModel,
    spec: &MetricSpec,
    pkg: &GeometryPackage,
    tol: &Tolerances,
) -> SemidirectGeometryReport {
    let _ = tol;
    let rep = &sm.rep;
    let nv = rep.dim_v;
    let hn = rep.cartan.h_indices.len();
    let n = nv + hn;
    let split = rho_split(sm, spec);

    // Block structure: eta_V V in H, eta_H V in V, eta_V H in V, eta_H H = 0.
    let mut blocks: f64 = 0.0;
    for a in 0..n {
        let m = &pkg.eta[a];
        if a < nv {
            // Columns in V must land in H; columns in H must land in V.
            for b in 0..nv {
                for r in 0..nv {
                    blocks = blocks.max(m[(r, b)].abs());
                }
            }
            for b in nv..n {
                for r in nv..n {
                    blocks = blocks.max(m[(r, b)].abs());
                }
            }
        } else {
            for b in 0..nv {
                for r in nv..n {
                    blocks = blocks.max(m[(r, b)].abs());
                }
            }
            for b in nv..n {
                blocks = blocks.max(m.column(b).amax());
            }
        }
    }

    // g(eta_{v1} v2, x) = g_V(rho^+(x) v1, v2) and
    // g(eta_x v1, v2) = g_V(rho^-(x) v1, v2), with all lowerings hoisted.
    let g = &pkg.g;
    let eta_low: Vec<DMatrix<f64>> = pkg.eta.iter().map(|e| g * e).collect();
    let mut plus_res: f64 = 0.0;
    let mut minus_res: f64 = 0.0;
    for (xi, x) in (nv..n).enumerate() {
        let rp_low = &spec.g_v * &split.rho_plus[xi];
        let rm_low = &spec.g_v * &split.rho_minus[xi];
        for v1 in 0..nv {
            for v2 in 0..nv {
                plus_res = plus_res.max((eta_low[v1][(x, v2)] - rp_low[(v2, v1)]).abs());
                minus_res = minus_res.max((eta_low[x][(v2, v1)] - rm_low[(v2, v1)]).abs());
            }
        }
    }

    // Curvature components. Mixed-type components with three indices in one
    // block vanish; the others have closed forms.
    let mut vanish: f64 = 0.0;
    let mut hh: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    let mut vv: f64 = 0.0;
    let alg = &rep.algebra;
    let h_idx = &rep.cartan.h_indices;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v_count = [a, b, c, d].iter().filter(|&&i| i < nv).count();
                    let r = pkg.r_low[a][b][(c, d)];
                    match v_count {
                        3 | 1 => vanish = vanish.max(r.abs()),
                        _ => {}
                    }
                }
            }
        }
    }
    // (ii) R(x1, x2, x3, x4) = g_H([[x1, x2], x3], x4) with brackets in L.
    for x1 in 0..hn {
        for x2 in 0..hn {
            for x3 in 0..hn {
                let e1 = unit(rep.dim_l(), h_idx[x1]);
                let e2 = unit(rep.dim_l(), h_idx[x2]);
                let e3 = unit(rep.dim_l(), h_idx[x3]);
                let br = alg.bracket(&alg.bracket(&e1, &e2), &e3);
                // H-coordinates of the double bracket.
                for x4 in 0..hn {
                    let mut rhs = 0.0;
                    for (pos, &hidx) in h_idx.iter().enumerate() {
                        rhs += br[hidx] * spec.g_h[(pos, x4)];
                    }
                    let lhs = pkg.r_low[nv + x1][nv + x2][(nv + x3, nv + x4)];
                    hh = hh.max((lhs - rhs).abs());
                }
            }
        }
    }
    // (iii) R(v1, x1, v2, x2) = -g(rho+(x1)v1, rho+(x2)v2)
    //        + g([rho-(x1), rho+(x2)] v1, v2), paired with g_V.
    for x1 in 0..hn {
        for x2 in 0..hn {
            let m1 = &split.rho_plus[x1];
            let m2 = &split.rho_plus[x2];
            let bracket = linalg::comm(&split.rho_minus[x1], m2);
            // rhs(v1, v2) = -(m1^T g_V m2)[v1, v2] + (g_V bracket)[v2, v1].
            let quad = m1.transpose() * &spec.g_v * m2;
            let br_low = &spec.g_v * &bracket;
            for v1 in 0..nv {
                for v2 in 0..nv {
                    let lhs = pkg.r_low[v1][nv + x1][(v2, nv + x2)];
                    let rhs = -quad[(v1, v2)] + br_low[(v2, v1)];
                    mixed = mixed.max((lhs - rhs).abs());
                }
            }
        }
    }
    // (iv) R(v1, v2, v3, v4) = g(eta_{v2} v3, eta_{v1} v4) - g(eta_{v1} v3, eta_{v2} v4).
    for v1 in 0..nv {
        for v2 in 0..nv {
            // pair(v3, v4) = (eta_{v2}^T g eta_{v1})[v3, v4] and transposed roles.
            let p21 = pkg.eta[v2].transpose() * &eta_low[v1];
            let p12 = pkg.eta[v1].transpose() * &eta_low[v2];
            for v3 in 0..nv {
                for v4 in 0..nv {
                    let lhs = pkg.r_low[v1][v2][(v3, v4)];
                    vv = vv.max((lhs - (p21[(v3, v4)] - p12[(v3, v4)])).abs());
                }
            }
        }
    }

    // Ricci blocks: ric(v1, v2) = g_V(Q v1, v2); ric(V, H) = 0;
    // ric(x1, x2) = -Tr(rho+(x1) rho+(x2)) + ric_H(x1, x2).
    let mut ric_v: f64 = 0.0;
    for v1 in 0..nv {
        for v2 in 0..nv {
            let rhs = (spec.g_v.clone() * split.q.column(v1))[v2];
            ric_v = ric_v.max((pkg.ric[(v1, v2)] - rhs).abs());
        }
    }
    let mut ric_mixed: f64 = 0.0;
    for v in 0..nv {
        for x in nv..n {
            ric_mixed = ric_mixed.max(pkg.ric[(v, x)].abs().max(pkg.ric[(x, v)].abs()));
        }
    }
    // ric_H from the restricted curvature.
    let g_h_inv = spec.g_h.clone().try_inverse().expect("H metric invertible");
    let mut ric_h: f64 = 0.0;
    for x1 in 0..hn {
        for x2 in 0..hn {
            let mut sym_part = 0.0;
            for c in 0..hn {
                for d in 0..hn {
                    if g_h_inv[(c, d)] != 0.0 {
                        sym_part += g_h_inv[(c, d)] * pkg.r_low[nv + x1][nv + c][(nv + x2, nv + d)];
                    }
                }
            }
            let tr = (&split.rho_plus[x1] * &split.rho_plus[x2]).trace();
            let rhs = -tr + sym_part;
            ric_h = ric_h.max((pkg.ric[(nv + x1, nv + x2)] - rhs).abs());
        }
    }

    // Deformation identities: Q = 2 S (1 - S^2)^-1 C and
    // Tr(rho+ rho+) = Tr((1 - S^2)^-1 rho rho) over the orthonormal basis.
    let nvi = DMatrix::<f64>::identity(nv, nv);
    let s2 = &spec.s * &spec.s;
    let inv = (&nvi - &s2).try_inverse().expect("1 - S^2 invertible");
    let q_pred = 2.0 * &spec.s * &inv * &split.casimir;
    let q_identity = linalg::max_abs(&(&split.q - q_pred));
    let mut trace_identity: f64 = 0.0;
    for k in 0..split.rho_on.len() {
        let lhs = (&split.rho_on_plus[k] * &split.rho_on_plus[k]).trace();
        let rhs = (&inv * &split.rho_on[k] * &split.rho_on[k]).trace();
        trace_identity = trace_identity.max((lhs - rhs).abs());
    }

    SemidirectGeometryReport {
        eta_blocks: blocks,
        eta_vs_rho_plus: plus_res,
        eta_vs_rho_minus: minus_res,
        curv_component_hh: hh,
        curv_component_mixed: mixed,
        curv_component_vv: vv,
        curv_component_vanishing: vanish,
        ricci_v_block: ric_v,
        ricci_mixed_zero: ric_mixed,
        ricci_h_block: ric_h,
        q_identity,
        trace_identity,
    }
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Algebraic Ricci soliton check: least-squares solve of
/// ric = lambda g + sym(g zeta) over lambda and the span of derivations
/// restricted to the moving part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SolitonVerdict {
    Soliton,
    NotSoliton,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolitonResult {
    pub verdict: SolitonVerdict,
    pub lambda: f64,
    pub relative_residual: f64,
    pub derivation_coords: Vec<f64>,
    pub expanding: bool,
}

impl SolitonResult {
    pub fn is_soliton(&self) -> bool {
        matches!(self.verdict, SolitonVerdict::Soliton)
    }
}

pub fn soliton_check(
    sm: &SemidirectModel,
    pkg: &GeometryPackage,
    tol: &Tolerances,
) -> SolitonResult {
    let ders = derivation_basis(sm, tol);
    soliton_check_with_derivations(&moving_blocks(sm, &ders), pkg, tol)
}

/// Moving-part blocks of ambient endomorphisms of a semidirect algebra:
/// rows/columns restricted to the V and H index ranges.
pub fn moving_blocks(sm: &SemidirectModel, mats: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let nv = sm.rep.dim_v;
    let hn = sm.h_range.len();
    let n = nv + hn;
    let pick = |i: usize| -> usize {
        if i < nv {
            i
        } else {
            sm.h_range.start + (i - nv)
        }
    };
    mats.iter()
        .map(|m| DMatrix::from_fn(n, n, |r, c| m[(pick(r), pick(c))]))
        .collect()
}

/// Core least-squares soliton solve with an explicit derivation span on the
/// moving part.
pub fn soliton_check_with_derivations(
    ders: &[DMatrix<f64>],
    pkg: &GeometryPackage,
    tol: &Tolerances,
) -> SolitonResult {
    let n = pkg.dim();
    let cols = 1 + ders.len();
    let mut a = DMatrix::zeros(n * n, cols);
    a.set_column(0, &linalg::vectorize(&pkg.g));
    for (k, d) in ders.iter().enumerate() {
        let sym = 0.5 * (d.transpose() * &pkg.g + &pkg.g * d);
        a.set_column(1 + k, &linalg::vectorize(&sym));
    }
    let b = linalg::vectorize(&pkg.ric);
    let x = linalg::least_squares(&a, &b);
    let resid_vec = {
        let mut r = -b.clone();
        r += {
            let mut acc = DVector::zeros(n * n);
            acc += x[0] * linalg::vectorize(&pkg.g);
            for (k, d) in ders.iter().enumerate() {
                let sym = 0.5 * (d.transpose() * &pkg.g + &pkg.g * d);
                acc += x[1 + k] * linalg::vectorize(&sym);
            }
            acc
        };
        r
    };
    let ric_norm = b.norm().max(1e-30);
    let rel = resid_vec.norm() / ric_norm;
    let verdict = if rel < tol.soliton_yes {
        SolitonVerdict::Soliton
    } else if rel > tol.soliton_no {
        SolitonVerdict::NotSoliton
    } else {
        SolitonVerdict::Inconclusive
    };
    let lambda = x[0];
    SolitonResult {
        verdict,
        lambda,
        relative_residual: rel,
        derivation_coords: x.iter().skip(1).cloned().collect(),
        expanding: lambda < 0.0,
    }
}

/// Foliation structure report: the H block is totally geodesic, the V block
/// integrates to leaves (eta symmetric there), and the O'Neill tensor is
/// -eta restricted to V x V.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoliationReport {
    pub h_totally_geodesic: f64,
    pub v_integrable: f64,
    pub oneill_matches: f64,
    pub polar: bool,
}

pub fn foliation_check(
    sm: &SemidirectModel,
    pkg: &GeometryPackage,
    tol: &Tolerances,
) -> FoliationReport {
    let nv = sm.rep.dim_v;
    let n = pkg.dim();
    let mut tg: f64 = 0.0;
    for a in nv..n {
        for b in nv..n {
            tg = tg.max(pkg.eta[a].column(b).amax());
        }
    }
    let mut integ: f64 = 0.0;
    let mut oneill: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            let diff = pkg.eta[a].column(b) - pkg.eta[b].column(a);
            integ = integ.max(diff.amax());
            // O'Neill tensor T_a b = horizontal part of the leaf covariant
            // derivative; at model level it is -eta_a b, which must lie in H.
            for r in 0..nv {
                oneill = oneill.max(pkg.eta[a].column(b)[r].abs());
            }
        }
    }
    let t = tol.residual * 100.0;
    FoliationReport {
        h_totally_geodesic: tg,
        v_integrable: integ,
        oneill_matches: oneill,
        polar: tg < t && integ < t && oneill < t,
    }
}

/// Result of the de Rham reducibility test.
#[derive(Debug, Clone)]
pub struct ReducibilityResult {
    pub curvature_nullity_dim: usize,
    pub irreducible: bool,
    /// When reducible, an orthonormal basis of one invariant factor.
    pub splitting: Option<Subspace>,
}

/// Computes the Riemann curvature nullity; when it vanishes, searches for a
/// g-orthogonal splitting invariant under the holonomy span and the
/// intrinsic torsion by looking for non-scalar symmetric elements commuting
/// with all of them.
pub fn reducibility_test(
    m: &ThreeSymModel,
    pkg: &GeometryPackage,
    tol: &Tolerances,
) -> ReducibilityResult {
    let n = pkg.dim();
    // Curvature nullity of R^g.
    let mut stacked = DMatrix::zeros(n * n * n, n);
    for col in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    stacked[((b * n + c) * n + d, col)] = pkg.r_low[col][b][(c, d)];
                }
            }
        }
    }
    let nullity = linalg::nullspace(&stacked, tol);
    if nullity.dim() == n {
        return ReducibilityResult {
            curvature_nullity_dim: n,
            irreducible: false,
            splitting: Some(Subspace::full(n)),
        };
    }
    if nullity.dim() > 0 {
        return ReducibilityResult {
            curvature_nullity_dim: nullity.dim(),
            irreducible: false,
            splitting: Some(nullity),
        };
    }
    // Commutant of {holonomy span, eta operators} among g-symmetric matrices.
    // A spanning set of the generated operators suffices, and the kernel is
    // refined generator by generator in coefficient space so the memory stays
    // at n^2 x r.
    let mut rd_ops: Vec<DMatrix<f64>> = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            rd_ops.push(m.rd(a, b).clone());
        }
    }
    let mut gens = linalg::matrix_span(&rd_ops, tol);
    gens.extend(linalg::matrix_span(&pkg.eta, tol));
    let id = DMatrix::<f64>::identity(n, n);

    // Start from the g-symmetric matrices S = g^-1 P, P plain-symmetric.
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut p = DMatrix::zeros(n, n);
            p[(a, b)] += 1.0;
            p[(b, a)] += 1.0;
            basis.push(&pkg.g_inv * p);
        }
    }
    for gmat in &gens {
        if basis.len() <= 1 {
            break;
        }
        let r = basis.len();
        let mut constraint = DMatrix::zeros(n * n, r);
        for (k, s) in basis.iter().enumerate() {
            constraint.set_column(k, &linalg::vectorize(&linalg::comm(s, gmat)));
        }
        let ns = linalg::nullspace(&constraint, tol);
        basis = (0..ns.dim())
            .map(|k| {
                let mut out = DMatrix::zeros(n, n);
                for (idx, b) in basis.iter().enumerate() {
                    let c = ns.basis[(idx, k)];
                    if c != 0.0 {
                        out += c * b;
                    }
                }
                out
            })
            .collect();
    }
    let comm: Vec<DMatrix<f64>> = basis;
    let irreducible = comm.len() <= 1;
    let splitting = if irreducible {
        None
    } else {
        // Pick a non-scalar symmetric element and return an eigenspace.
        let mut pick = None;
        for s in &comm {
            let tr = s.trace() / n as f64;
            let dev = s - tr * &id;
            if linalg::max_abs(&dev) > 1e-6 {
                pick = Some(dev);
                break;
            }
        }
        pick.map(|s| {
            let p_sym = 0.5 * (&pkg.g * &s + (&pkg.g * &s).transpose());
            let op = &pkg.g_inv * &p_sym;
            // Eigenspace of the extreme eigenvalue.
            let evs = linalg::pencil_eigenvalues(&p_sym, &pkg.g);
            let lo = evs[0];
            linalg::nullspace(&(op - lo * &id), tol)
        })
    };
    ReducibilityResult {
        curvature_nullity_dim: 0,
        irreducible,
        splitting,
    }
}

/// Sorted spectrum of the Ricci operator restricted to the V block.
pub fn ricci_v_spectrum(sm: &SemidirectModel, pkg: &GeometryPackage) -> Vec<f64> {
    let nv = sm.rep.dim_v;
    let ric_v = pkg.ric.view((0, 0), (nv, nv)).into_owned();
    let g_v = pkg.g.view((0, 0), (nv, nv)).into_owned();
    linalg::pencil_eigenvalues(&ric_v, &g_v)
}

/// V block of a semidirect model inside its moving part.
pub fn v_block_subspace(sm: &SemidirectModel) -> Subspace {
    let nv = sm.rep.dim_v;
    let hn = sm.h_range.len();
    coordinate_subspace(nv + hn, &(0..nv).collect::<Vec<_>>())
}

/// Full geometry pipeline for a semidirect model and metric.
pub fn geometry_of(
    sm: &SemidirectModel,
    spec: &MetricSpec,
    tol: &Tolerances,
) -> Result<GeometryPackage> {
    compute_geometry(&sm.model, &spec.g, tol)
}

/// Residual of the holonomy-span stabilization of eta, curvature and the
/// metric: the algebraic content of parallel torsion at the model point.
pub fn holonomy_stabilizes_residual(
    m: &ThreeSymModel,
    pkg: &GeometryPackage,
    _tol: &Tolerances,
) -> f64 {
    let n = pkg.dim();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let f = m.rd(a, b);
            // Metric invariance.
            worst = worst.max(linalg::max_abs(&(f.transpose() * &pkg.g + &pkg.g * f)));
            // eta invariance: [F, eta_v] = eta_{F v}.
            for v in 0..n {
                let mut eta_fv = DMatrix::zeros(n, n);
                for p in 0..n {
                    if f[(p, v)] != 0.0 {
                        eta_fv += f[(p, v)] * &pkg.eta[p];
                    }
                }
                worst = worst.max(linalg::max_abs(&(linalg::comm(f, &pkg.eta[v]) - eta_fv)));
            }
            // Curvature invariance: [F, R](v1, v2) = R(F v1, v2) + R(v1, F v2) + [R(v1,v2), F] = 0.
            for v1 in 0..n {
                for v2 in 0..n {
                    let mut t = linalg::comm(&pkg.r_op[v1][v2], f);
                    for p in 0..n {
                        if f[(p, v1)] != 0.0 {
                            t += f[(p, v1)] * &pkg.r_op[p][v2];
                        }
                        if f[(p, v2)] != 0.0 {
                            t += f[(p, v2)] * &pkg.r_op[v1][p];
                        }
                    }
                    worst = worst.max(linalg::max_abs(&t));
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_rep, build_sp};
    use crate::semidirect::build_type_model;
    use crate::threesym::{flat_abelian_model, hermitian_symmetric_model};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sp1_setup() -> (SemidirectModel, MetricSpec, GeometryPackage) {
        let rep = build_sp(1, &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = background_metric_spec(&sm, 1.0, &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        (sm, spec, pkg)
    }

    #[test]
    fn flat_model_has_zero_curvature() {
        let m = flat_abelian_model(2, &tol()).unwrap();
        let g = DMatrix::<f64>::identity(4, 4);
        let pkg = compute_geometry(&m, &g, &tol()).unwrap();
        for a in 0..4 {
            assert!(linalg::max_abs(&pkg.eta[a]) < 1e-12);
            for b in 0..4 {
                assert!(linalg::max_abs(&pkg.r_low[a][b]) < 1e-12);
            }
        }
        assert!(linalg::max_abs(&pkg.ric) < 1e-12);
    }

    #[test]
    fn symmetric_model_eta_vanishes() {
        let rep = build_sp(1, &tol()).unwrap();
        let m = hermitian_symmetric_model(
            rep.algebra.clone(),
            &rep.cartan.k_indices,
            &rep.cartan.h_indices,
            &rep.cartan.j_h,
            &tol(),
        )
        .unwrap();
        let g = symmetric_space_metric(&m, &tol()).unwrap();
        let pkg = compute_geometry(&m, &g, &tol()).unwrap();
        for a in 0..2 {
            assert!(linalg::max_abs(&pkg.eta[a]) < 1e-12);
        }
        // Hyperbolic plane: ric = -(1/2) B|_H, negative definite.
        let evs = linalg::pencil_eigenvalues(&pkg.ric, &pkg.g);
        assert!(evs.iter().all(|&e| e < 0.0));
    }

    #[test]
    fn sp1_background_is_almost_kahler_soliton() {
        let (sm, spec, pkg) = sp1_setup();
        assert!(pkg.report.almost_kahler, "{:?}", pkg.report);
        assert!(pkg.report.gray_g2 < 1e-9);
        let checks = semidirect_geometry_checks(&sm, &spec, &pkg, &tol());
        let worst = [
            checks.eta_blocks,
            checks.eta_vs_rho_plus,
            checks.eta_vs_rho_minus,
            checks.curv_component_hh,
            checks.curv_component_mixed,
            checks.curv_component_vv,
            checks.curv_component_vanishing,
            checks.ricci_v_block,
            checks.ricci_mixed_zero,
            checks.ricci_h_block,
            checks.q_identity,
            checks.trace_identity,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        assert!(worst < 1e-9, "{checks:?}");

        let sol = soliton_check(&sm, &pkg, &tol());
        assert!(sol.is_soliton(), "{sol:?}");
        // mu = 1/4 for this entry, so lambda = -(1/4 + 1/2) at t = 1.
        assert!((sol.lambda + 0.75).abs() < 1e-9, "lambda = {}", sol.lambda);
        assert!(sol.expanding);
    }

    #[test]
    fn sp1_ricci_structure_at_background() {
        let (sm, _spec, pkg) = sp1_setup();
        let nv = sm.rep.dim_v;
        // V block of ric vanishes; H block is negative definite.
        for a in 0..nv {
            for b in 0..nv {
                assert!(pkg.ric[(a, b)].abs() < 1e-10);
            }
        }
        let n = pkg.dim();
        let h_block = pkg.ric.view((nv, nv), (n - nv, n - nv)).into_owned();
        assert!(linalg::sym_eigenvalues(&h_block).iter().all(|&e| e < 0.0));
        // Measured H-block constant: ric|_H = -(mu + 1/2) B|_H with mu = 1/4.
        let gh = pkg.g.view((nv, nv), (n - nv, n - nv)).into_owned();
        let ratio = &h_block * gh.try_inverse().unwrap();
        let c = ratio[(0, 0)];
        assert!((c + 0.75).abs() < 1e-9, "constant {c}");
    }

    #[test]
    fn sp1_h_block_curvature_negative() {
        let (sm, _spec, pkg) = sp1_setup();
        let nv = sm.rep.dim_v;
        let n = pkg.dim();
        // Quadratic form Q(x1, x2) = R(x1, x2, x1, x2) < 0 on the H block.
        for a in nv..n {
            for b in (a + 1)..n {
                assert!(pkg.r_low[a][b][(a, b)] < 0.0);
            }
        }
    }

    #[test]
    fn deformed_su1n11_not_soliton_not_kahler() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        // S = lambda I J with I the ambient complex structure.
        let j_v = rep.j_v.clone().unwrap();
        let i_amb = linalg::standard_complex_structure(2);
        let s = 0.5 * &i_amb * &j_v;
        let spec = metric_from_s(&sm, s, 1.0, &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        assert!(!pkg.report.almost_kahler);
        // Still quasi-Kaehler: d omega has pure type.
        assert!(pkg.report.quasi_kahler_type < 1e-9, "{:?}", pkg.report);
        let sol = soliton_check(&sm, &pkg, &tol());
        assert!(matches!(sol.verdict, SolitonVerdict::NotSoliton), "{sol:?}");
    }

    #[test]
    fn metric_domain_enforced() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let j_v = rep.j_v.clone().unwrap();
        let i_amb = linalg::standard_complex_structure(2);
        // |lambda| >= 1 leaves the positivity domain.
        let s = 1.0 * &i_amb * &j_v;
        assert!(matches!(
            metric_from_s(&sm, s, 1.0, &tol()),
            Err(Error::NotPositive { .. })
        ));
        // A deformation outside the centralizer branch is rejected.
        let mut bad = DMatrix::zeros(4, 4);
        bad[(0, 0)] = 0.3;
        assert!(matches!(
            metric_from_s(&sm, bad, 1.0, &tol()),
            Err(Error::NotInCentralizer { .. })
        ));
    }

    #[test]
    fn sp1_polar_foliation() {
        let (sm, _spec, pkg) = sp1_setup();
        let fol = foliation_check(&sm, &pkg, &tol());
        assert!(fol.polar, "{fol:?}");
    }

    #[test]
    fn sp1_irreducible_dual_reducible() {
        let (sm, _spec, pkg) = sp1_setup();
        let red = reducibility_test(&sm.model, &pkg, &tol());
        assert_eq!(red.curvature_nullity_dim, 0);
        assert!(red.irreducible);

        let dual = build_rep("dual:sp:1", &tol()).unwrap();
        let smd = build_type_model(&dual, &tol()).unwrap();
        let specd = background_metric_spec(&smd, 1.0, &tol()).unwrap();
        let pkgd = geometry_of(&smd, &specd, &tol()).unwrap();
        let redd = reducibility_test(&smd.model, &pkgd, &tol());
        assert!(!redd.irreducible);
        // The flat factor is exactly the V block.
        assert_eq!(redd.curvature_nullity_dim, 4);
        let split = redd.splitting.unwrap();
        let vb = v_block_subspace(&smd);
        assert!(split.distance(&vb) < 1e-8);
        // Compact branch background is not almost-Kaehler.
        assert!(!pkgd.report.almost_kahler);
    }

    #[test]
    fn flat_model_soliton_with_zero_lambda() {
        // Flat abelian model embedded as the trivial case: ric = 0 and the
        // zero map solves the equation exactly with lambda = 0.
        let m = flat_abelian_model(2, &tol()).unwrap();
        let g = DMatrix::<f64>::identity(4, 4);
        let pkg = compute_geometry(&m, &g, &tol()).unwrap();
        let sol = soliton_check_with_derivations(&[], &pkg, &tol());
        assert!(sol.is_soliton());
        assert!(sol.lambda.abs() < 1e-12);
    }

    #[test]
    fn holonomy_stabilization() {
        let (sm, _spec, pkg) = sp1_setup();
        let res = holonomy_stabilizes_residual(&sm.model, &pkg, &tol());
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn curvature_checks_at_scaled_metric() {
        // t != 1 exercises the scale-covariance of the block formulas.
        let rep = build_sp(1, &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = background_metric_spec(&sm, 2.0, &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let checks = semidirect_geometry_checks(&sm, &spec, &pkg, &tol());
        assert!(checks.curv_component_hh < 1e-9, "{checks:?}");
        assert!(checks.curv_component_mixed < 1e-9, "{checks:?}");
        assert!(checks.curv_component_vv < 1e-9, "{checks:?}");
        assert!(checks.ricci_v_block < 1e-9, "{checks:?}");
        let sol = soliton_check(&sm, &pkg, &tol());
        assert!(sol.is_soliton());
        assert!(
            (sol.lambda + 0.75 / 2.0).abs() < 1e-9,
            "lambda {}",
            sol.lambda
        );
    }
}
