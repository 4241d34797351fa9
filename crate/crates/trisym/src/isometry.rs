//! Isometry algebra of a model through the iterated-stabilizer filtration:
//! the curvature stabilizer inside so(V, g) is refined by the operators
//! l_v(F) = [F, eta_v] - eta_{F v} until it stabilizes; the result closes to
//! the Killing-generator algebra on i + V.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::GeometryPackage;
use crate::lie::{self, LieAlgebra};
use crate::linalg::{self, Subspace};
use crate::threesym::ThreeSymModel;

/// Outcome of the filtration and the derived Killing-generator algebra.
pub struct IsometryResult {
    /// Basis of the stabilized Lie algebra i, as g-skew matrices on V.
    pub i_basis: Vec<DMatrix<f64>>,
    /// Number of refinement steps until the dimension stabilized.
    pub k_stabilized: usize,
    /// Dimension history of the filtration, starting at i^0.
    pub dims: Vec<usize>,
}

/// J-splitting of i and the induced splitting of V.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dichotomy {
    pub i_plus_dim: usize,
    pub i_minus_dim: usize,
    pub v_plus_dim: usize,
    pub v_minus_dim: usize,
    pub holomorphic_isometries: bool,
    pub symmetric_candidate: bool,
    pub classification: String,
}

/// Basis of so(V, g): matrices g^-1 (E_ab - E_ba) for a < b.
fn so_basis(g_inv: &DMatrix<f64>, n: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut e = DMatrix::zeros(n, n);
            e[(a, b)] = 1.0;
            e[(b, a)] = -1.0;
            out.push(g_inv * e);
        }
    }
    out
}

/// [F, R] as a 4-tensor, flattened: for each (a, b) the matrix
/// R(F a, b) + R(a, F b) + [R(a, b), F].
fn curvature_action(pkg: &GeometryPackage, f: &DMatrix<f64>) -> DVector<f64> {
    let n = pkg.dim();
    let mut out = DVector::zeros(n * n * n * n);
    for a in 0..n {
        for b in 0..n {
            let mut t = linalg::comm(&pkg.r_op[a][b], f);
            for p in 0..n {
                if f[(p, a)] != 0.0 {
                    t += f[(p, a)] * &pkg.r_op[p][b];
                }
                if f[(p, b)] != 0.0 {
                    t += f[(p, b)] * &pkg.r_op[a][p];
                }
            }
            for c in 0..n {
                for d in 0..n {
                    out[((a * n + b) * n + c) * n + d] = t[(c, d)];
                }
            }
        }
    }
    out
}

/// l_v(F) = [F, eta_v] - eta_{F v}.
fn l_op(pkg: &GeometryPackage, v: usize, f: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pkg.dim();
    let mut out = linalg::comm(f, &pkg.eta[v]);
    let fv = f.column(v);
    let mut eta_fv = DMatrix::zeros(n, n);
    for p in 0..n {
        if fv[p] != 0.0 {
            eta_fv += fv[p] * &pkg.eta[p];
        }
    }
    out -= eta_fv;
    out
}

/// Iterated-stabilizer filtration: i^0 = stab(R^g) in so(V, g), then
/// i^{k+1} = {F in i^k : l_v(F) in i^k for all v}.
pub fn i_filtration(pkg: &GeometryPackage, tol: &Tolerances) -> IsometryResult {
    let n = pkg.dim();
    let so = so_basis(&pkg.g_inv, n);
    let so_dim = so.len();

    // i^0: nullspace of F -> [F, R^g] over so coefficients.
    let mut a0 = DMatrix::zeros(n * n * n * n, so_dim);
    for (k, f) in so.iter().enumerate() {
        a0.set_column(k, &curvature_action(pkg, f));
    }
    let ns0 = linalg::nullspace(&a0, tol);
    let mut basis: Vec<DMatrix<f64>> = (0..ns0.dim())
        .map(|k| {
            let mut m = DMatrix::zeros(n, n);
            for (idx, f) in so.iter().enumerate() {
                let c = ns0.basis[(idx, k)];
                if c != 0.0 {
                    m += c * f;
                }
            }
            m
        })
        .collect();
    let mut dims = vec![basis.len()];

    // Refinement: require l_v(F) to stay in the current span.
    let mut steps = 0;
    loop {
        let r = basis.len();
        if r == 0 {
            break;
        }
        // Orthonormal span of the current basis.
        let mut span = DMatrix::zeros(n * n, r);
        for (k, m) in basis.iter().enumerate() {
            span.set_column(k, &linalg::vectorize(m));
        }
        let q = linalg::column_span(&span, tol);
        let proj = q.projector();
        let id = DMatrix::<f64>::identity(n * n, n * n);
        let complement = &id - &proj;

        let mut rows = DMatrix::zeros(n * n * n, r);
        for (k, m) in basis.iter().enumerate() {
            for v in 0..n {
                let lv = l_op(pkg, v, m);
                let resid = &complement * linalg::vectorize(&lv);
                for idx in 0..n * n {
                    rows[(v * n * n + idx, k)] = resid[idx];
                }
            }
        }
        let ns = linalg::nullspace(&rows, tol);
        if ns.dim() == r {
            break;
        }
        basis = (0..ns.dim())
            .map(|k| {
                let mut m = DMatrix::zeros(n, n);
                for (idx, b) in basis.iter().enumerate() {
                    let c = ns.basis[(idx, k)];
                    if c != 0.0 {
                        m += c * b;
                    }
                }
                m
            })
            .collect();
        steps += 1;
        dims.push(basis.len());
    }
    IsometryResult {
        i_basis: basis,
        k_stabilized: steps,
        dims,
    }
}

/// Assembles the Killing-generator algebra on i + V with the bracket
/// [F, G] = FG - GF, [F, v] = Fv + l_v(F),
/// [v, w] = tau(v, w) + R^D(v, w); the Jacobi residual of the result is the
/// correctness certificate for the filtration.
pub fn build_killing_algebra(
    m: &ThreeSymModel,
    pkg: &GeometryPackage,
    iso: &IsometryResult,
    tol: &Tolerances,
) -> Result<LieAlgebra> {
    let n = pkg.dim();
    let r = iso.i_basis.len();
    let dim = r + n;

    // Orthonormalized coordinates on span(i).
    let mut span = DMatrix::zeros(n * n, r.max(1));
    for (k, mat) in iso.i_basis.iter().enumerate() {
        span.set_column(k, &linalg::vectorize(mat));
    }
    let q = if r > 0 {
        linalg::column_span(&span.columns(0, r).into_owned(), tol)
    } else {
        Subspace::zero(n * n)
    };
    if q.dim() != r {
        return Err(Error::JacobiViolation { residual: f64::NAN });
    }
    let q_mats: Vec<DMatrix<f64>> = (0..r)
        .map(|k| linalg::unvectorize(&q.basis.column(k).into_owned(), n, n))
        .collect();
    let expand = |mat: &DMatrix<f64>| -> Result<DVector<f64>> {
        let v = linalg::vectorize(mat);
        let coords = q.basis.transpose() * &v;
        let resid = (&q.basis * &coords - v).norm();
        if resid > 1e-7 * (1.0 + mat.norm()) {
            return Err(Error::JacobiViolation { residual: resid });
        }
        Ok(coords)
    };

    let names: Vec<String> = (0..r)
        .map(|k| format!("F{k}"))
        .chain((0..n).map(|a| format!("v{a}")))
        .collect();
    let mut failure: Option<Error> = None;
    let alg = LieAlgebra::from_brackets(
        names,
        |i, j| {
            let mut out = DVector::zeros(dim);
            let res: Result<()> = (|| {
                if i < r && j < r {
                    let c = linalg::comm(&q_mats[i], &q_mats[j]);
                    let coords = expand(&c)?;
                    for k in 0..r {
                        out[k] = coords[k];
                    }
                } else if i < r {
                    let v = j - r;
                    // [F, v] = F v + l_v(F).
                    let fv = q_mats[i].column(v);
                    for a in 0..n {
                        out[r + a] = fv[a];
                    }
                    let lv = l_op(pkg, v, &q_mats[i]);
                    let coords = expand(&lv)?;
                    for k in 0..r {
                        out[k] = coords[k];
                    }
                } else {
                    let (a, b) = (i - r, j - r);
                    let t = m.tau(a, b);
                    for c in 0..n {
                        out[r + c] = t[c];
                    }
                    let coords = expand(m.rd(a, b))?;
                    for k in 0..r {
                        out[k] = coords[k];
                    }
                }
                Ok(())
            })();
            if let Err(e) = res {
                failure.get_or_insert(e);
            }
            out
        },
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let jac = lie::jacobi_residual(&alg);
    if jac > tol.residual * 100.0 {
        return Err(Error::JacobiViolation { residual: jac });
    }
    Ok(alg)
}

/// Splits i by J-commutation and spans V^- = i^- V.
pub fn dichotomy(m: &ThreeSymModel, iso: &IsometryResult, tol: &Tolerances) -> Dichotomy {
    let n = m.dim_v();
    let j = &m.j;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for f in &iso.i_basis {
        let jfj = j * f * j;
        plus.push(0.5 * (f - &jfj));
        minus.push(0.5 * (f + &jfj));
    }
    let i_plus = linalg::matrix_span(&plus, tol);
    let i_minus = linalg::matrix_span(&minus, tol);
    let mut v_minus_cols = Vec::new();
    for f in &i_minus {
        for vcol in 0..n {
            v_minus_cols.push(f.column(vcol).into_owned());
        }
    }
    let v_minus = if v_minus_cols.is_empty() {
        Subspace::zero(n)
    } else {
        let mut mat = DMatrix::zeros(n, v_minus_cols.len());
        for (k, c) in v_minus_cols.iter().enumerate() {
            mat.set_column(k, c);
        }
        linalg::column_span(&mat, tol)
    };
    let v_minus_dim = v_minus.dim();
    let v_plus_dim = n - v_minus_dim;
    let holomorphic = i_minus.is_empty();
    let symmetric = v_plus_dim == 0;
    let classification = if symmetric {
        "symmetric".to_string()
    } else if holomorphic {
        "holomorphic_isometries".to_string()
    } else {
        "mixed".to_string()
    };
    Dichotomy {
        i_plus_dim: i_plus.len(),
        i_minus_dim: i_minus.len(),
        v_plus_dim,
        v_minus_dim,
        holomorphic_isometries: holomorphic,
        symmetric_candidate: symmetric,
        classification,
    }
}

/// Residual data for the invariant checks on i: every element kills R^g,
/// the span is closed under commutators, and the Nomizu-type subalgebra
/// (stabilizers of both canonical tensors that commute with J) sits inside.
pub struct IsometryInvariants {
    pub stabilizer_residual: f64,
    pub closure_residual: f64,
    pub nomizu_contained: f64,
}

pub fn isometry_invariants(
    m: &ThreeSymModel,
    pkg: &GeometryPackage,
    iso: &IsometryResult,
    tol: &Tolerances,
) -> IsometryInvariants {
    let n = pkg.dim();
    let mut stab: f64 = 0.0;
    for f in &iso.i_basis {
        stab = stab.max(curvature_action(pkg, f).amax());
    }
    // Closure.
    let r = iso.i_basis.len();
    let mut span = DMatrix::zeros(n * n, r.max(1));
    for (k, mat) in iso.i_basis.iter().enumerate() {
        span.set_column(k, &linalg::vectorize(mat));
    }
    let q = if r > 0 {
        linalg::column_span(&span.columns(0, r).into_owned(), tol)
    } else {
        Subspace::zero(n * n)
    };
    let mut closure: f64 = 0.0;
    for i in 0..r {
        for j in (i + 1)..r {
            let c = linalg::comm(&iso.i_basis[i], &iso.i_basis[j]);
            let v = linalg::vectorize(&c);
            let resid = (&v - q.projector() * &v).norm() / v.norm().max(1e-30);
            closure = closure.max(resid);
        }
    }
    // Nomizu containment: g-skew stabilizers of R^D and tau commuting with J.
    let nomizu = nomizu_j_subalgebra(m, &pkg.g, &pkg.g_inv, tol);
    let mut contained: f64 = 0.0;
    for f in &nomizu {
        let v = linalg::vectorize(f);
        contained = contained.max((&v - q.projector() * &v).norm() / v.norm().max(1e-30));
    }
    IsometryInvariants {
        stabilizer_residual: stab,
        closure_residual: closure,
        nomizu_contained: contained,
    }
}

/// The J-commuting part of the Nomizu stabilizer: g-skew F with
/// [F, J] = 0 preserving both tau and R^D.
pub fn nomizu_j_subalgebra(
    m: &ThreeSymModel,
    g: &DMatrix<f64>,
    g_inv: &DMatrix<f64>,
    tol: &Tolerances,
) -> Vec<DMatrix<f64>> {
    let n = m.dim_v();
    let so = so_basis(g_inv, n);
    let rows_per = n * n + n * n * n + n * n * n * n;
    let mut a = DMatrix::zeros(rows_per, so.len());
    for (k, f) in so.iter().enumerate() {
        let mut col = DVector::zeros(rows_per);
        let mut pos = 0;
        let cj = linalg::comm(f, &m.j);
        for i in 0..n * n {
            col[pos] = cj[(i % n, i / n)];
            pos += 1;
        }
        // tau stabilization: F tau(a,b) - tau(Fa, b) - tau(a, Fb) = 0.
        for aa in 0..n {
            for b in 0..n {
                let fa = f.column(aa).into_owned();
                let fb = f.column(b).into_owned();
                let e = |i: usize| -> DVector<f64> {
                    let mut v = DVector::zeros(n);
                    v[i] = 1.0;
                    v
                };
                let t = f * m.tau(aa, b) - m.tau_vec(&fa, &e(b)) - m.tau_vec(&e(aa), &fb);
                for ridx in 0..n {
                    col[pos] = t[ridx];
                    pos += 1;
                }
            }
        }
        // R^D stabilization.
        for aa in 0..n {
            for b in 0..n {
                let mut t = linalg::comm(m.rd(aa, b), f);
                for p in 0..n {
                    if f[(p, aa)] != 0.0 {
                        t += f[(p, aa)] * m.rd(p, b);
                    }
                    if f[(p, b)] != 0.0 {
                        t += f[(p, b)] * m.rd(aa, p);
                    }
                }
                // [F, R](a,b) = R(Fa, b) + R(a, Fb) + [R(a,b), F]; stabilizing
                // means this vanishes.
                for c in 0..n {
                    for d in 0..n {
                        col[pos] = t[(c, d)];
                        pos += 1;
                    }
                }
            }
        }
        let _ = g;
        a.set_column(k, &col);
    }
    let ns = linalg::nullspace(&a, tol);
    (0..ns.dim())
        .map(|k| {
            let mut mmat = DMatrix::zeros(n, n);
            for (idx, f) in so.iter().enumerate() {
                let c = ns.basis[(idx, k)];
                if c != 0.0 {
                    mmat += c * f;
                }
            }
            mmat
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_rep, build_sp};
    use crate::geometry::{
        background_metric_spec, compute_geometry, geometry_of, symmetric_space_metric,
    };
    use crate::rep::centralizer_split;
    use crate::semidirect::build_type_model;
    use crate::threesym::{flat_abelian_model, hermitian_symmetric_model};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn flat_model_full_so() {
        let m = flat_abelian_model(2, &tol()).unwrap();
        let g = DMatrix::<f64>::identity(4, 4);
        let pkg = compute_geometry(&m, &g, &tol()).unwrap();
        let iso = i_filtration(&pkg, &tol());
        assert_eq!(iso.i_basis.len(), 6); // so(4)
        let alg = build_killing_algebra(&m, &pkg, &iso, &tol()).unwrap();
        assert_eq!(alg.dim, 10); // euclidean algebra so(4) + R^4
        assert!(lie::jacobi_residual(&alg) < 1e-9);
        let d = dichotomy(&m, &iso, &tol());
        assert!(d.symmetric_candidate);
        assert_eq!(d.classification, "symmetric");
    }

    #[test]
    fn symmetric_sl2_isotropy_dimension() {
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
        let iso = i_filtration(&pkg, &tol());
        // The isotropy algebra of the hyperbolic plane has dimension 1.
        assert_eq!(iso.i_basis.len(), 1);
        let alg = build_killing_algebra(&m, &pkg, &iso, &tol()).unwrap();
        assert_eq!(alg.dim, 3);
        assert!(lie::jacobi_residual(&alg) < 1e-12);
    }

    #[test]
    fn sp1_isometry_dimension_and_dichotomy() {
        let rep = build_sp(1, &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = background_metric_spec(&sm, 1.0, &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let iso = i_filtration(&pkg, &tol());
        assert_eq!(iso.i_basis.len(), 1); // dim k + dim c^- = 1 + 0
        let alg = build_killing_algebra(&sm.model, &pkg, &iso, &tol()).unwrap();
        assert_eq!(alg.dim, 5);
        assert!(lie::jacobi_residual(&alg) < 1e-9);
        // dim g_b = dim V + dim L + dim c^-.
        let split = centralizer_split(&rep, &rep.h_v.clone(), &tol());
        assert_eq!(alg.dim, rep.dim_v + rep.dim_l() + split.c_minus.len());
        let d = dichotomy(&sm.model, &iso, &tol());
        assert_eq!(d.i_minus_dim, 0);
        assert!(d.holomorphic_isometries);
        let inv = isometry_invariants(&sm.model, &pkg, &iso, &tol());
        assert!(inv.stabilizer_residual < 1e-9);
        assert!(inv.closure_residual < 1e-8);
        assert!(inv.nomizu_contained < 1e-8);
    }

    #[test]
    fn su1n11_isometry_count() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = background_metric_spec(&sm, 1.0, &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let iso = i_filtration(&pkg, &tol());
        let alg = build_killing_algebra(&sm.model, &pkg, &iso, &tol()).unwrap();
        let split = centralizer_split(&rep, &rep.h_v.clone(), &tol());
        assert_eq!(alg.dim, rep.dim_v + rep.dim_l() + split.c_minus.len());
        assert_eq!(alg.dim, 8);
    }
}
