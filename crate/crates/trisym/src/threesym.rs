//! Order-3 automorphism machinery: canonical reductive decomposition,
//! the complex structure on the moving part, torsion and canonical curvature,
//! transvection and holonomy algebras, curvature nullity and the Nijenhuis
//! tensor.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lie::{self, LieAlgebra};
use crate::linalg::{self, Subspace};

/// Cube-root convention fixing the sign of J globally: sigma restricted to
/// the moving part is z0 + z1 J with z0 + i z1 = exp(2 pi i / 3).
pub const Z0: f64 = -0.5;
pub const Z1: f64 = 0.8660254037844386467637231707529361834714026269051903140;

/// A Lie algebra with an order-3 automorphism and its derived data: the
/// fixed part h, the moving part V with complex structure J, the torsion
/// tau(v, w) = [v, w]_V and the canonical curvature operators
/// R(v, w) = ad([v, w]_h) restricted to V.
#[derive(Debug, Clone)]
pub struct ThreeSymModel {
    pub algebra: LieAlgebra,
    pub sigma: DMatrix<f64>,
    pub h_basis: Subspace,
    pub v_basis: Subspace,
    /// Complex structure on V in V-coordinates.
    pub j: DMatrix<f64>,
    /// tau[a][b] = coordinates of the V-part of [v_a, v_b].
    tau: Vec<Vec<DVector<f64>>>,
    /// frak_r[a][b] = ambient coordinates of the h-part of [v_a, v_b].
    frak_r: Vec<Vec<DVector<f64>>>,
    /// rd[a][b] = matrix of R(v_a, v_b) acting on V-coordinates.
    rd: Vec<Vec<DMatrix<f64>>>,
}

/// Residual report from `verify_model_identities`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelReport {
    pub torsion_j_flip: f64,
    pub curvature_j_invariance: f64,
    pub bianchi_first: f64,
    pub bianchi_second: f64,
    pub killing_h_v_block: f64,
    pub killing_j_invariance: f64,
    pub rd_commutes_j: f64,
    pub h_negative_definite: bool,
    pub all_pass: bool,
}

impl ThreeSymModel {
    pub fn dim_v(&self) -> usize {
        self.v_basis.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.dim()
    }

    pub fn tau(&self, a: usize, b: usize) -> &DVector<f64> {
        &self.tau[a][b]
    }

    /// tau contracted with arbitrary V-coordinate vectors.
    pub fn tau_vec(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim_v();
        let mut out = DVector::zeros(n);
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] != 0.0 {
                    out += x[a] * y[b] * &self.tau[a][b];
                }
            }
        }
        out
    }

    /// Operator tau_x = tau(x, .) on V-coordinates.
    pub fn tau_op(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim_v();
        let mut m = DMatrix::zeros(n, n);
        for b in 0..n {
            let mut col = DVector::zeros(n);
            for a in 0..n {
                if x[a] != 0.0 {
                    col += x[a] * &self.tau[a][b];
                }
            }
            m.set_column(b, &col);
        }
        m
    }

    pub fn rd(&self, a: usize, b: usize) -> &DMatrix<f64> {
        &self.rd[a][b]
    }

    pub fn frak_r(&self, a: usize, b: usize) -> &DVector<f64> {
        &self.frak_r[a][b]
    }

    /// Test hook: perturbs one torsion entry to exercise detection paths.
    #[cfg(test)]
    pub(crate) fn corrupt_tau_entry(&mut self, a: usize, b: usize, k: usize, delta: f64) {
        self.tau[a][b][k] += delta;
    }

    /// Builds the model from a verified decomposition. The bases must be
    /// orthonormal and span the eigenspaces of sigma.
    pub fn from_decomposition(
        algebra: LieAlgebra,
        sigma: DMatrix<f64>,
        h_basis: Subspace,
        v_basis: Subspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = algebra.dim;
        let id = DMatrix::<f64>::identity(dim, dim);

        let scale = algebra.max_abs_c().max(1.0);
        let mut aut: f64 = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let lhs = &sigma * algebra.bracket_basis(i, j);
                let rhs =
                    algebra.bracket(&sigma.column(i).into_owned(), &sigma.column(j).into_owned());
                aut = aut.max((lhs - rhs).amax());
            }
        }
        if aut > tol.residual * scale * 100.0 {
            return Err(Error::NotAutomorphism { residual: aut });
        }
        let cube = &sigma * &sigma * &sigma - &id;
        let cube_res = linalg::max_abs(&cube);
        if cube_res > tol.residual * 100.0 {
            return Err(Error::NotOrderThree { residual: cube_res });
        }
        if linalg::max_abs(&(&sigma - &id)) < tol.residual {
            return Err(Error::SigmaIsIdentity);
        }
        if h_basis.dim() + v_basis.dim() != dim {
            return Err(Error::InvalidDimension(format!(
                "eigenspace dimensions {} + {} do not fill dim {}",
                h_basis.dim(),
                v_basis.dim(),
                dim
            )));
        }
        let h_res = linalg::max_abs(&((&sigma - &id) * &h_basis.basis));
        let v_mat = &sigma * &sigma + &sigma + &id;
        let v_res = linalg::max_abs(&(v_mat * &v_basis.basis));
        if h_res.max(v_res) > 1e-7 {
            return Err(Error::InvalidDimension(format!(
                "bases are not sigma eigenspaces (residuals {h_res:.3e}, {v_res:.3e})"
            )));
        }

        // J from sigma|_V = z0 + z1 J.
        let nv = v_basis.dim();
        let s_vv = v_basis.basis.transpose() * &sigma * &v_basis.basis;
        let j = (s_vv - Z0 * DMatrix::<f64>::identity(nv, nv)) / Z1;
        let j_sq = &j * &j + DMatrix::<f64>::identity(nv, nv);
        if linalg::max_abs(&j_sq) > 1e-7 {
            return Err(Error::InvalidDimension(format!(
                "induced J does not square to -1 (residual {:.3e})",
                linalg::max_abs(&j_sq)
            )));
        }

        let vb = &v_basis.basis;
        let hb_proj = h_basis.projector();
        let v_proj = v_basis.projector();
        let mut tau = vec![vec![DVector::zeros(nv); nv]; nv];
        let mut frak_r = vec![vec![DVector::zeros(dim); nv]; nv];
        for a in 0..nv {
            for b in 0..nv {
                let br = algebra.bracket(&vb.column(a).into_owned(), &vb.column(b).into_owned());
                tau[a][b] = vb.transpose() * &v_proj * &br;
                frak_r[a][b] = &hb_proj * br;
            }
        }
        let mut rd = vec![vec![DMatrix::zeros(nv, nv); nv]; nv];
        for a in 0..nv {
            for b in 0..nv {
                let adf = algebra.ad_vec(&frak_r[a][b]);
                rd[a][b] = vb.transpose() * &adf * vb;
            }
        }

        Ok(ThreeSymModel {
            algebra,
            sigma,
            h_basis,
            v_basis,
            j,
            tau,
            frak_r,
            rd,
        })
    }
}

/// Splits an algebra along an order-3 automorphism: h = ker(sigma - 1),
/// V = ker(sigma^2 + sigma + 1), with bases computed numerically.
pub fn reductive_split(
    algebra: LieAlgebra,
    sigma: DMatrix<f64>,
    tol: &Tolerances,
) -> Result<ThreeSymModel> {
    let dim = algebra.dim;
    let id = DMatrix::<f64>::identity(dim, dim);
    let h_basis = linalg::nullspace(&(&sigma - &id), tol);
    let v_basis = linalg::nullspace(&(&sigma * &sigma + &sigma + &id), tol);
    ThreeSymModel::from_decomposition(algebra, sigma, h_basis, v_basis, tol)
}

/// Residuals of the structural identities every model satisfies: the J-flip
/// of tau, J-invariance of the curvature, both Bianchi identities and the
/// Killing-form compatibility.
pub fn verify_model_identities(m: &ThreeSymModel, tol: &Tolerances) -> ModelReport {
    let nv = m.dim_v();
    let vb = &m.v_basis.basis;
    let _ = vb;
    let scale = m.algebra.max_abs_c().max(1.0);

    let mut tj: f64 = 0.0;
    let mut rj: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            let ja = m.j.column(a).into_owned();
            let jb = m.j.column(b).into_owned();
            let t_jj = m.tau_vec(&ja, &jb);
            tj = tj.max((t_jj + &m.tau[a][b]).amax());
            let mut r_jj = DMatrix::zeros(nv, nv);
            for p in 0..nv {
                for q in 0..nv {
                    if ja[p] != 0.0 && jb[q] != 0.0 {
                        r_jj += ja[p] * jb[q] * &m.rd[p][q];
                    }
                }
            }
            rj = rj.max(linalg::max_abs(&(r_jj - &m.rd[a][b])));
        }
    }

    // First Bianchi: sum_cyc R(a,b)c = sum_cyc tau(a, tau(b, c)).
    let e = |i: usize| -> DVector<f64> {
        let mut v = DVector::zeros(nv);
        v[i] = 1.0;
        v
    };
    let mut b1: f64 = 0.0;
    for a in 0..nv {
        for b in (a + 1)..nv {
            for c in (b + 1)..nv {
                let lhs = &m.rd[a][b] * e(c) + &m.rd[b][c] * e(a) + &m.rd[c][a] * e(b);
                let rhs = m.tau_vec(&e(a), &m.tau[b][c])
                    + m.tau_vec(&e(b), &m.tau[c][a])
                    + m.tau_vec(&e(c), &m.tau[a][b]);
                b1 = b1.max((lhs - rhs).amax());
            }
        }
    }

    // Second Bianchi: sum_cyc R(tau(a,b), c) = 0.
    let mut b2: f64 = 0.0;
    for a in 0..nv {
        for b in (a + 1)..nv {
            for c in (b + 1)..nv {
                let term = |x: &DVector<f64>, ci: usize| -> DMatrix<f64> {
                    let mut out = DMatrix::zeros(nv, nv);
                    for p in 0..nv {
                        if x[p] != 0.0 {
                            out += x[p] * &m.rd[p][ci];
                        }
                    }
                    out
                };
                let s = term(&m.tau[a][b], c) + term(&m.tau[b][c], a) + term(&m.tau[c][a], b);
                b2 = b2.max(linalg::max_abs(&s));
            }
        }
    }

    // Killing form: B(h, V) = 0 and B(J., J.) = B on V.
    let bform = lie::killing_form(&m.algebra, tol);
    let bscale = linalg::max_abs(&bform.matrix).max(1.0);
    let b_hv = m.h_basis.basis.transpose() * &bform.matrix * &m.v_basis.basis;
    let b_vv = m.v_basis.basis.transpose() * &bform.matrix * &m.v_basis.basis;
    let b_jj = m.j.transpose() * &b_vv * &m.j;
    let khv = linalg::max_abs(&b_hv) / bscale;
    let kjj = linalg::max_abs(&(b_jj - &b_vv)) / bscale;

    let mut rdj: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            rdj = rdj.max(linalg::max_abs(&linalg::comm(&m.rd[a][b], &m.j)));
        }
    }

    // B restricted to h is negative definite for Riemannian models
    // (vacuously true when h = 0).
    let h_neg = if m.dim_h() == 0 {
        true
    } else {
        let b_hh = m.h_basis.basis.transpose() * &bform.matrix * &m.h_basis.basis;
        linalg::sym_eigenvalues(&b_hh).iter().all(|&e| e < 0.0)
    };

    let t = tol.residual * scale * scale * 100.0;
    let all_pass =
        tj < t && rj < t && b1 < t && b2 < t && khv < 1e-8 && kjj < 1e-8 && rdj < t && h_neg;
    ModelReport {
        torsion_j_flip: tj,
        curvature_j_invariance: rj,
        bianchi_first: b1,
        bianchi_second: b2,
        killing_h_v_block: khv,
        killing_j_invariance: kjj,
        rd_commutes_j: rdj,
        h_negative_definite: h_neg,
        all_pass,
    }
}

/// Transvection algebra g_tr = V + [V, V] and holonomy span
/// h_tr = span R(V, V), both as subspaces of the ambient algebra. Verifies
/// that g_tr is an ideal.
pub fn transvection(m: &ThreeSymModel, tol: &Tolerances) -> Result<(Subspace, Subspace)> {
    let dim = m.algebra.dim;
    let nv = m.dim_v();
    let vb = &m.v_basis.basis;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for a in 0..nv {
        cols.push(vb.column(a).into_owned());
    }
    let mut hcols: Vec<DVector<f64>> = Vec::new();
    for a in 0..nv {
        for b in (a + 1)..nv {
            cols.push(
                m.algebra
                    .bracket(&vb.column(a).into_owned(), &vb.column(b).into_owned()),
            );
            hcols.push(m.frak_r[a][b].clone());
        }
    }
    let g_tr = span_of(&cols, dim, tol);
    let h_tr = span_of(&hcols, dim, tol);
    let resid = lie::ideal_residual(&m.algebra, &g_tr);
    if resid > tol.angle {
        return Err(Error::IdealityViolation { residual: resid });
    }
    Ok((g_tr, h_tr))
}

fn span_of(cols: &[DVector<f64>], ambient: usize, tol: &Tolerances) -> Subspace {
    if cols.is_empty() {
        return Subspace::zero(ambient);
    }
    let mut mat = DMatrix::zeros(ambient, cols.len());
    for (j, v) in cols.iter().enumerate() {
        mat.set_column(j, v);
    }
    linalg::column_span(&mat, tol)
}

/// Curvature nullity result: W = {v in V : R(v, V) = 0} in V-coordinates,
/// together with the principal-angle agreement of its three computations
/// (curvature nullspace, Killing radical meet V, transvection radical).
pub struct NullityResult {
    pub w: Subspace,
    pub agreement: f64,
}

pub fn curvature_nullity_w(m: &ThreeSymModel, tol: &Tolerances) -> Result<NullityResult> {
    let nv = m.dim_v();
    let mut stacked = DMatrix::zeros(nv * nv * nv, nv);
    for b in 0..nv {
        for col in 0..nv {
            let mat = &m.rd[col][b];
            for r in 0..nv {
                for c in 0..nv {
                    stacked[((b * nv + r) * nv + c, col)] = mat[(r, c)];
                }
            }
        }
    }
    let w_rd = linalg::nullspace(&stacked, tol);

    let kperp = lie::killing_radical(&m.algebra, tol);
    let ambient_v = Subspace::new(m.v_basis.basis.clone());
    let kperp_v = kperp.intersect(&ambient_v, tol);
    let w_killing = linalg::column_span(&(m.v_basis.basis.transpose() * kperp_v.basis), tol);

    let (g_tr, _) = transvection(m, tol)?;
    let w_trans = if g_tr.dim() == 0 {
        Subspace::zero(nv)
    } else {
        let sub = sub_lie_algebra(&m.algebra, &g_tr, tol)?;
        let rad = lie::radical(&sub, tol)?;
        let amb = &g_tr.basis * rad.basis;
        linalg::column_span(&(m.v_basis.basis.transpose() * amb), tol)
    };

    let d1 = w_rd.distance(&w_killing);
    let d2 = w_rd.distance(&w_trans);
    let agreement = d1.max(d2);
    if agreement > tol.angle {
        return Err(Error::TheoremViolation {
            check: "curvature-nullity".into(),
            detail: format!(
                "nullity ({}), Killing radical ({}) and transvection radical ({}) disagree: {agreement:.3e}",
                w_rd.dim(),
                w_killing.dim(),
                w_trans.dim()
            ),
        });
    }
    Ok(NullityResult { w: w_rd, agreement })
}

/// The Lie algebra structure induced on a bracket-closed subspace.
pub fn sub_lie_algebra(alg: &LieAlgebra, sub: &Subspace, tol: &Tolerances) -> Result<LieAlgebra> {
    let k = sub.dim();
    let names = (0..k).map(|i| format!("s{i}")).collect();
    let proj = sub.basis.transpose();
    let mut worst: f64 = 0.0;
    let out = LieAlgebra::from_brackets(
        names,
        |i, j| {
            let br = alg.bracket(
                &sub.basis.column(i).into_owned(),
                &sub.basis.column(j).into_owned(),
            );
            let coords = &proj * &br;
            let recon = &sub.basis * &coords;
            worst = worst.max((recon - br).amax());
            coords
        },
        tol,
    )?;
    if worst > tol.angle * alg.max_abs_c().max(1.0) {
        return Err(Error::IdealityViolation { residual: worst });
    }
    Ok(out)
}

/// Nijenhuis tensor data: the tensor itself, the residual against -4 tau,
/// and kernel / image dimensions.
#[derive(Debug, Clone)]
pub struct NijenhuisResult {
    /// tensor[a][b] = N(v_a, v_b) in V-coordinates.
    pub tensor: Vec<Vec<DVector<f64>>>,
    pub residual_vs_torsion: f64,
    pub kernel_dim: usize,
    pub image_dim: usize,
}

/// Nijenhuis tensor of J on the moving part. The homogeneous-space formula is
/// evaluated through fundamental vector fields, whose bracket is the negative
/// of the algebra bracket, so every projected-bracket term flips sign
/// relative to the raw structure constants.
pub fn nijenhuis(m: &ThreeSymModel, tol: &Tolerances) -> NijenhuisResult {
    let nv = m.dim_v();
    let e = |i: usize| -> DVector<f64> {
        let mut v = DVector::zeros(nv);
        v[i] = 1.0;
        v
    };
    let mut tensor = vec![vec![DVector::zeros(nv); nv]; nv];
    let mut worst: f64 = 0.0;
    for a in 0..nv {
        for b in 0..nv {
            let ja = m.j.column(a).into_owned();
            let jb = m.j.column(b).into_owned();
            let raw = m.tau_vec(&e(a), &e(b)) - m.tau_vec(&ja, &jb)
                + &m.j * (m.tau_vec(&e(a), &jb) + m.tau_vec(&ja, &e(b)));
            let n_ab = -raw;
            worst = worst.max((&n_ab + 4.0 * &m.tau[a][b]).amax());
            tensor[a][b] = n_ab;
        }
    }
    let mut stacked = DMatrix::zeros(nv * nv, nv);
    let mut img_cols = Vec::new();
    for col in 0..nv {
        for b in 0..nv {
            for r in 0..nv {
                stacked[(b * nv + r, col)] = tensor[col][b][r];
            }
            if col < b {
                img_cols.push(tensor[col][b].clone());
            }
        }
    }
    let kernel_dim = linalg::nullspace(&stacked, tol).dim();
    let image_dim = span_of(&img_cols, nv, tol).dim();
    NijenhuisResult {
        tensor,
        residual_vs_torsion: worst,
        kernel_dim,
        image_dim,
    }
}

/// Type II certification residual: tau_v tau_w = 0 for all v, w and
/// [[g, g], g] = 0.
pub fn type_ii_residual(m: &ThreeSymModel) -> f64 {
    let nv = m.dim_v();
    let mut worst: f64 = 0.0;
    let e = |i: usize| -> DVector<f64> {
        let mut v = DVector::zeros(nv);
        v[i] = 1.0;
        v
    };
    for a in 0..nv {
        let ta = m.tau_op(&e(a));
        for b in 0..nv {
            let tb = m.tau_op(&e(b));
            worst = worst.max(linalg::max_abs(&(&ta * &tb)));
        }
    }
    let alg = &m.algebra;
    let d = alg.dim;
    for i in 0..d {
        for j in (i + 1)..d {
            let br = alg.bracket_basis(i, j);
            let adbr = alg.ad_vec(&br);
            worst = worst.max(linalg::max_abs(&adbr));
        }
    }
    worst
}

/// Hermitian symmetric model: sigma = 1 on the isotropy indices and
/// z0 + z1 ad_z on the complement, built directly from Cartan data.
pub fn hermitian_symmetric_model(
    algebra: LieAlgebra,
    k_indices: &[usize],
    h_indices: &[usize],
    j_h: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<ThreeSymModel> {
    let dim = algebra.dim;
    let mut sigma = DMatrix::zeros(dim, dim);
    for &k in k_indices {
        sigma[(k, k)] = 1.0;
    }
    for (c, &hc) in h_indices.iter().enumerate() {
        sigma[(hc, hc)] += Z0;
        for (r, &hr) in h_indices.iter().enumerate() {
            sigma[(hr, hc)] += Z1 * j_h[(r, c)];
        }
    }
    let h_basis = coordinate_subspace(dim, k_indices);
    let v_basis = coordinate_subspace(dim, h_indices);
    ThreeSymModel::from_decomposition(algebra, sigma, h_basis, v_basis, tol)
}

pub fn coordinate_subspace(ambient: usize, indices: &[usize]) -> Subspace {
    let mut m = DMatrix::zeros(ambient, indices.len());
    for (c, &i) in indices.iter().enumerate() {
        m[(i, c)] = 1.0;
    }
    Subspace::new(m)
}

/// Two-step nilpotent fixture with h = 0: a complex Heisenberg-type algebra
/// on C^2 + C whose bracket is the conjugate-bilinear determinant. The
/// rotation z0 + z1 J has no fixed vectors, so the model has type II.
pub fn type_ii_fixture(tol: &Tolerances) -> Result<ThreeSymModel> {
    // Real basis: u1, iu1, u2, iu2, w, iw with [u, v] = conj(det(u, v)) w.
    let names = (0..6).map(|i| format!("n{i}")).collect();
    let alg = LieAlgebra::from_brackets(
        names,
        |i, j| {
            let mut v = DVector::zeros(6);
            match (i, j) {
                (0, 2) => v[4] = 1.0,
                (0, 3) => v[5] = -1.0,
                (1, 2) => v[5] = -1.0,
                (1, 3) => v[4] = -1.0,
                _ => {}
            }
            v
        },
        tol,
    )?;
    let j = linalg::standard_complex_structure(3);
    let sigma = Z0 * DMatrix::<f64>::identity(6, 6) + Z1 * &j;
    reductive_split(alg, sigma, tol)
}

/// Flat abelian model of the given complex dimension.
pub fn flat_abelian_model(m: usize, tol: &Tolerances) -> Result<ThreeSymModel> {
    let alg = LieAlgebra::abelian(2 * m, tol)?;
    let j = linalg::standard_complex_structure(m);
    let sigma = Z0 * DMatrix::<f64>::identity(2 * m, 2 * m) + Z1 * &j;
    reductive_split(alg, sigma, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_sp;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sl2_symmetric_model() -> ThreeSymModel {
        let rep = build_sp(1, &tol()).unwrap();
        hermitian_symmetric_model(
            rep.algebra.clone(),
            &rep.cartan.k_indices,
            &rep.cartan.h_indices,
            &rep.cartan.j_h,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn symmetric_sl2_split() {
        let m = sl2_symmetric_model();
        assert_eq!(m.dim_h(), 1);
        assert_eq!(m.dim_v(), 2);
        for a in 0..2 {
            for b in 0..2 {
                assert!(m.tau(a, b).amax() < 1e-12);
            }
        }
        let report = verify_model_identities(&m, &tol());
        assert!(report.all_pass, "{report:?}");
    }

    #[test]
    fn symmetric_sl2_transvection_is_whole_algebra() {
        let m = sl2_symmetric_model();
        let (g_tr, h_tr) = transvection(&m, &tol()).unwrap();
        assert_eq!(g_tr.dim(), 3);
        assert_eq!(h_tr.dim(), 1);
    }

    #[test]
    fn symmetric_model_nullity_zero() {
        let m = sl2_symmetric_model();
        let res = curvature_nullity_w(&m, &tol()).unwrap();
        assert_eq!(res.w.dim(), 0);
    }

    #[test]
    fn symmetric_model_nijenhuis_zero() {
        let m = sl2_symmetric_model();
        let nij = nijenhuis(&m, &tol());
        assert!(nij.residual_vs_torsion < 1e-12);
        assert_eq!(nij.image_dim, 0);
    }

    #[test]
    fn type_ii_fixture_properties() {
        let m = type_ii_fixture(&tol()).unwrap();
        assert_eq!(m.dim_h(), 0);
        assert_eq!(m.dim_v(), 6);
        let report = verify_model_identities(&m, &tol());
        assert!(report.all_pass, "{report:?}");
        assert!(type_ii_residual(&m) < 1e-12);
        let res = curvature_nullity_w(&m, &tol()).unwrap();
        assert_eq!(res.w.dim(), 6);
        let (_, h_tr) = transvection(&m, &tol()).unwrap();
        assert_eq!(h_tr.dim(), 0);
    }

    #[test]
    fn sigma_without_order_three_rejected() {
        let alg = LieAlgebra::abelian(2, &tol()).unwrap();
        let sigma = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]); // order 4
        assert!(matches!(
            reductive_split(alg, sigma, &tol()),
            Err(Error::NotOrderThree { .. })
        ));
    }

    #[test]
    fn identity_sigma_rejected() {
        let alg = LieAlgebra::abelian(2, &tol()).unwrap();
        let sigma = DMatrix::identity(2, 2);
        assert!(matches!(
            reductive_split(alg, sigma, &tol()),
            Err(Error::SigmaIsIdentity)
        ));
    }

    #[test]
    fn non_automorphism_rejected() {
        let alg = crate::lie::sl2(&tol());
        // Fix H, rotate the (E, F) plane by the cube root: not an
        // automorphism because [H, E] = 2E is not rotation invariant.
        let j3 = linalg::standard_complex_structure(1);
        let mut sigma = DMatrix::identity(3, 3);
        let block = Z0 * DMatrix::<f64>::identity(2, 2) + Z1 * &j3;
        sigma.view_mut((1, 1), (2, 2)).copy_from(&block);
        assert!(matches!(
            reductive_split(alg, sigma, &tol()),
            Err(Error::NotAutomorphism { .. })
        ));
    }

    #[test]
    fn corrupted_torsion_detected() {
        let rep = build_sp(1, &tol()).unwrap();
        let mut sm = crate::semidirect::build_type_model(&rep, &tol()).unwrap();
        let clean = verify_model_identities(&sm.model, &tol());
        assert!(clean.all_pass);
        sm.model.corrupt_tau_entry(0, 2, 1, 0.05);
        let report = verify_model_identities(&sm.model, &tol());
        assert!(report.torsion_j_flip > 1e-3, "{report:?}");
        assert!(!report.all_pass);
    }

    #[test]
    fn flat_model_trivial_invariants() {
        let m = flat_abelian_model(2, &tol()).unwrap();
        assert_eq!(m.dim_v(), 4);
        let report = verify_model_identities(&m, &tol());
        assert!(report.all_pass, "{report:?}");
        let nij = nijenhuis(&m, &tol());
        assert_eq!(nij.kernel_dim, 4);
    }
}
