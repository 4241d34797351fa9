//! Representations of Hermitian symmetric Lie algebras with Cartan-splitting
//! metadata, the admissibility checker, background metrics, the Casimir-type
//! operator and centralizer splittings.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lie::{self, LieAlgebra};
use crate::linalg::{self, BilinearForm, Subspace};

/// Compact / non-compact type of the acting Hermitian symmetric algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraType {
    NonCompact,
    Compact,
}

/// Cartan-splitting metadata for a Hermitian symmetric Lie algebra built by
/// the catalog: which basis indices span the isotropy part k and the
/// complement H, the central element z of k, and the complex structure on H.
#[derive(Debug, Clone)]
pub struct CartanData {
    pub k_indices: Vec<usize>,
    pub h_indices: Vec<usize>,
    /// Coordinates of z in the full L basis.
    pub z_coords: DVector<f64>,
    /// Matrix of ad_z restricted to H, in H-coordinates.
    pub j_h: DMatrix<f64>,
}

/// Multiplicity structure of a catalog representation: an irreducible block
/// repeated `mult` times. Used by the moduli machinery.
#[derive(Debug, Clone)]
pub struct SummandInfo {
    pub base_id: String,
    pub base_dim: usize,
    pub mult: usize,
}

/// A Lie algebra together with one matrix per basis element acting on a real
/// vector space, an optional complex structure on that space, and Cartan
/// metadata.
#[derive(Debug, Clone)]
pub struct Representation {
    pub algebra: LieAlgebra,
    pub dim_v: usize,
    pub rho: Vec<DMatrix<f64>>,
    pub j_v: Option<DMatrix<f64>>,
    pub cartan: CartanData,
    pub type_flag: AlgebraType,
    pub name: String,
    /// Background metric on V in the catalog normalization.
    pub h_v: DMatrix<f64>,
    pub summands: Vec<SummandInfo>,
}

/// Residuals gathered by `check_admissible`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub faithful: bool,
    pub fixed_vectors_dim: usize,
    pub rep_residual: f64,
    pub k_preserves_j: f64,
    pub h_anticommutes_j: f64,
    pub eq_ad_ma: f64,
    pub jordan_residual: f64,
    pub trace_free: f64,
    pub verdict: bool,
}

impl Representation {
    pub fn dim_l(&self) -> usize {
        self.algebra.dim
    }

    /// rho applied to an arbitrary algebra element given by coordinates.
    pub fn rho_vec(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_v, self.dim_v);
        for i in 0..self.dim_l() {
            if x[i] != 0.0 {
                m += x[i] * &self.rho[i];
            }
        }
        m
    }

    pub fn rho_z(&self) -> DMatrix<f64> {
        self.rho_vec(&self.cartan.z_coords)
    }

    /// Max residual of rho([x,y]) - [rho(x), rho(y)] over basis pairs.
    pub fn representation_residual(&self) -> f64 {
        let d = self.dim_l();
        let scale = self.rho.iter().map(linalg::max_abs).fold(1.0f64, f64::max);
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                let lhs = self.rho_vec(&self.algebra.bracket_basis(i, j));
                let rhs = linalg::comm(&self.rho[i], &self.rho[j]);
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst / (scale * scale)
    }

    /// Kernel dimension of the linear map L -> gl(V).
    pub fn kernel_dim(&self, tol: &Tolerances) -> usize {
        let d = self.dim_l();
        let n2 = self.dim_v * self.dim_v;
        let mut m = DMatrix::zeros(n2, d);
        for (j, r) in self.rho.iter().enumerate() {
            m.set_column(j, &linalg::vectorize(r));
        }
        linalg::nullspace(&m, tol).dim()
    }

    /// Fixed vectors V^L = common kernel of all rho(b_i).
    pub fn fixed_vectors(&self, tol: &Tolerances) -> Subspace {
        let n = self.dim_v;
        let d = self.dim_l();
        let mut stacked = DMatrix::zeros(n * d, n);
        for (i, r) in self.rho.iter().enumerate() {
            stacked.view_mut((i * n, 0), (n, n)).copy_from(r);
        }
        linalg::nullspace(&stacked, tol)
    }

    /// Centralizer c(L, rho, V) = {f : [f, rho(b_i)] = 0 for all i}.
    /// The kernel is refined one generator at a time, keeping the working
    /// set at n^2 x (current dimension).
    pub fn centralizer(&self, tol: &Tolerances) -> Vec<DMatrix<f64>> {
        let n = self.dim_v;
        let id = DMatrix::<f64>::identity(n, n);
        // Implicit starting basis: all matrix units.
        let mut basis: Option<Vec<DMatrix<f64>>> = None;
        for r in &self.rho {
            match basis {
                None => {
                    let k = id.kronecker(r) - r.transpose().kronecker(&id);
                    let ns = linalg::nullspace(&k, tol);
                    basis = Some(
                        (0..ns.dim())
                            .map(|j| linalg::unvectorize(&ns.basis.column(j).into_owned(), n, n))
                            .collect(),
                    );
                }
                Some(ref cur) => {
                    if cur.is_empty() {
                        break;
                    }
                    let mut constraint = DMatrix::zeros(n * n, cur.len());
                    for (j, f) in cur.iter().enumerate() {
                        constraint.set_column(j, &linalg::vectorize(&linalg::comm(f, r)));
                    }
                    let ns = linalg::nullspace(&constraint, tol);
                    if ns.dim() == cur.len() {
                        continue;
                    }
                    let next: Vec<DMatrix<f64>> = (0..ns.dim())
                        .map(|k| {
                            let mut out = DMatrix::zeros(n, n);
                            for (idx, b) in cur.iter().enumerate() {
                                let c = ns.basis[(idx, k)];
                                if c != 0.0 {
                                    out += c * b;
                                }
                            }
                            out
                        })
                        .collect();
                    basis = Some(next);
                }
            }
        }
        linalg::matrix_span(&basis.unwrap_or_default(), tol)
    }

    /// Max commutator residual of the centralizer with rho; used by tests.
    pub fn centralizer_residual(&self, f: &DMatrix<f64>) -> f64 {
        let scale = linalg::max_abs(f).max(1.0);
        self.rho
            .iter()
            .map(|r| linalg::max_abs(&linalg::comm(f, r)))
            .fold(0.0f64, f64::max)
            / scale
    }
}

/// Runs all admissibility residuals for a representation with Cartan data and
/// a complex structure on V.
pub fn check_admissible(rep: &Representation, tol: &Tolerances) -> AdmissibilityReport {
    let j_v = rep
        .j_v
        .as_ref()
        .expect("check_admissible requires a complex structure on V");
    let rep_residual = rep.representation_residual();
    let faithful = rep.kernel_dim(tol) == 0;
    let fixed_dim = rep.fixed_vectors(tol).dim();

    let mut k_preserves_j: f64 = 0.0;
    for &k in &rep.cartan.k_indices {
        k_preserves_j = k_preserves_j.max(linalg::max_abs(&linalg::comm(&rep.rho[k], j_v)));
    }
    let mut h_anti: f64 = 0.0;
    for &h in &rep.cartan.h_indices {
        h_anti = h_anti.max(linalg::max_abs(&linalg::anticomm(&rep.rho[h], j_v)));
    }

    // rho(J_H x) = rho(x) J_V over the H basis.
    let mut ad_ma: f64 = 0.0;
    let hn = rep.cartan.h_indices.len();
    for (col, &h) in rep.cartan.h_indices.iter().enumerate() {
        // J_H maps the col-th H-basis vector to sum_r (j_h)_{r,col} e_{h_r}.
        let mut lhs = DMatrix::zeros(rep.dim_v, rep.dim_v);
        for r in 0..hn {
            let coef = rep.cartan.j_h[(r, col)];
            if coef != 0.0 {
                lhs += coef * &rep.rho[rep.cartan.h_indices[r]];
            }
        }
        let rhs = &rep.rho[h] * j_v;
        ad_ma = ad_ma.max(linalg::max_abs(&(lhs - rhs)));
    }

    // Consequence check: 2 rho(x) rho(y) = J_V rho([J_H x, y]) + rho([x, y]).
    let mut jordan: f64 = 0.0;
    for (ci, &hi) in rep.cartan.h_indices.iter().enumerate() {
        for &hj in rep.cartan.h_indices.iter() {
            let mut jh_x = DVector::zeros(rep.dim_l());
            for r in 0..hn {
                jh_x[rep.cartan.h_indices[r]] = rep.cartan.j_h[(r, ci)];
            }
            let e_hi = basis_vec(rep.dim_l(), hi);
            let e_hj = basis_vec(rep.dim_l(), hj);
            let lhs = 2.0 * &rep.rho[hi] * &rep.rho[hj];
            let rhs = j_v * rep.rho_vec(&rep.algebra.bracket(&jh_x, &e_hj))
                + rep.rho_vec(&rep.algebra.bracket(&e_hi, &e_hj));
            jordan = jordan.max(linalg::max_abs(&(lhs - rhs)));
        }
    }

    let trace_free = rep
        .rho
        .iter()
        .map(|r| r.trace().abs())
        .fold(0.0f64, f64::max);

    // Catalog data is O(1), so absolute thresholds are meaningful here.
    let t = tol.residual;
    let verdict = faithful
        && fixed_dim == 0
        && rep_residual < t
        && k_preserves_j < t
        && h_anti < t
        && ad_ma < t
        && jordan < t
        && trace_free < t;
    AdmissibilityReport {
        faithful,
        fixed_vectors_dim: fixed_dim,
        rep_residual,
        k_preserves_j,
        h_anticommutes_j: h_anti,
        eq_ad_ma: ad_ma,
        jordan_residual: jordan,
        trace_free,
        verdict,
    }
}

fn basis_vec(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Returns the catalog background metric and verifies the branch conditions:
/// rho(k) skew and J-commuting in both branches; rho(H) symmetric
/// (non-compact) or skew (compact) with respect to it.
pub fn background_metric(rep: &Representation, tol: &Tolerances) -> Result<BilinearForm> {
    let h = &rep.h_v;
    let h_inv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::BackgroundCheckFailed("metric is singular".into()))?;
    let scale = rep.rho.iter().map(linalg::max_abs).fold(1.0f64, f64::max);
    let t = tol.residual * scale * 10.0;
    let mut worst_k: f64 = 0.0;
    for &k in &rep.cartan.k_indices {
        let sym = linalg::metric_transpose(&rep.rho[k], h, &h_inv) + &rep.rho[k];
        worst_k = worst_k.max(linalg::max_abs(&sym));
        if let Some(j_v) = &rep.j_v {
            worst_k = worst_k.max(linalg::max_abs(&linalg::comm(&rep.rho[k], j_v)));
        }
    }
    if worst_k > t {
        return Err(Error::BackgroundCheckFailed(format!(
            "isotropy does not act by skew J-commuting maps (residual {worst_k:.3e})"
        )));
    }
    let mut worst_h: f64 = 0.0;
    for &hh in &rep.cartan.h_indices {
        let tr = linalg::metric_transpose(&rep.rho[hh], h, &h_inv);
        let m = match rep.type_flag {
            AlgebraType::NonCompact => tr - &rep.rho[hh],
            AlgebraType::Compact => tr + &rep.rho[hh],
        };
        worst_h = worst_h.max(linalg::max_abs(&m));
    }
    if worst_h > t {
        return Err(Error::BackgroundCheckFailed(format!(
            "H-part fails the symmetry branch condition (residual {worst_h:.3e})"
        )));
    }
    Ok(BilinearForm::new(h.clone(), tol))
}

/// Result of the Casimir-type computation.
#[derive(Debug, Clone)]
pub struct CasimirResult {
    pub casimir: DMatrix<f64>,
    pub lambda: f64,
    /// Residual of the identity C = (Lambda / 2) J_V rho(z).
    pub identity_residual: f64,
    pub casimir_invertible: bool,
    pub rho_z_invertible: bool,
}

/// Casimir-type operator C = sum_k rho(e_k)^2 over a g_H-orthonormal basis of
/// H, and the scalar Lambda with B_L|_H = Lambda g_H.
pub fn casimir(
    rep: &Representation,
    g_h: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<CasimirResult> {
    let hn = rep.cartan.h_indices.len();
    let b = lie::killing_form(&rep.algebra, tol);
    let mut b_h = DMatrix::zeros(hn, hn);
    for (a, &i) in rep.cartan.h_indices.iter().enumerate() {
        for (c, &j) in rep.cartan.h_indices.iter().enumerate() {
            b_h[(a, c)] = b.matrix[(i, j)];
        }
    }
    let lambda = (g_h.clone().try_inverse().ok_or(Error::LambdaNotScalar {
        residual: f64::INFINITY,
    })? * &b_h)
        .trace()
        / hn as f64;
    let resid = linalg::max_abs(&(&b_h - lambda * g_h)) / linalg::max_abs(&b_h).max(1.0);
    if resid > tol.residual * 100.0 {
        return Err(Error::LambdaNotScalar { residual: resid });
    }

    // Orthonormalize the H-coordinate basis with respect to g_H.
    let chol = g_h
        .clone()
        .cholesky()
        .ok_or_else(|| Error::BackgroundCheckFailed("g_H must be positive definite".into()))?;
    let l_inv_t = chol
        .l()
        .try_inverse()
        .expect("cholesky factor invertible")
        .transpose();
    // Columns of l_inv_t are the coordinates of an orthonormal basis.
    let mut cas = DMatrix::zeros(rep.dim_v, rep.dim_v);
    for k in 0..hn {
        let mut r = DMatrix::zeros(rep.dim_v, rep.dim_v);
        for a in 0..hn {
            let coef = l_inv_t[(a, k)];
            if coef != 0.0 {
                r += coef * &rep.rho[rep.cartan.h_indices[a]];
            }
        }
        cas += &r * &r;
    }

    let (identity_residual, rho_z_invertible, casimir_invertible) = match &rep.j_v {
        Some(j_v) => {
            let rhs = (lambda / 2.0) * j_v * rep.rho_z();
            let resid = linalg::max_abs(&(&cas - rhs));
            let rz = rep.rho_z();
            let inv_rz = linalg::rank(&rz, tol) == rep.dim_v;
            let inv_c = linalg::rank(&cas, tol) == rep.dim_v;
            (resid, inv_rz, inv_c)
        }
        None => (f64::NAN, false, linalg::rank(&cas, tol) == rep.dim_v),
    };
    Ok(CasimirResult {
        casimir: cas,
        lambda,
        identity_residual,
        casimir_invertible,
        rho_z_invertible,
    })
}

/// Representation type of an irreducible block, detected from the
/// centralizer split: (dim c+, dim c-) = (1,0) real, (1,1) complex,
/// (1,3) quaternionic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepType {
    Real,
    Complex,
    Quaternionic,
    Reducible,
}

/// Symmetric / skew split of the centralizer with respect to a background
/// metric, plus the representation-type label.
pub struct CentralizerSplit {
    pub c_plus: Vec<DMatrix<f64>>,
    pub c_minus: Vec<DMatrix<f64>>,
    pub rep_type: RepType,
    /// Residual of the J-commutation property of the centralizer.
    pub j_comm_residual: f64,
}

pub fn centralizer_split(
    rep: &Representation,
    h_v: &DMatrix<f64>,
    tol: &Tolerances,
) -> CentralizerSplit {
    let cent = rep.centralizer(tol);
    let h_inv = h_v
        .clone()
        .try_inverse()
        .expect("background metric invertible");
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for f in &cent {
        let ft = linalg::metric_transpose(f, h_v, &h_inv);
        plus.push(0.5 * (f + &ft));
        minus.push(0.5 * (f - &ft));
    }
    let c_plus = linalg::matrix_span(&plus, tol);
    let c_minus = linalg::matrix_span(&minus, tol);
    let mut j_res: f64 = 0.0;
    if let Some(j_v) = &rep.j_v {
        for f in &cent {
            j_res = j_res.max(linalg::max_abs(&linalg::comm(f, j_v)) / linalg::max_abs(f).max(1.0));
        }
    }
    let rep_type = match (c_plus.len(), c_minus.len()) {
        (1, 0) => RepType::Real,
        (1, 1) => RepType::Complex,
        (1, 3) => RepType::Quaternionic,
        _ => RepType::Reducible,
    };
    CentralizerSplit {
        c_plus,
        c_minus,
        rep_type,
        j_comm_residual: j_res,
    }
}

/// Compact-type double of a non-compact admissible representation: L* acts on
/// V + V block-diagonally on k and off-diagonally on H.
pub fn dualize(rep: &Representation, tol: &Tolerances) -> Result<Representation> {
    if rep.type_flag != AlgebraType::NonCompact {
        return Err(Error::NotAdmissible(
            "dualize expects a non-compact representation".into(),
        ));
    }
    let report = check_admissible(rep, tol);
    if !report.verdict {
        return Err(Error::NotAdmissible(format!(
            "dualize requires an admissible input: {report:?}"
        )));
    }
    let d = rep.dim_l();
    let is_h: Vec<bool> = {
        let mut v = vec![false; d];
        for &h in &rep.cartan.h_indices {
            v[h] = true;
        }
        v
    };
    // Dual algebra: flip the sign of [x, y] for x, y in H.
    let star = LieAlgebra::from_brackets(
        rep.algebra
            .basis_names
            .iter()
            .map(|s| format!("{s}*"))
            .collect(),
        |i, j| {
            let v = rep.algebra.bracket_basis(i, j);
            if is_h[i] && is_h[j] {
                -v
            } else {
                v
            }
        },
        tol,
    )?;
    let n = rep.dim_v;
    let rho_star: Vec<DMatrix<f64>> = (0..d)
        .map(|i| {
            let mut m = DMatrix::zeros(2 * n, 2 * n);
            if is_h[i] {
                m.view_mut((0, n), (n, n)).copy_from(&rep.rho[i]);
                m.view_mut((n, 0), (n, n)).copy_from(&(-&rep.rho[i]));
            } else {
                m.view_mut((0, 0), (n, n)).copy_from(&rep.rho[i]);
                m.view_mut((n, n), (n, n)).copy_from(&rep.rho[i]);
            }
            m
        })
        .collect();
    let j_v = rep.j_v.as_ref().map(|j| {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(j);
        m.view_mut((n, n), (n, n)).copy_from(j);
        m
    });
    let mut h2 = DMatrix::zeros(2 * n, 2 * n);
    h2.view_mut((0, 0), (n, n)).copy_from(&rep.h_v);
    h2.view_mut((n, n), (n, n)).copy_from(&rep.h_v);
    Ok(Representation {
        algebra: star,
        dim_v: 2 * n,
        rho: rho_star,
        j_v,
        cartan: rep.cartan.clone(),
        type_flag: AlgebraType::Compact,
        name: format!("dual:{}", rep.name),
        h_v: h2,
        summands: rep
            .summands
            .iter()
            .map(|s| SummandInfo {
                base_id: format!("dual:{}", s.base_id),
                base_dim: 2 * s.base_dim,
                mult: s.mult,
            })
            .collect(),
    })
}

/// Block-diagonal direct sum of representations of one and the same algebra.
pub fn direct_sum(reps: &[Representation], tol: &Tolerances) -> Result<Representation> {
    if reps.is_empty() {
        return Err(Error::MismatchedAlgebra("empty summand list".into()));
    }
    let first = &reps[0];
    for r in reps.iter().skip(1) {
        if r.dim_l() != first.dim_l() {
            return Err(Error::MismatchedAlgebra(
                "different algebra dimensions".into(),
            ));
        }
        let mut worst: f64 = 0.0;
        for i in 0..first.dim_l() {
            worst = worst.max(linalg::max_abs(&(r.algebra.ad(i) - first.algebra.ad(i))));
        }
        if worst > tol.residual {
            return Err(Error::MismatchedAlgebra(format!(
                "structure constants differ (residual {worst:.3e})"
            )));
        }
        if r.type_flag != first.type_flag {
            return Err(Error::MismatchedAlgebra(
                "mixed compact/non-compact summands".into(),
            ));
        }
    }
    let n: usize = reps.iter().map(|r| r.dim_v).sum();
    let d = first.dim_l();
    let mut rho = vec![DMatrix::zeros(n, n); d];
    let mut j_v = DMatrix::zeros(n, n);
    let mut h_v = DMatrix::zeros(n, n);
    let mut offset = 0;
    let mut have_j = true;
    for r in reps {
        for i in 0..d {
            rho[i]
                .view_mut((offset, offset), (r.dim_v, r.dim_v))
                .copy_from(&r.rho[i]);
        }
        match &r.j_v {
            Some(j) => j_v
                .view_mut((offset, offset), (r.dim_v, r.dim_v))
                .copy_from(j),
            None => have_j = false,
        }
        h_v.view_mut((offset, offset), (r.dim_v, r.dim_v))
            .copy_from(&r.h_v);
        offset += r.dim_v;
    }
    let mut summands = Vec::new();
    for r in reps {
        for s in &r.summands {
            summands.push(s.clone());
        }
    }
    let name = format!(
        "sum:{}",
        reps.iter()
            .map(|r| r.name.clone())
            .collect::<Vec<_>>()
            .join("+")
    );
    Ok(Representation {
        algebra: first.algebra.clone(),
        dim_v: n,
        rho,
        j_v: if have_j { Some(j_v) } else { None },
        cartan: first.cartan.clone(),
        type_flag: first.type_flag,
        name,
        h_v,
        summands,
    })
}

/// Eigenvalue-structure check for J_V rho(z): for every detected eigenvalue
/// lambda of the pencil, 2 lambda (dim V_l + dim V_-l) = dim V_l - dim V_-l
/// where V_l = ker(rho(z) + (1/2 - lambda) J_V). Returns the worst violation.
pub fn rho_z_eigenvalue_residual(rep: &Representation, tol: &Tolerances) -> f64 {
    let j_v = rep.j_v.as_ref().expect("requires J_V");
    // J_V rho(z) is h-symmetric and commutes with J_V; eigenvalue kappa
    // corresponds to lambda = 1/2 - kappa.
    let k = j_v * rep.rho_z();
    let h_inv = rep.h_v.clone().try_inverse().expect("metric invertible");
    let sym = 0.5 * (&k + linalg::metric_transpose(&k, &rep.h_v, &h_inv));
    let evs = linalg::pencil_eigenvalues(&(rep.h_v.clone() * &sym), &rep.h_v);
    // Cluster eigenvalues.
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for e in evs {
        match clusters.last_mut() {
            Some((v, c)) if (e - *v).abs() < 1e-6 => {
                *v = (*v * *c as f64 + e) / (*c as f64 + 1.0);
                *c += 1;
            }
            _ => clusters.push((e, 1)),
        }
    }
    let dim_at = |lambda: f64| -> usize {
        let kappa = 0.5 - lambda;
        clusters
            .iter()
            .filter(|(v, _)| (v - kappa).abs() < 1e-6)
            .map(|(_, c)| *c)
            .sum()
    };
    let mut worst: f64 = 0.0;
    for (kappa, _) in &clusters {
        let lambda = 0.5 - kappa;
        let dp = dim_at(lambda) as f64;
        let dm = dim_at(-lambda) as f64;
        worst = worst.max((2.0 * lambda * (dp + dm) - (dp - dm)).abs());
    }
    let _ = tol;
    worst
}

/// Hom'_k(H, V): J-commuting k-intertwiners from H to V. Vanishes for
/// admissible representations.
pub fn mixed_intertwiner_dim(rep: &Representation, tol: &Tolerances) -> usize {
    let hn = rep.cartan.h_indices.len();
    let n = rep.dim_v;
    let j_v = match &rep.j_v {
        Some(j) => j,
        None => return 0,
    };
    // Unknown F: n x hn. Constraints: F [h, x]_H = rho(h) F x for h in k,
    // x in H-basis; F J_H = J_V F.
    let kn = rep.cartan.k_indices.len();
    let rows = kn * n * hn + n * hn;
    let mut a = DMatrix::zeros(rows, n * hn);
    let mut row0 = 0;
    for &kb in &rep.cartan.k_indices {
        // [k, x_c] in H coordinates.
        for c in 0..hn {
            let br = rep.algebra.bracket_basis(kb, rep.cartan.h_indices[c]);
            // H-coordinates of the bracket.
            for r in 0..n {
                let row = row0 + c * n + r;
                for (a_idx, &hidx) in rep.cartan.h_indices.iter().enumerate() {
                    // F column a_idx contributes br[hidx] * F_{r, a_idx}
                    a[(row, a_idx * n + r)] += br[hidx];
                }
                for q in 0..n {
                    // -(rho(k) F)_{r,c} = -sum_q rho(k)_{r,q} F_{q,c}
                    a[(row, c * n + q)] -= rep.rho[kb][(r, q)];
                }
            }
        }
        row0 += n * hn;
    }
    // F J_H - J_V F = 0.
    for c in 0..hn {
        for r in 0..n {
            let row = row0 + c * n + r;
            for a_idx in 0..hn {
                a[(row, a_idx * n + r)] += rep.cartan.j_h[(a_idx, c)];
            }
            for q in 0..n {
                a[(row, c * n + q)] -= j_v[(r, q)];
            }
        }
    }
    linalg::nullspace(&a, tol).dim()
}

/// Symplectic-embedding residual: rho(L) preserves omega = h(J ., .).
pub fn symplectic_residual(rep: &Representation) -> f64 {
    let j_v = match &rep.j_v {
        Some(j) => j,
        None => return f64::NAN,
    };
    let omega = j_v.transpose() * &rep.h_v;
    let scale = linalg::max_abs(&omega).max(1.0);
    rep.rho
        .iter()
        .map(|r| linalg::max_abs(&(r.transpose() * &omega + &omega * r)))
        .fold(0.0f64, f64::max)
        / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_rep, build_sp};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn centralizer_closed_under_commutator_and_transpose() {
        let rep = build_rep("sum:sp:1+sp:1", &tol()).unwrap();
        let cent = rep.centralizer(&tol());
        assert_eq!(cent.len(), 4);
        let h_inv = rep.h_v.clone().try_inverse().unwrap();
        // Span as a subspace of vectorized matrices.
        let span = linalg::matrix_span(&cent, &tol());
        let mut stacked = DMatrix::zeros(rep.dim_v * rep.dim_v, span.len());
        for (j, m) in span.iter().enumerate() {
            stacked.set_column(j, &linalg::vectorize(m));
        }
        let sub = crate::linalg::Subspace::new(stacked);
        for a in &cent {
            let t = linalg::metric_transpose(a, &rep.h_v, &h_inv);
            assert!(sub.contains_vector(&linalg::vectorize(&t), &tol()));
            for b in &cent {
                let c = linalg::comm(a, b);
                assert!(sub.contains_vector(&linalg::vectorize(&c), &tol()));
            }
        }
    }

    #[test]
    fn central_eigenvalue_count_identity() {
        for id in ["sp:2", "su:2,1", "su1n:2:1", "so2n:3", "dual:sp:1"] {
            let rep = build_rep(id, &tol()).unwrap();
            let resid = rho_z_eigenvalue_residual(&rep, &tol());
            assert!(resid < 1e-6, "{id}: {resid}");
        }
    }

    #[test]
    fn mixed_intertwiners_vanish() {
        for id in ["sp:1", "su:1,2", "su1n:2:2"] {
            let rep = build_rep(id, &tol()).unwrap();
            assert_eq!(mixed_intertwiner_dim(&rep, &tol()), 0, "{id}");
        }
    }

    #[test]
    fn symplectic_embedding_noncompact() {
        for id in ["sp:2", "su1n:2:1", "so_star:2"] {
            let rep = build_rep(id, &tol()).unwrap();
            assert!(symplectic_residual(&rep) < 1e-12, "{id}");
        }
    }

    #[test]
    fn flipped_j_block_detected() {
        let mut rep = build_sp(1, &tol()).unwrap();
        if let Some(j) = rep.j_v.as_mut() {
            *j = -j.clone();
        }
        let report = check_admissible(&rep, &tol());
        assert!(report.eq_ad_ma > 0.1, "{report:?}");
        assert!(!report.verdict);
    }

    #[test]
    fn dualize_rejects_compact_input() {
        let rep = build_rep("dual:sp:1", &tol()).unwrap();
        assert!(matches!(
            dualize(&rep, &tol()),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn direct_sum_rejects_mismatched_algebras() {
        let a = build_rep("sp:1", &tol()).unwrap();
        let b = build_rep("su:1,1", &tol()).unwrap();
        assert!(matches!(
            direct_sum(&[a, b], &tol()),
            Err(Error::MismatchedAlgebra(_))
        ));
    }
}
