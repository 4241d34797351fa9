//! Dense linear algebra utilities: SVD-based nullspaces and spans, subspaces
//! with principal-angle comparison, and symmetric bilinear forms.
//!
//! All rank decisions go through a single relative singular-value threshold so
//! that every subspace computed in the crate is reproducible.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;

/// Orthonormal basis of a linear subspace of R^n, columns of `basis`.
#[derive(Debug, Clone)]
pub struct Subspace {
    /// n x k matrix with orthonormal columns.
    pub basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    /// Orthogonal projector P = Q Q^T onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Largest principal-angle sine between `self` and the span of `other`'s
    /// columns; 0 means containment of `other` in `self`.
    pub fn containment_defect(&self, other: &DMatrix<f64>) -> f64 {
        if other.ncols() == 0 {
            return 0.0;
        }
        let resid = other - self.projector() * other;
        // Normalize column-wise so the defect is scale free. Columns at
        // float-noise level are zero vectors and impose no constraint.
        let mut worst: f64 = 0.0;
        for j in 0..other.ncols() {
            let n = other.column(j).norm();
            if n > 1e-12 {
                worst = worst.max(resid.column(j).norm() / n);
            }
        }
        worst
    }

    /// Symmetric subspace distance: max of the two containment defects.
    /// Equals 0 iff the spans agree; approximately the sine of the largest
    /// principal angle when dimensions match.
    pub fn distance(&self, other: &Subspace) -> f64 {
        self.containment_defect(&other.basis)
            .max(other.containment_defect(&self.basis))
    }

    /// Intersection with another subspace at the given rank threshold.
    pub fn intersect(&self, other: &Subspace, tol: &Tolerances) -> Subspace {
        // Nullspace of the stacked complement projectors.
        let n = self.ambient_dim();
        let p1 = DMatrix::identity(n, n) - self.projector();
        let p2 = DMatrix::identity(n, n) - other.projector();
        let mut stacked = DMatrix::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&p1);
        stacked.view_mut((n, 0), (n, n)).copy_from(&p2);
        nullspace(&stacked, tol)
    }

    pub fn contains_vector(&self, v: &DVector<f64>, tol: &Tolerances) -> bool {
        let n = v.norm();
        if n == 0.0 {
            return true;
        }
        (v - self.projector() * v).norm() / n < tol.angle
    }
}

/// Cyclic Jacobi eigen-decomposition for symmetric matrices. Slower than the
/// library solver but unconditionally convergent; used as a fallback when the
/// QL iteration fails (which surfaces as NaN eigenvalues).
fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = max_abs(m).max(1e-300);
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    (vals, v)
}

/// Symmetric eigen-decomposition with the Jacobi fallback.
fn robust_sym_eigen(sym: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = sym.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|x| x.is_finite())
        && eig.eigenvectors.iter().all(|x| x.is_finite())
    {
        (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
    } else {
        jacobi_eigen(sym)
    }
}

/// Eigen-decomposition of the Gram matrix a^T a, eigenvalues descending.
/// Basis vectors for spans and nullspaces come from the Gram matrix rather
/// than a direct SVD: the symmetric eigensolver delivers reliable vectors,
/// and span vectors reconstructed as a * v stay inside the column space by
/// construction. The rank decision itself uses the SVD singular values,
/// which do not suffer from the squared conditioning of the Gram matrix.
fn gram_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let gram = a.transpose() * a;
    let sym = 0.5 * (&gram + gram.transpose());
    let (raw_vals, raw_vecs) = robust_sym_eigen(&sym);
    let mut order: Vec<usize> = (0..raw_vals.len()).collect();
    order.sort_by(|&i, &j| raw_vals[j].total_cmp(&raw_vals[i]));
    let vals: Vec<f64> = order.iter().map(|&i| raw_vals[i].max(0.0)).collect();
    let mut vecs = DMatrix::zeros(a.ncols(), a.ncols());
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &raw_vecs.column(i));
    }
    (vals, vecs)
}

/// Singular values through the smaller-side Gram matrix: cheap for very
/// tall or very wide matrices. Values below the Gram noise floor come out
/// as exact zeros, which costs sigma-resolution below ~1e-6 relative; the
/// rank gaps in this crate are many orders wider.
fn gram_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let g = if a.nrows() <= a.ncols() {
        a * a.transpose()
    } else {
        a.transpose() * a
    };
    let (vals, _) = robust_sym_eigen(&(0.5 * (&g + g.transpose())));
    let lmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let floor = lmax * 1e-13 * (g.nrows() as f64).max(1.0);
    vals.iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .collect()
}

/// Numerical rank from singular values at the shared threshold. Moderate
/// sizes go through the SVD; very tall or wide systems use the smaller-side
/// Gram matrix instead.
pub fn rank(a: &DMatrix<f64>, tol: &Tolerances) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    // try_svd_unordered avoids the library's internal sort, which cannot
    // handle the NaN values a failed sweep leaves behind.
    let sv = if a.nrows().max(a.ncols()) <= 1024 {
        a.clone()
            .try_svd_unordered(false, false, f64::EPSILON, 10_000)
            .map(|svd| svd.singular_values.iter().cloned().collect::<Vec<_>>())
            .filter(|sv| sv.iter().all(|x| x.is_finite()))
            .unwrap_or_else(|| gram_singular_values(a))
    } else {
        gram_singular_values(a)
    };
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    // Inputs are O(1) throughout the crate, so a matrix whose largest
    // singular value sits at float-noise level is a zero matrix.
    if smax <= 1e-12 {
        return 0;
    }
    sv.iter().filter(|&&s| s >= tol.rank_rel * smax).count()
}

/// Orthonormal basis of the (numerical) nullspace of `a`: the trailing Gram
/// eigenvectors, with the split position decided by the SVD rank.
pub fn nullspace(a: &DMatrix<f64>, tol: &Tolerances) -> Subspace {
    let n = a.ncols();
    if n == 0 {
        return Subspace::zero(0);
    }
    if a.nrows() == 0 {
        return Subspace::full(n);
    }
    let r = rank(a, tol);
    if r == n {
        return Subspace::zero(n);
    }
    let (_, vecs) = gram_eigen(a);
    Subspace::new(vecs.columns(r, n - r).into())
}

/// Orthonormal basis of the column span of `a` at the rank threshold.
pub fn column_span(a: &DMatrix<f64>, tol: &Tolerances) -> Subspace {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Subspace::zero(a.nrows());
    }
    let r = rank(a, tol);
    if r == 0 {
        return Subspace::zero(a.nrows());
    }
    let mut basis = if a.nrows() <= a.ncols() {
        // Use the small Gram a a^T directly: its leading eigenvectors are the
        // left singular vectors.
        let (_, vecs) = gram_eigen(&a.transpose().clone_owned());
        vecs.columns(0, r).into_owned()
    } else {
        let (vals, vecs) = gram_eigen(a);
        let mut basis = DMatrix::zeros(a.nrows(), r);
        for k in 0..r {
            let u = a * vecs.column(k);
            let sigma = vals[k].sqrt().max(1e-300);
            basis.set_column(k, &(&u / sigma));
        }
        basis
    };
    // One pass of modified Gram-Schmidt to clean up orthonormality.
    for k in 0..r {
        for prev in 0..k {
            let proj = basis.column(prev).dot(&basis.column(k));
            let col = basis.column(k) - proj * basis.column(prev);
            basis.set_column(k, &col);
        }
        let nrm = basis.column(k).norm();
        if nrm > 0.0 {
            let col = basis.column(k) / nrm;
            basis.set_column(k, &col);
        }
    }
    Subspace::new(basis)
}

/// Minimum-norm least-squares solution of a x = b. Uses the SVD when it
/// converges and falls back to the eigen pseudo-inverse of the normal
/// equations otherwise.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let maybe = a
        .clone()
        .try_svd_unordered(true, true, f64::EPSILON, 10_000)
        .filter(|svd| svd.singular_values.iter().all(|x| x.is_finite()));
    if let Some(svd) = maybe {
        if let Ok(x) = svd.solve(b, 1e-12) {
            return x;
        }
    }
    let gram = a.transpose() * a;
    let rhs = a.transpose() * b;
    let (vals, vecs) = robust_sym_eigen(&(0.5 * (&gram + gram.transpose())));
    let lmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let mut x = DVector::zeros(a.ncols());
    for (i, &l) in vals.iter().enumerate() {
        if l > lmax * 1e-12 && l > 0.0 {
            let q = vecs.column(i);
            x += (q.dot(&rhs) / l) * q;
        }
    }
    x
}

/// Span of a list of matrices, viewed as vectors; returns an orthonormal set
/// of matrices spanning the same space.
pub fn matrix_span(mats: &[DMatrix<f64>], tol: &Tolerances) -> Vec<DMatrix<f64>> {
    if mats.is_empty() {
        return Vec::new();
    }
    let (r, c) = (mats[0].nrows(), mats[0].ncols());
    let mut stacked = DMatrix::zeros(r * c, mats.len());
    for (j, m) in mats.iter().enumerate() {
        stacked.set_column(j, &vectorize(m));
    }
    let span = column_span(&stacked, tol);
    (0..span.dim())
        .map(|j| unvectorize(&span.basis.column(j).into_owned(), r, c))
        .collect()
}

pub fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Max absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub fn comm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

pub fn anticomm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b + b * a
}

/// Transpose with respect to a (symmetric positive definite) metric G:
/// A* = G^-1 A^T G.
pub fn metric_transpose(a: &DMatrix<f64>, g: &DMatrix<f64>, g_inv: &DMatrix<f64>) -> DMatrix<f64> {
    g_inv * a.transpose() * g
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = 0.5 * (m + m.transpose());
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Eigenvalues of G^-1 M for G symmetric positive definite and M symmetric
/// (the spectrum of the associated self-adjoint operator), ascending.
pub fn pencil_eigenvalues(m: &DMatrix<f64>, g: &DMatrix<f64>) -> Vec<f64> {
    let chol = g
        .clone()
        .cholesky()
        .expect("metric must be positive definite");
    let l_inv = chol
        .l()
        .try_inverse()
        .expect("cholesky factor is invertible");
    let reduced = &l_inv * m * l_inv.transpose();
    sym_eigenvalues(&reduced)
}

/// Symmetric bilinear form with its signature (n_plus, n_minus, n_zero) at the
/// rank threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearForm {
    pub matrix: DMatrix<f64>,
    pub signature: (usize, usize, usize),
}

impl BilinearForm {
    pub fn new(matrix: DMatrix<f64>, tol: &Tolerances) -> Self {
        let ev = sym_eigenvalues(&matrix);
        let largest = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let cut = if largest > 0.0 {
            tol.rank_rel * largest
        } else {
            f64::INFINITY
        };
        let mut sig = (0usize, 0usize, 0usize);
        for &e in &ev {
            if e > cut {
                sig.0 += 1;
            } else if e < -cut {
                sig.1 += 1;
            } else {
                sig.2 += 1;
            }
        }
        BilinearForm {
            matrix,
            signature: sig,
        }
    }

    pub fn symmetry_residual(&self) -> f64 {
        max_abs(&(self.matrix.clone() - self.matrix.transpose()))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0 && self.signature.2 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature.0 == 0 && self.signature.2 == 0
    }
}

/// Builds the real 2n x 2n matrix of the standard complex structure: block
/// diagonal copies of [[0,-1],[1,0]] in interleaved coordinates
/// (x_1, y_1, x_2, y_2, ...).
pub fn standard_complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// Real 2m x 2n matrix of a complex m x n matrix in interleaved coordinates:
/// entry a+bi becomes the 2x2 block [[a,-b],[b,a]].
pub fn realify_complex(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = (re.nrows(), re.ncols());
    let mut out = DMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            out[(2 * i, 2 * j)] = re[(i, j)];
            out[(2 * i + 1, 2 * j + 1)] = re[(i, j)];
            out[(2 * i, 2 * j + 1)] = -im[(i, j)];
            out[(2 * i + 1, 2 * j)] = im[(i, j)];
        }
    }
    out
}

/// Sine of the largest principal angle between two subspaces given as
/// orthonormal column matrices of equal dimension.
pub fn principal_angle_sin(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    let s1 = Subspace::new(q1.clone());
    let s2 = Subspace::new(q2.clone());
    s1.distance(&s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn nullspace_zero_matrix_is_full() {
        let a = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(nullspace(&a, &tol()).dim(), 3);
    }

    #[test]
    fn nullspace_identity_is_trivial() {
        let a = DMatrix::<f64>::identity(4, 4);
        assert_eq!(nullspace(&a, &tol()).dim(), 0);
    }

    #[test]
    fn nullspace_rank_one_projector() {
        // Projector onto e1 in R^3 has a 2-dimensional kernel.
        let mut a = DMatrix::<f64>::zeros(3, 3);
        a[(0, 0)] = 1.0;
        assert_eq!(nullspace(&a, &tol()).dim(), 2);
    }

    #[test]
    fn wide_matrix_nullspace() {
        let a = DMatrix::<f64>::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = nullspace(&a, &tol());
        assert_eq!(ns.dim(), 2);
        assert!(max_abs(&(&a * &ns.basis)) < 1e-12);
    }

    #[test]
    fn complex_structure_squares_to_minus_one() {
        let j = standard_complex_structure(3);
        let id = DMatrix::<f64>::identity(6, 6);
        assert!(max_abs(&(&j * &j + id)) < 1e-14);
    }

    #[test]
    fn signature_of_indefinite_form() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0, 0.0]));
        let f = BilinearForm::new(m, &tol());
        assert_eq!(f.signature, (1, 1, 1));
    }

    proptest! {
        #[test]
        fn nullspace_annihilates_and_counts(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
            // Pseudo-random but deterministic entries.
            let mut s = seed;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            let a = DMatrix::from_fn(rows, cols, |_, _| next());
            let t = tol();
            let ns = nullspace(&a, &t);
            prop_assert_eq!(rank(&a, &t) + ns.dim(), cols);
            if ns.dim() > 0 {
                prop_assert!(max_abs(&(&a * &ns.basis)) < 1e-8 * (1.0 + max_abs(&a)));
            }
        }

        #[test]
        fn span_and_distance_roundtrip(n in 2usize..6, seed in 0u64..500) {
            let mut s = seed.wrapping_add(7);
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            let a = DMatrix::from_fn(n, n, |_, _| next());
            let t = tol();
            let sp = column_span(&a, &t);
            // A subspace is at distance zero from itself.
            prop_assert!(sp.distance(&sp) < 1e-10);
        }
    }
}
