//! Structure-constant Lie algebras and their classical invariants: brackets,
//! Jacobi residuals, Killing form, radicals, center, derivations and
//! representation centralizers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, BilinearForm, Subspace};

/// Finite-dimensional real Lie algebra given by structure constants on a
/// labelled basis: [b_i, b_j] = sum_k c[i][j][k] b_k.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub dim: usize,
    pub basis_names: Vec<String>,
    /// Flat structure-constant tensor, index (i * dim + j) * dim + k.
    c: Vec<f64>,
    /// Cached adjoint matrices: ad[i] has column j equal to [b_i, b_j].
    ads: Vec<DMatrix<f64>>,
}

impl LieAlgebra {
    /// Builds an algebra from the full antisymmetric tensor `c[i][j][k]`.
    pub fn from_structure_constants(
        basis_names: Vec<String>,
        c: Vec<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = basis_names.len();
        if dim == 0 {
            return Err(Error::InvalidDimension("algebra must have dim >= 1".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::InvalidDimension(format!(
                "structure tensor has {} entries, expected {}",
                c.len(),
                dim * dim * dim
            )));
        }
        let mut alg = LieAlgebra {
            dim,
            basis_names,
            c,
            ads: Vec::new(),
        };
        let anti = alg.antisymmetry_residual();
        let scale = alg.max_abs_c().max(1.0);
        if anti > tol.residual * scale {
            return Err(Error::InvalidDimension(format!(
                "structure constants not antisymmetric (residual {anti:.3e})"
            )));
        }
        alg.rebuild_ads();
        Ok(alg)
    }

    /// Builds an algebra from explicit bracket matrices of basis elements.
    /// `brackets(i, j)` must return the coordinate vector of [b_i, b_j] for
    /// i < j; the rest is filled in by antisymmetry.
    pub fn from_brackets<F>(
        basis_names: Vec<String>,
        mut brackets: F,
        tol: &Tolerances,
    ) -> Result<Self>
    where
        F: FnMut(usize, usize) -> DVector<f64>,
    {
        let dim = basis_names.len();
        let mut c = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = brackets(i, j);
                for k in 0..dim {
                    c[(i * dim + j) * dim + k] = v[k];
                    c[(j * dim + i) * dim + k] = -v[k];
                }
            }
        }
        LieAlgebra::from_structure_constants(basis_names, c, tol)
    }

    /// Abelian algebra of the given dimension.
    pub fn abelian(dim: usize, tol: &Tolerances) -> Result<Self> {
        let names = (0..dim).map(|i| format!("a{i}")).collect();
        LieAlgebra::from_structure_constants(names, vec![0.0; dim * dim * dim], tol)
    }

    /// Builds the Lie algebra spanned by the given matrices, with structure
    /// constants obtained from matrix commutators. The span must be closed
    /// under commutators at the rank threshold.
    pub fn from_matrix_basis(
        basis_names: Vec<String>,
        mats: &[DMatrix<f64>],
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = mats.len();
        if dim == 0 {
            return Err(Error::InvalidDimension("empty matrix basis".into()));
        }
        let n = mats[0].nrows();
        let mut gram = DMatrix::zeros(dim, dim);
        let mut basis_vecs = DMatrix::zeros(n * n, dim);
        for (a, m) in mats.iter().enumerate() {
            basis_vecs.set_column(a, &linalg::vectorize(m));
        }
        for a in 0..dim {
            for b in 0..dim {
                gram[(a, b)] = basis_vecs.column(a).dot(&basis_vecs.column(b));
            }
        }
        let gram_inv = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidDimension("matrix basis is linearly dependent".into()))?;
        let mut worst: f64 = 0.0;
        let alg = LieAlgebra::from_brackets(
            basis_names,
            |i, j| {
                let m = linalg::comm(&mats[i], &mats[j]);
                let v = linalg::vectorize(&m);
                let coords = &gram_inv * (basis_vecs.transpose() * &v);
                let recon = &basis_vecs * &coords;
                let res = (recon - &v).norm();
                worst = worst.max(res);
                coords
            },
            tol,
        )?;
        let scale = alg.max_abs_c().max(1.0);
        if worst > tol.residual.sqrt() * scale {
            return Err(Error::InvalidDimension(format!(
                "matrix basis not closed under commutators (residual {worst:.3e})"
            )));
        }
        Ok(alg)
    }

    fn rebuild_ads(&mut self) {
        let dim = self.dim;
        self.ads = (0..dim)
            .map(|i| DMatrix::from_fn(dim, dim, |k, j| self.c[(i * dim + j) * dim + k]))
            .collect();
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn ad(&self, i: usize) -> &DMatrix<f64> {
        &self.ads[i]
    }

    /// Adjoint action of an arbitrary element x (coordinates).
    pub fn ad_vec(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if x[i] != 0.0 {
                m += x[i] * &self.ads[i];
            }
        }
        m
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_vec(x) * y
    }

    /// Coordinate vector of [b_i, b_j].
    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.c(i, j, k))
    }

    pub fn max_abs_c(&self) -> f64 {
        self.c.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }
}

/// Max over basis triples of the sup-norm of the Jacobi cyclic sum, after
/// normalizing the structure constants to max-abs 1 (the residual scales
/// quadratically under rescaling of the bracket).
pub fn jacobi_residual(alg: &LieAlgebra) -> f64 {
    let d = alg.dim;
    let scale = alg.max_abs_c();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let cij = alg.bracket_basis(i, j);
            for k in (j + 1)..d {
                let cjk = alg.bracket_basis(j, k);
                let cki = alg.bracket_basis(k, i);
                // [[b_i,b_j],b_k] = -ad_k [b_i,b_j], and cyclic.
                let sum = -(alg.ad(k) * &cij) - (alg.ad(i) * &cjk) - (alg.ad(j) * &cki);
                worst = worst.max(sum.amax());
            }
        }
    }
    worst / (scale * scale)
}

/// Killing form B(x, y) = Tr(ad_x ad_y).
pub fn killing_form(alg: &LieAlgebra, tol: &Tolerances) -> BilinearForm {
    let d = alg.dim;
    let mut b = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            // Tr(ad_i ad_j) without forming the product.
            let mut t = 0.0;
            for r in 0..d {
                for c in 0..d {
                    t += alg.ad(i)[(r, c)] * alg.ad(j)[(c, r)];
                }
            }
            b[(i, j)] = t;
            b[(j, i)] = t;
        }
    }
    BilinearForm::new(b, tol)
}

/// Max residual of the ad-invariance identity B([x,y],z) + B(y,[x,z]) = 0
/// over basis triples.
pub fn killing_invariance_residual(alg: &LieAlgebra, b: &BilinearForm) -> f64 {
    let d = alg.dim;
    let scale = linalg::max_abs(&b.matrix).max(1.0);
    let mut worst: f64 = 0.0;
    for x in 0..d {
        // B(ad_x y, z) + B(y, ad_x z) = (ad_x^T B + B ad_x)_{y,z}
        let m = alg.ad(x).transpose() * &b.matrix + &b.matrix * alg.ad(x);
        worst = worst.max(linalg::max_abs(&m));
    }
    worst / scale
}

/// Radical r(g) = maximal solvable ideal, computed through the Cartan
/// criterion as the nullspace of x -> B(x, .) restricted to [g, g].
/// Verifies that the computed space is an ideal.
pub fn radical(alg: &LieAlgebra, tol: &Tolerances) -> Result<Subspace> {
    let b = killing_form(alg, tol);
    let der = derived_algebra(alg, tol);
    // Rows indexed by a basis of [g,g]: M x = B(x, der_j).
    let m = der.basis.transpose() * &b.matrix;
    let rad = linalg::nullspace(&m, tol);
    let resid = ideal_residual(alg, &rad);
    if resid > tol.angle {
        return Err(Error::IdealityViolation { residual: resid });
    }
    Ok(rad)
}

/// Radical of the Killing form: g-perp = nullspace of B.
pub fn killing_radical(alg: &LieAlgebra, tol: &Tolerances) -> Subspace {
    let b = killing_form(alg, tol);
    linalg::nullspace(&b.matrix, tol)
}

/// Residual of the inclusion chain [r, r] <= g-perp <= r relating the radical
/// and the Killing-form radical.
pub fn radical_inclusion_residual(alg: &LieAlgebra, tol: &Tolerances) -> Result<f64> {
    let rad = radical(alg, tol)?;
    let kperp = killing_radical(alg, tol);
    // [r, r] spanned by brackets of radical basis vectors.
    let k = rad.dim();
    let mut cols = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            cols.push(alg.bracket(
                &rad.basis.column(i).into_owned(),
                &rad.basis.column(j).into_owned(),
            ));
        }
    }
    let mut defect: f64 = 0.0;
    if !cols.is_empty() {
        let mut derrad = DMatrix::zeros(alg.dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            derrad.set_column(j, v);
        }
        defect = defect.max(kperp.containment_defect(&derrad));
    }
    defect = defect.max(rad.containment_defect(&kperp.basis));
    Ok(defect)
}

/// How far `sub` is from being an ideal: projection defect of [g, sub].
pub fn ideal_residual(alg: &LieAlgebra, sub: &Subspace) -> f64 {
    if sub.dim() == 0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..alg.dim {
        let img = alg.ad(i) * &sub.basis;
        worst = worst.max(sub.containment_defect(&img));
    }
    worst
}

/// Center z(g): common nullspace of all adjoint maps.
pub fn center(alg: &LieAlgebra, tol: &Tolerances) -> Subspace {
    let d = alg.dim;
    let mut stacked = DMatrix::zeros(d * d, d);
    for i in 0..d {
        // Row block i holds ad-action on b_i: x -> [x, b_i] has matrix with
        // column a equal to [b_a, b_i].
        let m = DMatrix::from_fn(d, d, |k, a| alg.c(a, i, k));
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&m);
    }
    linalg::nullspace(&stacked, tol)
}

/// Derived algebra [g, g]: column span of all basis brackets.
pub fn derived_algebra(alg: &LieAlgebra, tol: &Tolerances) -> Subspace {
    let d = alg.dim;
    let mut cols = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            cols.push(alg.bracket_basis(i, j));
        }
    }
    if cols.is_empty() {
        return Subspace::zero(d);
    }
    let mut m = DMatrix::zeros(d, cols.len());
    for (j, v) in cols.iter().enumerate() {
        m.set_column(j, v);
    }
    linalg::column_span(&m, tol)
}

/// Basis of the space of derivations: solutions of
/// D[x,y] = [Dx,y] + [x,Dy] over all basis pairs. Dense solve; intended for
/// small and medium dimensions.
pub fn derivations(alg: &LieAlgebra, tol: &Tolerances) -> Vec<DMatrix<f64>> {
    let d = alg.dim;
    let pairs = d * (d - 1) / 2;
    let mut a = DMatrix::zeros(pairs * d, d * d);
    let mut row_block = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            // Equation block: sum_k c_ijk D e_k - [D e_i, e_j] - [e_i, D e_j] = 0.
            // Unknown D in column-major vectorization: D_{r,s} at index s*d + r.
            for r in 0..d {
                let row = row_block * d + r;
                for s in 0..d {
                    // term from D e_s coefficient c_ijs: contributes c_ijs * D_{r,s}
                    a[(row, s * d + r)] += alg.c(i, j, s);
                }
                for q in 0..d {
                    // -[D e_i, e_j]_r = -sum_q D_{q,i} c_{q,j,r} => unknown (i-col, q-row)
                    a[(row, i * d + q)] -= alg.c(q, j, r);
                    // -[e_i, D e_j]_r = -sum_q D_{q,j} c_{i,q,r}
                    a[(row, j * d + q)] -= alg.c(i, q, r);
                }
            }
            row_block += 1;
        }
    }
    let ns = linalg::nullspace(&a, tol);
    (0..ns.dim())
        .map(|k| linalg::unvectorize(&ns.basis.column(k).into_owned(), d, d))
        .collect()
}

/// Residual of the derivation identity for a single endomorphism.
pub fn derivation_residual(alg: &LieAlgebra, dmat: &DMatrix<f64>) -> f64 {
    let d = alg.dim;
    let scale = alg.max_abs_c().max(1.0) * linalg::max_abs(dmat).max(1.0);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let lhs = dmat * alg.bracket_basis(i, j);
            let rhs = alg.bracket(
                &dmat.column(i).into_owned(),
                &DVector::from_fn(d, |k, _| if k == j { 1.0 } else { 0.0 }),
            ) + alg.bracket(
                &DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 }),
                &dmat.column(j).into_owned(),
            );
            worst = worst.max((lhs - rhs).amax());
        }
    }
    worst / scale
}

/// Serialized form: sparse upper-triangular brackets.
#[derive(Debug, Serialize, Deserialize)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub basis_names: Vec<String>,
    /// Entries [i, j, [[k, value], ...]] for i < j.
    pub brackets: Vec<(usize, usize, Vec<(usize, f64)>)>,
}

impl LieAlgebra {
    pub fn to_json(&self) -> LieAlgebraJson {
        let mut brackets = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let entries: Vec<(usize, f64)> = (0..self.dim)
                    .filter(|&k| self.c(i, j, k) != 0.0)
                    .map(|k| (k, self.c(i, j, k)))
                    .collect();
                if !entries.is_empty() {
                    brackets.push((i, j, entries));
                }
            }
        }
        LieAlgebraJson {
            dim: self.dim,
            basis_names: self.basis_names.clone(),
            brackets,
        }
    }

    pub fn from_json(j: &LieAlgebraJson, tol: &Tolerances) -> Result<Self> {
        if j.basis_names.len() != j.dim {
            return Err(Error::InvalidDimension(
                "basis_names length must equal dim".into(),
            ));
        }
        let d = j.dim;
        let mut c = vec![0.0; d * d * d];
        for (i, jj, entries) in &j.brackets {
            if *i >= d || *jj >= d || i >= jj {
                return Err(Error::InvalidDimension(format!(
                    "bad bracket index pair ({i}, {jj})"
                )));
            }
            for (k, v) in entries {
                if *k >= d {
                    return Err(Error::InvalidDimension(format!("bad target index {k}")));
                }
                c[(i * d + jj) * d + k] = *v;
                c[(jj * d + i) * d + k] = -*v;
            }
        }
        LieAlgebra::from_structure_constants(j.basis_names.clone(), c, tol)
    }
}

/// sl(2, R) in the standard basis {H, E, F}: [H,E] = 2E, [H,F] = -2F,
/// [E,F] = H. Used as a fixture across the crate.
pub fn sl2(tol: &Tolerances) -> LieAlgebra {
    let names = vec!["H".into(), "E".into(), "F".into()];
    LieAlgebra::from_brackets(
        names,
        |i, j| match (i, j) {
            (0, 1) => DVector::from_vec(vec![0.0, 2.0, 0.0]),
            (0, 2) => DVector::from_vec(vec![0.0, 0.0, -2.0]),
            (1, 2) => DVector::from_vec(vec![1.0, 0.0, 0.0]),
            _ => unreachable!(),
        },
        tol,
    )
    .expect("sl2 is a Lie algebra")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn abelian_jacobi_zero() {
        let a = LieAlgebra::abelian(4, &tol()).unwrap();
        assert_eq!(jacobi_residual(&a), 0.0);
    }

    #[test]
    fn sl2_jacobi_zero() {
        let a = sl2(&tol());
        assert!(jacobi_residual(&a) < 1e-15);
    }

    #[test]
    fn perturbed_sl2_jacobi_detected() {
        let a = sl2(&tol());
        let d = a.dim;
        let mut c = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    c[(i * d + j) * d + k] = a.c(i, j, k);
                }
            }
        }
        // Perturb c[0][1][1] by +0.1 keeping antisymmetry.
        c[(0 * d + 1) * d + 1] += 0.1;
        c[(1 * d + 0) * d + 1] -= 0.1;
        let b = LieAlgebra::from_structure_constants(a.basis_names.clone(), c, &tol()).unwrap();
        // Residual is at least the perturbation size up to the max-abs
        // normalization factor (max |c| = 2.1 here).
        assert!(jacobi_residual(&b) >= 0.1 / (2.1f64 * 2.1));
    }

    #[test]
    fn sl2_killing_matrix() {
        let a = sl2(&tol());
        let b = killing_form(&a, &tol());
        let expected =
            DMatrix::from_row_slice(3, 3, &[8.0, 0.0, 0.0, 0.0, 0.0, 4.0, 0.0, 4.0, 0.0]);
        assert!(linalg::max_abs(&(b.matrix.clone() - expected)) < 1e-12);
        assert!(killing_invariance_residual(&a, &b) < 1e-12);
    }

    #[test]
    fn abelian_killing_zero() {
        let a = LieAlgebra::abelian(3, &tol()).unwrap();
        let b = killing_form(&a, &tol());
        assert_eq!(linalg::max_abs(&b.matrix), 0.0);
    }

    #[test]
    fn sl2_radicals_trivial() {
        let a = sl2(&tol());
        assert_eq!(radical(&a, &tol()).unwrap().dim(), 0);
        assert_eq!(killing_radical(&a, &tol()).dim(), 0);
        assert_eq!(center(&a, &tol()).dim(), 0);
        assert_eq!(derived_algebra(&a, &tol()).dim(), 3);
    }

    #[test]
    fn abelian_radical_full() {
        let a = LieAlgebra::abelian(5, &tol()).unwrap();
        assert_eq!(radical(&a, &tol()).unwrap().dim(), 5);
        assert_eq!(center(&a, &tol()).dim(), 5);
        assert_eq!(derived_algebra(&a, &tol()).dim(), 0);
    }

    #[test]
    fn sl2_derivations_are_inner() {
        let a = sl2(&tol());
        let ders = derivations(&a, &tol());
        assert_eq!(ders.len(), 3);
        for d in &ders {
            assert!(derivation_residual(&a, d) < 1e-9);
        }
        // Every ad_x lies in the span.
        let span = linalg::matrix_span(&ders, &tol());
        let mut stacked = DMatrix::zeros(9, span.len());
        for (j, m) in span.iter().enumerate() {
            stacked.set_column(j, &linalg::vectorize(m));
        }
        let sub = Subspace::new(stacked);
        for i in 0..3 {
            let v = linalg::vectorize(a.ad(i));
            assert!(sub.contains_vector(&v, &tol()));
        }
    }

    #[test]
    fn abelian_derivations_full_gl() {
        let a = LieAlgebra::abelian(3, &tol()).unwrap();
        assert_eq!(derivations(&a, &tol()).len(), 9);
    }

    #[test]
    fn json_roundtrip() {
        let a = sl2(&tol());
        let j = a.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let j2: LieAlgebraJson = serde_json::from_str(&s).unwrap();
        let b = LieAlgebra::from_json(&j2, &tol()).unwrap();
        assert_eq!(a.dim, b.dim);
        for i in 0..3 {
            assert!(linalg::max_abs(&(a.ad(i) - b.ad(i))) == 0.0);
        }
    }

    #[test]
    fn dim_zero_rejected() {
        assert!(LieAlgebra::abelian(0, &tol()).is_err());
    }

    #[test]
    fn radical_inclusion_chain() {
        for alg in [
            sl2(&tol()),
            LieAlgebra::abelian(3, &tol()).unwrap(),
            heisenberg3(),
        ] {
            let resid = radical_inclusion_residual(&alg, &tol()).unwrap();
            assert!(resid < 1e-9, "residual {resid}");
        }
    }

    fn heisenberg3() -> LieAlgebra {
        // [x, y] = z, two-step nilpotent.
        LieAlgebra::from_brackets(
            vec!["x".into(), "y".into(), "z".into()],
            |i, j| {
                let mut v = DVector::zeros(3);
                if (i, j) == (0, 1) {
                    v[2] = 1.0;
                }
                v
            },
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn heisenberg_killing_radical_is_everything() {
        let h = heisenberg3();
        assert_eq!(killing_radical(&h, &tol()).dim(), 3);
        assert_eq!(radical(&h, &tol()).unwrap().dim(), 3);
    }

    #[test]
    fn simplicity_detection() {
        assert!(is_simple(&sl2(&tol()), &tol()));
        assert!(!is_simple(&LieAlgebra::abelian(2, &tol()).unwrap(), &tol()));
        assert!(!is_simple(&heisenberg3(), &tol()));
    }
}

/// Simplicity test for the catalog algebras: the Killing form is
/// nondegenerate and the adjoint representation has a one-dimensional
/// commutant. (A complex-type real simple algebra would have a
/// two-dimensional centroid; the catalog contains none.)
pub fn is_simple(alg: &LieAlgebra, tol: &Tolerances) -> bool {
    if killing_radical(alg, tol).dim() != 0 {
        return false;
    }
    let d = alg.dim;
    // Commutant of {ad_x}: refined generator by generator.
    let mut basis: Option<Vec<DMatrix<f64>>> = None;
    for i in 0..d {
        let r = alg.ad(i);
        match basis {
            None => {
                let id = DMatrix::<f64>::identity(d, d);
                let k = id.kronecker(r) - r.transpose().kronecker(&id);
                let ns = linalg::nullspace(&k, tol);
                basis = Some(
                    (0..ns.dim())
                        .map(|j| linalg::unvectorize(&ns.basis.column(j).into_owned(), d, d))
                        .collect(),
                );
            }
            Some(ref cur) => {
                if cur.len() <= 1 {
                    break;
                }
                let mut constraint = DMatrix::zeros(d * d, cur.len());
                for (j, f) in cur.iter().enumerate() {
                    constraint.set_column(j, &linalg::vectorize(&linalg::comm(f, r)));
                }
                let ns = linalg::nullspace(&constraint, tol);
                if ns.dim() == cur.len() {
                    continue;
                }
                let next: Vec<DMatrix<f64>> = (0..ns.dim())
                    .map(|k| {
                        let mut out = DMatrix::zeros(d, d);
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
    basis.map(|b| b.len() == 1).unwrap_or(false)
}
