//! Moduli of invariant 3-symmetric metrics: the skew-centralizer
//! parametrization, the ordered-lambda normal form for complex-type blocks
//! and Ricci-spectrum separation of isometry classes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{metric_from_s, GeometryPackage, MetricSpec};
use crate::linalg;
use crate::rep::{centralizer_split, AlgebraType, RepType, Representation};
use crate::semidirect::SemidirectModel;

/// Normal form of a moduli factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NormalForm {
    /// Every invariant metric is isometric to the background metric.
    RealPoint,
    /// Ordered vector 0 <= l_1 <= ... <= l_d < 1 of block deformations.
    ComplexDelta(usize),
    /// Factor-wise description of a mixed direct sum.
    Mixed(Vec<NormalForm>),
}

/// Description of the moduli of invariant metrics for a representation.
#[derive(Debug, Clone)]
pub struct ModuliDescription {
    pub c_minus_dim: usize,
    pub normal_form: NormalForm,
    /// Basis of the skew part of the centralizer; the named generators the
    /// command line refers to.
    pub generators: Vec<DMatrix<f64>>,
    pub domain: String,
}

/// Moduli description for a non-compact admissible representation: metrics
/// correspond to skew centralizer deformations with 1 + S positive definite.
pub fn moduli_space(rep: &Representation, tol: &Tolerances) -> Result<ModuliDescription> {
    if rep.type_flag != AlgebraType::NonCompact {
        return Err(Error::OutOfDomain(
            "moduli parametrization applies to the non-compact branch".into(),
        ));
    }
    let split = centralizer_split(rep, &rep.h_v, tol);
    let normal_form = normal_form_of(rep, tol)?;
    Ok(ModuliDescription {
        c_minus_dim: split.c_minus.len(),
        normal_form,
        generators: split.c_minus,
        domain: "{S : S J in c-, 1 + S > 0}".into(),
    })
}

fn normal_form_of(rep: &Representation, tol: &Tolerances) -> Result<NormalForm> {
    // Group the summand metadata by base id.
    let mut groups: Vec<(String, usize, usize)> = Vec::new(); // (base, base_dim, mult)
    for s in &rep.summands {
        match groups.iter_mut().find(|g| g.0 == s.base_id) {
            Some(g) => g.2 += s.mult,
            None => groups.push((s.base_id.clone(), s.base_dim, s.mult)),
        }
    }
    let mut forms = Vec::new();
    for (base_id, _dim, mult) in &groups {
        let base = crate::catalog::build_rep(base_id, tol)?;
        let split = centralizer_split(&base, &base.h_v, tol);
        let form = match split.rep_type {
            RepType::Real => NormalForm::RealPoint,
            RepType::Complex => NormalForm::ComplexDelta(*mult),
            RepType::Quaternionic => return Err(Error::QuaternionicUnsupported),
            RepType::Reducible => {
                // Degenerate low-rank entries whose skew centralizer is a
                // single complex structure still carry the one-parameter
                // deformation family.
                if split.c_minus.len() == 1 && has_complex_structure(&split.c_minus, tol) {
                    NormalForm::ComplexDelta(*mult)
                } else if split.c_minus.is_empty() {
                    NormalForm::RealPoint
                } else {
                    return Err(Error::OutOfDomain(format!(
                        "no normal form implemented for base `{base_id}`"
                    )));
                }
            }
        };
        forms.push(form);
    }
    Ok(match forms.len() {
        0 => NormalForm::RealPoint,
        1 => forms.pop().expect("one factor"),
        _ => NormalForm::Mixed(forms),
    })
}

fn has_complex_structure(c_minus: &[DMatrix<f64>], _tol: &Tolerances) -> bool {
    complex_structure_in(c_minus).is_some()
}

/// Rescales a one-dimensional skew centralizer generator to a complex
/// structure I with I^2 = -1, when possible.
pub fn complex_structure_in(c_minus: &[DMatrix<f64>]) -> Option<DMatrix<f64>> {
    let f = c_minus.first()?;
    let n = f.nrows();
    let sq = f * f;
    // I^2 = -s^2 with s read off the diagonal.
    let s2 = -(sq.trace() / n as f64);
    if s2 <= 0.0 {
        return None;
    }
    let cand = f / s2.sqrt();
    let resid = linalg::max_abs(&(&cand * &cand + DMatrix::<f64>::identity(n, n)));
    if resid < 1e-8 {
        Some(cand)
    } else {
        None
    }
}

/// Block metric g_lambda on a d-fold sum: per block, h^-1 g = 1 + l_k I J
/// with I the complex structure in the skew centralizer of the base block.
pub fn g_lambda(sm: &SemidirectModel, lambdas: &[f64], tol: &Tolerances) -> Result<MetricSpec> {
    let rep = &sm.rep;
    if rep.type_flag != AlgebraType::NonCompact {
        return Err(Error::OutOfDomain(
            "lambda metrics live on the non-compact branch".into(),
        ));
    }
    for &l in lambdas {
        if l.abs() >= 1.0 {
            return Err(Error::OutOfDomain(format!(
                "|lambda| = {} >= 1 leaves the positivity domain",
                l.abs()
            )));
        }
    }
    // Base block and multiplicity from metadata.
    let (base_id, base_dim, mult) = {
        let s = rep
            .summands
            .first()
            .ok_or_else(|| Error::OutOfDomain("missing summand metadata".into()))?;
        if rep.summands.len() != 1 {
            return Err(Error::OutOfDomain(
                "lambda metrics require a homogeneous multiple of one block".into(),
            ));
        }
        (s.base_id.clone(), s.base_dim, s.mult)
    };
    if lambdas.len() != mult {
        return Err(Error::OutOfDomain(format!(
            "expected {mult} lambda entries for {base_id}, got {}",
            lambdas.len()
        )));
    }
    let base = crate::catalog::build_rep(&base_id, tol)?;
    let base_split = centralizer_split(&base, &base.h_v, tol);
    let i_base = complex_structure_in(&base_split.c_minus).ok_or(Error::QuaternionicUnsupported)?;
    let j_base = base.j_v.clone().expect("catalog representations carry J_V");
    let block = &i_base * &j_base;
    let nv = rep.dim_v;
    let mut s = DMatrix::zeros(nv, nv);
    for (k, &l) in lambdas.iter().enumerate() {
        let off = k * base_dim;
        let mut view = s.view_mut((off, off), (base_dim, base_dim));
        view.copy_from(&(l * &block));
    }
    metric_from_s(sm, s, 1.0, tol)
}

/// Sorted spectrum of the Ricci operator on the V block, plus the predicted
/// positive part psi(lambda_k) d_minus for lambda metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub spectrum: Vec<f64>,
    pub positive_part: Vec<f64>,
}

pub fn ricci_spectrum_invariant(sm: &SemidirectModel, pkg: &GeometryPackage) -> SpectrumReport {
    let spectrum = crate::geometry::ricci_v_spectrum(sm, pkg);
    let positive_part: Vec<f64> = spectrum.iter().cloned().filter(|&x| x > 1e-10).collect();
    SpectrumReport {
        spectrum,
        positive_part,
    }
}

/// psi(x) = 2x / (1 - x^2), the deformation response of the positive Ricci
/// eigenvalues.
pub fn psi(x: f64) -> f64 {
    2.0 * x / (1.0 - x * x)
}

/// Measures d_minus as the Casimir eigenvalue on ker(I J - 1) of the base
/// block at the background metric, together with that kernel's dimension.
pub fn d_minus_of_base(
    base: &Representation,
    casimir: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<(f64, usize)> {
    let split = centralizer_split(base, &base.h_v, tol);
    let i_base = complex_structure_in(&split.c_minus).ok_or(Error::QuaternionicUnsupported)?;
    let j_base = base.j_v.clone().expect("catalog representations carry J_V");
    let ij = &i_base * &j_base;
    let n = base.dim_v;
    let ker = linalg::nullspace(&(&ij - DMatrix::<f64>::identity(n, n)), tol);
    if ker.dim() == 0 {
        return Err(Error::OutOfDomain("ker(IJ - 1) is trivial".into()));
    }
    let restricted = ker.basis.transpose() * casimir * &ker.basis;
    let d_minus = restricted.trace() / ker.dim() as f64;
    let resid =
        linalg::max_abs(&(restricted - d_minus * DMatrix::<f64>::identity(ker.dim(), ker.dim())));
    if resid > 1e-8 {
        return Err(Error::LambdaNotScalar { residual: resid });
    }
    Ok((d_minus, ker.dim()))
}

/// Grid of nondecreasing lambda vectors in [0, max) with k points per axis.
pub fn delta_grid(d: usize, k: usize, max: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    loop {
        let v: Vec<f64> = cur.iter().map(|&i| max * i as f64 / k as f64).collect();
        out.push(v);
        // Next nondecreasing multi-index.
        let mut pos = d;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] + 1 < k {
                cur[pos] += 1;
                for q in pos + 1..d {
                    cur[q] = cur[pos];
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_rep;
    use crate::geometry::geometry_of;
    use crate::semidirect::build_type_model;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn cached_wedge_model() -> &'static SemidirectModel {
        static MODEL: OnceLock<SemidirectModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            let rep = build_rep("su1n:1:1", &tol()).unwrap();
            build_type_model(&rep, &tol()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn lambda_domain_is_the_open_interval(lam in -2.0f64..2.0) {
            let sm = cached_wedge_model();
            let result = g_lambda(sm, &[lam], &tol());
            if lam.abs() < 0.999 {
                prop_assert!(result.is_ok(), "rejected {lam}");
            }
            if lam.abs() >= 1.0 {
                prop_assert!(result.is_err(), "accepted {lam}");
            }
        }

        #[test]
        fn psi_monotone_spectra(a in 0.05f64..0.45, gap in 0.1f64..0.4) {
            // Larger deformations give strictly larger top Ricci eigenvalues.
            let sm = cached_wedge_model();
            let b = a + gap;
            let top = |l: f64| {
                let spec = g_lambda(sm, &[l], &tol()).unwrap();
                let pkg = geometry_of(sm, &spec, &tol()).unwrap();
                ricci_spectrum_invariant(sm, &pkg)
                    .spectrum
                    .last()
                    .cloned()
                    .unwrap()
            };
            prop_assert!(top(b) > top(a));
        }
    }

    #[test]
    fn sp1_moduli_is_a_point() {
        let rep = build_rep("sp:1", &tol()).unwrap();
        let d = moduli_space(&rep, &tol()).unwrap();
        assert_eq!(d.c_minus_dim, 0);
        assert_eq!(d.normal_form, NormalForm::RealPoint);
    }

    #[test]
    fn su1n11_moduli_delta_one() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let d = moduli_space(&rep, &tol()).unwrap();
        assert_eq!(d.c_minus_dim, 1);
        assert_eq!(d.normal_form, NormalForm::ComplexDelta(1));
    }

    #[test]
    fn complex_triple_copy_moduli() {
        let rep = build_rep("mult:3:su1n:2:1", &tol()).unwrap();
        let d = moduli_space(&rep, &tol()).unwrap();
        // u(3) has dimension 9.
        assert_eq!(d.c_minus_dim, 9);
        assert_eq!(d.normal_form, NormalForm::ComplexDelta(3));
    }

    #[test]
    fn lambda_metric_roundtrip() {
        let rep = build_rep("mult:2:su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = g_lambda(&sm, &[0.2, 0.5], &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let rep1 = ricci_spectrum_invariant(&sm, &pkg);
        // Permuted lambdas give the same spectrum.
        let spec2 = g_lambda(&sm, &[0.5, 0.2], &tol()).unwrap();
        let pkg2 = geometry_of(&sm, &spec2, &tol()).unwrap();
        let rep2 = ricci_spectrum_invariant(&sm, &pkg2);
        for (a, b) in rep1.spectrum.iter().zip(rep2.spectrum.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // Sign-flip of one block leaves the spectrum unchanged.
        let spec3 = g_lambda(&sm, &[-0.2, 0.5], &tol()).unwrap();
        let pkg3 = geometry_of(&sm, &spec3, &tol()).unwrap();
        let rep3 = ricci_spectrum_invariant(&sm, &pkg3);
        for (a, b) in rep1.spectrum.iter().zip(rep3.spectrum.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_out_of_domain() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        assert!(matches!(
            g_lambda(&sm, &[1.0], &tol()),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn zero_lambda_zero_v_spectrum() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = g_lambda(&sm, &[0.0], &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let s = ricci_spectrum_invariant(&sm, &pkg);
        assert!(s.spectrum.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn spectrum_matches_psi_prediction() {
        let rep = build_rep("su1n:1:1", &tol()).unwrap();
        let sm = build_type_model(&rep, &tol()).unwrap();
        let spec = g_lambda(&sm, &[0.4], &tol()).unwrap();
        let pkg = geometry_of(&sm, &spec, &tol()).unwrap();
        let s = ricci_spectrum_invariant(&sm, &pkg);
        // d_minus from the background Casimir.
        let base = build_rep("su1n:1:1", &tol()).unwrap();
        let split = crate::geometry::rho_split(
            &sm,
            &crate::geometry::background_metric_spec(&sm, 1.0, &tol()).unwrap(),
        );
        let (dm, mult) = d_minus_of_base(&base, &split.casimir, &tol()).unwrap();
        let expected = psi(0.4) * dm;
        assert_eq!(s.positive_part.len(), mult);
        for v in &s.positive_part {
            assert!(
                (v - expected).abs() < 1e-9 * expected.max(1.0),
                "{v} vs {expected}"
            );
        }
    }

    #[test]
    fn quaternionic_moduli_rejected() {
        let rep = build_rep("so_star:3", &tol()).unwrap();
        assert!(matches!(
            moduli_space(&rep, &tol()),
            Err(Error::QuaternionicUnsupported)
        ));
    }

    #[test]
    fn grid_enumeration() {
        let g = delta_grid(2, 3, 0.9);
        // Nondecreasing pairs over 3 values: 6.
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(|v| v[0] <= v[1]));
    }
}
