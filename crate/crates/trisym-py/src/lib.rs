//! Python bindings: catalog construction, admissibility checks, model
//! geometry, soliton verification, isometry dimensions and moduli scans.
//! Structured results cross the boundary as JSON strings or plain lists.

use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use trisym::catalog;
use trisym::config::{RankBounds, Tolerances};
use trisym::geometry::{
    background_metric_spec, foliation_check, geometry_of, metric_from_s, reducibility_test,
    semidirect_geometry_checks, soliton_check,
};
use trisym::isometry::{build_killing_algebra, dichotomy, i_filtration};
use trisym::lie;
use trisym::moduli::{g_lambda, moduli_space, ricci_spectrum_invariant};
use trisym::rep::{background_metric, casimir, centralizer_split, check_admissible, AlgebraType};
use trisym::semidirect::{build_type_model, structural_report, SemidirectModel};
use trisym::threesym::{curvature_nullity_w, nijenhuis};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tol() -> Tolerances {
    Tolerances::from_env()
}

/// A structure-constant Lie algebra.
#[pyclass]
struct LieAlgebra {
    inner: lie::LieAlgebra,
}

#[pymethods]
impl LieAlgebra {
    /// Loads an algebra from its JSON form
    /// {dim, basis_names, brackets: [[i, j, [[k, value], ...]], ...]}.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let parsed: lie::LieAlgebraJson = serde_json::from_str(text).map_err(err)?;
        Ok(LieAlgebra {
            inner: lie::LieAlgebra::from_json(&parsed, &tol()).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json()).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn basis_names(&self) -> Vec<String> {
        self.inner.basis_names.clone()
    }

    fn jacobi_residual(&self) -> f64 {
        lie::jacobi_residual(&self.inner)
    }

    fn killing_signature(&self) -> (usize, usize, usize) {
        lie::killing_form(&self.inner, &tol()).signature
    }

    fn radical_dim(&self) -> PyResult<usize> {
        Ok(lie::radical(&self.inner, &tol()).map_err(err)?.dim())
    }

    fn center_dim(&self) -> usize {
        lie::center(&self.inner, &tol()).dim()
    }

    fn derived_dim(&self) -> usize {
        lie::derived_algebra(&self.inner, &tol()).dim()
    }

    fn derivation_count(&self) -> usize {
        lie::derivations(&self.inner, &tol()).len()
    }

    fn is_simple(&self) -> bool {
        lie::is_simple(&self.inner, &tol())
    }
}

/// A catalog representation: the acting algebra with its matrices, complex
/// structure and Cartan data.
#[pyclass]
struct Representation {
    inner: trisym::rep::Representation,
}

#[pymethods]
impl Representation {
    #[staticmethod]
    fn build(id: &str) -> PyResult<Self> {
        Ok(Representation {
            inner: catalog::build_rep(id, &tol()).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim_l(&self) -> usize {
        self.inner.dim_l()
    }

    #[getter]
    fn dim_v(&self) -> usize {
        self.inner.dim_v
    }

    #[getter]
    fn non_compact(&self) -> bool {
        self.inner.type_flag == AlgebraType::NonCompact
    }

    /// Admissibility report as a JSON string.
    fn check(&self) -> PyResult<String> {
        let report = check_admissible(&self.inner, &tol());
        serde_json::to_string(&report).map_err(err)
    }

    fn admissible(&self) -> bool {
        check_admissible(&self.inner, &tol()).verdict
    }

    fn background_metric_ok(&self) -> bool {
        background_metric(&self.inner, &tol()).is_ok()
    }

    /// (dim c+, dim c-) of the centralizer split by the background metric.
    fn centralizer_split_dims(&self) -> (usize, usize) {
        let split = centralizer_split(&self.inner, &self.inner.h_v, &tol());
        (split.c_plus.len(), split.c_minus.len())
    }

    /// Residual of the Casimir identity and the scalar Lambda.
    fn casimir_identity(&self) -> PyResult<(f64, f64)> {
        let t = tol();
        let b = lie::killing_form(&self.inner.algebra, &t);
        let hn = self.inner.cartan.h_indices.len();
        let sign = if self.non_compact() { 1.0 } else { -1.0 };
        let g_h = DMatrix::from_fn(hn, hn, |a, c| {
            sign * b.matrix[(
                self.inner.cartan.h_indices[a],
                self.inner.cartan.h_indices[c],
            )]
        });
        let cas = casimir(&self.inner, &g_h, &t).map_err(err)?;
        Ok((cas.identity_residual, cas.lambda))
    }

    fn moduli(&self) -> PyResult<String> {
        let desc = moduli_space(&self.inner, &tol()).map_err(err)?;
        Ok(format!(
            "{{\"c_minus_dim\": {}, \"normal_form\": \"{:?}\"}}",
            desc.c_minus_dim, desc.normal_form
        ))
    }
}

/// A semidirect-product model with its order-3 automorphism.
#[pyclass]
struct Model {
    sm: SemidirectModel,
}

impl Model {
    fn metric(&self, t: f64, lambdas: Option<Vec<f64>>) -> PyResult<trisym::geometry::MetricSpec> {
        match lambdas {
            None => background_metric_spec(&self.sm, t, &tol()).map_err(err),
            Some(l) => {
                if (t - 1.0).abs() > 1e-14 {
                    return Err(err("lambda metrics are built at t = 1"));
                }
                g_lambda(&self.sm, &l, &tol()).map_err(err)
            }
        }
    }
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn build(id: &str) -> PyResult<Self> {
        let t = tol();
        let rep = catalog::build_rep(id.strip_prefix("model:").unwrap_or(id), &t).map_err(err)?;
        Ok(Model {
            sm: build_type_model(&rep, &t).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.sm.dim()
    }

    #[getter]
    fn dim_v_block(&self) -> usize {
        self.sm.rep.dim_v
    }

    #[getter]
    fn dim_h(&self) -> usize {
        self.sm.h_range.len()
    }

    #[getter]
    fn type_iii(&self) -> bool {
        self.sm.is_type_iii()
    }

    fn jacobi_residual(&self) -> f64 {
        lie::jacobi_residual(&self.sm.model.algebra)
    }

    /// Dimension of the curvature nullity W (equals the V block dimension).
    fn nullity_dim(&self) -> PyResult<usize> {
        Ok(curvature_nullity_w(&self.sm.model, &tol())
            .map_err(err)?
            .w
            .dim())
    }

    fn structural_report(&self) -> PyResult<String> {
        let report = structural_report(&self.sm, &tol()).map_err(err)?;
        serde_json::to_string(&report).map_err(err)
    }

    /// Nijenhuis data: (residual against -4 tau, kernel dim, image dim).
    fn nijenhuis(&self) -> (f64, usize, usize) {
        let n = nijenhuis(&self.sm.model, &tol());
        (n.residual_vs_torsion, n.kernel_dim, n.image_dim)
    }

    /// Soliton check: returns (is_soliton, lambda, relative_residual).
    #[pyo3(signature = (t=1.0, lambdas=None, s_json=None))]
    fn soliton(
        &self,
        t: f64,
        lambdas: Option<Vec<f64>>,
        s_json: Option<&str>,
    ) -> PyResult<(bool, f64, f64)> {
        let tl = tol();
        let spec = match s_json {
            Some(text) => {
                let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(err)?;
                let nv = self.sm.rep.dim_v;
                if rows.len() != nv || rows.iter().any(|r| r.len() != nv) {
                    return Err(err("S matrix has wrong dimensions"));
                }
                let s = DMatrix::from_fn(nv, nv, |r, c| rows[r][c]);
                metric_from_s(&self.sm, s, t, &tl).map_err(err)?
            }
            None => self.metric(t, lambdas)?,
        };
        let pkg = geometry_of(&self.sm, &spec, &tl).map_err(err)?;
        let sol = soliton_check(&self.sm, &pkg, &tl);
        Ok((sol.is_soliton(), sol.lambda, sol.relative_residual))
    }

    /// Curvature and Kaehler report for the chosen metric, as JSON.
    #[pyo3(signature = (t=1.0, lambdas=None))]
    fn geometry(&self, t: f64, lambdas: Option<Vec<f64>>) -> PyResult<String> {
        let tl = tol();
        let spec = self.metric(t, lambdas)?;
        let pkg = geometry_of(&self.sm, &spec, &tl).map_err(err)?;
        let checks = semidirect_geometry_checks(&self.sm, &spec, &pkg, &tl);
        let fol = foliation_check(&self.sm, &pkg, &tl);
        let red = reducibility_test(&self.sm.model, &pkg, &tl);
        let value = serde_json::json!({
            "report": pkg.report,
            "component_checks": checks,
            "polar": fol.polar,
            "irreducible": red.irreducible,
            "curvature_nullity_dim": red.curvature_nullity_dim,
        });
        serde_json::to_string(&value).map_err(err)
    }

    /// Sorted Ricci spectrum on the V block for the chosen metric.
    #[pyo3(signature = (t=1.0, lambdas=None))]
    fn ricci_spectrum(&self, t: f64, lambdas: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let tl = tol();
        let spec = self.metric(t, lambdas)?;
        let pkg = geometry_of(&self.sm, &spec, &tl).map_err(err)?;
        Ok(ricci_spectrum_invariant(&self.sm, &pkg).spectrum)
    }

    /// Isometry data: (dim i, refinement steps, dim g_b, classification).
    fn isometry(&self) -> PyResult<(usize, usize, usize, String)> {
        let tl = tol();
        let spec = background_metric_spec(&self.sm, 1.0, &tl).map_err(err)?;
        let pkg = geometry_of(&self.sm, &spec, &tl).map_err(err)?;
        let iso = i_filtration(&pkg, &tl);
        let gb = build_killing_algebra(&self.sm.model, &pkg, &iso, &tl).map_err(err)?;
        let d = dichotomy(&self.sm.model, &iso, &tl);
        Ok((
            iso.i_basis.len(),
            iso.k_stabilized,
            gb.dim,
            d.classification,
        ))
    }
}

/// Catalog ids at the default desk-scale rank bounds.
#[pyfunction]
fn catalog_ids() -> Vec<String> {
    catalog::catalog_ids(&RankBounds::default())
}

#[pymodule]
fn trisym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LieAlgebra>()?;
    m.add_class::<Representation>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(catalog_ids, m)?)?;
    Ok(())
}
