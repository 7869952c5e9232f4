//! Python bindings: a `Surface` class wrapping a parsed model document plus
//! free functions for the lattice primitives. Rationals cross the boundary
//! as `"p/q"` strings and structured results as JSON, so Python needs no
//! extra types.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nefkit::analysis::{bpf_certificate, divisor_report, BpfHypotheses};
use nefkit::error::Error;
use nefkit::lattice::{CoeffVector, PairingMatrix};
use nefkit::mmp::{run_mmp, validate_length_bounds, MmpConfig, MmpMode};
use nefkit::model::{parse_divisor_expr, parse_model, ModelDocument};
use nefkit::polytope::{decompose_boundary, length_constant, nef_polytope, BoundaryCube};
use nefkit::rational::Rational;
use nefkit::report::{
    AnalyzeReport, DecompositionView, LcStructureEntry, LcStructureReport, MmpReport,
    PolytopeReport, Report, SingularityEntry, SingularityReport,
};
use nefkit::singularities::{
    discrepancies, fundamental_cycle, is_minimal_resolution, lc_contraction_sequence,
};
use nefkit::surface::{
    contract_curve, validate_model, Boundary, BoundaryMode, FieldTag, SurfaceModel,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_matrix(rows: Vec<Vec<String>>) -> PyResult<PairingMatrix> {
    let entries = rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|s| s.parse::<Rational>().map_err(PyValueError::new_err))
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    PairingMatrix::new(entries).map_err(err)
}

fn parse_vector(coords: Vec<String>) -> PyResult<CoeffVector> {
    Ok(CoeffVector(
        coords
            .into_iter()
            .map(|s| s.parse::<Rational>().map_err(PyValueError::new_err))
            .collect::<PyResult<Vec<_>>>()?,
    ))
}

/// Exact negative-definiteness test on a symmetric rational matrix.
#[pyfunction]
fn is_negative_definite(rows: Vec<Vec<String>>) -> PyResult<bool> {
    Ok(parse_matrix(rows)?.is_negative_definite())
}

/// Solves `M e = -rhs` over the rationals; requires M negative definite.
#[pyfunction]
fn solve_mumford(rows: Vec<Vec<String>>, rhs: Vec<String>) -> PyResult<Vec<String>> {
    let m = parse_matrix(rows)?;
    let b = parse_vector(rhs)?;
    let e = m.solve_mumford(&b).map_err(err)?;
    Ok(e.iter().map(|c| c.to_string()).collect())
}

/// `u^T M v` as a `"p/q"` string.
#[pyfunction]
fn pair(rows: Vec<Vec<String>>, u: Vec<String>, v: Vec<String>) -> PyResult<String> {
    let m = parse_matrix(rows)?;
    let uu = parse_vector(u)?;
    let vv = parse_vector(v)?;
    Ok(m.pair(&uu, &vv).map_err(err)?.to_string())
}

/// A surface model with its boundary and any resolution-graph blocks,
/// loaded from the TOML document format.
#[pyclass]
struct Surface {
    doc: ModelDocument,
    model: SurfaceModel,
    boundary: Boundary,
}

impl Surface {
    fn boundary_mode(&self) -> BoundaryMode {
        match self.model.field {
            FieldTag::FbarP => BoundaryMode::Unrestricted,
            FieldTag::Generic => BoundaryMode::Boundary,
        }
    }

    fn divisor(&self, expr: Option<&str>) -> PyResult<(CoeffVector, BTreeMap<String, Rational>)> {
        match expr {
            Some(e) => parse_divisor_expr(&self.model, e).map_err(err),
            None => {
                let class = self.model.log_canonical_class(&self.boundary).map_err(err)?;
                let mut shown = BTreeMap::new();
                shown.insert("K".to_string(), Rational::one());
                for (id, c) in &self.boundary.coefficients {
                    shown.insert(id.clone(), c.clone());
                }
                Ok((class, shown))
            }
        }
    }
}

#[pymethods]
impl Surface {
    /// Parse a model document from TOML text.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let doc = parse_model(text).map_err(err)?;
        let (model, boundary) = doc.to_surface_model().map_err(err)?;
        Ok(Surface {
            doc,
            model,
            boundary,
        })
    }

    /// Load a model document from a file path.
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Surface::from_toml(&text)
    }

    fn name(&self) -> String {
        self.model.name.clone()
    }

    fn curves(&self) -> Vec<String> {
        self.model.curves.iter().map(|c| c.id.clone()).collect()
    }

    fn graphs(&self) -> Vec<String> {
        self.doc.graphs.iter().map(|g| g.name.clone()).collect()
    }

    /// Intersection number of two generators ("K" or a curve id).
    fn pair(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.model.pair_named(a, b).map_err(err)?.to_string())
    }

    fn k_self_intersection(&self) -> String {
        self.model.k_self_intersection().to_string()
    }

    fn is_smooth(&self) -> bool {
        self.model.smooth
    }

    /// Violation messages; empty when the model is well-formed.
    fn validate(&self) -> Vec<String> {
        validate_model(&self.model, &self.boundary, self.boundary_mode())
            .violations
            .iter()
            .map(|v| format!("[{}] {}", v.code, v.message))
            .collect()
    }

    fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Riemann-Roch Euler characteristic of a divisor `"id=p/q,..."`.
    fn euler_char(&self, divisor: &str) -> PyResult<String> {
        let (class, _) = parse_divisor_expr(&self.model, divisor).map_err(err)?;
        Ok(nefkit::analysis::euler_char(&self.model, &class)
            .map_err(err)?
            .to_string())
    }

    /// Contract one catalog curve; returns (new Surface, discrepancy).
    fn contract(&self, curve_id: &str) -> PyResult<(Surface, String)> {
        let (model, boundary, morphism) =
            contract_curve(&self.model, &self.boundary, curve_id).map_err(err)?;
        let surface = Surface {
            doc: self.doc.clone(),
            model,
            boundary,
        };
        Ok((surface, morphism.discrepancy.to_string()))
    }

    /// Run the minimal model program; returns the JSON run report.
    #[pyo3(signature = (mode = "qf", relative = false))]
    fn mmp_run(&self, mode: &str, relative: bool) -> PyResult<String> {
        let mode = match mode {
            "qf" => MmpMode::Qf,
            "fp" => MmpMode::Fp,
            "lc" => MmpMode::Lc,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown mode `{other}` (expected qf, fp or lc)"
                )))
            }
        };
        let cfg = MmpConfig {
            mode,
            relative,
            max_steps: None,
        };
        let run = run_mmp(&self.model, &self.boundary, &cfg).map_err(err)?;
        let length_bounds = match mode.boundary_mode() {
            BoundaryMode::Boundary => Some(validate_length_bounds(&run).map_err(err)?),
            BoundaryMode::Unrestricted => None,
        };
        Ok(Report::MmpRun(MmpReport::from_run(&self.model.name, &run, length_bounds)).to_json())
    }

    /// Discrepancies and classification for every resolution graph; JSON.
    fn classify_singularities(&self) -> PyResult<String> {
        let mut entries = Vec::new();
        for g in self.doc.to_graphs().map_err(err)? {
            let disc = discrepancies(&g).map_err(err)?;
            let minimal = is_minimal_resolution(&g).map_err(err)?;
            let cycle = if g.is_connected() {
                Some(fundamental_cycle(&g).map_err(err)?)
            } else {
                None
            };
            entries.push(SingularityEntry {
                graph: g.name.clone(),
                discrepancies: disc,
                minimal_resolution: minimal.is_minimal,
                fundamental_cycle: cycle,
            });
        }
        Ok(Report::ClassifySingularity(SingularityReport {
            model: self.model.name.clone(),
            entries,
        })
        .to_json())
    }

    /// The lc contraction structure sequence for every graph; JSON.
    fn lc_structure(&self) -> PyResult<String> {
        let mut entries = Vec::new();
        for g in self.doc.to_graphs().map_err(err)? {
            entries.push(LcStructureEntry {
                graph: g.name.clone(),
                structure: lc_contraction_sequence(&g).map_err(err)?,
            });
        }
        Ok(Report::LcStructure(LcStructureReport {
            model: self.model.name.clone(),
            entries,
        })
        .to_json())
    }

    /// Nef-boundary polytope over the boundary cube; JSON. The curve set
    /// defaults to the whole catalog.
    #[pyo3(signature = (curves = None, decompose = false))]
    fn nef_polytope(&self, curves: Option<Vec<String>>, decompose: bool) -> PyResult<String> {
        let cube = BoundaryCube::from_boundary(&self.boundary).map_err(err)?;
        let curve_set = curves
            .unwrap_or_else(|| self.model.curves.iter().map(|c| c.id.clone()).collect());
        let polytope = nef_polytope(&self.model, &cube, &curve_set).map_err(err)?;
        let m_constant = length_constant(&self.model, &cube).map_err(err)?;
        let decomposition = if decompose {
            let terms = decompose_boundary(&self.boundary, &polytope).map_err(err)?;
            Some(DecompositionView::new(terms))
        } else {
            None
        };
        Ok(Report::NefPolytope(PolytopeReport {
            model: self.model.name.clone(),
            curve_set,
            length_constant: m_constant,
            polytope,
            decomposition,
        })
        .to_json())
    }

    /// Divisor certificates; JSON. `divisor` defaults to K plus the boundary.
    #[pyo3(signature = (divisor = None, bpf = false, cartier = false, semi_ample = false))]
    fn analyze(
        &self,
        divisor: Option<&str>,
        bpf: bool,
        cartier: bool,
        semi_ample: bool,
    ) -> PyResult<String> {
        let (class, shown) = self.divisor(divisor)?;
        let report = divisor_report(&self.model, &class).map_err(err)?;
        let bpf_result = if bpf {
            Some(
                bpf_certificate(
                    &self.model,
                    &self.boundary,
                    &class,
                    BpfHypotheses {
                        cartier_declared: cartier,
                        semi_ample_declared: semi_ample,
                    },
                )
                .map_err(err)?,
            )
        } else {
            None
        };
        Ok(Report::Analyze(AnalyzeReport {
            model: self.model.name.clone(),
            divisor: shown,
            report,
            bpf: bpf_result,
        })
        .to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface(name={:?}, curves={}, smooth={}, K^2={})",
            self.model.name,
            self.model.curves.len(),
            self.model.smooth,
            self.model.k_self_intersection()
        )
    }
}

#[pymodule]
fn nefkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Surface>()?;
    m.add_function(wrap_pyfunction!(is_negative_definite, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mumford, m)?)?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    Ok(())
}
