//! Machine-readable run reports and their human rendering.
//!
//! Reports are plain data: serde both ways, `PartialEq`, rationals printed
//! as `"p/q"`. The JSON form re-parses to an equal value, and rendering is
//! deterministic so command output is byte-stable.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{BpfCertificate, DivisorReport};
use crate::mmp::{EndState, LengthBoundReport, MmpRun, ValidatorVerdict};
use crate::polytope::{DecompositionTerm, RationalPolytope};
use crate::rational::Rational;
use crate::singularities::{DiscrepancyResult, FundamentalCycle, StructureReport};
use crate::surface::ValidationReport;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Validate(ValidateReport),
    ClassifySingularity(SingularityReport),
    MmpRun(MmpReport),
    NefPolytope(PolytopeReport),
    Analyze(AnalyzeReport),
    LcStructure(LcStructureReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ValidateReport {
    pub model: String,
    pub report: ValidationReport,
    /// Resolution graphs found in the document and whether they are
    /// structurally valid resolutions (negative-definite Gram).
    pub graphs: Vec<GraphCheck>,
    pub ok: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GraphCheck {
    pub name: String,
    pub negative_definite: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SingularityReport {
    pub model: String,
    pub entries: Vec<SingularityEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SingularityEntry {
    pub graph: String,
    pub discrepancies: DiscrepancyResult,
    pub minimal_resolution: bool,
    pub fundamental_cycle: Option<FundamentalCycle>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MmpReport {
    pub model: String,
    pub mode: String,
    pub relative: bool,
    pub steps: Vec<MmpStepView>,
    pub end_state: EndState,
    pub validators: Vec<ValidatorVerdict>,
    pub length_bounds: Option<LengthBoundReport>,
    pub final_model: FinalModelView,
    pub rational_singularities_in: bool,
    pub rational_singularities_out: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MmpStepView {
    pub index: usize,
    pub curve: String,
    pub discrepancy: Rational,
    /// (K+Delta).C at the step.
    pub log_degree: Rational,
    /// (K+C).C at the step.
    pub adjoint_degree: Rational,
    pub self_intersection: Rational,
    pub genus: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FinalModelView {
    pub curves: Vec<String>,
    pub k_self_intersection: Rational,
    pub smooth: bool,
    pub boundary: BTreeMap<String, Rational>,
}

impl MmpReport {
    pub fn from_run(model_name: &str, run: &MmpRun, length_bounds: Option<LengthBoundReport>) -> Self {
        MmpReport {
            model: model_name.to_string(),
            mode: match run.config.mode {
                crate::mmp::MmpMode::Qf => "qf".into(),
                crate::mmp::MmpMode::Fp => "fp".into(),
                crate::mmp::MmpMode::Lc => "lc".into(),
            },
            relative: run.config.relative,
            steps: run
                .steps
                .iter()
                .map(|s| MmpStepView {
                    index: s.index,
                    curve: s.curve.clone(),
                    discrepancy: s.discrepancy.clone(),
                    log_degree: s.log_degree.clone(),
                    adjoint_degree: s.adjoint_degree.clone(),
                    self_intersection: s.self_intersection.clone(),
                    genus: s.genus,
                })
                .collect(),
            end_state: run.end_state.clone(),
            validators: run.validators.clone(),
            length_bounds,
            final_model: FinalModelView {
                curves: run.final_model.curves.iter().map(|c| c.id.clone()).collect(),
                k_self_intersection: run.final_model.k_self_intersection(),
                smooth: run.final_model.smooth,
                boundary: run.final_boundary.coefficients.clone(),
            },
            rational_singularities_in: run.rational_singularities_in,
            rational_singularities_out: run.rational_singularities_out,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PolytopeReport {
    pub model: String,
    pub curve_set: Vec<String>,
    pub length_constant: Rational,
    pub polytope: RationalPolytope,
    pub decomposition: Option<DecompositionView>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DecompositionView {
    pub terms: Vec<DecompositionTerm>,
    pub weight_total: Rational,
}

impl DecompositionView {
    pub fn new(terms: Vec<DecompositionTerm>) -> Self {
        let weight_total = terms.iter().map(|t| t.weight.clone()).sum();
        DecompositionView {
            terms,
            weight_total,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub model: String,
    pub divisor: BTreeMap<String, Rational>,
    pub report: DivisorReport,
    pub bpf: Option<BpfCertificate>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LcStructureReport {
    pub model: String,
    pub entries: Vec<LcStructureEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LcStructureEntry {
    pub graph: String,
    pub structure: StructureReport,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Validate(r) => {
                writeln!(f, "model: {}", r.model)?;
                if r.report.is_clean() {
                    writeln!(f, "validation: ok")?;
                } else {
                    writeln!(f, "validation: FAILED")?;
                    for v in &r.report.violations {
                        writeln!(f, "  [{}] {}", v.code, v.message)?;
                    }
                }
                for g in &r.graphs {
                    writeln!(
                        f,
                        "graph {}: {}",
                        g.name,
                        if g.negative_definite {
                            "negative definite"
                        } else {
                            "NOT negative definite"
                        }
                    )?;
                }
                Ok(())
            }
            Report::ClassifySingularity(r) => {
                writeln!(f, "model: {}", r.model)?;
                for e in &r.entries {
                    let coeffs: Vec<String> = e
                        .discrepancies
                        .coefficients
                        .values()
                        .map(|c| c.to_string())
                        .collect();
                    let klt_note = if e.discrepancies.classification
                        == crate::singularities::Classification::Lc
                    {
                        "lc, not klt"
                    } else {
                        ""
                    };
                    writeln!(
                        f,
                        "graph {}: {}{}; coefficients {}",
                        e.graph,
                        if klt_note.is_empty() {
                            e.discrepancies.classification.to_string()
                        } else {
                            klt_note.to_string()
                        },
                        if e.minimal_resolution {
                            ""
                        } else {
                            " (not a minimal resolution)"
                        },
                        coeffs.join(",")
                    )?;
                    if let Some(fc) = &e.fundamental_cycle {
                        let z: Vec<String> = fc
                            .cycle
                            .iter()
                            .map(|(id, m)| format!("{id}:{m}"))
                            .collect();
                        writeln!(
                            f,
                            "  fundamental cycle {} with p_a(Z) = {} ({})",
                            z.join(","),
                            fc.arithmetic_genus,
                            if fc.is_rational {
                                "rational"
                            } else {
                                "not rational"
                            }
                        )?;
                    }
                }
                Ok(())
            }
            Report::MmpRun(r) => {
                writeln!(f, "model: {} (mode {}{})", r.model, r.mode, if r.relative { ", relative" } else { "" })?;
                if r.steps.is_empty() {
                    writeln!(f, "steps: none")?;
                } else {
                    writeln!(f, "steps:")?;
                    for s in &r.steps {
                        writeln!(
                            f,
                            "  {}: contract {} (C^2 = {}, (K+D).C = {}, discrepancy {})",
                            s.index, s.curve, s.self_intersection, s.log_degree, s.discrepancy
                        )?;
                    }
                }
                let end = match &r.end_state {
                    EndState::MinimalModel => "minimal model (K+Delta nef on catalog)".to_string(),
                    EndState::MoriFiberOverCurve { witness } => {
                        format!("Mori fiber space over a curve (witness {witness})")
                    }
                    EndState::FanoRhoOne { witness } => {
                        format!("Fano of Picard rank one (witness {witness})")
                    }
                };
                writeln!(f, "end state: {end}")?;
                writeln!(
                    f,
                    "final model: K^2 = {}, curves [{}]",
                    r.final_model.k_self_intersection,
                    r.final_model.curves.join(", ")
                )?;
                for v in &r.validators {
                    writeln!(
                        f,
                        "validator {}: {} ({})",
                        v.name,
                        if v.passed { "pass" } else { "FAIL" },
                        v.details
                    )?;
                }
                if let Some(lb) = &r.length_bounds {
                    writeln!(
                        f,
                        "length bounds: {}",
                        if lb.passed { "pass" } else { "FAIL" }
                    )?;
                }
                Ok(())
            }
            Report::NefPolytope(r) => {
                writeln!(f, "model: {}", r.model)?;
                writeln!(f, "curve set: [{}]", r.curve_set.join(", "))?;
                writeln!(f, "length constant M = {}", r.length_constant)?;
                writeln!(f, "halfspaces:")?;
                for h in &r.polytope.halfspaces {
                    writeln!(f, "  {}", h.label)?;
                }
                if r.polytope.vertices.is_empty() {
                    writeln!(f, "vertices: none (region empty)")?;
                } else {
                    writeln!(f, "vertices:")?;
                    for v in &r.polytope.vertices {
                        let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                        writeln!(f, "  ({})", coords.join(", "))?;
                    }
                }
                if let Some(d) = &r.decomposition {
                    writeln!(f, "decomposition (weights sum to {}):", d.weight_total)?;
                    for t in &d.terms {
                        writeln!(f, "  weight {} on vertex {}", t.weight, t.vertex_index)?;
                    }
                }
                Ok(())
            }
            Report::Analyze(r) => {
                writeln!(f, "model: {}", r.model)?;
                let d: Vec<String> = r
                    .divisor
                    .iter()
                    .map(|(id, c)| format!("{c}*{id}"))
                    .collect();
                writeln!(f, "divisor: {}", d.join(" + "))?;
                writeln!(
                    f,
                    "nef on catalog: {}{}",
                    r.report.nef_on_catalog,
                    r.report
                        .nef_failure
                        .as_ref()
                        .map(|c| format!(" (fails on {c})"))
                        .unwrap_or_default()
                )?;
                writeln!(f, "self-intersection: {}", r.report.self_intersection)?;
                if let Some(big) = &r.report.big_certificate {
                    writeln!(f, "big: {big}")?;
                }
                writeln!(f, "degree-zero locus: [{}]", r.report.keel_locus.join(", "))?;
                if let Some(chi) = &r.report.euler_char {
                    writeln!(f, "euler characteristic: {chi}")?;
                }
                if let Some(bpf) = &r.bpf {
                    writeln!(
                        f,
                        "basepoint-freeness: {}",
                        if bpf.issued { "certificate issued" } else { "refused" }
                    )?;
                    writeln!(f, "  {}", bpf.conclusion)?;
                    for c in &bpf.checked {
                        writeln!(f, "  checked: {c}")?;
                    }
                    for t in &bpf.trusted {
                        writeln!(f, "  trusted: {t}")?;
                    }
                    for fail in &bpf.failures {
                        writeln!(f, "  failure: {fail}")?;
                    }
                }
                Ok(())
            }
            Report::LcStructure(r) => {
                writeln!(f, "model: {}", r.model)?;
                for e in &r.entries {
                    writeln!(
                        f,
                        "graph {} ({}):",
                        e.graph, e.structure.classification
                    )?;
                    for s in &e.structure.steps {
                        writeln!(f, "  contract {} with (K+E).E = {}", s.vertex, s.witness)?;
                    }
                    match &e.structure.case {
                        crate::singularities::LcCase::QFactorial => {
                            writeln!(f, "  case (a): all exceptional curves contracted")?
                        }
                        crate::singularities::LcCase::SingleCurveDegreeZero { vertex } => writeln!(
                            f,
                            "  case (b): `{vertex}` remains with (K+E).E = 0 and zero boundary"
                        )?,
                    }
                }
                Ok(())
            }
        }
    }
}
