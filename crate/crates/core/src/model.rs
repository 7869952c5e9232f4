//! The on-disk model document: a strict TOML dialect describing a surface
//! model, an optional boundary, and optional resolution-graph blocks.
//!
//! Strictness is the point: unknown keys are rejected, duplicate curve ids
//! are rejected, every pairing entry over the basis (K, curves...) must be
//! present exactly once (as `"A.B"` or `"B.A"`), and rational literals are
//! strings `"p/q"`, never floats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::PairingMatrix;
use crate::rational::Rational;
use crate::singularities::{GraphEdge, GraphVertex, ResolutionGraph, StrictTransform};
use crate::surface::{Boundary, CurveRecord, FieldTag, SurfaceModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema: u32,
    pub surface: SurfaceBlock,
    #[serde(default)]
    pub curves: Vec<CurveBlock>,
    /// Intersection numbers keyed `"A.B"`; `K` names the canonical class.
    pub pairing: BTreeMap<String, String>,
    #[serde(default)]
    pub boundary: BTreeMap<String, String>,
    #[serde(default)]
    pub graphs: Vec<GraphBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub name: String,
    pub chi: String,
    pub smooth: bool,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub rational_singularities: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard_rank_hint: Option<u32>,
}

fn default_field() -> String {
    "generic".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveBlock {
    pub id: String,
    pub genus: u32,
    #[serde(default)]
    pub vertical: bool,
    #[serde(default)]
    pub boundary_component: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphBlock {
    pub name: String,
    pub vertices: Vec<VertexBlock>,
    #[serde(default)]
    pub edges: Vec<EdgeBlock>,
    #[serde(default)]
    pub strict_transforms: Vec<StrictTransformBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexBlock {
    pub id: String,
    pub self_intersection: i64,
    #[serde(default)]
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeBlock {
    pub a: String,
    pub b: String,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: u32,
}

fn default_multiplicity() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrictTransformBlock {
    pub boundary_id: String,
    pub coefficient: String,
    #[serde(default)]
    pub meetings: BTreeMap<String, u32>,
}

fn parse_rational(raw: &str, location: &str) -> Result<Rational> {
    raw.parse().map_err(|e| Error::Parse {
        location: location.to_string(),
        message: e,
    })
}

/// Strict parse of the document text. Unknown keys, duplicate ids, missing
/// or doubled pairing entries, bad rational literals: all positioned errors.
pub fn parse_model(text: &str) -> Result<ModelDocument> {
    let doc: ModelDocument = toml::from_str(text).map_err(|e| Error::Parse {
        location: "document".to_string(),
        message: e.to_string(),
    })?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Parse {
            location: "schema".to_string(),
            message: format!("unsupported schema version {}", doc.schema),
        });
    }
    doc.check_names()?;
    Ok(doc)
}

pub fn parse_model_file(path: &std::path::Path) -> Result<ModelDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}

/// Serializes back to TOML; `parse(print(x)) == x`.
pub fn print_model(doc: &ModelDocument) -> String {
    toml::to_string(doc).expect("document serializes")
}

impl ModelDocument {
    fn check_names(&self) -> Result<()> {
        for (i, c) in self.curves.iter().enumerate() {
            if c.id == "K" {
                return Err(Error::Parse {
                    location: format!("curves[{i}].id"),
                    message: "`K` is reserved for the canonical class".into(),
                });
            }
            if self.curves[..i].iter().any(|d| d.id == c.id) {
                return Err(Error::Parse {
                    location: format!("curves[{i}].id"),
                    message: format!("duplicate curve id `{}`", c.id),
                });
            }
        }
        // Generator names: K plus the curve ids.
        let mut names = vec!["K".to_string()];
        names.extend(self.curves.iter().map(|c| c.id.clone()));

        // Each unordered pair exactly once.
        let mut seen: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for key in self.pairing.keys() {
            let (a, b) = key.split_once('.').ok_or_else(|| Error::Parse {
                location: format!("pairing.{key}"),
                message: "expected a key of the form `A.B`".into(),
            })?;
            let ia = names.iter().position(|n| n == a).ok_or_else(|| Error::Parse {
                location: format!("pairing.{key}"),
                message: format!("`{a}` is not a generator (K or a declared curve)"),
            })?;
            let ib = names.iter().position(|n| n == b).ok_or_else(|| Error::Parse {
                location: format!("pairing.{key}"),
                message: format!("`{b}` is not a generator (K or a declared curve)"),
            })?;
            let pair = (ia.min(ib), ia.max(ib));
            if let Some(previous) = seen.insert(pair, key.clone()) {
                return Err(Error::Parse {
                    location: format!("pairing.{key}"),
                    message: format!("entry already given as `{previous}`"),
                });
            }
        }
        for i in 0..names.len() {
            for j in i..names.len() {
                if !seen.contains_key(&(i, j)) {
                    return Err(Error::Parse {
                        location: "pairing".to_string(),
                        message: format!(
                            "pairing incomplete: missing entry `{}.{}`",
                            names[i], names[j]
                        ),
                    });
                }
            }
        }
        for id in self.boundary.keys() {
            if !self.curves.iter().any(|c| &c.id == id) {
                return Err(Error::Parse {
                    location: format!("boundary.{id}"),
                    message: format!("boundary references unknown curve `{id}`"),
                });
            }
        }
        Ok(())
    }

    /// Builds the in-memory model and boundary.
    pub fn to_surface_model(&self) -> Result<(SurfaceModel, Boundary)> {
        let names: Vec<String> = std::iter::once("K".to_string())
            .chain(self.curves.iter().map(|c| c.id.clone()))
            .collect();
        let dim = names.len();
        let mut rows = vec![vec![Rational::zero(); dim]; dim];
        for (key, value) in &self.pairing {
            let (a, b) = key.split_once('.').expect("checked in parse");
            let ia = names.iter().position(|n| n == a).expect("checked");
            let ib = names.iter().position(|n| n == b).expect("checked");
            let v = parse_rational(value, &format!("pairing.{key}"))?;
            rows[ia][ib] = v.clone();
            rows[ib][ia] = v;
        }
        let pairing = PairingMatrix::new(rows)?;
        let curves = self
            .curves
            .iter()
            .map(|c| CurveRecord {
                id: c.id.clone(),
                genus_of_normalization: c.genus,
                vertical: c.vertical,
                is_boundary_component: c.boundary_component,
            })
            .collect();
        let chi = parse_rational(&self.surface.chi, "surface.chi")?;
        let field = match self.surface.field.as_str() {
            "generic" => FieldTag::Generic,
            "fbar_p" => FieldTag::FbarP,
            other => {
                return Err(Error::Parse {
                    location: "surface.field".to_string(),
                    message: format!("unknown field tag `{other}` (expected generic or fbar_p)"),
                })
            }
        };
        let mut model = SurfaceModel::new(
            &self.surface.name,
            curves,
            pairing,
            chi,
            self.surface.smooth,
        )?;
        model.has_rational_singularities = self.surface.rational_singularities;
        model.field = field;
        model.picard_rank_hint = self.surface.picard_rank_hint;

        let mut coefficients = BTreeMap::new();
        for (id, raw) in &self.boundary {
            coefficients.insert(
                id.clone(),
                parse_rational(raw, &format!("boundary.{id}"))?,
            );
        }
        Ok((model, Boundary { coefficients }))
    }

    pub fn to_graphs(&self) -> Result<Vec<ResolutionGraph>> {
        self.graphs
            .iter()
            .map(|g| {
                let vertices = g
                    .vertices
                    .iter()
                    .map(|v| GraphVertex {
                        id: v.id.clone(),
                        self_intersection: v.self_intersection,
                        arithmetic_genus: v.genus,
                    })
                    .collect();
                let edges = g
                    .edges
                    .iter()
                    .map(|e| GraphEdge {
                        a: e.a.clone(),
                        b: e.b.clone(),
                        multiplicity: e.multiplicity,
                    })
                    .collect();
                let strict_transforms = g
                    .strict_transforms
                    .iter()
                    .map(|st| {
                        Ok(StrictTransform {
                            boundary_curve_id: st.boundary_id.clone(),
                            coefficient: parse_rational(
                                &st.coefficient,
                                &format!("graphs.{}.strict_transforms", g.name),
                            )?,
                            meetings: st.meetings.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ResolutionGraph::new(&g.name, vertices, edges, strict_transforms)
            })
            .collect()
    }

    pub fn graph(&self, name: &str) -> Result<ResolutionGraph> {
        self.to_graphs()?
            .into_iter()
            .find(|g| g.name == name)
            .ok_or_else(|| Error::UnknownCurve(format!("no resolution graph named `{name}`")))
    }
}

/// Parses a divisor expression `id=p/q,id=p/q` over the model basis; `K`
/// addresses the canonical class. Returns the class and the named terms.
pub fn parse_divisor_expr(
    model: &SurfaceModel,
    expr: &str,
) -> Result<(crate::lattice::CoeffVector, BTreeMap<String, Rational>)> {
    let mut coords = vec![Rational::zero(); model.dim()];
    let mut shown = BTreeMap::new();
    for term in expr.split(',') {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        let (id, value) = term.split_once('=').ok_or_else(|| Error::Parse {
            location: format!("divisor `{term}`"),
            message: "expected `id=p/q`".into(),
        })?;
        let id = id.trim();
        let coeff: Rational = value.trim().parse().map_err(|e| Error::Parse {
            location: format!("divisor `{term}`"),
            message: e,
        })?;
        let index = if id == "K" {
            0
        } else {
            model.generator_index(id)?
        };
        if !coords[index].is_zero() {
            return Err(Error::Parse {
                location: format!("divisor `{term}`"),
                message: format!("`{id}` given twice"),
            });
        }
        shown.insert(id.to_string(), coeff.clone());
        coords[index] = coeff;
    }
    Ok((crate::lattice::CoeffVector(coords), shown))
}
