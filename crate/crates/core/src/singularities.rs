//! Resolution dual graphs of normal surface singularities: discrepancy
//! solving, terminal/canonical/klt/lc classification, the lc one-curve
//! contraction structure sequence, and the fundamental-cycle rationality
//! test.
//!
//! The graph stores what a minimal resolution exposes numerically: vertex
//! self-intersections and arithmetic genera, edge multiplicities, and the
//! meeting pattern of boundary strict transforms. `K.E_j` is never an input;
//! it is derived from adjunction on the smooth resolution, which is what
//! makes the data validatable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CoeffVector, PairingMatrix};
use crate::rational::Rational;
use crate::surface::{contract_curve, Boundary, CurveRecord, SurfaceModel};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: String,
    /// Self-intersection of the exceptional curve; at most -1.
    pub self_intersection: i64,
    pub arithmetic_genus: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: String,
    pub b: String,
    /// Local intersection multiplicity; tacnodes give values above 1.
    pub multiplicity: u32,
}

/// A boundary component through the singular point: its coefficient in the
/// boundary divisor and how often it meets each exceptional curve.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StrictTransform {
    pub boundary_curve_id: String,
    pub coefficient: Rational,
    pub meetings: BTreeMap<String, u32>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ResolutionGraph {
    pub name: String,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub strict_transforms: Vec<StrictTransform>,
}

impl ResolutionGraph {
    pub fn new(
        name: &str,
        vertices: Vec<GraphVertex>,
        edges: Vec<GraphEdge>,
        strict_transforms: Vec<StrictTransform>,
    ) -> Result<Self> {
        let g = ResolutionGraph {
            name: name.to_string(),
            vertices,
            edges,
            strict_transforms,
        };
        g.check_structure()?;
        Ok(g)
    }

    /// Convenience constructor: vertices as `(id, self-intersection, genus)`,
    /// edges as index pairs with multiplicity 1.
    pub fn from_weights(name: &str, weights: &[(&str, i64, u32)], edges: &[(usize, usize)]) -> Self {
        let vertices = weights
            .iter()
            .map(|&(id, s, g)| GraphVertex {
                id: id.to_string(),
                self_intersection: s,
                arithmetic_genus: g,
            })
            .collect::<Vec<_>>();
        let edges = edges
            .iter()
            .map(|&(i, j)| GraphEdge {
                a: vertices[i].id.clone(),
                b: vertices[j].id.clone(),
                multiplicity: 1,
            })
            .collect();
        ResolutionGraph::new(name, vertices, edges, Vec::new()).expect("literal graph")
    }

    /// Chain of n (-2)-curves.
    pub fn a_chain(n: usize) -> Self {
        let ids: Vec<String> = (1..=n).map(|i| format!("E{i}")).collect();
        let vertices = ids
            .iter()
            .map(|id| GraphVertex {
                id: id.clone(),
                self_intersection: -2,
                arithmetic_genus: 0,
            })
            .collect();
        let edges = (1..n)
            .map(|i| GraphEdge {
                a: ids[i - 1].clone(),
                b: ids[i].clone(),
                multiplicity: 1,
            })
            .collect();
        ResolutionGraph::new(&format!("A{n}"), vertices, edges, Vec::new()).expect("A-chain")
    }

    fn check_structure(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                return Err(Error::Validation(format!(
                    "graph `{}`: duplicate vertex id `{}`",
                    self.name, v.id
                )));
            }
            if v.self_intersection > -1 {
                return Err(Error::Validation(format!(
                    "graph `{}`: vertex `{}` has self-intersection {} > -1",
                    self.name, v.id, v.self_intersection
                )));
            }
        }
        for e in &self.edges {
            if e.a == e.b {
                return Err(Error::Validation(format!(
                    "graph `{}`: edge from `{}` to itself is not allowed in a dual graph",
                    self.name, e.a
                )));
            }
            for end in [&e.a, &e.b] {
                if !seen.contains(end.as_str()) {
                    return Err(Error::Validation(format!(
                        "graph `{}`: edge endpoint `{end}` is not a vertex",
                        self.name
                    )));
                }
            }
            if e.multiplicity == 0 {
                return Err(Error::Validation(format!(
                    "graph `{}`: edge `{}`--`{}` has multiplicity 0",
                    self.name, e.a, e.b
                )));
            }
        }
        for st in &self.strict_transforms {
            if st.coefficient.is_negative() {
                return Err(Error::Validation(format!(
                    "graph `{}`: strict transform `{}` has negative coefficient {}",
                    self.name, st.boundary_curve_id, st.coefficient
                )));
            }
            for id in st.meetings.keys() {
                if !seen.contains(id.as_str()) {
                    return Err(Error::Validation(format!(
                        "graph `{}`: strict transform `{}` meets unknown vertex `{id}`",
                        self.name, st.boundary_curve_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Gram matrix: diagonal self-intersections, off-diagonal summed edge
    /// multiplicities. Symmetric by construction.
    pub fn gram(&self) -> PairingMatrix {
        let n = self.vertices.len();
        let mut rows = vec![vec![Rational::zero(); n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            rows[i][i] = Rational::from_integer(v.self_intersection);
        }
        for e in &self.edges {
            let i = self.vertex_index(&e.a).expect("validated endpoint");
            let j = self.vertex_index(&e.b).expect("validated endpoint");
            let m = Rational::from_integer(e.multiplicity as i64);
            rows[i][j] += m.clone();
            rows[j][i] += m;
        }
        PairingMatrix::new(rows).expect("symmetric by construction")
    }

    /// `K.E_j` on the smooth resolution, by adjunction:
    /// `K.E = -E^2 + 2 p_a(E) - 2`.
    pub fn canonical_degree(&self, index: usize) -> Rational {
        let v = &self.vertices[index];
        Rational::from_integer(-v.self_intersection + 2 * v.arithmetic_genus as i64 - 2)
    }

    /// Total boundary meeting number at vertex `index`:
    /// `sum_B coeff(B) * meetings_B(index)`.
    fn boundary_contribution(&self, index: usize) -> Rational {
        let id = &self.vertices[index].id;
        let mut acc = Rational::zero();
        for st in &self.strict_transforms {
            if let Some(&m) = st.meetings.get(id) {
                acc += &st.coefficient * &Rational::from_integer(m as i64);
            }
        }
        acc
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            let i = self.vertex_index(&e.a).unwrap();
            let j = self.vertex_index(&e.b).unwrap();
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// DOT edge-list export for external graph viewers.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph \"{}\" {{\n", self.name));
        for v in &self.vertices {
            out.push_str(&format!(
                "  \"{}\" [label=\"{} ({}, g={})\"];\n",
                v.id, v.id, v.self_intersection, v.arithmetic_genus
            ));
        }
        for e in &self.edges {
            if e.multiplicity == 1 {
                out.push_str(&format!("  \"{}\" -- \"{}\";\n", e.a, e.b));
            } else {
                out.push_str(&format!(
                    "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
                    e.a, e.b, e.multiplicity
                ));
            }
        }
        for st in &self.strict_transforms {
            out.push_str(&format!(
                "  \"{}\" [shape=box,label=\"{} ({})\"];\n",
                st.boundary_curve_id, st.boundary_curve_id, st.coefficient
            ));
            for (vertex, &m) in &st.meetings {
                if m > 0 {
                    out.push_str(&format!(
                        "  \"{}\" -- \"{}\" [style=dashed,label=\"{}\"];\n",
                        st.boundary_curve_id, vertex, m
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Singularity class by discrepancy thresholds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Terminal,
    Canonical,
    Klt,
    Lc,
    NotLc,
}

impl Classification {
    pub fn is_lc(self) -> bool {
        self != Classification::NotLc
    }

    pub fn is_klt(self) -> bool {
        matches!(
            self,
            Classification::Terminal | Classification::Canonical | Classification::Klt
        )
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Terminal => "terminal",
            Classification::Canonical => "canonical",
            Classification::Klt => "klt",
            Classification::Lc => "lc",
            Classification::NotLc => "not-lc",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    /// Coefficient of each exceptional curve in the crepant boundary, i.e.
    /// the a_i with K_Y + sum a_i E_i + (strict transforms) orthogonal to
    /// every E_j.
    pub coefficients: BTreeMap<String, Rational>,
    pub classification: Classification,
}

/// Solves the exceptional orthogonality system and classifies the point.
///
/// The thresholds include the declared boundary coefficients: a strict
/// transform with coefficient above 1 already breaks log canonicity no
/// matter what the exceptional coefficients are.
pub fn discrepancies(g: &ResolutionGraph) -> Result<DiscrepancyResult> {
    let gram = g.gram();
    let n = g.vertices.len();
    let rhs = CoeffVector(
        (0..n)
            .map(|j| &g.canonical_degree(j) + &g.boundary_contribution(j))
            .collect(),
    );
    let a = gram.solve_mumford(&rhs)?;

    let mut thresholds: Vec<&Rational> = a.iter().collect();
    let nonzero_boundary: Vec<&Rational> = g
        .strict_transforms
        .iter()
        .filter(|st| !st.coefficient.is_zero())
        .map(|st| &st.coefficient)
        .collect();
    thresholds.extend(nonzero_boundary);

    let one = Rational::one();
    let classification = if thresholds.iter().all(|c| c.is_negative()) {
        Classification::Terminal
    } else if thresholds.iter().all(|c| !c.is_positive()) {
        Classification::Canonical
    } else if thresholds.iter().all(|c| **c < one) {
        Classification::Klt
    } else if thresholds.iter().all(|c| **c <= one) {
        Classification::Lc
    } else {
        Classification::NotLc
    };

    let coefficients = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), a[i].clone()))
        .collect();

    Ok(DiscrepancyResult {
        coefficients,
        classification,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MinimalResolutionReport {
    /// No genus-0 vertex of self-intersection -1 is present.
    pub is_minimal: bool,
    /// With zero boundary, every discrepancy coefficient is >= 0, i.e. the
    /// crepant exceptional divisor is effective.
    pub exceptional_effective: bool,
}

pub fn is_minimal_resolution(g: &ResolutionGraph) -> Result<MinimalResolutionReport> {
    let bare = ResolutionGraph {
        strict_transforms: Vec::new(),
        ..g.clone()
    };
    let disc = discrepancies(&bare)?;
    let is_minimal = !g
        .vertices
        .iter()
        .any(|v| v.self_intersection == -1 && v.arithmetic_genus == 0);
    let exceptional_effective = disc.coefficients.values().all(|a| !a.is_negative());
    Ok(MinimalResolutionReport {
        is_minimal,
        exceptional_effective,
    })
}

/// Terminal shape of an lc contraction sequence.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum LcCase {
    /// Every exceptional curve was contracted: the point is Q-factorial
    /// for the engine.
    QFactorial,
    /// One curve remains with (K+E).E = 0 and zero boundary.
    SingleCurveDegreeZero { vertex: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LcStep {
    pub vertex: String,
    /// (K+E).E under the pairing current at the time of contraction;
    /// negative by the structure theorem.
    pub witness: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    pub steps: Vec<LcStep>,
    pub case: LcCase,
    pub classification: Classification,
}

/// Runs the one-curve contraction structure sequence of a log canonical
/// point: at each stage some remaining exceptional curve E has
/// `(K+E).E < 0` under the current induced pairing and gets contracted.
/// Ends with the empty graph (case a) or with a single curve of adjoint
/// degree zero and no boundary (case b).
///
/// Tie-break: most negative `(K+E).E` first, then lexicographically
/// smallest id, so runs are deterministic.
pub fn lc_contraction_sequence(g: &ResolutionGraph) -> Result<StructureReport> {
    let disc = discrepancies(g)?;
    if !disc.classification.is_lc() {
        return Err(Error::NotLogCanonical);
    }
    let has_boundary = g
        .strict_transforms
        .iter()
        .any(|st| !st.coefficient.is_zero());

    // Bookkeeping model over (K, E_1, ..., E_n). K^2 is irrelevant to every
    // quantity the sequence reads, so it is set to 0.
    let n = g.vertices.len();
    let mut rows = vec![vec![Rational::zero(); n + 1]; n + 1];
    let gram = g.gram();
    for i in 0..n {
        rows[0][i + 1] = g.canonical_degree(i);
        rows[i + 1][0] = g.canonical_degree(i);
        for j in 0..n {
            rows[i + 1][j + 1] = gram.entry(i, j).clone();
        }
    }
    let curves = g
        .vertices
        .iter()
        .map(|v| CurveRecord::new(&v.id, v.arithmetic_genus))
        .collect();
    let mut model = SurfaceModel::new(
        &format!("germ:{}", g.name),
        curves,
        PairingMatrix::new(rows)?,
        Rational::zero(),
        false,
    )?;

    let mut steps = Vec::new();
    loop {
        let mut best: Option<(Rational, String)> = None;
        for c in &model.curves {
            let gidx = model.generator_index(&c.id)?;
            let adjoint = model.pairing.entry(0, gidx) + model.pairing.entry(gidx, gidx);
            if !adjoint.is_negative() {
                continue;
            }
            let candidate = (adjoint, c.id.clone());
            best = match best {
                None => Some(candidate),
                Some(b) => {
                    if candidate.0 < b.0 || (candidate.0 == b.0 && candidate.1 < b.1) {
                        Some(candidate)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some((witness, id)) = best else { break };
        let (next, _, _) = contract_curve(&model, &Boundary::empty(), &id)?;
        steps.push(LcStep {
            vertex: id,
            witness,
        });
        model = next;
    }

    let case = match model.curves.len() {
        0 => LcCase::QFactorial,
        1 => {
            let id = model.curves[0].id.clone();
            let gidx = 1;
            let adjoint = model.pairing.entry(0, gidx) + model.pairing.entry(gidx, gidx);
            if !adjoint.is_zero() {
                return Err(Error::StructureViolated(format!(
                    "last remaining curve `{id}` has (K+E).E = {adjoint}, expected 0"
                )));
            }
            if has_boundary {
                return Err(Error::StructureViolated(format!(
                    "terminal curve `{id}` of adjoint degree zero coexists with a nonzero \
                     boundary"
                )));
            }
            LcCase::SingleCurveDegreeZero { vertex: id }
        }
        k => {
            return Err(Error::StructureViolated(format!(
                "{k} curves remain but none has (K+E).E < 0"
            )))
        }
    };

    Ok(StructureReport {
        steps,
        case,
        classification: disc.classification,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FundamentalCycle {
    pub cycle: BTreeMap<String, u64>,
    pub arithmetic_genus: Rational,
    /// Artin's criterion: the point is rational iff p_a(Z) = 0.
    pub is_rational: bool,
}

/// Laufer's increment loop: start from the all-ones cycle and bump any
/// coordinate whose pairing against the cycle is positive, until
/// `Z.E_i <= 0` everywhere. Termination is guaranteed by negative
/// definiteness.
pub fn fundamental_cycle(g: &ResolutionGraph) -> Result<FundamentalCycle> {
    let gram = g.gram();
    if !gram.is_negative_definite() {
        return Err(Error::NotNegativeDefinite {
            reason: "fundamental cycle needs the Gram matrix of a resolution".into(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Validation(format!(
            "graph `{}` is not connected; the fundamental cycle is defined per singular point",
            g.name
        )));
    }
    let n = g.vertices.len();
    let mut z = vec![1i64; n];
    loop {
        let zc = CoeffVector::from_integers(&z);
        let mut bump = None;
        for i in 0..n {
            let e = CoeffVector::unit(n, i);
            if gram.pair(&zc, &e)?.is_positive() {
                bump = Some(i);
                break;
            }
        }
        match bump {
            Some(i) => z[i] += 1,
            None => break,
        }
    }
    let zc = CoeffVector::from_integers(&z);
    let z_sq = gram.pair(&zc, &zc)?;
    let k_dot_z: Rational = (0..n)
        .map(|i| &g.canonical_degree(i) * &zc[i])
        .sum();
    let pa = &Rational::one() + &(&(&z_sq + &k_dot_z) * &Rational::from_ratio(1, 2));
    let cycle = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), z[i] as u64))
        .collect();
    Ok(FundamentalCycle {
        cycle,
        is_rational: pa.is_zero(),
        arithmetic_genus: pa,
    })
}
