//! Surface models over a fixed curve catalog and one-curve contractions.
//!
//! A surface exists for the engine only through its catalog: a list of named
//! curves, the symmetric pairing over the basis (K, C_1, ..., C_n), and a few
//! declarative flags. Contraction removes one catalog curve with negative
//! self-intersection and replaces the pairing by the Mumford-induced one on
//! the remaining generators; every report downstream is therefore "relative
//! to catalog".

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CoeffVector, PairingMatrix};
use crate::rational::Rational;

/// A divisor class is a coefficient vector over (K, C_1, ..., C_n).
pub type DivisorClass = CoeffVector;

/// Declarative base-field tag. The engine computes nothing from it; it only
/// gates the FP-mode driver, where boundary coefficients above 1 are allowed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldTag {
    Generic,
    FbarP,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: String,
    pub genus_of_normalization: u32,
    /// Curve lies in a fiber of the reference morphism (relative mode).
    pub vertical: bool,
    pub is_boundary_component: bool,
}

impl CurveRecord {
    pub fn new(id: &str, genus: u32) -> Self {
        CurveRecord {
            id: id.to_string(),
            genus_of_normalization: genus,
            vertical: false,
            is_boundary_component: false,
        }
    }

    pub fn vertical(mut self) -> Self {
        self.vertical = true;
        self
    }
}

/// Effective boundary divisor, stored as coefficients on catalog curves.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Boundary {
    pub coefficients: BTreeMap<String, Rational>,
}

impl Boundary {
    pub fn empty() -> Self {
        Boundary::default()
    }

    pub fn from_pairs(pairs: &[(&str, Rational)]) -> Self {
        Boundary {
            coefficients: pairs
                .iter()
                .map(|(id, c)| (id.to_string(), c.clone()))
                .collect(),
        }
    }

    pub fn coefficient(&self, id: &str) -> Rational {
        self.coefficients
            .get(id)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(Rational::is_zero)
    }
}

/// Whether boundary coefficients are capped at 1 ("R-boundary") or merely
/// required effective (the FP regime).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundaryMode {
    Boundary,
    Unrestricted,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub name: String,
    pub curves: Vec<CurveRecord>,
    /// Pairing over the basis (K, C_1, ..., C_n); row/column 0 is K.
    pub pairing: PairingMatrix,
    pub euler_char_of_structure_sheaf: Rational,
    pub smooth: bool,
    pub has_rational_singularities: bool,
    pub field: FieldTag,
    pub picard_rank_hint: Option<u32>,
}

impl SurfaceModel {
    /// Builds a model, enforcing the structural invariants that the rest of
    /// the engine relies on (basis dimension, unique curve ids). Semantic
    /// findings (adjunction, boundary ranges) go through [`validate_model`].
    pub fn new(
        name: &str,
        curves: Vec<CurveRecord>,
        pairing: PairingMatrix,
        chi: Rational,
        smooth: bool,
    ) -> Result<Self> {
        if pairing.dim() != curves.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: curves.len() + 1,
                got: pairing.dim(),
            });
        }
        for (i, c) in curves.iter().enumerate() {
            if curves[..i].iter().any(|d| d.id == c.id) {
                return Err(Error::Validation(format!("duplicate curve id `{}`", c.id)));
            }
        }
        Ok(SurfaceModel {
            name: name.to_string(),
            curves,
            pairing,
            euler_char_of_structure_sheaf: chi,
            smooth,
            has_rational_singularities: false,
            field: FieldTag::Generic,
            picard_rank_hint: None,
        })
    }

    pub fn with_rational_singularities(mut self, flag: bool) -> Self {
        self.has_rational_singularities = flag;
        self
    }

    pub fn with_field(mut self, field: FieldTag) -> Self {
        self.field = field;
        self
    }

    /// Number of basis generators (K plus catalog curves).
    pub fn dim(&self) -> usize {
        self.pairing.dim()
    }

    pub fn curve_position(&self, id: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.id == id)
    }

    pub fn curve(&self, id: &str) -> Result<&CurveRecord> {
        self.curves
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCurve(id.to_string()))
    }

    /// Basis index of a catalog curve (K occupies index 0).
    pub fn generator_index(&self, id: &str) -> Result<usize> {
        self.curve_position(id)
            .map(|p| p + 1)
            .ok_or_else(|| Error::UnknownCurve(id.to_string()))
    }

    pub fn canonical_class(&self) -> DivisorClass {
        CoeffVector::unit(self.dim(), 0)
    }

    pub fn curve_class(&self, id: &str) -> Result<DivisorClass> {
        Ok(CoeffVector::unit(self.dim(), self.generator_index(id)?))
    }

    /// The boundary as a divisor class (zero K-coordinate).
    pub fn boundary_class(&self, b: &Boundary) -> Result<DivisorClass> {
        let mut coords = vec![Rational::zero(); self.dim()];
        for (id, coeff) in &b.coefficients {
            let g = self.generator_index(id)?;
            coords[g] = coeff.clone();
        }
        Ok(CoeffVector(coords))
    }

    /// K + Delta.
    pub fn log_canonical_class(&self, b: &Boundary) -> Result<DivisorClass> {
        let mut class = self.boundary_class(b)?;
        class.0[0] = Rational::one();
        Ok(class)
    }

    pub fn pair(&self, u: &DivisorClass, v: &DivisorClass) -> Result<Rational> {
        self.pairing.pair(u, v)
    }

    /// Intersection number of two basis generators by name; `"K"` addresses
    /// the canonical class.
    pub fn pair_named(&self, a: &str, b: &str) -> Result<Rational> {
        let ia = if a == "K" { 0 } else { self.generator_index(a)? };
        let ib = if b == "K" { 0 } else { self.generator_index(b)? };
        Ok(self.pairing.entry(ia, ib).clone())
    }

    pub fn k_self_intersection(&self) -> Rational {
        self.pairing.entry(0, 0).clone()
    }
}

/// One recorded finding of [`validate_model`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

impl Violation {
    fn new(code: &str, message: String) -> Self {
        Violation {
            code: code.to_string(),
            message,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_clean() {
            Ok(())
        } else {
            Err(Error::Validation(
                self.violations
                    .iter()
                    .map(|v| format!("[{}] {}", v.code, v.message))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            write!(f, "model is well-formed")
        } else {
            for v in &self.violations {
                writeln!(f, "violation [{}]: {}", v.code, v.message)?;
            }
            Ok(())
        }
    }
}

/// Full semantic scan of a model/boundary pair. Total: every problem is a
/// report entry, never a panic. An empty report means well-formed.
pub fn validate_model(m: &SurfaceModel, b: &Boundary, mode: BoundaryMode) -> ValidationReport {
    let mut out = Vec::new();
    let dim = m.dim();

    if dim != m.curves.len() + 1 {
        out.push(Violation::new(
            "basis-dimension",
            format!(
                "pairing has dimension {dim} but the basis (K plus {} curves) needs {}",
                m.curves.len(),
                m.curves.len() + 1
            ),
        ));
        return ValidationReport { violations: out };
    }

    for (i, c) in m.curves.iter().enumerate() {
        if m.curves[..i].iter().any(|d| d.id == c.id) {
            out.push(Violation::new(
                "duplicate-id",
                format!("curve id `{}` appears more than once", c.id),
            ));
        }
    }

    // Symmetry by full scan.
    for i in 0..dim {
        for j in 0..i {
            if m.pairing.entry(i, j) != m.pairing.entry(j, i) {
                out.push(Violation::new(
                    "pairing-symmetry",
                    format!("pairing not symmetric at ({i},{j})"),
                ));
            }
        }
    }

    if m.smooth {
        for i in 0..dim {
            for j in 0..=i {
                if !m.pairing.entry(i, j).is_integer() {
                    out.push(Violation::new(
                        "smooth-integrality",
                        format!(
                            "smooth model requires integer pairing entries; entry ({i},{j}) is {}",
                            m.pairing.entry(i, j)
                        ),
                    ));
                }
            }
        }
        // Adjunction: 2 p_a - 2 = C^2 + K.C with p_a >= genus of the
        // normalization (equality when the catalog curve is itself smooth).
        for (pos, c) in m.curves.iter().enumerate() {
            let g = pos + 1;
            let v = m.pairing.entry(g, g) + m.pairing.entry(0, g);
            let pa = &(&v + &Rational::from_integer(2)) * &Rational::from_ratio(1, 2);
            if !pa.is_integer() {
                out.push(Violation::new(
                    "smooth-adjunction",
                    format!(
                        "curve `{}`: C^2 + K.C = {v} is not an even integer on a smooth model",
                        c.id
                    ),
                ));
            } else if pa < Rational::from_integer(c.genus_of_normalization as i64) {
                out.push(Violation::new(
                    "smooth-adjunction",
                    format!(
                        "curve `{}`: adjunction gives arithmetic genus {pa}, below the declared \
                         geometric genus {}",
                        c.id, c.genus_of_normalization
                    ),
                ));
            }
        }
    }

    for (id, coeff) in &b.coefficients {
        if m.curve_position(id).is_none() {
            out.push(Violation::new(
                "boundary-unknown-curve",
                format!("boundary references unknown curve `{id}`"),
            ));
        }
        if coeff.is_negative() {
            out.push(Violation::new(
                "boundary-range",
                format!("boundary coefficient {coeff} on `{id}` is negative"),
            ));
        } else if mode == BoundaryMode::Boundary && *coeff > Rational::one() {
            out.push(Violation::new(
                "boundary-range",
                format!("boundary coefficient {coeff} on `{id}` exceeds 1"),
            ));
        }
    }

    ValidationReport { violations: out }
}

/// Record of one birational contraction f: source -> target.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BirationalMorphism {
    pub source: SurfaceModel,
    pub target: SurfaceModel,
    pub exceptional_curve_id: String,
    /// Basis index of the exceptional curve in the source.
    pub exceptional_index: usize,
    /// The d with K_source = f*(K_target) + d.C.
    pub discrepancy: Rational,
}

impl BirationalMorphism {
    /// Mumford pullback: strict transform plus the orthogonality coefficient
    /// on the exceptional curve, so that (f*D).C = 0 exactly.
    pub fn pullback(&self, d_target: &DivisorClass) -> Result<DivisorClass> {
        if d_target.dim() != self.target.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target.dim(),
                got: d_target.dim(),
            });
        }
        let strict = d_target.insert_zero(self.exceptional_index);
        let exc = CoeffVector::unit(self.source.dim(), self.exceptional_index);
        // Exceptional sublattice of a one-curve contraction is the 1x1
        // matrix (C^2), negative definite because C^2 < 0.
        let c2 = self
            .source
            .pairing
            .entry(self.exceptional_index, self.exceptional_index)
            .clone();
        let sub = PairingMatrix::new(vec![vec![c2]])?;
        let rhs = CoeffVector(vec![self.source.pair(&strict, &exc)?]);
        let e = sub.solve_mumford(&rhs)?;
        let mut correction = CoeffVector::zeros(self.source.dim());
        correction.0[self.exceptional_index] = e[0].clone();
        Ok(&strict + &correction)
    }

    /// Drops the exceptional coordinate; a section of pullback.
    pub fn pushforward(&self, d_source: &DivisorClass) -> Result<DivisorClass> {
        if d_source.dim() != self.source.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source.dim(),
                got: d_source.dim(),
            });
        }
        Ok(d_source.drop_coord(self.exceptional_index))
    }
}

/// Contracts one catalog curve with `C^2 < 0`.
///
/// The target keeps every other generator and the Mumford-induced pairing
/// `D1.D2 := (D1 + a1 C).(D2 + a2 C)` with `a_i = -(D_i.C)/C^2`. Flags move
/// as the contraction theorems license: smoothness survives only the
/// contraction of a genus-0 (-1)-curve, the rational-singularity flag only
/// when `(K+C).C < 0`, and the Picard rank hint drops by exactly one.
pub fn contract_curve(
    m: &SurfaceModel,
    b: &Boundary,
    curve_id: &str,
) -> Result<(SurfaceModel, Boundary, BirationalMorphism)> {
    let pos = m
        .curve_position(curve_id)
        .ok_or_else(|| Error::UnknownCurve(curve_id.to_string()))?;
    let g = pos + 1;
    let c2 = m.pairing.entry(g, g).clone();
    if !c2.is_negative() {
        return Err(Error::NotContractible {
            id: curve_id.to_string(),
            square: c2.to_string(),
        });
    }
    let k_dot_c = m.pairing.entry(0, g).clone();
    let discrepancy = &k_dot_c / &c2;
    let adjoint_degree = &k_dot_c + &c2; // (K + C).C

    let keep: Vec<usize> = (0..m.dim()).filter(|&i| i != g).collect();
    let mut rows = Vec::with_capacity(keep.len());
    for &i in &keep {
        let mut row = Vec::with_capacity(keep.len());
        for &j in &keep {
            let correction = &(m.pairing.entry(i, g) * m.pairing.entry(j, g)) / &c2;
            row.push(m.pairing.entry(i, j) - &correction);
        }
        rows.push(row);
    }
    let target_pairing = PairingMatrix::new(rows)?;

    let contracted = &m.curves[pos];
    let smooth_after = m.smooth
        && c2 == Rational::from_integer(-1)
        && k_dot_c == Rational::from_integer(-1)
        && contracted.genus_of_normalization == 0;

    let mut target_curves = m.curves.clone();
    target_curves.remove(pos);

    let target = SurfaceModel {
        name: format!("{}/{}", m.name, curve_id),
        curves: target_curves,
        pairing: target_pairing,
        euler_char_of_structure_sheaf: m.euler_char_of_structure_sheaf.clone(),
        smooth: smooth_after,
        has_rational_singularities: m.has_rational_singularities && adjoint_degree.is_negative(),
        field: m.field,
        picard_rank_hint: m.picard_rank_hint.map(|r| r.saturating_sub(1)),
    };

    let mut target_boundary = b.clone();
    target_boundary.coefficients.remove(curve_id);

    let morphism = BirationalMorphism {
        source: m.clone(),
        target: target.clone(),
        exceptional_curve_id: curve_id.to_string(),
        exceptional_index: g,
        discrepancy,
    };

    Ok((target, target_boundary, morphism))
}
