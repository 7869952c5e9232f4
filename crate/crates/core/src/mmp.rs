//! The minimal model program driver: extremal search over the catalog,
//! repeated one-curve contraction, end-state classification, and the
//! validators that re-check every theorem-level invariant post hoc.
//!
//! Everything the driver asserts is "relative to catalog": it certifies the
//! declared classes, it does not prove statements about curves the caller
//! never named.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::CoeffVector;
use crate::rational::Rational;
use crate::surface::{
    contract_curve, validate_model, BirationalMorphism, Boundary, BoundaryMode, FieldTag,
    SurfaceModel,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MmpMode {
    /// Q-factorial surface with an R-boundary (coefficients in [0,1]).
    Qf,
    /// Base field declared fbar_p; effective coefficients without upper bound.
    Fp,
    /// Log canonical pair (coefficients in [0,1]).
    Lc,
}

impl MmpMode {
    pub fn boundary_mode(self) -> BoundaryMode {
        match self {
            MmpMode::Qf | MmpMode::Lc => BoundaryMode::Boundary,
            MmpMode::Fp => BoundaryMode::Unrestricted,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MmpConfig {
    pub mode: MmpMode,
    /// Restrict contraction and classification to vertical curves.
    pub relative: bool,
    /// Defaults to the catalog size, which always suffices.
    pub max_steps: Option<usize>,
}

impl MmpConfig {
    pub fn absolute(mode: MmpMode) -> Self {
        MmpConfig {
            mode,
            relative: false,
            max_steps: None,
        }
    }

    pub fn relative(mode: MmpMode) -> Self {
        MmpConfig {
            mode,
            relative: true,
            max_steps: None,
        }
    }

    fn check_preconditions(&self, m: &SurfaceModel, b: &Boundary) -> Result<()> {
        for (id, coeff) in &b.coefficients {
            if coeff.is_negative() {
                return Err(Error::Config(format!(
                    "boundary coefficient {coeff} on `{id}` is negative"
                )));
            }
            if self.mode.boundary_mode() == BoundaryMode::Boundary && *coeff > Rational::one() {
                return Err(Error::Config(format!(
                    "boundary coefficient {coeff} on `{id}` exceeds 1; only the fp mode admits \
                     coefficients above 1"
                )));
            }
        }
        if self.mode == MmpMode::Fp && m.field != FieldTag::FbarP {
            return Err(Error::Config(
                "fp mode requires the model to declare field = \"fbar_p\"".into(),
            ));
        }
        Ok(())
    }
}

/// One contraction of the program, with the numbers the validators need.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MmpStep {
    pub index: usize,
    pub curve: String,
    pub morphism: BirationalMorphism,
    /// (K + Delta).C at the time of contraction; negative by selection.
    pub log_degree: Rational,
    /// (K + C).C at the time of contraction; governs the rational-singularity flag.
    pub adjoint_degree: Rational,
    pub self_intersection: Rational,
    pub genus: u32,
    pub discrepancy: Rational,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EndState {
    /// (K + Delta).C >= 0 for every catalog curve of the final model.
    MinimalModel,
    /// A witness with C^2 = 0 and (K + Delta).C < 0 survives: fibration over
    /// a curve.
    MoriFiberOverCurve { witness: String },
    /// A witness with C^2 > 0 and (K + Delta).C < 0 survives: the final
    /// model is Fano of Picard rank one relative to catalog.
    FanoRhoOne { witness: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ValidatorVerdict {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MmpRun {
    pub config: MmpConfig,
    pub initial_catalog_size: usize,
    pub steps: Vec<MmpStep>,
    pub end_state: EndState,
    pub validators: Vec<ValidatorVerdict>,
    pub final_model: SurfaceModel,
    pub final_boundary: Boundary,
    pub rational_singularities_in: bool,
    pub rational_singularities_out: bool,
}

impl MmpRun {
    pub fn all_validators_passed(&self) -> bool {
        self.validators.iter().all(|v| v.passed)
    }
}

/// Picks the next curve to contract: among catalog curves with
/// `(K+Delta).C < 0` and `C^2 < 0` (vertical only in relative mode), the one
/// minimizing `(K+Delta).C`, ties broken by catalog order.
pub fn find_negative_curve(
    m: &SurfaceModel,
    b: &Boundary,
    cfg: &MmpConfig,
) -> Result<Option<String>> {
    let kd = m.log_canonical_class(b)?;
    let mut best: Option<(Rational, String)> = None;
    for c in &m.curves {
        if cfg.relative && !c.vertical {
            continue;
        }
        let class = m.curve_class(&c.id)?;
        let c2 = m.pair(&class, &class)?;
        if !c2.is_negative() {
            continue;
        }
        let deg = m.pair(&kd, &class)?;
        if !deg.is_negative() {
            continue;
        }
        if best.as_ref().is_none_or(|(d, _)| deg < *d) {
            best = Some((deg, c.id.clone()));
        }
    }
    Ok(best.map(|(_, id)| id))
}

/// Picks the end-state witness among the remaining (K+Delta)-negative
/// curves. Square-zero candidates take precedence over positive-square
/// ones: when both kinds survive, the lattice cannot have rank one, so the
/// fibration reading is the only one that can validate. Within a kind, most
/// negative first, then catalog order.
fn witness_candidate(m: &SurfaceModel, b: &Boundary, cfg: &MmpConfig) -> Result<Option<String>> {
    let kd = m.log_canonical_class(b)?;
    let mut best_zero: Option<(Rational, String)> = None;
    let mut best_positive: Option<(Rational, String)> = None;
    for c in &m.curves {
        if cfg.relative && !c.vertical {
            continue;
        }
        let class = m.curve_class(&c.id)?;
        let deg = m.pair(&kd, &class)?;
        if !deg.is_negative() {
            continue;
        }
        let c2 = m.pair(&class, &class)?;
        let slot = if c2.is_zero() {
            &mut best_zero
        } else {
            &mut best_positive
        };
        if slot.as_ref().is_none_or(|(d, _)| deg < *d) {
            *slot = Some((deg, c.id.clone()));
        }
    }
    Ok(best_zero.or(best_positive).map(|(_, id)| id))
}

/// Checks the quadratic-form degeneracy on the perp of the fiber class: a
/// basis of `{D | D.C = 0}` is computed exactly and every pairwise product
/// must vanish.
fn mori_fiber_degeneracy(m: &SurfaceModel, witness: &str) -> Result<ValidatorVerdict> {
    let c = m.curve_class(witness)?;
    let dim = m.dim();
    // Functional D -> D.C in coordinates.
    let row: Vec<Rational> = (0..dim)
        .map(|i| m.pair(&CoeffVector::unit(dim, i), &c).unwrap())
        .collect();
    // Kernel basis by expressing one pivot coordinate through the others.
    let pivot = row.iter().position(|x| !x.is_zero());
    let mut basis: Vec<CoeffVector> = Vec::new();
    match pivot {
        None => {
            // C pairs to zero with everything; the whole span is the perp.
            for i in 0..dim {
                basis.push(CoeffVector::unit(dim, i));
            }
        }
        Some(p) => {
            for i in 0..dim {
                if i == p {
                    continue;
                }
                let mut v = CoeffVector::unit(dim, i);
                v.0[p] = -&(&row[i] / &row[p]);
                basis.push(v);
            }
        }
    }
    for (i, d1) in basis.iter().enumerate() {
        for d2 in &basis[i..] {
            let prod = m.pair(d1, d2)?;
            if !prod.is_zero() {
                return Ok(ValidatorVerdict {
                    name: "mori-fiber-degeneracy".into(),
                    passed: false,
                    details: format!(
                        "classes orthogonal to `{witness}` pair to {prod}, expected 0"
                    ),
                });
            }
        }
    }
    Ok(ValidatorVerdict {
        name: "mori-fiber-degeneracy".into(),
        passed: true,
        details: format!(
            "the intersection form vanishes identically on the perp of `{witness}`"
        ),
    })
}

/// Rank-one check: every generator is numerically proportional to the
/// witness, i.e. `(G.H) C^2 = (G.C)(H.C)` for all generator pairs.
fn fano_proportionality(m: &SurfaceModel, witness: &str) -> Result<ValidatorVerdict> {
    let c = m.curve_class(witness)?;
    let c2 = m.pair(&c, &c)?;
    let dim = m.dim();
    for i in 0..dim {
        for j in i..dim {
            let gi = CoeffVector::unit(dim, i);
            let gj = CoeffVector::unit(dim, j);
            let lhs = &m.pair(&gi, &gj)? * &c2;
            let rhs = &m.pair(&gi, &c)? * &m.pair(&gj, &c)?;
            if lhs != rhs {
                return Ok(ValidatorVerdict {
                    name: "fano-proportionality".into(),
                    passed: false,
                    details: format!(
                        "generator pair ({i},{j}) is not numerically proportional to `{witness}`"
                    ),
                });
            }
        }
    }
    Ok(ValidatorVerdict {
        name: "fano-proportionality".into(),
        passed: true,
        details: format!("all catalog classes are numerically proportional to `{witness}`"),
    })
}

/// Runs the program: contract the extremal choice of [`find_negative_curve`]
/// until none remains, then classify the end state and re-verify the
/// invariants from the morphism log.
pub fn run_mmp(m: &SurfaceModel, b: &Boundary, cfg: &MmpConfig) -> Result<MmpRun> {
    validate_model(m, b, cfg.mode.boundary_mode()).into_result()?;
    cfg.check_preconditions(m, b)?;

    let initial_catalog_size = m.curves.len();
    let cap = cfg.max_steps.unwrap_or(initial_catalog_size);
    let rational_in = m.has_rational_singularities;

    let mut model = m.clone();
    let mut boundary = b.clone();
    let mut steps: Vec<MmpStep> = Vec::new();

    while steps.len() < cap {
        let Some(id) = find_negative_curve(&model, &boundary, cfg)? else {
            break;
        };
        let kd = model.log_canonical_class(&boundary)?;
        let class = model.curve_class(&id)?;
        let log_degree = model.pair(&kd, &class)?;
        let c2 = model.pair(&class, &class)?;
        let k_dot = model.pair(&model.canonical_class(), &class)?;
        let adjoint_degree = &k_dot + &c2;
        let genus = model.curve(&id)?.genus_of_normalization;
        let (next_model, next_boundary, morphism) = contract_curve(&model, &boundary, &id)?;
        steps.push(MmpStep {
            index: steps.len(),
            curve: id,
            discrepancy: morphism.discrepancy.clone(),
            morphism,
            log_degree,
            adjoint_degree,
            self_intersection: c2,
            genus,
        });
        model = next_model;
        boundary = next_boundary;
    }

    if find_negative_curve(&model, &boundary, cfg)?.is_some() {
        return Err(Error::Config(format!(
            "max_steps = {cap} stopped the program while contractible curves remain"
        )));
    }

    let mut validators = Vec::new();

    let end_state = match witness_candidate(&model, &boundary, cfg)? {
        None => {
            // Nef relative to catalog: every declared curve meets K+Delta
            // non-negatively.
            validators.push(ValidatorVerdict {
                name: "minimal-model-nef".into(),
                passed: true,
                details: "(K+Delta).C >= 0 for every catalog curve of the final model".into(),
            });
            EndState::MinimalModel
        }
        Some(witness) => {
            let class = model.curve_class(&witness)?;
            let c2 = model.pair(&class, &class)?;
            match c2.sign() {
                std::cmp::Ordering::Less => unreachable!("negative curves are exhausted"),
                std::cmp::Ordering::Equal => {
                    validators.push(mori_fiber_degeneracy(&model, &witness)?);
                    EndState::MoriFiberOverCurve { witness }
                }
                std::cmp::Ordering::Greater => {
                    validators.push(fano_proportionality(&model, &witness)?);
                    EndState::FanoRhoOne { witness }
                }
            }
        }
    };

    // Post-hoc invariants from the morphism log.
    validators.push(ValidatorVerdict {
        name: "termination".into(),
        passed: steps.len() <= initial_catalog_size,
        details: format!(
            "{} steps against a catalog of {initial_catalog_size}",
            steps.len()
        ),
    });
    let rho_ok = steps
        .iter()
        .all(|s| s.morphism.source.dim() == s.morphism.target.dim() + 1);
    validators.push(ValidatorVerdict {
        name: "rho-drop".into(),
        passed: rho_ok,
        details: "each contraction removes exactly one basis generator".into(),
    });
    let negative_ok = steps.iter().all(|s| s.log_degree.is_negative());
    validators.push(ValidatorVerdict {
        name: "negative-at-step".into(),
        passed: negative_ok,
        details: "every contracted curve had (K+Delta).C < 0 at its step".into(),
    });
    if cfg.relative {
        let vertical_ok = steps.iter().all(|s| {
            s.morphism
                .source
                .curve(&s.curve)
                .map(|c| c.vertical)
                .unwrap_or(false)
        });
        validators.push(ValidatorVerdict {
            name: "relative-vertical-only".into(),
            passed: vertical_ok,
            details: "relative runs only contract vertical curves".into(),
        });
    }
    if cfg.mode.boundary_mode() == BoundaryMode::Boundary {
        validators.push(length_bound_verdict(&steps, &model, &boundary, &end_state)?);
    }
    let all_adjoint_negative = steps.iter().all(|s| s.adjoint_degree.is_negative());
    validators.push(ValidatorVerdict {
        name: "rationality-propagation".into(),
        passed: !all_adjoint_negative
            || model.has_rational_singularities == rational_in,
        details: if all_adjoint_negative {
            "every step had (K+C).C < 0, so the rational-singularity flag survives".into()
        } else {
            "some step had (K+C).C >= 0; the flag is not carried to the output".into()
        },
    });

    Ok(MmpRun {
        config: *cfg,
        initial_catalog_size,
        steps,
        end_state,
        validators,
        rational_singularities_in: rational_in,
        rational_singularities_out: model.has_rational_singularities,
        final_model: model,
        final_boundary: boundary,
    })
}

/// FP-regime driver: same engine with the eligibility rule of the fbar_p
/// theorems (coefficients above 1 allowed, no Q-factoriality tracking
/// because it is automatic there).
pub fn mmp_over_fp(m: &SurfaceModel, b: &Boundary) -> Result<MmpRun> {
    run_mmp(m, b, &MmpConfig::absolute(MmpMode::Fp))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LengthBoundEntry {
    pub curve: String,
    /// -(K+Delta).C at the step.
    pub extremal_length: Rational,
    pub genus: u32,
    pub passed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LengthBoundReport {
    pub entries: Vec<LengthBoundEntry>,
    /// No reported negative extremal value, including the end-state witness,
    /// exceeds 3.
    pub global_bound_ok: bool,
    pub passed: bool,
}

/// Re-checks the extremal length bounds on a finished boundary-mode run:
/// every contracted curve (it had C^2 < 0) must satisfy -(K+Delta).C <= 2
/// and be rational; no negative extremal value may exceed the global bound 3.
/// A violation indicts the input model, not the theorems.
pub fn validate_length_bounds(run: &MmpRun) -> Result<LengthBoundReport> {
    if run.config.mode.boundary_mode() != BoundaryMode::Boundary {
        return Err(Error::Config(
            "length bounds are stated for boundary coefficients in [0,1]".into(),
        ));
    }
    let two = Rational::from_integer(2);
    let entries: Vec<LengthBoundEntry> = run
        .steps
        .iter()
        .map(|s| {
            let extremal_length = -&s.log_degree;
            let passed = extremal_length <= two && s.genus == 0;
            LengthBoundEntry {
                curve: s.curve.clone(),
                extremal_length,
                genus: s.genus,
                passed,
            }
        })
        .collect();
    let global_bound_ok = global_witness_length(run)?
        .is_none_or(|len| len <= Rational::from_integer(3));
    let passed = entries.iter().all(|e| e.passed) && global_bound_ok;
    Ok(LengthBoundReport {
        entries,
        global_bound_ok,
        passed,
    })
}

fn global_witness_length(run: &MmpRun) -> Result<Option<Rational>> {
    let witness = match &run.end_state {
        EndState::MinimalModel => return Ok(None),
        EndState::MoriFiberOverCurve { witness } | EndState::FanoRhoOne { witness } => witness,
    };
    let kd = run.final_model.log_canonical_class(&run.final_boundary)?;
    let class = run.final_model.curve_class(witness)?;
    Ok(Some(-&run.final_model.pair(&kd, &class)?))
}

fn length_bound_verdict(
    steps: &[MmpStep],
    final_model: &SurfaceModel,
    final_boundary: &Boundary,
    end_state: &EndState,
) -> Result<ValidatorVerdict> {
    let two = Rational::from_integer(2);
    let three = Rational::from_integer(3);
    let mut failures = Vec::new();
    for s in steps {
        let len = -&s.log_degree;
        if len > two {
            failures.push(format!("`{}` has extremal length {len} > 2", s.curve));
        }
        if s.genus != 0 {
            failures.push(format!(
                "`{}` has geometric genus {} but was contracted",
                s.curve, s.genus
            ));
        }
    }
    if let EndState::MoriFiberOverCurve { witness } | EndState::FanoRhoOne { witness } = end_state
    {
        let kd = final_model.log_canonical_class(final_boundary)?;
        let class = final_model.curve_class(witness)?;
        let len = -&final_model.pair(&kd, &class)?;
        if len > three {
            failures.push(format!(
                "end-state witness `{witness}` has extremal length {len} > 3"
            ));
        }
    }
    Ok(ValidatorVerdict {
        name: "length-bounds".into(),
        passed: failures.is_empty(),
        details: if failures.is_empty() {
            "every extremal length is within the bend-and-break bounds".into()
        } else {
            failures.join("; ")
        },
    })
}

/// Checks that the composite of all recorded contractions behaves like a
/// single morphism: pushing a pulled-back target class through the whole
/// tower returns it unchanged. Used by tests and the run validators.
pub fn composite_roundtrip_ok(run: &MmpRun) -> Result<bool> {
    for probe in 0..run.final_model.dim() {
        let target_class = CoeffVector::unit(run.final_model.dim(), probe);
        // Pull back through the tower, last morphism first.
        let mut class = target_class.clone();
        for step in run.steps.iter().rev() {
            class = step.morphism.pullback(&class)?;
        }
        let mut back = class;
        for step in run.steps.iter() {
            back = step.morphism.pushforward(&back)?;
        }
        if back != target_class {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::PairingMatrix;
    use crate::rational::rat;
    use crate::surface::CurveRecord;

    fn p2() -> SurfaceModel {
        SurfaceModel::new(
            "p2",
            vec![CurveRecord::new("H", 0)],
            PairingMatrix::from_integers(&[&[9, -3], &[-3, 1]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap()
    }

    fn blowup_p2() -> SurfaceModel {
        SurfaceModel::new(
            "blowup-p2",
            vec![CurveRecord::new("H", 0), CurveRecord::new("E", 0)],
            PairingMatrix::from_integers(&[&[8, -3, -1], &[-3, 1, 0], &[-1, 0, -1]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap()
    }

    fn p1_x_p1() -> SurfaceModel {
        SurfaceModel::new(
            "p1xp1",
            vec![CurveRecord::new("F1", 0), CurveRecord::new("F2", 0)],
            PairingMatrix::from_integers(&[&[8, -2, -2], &[-2, 0, 1], &[-2, 1, 0]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn find_negative_curve_on_blowup_returns_exceptional() {
        let cfg = MmpConfig::absolute(MmpMode::Qf);
        let found = find_negative_curve(&blowup_p2(), &Boundary::empty(), &cfg).unwrap();
        assert_eq!(found.as_deref(), Some("E"));
    }

    #[test]
    fn find_negative_curve_none_on_p2() {
        let cfg = MmpConfig::absolute(MmpMode::Qf);
        let found = find_negative_curve(&p2(), &Boundary::empty(), &cfg).unwrap();
        assert_eq!(found, None);
    }

    #[test]
    fn tie_break_prefers_most_negative() {
        // Two (-1)-curves, one met by the boundary so its degree is -3/2.
        let m = SurfaceModel::new(
            "two-exc",
            vec![
                CurveRecord::new("E1", 0),
                CurveRecord::new("E2", 0),
                CurveRecord::new("B", 0),
            ],
            PairingMatrix::from_integers(&[
                &[7, -1, -1, -3],
                &[-1, -1, 0, 0],
                &[-1, 0, -1, 1],
                &[-3, 0, 1, 1],
            ])
            .unwrap(),
            Rational::one(),
            true,
        )
        .unwrap();
        let b = Boundary::from_pairs(&[("B", rat(1, 2))]);
        let cfg = MmpConfig::absolute(MmpMode::Qf);
        // (K+B/2).E1 = -1, (K+B/2).E2 = -1 + 1/2 = -1/2: E1 wins.
        let found = find_negative_curve(&m, &b, &cfg).unwrap();
        assert_eq!(found.as_deref(), Some("E1"));
    }

    #[test]
    fn mmp_on_blowup_contracts_once_to_fano() {
        let run = run_mmp(
            &blowup_p2(),
            &Boundary::empty(),
            &MmpConfig::absolute(MmpMode::Qf),
        )
        .unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].curve, "E");
        assert_eq!(run.steps[0].discrepancy, rat(1, 1));
        assert_eq!(
            run.end_state,
            EndState::FanoRhoOne {
                witness: "H".into()
            }
        );
        assert_eq!(run.final_model.k_self_intersection(), rat(9, 1));
        assert!(run.all_validators_passed());
    }

    #[test]
    fn mmp_on_quadric_is_mori_fiber_in_zero_steps() {
        let run = run_mmp(
            &p1_x_p1(),
            &Boundary::empty(),
            &MmpConfig::absolute(MmpMode::Qf),
        )
        .unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(
            run.end_state,
            EndState::MoriFiberOverCurve {
                witness: "F1".into()
            }
        );
        assert!(run.all_validators_passed());
    }

    #[test]
    fn numerically_trivial_k_gives_minimal_model() {
        let m = SurfaceModel::new(
            "abelian-like",
            vec![CurveRecord::new("C", 1)],
            PairingMatrix::from_integers(&[&[0, 0], &[0, 0]]).unwrap(),
            Rational::zero(),
            true,
        )
        .unwrap();
        let run = run_mmp(&m, &Boundary::empty(), &MmpConfig::absolute(MmpMode::Qf)).unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(run.end_state, EndState::MinimalModel);
    }

    #[test]
    fn fp_mode_requires_field_tag() {
        let err = run_mmp(
            &blowup_p2(),
            &Boundary::empty(),
            &MmpConfig::absolute(MmpMode::Fp),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn coefficient_above_one_rejected_outside_fp() {
        let b = Boundary::from_pairs(&[("E", rat(2, 1))]);
        let err = run_mmp(&blowup_p2(), &b, &MmpConfig::absolute(MmpMode::Qf)).unwrap_err();
        assert!(matches!(err, Error::Validation(_)) || matches!(err, Error::Config(_)));
    }

    #[test]
    fn fp_mode_accepts_large_coefficients() {
        let m = blowup_p2().with_field(FieldTag::FbarP);
        let b = Boundary::from_pairs(&[("E", rat(2, 1))]);
        let run = run_mmp(&m, &b, &MmpConfig::absolute(MmpMode::Fp)).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].curve, "E");
        assert_eq!(run.steps[0].log_degree, rat(-3, 1));
    }

    #[test]
    fn length_bounds_hold_on_boundary_runs() {
        let run = run_mmp(
            &blowup_p2(),
            &Boundary::empty(),
            &MmpConfig::absolute(MmpMode::Qf),
        )
        .unwrap();
        let report = validate_length_bounds(&run).unwrap();
        assert!(report.passed);
        assert_eq!(report.entries[0].extremal_length, rat(1, 1));
    }

    #[test]
    fn length_bounds_refuse_fp_runs() {
        let m = blowup_p2().with_field(FieldTag::FbarP);
        let b = Boundary::from_pairs(&[("E", rat(2, 1))]);
        let run = run_mmp(&m, &b, &MmpConfig::absolute(MmpMode::Fp)).unwrap();
        assert!(matches!(
            validate_length_bounds(&run),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn adjunction_violations_stop_the_run_before_any_contraction() {
        let m = SurfaceModel::new(
            "bad",
            vec![CurveRecord {
                id: "C".into(),
                genus_of_normalization: 1,
                vertical: false,
                is_boundary_component: false,
            }],
            PairingMatrix::from_integers(&[&[8, -1], &[-1, -1]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap();
        let err = run_mmp(&m, &Boundary::empty(), &MmpConfig::absolute(MmpMode::Qf)).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("adjunction"));
    }

    #[test]
    fn extremal_length_exactly_two_is_admitted() {
        // Coefficient 1 on a (-2)-curve with K.E = 0: (K+Delta).E = -2,
        // the boundary of the length bound.
        let m = SurfaceModel::new(
            "edge",
            vec![CurveRecord::new("E", 0)],
            PairingMatrix::from_integers(&[&[8, 0], &[0, -2]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap();
        let b = Boundary::from_pairs(&[("E", rat(1, 1))]);
        let run = run_mmp(&m, &b, &MmpConfig::absolute(MmpMode::Qf)).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.steps[0].log_degree, rat(-2, 1));
        let report = validate_length_bounds(&run).unwrap();
        assert!(report.passed);
        assert_eq!(report.entries[0].extremal_length, rat(2, 1));
    }

    #[test]
    fn fp_run_without_negative_curves_is_minimal() {
        let m = SurfaceModel::new(
            "flat",
            vec![CurveRecord::new("C", 1)],
            PairingMatrix::from_integers(&[&[0, 0], &[0, 0]]).unwrap(),
            Rational::zero(),
            true,
        )
        .unwrap()
        .with_field(FieldTag::FbarP);
        let run = mmp_over_fp(&m, &Boundary::empty()).unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(run.end_state, EndState::MinimalModel);
    }

    #[test]
    fn composite_roundtrip_is_identity() {
        let run = run_mmp(
            &blowup_p2(),
            &Boundary::empty(),
            &MmpConfig::absolute(MmpMode::Qf),
        )
        .unwrap();
        assert!(composite_roundtrip_ok(&run).unwrap());
    }

    #[test]
    fn relative_mode_ignores_horizontal_curves() {
        // Hirzebruch-like model: section C0 (horizontal, C0^2 = -1) and a
        // fiber F (vertical, F^2 = 0).
        let m = SurfaceModel::new(
            "hirzebruch-1",
            vec![
                CurveRecord::new("C0", 0),
                CurveRecord::new("F", 0).vertical(),
            ],
            PairingMatrix::from_integers(&[&[8, -1, -2], &[-1, -1, 1], &[-2, 1, 0]]).unwrap(),
            Rational::one(),
            true,
        )
        .unwrap();
        let run = run_mmp(
            &m,
            &Boundary::empty(),
            &MmpConfig::relative(MmpMode::Qf),
        )
        .unwrap();
        // C0 is horizontal, so nothing is contracted; F witnesses the fiber
        // space structure.
        assert!(run.steps.is_empty());
        assert_eq!(
            run.end_state,
            EndState::MoriFiberOverCurve {
                witness: "F".into()
            }
        );
        assert!(run.all_validators_passed());
    }
}
