//! Divisor-level certificates: Euler characteristics, nef/big tests, the
//! degree-zero locus reduction, adjunction and canonical-type detectors, and
//! the basepoint-freeness hypothesis checker.
//!
//! Every certificate is relative to the declared catalog and embeds the
//! inequalities that were actually checked, plus the assumptions taken on
//! trust, so a reader can replay it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::surface::{Boundary, DivisorClass, SurfaceModel};

/// Riemann-Roch Euler characteristic on a smooth model:
/// `chi(O) + D.(D - K)/2`, exact.
pub fn euler_char(m: &SurfaceModel, d: &DivisorClass) -> Result<Rational> {
    if !m.smooth {
        return Err(Error::Unsupported(
            "euler characteristic uses Riemann-Roch on a smooth model".into(),
        ));
    }
    let k = m.canonical_class();
    let quad = m.pair(d, &(d - &k))?;
    Ok(&m.euler_char_of_structure_sheaf + &(&quad * &Rational::from_ratio(1, 2)))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KeelReport {
    /// Catalog curves on which the nef class has degree zero.
    pub locus: Vec<String>,
    pub self_intersection: Rational,
    /// Human-readable reduction notes, one per finding.
    pub notes: Vec<String>,
}

/// The degree-zero locus of a nef class: the curves the semi-ampleness
/// question reduces to. Errors when the class is not nef on the catalog.
pub fn keel_locus(m: &SurfaceModel, l: &DivisorClass) -> Result<KeelReport> {
    let mut locus = Vec::new();
    let mut notes = Vec::new();
    for c in &m.curves {
        let deg = m.pair(l, &m.curve_class(&c.id)?)?;
        if deg.is_negative() {
            return Err(Error::Unsupported(format!(
                "class is not nef on catalog: degree {deg} on `{}`",
                c.id
            )));
        }
        if deg.is_zero() {
            if c.genus_of_normalization == 0 {
                notes.push(format!(
                    "`{}` is rational; the restriction of a degree-zero class to it is \
                     automatically semi-ample",
                    c.id
                ));
            }
            locus.push(c.id.clone());
        }
    }
    let self_intersection = m.pair(l, l)?;
    if locus.is_empty() && self_intersection.is_positive() {
        notes.push("degree-zero locus empty and L^2 > 0: semi-ample (ample case) relative to catalog".into());
    }
    Ok(KeelReport {
        locus,
        self_intersection,
        notes,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum AdjunctionVerdict {
    /// (K+C).C < 0 and genus 0: consistent, the curve is forced rational.
    ConsistentRational,
    /// (K+C).C < 0 with declared positive genus: the model contradicts the
    /// adjunction theorem.
    Inconsistent { detail: String },
    /// (K+C).C = 0: rational curve or torsion adjoint bundle.
    BoundaryCase,
    /// (K+C).C > 0: adjunction imposes no constraint here.
    NoConstraint,
}

/// Checks a catalog curve against the adjunction theorem: negative adjoint
/// degree forces the curve to be rational.
pub fn adjunction_check(m: &SurfaceModel, curve_id: &str) -> Result<AdjunctionVerdict> {
    let record = m.curve(curve_id)?;
    let c = m.curve_class(curve_id)?;
    let k = m.canonical_class();
    let degree = m.pair(&(&k + &c), &c)?;
    Ok(match degree.sign() {
        std::cmp::Ordering::Less => {
            if record.genus_of_normalization > 0 {
                AdjunctionVerdict::Inconsistent {
                    detail: format!(
                        "(K+C).C = {degree} < 0 forces a rational curve, but `{curve_id}` \
                         declares genus {}",
                        record.genus_of_normalization
                    ),
                }
            } else {
                AdjunctionVerdict::ConsistentRational
            }
        }
        std::cmp::Ordering::Equal => AdjunctionVerdict::BoundaryCase,
        std::cmp::Ordering::Greater => AdjunctionVerdict::NoConstraint,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CanonicalTypeVerdict {
    pub is_canonical_type: bool,
    pub failures: Vec<String>,
}

/// Tests whether `Y = sum n_i E_i` is an indecomposable curve of canonical
/// type: `K.E_i = Y.E_i = 0` for all i, connected support, gcd of the
/// multiplicities one.
pub fn detect_canonical_type(
    m: &SurfaceModel,
    components: &BTreeMap<String, u64>,
) -> Result<CanonicalTypeVerdict> {
    if components.is_empty() {
        return Err(Error::Config("component list must be nonempty".into()));
    }
    let mut failures = Vec::new();
    let k = m.canonical_class();
    let mut y = crate::lattice::CoeffVector::zeros(m.dim());
    for (id, &n) in components {
        if n == 0 {
            return Err(Error::Config(format!("multiplicity of `{id}` must be positive")));
        }
        let g = m.generator_index(id)?;
        y.0[g] = Rational::from_integer(n as i64);
    }
    for id in components.keys() {
        let class = m.curve_class(id)?;
        let kd = m.pair(&k, &class)?;
        if !kd.is_zero() {
            failures.push(format!("K.{id} = {kd}, expected 0"));
        }
        let yd = m.pair(&y, &class)?;
        if !yd.is_zero() {
            failures.push(format!("Y.{id} = {yd}, expected 0"));
        }
    }
    // gcd of multiplicities.
    let gcd = components.values().fold(0u64, |acc, &n| num::integer::gcd(acc, n));
    if gcd != 1 {
        failures.push(format!("gcd of multiplicities is {gcd}, expected 1"));
    }
    // Connectivity on the intersection graph: positive pairing = edge.
    let ids: Vec<&String> = components.keys().collect();
    if ids.len() > 1 {
        let mut seen = vec![false; ids.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..ids.len() {
                if seen[j] {
                    continue;
                }
                let prod = m.pair(&m.curve_class(ids[i])?, &m.curve_class(ids[j])?)?;
                if prod.is_positive() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            failures.push("support is disconnected".into());
        }
    }
    Ok(CanonicalTypeVerdict {
        is_canonical_type: failures.is_empty(),
        failures,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DivisorReport {
    pub nef_on_catalog: bool,
    /// First curve with negative degree when not nef.
    pub nef_failure: Option<String>,
    pub self_intersection: Rational,
    /// Present iff nef with positive self-intersection.
    pub big_certificate: Option<String>,
    pub keel_locus: Vec<String>,
    pub euler_char: Option<Rational>,
}

/// Catalog-level summary of a divisor class.
pub fn divisor_report(m: &SurfaceModel, d: &DivisorClass) -> Result<DivisorReport> {
    let mut nef = true;
    let mut nef_failure = None;
    let mut locus = Vec::new();
    for c in &m.curves {
        let deg = m.pair(d, &m.curve_class(&c.id)?)?;
        if deg.is_negative() && nef {
            nef = false;
            nef_failure = Some(c.id.clone());
        }
        if deg.is_zero() {
            locus.push(c.id.clone());
        }
    }
    let self_intersection = m.pair(d, d)?;
    let big_certificate = (nef && self_intersection.is_positive()).then(|| {
        format!(
            "nef on catalog with D^2 = {self_intersection} > 0: nef and big relative to catalog"
        )
    });
    let euler_char = if m.smooth {
        Some(euler_char(m, d)?)
    } else {
        None
    };
    Ok(DivisorReport {
        nef_on_catalog: nef,
        nef_failure,
        self_intersection,
        big_certificate,
        keel_locus: locus,
        euler_char,
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BpfCertificate {
    pub issued: bool,
    pub conclusion: String,
    /// The inequalities that were actually checked, for replay.
    pub checked: Vec<String>,
    /// Assumptions the certificate takes on trust.
    pub trusted: Vec<String>,
    /// What blocked issuance, when not issued.
    pub failures: Vec<String>,
}

/// Hypotheses the caller supplies for the basepoint-freeness check.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct BpfHypotheses {
    /// The divisor is declared Cartier (not numerically checkable on a
    /// singular model).
    pub cartier_declared: bool,
    /// `D - (K + Delta)` is declared semi-ample, replacing the nef-and-big
    /// route.
    pub semi_ample_declared: bool,
}

/// Basepoint-freeness certificate: requires strict boundary coefficients
/// (below 1), a nef Cartier class, and `D - (K+Delta)` nef and big on the
/// catalog (or the declared semi-ample route). No certificate issues when a
/// numeric hypothesis fails.
pub fn bpf_certificate(
    m: &SurfaceModel,
    b: &Boundary,
    d: &DivisorClass,
    hypotheses: BpfHypotheses,
) -> Result<BpfCertificate> {
    let mut checked = Vec::new();
    let mut failures = Vec::new();

    for (id, coeff) in &b.coefficients {
        if coeff.is_negative() || *coeff >= Rational::one() {
            failures.push(format!(
                "strict boundary required: coefficient {coeff} on `{id}` is outside [0,1)"
            ));
        }
    }
    checked.push("boundary coefficients lie in [0,1)".into());

    if !d.iter().all(Rational::is_integer) {
        failures.push("divisor is not integral on the catalog basis".into());
    }

    for c in &m.curves {
        let deg = m.pair(d, &m.curve_class(&c.id)?)?;
        if deg.is_negative() {
            failures.push(format!("D not nef: D.{} = {deg} < 0", c.id));
        }
    }
    checked.push("D.C >= 0 for every catalog curve".into());

    let kd = m.log_canonical_class(b)?;
    let gap = d - &kd;
    let mut gap_nef = true;
    for c in &m.curves {
        let deg = m.pair(&gap, &m.curve_class(&c.id)?)?;
        if deg.is_negative() {
            gap_nef = false;
            if !hypotheses.semi_ample_declared {
                failures.push(format!(
                    "D - (K+Delta) not nef: degree {deg} on `{}`",
                    c.id
                ));
            }
        }
    }
    let gap_sq = m.pair(&gap, &gap)?;
    let route = if hypotheses.semi_ample_declared {
        checked.push("semi-ampleness of D - (K+Delta) supplied by declaration".into());
        "declared semi-ample difference"
    } else {
        checked.push("(D - (K+Delta)).C >= 0 for every catalog curve".into());
        checked.push(format!("(D - (K+Delta))^2 = {gap_sq} > 0"));
        if gap_nef && !gap_sq.is_positive() {
            failures.push(format!(
                "D - (K+Delta) is nef but not big: square {gap_sq} <= 0"
            ));
        }
        "nef and big difference"
    };

    let mut trusted = vec![
        "catalog completeness: nefness is certified only against declared curves".to_string(),
    ];
    if hypotheses.cartier_declared {
        trusted.push("D declared Cartier by the caller".into());
    } else {
        trusted.push(
            "Cartier-ness of D not declared; integrality on the catalog basis was checked, \
             which is weaker"
                .into(),
        );
    }
    if hypotheses.semi_ample_declared {
        trusted.push("semi-ampleness of D - (K+Delta) declared by the caller".into());
    }

    let issued = failures.is_empty();
    let conclusion = if issued {
        format!("D is semi-ample relative to catalog (route: {route})")
    } else {
        "no certificate: a stated hypothesis fails numerically".to_string()
    };
    Ok(BpfCertificate {
        issued,
        conclusion,
        checked,
        trusted,
        failures,
    })
}
