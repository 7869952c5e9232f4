//! The boundary cube, nef-boundary regions as exact rational polytopes,
//! vertex enumeration, and convex decomposition of boundaries.
//!
//! Coordinates are the coefficients on the cube components, in declaration
//! order. Vertices are enumerated by exhaustive basis subsets: for desk-scale
//! cubes (a handful of components) exactness beats double-description
//! performance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{solve_linear, CoeffVector};
use crate::rational::Rational;
use crate::surface::{Boundary, SurfaceModel};

/// The cube of boundaries `0 <= B <= sum of upper_bound_i B_i`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoundaryCube {
    pub component_ids: Vec<String>,
    /// Rounded-up coefficient bound per component; at least 1.
    pub upper_bounds: BTreeMap<String, u64>,
}

impl BoundaryCube {
    pub fn new(components: &[(&str, u64)]) -> Result<Self> {
        let mut upper_bounds = BTreeMap::new();
        let mut component_ids = Vec::new();
        for &(id, bound) in components {
            if bound == 0 {
                return Err(Error::Config(format!(
                    "cube bound on `{id}` must be a positive integer"
                )));
            }
            if upper_bounds.insert(id.to_string(), bound).is_some() {
                return Err(Error::Config(format!("duplicate cube component `{id}`")));
            }
            component_ids.push(id.to_string());
        }
        Ok(BoundaryCube {
            component_ids,
            upper_bounds,
        })
    }

    /// Cube spanned by the prime components of a boundary divisor, with
    /// bounds the rounded-up coefficients.
    pub fn from_boundary(b: &Boundary) -> Result<Self> {
        let mut components = Vec::new();
        for (id, coeff) in &b.coefficients {
            if coeff.is_zero() {
                continue;
            }
            let ceil = coeff.ceil();
            let bound: u64 = ceil
                .try_into()
                .map_err(|_| Error::Config(format!("cube bound on `{id}` out of range")))?;
            components.push((id.as_str(), bound.max(1)));
        }
        BoundaryCube::new(&components)
    }

    pub fn dim(&self) -> usize {
        self.component_ids.len()
    }

    pub fn bound(&self, id: &str) -> u64 {
        self.upper_bounds[id]
    }
}

/// Oriented halfspace `normal . x >= offset` in cube coordinates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: CoeffVector,
    pub offset: Rational,
    pub label: String,
}

impl Halfspace {
    pub fn contains(&self, x: &CoeffVector) -> bool {
        self.evaluate(x) >= self.offset
    }

    pub fn active_at(&self, x: &CoeffVector) -> bool {
        self.evaluate(x) == self.offset
    }

    fn evaluate(&self, x: &CoeffVector) -> Rational {
        self.normal
            .iter()
            .zip(x.iter())
            .map(|(n, xi)| n * xi)
            .sum()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RationalPolytope {
    pub component_ids: Vec<String>,
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Vec<CoeffVector>,
}

impl RationalPolytope {
    pub fn dim(&self) -> usize {
        self.component_ids.len()
    }

    pub fn contains(&self, x: &CoeffVector) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// First halfspace excluding `x`, if any.
    pub fn violated_halfspace(&self, x: &CoeffVector) -> Option<(usize, &Halfspace)> {
        self.halfspaces
            .iter()
            .enumerate()
            .find(|(_, h)| !h.contains(x))
    }

    fn point_of(&self, b: &Boundary) -> Result<CoeffVector> {
        for id in b.coefficients.keys() {
            if !self.component_ids.contains(id) {
                return Err(Error::UnknownCurve(format!(
                    "`{id}` is not a cube component of this polytope"
                )));
            }
        }
        Ok(CoeffVector(
            self.component_ids
                .iter()
                .map(|id| b.coefficient(id))
                .collect(),
        ))
    }
}

/// The length constant `max({3} u {-(K + bound_mu B_mu).B_mu : B_mu^2 < 0})`.
pub fn length_constant(m: &SurfaceModel, cube: &BoundaryCube) -> Result<Rational> {
    let mut best = Rational::from_integer(3);
    let k = m.canonical_class();
    for id in &cube.component_ids {
        let class = m.curve_class(id)?;
        let c2 = m.pair(&class, &class)?;
        if !c2.is_negative() {
            continue;
        }
        let bound = Rational::from_integer(cube.bound(id) as i64);
        let value = -&(&m.pair(&k, &class)? + &(&bound * &c2));
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// The nef-boundary region: cube bounds plus `(K + B).C_t >= 0` for every
/// curve in `curve_set`, with the vertex list enumerated exactly.
pub fn nef_polytope(
    m: &SurfaceModel,
    cube: &BoundaryCube,
    curve_set: &[String],
) -> Result<RationalPolytope> {
    if curve_set.is_empty() {
        return Err(Error::Config("curve set must be nonempty".into()));
    }
    let dim = cube.dim();
    let mut halfspaces = Vec::new();
    for (i, id) in cube.component_ids.iter().enumerate() {
        // b_i >= 0
        halfspaces.push(Halfspace {
            normal: CoeffVector::unit(dim, i),
            offset: Rational::zero(),
            label: format!("{id} >= 0"),
        });
        // b_i <= bound, as -b_i >= -bound
        let mut neg = CoeffVector::zeros(dim);
        neg.0[i] = Rational::from_integer(-1);
        halfspaces.push(Halfspace {
            normal: neg,
            offset: Rational::from_integer(-(cube.bound(id) as i64)),
            label: format!("{id} <= {}", cube.bound(id)),
        });
    }
    let k = m.canonical_class();
    for t in curve_set {
        let class = m.curve_class(t)?;
        let normal = CoeffVector(
            cube.component_ids
                .iter()
                .map(|id| m.pair(&m.curve_class(id)?, &class))
                .collect::<Result<_>>()?,
        );
        let offset = -&m.pair(&k, &class)?;
        halfspaces.push(Halfspace {
            normal,
            offset,
            label: format!("(K+B).{t} >= 0"),
        });
    }
    let vertices = enumerate_vertices(dim, &halfspaces);
    Ok(RationalPolytope {
        component_ids: cube.component_ids.clone(),
        halfspaces,
        vertices,
    })
}

/// All feasible basic solutions: every `dim`-subset of constraints solved as
/// equalities, kept when the system is uniquely solvable and the point
/// satisfies every halfspace. Exact dedupe, deterministic order.
fn enumerate_vertices(dim: usize, halfspaces: &[Halfspace]) -> Vec<CoeffVector> {
    let mut vertices: Vec<CoeffVector> = Vec::new();
    if dim == 0 {
        let origin = CoeffVector::zeros(0);
        if halfspaces.iter().all(|h| h.contains(&origin)) {
            vertices.push(origin);
        }
        return vertices;
    }
    let n = halfspaces.len();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let rows: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&i| halfspaces[i].normal.0.clone())
            .collect();
        let rhs = CoeffVector(subset.iter().map(|&i| halfspaces[i].offset.clone()).collect());
        if let Some(x) = solve_linear(&rows, &rhs) {
            if halfspaces.iter().all(|h| h.contains(&x)) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
        // Next dim-subset in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                return vertices;
            }
            i -= 1;
            if subset[i] < n - (dim - i) {
                subset[i] += 1;
                for j in (i + 1)..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// One term of a convex decomposition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub weight: Rational,
    pub vertex_index: usize,
}

/// Writes a boundary inside the polytope as an exact convex combination of
/// at most dim+1 vertices: positive weights summing to 1 with
/// `sum w_i v_i = Delta`.
///
/// The containing simplex is found by walking: shoot a ray from a vertex
/// through the point until it exits on a proper face, then recurse on that
/// face. Each step pins one more constraint, so the walk terminates.
pub fn decompose_boundary(b: &Boundary, p: &RationalPolytope) -> Result<Vec<DecompositionTerm>> {
    let x = p.point_of(b)?;
    if let Some((index, h)) = p.violated_halfspace(&x) {
        return Err(Error::OutsidePolytope {
            index,
            description: h.label.clone(),
        });
    }
    if p.vertices.is_empty() {
        return Err(Error::Config(
            "polytope has no vertices; nothing to decompose against".into(),
        ));
    }
    let candidates: Vec<usize> = (0..p.vertices.len()).collect();
    let mut terms = decompose_rec(p, &x, &candidates)?;
    terms.retain(|t| !t.weight.is_zero());
    terms.sort_by_key(|t| t.vertex_index);
    // Merge duplicate vertex references picked up across recursion levels.
    let mut merged: Vec<DecompositionTerm> = Vec::new();
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.vertex_index == t.vertex_index => last.weight += t.weight,
            _ => merged.push(t),
        }
    }
    Ok(merged)
}

fn decompose_rec(
    p: &RationalPolytope,
    x: &CoeffVector,
    candidates: &[usize],
) -> Result<Vec<DecompositionTerm>> {
    // A vertex equal to the point ends the recursion.
    if let Some(&vi) = candidates.iter().find(|&&vi| &p.vertices[vi] == x) {
        return Ok(vec![DecompositionTerm {
            weight: Rational::one(),
            vertex_index: vi,
        }]);
    }
    let &v0 = candidates.first().ok_or_else(|| {
        Error::Config("no candidate vertices on the current face".into())
    })?;
    let base = &p.vertices[v0];
    let dir = x - base;
    // Exit parameter along base + s * dir over the halfspaces that cap it.
    let mut exit: Option<Rational> = None;
    for h in &p.halfspaces {
        let slope: Rational = h.normal.iter().zip(dir.iter()).map(|(n, d)| n * d).sum();
        if !slope.is_negative() {
            continue;
        }
        let value: Rational = h
            .normal
            .iter()
            .zip(base.iter())
            .map(|(n, b)| n * b)
            .sum();
        let s = &(&h.offset - &value) / &slope;
        exit = Some(match exit {
            None => s,
            Some(e) if s < e => s,
            Some(e) => e,
        });
    }
    let s = exit.ok_or_else(|| {
        Error::Config("polytope is unbounded along the walking ray".into())
    })?;
    debug_assert!(s >= Rational::one(), "x inside implies exit beyond x");
    let y = base + &dir.scale(&s);
    // The exit point lies on at least one newly active constraint; restrict
    // the candidates to the vertices of that face.
    let face: Vec<usize> = p
        .halfspaces
        .iter()
        .enumerate()
        .filter(|(_, h)| h.active_at(&y) && !h.active_at(base))
        .map(|(i, _)| i)
        .collect();
    let sub: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&vi| face.iter().all(|&hi| p.halfspaces[hi].active_at(&p.vertices[vi])))
        .collect();
    let inner = decompose_rec(p, &y, &sub)?;
    // x = (1 - 1/s) v0 + (1/s) y.
    let t = s.recip();
    let mut terms = vec![DecompositionTerm {
        weight: &Rational::one() - &t,
        vertex_index: v0,
    }];
    for term in inner {
        terms.push(DecompositionTerm {
            weight: &term.weight * &t,
            vertex_index: term.vertex_index,
        });
    }
    Ok(terms)
}
