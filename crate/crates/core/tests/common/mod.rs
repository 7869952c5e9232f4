//! Oracles and generators shared by the integration tests.
//!
//! The oracles here are written independently of the engine's code paths:
//! plain rational Gaussian elimination with partial pivoting instead of
//! fraction-free elimination, and cofactor determinants instead of Bareiss
//! pivots. They exist so the main algorithms are checked against a second
//! route, not against themselves.

#![allow(dead_code)]

use nefkit::rational::Rational;
use nefkit::singularities::{GraphEdge, GraphVertex, ResolutionGraph};
use nefkit::surface::{Boundary, CurveRecord, SurfaceModel};
use nefkit::{CoeffVector, PairingMatrix};
use rand::Rng;

/// Independent rational Gaussian elimination with partial (first nonzero)
/// pivoting. Returns `None` for singular systems.
pub fn oracle_gauss_solve(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut b: Vec<Rational> = rhs.to_vec();
    for k in 0..n {
        let pivot_row = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, pivot_row);
        b.swap(k, pivot_row);
        let pivot = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot;
            for j in k..n {
                let delta = &factor * &a[k][j];
                a[i][j] -= delta;
            }
            let delta = &factor * &b[k];
            b[i] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in (k + 1)..n {
            acc -= &a[k][j] * &x[j];
        }
        if a[k][k].is_zero() {
            return None;
        }
        x[k] = &acc / &a[k][k];
    }
    Some(x)
}

/// Determinant by recursive cofactor expansion along the first row.
pub fn oracle_det_cofactor(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut det = Rational::zero();
    for j in 0..n {
        if rows[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &rows[0][j] * &oracle_det_cofactor(&minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Sylvester test via cofactor determinants of the leading blocks.
pub fn oracle_negative_definite(rows: &[Vec<Rational>]) -> bool {
    let n = rows.len();
    for k in 1..=n {
        let block: Vec<Vec<Rational>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
        let det = oracle_det_cofactor(&block);
        let expected_negative = k % 2 == 1;
        let ok = if expected_negative {
            det.is_negative()
        } else {
            det.is_positive()
        };
        if !ok {
            return false;
        }
    }
    true
}

pub fn matrix_from_i64(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect()
}

/// Random connected negative-definite dual graph: a random tree with small
/// edge multiplicities and strictly diagonally dominant self-intersections,
/// which forces negative definiteness.
pub fn random_definite_graph<R: Rng>(rng: &mut R, dim: usize) -> ResolutionGraph {
    let mut edges: Vec<GraphEdge> = Vec::new();
    let mut degree_weight = vec![0i64; dim];
    for i in 1..dim {
        let parent = rng.gen_range(0..i);
        let multiplicity = if rng.gen_bool(0.2) { 2 } else { 1 };
        edges.push(GraphEdge {
            a: format!("E{}", parent + 1),
            b: format!("E{}", i + 1),
            multiplicity,
        });
        degree_weight[parent] += multiplicity as i64;
        degree_weight[i] += multiplicity as i64;
    }
    let vertices: Vec<GraphVertex> = (0..dim)
        .map(|i| GraphVertex {
            id: format!("E{}", i + 1),
            self_intersection: -(degree_weight[i] + 1 + rng.gen_range(0..3)),
            arithmetic_genus: 0,
        })
        .collect();
    ResolutionGraph::new("random", vertices, edges, Vec::new()).expect("structurally valid")
}

/// Random iterated blow-up of the plane: each step adds a genus-0
/// exceptional curve, either at a general point or on an existing catalog
/// curve (whose self-intersection drops by one and which meets the new
/// curve once). Always a valid smooth model.
pub fn random_blowup_tower<R: Rng>(rng: &mut R, blowups: usize) -> SurfaceModel {
    // Start from the plane: basis (K, H).
    let mut ids = vec!["H".to_string()];
    let mut genus = vec![0u32];
    let mut rows: Vec<Vec<i64>> = vec![vec![9, -3], vec![-3, 1]];
    for step in 0..blowups {
        let id = format!("X{}", step + 1);
        let dim = rows.len();
        // New exceptional curve: E^2 = -1, K.E = -1, disjoint from others.
        for row in rows.iter_mut() {
            row.push(0);
        }
        let mut new_row = vec![0i64; dim + 1];
        new_row[0] = -1;
        new_row[dim] = -1;
        rows.push(new_row);
        rows[0][dim] = -1;
        // K^2 drops by one.
        rows[0][0] -= 1;
        // Optionally blow up a point sitting on one existing curve.
        if !ids.is_empty() && rng.gen_bool(0.5) {
            let host = rng.gen_range(0..ids.len()) + 1;
            rows[host][host] -= 1;
            rows[0][host] += 1;
            rows[host][0] += 1;
            rows[host][dim] = 1;
            rows[dim][host] = 1;
        }
        ids.push(id);
        genus.push(0);
    }
    let curves: Vec<CurveRecord> = ids
        .iter()
        .zip(&genus)
        .map(|(id, &g)| CurveRecord::new(id, g))
        .collect();
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    SurfaceModel::new(
        "random-tower",
        curves,
        PairingMatrix::from_integers(&refs).expect("symmetric by construction"),
        Rational::one(),
        true,
    )
    .expect("valid by construction")
    .with_rational_singularities(true)
}

/// Random boundary with coefficients in [0,1] (denominator up to 6) on a
/// random subset of catalog curves.
pub fn random_boundary<R: Rng>(rng: &mut R, model: &SurfaceModel) -> Boundary {
    let mut b = Boundary::empty();
    for c in &model.curves {
        if rng.gen_bool(0.3) {
            let q = rng.gen_range(1..=6i64);
            let p = rng.gen_range(0..=q);
            b.coefficients
                .insert(c.id.clone(), Rational::from_ratio(p, q));
        }
    }
    b
}

/// Random rational in [0, max] with denominator up to 8.
pub fn random_rational<R: Rng>(rng: &mut R, max: i64) -> Rational {
    let q = rng.gen_range(1..=8i64);
    let p = rng.gen_range(0..=max * q);
    Rational::from_ratio(p, q)
}

/// Random vector with entries in [-3, 3], denominator up to 4.
pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> CoeffVector {
    CoeffVector(
        (0..dim)
            .map(|_| {
                let q = rng.gen_range(1..=4i64);
                let p = rng.gen_range(-3 * q..=3 * q);
                Rational::from_ratio(p, q)
            })
            .collect(),
    )
}
