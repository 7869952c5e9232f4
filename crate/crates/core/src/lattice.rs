//! Exact rational bilinear forms and the linear solves behind Mumford's
//! intersection theory.
//!
//! A [`PairingMatrix`] is the Gram matrix of a symmetric pairing on a free
//! module with a chosen basis; a [`CoeffVector`] is a coefficient tuple in
//! that basis. Negative-definiteness is decided by leading principal minors
//! and the orthogonality systems are solved fraction-free (Bareiss), so every
//! answer is exact.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num::bigint::BigInt;
use num::{Integer, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Coefficient tuple over a fixed generator basis.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffVector(pub Vec<Rational>);

impl CoeffVector {
    pub fn zeros(dim: usize) -> Self {
        CoeffVector(vec![Rational::zero(); dim])
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        CoeffVector(coords.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    /// Basis vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn scale(&self, by: &Rational) -> Self {
        CoeffVector(self.0.iter().map(|c| c * by).collect())
    }

    /// Removes the coordinate at `index`, shrinking the dimension by one.
    pub fn drop_coord(&self, index: usize) -> Self {
        let mut coords = self.0.clone();
        coords.remove(index);
        CoeffVector(coords)
    }

    /// Inserts a zero coordinate at `index`, growing the dimension by one.
    pub fn insert_zero(&self, index: usize) -> Self {
        let mut coords = self.0.clone();
        coords.insert(index, Rational::zero());
        CoeffVector(coords)
    }
}

impl Index<usize> for CoeffVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Debug for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &CoeffVector {
    type Output = CoeffVector;
    fn add(self, rhs: &CoeffVector) -> CoeffVector {
        assert_eq!(self.dim(), rhs.dim(), "coefficient vector dimension");
        CoeffVector(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &CoeffVector {
    type Output = CoeffVector;
    fn sub(self, rhs: &CoeffVector) -> CoeffVector {
        assert_eq!(self.dim(), rhs.dim(), "coefficient vector dimension");
        CoeffVector(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul<&CoeffVector> for &Rational {
    type Output = CoeffVector;
    fn mul(self, rhs: &CoeffVector) -> CoeffVector {
        rhs.scale(self)
    }
}

/// Symmetric Gram matrix of an intersection pairing.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingMatrix {
    entries: Vec<Vec<Rational>>,
}

impl PairingMatrix {
    /// Builds from rows; fails unless the matrix is square and symmetric.
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, entry) in row.iter().enumerate().take(i) {
                if *entry != entries[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(PairingMatrix { entries })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
    }

    /// Builds without the symmetry scan, for candidates that still have to
    /// go through a validator. Rows must be square.
    pub fn new_unchecked(entries: Vec<Vec<Rational>>) -> Self {
        let dim = entries.len();
        for row in &entries {
            assert_eq!(row.len(), dim, "pairing matrix must be square");
        }
        PairingMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// `u^T M v`, the intersection number of the two classes.
    pub fn pair(&self, u: &CoeffVector, v: &CoeffVector) -> Result<Rational> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        let mut acc = Rational::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                acc += &(ui * vj) * &self.entries[i][j];
            }
        }
        Ok(acc)
    }

    /// Sylvester test in exact arithmetic: negative definite iff the k-th
    /// leading principal minor has sign (-1)^k for every k.
    pub fn is_negative_definite(&self) -> bool {
        let minors = match leading_principal_minors(&self.entries) {
            Some(m) => m,
            // A zero pivot is itself a vanishing minor.
            None => return false,
        };
        minors.iter().enumerate().all(|(k, minor)| {
            let want_negative = k % 2 == 0; // minor index k+1 odd
            match minor.sign() {
                std::cmp::Ordering::Equal => false,
                std::cmp::Ordering::Less => want_negative,
                std::cmp::Ordering::Greater => !want_negative,
            }
        })
    }

    /// Solves `M e = -rhs`, the Mumford orthogonality system: with
    /// `rhs_j = D'.E_j` the solution satisfies `(D' + sum e_i E_i).E_j = 0`
    /// for every j. Requires a negative-definite matrix; anything weaker is
    /// rejected because unique solvability is no longer guaranteed.
    pub fn solve_mumford(&self, rhs: &CoeffVector) -> Result<CoeffVector> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        if !self.is_negative_definite() {
            return Err(Error::NotNegativeDefinite {
                reason: "Mumford orthogonality solve requires a negative-definite \
                         exceptional intersection matrix"
                    .into(),
            });
        }
        let neg_rhs = CoeffVector(rhs.iter().map(|r| -r).collect());
        Ok(bareiss_solve(&self.entries, &neg_rhs)
            .expect("negative-definite matrices are invertible"))
    }
}

impl fmt::Debug for PairingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PairingMatrix [")?;
        for row in &self.entries {
            write!(f, "  [")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Clears denominators row by row so elimination can stay in integers.
/// Returns the integer matrix plus the scaling factor applied to each row.
fn integerize(rows: &[Vec<Rational>], rhs: Option<&CoeffVector>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let n = rows.len();
    let mut out = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut lcm = BigInt::one();
        for e in row {
            lcm = lcm.lcm(e.denom());
        }
        if let Some(b) = rhs {
            lcm = lcm.lcm(b[i].denom());
        }
        let ints: Vec<BigInt> = row
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect();
        out.push(ints);
        scales.push(lcm);
    }
    (out, scales)
}

/// Leading principal minors det(M_k) for k = 1..n by fraction-free (Bareiss)
/// elimination without pivoting. Row scaling multiplies each computed minor
/// by a known positive factor, which is divided back out. Returns `None` as
/// soon as a pivot vanishes: that leading minor is zero.
fn leading_principal_minors(rows: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let n = rows.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let (mut m, scales) = integerize(rows, None);
    let mut minors = Vec::with_capacity(n);
    let mut prev_pivot = BigInt::one();
    // Product of the row scales applied so far; det(scaled M_k) = scale_prod_k * det(M_k).
    let mut scale_prod = BigInt::one();
    for k in 0..n {
        let pivot = m[k][k].clone();
        scale_prod *= &scales[k];
        if pivot.is_zero() {
            return None;
        }
        // After k elimination steps the (k,k) entry is det of the leading
        // (k+1)x(k+1) block of the scaled matrix.
        minors.push(Rational::from_big(num::rational::BigRational::new(
            pivot.clone(),
            scale_prod.clone(),
        )));
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &m[i][j] * &pivot - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev_pivot);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev_pivot = pivot;
    }
    Some(minors)
}

/// Solves `A x = b` by fraction-free elimination with partial (nonzero-pivot)
/// row search, followed by exact back substitution. Returns `None` when `A`
/// is singular.
fn bareiss_solve(rows: &[Vec<Rational>], b: &CoeffVector) -> Option<CoeffVector> {
    let n = rows.len();
    if n == 0 {
        return Some(CoeffVector::zeros(0));
    }
    let (mut m, scales) = integerize(rows, Some(b));
    // Augmented column, scaled per row like the matrix.
    for (i, row) in m.iter_mut().enumerate() {
        let bi = &b[i];
        row.push(bi.numer() * (&scales[i] / bi.denom()));
    }
    let mut prev_pivot = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = ((k + 1)..n).find(|&i| !m[i][k].is_zero())?;
            m.swap(k, swap);
        }
        let pivot = m[k][k].clone();
        for i in (k + 1)..n {
            for j in (k + 1)..=n {
                let num = &m[i][j] * &pivot - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev_pivot);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev_pivot = pivot;
    }
    // Back substitution over rationals.
    let mut x = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let mut acc = Rational::from_bigint(m[k][n].clone());
        for j in (k + 1)..n {
            acc -= &Rational::from_bigint(m[k][j].clone()) * &x[j];
        }
        let pivot = Rational::from_bigint(m[k][k].clone());
        if pivot.is_zero() {
            return None;
        }
        x[k] = &acc / &pivot;
    }
    Some(CoeffVector(x))
}

/// Exact determinant, used by validators and the polytope vertex solver.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    // Plain fraction-free elimination with row swaps (sign tracked).
    let (mut m, scales) = integerize(rows, None);
    let mut sign = 1i64;
    let mut prev_pivot = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match ((k + 1)..n).find(|&i| !m[i][k].is_zero()) {
                Some(swap) => {
                    m.swap(k, swap);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        let pivot = m[k][k].clone();
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &m[i][j] * &pivot - &m[i][k] * &m[k][j];
                let (q, r) = num.div_rem(&prev_pivot);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev_pivot = pivot;
    }
    let mut scale = BigInt::one();
    for s in &scales {
        scale *= s;
    }
    let det = Rational::from_big(num::rational::BigRational::new(m[n - 1][n - 1].clone(), scale));
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Solves a general square system exactly; `None` when singular.
/// Exposed for the polytope vertex enumeration.
pub fn solve_linear(rows: &[Vec<Rational>], b: &CoeffVector) -> Option<CoeffVector> {
    bareiss_solve(rows, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> PairingMatrix {
        PairingMatrix::from_integers(rows).unwrap()
    }

    #[test]
    fn pair_reads_off_matrix_entries() {
        let a1 = m(&[&[-2]]);
        let e = CoeffVector::from_integers(&[1]);
        assert_eq!(a1.pair(&e, &e).unwrap(), rat(-2, 1));

        let a2 = m(&[&[-2, 1], &[1, -2]]);
        let u = CoeffVector::from_integers(&[1, 0]);
        let v = CoeffVector::from_integers(&[0, 1]);
        assert_eq!(a2.pair(&u, &v).unwrap(), rat(1, 1));

        let zero = CoeffVector::zeros(2);
        assert_eq!(a2.pair(&zero, &v).unwrap(), Rational::zero());
    }

    #[test]
    fn pair_rejects_dimension_mismatch() {
        let a2 = m(&[&[-2, 1], &[1, -2]]);
        let u = CoeffVector::from_integers(&[1]);
        let err = a2.pair(&u, &u).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn asymmetric_matrix_rejected_at_construction() {
        let err = PairingMatrix::from_integers(&[&[0, 1], &[2, 0]]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
    }

    #[test]
    fn negative_definite_chains() {
        assert!(m(&[&[-2, 1], &[1, -2]]).is_negative_definite());
        assert!(m(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]).is_negative_definite());
    }

    #[test]
    fn affine_cycle_is_not_definite() {
        // Cycle of three (-2)-curves: determinant 0.
        let cyc = m(&[&[-2, 1, 1], &[1, -2, 1], &[1, 1, -2]]);
        assert!(!cyc.is_negative_definite());
        assert_eq!(determinant(cyc.rows()), Rational::zero());
    }

    #[test]
    fn positive_definite_is_not_negative_definite() {
        assert!(!m(&[&[2, -1], &[-1, 2]]).is_negative_definite());
        assert!(!m(&[&[-2, 3], &[3, -2]]).is_negative_definite());
    }

    #[test]
    fn solve_mumford_examples() {
        let a1 = m(&[&[-2]]);
        let e = a1
            .solve_mumford(&CoeffVector::from_integers(&[1]))
            .unwrap();
        assert_eq!(e, CoeffVector(vec![rat(1, 2)]));

        let a2 = m(&[&[-2, 1], &[1, -2]]);
        let e = a2
            .solve_mumford(&CoeffVector::from_integers(&[1, 0]))
            .unwrap();
        assert_eq!(e, CoeffVector(vec![rat(2, 3), rat(1, 3)]));

        let zero = CoeffVector::zeros(2);
        assert_eq!(a2.solve_mumford(&zero).unwrap(), zero);
    }

    #[test]
    fn solve_mumford_rejects_indefinite() {
        let cyc = m(&[&[-2, 1, 1], &[1, -2, 1], &[1, 1, -2]]);
        let err = cyc.solve_mumford(&CoeffVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::NotNegativeDefinite { .. }));
    }

    #[test]
    fn solution_restores_orthogonality_exactly() {
        let a3 = m(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]);
        let rhs = CoeffVector(vec![rat(1, 1), rat(0, 1), rat(2, 3)]);
        let e = a3.solve_mumford(&rhs).unwrap();
        // (D' + sum e_i E_i).E_j = rhs_j + (M e)_j = 0.
        for j in 0..3 {
            let mut acc = rhs[j].clone();
            for i in 0..3 {
                acc += &e[i] * a3.entry(i, j);
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn determinant_with_rational_entries() {
        let rows = vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 3), rat(1, 4)],
        ];
        assert_eq!(determinant(&rows), rat(1, 72));
    }
}
