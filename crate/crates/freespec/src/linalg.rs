//! Dense exact matrices over the rationals, with fraction-free (Bareiss)
//! elimination for inverses, determinants, and positivity checks.
//!
//! The elimination works on integer-scaled rows and divides by the previous
//! pivot at every step; all divisions are exact, so intermediate entries stay
//! as small as the theory allows and no rational arithmetic happens inside
//! the hot loop.  Row updates within a step are independent and run in
//! parallel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// A dense `rows x cols` matrix of arbitrary-precision rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RationalMatrix {
    /// The zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors, which must all have equal length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// Entry at `(r, c)`.
    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    /// Overwrites the entry at `(r, c)`.
    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Each row scaled to integers by the least common denominator, returned
    /// with the per-row scale factors.
    fn scaled_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut rows = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut l = BigInt::one();
            for j in 0..self.cols {
                l = l.lcm(self.at(i, j).denom());
            }
            rows.push(
                (0..self.cols)
                    .map(|j| self.at(i, j).numer() * (&l / self.at(i, j).denom()))
                    .collect(),
            );
            scales.push(l);
        }
        (rows, scales)
    }

    /// Exact matrix product.  Both operands are scaled to integers so the
    /// inner loop is pure integer arithmetic, with one rational reduction per
    /// output entry.
    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (a, a_scale) = self.scaled_rows();
        let (bt, b_scale) = other.transpose().scaled_rows();
        let rows: Vec<Vec<Rat>> = (0..self.rows)
            .into_par_iter()
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        let mut acc = BigInt::zero();
                        for t in 0..self.cols {
                            acc += &a[i][t] * &bt[j][t];
                        }
                        Rat::new(acc, &a_scale[i] * &b_scale[j])
                    })
                    .collect()
            })
            .collect();
        RationalMatrix::from_rows(rows)
    }

    /// The trace of `self * other`, without materialising the product.
    pub fn trace_product(&self, other: &RationalMatrix) -> Result<Rat> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::InvalidInput(format!(
                "trace of {}x{} times {}x{} is undefined",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = Rat::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.at(i, j) * other.at(j, i);
            }
        }
        Ok(acc)
    }

    /// Exact inverse by fraction-free Gauss-Jordan elimination with row
    /// pivoting.  Augmenting the scaled matrix with its row scales makes the
    /// final right block `d * A^{-1}` for the final pivot `d`, so the result
    /// needs one exact division per entry.
    pub fn invert(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::InvalidInput("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let (scaled, scales) = self.scaled_rows();
        let mut m: Vec<Vec<BigInt>> = scaled
            .into_iter()
            .zip(scales)
            .enumerate()
            .map(|(i, (row, scale))| {
                let mut wide = row;
                wide.resize(2 * n, BigInt::zero());
                wide[n + i] = scale;
                wide
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Err(Error::SingularMatrix);
                };
                m.swap(k, swap);
            }
            let pivot_row = m[k].clone();
            let pivot = &pivot_row[k];
            let prev_ref = &prev;
            m.par_iter_mut().enumerate().for_each(|(i, row)| {
                if i == k {
                    return;
                }
                let factor = std::mem::replace(&mut row[k], BigInt::zero());
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let num = pivot * &row[j] - &factor * &pivot_row[j];
                    row[j] = num / prev_ref; // exact by the Bareiss identity
                }
            });
            prev = pivot_row[k].clone();
            drop(pivot_row);
        }
        let d = prev;
        Ok(RationalMatrix::from_fn(n, n, |i, j| {
            Rat::new(m[i][n + j].clone(), d.clone())
        }))
    }

    /// Exact determinant by fraction-free forward elimination.
    pub fn det(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rat::one());
        }
        let (mut m, scales) = self.scaled_rows();
        let mut sign = 1i8;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Ok(Rat::zero());
                };
                m.swap(k, swap);
                sign = -sign;
            }
            let pivot_row = m[k].clone();
            let pivot = &pivot_row[k];
            let prev_ref = &prev;
            m.par_iter_mut().enumerate().skip(k + 1).for_each(|(_, row)| {
                let factor = std::mem::replace(&mut row[k], BigInt::zero());
                for j in k + 1..n {
                    let num = pivot * &row[j] - &factor * &pivot_row[j];
                    row[j] = num / prev_ref;
                }
            });
            prev = pivot_row[k].clone();
        }
        let mut det = Rat::new(prev, scales.iter().product::<BigInt>());
        if sign < 0 {
            det = -det;
        }
        Ok(det)
    }

    /// Sylvester test for a symmetric matrix: positive definite iff every
    /// leading principal minor is positive.  The minors are exactly the
    /// Bareiss pivots (up to the positive row scales), so one unpivoted
    /// forward pass decides.  A zero or negative pivot answers `false`.
    pub fn is_positive_definite(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Err(Error::InvalidInput(
                "positive definiteness test requires a symmetric matrix".into(),
            ));
        }
        let n = self.rows;
        let (mut m, _) = self.scaled_rows();
        let mut prev = BigInt::one();
        for k in 0..n {
            if !m[k][k].is_positive() {
                return Ok(false);
            }
            let pivot_row = m[k].clone();
            let pivot = &pivot_row[k];
            let prev_ref = &prev;
            m.par_iter_mut().enumerate().skip(k + 1).for_each(|(_, row)| {
                let factor = std::mem::replace(&mut row[k], BigInt::zero());
                for j in k + 1..n {
                    let num = pivot * &row[j] - &factor * &pivot_row[j];
                    row[j] = num / prev_ref;
                }
            });
            prev = pivot_row[k].clone();
        }
        Ok(true)
    }

    /// The leading principal minors `det(A[..j, ..j])` for `j = 1..=n`.
    pub fn leading_principal_minors(&self) -> Result<Vec<Rat>> {
        if !self.is_square() {
            return Err(Error::InvalidInput("minors of a non-square matrix".into()));
        }
        (1..=self.rows)
            .map(|j| Self::from_fn(j, j, |r, c| self.at(r, c).clone()).det())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> RationalMatrix {
        RationalMatrix::from_rows(vec![
            vec![rat_int(a), rat_int(b)],
            vec![rat_int(c), rat_int(d)],
        ])
        .unwrap()
    }

    /// Independent oracle: determinant by Laplace expansion.
    fn det_oracle(m: &RationalMatrix) -> Rat {
        let n = m.nrows();
        if n == 0 {
            return Rat::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut acc = Rat::zero();
        for j in 0..n {
            let minor = RationalMatrix::from_fn(n - 1, n - 1, |r, c| {
                m.at(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = m.at(0, j) * &det_oracle(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn inverts_a_symmetric_integer_matrix() {
        let a = m2(4, 2, 2, 4);
        let inv = a.invert().unwrap();
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(1, 3), rat(-1, 6)],
            vec![rat(-1, 6), rat(1, 3)],
        ])
        .unwrap();
        assert_eq!(inv, expected);
        assert!(a.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn inverts_a_rational_matrix() {
        let a = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 4), rat(1, 5)],
        ])
        .unwrap();
        let inv = a.invert().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&a).unwrap().is_identity());
    }

    #[test]
    fn invert_handles_zero_pivot_by_swapping() {
        let a = m2(0, 1, 1, 0);
        let inv = a.invert().unwrap();
        assert_eq!(inv, a);
    }

    #[test]
    fn invert_rejects_singular_matrices() {
        for a in [m2(1, 1, 1, 1), m2(1, 2, 2, 4), m2(0, 0, 0, 0)] {
            match a.invert() {
                Err(Error::SingularMatrix) => {}
                other => panic!("expected singular, got {other:?}"),
            }
        }
    }

    #[test]
    fn det_small_examples() {
        assert_eq!(m2(1, 2, 3, 4).det().unwrap(), rat_int(-2));
        assert_eq!(RationalMatrix::identity(5).det().unwrap(), rat_int(1));
        assert_eq!(m2(1, 1, 1, 1).det().unwrap(), rat_int(0));
        // Swap path: leading zero with nonzero below.
        assert_eq!(m2(0, 1, 1, 0).det().unwrap(), rat_int(-1));
    }

    #[test]
    fn trace_product_matches_explicit_product() {
        let a = m2(1, 2, 3, 4);
        let b = m2(5, 6, 7, 8);
        let ab = a.mul(&b).unwrap();
        let trace = (0..2).map(|i| ab.at(i, i).clone()).sum::<Rat>();
        assert_eq!(a.trace_product(&b).unwrap(), trace);
    }

    #[test]
    fn positive_definite_examples() {
        assert!(m2(2, 1, 1, 2).is_positive_definite().unwrap());
        assert!(!m2(1, 2, 2, 1).is_positive_definite().unwrap());
        assert!(!m2(0, 0, 0, 0).is_positive_definite().unwrap());
        assert!(!m2(-2, 0, 0, -2).is_positive_definite().unwrap());
        assert!(m2(1, 2, 3, 4).is_positive_definite().is_err());
    }

    #[test]
    fn leading_minors_example() {
        let minors = m2(2, 1, 1, 2).leading_principal_minors().unwrap();
        assert_eq!(minors, vec![rat_int(2), rat_int(3)]);
    }

    #[test]
    fn zero_sized_matrix_is_its_own_inverse() {
        let a = RationalMatrix::zeros(0, 0);
        assert_eq!(a.invert().unwrap(), a);
        assert_eq!(a.det().unwrap(), rat_int(1));
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(
            proptest::collection::vec((-4i64..=4, 1i64..=3), n),
            n,
        )
        .prop_map(move |rows| {
            RationalMatrix::from_rows(
                rows.into_iter()
                    .map(|r| r.into_iter().map(|(p, q)| rat(p, q)).collect())
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn det_matches_laplace_oracle(a in arb_matrix(3)) {
            prop_assert_eq!(a.det().unwrap(), det_oracle(&a));
        }

        #[test]
        fn inverse_roundtrip(a in arb_matrix(3)) {
            match a.invert() {
                Ok(inv) => {
                    prop_assert!(a.mul(&inv).unwrap().is_identity());
                    prop_assert_eq!(inv.invert().unwrap(), a);
                }
                Err(Error::SingularMatrix) => {
                    prop_assert_eq!(a.det().unwrap(), Rat::zero());
                }
                Err(e) => prop_assert!(false, "unexpected error {:?}", e),
            }
        }

        #[test]
        fn det_of_product_is_product_of_dets(a in arb_matrix(3), b in arb_matrix(3)) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }
    }
}
