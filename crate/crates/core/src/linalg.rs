//! Dense exact matrices over `F_q`.
//!
//! Modules are right modules acting on row vectors, so subspaces are described by
//! row bases and `eventual_image` works with the row space of `A^n`.

use std::fmt;

use crate::error::{HeckeError, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Matrix {}

/// Result of [`rank_solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// Only the rank was requested.
    RankOnly,
    /// `A x = b` has the solutions `particular + span(kernel columns)`.
    Affine { particular: Matrix, kernel: Matrix },
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSolve {
    pub rank: usize,
    pub solution: Solution,
}

/// Rank of `a`, and if `b` is given the solution set of `a x = b` (`b` a
/// column block; each column is solved simultaneously).
pub fn rank_solve(a: &Matrix, b: Option<&Matrix>) -> Result<RankSolve> {
    let rank = a.rank();
    let Some(b) = b else {
        return Ok(RankSolve { rank, solution: Solution::RankOnly });
    };
    if b.rows != a.rows {
        return Err(HeckeError::DimensionMismatch(format!(
            "system has {} equations but right-hand side has {} rows",
            a.rows, b.rows
        )));
    }
    if a.field != b.field {
        return Err(HeckeError::DimensionMismatch("matrices over different fields".into()));
    }
    let solution = match a.solve_right(b) {
        Some(x) => Solution::Affine { particular: x, kernel: a.kernel() },
        None => Solution::Inconsistent,
    };
    Ok(RankSolve { rank, solution })
}

/// Eventual image of `v -> v A` on row vectors: the row space `E` of `A^n` and
/// the invertible matrix `R` with `basis * A = R * basis`.
#[derive(Clone, Debug)]
pub struct EventualImage {
    pub basis: Matrix,
    pub restricted: Matrix,
}

pub fn eventual_image(a: &Matrix) -> Result<EventualImage> {
    if a.rows != a.cols {
        return Err(HeckeError::DimensionMismatch(format!(
            "eventual image needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let basis = a.pow(n as u64).row_basis();
    let image = basis.mul(a);
    let restricted = basis
        .coordinates_of(&image)
        .ok_or_else(|| HeckeError::Internal("eventual image is not stable".into()))?;
    if restricted.inverse().is_none() {
        return Err(HeckeError::Internal("restriction to eventual image not invertible".into()));
    }
    Ok(EventualImage { basis, restricted })
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![Scalar::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(field: &Field, n: usize, s: Scalar) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Matrix with integer entries reduced into the prime subfield.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::from_fn(field, r, c, |i, j| field.from_int(rows[i][j]))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Matrix {
        Matrix::from_fn(&self.field, 1, self.cols, |_, j| self.get(i, j))
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    self.get(i, j) == if i == j { Scalar::ONE } else { Scalar::ZERO }
                })
            })
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j);
                        out.set(i, j, f.add(cur, f.mul(a, b)));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum dimension mismatch");
        let f = &self.field;
        Matrix::from_fn(f, self.rows, self.cols, |i, j| f.add(self.get(i, j), other.get(i, j)))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference dimension mismatch");
        let f = &self.field;
        Matrix::from_fn(f, self.rows, self.cols, |i, j| f.sub(self.get(i, j), other.get(i, j)))
    }

    pub fn scale(&self, s: Scalar) -> Matrix {
        let f = &self.field;
        Matrix::from_fn(f, self.rows, self.cols, |i, j| f.mul(s, self.get(i, j)))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut result = Matrix::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// `A^k` for any integer `k`; `None` if `k < 0` and `A` is singular.
    pub fn pow_signed(&self, k: i64) -> Option<Matrix> {
        if k >= 0 {
            Some(self.pow(k as u64))
        } else {
            Some(self.inverse()?.pow(k.unsigned_abs()))
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let t = m.get(r, j);
                    m.set(r, j, m.get(pr, j));
                    m.set(pr, j, t);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(r, j, f.mul(inv, m.get(r, j)));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`, as columns.
    pub fn kernel(&self) -> Matrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, f.one());
            for (pi, &pc) in pivots.iter().enumerate() {
                k.set(pc, idx, f.neg(r.get(pi, fc)));
            }
        }
        k
    }

    /// Basis of the left kernel `{y : y A = 0}`, as rows.
    pub fn left_kernel(&self) -> Matrix {
        self.transpose().kernel().transpose()
    }

    /// One solution `X` of `A X = B`, if any.
    pub fn solve_right(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows);
        let f = &self.field;
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(f, self.cols, b.cols);
        for (pi, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(pi, self.cols + j));
            }
        }
        Some(x)
    }

    /// Independent rows spanning the row space (in reduced echelon form).
    pub fn row_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        Matrix::from_fn(&self.field, pivots.len(), self.cols, |i, j| r.get(i, j))
    }

    /// For a matrix whose rows are independent, the coefficients `C` with
    /// `C * self = v`, or `None` if some row of `v` is outside the row space.
    pub fn coordinates_of(&self, v: &Matrix) -> Option<Matrix> {
        if self.rows == 0 {
            return if v.is_zero() { Some(Matrix::zeros(&self.field, v.rows, 0)) } else { None };
        }
        Some(self.transpose().solve_right(&v.transpose())?.transpose())
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Matrix::identity(&self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(&self.field, n, n, |i, j| r.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        Matrix::from_fn(&self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j)
            } else {
                other.get(i - self.rows, j)
            }
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let f = &self.field;
        Matrix::from_fn(f, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - self.rows, j - self.cols),
                _ => Scalar::ZERO,
            }
        })
    }

    /// Kronecker (tensor) product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let f = &self.field;
        Matrix::from_fn(f, self.rows * other.rows, self.cols * other.cols, |i, j| {
            f.mul(
                self.get(i / other.rows, j / other.cols),
                other.get(i % other.rows, j % other.cols),
            )
        })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(&self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows.start + i, cols.start + j)
        })
    }

    pub fn trace(&self) -> Scalar {
        let f = &self.field;
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(acc, self.get(i, i)))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.rows as u64).is_zero()
    }

    /// Extends independent rows to a basis of the whole space; returns the
    /// added complement rows.
    pub fn complement_rows(&self) -> Matrix {
        let f = &self.field;
        let n = self.cols;
        let mut current = self.clone();
        let mut added = Matrix::zeros(f, 0, n);
        for i in 0..n {
            let e = Matrix::from_fn(f, 1, n, |_, j| if i == j { f.one() } else { f.zero() });
            let candidate = current.vstack(&e);
            if candidate.rank() > current.rank() {
                current = candidate;
                added = added.vstack(&e);
            }
        }
        added
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = f5();
        assert_eq!(rank_solve(&Matrix::zeros(&f, 2, 2), None).unwrap().rank, 0);
        assert_eq!(rank_solve(&Matrix::identity(&f, 3), None).unwrap().rank, 3);
        let a = Matrix::from_ints(&f, &[&[1, 2], &[2, 4]]);
        assert_eq!(rank_solve(&a, None).unwrap().rank, 1);
    }

    #[test]
    fn solve_and_inconsistency() {
        let f = f5();
        let a = Matrix::from_ints(&f, &[&[1, 2], &[2, 4]]);
        let b = Matrix::from_ints(&f, &[&[3], &[1]]);
        match rank_solve(&a, Some(&b)).unwrap().solution {
            Solution::Affine { particular, kernel } => {
                assert_eq!(a.mul(&particular), b);
                assert_eq!(kernel.cols(), 1);
                assert!(a.mul(&kernel).is_zero());
            }
            other => panic!("expected a solution, got {other:?}"),
        }
        let bad = Matrix::from_ints(&f, &[&[1], &[1]]);
        assert_eq!(rank_solve(&a, Some(&bad)).unwrap().solution, Solution::Inconsistent);
        let wrong = Matrix::zeros(&f, 3, 1);
        assert!(matches!(rank_solve(&a, Some(&wrong)), Err(HeckeError::DimensionMismatch(_))));
    }

    #[test]
    fn eventual_image_examples() {
        let f = f5();
        let id = Matrix::identity(&f, 3);
        assert_eq!(eventual_image(&id).unwrap().basis.rows(), 3);
        let nil = Matrix::from_ints(&f, &[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(eventual_image(&nil).unwrap().basis.rows(), 0);
        let d = Matrix::from_ints(&f, &[&[0, 0], &[0, 2]]);
        let ei = eventual_image(&d).unwrap();
        assert_eq!(ei.basis, Matrix::from_ints(&f, &[&[0, 1]]));
        assert_eq!(ei.restricted, Matrix::from_ints(&f, &[&[2]]));
        assert!(eventual_image(&Matrix::zeros(&f, 2, 3)).is_err());
    }

    #[test]
    fn inverse_and_kernel() {
        let f = Field::prime(7).unwrap();
        let a = Matrix::from_ints(&f, &[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let s = Matrix::from_ints(&f, &[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        let lk = s.left_kernel();
        assert_eq!(lk.rows(), 1);
        assert!(lk.mul(&s).is_zero());
    }

    #[test]
    fn extension_field_matrices() {
        let f = Field::new(5, 2).unwrap();
        let a = Matrix::from_fn(&f, 2, 2, |i, j| f.elem((7 * i as u32 + 3 * j as u32 + 1) % 25));
        if let Some(inv) = a.inverse() {
            assert!(a.mul(&inv).is_identity());
        }
    }
}
