//! Exact rational matrix arithmetic.
//!
//! Everything here is over arbitrary-precision rationals; no floating
//! point is used anywhere. Elimination pivots on the first nonzero entry
//! of each column, so results are deterministic.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in canonical form.
pub type Rational = BigRational;

/// Shorthand constructor; panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A dense rows x cols grid of rationals. Dimensions are at least 1x1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Shape("matrix dimensions must be >= 1".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows in matrix".into()));
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| ratio(v, 1)).collect())
                .collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self.get(r, c).is_one()
                    } else {
                        self.get(r, c).is_zero()
                    }
                })
            })
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |w: &Vec<Rational>, r: usize, c: usize| w[r * cols + c].clone();
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| !work[r * cols + col].is_zero()) else {
                continue;
            };
            if pivot != rank {
                for c in 0..cols {
                    work.swap(rank * cols + c, pivot * cols + c);
                }
            }
            let pv = at(&work, rank, col);
            for r in rank + 1..rows {
                let f = at(&work, r, col);
                if f.is_zero() {
                    continue;
                }
                let scale = &f / &pv;
                for c in col..cols {
                    let v = at(&work, r, c) - &scale * at(&work, rank, c);
                    work[r * cols + c] = v;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Some exact solution of `self * u = b`, or `None` when inconsistent.
    /// Free variables are fixed to zero, so the result is deterministic;
    /// when the matrix is square and invertible it is the unique solution.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if b.len() != self.rows {
            return Err(Error::Shape(format!(
                "right-hand side length {} does not match {} rows",
                b.len(),
                self.rows
            )));
        }
        let cols = self.cols;
        let width = cols + 1;
        let mut work: Vec<Rational> = Vec::with_capacity(self.rows * width);
        for (r, rhs) in b.iter().enumerate() {
            work.extend_from_slice(self.row(r));
            work.push(rhs.clone());
        }
        // Gauss-Jordan over the coefficient columns.
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !work[r * width + col].is_zero()) else {
                continue;
            };
            if pivot != rank {
                for c in 0..width {
                    work.swap(rank * width + c, pivot * width + c);
                }
            }
            let pv = work[rank * width + col].clone();
            for c in col..width {
                let v = &work[rank * width + c] / &pv;
                work[rank * width + c] = v;
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = work[r * width + col].clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..width {
                    let v = &work[r * width + c] - &f * &work[rank * width + c];
                    work[r * width + c] = v;
                }
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        // A zero coefficient row with nonzero right-hand side is inconsistent.
        for r in rank..self.rows {
            if !work[r * width + cols].is_zero() {
                return Ok(None);
            }
        }
        let mut solution = vec![Rational::zero(); cols];
        for (r, c) in pivots {
            solution[c] = work[r * width + cols].clone();
        }
        Ok(Some(solution))
    }

    /// Exact inverse of a square matrix.
    pub fn invert(&self) -> Result<RationalMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let width = 2 * n;
        let mut work: Vec<Rational> = Vec::with_capacity(n * width);
        for r in 0..n {
            work.extend_from_slice(self.row(r));
            for c in 0..n {
                work.push(if r == c {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
        }
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !work[r * width + col].is_zero()) else {
                return Err(Error::Singular { rank: self.rank() });
            };
            if pivot != col {
                for c in 0..width {
                    work.swap(col * width + c, pivot * width + c);
                }
            }
            let pv = work[col * width + col].clone();
            for c in col..width {
                let v = &work[col * width + c] / &pv;
                work[col * width + c] = v;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = work[r * width + col].clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..width {
                    let v = &work[r * width + c] - &f * &work[col * width + c];
                    work[r * width + c] = v;
                }
            }
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, work[r * width + n + c].clone());
            }
        }
        Ok(inv)
    }

    /// Maximum over rows of the sum of absolute entry values, exact.
    pub fn max_row_abs_sum(&self) -> Rational {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .fold(Rational::zero(), |acc, v| acc + v.abs())
            })
            .max()
            .expect("matrix has at least one row")
    }
}
