//! Exact rational scalars and dense rational linear algebra.
//!
//! Every verdict produced by this crate rests on the routines here: rank and
//! nullspace via exact Gaussian elimination over Q, determinants via
//! fraction-free Bareiss elimination over the integers, and (for the large
//! solver systems) a certified modular kernel that reconstructs candidate
//! kernel vectors from images modulo word-size primes and then verifies them
//! in exact arithmetic before anything is reported.

pub mod kernel;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Exact scalar used throughout the crate. Always stored in reduced form with
/// a positive denominator (`num` maintains both invariants).
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q" or "p" with arbitrary-precision integers.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    Rational::from_str(s.trim()).map_err(|_| LinalgError::BadRational(s.to_string()))
}

/// Integer power with negative exponents allowed (q must be nonzero for e < 0).
pub fn rational_pow(q: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let p = q.pow(e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: Vec<Vec<i64>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    fn rref(&self) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let mut a: Vec<Vec<Rational>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivot_cols = Vec::new();
        let mut pr = 0usize;
        for col in 0..self.cols {
            if pr >= self.rows {
                break;
            }
            let Some(nz) = (pr..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(pr, nz);
            let inv = a[pr][col].clone().recip();
            for j in col..self.cols {
                let v = &a[pr][j] * &inv;
                a[pr][j] = v;
            }
            for r in 0..self.rows {
                if r != pr && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in col..self.cols {
                        let sub = &f * &a[pr][j];
                        let v = &a[r][j] - sub;
                        a[r][j] = v;
                    }
                }
            }
            pivot_cols.push(col);
            pr += 1;
        }
        (a, pivot_cols)
    }

    /// Rank over Q, exact and deterministic.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel. Each vector is scaled so that its first
    /// nonzero entry is 1; vectors are ordered by their free column index.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (a, pivot_cols) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        for fc in 0..self.cols {
            if is_pivot[fc] {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[fc] = Rational::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                if pc < fc {
                    v[pc] = -a[row][fc].clone();
                }
            }
            let first = v.iter().find(|x| !x.is_zero()).cloned().expect("nonzero");
            if !first.is_one() {
                for x in v.iter_mut() {
                    *x = &*x / &first;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Exact determinant by fraction-free Bareiss elimination. Row
    /// denominators are cleared first so the elimination runs over BigInt;
    /// pivots are chosen by smallest bit length to curb coefficient growth.
    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let lcm = self
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, q| num::integer::lcm(acc, q.denom().clone()));
            scale *= &lcm;
            a.push(
                self.row(i)
                    .iter()
                    .map(|q| q.numer() * (&lcm / q.denom()))
                    .collect(),
            );
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&r| !a[r][k].is_zero())
                .min_by_key(|&r| a[r][k].bits());
            let Some(p) = pivot else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let mut det = Rational::new(a[n - 1][n - 1].clone(), scale);
        if sign < 0 {
            det = -det;
        }
        Ok(det)
    }

    /// Rank of the reduction modulo `p`. Always a lower bound for the exact
    /// rank; used only as an accelerator, never as a verdict on its own.
    pub fn rank_mod(&self, p: u64) -> usize {
        let rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|q| reduce_mod(q, p).unwrap_or(0)).collect())
            .collect();
        kernel::rank_mod_p(&rows, self.cols, p)
    }

    /// Exact rank with an optional modular prefilter. The prefilter only ever
    /// skips work when the modular rank already certifies the answer
    /// (a full-rank reduction forces full exact rank); everything else falls
    /// through to the exact elimination.
    pub fn rank_with_prefilter(&self, prefilter: bool) -> usize {
        if prefilter {
            let p = kernel::PRIMES_62[0];
            let r = self.rank_mod(p);
            if r == self.rows.min(self.cols) {
                return r;
            }
        }
        self.rank()
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|q| q.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Value of `q` modulo `p`, or None when the denominator vanishes mod p.
pub fn reduce_mod(q: &Rational, p: u64) -> Option<u64> {
    let pm = BigInt::from(p);
    let mut n = q.numer() % &pm;
    if n.sign() == Sign::Minus {
        n += &pm;
    }
    let mut d = q.denom() % &pm;
    if d.sign() == Sign::Minus {
        d += &pm;
    }
    let n = n.to_string().parse::<u64>().unwrap();
    let d = d.to_string().parse::<u64>().unwrap();
    if d == 0 {
        return None;
    }
    Some(kernel::mul_mod(n, kernel::inv_mod(d, p), p))
}
