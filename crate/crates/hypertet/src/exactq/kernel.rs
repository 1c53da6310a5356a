//! Certified modular kernel computation.
//!
//! Large solver systems are handled by eliminating modulo word-size primes,
//! reconstructing candidate kernel vectors by CRT + rational reconstruction,
//! and then verifying every candidate with exact integer arithmetic. The
//! modular rank is a lower bound for the exact rank, so once `cols - rank_p`
//! exactly-verified independent kernel vectors are in hand, the kernel
//! dimension is pinned down rigorously. No verdict ever depends on an
//! unverified modular result.

use super::Rational;
use num::integer::Roots;
use num::{BigInt, One, Signed, Zero};

/// Fixed 31-bit primes for the elimination path (products fit in u64).
pub const PRIMES_31: [u64; 20] = [
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543,
    2147483497, 2147483489, 2147483477, 2147483423, 2147483399, 2147483353, 2147483323,
    2147483269, 2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
];

/// Fixed 62-bit primes for the standalone rank prefilter.
pub const PRIMES_62: [u64; 4] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
];

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid; p prime, a != 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible");
    (t.rem_euclid(p as i128)) as u64
}

/// Rank of dense rows over Z/p.
pub fn rank_mod_p(rows: &[Vec<u64>], cols: usize, p: u64) -> usize {
    let mut ech: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for r in rows {
        let mut w: Vec<u64> = r.iter().map(|&x| x % p).collect();
        reduce_against(&mut w, &ech, &pivots, p);
        if let Some(j) = w.iter().position(|&x| x != 0) {
            normalize(&mut w, j, p);
            insert_echelon(&mut ech, &mut pivots, w, j);
            if pivots.len() == cols {
                break;
            }
        }
    }
    pivots.len()
}

fn reduce_against(w: &mut [u64], ech: &[Vec<u64>], pivots: &[usize], p: u64) {
    for (row, &pj) in ech.iter().zip(pivots) {
        let f = w[pj];
        if f != 0 {
            let neg = p - f;
            for j in pj..w.len() {
                if row[j] != 0 {
                    w[j] = (w[j] + mul_mod(neg, row[j], p)) % p;
                }
            }
        }
    }
}

fn normalize(w: &mut [u64], j: usize, p: u64) {
    let inv = inv_mod(w[j], p);
    for x in w[j..].iter_mut() {
        if *x != 0 {
            *x = mul_mod(*x, inv, p);
        }
    }
}

fn insert_echelon(ech: &mut Vec<Vec<u64>>, pivots: &mut Vec<usize>, w: Vec<u64>, j: usize) {
    let pos = pivots.partition_point(|&pj| pj < j);
    ech.insert(pos, w);
    pivots.insert(pos, j);
}

/// Sparse integer matrix, rows of (column index, value) pairs.
#[derive(Debug, Clone)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_entries: Vec<Vec<(u32, BigInt)>>,
}

struct ModKernel {
    pivots: Vec<usize>,
    /// kernel basis mod p, one dense vector per free column
    vectors: Vec<Vec<u64>>,
    free_cols: Vec<usize>,
}

impl SparseIntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            row_entries: vec![Vec::new(); rows],
        }
    }

    pub fn push(&mut self, row: usize, col: usize, v: BigInt) {
        if !v.is_zero() {
            self.row_entries[row].push((col as u32, v));
        }
    }

    pub fn nnz(&self) -> usize {
        self.row_entries.iter().map(|r| r.len()).sum()
    }

    fn row_mod(&self, i: usize, p: u64) -> Vec<u64> {
        let pm = BigInt::from(p);
        let mut w = vec![0u64; self.cols];
        for (c, v) in &self.row_entries[i] {
            let mut m = v % &pm;
            if m.is_negative() {
                m += &pm;
            }
            w[*c as usize] = u64::try_from(&m).unwrap();
        }
        w
    }

    /// RREF mod p, returning the kernel basis (free-column convention).
    fn kernel_mod(&self, p: u64) -> ModKernel {
        let mut ech: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            if pivots.len() == self.cols {
                break;
            }
            let mut w = self.row_mod(i, p);
            reduce_against(&mut w, &ech, &pivots, p);
            if let Some(j) = w.iter().position(|&x| x != 0) {
                normalize(&mut w, j, p);
                insert_echelon(&mut ech, &mut pivots, w, j);
            }
        }
        // back-substitute to reduced form
        for i in (0..ech.len()).rev() {
            for k in 0..i {
                let f = ech[k][pivots[i]];
                if f != 0 {
                    let neg = p - f;
                    let (head, tail) = ech.split_at_mut(i);
                    let (row_i, row_k) = (&tail[0], &mut head[k]);
                    for j in pivots[i]..self.cols {
                        if row_i[j] != 0 {
                            row_k[j] = (row_k[j] + mul_mod(neg, row_i[j], p)) % p;
                        }
                    }
                }
            }
        }
        let mut is_pivot = vec![false; self.cols];
        for &j in &pivots {
            is_pivot[j] = true;
        }
        let free_cols: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let vectors = free_cols
            .iter()
            .map(|&fc| {
                let mut v = vec![0u64; self.cols];
                v[fc] = 1;
                for (row, &pc) in ech.iter().zip(&pivots) {
                    if row[fc] != 0 {
                        v[pc] = p - row[fc];
                    }
                }
                v
            })
            .collect();
        ModKernel {
            pivots,
            vectors,
            free_cols,
        }
    }

    /// Upper bound for the exact kernel dimension (cols - rank mod p).
    pub fn kernel_dim_mod(&self, p: u64) -> usize {
        let mut ech: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            if pivots.len() == self.cols {
                break;
            }
            let mut w = self.row_mod(i, p);
            reduce_against(&mut w, &ech, &pivots, p);
            if let Some(j) = w.iter().position(|&x| x != 0) {
                normalize(&mut w, j, p);
                insert_echelon(&mut ech, &mut pivots, w, j);
            }
        }
        self.cols - pivots.len()
    }

    /// Exact check that v lies in the right kernel.
    pub fn in_kernel(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.cols);
        for entries in &self.row_entries {
            let mut acc = Rational::zero();
            for (c, a) in entries {
                let x = &v[*c as usize];
                if !x.is_zero() {
                    acc += x * Rational::from_integer(a.clone());
                }
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }

    /// Exact kernel basis via modular elimination plus exact verification.
    ///
    /// The basis is canonical: one vector per free column fc of the true RREF,
    /// with entry 1 at fc and 0 at every other free column.
    pub fn certified_kernel(&self) -> Vec<Vec<Rational>> {
        // accumulated (prime, kernel residues) sharing the best pivot set
        let mut used: Vec<(u64, ModKernel)> = Vec::new();
        for &p in PRIMES_31.iter() {
            let k = self.kernel_mod(p);
            match used.first() {
                None => used.push((p, k)),
                Some((_, best)) => {
                    if k.pivots.len() > best.pivots.len() {
                        used.clear();
                        used.push((p, k));
                    } else if k.pivots.len() == best.pivots.len() && k.pivots == best.pivots {
                        used.push((p, k));
                    }
                    // lower-rank primes are provably unlucky and dropped
                }
            }
            if let Some(basis) = self.try_reconstruct(&used) {
                return basis;
            }
        }
        // unreachable in practice; fall back to exact sparse elimination
        self.exact_kernel_fallback()
    }

    fn try_reconstruct(&self, used: &[(u64, ModKernel)]) -> Option<Vec<Vec<Rational>>> {
        let (_, first) = used.first()?;
        let dim = first.vectors.len();
        let mut modulus = BigInt::one();
        for (p, _) in used {
            modulus *= BigInt::from(*p);
        }
        let mut basis = Vec::with_capacity(dim);
        for vi in 0..dim {
            let mut v = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let residues: Vec<(u64, u64)> =
                    used.iter().map(|(p, k)| (*p, k.vectors[vi][j])).collect();
                let r = crt(&residues);
                v.push(rational_reconstruct(&r, &modulus)?);
            }
            if !self.in_kernel(&v) {
                return None;
            }
            basis.push(v);
        }
        Some(basis)
    }

    fn exact_kernel_fallback(&self) -> Vec<Vec<Rational>> {
        let rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut r = vec![Rational::zero(); self.cols];
                for (c, v) in &self.row_entries[i] {
                    r[*c as usize] = Rational::from_integer(v.clone());
                }
                r
            })
            .collect();
        super::RationalMatrix::from_rows(rows)
            .expect("rectangular")
            .nullspace()
    }
}

fn crt(residues: &[(u64, u64)]) -> BigInt {
    let mut x = BigInt::from(residues[0].1);
    let mut m = BigInt::from(residues[0].0);
    for &(p, r) in &residues[1..] {
        let pm = BigInt::from(p);
        // x' = x + m * ((r - x) * m^{-1} mod p)
        let mut diff = (BigInt::from(r) - &x) % &pm;
        if diff.is_negative() {
            diff += &pm;
        }
        let m_mod_p = {
            let mut t = &m % &pm;
            if t.is_negative() {
                t += &pm;
            }
            u64::try_from(&t).unwrap()
        };
        let inv = inv_mod(m_mod_p, p);
        let d = u64::try_from(&diff).unwrap();
        let k = mul_mod(d, inv, p);
        x += &m * BigInt::from(k);
        m *= pm;
    }
    x
}

/// Wang-style rational reconstruction: the unique n/d with both heights below
/// sqrt(m/2), if it exists.
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<Rational> {
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor_big(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    let bound = (m / BigInt::from(2)).sqrt();
    while r1 > bound {
        let q = &r0 / &r1;
        let nr = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, nr);
        let nt = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, nt);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    Some(Rational::new(num, den))
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let mut r = self % m;
        if r.is_negative() {
            r += m;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{rat, ratio, RationalMatrix};

    fn sparse_from_i64(rows: Vec<Vec<i64>>) -> SparseIntMatrix {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = SparseIntMatrix::new(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.push(i, j, BigInt::from(v));
            }
        }
        m
    }

    #[test]
    fn certified_kernel_matches_exact_nullspace() {
        let rows = vec![vec![1, 2, 3, 1], vec![2, 4, 6, 2], vec![0, 1, 1, -1]];
        let m = sparse_from_i64(rows.clone());
        let basis = m.certified_kernel();
        let exact = RationalMatrix::from_i64(rows).nullspace();
        assert_eq!(basis.len(), exact.len());
        for v in &basis {
            assert!(m.in_kernel(v));
        }
    }

    #[test]
    fn reconstruct_fraction() {
        // residue of 3/7 mod a prime
        let p = PRIMES_31[0];
        let r = mul_mod(3, inv_mod(7, p), p);
        let q = rational_reconstruct(&BigInt::from(r), &BigInt::from(p)).unwrap();
        assert_eq!(q, ratio(3, 7));
    }

    #[test]
    fn kernel_of_full_rank_is_empty() {
        let m = sparse_from_i64(vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(m.certified_kernel().is_empty());
        assert_eq!(m.kernel_dim_mod(PRIMES_31[0]), 0);
    }

    #[test]
    fn kernel_vector_is_canonical() {
        let m = sparse_from_i64(vec![vec![2, -1, 0], vec![0, 0, 0]]);
        let basis = m.certified_kernel();
        // one pivot at column 0, free columns 1 and 2
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![ratio(1, 2), rat(1), rat(0)]);
        assert_eq!(basis[1], vec![rat(0), rat(0), rat(1)]);
    }
}
