//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a BTreeMap ordered by graded lexicographic order (total
//! degree first, then x0 > x1 > ...), which fixes the column indexing of every
//! solver matrix and the serialization order of every golden file.

use crate::exactq::{rat, Rational};
use num::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of a monomial; length equals the ambient variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: lower degree first; within a degree, vectors with
    /// larger early exponents come first, so (1,0,0) < (0,1,0) < (0,0,1).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `nvars` variables, listed in
/// the fixed monomial order. Size C(nvars - 1 + d, d).
pub fn monomial_basis(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, k: usize, rem: u32) {
        if k + 1 == cur.len() {
            cur[k] = rem;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=rem).rev() {
            cur[k] = e;
            rec(out, cur, k + 1, rem - e);
        }
        cur[k] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, d);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable counts differ: {0} vs {1}")]
    NvarsMismatch(usize, usize),
    #[error("variable index {0} out of range for {1} variables")]
    VarOutOfRange(usize, usize),
}

/// Sparse polynomial; no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::constant(nvars), c);
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, k), Rational::one());
        p
    }

    /// Linear form c_0 x_0 + ... + c_n x_n.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(coeffs.len(), k), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Homogeneous of degree d: nonzero and every term has total degree d.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        !self.is_zero() && self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, a) in self.terms() {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&(-Rational::one()))
    }

    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_nvars(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m1, c1) in self.terms() {
            out.terms.insert(m1.mul(m), c1 * c);
        }
        out
    }

    /// Formal partial derivative with respect to x_k.
    pub fn partial(&self, k: usize) -> Result<Polynomial, PolyError> {
        if k >= self.nvars {
            return Err(PolyError::VarOutOfRange(k, self.nvars));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            let e = m.0[k];
            if e > 0 {
                let mut exp = m.0.clone();
                exp[k] = e - 1;
                out.add_term(Monomial(exp), c * rat(e as i64));
            }
        }
        Ok(out)
    }

    /// Image under x_k <- replacement (an arbitrary polynomial, usually a
    /// linear form).
    pub fn substitute_var(&self, k: usize, replacement: &Polynomial) -> Result<Polynomial, PolyError> {
        if k >= self.nvars {
            return Err(PolyError::VarOutOfRange(k, self.nvars));
        }
        self.check_nvars(replacement)?;
        // cache powers of the replacement
        let max_pow = self.terms.keys().map(|m| m.0[k]).max().unwrap_or(0);
        let mut powers: Vec<Polynomial> = Vec::with_capacity(max_pow as usize + 1);
        powers.push(Polynomial::one(self.nvars));
        for _ in 0..max_pow {
            let next = powers.last().unwrap().multiply(replacement)?;
            powers.push(next);
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            let e = m.0[k];
            let mut rest = m.0.clone();
            rest[k] = 0;
            let shifted = powers[e as usize].mul_monomial(&Monomial(rest), c);
            out = out.add(&shifted)?;
        }
        Ok(out)
    }

    /// Exact division; None when the divisor does not divide exactly.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, divisor.nvars, "nvars mismatch");
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (lead_m, lead_c) = divisor.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
            if !lead_m.divides(&rm) {
                return None;
            }
            let qm = rm.div(lead_m);
            let qc = &rc / lead_c;
            quot.add_term(qm.clone(), qc.clone());
            let sub = divisor.mul_monomial(&qm, &qc);
            rem = rem.sub(&sub).expect("same nvars");
        }
        Some(quot)
    }

    /// Euler pairing: sum_k x_k * d_k(p). Equals deg(p) * p for homogeneous p.
    pub fn euler_apply(&self) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for k in 0..self.nvars {
            let term = self
                .partial(k)
                .unwrap()
                .mul_monomial(&Monomial::var(self.nvars, k), &Rational::one());
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::NvarsMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (k, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    write!(f, "*x{}", k)?;
                } else if e > 1 {
                    write!(f, "*x{}^{}", k, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::ratio;
    use proptest::prelude::*;

    fn x(nvars: usize, k: usize) -> Polynomial {
        Polynomial::var(nvars, k)
    }

    #[test]
    fn monomial_order_degree_one() {
        let b = monomial_basis(3, 1);
        let exps: Vec<Vec<u32>> = b.iter().map(|m| m.0.clone()).collect();
        assert_eq!(exps, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(monomial_basis(3, 2).len(), 6);
        assert_eq!(monomial_basis(4, 0), vec![Monomial(vec![0, 0, 0, 0])]);
    }

    #[test]
    fn products() {
        let p = x(3, 0).multiply(&x(3, 1)).unwrap();
        assert_eq!(p.num_terms(), 1);
        let sum = x(3, 0).add(&x(3, 1)).unwrap();
        let diff = x(3, 0).sub(&x(3, 1)).unwrap();
        let sq = sum.multiply(&diff).unwrap();
        let expect = x(3, 0)
            .multiply(&x(3, 0))
            .unwrap()
            .sub(&x(3, 1).multiply(&x(3, 1)).unwrap())
            .unwrap();
        assert_eq!(sq, expect);

        // x0 x1 x2 (x0+x1+x2): 3 terms of degree 4
        let tri = x(3, 0)
            .multiply(&x(3, 1))
            .unwrap()
            .multiply(&x(3, 2))
            .unwrap();
        let lin = Polynomial::linear(&[rat(1), rat(1), rat(1)]);
        let p = tri.multiply(&lin).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert!(p.is_homogeneous_of(4));
    }

    #[test]
    fn partials() {
        // d0(x0^2 x1) = 2 x0 x1
        let p = x(3, 0).multiply(&x(3, 0)).unwrap().multiply(&x(3, 1)).unwrap();
        let d = p.partial(0).unwrap();
        assert_eq!(d, x(3, 0).multiply(&x(3, 1)).unwrap().scale(&rat(2)));
        assert!(x(3, 0).multiply(&x(3, 1)).unwrap().partial(2).unwrap().is_zero());
        // product-rule hand check: d0(x0x1x2(x0+x1+x2)) = 2x0x1x2 + x1^2 x2 + x1 x2^2
        let tri = x(3, 0).multiply(&x(3, 1)).unwrap().multiply(&x(3, 2)).unwrap();
        let lin = Polynomial::linear(&[rat(1), rat(1), rat(1)]);
        let p = tri.multiply(&lin).unwrap();
        let d0 = p.partial(0).unwrap();
        let mut expect = x(3, 0).multiply(&x(3, 1)).unwrap().multiply(&x(3, 2)).unwrap().scale(&rat(2));
        expect = expect
            .add(&x(3, 1).multiply(&x(3, 1)).unwrap().multiply(&x(3, 2)).unwrap())
            .unwrap();
        expect = expect
            .add(&x(3, 1).multiply(&x(3, 2)).unwrap().multiply(&x(3, 2)).unwrap())
            .unwrap();
        assert_eq!(d0, expect);
        assert!(p.partial(3).is_err());
    }

    #[test]
    fn substitution() {
        // x1 <- x0 in x0 - x1
        let p = x(3, 0).sub(&x(3, 1)).unwrap();
        assert!(p.substitute_var(1, &x(3, 0)).unwrap().is_zero());
        // x0 <- 2 x1 in x0^2
        let p = x(3, 0).multiply(&x(3, 0)).unwrap();
        let r = p.substitute_var(0, &x(3, 1).scale(&rat(2))).unwrap();
        assert_eq!(r, x(3, 1).multiply(&x(3, 1)).unwrap().scale(&rat(4)));
        // a_i x_i + a_j x_j vanishes under x_i <- -(a_j/a_i) x_j
        let form = Polynomial::linear(&[ratio(3, 2), rat(5), rat(0)]);
        let repl = x(3, 1).scale(&(-rat(5) / ratio(3, 2)));
        assert!(form.substitute_var(0, &repl).unwrap().is_zero());
    }

    #[test]
    fn exact_division() {
        let f = x(3, 0).add(&x(3, 1)).unwrap();
        let g = x(3, 0).sub(&x(3, 2)).unwrap();
        let p = f.multiply(&g).unwrap();
        assert_eq!(p.div_exact(&f).unwrap(), g);
        assert_eq!(p.div_exact(&g).unwrap(), f);
        assert!(p.div_exact(&x(3, 1)).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, 3), -4i64..=4), 0..5).prop_map(|ts| {
            let mut p = Polynomial::zero(3);
            for (e, c) in ts {
                p.add_term(Monomial(e), rat(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mul_commutes_and_associates(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn euler_identity_on_products_of_linear_forms(coeffs in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..5)) {
            let mut f = Polynomial::one(3);
            let mut deg = 0u32;
            for cs in &coeffs {
                if cs.iter().all(|&c| c == 0) { continue; }
                let l = Polynomial::linear(&[rat(cs[0]), rat(cs[1]), rat(cs[2])]);
                f = f.multiply(&l).unwrap();
                deg += 1;
            }
            if !f.is_zero() {
                prop_assert_eq!(f.euler_apply(), f.scale(&rat(deg as i64)));
            }
        }

        #[test]
        fn vanishing_under_substitution_iff_divisible(
            cs in prop::collection::vec((-3i64..=3, -3i64..=3), 1..4),
            extra in prop::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3), 0..2),
        ) {
            // build f as a product of forms in (x0, x1) and general forms
            let mut f = Polynomial::one(3);
            for &(a, b) in &cs {
                if a == 0 && b == 0 { continue; }
                f = f.multiply(&Polynomial::linear(&[rat(a), rat(b), rat(0)])).unwrap();
            }
            for &(a, b, c) in &extra {
                if a == 0 && b == 0 && c == 0 { continue; }
                f = f.multiply(&Polynomial::linear(&[rat(a), rat(b), rat(c)])).unwrap();
            }
            // test divisibility by x0 - 2 x1 via substitution x0 <- 2 x1
            let div = Polynomial::linear(&[rat(1), rat(-2), rat(0)]);
            let sub = f.substitute_var(0, &Polynomial::var(3, 1).scale(&rat(2))).unwrap();
            prop_assert_eq!(sub.is_zero(), f.div_exact(&div).is_some());
        }
    }
}
