//! Dense univariate polynomials over `BigRational` with the signed-remainder
//! (Sturm) machinery used by the exact 1-D critical point counter.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// coeffs[i] is the coefficient of x^i; no trailing zeros are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// x − r
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        RatPoly::new(out)
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> RatPoly {
        let mut base = self.clone();
        let mut acc = RatPoly::constant(BigRational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer((i as i64 + 1).into()))
                .collect(),
        )
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dlead = divisor.leading().unwrap().clone();
        let ddeg = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < divisor.coeffs.len() {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - ddeg];
        while rem.len() >= divisor.coeffs.len() {
            let k = rem.len() - 1 - ddeg;
            let q = rem.last().unwrap() / &dlead;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let v = &q * d;
                rem[k + j] -= v;
            }
            quot[k] = q;
            // the leading entry is now exactly zero
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    /// Exact division; None if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.leading().cloned() {
            a = a.scale(&l.recip());
        }
        a
    }

    /// Sturm chain p₀ = p, p₁ = p′, p_{k+1} = −rem(p_{k−1}, p_k).
    pub fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                return chain;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                return chain;
            }
            chain.push(r.neg());
        }
    }

    /// Count of distinct real roots in (−∞, ∞). Requires a squarefree input
    /// for the classical theorem; callers gcd-check first.
    pub fn count_real_roots(&self) -> usize {
        let chain = self.sturm_chain();
        sign_variations(&signs_at_infinity(&chain, false))
            - sign_variations(&signs_at_infinity(&chain, true))
    }

    /// Count of distinct real roots in the half-open interval (a, b].
    pub fn count_roots_between(&self, a: &BigRational, b: &BigRational) -> usize {
        let chain = self.sturm_chain();
        let sa: Vec<Ordering> = chain.iter().map(|p| rat_sign(&p.eval(a))).collect();
        let sb: Vec<Ordering> = chain.iter().map(|p| rat_sign(&p.eval(b))).collect();
        sign_variations(&sa) - sign_variations(&sb)
    }
}

fn rat_sign(q: &BigRational) -> Ordering {
    if q.is_zero() {
        Ordering::Equal
    } else if q.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn signs_at_infinity(chain: &[RatPoly], positive: bool) -> Vec<Ordering> {
    chain
        .iter()
        .map(|p| match (p.leading(), p.degree()) {
            (Some(l), Some(d)) => {
                let s = rat_sign(l);
                if positive || d % 2 == 0 {
                    s
                } else {
                    s.reverse()
                }
            }
            _ => Ordering::Equal,
        })
        .collect()
}

fn sign_variations(signs: &[Ordering]) -> usize {
    let mut count = 0;
    let mut last: Option<Ordering> = None;
    for &s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_i64, ratio};

    fn poly(cs: &[i64]) -> RatPoly {
        RatPoly::new(cs.iter().map(|&c| from_i64(c)).collect())
    }

    #[test]
    fn div_rem_roundtrip() {
        let p = poly(&[2, -3, 0, 5, 1]);
        let d = poly(&[1, 1, 2]);
        let (q, r) = p.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), p);
        assert!(r.degree().unwrap_or(0) < d.degree().unwrap());
    }

    #[test]
    fn sturm_counts_roots() {
        // (x^2 - 2)(x - 3): three real roots
        let p = poly(&[-2, 0, 1]).mul(&poly(&[-3, 1]));
        assert_eq!(p.count_real_roots(), 3);
        // x^2 + 1: none
        assert_eq!(poly(&[1, 0, 1]).count_real_roots(), 0);
        // roots of x^2-2 in (0, 2]: one
        assert_eq!(
            poly(&[-2, 0, 1]).count_roots_between(&from_i64(0), &from_i64(2)),
            1
        );
    }

    #[test]
    fn gcd_detects_repeated_roots() {
        let p = poly(&[1, 1]).pow(2).mul(&poly(&[-1, 1]));
        let g = p.gcd(&p.derivative());
        assert_eq!(g, RatPoly::new(vec![from_i64(1), from_i64(1)]));
        assert_eq!(g.eval(&ratio(-1, 1)), from_i64(0));
    }
}
