//! Sparse bivariate polynomials in (f, g) with exact rational coefficients,
//! plus Gaussian-rational arithmetic for evaluating at complex points of ℚ(i).

pub mod univariate;

pub use univariate::RatPoly;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair: (power of f, power of g).
pub type Exponents = (u32, u32);

/// terms maps (i, j) → coefficient of f^i g^j; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<Exponents, BigRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivariatePoly { terms }
    }

    pub fn var_f() -> Self {
        Self::monomial(1, 0, BigRational::one())
    }

    pub fn var_g() -> Self {
        Self::monomial(0, 1, BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<Exponents> {
        self.terms.keys().copied().collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    fn insert_add(&mut self, key: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.insert_add(k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BivariatePoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.insert_add((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivariatePoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, i: u32, j: u32) -> Self {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + i, b + j), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
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

    pub fn diff_f(&self) -> Self {
        let mut out = BivariatePoly::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.insert_add((i - 1, j), c * BigRational::from_integer(i.into()));
            }
        }
        out
    }

    pub fn diff_g(&self) -> Self {
        let mut out = BivariatePoly::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.insert_add((i, j - 1), c * BigRational::from_integer(j.into()));
            }
        }
        out
    }

    pub fn eval(&self, f: &BigRational, g: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * rat_pow(f, i) * rat_pow(g, j);
        }
        acc
    }

    pub fn eval_f64(&self, f: f64, g: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_f64().unwrap_or(f64::NAN) * f.powi(i as i32) * g.powi(j as i32))
            .sum()
    }

    pub fn eval_gaussian(&self, f: &GaussianRational, g: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (&(i, j), c) in &self.terms {
            let term = f.pow(i).mul(&g.pow(j)).scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// Terms with the given f-exponent, as a polynomial in g (used for the
    /// coordinate-axis comparisons).
    pub fn slice_f(&self, i: u32) -> BivariatePoly {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, _), _)| a == i)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    pub fn slice_g(&self, j: u32) -> BivariatePoly {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, b), _)| b == j)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// Exact multivariate division; None if any reduction step leaves a
    /// remainder. Reduction is by the lex-leading term of the divisor.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (&lead_exp, lead_coeff) = divisor.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = BivariatePoly::zero();
        while let Some((&(i, j), c)) = rem.terms.iter().next_back() {
            let (li, lj) = lead_exp;
            if i < li || j < lj {
                return None;
            }
            let q = c / lead_coeff;
            let qe = (i - li, j - lj);
            quot.insert_add(qe, q.clone());
            let piece = divisor.mul(&BivariatePoly::monomial(qe.0, qe.1, q));
            rem = rem.sub(&piece);
        }
        Some(quot)
    }

    /// Treat the polynomial as univariate in f (coefficients in g) and reduce
    /// modulo `m_f`(f), then as univariate in g modulo `m_g`(g). The result is
    /// zero iff self vanishes on every common root of (m_f, m_g) when both
    /// moduli are squarefree.
    pub fn reduce_mod(&self, m_f: &RatPoly, m_g: &RatPoly) -> BivariatePoly {
        // collect as univariate in f with BivariatePoly coefficients in g
        let deg_f = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0) as usize;
        let mut rows: Vec<BivariatePoly> = vec![BivariatePoly::zero(); deg_f + 1];
        for (&(i, j), c) in &self.terms {
            rows[i as usize].insert_add((0, j), c.clone());
        }
        let reduced_f = reduce_rows(rows, m_f);
        // now reduce each f-row in g
        let mut out = BivariatePoly::zero();
        for (fi, row) in reduced_f.into_iter().enumerate() {
            let deg_g = row.terms.keys().map(|&(_, j)| j).max().unwrap_or(0) as usize;
            let mut cols = vec![BigRational::zero(); deg_g + 1];
            for (&(_, j), c) in &row.terms {
                cols[j as usize] = c.clone();
            }
            let rp = RatPoly::new(cols);
            let (_, r) = rp.div_rem(m_g);
            for (j, c) in r.coeffs().iter().enumerate() {
                out.insert_add((fi as u32, j as u32), c.clone());
            }
        }
        out
    }
}

/// Polynomial remainder of Σ rows[i]·f^i modulo m(f), rows carrying g-content.
fn reduce_rows(mut rows: Vec<BivariatePoly>, m: &RatPoly) -> Vec<BivariatePoly> {
    let md = m.degree().expect("nonzero modulus");
    let lead = m.leading().unwrap().clone();
    while rows.len() > md {
        let top = rows.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let k = rows.len() - md;
        let factor = top.scale(&lead.recip());
        for (off, c) in m.coeffs().iter().enumerate().take(md) {
            let piece = factor.scale(&(-c));
            rows[k + off] = rows[k + off].add(&piece);
        }
    }
    rows
}

fn rat_pow(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(w, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(w, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(w, "-")?;
            }
            write!(w, "{}", c.abs())?;
            if i > 0 {
                write!(w, "*f^{i}")?;
            }
            if j > 0 {
                write!(w, "*g^{j}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// An element of ℚ(i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(&self.re * c, &self.im * c)
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        Self::new(&self.re / &n, -&self.im / &n)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_i64, ratio};

    #[test]
    fn arithmetic_and_division() {
        // (1 + f + g)^2 divided back
        let s = BivariatePoly::one()
            .add(&BivariatePoly::var_f())
            .add(&BivariatePoly::var_g());
        let sq = s.mul(&s);
        assert_eq!(sq.div_exact(&s), Some(s.clone()));
        assert_eq!(sq.coeff(1, 1), from_i64(2));
        assert!(sq.sub(&sq).is_zero());
        // non-exact division
        let t = s.add(&BivariatePoly::one());
        assert_eq!(sq.div_exact(&t), None);
    }

    #[test]
    fn derivatives_and_eval() {
        // p = 3 f^2 g - g^3
        let p = BivariatePoly::monomial(2, 1, from_i64(3))
            .add(&BivariatePoly::monomial(0, 3, from_i64(-1)));
        assert_eq!(p.diff_f(), BivariatePoly::monomial(1, 1, from_i64(6)));
        assert_eq!(
            p.diff_g(),
            BivariatePoly::monomial(2, 0, from_i64(3))
                .add(&BivariatePoly::monomial(0, 2, from_i64(-3)))
        );
        assert_eq!(p.eval(&from_i64(2), &ratio(1, 2)), ratio(47, 8));
    }

    #[test]
    fn gaussian_eval_detects_roots() {
        // f^2 + 1 vanishes at f = i
        let p = BivariatePoly::monomial(2, 0, from_i64(1)).add(&BivariatePoly::one());
        let i = GaussianRational::new(from_i64(0), from_i64(1));
        assert!(p.eval_gaussian(&i, &GaussianRational::zero()).is_zero());
    }

    #[test]
    fn reduce_mod_vanishes_on_common_roots() {
        // p = (f^2+1)*g + (g^2-2)*f vanishes mod (f^2+1, g^2-2)
        let mf = RatPoly::new(vec![from_i64(1), from_i64(0), from_i64(1)]);
        let mg = RatPoly::new(vec![from_i64(-2), from_i64(0), from_i64(1)]);
        let p = BivariatePoly::monomial(2, 1, from_i64(1))
            .add(&BivariatePoly::monomial(0, 1, from_i64(1)))
            .add(&BivariatePoly::monomial(1, 2, from_i64(1)))
            .add(&BivariatePoly::monomial(1, 0, from_i64(-2)));
        assert!(p.reduce_mod(&mf, &mg).is_zero());
        // and f*g does not
        assert!(!BivariatePoly::monomial(1, 1, from_i64(1))
            .reduce_mod(&mf, &mg)
            .is_zero());
    }
}
