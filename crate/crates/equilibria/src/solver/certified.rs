//! Rigorous 1-D critical point counting by adaptive bisection with interval
//! enclosures of the derivative.
//!
//! The counted function is W(x) = Σ ζ_i (x − x_i) ρ̃_i^{−α−1} (the derivative
//! of the restricted potential up to the factor −2α). Enclosures widen every
//! elementary f64 operation outward by one ulp and pad exp/ln results with a
//! 1e−13 relative margin, so the certificate is exact modulo faithful (≤1 ulp)
//! libm rounding.

use crate::error::{Error, Result};
use crate::potential::{Exponent, RestrictedConfig};
use crate::solver::MorseCensus;
use serde::Serialize;

/// Relative slack covering libm rounding in exp(−p·ln ρ).
const EXP_MARGIN: f64 = 1e-13;
/// Bisection floor as a fraction of the search interval length.
const FLOOR_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    fn widen(self) -> Self {
        Interval { lo: self.lo.next_down(), hi: self.hi.next_up() }
    }

    pub fn add(self, o: Interval) -> Self {
        Interval { lo: self.lo + o.lo, hi: self.hi + o.hi }.widen()
    }

    pub fn sub(self, o: Interval) -> Self {
        Interval { lo: self.lo - o.hi, hi: self.hi - o.lo }.widen()
    }

    pub fn mul(self, o: Interval) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval {
            lo: c.iter().cloned().fold(f64::INFINITY, f64::min),
            hi: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
        .widen()
    }

    pub fn scale(self, c: f64) -> Self {
        self.mul(Interval::point(c))
    }

    pub fn sign(self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    fn width(self) -> f64 {
        self.hi - self.lo
    }
}

/// (x − xi)² + y² over an interval: the square is monotone away from xi.
fn rho_iv(x: Interval, xi: f64, ysq: f64) -> Interval {
    let dlo = (x.lo - xi).next_down();
    let dhi = (x.hi - xi).next_up();
    let sq_hi = (dlo * dlo).max(dhi * dhi).next_up();
    let sq_lo = if dlo <= 0.0 && dhi >= 0.0 {
        0.0
    } else {
        (dlo * dlo).min(dhi * dhi).next_down().max(0.0)
    };
    Interval { lo: (sq_lo + ysq).next_down().max(0.0), hi: (sq_hi + ysq).next_up() }
}

/// ρ^{−p} for ρ.lo > 0, p > 0: antitone in ρ.
fn pow_neg_iv(rho: Interval, p: f64) -> Interval {
    debug_assert!(rho.lo > 0.0);
    let lo = (-p * rho.hi.ln()).exp();
    let hi = (-p * rho.lo.ln()).exp();
    Interval {
        lo: (lo * (1.0 - EXP_MARGIN)).next_down().max(0.0),
        hi: (hi * (1.0 + EXP_MARGIN)).next_up(),
    }
}

fn w_iv(rcfg: &RestrictedConfig, alpha: f64, x: Interval) -> Interval {
    let mut acc = Interval::point(0.0);
    for i in 0..rcfg.len() {
        let xi = rcfg.projected_sites[i].coords[0];
        let rho = rho_iv(x, xi, rcfg.offsets_sq[i]);
        let pw = pow_neg_iv(rho, alpha + 1.0);
        let lin = Interval { lo: (x.lo - xi).next_down(), hi: (x.hi - xi).next_up() };
        acc = acc.add(lin.mul(pw).scale(rcfg.values[i]));
    }
    acc
}

/// W′(x) = Σ ζ_i ρ̃_i^{−α−2} (ρ̃_i − 2(α+1)(x−x_i)²).
fn w_prime_iv(rcfg: &RestrictedConfig, alpha: f64, x: Interval) -> Interval {
    let mut acc = Interval::point(0.0);
    for i in 0..rcfg.len() {
        let xi = rcfg.projected_sites[i].coords[0];
        let rho = rho_iv(x, xi, rcfg.offsets_sq[i]);
        let pw = pow_neg_iv(rho, alpha + 2.0);
        let lin = Interval { lo: (x.lo - xi).next_down(), hi: (x.hi - xi).next_up() };
        let lin_sq = lin.mul(lin);
        let inner = rho.sub(lin_sq.scale(2.0 * (alpha + 1.0)));
        acc = acc.add(pw.mul(inner).scale(rcfg.values[i]));
    }
    acc
}

/// A certified isolating interval for one critical point of the restricted
/// potential; `index` is 1 for a maximum, 0 for a minimum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certified1d {
    pub count: usize,
    pub census: MorseCensus,
    pub roots: Vec<RootInterval>,
    pub search_lo: f64,
    pub search_hi: f64,
}

fn definite_sign_at(rcfg: &RestrictedConfig, alpha: f64, x: f64) -> Option<i8> {
    w_iv(rcfg, alpha, Interval::point(x)).sign()
}

/// Count the critical points of the 1-D restricted potential on the hull of
/// the projected sites inflated by 10%.
pub fn count_1d_certified(rcfg: &RestrictedConfig, a: &Exponent) -> Result<Certified1d> {
    if rcfg.dimension() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: rcfg.dimension() });
    }
    let alpha = a.value();
    let xs: Vec<f64> = rcfg.projected_sites.iter().map(|p| p.coords[0]).collect();
    let (xmin, xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let width = xmax - xmin;
    let mut pad = if width > 0.0 { 0.1 * width } else { 1.0 + 0.1 * xmin.abs() };

    // endpoints must carry definite signs; widen a few times if not
    let (mut lo, mut hi, mut s_lo, mut s_hi) = (0.0, 0.0, None, None);
    for _ in 0..8 {
        lo = xmin - pad;
        hi = xmax + pad;
        s_lo = definite_sign_at(rcfg, alpha, lo);
        s_hi = definite_sign_at(rcfg, alpha, hi);
        if s_lo.is_some() && s_hi.is_some() {
            break;
        }
        pad *= 1.5;
    }
    let (Some(s_lo), Some(s_hi)) = (s_lo, s_hi) else {
        return Err(Error::Unresolved { intervals: vec![(xmin - pad, xmax + pad)] });
    };

    let floor = FLOOR_FRACTION * (hi - lo);
    let mut roots = Vec::new();
    let mut unresolved = Vec::new();
    let mut stack = vec![(lo, hi, s_lo, s_hi)];
    while let Some((a_lo, a_hi, sa, sb)) = stack.pop() {
        let iv = Interval::new(a_lo, a_hi);
        let w = w_iv(rcfg, alpha, iv);
        if let Some(s) = w.sign() {
            debug_assert!(s == sa && s == sb);
            continue;
        }
        if w_prime_iv(rcfg, alpha, iv).sign().is_some() {
            // monotone: exactly one root iff the endpoint signs differ
            if sa != sb {
                roots.push(RootInterval {
                    lo: a_lo,
                    hi: a_hi,
                    index: if sa < 0 { 1 } else { 0 },
                });
            }
            continue;
        }
        if iv.width() < floor {
            unresolved.push((a_lo, a_hi));
            continue;
        }
        // midpoint with a definite sign so roots never sit on cut points
        let mid0 = 0.5 * (a_lo + a_hi);
        let step = iv.width() / 64.0;
        let mut cut = None;
        'search: for k in 0..16 {
            for m in [mid0 + k as f64 * step / 4.0, mid0 - k as f64 * step / 4.0] {
                if m > a_lo && m < a_hi {
                    if let Some(s) = definite_sign_at(rcfg, alpha, m) {
                        cut = Some((m, s));
                        break 'search;
                    }
                }
            }
        }
        match cut {
            Some((m, sm)) => {
                stack.push((a_lo, m, sa, sm));
                stack.push((m, a_hi, sm, sb));
            }
            None => unresolved.push((a_lo, a_hi)),
        }
    }
    if !unresolved.is_empty() {
        return Err(Error::Unresolved { intervals: unresolved });
    }
    roots.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let census = MorseCensus::from_indices(roots.iter().map(|r| r.index));
    Ok(Certified1d { count: roots.len(), census, roots, search_lo: lo, search_hi: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn line_cfg(data: &[(f64, f64, f64)]) -> RestrictedConfig {
        RestrictedConfig {
            projected_sites: data.iter().map(|&(x, _, _)| Point::new(vec![x])).collect(),
            offsets_sq: data.iter().map(|&(_, y, _)| y * y).collect(),
            values: data.iter().map(|&(_, _, z)| z).collect(),
        }
    }

    #[test]
    fn single_charge_has_one_maximum() {
        let rcfg = line_cfg(&[(0.5, 2.0, 1.0)]);
        let out = count_1d_certified(&rcfg, &Exponent::new(1.0).unwrap()).unwrap();
        assert_eq!(out.count, 1);
        assert_eq!(out.roots[0].index, 1);
        assert!(out.roots[0].lo <= 0.5 && 0.5 <= out.roots[0].hi);
    }

    #[test]
    fn symmetric_pair_has_odd_count_with_middle_root() {
        let rcfg = line_cfg(&[(-1.0, 1.0, 1.0), (1.0, 1.0, 1.0)]);
        let out = count_1d_certified(&rcfg, &Exponent::new(1.0).unwrap()).unwrap();
        assert_eq!(out.count % 2, 1);
        assert!(out
            .roots
            .iter()
            .any(|r| r.lo <= 0.0 && 0.0 <= r.hi));
    }

    #[test]
    fn five_charge_line_counts_match_remark_values() {
        let rcfg = line_cfg(&[
            (-30.0, 5.0, 1.0),
            (-20.0, 7.0, 1.0),
            (-2.0, 12.0, 1.0),
            (20.0, 7.0, 1.0),
            (30.0, 5.0, 1.0),
        ]);
        let counts: Vec<usize> = [0.1, 0.2, 0.3, 1.64, 1.7]
            .iter()
            .map(|&al| count_1d_certified(&rcfg, &Exponent::new(al).unwrap()).unwrap().count)
            .collect();
        assert_eq!(counts, vec![3, 7, 3, 7, 9]);
    }

    #[test]
    fn interval_arithmetic_encloses() {
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(-3.0, 0.5);
        let p = a.mul(b);
        assert!(p.lo <= -6.0 && p.hi >= 1.0);
        let r = rho_iv(Interval::new(-1.0, 1.0), 0.0, 4.0);
        assert!(r.lo <= 4.0 && r.hi >= 5.0);
        assert_eq!(Interval::new(0.5, 1.0).sign(), Some(1));
        assert_eq!(Interval::new(-1.0, 1.0).sign(), None);
    }
}
