//! Exact 1-D critical point counting for integer exponents.
//!
//! For α a positive integer the critical point equation
//! Σ ζ_i (x − x_i) ρ̃_i^{−α−1} = 0 clears to the polynomial
//! P(x) = Σ ζ_i (x − x_i) Π_{j≠i} ρ̃_j^{α+1} of degree 2(α+1)(l−1)+1, whose
//! distinct real roots a rational Sturm sequence counts exactly. Sites on the
//! line (zero offset) introduce one simple spurious root each at the site,
//! divided out before counting.

use crate::error::{Error, Result};
use crate::poly::RatPoly;
use crate::potential::{Exponent, RestrictedConfig};
use crate::rational;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Sturm1d {
    /// Distinct real critical points of the restricted potential.
    pub count: usize,
    /// Degree of the cleared polynomial (4l−3 when α = 1).
    pub degree: usize,
    /// 2(α+1)(l−1)+1 from the construction.
    pub formal_degree: usize,
    /// Whether any input needed snapping to the 2^40 denominator cap.
    pub snapped: bool,
}

pub fn count_1d_exact(rcfg: &RestrictedConfig, a: &Exponent) -> Result<Sturm1d> {
    if rcfg.dimension() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: rcfg.dimension() });
    }
    let alpha = a
        .as_positive_integer()
        .ok_or(Error::NonIntegerAlpha(a.value()))?;
    let l = rcfg.len();
    let mut snapped = false;
    let mut snap = |x: f64| -> BigRational {
        let q = rational::snap_default(x);
        if rational::to_f64(&q) != x {
            snapped = true;
        }
        q
    };
    let xs: Vec<BigRational> = rcfg
        .projected_sites
        .iter()
        .map(|p| snap(p.coords[0]))
        .collect();
    let ysq: Vec<BigRational> = rcfg.offsets_sq.iter().map(|&y| snap(y)).collect();
    let zetas: Vec<BigRational> = rcfg.values.iter().map(|&z| snap(z)).collect();
    for i in 0..l {
        for j in i + 1..l {
            if xs[i] == xs[j] && ysq[i] == ysq[j] {
                return Err(Error::DuplicateSites(i, j));
            }
        }
    }

    // ρ̃_j(x) = (x − x_j)² + y_j²
    let rho: Vec<RatPoly> = xs
        .iter()
        .zip(&ysq)
        .map(|(x, y)| {
            let lin = RatPoly::linear_root(x);
            lin.mul(&lin).add(&RatPoly::constant(y.clone()))
        })
        .collect();
    let rho_pow: Vec<RatPoly> = rho.iter().map(|r| r.pow(alpha + 1)).collect();

    let mut cleared = RatPoly::zero();
    for i in 0..l {
        let mut term = RatPoly::linear_root(&xs[i]).scale(&zetas[i]);
        for (j, rp) in rho_pow.iter().enumerate() {
            if j != i {
                term = term.mul(rp);
            }
        }
        cleared = cleared.add(&term);
    }
    if cleared.is_zero() {
        return Err(Error::DegenerateRootReport("cleared polynomial is zero".into()));
    }

    let degree = cleared.degree().unwrap();
    let formal_degree = 2 * (alpha as usize + 1) * (l - 1) + 1;
    let total: BigRational = zetas.iter().sum();
    if !total.is_zero() && degree != formal_degree {
        return Err(Error::IdentityViolation(format!(
            "cleared degree {degree} ≠ 2(α+1)(l−1)+1 = {formal_degree}"
        )));
    }

    // sites on the line contribute one simple pole root each
    let mut p = cleared;
    for (k, y) in ysq.iter().enumerate() {
        if y.is_zero() {
            p = p
                .div_exact(&RatPoly::linear_root(&xs[k]))
                .ok_or_else(|| {
                    Error::DegenerateRootReport(format!("site {k} root not simple"))
                })?;
        }
    }

    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Err(Error::DegenerateRootReport(format!(
            "gcd with derivative has degree {}",
            g.degree().unwrap()
        )));
    }

    Ok(Sturm1d { count: p.count_real_roots(), degree, formal_degree, snapped })
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
    fn single_charge() {
        let out = count_1d_exact(&line_cfg(&[(0.0, 1.0, 1.0)]), &Exponent::new(1.0).unwrap())
            .unwrap();
        assert_eq!(out.count, 1);
        assert_eq!(out.degree, 1);
    }

    #[test]
    fn two_charges_alpha_one() {
        let out = count_1d_exact(
            &line_cfg(&[(-1.0, 1.0, 1.0), (1.0, 1.0, 1.0)]),
            &Exponent::new(1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(out.count, 3);
        assert_eq!(out.degree, 5); // 4l−3
        assert_eq!(out.formal_degree, 5);
    }

    #[test]
    fn rejects_non_integer_alpha() {
        assert!(matches!(
            count_1d_exact(&line_cfg(&[(0.0, 1.0, 1.0)]), &Exponent::new(0.5).unwrap()),
            Err(Error::NonIntegerAlpha(_))
        ));
    }

    #[test]
    fn on_line_sites_divided_out() {
        // sites on the line itself: poles, not critical points
        let out = count_1d_exact(
            &line_cfg(&[(-1.0, 0.0, 1.0), (1.0, 0.0, 1.0)]),
            &Exponent::new(1.0).unwrap(),
        )
        .unwrap();
        // positive pair on a line: exactly one equilibrium between the poles
        assert_eq!(out.count, 1);
    }
}
