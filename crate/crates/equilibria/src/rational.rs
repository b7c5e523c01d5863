//! Exact rational helpers: conversions between f64 and `BigRational`, and the
//! denominator-capped snapping used before exact geometric predicates.

use num_bigint::{BigInt, ToBigInt};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Denominator cap for snapping float inputs ahead of exact processing.
pub const SNAP_DENOMINATOR: u64 = 1 << 40;

/// Denominator cap for *detecting* an intended rational inside an f64. Must
/// stay small enough that a best approximant to an irrational (error ~ 1/q²)
/// misses the nearest f64; at 10⁶ the error ≥ ~4e−13 ≫ one ulp.
pub const DETECT_DENOMINATOR: u64 = 1_000_000;

/// The exact rational value of a finite f64 (every finite f64 is rational).
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation to `x` with denominator ≤ `max_den`
/// (continued-fraction convergents and semiconvergents; ties prefer the
/// smaller denominator). Deterministic, so exact predicates downstream see
/// identical data across runs.
pub fn snap(x: f64, max_den: u64) -> BigRational {
    let target = exact(x);
    let cap: BigInt = max_den.to_bigint().unwrap();
    if target.denom() <= &cap {
        return target;
    }
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur) = (target.trunc().to_integer(), BigInt::one());
    let mut frac = &target - BigRational::from(p_cur.clone());
    if target.is_negative() && !frac.is_zero() {
        // floor, not trunc, so the CF expansion has positive partial quotients
        p_cur -= 1;
        frac = &target - BigRational::from(p_cur.clone());
    }
    let mut rem = frac;
    loop {
        if rem.is_zero() {
            return BigRational::new(p_cur, q_cur);
        }
        let inv = rem.recip();
        let a = inv.floor().to_integer();
        rem = inv - BigRational::from(a.clone());
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        if q_next > cap {
            // best semiconvergent under the cap
            let k = (&cap - &q_prev) / &q_cur;
            let semi = BigRational::new(&k * &p_cur + &p_prev, &k * &q_cur + &q_prev);
            let conv = BigRational::new(p_cur, q_cur);
            let d_semi = (&semi - &target).abs();
            let d_conv = (&conv - &target).abs();
            return if d_semi < d_conv { semi } else { conv };
        }
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
}

/// Snap with the default cap.
pub fn snap_default(x: f64) -> BigRational {
    snap(x, SNAP_DENOMINATOR)
}

/// Exact rational form of `x` if a capped-denominator approximant rounds back
/// bit-exactly to `x`. Detects values like 0.2 → 1/5 or 7/3 while rejecting
/// floats that only approximate an irrational.
pub fn detect_rational(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let q = snap(x, max_den);
    (to_f64(&q) == x).then_some(q)
}

pub fn from_i64(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_recovers_decimal_fractions() {
        assert_eq!(snap_default(0.2), ratio(1, 5));
        assert_eq!(snap_default(-0.2), ratio(-1, 5));
        assert_eq!(snap_default(7.0 / 3.0), ratio(7, 3));
        assert_eq!(snap_default(0.5), ratio(1, 2));
        assert_eq!(snap_default(3.0), from_i64(3));
    }

    #[test]
    fn detect_rational_rejects_irrationals() {
        assert_eq!(detect_rational(0.2, DETECT_DENOMINATOR), Some(ratio(1, 5)));
        assert_eq!(detect_rational(2.25, DETECT_DENOMINATOR), Some(ratio(9, 4)));
        assert_eq!(detect_rational(7.0 / 3.0, DETECT_DENOMINATOR), Some(ratio(7, 3)));
        assert!(detect_rational(std::f64::consts::SQRT_2, DETECT_DENOMINATOR).is_none());
        assert!(detect_rational(3.0_f64.sqrt() / 2.0, DETECT_DENOMINATOR).is_none());
    }

    #[test]
    fn snap_is_best_approximation() {
        // pi with cap 113 must give 355/113
        let q = snap(std::f64::consts::PI, 113);
        assert_eq!(q, ratio(355, 113));
    }
}
