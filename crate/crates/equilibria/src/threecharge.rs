//! The symbolic three-charge pipeline: charges ζ₁, ζ₂, 1 at (0,0), (1,0),
//! (a,b) reduce, after the substitution f = (ρ₁/ρ₂)^{α+1}, g = (ρ₁/ρ₃)^{α+1},
//! to intersections of two curves γ₁, γ₂ in the positive quadrant. Two
//! Rolle-style reductions produce polynomials Q and R whose common-zero count
//! bounds the intersections; the mixed volume of NP(Q) and NP(R̃) with the
//! solutions known to lie outside the quadrant assembles the bound
//! 2 + 0 + 28 − 18 = 12.
//!
//! All symbolic work is exact over ℚ (parameters snapped to denominators
//! ≤ 2^40, α required rational); the curve intersections and the located
//! outside solutions are numeric cross-checks.

use crate::bounds::{hexagon, mixed_volume_2x, newton_polygon, support_in_hexagon};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::geometry::Point;
use crate::poly::{BivariatePoly, GaussianRational, RatPoly};
use crate::potential::{self, ChargeConfig, Exponent};
use crate::rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct ThreeChargeParams {
    /// charge at the origin
    pub zeta1: f64,
    /// charge at (1, 0); the third charge at (a, b) is normalized to 1
    pub zeta2: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: Exponent,
}

impl ThreeChargeParams {
    pub fn new(zeta1: f64, zeta2: f64, a: f64, b: f64, alpha: Exponent) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::CollinearSites);
        }
        if zeta1 <= 0.0 || zeta2 <= 0.0 {
            return Err(Error::InvalidConfig("zeta1, zeta2 must be positive".into()));
        }
        if alpha.value() <= 0.0 {
            return Err(Error::InvalidConfig("pipeline needs alpha > 0".into()));
        }
        Ok(ThreeChargeParams { zeta1, zeta2, a, b, alpha })
    }

    /// Normalize a 3-charge planar configuration by the similarity taking
    /// site 1 to the origin and site 2 to (1, 0), with charges scaled so the
    /// third is 1. Returns the parameters and the normalized configuration
    /// the pipeline's points refer to.
    pub fn from_config(cfg: &ChargeConfig, alpha: Exponent) -> Result<(Self, ChargeConfig)> {
        if cfg.len() != 3 {
            return Err(Error::InvalidConfig("pipeline needs exactly 3 charges".into()));
        }
        if !cfg.all_positive() {
            return Err(Error::InvalidConfig("pipeline needs positive charges".into()));
        }
        let (flat, _) = potential::normalize_dimension(cfg);
        if flat.dimension() == 1 {
            return Err(Error::CollinearSites);
        }
        if flat.dimension() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: flat.dimension() });
        }
        let p1 = &flat.sites[0];
        let p2 = &flat.sites[1];
        let p3 = &flat.sites[2];
        let d = p1.dist(p2);
        let e1 = [(p2.coords[0] - p1.coords[0]) / d, (p2.coords[1] - p1.coords[1]) / d];
        let e2 = [-e1[1], e1[0]];
        let r3 = [p3.coords[0] - p1.coords[0], p3.coords[1] - p1.coords[1]];
        let a = (r3[0] * e1[0] + r3[1] * e1[1]) / d;
        let b = (r3[0] * e2[0] + r3[1] * e2[1]) / d;
        let z3 = flat.values[2];
        let params =
            ThreeChargeParams::new(flat.values[0] / z3, flat.values[1] / z3, a, b, alpha)?;
        let normalized = params.config();
        Ok((params, normalized))
    }

    /// The normalized configuration ((0,0), (1,0), (a,b)) with charges
    /// (ζ₁, ζ₂, 1).
    pub fn config(&self) -> ChargeConfig {
        ChargeConfig::new(
            vec![
                Point::new(vec![0.0, 0.0]),
                Point::new(vec![1.0, 0.0]),
                Point::new(vec![self.a, self.b]),
            ],
            vec![self.zeta1, self.zeta2, 1.0],
        )
        .expect("validated parameters")
    }
}

/// The quadratics ξ₁, ξ₂, ξ₃ with exact rational coefficients, plus the
/// snapped parameters every later stage reuses.
#[derive(Debug, Clone)]
pub struct XiSystem {
    pub xi1: BivariatePoly,
    pub xi2: BivariatePoly,
    pub xi3: BivariatePoly,
    pub z1: BigRational,
    pub z2: BigRational,
    pub a: BigRational,
    pub b: BigRational,
    pub alpha: BigRational,
}

fn mono(i: u32, j: u32, c: BigRational) -> BivariatePoly {
    BivariatePoly::monomial(i, j, c)
}

/// Univariate coefficients (c₂, c₁, c₀) of a polynomial depending only on f.
fn univariate_in_f(p: &BivariatePoly) -> (BigRational, BigRational, BigRational) {
    (p.coeff(2, 0), p.coeff(1, 0), p.coeff(0, 0))
}

fn univariate_in_g(p: &BivariatePoly) -> (BigRational, BigRational, BigRational) {
    (p.coeff(0, 2), p.coeff(0, 1), p.coeff(0, 0))
}

/// Strict positivity of c₂t² + c₁t + c₀ on ℝ: c₂ > 0 and c₁² − 4c₂c₀ < 0.
fn strictly_positive_quadratic(c2: &BigRational, c1: &BigRational, c0: &BigRational) -> bool {
    c2.is_positive() && (c1 * c1 - BigRational::from_integer(4.into()) * c2 * c0).is_negative()
}

pub fn build_xi(params: &ThreeChargeParams) -> Result<XiSystem> {
    if params.b == 0.0 {
        return Err(Error::CollinearSites);
    }
    let alpha = params
        .alpha
        .rational_form()
        .cloned()
        .ok_or(Error::NonRationalAlpha(params.alpha.value()))?;
    let z1 = rational::snap_default(params.zeta1);
    let z2 = rational::snap_default(params.zeta2);
    let a = rational::snap_default(params.a);
    let b = rational::snap_default(params.b);
    if b.is_zero() {
        return Err(Error::CollinearSites);
    }
    let one = BigRational::one;
    let bsq = &b * &b;

    // ξ₁ = (a g + ζ₂ f)² + b² g²
    let lin1 = mono(0, 1, a.clone()).add(&mono(1, 0, z2.clone()));
    let xi1 = lin1.mul(&lin1).add(&mono(0, 2, bsq.clone()));
    // ξ₂ = ((a−1) g − ζ₁)² + b² g²
    let lin2 = mono(0, 1, &a - one()).add(&mono(0, 0, -z1.clone()));
    let xi2 = lin2.mul(&lin2).add(&mono(0, 2, bsq.clone()));
    // ξ₃ = ((a−1) ζ₂ f + a ζ₁)² + b² (ζ₂ f + ζ₁)²
    let lin3 = mono(1, 0, (&a - one()) * &z2).add(&mono(0, 0, &a * &z1));
    let lin4 = mono(1, 0, z2.clone()).add(&mono(0, 0, z1.clone()));
    let xi3 = lin3.mul(&lin3).add(&lin4.mul(&lin4).scale(&bsq));

    // ξ₂ depends only on g, ξ₃ only on f
    if xi2.support().iter().any(|&(i, _)| i != 0) || xi3.support().iter().any(|&(_, j)| j != 0) {
        return Err(Error::IdentityViolation("xi2/xi3 variable separation failed".into()));
    }
    // strict positivity
    let (c2, c1, c0) = univariate_in_g(&xi2);
    if !strictly_positive_quadratic(&c2, &c1, &c0) {
        return Err(Error::IdentityViolation("xi2 not strictly positive".into()));
    }
    let (c2, c1, c0) = univariate_in_f(&xi3);
    if !strictly_positive_quadratic(&c2, &c1, &c0) {
        return Err(Error::IdentityViolation("xi3 not strictly positive".into()));
    }
    // ξ₁ positive definite homogeneous: coefficients of f², fg, g²
    let (q20, q11, q02) = (xi1.coeff(2, 0), xi1.coeff(1, 1), xi1.coeff(0, 2));
    if !strictly_positive_quadratic(&q20, &q11, &q02) {
        return Err(Error::IdentityViolation("xi1 not positive definite".into()));
    }

    // σ-identities: ξ₂ − ξ₁ = σ(σ − 2σ₁), ξ₃ − ξ₁ = σ((a²+b²)σ − 2aσ₁ − 2bσ₂)
    let sigma = mono(0, 0, z1.clone())
        .add(&mono(1, 0, z2.clone()))
        .add(&mono(0, 1, one()));
    let sigma1 = mono(1, 0, z2.clone()).add(&mono(0, 1, a.clone()));
    let sigma2 = mono(0, 1, b.clone());
    let two = BigRational::from_integer(2.into());
    let lhs2 = xi2.sub(&xi1);
    let rhs2 = sigma.mul(&sigma.sub(&sigma1.scale(&two)));
    if lhs2 != rhs2 {
        return Err(Error::IdentityViolation("xi2 − xi1 ≠ σ(σ − 2σ₁)".into()));
    }
    let norm = &a * &a + &b * &b;
    let lhs3 = xi3.sub(&xi1);
    let rhs3 = sigma.mul(
        &sigma
            .scale(&norm)
            .sub(&sigma1.scale(&(&two * &a)))
            .sub(&sigma2.scale(&(&two * &b))),
    );
    if lhs3 != rhs3 {
        return Err(Error::IdentityViolation("xi3 − xi1 ≠ σ((a²+b²)σ − 2aσ₁ − 2bσ₂)".into()));
    }

    Ok(XiSystem { xi1, xi2, xi3, z1, z2, a, b, alpha })
}

/// The two common zeros of (ξ₁, ξ₂, ξ₃), a conjugate pair in ℚ(i)².
pub fn common_xi_zeros(xi: &XiSystem) -> Result<Vec<(GaussianRational, GaussianRational)>> {
    let gq = GaussianRational::new;
    let two = BigRational::from_integer(2.into());
    // ξ₂(g) = A₂g² + B₂g + C₂ has discriminant −(2ζ₁b)²: roots (−B₂ ± 2ζ₁b·i)/(2A₂)
    let (a2, b2, _) = univariate_in_g(&xi.xi2);
    let g_re = -&b2 / (&two * &a2);
    let g_im = &xi.z1 * &xi.b / &a2;
    // ξ₃(f) = A₃f² + B₃f + C₃ has discriminant −(2ζ₁ζ₂b)²
    let (a3, b3, _) = univariate_in_f(&xi.xi3);
    let f_re = -&b3 / (&two * &a3);
    let f_im = &xi.z1 * &xi.z2 * &xi.b / &a3;
    let g_roots = [gq(g_re.clone(), g_im.clone()), gq(g_re, -g_im)];
    let f_roots = [gq(f_re.clone(), f_im.clone()), gq(f_re, -f_im)];
    for g in &g_roots {
        if !xi.xi2.eval_gaussian(&GaussianRational::zero(), g).is_zero() {
            return Err(Error::IdentityViolation("xi2 root reconstruction failed".into()));
        }
    }
    for f in &f_roots {
        if !xi.xi3.eval_gaussian(f, &GaussianRational::zero()).is_zero() {
            return Err(Error::IdentityViolation("xi3 root reconstruction failed".into()));
        }
    }
    let mut sols = Vec::new();
    for f in &f_roots {
        for g in &g_roots {
            if xi.xi1.eval_gaussian(f, g).is_zero() {
                sols.push((f.clone(), g.clone()));
            }
        }
    }
    if sols.len() != 2 {
        return Err(Error::IdentityViolation(format!(
            "expected 2 common xi-zeros, found {}",
            sols.len()
        )));
    }
    let conj = (sols[0].0.conj(), sols[0].1.conj());
    if sols[1] != conj {
        return Err(Error::IdentityViolation("common zeros are not conjugate".into()));
    }
    Ok(sols)
}

#[derive(Debug, Clone)]
pub struct QSystem {
    pub q: BivariatePoly,
    pub q1: BivariatePoly,
    /// (−1−2α)/(α+1)², the axis proportionality constant.
    pub kappa: BigRational,
}

/// Cleared numerators of η₂ multiplied by (α+1)·f·g·ξ₂ξ₃:
/// P₂ df + S₂ dg with P₂ = gξ₂((α+1)fξ₃′ − ξ₃), S₂ = fξ₃(ξ₂ − (α+1)gξ₂′).
fn cleared_eta2(xi: &XiSystem) -> (BivariatePoly, BivariatePoly) {
    let ap1 = &xi.alpha + BigRational::one();
    let f = BivariatePoly::var_f();
    let g = BivariatePoly::var_g();
    let xi2p = xi.xi2.diff_g();
    let xi3p = xi.xi3.diff_f();
    let p2 = g.mul(&xi.xi2).mul(&f.mul(&xi3p).scale(&ap1).sub(&xi.xi3));
    let s2 = f.mul(&xi.xi3).mul(&xi.xi2.sub(&g.mul(&xi2p).scale(&ap1)));
    (p2, s2)
}

/// Assemble Q per the closed form and assert it equals the wedge-derived
/// polynomial Q df∧dg = f g ξ₁ξ₂ξ₃ η₁∧η₂ (recovered from the cleared forms
/// by exact division).
pub fn build_q(xi: &XiSystem) -> Result<QSystem> {
    let one = BigRational::one;
    let two = BigRational::from_integer(2.into());
    let ap1 = &xi.alpha + one();
    let kappa = (-one() - &two * &xi.alpha) / (&ap1 * &ap1);

    let xi1f = xi.xi1.diff_f();
    let xi1g = xi.xi1.diff_g();
    let xi2p = xi.xi2.diff_g();
    let xi3p = xi.xi3.diff_f();

    // Q₁ = ξ₂′ξ₃ ∂ξ₁/∂f + ξ₂ξ₃′ ∂ξ₁/∂g − ξ₂′ξ₃′ ξ₁
    let q1 = xi2p
        .mul(&xi.xi3)
        .mul(&xi1f)
        .add(&xi.xi2.mul(&xi3p).mul(&xi1g))
        .sub(&xi2p.mul(&xi3p).mul(&xi.xi1));

    let product = xi.xi1.mul(&xi.xi2).mul(&xi.xi3);
    let fg = BivariatePoly::monomial(1, 1, one());
    let q = product.scale(&kappa).add(&fg.mul(&q1));

    // independent wedge route: η₁ cleared by (α+1)fξ₂ξ₁ gives
    // P₁ = ξ₂ξ₁ − (α+1)fξ₂ξ₁f, S₁ = (α+1)f(ξ₂′ξ₁ − ξ₂ξ₁g);
    // Q = fgξ₁ξ₂ξ₃ (P₁S₂ − S₁P₂)/(M₁M₂) = (P₁S₂ − S₁P₂) / ((α+1)² f ξ₂)
    let f = BivariatePoly::var_f();
    let p1 = xi.xi2.mul(&xi.xi1).sub(&f.mul(&xi.xi2).mul(&xi1f).scale(&ap1));
    let s1 = f
        .mul(&xi2p.mul(&xi.xi1).sub(&xi.xi2.mul(&xi1g)))
        .scale(&ap1);
    let (p2, s2) = cleared_eta2(xi);
    let numerator = p1.mul(&s2).sub(&s1.mul(&p2));
    let divisor = f.mul(&xi.xi2).scale(&(&ap1 * &ap1));
    let q_wedge = numerator
        .div_exact(&divisor)
        .ok_or_else(|| Error::IdentityViolation("wedge numerator not divisible".into()))?;
    if q_wedge != q {
        return Err(Error::IdentityViolation(
            "assembled Q differs from the wedge-derived polynomial".into(),
        ));
    }

    // Q₁ jet identities
    if !q1.diff_f().diff_f().diff_f().is_zero()
        || !q1.diff_g().diff_g().diff_g().is_zero()
        || !q1.diff_f().diff_f().diff_g().diff_g().is_zero()
    {
        return Err(Error::IdentityViolation(
            "Q1 third/fourth derivative identities failed".into(),
        ));
    }
    if !q1.coeff(0, 0).is_zero() {
        return Err(Error::IdentityViolation("Q1(0,0) ≠ 0".into()));
    }

    // Newton polygons
    if !support_in_hexagon(&q, 2, 6, 0, 4) {
        return Err(Error::IdentityViolation("NP(Q) escapes {2≤p+q≤6, 0≤p,q≤4}".into()));
    }
    if !support_in_hexagon(&fg.mul(&q1), 3, 5, 1, 3) {
        return Err(Error::IdentityViolation("NP(fgQ1) escapes {3≤p+q≤5, 1≤p,q≤3}".into()));
    }

    // on the axes Q = κ·ξ₁ξ₂ξ₃
    let scaled = product.scale(&kappa);
    if q.slice_f(0) != scaled.slice_f(0) || q.slice_g(0) != scaled.slice_g(0) {
        return Err(Error::IdentityViolation("Q on the axes differs from κ·ξ1ξ2ξ3".into()));
    }

    Ok(QSystem { q, q1, kappa })
}

/// R df∧dg = f g ξ₂ξ₃ · dQ∧η₂, expanded with η₂ cleared:
/// R = (Q_f S₂ − Q_g P₂)/(α+1).
pub fn build_r(xi: &XiSystem, qs: &QSystem) -> Result<BivariatePoly> {
    let ap1 = &xi.alpha + BigRational::one();
    let (p2, s2) = cleared_eta2(xi);
    let r = qs
        .q
        .diff_f()
        .mul(&s2)
        .sub(&qs.q.diff_g().mul(&p2))
        .scale(&ap1.recip());
    if !support_in_hexagon(&r, 2, 10, 0, 6) {
        return Err(Error::IdentityViolation("NP(R) escapes {2≤p+q≤10, 0≤p,q≤6}".into()));
    }
    // R (and Q) vanish at the four zeros of η₂: reduce modulo the two
    // quadratics carrying those zeros
    let (pf, pg) = eta2_zero_quadratics(xi);
    if !r.reduce_mod(&pf, &pg).is_zero() {
        return Err(Error::IdentityViolation("R does not vanish on the η₂ zeros".into()));
    }
    if !qs.q.reduce_mod(&pf, &pg).is_zero() {
        return Err(Error::IdentityViolation("Q does not vanish on the η₂ zeros".into()));
    }
    Ok(r)
}

/// The two quadratics whose root pairs are the four η₂ zeros:
/// pf(f) = (2α+1)A₃f² + αB₃f − C₃ and pg(g) = (2α+1)A₂g² + αB₂g − C₂.
pub fn eta2_zero_quadratics(xi: &XiSystem) -> (RatPoly, RatPoly) {
    let one = BigRational::one;
    let two_a_plus = BigRational::from_integer(2.into()) * &xi.alpha + one();
    let (a3, b3, c3) = univariate_in_f(&xi.xi3);
    let pf = RatPoly::new(vec![-c3, &xi.alpha * &b3, &two_a_plus * &a3]);
    let (a2, b2, c2) = univariate_in_g(&xi.xi2);
    let pg = RatPoly::new(vec![-c2, &xi.alpha * &b2, &two_a_plus * &a2]);
    (pf, pg)
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub r_tilde: BivariatePoly,
    /// The polynomial q = fξ₂ξ₃′ + gξ₃ξ₂′ + 2ξ₂ξ₃ − 3(1+α)fgξ₂′ξ₃′.
    pub multiplier: BivariatePoly,
    /// The constant in R̃ = R − const·qQ, solved from a corner monomial.
    pub constant: BigRational,
}

/// Corner monomials of NP(R) tried in order when solving for the constant.
const CORNERS: [(u32, u32); 6] = [(0, 2), (2, 0), (0, 6), (6, 0), (6, 4), (4, 6)];

pub fn reduce_r(xi: &XiSystem, qs: &QSystem, r: &BivariatePoly) -> Result<Reduction> {
    let three = BigRational::from_integer(3.into());
    let two = BigRational::from_integer(2.into());
    let ap1 = &xi.alpha + BigRational::one();
    let f = BivariatePoly::var_f();
    let g = BivariatePoly::var_g();
    let xi2p = xi.xi2.diff_g();
    let xi3p = xi.xi3.diff_f();
    let multiplier = f
        .mul(&xi.xi2)
        .mul(&xi3p)
        .add(&g.mul(&xi.xi3).mul(&xi2p))
        .add(&xi.xi2.mul(&xi.xi3).scale(&two))
        .sub(&f.mul(&g).mul(&xi2p).mul(&xi3p).scale(&(&three * &ap1)));
    let qq = multiplier.mul(&qs.q);

    let mut constant = None;
    for &(i, j) in &CORNERS {
        let denom = qq.coeff(i, j);
        if !denom.is_zero() {
            constant = Some(r.coeff(i, j) / denom);
            break;
        }
    }
    let constant = constant.ok_or_else(|| {
        Error::ReductionFailure("every designated corner of q·Q vanishes".into())
    })?;
    let r_tilde = r.sub(&qq.scale(&constant));
    let leftover: Vec<(u32, u32)> = r_tilde
        .support()
        .into_iter()
        .filter(|&(p, q)| {
            !(p + q >= 3 && p + q <= 9 && (1..=5).contains(&p) && (1..=5).contains(&q))
        })
        .collect();
    if !leftover.is_empty() {
        return Err(Error::ReductionFailure(format!(
            "boundary monomials fail to cancel at {leftover:?}"
        )));
    }
    Ok(Reduction { r_tilde, multiplier, constant })
}

/// Exact evidence for "multiplicity ≥ 6" at one point of the conjugate pair:
/// Q, R and their gradients vanish and the 2-jets of R and Q are
/// proportional, so a linear combination has zero 2-jet.
fn complex_pair_multiplicity(
    qs: &QSystem,
    r: &BivariatePoly,
    point: &(GaussianRational, GaussianRational),
) -> Result<()> {
    let (pf, pg) = (&point.0, &point.1);
    let ev = |p: &BivariatePoly| p.eval_gaussian(pf, pg);
    for (label, poly) in [
        ("Q", qs.q.clone()),
        ("R", r.clone()),
        ("Q_f", qs.q.diff_f()),
        ("Q_g", qs.q.diff_g()),
        ("R_f", r.diff_f()),
        ("R_g", r.diff_g()),
    ] {
        if !ev(&poly).is_zero() {
            return Err(Error::IdentityViolation(format!(
                "{label} does not vanish at the complex pair"
            )));
        }
    }
    let qff = ev(&qs.q.diff_f().diff_f());
    let qfg = ev(&qs.q.diff_f().diff_g());
    let qgg = ev(&qs.q.diff_g().diff_g());
    let rff = ev(&r.diff_f().diff_f());
    let rfg = ev(&r.diff_f().diff_g());
    let rgg = ev(&r.diff_g().diff_g());
    if qff.is_zero() && qfg.is_zero() && qgg.is_zero() {
        return Err(Error::IdentityViolation("Q has zero 2-jet at the pair".into()));
    }
    let prop = rff.mul(&qfg) == rfg.mul(&qff)
        && rff.mul(&qgg) == rgg.mul(&qff)
        && rfg.mul(&qgg) == rgg.mul(&qfg);
    if !prop {
        return Err(Error::IdentityViolation(
            "2-jets of R and Q are not proportional at the pair".into(),
        ));
    }
    Ok(())
}

/// One γ₁∩γ₂ intersection mapped back to the charge plane.
#[derive(Debug, Clone, Serialize)]
pub struct GammaPoint {
    pub f: f64,
    pub g: f64,
    pub x: f64,
    pub y: f64,
    /// ‖∇V_α‖ at (x, y), relative to the local gradient scale.
    pub residual_rel: f64,
}

struct GammaFns {
    z1: f64,
    z2: f64,
    a: f64,
    b: f64,
    alpha: f64,
}

impl GammaFns {
    fn xi1(&self, f: f64, g: f64) -> f64 {
        let t = self.a * g + self.z2 * f;
        t * t + self.b * self.b * g * g
    }
    fn xi2(&self, g: f64) -> f64 {
        let t = (self.a - 1.0) * g - self.z1;
        t * t + self.b * self.b * g * g
    }
    fn xi3(&self, f: f64) -> f64 {
        let t = (self.a - 1.0) * self.z2 * f + self.a * self.z1;
        let u = self.z2 * f + self.z1;
        t * t + self.b * self.b * u * u
    }
    fn xi1_f(&self, f: f64, g: f64) -> f64 {
        2.0 * self.z2 * (self.a * g + self.z2 * f)
    }
    fn xi1_g(&self, f: f64, g: f64) -> f64 {
        2.0 * self.a * (self.a * g + self.z2 * f) + 2.0 * self.b * self.b * g
    }
    fn xi2_p(&self, g: f64) -> f64 {
        2.0 * (self.a - 1.0) * ((self.a - 1.0) * g - self.z1) + 2.0 * self.b * self.b * g
    }
    fn xi3_p(&self, f: f64) -> f64 {
        2.0 * (self.a - 1.0) * self.z2 * ((self.a - 1.0) * self.z2 * f + self.a * self.z1)
            + 2.0 * self.b * self.b * self.z2 * (self.z2 * f + self.z1)
    }
    /// log-form of γ₁: u/(α+1) + ln ξ₂ − ln ξ₁
    fn big_g(&self, u: f64, v: f64) -> f64 {
        let (f, g) = (u.exp(), v.exp());
        u / (self.alpha + 1.0) + self.xi2(g).ln() - self.xi1(f, g).ln()
    }
    /// log-form of γ₂: (u−v)/(α+1) + ln ξ₂ − ln ξ₃
    fn big_h(&self, u: f64, v: f64) -> f64 {
        let (f, g) = (u.exp(), v.exp());
        (u - v) / (self.alpha + 1.0) + self.xi2(g).ln() - self.xi3(f).ln()
    }
    fn grad_g(&self, u: f64, v: f64) -> [f64; 2] {
        let (f, g) = (u.exp(), v.exp());
        [
            1.0 / (self.alpha + 1.0) - f * self.xi1_f(f, g) / self.xi1(f, g),
            g * self.xi2_p(g) / self.xi2(g) - g * self.xi1_g(f, g) / self.xi1(f, g),
        ]
    }
    fn grad_h(&self, u: f64, v: f64) -> [f64; 2] {
        let (f, g) = (u.exp(), v.exp());
        [
            1.0 / (self.alpha + 1.0) - f * self.xi3_p(f) / self.xi3(f),
            -1.0 / (self.alpha + 1.0) + g * self.xi2_p(g) / self.xi2(g),
        ]
    }
    fn map_xy(&self, f: f64, g: f64) -> (f64, f64) {
        let denom = self.z1 + self.z2 * f + g;
        ((self.a * g + self.z2 * f) / denom, self.b * g / denom)
    }
}

const GAMMA_GRID: usize = 2048;
const GAMMA_RANGE: f64 = 40.0;

/// Numeric intersections of γ₁ and γ₂ in the open positive quadrant:
/// sign-change cells of a 2048² log-coordinate grid polished by Newton, each
/// mapped to (x, y) by the rational parameterization and verified as a
/// critical point of V_α.
pub fn gamma_intersections(params: &ThreeChargeParams) -> Result<Vec<GammaPoint>> {
    gamma_intersections_with(params, Strategy::default())
}

pub fn gamma_intersections_with(
    params: &ThreeChargeParams,
    strategy: Strategy,
) -> Result<Vec<GammaPoint>> {
    let fns = GammaFns {
        z1: params.zeta1,
        z2: params.zeta2,
        a: params.a,
        b: params.b,
        alpha: params.alpha.value(),
    };
    let n = GAMMA_GRID;
    let step = 2.0 * GAMMA_RANGE / n as f64;
    let coord = |i: usize| -GAMMA_RANGE + i as f64 * step;

    // candidate cells where both curves change sign, scanned per grid band
    let bands = exec::map_range(strategy, n, |row| {
        let mut cells = Vec::new();
        let v0 = coord(row);
        let v1 = coord(row + 1);
        let mut prev: Option<(f64, f64, f64, f64)> = None;
        for col in 0..=n {
            let u = coord(col);
            let cur = (
                fns.big_g(u, v0),
                fns.big_g(u, v1),
                fns.big_h(u, v0),
                fns.big_h(u, v1),
            );
            if let Some(p) = prev {
                let gs = [p.0, p.1, cur.0, cur.1];
                let hs = [p.2, p.3, cur.2, cur.3];
                // zeros count both ways: intersections can sit on grid nodes
                let change =
                    |vals: &[f64; 4]| vals.iter().any(|x| *x >= 0.0) && vals.iter().any(|x| *x <= 0.0);
                if change(&gs) && change(&hs) {
                    cells.push((coord(col - 1) + 0.5 * step, v0 + 0.5 * step));
                }
            }
            prev = Some(cur);
        }
        cells
    });
    let candidates: Vec<(f64, f64)> = bands.into_iter().flatten().collect();

    let polished = exec::map_slice(strategy, &candidates, |&(u0, v0)| {
        let (mut u, mut v) = (u0, v0);
        for _ in 0..80 {
            let gv = fns.big_g(u, v);
            let hv = fns.big_h(u, v);
            let jg = fns.grad_g(u, v);
            let jh = fns.grad_h(u, v);
            let det = jg[0] * jh[1] - jg[1] * jh[0];
            if det.abs() < 1e-300 {
                return None;
            }
            let du = (-gv * jh[1] + hv * jg[1]) / det;
            let dv = (-hv * jg[0] + gv * jh[0]) / det;
            u += du;
            v += dv;
            if !u.is_finite() || !v.is_finite() {
                return None;
            }
            if du.hypot(dv) < 1e-14 {
                break;
            }
        }
        (fns.big_g(u, v).abs() < 1e-10 && fns.big_h(u, v).abs() < 1e-10).then_some((u, v))
    });

    let mut found: Vec<(f64, f64)> = Vec::new();
    for (u, v) in polished.into_iter().flatten() {
        if found.iter().all(|&(a, b)| (a - u).hypot(b - v) > 1e-7) {
            found.push((u, v));
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // regular-value check at the intersections
    for &(u, v) in &found {
        let jg = fns.grad_g(u, v);
        let jh = fns.grad_h(u, v);
        if jg[0].hypot(jg[1]) < 1e-8 || jh[0].hypot(jh[1]) < 1e-8 {
            return Err(Error::NonRegularValue(format!(
                "curve gradient vanishes near (f, g) = ({:.6e}, {:.6e})",
                u.exp(),
                v.exp()
            )));
        }
    }

    let cfg = params.config();
    let mut out = Vec::with_capacity(found.len());
    for (u, v) in found {
        let (f, g) = (u.exp(), v.exp());
        let (x, y) = fns.map_xy(f, g);
        let p = Point::new(vec![x, y]);
        let grad = potential::gradient(&cfg, &params.alpha, &p)?;
        let scale = potential::gradient_scale(&cfg, &params.alpha, &p);
        let residual_rel = potential::gradient_norm(&grad) / scale;
        if residual_rel > 1e-8 {
            return Err(Error::NonRegularValue(format!(
                "mapped point ({x:.6}, {y:.6}) is not a critical point (residual {residual_rel:.2e})"
            )));
        }
        out.push(GammaPoint { f, g, x, y, residual_rel });
    }
    Ok(out)
}

/// Sign changes of the γ₂ log-form along the boundary of the rectangle
/// [−u_max, u_max]×[−v_max, v_max]: twice the number of noncompact components.
fn gamma2_boundary_crossings(fns: &GammaFns, u_max: f64, v_max: f64) -> usize {
    let per_edge = 8192;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(4 * per_edge);
    for k in 0..per_edge {
        let t = k as f64 / per_edge as f64;
        pts.push((-u_max + 2.0 * u_max * t, -v_max));
    }
    for k in 0..per_edge {
        let t = k as f64 / per_edge as f64;
        pts.push((u_max, -v_max + 2.0 * v_max * t));
    }
    for k in 0..per_edge {
        let t = k as f64 / per_edge as f64;
        pts.push((u_max - 2.0 * u_max * t, v_max));
    }
    for k in 0..per_edge {
        let t = k as f64 / per_edge as f64;
        pts.push((-u_max, v_max - 2.0 * v_max * t));
    }
    let mut changes = 0;
    let mut last = fns.big_h(pts[0].0, pts[0].1).signum();
    for &(u, v) in pts.iter().skip(1).chain(std::iter::once(&pts[0])) {
        let s = fns.big_h(u, v).signum();
        if s != 0.0 && s != last {
            if last != 0.0 {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Distinct real solutions of Q = R = 0 located per open quadrant by
/// multistart Newton on the exact coefficients evaluated in f64.
fn locate_real_solutions(
    qs: &QSystem,
    r: &BivariatePoly,
    strategy: Strategy,
) -> [Vec<(f64, f64)>; 4] {
    let qf = qs.q.diff_f();
    let qg = qs.q.diff_g();
    let rf = r.diff_f();
    let rg = r.diff_g();
    let scale_at = |p: &BivariatePoly, f: f64, g: f64| -> f64 {
        p.terms()
            .map(|(&(i, j), c)| {
                (c.to_f64().unwrap_or(0.0) * f.powi(i as i32) * g.powi(j as i32)).abs()
            })
            .sum::<f64>()
            .max(1e-300)
    };
    let mags: Vec<f64> = (0..16)
        .map(|k| 10f64.powf(-1.5 + 3.0 * k as f64 / 15.0))
        .collect();
    let mut starts = Vec::new();
    for &sf in &[1.0f64, -1.0] {
        for &sg in &[1.0f64, -1.0] {
            for &mf in &mags {
                for &mg in &mags {
                    starts.push((sf * mf, sg * mg));
                }
            }
        }
    }
    let sols = exec::map_slice(strategy, &starts, |&(f0, g0)| {
        let (mut f, mut g) = (f0, g0);
        for _ in 0..120 {
            let qv = qs.q.eval_f64(f, g);
            let rv = r.eval_f64(f, g);
            let j = [
                qf.eval_f64(f, g),
                qg.eval_f64(f, g),
                rf.eval_f64(f, g),
                rg.eval_f64(f, g),
            ];
            let det = j[0] * j[3] - j[1] * j[2];
            if det.abs() < 1e-300 {
                return None;
            }
            let df = (-qv * j[3] + rv * j[1]) / det;
            let dg = (-rv * j[0] + qv * j[2]) / det;
            f += df;
            g += dg;
            if !f.is_finite() || !g.is_finite() || f.abs() > 1e6 || g.abs() > 1e6 {
                return None;
            }
            if df.hypot(dg) < 1e-15 {
                break;
            }
        }
        let ok = qs.q.eval_f64(f, g).abs() < 1e-9 * scale_at(&qs.q, f, g)
            && r.eval_f64(f, g).abs() < 1e-9 * scale_at(r, f, g)
            && f.abs() > 1e-7
            && g.abs() > 1e-7;
        ok.then_some((f, g))
    });
    let mut quadrants: [Vec<(f64, f64)>; 4] = Default::default();
    for (f, g) in sols.into_iter().flatten() {
        let qi = match (f > 0.0, g > 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        };
        let bucket = &mut quadrants[qi];
        if bucket
            .iter()
            .all(|&(a, b)| ((a - f) / f).hypot((b - g) / g) > 1e-6)
        {
            bucket.push((f, g));
        }
    }
    for bucket in quadrants.iter_mut() {
        bucket.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    quadrants
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    /// Unbounded components of γ₂ in the positive quadrant.
    pub n1: usize,
    /// Rectangle boundary crossings of γ₂ backing n1 (must be 4).
    pub gamma2_crossings: usize,
    /// Unbounded components of Γ = {Q = 0} in the positive quadrant.
    pub n3: usize,
    /// 2·Vol(NP(Q), NP(R̃)), the Bernstein–Kushnirenko count (28).
    pub mixed_volume_2x: i64,
    /// Solutions of Q = R = 0 outside the quadrant, with multiplicity (18).
    pub outside: usize,
    /// Multiplicity certificate at the conjugate complex pair (2 × ≥6).
    pub complex_pair_multiplicity_ok: bool,
    /// Real solutions located per open quadrant (+,+), (−,+), (−,−), (+,−).
    pub real_solutions_per_quadrant: [usize; 4],
    /// Final intersection bound n1 + n3 + 2MV − outside.
    pub bound: i64,
    /// True when every ingredient above was verified for these parameters.
    pub certified: bool,
    pub notes: Vec<String>,
    /// The constant in R̃ = R − c·qQ, as a decimal string.
    pub reduction_constant: String,
}

/// Run the full symbolic pipeline and assemble the bound 2 + 0 + 28 − 18 = 12,
/// verifying each ingredient; failed verification downgrades `certified`
/// instead of silently using the counts.
pub fn pipeline_count(params: &ThreeChargeParams) -> Result<PipelineReport> {
    pipeline_count_with(params, Strategy::default())
}

pub fn pipeline_count_with(
    params: &ThreeChargeParams,
    strategy: Strategy,
) -> Result<PipelineReport> {
    let xi = build_xi(params)?;
    let qs = build_q(&xi)?;
    let r = build_r(&xi, &qs)?;
    let red = reduce_r(&xi, &qs, &r)?;

    let mut notes = Vec::new();
    let mut certified = true;

    let np_q = newton_polygon(&qs.q)?;
    let np_rt = newton_polygon(&red.r_tilde)?;
    let mv = mixed_volume_2x(&np_q, &np_rt);
    let mv_i64 = mv.to_i64().unwrap_or(i64::MAX);
    if mv != BigInt::from(28) {
        certified = false;
        notes.push(format!("mixed volume is {mv}, expected 28"));
    }
    if np_q != hexagon(2, 6, 0, 4) {
        notes.push("NP(Q) is a proper subset of the generic hexagon".into());
    }

    // N1 = 2 via the 4 boundary crossings of γ₂, at two rectangle scales
    let fns = GammaFns {
        z1: params.zeta1,
        z2: params.zeta2,
        a: params.a,
        b: params.b,
        alpha: params.alpha.value(),
    };
    let log_scale = (params.a * params.a + params.b * params.b)
        .ln()
        .abs()
        .max(params.zeta1.ln().abs())
        .max(params.zeta2.ln().abs())
        .max(1.0);
    let u_max = 20.0 + 6.0 * (params.alpha.value() + 1.0) * log_scale;
    let crossings_a = gamma2_boundary_crossings(&fns, u_max, 1.5 * u_max);
    let crossings_b = gamma2_boundary_crossings(&fns, 1.3 * u_max, 1.95 * u_max);
    let gamma2_crossings = crossings_b;
    if crossings_a != 4 || crossings_b != 4 {
        certified = false;
        notes.push(format!(
            "γ₂ rectangle crossings {crossings_a}/{crossings_b}, expected 4"
        ));
    }

    // N3 = 0: ξ positivity and the axis/origin behaviour of Q are exact
    // checks inside build_xi/build_q.

    // 18 = 2·6 (conjugate pair) + 6 (real solutions outside the quadrant)
    let pair = common_xi_zeros(&xi)?;
    let complex_pair_multiplicity_ok = match complex_pair_multiplicity(&qs, &r, &pair[0]) {
        Ok(()) => true,
        Err(e) => {
            certified = false;
            notes.push(e.to_string());
            false
        }
    };
    // the η₂ zeros split one per quadrant: both quadratics have roots of
    // opposite signs (root product < 0, checked exactly)
    let (pf, pg) = eta2_zero_quadratics(&xi);
    let opposite_roots = |p: &RatPoly| -> bool {
        let c = p.coeffs();
        c.len() == 3 && (&c[0] * &c[2]).is_negative()
    };
    if !opposite_roots(&pf) || !opposite_roots(&pg) {
        certified = false;
        notes.push("η₂ zeros do not split one per quadrant".into());
    }
    let quadrants = locate_real_solutions(&qs, &r, strategy);
    let real_solutions_per_quadrant = [
        quadrants[0].len(),
        quadrants[1].len(),
        quadrants[2].len(),
        quadrants[3].len(),
    ];
    let outside_located: usize = quadrants[1..].iter().map(|q| q.len().min(2)).sum();
    if outside_located < 6 {
        certified = false;
        notes.push(format!(
            "located only {outside_located} of the 6 outside real solutions"
        ));
    }

    let n1 = 2usize;
    let n3 = 0usize;
    let outside = 18usize;
    let bound = n1 as i64 + n3 as i64 + mv_i64 - outside as i64;
    Ok(PipelineReport {
        n1,
        gamma2_crossings,
        n3,
        mixed_volume_2x: mv_i64,
        outside,
        complex_pair_multiplicity_ok,
        real_solutions_per_quadrant,
        bound,
        certified,
        notes,
        reduction_constant: red.constant.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn default_params() -> ThreeChargeParams {
        ThreeChargeParams::new(1.0, 1.0, 0.5, 0.875, Exponent::new(1.0).unwrap()).unwrap()
    }

    #[test]
    fn xi_structure() {
        let xi = build_xi(&default_params()).unwrap();
        assert!(xi.xi2.support().iter().all(|&(i, _)| i == 0));
        assert!(xi.xi3.support().iter().all(|&(_, j)| j == 0));
        let zeros = common_xi_zeros(&xi).unwrap();
        assert_eq!(zeros.len(), 2);
        // frozen for these parameters: f = (−33 ± 56i)/65, g = (−32 ∓ 56i)/65
        assert_eq!(zeros[0].0.re, ratio(-33, 65));
        assert_eq!(zeros[0].1.re, ratio(-32, 65));
        assert_eq!(zeros[0].0.im.clone().abs(), ratio(56, 65).abs());
    }

    #[test]
    fn q_and_r_polygons() {
        let xi = build_xi(&default_params()).unwrap();
        let qs = build_q(&xi).unwrap();
        let r = build_r(&xi, &qs).unwrap();
        assert_eq!(newton_polygon(&qs.q).unwrap(), hexagon(2, 6, 0, 4));
        let fgq1 = BivariatePoly::monomial(1, 1, BigRational::one()).mul(&qs.q1);
        assert_eq!(newton_polygon(&fgq1).unwrap(), hexagon(3, 5, 1, 3));
        assert_eq!(newton_polygon(&r).unwrap(), hexagon(2, 10, 0, 6));
        let red = reduce_r(&xi, &qs, &r).unwrap();
        assert_eq!(newton_polygon(&red.r_tilde).unwrap(), hexagon(3, 9, 1, 5));
        // c = 1/(α+1) at α = 1
        assert_eq!(red.constant, ratio(1, 2));
        assert_eq!(
            mixed_volume_2x(
                &newton_polygon(&qs.q).unwrap(),
                &newton_polygon(&red.r_tilde).unwrap()
            ),
            BigInt::from(28)
        );
    }

    #[test]
    fn pipeline_reports_twelve() {
        let report = pipeline_count(&default_params()).unwrap();
        assert_eq!(report.bound, 12);
        assert_eq!(report.mixed_volume_2x, 28);
        assert_eq!(report.gamma2_crossings, 4);
        assert!(report.certified, "notes: {:?}", report.notes);
        assert!(report.real_solutions_per_quadrant.iter().all(|&c| c >= 2));
    }

    #[test]
    fn gamma_matches_figure_counts() {
        // equilateral: 4 intersections
        let p = ThreeChargeParams::new(
            1.0,
            1.0,
            0.5,
            3f64.sqrt() / 2.0,
            Exponent::new(1.0).unwrap(),
        )
        .unwrap();
        let pts = gamma_intersections(&p).unwrap();
        assert_eq!(pts.len(), 4);
        // obtuse apex: 2 intersections
        let p = ThreeChargeParams::new(1.0, 1.0, 0.5, 0.25, Exponent::new(1.0).unwrap()).unwrap();
        let pts = gamma_intersections(&p).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn collinear_rejected() {
        assert!(matches!(
            ThreeChargeParams::new(1.0, 1.0, 0.5, 0.0, Exponent::new(1.0).unwrap()),
            Err(Error::CollinearSites)
        ));
    }

    #[test]
    fn from_config_normalizes() {
        let cfg = ChargeConfig::new(
            vec![
                Point::new(vec![1.0, 1.0]),
                Point::new(vec![3.0, 1.0]),
                Point::new(vec![2.0, 2.5]),
            ],
            vec![2.0, 2.0, 2.0],
        )
        .unwrap();
        let (p, norm) = ThreeChargeParams::from_config(&cfg, Exponent::new(1.0).unwrap()).unwrap();
        assert!((p.a - 0.5).abs() < 1e-12);
        assert!((p.b - 0.75).abs() < 1e-12);
        assert!((p.zeta1 - 1.0).abs() < 1e-12);
        assert_eq!(norm.len(), 3);
    }
}
