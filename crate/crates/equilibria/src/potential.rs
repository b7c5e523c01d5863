//! The potential family V_α(x) = Σ ζ_i ρ_i^{−α} (ρ_i the squared distance to
//! site i), its gradient and Hessian in closed form, the α→∞ limit
//! V_∞ = min_i ρ_i, and restriction of a configuration to an affine subspace.

use crate::error::{Error, Result};
use crate::geometry::{self, AffineSubspace, Point};
use crate::rational;
use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Distance-squared cutoff below which an evaluation point is "at" a site.
pub const AT_SITE_TOL: f64 = 1e-14;
/// Zero-eigenvalue threshold factor for Morse classification.
pub const EIGEN_ZERO_TOL: f64 = 1e-8;

/// Charges ζ_i at pairwise distinct sites c_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfig {
    pub sites: Vec<Point>,
    pub values: Vec<f64>,
}

impl ChargeConfig {
    pub fn new(sites: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if sites.is_empty() || sites.len() != values.len() {
            return Err(Error::InvalidConfig(format!(
                "{} sites vs {} charge values",
                sites.len(),
                values.len()
            )));
        }
        let n = sites[0].dim();
        for s in &sites {
            if s.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
            }
        }
        for (i, z) in values.iter().enumerate() {
            if *z == 0.0 || !z.is_finite() {
                return Err(Error::InvalidConfig(format!("charge {i} is zero or non-finite")));
            }
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if sites[i].sq_dist(&sites[j]) == 0.0 {
                    return Err(Error::DuplicateSites(i, j));
                }
            }
        }
        Ok(ChargeConfig { sites, values })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&z| z > 0.0)
    }

    pub fn total_charge(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest pairwise site distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.sites.len() {
            for j in i + 1..self.sites.len() {
                d = d.max(self.sites[i].dist(&self.sites[j]));
            }
        }
        d
    }
}

/// The exponent α ≥ 0 of the potential family, with an exact rational form
/// when one is detectable (bit-exact round-trip) or supplied explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    alpha: f64,
    #[serde(skip)]
    rational_form: Option<BigRational>,
}

impl Exponent {
    /// Detects an exact rational form when a small-denominator approximant
    /// rounds back bit-exactly to `alpha`; larger denominators need
    /// [`Exponent::from_ratio`].
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha = {alpha} must be ≥ 0")));
        }
        Ok(Exponent {
            alpha,
            rational_form: rational::detect_rational(alpha, rational::DETECT_DENOMINATOR),
        })
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 || (p as f64 / q as f64) < 0.0 {
            return Err(Error::InvalidConfig(format!("invalid exponent {p}/{q}")));
        }
        let r = rational::ratio(p, q);
        Ok(Exponent { alpha: rational::to_f64(&r), rational_form: Some(r) })
    }

    pub fn value(&self) -> f64 {
        self.alpha
    }

    pub fn rational_form(&self) -> Option<&BigRational> {
        self.rational_form.as_ref()
    }

    /// The exponent as an integer ≥ 1, if it is one.
    pub fn as_positive_integer(&self) -> Option<u32> {
        let r = self.rational_form.as_ref()?;
        if r.is_integer() && r.is_positive() {
            r.to_integer().to_u32()
        } else {
            None
        }
    }
}

/// A configuration seen from an affine subspace L: intrinsic site projections
/// c̃_i plus constant squared offsets, so ρ̃_i(x̃) = |x̃ − c̃_i|² + y_i².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedConfig {
    pub projected_sites: Vec<Point>,
    pub offsets_sq: Vec<f64>,
    pub values: Vec<f64>,
}

impl RestrictedConfig {
    pub fn dimension(&self) -> usize {
        self.projected_sites[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projected_sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projected_sites.is_empty()
    }

    pub fn rho(&self, i: usize, x: &Point) -> f64 {
        x.sq_dist(&self.projected_sites[i]) + self.offsets_sq[i]
    }

    /// V_α of the restricted potential at intrinsic coordinates x̃.
    pub fn eval(&self, a: &Exponent, x: &Point) -> Result<f64> {
        let mut v = 0.0;
        for i in 0..self.len() {
            let rho = self.rho(i, x);
            if rho < AT_SITE_TOL {
                return Err(Error::AtSite { site: i });
            }
            v += self.values[i] * pow_neg(rho, a.value());
        }
        Ok(v)
    }
}

/// Symmetric Hessian with its spectrum classified against the zero threshold
/// 1e−8·max|λ|.
#[derive(Debug, Clone, Serialize)]
pub struct HessianReport {
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

impl HessianReport {
    pub fn morse_index(&self) -> usize {
        self.neg
    }

    pub fn degenerate(&self) -> bool {
        self.zero > 0
    }
}

fn pow_neg(rho: f64, alpha: f64) -> f64 {
    // ρ^{−α} as exp(−α ln ρ); uniform code path for all α
    (-alpha * rho.ln()).exp()
}

fn sq_dists(cfg: &ChargeConfig, x: &Point) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(cfg.len());
    for (i, s) in cfg.sites.iter().enumerate() {
        let rho = x.sq_dist(s);
        if rho < AT_SITE_TOL {
            return Err(Error::AtSite { site: i });
        }
        out.push(rho);
    }
    Ok(out)
}

/// V_α(x) = Σ ζ_i ρ_i^{−α}.
pub fn eval_potential(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<f64> {
    let rho = sq_dists(cfg, x)?;
    Ok(cfg
        .values
        .iter()
        .zip(&rho)
        .map(|(z, r)| z * pow_neg(*r, a.value()))
        .sum())
}

/// ∇V_α(x) = −α Σ ζ_i ρ_i^{−α−1} ∇ρ_i with ∇ρ_i = 2(x − c_i).
pub fn gradient(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<Vec<f64>> {
    let rho = sq_dists(cfg, x)?;
    let alpha = a.value();
    let mut g = vec![0.0; x.dim()];
    for ((z, r), c) in cfg.values.iter().zip(&rho).zip(&cfg.sites) {
        let w = -alpha * z * pow_neg(*r, alpha + 1.0);
        for (gk, (xk, ck)) in g.iter_mut().zip(x.coords.iter().zip(&c.coords)) {
            *gk += w * 2.0 * (xk - ck);
        }
    }
    Ok(g)
}

/// Scale against which gradient residuals are judged: the sum of the
/// magnitudes of the individual gradient terms.
pub fn gradient_scale(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> f64 {
    let alpha = a.value();
    cfg.values
        .iter()
        .zip(&cfg.sites)
        .map(|(z, c)| {
            let rho = x.sq_dist(c).max(AT_SITE_TOL);
            2.0 * alpha.max(1e-300) * z.abs() * pow_neg(rho, alpha + 0.5)
        })
        .sum()
}

/// Hess V_α(x) = α Σ ζ_i ρ_i^{−α−2} (4(α+1) d_i d_iᵀ − 2 ρ_i I), d_i = x − c_i.
pub fn hessian_matrix(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<DMatrix<f64>> {
    let rho = sq_dists(cfg, x)?;
    let alpha = a.value();
    let n = x.dim();
    let mut h = DMatrix::zeros(n, n);
    for ((z, r), c) in cfg.values.iter().zip(&rho).zip(&cfg.sites) {
        let w = alpha * z * pow_neg(*r, alpha + 2.0);
        let d: Vec<f64> = x.coords.iter().zip(&c.coords).map(|(a, b)| a - b).collect();
        for j in 0..n {
            for k in 0..n {
                h[(j, k)] += w * 4.0 * (alpha + 1.0) * d[j] * d[k];
            }
            h[(j, j)] -= w * 2.0 * r;
        }
    }
    Ok(h)
}

/// Hessian with eigenvalue classification.
pub fn hessian(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<HessianReport> {
    let h = hessian_matrix(cfg, a, x)?;
    Ok(classify_symmetric(&h))
}

pub fn classify_symmetric(h: &DMatrix<f64>) -> HessianReport {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let max_abs = eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let tol = EIGEN_ZERO_TOL * max_abs;
    let (mut neg, mut zero, mut pos) = (0, 0, 0);
    for &l in &eigenvalues {
        if !l.is_finite() || l.abs() < tol || max_abs == 0.0 {
            // non-finite spectra surface as degeneracy instead of an index
            zero += 1;
        } else if l < 0.0 {
            neg += 1;
        } else {
            pos += 1;
        }
    }
    let matrix = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)]).collect())
        .collect();
    HessianReport { matrix, eigenvalues, neg, zero, pos }
}

/// Evaluate the Hessian quadratic form directly from the displayed sum:
/// α(α+1) Σ ζ_i ρ_i^{−α−2} ((∇ρ_i·ξ)² − 2ρ_i‖ξ‖²/(α+1)).
pub fn hessian_quadratic_form(cfg: &ChargeConfig, a: &Exponent, x: &Point, xi: &[f64]) -> Result<f64> {
    let rho = sq_dists(cfg, x)?;
    let alpha = a.value();
    let norm_sq: f64 = xi.iter().map(|v| v * v).sum();
    let mut total = 0.0;
    for ((z, r), c) in cfg.values.iter().zip(&rho).zip(&cfg.sites) {
        let grad_rho_dot: f64 = x
            .coords
            .iter()
            .zip(&c.coords)
            .zip(xi)
            .map(|((xk, ck), v)| 2.0 * (xk - ck) * v)
            .sum();
        total += alpha
            * (alpha + 1.0)
            * z
            * pow_neg(*r, alpha + 2.0)
            * (grad_rho_dot * grad_rho_dot - 2.0 / (alpha + 1.0) * r * norm_sq);
    }
    Ok(total)
}

/// V_∞(x) = min_i ρ_i(x); defined everywhere.
pub fn v_infinity(cfg: &ChargeConfig, x: &Point) -> f64 {
    cfg.sites
        .iter()
        .map(|s| x.sq_dist(s))
        .fold(f64::INFINITY, f64::min)
}

/// Restriction of the configuration to L: intrinsic projections plus squared
/// offsets, so evaluating the restricted potential on L matches the ambient
/// potential.
pub fn restrict_to(cfg: &ChargeConfig, subspace: &AffineSubspace) -> Result<RestrictedConfig> {
    if subspace.ambient_dim() != cfg.dimension() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dimension(),
            got: subspace.ambient_dim(),
        });
    }
    if subspace.dim() == 0 {
        return Err(Error::InvalidConfig("restriction needs a subspace of dimension ≥ 1".into()));
    }
    let mut projected = Vec::with_capacity(cfg.len());
    let mut offsets = Vec::with_capacity(cfg.len());
    for s in &cfg.sites {
        let intrinsic = subspace.intrinsic(s);
        let foot = subspace.embed(&intrinsic);
        projected.push(Point::new(intrinsic));
        offsets.push(s.sq_dist(&foot));
    }
    Ok(RestrictedConfig {
        projected_sites: projected,
        offsets_sq: offsets,
        values: cfg.values.clone(),
    })
}

/// Re-express the configuration in intrinsic coordinates of the affine span
/// of its sites. Downstream solving happens there: critical points off the
/// span only exist in the non-isolated regime. A single site spans a
/// 0-dimensional set; the result is padded to one dimension.
pub fn normalize_dimension(cfg: &ChargeConfig) -> (ChargeConfig, AffineSubspace) {
    let mut span = geometry::affine_span(&cfg.sites);
    if span.dim() == 0 {
        let mut e = vec![0.0; cfg.dimension()];
        e[0] = 1.0;
        span = AffineSubspace::new(span.base, vec![e]);
    }
    if span.dim() == cfg.dimension() {
        let full = AffineSubspace::new(
            Point::new(vec![0.0; cfg.dimension()]),
            (0..cfg.dimension())
                .map(|i| {
                    let mut e = vec![0.0; cfg.dimension()];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        );
        return (cfg.clone(), full);
    }
    let sites = cfg
        .sites
        .iter()
        .map(|s| Point::new(span.intrinsic(s)))
        .collect();
    (
        ChargeConfig { sites, values: cfg.values.clone() },
        span,
    )
}

/// Finite-difference gradient oracle (central differences).
pub fn fd_gradient(cfg: &ChargeConfig, a: &Exponent, x: &Point, h: f64) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.dim()];
    for k in 0..x.dim() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp.coords[k] += h;
        xm.coords[k] -= h;
        g[k] = (eval_potential(cfg, a, &xp)? - eval_potential(cfg, a, &xm)?) / (2.0 * h);
    }
    Ok(g)
}

/// Finite-difference Hessian oracle (second-order central differences).
pub fn fd_hessian(cfg: &ChargeConfig, a: &Exponent, x: &Point, h: f64) -> Result<DMatrix<f64>> {
    let n = x.dim();
    let mut m = DMatrix::zeros(n, n);
    let f0 = eval_potential(cfg, a, x)?;
    for i in 0..n {
        for j in 0..n {
            let mut xpp = x.clone();
            let mut xpm = x.clone();
            let mut xmp = x.clone();
            let mut xmm = x.clone();
            if i == j {
                xpp.coords[i] += h;
                xmm.coords[i] -= h;
                m[(i, i)] = (eval_potential(cfg, a, &xpp)? - 2.0 * f0
                    + eval_potential(cfg, a, &xmm)?)
                    / (h * h);
            } else {
                xpp.coords[i] += h;
                xpp.coords[j] += h;
                xpm.coords[i] += h;
                xpm.coords[j] -= h;
                xmp.coords[i] -= h;
                xmp.coords[j] += h;
                xmm.coords[i] -= h;
                xmm.coords[j] -= h;
                m[(i, j)] = (eval_potential(cfg, a, &xpp)? - eval_potential(cfg, a, &xpm)?
                    - eval_potential(cfg, a, &xmp)?
                    + eval_potential(cfg, a, &xmm)?)
                    / (4.0 * h * h);
            }
        }
    }
    Ok(m)
}

pub fn gradient_norm(g: &[f64]) -> f64 {
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Newton refinement state shared by the solver; here so the potential module
/// owns every derivative formula.
pub fn gradient_vector(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(gradient(cfg, a, x)?))
}
