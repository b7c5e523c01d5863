//! Critical point solver: multistart damped Newton with deduplication,
//! α-sweeps, the counting identities, and conjecture monitoring.

pub mod certified;
pub mod sturm1d;

pub use certified::{count_1d_certified, Certified1d, RootInterval};
pub use sturm1d::{count_1d_exact, Sturm1d};

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::geometry::Point;
use crate::potential::{self, ChargeConfig, Exponent};
use crate::voronoi::{self, EffectiveCensus, VoronoiDiagram};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::collections::BTreeMap;

/// Relative residual target for Newton refinement.
const RESIDUAL_REL: f64 = 1e-10;
/// Deduplication radius as a fraction of the hull diameter.
const DEDUP_FRACTION: f64 = 1e-7;

/// A located equilibrium.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub location: Point,
    /// ‖∇V‖ at the location.
    pub residual: f64,
    pub morse_index: usize,
    pub degenerate: bool,
    /// Seed that first reached this point (witness seeds come first).
    pub basin_seed: usize,
}

/// Counts a^j of critical points by Morse index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseCensus {
    pub counts: BTreeMap<usize, usize>,
}

impl MorseCensus {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        for i in indices {
            *counts.entry(i).or_insert(0) += 1;
        }
        MorseCensus { counts }
    }

    pub fn count(&self, index: usize) -> usize {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Σ_j (−1)^j a^j.
    pub fn index_sum(&self) -> i64 {
        self.counts
            .iter()
            .map(|(&j, &c)| if j % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Counts by index equal effective-cell counts by dimension.
    pub fn matches_census(&self, eff: &EffectiveCensus) -> bool {
        let all_dims: std::collections::BTreeSet<usize> = self
            .counts
            .keys()
            .copied()
            .chain(eff.counts_by_dim.keys().copied())
            .collect();
        all_dims.into_iter().all(|d| self.count(d) == eff.count(d))
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Low-discrepancy seed count; default 64·l.
    pub seeds: Option<usize>,
    pub rng_seed: u64,
    pub max_iters: usize,
    /// Search box inflation beyond the site bounding box, as a fraction of
    /// its extent; defaults to 0.1 for all-positive charges and 10.0 for
    /// mixed signs (equilibria of mixed configurations can sit far outside
    /// the hull).
    pub region_inflation: Option<f64>,
    pub strategy: Strategy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seeds: None,
            rng_seed: 0,
            max_iters: 200,
            region_inflation: None,
            strategy: Strategy::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub points: Vec<CriticalPoint>,
    pub census: MorseCensus,
    pub seeds_used: usize,
    pub non_converged: usize,
    pub degenerate_count: usize,
    /// Degree-identity verdict (None when degenerate points block it or the
    /// total charge vanishes).
    pub identity_ok: Option<bool>,
}

/// Per-α record of an α-sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub census: Option<MorseCensus>,
    pub total: Option<usize>,
    pub effective_total: Option<usize>,
    /// Census by index equals effective census by dimension (Theorem-3 style
    /// correspondence); None when charges are mixed-sign or the diagram is
    /// unavailable.
    pub matches_effective: Option<bool>,
    pub error: Option<String>,
}

struct SearchBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SearchBox {
    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }
}

fn search_box(cfg: &ChargeConfig, inflation: f64) -> SearchBox {
    let n = cfg.dimension();
    let diam = cfg.diameter().max(1e-9);
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for s in &cfg.sites {
        for k in 0..n {
            lo[k] = lo[k].min(s.coords[k]);
            hi[k] = hi[k].max(s.coords[k]);
        }
    }
    for k in 0..n {
        let pad = inflation * (hi[k] - lo[k]) + 0.05 * diam;
        lo[k] -= pad;
        hi[k] += pad;
    }
    SearchBox { lo, hi }
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

/// Damped Newton on ∇V with backtracking on ‖∇V‖ and Levenberg fallback for
/// ill-conditioned Hessians; None on divergence (leaving the inflated box) or
/// stalling.
fn refine(
    cfg: &ChargeConfig,
    a: &Exponent,
    start: &Point,
    bounds: &SearchBox,
    max_iters: usize,
) -> Option<(Point, f64)> {
    let n = cfg.dimension();
    let mut x = start.clone();
    let mut lambda = 0.0f64;
    for _ in 0..max_iters {
        let g = potential::gradient(cfg, a, &x).ok()?;
        let gnorm = potential::gradient_norm(&g);
        let scale = potential::gradient_scale(cfg, a, &x);
        // overflowed scales (points crowding a site at large α) cannot certify
        // convergence
        if !gnorm.is_finite() || !scale.is_finite() {
            return None;
        }
        if gnorm <= RESIDUAL_REL * scale {
            return Some((x, gnorm));
        }
        let h = potential::hessian_matrix(cfg, a, &x).ok()?;
        let gv = DVector::from_vec(g.clone());
        let mut stepped = false;
        for _ in 0..8 {
            let mut hd = h.clone();
            if lambda > 0.0 {
                let diag_scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0f64, f64::max).max(scale);
                for i in 0..n {
                    hd[(i, i)] += lambda * diag_scale;
                }
            }
            let Some(dir) = hd.lu().solve(&(-&gv)) else {
                lambda = (lambda * 10.0).max(1e-8);
                continue;
            };
            // backtracking on the gradient norm
            let mut t = 1.0f64;
            while t > 1e-12 {
                let cand = Point::new(
                    x.coords
                        .iter()
                        .zip(dir.iter())
                        .map(|(xi, di)| xi + t * di)
                        .collect(),
                );
                if !bounds.contains(&cand.coords) {
                    t *= 0.5;
                    continue;
                }
                match potential::gradient(cfg, a, &cand) {
                    Ok(gc) if potential::gradient_norm(&gc) < (1.0 - 1e-4 * t) * gnorm => {
                        x = cand;
                        stepped = true;
                        break;
                    }
                    _ => t *= 0.5,
                }
            }
            if stepped {
                lambda *= 0.25;
                break;
            }
            lambda = (lambda * 10.0).max(1e-8);
        }
        if !stepped {
            return None;
        }
    }
    // converged only if the residual target is met
    let g = potential::gradient(cfg, a, &x).ok()?;
    let gnorm = potential::gradient_norm(&g);
    let scale = potential::gradient_scale(cfg, a, &x);
    (gnorm.is_finite() && scale.is_finite() && gnorm <= RESIDUAL_REL * scale).then_some((x, gnorm))
}

fn seed_points(
    cfg: &ChargeConfig,
    bounds: &SearchBox,
    witness_seeds: &[Point],
    count: usize,
    rng_seed: u64,
) -> Vec<Point> {
    let n = cfg.dimension();
    let offset = 64 + rng_seed % 65_536;
    let mut seeds = witness_seeds.to_vec();
    seeds.extend((0..count).map(|i| {
        let coords = (0..n)
            .map(|k| {
                let u = halton(offset + i as u64, HALTON_BASES[k % HALTON_BASES.len()]);
                bounds.lo[k] + u * (bounds.hi[k] - bounds.lo[k])
            })
            .collect();
        Point::new(coords)
    }));
    seeds
}

/// Lexicographic point order with a tie band: coordinates within `tol` are
/// equal for ordering, so symmetric configurations (where two points share a
/// coordinate exactly) sort stably under solver noise far below `tol`.
fn lex_cmp_tol(a: &[f64], b: &[f64], tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() <= tol {
            continue;
        }
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// The degree of ∇V on a large sphere minus the site contributions:
/// Σ_j (−1)^j a^j must equal this on a complete solve. None when the total
/// charge vanishes (out of scope).
pub fn expected_index_sum(cfg: &ChargeConfig, dim: usize) -> Option<i64> {
    let total = cfg.total_charge();
    if total == 0.0 {
        return None;
    }
    let sign_n = if dim % 2 == 0 { 1i64 } else { -1i64 };
    let deg_inf = if total > 0.0 { sign_n } else { 1 };
    let mu = cfg.values.iter().filter(|&&z| z > 0.0).count() as i64;
    let nu = cfg.len() as i64 - mu;
    Some(deg_inf - mu * sign_n - nu)
}

/// Find and classify the critical points of V_α.
///
/// Seeds are the Voronoi witness points followed by Halton low-discrepancy
/// fill of the inflated site bounding box; every converged point is
/// deduplicated at 1e−7·diameter and classified by its Hessian. When the
/// degree identity fails on an all-positive configuration the solve reruns
/// with 2× and 4× seeds before reporting.
pub fn find_critical_points(
    cfg: &ChargeConfig,
    a: &Exponent,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    if a.value() <= 0.0 {
        return Err(Error::InvalidConfig("solver needs alpha > 0".into()));
    }
    let inflation = opts
        .region_inflation
        .unwrap_or(if cfg.all_positive() { 0.1 } else { 10.0 });
    let bounds = search_box(cfg, inflation);
    let witness_seeds: Vec<Point> = match voronoi::build_diagram_with(&cfg.sites, opts.strategy) {
        Ok(d) => d.witnesses(),
        Err(_) => vec![],
    };
    let base_count = opts.seeds.unwrap_or(64 * cfg.len());
    let mut report = None;
    for round in 0..3 {
        let count = base_count << round;
        let seeds = seed_points(cfg, &bounds, &witness_seeds, count, opts.rng_seed);
        let candidate = solve_once(cfg, a, &seeds, &bounds, opts)?;
        let done = candidate.identity_ok != Some(false);
        report = Some(candidate);
        if done {
            break;
        }
    }
    Ok(report.unwrap())
}

fn solve_once(
    cfg: &ChargeConfig,
    a: &Exponent,
    seeds: &[Point],
    bounds: &SearchBox,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let refined = exec::map_slice(opts.strategy, seeds, |s| {
        refine(cfg, a, s, bounds, opts.max_iters)
    });
    let non_converged = refined.iter().filter(|r| r.is_none()).count();
    let radius = DEDUP_FRACTION * cfg.diameter().max(1e-2);
    // location uncertainty ≈ residual/σ_min(H); a near-degenerate critical
    // point (e.g. the regular tetrahedron center at α = 1/2, where the
    // Hessian cancels completely) otherwise scatters into a cloud of
    // "distinct" converged points
    struct Candidate {
        point: Point,
        residual: f64,
        seed: usize,
        report: potential::HessianReport,
        uncertainty: f64,
    }
    let classified: Vec<Candidate> = refined
        .into_iter()
        .enumerate()
        .filter_map(|(seed, r)| {
            let (point, residual) = r?;
            let report = potential::hessian(cfg, a, &point).ok()?;
            let sigma_min = report
                .eigenvalues
                .iter()
                .map(|l| l.abs())
                .fold(f64::INFINITY, f64::min);
            let uncertainty = if sigma_min > 0.0 { residual / sigma_min } else { f64::INFINITY };
            Some(Candidate { point, residual, seed, report, uncertainty })
        })
        .collect();
    let radius_cap = 0.05 * cfg.diameter().max(1e-2);
    let pair_radius = |a: &Candidate, b: &Candidate| {
        let unc = 3.0 * (a.uncertainty + b.uncertainty);
        radius.max(unc.min(radius_cap))
    };
    let mut accepted: Vec<Candidate> = Vec::new();
    for c in classified {
        match accepted
            .iter_mut()
            .find(|q| q.point.dist(&c.point) <= pair_radius(q, &c))
        {
            Some(slot) => {
                if c.residual < slot.residual {
                    *slot = c;
                }
            }
            None => accepted.push(c),
        }
    }
    // consolidate until stable: replacing a representative can bring two
    // accepted entries (e.g. opposite ends of a degenerate cloud) into range
    loop {
        let mut merged = false;
        'scan: for i in 0..accepted.len() {
            for j in i + 1..accepted.len() {
                if accepted[i].point.dist(&accepted[j].point)
                    <= pair_radius(&accepted[i], &accepted[j])
                {
                    let gone = accepted.remove(j);
                    if gone.residual < accepted[i].residual {
                        accepted[i] = gone;
                    }
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            break;
        }
    }
    accepted.sort_by(|x, y| lex_cmp_tol(&x.point.coords, &y.point.coords, radius));

    let points: Vec<CriticalPoint> = accepted
        .into_iter()
        .map(|c| CriticalPoint {
            morse_index: c.report.morse_index(),
            degenerate: c.report.degenerate() || c.uncertainty > radius,
            location: c.point,
            residual: c.residual,
            basin_seed: c.seed,
        })
        .collect();
    let census = MorseCensus::from_indices(points.iter().map(|p| p.morse_index));
    let degenerate_count = points.iter().filter(|p| p.degenerate).count();
    let identity_ok = if degenerate_count > 0 {
        None
    } else {
        expected_index_sum(cfg, cfg.dimension()).map(|e| census.index_sum() == e)
    };
    Ok(SolveReport {
        points,
        census,
        seeds_used: seeds.len(),
        non_converged,
        degenerate_count,
        identity_ok,
    })
}

/// Per-α solve with comparison against the (α-independent) effective census.
pub fn alpha_sweep(
    cfg: &ChargeConfig,
    alphas: &[Exponent],
    opts: &SolveOptions,
) -> Vec<SweepRecord> {
    debug_assert!(alphas.windows(2).all(|w| w[0].value() <= w[1].value()));
    let effective = voronoi::build_diagram_with(&cfg.sites, opts.strategy)
        .ok()
        .and_then(|d| d.effective_census(None).ok());
    let compare = cfg.all_positive();
    exec::map_slice(opts.strategy, alphas, |a| {
        match find_critical_points(cfg, a, opts) {
            Ok(rep) => {
                let matches = match (&effective, compare) {
                    (Some(eff), true) => Some(rep.census.matches_census(eff)),
                    _ => None,
                };
                SweepRecord {
                    alpha: a.value(),
                    total: Some(rep.census.total()),
                    census: Some(rep.census),
                    effective_total: effective.as_ref().map(|e| e.total),
                    matches_effective: matches,
                    error: None,
                }
            }
            Err(e) => SweepRecord {
                alpha: a.value(),
                census: None,
                total: None,
                effective_total: effective.as_ref().map(|e| e.total),
                matches_effective: None,
                error: Some(e.to_string()),
            },
        }
    })
}

/// 1-D sweep: certified counts of the restriction of cfg to `line`, compared
/// against the effective-w.r.t.-L census.
pub fn alpha_sweep_line(
    cfg: &ChargeConfig,
    line: &crate::geometry::AffineSubspace,
    alphas: &[Exponent],
    strategy: Strategy,
) -> Result<Vec<SweepRecord>> {
    let rcfg = potential::restrict_to(cfg, line)?;
    let relative = voronoi::build_diagram_with(&cfg.sites, strategy)
        .ok()
        .and_then(|d| d.effective_census(Some(line)).ok());
    let compare = cfg.all_positive();
    Ok(exec::map_slice(strategy, alphas, |a| {
        match count_1d_certified(&rcfg, a) {
            Ok(out) => {
                let matches = match (&relative, compare) {
                    (Some(eff), true) => Some(out.census.matches_census(eff)),
                    _ => None,
                };
                SweepRecord {
                    alpha: a.value(),
                    total: Some(out.count),
                    census: Some(out.census),
                    effective_total: relative.as_ref().map(|e| e.total),
                    matches_effective: matches,
                    error: None,
                }
            }
            Err(e) => SweepRecord {
                alpha: a.value(),
                census: None,
                total: None,
                effective_total: relative.as_ref().map(|e| e.total),
                matches_effective: None,
                error: Some(e.to_string()),
            },
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct PaperDifferenceForm {
    /// m₁ − m₂ = a¹ − a^{n−1}
    pub m1_minus_m2: i64,
    /// ν − μ − 1
    pub nu_minus_mu_minus_1: i64,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MorseKiangBounds {
    pub m1: usize,
    pub m2: usize,
    pub m1_lower: usize,
    pub m2_lower: usize,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub index_sum: i64,
    pub expected_index_sum: Option<i64>,
    pub holds: Option<bool>,
    /// The literature difference identity, reported as a labeled comparison.
    pub paper_difference: Option<PaperDifferenceForm>,
    /// Lower bounds from Morse theory (n ≥ 3); a violation means the solver
    /// missed points.
    pub morse_kiang: Option<MorseKiangBounds>,
}

/// Check the degree identity Σ (−1)^j a^j and report the Morse–Kiang
/// diagnostics. Errors when the census includes degenerate points.
pub fn census_identities(
    census: &MorseCensus,
    cfg: &ChargeConfig,
    degenerate_count: usize,
) -> Result<IdentityReport> {
    if degenerate_count > 0 {
        return Err(Error::DegenerateCensus(format!(
            "{degenerate_count} degenerate point(s)"
        )));
    }
    let n = cfg.dimension();
    let expected = expected_index_sum(cfg, n);
    let index_sum = census.index_sum();
    let mu = cfg.values.iter().filter(|&&z| z > 0.0).count();
    let nu = cfg.len() - mu;
    let paper_difference = (n >= 2).then(|| {
        let m1 = census.count(1) as i64;
        let m2 = census.count(n - 1) as i64;
        let rhs = nu as i64 - mu as i64 - 1;
        PaperDifferenceForm {
            m1_minus_m2: m1 - m2,
            nu_minus_mu_minus_1: rhs,
            matches: m1 - m2 == rhs,
        }
    });
    let morse_kiang = (n >= 3 && cfg.total_charge() != 0.0).then(|| {
        let m1 = census.count(1);
        let m2 = census.count(n - 1);
        let (m2_lower, m1_lower) = if cfg.total_charge() < 0.0 {
            (mu, nu.saturating_sub(1))
        } else {
            (mu.saturating_sub(1), nu)
        };
        MorseKiangBounds {
            m1,
            m2,
            m1_lower,
            m2_lower,
            satisfied: m1 >= m1_lower && m2 >= m2_lower,
        }
    });
    Ok(IdentityReport {
        index_sum,
        expected_index_sum: expected,
        holds: expected.map(|e| e == index_sum),
        paper_difference,
        morse_kiang,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxwellReport {
    pub l: usize,
    pub alpha: f64,
    pub total: usize,
    /// (l−1)²
    pub maxwell_bound: usize,
    pub exceeds_maxwell: bool,
    /// (a^j, ♯^j) pairs by index = dimension; None for mixed signs or a
    /// non-generic diagram.
    pub per_index: Option<Vec<(usize, usize, usize)>>,
    pub exceeds_sharp: bool,
    /// Flagged counterexample description, persisted for manual review.
    pub counterexample: Option<String>,
}

/// Compare a solve against Maxwell's (l−1)² and the effective-census
/// inequality a^j ≤ ♯^j.
pub fn maxwell_check(cfg: &ChargeConfig, a: &Exponent, opts: &SolveOptions) -> Result<MaxwellReport> {
    let report = find_critical_points(cfg, a, opts)?;
    maxwell_check_report(cfg, a, &report, opts.strategy)
}

pub fn maxwell_check_report(
    cfg: &ChargeConfig,
    a: &Exponent,
    report: &SolveReport,
    strategy: Strategy,
) -> Result<MaxwellReport> {
    let l = cfg.len();
    let total = report.census.total();
    let maxwell_bound = (l - 1) * (l - 1);
    let exceeds_maxwell = total > maxwell_bound;
    let effective = if cfg.all_positive() {
        voronoi::build_diagram_with(&cfg.sites, strategy)
            .ok()
            .and_then(|d| d.effective_census(None).ok())
    } else {
        None
    };
    let mut exceeds_sharp = false;
    let per_index = effective.map(|eff| {
        let dims: std::collections::BTreeSet<usize> = report
            .census
            .counts
            .keys()
            .copied()
            .chain(eff.counts_by_dim.keys().copied())
            .collect();
        dims.into_iter()
            .map(|j| {
                let aj = report.census.count(j);
                let sj = eff.count(j);
                if aj > sj {
                    exceeds_sharp = true;
                }
                (j, aj, sj)
            })
            .collect()
    });
    let counterexample = if exceeds_sharp {
        Some(format!(
            "a^j exceeds effective census for l={l}, alpha={}",
            a.value()
        ))
    } else if exceeds_maxwell {
        Some(format!(
            "total {total} exceeds (l−1)² = {maxwell_bound} for l={l}, alpha={}",
            a.value()
        ))
    } else {
        None
    };
    Ok(MaxwellReport {
        l,
        alpha: a.value(),
        total,
        maxwell_bound,
        exceeds_maxwell,
        per_index,
        exceeds_sharp,
        counterexample,
    })
}

/// Pair each critical point with the witness of an effective cell whose
/// dimension equals the point's index; returns the distances, or None when
/// the census does not match the effective census.
pub fn witness_distances(points: &[CriticalPoint], diagram: &VoronoiDiagram) -> Option<Vec<f64>> {
    let mut pools: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    for c in &diagram.cells {
        if c.codim > 0 && c.effective {
            pools
                .entry(c.dim)
                .or_default()
                .push(c.witness.clone()?);
        }
    }
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let pool = pools.get_mut(&p.morse_index)?;
        if pool.is_empty() {
            return None;
        }
        let (best, dist) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.dist(&p.location)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        pool.swap_remove(best);
        out.push(dist);
    }
    Some(out)
}

/// Dense Hessian at a point as a matrix (for reuse in diagnostics).
pub fn hessian_at(cfg: &ChargeConfig, a: &Exponent, x: &Point) -> Result<DMatrix<f64>> {
    potential::hessian_matrix(cfg, a, x)
}
