//! Geometric kernel: points, affine subspaces, circumcenters, projections,
//! and convex-hull membership backed by exact rational LP.
//!
//! Two arithmetic tracks: binary64 for smooth numerics, exact
//! arbitrary-precision rationals for the boundary-sensitive predicates
//! (hull membership, Voronoi feasibility). Every finite f64 is treated as the
//! rational it exactly is; the Voronoi layer additionally snaps inputs to
//! denominators ≤ 2^40 before exact processing.

pub mod exact;
pub mod simplex;

use crate::error::{Error, Result};
use crate::rational;
use exact::{rat_dot, RatVec};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use simplex::{maximize, LpConstraint, LpOutcome};

/// Relative tolerance for float geometric predicates.
pub const GEOM_TOL: f64 = 1e-10;
/// Orthonormality tolerance for subspace bases.
pub const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn sq_dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.sq_dist(other).sqrt()
    }

    pub fn to_rat(&self) -> RatVec {
        self.coords.iter().map(|&c| rational::exact(c)).collect()
    }

    pub fn from_rat(coords: &[BigRational]) -> Self {
        Point::new(coords.iter().map(rational::to_f64).collect())
    }
}

/// base + span(basis), basis mutually orthogonal unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSubspace {
    pub base: Point,
    pub basis: Vec<Vec<f64>>,
}

impl AffineSubspace {
    pub fn new(base: Point, basis: Vec<Vec<f64>>) -> Self {
        let s = AffineSubspace { base, basis };
        debug_assert!(s.check_orthonormal());
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    fn check_orthonormal(&self) -> bool {
        for (i, u) in self.basis.iter().enumerate() {
            let norm: f64 = u.iter().map(|x| x * x).sum();
            if (norm - 1.0).abs() > 1e-10 {
                return false;
            }
            for v in &self.basis[..i] {
                let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                if d.abs() > 1e-10 {
                    return false;
                }
            }
        }
        true
    }

    /// Intrinsic coordinates of the projection of p.
    pub fn intrinsic(&self, p: &Point) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| {
                b.iter()
                    .zip(p.coords.iter().zip(&self.base.coords))
                    .map(|(bi, (pi, qi))| bi * (pi - qi))
                    .sum()
            })
            .collect()
    }

    /// Ambient point for intrinsic coordinates.
    pub fn embed(&self, s: &[f64]) -> Point {
        let mut out = self.base.coords.clone();
        for (b, &si) in self.basis.iter().zip(s) {
            for (o, &bi) in out.iter_mut().zip(b) {
                *o += si * bi;
            }
        }
        Point::new(out)
    }
}

/// Classification of a point against the convex hull of a vertex set,
/// relative to the affine hull of the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HullMembership {
    /// Relative interior; certificate: strictly positive barycentric weights.
    Interior { weights: Vec<f64> },
    /// Relative boundary; certificate: barycentric weights (some zero).
    Boundary { weights: Vec<f64> },
    /// Outside; certificate: separating functional (w, offset) with
    /// w·v ≤ offset for all vertices and w·p > offset.
    Outside { separator: Vec<f64>, offset: f64 },
}

impl HullMembership {
    pub fn is_interior(&self) -> bool {
        matches!(self, HullMembership::Interior { .. })
    }
    pub fn is_boundary(&self) -> bool {
        matches!(self, HullMembership::Boundary { .. })
    }
    pub fn is_outside(&self) -> bool {
        matches!(self, HullMembership::Outside { .. })
    }
}

fn check_same_dim(p: &Point, vertices: &[Point]) -> Result<usize> {
    let n = p.dim();
    for v in vertices {
        if v.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
    }
    Ok(n)
}

/// Equidistant point to the inputs within their affine span.
///
/// Requires affine independence (Gram determinant above tolerance); the
/// returned point satisfies the equidistance system to ~1e−10 relative.
pub fn circumcenter(points: &[Point]) -> Result<Point> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("no points".into()));
    }
    check_same_dim(&points[0], points)?;
    let k = points.len() - 1;
    if k == 0 {
        return Ok(points[0].clone());
    }
    let p0 = &points[0];
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.coords.iter().zip(&p0.coords).map(|(a, b)| a - b).collect())
        .collect();
    let mut gram = nalgebra::DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = 2.0 * diffs[i].iter().zip(&diffs[j]).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    let scale: f64 = (0..k).map(|i| gram[(i, i)].abs().max(1e-300)).product();
    let rhs = nalgebra::DVector::from_iterator(
        k,
        diffs.iter().map(|d| d.iter().map(|x| x * x).sum::<f64>()),
    );
    let lu = gram.clone().lu();
    let det = lu.determinant();
    if det.abs() <= 1e-10 * scale {
        return Err(Error::DegenerateInput(
            "points are affinely dependent (Gram determinant below tolerance)".into(),
        ));
    }
    let z = lu.solve(&rhs).ok_or_else(|| {
        Error::DegenerateInput("singular equidistance system".into())
    })?;
    let mut out = p0.coords.clone();
    for (zi, d) in z.iter().zip(&diffs) {
        for (o, di) in out.iter_mut().zip(d) {
            *o += zi * di;
        }
    }
    Ok(Point::new(out))
}

/// Circumcenter over exact rationals; handles affinely dependent inputs by
/// solving the (possibly singular) equidistance system within the affine
/// span. None when no equidistant point exists there.
pub fn circumcenter_rat(points: &[RatVec]) -> Option<RatVec> {
    let p0 = points.first()?;
    let k = points.len() - 1;
    if k == 0 {
        return Some(p0.clone());
    }
    let diffs: Vec<RatVec> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    // x = p0 + Σ z_m d_m ; 2 d_i·(x − p0) = |d_i|²
    let rows: Vec<(RatVec, BigRational)> = diffs
        .iter()
        .map(|di| {
            let coeffs = diffs
                .iter()
                .map(|dm| BigRational::from_integer(2.into()) * rat_dot(di, dm))
                .collect();
            (coeffs, rat_dot(di, di))
        })
        .collect();
    let (z, _) = exact::solve_affine(&rows, k)?;
    let mut out = p0.clone();
    for (zm, d) in z.iter().zip(&diffs) {
        for (o, dm) in out.iter_mut().zip(d) {
            *o += zm * dm;
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullStatus {
    Interior,
    Boundary,
    Outside,
}

/// Exact hull classification over rationals, relative to the affine hull of
/// the vertices. Uses the positive-representation characterization of the
/// relative interior.
pub fn hull_membership_rat(p: &[BigRational], vertices: &[RatVec]) -> (HullStatus, Vec<BigRational>) {
    let n = p.len();
    let k = vertices.len();
    // variables: λ_1..λ_k, t ; maximize t
    let nv = k + 1;
    let mut cons = Vec::new();
    for d in 0..n {
        let mut row = vec![BigRational::zero(); nv];
        for (m, v) in vertices.iter().enumerate() {
            row[m] = v[d].clone();
        }
        cons.push(LpConstraint::eq(row, p[d].clone()));
    }
    let mut ones = vec![BigRational::zero(); nv];
    for slot in ones.iter_mut().take(k) {
        *slot = BigRational::from_integer(1.into());
    }
    cons.push(LpConstraint::eq(ones, BigRational::from_integer(1.into())));
    for m in 0..k {
        let mut row = vec![BigRational::zero(); nv];
        row[m] = BigRational::from_integer((-1).into());
        cons.push(LpConstraint::le(row, BigRational::zero())); // λ_m ≥ 0
        let mut row = vec![BigRational::zero(); nv];
        row[m] = BigRational::from_integer((-1).into());
        row[k] = BigRational::from_integer(1.into());
        cons.push(LpConstraint::le(row, BigRational::zero())); // t ≤ λ_m
    }
    let mut obj = vec![BigRational::zero(); nv];
    obj[k] = BigRational::from_integer(1.into());
    match maximize(&obj, &cons) {
        LpOutcome::Optimal { value, point } => {
            let weights = point[..k].to_vec();
            if value.is_positive() {
                (HullStatus::Interior, weights)
            } else {
                (HullStatus::Boundary, weights)
            }
        }
        LpOutcome::Infeasible => (HullStatus::Outside, vec![]),
        LpOutcome::Unbounded => unreachable!("t is bounded by the weights"),
    }
}

/// Strict separation margin for a point outside the hull: maximize s with
/// w·v ≤ β, w·p ≥ β + s, ‖w‖∞ ≤ 1. Returns (s, w, β).
fn separation_rat(p: &[BigRational], vertices: &[RatVec]) -> (BigRational, RatVec, BigRational) {
    let n = p.len();
    // variables: w_1..w_n, β, s ; maximize s
    let nv = n + 2;
    let one = BigRational::from_integer(1.into());
    let mut cons = Vec::new();
    for v in vertices {
        let mut row = vec![BigRational::zero(); nv];
        row[..n].clone_from_slice(v);
        row[n] = -one.clone();
        cons.push(LpConstraint::le(row, BigRational::zero())); // w·v − β ≤ 0
    }
    let mut row = vec![BigRational::zero(); nv];
    for (slot, pc) in row.iter_mut().zip(p) {
        *slot = -pc.clone();
    }
    row[n] = one.clone();
    row[n + 1] = one.clone();
    cons.push(LpConstraint::le(row, BigRational::zero())); // β + s − w·p ≤ 0
    for d in 0..n {
        let mut hi = vec![BigRational::zero(); nv];
        hi[d] = one.clone();
        cons.push(LpConstraint::le(hi, one.clone()));
        let mut lo = vec![BigRational::zero(); nv];
        lo[d] = -one.clone();
        cons.push(LpConstraint::le(lo, one.clone()));
    }
    let mut obj = vec![BigRational::zero(); nv];
    obj[n + 1] = one;
    match maximize(&obj, &cons) {
        LpOutcome::Optimal { value, point } => (value, point[..n].to_vec(), point[n].clone()),
        _ => (BigRational::zero(), vec![BigRational::zero(); n], BigRational::zero()),
    }
}

/// Hull membership with 1e−10 tolerance on float inputs; exact LP inside.
pub fn hull_membership(p: &Point, vertices: &[Point]) -> Result<HullMembership> {
    if vertices.is_empty() {
        return Err(Error::DegenerateInput("empty vertex set".into()));
    }
    check_same_dim(p, vertices)?;
    let pr = p.to_rat();
    let vr: Vec<RatVec> = vertices.iter().map(Point::to_rat).collect();
    let scale = vertices
        .iter()
        .flat_map(|v| v.coords.iter())
        .chain(p.coords.iter())
        .fold(1.0f64, |m, &c| m.max(c.abs()));
    let (status, weights) = hull_membership_rat(&pr, &vr);
    let wf: Vec<f64> = weights.iter().map(rational::to_f64).collect();
    match status {
        HullStatus::Interior => {
            let min_w = wf.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_w <= GEOM_TOL {
                Ok(HullMembership::Boundary { weights: wf })
            } else {
                Ok(HullMembership::Interior { weights: wf })
            }
        }
        HullStatus::Boundary => Ok(HullMembership::Boundary { weights: wf }),
        HullStatus::Outside => {
            let (margin, w, beta) = separation_rat(&pr, &vr);
            let m = margin.to_f64().unwrap_or(0.0);
            if m <= GEOM_TOL * (1.0 + scale) {
                Ok(HullMembership::Boundary { weights: vec![] })
            } else {
                Ok(HullMembership::Outside {
                    separator: w.iter().map(rational::to_f64).collect(),
                    offset: rational::to_f64(&beta),
                })
            }
        }
    }
}

/// Strict hull membership on exact rational data (no tolerance band).
pub fn hull_membership_exact(p: &Point, vertices: &[Point]) -> Result<HullStatus> {
    if vertices.is_empty() {
        return Err(Error::DegenerateInput("empty vertex set".into()));
    }
    check_same_dim(p, vertices)?;
    let vr: Vec<RatVec> = vertices.iter().map(Point::to_rat).collect();
    Ok(hull_membership_rat(&p.to_rat(), &vr).0)
}

/// Orthogonal projection of p onto L.
pub fn project_onto(p: &Point, subspace: &AffineSubspace) -> Result<Point> {
    if p.dim() != subspace.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: subspace.ambient_dim(),
            got: p.dim(),
        });
    }
    Ok(subspace.embed(&subspace.intrinsic(p)))
}

/// Affine span of a point set: base = first point, orthonormal basis from
/// modified Gram–Schmidt with a re-orthogonalization pass; rank cut at
/// 1e−10 relative.
pub fn affine_span(points: &[Point]) -> AffineSubspace {
    assert!(!points.is_empty(), "affine_span of an empty set");
    let base = points[0].clone();
    let n = base.dim();
    let scale = points
        .iter()
        .map(|p| p.dist(&base))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &points[1..] {
        let mut v: Vec<f64> = p.coords.iter().zip(&base.coords).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > GEOM_TOL * scale {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
            if basis.len() == n {
                break;
            }
        }
    }
    AffineSubspace::new(base, basis)
}
