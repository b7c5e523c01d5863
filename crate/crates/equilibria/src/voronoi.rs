//! Voronoi diagrams with cells of every dimension, genericity and
//! effectiveness classification (absolute and relative to an affine
//! subspace), V_∞ critical points, and combinatorial complexity bounds.
//!
//! Construction enumerates all nearest-site subsets T and decides each cell
//! {x : equidistant to T, strictly nearer to T than to the rest} by exact
//! rational LP; sites are snapped to denominators ≤ 2^40 first, so every
//! predicate is deterministic. At the enforced limits (l ≤ 12, n ≤ 4) the
//! O(2^l) enumeration is cheap and auditable.

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::geometry::exact::{rat_dot, rat_sq_dist, solve_affine, RatVec};
use crate::geometry::{circumcenter_rat, hull_membership_rat, AffineSubspace, HullStatus, Point};
use crate::rational;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};

pub const MAX_SITES: usize = 12;
pub const MAX_DIM: usize = 4;

/// One Voronoi cell: the locus with nearest-site set `nearest`, an open
/// polyhedron inside the equidistant affine span.
#[derive(Debug, Clone, Serialize)]
pub struct VoronoiCell {
    /// Indices of the nearest sites NS(S), sorted.
    pub nearest: Vec<usize>,
    /// Dimension of the cell (equals dim of its span).
    pub dim: usize,
    pub codim: usize,
    /// Equidistant locus containing the cell.
    pub span: AffineSubspace,
    /// Strict nearness constraints a·x < b cutting the cell within the span.
    pub constraints: Vec<(Vec<f64>, f64)>,
    /// Circumcenter of the nearest sites.
    pub witness: Option<Point>,
    /// Positive-codim cells: intersects conv(NS) and the witness realizes NS.
    pub effective: bool,
    /// |NS| = codim+1 and the witness stays off the relative hull boundary.
    pub generic: bool,
    /// Borderline evidence (witness exactly on the hull boundary or on the
    /// cell's own boundary); such cells are reported non-generic rather than
    /// classified.
    pub boundary_case: bool,
}

/// Exact per-cell data retained for the relative (w.r.t. L) machinery.
#[derive(Debug, Clone)]
struct ExactCell {
    /// equidistance rows a·x = b
    eq_rows: Vec<(RatVec, BigRational)>,
    /// strict nearness rows a·x < b
    lt_rows: Vec<(RatVec, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    pub cells: Vec<VoronoiCell>,
    /// Fingerprint of the snapped input sites.
    pub config_hash: String,
    /// Sites after snapping (the coordinates all predicates used).
    pub sites: Vec<Point>,
    sites_rat: Vec<RatVec>,
    exact: Vec<ExactCell>,
    ns_index: HashMap<Vec<usize>, usize>,
}

/// Effective-cell counts keyed by cell dimension (absolute mode) or by
/// dim(S ∩ L) (relative mode).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveCensus {
    pub counts_by_dim: BTreeMap<usize, usize>,
    pub total: usize,
}

impl EffectiveCensus {
    fn from_dims(dims: impl IntoIterator<Item = usize>) -> Self {
        let mut counts_by_dim = BTreeMap::new();
        for d in dims {
            *counts_by_dim.entry(d).or_insert(0) += 1;
        }
        let total = counts_by_dim.values().sum();
        EffectiveCensus { counts_by_dim, total }
    }

    pub fn count(&self, dim: usize) -> usize {
        self.counts_by_dim.get(&dim).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GenericityViolation {
    /// cell has |NS| ≠ codim+1
    WrongNearestCount { nearest: Vec<usize>, codim: usize },
    /// witness sits exactly on the relative boundary of conv(NS) or on the
    /// cell's own boundary
    BoundaryWitness { nearest: Vec<usize> },
}

fn lp_strict_max(
    num_vars: usize,
    eq_rows: &[(RatVec, BigRational)],
    lt_rows: &[(RatVec, BigRational)],
    extra_le: &[(RatVec, BigRational)],
) -> Option<BigRational> {
    use crate::geometry::simplex::{maximize, LpConstraint, LpOutcome};
    // variables: x (num_vars), t; maximize t
    let nv = num_vars + 1;
    let mut cons = Vec::new();
    for (a, b) in eq_rows {
        let mut row = vec![BigRational::zero(); nv];
        row[..num_vars].clone_from_slice(a);
        cons.push(LpConstraint::eq(row, b.clone()));
    }
    for (a, b) in lt_rows {
        let mut row = vec![BigRational::zero(); nv];
        row[..num_vars].clone_from_slice(a);
        row[num_vars] = BigRational::from_integer(1.into());
        cons.push(LpConstraint::le(row, b.clone()));
    }
    for (a, b) in extra_le {
        let mut row = vec![BigRational::zero(); nv];
        row[..num_vars].clone_from_slice(a);
        cons.push(LpConstraint::le(row, b.clone()));
    }
    let mut cap = vec![BigRational::zero(); nv];
    cap[num_vars] = BigRational::from_integer(1.into());
    cons.push(LpConstraint::le(cap, BigRational::from_integer(1.into())));
    let mut obj = vec![BigRational::zero(); nv];
    obj[num_vars] = BigRational::from_integer(1.into());
    match maximize(&obj, &cons) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("slack capped at 1"),
    }
}

fn nearest_set_rat(sites: &[RatVec], p: &[BigRational]) -> Vec<usize> {
    let dists: Vec<BigRational> = sites.iter().map(|s| rat_sq_dist(s, p)).collect();
    let min = dists.iter().min().expect("nonempty sites").clone();
    dists
        .iter()
        .enumerate()
        .filter(|(_, d)| **d == min)
        .map(|(i, _)| i)
        .collect()
}

/// Orthonormalize a rational nullspace basis into floats for the public span.
fn orthonormal_basis(null: &[RatVec]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in null {
        let mut w: Vec<f64> = v.iter().map(rational::to_f64).collect();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= d * bi;
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-13 {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            basis.push(w);
        }
    }
    basis
}

/// Build the diagram of pairwise distinct sites (l ≤ 12, n ≤ 4).
pub fn build_diagram(sites: &[Point]) -> Result<VoronoiDiagram> {
    build_diagram_with(sites, Strategy::default())
}

pub fn build_diagram_with(sites: &[Point], strategy: Strategy) -> Result<VoronoiDiagram> {
    if sites.is_empty() {
        return Err(Error::InvalidConfig("no sites".into()));
    }
    let l = sites.len();
    let n = sites[0].dim();
    if l > MAX_SITES || n > MAX_DIM {
        return Err(Error::LimitsExceeded(format!("l = {l} (≤ {MAX_SITES}), n = {n} (≤ {MAX_DIM})")));
    }
    for s in sites {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
        }
    }
    let sites_rat: Vec<RatVec> = sites
        .iter()
        .map(|s| s.coords.iter().map(|&c| rational::snap_default(c)).collect())
        .collect();
    for i in 0..l {
        for j in i + 1..l {
            if rat_sq_dist(&sites_rat[i], &sites_rat[j]).is_zero() {
                return Err(Error::DuplicateSites(i, j));
            }
        }
    }
    let sites_snapped: Vec<Point> = sites_rat.iter().map(|s| Point::from_rat(s)).collect();

    let norms: Vec<BigRational> = sites_rat.iter().map(|s| rat_dot(s, s)).collect();
    let two = BigRational::from_integer(2.into());

    let masks: Vec<usize> = (1..(1usize << l)).collect();
    let built = exec::map_range(strategy, masks.len(), |mi| {
        let mask = masks[mi];
        let members: Vec<usize> = (0..l).filter(|i| mask & (1 << i) != 0).collect();
        let i0 = members[0];
        let eq_rows: Vec<(RatVec, BigRational)> = members[1..]
            .iter()
            .map(|&i| {
                let coeffs: RatVec = sites_rat[i]
                    .iter()
                    .zip(&sites_rat[i0])
                    .map(|(a, b)| &two * (a - b))
                    .collect();
                (coeffs, &norms[i] - &norms[i0])
            })
            .collect();
        // consistency of the equidistant locus
        let Some((particular, nullspace)) = solve_affine(&eq_rows, n) else {
            return None;
        };
        let lt_rows: Vec<(RatVec, BigRational)> = (0..l)
            .filter(|k| !members.contains(k))
            .map(|k| {
                let coeffs: RatVec = sites_rat[k]
                    .iter()
                    .zip(&sites_rat[i0])
                    .map(|(a, b)| &two * (a - b))
                    .collect();
                (coeffs, &norms[k] - &norms[i0])
            })
            .collect();
        let margin = lp_strict_max(n, &eq_rows, &lt_rows, &[])?;
        if !margin.is_positive() {
            return None;
        }
        let dim = nullspace.len();
        let codim = n - dim;
        let witness_rat = circumcenter_rat(
            &members.iter().map(|&i| sites_rat[i].clone()).collect::<Vec<_>>(),
        );
        debug_assert!(witness_rat.is_some(), "feasible cell without circumcenter");

        let mut effective = false;
        let mut boundary_case = false;
        if codim > 0 {
            if let Some(w) = &witness_rat {
                let member_sites: Vec<RatVec> =
                    members.iter().map(|&i| sites_rat[i].clone()).collect();
                let (status, _) = hull_membership_rat(w, &member_sites);
                let ns_w = nearest_set_rat(&sites_rat, w);
                let realizes = ns_w == members;
                match (status, realizes) {
                    (HullStatus::Outside, _) => {}
                    (HullStatus::Interior, true) => effective = true,
                    (HullStatus::Boundary, true) => {
                        effective = true;
                        boundary_case = true;
                    }
                    (_, false) => {
                        // witness equidistant to T; a strict superset means it
                        // sits on the cell's own boundary inside the hull
                        if members.iter().all(|m| ns_w.contains(m)) {
                            boundary_case = true;
                        }
                    }
                }
            }
        }
        let generic = members.len() == codim + 1 && !boundary_case;
        let span = AffineSubspace::new(
            Point::from_rat(&particular),
            orthonormal_basis(&nullspace),
        );
        let constraints = lt_rows
            .iter()
            .map(|(a, b)| (a.iter().map(rational::to_f64).collect(), rational::to_f64(b)))
            .collect();
        let cell = VoronoiCell {
            nearest: members,
            dim,
            codim,
            span,
            constraints,
            witness: witness_rat.as_ref().map(|w| Point::from_rat(w)),
            effective,
            generic,
            boundary_case,
        };
        Some((cell, ExactCell { eq_rows, lt_rows }))
    });

    let mut cells = Vec::new();
    let mut exact = Vec::new();
    let mut ns_index = HashMap::new();
    for item in built.into_iter().flatten() {
        ns_index.insert(item.0.nearest.clone(), cells.len());
        cells.push(item.0);
        exact.push(item.1);
    }

    let mut hasher = Sha256::new();
    for s in &sites_rat {
        for c in s {
            hasher.update(c.to_string().as_bytes());
            hasher.update(b",");
        }
        hasher.update(b";");
    }
    let config_hash = format!("{:x}", hasher.finalize())[..16].to_string();

    Ok(VoronoiDiagram {
        cells,
        config_hash,
        sites: sites_snapped,
        sites_rat,
        exact,
        ns_index,
    })
}

impl VoronoiDiagram {
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn cell_by_nearest(&self, nearest: &[usize]) -> Option<&VoronoiCell> {
        self.ns_index.get(nearest).map(|&i| &self.cells[i])
    }

    /// The cell containing p (by exact nearest-set lookup on snapped data).
    pub fn locate(&self, p: &Point) -> Option<&VoronoiCell> {
        let pr: RatVec = p.coords.iter().map(|&c| rational::exact(c)).collect();
        let ns = nearest_set_rat(&self.sites_rat, &pr);
        self.cell_by_nearest(&ns)
    }

    /// Genericity: every codim-k cell has exactly k+1 nearest sites and its
    /// witness avoids the relative boundary of conv(NS).
    pub fn is_generic(&self) -> (bool, Vec<GenericityViolation>) {
        let mut violations = Vec::new();
        for c in &self.cells {
            if c.nearest.len() != c.codim + 1 {
                violations.push(GenericityViolation::WrongNearestCount {
                    nearest: c.nearest.clone(),
                    codim: c.codim,
                });
            }
            if c.boundary_case {
                violations.push(GenericityViolation::BoundaryWitness {
                    nearest: c.nearest.clone(),
                });
            }
        }
        (violations.is_empty(), violations)
    }

    /// Effectiveness of a positive-codimension cell: its witness lies in
    /// conv(NS) and realizes NS as its exact nearest-site set. Borderline
    /// witnesses are an error, not a classification.
    pub fn is_effective(&self, cell_index: usize) -> Result<bool> {
        let c = &self.cells[cell_index];
        if c.codim == 0 {
            return Err(Error::NotPositiveCodim);
        }
        if c.boundary_case {
            return Err(Error::NonGenericDiagram(format!(
                "witness of cell {:?} is a boundary case",
                c.nearest
            )));
        }
        Ok(c.effective)
    }

    /// Feasibility data for cell ∩ L in intrinsic L-coordinates:
    /// (eq rows over s, strict rows over s, dim of span∩L) or None when the
    /// spans do not meet.
    fn slice_system(
        &self,
        cell_index: usize,
        base: &RatVec,
        dirs: &[RatVec],
    ) -> Option<(Vec<(RatVec, BigRational)>, Vec<(RatVec, BigRational)>, usize)> {
        let ex = &self.exact[cell_index];
        let dim_l = dirs.len();
        let to_s = |(a, b): &(RatVec, BigRational)| -> (RatVec, BigRational) {
            let coeffs: RatVec = dirs.iter().map(|d| rat_dot(a, d)).collect();
            let rhs = b - rat_dot(a, base);
            (coeffs, rhs)
        };
        let eq_s: Vec<_> = ex.eq_rows.iter().map(to_s).collect();
        let lt_s: Vec<_> = ex.lt_rows.iter().map(to_s).collect();
        let (_, null) = solve_affine(&eq_s, dim_l)?;
        Some((eq_s, lt_s, null.len()))
    }

    fn snap_subspace(subspace: &AffineSubspace) -> (RatVec, Vec<RatVec>) {
        let base: RatVec = subspace
            .base
            .coords
            .iter()
            .map(|&c| rational::snap_default(c))
            .collect();
        let dirs: Vec<RatVec> = subspace
            .basis
            .iter()
            .map(|b| b.iter().map(|&c| rational::snap_default(c)).collect())
            .collect();
        (base, dirs)
    }

    /// Intrinsic L-coordinates of the orthogonal projections of the cell's
    /// nearest sites onto (snapped) L: solve the normal equations exactly.
    fn projected_nearest(
        &self,
        cell_index: usize,
        base: &RatVec,
        dirs: &[RatVec],
    ) -> Vec<RatVec> {
        let dim_l = dirs.len();
        let gram: Vec<RatVec> = dirs
            .iter()
            .map(|di| dirs.iter().map(|dj| rat_dot(di, dj)).collect())
            .collect();
        self.cells[cell_index]
            .nearest
            .iter()
            .map(|&m| {
                let diff: RatVec = self.sites_rat[m]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect();
                let rows: Vec<(RatVec, BigRational)> = (0..dim_l)
                    .map(|i| (gram[i].clone(), rat_dot(&dirs[i], &diff)))
                    .collect();
                let (sol, _) = solve_affine(&rows, dim_l).expect("Gram system is consistent");
                sol
            })
            .collect()
    }

    /// Effectiveness w.r.t. L: LP feasibility of
    /// {x ∈ S ∩ L} ∩ conv(proj_L(NS(S))), with the relative-interior margin
    /// as the genericity certificate.
    pub fn is_effective_wrt(&self, cell_index: usize, subspace: &AffineSubspace) -> Result<bool> {
        let (base, dirs) = Self::snap_subspace(subspace);
        self.effective_wrt_inner(cell_index, &base, &dirs)
            .map(|o| o.unwrap_or(false))
    }

    /// Ok(None) means the cell does not meet L (vacuously not counted).
    fn effective_wrt_inner(
        &self,
        cell_index: usize,
        base: &RatVec,
        dirs: &[RatVec],
    ) -> Result<Option<bool>> {
        let c = &self.cells[cell_index];
        let dim_l = dirs.len();
        let n = self.ambient_dim();
        let Some((eq_s, lt_s, dim_meet)) = self.slice_system(cell_index, base, dirs) else {
            return Ok(None);
        };
        // transversality: dim(E∩L) = dim E + dim L − n when the spans meet
        let expected = c.dim as isize + dim_l as isize - n as isize;
        if expected < 0 || dim_meet as isize != expected {
            // the spans meet although generic position forbids it, or they
            // meet in excess dimension
            let margin = lp_strict_max(dim_l, &eq_s, &lt_s, &[]);
            if margin.map_or(false, |m| !m.is_negative()) {
                return Err(Error::NonGenericSlice(format!(
                    "cell {:?}: span∩L has dimension {dim_meet}, expected {expected}",
                    c.nearest
                )));
            }
            return Ok(None);
        }
        // does the open cell meet L?
        let margin = lp_strict_max(dim_l, &eq_s, &lt_s, &[]);
        match margin {
            None => return Ok(None),
            Some(m) if m.is_zero() => {
                return Err(Error::NonGenericSlice(format!(
                    "L touches the boundary of cell {:?}",
                    c.nearest
                )))
            }
            Some(m) if m.is_negative() => return Ok(None),
            Some(_) => {}
        }
        if c.nearest.len() != c.codim + 1 {
            return Err(Error::NonGenericSlice(format!(
                "cell {:?} meeting L has {} nearest sites, codim {}",
                c.nearest,
                c.nearest.len(),
                c.codim
            )));
        }
        // joint LP over (s, λ, t): cell margin ≥ t, hull weights λ ≥ t
        let projections = self.projected_nearest(cell_index, base, dirs);
        let k = projections.len();
        let nv = dim_l + k + 1;
        use crate::geometry::simplex::{maximize, LpConstraint, LpOutcome};
        let zero = BigRational::zero;
        let one = || BigRational::from_integer(1.into());
        let mut cons = Vec::new();
        for (a, b) in &eq_s {
            let mut row = vec![zero(); nv];
            row[..dim_l].clone_from_slice(a);
            cons.push(LpConstraint::eq(row, b.clone()));
        }
        for (a, b) in &lt_s {
            let mut row = vec![zero(); nv];
            row[..dim_l].clone_from_slice(a);
            row[nv - 1] = one();
            cons.push(LpConstraint::le(row, b.clone()));
        }
        // s = Σ λ_m σ_m componentwise
        for d in 0..dim_l {
            let mut row = vec![zero(); nv];
            row[d] = one();
            for (m, sigma) in projections.iter().enumerate() {
                row[dim_l + m] = -sigma[d].clone();
            }
            cons.push(LpConstraint::eq(row, zero()));
        }
        let mut sum_row = vec![zero(); nv];
        for slot in sum_row.iter_mut().skip(dim_l).take(k) {
            *slot = one();
        }
        cons.push(LpConstraint::eq(sum_row, one()));
        for m in 0..k {
            let mut nonneg = vec![zero(); nv];
            nonneg[dim_l + m] = -one();
            cons.push(LpConstraint::le(nonneg, zero()));
            let mut margin_row = vec![zero(); nv];
            margin_row[dim_l + m] = -one();
            margin_row[nv - 1] = one();
            cons.push(LpConstraint::le(margin_row, zero()));
        }
        let mut cap = vec![zero(); nv];
        cap[nv - 1] = one();
        cons.push(LpConstraint::le(cap, one()));
        let mut obj = vec![zero(); nv];
        obj[nv - 1] = one();
        match maximize(&obj, &cons) {
            LpOutcome::Infeasible => Ok(Some(false)),
            LpOutcome::Unbounded => unreachable!("margin capped at 1"),
            LpOutcome::Optimal { value, .. } => {
                if value.is_positive() {
                    Ok(Some(true))
                } else if value.is_zero() {
                    Err(Error::NonGenericSlice(format!(
                        "cell {:?} meets conv(proj NS) only at its relative boundary",
                        c.nearest
                    )))
                } else {
                    Ok(Some(false))
                }
            }
        }
    }

    /// Census of effective cells: absolute mode counts positive-codimension
    /// cells by their dimension; relative mode counts cells meeting L
    /// (all codimensions) by dim(S ∩ L).
    pub fn effective_census(&self, subspace: Option<&AffineSubspace>) -> Result<EffectiveCensus> {
        match subspace {
            None => {
                self.require_generic()?;
                Ok(EffectiveCensus::from_dims(
                    self.cells
                        .iter()
                        .filter(|c| c.codim > 0 && c.effective)
                        .map(|c| c.dim),
                ))
            }
            Some(l) => {
                let (base, dirs) = Self::snap_subspace(l);
                let mut dims = Vec::new();
                for i in 0..self.cells.len() {
                    if let Some(true) = self.effective_wrt_inner(i, &base, &dirs)? {
                        let (_, _, dim_meet) = self
                            .slice_system(i, &base, &dirs)
                            .expect("effective cell meets L");
                        dims.push(dim_meet);
                    }
                }
                Ok(EffectiveCensus::from_dims(dims))
            }
        }
    }

    fn require_generic(&self) -> Result<()> {
        let (ok, violations) = self.is_generic();
        if ok {
            Ok(())
        } else {
            Err(Error::NonGenericDiagram(format!("{violations:?}")))
        }
    }

    /// One V_∞ critical point per effective positive-codim cell: the witness
    /// p(S), with index = dim S.
    pub fn v_infty_critical_points(&self) -> Result<Vec<(Point, usize)>> {
        self.require_generic()?;
        let mut out: Vec<(Point, usize)> = self
            .cells
            .iter()
            .filter(|c| c.codim > 0 && c.effective)
            .map(|c| (c.witness.clone().expect("effective cell has a witness"), c.dim))
            .collect();
        out.sort_by(|a, b| {
            a.0.coords
                .partial_cmp(&b.0.coords)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(out)
    }

    /// Witnesses of all positive-codim cells (solver seed points).
    pub fn witnesses(&self) -> Vec<Point> {
        self.cells
            .iter()
            .filter(|c| c.codim > 0)
            .filter_map(|c| c.witness.clone())
            .collect()
    }
}

/// Combinatorial Voronoi complexity bounds plus Maxwell's (l−1)².
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityBounds {
    pub l: u64,
    pub n: u64,
    /// planar bound 5l−11 on positive-codimension cells (l ≥ 3)
    pub planar_positive_codim: Option<u64>,
    /// R³ bounds: 0-, 1-, 2-dimensional cells
    pub r3_vertices: Option<u64>,
    pub r3_edges: Option<u64>,
    pub r3_faces: Option<u64>,
    pub maxwell: u64,
}

pub fn complexity_bounds(l: u64, n: u64) -> Result<ComplexityBounds> {
    let maxwell = (l - 1) * (l - 1);
    match n {
        2 => {
            if l < 3 {
                return Err(Error::InvalidConfig("planar bound needs l ≥ 3".into()));
            }
            Ok(ComplexityBounds {
                l,
                n,
                planar_positive_codim: Some(5 * l - 11),
                r3_vertices: None,
                r3_edges: None,
                r3_faces: None,
                maxwell,
            })
        }
        3 => Ok(ComplexityBounds {
            l,
            n,
            planar_positive_codim: None,
            r3_vertices: Some(l * (l - 3) / 2),
            r3_edges: Some(l * (l - 3)),
            r3_faces: Some(l * (l - 1) / 2),
            maxwell,
        }),
        other => Err(Error::UnsupportedDimension(other as usize)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec())
    }

    fn dims_count(d: &VoronoiDiagram, dim: usize) -> usize {
        d.cells.iter().filter(|c| c.dim == dim).count()
    }

    #[test]
    fn collinear_three_sites_on_a_line() {
        let d = build_diagram(&[pt(&[0.]), pt(&[1.]), pt(&[3.])]).unwrap();
        assert_eq!(d.cells.len(), 5);
        assert_eq!(dims_count(&d, 1), 3);
        assert_eq!(dims_count(&d, 0), 2);
        let bis: Vec<f64> = d
            .cells
            .iter()
            .filter(|c| c.dim == 0)
            .map(|c| c.witness.as_ref().unwrap().coords[0])
            .collect();
        assert!(bis.contains(&0.5) && bis.contains(&2.0));
    }

    #[test]
    fn triangle_has_seven_cells() {
        let d = build_diagram(&[pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])]).unwrap();
        assert_eq!(d.cells.len(), 7);
        assert_eq!(dims_count(&d, 2), 3);
        assert_eq!(dims_count(&d, 1), 3);
        assert_eq!(dims_count(&d, 0), 1);
    }

    #[test]
    fn tetrahedron_fifteen_cells_census_eleven() {
        let d = build_diagram(&[
            pt(&[1., 1., 1.]),
            pt(&[1., -1., -1.]),
            pt(&[-1., 1., -1.]),
            pt(&[-1., -1., 1.]),
        ])
        .unwrap();
        assert_eq!(d.cells.len(), 15);
        assert_eq!(dims_count(&d, 3), 4);
        assert_eq!(dims_count(&d, 2), 6);
        assert_eq!(dims_count(&d, 1), 4);
        assert_eq!(dims_count(&d, 0), 1);
        let census = d.effective_census(None).unwrap();
        assert_eq!(census.total, 11);
        assert_eq!(census.count(2), 6);
        assert_eq!(census.count(1), 4);
        assert_eq!(census.count(0), 1);
    }

    #[test]
    fn genericity_acute_right_square() {
        let acute = build_diagram(&[pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])]).unwrap();
        assert!(acute.is_generic().0);
        let right = build_diagram(&[pt(&[0., 0.]), pt(&[1., 0.]), pt(&[0., 1.])]).unwrap();
        let (ok, violations) = right.is_generic();
        assert!(!ok);
        assert!(violations
            .iter()
            .any(|v| matches!(v, GenericityViolation::BoundaryWitness { .. })));
        let square = build_diagram(&[pt(&[0., 0.]), pt(&[1., 0.]), pt(&[1., 1.]), pt(&[0., 1.])])
            .unwrap();
        let (ok, violations) = square.is_generic();
        assert!(!ok);
        assert!(violations.iter().any(|v| matches!(
            v,
            GenericityViolation::WrongNearestCount { nearest, codim: 2 } if nearest.len() == 4
        )));
    }

    #[test]
    fn effectiveness_acute_vs_obtuse() {
        let acute = build_diagram(&[pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])]).unwrap();
        let census = acute.effective_census(None).unwrap();
        assert_eq!(census.total, 4);
        assert_eq!((census.count(1), census.count(0)), (3, 1));
        for (i, c) in acute.cells.iter().enumerate() {
            if c.codim > 0 {
                assert!(acute.is_effective(i).unwrap());
            } else {
                assert!(matches!(acute.is_effective(i), Err(Error::NotPositiveCodim)));
            }
        }
        // obtuse apex at (1, 1/2): S_BC (the far pair) and S_ABC ineffective
        let obtuse = build_diagram(&[pt(&[0., 0.]), pt(&[2., 0.]), pt(&[1., 0.5])]).unwrap();
        let census = obtuse.effective_census(None).unwrap();
        assert_eq!(census.total, 2);
        assert_eq!(census.count(1), 2);
        let far_pair = obtuse.cell_by_nearest(&[0, 1]).unwrap();
        assert!(!far_pair.effective);
        let zero_cell = obtuse.cell_by_nearest(&[0, 1, 2]).unwrap();
        assert!(!zero_cell.effective);
        // two sites: the bisector hyperplane is effective
        let pair = build_diagram(&[pt(&[-1., 0.]), pt(&[1., 0.])]).unwrap();
        let bis = pair.cell_by_nearest(&[0, 1]).unwrap();
        assert!(bis.effective);
    }

    #[test]
    fn v_infty_critical_points_examples() {
        let pair = build_diagram(&[pt(&[-1.]), pt(&[1.])]).unwrap();
        let pts = pair.v_infty_critical_points().unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].1, 0);
        assert!(pts[0].0.coords[0].abs() < 1e-12);

        let acute = build_diagram(&[pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])]).unwrap();
        let pts = acute.v_infty_critical_points().unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts.iter().filter(|(_, i)| *i == 1).count(), 3);
        assert_eq!(pts.iter().filter(|(_, i)| *i == 0).count(), 1);

        let obtuse = build_diagram(&[pt(&[0., 0.]), pt(&[2., 0.]), pt(&[1., 0.5])]).unwrap();
        let pts = obtuse.v_infty_critical_points().unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|(_, i)| *i == 1));
    }

    #[test]
    fn relative_effectiveness_examples() {
        let x_axis = AffineSubspace::new(pt(&[0., 0.]), vec![vec![1., 0.]]);
        // sites (±1, 1): bisector {x=0} vs conv of projections [−1,1] → true
        let d = build_diagram(&[pt(&[-1., 1.]), pt(&[1., 1.])]).unwrap();
        let idx = d.ns_index[&vec![0, 1]];
        assert_eq!(d.is_effective_wrt(idx, &x_axis).unwrap(), true);
        // sites (1,1),(2,1): bisector {x=1.5} vs projections {1,2} → true
        let d = build_diagram(&[pt(&[1., 1.]), pt(&[2., 1.])]).unwrap();
        let idx = d.ns_index[&vec![0, 1]];
        assert_eq!(d.is_effective_wrt(idx, &x_axis).unwrap(), true);
        // stacked sites (0,1),(0,3): bisector {y=2} misses L → vacuously false
        let d = build_diagram(&[pt(&[0., 1.]), pt(&[0., 3.])]).unwrap();
        let idx = d.ns_index[&vec![0, 1]];
        assert_eq!(d.is_effective_wrt(idx, &x_axis).unwrap(), false);
    }

    #[test]
    fn locate_matches_brute_force() {
        let d = build_diagram(&[pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])]).unwrap();
        let c = d.locate(&pt(&[0.1, 0.1])).unwrap();
        assert_eq!(c.nearest, vec![0]);
        let c = d.locate(&pt(&[2.9, 0.05])).unwrap();
        assert_eq!(c.nearest, vec![1]);
    }

    #[test]
    fn limits_and_duplicates() {
        assert!(matches!(
            build_diagram(&[pt(&[0., 0.]), pt(&[0., 0.])]),
            Err(Error::DuplicateSites(0, 1))
        ));
        let many: Vec<Point> = (0..13).map(|i| pt(&[i as f64])).collect();
        assert!(matches!(build_diagram(&many), Err(Error::LimitsExceeded(_))));
    }

    #[test]
    fn complexity_bound_examples() {
        let b = complexity_bounds(5, 3).unwrap();
        assert_eq!(
            (b.r3_vertices, b.r3_edges, b.r3_faces),
            (Some(5), Some(10), Some(10))
        );
        let b = complexity_bounds(4, 2).unwrap();
        assert_eq!(b.planar_positive_codim, Some(9));
        assert_eq!(b.maxwell, 9);
        assert!(complexity_bounds(5, 4).is_err());
    }
}
