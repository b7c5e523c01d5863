//! Configuration ingestion, experiment orchestration, persistence of results
//! as JSON Lines, and CSV grid emission — everything behind the `equilibria`
//! binary.
//!
//! A run reads one JSON config, executes the requested mode, and writes one
//! self-describing record per unit of work. Records embed the fully resolved
//! inputs (defaults included) and a digest, so re-running a record's inputs
//! reproduces it byte-identically apart from the timestamp.

use crate::error::{Error, Result};
use crate::exec::Strategy;
use crate::geometry::{AffineSubspace, Point};
use crate::potential::{self, ChargeConfig, Exponent};
use crate::solver::{self, SolveOptions};
use crate::threecharge::{self, ThreeChargeParams};
use crate::{bounds, voronoi};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt;
use std::io::Write;
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const MAX_GRID_RESOLUTION: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Sweep,
    Voronoi,
    Bounds,
    Three,
    Grid,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Solve => "solve",
            Mode::Sweep => "sweep",
            Mode::Voronoi => "voronoi",
            Mode::Bounds => "bounds",
            Mode::Three => "three",
            Mode::Grid => "grid",
        };
        write!(f, "{s}")
    }
}

/// An exponent in configs: a plain number or an exact "p/q" string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Number(f64),
    Ratio(String),
}

impl AlphaSpec {
    pub fn to_exponent(&self) -> Result<Exponent> {
        match self {
            AlphaSpec::Number(x) => Exponent::new(*x),
            AlphaSpec::Ratio(s) => {
                let (p, q) = s
                    .split_once('/')
                    .ok_or_else(|| Error::InvalidConfig(format!("bad ratio {s:?}")))?;
                let p: i64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad ratio {s:?}")))?;
                let q: i64 = q
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad ratio {s:?}")))?;
                Exponent::from_ratio(p, q)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaList {
    Range { from: f64, to: f64, step: f64 },
    List(Vec<AlphaSpec>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceSpec {
    pub base: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LimitsSpec {
    pub seeds: Option<usize>,
    pub max_iters: Option<usize>,
    pub region_inflation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    /// [xmin, xmax, ymin, ymax]
    pub window: [f64; 4],
    /// [nx, ny], each ≤ 4096
    pub resolution: [u32; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    pub sites: Vec<Vec<f64>>,
    pub charges: Vec<f64>,
    #[serde(default)]
    pub alpha: Option<AlphaSpec>,
    #[serde(default)]
    pub alphas: Option<AlphaList>,
    #[serde(default)]
    pub subspace: Option<SubspaceSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub limits: Option<LimitsSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn charge_config(&self) -> Result<ChargeConfig> {
        let sites = self
            .sites
            .iter()
            .map(|c| {
                if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                    Err(Error::InvalidConfig("sites must be nonempty finite vectors".into()))
                } else {
                    Ok(Point::new(c.clone()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ChargeConfig::new(sites, self.charges.clone())
    }

    pub fn subspace(&self) -> Result<Option<AffineSubspace>> {
        let Some(spec) = &self.subspace else { return Ok(None) };
        let base = Point::new(spec.base.clone());
        let mut pts = vec![base.clone()];
        for d in &spec.directions {
            if d.len() != base.dim() {
                return Err(Error::DimensionMismatch { expected: base.dim(), got: d.len() });
            }
            pts.push(Point::new(
                base.coords.iter().zip(d).map(|(b, v)| b + v).collect(),
            ));
        }
        let span = crate::geometry::affine_span(&pts);
        if span.dim() != spec.directions.len() {
            return Err(Error::InvalidConfig("subspace directions are dependent".into()));
        }
        Ok(Some(span))
    }

    pub fn alphas(&self) -> Result<Vec<Exponent>> {
        match (&self.alpha, &self.alphas) {
            (Some(a), None) => Ok(vec![a.to_exponent()?]),
            (None, Some(AlphaList::List(list))) => {
                if list.is_empty() {
                    return Err(Error::InvalidConfig("alphas list is empty".into()));
                }
                list.iter().map(AlphaSpec::to_exponent).collect()
            }
            (None, Some(AlphaList::Range { from, to, step })) => {
                if *step <= 0.0 || to < from {
                    return Err(Error::InvalidConfig("bad alpha range".into()));
                }
                let mut out = Vec::new();
                let mut x = *from;
                while x <= to + 1e-12 * step {
                    out.push(Exponent::new(x)?);
                    x += step;
                }
                Ok(out)
            }
            (Some(_), Some(_)) => {
                Err(Error::InvalidConfig("give either alpha or alphas, not both".into()))
            }
            (None, None) => Err(Error::InvalidConfig("alpha (or alphas) is required".into())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunFlags {
    /// Worker pool size; 0 means machine parallelism, 1 forces sequential.
    pub jobs: usize,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Cross-check certified 1-D sweep counts against the exact Sturm route
    /// (integer α only) and flag disagreement.
    pub exact: bool,
}

impl Default for RunFlags {
    fn default() -> Self {
        RunFlags { jobs: 0, seed: None, exact: false }
    }
}

impl RunFlags {
    fn strategy(&self) -> Strategy {
        Strategy::from_jobs(self.jobs)
    }
}

/// One JSONL record; re-runnable from its echoed inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub run_id: String,
    pub timestamp: u64,
    pub mode: String,
    pub inputs_digest: String,
    pub inputs: Value,
    pub outputs: Value,
    pub status: String,
}

fn now_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Fully resolved inputs (defaults echoed) for the record and its digest.
fn resolved_inputs(mode: Mode, config: &RunConfig, flags: &RunFlags) -> Value {
    let l = config.charges.len();
    json!({
        "mode": mode.to_string(),
        "sites": config.sites,
        "charges": config.charges,
        "alpha": config.alpha,
        "alphas": config.alphas,
        "subspace": config.subspace,
        "seed": flags.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        "limits": {
            "seeds": config.limits.as_ref().and_then(|x| x.seeds).unwrap_or(64 * l.max(1)),
            "max_iters": config.limits.as_ref().and_then(|x| x.max_iters).unwrap_or(DEFAULT_MAX_ITERS),
            "region_inflation": config.limits.as_ref().and_then(|x| x.region_inflation),
        },
        "grid": config.grid,
        "exact": flags.exact,
    })
}

fn digest(v: &Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_string(v).expect("serializable").as_bytes());
    format!("{:x}", hasher.finalize())[..16].to_string()
}

fn solve_options(config: &RunConfig, flags: &RunFlags) -> SolveOptions {
    let limits = config.limits.clone().unwrap_or_default();
    SolveOptions {
        seeds: limits.seeds,
        rng_seed: flags.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        max_iters: limits.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
        region_inflation: limits.region_inflation,
        strategy: flags.strategy(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

/// Outputs of one mode execution: (outputs, numerical-failure flag) per unit.
type UnitRecords = Vec<(Value, bool)>;

fn solve_outputs(
    cfg: &ChargeConfig,
    a: &Exponent,
    opts: &SolveOptions,
    strategy: Strategy,
) -> Result<(Value, bool)> {
    let (normalized, span) = potential::normalize_dimension(cfg);
    let report = solver::find_critical_points(&normalized, a, opts)?;
    let identity = solver::census_identities(&report.census, &normalized, report.degenerate_count)
        .map(|r| to_value(&r))
        .unwrap_or(Value::Null);
    let maxwell = solver::maxwell_check_report(&normalized, a, &report, strategy)?;
    let effective = if normalized.all_positive() {
        voronoi::build_diagram_with(&normalized.sites, strategy)
            .ok()
            .and_then(|d| d.effective_census(None).ok())
            .map(|c| to_value(&c))
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    let failed = report.identity_ok == Some(false);
    let outputs = json!({
        "alpha": a.value(),
        "solve_dimension": normalized.dimension(),
        "span_dim": span.dim(),
        "points": to_value(&report.points),
        "census": to_value(&report.census),
        "total": report.census.total(),
        "seeds_used": report.seeds_used,
        "non_converged_seeds": report.non_converged,
        "degenerate_count": report.degenerate_count,
        "identity_ok": report.identity_ok,
        "identity": identity,
        "maxwell": to_value(&maxwell),
        "effective_census": effective,
    });
    Ok((outputs, failed))
}

fn execute_solve(config: &RunConfig, flags: &RunFlags) -> Result<UnitRecords> {
    let cfg = config.charge_config()?;
    let alphas = config.alphas()?;
    let opts = solve_options(config, flags);
    alphas
        .iter()
        .map(|a| solve_outputs(&cfg, a, &opts, flags.strategy()))
        .collect()
}

fn execute_sweep(config: &RunConfig, flags: &RunFlags) -> Result<UnitRecords> {
    let cfg = config.charge_config()?;
    let mut alphas = config.alphas()?;
    alphas.sort_by(|a, b| a.value().partial_cmp(&b.value()).unwrap());
    let opts = solve_options(config, flags);
    let line = config.subspace()?;
    let records = match &line {
        Some(l) if l.dim() == 1 => {
            let mut recs = solver::alpha_sweep_line(&cfg, l, &alphas, flags.strategy())?;
            if flags.exact {
                let rcfg = potential::restrict_to(&cfg, l)?;
                for (rec, a) in recs.iter_mut().zip(&alphas) {
                    if a.as_positive_integer().is_some() {
                        match solver::count_1d_exact(&rcfg, a) {
                            Ok(st) => {
                                if Some(st.count) != rec.total {
                                    rec.error = Some(format!(
                                        "exact count {} disagrees with certified {:?}",
                                        st.count, rec.total
                                    ));
                                }
                            }
                            Err(e) => rec.error = Some(e.to_string()),
                        }
                    }
                }
            }
            recs
        }
        Some(_) => {
            return Err(Error::InvalidConfig("sweep subspace must be one-dimensional".into()))
        }
        None => {
            let (normalized, _) = potential::normalize_dimension(&cfg);
            solver::alpha_sweep(&normalized, &alphas, &opts)
        }
    };
    Ok(records
        .into_iter()
        .map(|r| {
            let failed = r.error.is_some();
            (to_value(&r), failed)
        })
        .collect())
}

fn execute_voronoi(config: &RunConfig, flags: &RunFlags) -> Result<UnitRecords> {
    let cfg = config.charge_config()?;
    let diagram = voronoi::build_diagram_with(&cfg.sites, flags.strategy())?;
    let (generic, violations) = diagram.is_generic();
    let census = diagram
        .effective_census(None)
        .map(|c| to_value(&c))
        .unwrap_or(Value::Null);
    let relative = match config.subspace()? {
        Some(l) => diagram
            .effective_census(Some(&l))
            .map(|c| to_value(&c))
            .unwrap_or_else(|e| json!({ "error": e.to_string() })),
        None => Value::Null,
    };
    let v_infty = diagram
        .v_infty_critical_points()
        .map(|pts| {
            Value::Array(
                pts.into_iter()
                    .map(|(p, i)| json!({ "point": p.coords, "index": i }))
                    .collect(),
            )
        })
        .unwrap_or(Value::Null);
    let complexity = voronoi::complexity_bounds(cfg.len() as u64, diagram.ambient_dim() as u64)
        .map(|b| to_value(&b))
        .unwrap_or(Value::Null);
    let cells: Vec<Value> = diagram
        .cells
        .iter()
        .map(|c| {
            json!({
                "nearest": c.nearest,
                "dim": c.dim,
                "codim": c.codim,
                "witness": c.witness.as_ref().map(|w| w.coords.clone()),
                "effective": c.effective,
                "generic": c.generic,
            })
        })
        .collect();
    let outputs = json!({
        "config_hash": diagram.config_hash,
        "num_cells": diagram.cells.len(),
        "cells": cells,
        "generic": generic,
        "violations": to_value(&violations),
        "effective_census": census,
        "effective_census_wrt_subspace": relative,
        "v_infinity_critical_points": v_infty,
        "complexity_bounds": complexity,
    });
    Ok(vec![(outputs, false)])
}

fn execute_bounds(config: &RunConfig, flags: &RunFlags) -> Result<UnitRecords> {
    let l = config.charges.len() as u32;
    if l < 2 {
        return Err(Error::InvalidConfig("bounds need l ≥ 2 charges".into()));
    }
    let degrees = bounds::charge_system_degrees(l);
    let mut outputs = json!({
        "l": l,
        "charge_bound": bounds::biguint_string(&bounds::charge_bound(l)),
        "charge_bound_alt": bounds::biguint_string(&bounds::charge_bound_alt(l)),
        "khovanskii_system": to_value(&degrees),
        "khovanskii_bound": bounds::biguint_string(&bounds::khovanskii_bound(&degrees)),
    });
    let mut failed = false;
    if l == 3 {
        let cfg = config.charge_config()?;
        let alpha = match config.alphas() {
            Ok(list) => list.into_iter().next().expect("nonempty"),
            Err(_) => Exponent::from_ratio(1, 1)?,
        };
        match ThreeChargeParams::from_config(&cfg, alpha)
            .and_then(|(p, _)| threecharge::pipeline_count_with(&p, flags.strategy()))
        {
            Ok(rep) => {
                failed = !rep.certified;
                outputs["three_charge_bound"] = json!(rep.bound);
                outputs["three_charge_pipeline"] = to_value(&rep);
            }
            Err(e) => {
                outputs["three_charge_bound"] = Value::Null;
                outputs["three_charge_pipeline_error"] = json!(e.to_string());
            }
        }
    }
    Ok(vec![(outputs, failed)])
}

fn execute_three(config: &RunConfig, flags: &RunFlags) -> Result<UnitRecords> {
    let cfg = config.charge_config()?;
    let alphas = config.alphas()?;
    let mut out = Vec::new();
    for alpha in alphas {
        let (params, normalized) = ThreeChargeParams::from_config(&cfg, alpha.clone())?;
        let pipeline = threecharge::pipeline_count_with(&params, flags.strategy())?;
        let gamma = threecharge::gamma_intersections_with(&params, flags.strategy())?;
        let opts = solve_options(config, flags);
        let solve = solver::find_critical_points(&normalized, &alpha, &opts)?;
        let cross_check = gamma.len() == solve.census.total();
        let failed = !pipeline.certified || !cross_check;
        out.push((
            json!({
                "alpha": alpha.value(),
                "params": {
                    "zeta1": params.zeta1, "zeta2": params.zeta2,
                    "a": params.a, "b": params.b,
                },
                "pipeline": to_value(&pipeline),
                "gamma_intersections": to_value(&gamma),
                "solver_total": solve.census.total(),
                "gamma_matches_solver": cross_check,
            }),
            failed,
        ));
    }
    Ok(out)
}

/// CSV grid of V_α over a window: cell-centered samples, row-major (y rows,
/// x fastest), site cells masked as an empty value field.
pub fn emit_grid<W: Write>(
    cfg: &ChargeConfig,
    a: &Exponent,
    window: [f64; 4],
    resolution: [u32; 2],
    strategy: Strategy,
    out: &mut W,
) -> Result<()> {
    let (normalized, _) = potential::normalize_dimension(cfg);
    if normalized.dimension() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: normalized.dimension() });
    }
    let [xmin, xmax, ymin, ymax] = window;
    let [nx, ny] = resolution;
    if nx == 0 || ny == 0 || nx > MAX_GRID_RESOLUTION || ny > MAX_GRID_RESOLUTION {
        return Err(Error::InvalidConfig(format!(
            "resolution {nx}x{ny} outside 1..={MAX_GRID_RESOLUTION}"
        )));
    }
    if !(xmax > xmin && ymax > ymin) {
        return Err(Error::InvalidConfig("empty grid window".into()));
    }
    let dx = (xmax - xmin) / nx as f64;
    let dy = (ymax - ymin) / ny as f64;
    let rows = crate::exec::map_range(strategy, ny as usize, |iy| {
        let y = ymin + (iy as f64 + 0.5) * dy;
        let mut line = String::new();
        for ix in 0..nx {
            let x = xmin + (ix as f64 + 0.5) * dx;
            let p = Point::new(vec![x, y]);
            match potential::eval_potential(&normalized, a, &p) {
                Ok(v) => line.push_str(&format!("{x},{y},{v}\n")),
                Err(_) => line.push_str(&format!("{x},{y},\n")),
            }
        }
        line
    });
    out.write_all(b"x,y,v\n")
        .map_err(|e| Error::InvalidConfig(format!("write failed: {e}")))?;
    for row in rows {
        out.write_all(row.as_bytes())
            .map_err(|e| Error::InvalidConfig(format!("write failed: {e}")))?;
    }
    Ok(())
}

fn execute_grid(config: &RunConfig, flags: &RunFlags, out_path: &Path) -> Result<()> {
    let cfg = config.charge_config()?;
    let alpha = config
        .alphas()?
        .into_iter()
        .next()
        .expect("alphas() returns nonempty");
    let spec = config
        .grid
        .clone()
        .ok_or_else(|| Error::InvalidConfig("grid mode needs a grid section".into()))?;
    let mut file = std::fs::File::create(out_path)
        .map_err(|e| Error::InvalidConfig(format!("cannot create {}: {e}", out_path.display())))?;
    emit_grid(&cfg, &alpha, spec.window, spec.resolution, flags.strategy(), &mut file)
}

/// Execute a mode against a parsed config, producing the records to persist.
pub fn execute(mode: Mode, config: &RunConfig, flags: &RunFlags) -> Result<Vec<ResultRecord>> {
    if let Some(m) = config.mode {
        if m != mode {
            return Err(Error::InvalidConfig(format!(
                "config says mode {m}, command says {mode}"
            )));
        }
    }
    let inputs = resolved_inputs(mode, config, flags);
    let inputs_digest = digest(&inputs);
    let units = match mode {
        Mode::Solve => execute_solve(config, flags)?,
        Mode::Sweep => execute_sweep(config, flags)?,
        Mode::Voronoi => execute_voronoi(config, flags)?,
        Mode::Bounds => execute_bounds(config, flags)?,
        Mode::Three => execute_three(config, flags)?,
        Mode::Grid => unreachable!("grid handled by run()"),
    };
    let ts = now_seconds();
    Ok(units
        .into_iter()
        .enumerate()
        .map(|(i, (outputs, failed))| ResultRecord {
            run_id: format!("{inputs_digest}-{i:04}"),
            timestamp: ts,
            mode: mode.to_string(),
            inputs_digest: inputs_digest.clone(),
            inputs: inputs.clone(),
            outputs,
            status: if failed { "numerical_failure" } else { "ok" }.to_string(),
        })
        .collect())
}

/// Top-level entry: parse, execute, persist; errors map to exit codes.
pub fn run(mode: Mode, config_path: &Path, out_path: &Path, flags: &RunFlags) -> i32 {
    let config = match RunConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("equilibria: {e}");
            return EXIT_VALIDATION;
        }
    };
    if mode == Mode::Grid {
        return match execute_grid(&config, flags, out_path) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("equilibria: {e}");
                EXIT_VALIDATION
            }
        };
    }
    match execute(mode, &config, flags) {
        Ok(records) => {
            let mut text = String::new();
            for r in &records {
                text.push_str(&serde_json::to_string(r).expect("serializable record"));
                text.push('\n');
            }
            if let Err(e) = std::fs::write(out_path, text) {
                eprintln!("equilibria: cannot write {}: {e}", out_path.display());
                return EXIT_VALIDATION;
            }
            if records.iter().any(|r| r.status != "ok") {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            }
        }
        Err(e @ (Error::Unresolved { .. } | Error::NonRegularValue(_))) => {
            eprintln!("equilibria: {e}");
            EXIT_NUMERICAL
        }
        Err(e) => {
            eprintln!("equilibria: {e}");
            EXIT_VALIDATION
        }
    }
}

fn fmt_census(v: &Value) -> String {
    match v.get("counts") {
        Some(Value::Object(map)) => {
            let parts: Vec<String> = map.iter().map(|(k, c)| format!("a{k}={c}")).collect();
            parts.join(" ")
        }
        _ => "-".to_string(),
    }
}

/// Render a per-record summary table from a JSONL record file.
pub fn report(records_path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(records_path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", records_path.display())))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = serde_json::from_str(line).map_err(|e| {
            Error::InvalidConfig(format!("malformed record on line {}: {e}", lineno + 1))
        })?;
        records.push(rec);
    }
    let mut out = String::new();
    out.push_str(
        "mode     alpha      census             effective  maxwell            identity  status\n",
    );
    let mut sweep_counts: Vec<(f64, Option<u64>)> = Vec::new();
    for r in &records {
        let alpha = r
            .outputs
            .get("alpha")
            .and_then(Value::as_f64)
            .map(|a| format!("{a:<10.4}"))
            .unwrap_or_else(|| "-         ".into());
        let census = r
            .outputs
            .get("census")
            .map(fmt_census)
            .unwrap_or_else(|| "-".into());
        let eff = r
            .outputs
            .get("effective_census")
            .and_then(|v| v.get("total"))
            .and_then(Value::as_u64)
            .map(|t| t.to_string())
            .or_else(|| {
                r.outputs
                    .get("effective_total")
                    .and_then(Value::as_u64)
                    .map(|t| t.to_string())
            })
            .unwrap_or_else(|| "-".into());
        let maxwell = match r.outputs.get("maxwell") {
            Some(m) => {
                let total = m.get("total").and_then(Value::as_u64).unwrap_or(0);
                let bound = m.get("maxwell_bound").and_then(Value::as_u64).unwrap_or(0);
                let exceeded = m
                    .get("exceeds_maxwell")
                    .and_then(Value::as_bool)
                    .unwrap_or(false);
                format!("{total} vs {bound}{}", if exceeded { " EXCEEDED" } else { "" })
            }
            None => match (
                r.outputs.get("total").and_then(Value::as_u64),
                r.outputs.get("matches_effective").and_then(Value::as_bool),
            ) {
                (Some(t), Some(m)) => format!("{t} ({})", if m { "matches" } else { "differs" }),
                (Some(t), None) => t.to_string(),
                _ => "-".into(),
            },
        };
        let identity = r
            .outputs
            .get("identity_ok")
            .map(|v| match v {
                Value::Bool(true) => "ok",
                Value::Bool(false) => "VIOLATED",
                _ => "-",
            })
            .unwrap_or("-");
        out.push_str(&format!(
            "{:<8} {} {:<18} {:<10} {:<18} {:<9} {}\n",
            r.mode, alpha, census, eff, maxwell, identity, r.status
        ));
        if r.mode == "sweep" {
            sweep_counts.push((
                r.outputs.get("alpha").and_then(Value::as_f64).unwrap_or(0.0),
                r.outputs.get("total").and_then(Value::as_u64),
            ));
        }
    }
    if sweep_counts.len() >= 2 {
        sweep_counts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let counts: Vec<u64> = sweep_counts.iter().filter_map(|(_, c)| *c).collect();
        let monotone = counts.windows(2).all(|w| w[0] <= w[1]);
        out.push_str(&format!(
            "sweep: critical-point count is {} in alpha over {} samples\n",
            if monotone { "nondecreasing" } else { "NOT monotone" },
            counts.len()
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_specs_parse() {
        assert_eq!(AlphaSpec::Number(0.5).to_exponent().unwrap().value(), 0.5);
        let r = AlphaSpec::Ratio("7/3".into()).to_exponent().unwrap();
        assert!(r.rational_form().is_some());
        assert!(AlphaSpec::Ratio("x/y".into()).to_exponent().is_err());
    }

    #[test]
    fn config_validation() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"sites": [[0,0],[1,0]], "charges": [1, 1], "alpha": 1.0}"#)
                .unwrap();
        assert!(cfg.charge_config().is_ok());
        assert_eq!(cfg.alphas().unwrap().len(), 1);
        let cfg: RunConfig =
            serde_json::from_str(r#"{"sites": [[0,0],[0,0]], "charges": [1, 1], "alpha": 1.0}"#)
                .unwrap();
        assert!(matches!(cfg.charge_config(), Err(Error::DuplicateSites(0, 1))));
        let cfg: RunConfig =
            serde_json::from_str(r#"{"sites": [[0,0],[1,0]], "charges": [1, 0], "alpha": 1.0}"#)
                .unwrap();
        assert!(cfg.charge_config().is_err());
    }

    #[test]
    fn alpha_range_expansion() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"sites": [[0,0]], "charges": [1],
                "alphas": {"from": 0.5, "to": 2.0, "step": 0.5}}"#,
        )
        .unwrap();
        let alphas = cfg.alphas().unwrap();
        assert_eq!(alphas.len(), 4);
        assert_eq!(alphas[3].value(), 2.0);
    }

    #[test]
    fn grid_emission_shapes() {
        let cfg = ChargeConfig::new(
            vec![
                Point::new(vec![0.0, 0.0]),
                Point::new(vec![2.0, 0.0]),
                Point::new(vec![1.0, 0.5]),
            ],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        let a = Exponent::new(1.0).unwrap();
        // window excluding all sites → no masked cells; 2×2 → 4 data rows
        let mut buf = Vec::new();
        emit_grid(&cfg, &a, [2.0, 3.0, 2.0, 3.0], [2, 2], Strategy::Sequential, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5); // header + 4 rows
        assert!(lines.iter().skip(1).all(|l| !l.ends_with(',')));
        // a site exactly on a cell center is masked
        let mut buf = Vec::new();
        emit_grid(&cfg, &a, [-1.0, 1.0, -1.0, 1.0], [2, 2], Strategy::Sequential, &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.lines().any(|l| l.ends_with(',')));
        let mut buf = Vec::new();
        emit_grid(&cfg, &a, [-1.0, 3.0, -0.5, 0.5], [2, 1], Strategy::Sequential, &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().any(|l| l.ends_with(',')), "{text}");
    }
}
