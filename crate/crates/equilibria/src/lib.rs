//! Equilibrium points of generalized point-charge potentials.
//!
//! A configuration of point charges ζ_i at sites c_i defines the family of
//! potentials V_α(x) = Σ ζ_i ρ_i^{−α} with ρ_i the squared distance to the
//! i-th site. This crate finds and classifies the critical points of V_α,
//! relates them to the effective cells of the sites' Voronoi diagram, counts
//! 1-D critical points exactly (Sturm) or rigorously (interval isolation),
//! and evaluates the fewnomial and mixed-volume upper bounds on equilibrium
//! counts, including the full symbolic three-charge pipeline.
//!
//! Data-parallel inner loops (multistart solves, α-sweeps, diagram
//! enumeration, grid evaluation) run on rayon when the default `parallel`
//! feature is enabled and fall back to sequential iteration otherwise;
//! results are merged in deterministic order either way.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod poly;
pub mod potential;
pub mod rational;
pub mod solver;
pub mod threecharge;
pub mod voronoi;

pub use error::{Error, Result};
pub use geometry::{AffineSubspace, HullMembership, Point};
pub use potential::{ChargeConfig, Exponent, HessianReport, RestrictedConfig};
pub use solver::{CriticalPoint, MorseCensus, SolveOptions, SolveReport, SweepRecord};
pub use voronoi::{EffectiveCensus, VoronoiCell, VoronoiDiagram};
