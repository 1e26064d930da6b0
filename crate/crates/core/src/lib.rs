//! Design-space types, Pareto dominance machinery, an NSGA-II solver and
//! one-at-a-time sensitivity analysis.
//!
//! Everything in this crate works in the minimization convention. Objectives
//! that should be maximized are negated by the caller before they reach
//! [`ObjectiveVector`].
//!
//! Batch work (population evaluation, dominance counting on large sets,
//! sensitivity probes) goes through [`Executor`]. With the default `parallel`
//! feature it fans out over a rayon pool; without it every call runs on the
//! calling thread. Results never depend on the worker count.

mod error;
mod exec;
pub mod moo;
pub mod nsga2;
pub mod sensitivity;

pub use error::{Error, Result};
pub use exec::Executor;
pub use moo::{
    crowding_distance, dominates, hypervolume_2d, non_dominated_sort, pareto_front, DesignSpace, DesignVector,
    ObjectiveVector, Outcome, Param, ParetoFront, Trial,
};
pub use nsga2::{RankedIndividual, SolverConfig, Study};
pub use sensitivity::{oat_analysis, ParamSensitivity, SensitivityReport};
