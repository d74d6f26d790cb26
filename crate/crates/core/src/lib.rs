//! Densest sub-hypergraph extraction under per-edge non-decreasing weight
//! functions.
//!
//! Given a hypergraph where each edge `e` carries a table
//! `f_e : {0..|e|} -> Q>=0` scoring partial containment, the goal is a
//! nonempty vertex set `S` maximizing
//! `F(S) / |S| = sum_e f_e(|e ∩ S|) / |S|`.
//!
//! The crate provides, all over exact rational arithmetic:
//!
//! - [`solver::solve_exact`]: flow-based exact solver for convex tables
//!   (binary search over a minimum-cut feasibility test);
//! - [`solver::solve_eps`]: `(1-eps)`-approximation via geometric search;
//! - [`peel::solve_greedy`]: `1/r` greedy peeling in `O(p r log n)`;
//! - [`peel::solve_para`]: batched peeling, `1/(r(1+eps))` in
//!   `O(log_{1+eps} n)` iterations;
//! - [`peel::solve_concave`]: closed form for all-concave tables;
//! - [`lp`]: separation oracle, feasibility checking, sweep rounding and
//!   LP export;
//! - [`oracle`]: brute-force ground truth and a seeded instance
//!   generator.

pub mod error;
pub mod flow;
pub mod instance;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod peel;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{
    Algorithm, Hypergraph, Shape, Solution, SubsetState, WeightFn, WeightSpec, WeightedHypergraph,
};
pub use rational::Rational;
