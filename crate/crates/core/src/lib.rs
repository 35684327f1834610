//! Exact-arithmetic approximation algorithms for k-hypergraph b-matching and
//! demand matching.
//!
//! The central object is the α-convex combination: an LP-optimal fractional
//! b-matching `x*` written as `Σ λ_i x^i` with `Σ λ_i = ρ` over feasible
//! integral b-matchings `x^i`. Its best term is an LP-relative
//! ρ-approximation, with `ρ = k - 1 + 1/k` in general and `ρ = k - 1` for
//! bipartite hypergraphs. Demand matching is handled by a local-ratio
//! 2k-approximation that solves no LP.
//!
//! Everything is computed over arbitrary-precision rationals; nothing in the
//! library uses floating point.

pub mod error;
pub mod exec;
pub mod format;
pub mod hypergraph;
pub mod linalg;
pub mod local_ratio;
pub mod lp;
pub mod oracle;
pub mod packing;
pub mod rational;
pub mod reductions;
pub mod report;

pub use error::{Error, ErrorKind, Result};
pub use hypergraph::{
    check_bipartite_witness, min_nonzero_degree_vertex, mu, rho, BMatchInstance,
    BipartiteWitness, Capacity, DemandInstance, FractionalSolution, Hypergraph,
    IntegralSolution,
};
pub use packing::{decompose, hbm_core, AlphaConvexCombination, Decomposition, Term};
pub use rational::Rational;
