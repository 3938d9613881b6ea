//! Program-wide array layout selection.
//!
//! Layouts are hyperplane families ([`layout`]). Each loop nest, under each
//! choice of innermost loop, prefers one layout per array ([`network`]); those
//! preferences become a binary constraint network whose solutions give every
//! array a single layout ([`solver`]). [`heuristic`] is the greedy nest-by-nest
//! baseline, and [`locality`] scores any assignment analytically and with a
//! cache simulation ([`cache`]).

mod intmat;

pub mod cache;
pub mod heuristic;
pub mod layout;
pub mod locality;
pub mod network;
pub mod program;
pub mod solver;
pub mod synth;

pub use cache::{CacheConfig, CacheCounts};
pub use heuristic::{heuristic_solve, order_nests, HeuristicResult};
pub use layout::{canonicalize, complete_linearization, same_hyperplane, HyperplaneVector, LayoutMatrix, LinearizationMap};
pub use locality::{evaluate, locality_score, simulate_cache, LocalityReport};
pub use network::{build_network, derive_all, derive_for_nest, derive_layout, ConstraintNetwork, NestDerivation};
pub use program::{innermost_step_delta, parse_program, Program};
pub use solver::{
    brute_force, is_consistent, solve, Assignment, PartialInstantiation, SolveOutcome, SolverConfig, SolverStats,
    ValueOrder, VarOrder,
};
