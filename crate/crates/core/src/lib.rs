//! Decomposition solver for the sparse generalized eigenvalue problem
//!
//! ```text
//! minimize  xᵀAx / xᵀCx   subject to  ‖x‖₀ ≤ s
//! ```
//!
//! with `A` symmetric and `C` symmetric positive definite.
//!
//! Each iteration picks a working set of `k` coordinates (random, swapping, or
//! a mix of both) and solves the block subproblem globally: every admissible
//! support is enumerated and the restricted quadratic fractional program is
//! solved either by a bisection on its parametric function or by exact
//! coordinate descent. A proximal term on the numerator guarantees sufficient
//! decrease between iterates.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command-line
//! harness and wall-clock timing live in the `sgevp` companion crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod baselines;
pub mod decomposition;
mod error;
pub mod frac1d;
pub mod linalg;
pub mod problems;
pub mod qfp;
pub mod subproblem;
pub mod trace;
pub mod working_set;

pub use error::{Error, Result};

pub use baselines::{hard_threshold, truncated_power_method, truncated_rayleigh_flow, BaselineConfig};
pub use decomposition::{
    block_k_measure, certify_block2_stationary, initial_point, objective, solve, solve_with_clock,
    DecompositionConfig, InitRule, ProblemInstance, SubSolver,
};
pub use frac1d::{psi_value, solve_1d, OneDimCoefficients, OneDimSolution};
pub use linalg::{EigDecomposition, SymMatrix};
pub use problems::{build_cca, build_fda, build_pca, gen_randn, Dataset, Pencil};
pub use qfp::{QfpSolution, QfpSubproblem};
pub use trace::{Clock, IterationRecord, NoClock, SolveTrace, Termination};
pub use working_set::{SwapRule, WorkingSetSelection};

/// Seeded generator used everywhere a random choice is made.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
