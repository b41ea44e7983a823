//! Submodular function toolkit.
//!
//! The crate is organized around a single oracle type,
//! [`SetFunctionHandle`], shared by every algorithm:
//!
//! - [`ground`] / [`function`] / [`transform`]: ground sets, bit-vector
//!   subsets, the evaluation oracle, and submodularity-preserving
//!   transforms (conditioning, restriction, reflection, mixtures).
//! - [`zoo`]: constructors for concrete families — modular, feature-based,
//!   facility location, coverage, graph cuts, log-determinant, deep
//!   submodular functions, and ROUGE-N recall.
//! - [`maximize`]: greedy maximization under cardinality, knapsack, and
//!   partition-matroid constraints, submodular set cover, randomized
//!   bidirectional greedy, and welfare partitioning — each run carries an
//!   approximation certificate.
//! - [`minimize`]: Lovász extension, base-polytope vertices, the
//!   Fujishige–Wolfe minimum-norm point, Queyranne's symmetric minimizer,
//!   and difference-of-submodular descent.
//! - [`info`]: combinatorial conditional mutual information, its facility
//!   location closed form, Q-clustering, and label-set strength.
//! - [`analysis`]: submodularity/monotonicity checkers, curvatures,
//!   semigradient bounds, Shapley values, log-partition bounds, and the
//!   brute-force oracles the test suites lean on.
//! - [`norms`]: the structured norm `‖x‖_f = f̂(|x|)`.

// index loops over square matrices stay as loops
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod function;
pub mod ground;
pub mod info;
pub mod maximize;
pub mod minimize;
pub mod norms;
pub mod transform;
pub mod zoo;

pub use error::{Result, SubmodError};
pub use function::{Flags, ModularWeights, SetFunctionHandle};
pub use ground::{GroundSet, Subset};
pub use transform::{derive_transform, Transform};
