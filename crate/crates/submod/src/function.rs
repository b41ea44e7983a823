//! The set-function oracle interface.
//!
//! A [`SetFunctionHandle`] wraps a deterministic evaluation oracle
//! `f : 2^V -> R` together with capability claims (monotone, normalized,
//! symmetric, non-negative) and an oracle-call counter. The claims are just
//! claims: they are verified only by the checkers in [`crate::analysis`].

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Result, SubmodError};
use crate::ground::{same_ground, GroundSet, Subset};

/// Capability claims attached to a handle at construction time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    /// f(A) <= f(B) whenever A is a subset of B.
    pub claims_monotone: bool,
    /// f(empty) = 0.
    pub claims_normalized: bool,
    /// f(A) = f(V \ A) for all A.
    pub claims_symmetric: bool,
    /// f(A) >= 0 for all A.
    pub claims_nonneg: bool,
}

impl Flags {
    /// All four polymatroid-style claims except symmetry.
    pub fn polymatroid() -> Self {
        Flags {
            claims_monotone: true,
            claims_normalized: true,
            claims_symmetric: false,
            claims_nonneg: true,
        }
    }
}

type Oracle = dyn Fn(&Subset) -> f64 + Send + Sync;

static NEXT_HANDLE_ID: AtomicU64 = AtomicU64::new(1);

/// An evaluation oracle over subsets of a fixed ground set.
///
/// Handles are cheap to clone (the oracle and counter are shared) and safe
/// to evaluate from several workers at once; the call counter is atomic, so
/// increments interleave but are never lost.
#[derive(Clone)]
pub struct SetFunctionHandle {
    ground: Arc<GroundSet>,
    oracle: Arc<Oracle>,
    flags: Flags,
    evals: Arc<AtomicU64>,
    id: u64,
}

impl SetFunctionHandle {
    pub fn new<F>(ground: Arc<GroundSet>, flags: Flags, oracle: F) -> Self
    where
        F: Fn(&Subset) -> f64 + Send + Sync + 'static,
    {
        SetFunctionHandle {
            ground,
            oracle: Arc::new(oracle),
            flags,
            evals: Arc::new(AtomicU64::new(0)),
            id: NEXT_HANDLE_ID.fetch_add(1, Ordering::Relaxed),
        }
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn size_n(&self) -> usize {
        self.ground.size()
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// Stable identity of this handle (distinct per constructed handle, so
    /// per-run caches are never shared across handles).
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Number of oracle calls made through this handle so far.
    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Evaluates `f(A)`, incrementing the call counter.
    pub fn evaluate(&self, a: &Subset) -> Result<f64> {
        same_ground(&self.ground, a.ground())?;
        self.evals.fetch_add(1, Ordering::Relaxed);
        Ok((self.oracle)(a))
    }

    /// Evaluation without the ground-set check, for hot inner loops where
    /// the subset provably lives on this handle's ground set.
    pub(crate) fn eval_unchecked(&self, a: &Subset) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        (self.oracle)(a)
    }

    /// Marginal gain `f(v | A) = f(A + v) - f(A)`.
    ///
    /// Returns 0 without touching the oracle when `v` is already in `A`.
    pub fn marginal_gain(&self, v: usize, a: &Subset) -> Result<f64> {
        same_ground(&self.ground, a.ground())?;
        if v >= self.ground.size() {
            return Err(SubmodError::IndexOutOfRange {
                index: v,
                size: self.ground.size(),
            });
        }
        if a.contains(v) {
            return Ok(0.0);
        }
        Ok(self.eval_unchecked(&a.with(v)) - self.eval_unchecked(a))
    }

    /// Gain relative to a known `f(A)` value, saving one oracle call.
    pub(crate) fn gain_given_base(&self, v: usize, a: &Subset, f_a: f64) -> f64 {
        if a.contains(v) {
            return 0.0;
        }
        self.eval_unchecked(&a.with(v)) - f_a
    }

    /// `f(empty)`.
    pub fn value_empty(&self) -> f64 {
        self.eval_unchecked(&Subset::empty(&self.ground))
    }

    /// `f(V)`.
    pub fn value_full(&self) -> f64 {
        self.eval_unchecked(&Subset::full(&self.ground))
    }
}

impl std::fmt::Debug for SetFunctionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetFunctionHandle")
            .field("n", &self.ground.size())
            .field("flags", &self.flags)
            .field("evals", &self.eval_count())
            .finish()
    }
}

/// A modular function as a vector-scalar pair: `m(A) = c + sum_{v in A} m_v`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModularWeights {
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl ModularWeights {
    pub fn new(weights: Vec<f64>, constant: f64) -> Self {
        ModularWeights { weights, constant }
    }

    pub fn zeros(n: usize) -> Self {
        ModularWeights {
            weights: vec![0.0; n],
            constant: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn value(&self, a: &Subset) -> f64 {
        self.constant + a.iter().map(|v| self.weights[v]).sum::<f64>()
    }
}

/// Full evaluation table of `f` over all `2^n` subsets, indexed by bit mask.
///
/// The backbone of every exhaustive sweep; only valid for small ground sets.
pub fn full_table(f: &SetFunctionHandle, limit_n: usize) -> Result<Vec<f64>> {
    let n = f.size_n();
    if n > limit_n || n > 25 {
        return Err(SubmodError::InvalidSpec(format!(
            "full table requested for n={n}, limit {limit_n}"
        )));
    }
    let ground = f.ground();
    Ok((0u64..1 << n)
        .map(|mask| f.eval_unchecked(&Subset::from_mask(ground, mask)))
        .collect())
}
