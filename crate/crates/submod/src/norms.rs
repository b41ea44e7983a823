//! Structured norms from submodular functions: `‖x‖_f = f̂(|x|)` with `f̂`
//! the Lovász extension. This is a norm exactly when `f` is a polymatroid
//! with strictly positive singleton values, so construction checks that
//! eagerly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{CheckReport, Violation};
use crate::error::{Result, SubmodError};
use crate::function::SetFunctionHandle;
use crate::ground::Subset;
use crate::minimize::lovasz_extension;

const TOLERANCE: f64 = 1e-9;

/// A polymatroid handle admitted as a norm generator.
#[derive(Clone)]
pub struct NormHandle {
    f: SetFunctionHandle,
}

impl NormHandle {
    /// Verifies normalization and strict positivity of every singleton
    /// value before accepting the handle.
    pub fn new(f: SetFunctionHandle) -> Result<Self> {
        let f_empty = f.value_empty();
        if f_empty.abs() > 1e-12 {
            return Err(SubmodError::InvalidSpec(format!(
                "norm generator must be normalized, f(empty) = {f_empty}"
            )));
        }
        for v in 0..f.size_n() {
            let singleton = f.eval_unchecked(&Subset::empty(f.ground()).with(v));
            if singleton <= TOLERANCE {
                return Err(SubmodError::InvalidSpec(format!(
                    "norm generator is trivial at element {v}: f({{{v}}}) = {singleton}"
                )));
            }
        }
        Ok(NormHandle { f })
    }

    pub fn function(&self) -> &SetFunctionHandle {
        &self.f
    }

    pub fn size_n(&self) -> usize {
        self.f.size_n()
    }
}

/// `‖x‖_f = f̂(|x|)`.
pub fn norm_eval(h: &NormHandle, x: &[f64]) -> Result<f64> {
    let magnitudes: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    Ok(lovasz_extension(&h.f, &magnitudes)?.value)
}

/// Seeded random trials of the triangle inequality and absolute
/// homogeneity, plus definiteness on every basis vector.
pub fn check_norm_axioms(h: &NormHandle, trials: u64, seed: u64) -> Result<CheckReport> {
    if trials < 1 {
        return Err(SubmodError::InvalidSpec("need at least one trial".into()));
    }
    let n = h.size_n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0u64;

    // definiteness on basis vectors, once
    for v in 0..n {
        let mut basis = vec![0.0; n];
        basis[v] = 1.0;
        let value = norm_eval(h, &basis)?;
        checked += 1;
        if value <= TOLERANCE {
            violations.push(Violation {
                description: format!("definiteness fails on basis vector {v}"),
                witness_sets: vec![vec![v]],
                witness_elements: vec![v],
                lhs: value,
                rhs: 0.0,
                deficit: -value + TOLERANCE,
            });
        }
    }
    // zero vector maps to zero
    if norm_eval(h, &vec![0.0; n])?.abs() > TOLERANCE {
        violations.push(Violation {
            description: "norm of the zero vector is nonzero".into(),
            witness_sets: vec![],
            witness_elements: vec![],
            lhs: norm_eval(h, &vec![0.0; n])?,
            rhs: 0.0,
            deficit: norm_eval(h, &vec![0.0; n])?.abs(),
        });
    }

    for trial in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: f64 = rng.gen_range(0.0..3.0);
        let norm_x = norm_eval(h, &x)?;
        let norm_y = norm_eval(h, &y)?;

        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let norm_sum = norm_eval(h, &sum)?;
        checked += 1;
        if norm_sum > norm_x + norm_y + TOLERANCE {
            violations.push(Violation {
                description: format!("triangle inequality fails on trial {trial}"),
                witness_sets: vec![],
                witness_elements: vec![],
                lhs: norm_sum,
                rhs: norm_x + norm_y,
                deficit: norm_sum - norm_x - norm_y,
            });
        }

        let scaled: Vec<f64> = x.iter().map(|a| c * a).collect();
        let norm_scaled = norm_eval(h, &scaled)?;
        checked += 1;
        let homogeneity_gap = (norm_scaled - c * norm_x).abs();
        if homogeneity_gap > TOLERANCE * (1.0 + c) {
            violations.push(Violation {
                description: format!("absolute homogeneity fails on trial {trial} (c = {c})"),
                witness_sets: vec![],
                witness_elements: vec![],
                lhs: norm_scaled,
                rhs: c * norm_x,
                deficit: homogeneity_gap,
            });
        }

        // |x| feeds the extension, so sign flips must not matter
        let flipped: Vec<f64> = x.iter().map(|a| -a).collect();
        checked += 1;
        let flip_gap = (norm_eval(h, &flipped)? - norm_x).abs();
        if flip_gap > TOLERANCE {
            violations.push(Violation {
                description: format!("sign invariance fails on trial {trial}"),
                witness_sets: vec![],
                witness_elements: vec![],
                lhs: norm_eval(h, &flipped)?,
                rhs: norm_x,
                deficit: flip_gap,
            });
        }
    }

    let verdict = violations.is_empty();
    Ok(CheckReport {
        verdict,
        violations,
        pairs_checked: checked,
    })
}
