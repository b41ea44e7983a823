//! Verification and characterization utilities.
//!
//! The checkers treat capability flags as claims to verify: the four-points
//! sweep is the submodularity primitive, monotonicity reduces to single
//! element gains, and every reported violation carries enough witness data
//! to replay the deficit. The module also hosts curvatures, the
//! submodularity ratio, semigradient (modular) bounds, Shapley values,
//! log-partition bounds, and the brute-force oracles the test suites use.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SubmodError};
use crate::function::{full_table, ModularWeights, SetFunctionHandle};
use crate::ground::Subset;
use crate::maximize::{KnapsackConstraint, Matroid, PartitionMatroidSpec};

const TOLERANCE: f64 = 1e-9;
const MAX_RECORDED_VIOLATIONS: usize = 64;

// ─── Check reports ───────────────────────────────────────────────────────

/// One replayable counterexample: re-evaluating the witness sets and
/// elements reproduces `lhs`, `rhs`, and the deficit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub description: String,
    pub witness_sets: Vec<Vec<usize>>,
    pub witness_elements: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: bool,
    pub violations: Vec<Violation>,
    pub pairs_checked: u64,
}

impl CheckReport {
    fn from_violations(mut violations: Vec<Violation>, pairs_checked: u64) -> Self {
        violations.sort_by(|a, b| {
            b.deficit
                .partial_cmp(&a.deficit)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let verdict = violations.is_empty();
        violations.truncate(MAX_RECORDED_VIOLATIONS);
        CheckReport {
            verdict,
            violations,
            pairs_checked,
        }
    }

    /// Worst recorded deficit, 0 when the check passed.
    pub fn worst_deficit(&self) -> f64 {
        self.violations.first().map(|v| v.deficit).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CheckMode {
    /// Enumerates every witness; requires `n <= 14`.
    Exhaustive,
    /// Draws this many seeded witness triples.
    Sampled { samples: u64, seed: u64 },
}

impl CheckMode {
    pub fn sampled(seed: u64) -> Self {
        CheckMode::Sampled {
            samples: 10_000,
            seed,
        }
    }
}

// ─── Submodularity checker (four points) ─────────────────────────────────

/// Checks `f(x | S) >= f(x | S + w)` over (S, x, w) witnesses.
pub fn check_submodular(f: &SetFunctionHandle, mode: CheckMode) -> Result<CheckReport> {
    match mode {
        CheckMode::Exhaustive => check_submodular_exhaustive(f),
        CheckMode::Sampled { samples, seed } => check_submodular_sampled(f, samples, seed),
    }
}

fn four_points_violation(
    table: &[f64],
    s: u64,
    x: usize,
    w: usize,
) -> Option<(f64, f64)> {
    let with_w = s | 1 << w;
    let lhs = table[(s | 1 << x) as usize] - table[s as usize];
    let rhs = table[(with_w | 1 << x) as usize] - table[with_w as usize];
    (rhs - lhs > TOLERANCE).then_some((lhs, rhs))
}

fn describe_four_points(s: &[usize], x: usize, w: usize) -> String {
    format!("gain of {x} given S={s:?} is below its gain given S+{w}")
}

fn check_submodular_exhaustive(f: &SetFunctionHandle) -> Result<CheckReport> {
    let n = f.size_n();
    if n > 14 {
        return Err(SubmodError::InvalidSpec(format!(
            "exhaustive four-points check capped at n=14, got {n}"
        )));
    }
    let table = full_table(f, 14)?;
    let results: Vec<(Vec<Violation>, u64)> = (0u64..1 << n)
        .into_par_iter()
        .map(|s| {
            let mut violations = Vec::new();
            let mut checked = 0u64;
            let outside: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 0).collect();
            for &x in &outside {
                for &w in &outside {
                    if x == w {
                        continue;
                    }
                    checked += 1;
                    if let Some((lhs, rhs)) = four_points_violation(&table, s, x, w) {
                        let s_ids: Vec<usize> =
                            (0..n).filter(|&v| s >> v & 1 == 1).collect();
                        violations.push(Violation {
                            description: describe_four_points(&s_ids, x, w),
                            witness_sets: vec![s_ids],
                            witness_elements: vec![x, w],
                            lhs,
                            rhs,
                            deficit: rhs - lhs,
                        });
                    }
                }
            }
            (violations, checked)
        })
        .collect();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for (vs, c) in results {
        violations.extend(vs);
        pairs_checked += c;
    }
    Ok(CheckReport::from_violations(violations, pairs_checked))
}

fn check_submodular_sampled(
    f: &SetFunctionHandle,
    samples: u64,
    seed: u64,
) -> Result<CheckReport> {
    let n = f.size_n();
    if n < 2 {
        return Ok(CheckReport::from_violations(Vec::new(), 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checked = 0u64;
    while checked < samples {
        let mut s = Subset::empty(f.ground());
        for v in 0..n {
            if rng.gen_bool(0.5) {
                s.insert(v)?;
            }
        }
        let outside: Vec<usize> = (0..n).filter(|&v| !s.contains(v)).collect();
        if outside.len() < 2 {
            continue;
        }
        let x = outside[rng.gen_range(0..outside.len())];
        let w = loop {
            let w = outside[rng.gen_range(0..outside.len())];
            if w != x {
                break w;
            }
        };
        checked += 1;
        let lhs = f.marginal_gain(x, &s)?;
        let rhs = f.marginal_gain(x, &s.with(w))?;
        if rhs - lhs > TOLERANCE {
            violations.push(Violation {
                description: describe_four_points(&s.indices(), x, w),
                witness_sets: vec![s.indices()],
                witness_elements: vec![x, w],
                lhs,
                rhs,
                deficit: rhs - lhs,
            });
        }
    }
    Ok(CheckReport::from_violations(violations, checked))
}

// ─── Monotonicity checker ────────────────────────────────────────────────

/// Checks `f(v | S) >= -tol` for single-element gains.
pub fn check_monotone(f: &SetFunctionHandle, mode: CheckMode) -> Result<CheckReport> {
    match mode {
        CheckMode::Exhaustive => {
            let n = f.size_n();
            if n > 14 {
                return Err(SubmodError::InvalidSpec(format!(
                    "exhaustive monotonicity check capped at n=14, got {n}"
                )));
            }
            let table = full_table(f, 14)?;
            let mut violations = Vec::new();
            let mut checked = 0u64;
            for s in 0u64..1 << n {
                for v in 0..n {
                    if s >> v & 1 == 1 {
                        continue;
                    }
                    checked += 1;
                    let gain = table[(s | 1 << v) as usize] - table[s as usize];
                    if gain < -TOLERANCE {
                        let s_ids: Vec<usize> = (0..n).filter(|&u| s >> u & 1 == 1).collect();
                        violations.push(Violation {
                            description: format!("adding {v} to S={s_ids:?} decreases f"),
                            witness_sets: vec![s_ids],
                            witness_elements: vec![v],
                            lhs: gain,
                            rhs: 0.0,
                            deficit: -gain,
                        });
                    }
                }
            }
            Ok(CheckReport::from_violations(violations, checked))
        }
        CheckMode::Sampled { samples, seed } => {
            let n = f.size_n();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut violations = Vec::new();
            let mut checked = 0u64;
            while checked < samples {
                let mut s = Subset::empty(f.ground());
                for v in 0..n {
                    if rng.gen_bool(0.5) {
                        s.insert(v)?;
                    }
                }
                let outside: Vec<usize> = (0..n).filter(|&v| !s.contains(v)).collect();
                if outside.is_empty() {
                    continue;
                }
                let v = outside[rng.gen_range(0..outside.len())];
                checked += 1;
                let gain = f.marginal_gain(v, &s)?;
                if gain < -TOLERANCE {
                    violations.push(Violation {
                        description: format!("adding {v} to S={:?} decreases f", s.indices()),
                        witness_sets: vec![s.indices()],
                        witness_elements: vec![v],
                        lhs: gain,
                        rhs: 0.0,
                        deficit: -gain,
                    });
                }
            }
            Ok(CheckReport::from_violations(violations, checked))
        }
    }
}

// ─── Curvature ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// Total curvature in `[0, 1]` (or the supermodular analogue).
    pub kappa: f64,
    /// Element attaining the extremal ratio.
    pub argmin_element: usize,
    /// Greedy guarantee implied by the curvature.
    pub greedy_bound: f64,
    /// Elements pruned for having zero singleton value (they can never
    /// improve a polymatroid valuation).
    pub pruned: Vec<usize>,
}

/// `(1/κ)(1 - e^{-κ})`, with the `κ -> 0` limit 1.
pub fn curvature_guarantee(kappa: f64) -> f64 {
    if kappa < 1e-12 {
        1.0
    } else {
        -(-kappa).exp_m1() / kappa
    }
}

/// `(1/κ)(1 - e^{-κ(1-κ^g)})` for a monotone submodular + supermodular
/// objective; reduces to the classic bound at `κ = 1, κ^g = 0`.
pub fn bp_guarantee(kappa: f64, kappa_g: f64) -> f64 {
    if kappa < 1e-12 {
        1.0 - kappa_g
    } else {
        -(-kappa * (1.0 - kappa_g)).exp_m1() / kappa
    }
}

/// Total curvature `κ = 1 - min_v f(v | V - v) / f(v)` of a polymatroid
/// handle, pruning elements with `f(v) = 0`.
pub fn total_curvature(f: &SetFunctionHandle) -> Result<CurvatureReport> {
    let n = f.size_n();
    let f_empty = f.value_empty();
    let full = Subset::full(f.ground());
    let f_full = f.eval_unchecked(&full);
    let mut pruned = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for v in 0..n {
        let singleton = f.eval_unchecked(&Subset::empty(f.ground()).with(v)) - f_empty;
        if singleton <= TOLERANCE {
            pruned.push(v);
            continue;
        }
        let top_gain = f_full - f.eval_unchecked(&full.without(v));
        let ratio = top_gain / singleton;
        if best.is_none_or(|(r, _)| ratio < r) {
            best = Some((ratio, v));
        }
    }
    let (ratio, argmin_element) = best.ok_or_else(|| {
        SubmodError::InvalidSpec("all elements pruned: every singleton has zero value".into())
    })?;
    let kappa = (1.0 - ratio).clamp(0.0, 1.0);
    Ok(CurvatureReport {
        kappa,
        argmin_element,
        greedy_bound: curvature_guarantee(kappa),
        pruned,
    })
}

/// Supermodular curvature `κ^g = 1 - min_v g(v) / g(v | V - v)` of a
/// monotone supermodular handle. The report's bound is the worst-case
/// combined BP guarantee `bp_guarantee(1, κ^g)`.
pub fn supermodular_curvature(g: &SetFunctionHandle) -> Result<CurvatureReport> {
    let n = g.size_n();
    let g_empty = g.value_empty();
    let full = Subset::full(g.ground());
    let g_full = g.eval_unchecked(&full);
    let mut pruned = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for v in 0..n {
        let top_gain = g_full - g.eval_unchecked(&full.without(v));
        if top_gain <= TOLERANCE {
            pruned.push(v);
            continue;
        }
        let singleton = g.eval_unchecked(&Subset::empty(g.ground()).with(v)) - g_empty;
        let ratio = singleton / top_gain;
        if best.is_none_or(|(r, _)| ratio < r) {
            best = Some((ratio, v));
        }
    }
    let (ratio, argmin_element) = best.ok_or_else(|| {
        SubmodError::InvalidSpec("degenerate supermodular handle: g(v | V - v) = 0 for all v".into())
    })?;
    let kappa = (1.0 - ratio).clamp(0.0, 1.0);
    Ok(CurvatureReport {
        kappa,
        argmin_element,
        greedy_bound: bp_guarantee(1.0, kappa),
        pruned,
    })
}

// ─── Submodularity ratio ─────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmodularityRatio {
    /// `min(1, min Σ_{v in Y} h(v|X) / h(Y|X))` over disjoint X, Y.
    pub gamma: f64,
    pub witness_x: Vec<usize>,
    pub witness_y: Vec<usize>,
}

/// Exhaustive submodularity ratio of a non-negative handle, `n <= 10`.
/// Pairs with a non-positive denominator impose no constraint and are
/// skipped; the result is capped at 1.
pub fn submodularity_ratio(h: &SetFunctionHandle) -> Result<SubmodularityRatio> {
    let n = h.size_n();
    if n > 10 {
        return Err(SubmodError::InvalidSpec(format!(
            "submodularity ratio is exhaustive over disjoint pairs; capped at n=10, got {n}"
        )));
    }
    let table = full_table(h, 10)?;
    let mut gamma = f64::INFINITY;
    let mut witness = (0u64, 0u64);
    for x in 0u64..1 << n {
        let free: Vec<usize> = (0..n).filter(|&v| x >> v & 1 == 0).collect();
        let free_count = free.len();
        for y_bits in 1u64..1 << free_count {
            let mut y = 0u64;
            let mut numerator = 0.0;
            for (i, &v) in free.iter().enumerate() {
                if y_bits >> i & 1 == 1 {
                    y |= 1 << v;
                    numerator += table[(x | 1 << v) as usize] - table[x as usize];
                }
            }
            let denominator = table[(x | y) as usize] - table[x as usize];
            if denominator <= TOLERANCE {
                continue;
            }
            let ratio = numerator / denominator;
            if ratio < gamma {
                gamma = ratio;
                witness = (x, y);
            }
        }
    }
    if !gamma.is_finite() {
        // every denominator vanished; no constraint observed
        gamma = 1.0;
    }
    Ok(SubmodularityRatio {
        gamma: gamma.min(1.0),
        witness_x: (0..n).filter(|&v| witness.0 >> v & 1 == 1).collect(),
        witness_y: (0..n).filter(|&v| witness.1 >> v & 1 == 1).collect(),
    })
}

// ─── Semigradients ───────────────────────────────────────────────────────

/// Modular bounds sandwiching a submodular `f`, all tight at the anchor:
/// `lower(X) <= f(X) <= min(upper_union(X), upper_intersection(X))`.
#[derive(Debug, Clone)]
pub struct SemigradientPair {
    pub anchor: Subset,
    /// Additions priced at `f(v | A)`, removals at `f(v | V - v)`.
    pub upper_union: ModularWeights,
    /// Additions priced at `f(v | ∅)`, removals at `f(v | A - v)`.
    pub upper_intersection: ModularWeights,
    /// Base-vertex lower bound from a seeded random chain through the anchor.
    pub lower: ModularWeights,
}

/// Builds the two modular upper bounds and a chain lower bound at `a`.
pub fn semigradient_bounds(
    f: &SetFunctionHandle,
    a: &Subset,
    seed: u64,
) -> Result<SemigradientPair> {
    let n = f.size_n();
    let f_empty = f.value_empty();
    let f_a = f.evaluate(a)?;
    let full = Subset::full(f.ground());
    let f_full = f.eval_unchecked(&full);

    let mut union_w = vec![0.0; n];
    let mut union_c = f_a;
    let mut inter_w = vec![0.0; n];
    let mut inter_c = f_a;
    for v in 0..n {
        if a.contains(v) {
            let top_gain = f_full - f.eval_unchecked(&full.without(v));
            union_w[v] = top_gain;
            union_c -= top_gain;
            let anchor_gain = f_a - f.eval_unchecked(&a.without(v));
            inter_w[v] = anchor_gain;
            inter_c -= anchor_gain;
        } else {
            union_w[v] = f.eval_unchecked(&a.with(v)) - f_a;
            inter_w[v] = f.eval_unchecked(&Subset::empty(f.ground()).with(v)) - f_empty;
        }
    }

    let lower = modular_lower_bound(f, a, &mut ChaCha8Rng::seed_from_u64(seed));

    Ok(SemigradientPair {
        anchor: a.clone(),
        upper_union: ModularWeights::new(union_w, union_c),
        upper_intersection: ModularWeights::new(inter_w, inter_c),
        lower,
    })
}

/// Modular lower bound of `f` tight at `a`: the base-polytope vertex from a
/// random chain whose prefix of length `|a|` is exactly `a`.
pub fn modular_lower_bound(
    f: &SetFunctionHandle,
    a: &Subset,
    rng: &mut ChaCha8Rng,
) -> ModularWeights {
    let n = f.size_n();
    let mut inside: Vec<usize> = a.indices();
    let mut outside: Vec<usize> = (0..n).filter(|&v| !a.contains(v)).collect();
    shuffle(&mut inside, rng);
    shuffle(&mut outside, rng);
    let f_empty = f.value_empty();
    let mut weights = vec![0.0; n];
    let mut prefix = Subset::empty(f.ground());
    let mut prev = f_empty;
    for &v in inside.iter().chain(&outside) {
        prefix = prefix.with(v);
        let cur = f.eval_unchecked(&prefix);
        weights[v] = cur - prev;
        prev = cur;
    }
    ModularWeights::new(weights, f_empty)
}

fn shuffle(items: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

// ─── Shapley values ──────────────────────────────────────────────────────

/// Exact Shapley values by the subset-weighted formula, `n <= 10`.
/// Efficiency holds: `Σ_v φ_v = f(V) - f(∅)`.
pub fn shapley_exact(f: &SetFunctionHandle) -> Result<Vec<f64>> {
    let n = f.size_n();
    if n > 10 {
        return Err(SubmodError::InvalidSpec(format!(
            "exact Shapley values capped at n=10, got {n}"
        )));
    }
    let table = full_table(f, 10)?;
    let mut factorial = vec![1.0f64; n + 1];
    for i in 1..=n {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    let mut phi = vec![0.0; n];
    for (v, phi_v) in phi.iter_mut().enumerate() {
        for s in 0u64..1 << n {
            if s >> v & 1 == 1 {
                continue;
            }
            let size = s.count_ones() as usize;
            let weight = factorial[size] * factorial[n - size - 1] / factorial[n];
            *phi_v += weight * (table[(s | 1 << v) as usize] - table[s as usize]);
        }
    }
    Ok(phi)
}

/// Monte Carlo Shapley estimate with per-element standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapleySample {
    pub values: Vec<f64>,
    pub std_err: Vec<f64>,
    pub samples: u64,
}

/// Averages per-element gains over seeded random permutations.
pub fn shapley_sampled(f: &SetFunctionHandle, samples: u64, seed: u64) -> Result<ShapleySample> {
    if samples == 0 {
        return Err(SubmodError::InvalidSpec("need at least one sample".into()));
    }
    let n = f.size_n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..samples {
        shuffle(&mut perm, &mut rng);
        let mut prefix = Subset::empty(f.ground());
        let mut prev = f.value_empty();
        for &v in &perm {
            prefix = prefix.with(v);
            let cur = f.eval_unchecked(&prefix);
            let gain = cur - prev;
            sum[v] += gain;
            sum_sq[v] += gain * gain;
            prev = cur;
        }
    }
    let m = samples as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_err = sum_sq
        .iter()
        .zip(&values)
        .map(|(sq, mean)| {
            let variance = (sq / m - mean * mean).max(0.0);
            (variance / m).sqrt()
        })
        .collect();
    Ok(ShapleySample {
        values,
        std_err,
        samples,
    })
}

// ─── Log-partition bounds ────────────────────────────────────────────────

/// Bounds on `log Z = log Σ_X exp(f(X))` from modular semigradients at an
/// anchor, with the exact value by enumeration when `n <= 15`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionBounds {
    pub log_lower: f64,
    pub log_upper: f64,
    pub exact: Option<f64>,
}

/// For a modular `m(X) = c + Σ_{v in X} m_v` the partition sum factorizes:
/// `log Σ_X exp(m(X)) = c + Σ_v log(1 + e^{m_v})`.
pub fn modular_log_partition(m: &ModularWeights) -> f64 {
    m.constant + m.weights.iter().map(|&w| softplus(w)).sum::<f64>()
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn log_partition_bounds(f: &SetFunctionHandle, anchor: &Subset) -> Result<PartitionBounds> {
    let pair = semigradient_bounds(f, anchor, 0)?;
    let log_lower = modular_log_partition(&pair.lower);
    let log_upper = modular_log_partition(&pair.upper_union)
        .min(modular_log_partition(&pair.upper_intersection));
    let exact = if f.size_n() <= 15 {
        let table = full_table(f, 15)?;
        Some(log_sum_exp(&table))
    } else {
        None
    };
    Ok(PartitionBounds {
        log_lower,
        log_upper,
        exact,
    })
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

// ─── Brute-force oracles ─────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub enum BruteConstraint {
    Unconstrained,
    /// `|X| <= k`.
    CardinalityAtMost(usize),
    /// `|X| = k`.
    CardinalityExact(usize),
    Knapsack(KnapsackConstraint),
    Partition(PartitionMatroidSpec),
    /// Proper nonempty subsets only.
    ProperNonempty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// Exact optimum by enumeration; ties break to the lexicographically
/// smallest index sequence. Caps: `n <= 15` for full sweeps, `n <= 20`
/// when a cardinality bound `k <= 4` keeps the count polynomial.
pub fn brute_force_opt(
    f: &SetFunctionHandle,
    constraint: &BruteConstraint,
    sense: Sense,
) -> Result<(Subset, f64)> {
    let n = f.size_n();
    let small_k = match constraint {
        BruteConstraint::CardinalityAtMost(k) | BruteConstraint::CardinalityExact(k) => {
            *k <= 4
        }
        _ => false,
    };
    if n > 15 && !(small_k && n <= 20) {
        return Err(SubmodError::InvalidSpec(format!(
            "brute force capped at n=15 (n=20 for cardinality k<=4), got n={n}"
        )));
    }

    let mut best: Option<(f64, Subset)> = None;
    let consider = |s: Subset, value: f64, best: &mut Option<(f64, Subset)>| {
        let better = match best {
            None => true,
            Some((bv, bs)) => {
                let improves = match sense {
                    Sense::Max => value > *bv,
                    Sense::Min => value < *bv,
                };
                improves || (value == *bv && lex_smaller(&s, bs))
            }
        };
        if better {
            *best = Some((value, s));
        }
    };

    match constraint {
        BruteConstraint::CardinalityAtMost(k) | BruteConstraint::CardinalityExact(k) if n > 15 => {
            let exact = matches!(constraint, BruteConstraint::CardinalityExact(_));
            let sizes: Vec<usize> = if exact { vec![*k] } else { (0..=*k).collect() };
            for size in sizes {
                for_each_combination(n, size, &mut |combo| {
                    let s = Subset::from_indices(f.ground(), combo.iter().copied())
                        .expect("combination indices in range");
                    let value = f.eval_unchecked(&s);
                    consider(s, value, &mut best);
                });
            }
        }
        _ => {
            for mask in 0u64..1 << n {
                let s = Subset::from_mask(f.ground(), mask);
                if !satisfies(constraint, &s, n) {
                    continue;
                }
                let value = f.eval_unchecked(&s);
                consider(s, value, &mut best);
            }
        }
    }

    best.map(|(v, s)| (s, v))
        .ok_or_else(|| SubmodError::Infeasible("constraint admits no subset".into()))
}

fn satisfies(constraint: &BruteConstraint, s: &Subset, n: usize) -> bool {
    match constraint {
        BruteConstraint::Unconstrained => true,
        BruteConstraint::CardinalityAtMost(k) => s.cardinality() <= *k,
        BruteConstraint::CardinalityExact(k) => s.cardinality() == *k,
        BruteConstraint::Knapsack(kc) => kc.cost(s) <= kc.budget + TOLERANCE,
        BruteConstraint::Partition(pm) => pm.is_independent(s),
        BruteConstraint::ProperNonempty => {
            let c = s.cardinality();
            c >= 1 && c < n
        }
    }
}

/// Lexicographic order on sorted index sequences.
fn lex_smaller(a: &Subset, b: &Subset) -> bool {
    let mut ai = a.iter();
    let mut bi = b.iter();
    loop {
        match (ai.next(), bi.next()) {
            (Some(x), Some(y)) if x == y => continue,
            (Some(x), Some(y)) => return x < y,
            (None, Some(_)) => return true,
            _ => return false,
        }
    }
}

fn for_each_combination(n: usize, size: usize, emit: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        combo: &mut Vec<usize>,
        left: usize,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if left == 0 {
            emit(combo);
            return;
        }
        for v in start..=n.saturating_sub(left) {
            combo.push(v);
            rec(v + 1, n, combo, left - 1, emit);
            combo.pop();
        }
    }
    let mut combo = Vec::with_capacity(size);
    rec(0, n, &mut combo, size, emit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Flags;
    use crate::ground::GroundSet;
    use crate::zoo;

    fn sqrt_card(n: usize) -> SetFunctionHandle {
        let g = GroundSet::new(n).unwrap();
        SetFunctionHandle::new(g, Flags::polymatroid(), |a: &Subset| {
            (a.cardinality() as f64).sqrt()
        })
    }

    fn square_card(n: usize) -> SetFunctionHandle {
        let g = GroundSet::new(n).unwrap();
        SetFunctionHandle::new(g, Flags::default(), |a: &Subset| {
            (a.cardinality() as f64).powi(2)
        })
    }

    // ── check_submodular ──────────────────────────────────────────────

    #[test]
    fn sqrt_cardinality_is_submodular() {
        let report = check_submodular(&sqrt_card(6), CheckMode::Exhaustive).unwrap();
        assert!(report.verdict);
        assert!(report.pairs_checked > 0);
    }

    #[test]
    fn squared_cardinality_fails_with_replayable_witness() {
        let f = square_card(3);
        let report = check_submodular(&f, CheckMode::Exhaustive).unwrap();
        assert!(!report.verdict);
        let worst = &report.violations[0];
        // replay the witness
        let s = Subset::from_indices(f.ground(), worst.witness_sets[0].iter().copied()).unwrap();
        let x = worst.witness_elements[0];
        let w = worst.witness_elements[1];
        let lhs = f.marginal_gain(x, &s).unwrap();
        let rhs = f.marginal_gain(x, &s.with(w)).unwrap();
        assert!((lhs - worst.lhs).abs() < 1e-12);
        assert!((rhs - worst.rhs).abs() < 1e-12);
        assert!(rhs - lhs > TOLERANCE);
    }

    #[test]
    fn sampled_checker_agrees_on_planted_instances() {
        let good = check_submodular(&sqrt_card(9), CheckMode::sampled(7)).unwrap();
        assert!(good.verdict);
        let bad = check_submodular(&square_card(9), CheckMode::sampled(7)).unwrap();
        assert!(!bad.verdict);
    }

    #[test]
    fn four_points_agrees_with_classic_definition() {
        // classic: f(X) + f(Y) >= f(X|Y) + f(X&Y) over all pairs, n <= 8
        let classic_verdict = |f: &SetFunctionHandle| -> bool {
            let n = f.size_n();
            let table = full_table(f, 8).unwrap();
            for x in 0u64..1 << n {
                for y in 0u64..1 << n {
                    if table[x as usize] + table[y as usize]
                        < table[(x | y) as usize] + table[(x & y) as usize] - TOLERANCE
                    {
                        return false;
                    }
                }
            }
            true
        };
        for f in [
            sqrt_card(6),
            square_card(5),
            zoo::instances::random_facility_location(6, 1),
            zoo::instances::random_log_det(5, 2),
            zoo::build_modular(ModularWeights::new(vec![1.0, -2.0, 0.5], 0.0)).unwrap(),
        ] {
            let four_points = check_submodular(&f, CheckMode::Exhaustive).unwrap().verdict;
            assert_eq!(four_points, classic_verdict(&f));
        }
    }

    // ── check_monotone ────────────────────────────────────────────────

    #[test]
    fn facility_location_is_monotone() {
        let f = zoo::instances::random_facility_location(6, 3);
        assert!(check_monotone(&f, CheckMode::Exhaustive).unwrap().verdict);
    }

    #[test]
    fn correlated_log_det_is_not_monotone() {
        let f = zoo::build_log_det(
            zoo::LogDetSpec::new(vec![vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap(),
        )
        .unwrap();
        let report = check_monotone(&f, CheckMode::Exhaustive).unwrap();
        assert!(!report.verdict);
    }

    #[test]
    fn nonneg_modular_is_monotone() {
        let f = zoo::build_modular(ModularWeights::new(vec![0.0, 1.0, 2.0], 0.0)).unwrap();
        assert!(check_monotone(&f, CheckMode::Exhaustive).unwrap().verdict);
    }

    // ── total_curvature ───────────────────────────────────────────────

    #[test]
    fn modular_curvature_is_zero() {
        let f = zoo::build_modular(ModularWeights::new(vec![1.0, 2.0, 3.0], 0.0)).unwrap();
        let r = total_curvature(&f).unwrap();
        assert!(r.kappa.abs() < 1e-12);
        assert_eq!(r.greedy_bound, 1.0);
    }

    #[test]
    fn sqrt_curvature_n4() {
        let r = total_curvature(&sqrt_card(4)).unwrap();
        assert!((r.kappa - (3.0_f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn fully_curved_min_cap() {
        let g = GroundSet::new(3).unwrap();
        let f = SetFunctionHandle::new(g, Flags::polymatroid(), |a: &Subset| {
            (a.cardinality() as f64).min(1.0)
        });
        let r = total_curvature(&f).unwrap();
        assert!((r.kappa - 1.0).abs() < 1e-12);
        assert!((r.greedy_bound - (1.0 - (-1.0_f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn curvature_errors_when_all_pruned() {
        let f = zoo::build_modular(ModularWeights::new(vec![0.0, 0.0], 0.0)).unwrap();
        assert!(total_curvature(&f).is_err());
    }

    // ── supermodular_curvature ────────────────────────────────────────

    #[test]
    fn modular_supermodular_curvature_is_zero() {
        let g = zoo::build_modular(ModularWeights::new(vec![1.0, 2.0], 0.0)).unwrap();
        let r = supermodular_curvature(&g).unwrap();
        assert!(r.kappa.abs() < 1e-12);
    }

    #[test]
    fn squared_cardinality_supermodular_curvature() {
        let r = supermodular_curvature(&square_card(2)).unwrap();
        assert!((r.kappa - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bp_bound_reduces_to_classic() {
        assert!((bp_guarantee(1.0, 0.0) - (1.0 - (-1.0_f64).exp())).abs() < 1e-15);
        assert!((bp_guarantee(0.5, 0.0) - curvature_guarantee(0.5)).abs() < 1e-15);
    }

    // ── submodularity_ratio ───────────────────────────────────────────

    #[test]
    fn submodular_instances_have_gamma_one() {
        for f in [
            sqrt_card(5),
            zoo::instances::random_facility_location(5, 4),
            zoo::build_modular(ModularWeights::new(vec![1.0, 2.0, 0.5], 0.0)).unwrap(),
        ] {
            let r = submodularity_ratio(&f).unwrap();
            assert!((r.gamma - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn squared_cardinality_gamma_half() {
        let r = submodularity_ratio(&square_card(2)).unwrap();
        assert!((r.gamma - 0.5).abs() < 1e-12);
        assert!(r.witness_x.is_empty());
        assert_eq!(r.witness_y, vec![0, 1]);
    }

    // ── semigradient_bounds ───────────────────────────────────────────

    #[test]
    fn modular_semigradients_are_exact() {
        let f = zoo::build_modular(ModularWeights::new(vec![1.0, -2.0, 3.0], 0.5)).unwrap();
        let a = Subset::from_indices(f.ground(), [0, 2]).unwrap();
        let pair = semigradient_bounds(&f, &a, 9).unwrap();
        for mask in 0u64..8 {
            let x = Subset::from_mask(f.ground(), mask);
            let fx = f.evaluate(&x).unwrap();
            assert!((pair.lower.value(&x) - fx).abs() < 1e-12);
            assert!((pair.upper_union.value(&x) - fx).abs() < 1e-12);
            assert!((pair.upper_intersection.value(&x) - fx).abs() < 1e-12);
        }
    }

    #[test]
    fn semigradient_sandwich_on_zoo_instances() {
        for seed in 0..8 {
            let f = zoo::instances::random_facility_location(7, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = rng.gen_range(0..128u64);
            let a = Subset::from_mask(f.ground(), mask);
            let pair = semigradient_bounds(&f, &a, seed).unwrap();
            let f_a = f.evaluate(&a).unwrap();
            assert!((pair.lower.value(&a) - f_a).abs() < 1e-9);
            assert!((pair.upper_union.value(&a) - f_a).abs() < 1e-9);
            assert!((pair.upper_intersection.value(&a) - f_a).abs() < 1e-9);
            for m in 0u64..128 {
                let x = Subset::from_mask(f.ground(), m);
                let fx = f.evaluate(&x).unwrap();
                assert!(pair.lower.value(&x) <= fx + 1e-9);
                assert!(pair.upper_union.value(&x) >= fx - 1e-9);
                assert!(pair.upper_intersection.value(&x) >= fx - 1e-9);
            }
        }
    }

    // ── shapley ───────────────────────────────────────────────────────

    #[test]
    fn shapley_modular_is_weights() {
        let f = zoo::build_modular(ModularWeights::new(vec![1.5, -0.5, 2.0], 0.0)).unwrap();
        let phi = shapley_exact(&f).unwrap();
        assert!((phi[0] - 1.5).abs() < 1e-12);
        assert!((phi[1] + 0.5).abs() < 1e-12);
        assert!((phi[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shapley_sqrt_two_elements() {
        let phi = shapley_exact(&sqrt_card(2)).unwrap();
        let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
        assert!((phi[0] - half_sqrt2).abs() < 1e-12);
        assert!((phi[1] - half_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn shapley_efficiency_identity() {
        let f = zoo::instances::random_facility_location(7, 10);
        let phi = shapley_exact(&f).unwrap();
        let total: f64 = phi.iter().sum();
        let expect = f.value_full() - f.value_empty();
        assert!((total - expect).abs() <= 1e-9);
    }

    #[test]
    fn shapley_sampled_agrees_within_three_se() {
        let f = zoo::instances::random_coverage(6, 14);
        let exact = shapley_exact(&f).unwrap();
        let sample = shapley_sampled(&f, 20_000, 5).unwrap();
        for v in 0..6 {
            let dev = (sample.values[v] - exact[v]).abs();
            let allowance = 3.0 * sample.std_err[v] + 1e-9;
            assert!(dev <= allowance, "element {v}: dev {dev} > {allowance}");
        }
    }

    // ── log_partition_bounds ──────────────────────────────────────────

    #[test]
    fn modular_partition_bounds_are_tight() {
        let f = zoo::build_modular(ModularWeights::new(vec![0.5, -1.0, 2.0], 0.0)).unwrap();
        let a = Subset::from_indices(f.ground(), [2]).unwrap();
        let b = log_partition_bounds(&f, &a).unwrap();
        let exact = b.exact.unwrap();
        let closed: f64 = [0.5, -1.0, 2.0].iter().map(|&w| softplus(w)).sum();
        assert!((exact - closed).abs() < 1e-9);
        assert!((b.log_lower - closed).abs() < 1e-9);
        assert!((b.log_upper - closed).abs() < 1e-9);
    }

    #[test]
    fn zero_function_partition_is_n_log2() {
        let g = GroundSet::new(5).unwrap();
        let f = SetFunctionHandle::new(g, Flags::default(), |_: &Subset| 0.0);
        let b = log_partition_bounds(&f, &Subset::empty(f.ground())).unwrap();
        let expect = 5.0 * std::f64::consts::LN_2;
        assert!((b.exact.unwrap() - expect).abs() < 1e-12);
        assert!(b.log_lower <= expect + 1e-12 && expect <= b.log_upper + 1e-12);
    }

    #[test]
    fn partition_bounds_bracket_exact_on_zoo() {
        for seed in 0..10 {
            let f = zoo::instances::random_coverage(8, seed);
            let a = Subset::from_mask(f.ground(), seed % 256);
            let b = log_partition_bounds(&f, &a).unwrap();
            let exact = b.exact.unwrap();
            assert!(b.log_lower <= exact + 1e-9, "seed {seed}");
            assert!(exact <= b.log_upper + 1e-9, "seed {seed}");
        }
    }

    // ── brute_force_opt ───────────────────────────────────────────────

    #[test]
    fn brute_min_modular_is_negative_support() {
        let f = zoo::build_modular(ModularWeights::new(vec![1.0, -2.0, 3.0, -0.5], 0.0)).unwrap();
        let (s, v) = brute_force_opt(&f, &BruteConstraint::Unconstrained, Sense::Min).unwrap();
        assert_eq!(s.indices(), vec![1, 3]);
        assert!((v + 2.5).abs() < 1e-12);
    }

    #[test]
    fn brute_cardinality_full_k_is_ground_set() {
        let f = zoo::instances::random_facility_location(5, 6);
        let (s, _) =
            brute_force_opt(&f, &BruteConstraint::CardinalityAtMost(5), Sense::Max).unwrap();
        assert_eq!(s.cardinality(), 5);
    }

    #[test]
    fn brute_combination_path_matches_direct_pair_sweep() {
        // n = 16 forces the combination path
        let f = zoo::instances::random_facility_location(16, 8);
        let (a, va) =
            brute_force_opt(&f, &BruteConstraint::CardinalityExact(2), Sense::Max).unwrap();
        let mut best = f64::NEG_INFINITY;
        for i in 0..16 {
            for j in (i + 1)..16 {
                let s = Subset::from_indices(f.ground(), [i, j]).unwrap();
                best = best.max(f.evaluate(&s).unwrap());
            }
        }
        assert!((va - best).abs() < 1e-12);
        assert_eq!(a.cardinality(), 2);
    }
}
