//! Constrained submodular maximization with per-run approximation
//! certificates.
//!
//! Selection everywhere follows one deterministic rule: compute the fresh
//! maximum gain, then pick the lowest-index element whose gain is within
//! tolerance of that maximum. The lazy (Minoux) and naive paths implement
//! the same rule, so they return identical orders.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SubmodError};
use crate::function::{Flags, SetFunctionHandle};
use crate::ground::{same_ground, Subset};

/// Default comparison tolerance for gain ties.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

// ─── Constraints ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityConstraint {
    pub k: usize,
}

impl CardinalityConstraint {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(SubmodError::InvalidSpec(format!(
                "cardinality k={k} must satisfy 1 <= k <= {n}"
            )));
        }
        Ok(CardinalityConstraint { k })
    }
}

/// Positive per-element costs plus a budget; at least one singleton must fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackConstraint {
    pub costs: Vec<f64>,
    pub budget: f64,
}

impl KnapsackConstraint {
    pub fn new(costs: Vec<f64>, budget: f64) -> Result<Self> {
        if costs.is_empty() {
            return Err(SubmodError::InvalidSpec("empty cost vector".into()));
        }
        for &c in &costs {
            if !c.is_finite() || c <= 0.0 {
                return Err(SubmodError::InvalidSpec(format!(
                    "knapsack costs must be positive, got {c}"
                )));
            }
        }
        if !budget.is_finite() || budget <= 0.0 {
            return Err(SubmodError::InvalidSpec(format!(
                "budget must be positive, got {budget}"
            )));
        }
        let min_cost = costs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_cost > budget {
            return Err(SubmodError::Infeasible(
                "no singleton fits within the budget".into(),
            ));
        }
        Ok(KnapsackConstraint { costs, budget })
    }

    pub fn cost(&self, s: &Subset) -> f64 {
        s.iter().map(|v| self.costs[v]).sum()
    }
}

/// Minimal matroid contract: an independence test plus a rank upper bound.
/// The greedy below works for any implementor.
pub trait Matroid {
    fn is_independent(&self, s: &Subset) -> bool;
    fn rank_upper_bound(&self) -> usize;
}

/// Disjoint blocks covering the ground set, with a per-block pick limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionMatroidSpec {
    pub blocks: Vec<Vec<usize>>,
    pub limits: Vec<usize>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl PartitionMatroidSpec {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>, limits: Vec<usize>) -> Result<Self> {
        if blocks.len() != limits.len() {
            return Err(SubmodError::InvalidSpec(
                "one limit per block required".into(),
            ));
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, members) in blocks.iter().enumerate() {
            if members.is_empty() {
                return Err(SubmodError::InvalidSpec(format!("block {b} is empty")));
            }
            for &v in members {
                if v >= n {
                    return Err(SubmodError::IndexOutOfRange { index: v, size: n });
                }
                if block_of[v] != usize::MAX {
                    return Err(SubmodError::InvalidSpec(format!(
                        "element {v} appears in two blocks"
                    )));
                }
                block_of[v] = b;
            }
        }
        if block_of.contains(&usize::MAX) {
            return Err(SubmodError::InvalidSpec(
                "blocks must cover the ground set".into(),
            ));
        }
        Ok(PartitionMatroidSpec {
            blocks,
            limits,
            block_of,
        })
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }
}

impl Matroid for PartitionMatroidSpec {
    fn is_independent(&self, s: &Subset) -> bool {
        let mut counts = vec![0usize; self.blocks.len()];
        for v in s.iter() {
            counts[self.block_of[v]] += 1;
        }
        counts.iter().zip(&self.limits).all(|(c, l)| c <= l)
    }

    fn rank_upper_bound(&self) -> usize {
        self.blocks
            .iter()
            .zip(&self.limits)
            .map(|(b, l)| b.len().min(*l))
            .sum()
    }
}

// ─── Results and certificates ────────────────────────────────────────────

/// What a run can promise about its output relative to the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Fraction of the optimum guaranteed, in (0, 1].
    pub guarantee_ratio: f64,
    pub guarantee_kind: String,
    pub oracle_calls: u64,
    pub seed: Option<u64>,
    /// For set cover: run-computed Wolsey factor bounding |result| against
    /// the smallest set reaching the target valuation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wolsey_size_factor: Option<f64>,
}

/// Ordered picks, their per-step gains, and the run certificate. The gains
/// telescope: `f(empty) + Σ gains = value` exactly.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub order: Vec<usize>,
    pub gains: Vec<f64>,
    pub value: f64,
    pub certificate: Certificate,
}

impl SelectionResult {
    pub fn selected(&self, f: &SetFunctionHandle) -> Subset {
        Subset::from_indices(f.ground(), self.order.iter().copied())
            .expect("selection indices live on the handle's ground set")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GreedyOptions {
    pub lazy: bool,
    /// Stop before reaching `k` once every remaining gain is at most the
    /// tolerance. Off by default to preserve the exact-k contract.
    pub early_stop: bool,
    pub tolerance: f64,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            lazy: false,
            early_stop: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl GreedyOptions {
    pub fn lazy() -> Self {
        GreedyOptions {
            lazy: true,
            ..Default::default()
        }
    }
}

// ─── Selection rule ──────────────────────────────────────────────────────

/// Winner among `(index, gain)` candidates: lowest index whose gain is
/// within `tol` of the maximum. Returns `None` on an empty slate.
fn pick_winner(gains: &[(usize, f64)], tol: f64) -> Option<(usize, f64)> {
    let max_gain = gains
        .iter()
        .map(|&(_, g)| g)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_gain == f64::NEG_INFINITY {
        return None;
    }
    gains
        .iter()
        .filter(|&&(_, g)| g >= max_gain - tol)
        .min_by_key(|&&(v, _)| v)
        .copied()
}

/// One fresh-gain round over `candidates`, evaluated in parallel; the
/// reduction is deterministic regardless of worker count.
fn fresh_gains(
    f: &SetFunctionHandle,
    current: &Subset,
    f_cur: f64,
    candidates: &[usize],
) -> Vec<(usize, f64)> {
    if candidates.len() >= 64 {
        candidates
            .par_iter()
            .map(|&v| (v, f.gain_given_base(v, current, f_cur)))
            .collect()
    } else {
        candidates
            .iter()
            .map(|&v| (v, f.gain_given_base(v, current, f_cur)))
            .collect()
    }
}

// ─── Lazy heap ───────────────────────────────────────────────────────────

struct HeapEntry {
    gain: f64,
    index: usize,
    stamp: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.index == other.index
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on gain; lower index floats up among equal gains
        self.gain
            .partial_cmp(&other.gain)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Lazy selection round (Minoux): refresh stale heap entries until the top
/// is fresh, then refresh everything within tolerance of the top so the
/// tie-break sees fresh gains only. Stale gains over-estimate fresh ones
/// for submodular `f`, so entries below the band cannot win.
fn lazy_round(
    f: &SetFunctionHandle,
    current: &Subset,
    f_cur: f64,
    heap: &mut BinaryHeap<HeapEntry>,
    round: usize,
    tol: f64,
) -> Option<(usize, f64)> {
    let top = loop {
        let top = heap.pop()?;
        if top.stamp == round {
            break top;
        }
        let gain = f.gain_given_base(top.index, current, f_cur);
        heap.push(HeapEntry {
            gain,
            index: top.index,
            stamp: round,
        });
    };
    let band = top.gain - tol;
    let mut contenders = vec![(top.index, top.gain)];
    let mut parked = Vec::new();
    while let Some(peek) = heap.peek() {
        if peek.gain < band {
            break;
        }
        let entry = heap.pop().expect("peeked entry");
        let gain = if entry.stamp == round {
            entry.gain
        } else {
            f.gain_given_base(entry.index, current, f_cur)
        };
        if gain >= band {
            contenders.push((entry.index, gain));
        } else {
            parked.push(HeapEntry {
                gain,
                index: entry.index,
                stamp: round,
            });
        }
    }
    let winner = *contenders
        .iter()
        .min_by_key(|&&(v, _)| v)
        .expect("nonempty contenders");
    for (v, gain) in contenders {
        if v != winner.0 {
            heap.push(HeapEntry {
                gain,
                index: v,
                stamp: round,
            });
        }
    }
    heap.extend(parked);
    Some(winner)
}

// ─── Greedy under a cardinality constraint ───────────────────────────────

/// Plain or lazy greedy, `k` picks. The certificate carries the classic
/// `1 - (1 - 1/k)^k` ratio when the handle claims monotonicity.
pub fn greedy_cardinality(
    f: &SetFunctionHandle,
    c: CardinalityConstraint,
    opts: &GreedyOptions,
) -> Result<SelectionResult> {
    let n = f.size_n();
    let c = CardinalityConstraint::new(c.k, n)?;
    let monotone = f.flags().claims_monotone;
    if !monotone {
        log::warn!("greedy_cardinality on a handle without a monotonicity claim; the 1-1/e certificate does not apply");
    }
    let calls_before = f.eval_count();
    let mut current = Subset::empty(f.ground());
    let mut f_cur = f.value_empty();
    let mut order = Vec::with_capacity(c.k);
    let mut gains = Vec::with_capacity(c.k);

    if opts.lazy {
        let mut heap: BinaryHeap<HeapEntry> = (0..n)
            .map(|v| HeapEntry {
                gain: f.gain_given_base(v, &current, f_cur),
                index: v,
                stamp: 0,
            })
            .collect();
        for round in 0..c.k {
            let Some((v, gain)) = lazy_round(f, &current, f_cur, &mut heap, round, opts.tolerance)
            else {
                break;
            };
            if opts.early_stop && gain <= opts.tolerance {
                break;
            }
            order.push(v);
            gains.push(gain);
            current = current.with(v);
            f_cur += gain;
        }
    } else {
        let mut remaining: Vec<usize> = (0..n).collect();
        for _ in 0..c.k {
            let slate = fresh_gains(f, &current, f_cur, &remaining);
            let Some((v, gain)) = pick_winner(&slate, opts.tolerance) else {
                break;
            };
            if opts.early_stop && gain <= opts.tolerance {
                break;
            }
            order.push(v);
            gains.push(gain);
            current = current.with(v);
            f_cur += gain;
            remaining.retain(|&u| u != v);
        }
    }

    Ok(SelectionResult {
        order,
        gains,
        value: f_cur,
        certificate: Certificate {
            guarantee_ratio: cardinality_greedy_ratio(c.k),
            guarantee_kind: if monotone {
                "greedy-cardinality".into()
            } else {
                "greedy-cardinality-unverified".into()
            },
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: None,
        },
    })
}

/// `1 - (1 - 1/k)^k`, the greedy guarantee at cardinality `k`.
pub fn cardinality_greedy_ratio(k: usize) -> f64 {
    1.0 - (1.0 - 1.0 / k as f64).powi(k as i32)
}

// ─── Knapsack ────────────────────────────────────────────────────────────

/// Benefit-per-cost greedy sweep, then the better of that sweep and the
/// best feasible singleton. Certified `0.5 (1 - 1/e)`.
pub fn greedy_knapsack(f: &SetFunctionHandle, kc: &KnapsackConstraint) -> Result<SelectionResult> {
    let n = f.size_n();
    if kc.costs.len() != n {
        return Err(SubmodError::GroundMismatch {
            expected: n,
            actual: kc.costs.len(),
        });
    }
    if !f.flags().claims_monotone {
        log::warn!("greedy_knapsack on a handle without a monotonicity claim");
    }
    let calls_before = f.eval_count();
    let tol = DEFAULT_TOLERANCE;

    let (sweep_order, sweep_gains, sweep_value) = ratio_sweep(f, kc, &Subset::empty(f.ground()))?;

    // best feasible singleton
    let f_empty = f.value_empty();
    let mut best_single: Option<(usize, f64)> = None;
    for v in 0..n {
        if kc.costs[v] <= kc.budget {
            let val = f.eval_unchecked(&Subset::empty(f.ground()).with(v));
            if best_single.is_none_or(|(_, b)| val > b + tol) {
                best_single = Some((v, val));
            }
        }
    }
    let (single_v, single_val) = best_single.ok_or_else(|| {
        SubmodError::Infeasible("no singleton fits within the budget".into())
    })?;

    let (order, gains, value) = if single_val > sweep_value + tol {
        (vec![single_v], vec![single_val - f_empty], single_val)
    } else {
        (sweep_order, sweep_gains, sweep_value)
    };

    Ok(SelectionResult {
        order,
        gains,
        value,
        certificate: Certificate {
            guarantee_ratio: 0.5 * (1.0 - (-1.0_f64).exp()),
            guarantee_kind: "ratio-greedy+singleton".into(),
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: None,
        },
    })
}

/// Gain-per-cost sweep starting from `seed_set`, spending what budget
/// remains after the seed.
fn ratio_sweep(
    f: &SetFunctionHandle,
    kc: &KnapsackConstraint,
    seed_set: &Subset,
) -> Result<(Vec<usize>, Vec<f64>, f64)> {
    let n = f.size_n();
    let tol = DEFAULT_TOLERANCE;
    let mut current = seed_set.clone();
    let mut f_cur = f.eval_unchecked(&current);
    let mut spent = kc.cost(&current);
    let mut order: Vec<usize> = current.indices();
    let mut gains: Vec<f64> = Vec::new();
    if !order.is_empty() {
        // per-step gains of the seed walked in index order
        let mut acc = Subset::empty(f.ground());
        let mut acc_val = f.value_empty();
        for &v in &order {
            let next = f.eval_unchecked(&acc.with(v));
            gains.push(next - acc_val);
            acc = acc.with(v);
            acc_val = next;
        }
    }
    loop {
        let mut slate = Vec::new();
        for v in 0..n {
            if current.contains(v) || spent + kc.costs[v] > kc.budget + tol {
                continue;
            }
            let gain = f.gain_given_base(v, &current, f_cur);
            if gain > tol {
                slate.push((v, gain / kc.costs[v], gain));
            }
        }
        let best_ratio = slate
            .iter()
            .map(|&(_, r, _)| r)
            .fold(f64::NEG_INFINITY, f64::max);
        let Some(&(v, _, gain)) = slate
            .iter()
            .filter(|&&(_, r, _)| r >= best_ratio - tol)
            .min_by_key(|&&(v, _, _)| v)
        else {
            break;
        };
        order.push(v);
        gains.push(gain);
        current = current.with(v);
        f_cur += gain;
        spent += kc.costs[v];
    }
    Ok((order, gains, f_cur))
}

/// Partial-enumeration knapsack greedy: complete every feasible seed of
/// size at most `depth` with the ratio sweep and keep the best. With
/// `depth >= 3` this carries the full `1 - 1/e` certificate at
/// `O(n^{depth+1})` oracle cost.
pub fn greedy_knapsack_partial_enum(
    f: &SetFunctionHandle,
    kc: &KnapsackConstraint,
    depth: usize,
) -> Result<SelectionResult> {
    let n = f.size_n();
    if kc.costs.len() != n {
        return Err(SubmodError::GroundMismatch {
            expected: n,
            actual: kc.costs.len(),
        });
    }
    let calls_before = f.eval_count();
    let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;

    let mut seeds: Vec<Vec<usize>> = vec![vec![]];
    for size in 1..=depth.min(n) {
        let mut level = Vec::new();
        combinations(n, size, &mut |combo| level.push(combo.to_vec()));
        seeds.extend(level);
    }
    for seed in seeds {
        let seed_set = Subset::from_indices(f.ground(), seed.iter().copied())?;
        if kc.cost(&seed_set) > kc.budget + DEFAULT_TOLERANCE {
            continue;
        }
        let (order, gains, value) = ratio_sweep(f, kc, &seed_set)?;
        if best.as_ref().is_none_or(|(_, _, b)| value > *b + DEFAULT_TOLERANCE) {
            best = Some((order, gains, value));
        }
    }
    let (order, gains, value) =
        best.ok_or_else(|| SubmodError::Infeasible("no feasible seed set".into()))?;
    Ok(SelectionResult {
        order,
        gains,
        value,
        certificate: Certificate {
            guarantee_ratio: if depth >= 3 {
                1.0 - (-1.0_f64).exp()
            } else {
                0.5 * (1.0 - (-1.0_f64).exp())
            },
            guarantee_kind: format!("partial-enumeration-greedy(depth={depth})"),
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: None,
        },
    })
}

fn combinations(n: usize, size: usize, emit: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, combo: &mut Vec<usize>, left: usize, emit: &mut impl FnMut(&[usize])) {
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

// ─── Matroid greedy ──────────────────────────────────────────────────────

/// Greedy over any [`Matroid`]: each round skips elements whose addition
/// would leave the independence family. Certified 1/2 for monotone `f`.
pub fn greedy_matroid<M: Matroid>(f: &SetFunctionHandle, matroid: &M) -> Result<SelectionResult> {
    if !f.flags().claims_monotone {
        log::warn!("greedy_matroid on a handle without a monotonicity claim");
    }
    let n = f.size_n();
    let calls_before = f.eval_count();
    let tol = DEFAULT_TOLERANCE;
    let mut current = Subset::empty(f.ground());
    let mut f_cur = f.value_empty();
    let mut order = Vec::new();
    let mut gains = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    while order.len() < matroid.rank_upper_bound() {
        remaining.retain(|&v| matroid.is_independent(&current.with(v)));
        if remaining.is_empty() {
            break;
        }
        let slate = fresh_gains(f, &current, f_cur, &remaining);
        let Some((v, gain)) = pick_winner(&slate, tol) else {
            break;
        };
        order.push(v);
        gains.push(gain);
        current = current.with(v);
        f_cur += gain;
        remaining.retain(|&u| u != v);
    }
    Ok(SelectionResult {
        order,
        gains,
        value: f_cur,
        certificate: Certificate {
            guarantee_ratio: 0.5,
            guarantee_kind: "matroid-greedy".into(),
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: None,
        },
    })
}

pub fn greedy_partition_matroid(
    f: &SetFunctionHandle,
    pm: &PartitionMatroidSpec,
) -> Result<SelectionResult> {
    if pm.block_of.len() != f.size_n() {
        return Err(SubmodError::GroundMismatch {
            expected: f.size_n(),
            actual: pm.block_of.len(),
        });
    }
    greedy_matroid(f, pm)
}

// ─── Submodular set cover ────────────────────────────────────────────────

/// Greedy until `f` reaches `alpha`; the certificate stores the
/// run-computed Wolsey factor
/// `1 + ln(f(V) / (f(V) - f(X_{i-1})))` bounding the result size against
/// the smallest set of valuation `alpha`.
pub fn submodular_set_cover(f: &SetFunctionHandle, alpha: f64) -> Result<SelectionResult> {
    let flags = f.flags();
    if !flags.claims_monotone || !flags.claims_normalized {
        log::warn!("submodular_set_cover expects a monotone normalized handle");
    }
    let tol = DEFAULT_TOLERANCE;
    let calls_before = f.eval_count();
    let f_full = f.value_full();
    if alpha > f_full + tol {
        return Err(SubmodError::Infeasible(format!(
            "target valuation {alpha} exceeds f(V) = {f_full}"
        )));
    }
    let n = f.size_n();
    let mut current = Subset::empty(f.ground());
    let mut f_cur = f.value_empty();
    let mut order = Vec::new();
    let mut gains = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut prev_value = f_cur;
    while f_cur < alpha - tol && !remaining.is_empty() {
        let slate = fresh_gains(f, &current, f_cur, &remaining);
        let Some((v, gain)) = pick_winner(&slate, tol) else {
            break;
        };
        prev_value = f_cur;
        order.push(v);
        gains.push(gain);
        current = current.with(v);
        f_cur += gain;
        remaining.retain(|&u| u != v);
    }
    let wolsey = if order.is_empty() {
        1.0
    } else {
        let residual = f_full - prev_value;
        if residual > 0.0 {
            1.0 + (f_full / residual).ln().max(0.0)
        } else {
            f64::INFINITY
        }
    };
    Ok(SelectionResult {
        order,
        gains,
        value: f_cur,
        certificate: Certificate {
            guarantee_ratio: 1.0,
            guarantee_kind: "set-cover-wolsey".into(),
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: Some(wolsey),
        },
    })
}

// ─── Bidirectional random greedy ─────────────────────────────────────────

/// Randomized bidirectional greedy for unconstrained non-monotone
/// maximization: elements are visited in a seeded random order, each either
/// joining the growing set or leaving the shrinking set with probability
/// `a+ / (a+ + b+)` on the positive parts of the two gains (an even coin
/// when both vanish). Expected 1/2 of the optimum for non-negative `f`.
pub fn random_greedy_unconstrained(f: &SetFunctionHandle, seed: u64) -> Result<SelectionResult> {
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let n = f.size_n();
    let calls_before = f.eval_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visit: Vec<usize> = (0..n).collect();
    // Fisher-Yates driven by the seeded stream
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        visit.swap(i, j);
    }

    let mut grow = Subset::empty(f.ground());
    let mut shrink = Subset::full(f.ground());
    let mut f_grow = f.value_empty();
    let mut f_shrink = f.value_full();
    let mut order = Vec::new();
    let mut gains = Vec::new();

    for &v in &visit {
        let forward = f.eval_unchecked(&grow.with(v)) - f_grow;
        let backward = f.eval_unchecked(&shrink.without(v)) - f_shrink;
        let a = forward.max(0.0);
        let b = backward.max(0.0);
        let p_add = if a + b <= 0.0 { 0.5 } else { a / (a + b) };
        if rng.gen_range(0.0..1.0) < p_add {
            grow = grow.with(v);
            f_grow += forward;
            order.push(v);
            gains.push(forward);
        } else {
            shrink = shrink.without(v);
            f_shrink += backward;
        }
    }
    debug_assert_eq!(grow, shrink);

    Ok(SelectionResult {
        order,
        gains,
        value: f_grow,
        certificate: Certificate {
            guarantee_ratio: 0.5,
            guarantee_kind: "bidirectional-random".into(),
            oracle_calls: f.eval_count() - calls_before,
            seed: Some(seed),
            wolsey_size_factor: None,
        },
    })
}

// ─── Submodular welfare ──────────────────────────────────────────────────

/// A partition of the ground set and its summed per-block valuations.
#[derive(Debug, Clone)]
pub struct WelfarePartition {
    pub blocks: Vec<Subset>,
    pub block_values: Vec<f64>,
    pub value: f64,
}

/// Greedy welfare: each element joins the block where its marginal gain is
/// largest (ties to the lowest block index). Pass one handle for the
/// homogeneous case or exactly `m_blocks` handles.
pub fn welfare_partition_greedy(
    fs: &[SetFunctionHandle],
    m_blocks: usize,
) -> Result<WelfarePartition> {
    if m_blocks < 1 {
        return Err(SubmodError::InvalidSpec(
            "need at least one welfare block".into(),
        ));
    }
    let first = fs
        .first()
        .ok_or_else(|| SubmodError::InvalidSpec("need at least one objective".into()))?;
    if fs.len() != 1 && fs.len() != m_blocks {
        return Err(SubmodError::InvalidSpec(format!(
            "got {} objectives for {m_blocks} blocks; pass 1 or {m_blocks}",
            fs.len()
        )));
    }
    for h in fs {
        same_ground(first.ground(), h.ground())?;
        if !h.flags().claims_monotone || !h.flags().claims_normalized {
            log::warn!("welfare greedy expects monotone normalized objectives");
        }
    }
    let objective = |j: usize| -> &SetFunctionHandle { if fs.len() == 1 { first } else { &fs[j] } };
    let tol = DEFAULT_TOLERANCE;
    let n = first.size_n();
    let mut blocks: Vec<Subset> = (0..m_blocks).map(|_| Subset::empty(first.ground())).collect();
    let mut block_values: Vec<f64> = (0..m_blocks).map(|j| objective(j).value_empty()).collect();
    for v in 0..n {
        let mut best_j = 0;
        let mut best_gain = f64::NEG_INFINITY;
        let mut per_block = Vec::with_capacity(m_blocks);
        for j in 0..m_blocks {
            let gain = objective(j).gain_given_base(v, &blocks[j], block_values[j]);
            per_block.push(gain);
            if gain > best_gain + tol {
                best_gain = gain;
                best_j = j;
            }
        }
        // ties within tolerance resolve to the lowest block index
        for (j, &gain) in per_block.iter().enumerate() {
            if gain >= best_gain - tol && j < best_j {
                best_j = j;
                best_gain = gain;
            }
        }
        blocks[best_j] = blocks[best_j].with(v);
        block_values[best_j] += per_block[best_j];
    }
    let value = block_values.iter().sum();
    Ok(WelfarePartition {
        blocks,
        block_values,
        value,
    })
}

// ─── Monotone-decreasing maximization via reflection ─────────────────────

/// Maximizes a monotone non-increasing submodular `f` over sets of size
/// `k_prime` by running cardinality greedy on the reflection
/// `g(X) = f(V \ X)` with `k = n - k_prime` and returning the complement.
pub fn maximize_monotone_decreasing(
    f: &SetFunctionHandle,
    k_prime: usize,
) -> Result<SelectionResult> {
    let n = f.size_n();
    if k_prime > n {
        return Err(SubmodError::InvalidSpec(format!(
            "k' = {k_prime} exceeds the ground set size {n}"
        )));
    }
    let calls_before = f.eval_count();
    let inner = f.clone();
    // the reflection of a monotone non-increasing function is monotone
    // non-decreasing, which the caller's precondition lets us claim
    let reflected = SetFunctionHandle::new(
        std::sync::Arc::clone(f.ground()),
        Flags {
            claims_monotone: true,
            claims_normalized: false,
            claims_symmetric: f.flags().claims_symmetric,
            claims_nonneg: f.flags().claims_nonneg,
        },
        move |a: &Subset| inner.eval_unchecked(&a.complement()),
    );

    let chosen = if k_prime == n {
        Subset::empty(f.ground())
    } else {
        let k = n - k_prime;
        let result = greedy_cardinality(
            &reflected,
            CardinalityConstraint { k },
            &GreedyOptions::default(),
        )?;
        result.selected(&reflected)
    };
    let complement = chosen.complement();

    // walk f along the complement to report telescoping gains
    let mut order = Vec::with_capacity(k_prime);
    let mut gains = Vec::with_capacity(k_prime);
    let mut acc = Subset::empty(f.ground());
    let mut acc_val = f.value_empty();
    for v in complement.iter() {
        let next = f.eval_unchecked(&acc.with(v));
        order.push(v);
        gains.push(next - acc_val);
        acc = acc.with(v);
        acc_val = next;
    }

    let ratio = if k_prime == n {
        1.0
    } else {
        cardinality_greedy_ratio(n - k_prime)
    };
    Ok(SelectionResult {
        order,
        gains,
        value: acc_val,
        certificate: Certificate {
            guarantee_ratio: ratio,
            guarantee_kind: "reflection-transfer".into(),
            oracle_calls: f.eval_count() - calls_before,
            seed: None,
            wolsey_size_factor: None,
        },
    })
}
