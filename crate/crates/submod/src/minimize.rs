//! Exact unconstrained submodular minimization and the polyhedral
//! machinery behind it.
//!
//! The Lovász extension needs only a descending sort plus `n + 1` oracle
//! calls; its linear-programming dual over the base polytope is solved by
//! the Edmonds greedy vertex along a permutation chain. The minimum-norm
//! point over the base polytope (Fujishige–Wolfe) identifies a global
//! minimizer of `f` from the signs of its coordinates; Queyranne's pendant
//! pair contraction handles the symmetric case, and difference-of-submodular
//! descent alternates modular lower bounds with exact inner minimization.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::modular_lower_bound;
use crate::error::{Result, SubmodError};
use crate::function::{Flags, SetFunctionHandle};
use crate::ground::Subset;

const TOLERANCE: f64 = 1e-9;

// ─── Permutation chains and base vertices ────────────────────────────────

/// A permutation of the ground set together with its prefix chain
/// `∅ = S_0 ⊂ S_1 ⊂ … ⊂ S_n = V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationChain {
    order: Vec<usize>,
}

impl PermutationChain {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(SubmodError::InvalidSpec(format!(
                    "order is not a permutation at element {v}"
                )));
            }
            seen[v] = true;
        }
        Ok(PermutationChain { order })
    }

    pub fn identity(n: usize) -> Self {
        PermutationChain {
            order: (0..n).collect(),
        }
    }

    /// Order that sorts `x` descending, ties by index.
    pub fn descending(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap().then(a.cmp(&b)));
        PermutationChain { order }
    }

    /// Order that sorts `x` ascending, ties by index.
    pub fn ascending(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap().then(a.cmp(&b)));
        PermutationChain { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Prefix set `S_i` of the first `i` elements.
    pub fn prefix(&self, i: usize, ground: &Arc<crate::ground::GroundSet>) -> Subset {
        Subset::from_indices(ground, self.order[..i].iter().copied())
            .expect("permutation indices in range")
    }
}

/// A vertex of the base polytope of `f - f(∅)`, generated by the Edmonds
/// greedy along a chain: `y_{σ_i} = f(S_i) - f(S_{i-1})`.
#[derive(Debug, Clone)]
pub struct BasePolytopeVertex {
    pub point: Vec<f64>,
    pub generating_order: PermutationChain,
}

pub fn base_vertex(f: &SetFunctionHandle, chain: &PermutationChain) -> Result<BasePolytopeVertex> {
    let n = f.size_n();
    if chain.len() != n {
        return Err(SubmodError::GroundMismatch {
            expected: n,
            actual: chain.len(),
        });
    }
    let mut point = vec![0.0; n];
    let mut prefix = Subset::empty(f.ground());
    let mut prev = f.value_empty();
    for &v in chain.order() {
        prefix = prefix.with(v);
        let cur = f.eval_unchecked(&prefix);
        point[v] = cur - prev;
        prev = cur;
    }
    Ok(BasePolytopeVertex {
        point,
        generating_order: chain.clone(),
    })
}

// ─── Lovász extension ────────────────────────────────────────────────────

/// Value and breakdown of the Lovász extension at one point:
/// `f̂(x) = Σ_i λ_i f(S_i)` with `λ_i = x_{σ_i} - x_{σ_{i+1}}` and
/// `λ_n = x_{σ_n}` along the descending sort of `x`.
#[derive(Debug, Clone)]
pub struct LovaszBreakdown {
    pub value: f64,
    pub chain: PermutationChain,
    /// `λ_i` aligned with prefix `S_i` for `i = 1..=n`.
    pub lambdas: Vec<f64>,
}

pub fn lovasz_extension(f: &SetFunctionHandle, x: &[f64]) -> Result<LovaszBreakdown> {
    let n = f.size_n();
    if x.len() != n {
        return Err(SubmodError::GroundMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    let chain = PermutationChain::descending(x);
    let order = chain.order();
    let mut lambdas = vec![0.0; n];
    for i in 0..n {
        lambdas[i] = if i + 1 < n {
            x[order[i]] - x[order[i + 1]]
        } else {
            x[order[i]]
        };
    }
    let mut value = 0.0;
    let mut prefix = Subset::empty(f.ground());
    for (i, &v) in order.iter().enumerate() {
        prefix = prefix.with(v);
        // skipping zero coefficients keeps vertex evaluations bit-exact
        if lambdas[i] != 0.0 {
            value += lambdas[i] * f.eval_unchecked(&prefix);
        }
    }
    Ok(LovaszBreakdown {
        value,
        chain,
        lambdas,
    })
}

// ─── Minimum-norm point (Fujishige–Wolfe) ────────────────────────────────

/// Outcome of a minimization run: the minimizing set, its value, and for
/// norm-based runs the minimum-norm point with its duality gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizerCertificate {
    pub min_set: Vec<usize>,
    pub min_value: f64,
    pub norm_point: Option<Vec<f64>>,
    /// `f(min_set) - f(∅) - Σ_v min(x*_v, 0)`; non-negative up to float
    /// noise, and small exactly when the run converged.
    pub duality_gap: Option<f64>,
    pub iterations: usize,
}

impl MinimizerCertificate {
    pub fn min_subset(&self, f: &SetFunctionHandle) -> Subset {
        Subset::from_indices(f.ground(), self.min_set.iter().copied())
            .expect("minimizer indices in range")
    }
}

/// Fujishige–Wolfe minimum-norm point over the base polytope of
/// `f - f(∅)`, then the better of the strictly-negative and non-positive
/// level sets of `x*` as the minimizer.
pub fn min_norm_point(f: &SetFunctionHandle, tolerance: f64) -> Result<MinimizerCertificate> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(SubmodError::InvalidSpec(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let n = f.size_n();
    let f_empty = f.value_empty();
    let max_major = 100 * n * n;

    // linear minimization oracle: the vertex minimizing <w, y> over the
    // base polytope comes from the ascending sort of w
    let lmo = |w: &[f64]| -> Vec<f64> {
        let chain = PermutationChain::ascending(w);
        base_vertex(f, &chain).expect("chain matches ground set").point
    };

    let mut vertices: Vec<Vec<f64>> = vec![lmo(&vec![0.0; n])];
    let mut coeffs: Vec<f64> = vec![1.0];
    let mut x = vertices[0].clone();
    let mut best_gap = f64::INFINITY;
    let mut majors = 0;

    while majors < max_major {
        majors += 1;
        let q = lmo(&x);
        let gap = dot(&x, &x) - dot(&x, &q);
        best_gap = best_gap.min(gap);
        if gap <= tolerance {
            break;
        }
        if vertices.iter().any(|v| max_abs_diff(v, &q) < 1e-14) {
            // the oracle returned a vertex already in the corral: we are
            // numerically at the optimum even though the gap test did not
            // quite fire
            break;
        }
        vertices.push(q);
        coeffs.push(0.0);

        // minor cycles: move to the affine minimizer over the active set,
        // dropping vertices as coefficients hit zero
        loop {
            let alpha = affine_minimizer_coeffs(&vertices);
            if alpha.iter().all(|&a| a > 1e-12) {
                coeffs = alpha;
                break;
            }
            // largest step toward alpha keeping all coefficients >= 0
            let mut theta = 1.0f64;
            for i in 0..coeffs.len() {
                if alpha[i] < coeffs[i] {
                    let t = coeffs[i] / (coeffs[i] - alpha[i]);
                    theta = theta.min(t);
                }
            }
            for i in 0..coeffs.len() {
                coeffs[i] = (1.0 - theta) * coeffs[i] + theta * alpha[i];
            }
            let mut kept_vertices = Vec::with_capacity(vertices.len());
            let mut kept_coeffs = Vec::with_capacity(coeffs.len());
            for (v, &c) in vertices.iter().zip(&coeffs) {
                if c > 1e-12 {
                    kept_vertices.push(v.clone());
                    kept_coeffs.push(c);
                }
            }
            if kept_vertices.is_empty() {
                kept_vertices.push(vertices[0].clone());
                kept_coeffs.push(1.0);
            }
            vertices = kept_vertices;
            coeffs = kept_coeffs;
            if vertices.len() == 1 {
                coeffs = vec![1.0];
                break;
            }
        }
        // Caratheodory cap: n + 2 points in R^n are affinely dependent, so
        // the minor cycles should have pruned already; enforce the bound by
        // dropping the weakest vertex if numerics let one slip through
        while vertices.len() > n + 1 {
            let weakest = coeffs
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .expect("nonempty corral");
            vertices.remove(weakest);
            coeffs.remove(weakest);
        }
        let total: f64 = coeffs.iter().sum();
        for c in &mut coeffs {
            *c /= total;
        }
        x = combination(&vertices, &coeffs, n);
    }

    let converged = {
        let q = lmo(&x);
        let gap = dot(&x, &x) - dot(&x, &q);
        gap <= tolerance || best_gap <= tolerance
    };

    // candidate minimizers from the two level sets of x*
    let strict: Vec<usize> = (0..n).filter(|&v| x[v] < 0.0).collect();
    let relaxed: Vec<usize> = (0..n).filter(|&v| x[v] <= tolerance).collect();
    let eval_ids = |ids: &[usize]| -> Result<f64> {
        let s = Subset::from_indices(f.ground(), ids.iter().copied())?;
        Ok(f.eval_unchecked(&s))
    };
    let strict_val = eval_ids(&strict)?;
    let relaxed_val = eval_ids(&relaxed)?;
    let (min_set, min_value) = if relaxed_val < strict_val - TOLERANCE {
        (relaxed, relaxed_val)
    } else {
        (strict, strict_val)
    };

    let neg_mass: f64 = x.iter().map(|&v| v.min(0.0)).sum();
    let duality_gap = (min_value - f_empty) - neg_mass;

    if !converged {
        return Err(SubmodError::NotConverged {
            iterations: majors,
            best_gap,
        });
    }
    Ok(MinimizerCertificate {
        min_set,
        min_value,
        norm_point: Some(x),
        duality_gap: Some(duality_gap),
        iterations: majors,
    })
}

/// Coefficients of the affine minimizer of `‖Σ α_i v_i‖` subject to
/// `Σ α_i = 1`, by the KKT normal equations on the active vertex set.
fn affine_minimizer_coeffs(vertices: &[Vec<f64>]) -> Vec<f64> {
    let m = vertices.len();
    if m == 1 {
        return vec![1.0];
    }
    // KKT system: [ G  1 ] [α]   [0]
    //             [ 1ᵀ 0 ] [μ] = [1]   with G the Gram matrix of vertices
    let dim = m + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    for i in 0..m {
        for j in i..m {
            let g = dot(&vertices[i], &vertices[j]);
            a[i][j] = g;
            a[j][i] = g;
        }
        a[i][m] = 1.0;
        a[m][i] = 1.0;
    }
    let mut b = vec![0.0; dim];
    b[m] = 1.0;
    if let Some(sol) = solve_linear(a.clone(), b.clone()) {
        return sol[..m].to_vec();
    }
    // affinely dependent active set: nudge the Gram diagonal and let the
    // minor cycle prune the dependent vertex
    let scale: f64 = (0..m).map(|i| a[i][i].abs()).sum::<f64>() / m as f64;
    let ridge = scale.max(1.0) * 1e-12;
    for (i, row) in a.iter_mut().enumerate().take(m) {
        row[i] += ridge;
    }
    match solve_linear(a, b) {
        Some(sol) => sol[..m].to_vec(),
        None => {
            let mut sol = vec![0.0; m];
            sol[m - 1] = 1.0;
            sol
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` on singularity.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn combination(vertices: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (v, &c) in vertices.iter().zip(coeffs) {
        for i in 0..n {
            x[i] += c * v[i];
        }
    }
    x
}

// ─── Queyranne's algorithm ───────────────────────────────────────────────

/// Minimizes a symmetric submodular function over proper nonempty subsets
/// by pendant-pair contraction in `O(n^3)` oracle calls.
///
/// Symmetry (`f(A) = f(V \ A)`) is verified on 32 seeded random subsets
/// before the run.
pub fn queyranne_minimize(f: &SetFunctionHandle) -> Result<MinimizerCertificate> {
    use rand::Rng;
    let n = f.size_n();
    if n < 2 {
        return Err(SubmodError::InvalidSpec(
            "proper-subset minimization needs n >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..32 {
        let mut s = Subset::empty(f.ground());
        for v in 0..n {
            if rng.gen_bool(0.5) {
                s.insert(v)?;
            }
        }
        let lhs = f.eval_unchecked(&s);
        let rhs = f.eval_unchecked(&s.complement());
        if (lhs - rhs).abs() > TOLERANCE {
            return Err(SubmodError::NotSymmetric { lhs, rhs });
        }
    }

    // supernodes hold sorted original indices; the list stays sorted by
    // representative (minimum member) for deterministic tie-breaks
    let mut supernodes: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut rounds = 0;

    while supernodes.len() > 1 {
        rounds += 1;
        let m = supernodes.len();
        let as_subset = |members: &[usize]| -> Subset {
            Subset::from_indices(f.ground(), members.iter().copied())
                .expect("supernode members in range")
        };
        let singles: Vec<f64> = supernodes
            .iter()
            .map(|s| f.eval_unchecked(&as_subset(s)))
            .collect();

        // maximum-back order: start from the first supernode, then
        // repeatedly append the u minimizing f(W + u) - f(u)
        let mut in_order = vec![false; m];
        let mut order = vec![0usize];
        in_order[0] = true;
        let mut w_members = supernodes[0].clone();
        for _ in 1..m {
            let mut pick = None;
            let mut pick_key = f64::INFINITY;
            for (u, node) in supernodes.iter().enumerate() {
                if in_order[u] {
                    continue;
                }
                let mut joint = w_members.clone();
                joint.extend_from_slice(node);
                let key = f.eval_unchecked(&as_subset(&joint)) - singles[u];
                // strict improvement; ties keep the lowest representative,
                // which is the earliest u in this sorted scan
                if key < pick_key - TOLERANCE {
                    pick_key = key;
                    pick = Some(u);
                }
            }
            let u = pick.expect("some supernode remains");
            in_order[u] = true;
            order.push(u);
            w_members.extend_from_slice(&supernodes[u]);
        }

        // the last supernode of the order is one side of a pendant pair
        let last = order[m - 1];
        let prev = order[m - 2];
        let candidate = supernodes[last].clone();
        let value = f.eval_unchecked(&as_subset(&candidate));
        let better = match &best {
            None => true,
            Some((bv, bs)) => {
                value < bv - TOLERANCE
                    || ((value - bv).abs() <= TOLERANCE && candidate.len() < bs.len())
            }
        };
        if better {
            best = Some((value, candidate.clone()));
        }

        // contract the pendant pair
        let (keep, drop) = (prev.min(last), prev.max(last));
        let dropped = supernodes.remove(drop);
        supernodes[keep].extend(dropped);
        supernodes[keep].sort_unstable();
        supernodes.sort_by_key(|s| s[0]);
    }

    let (min_value, mut min_set) = best.expect("at least one pendant pair");
    min_set.sort_unstable();
    Ok(MinimizerCertificate {
        min_set,
        min_value,
        norm_point: None,
        duality_gap: None,
        iterations: rounds,
    })
}

// ─── Difference-of-submodular descent ────────────────────────────────────

/// Trace of a difference-of-submodular run: accepted iterates of
/// `h = f - g` are non-increasing by construction.
#[derive(Debug, Clone)]
pub struct DsTrace {
    pub result: Subset,
    pub values: Vec<f64>,
    pub iterations: usize,
}

/// Minimizes `h = f - g` (both submodular) by majorize-minimize: each
/// round replaces `g` with a modular lower bound tight at the current set
/// (built from a seeded random chain through it), minimizes the submodular
/// surrogate `f - m` exactly, and accepts strict improvements.
pub fn ds_minimize(
    f: &SetFunctionHandle,
    g: &SetFunctionHandle,
    start: &Subset,
    seed: u64,
) -> Result<DsTrace> {
    crate::ground::same_ground(f.ground(), g.ground())?;
    crate::ground::same_ground(f.ground(), start.ground())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = start.clone();
    let mut h_cur = f.evaluate(&current)? - g.evaluate(&current)?;
    let mut values = vec![h_cur];
    let mut iterations = 0;

    loop {
        iterations += 1;
        let bound = modular_lower_bound(g, &current, &mut rng);
        let inner_f = f.clone();
        let surrogate = SetFunctionHandle::new(
            Arc::clone(f.ground()),
            Flags::default(),
            move |a: &Subset| inner_f.eval_unchecked(a) - bound.value(a),
        );
        let inner = min_norm_point(&surrogate, 1e-9)?;
        let candidate = inner.min_subset(f);
        let h_candidate = f.evaluate(&candidate)? - g.evaluate(&candidate)?;
        if h_candidate < h_cur - TOLERANCE {
            current = candidate;
            h_cur = h_candidate;
            values.push(h_cur);
        } else {
            break;
        }
    }

    Ok(DsTrace {
        result: current,
        values,
        iterations,
    })
}
