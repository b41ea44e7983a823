//! Combinatorial information measures and their applications.
//!
//! Any polymatroid acts as an information function, which gives a
//! combinatorial conditional mutual information
//! `I_f(A;B|C) = f(A∪C) + f(B∪C) - f(C) - f(A∪B∪C)`. Its symmetric
//! instantiation `I_f(A; V\A)` drives recursive bisection clustering
//! (Q-clustering via Queyranne), the label-set strength `Ψ(L)`, and the
//! exhaustive smoothest-completion labeler.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SubmodError};
use crate::function::{Flags, SetFunctionHandle};
use crate::ground::{same_ground, GroundSet, Subset};
use crate::minimize::queyranne_minimize;
use crate::zoo::SimilarityMatrix;

// ─── CCMI ────────────────────────────────────────────────────────────────

/// Arguments of a conditional mutual information query. Overlap between
/// the arguments is legal; [`CcmiQuery::overlapping`] flags it for reports.
#[derive(Debug, Clone)]
pub struct CcmiQuery {
    pub a: Subset,
    pub b: Subset,
    pub c: Subset,
}

impl CcmiQuery {
    pub fn new(a: Subset, b: Subset, c: Subset) -> Result<Self> {
        same_ground(a.ground(), b.ground())?;
        same_ground(a.ground(), c.ground())?;
        Ok(CcmiQuery { a, b, c })
    }

    /// Unconditioned query `I_f(A; B)`.
    pub fn unconditional(a: Subset, b: Subset) -> Result<Self> {
        let c = Subset::empty(a.ground());
        Self::new(a, b, c)
    }

    pub fn overlapping(&self) -> bool {
        !self.a.is_disjoint_from(&self.b)
            || !self.a.is_disjoint_from(&self.c)
            || !self.b.is_disjoint_from(&self.c)
    }
}

/// `I_f(A;B|C) = f(A∪C) + f(B∪C) - f(C) - f(A∪B∪C)`, four oracle calls.
pub fn ccmi(f: &SetFunctionHandle, q: &CcmiQuery) -> Result<f64> {
    same_ground(f.ground(), q.a.ground())?;
    let ac = q.a.union(&q.c);
    let bc = q.b.union(&q.c);
    let abc = ac.union(&q.b);
    Ok(f.eval_unchecked(&ac) + f.eval_unchecked(&bc)
        - f.eval_unchecked(&q.c)
        - f.eval_unchecked(&abc))
}

/// Facility-location CCMI in closed form:
/// `Σ_v max(min(max_{a∈A} sim(a,v), max_{b∈B} sim(b,v)) - max_{c∈C} sim(c,v), 0)`
/// with empty maxima taken as 0. Equals [`ccmi`] on the facility-location
/// handle built from the same matrix.
pub fn fl_ccmi_closed_form(sim: &SimilarityMatrix, q: &CcmiQuery) -> Result<f64> {
    let n = sim.size();
    if q.a.size_n() != n {
        return Err(SubmodError::GroundMismatch {
            expected: n,
            actual: q.a.size_n(),
        });
    }
    let best_over = |s: &Subset, v: usize| -> f64 {
        s.iter().map(|a| sim.get(a, v)).fold(0.0, f64::max)
    };
    let mut total = 0.0;
    for v in 0..n {
        let a_best = best_over(&q.a, v);
        let b_best = best_over(&q.b, v);
        let c_best = best_over(&q.c, v);
        total += (a_best.min(b_best) - c_best).max(0.0);
    }
    Ok(total)
}

/// The symmetric instantiation `g(A) = I_f(A; V\A)`; symmetric and, for
/// submodular `f`, itself submodular and non-negative.
pub fn symmetric_ccmi_handle(f: &SetFunctionHandle) -> SetFunctionHandle {
    let inner = f.clone();
    let f_empty = f.value_empty();
    let f_full = f.value_full();
    SetFunctionHandle::new(
        Arc::clone(f.ground()),
        Flags {
            claims_monotone: false,
            claims_normalized: true,
            claims_symmetric: true,
            claims_nonneg: false,
        },
        move |a: &Subset| {
            inner.eval_unchecked(a) + inner.eval_unchecked(&a.complement()) - f_empty - f_full
        },
    )
}

// ─── Q-clustering ────────────────────────────────────────────────────────

/// One node of a Q-clustering tree.
#[derive(Debug, Clone)]
pub struct ClusterNode {
    pub members: Subset,
    /// `I_f` value of the split below this node, if it was split.
    pub split_value: Option<f64>,
    pub children: Option<(usize, usize)>,
}

/// Binary split hierarchy whose leaves partition the ground set.
#[derive(Debug, Clone)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
}

impl ClusterTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &ClusterNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Leaf subsets in order of minimum member.
    pub fn leaves(&self) -> Vec<&Subset> {
        let mut out: Vec<&Subset> = self
            .nodes
            .iter()
            .filter(|n| n.children.is_none())
            .map(|n| &n.members)
            .collect();
        out.sort_by_key(|s| s.iter().next().unwrap_or(usize::MAX));
        out
    }
}

/// Recursive bisection: split the largest leaf by minimizing the symmetric
/// function `I_f(B; W\B)` restricted to that leaf (Queyranne), until `k`
/// leaves exist. Ties in leaf scheduling go to the lowest minimum member.
pub fn q_cluster(f: &SetFunctionHandle, k: usize) -> Result<ClusterTree> {
    let n = f.size_n();
    if k < 1 || k > n {
        return Err(SubmodError::InvalidSpec(format!(
            "cluster count k={k} must satisfy 1 <= k <= {n}"
        )));
    }
    let f_empty = f.value_empty();
    let mut nodes = vec![ClusterNode {
        members: Subset::full(f.ground()),
        split_value: None,
        children: None,
    }];
    let mut leaf_ids = vec![0usize];

    while leaf_ids.len() < k {
        // largest leaf first, ties to the lowest minimum member
        let mut pick = leaf_ids[0];
        let mut pick_key = (0usize, usize::MAX);
        for &id in &leaf_ids {
            let s = &nodes[id].members;
            let key = (s.cardinality(), s.iter().next().unwrap_or(usize::MAX));
            if key.0 > pick_key.0 || (key.0 == pick_key.0 && key.1 < pick_key.1) {
                pick = id;
                pick_key = key;
            }
        }

        let members = nodes[pick].members.clone();
        let ws: Vec<usize> = members.indices();
        debug_assert!(ws.len() >= 2, "scheduling never picks singleton leaves");

        // symmetric CCMI on the restricted ground set
        let local_ground = GroundSet::new(ws.len())?;
        let inner = f.clone();
        let outer_ground = Arc::clone(f.ground());
        let ws_for_oracle = ws.clone();
        let f_w = f.eval_unchecked(&members);
        let local = SetFunctionHandle::new(
            local_ground,
            Flags {
                claims_symmetric: true,
                claims_normalized: true,
                ..Flags::default()
            },
            move |b: &Subset| {
                let mut lifted = Subset::empty(&outer_ground);
                let mut lifted_rest = Subset::empty(&outer_ground);
                for (i, &orig) in ws_for_oracle.iter().enumerate() {
                    if b.contains(i) {
                        lifted = lifted.with(orig);
                    } else {
                        lifted_rest = lifted_rest.with(orig);
                    }
                }
                inner.eval_unchecked(&lifted) + inner.eval_unchecked(&lifted_rest) - f_empty - f_w
            },
        );
        let cert = queyranne_minimize(&local)?;
        let left: Vec<usize> = cert.min_set.iter().map(|&i| ws[i]).collect();
        let left_set = Subset::from_indices(f.ground(), left.iter().copied())?;
        let right_set = members.difference(&left_set);

        let left_id = nodes.len();
        nodes.push(ClusterNode {
            members: left_set,
            split_value: None,
            children: None,
        });
        let right_id = nodes.len();
        nodes.push(ClusterNode {
            members: right_set,
            split_value: None,
            children: None,
        });
        nodes[pick].split_value = Some(cert.min_value);
        nodes[pick].children = Some((left_id, right_id));
        leaf_ids.retain(|&id| id != pick);
        leaf_ids.push(left_id);
        leaf_ids.push(right_id);
    }

    let tree = ClusterTree { nodes };
    assert_leaves_partition(&tree, n);
    Ok(tree)
}

/// Leaves must be pairwise disjoint and cover the ground set.
fn assert_leaves_partition(tree: &ClusterTree, n: usize) {
    let leaves = tree.leaves();
    let mut seen = vec![false; n];
    for leaf in &leaves {
        for v in leaf.iter() {
            assert!(!seen[v], "cluster leaves overlap at element {v}");
            seen[v] = true;
        }
    }
    assert!(
        seen.iter().all(|&s| s),
        "cluster leaves do not cover the ground set"
    );
}

// ─── Label strength and smoothest completion ─────────────────────────────

/// Strength of a labeled set: `Ψ(L) = min_{∅ ≠ T ⊆ V\L} I_f(T) / |T|`
/// with the witness attaining it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrengthReport {
    pub labeled: Vec<usize>,
    pub psi: f64,
    pub witness: Vec<usize>,
}

/// Exhaustive `Ψ(L)` over nonempty subsets of the unlabeled complement;
/// requires at most 20 free elements. `L = V` has no adversarial set, so
/// the report carries `psi = +∞` with an empty witness.
pub fn label_strength(f: &SetFunctionHandle, labeled: &Subset) -> Result<StrengthReport> {
    same_ground(f.ground(), labeled.ground())?;
    let free: Vec<usize> = labeled.complement().indices();
    if free.len() > 20 {
        return Err(SubmodError::InvalidSpec(format!(
            "exhaustive strength capped at 20 unlabeled elements, got {}",
            free.len()
        )));
    }
    if free.is_empty() {
        return Ok(StrengthReport {
            labeled: labeled.indices(),
            psi: f64::INFINITY,
            witness: Vec::new(),
        });
    }
    let sym = symmetric_ccmi_handle(f);
    let mut best = f64::INFINITY;
    let mut witness = Vec::new();
    for bits in 1u64..1 << free.len() {
        let t: Vec<usize> = free
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let t_set = Subset::from_indices(f.ground(), t.iter().copied())?;
        let ratio = sym.eval_unchecked(&t_set) / t.len() as f64;
        if ratio < best {
            best = ratio;
            witness = t;
        }
    }
    Ok(StrengthReport {
        labeled: labeled.indices(),
        psi: best,
        witness,
    })
}

/// Exhaustive smoothest completion: among all labelings agreeing with
/// `ones_in_labeled` on `labeled`, the one minimizing `I_f(V(ŷ))`; ties go
/// to the lexicographically smallest bit-vector. Returns the set of
/// 1-labeled elements.
pub fn smoothest_completion(
    f: &SetFunctionHandle,
    labeled: &Subset,
    ones_in_labeled: &Subset,
) -> Result<Subset> {
    same_ground(f.ground(), labeled.ground())?;
    same_ground(f.ground(), ones_in_labeled.ground())?;
    if !ones_in_labeled.is_subset_of(labeled) {
        return Err(SubmodError::InvalidSpec(
            "the 1-labeled anchor set must lie inside the labeled set".into(),
        ));
    }
    let free: Vec<usize> = labeled.complement().indices();
    if free.len() > 20 {
        return Err(SubmodError::InvalidSpec(format!(
            "exhaustive completion capped at 20 free elements, got {}",
            free.len()
        )));
    }
    let sym = symmetric_ccmi_handle(f);
    let mut best: Option<(f64, Subset)> = None;
    for bits in 0u64..1 << free.len() {
        let mut y = ones_in_labeled.clone();
        for (i, &v) in free.iter().enumerate() {
            if bits >> i & 1 == 1 {
                y = y.with(v);
            }
        }
        let value = sym.eval_unchecked(&y);
        let better = match &best {
            None => true,
            Some((bv, bs)) => value < *bv || (value == *bv && lex_smaller_bits(&y, bs)),
        };
        if better {
            best = Some((value, y));
        }
    }
    Ok(best.expect("at least one completion").1)
}

/// Bit-vector lexicographic order reading indices upward: the first index
/// where the sets differ decides, absent-bit smaller.
fn lex_smaller_bits(a: &Subset, b: &Subset) -> bool {
    for v in 0..a.size_n() {
        match (a.contains(v), b.contains(v)) {
            (false, true) => return true,
            (true, false) => return false,
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ModularWeights;
    use crate::zoo;

    fn sets(
        f: &SetFunctionHandle,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> CcmiQuery {
        CcmiQuery::new(
            Subset::from_indices(f.ground(), a.iter().copied()).unwrap(),
            Subset::from_indices(f.ground(), b.iter().copied()).unwrap(),
            Subset::from_indices(f.ground(), c.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    // ── ccmi ──────────────────────────────────────────────────────────

    #[test]
    fn ccmi_modular_disjoint_is_zero() {
        let f = zoo::build_modular(ModularWeights::new(vec![1.0, 2.0, 3.0, 4.0], 0.0)).unwrap();
        let q = sets(&f, &[0], &[2, 3], &[]);
        assert_eq!(ccmi(&f, &q).unwrap(), 0.0);
    }

    #[test]
    fn ccmi_unconditional_definition() {
        let f = zoo::instances::random_facility_location(6, 3);
        let q = sets(&f, &[0, 1], &[3, 4], &[]);
        let direct = ccmi(&f, &q).unwrap();
        let fa = f.evaluate(&q.a).unwrap();
        let fb = f.evaluate(&q.b).unwrap();
        let fab = f.evaluate(&q.a.union(&q.b)).unwrap();
        assert!((direct - (fa + fb - fab - f.value_empty())).abs() < 1e-12);
    }

    #[test]
    fn ccmi_nonneg_for_polymatroids() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let f = zoo::instances::random_facility_location(8, 42);
        for _ in 0..100 {
            let a = Subset::from_mask(f.ground(), rng.gen_range(0..256));
            let b = Subset::from_mask(f.ground(), rng.gen_range(0..256));
            let c = Subset::from_mask(f.ground(), rng.gen_range(0..256));
            let q = CcmiQuery::new(a, b, c).unwrap();
            assert!(ccmi(&f, &q).unwrap() >= -1e-9);
        }
    }

    // ── fl_ccmi_closed_form ───────────────────────────────────────────

    #[test]
    fn fl_closed_form_empty_b_is_zero() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sim = zoo::instances::random_similarity(5, &mut rng);
        let f = zoo::build_facility_location(sim.clone()).unwrap();
        let q = sets(&f, &[0, 2], &[], &[4]);
        assert_eq!(fl_ccmi_closed_form(&sim, &q).unwrap(), 0.0);
    }

    #[test]
    fn fl_closed_form_b_full_c_empty_is_f_of_a() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let sim = zoo::instances::random_similarity(6, &mut rng);
        let f = zoo::build_facility_location(sim.clone()).unwrap();
        let a = Subset::from_indices(f.ground(), [1, 4]).unwrap();
        let q = CcmiQuery::new(a.clone(), Subset::full(f.ground()), Subset::empty(f.ground()))
            .unwrap();
        let closed = fl_ccmi_closed_form(&sim, &q).unwrap();
        assert!((closed - f.evaluate(&a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn fl_closed_form_equals_definitional_ccmi() {
        use rand::Rng;
        use rand::SeedableRng;
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..=8);
            let sim = zoo::instances::random_similarity(n, &mut rng);
            let f = zoo::build_facility_location(sim.clone()).unwrap();
            for _ in 0..10 {
                let m = 1u64 << n;
                let q = CcmiQuery::new(
                    Subset::from_mask(f.ground(), rng.gen_range(0..m)),
                    Subset::from_mask(f.ground(), rng.gen_range(0..m)),
                    Subset::from_mask(f.ground(), rng.gen_range(0..m)),
                )
                .unwrap();
                let closed = fl_ccmi_closed_form(&sim, &q).unwrap();
                let definitional = ccmi(&f, &q).unwrap();
                assert!(
                    (closed - definitional).abs() < 1e-9,
                    "seed {seed}: closed {closed} vs ccmi {definitional}"
                );
            }
        }
    }

    // ── symmetric handle ──────────────────────────────────────────────

    #[test]
    fn symmetric_ccmi_is_symmetric_and_submodular() {
        use crate::analysis::{check_submodular, CheckMode};
        let f = zoo::instances::random_facility_location(7, 9);
        let g = symmetric_ccmi_handle(&f);
        for mask in 0u64..128 {
            let a = Subset::from_mask(g.ground(), mask);
            let lhs = g.evaluate(&a).unwrap();
            let rhs = g.evaluate(&a.complement()).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        assert!(check_submodular(&g, CheckMode::Exhaustive).unwrap().verdict);
    }

    // ── q_cluster ─────────────────────────────────────────────────────

    fn two_component_polymatroid() -> SetFunctionHandle {
        // half-incident-edge-mass of a graph with components {0,1,2}, {3,4}
        let edges: Vec<(usize, usize, f64)> =
            vec![(0, 1, 1.0), (1, 2, 2.0), (0, 2, 0.5), (3, 4, 1.5)];
        let spec = zoo::FeatureBasedSpec {
            per_feature_weights: edges
                .iter()
                .map(|&(i, j, w)| {
                    let mut row = vec![0.0; 5];
                    row[i] = w;
                    row[j] = w;
                    row
                })
                .collect(),
            per_feature_concave: edges
                .iter()
                .map(|&(_, _, w)| zoo::ConcaveSpec::MinCap { c: w })
                .collect(),
            bias_modular: ModularWeights::zeros(5),
        };
        zoo::build_feature_based(spec).unwrap()
    }

    #[test]
    fn q_cluster_k1_is_single_leaf() {
        let f = two_component_polymatroid();
        let tree = q_cluster(&f, 1).unwrap();
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].cardinality(), 5);
    }

    #[test]
    fn q_cluster_two_components_split_first() {
        let f = two_component_polymatroid();
        let tree = q_cluster(&f, 2).unwrap();
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 2);
        assert_eq!(leaves[0].indices(), vec![0, 1, 2]);
        assert_eq!(leaves[1].indices(), vec![3, 4]);
        assert!(tree.node(tree.root()).split_value.unwrap().abs() < 1e-9);
    }

    #[test]
    fn q_cluster_k_n_gives_singletons() {
        let f = two_component_polymatroid();
        let tree = q_cluster(&f, 5).unwrap();
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 5);
        for (i, leaf) in leaves.iter().enumerate() {
            assert_eq!(leaf.indices(), vec![i]);
        }
    }

    #[test]
    fn q_cluster_rejects_bad_k() {
        let f = two_component_polymatroid();
        assert!(q_cluster(&f, 0).is_err());
        assert!(q_cluster(&f, 6).is_err());
    }

    // ── label_strength ────────────────────────────────────────────────

    fn graph_mass_polymatroid(edges: &[(usize, usize, f64)], n: usize) -> SetFunctionHandle {
        let spec = zoo::FeatureBasedSpec {
            per_feature_weights: edges
                .iter()
                .map(|&(i, j, w)| {
                    let mut row = vec![0.0; n];
                    row[i] = w;
                    row[j] = w;
                    row
                })
                .collect(),
            per_feature_concave: edges
                .iter()
                .map(|&(_, _, w)| zoo::ConcaveSpec::MinCap { c: w })
                .collect(),
            bias_modular: ModularWeights::zeros(n),
        };
        zoo::build_feature_based(spec).unwrap()
    }

    #[test]
    fn strength_of_disconnected_pair_is_zero() {
        // two isolated nodes: I_f is identically zero
        let f = graph_mass_polymatroid(&[], 2);
        let l = Subset::from_indices(f.ground(), [0]).unwrap();
        let report = label_strength(&f, &l).unwrap();
        assert_eq!(report.psi, 0.0);
        assert_eq!(report.witness, vec![1]);
    }

    #[test]
    fn strength_on_unit_path() {
        // path 0-1-2 with unit weights, L = {1}:
        // candidates {0}: 1, {2}: 1, {0,2}: 2/2 = 1, so psi = 1
        let f = graph_mass_polymatroid(&[(0, 1, 1.0), (1, 2, 1.0)], 3);
        let l = Subset::from_indices(f.ground(), [1]).unwrap();
        let report = label_strength(&f, &l).unwrap();
        assert!((report.psi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strength_of_full_l_is_infinite() {
        let f = graph_mass_polymatroid(&[(0, 1, 1.0)], 2);
        let report = label_strength(&f, &Subset::full(f.ground())).unwrap();
        assert!(report.psi.is_infinite());
        assert!(report.witness.is_empty());
    }

    // ── smoothest_completion ──────────────────────────────────────────

    #[test]
    fn completion_with_all_labeled_is_identity() {
        let f = graph_mass_polymatroid(&[(0, 1, 1.0)], 2);
        let labeled = Subset::full(f.ground());
        let ones = Subset::from_indices(f.ground(), [1]).unwrap();
        let y = smoothest_completion(&f, &labeled, &ones).unwrap();
        assert_eq!(y.indices(), vec![1]);
    }

    #[test]
    fn completion_labels_components_by_anchor() {
        // components {0,1} and {2,3}; anchors: 0 labeled 1, 2 labeled 0
        let f = graph_mass_polymatroid(&[(0, 1, 1.0), (2, 3, 1.0)], 4);
        let labeled = Subset::from_indices(f.ground(), [0, 2]).unwrap();
        let ones = Subset::from_indices(f.ground(), [0]).unwrap();
        let y = smoothest_completion(&f, &labeled, &ones).unwrap();
        assert_eq!(y.indices(), vec![0, 1]);
    }

    #[test]
    fn completion_beats_random_completions() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let edges: Vec<(usize, usize, f64)> = vec![
            (0, 1, 0.7),
            (1, 2, 1.3),
            (2, 3, 0.4),
            (3, 4, 2.0),
            (0, 4, 0.9),
            (1, 4, 0.2),
        ];
        let f = graph_mass_polymatroid(&edges, 5);
        let sym = symmetric_ccmi_handle(&f);
        let labeled = Subset::from_indices(f.ground(), [0, 3]).unwrap();
        let ones = Subset::from_indices(f.ground(), [0]).unwrap();
        let y = smoothest_completion(&f, &labeled, &ones).unwrap();
        let smooth = sym.evaluate(&y).unwrap();
        for _ in 0..100 {
            let mut cand = ones.clone();
            for v in labeled.complement().iter() {
                if rng.gen_bool(0.5) {
                    cand = cand.with(v);
                }
            }
            assert!(smooth <= sym.evaluate(&cand).unwrap() + 1e-12);
        }
    }

    #[test]
    fn completion_rejects_anchor_outside_labeled() {
        let f = graph_mass_polymatroid(&[(0, 1, 1.0)], 3);
        let labeled = Subset::from_indices(f.ground(), [0]).unwrap();
        let ones = Subset::from_indices(f.ground(), [1]).unwrap();
        assert!(smoothest_completion(&f, &labeled, &ones).is_err());
    }
}
