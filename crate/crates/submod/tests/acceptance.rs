//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the evidence counts. Run with `--nocapture` to see the lines.
//!
//! Every tolerance is pinned in the assertions, not configurable.

#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use submod::analysis::{
    brute_force_opt, check_submodular, log_partition_bounds, semigradient_bounds, shapley_exact,
    shapley_sampled, total_curvature, BruteConstraint, CheckMode, Sense,
};
use submod::function::full_table;
use submod::ground::GroundSet;
use submod::info::{ccmi, fl_ccmi_closed_form, label_strength, smoothest_completion,
    symmetric_ccmi_handle, CcmiQuery};
use submod::maximize::{
    greedy_cardinality, random_greedy_unconstrained, submodular_set_cover, CardinalityConstraint,
    GreedyOptions,
};
use submod::minimize::{base_vertex, lovasz_extension, min_norm_point, queyranne_minimize};
use submod::norms::{check_norm_axioms, norm_eval, NormHandle};
use submod::zoo::{self, instances};
use submod::{derive_transform, Flags, ModularWeights, SetFunctionHandle, Subset, Transform};

fn monotone_instance(i: u64) -> (SetFunctionHandle, &'static str) {
    let n = 6 + (i as usize % 7); // 6..=12
    match i % 3 {
        0 => (instances::random_facility_location(n, i), "facility-location"),
        1 => (instances::random_feature_based(n, i), "feature-based"),
        _ => (instances::random_coverage(n, i), "coverage"),
    }
}

/// Criterion 1: greedy value >= (1 - (1 - 1/k)^k) * OPT - 1e-9 on 100
/// random monotone instances, OPT by brute force.
#[test]
fn c01_greedy_guarantee() {
    for i in 0..100u64 {
        let (f, family) = monotone_instance(i);
        let k = 2 + (i as usize % 3); // 2..=4
        let greedy = greedy_cardinality(
            &f,
            CardinalityConstraint { k },
            &GreedyOptions::default(),
        )
        .unwrap();
        let (_, opt) =
            brute_force_opt(&f, &BruteConstraint::CardinalityAtMost(k), Sense::Max).unwrap();
        let ratio = 1.0 - (1.0 - 1.0 / k as f64).powi(k as i32);
        assert!(
            greedy.value >= ratio * opt - 1e-9,
            "instance {i} ({family}, k={k}): greedy {} < {ratio} * OPT {opt}",
            greedy.value
        );
    }
    println!("criterion 1 (greedy 1-1/e guarantee): PASS on 100/100 instances");
}

/// Criterion 2: the curvature-refined bound (1/κ)(1 - e^{-κ}) * OPT holds
/// on the same sweep.
#[test]
fn c02_curvature_refined_guarantee() {
    for i in 0..100u64 {
        let (f, family) = monotone_instance(i);
        let k = 2 + (i as usize % 3);
        let greedy = greedy_cardinality(
            &f,
            CardinalityConstraint { k },
            &GreedyOptions::default(),
        )
        .unwrap();
        let (_, opt) =
            brute_force_opt(&f, &BruteConstraint::CardinalityAtMost(k), Sense::Max).unwrap();
        let curvature = total_curvature(&f).unwrap();
        assert!(
            greedy.value >= curvature.greedy_bound * opt - 1e-9,
            "instance {i} ({family}, k={k}): greedy {} < bound {} * OPT {opt} (kappa {})",
            greedy.value,
            curvature.greedy_bound,
            curvature.kappa
        );
    }
    println!("criterion 2 (curvature-refined guarantee): PASS on 100/100 instances");
}

/// Smallest set reaching valuation `alpha`, by increasing cardinality.
fn smallest_cover_size(f: &SetFunctionHandle, alpha: f64) -> usize {
    let n = f.size_n();
    let table = full_table(f, 10).unwrap();
    for size in 0..=n {
        let mut best: Option<u64> = None;
        for mask in 0u64..1 << n {
            if mask.count_ones() as usize == size && table[mask as usize] >= alpha - 1e-9 {
                best = Some(mask);
                break;
            }
        }
        if best.is_some() {
            return size;
        }
    }
    n
}

/// Criterion 3: greedy cover size obeys the run-computed Wolsey factor
/// against the brute-force minimum cover on 50 instances.
#[test]
fn c03_wolsey_set_cover_bound() {
    for i in 0..50u64 {
        let n = 6 + (i as usize % 5); // 6..=10
        let f = instances::random_set_cover(n, i);
        let alpha = f.value_full();
        let run = submodular_set_cover(&f, alpha).unwrap();
        assert!(run.value >= alpha - 1e-9, "instance {i} missed the target");
        let factor = run.certificate.wolsey_size_factor.unwrap();
        let optimum = smallest_cover_size(&f, alpha);
        assert!(
            run.order.len() as f64 <= factor * optimum as f64 + 1e-9,
            "instance {i}: |greedy| {} > {factor} * |opt| {optimum}",
            run.order.len()
        );
    }
    println!("criterion 3 (Wolsey set-cover bound): PASS on 50/50 instances");
}

fn random_submodular_mixture(i: u64) -> SetFunctionHandle {
    let n = 6 + (i as usize % 7); // 6..=12
    let mut rng = ChaCha8Rng::seed_from_u64(i ^ 0x51f7);
    let polymatroid = match i % 3 {
        0 => instances::random_facility_location(n, i),
        1 => instances::random_coverage(n, i),
        _ => instances::random_feature_based(n, i),
    };
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..0.5)).collect();
    let signed = zoo::build_modular(ModularWeights::new(weights, 0.0)).unwrap();
    derive_transform(
        &polymatroid,
        Transform::Mixture(vec![(1.0, polymatroid.clone()), (1.0, signed)]),
    )
    .unwrap()
}

/// Criterion 4: the minimum-norm point recovers the exhaustive minimum
/// within 1e-6 with duality gap at most 1e-5, on 100 instances.
#[test]
fn c04_min_norm_point_exactness() {
    for i in 0..100u64 {
        let f = random_submodular_mixture(i);
        let cert = min_norm_point(&f, 1e-9).unwrap();
        let (_, brute) = brute_force_opt(&f, &BruteConstraint::Unconstrained, Sense::Min).unwrap();
        assert!(
            (cert.min_value - brute).abs() <= 1e-6,
            "instance {i}: min-norm {} vs brute {brute}",
            cert.min_value
        );
        let gap = cert.duality_gap.unwrap();
        assert!(gap <= 1e-5, "instance {i}: duality gap {gap}");
        assert!(gap >= -1e-6, "instance {i}: negative gap {gap}");
    }
    println!("criterion 4 (min-norm SFM exactness): PASS on 100/100 instances");
}

/// Criterion 5: Queyranne equals brute force over proper subsets on 50
/// symmetric instances, and wall time on a 10 -> 40 sweep fits a log-log
/// slope of at most 3.5.
#[test]
fn c05_queyranne_correctness_and_cubic_runtime() {
    for i in 0..50u64 {
        let n = 6 + (i as usize % 5); // 6..=10
        let f = instances::random_symmetric_graph_cut(n, i);
        let cert = queyranne_minimize(&f).unwrap();
        let (_, brute) =
            brute_force_opt(&f, &BruteConstraint::ProperNonempty, Sense::Min).unwrap();
        assert!(
            (cert.min_value - brute).abs() <= 1e-9,
            "instance {i}: {} vs {brute}",
            cert.min_value
        );
    }

    // O(1)-oracle symmetric function so wall time tracks the algorithm,
    // not the oracle: f(A) = min(|A|, n - |A|)
    let timed = |n: usize| -> f64 {
        let ground = GroundSet::new(n).unwrap();
        let f = SetFunctionHandle::new(
            ground,
            Flags {
                claims_symmetric: true,
                claims_normalized: true,
                claims_nonneg: true,
                claims_monotone: false,
            },
            move |a: &Subset| {
                let c = a.cardinality();
                c.min(n - c) as f64
            },
        );
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let start = Instant::now();
            let cert = queyranne_minimize(&f).unwrap();
            let elapsed = start.elapsed().as_secs_f64();
            assert!((cert.min_value - 1.0).abs() < 1e-12);
            best = best.min(elapsed);
        }
        best.max(1e-9)
    };
    let sizes = [10usize, 20, 40];
    let times: Vec<f64> = sizes.iter().map(|&n| timed(n)).collect();
    // least-squares slope of log(time) against log(n)
    let logs: Vec<(f64, f64)> = sizes
        .iter()
        .zip(&times)
        .map(|(&n, &t)| ((n as f64).ln(), t.ln()))
        .collect();
    let mean_x: f64 = logs.iter().map(|(x, _)| x).sum::<f64>() / logs.len() as f64;
    let mean_y: f64 = logs.iter().map(|(_, y)| y).sum::<f64>() / logs.len() as f64;
    let slope: f64 = logs.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum::<f64>()
        / logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum::<f64>();
    assert!(
        slope <= 3.5,
        "runtime slope {slope:.2} exceeds 3.5 (times {times:?})"
    );
    println!(
        "criterion 5 (Queyranne correctness + cubic runtime): PASS on 50/50 instances, slope {slope:.2}"
    );
}

/// Criterion 6: vertex tightness is exact on all 2^n vertices, convexity
/// holds on 200 sampled triples per function, and the greedy base vertex
/// attains the extension value within 1e-9.
#[test]
fn c06_lovasz_extension_properties() {
    let functions: Vec<SetFunctionHandle> = vec![
        instances::random_facility_location(9, 1),
        instances::random_coverage(10, 2),
        instances::random_feature_based(8, 3),
        instances::random_set_cover(9, 4),
        instances::random_symmetric_graph_cut(8, 5),
    ];
    let mut vertices_checked = 0u64;
    for (fi, f) in functions.iter().enumerate() {
        let n = f.size_n();
        for mask in 0u64..1 << n {
            let s = Subset::from_mask(f.ground(), mask);
            let ext = lovasz_extension(f, &s.characteristic()).unwrap();
            assert!(
                ext.value == f.evaluate(&s).unwrap(),
                "function {fi} mask {mask}: tightness not exact"
            );
            vertices_checked += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(fi as u64 + 600);
        for _ in 0..200 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let theta: f64 = rng.gen_range(0.0..1.0);
            let mix: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| theta * a + (1.0 - theta) * b)
                .collect();
            let fx = lovasz_extension(f, &x).unwrap().value;
            let fy = lovasz_extension(f, &y).unwrap().value;
            let fmix = lovasz_extension(f, &mix).unwrap().value;
            assert!(fmix <= theta * fx + (1.0 - theta) * fy + 1e-9);

            let ext = lovasz_extension(f, &x).unwrap();
            let vertex = base_vertex(f, &ext.chain).unwrap();
            let inner: f64 = x.iter().zip(&vertex.point).map(|(a, b)| a * b).sum();
            assert!((inner - ext.value).abs() <= 1e-9);
        }
    }
    println!(
        "criterion 6 (Lovasz extension tightness/convexity/duality): PASS over {vertices_checked} vertices + 1000 triples"
    );
}

/// Criterion 7: every zoo instance passes the exhaustive four-points
/// check; planted |A|^2 instances fail with replayable witnesses.
#[test]
fn c07_four_points_checker() {
    let mut passed = 0u64;
    for seed in 0..10u64 {
        let n = 5 + (seed as usize % 4); // 5..=8
        let family: Vec<SetFunctionHandle> = vec![
            instances::random_facility_location(n, seed),
            instances::random_feature_based(n, seed),
            instances::random_coverage(n, seed),
            instances::random_set_cover(n, seed),
            instances::random_symmetric_graph_cut(n, seed),
            instances::random_log_det(n, seed),
        ];
        for f in family {
            assert!(check_submodular(&f, CheckMode::Exhaustive).unwrap().verdict);
            passed += 1;
        }
    }
    let dsf = zoo::build_dsf(zoo::dsf_counterexample_spec()).unwrap();
    assert!(check_submodular(&dsf, CheckMode::Exhaustive).unwrap().verdict);
    passed += 1;

    // planted supermodular failures with replayable witnesses
    for n in [3usize, 5, 7] {
        let g = GroundSet::new(n).unwrap();
        let f = SetFunctionHandle::new(g, Flags::default(), |a: &Subset| {
            (a.cardinality() as f64).powi(2)
        });
        let report = check_submodular(&f, CheckMode::Exhaustive).unwrap();
        assert!(!report.verdict);
        for witness in &report.violations {
            let s = Subset::from_indices(f.ground(), witness.witness_sets[0].iter().copied())
                .unwrap();
            let x = witness.witness_elements[0];
            let w = witness.witness_elements[1];
            let lhs = f.marginal_gain(x, &s).unwrap();
            let rhs = f.marginal_gain(x, &s.with(w)).unwrap();
            assert!((lhs - witness.lhs).abs() < 1e-12);
            assert!((rhs - witness.rhs).abs() < 1e-12);
            assert!(rhs - lhs > 1e-9, "witness does not replay");
        }
    }
    println!("criterion 7 (four-points checker): PASS on {passed} zoo instances + planted failures");
}

/// Criterion 8: the modular sandwich holds on every subset with equality
/// at the anchor (50 instances), and log-partition bounds bracket the
/// enumerated value.
#[test]
fn c08_semigradient_sandwich_and_partition_bounds() {
    for i in 0..50u64 {
        let n = 6 + (i as usize % 5); // 6..=10
        let f = match i % 3 {
            0 => instances::random_facility_location(n, i),
            1 => instances::random_coverage(n, i),
            _ => instances::random_feature_based(n, i),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(i + 800);
        let anchor = Subset::from_mask(f.ground(), rng.gen_range(0..1 << n));
        let pair = semigradient_bounds(&f, &anchor, i).unwrap();
        let f_anchor = f.evaluate(&anchor).unwrap();
        assert!((pair.lower.value(&anchor) - f_anchor).abs() <= 1e-9);
        assert!((pair.upper_union.value(&anchor) - f_anchor).abs() <= 1e-9);
        assert!((pair.upper_intersection.value(&anchor) - f_anchor).abs() <= 1e-9);
        for mask in 0u64..1 << n {
            let x = Subset::from_mask(f.ground(), mask);
            let fx = f.evaluate(&x).unwrap();
            assert!(pair.lower.value(&x) <= fx + 1e-9, "instance {i} mask {mask}");
            let upper = pair.upper_union.value(&x).min(pair.upper_intersection.value(&x));
            assert!(upper >= fx - 1e-9, "instance {i} mask {mask}");
        }
    }
    for i in 0..10u64 {
        let n = 8 + (i as usize % 5); // 8..=12
        let f = instances::random_coverage(n, i + 900);
        let mut rng = ChaCha8Rng::seed_from_u64(i + 901);
        let anchor = Subset::from_mask(f.ground(), rng.gen_range(0..1 << n));
        let bounds = log_partition_bounds(&f, &anchor).unwrap();
        let exact = bounds.exact.unwrap();
        assert!(bounds.log_lower <= exact + 1e-6);
        assert!(exact <= bounds.log_upper + 1e-6);
    }
    println!("criterion 8 (semigradient sandwich + log-partition bounds): PASS on 50 + 10 instances");
}

/// Criterion 9: the facility-location CCMI closed form equals the
/// definitional CCMI within 1e-9 on 200 random queries, and CCMI stays
/// non-negative for polymatroid zoo members.
#[test]
fn c09_ccmi_closed_form_and_nonnegativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x90);
    for i in 0..200u64 {
        let n = 3 + (rng.gen_range(0..8usize)); // 3..=10
        let sim = instances::random_similarity(n, &mut rng);
        let f = zoo::build_facility_location(sim.clone()).unwrap();
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
            (closed - definitional).abs() <= 1e-9,
            "query {i}: {closed} vs {definitional}"
        );
    }
    for seed in 0..5u64 {
        let polymatroids: Vec<SetFunctionHandle> = vec![
            instances::random_facility_location(8, seed),
            instances::random_coverage(8, seed),
            instances::random_feature_based(8, seed),
            instances::random_set_cover(8, seed),
        ];
        for f in polymatroids {
            for _ in 0..50 {
                let q = CcmiQuery::new(
                    Subset::from_mask(f.ground(), rng.gen_range(0..256)),
                    Subset::from_mask(f.ground(), rng.gen_range(0..256)),
                    Subset::from_mask(f.ground(), rng.gen_range(0..256)),
                )
                .unwrap();
                assert!(ccmi(&f, &q).unwrap() >= -1e-9);
            }
        }
    }
    println!("criterion 9 (CCMI closed form + non-negativity): PASS on 200 + 1000 queries");
}

fn nonneg_nonmonotone_log_det(seed: u64, n: usize) -> Option<SetFunctionHandle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let mut m = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let off = rng.gen_range(-1.1..1.1);
                m[i][j] = off;
                m[j][i] = off;
            }
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = rng.gen_range(2.2..4.5);
        }
        let Ok(spec) = zoo::LogDetSpec::new(m) else {
            continue;
        };
        let f = zoo::build_log_det(spec).unwrap();
        let table = full_table(&f, 12).unwrap();
        let nonneg = table.iter().all(|&v| v >= -1e-9);
        if !nonneg {
            continue;
        }
        // non-monotone: some single-element gain is negative
        let mut nonmono = false;
        'outer: for s in 0u64..1 << n {
            for v in 0..n {
                if s >> v & 1 == 0 && table[(s | 1 << v) as usize] < table[s as usize] - 1e-9 {
                    nonmono = true;
                    break 'outer;
                }
            }
        }
        if nonmono {
            return Some(f);
        }
    }
    None
}

/// Criterion 10: randomized bidirectional greedy averages at least
/// 0.45 * OPT over 200 seeds on 30 non-monotone instances.
#[test]
fn c10_bidirectional_greedy_expected_half() {
    let mut instances_used = 0;
    let mut check = |f: &SetFunctionHandle, label: &str| {
        let (_, opt) = brute_force_opt(f, &BruteConstraint::Unconstrained, Sense::Max).unwrap();
        assert!(opt > 0.0, "{label}: trivial optimum");
        let mean: f64 = (0..200)
            .map(|s| random_greedy_unconstrained(f, s).unwrap().value)
            .sum::<f64>()
            / 200.0;
        assert!(
            mean >= 0.45 * opt - 1e-9,
            "{label}: mean {mean} < 0.45 * OPT {opt}"
        );
        instances_used += 1;
    };
    for i in 0..20u64 {
        let n = 6 + (i as usize % 7); // 6..=12
        check(&instances::random_symmetric_graph_cut(n, i), &format!("cut {i}"));
    }
    let mut found = 0;
    let mut seed = 0u64;
    while found < 10 && seed < 200 {
        let n = 6 + (seed as usize % 3); // 6..=8
        if let Some(f) = nonneg_nonmonotone_log_det(seed, n) {
            check(&f, &format!("log-det {seed}"));
            found += 1;
        }
        seed += 1;
    }
    assert_eq!(found, 10, "could not build 10 non-monotone log-det instances");
    println!("criterion 10 (bidirectional greedy >= 0.45 OPT): PASS on {instances_used} instances");
}

/// Half-incident-edge-mass polymatroid of a weighted graph; its symmetric
/// CCMI instantiation is exactly the weighted cut.
fn graph_polymatroid(edges: &[(usize, usize, f64)], n: usize) -> SetFunctionHandle {
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

/// Criterion 11: the label-recovery bound
/// `|y - y'|^2 <= 2 I_f(V(y)) / Psi(L) + 1e-9` holds with exhaustive
/// smoothest completion on 30 random weighted graphs.
#[test]
fn c11_label_recovery_bound() {
    for i in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(i + 0x11);
        let n = 5 + (i as usize % 6); // 5..=10
        // random connected graph: a random spanning tree plus extras
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.push((u, v, rng.gen_range(0.2..2.0)));
        }
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(0.25) {
                    edges.push((u, v, rng.gen_range(0.2..2.0)));
                }
            }
        }
        let f = graph_polymatroid(&edges, n);
        let sym = symmetric_ccmi_handle(&f);

        // true labeling
        let mut truth = Subset::empty(f.ground());
        for v in 0..n {
            if rng.gen_bool(0.5) {
                truth = truth.with(v);
            }
        }

        // L maximizes Psi over singletons and pairs
        let mut best_l: Option<(f64, Subset)> = None;
        let mut candidates: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        for u in 0..n {
            for v in (u + 1)..n {
                candidates.push(vec![u, v]);
            }
        }
        for ids in candidates {
            let l = Subset::from_indices(f.ground(), ids.iter().copied()).unwrap();
            let report = label_strength(&f, &l).unwrap();
            if best_l.as_ref().is_none_or(|(p, _)| report.psi > *p) {
                best_l = Some((report.psi, l));
            }
        }
        let (psi, l) = best_l.unwrap();
        assert!(psi > 0.0, "graph {i} is disconnected");

        let anchor = truth.intersection(&l);
        let completed = smoothest_completion(&f, &l, &anchor).unwrap();
        let hamming = completed.difference(&truth).cardinality()
            + truth.difference(&completed).cardinality();
        let smoothness = sym.evaluate(&truth).unwrap();
        let bound = 2.0 * smoothness / psi + 1e-9;
        assert!(
            (hamming as f64) <= bound,
            "graph {i}: |y - y'|^2 = {hamming} > {bound}"
        );
    }
    println!("criterion 11 (label-recovery bound): PASS on 30/30 graphs");
}

/// Criterion 12: 1000 seeded axiom trials pass for 10 norm handles, and a
/// planted trivial generator is rejected at construction.
#[test]
fn c12_norm_axioms() {
    for seed in 0..10u64 {
        let n = 4 + (seed as usize % 5); // 4..=8
        let f = match seed % 2 {
            0 => instances::random_facility_location(n, seed),
            _ => {
                // set cover where element v covers its own concept, so
                // every singleton value is strictly positive
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut covers: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
                for _ in 0..n {
                    let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                    if !members.is_empty() {
                        covers.push(members);
                    }
                }
                zoo::build_coverage(zoo::CoverageSpec::set_cover(n, &covers).unwrap()).unwrap()
            }
        };
        let h = NormHandle::new(f).unwrap();
        let report = check_norm_axioms(&h, 1000, seed).unwrap();
        assert!(
            report.verdict,
            "handle {seed}: {:?}",
            report.violations.first()
        );
        // zero vector sanity
        assert_eq!(norm_eval(&h, &vec![0.0; n]).unwrap(), 0.0);
    }
    // planted f(v0) = 0
    let trivial = zoo::build_modular(ModularWeights::new(vec![1.0, 0.0, 2.0], 0.0)).unwrap();
    assert!(NormHandle::new(trivial).is_err());
    println!("criterion 12 (norm axioms): PASS on 10 handles x 1000 trials + rejection");
}

/// Criterion 13: exact Shapley efficiency within 1e-9 (n <= 8) and the
/// sampled estimator within three standard errors of exact.
#[test]
fn c13_shapley_efficiency_and_sampling() {
    for seed in 0..10u64 {
        let n = 5 + (seed as usize % 4); // 5..=8
        let f = match seed % 3 {
            0 => instances::random_facility_location(n, seed),
            1 => instances::random_coverage(n, seed),
            _ => instances::random_symmetric_graph_cut(n, seed),
        };
        let phi = shapley_exact(&f).unwrap();
        let total: f64 = phi.iter().sum();
        let expect = f.value_full() - f.value_empty();
        assert!(
            (total - expect).abs() <= 1e-9,
            "seed {seed}: efficiency gap {}",
            (total - expect).abs()
        );
    }
    let f = instances::random_facility_location(8, 77);
    let exact = shapley_exact(&f).unwrap();
    let sample = shapley_sampled(&f, 100_000, 7).unwrap();
    for v in 0..8 {
        let dev = (sample.values[v] - exact[v]).abs();
        let allowance = 3.0 * sample.std_err[v] + 1e-9;
        assert!(dev <= allowance, "element {v}: |dev| {dev} > 3 SE {allowance}");
    }
    println!("criterion 13 (Shapley efficiency + sampling): PASS on 10 instances + 1e5 samples");
}
