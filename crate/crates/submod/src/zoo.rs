//! Constructors for concrete submodular function families.
//!
//! Each constructor validates its spec, then returns a [`SetFunctionHandle`]
//! with capability flags that hold by construction. Concave shapes are a
//! closed enumeration ([`ConcaveSpec`]) rather than user callables, so
//! submodularity of the concave-composed families is guaranteed rather
//! than trusted.

pub mod io;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SubmodError};
use crate::function::{Flags, ModularWeights, SetFunctionHandle};
use crate::ground::{GroundSet, Subset};

// ─── Concave shapes ──────────────────────────────────────────────────────

/// Closed enumeration of concave, nondecreasing shapes with value 0 at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConcaveSpec {
    Sqrt,
    /// `z^p` with `0 < p < 1`.
    Power { p: f64 },
    /// `ln(1 + z)`.
    Log1p,
    /// `min(z, c)` with `c >= 0`.
    MinCap { c: f64 },
    /// `1 - exp(-scale * z)` with `scale > 0`.
    OneMinusExp { scale: f64 },
}

impl ConcaveSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConcaveSpec::Power { p } if !(p.is_finite() && *p > 0.0 && *p < 1.0) => Err(SubmodError::InvalidSpec(
                format!("power exponent must be in (0,1), got {p}"),
            )),
            ConcaveSpec::MinCap { c } if !(c.is_finite() && *c >= 0.0) => Err(SubmodError::InvalidSpec(format!(
                "min cap must be non-negative, got {c}"
            ))),
            ConcaveSpec::OneMinusExp { scale } if !(scale.is_finite() && *scale > 0.0) => Err(SubmodError::InvalidSpec(
                format!("one-minus-exp scale must be positive, got {scale}"),
            )),
            _ => Ok(()),
        }
    }

    /// Applies the shape at `z >= 0`.
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            ConcaveSpec::Sqrt => z.sqrt(),
            ConcaveSpec::Power { p } => z.powf(*p),
            ConcaveSpec::Log1p => z.ln_1p(),
            ConcaveSpec::MinCap { c } => z.min(*c),
            ConcaveSpec::OneMinusExp { scale } => -(-scale * z).exp_m1(),
        }
    }
}

// ─── Modular ─────────────────────────────────────────────────────────────

/// Handle for the modular function `m(A) = c + Σ_{v in A} m_v`.
pub fn build_modular(m: ModularWeights) -> Result<SetFunctionHandle> {
    if m.is_empty() {
        return Err(SubmodError::InvalidSpec("empty weight vector".into()));
    }
    for w in &m.weights {
        if !w.is_finite() {
            return Err(SubmodError::InvalidSpec("non-finite modular weight".into()));
        }
    }
    let ground = GroundSet::new(m.len())?;
    let all_nonneg = m.weights.iter().all(|&w| w >= 0.0);
    let min_value = m.constant + m.weights.iter().map(|w| w.min(0.0)).sum::<f64>();
    let flags = Flags {
        claims_monotone: all_nonneg,
        claims_normalized: m.constant == 0.0,
        claims_symmetric: m.weights.iter().all(|&w| w == 0.0),
        claims_nonneg: min_value >= 0.0,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |a: &Subset| {
        m.value(a)
    }))
}

// ─── Feature-based ───────────────────────────────────────────────────────

/// `f(A) = Σ_u φ_u(Σ_{a in A} m_u(a)) + m_±(A)` with non-negative feature
/// weights and an arbitrary signed modular bias.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureBasedSpec {
    /// Per-feature weight rows, shape `U x n`, all entries >= 0.
    pub per_feature_weights: Vec<Vec<f64>>,
    /// Concave shape per feature, same length as `per_feature_weights`.
    pub per_feature_concave: Vec<ConcaveSpec>,
    /// Signed modular bias; use zeros for a pure polymatroid.
    pub bias_modular: ModularWeights,
}

impl FeatureBasedSpec {
    pub fn size_n(&self) -> usize {
        self.bias_modular.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.size_n();
        if n == 0 {
            return Err(SubmodError::InvalidSpec("empty ground set".into()));
        }
        if self.per_feature_weights.len() != self.per_feature_concave.len() {
            return Err(SubmodError::InvalidSpec(
                "feature weight rows and concave shapes must align".into(),
            ));
        }
        for row in &self.per_feature_weights {
            if row.len() != n {
                return Err(SubmodError::InvalidSpec(format!(
                    "feature row of length {} on ground set of size {n}",
                    row.len()
                )));
            }
            for &w in row {
                if !w.is_finite() || w < 0.0 {
                    return Err(SubmodError::InvalidSpec(format!(
                        "feature weights must be non-negative, got {w}"
                    )));
                }
            }
        }
        for c in &self.per_feature_concave {
            c.validate()?;
        }
        Ok(())
    }
}

pub fn build_feature_based(spec: FeatureBasedSpec) -> Result<SetFunctionHandle> {
    spec.validate()?;
    let ground = GroundSet::new(spec.size_n())?;
    let bias_nonneg = spec.bias_modular.weights.iter().all(|&w| w >= 0.0);
    let flags = Flags {
        claims_monotone: bias_nonneg,
        claims_normalized: spec.bias_modular.constant == 0.0,
        claims_symmetric: false,
        claims_nonneg: bias_nonneg && spec.bias_modular.constant >= 0.0,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |a: &Subset| {
        let mut total = spec.bias_modular.value(a);
        for (row, phi) in spec.per_feature_weights.iter().zip(&spec.per_feature_concave) {
            let mass: f64 = a.iter().map(|v| row[v]).sum();
            total += phi.apply(mass);
        }
        total
    }))
}

// ─── Facility location ───────────────────────────────────────────────────

/// Dense non-negative affinity matrix `sim(a, v)`, square on the ground set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    entries: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(SubmodError::InvalidSpec("empty similarity matrix".into()));
        }
        for row in &entries {
            if row.len() != n {
                return Err(SubmodError::InvalidSpec(format!(
                    "similarity matrix must be square: row of length {} in {n}x{n}",
                    row.len()
                )));
            }
            for &x in row {
                if !x.is_finite() || x < 0.0 {
                    return Err(SubmodError::InvalidSpec(format!(
                        "similarity entries must be non-negative, got {x}"
                    )));
                }
            }
        }
        Ok(SimilarityMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, a: usize, v: usize) -> f64 {
        self.entries[a][v]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }
}

/// `f(A) = Σ_{v in V} max_{a in A} sim(a, v)`, with the empty max taken as 0.
pub fn build_facility_location(sim: SimilarityMatrix) -> Result<SetFunctionHandle> {
    let n = sim.size();
    let ground = GroundSet::new(n)?;
    let flags = Flags {
        claims_monotone: true,
        claims_normalized: true,
        claims_symmetric: false,
        claims_nonneg: true,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |set: &Subset| {
        let members = set.indices();
        let mut total = 0.0;
        for v in 0..n {
            let mut best = 0.0_f64;
            for &a in &members {
                let s = sim.get(a, v);
                if s > best {
                    best = s;
                }
            }
            total += best;
        }
        total
    }))
}

// ─── Coverage ────────────────────────────────────────────────────────────

/// Probabilistic coverage: `f(X) = Σ_u ω_u (1 - Π_{v in X}(1 - P[B_{u,v}=1]))`.
///
/// A 0/1 membership matrix with unit weights reduces to plain set cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageSpec {
    /// Membership probabilities, shape `U x n`, entries in `[0, 1]`.
    pub membership_prob: Vec<Vec<f64>>,
    /// Non-negative weight per concept, length `U`.
    pub concept_weights: Vec<f64>,
}

impl CoverageSpec {
    /// Set-cover form: concept `u` is covered by element `v` iff
    /// `covers[u]` contains `v`.
    pub fn set_cover(n: usize, covers: &[Vec<usize>]) -> Result<Self> {
        let mut membership = vec![vec![0.0; n]; covers.len()];
        for (u, vs) in covers.iter().enumerate() {
            for &v in vs {
                if v >= n {
                    return Err(SubmodError::IndexOutOfRange { index: v, size: n });
                }
                membership[u][v] = 1.0;
            }
        }
        Ok(CoverageSpec {
            membership_prob: membership,
            concept_weights: vec![1.0; covers.len()],
        })
    }

    fn validate(&self) -> Result<usize> {
        if self.membership_prob.len() != self.concept_weights.len() {
            return Err(SubmodError::InvalidSpec(
                "concept weights must align with membership rows".into(),
            ));
        }
        let n = self
            .membership_prob
            .first()
            .map(|r| r.len())
            .ok_or_else(|| SubmodError::InvalidSpec("coverage needs at least one concept".into()))?;
        if n == 0 {
            return Err(SubmodError::InvalidSpec("empty ground set".into()));
        }
        for row in &self.membership_prob {
            if row.len() != n {
                return Err(SubmodError::InvalidSpec("ragged membership matrix".into()));
            }
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(SubmodError::InvalidSpec(format!(
                        "membership probability {p} outside [0, 1]"
                    )));
                }
            }
        }
        for &w in &self.concept_weights {
            if !w.is_finite() || w < 0.0 {
                return Err(SubmodError::InvalidSpec(format!(
                    "concept weight {w} must be non-negative"
                )));
            }
        }
        Ok(n)
    }
}

pub fn build_coverage(spec: CoverageSpec) -> Result<SetFunctionHandle> {
    let n = spec.validate()?;
    let ground = GroundSet::new(n)?;
    let flags = Flags {
        claims_monotone: true,
        claims_normalized: true,
        claims_symmetric: false,
        claims_nonneg: true,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |a: &Subset| {
        spec.membership_prob
            .iter()
            .zip(&spec.concept_weights)
            .map(|(row, w)| {
                let miss: f64 = a.iter().map(|v| 1.0 - row[v]).product();
                w * (1.0 - miss)
            })
            .sum()
    }))
}

// ─── Graph cut ───────────────────────────────────────────────────────────

/// Generalized graph cut
/// `f(X) = Σ_j min(C_j(X), α C_j(V)) - λ Σ_{i,j in X} w_ij`
/// with `C_j(X) = Σ_{i in X} w_ij`. Setting `λ = 1, α = 1` with a symmetric
/// weight matrix recovers the classic cut `Σ_{i in X, j not in X} w_ij`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphCutSpec {
    /// Non-negative `n x n` edge weights, zero diagonal; asymmetry allowed.
    pub edge_weights: Vec<Vec<f64>>,
    pub lambda: f64,
    /// Saturation fraction in `[0, 1]`; `α = 1` means no saturation.
    pub alpha: f64,
}

impl GraphCutSpec {
    pub fn classic(edge_weights: Vec<Vec<f64>>) -> Self {
        GraphCutSpec {
            edge_weights,
            lambda: 1.0,
            alpha: 1.0,
        }
    }

    fn validate(&self) -> Result<usize> {
        let n = self.edge_weights.len();
        if n == 0 {
            return Err(SubmodError::InvalidSpec("empty weight matrix".into()));
        }
        for (i, row) in self.edge_weights.iter().enumerate() {
            if row.len() != n {
                return Err(SubmodError::InvalidSpec("weight matrix must be square".into()));
            }
            if row[i] != 0.0 {
                return Err(SubmodError::InvalidSpec(format!(
                    "diagonal weight w[{i}][{i}] must be zero"
                )));
            }
            for &w in row {
                if !w.is_finite() || w < 0.0 {
                    return Err(SubmodError::InvalidSpec(format!(
                        "edge weights must be non-negative, got {w}"
                    )));
                }
            }
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(SubmodError::InvalidSpec(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SubmodError::InvalidSpec(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(n)
    }

    fn is_symmetric(&self) -> bool {
        let n = self.edge_weights.len();
        (0..n).all(|i| (0..n).all(|j| self.edge_weights[i][j] == self.edge_weights[j][i]))
    }
}

pub fn build_graph_cut(spec: GraphCutSpec) -> Result<SetFunctionHandle> {
    let n = spec.validate()?;
    let ground = GroundSet::new(n)?;
    let symmetric_cut = spec.lambda == 1.0 && spec.alpha == 1.0 && spec.is_symmetric();
    let flags = Flags {
        claims_monotone: spec.lambda == 0.0,
        claims_normalized: true,
        claims_symmetric: symmetric_cut,
        claims_nonneg: spec.lambda <= 1.0 && spec.alpha == 1.0,
    };
    if symmetric_cut {
        // classic cut summed over unordered pairs in a fixed order, so
        // f(X) and f(V \ X) are bit-identical
        return Ok(SetFunctionHandle::new(ground, flags, move |x: &Subset| {
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if x.contains(i) != x.contains(j) {
                        total += spec.edge_weights[i][j];
                    }
                }
            }
            total
        }));
    }
    // column mass C_j(V), fixed at construction
    let col_total: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| spec.edge_weights[i][j]).sum())
        .collect();
    Ok(SetFunctionHandle::new(ground, flags, move |x: &Subset| {
        let members = x.indices();
        let mut coverage = 0.0;
        for j in 0..n {
            let c_j: f64 = members.iter().map(|&i| spec.edge_weights[i][j]).sum();
            coverage += c_j.min(spec.alpha * col_total[j]);
        }
        let mut internal = 0.0;
        for &i in &members {
            for &j in &members {
                internal += spec.edge_weights[i][j];
            }
        }
        coverage - spec.lambda * internal
    }))
}

// ─── Log-determinant ─────────────────────────────────────────────────────

/// `f(X) = log det(M_X)` for a symmetric positive-definite `M`, `f(∅) = 0`.
#[derive(Debug, Clone)]
pub struct LogDetSpec {
    matrix: DMatrix<f64>,
}

impl LogDetSpec {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(SubmodError::InvalidSpec("empty matrix".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(SubmodError::InvalidSpec("matrix must be square".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 {
                    return Err(SubmodError::NotPositiveDefinite(format!(
                        "asymmetry at ({i}, {j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        if matrix.clone().cholesky().is_none() {
            return Err(SubmodError::NotPositiveDefinite(
                "Cholesky factorization failed".into(),
            ));
        }
        Ok(LogDetSpec { matrix })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_log_det(spec: LogDetSpec) -> Result<SetFunctionHandle> {
    let ground = GroundSet::new(spec.size())?;
    let flags = Flags {
        claims_monotone: false,
        claims_normalized: true,
        claims_symmetric: false,
        claims_nonneg: false,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |x: &Subset| {
        let idx = x.indices();
        if idx.is_empty() {
            return 0.0;
        }
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |r, c| spec.matrix[(idx[r], idx[c])]);
        match sub.cholesky() {
            // det(M_X) = prod diag(L)^2
            Some(chol) => 2.0 * (0..k).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>(),
            None => f64::NEG_INFINITY,
        }
    }))
}

// ─── Deep submodular functions ───────────────────────────────────────────

/// One unit of a DSF layer: a concave shape applied to a non-negative
/// weighted sum over the previous layer (or over ground elements for the
/// first layer).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DsfUnit {
    pub weights: Vec<f64>,
    pub concave: ConcaveSpec,
}

/// Nested concave-of-nonnegative-sums composition; strictly more expressive
/// than feature-based functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DsfSpec {
    pub size_n: usize,
    /// `layers[0]` units read the ground set; `layers[t]` units read layer `t-1`.
    pub layers: Vec<Vec<DsfUnit>>,
    /// Non-negative mixture over the last layer's units.
    pub final_mixture: Vec<f64>,
    /// Optional signed modular term added at the output.
    pub final_modular: Option<ModularWeights>,
}

impl DsfSpec {
    fn validate(&self) -> Result<()> {
        if self.size_n == 0 {
            return Err(SubmodError::InvalidSpec("empty ground set".into()));
        }
        if self.layers.is_empty() {
            return Err(SubmodError::InvalidSpec("DSF needs at least one layer".into()));
        }
        let mut prev_width = self.size_n;
        for (t, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(SubmodError::InvalidSpec(format!("layer {t} has no units")));
            }
            for unit in layer {
                if unit.weights.len() != prev_width {
                    return Err(SubmodError::InvalidSpec(format!(
                        "layer {t} unit expects {prev_width} inputs, got {}",
                        unit.weights.len()
                    )));
                }
                for &w in &unit.weights {
                    if !w.is_finite() || w < 0.0 {
                        return Err(SubmodError::InvalidSpec(format!(
                            "internal DSF weight {w} must be non-negative"
                        )));
                    }
                }
                unit.concave.validate()?;
            }
            prev_width = layer.len();
        }
        if self.final_mixture.len() != prev_width {
            return Err(SubmodError::InvalidSpec(format!(
                "final mixture expects {prev_width} inputs, got {}",
                self.final_mixture.len()
            )));
        }
        for &w in &self.final_mixture {
            if !w.is_finite() || w < 0.0 {
                return Err(SubmodError::InvalidSpec(format!(
                    "final mixture weight {w} must be non-negative"
                )));
            }
        }
        if let Some(m) = &self.final_modular {
            if m.len() != self.size_n {
                return Err(SubmodError::InvalidSpec(
                    "final modular length must match ground set".into(),
                ));
            }
        }
        Ok(())
    }
}

pub fn build_dsf(spec: DsfSpec) -> Result<SetFunctionHandle> {
    spec.validate()?;
    let ground = GroundSet::new(spec.size_n)?;
    let bias_nonneg = spec
        .final_modular
        .as_ref()
        .map(|m| m.weights.iter().all(|&w| w >= 0.0))
        .unwrap_or(true);
    let bias_constant = spec.final_modular.as_ref().map(|m| m.constant).unwrap_or(0.0);
    let flags = Flags {
        claims_monotone: bias_nonneg,
        claims_normalized: bias_constant == 0.0,
        claims_symmetric: false,
        claims_nonneg: bias_nonneg && bias_constant >= 0.0,
    };
    Ok(SetFunctionHandle::new(ground, flags, move |a: &Subset| {
        let mut activations: Vec<f64> = a.characteristic();
        for layer in &spec.layers {
            activations = layer
                .iter()
                .map(|unit| {
                    let z: f64 = unit
                        .weights
                        .iter()
                        .zip(&activations)
                        .map(|(w, x)| w * x)
                        .sum();
                    unit.concave.apply(z)
                })
                .collect();
        }
        let mut total: f64 = spec
            .final_mixture
            .iter()
            .zip(&activations)
            .map(|(w, x)| w * x)
            .sum();
        if let Some(m) = &spec.final_modular {
            total += m.value(a);
        }
        total
    }))
}

/// The six-element function
/// `min(min(|A ∩ {a,b,c,d}|, 3) + min(|A ∩ {c,d,e,f}|, 3), 5)`,
/// a two-concave-layer DSF that no feature-based function can represent.
pub fn dsf_counterexample_spec() -> DsfSpec {
    let indicator = |members: [usize; 4]| {
        let mut w = vec![0.0; 6];
        for v in members {
            w[v] = 1.0;
        }
        w
    };
    DsfSpec {
        size_n: 6,
        layers: vec![
            vec![
                DsfUnit {
                    weights: indicator([0, 1, 2, 3]),
                    concave: ConcaveSpec::MinCap { c: 3.0 },
                },
                DsfUnit {
                    weights: indicator([2, 3, 4, 5]),
                    concave: ConcaveSpec::MinCap { c: 3.0 },
                },
            ],
            vec![DsfUnit {
                weights: vec![1.0, 1.0],
                concave: ConcaveSpec::MinCap { c: 5.0 },
            }],
        ],
        final_mixture: vec![1.0],
        final_modular: None,
    }
}

// ─── ROUGE-N recall ──────────────────────────────────────────────────────

/// ROUGE-N recall as a set function over candidate sentences:
/// `f(S) = Σ_i Σ_e min(c_e(S), r_{e,i}) / Σ_i Σ_e r_{e,i}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RougeSpec {
    /// `r_{e,i}`: occurrence count of n-gram `e` in reference `i`.
    pub reference_counts: Vec<BTreeMap<String, u64>>,
    /// Per candidate sentence, its n-gram occurrence counts.
    pub candidate_counts: Vec<BTreeMap<String, u64>>,
}

impl RougeSpec {
    /// Builds counts from raw text by lowercasing and whitespace
    /// tokenization, using order-`n` n-grams joined by a space.
    pub fn from_texts(candidates: &[&str], references: &[&str], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SubmodError::InvalidSpec("n-gram order must be >= 1".into()));
        }
        let count = |text: &str| -> BTreeMap<String, u64> {
            let tokens: Vec<String> = text.split_whitespace().map(|t| t.to_lowercase()).collect();
            let mut counts = BTreeMap::new();
            if tokens.len() >= n {
                for window in tokens.windows(n) {
                    *counts.entry(window.join(" ")).or_insert(0) += 1;
                }
            }
            counts
        };
        Ok(RougeSpec {
            reference_counts: references.iter().map(|r| count(r)).collect(),
            candidate_counts: candidates.iter().map(|c| count(c)).collect(),
        })
    }

    fn denominator(&self) -> u64 {
        self.reference_counts
            .iter()
            .flat_map(|r| r.values())
            .sum()
    }
}

pub fn build_rouge_n(spec: RougeSpec) -> Result<SetFunctionHandle> {
    if spec.candidate_counts.is_empty() {
        return Err(SubmodError::InvalidSpec("no candidate sentences".into()));
    }
    let denom = spec.denominator();
    if denom == 0 {
        return Err(SubmodError::InvalidSpec(
            "reference summaries contain no n-grams".into(),
        ));
    }
    let ground = GroundSet::new(spec.candidate_counts.len())?;
    let flags = Flags {
        claims_monotone: true,
        claims_normalized: true,
        claims_symmetric: false,
        claims_nonneg: true,
    };
    let denom = denom as f64;
    Ok(SetFunctionHandle::new(ground, flags, move |s: &Subset| {
        // c_e(S) accumulated over the selected sentences
        let mut covered: BTreeMap<&str, u64> = BTreeMap::new();
        for v in s.iter() {
            for (gram, c) in &spec.candidate_counts[v] {
                *covered.entry(gram.as_str()).or_insert(0) += c;
            }
        }
        let mut score = 0u64;
        for reference in &spec.reference_counts {
            for (gram, &r) in reference {
                let c = covered.get(gram.as_str()).copied().unwrap_or(0);
                score += c.min(r);
            }
        }
        score as f64 / denom
    }))
}

// ─── Shared test instances ───────────────────────────────────────────────

/// Seeded random instances of each zoo family, used by sweeps in tests and
/// by the acceptance suite.
pub mod instances {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn random_similarity(n: usize, rng: &mut ChaCha8Rng) -> SimilarityMatrix {
        let mut entries = vec![vec![0.0; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = if i == j {
                    1.0
                } else {
                    rng.gen_range(0.0..1.0)
                };
            }
        }
        SimilarityMatrix::new(entries).unwrap()
    }

    pub fn random_facility_location(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_facility_location(random_similarity(n, &mut rng)).unwrap()
    }

    pub fn random_feature_based(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = rng.gen_range(1..=4);
        let shapes = [
            ConcaveSpec::Sqrt,
            ConcaveSpec::Log1p,
            ConcaveSpec::Power { p: 0.6 },
            ConcaveSpec::OneMinusExp { scale: 0.7 },
            ConcaveSpec::MinCap { c: 2.0 },
        ];
        let spec = FeatureBasedSpec {
            per_feature_weights: (0..features)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..2.0)).collect())
                .collect(),
            per_feature_concave: (0..features)
                .map(|_| shapes[rng.gen_range(0..shapes.len())].clone())
                .collect(),
            bias_modular: ModularWeights::zeros(n),
        };
        build_feature_based(spec).unwrap()
    }

    pub fn random_coverage(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let concepts = rng.gen_range(2..=2 * n);
        let spec = CoverageSpec {
            membership_prob: (0..concepts)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                0.0
                            } else {
                                rng.gen_range(0.0..1.0)
                            }
                        })
                        .collect()
                })
                .collect(),
            concept_weights: (0..concepts).map(|_| rng.gen_range(0.1..2.0)).collect(),
        };
        build_coverage(spec).unwrap()
    }

    /// 0/1 coverage (plain set cover) with unit concept weights.
    pub fn random_set_cover(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let universe = rng.gen_range(n..=2 * n);
        let covers: Vec<Vec<usize>> = (0..universe)
            .map(|_| {
                let mut vs: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
                if vs.is_empty() {
                    vs.push(rng.gen_range(0..n));
                }
                vs
            })
            .collect();
        // transpose: concept u is covered by the elements listing it
        let mut by_concept = vec![Vec::new(); universe];
        for (u, vs) in covers.iter().enumerate() {
            for &v in vs {
                by_concept[u].push(v);
            }
        }
        build_coverage(CoverageSpec::set_cover(n, &by_concept).unwrap()).unwrap()
    }

    pub fn random_symmetric_graph_cut(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.6) {
                    let weight = rng.gen_range(0.1..2.0);
                    w[i][j] = weight;
                    w[j][i] = weight;
                }
            }
        }
        build_graph_cut(GraphCutSpec::classic(w)).unwrap()
    }

    /// Diagonally dominated SPD matrix; all principal minors have
    /// determinant >= 1, so the log-det stays non-negative.
    pub fn random_log_det(n: usize, seed: u64) -> SetFunctionHandle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let off = rng.gen_range(-0.5..0.5);
                m[i][j] = off;
                m[j][i] = off;
            }
        }
        for i in 0..n {
            let row_mass: f64 = (0..n).filter(|&j| j != i).map(|j| m[i][j].abs()).sum();
            m[i][i] = 1.1 + row_mass + rng.gen_range(0.0..1.0);
        }
        build_log_det(LogDetSpec::new(m).unwrap()).unwrap()
    }
}
