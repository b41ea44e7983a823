//! Ground sets and fixed-width bit-vector subsets.
//!
//! Every set function in this crate is defined over a [`GroundSet`] of `n`
//! elements identified by indices `0..n`. Subsets are fixed-width bit
//! vectors sized at construction; the ground set itself is immutable.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SubmodError};

const WORD_BITS: usize = 64;

/// A finite ground set of `n` elements, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    /// Ground set `{0, 1, .., n-1}` with index labels.
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(SubmodError::InvalidSpec(
                "ground set must have at least one element".into(),
            ));
        }
        Ok(Arc::new(GroundSet {
            size: n,
            labels: None,
        }))
    }

    /// Ground set with distinct element names.
    pub fn with_labels(labels: Vec<String>) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(SubmodError::InvalidSpec(
                "ground set must have at least one element".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SubmodError::InvalidSpec(format!(
                    "duplicate element label {l:?}"
                )));
            }
        }
        Ok(Arc::new(GroundSet {
            size: labels.len(),
            labels: Some(labels),
        }))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Label for an element (its index rendered as text when unlabelled).
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(ls) => ls[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Checks that two ground sets are interchangeable (same size and labels).
pub fn same_ground(a: &GroundSet, b: &GroundSet) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(SubmodError::GroundMismatch {
            expected: a.size(),
            actual: b.size(),
        })
    }
}

/// A subset of a ground set, stored as a fixed-width bit vector.
#[derive(Clone)]
pub struct Subset {
    ground: Arc<GroundSet>,
    words: Vec<u64>,
}

impl Subset {
    pub fn empty(ground: &Arc<GroundSet>) -> Self {
        let nwords = ground.size().div_ceil(WORD_BITS);
        Subset {
            ground: Arc::clone(ground),
            words: vec![0; nwords],
        }
    }

    pub fn full(ground: &Arc<GroundSet>) -> Self {
        let mut s = Self::empty(ground);
        for v in 0..ground.size() {
            s.insert_unchecked(v);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        ground: &Arc<GroundSet>,
        indices: I,
    ) -> Result<Self> {
        let mut s = Self::empty(ground);
        for v in indices {
            s.insert(v)?;
        }
        Ok(s)
    }

    /// Builds the subset whose bit `i` is bit `i` of `mask`. Only valid for
    /// ground sets of at most 64 elements; handy for exhaustive sweeps.
    pub fn from_mask(ground: &Arc<GroundSet>, mask: u64) -> Self {
        debug_assert!(ground.size() <= 64);
        let nwords = ground.size().div_ceil(WORD_BITS);
        let mut words = vec![0u64; nwords];
        words[0] = mask;
        Subset {
            ground: Arc::clone(ground),
            words,
        }
    }

    /// The bit mask of this subset; only valid when the ground set has at
    /// most 64 elements.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.ground.size() <= 64);
        self.words[0]
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn size_n(&self) -> usize {
        self.ground.size()
    }

    pub fn contains(&self, v: usize) -> bool {
        if v >= self.ground.size() {
            return false;
        }
        self.words[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) -> Result<()> {
        if v >= self.ground.size() {
            return Err(SubmodError::IndexOutOfRange {
                index: v,
                size: self.ground.size(),
            });
        }
        self.insert_unchecked(v);
        Ok(())
    }

    fn insert_unchecked(&mut self, v: usize) {
        self.words[v / WORD_BITS] |= 1 << (v % WORD_BITS);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.ground.size() {
            self.words[v / WORD_BITS] &= !(1 << (v % WORD_BITS));
        }
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ∪ {v}` as a new subset.
    pub fn with(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.insert_unchecked(v);
        s
    }

    /// `self ∖ {v}` as a new subset.
    pub fn without(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        for (w, o) in s.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        s
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        for (w, o) in s.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        s
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        for (w, o) in s.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        s
    }

    pub fn complement(&self) -> Subset {
        Subset::full(&self.ground).difference(self)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(w, o)| w & !o == 0)
    }

    pub fn is_disjoint_from(&self, other: &Subset) -> bool {
        self.words.iter().zip(&other.words).all(|(w, o)| w & o == 0)
    }

    /// Member indices in increasing order, walking set bits word by word.
    pub fn iter(&self) -> SubsetIter<'_> {
        SubsetIter {
            words: &self.words,
            word_index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// 0/1 characteristic vector.
    pub fn characteristic(&self) -> Vec<f64> {
        (0..self.ground.size())
            .map(|v| if self.contains(v) { 1.0 } else { 0.0 })
            .collect()
    }
}

pub struct SubsetIter<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for SubsetIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_index += 1;
            self.current = *self.words.get(self.word_index)?;
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_index * WORD_BITS + bit)
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.words == other.words
    }
}

impl Eq for Subset {}

impl std::hash::Hash for Subset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.ground.label(v))?;
        }
        write!(f, "}}")
    }
}
