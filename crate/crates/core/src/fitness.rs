//! Rule fitness: a convex combination of accuracy (correct / covered) and
//! coverage (covered / |training set|).

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rule::{covers_bits, Rule};
use crate::scalar::{ratio, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct WeightProfile<S> {
    pub alpha: S,
    pub beta: S,
}

impl<S: Scalar> WeightProfile<S> {
    /// `alpha` weights accuracy and `beta` coverage; both positive, summing
    /// to one.
    pub fn new(alpha: S, beta: S) -> Result<Self> {
        let tol = S::lit(1e-9);
        if !(alpha > S::zero() && beta > S::zero()) || (alpha + beta - S::one()).abs() > tol {
            return Err(Error::Config(format!("weights must be positive and sum to 1 (alpha={alpha}, beta={beta})")));
        }
        Ok(WeightProfile { alpha, beta })
    }

    /// Accuracy weight 0.99, coverage weight 0.01.
    pub fn main() -> Self {
        WeightProfile { alpha: S::lit(0.99), beta: S::lit(0.01) }
    }

    /// Profile used to judge compositions: coverage weight `gamma`.
    pub fn composition(gamma: S) -> Result<Self> {
        Self::new(S::one() - gamma, gamma)
    }

    pub fn combine(&self, accuracy: S, coverage: S) -> S {
        self.alpha * accuracy + self.beta * coverage
    }

    /// Fitness from raw counts. A rule that covers nothing scores zero.
    pub fn score(&self, counts: Counts, total: usize) -> S {
        if counts.covers == 0 {
            return S::zero();
        }
        self.combine(ratio(counts.correct, counts.covers), ratio(counts.covers, total))
    }
}

/// Covered and correctly covered instance counts of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Counts {
    pub covers: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessBreakdown<S> {
    pub n_covers: usize,
    pub n_correct: usize,
    pub accuracy: S,
    pub coverage: S,
    pub fitness: S,
}

impl<S: Scalar> FitnessBreakdown<S> {
    pub fn from_counts(counts: Counts, total: usize, profile: &WeightProfile<S>) -> Self {
        let (accuracy, coverage) = if counts.covers == 0 {
            (S::zero(), S::zero())
        } else {
            (ratio(counts.correct, counts.covers), ratio(counts.covers, total))
        };
        FitnessBreakdown {
            n_covers: counts.covers,
            n_correct: counts.correct,
            accuracy,
            coverage,
            fitness: profile.score(counts, total),
        }
    }
}

/// Evaluate `rule` by scanning every instance.
pub fn evaluate<S: Scalar>(
    rule: &Rule<S>,
    data: &Dataset<S>,
    profile: &WeightProfile<S>,
) -> Result<FitnessBreakdown<S>> {
    if data.is_empty() {
        return Err(Error::Empty("cannot evaluate on an empty dataset".into()));
    }
    if rule.bits.len() != data.schema.total_width {
        return Err(Error::WidthMismatch { expected: data.schema.total_width, found: rule.bits.len() });
    }
    let mut counts = Counts::default();
    for inst in &data.instances {
        if covers_bits(&rule.bits, &inst.bits, &data.schema) {
            counts.covers += 1;
            if inst.class_index == rule.class_index {
                counts.correct += 1;
            }
        }
    }
    Ok(FitnessBreakdown::from_counts(counts, data.len(), profile))
}

/// Column-major view of a dataset: for every bit position, the set of
/// instances that have it set.
///
/// The cover set of a rule is the intersection over feature segments of the
/// union of the columns of its set bits, so evaluation costs
/// O(popcount(rule) * N / 64) word operations.
#[derive(Debug, Clone)]
pub struct CoverIndex {
    n: usize,
    columns: Vec<BitVec>,
    class_masks: Vec<BitVec>,
    segments: Vec<(usize, usize)>,
}

impl CoverIndex {
    pub fn new<S: Scalar>(data: &Dataset<S>) -> Self {
        let n = data.len();
        let schema = &data.schema;
        let mut columns = vec![BitVec::zeros(n); schema.class_offset()];
        let mut class_masks = vec![BitVec::zeros(n); schema.n_classes()];
        for (i, inst) in data.instances.iter().enumerate() {
            for b in inst.bits.iter_ones() {
                if b < schema.class_offset() {
                    columns[b].set(i);
                }
            }
            class_masks[inst.class_index].set(i);
        }
        let segments = schema.features.iter().map(|f| (f.bit_offset, f.width)).collect();
        CoverIndex { n, columns, class_masks, segments }
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segment(&self, f: usize) -> (usize, usize) {
        self.segments[f]
    }

    pub fn column(&self, bit: usize) -> &BitVec {
        &self.columns[bit]
    }

    pub fn class_mask(&self, class: usize) -> &BitVec {
        &self.class_masks[class]
    }

    /// Instances with some set bit of `rule` in segment `f`.
    pub fn segment_union(&self, rule: &BitVec, f: usize) -> BitVec {
        let (off, width) = self.segments[f];
        let mut out = BitVec::zeros(self.n);
        for b in off..off + width {
            if rule.get(b) {
                out.or_assign(&self.columns[b]);
            }
        }
        out
    }

    pub fn cover_set(&self, rule: &BitVec) -> BitVec {
        let mut cover = BitVec::ones(self.n);
        for f in 0..self.segments.len() {
            cover.and_assign(&self.segment_union(rule, f));
        }
        cover
    }

    pub fn counts_of_cover(&self, cover: &BitVec, class: usize) -> Counts {
        Counts { covers: cover.count_ones(), correct: cover.and_count(&self.class_masks[class]) }
    }

    pub fn counts(&self, rule: &BitVec, class: usize) -> Counts {
        self.counts_of_cover(&self.cover_set(rule), class)
    }

    /// Feature segment holding feature bit `bit`.
    pub fn segment_of(&self, bit: usize) -> usize {
        self.segments.partition_point(|&(off, _)| off <= bit) - 1
    }

    /// Counts of `base | extra` for class `class`. `base_segs` are the
    /// segment unions of `base`; `extra` lists `(segment, bit)` for the
    /// feature bits of `extra` missing from `base`, ordered by segment.
    pub fn union_counts(&self, base_segs: &[BitVec], extra: &[(usize, usize)], class: usize) -> Counts {
        if base_segs.is_empty() {
            return self.counts_of_cover(&BitVec::ones(self.n), class);
        }
        let cls = self.class_masks[class].words();
        let mut covers = 0usize;
        let mut correct = 0usize;
        for (w, &k) in cls.iter().enumerate() {
            let mut acc = !0u64;
            let mut e = 0;
            for (f, seg) in base_segs.iter().enumerate() {
                let mut v = seg.words()[w];
                while e < extra.len() && extra[e].0 == f {
                    v |= self.columns[extra[e].1].words()[w];
                    e += 1;
                }
                acc &= v;
                if acc == 0 {
                    break;
                }
            }
            covers += acc.count_ones() as usize;
            correct += (acc & k).count_ones() as usize;
        }
        Counts { covers, correct }
    }

    /// Counts after setting zero bit `bit` of segment `f`, given the
    /// intersection `others` of every other segment's union and the current
    /// union `seg` of segment `f`.
    pub fn flip_counts(&self, others: &BitVec, seg: &BitVec, bit: usize, class: usize) -> Counts {
        let col = self.columns[bit].words();
        let cls = self.class_masks[class].words();
        let mut covers = 0usize;
        let mut correct = 0usize;
        for (((o, s), c), k) in others.words().iter().zip(seg.words()).zip(col).zip(cls) {
            let w = o & (s | c);
            covers += w.count_ones() as usize;
            correct += (w & k).count_ones() as usize;
        }
        Counts { covers, correct }
    }
}
