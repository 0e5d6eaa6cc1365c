//! Supervised binary discretization of numeric features.
//!
//! Each numeric feature gets at most one cut: the midpoint between adjacent
//! distinct sorted values that minimizes the class entropy of the two sides,
//! weighted by side size. Ties go to the smallest midpoint.

use serde::{Deserialize, Serialize};

use crate::data::{ColumnData, RawTable};
use crate::error::{Error, Result};
use crate::scalar::{ratio, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SplitCut<S> {
    pub feature: String,
    pub cut_value: S,
}

impl<S: Scalar> SplitCut<S> {
    pub fn new(feature: impl Into<String>, cut_value: S) -> Self {
        SplitCut { feature: feature.into(), cut_value }
    }

    pub fn bins(&self) -> [String; 2] {
        [format!("<={}", self.cut_value), format!(">{}", self.cut_value)]
    }
}

/// A chosen cut and its weighted split entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit<S> {
    pub cut_value: S,
    pub info: S,
}

/// Midpoints between adjacent distinct values of an ascending slice.
pub fn candidate_midpoints<S: Scalar>(values: &[S]) -> Vec<S> {
    let two = S::lit(2.0);
    let mut out = Vec::new();
    let mut prev: Option<S> = None;
    for &v in values {
        match prev {
            Some(p) if v > p => {
                out.push((p + v) / two);
                prev = Some(v);
            }
            None => prev = Some(v),
            _ => {}
        }
    }
    out
}

/// Shannon entropy in bits of a class histogram.
pub fn entropy<S: Scalar>(class_counts: &[usize]) -> Result<S> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::Empty("entropy of an empty class histogram".into()));
    }
    Ok(entropy_unchecked(class_counts, total))
}

fn entropy_unchecked<S: Scalar>(class_counts: &[usize], total: usize) -> S {
    let mut h = S::zero();
    for &c in class_counts {
        if c > 0 {
            let p: S = ratio(c, total);
            h = h - p * p.log2();
        }
    }
    h
}

fn split_info<S: Scalar>(left: &[usize], right: &[usize]) -> S {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = nl + nr;
    let mut info = S::zero();
    if nl > 0 {
        info = info + ratio::<S>(nl, n) * entropy_unchecked::<S>(left, nl);
    }
    if nr > 0 {
        info = info + ratio::<S>(nr, n) * entropy_unchecked::<S>(right, nr);
    }
    info
}

fn n_classes(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Size-weighted entropy of the partition `value <= cut` / `value > cut`.
pub fn weighted_split_entropy<S: Scalar>(values: &[S], labels: &[usize], cut: S) -> Result<S> {
    if values.len() != labels.len() {
        return Err(Error::SchemaMismatch(format!("{} values but {} labels", values.len(), labels.len())));
    }
    if values.is_empty() {
        return Err(Error::Empty("no values to split".into()));
    }
    let m = n_classes(labels);
    let mut left = vec![0; m];
    let mut right = vec![0; m];
    for (&v, &l) in values.iter().zip(labels) {
        if v <= cut {
            left[l] += 1;
        } else {
            right[l] += 1;
        }
    }
    Ok(split_info(&left, &right))
}

/// Entropy-minimizing midpoint, or `None` with fewer than two distinct values.
pub fn best_split<S: Scalar>(values: &[S], labels: &[usize]) -> Option<BestSplit<S>> {
    assert_eq!(values.len(), labels.len(), "values and labels must align");
    let mut pairs: Vec<(S, usize)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    let m = n_classes(labels);
    let mut left = vec![0usize; m];
    let mut right = vec![0usize; m];
    for &(_, l) in &pairs {
        right[l] += 1;
    }
    let two = S::lit(2.0);
    // equal entropies can differ in the last bits depending on count order
    let tie = S::epsilon() * S::lit(64.0);
    let mut best: Option<BestSplit<S>> = None;
    for i in 0..pairs.len() {
        let (v, l) = pairs[i];
        left[l] += 1;
        right[l] -= 1;
        let Some(&(next, _)) = pairs.get(i + 1) else { break };
        if next > v {
            let info = split_info::<S>(&left, &right);
            if best.is_none_or(|b| info < b.info - tie) {
                best = Some(BestSplit { cut_value: (v + next) / two, info });
            }
        }
    }
    best
}

/// One cut per numeric column of `table` that has at least two distinct
/// present values. Missing cells take no part in the choice.
pub fn discretize_table<S: Scalar>(table: &RawTable<S>) -> Vec<SplitCut<S>> {
    let mut cuts = Vec::new();
    for col in &table.features {
        if let ColumnData::Numeric(values) = &col.data {
            let (vals, labels): (Vec<S>, Vec<usize>) =
                values.iter().zip(&table.classes).filter_map(|(v, &c)| v.map(|v| (v, c as usize))).unzip();
            if let Some(best) = best_split(&vals, &labels) {
                cuts.push(SplitCut::new(col.name.clone(), best.cut_value));
            }
        }
    }
    cuts
}
