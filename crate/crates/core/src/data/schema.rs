use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::table::{ColumnData, RawTable};
use crate::bits::BitVec;
use crate::discretize::SplitCut;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Domain label of the extra category that absorbs missing cells.
pub const MISSING_LABEL: &str = "\u{2400}missing";

/// Label of the single bin of a numeric feature that has no split point.
pub const ANY_LABEL: &str = "any";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "S: Scalar")]
pub enum FeatureKind<S> {
    Categorical,
    /// Two bins `<=cut` and `>cut`, or one bin when `cut` is `None`.
    Numeric {
        cut: Option<S>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FeatureDescriptor<S> {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind<S>,
    pub domain: Vec<String>,
    pub bit_offset: usize,
    pub width: usize,
}

impl<S: Scalar> FeatureDescriptor<S> {
    pub fn missing_index(&self) -> Option<usize> {
        self.domain.iter().position(|d| d == MISSING_LABEL)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, FeatureKind::Numeric { .. })
    }

    /// Bin index of a present numeric value.
    pub fn numeric_bin(&self, value: S) -> Option<usize> {
        match self.kind {
            FeatureKind::Numeric { cut: Some(cut) } => Some(if value <= cut { 0 } else { 1 }),
            FeatureKind::Numeric { cut: None } => {
                if self.domain.first().map(String::as_str) == Some(ANY_LABEL) {
                    Some(0)
                } else {
                    None
                }
            }
            FeatureKind::Categorical => None,
        }
    }
}

/// Bit layout of rules and instances: one segment per feature followed by
/// the one-hot class segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DatasetSchema<S> {
    pub features: Vec<FeatureDescriptor<S>>,
    pub class_labels: Vec<String>,
    pub total_width: usize,
}

impl<S: Scalar> DatasetSchema<S> {
    /// Lay out segments in the given order. Offsets are cumulative.
    pub fn new(features: Vec<(String, FeatureKind<S>, Vec<String>)>, class_labels: Vec<String>) -> Result<Self> {
        if class_labels.is_empty() {
            return Err(Error::Empty("no class labels".into()));
        }
        check_unique("class", &class_labels)?;
        let mut offset = 0;
        let mut out = Vec::with_capacity(features.len());
        for (name, kind, domain) in features {
            if domain.is_empty() {
                return Err(Error::SchemaMismatch(format!("feature {name} has an empty domain")));
            }
            check_unique(&name, &domain)?;
            let width = domain.len();
            out.push(FeatureDescriptor { name, kind, domain, bit_offset: offset, width });
            offset += width;
        }
        Ok(DatasetSchema { total_width: offset + class_labels.len(), features: out, class_labels })
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    /// First bit of the class segment.
    pub fn class_offset(&self) -> usize {
        self.total_width - self.class_labels.len()
    }

    pub fn is_class_bit(&self, bit: usize) -> bool {
        bit >= self.class_offset() && bit < self.total_width
    }

    /// Feature whose segment contains `bit`, if any.
    pub fn feature_of_bit(&self, bit: usize) -> Option<usize> {
        if bit >= self.class_offset() {
            return None;
        }
        Some(self.features.partition_point(|f| f.bit_offset + f.width <= bit))
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.class_labels.iter().position(|l| l == label)
    }

    pub fn cuts(&self) -> Vec<SplitCut<S>> {
        self.features
            .iter()
            .filter_map(|f| match f.kind {
                FeatureKind::Numeric { cut: Some(cut) } => Some(SplitCut::new(f.name.clone(), cut)),
                _ => None,
            })
            .collect()
    }

    /// Labels of the set bits of each feature segment (training instances
    /// have exactly one).
    pub fn decode(&self, bits: &BitVec) -> Vec<Vec<&str>> {
        self.features
            .iter()
            .map(|f| (0..f.width).filter(|&k| bits.get(f.bit_offset + k)).map(|k| f.domain[k].as_str()).collect())
            .collect()
    }

    /// Per-feature encoders for the columns of `table`, matched by name.
    pub fn encoder_for(&self, table: &RawTable<S>) -> Result<TableEncoder<'_, S>> {
        let mut columns = Vec::with_capacity(self.features.len());
        for f in &self.features {
            let (col_idx, col) = table
                .features
                .iter()
                .enumerate()
                .find(|(_, c)| c.name == f.name)
                .ok_or_else(|| Error::SchemaMismatch(format!("column {} not present in data", f.name)))?;
            let enc = match (&f.kind, &col.data) {
                (FeatureKind::Categorical, ColumnData::Categorical { levels, .. }) => {
                    let lookup: HashMap<&str, usize> =
                        f.domain.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
                    ColumnEncoder::Categorical {
                        code_map: levels.iter().map(|l| lookup.get(l.as_str()).copied()).collect(),
                    }
                }
                (FeatureKind::Numeric { .. }, ColumnData::Numeric(_)) => ColumnEncoder::Numeric,
                (FeatureKind::Numeric { .. }, ColumnData::Categorical { levels, .. }) => {
                    // a numeric column read as categorical, e.g. all cells missing
                    let parsed: Option<Vec<S>> = levels.iter().map(|l| S::parse_finite(l)).collect();
                    match parsed {
                        Some(values) => ColumnEncoder::NumericLevels { values },
                        None => {
                            return Err(Error::SchemaMismatch(format!(
                                "column {} is categorical in the data but numeric in the schema",
                                f.name
                            )))
                        }
                    }
                }
                (FeatureKind::Categorical, ColumnData::Numeric(_)) => {
                    return Err(Error::SchemaMismatch(format!(
                        "column {} is numeric in the data but categorical in the schema",
                        f.name
                    )))
                }
            };
            columns.push((col_idx, enc));
        }
        Ok(TableEncoder { schema: self, columns })
    }
}

fn check_unique(what: &str, labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::SchemaMismatch(format!("duplicate label {l:?} in {what}")));
        }
    }
    Ok(())
}

/// Build the bit layout from training rows.
///
/// Categorical domains are the observed values in order of first appearance;
/// numeric features take their bins from `cuts` (one bin when no cut is
/// given). A feature with any missing cell gains a trailing
/// [`MISSING_LABEL`] category. Class labels are the observed ones, in order
/// of first appearance.
pub fn build_schema<S: Scalar>(table: &RawTable<S>, cuts: &[SplitCut<S>]) -> Result<DatasetSchema<S>> {
    if table.n_rows() == 0 {
        return Err(Error::Empty("cannot build a schema from zero rows".into()));
    }
    for cut in cuts {
        match table.column(&cut.feature) {
            Some(c) if c.is_numeric() => {}
            _ => return Err(Error::SchemaMismatch(format!("cut for unknown numeric column {}", cut.feature))),
        }
    }
    let mut features = Vec::with_capacity(table.n_features());
    for col in &table.features {
        let has_missing = col.missing_count() > 0;
        let (kind, mut domain) = match &col.data {
            ColumnData::Categorical { levels, codes } => {
                let mut seen = vec![false; levels.len()];
                let mut domain = Vec::new();
                for code in codes.iter().flatten() {
                    if !seen[*code as usize] {
                        seen[*code as usize] = true;
                        domain.push(levels[*code as usize].clone());
                    }
                }
                (FeatureKind::Categorical, domain)
            }
            ColumnData::Numeric(values) => {
                let cut = cuts.iter().find(|c| c.feature == col.name).map(|c| c.cut_value);
                let domain = match cut {
                    Some(c) => vec![format!("<={c}"), format!(">{c}")],
                    None if values.iter().any(Option::is_some) => vec![ANY_LABEL.to_string()],
                    None => Vec::new(),
                };
                (FeatureKind::Numeric { cut }, domain)
            }
        };
        if has_missing {
            domain.push(MISSING_LABEL.to_string());
        }
        features.push((col.name.clone(), kind, domain));
    }
    let mut seen = vec![false; table.class_levels.len()];
    let mut class_labels = Vec::new();
    for &c in &table.classes {
        if !seen[c as usize] {
            seen[c as usize] = true;
            class_labels.push(table.class_levels[c as usize].clone());
        }
    }
    DatasetSchema::new(features, class_labels)
}

#[derive(Debug)]
enum ColumnEncoder<S> {
    Categorical { code_map: Vec<Option<usize>> },
    Numeric,
    NumericLevels { values: Vec<S> },
}

/// Encodes rows of one particular table against a schema.
#[derive(Debug)]
pub struct TableEncoder<'a, S> {
    schema: &'a DatasetSchema<S>,
    columns: Vec<(usize, ColumnEncoder<S>)>,
}

impl<S: Scalar> TableEncoder<'_, S> {
    /// Feature bits of `row`; the class segment is left clear.
    ///
    /// A missing or unmappable value sets the feature's missing bit when it
    /// has one, otherwise leaves its segment all zero. With `strict`, an
    /// unmappable value is an error instead.
    pub fn encode_features(&self, table: &RawTable<S>, row: usize, strict: bool) -> Result<BitVec> {
        let mut bits = BitVec::zeros(self.schema.total_width);
        for (f, (col_idx, enc)) in self.schema.features.iter().zip(&self.columns) {
            let col = &table.features[*col_idx];
            let bin = match (enc, &col.data) {
                (ColumnEncoder::Categorical { code_map }, ColumnData::Categorical { codes, .. }) => {
                    codes[row].map(|c| code_map[c as usize])
                }
                (ColumnEncoder::Numeric, ColumnData::Numeric(values)) => values[row].map(|v| f.numeric_bin(v)),
                (ColumnEncoder::NumericLevels { values }, ColumnData::Categorical { codes, .. }) => {
                    codes[row].map(|c| f.numeric_bin(values[c as usize]))
                }
                _ => unreachable!("encoder built for a different table"),
            };
            let idx = match bin {
                Some(Some(i)) => Some(i),
                None => f.missing_index(),
                Some(None) => {
                    if strict {
                        return Err(Error::SchemaMismatch(format!(
                            "row {row}: value of {} is outside the schema domain",
                            f.name
                        )));
                    }
                    f.missing_index()
                }
            };
            match idx {
                Some(i) => bits.set(f.bit_offset + i),
                None if strict => {
                    return Err(Error::SchemaMismatch(format!(
                        "row {row}: missing value in {} but the schema has no missing category",
                        f.name
                    )))
                }
                None => {}
            }
        }
        Ok(bits)
    }
}
