use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cell storage for one feature column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData<S> {
    /// `codes[r]` indexes into `levels`; `None` is a missing cell.
    Categorical {
        levels: Vec<String>,
        codes: Vec<Option<u32>>,
    },
    Numeric(Vec<Option<S>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn<S> {
    pub name: String,
    pub data: ColumnData<S>,
}

impl<S: Scalar> RawColumn<S> {
    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Categorical { codes, .. } => codes.len(),
            ColumnData::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.data, ColumnData::Numeric(_))
    }

    pub fn missing_count(&self) -> usize {
        match &self.data {
            ColumnData::Categorical { codes, .. } => codes.iter().filter(|c| c.is_none()).count(),
            ColumnData::Numeric(v) => v.iter().filter(|c| c.is_none()).count(),
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match &self.data {
            ColumnData::Categorical { codes, .. } => codes[row].is_none(),
            ColumnData::Numeric(v) => v[row].is_none(),
        }
    }

    /// Categorical label of a cell, `None` when missing or numeric.
    pub fn label(&self, row: usize) -> Option<&str> {
        match &self.data {
            ColumnData::Categorical { levels, codes } => codes[row].map(|c| levels[c as usize].as_str()),
            ColumnData::Numeric(_) => None,
        }
    }

    pub fn value(&self, row: usize) -> Option<S> {
        match &self.data {
            ColumnData::Numeric(v) => v[row],
            ColumnData::Categorical { .. } => None,
        }
    }

    fn subset(&self, rows: &[usize]) -> RawColumn<S> {
        let data = match &self.data {
            ColumnData::Categorical { levels, codes } => {
                ColumnData::Categorical { levels: levels.clone(), codes: rows.iter().map(|&r| codes[r]).collect() }
            }
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
        };
        RawColumn { name: self.name.clone(), data }
    }
}

/// A loaded dataset before discretization and bit encoding.
///
/// Rows whose class cell was missing are dropped at load time and counted in
/// `dropped_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable<S> {
    pub name: String,
    pub features: Vec<RawColumn<S>>,
    pub class_name: String,
    /// Declared (ARFF) or first-seen (CSV) class levels.
    pub class_levels: Vec<String>,
    pub classes: Vec<u32>,
    pub dropped_rows: usize,
}

impl<S: Scalar> RawTable<S> {
    pub fn new(
        name: impl Into<String>,
        features: Vec<RawColumn<S>>,
        class_name: impl Into<String>,
        class_levels: Vec<String>,
        classes: Vec<u32>,
    ) -> Result<Self> {
        let n = classes.len();
        if n == 0 {
            return Err(Error::Empty("table has no rows".into()));
        }
        for col in &features {
            if col.len() != n {
                return Err(Error::SchemaMismatch(format!(
                    "column {} has {} cells, expected {n}",
                    col.name,
                    col.len()
                )));
            }
        }
        if let Some(&bad) = classes.iter().find(|&&c| c as usize >= class_levels.len()) {
            return Err(Error::SchemaMismatch(format!("class code {bad} has no level")));
        }
        Ok(RawTable {
            name: name.into(),
            features,
            class_name: class_name.into(),
            class_levels,
            classes,
            dropped_rows: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.classes.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn class_label(&self, row: usize) -> &str {
        &self.class_levels[self.classes[row] as usize]
    }

    pub fn column(&self, name: &str) -> Option<&RawColumn<S>> {
        self.features.iter().find(|c| c.name == name)
    }

    /// Total number of missing feature cells.
    pub fn missing_cells(&self) -> usize {
        self.features.iter().map(|c| c.missing_count()).sum()
    }

    /// Rows `rows` in the given order; level vocabularies are shared.
    pub fn subset(&self, rows: &[usize]) -> RawTable<S> {
        RawTable {
            name: self.name.clone(),
            features: self.features.iter().map(|c| c.subset(rows)).collect(),
            class_name: self.class_name.clone(),
            class_levels: self.class_levels.clone(),
            classes: rows.iter().map(|&r| self.classes[r]).collect(),
            dropped_rows: 0,
        }
    }
}
