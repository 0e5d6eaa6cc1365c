//! Dataset loading, bit layout and instance encoding.

mod arff;
mod dataset;
mod delimited;
mod schema;
mod table;

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

pub use arff::read_arff;
pub use dataset::{Dataset, EncodedInstance};
pub use delimited::read_csv;
pub use schema::{build_schema, DatasetSchema, FeatureDescriptor, FeatureKind, TableEncoder, ANY_LABEL, MISSING_LABEL};
pub use table::{ColumnData, RawColumn, RawTable};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Arff,
    Csv,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "arff" => Some(Format::Arff),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Class column name; defaults to the last column.
    pub class_column: Option<String>,
    /// Dataset name; ARFF defaults to `@relation`, CSV to the file stem.
    pub name: Option<String>,
    /// CSV only: columns read as categorical regardless of content.
    pub force_categorical: Vec<String>,
    /// CSV only: columns that must parse as numbers.
    pub force_numeric: Vec<String>,
}

pub fn load_dataset<S: Scalar, R: Read>(source: R, format: Format, options: &LoadOptions) -> Result<RawTable<S>> {
    match format {
        Format::Arff => read_arff(BufReader::new(source), options),
        Format::Csv => read_csv(source, options),
    }
}

/// Load a `.arff` or `.csv` file. The dataset name defaults to the file stem.
pub fn load_path<S: Scalar>(path: impl AsRef<Path>, options: &LoadOptions) -> Result<RawTable<S>> {
    let path = path.as_ref();
    let format = Format::from_path(path)
        .ok_or_else(|| Error::Config(format!("unknown dataset format for {}", path.display())))?;
    let file = File::open(path)?;
    let mut opts = options.clone();
    if opts.name.is_none() {
        opts.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    load_dataset(file, format, &opts)
}
