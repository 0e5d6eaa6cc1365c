//! Benchmark manifests.
//!
//! ```toml
//! # optional reference accuracies, shown beside the computed columns
//! published = "published_accuracies.csv"
//! published_columns = ["RUMC", "RACER"]
//!
//! [[dataset]]
//! name = "mux6"
//! path = "mux6.arff"
//!
//! [[dataset]]
//! name = "diabetes"
//! path = "diabetes.csv"
//! class = "class"
//! ```
//!
//! Relative paths are resolved against the manifest's directory. The
//! published file is a CSV whose first column is the dataset name and whose
//! header names the remaining columns.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rumix::data::LoadOptions;
use rumix::eval::{BenchSource, PublishedTable};
use serde::Deserialize;

use crate::exit::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    published: Option<PathBuf>,
    published_columns: Option<Vec<String>>,
    #[serde(default)]
    dataset: Vec<DatasetEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetEntry {
    name: String,
    path: PathBuf,
    class: Option<String>,
}

#[derive(Debug)]
pub struct Manifest {
    pub datasets: Vec<BenchSource>,
    pub published: Option<(Vec<String>, PublishedTable)>,
}

pub fn load(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("manifest not found: {}: {e}", path.display())))?;
    let file: ManifestFile =
        toml::from_str(&text).map_err(|e| CliError::input(format!("invalid manifest {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let datasets = file
        .dataset
        .into_iter()
        .map(|d| BenchSource {
            options: LoadOptions { class_column: d.class, name: Some(d.name.clone()), ..LoadOptions::default() },
            name: d.name,
            path: base.join(d.path),
        })
        .collect();
    let published = match file.published {
        Some(p) => {
            let (header, table) = read_published(&base.join(p))?;
            let columns = file.published_columns.unwrap_or_else(|| vec!["RUMC".into(), "RACER".into()]);
            if let Some(c) = columns.iter().find(|c| !header.contains(c)) {
                return Err(CliError::input(format!("published column {c:?} not in the published file")));
            }
            Some((columns, table))
        }
        None => None,
    };
    Ok(Manifest { datasets, published })
}

pub fn read_published(path: &Path) -> Result<(Vec<String>, PublishedTable), CliError> {
    let bad = |e: csv::Error| CliError::input(format!("cannot read published table {}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(bad)?;
    let header: Vec<String> = rdr.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut table = PublishedTable::new();
    for rec in rdr.records() {
        let rec = rec.map_err(bad)?;
        let mut row = BTreeMap::new();
        for (col, cell) in header.iter().zip(rec.iter()).skip(1) {
            if let Ok(v) = cell.trim().parse::<f64>() {
                row.insert(col.clone(), v);
            }
        }
        table.insert(rec.get(0).unwrap_or_default().to_string(), row);
    }
    Ok((header.into_iter().skip(1).collect(), table))
}
