//! CSV reader. A header row is required; `""` and `"?"` cells are missing.
//! A column is numeric iff every non-missing cell parses as a finite number,
//! unless overridden through [`LoadOptions`].

use std::io::Read;

use log::warn;

use super::arff::first_seen_levels;
use super::table::{ColumnData, RawColumn, RawTable};
use super::LoadOptions;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

pub fn read_csv<S: Scalar, R: Read>(reader: R, options: &LoadOptions) -> Result<RawTable<S>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Empty("missing header row".into()));
    }
    let class_idx = match &options.class_column {
        Some(name) => header.iter().position(|h| h == name).ok_or_else(|| Error::MissingClassColumn(name.clone()))?,
        None => header.len() - 1,
    };

    let mut columns: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut dropped = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = record.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::RaggedRow { line, expected: header.len(), found: record.len() });
        }
        if is_missing(&record[class_idx]) {
            dropped += 1;
            continue;
        }
        for (c, cell) in record.iter().enumerate() {
            columns[c].push(cell.to_string());
        }
    }
    if columns[class_idx].is_empty() {
        return Err(Error::Empty(if dropped > 0 {
            "every row has a missing class value".into()
        } else {
            "no data rows".into()
        }));
    }
    if dropped > 0 {
        warn!("dropped {dropped} rows with a missing class value");
    }

    let mut features = Vec::with_capacity(header.len() - 1);
    let mut class_levels = Vec::new();
    let mut classes = Vec::new();
    for (c, (name, cells)) in header.iter().zip(&columns).enumerate() {
        if c == class_idx {
            class_levels = first_seen_levels(cells.iter().map(String::as_str));
            classes = cells.iter().map(|v| class_levels.iter().position(|l| l == v).unwrap() as u32).collect();
            continue;
        }
        let inferred_numeric = cells.iter().any(|v| !is_missing(v))
            && cells.iter().filter(|v| !is_missing(v)).all(|v| S::parse_finite(v).is_some());
        let numeric = if options.force_categorical.contains(name) {
            false
        } else if options.force_numeric.contains(name) {
            if let Some(bad) = cells.iter().find(|v| !is_missing(v) && S::parse_finite(v).is_none()) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("column {name} forced numeric but {bad:?} is not a number"),
                });
            }
            true
        } else {
            inferred_numeric
        };
        let data = if numeric {
            ColumnData::Numeric(cells.iter().map(|v| if is_missing(v) { None } else { S::parse_finite(v) }).collect())
        } else {
            let levels = first_seen_levels(cells.iter().map(String::as_str).filter(|v| !is_missing(v)));
            let codes = cells
                .iter()
                .map(|v| if is_missing(v) { None } else { Some(levels.iter().position(|l| l == v).unwrap() as u32) })
                .collect();
            ColumnData::Categorical { levels, codes }
        };
        features.push(RawColumn { name: name.clone(), data });
    }

    let name = options.name.clone().unwrap_or_default();
    let mut table = RawTable::new(name, features, header[class_idx].clone(), class_levels, classes)?;
    table.dropped_rows = dropped;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_numeric_with_missing_cell() {
        let src = "x,colour,label\n1.5,red,a\n2.0,\"dark, blue\",b\n?,red,a\n";
        let t: RawTable<f64> = read_csv(src.as_bytes(), &LoadOptions::default()).unwrap();
        assert!(t.features[0].is_numeric());
        assert_eq!(t.features[0].missing_count(), 1);
        assert_eq!(t.features[1].label(1), Some("dark, blue"));
        assert_eq!(t.class_levels, vec!["a", "b"]);
        assert_eq!(t.class_name, "label");
    }

    #[test]
    fn overrides_and_class_selection() {
        let src = "code,y,z\n1,p,0\n2,q,1\n";
        let opts = LoadOptions {
            class_column: Some("y".into()),
            force_categorical: vec!["code".into()],
            ..Default::default()
        };
        let t: RawTable<f64> = read_csv(src.as_bytes(), &opts).unwrap();
        assert!(!t.features[0].is_numeric());
        assert!(t.features[1].is_numeric());
        assert_eq!(t.class_label(1), "q");
    }

    #[test]
    fn errors() {
        assert!(read_csv::<f64, _>("".as_bytes(), &LoadOptions::default()).is_err());
        assert!(matches!(read_csv::<f64, _>("a,b\n".as_bytes(), &LoadOptions::default()), Err(Error::Empty(_))));
        assert!(matches!(
            read_csv::<f64, _>("a,b\n1,x\n2\n".as_bytes(), &LoadOptions::default()),
            Err(Error::RaggedRow { .. })
        ));
        let opts = LoadOptions { class_column: Some("c".into()), ..Default::default() };
        assert!(matches!(read_csv::<f64, _>("a,b\n1,x\n".as_bytes(), &opts), Err(Error::MissingClassColumn(_))));
        let t: RawTable<f64> = read_csv("a,b\n1,x\n2,?\n3,\n".as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!((t.n_rows(), t.dropped_rows), (1, 2));
    }
}
