//! Dense ARFF reader: `@relation`, nominal and numeric `@attribute`s,
//! `@data`, `?` for missing cells, `%` comments.

use std::io::BufRead;

use log::warn;

use super::table::{ColumnData, RawColumn, RawTable};
use super::LoadOptions;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum AttrType {
    Nominal(Vec<String>),
    Numeric,
}

#[derive(Debug)]
struct Attribute {
    name: String,
    ty: AttrType,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn unquote(s: &str) -> String {
    let t = s.trim();
    if t.len() >= 2 && ((t.starts_with('\'') && t.ends_with('\'')) || (t.starts_with('"') && t.ends_with('"'))) {
        t[1..t.len() - 1].replace("\\'", "'").replace("\\\"", "\"")
    } else {
        t.to_string()
    }
}

/// Split on commas outside quotes. Cells are trimmed and unquoted.
fn split_cells(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for c in s.chars() {
        if escaped {
            cur.push(c);
            escaped = false;
            continue;
        }
        match (quote, c) {
            (Some(_), '\\') => {
                cur.push(c);
                escaped = true;
            }
            (Some(q), c) if c == q => {
                cur.push(c);
                quote = None;
            }
            (Some(_), c) => cur.push(c),
            (None, '\'' | '"') => {
                cur.push(c);
                quote = Some(c);
            }
            (None, ',') => out.push(unquote(&std::mem::take(&mut cur))),
            (None, c) => cur.push(c),
        }
    }
    out.push(unquote(&cur));
    out
}

/// Split `@attribute <name> <type>` into name and the type text.
fn split_attribute(rest: &str, line: usize) -> Result<(String, String)> {
    let rest = rest.trim_start();
    let first = rest.chars().next().ok_or_else(|| parse_err(line, "attribute without a name"))?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first).ok_or_else(|| parse_err(line, "unterminated quoted attribute name"))? + 1;
        Ok((rest[1..end].to_string(), rest[end + 1..].trim().to_string()))
    } else {
        let end = rest.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(rest.len());
        Ok((rest[..end].to_string(), rest[end..].trim().to_string()))
    }
}

fn parse_type(text: &str, line: usize) -> Result<AttrType> {
    if let Some(inner) = text.strip_prefix('{') {
        let inner = inner.strip_suffix('}').ok_or_else(|| parse_err(line, "nominal domain missing closing brace"))?;
        let values: Vec<String> = split_cells(inner).into_iter().filter(|v| !v.is_empty()).collect();
        let mut seen = std::collections::HashSet::new();
        for v in &values {
            if !seen.insert(v.as_str()) {
                return Err(parse_err(line, format!("duplicate nominal value {v:?}")));
            }
        }
        return Ok(AttrType::Nominal(values));
    }
    match text.split_whitespace().next().map(|t| t.to_ascii_lowercase()).as_deref() {
        Some("numeric" | "real" | "integer") => Ok(AttrType::Numeric),
        Some(other) => Err(parse_err(line, format!("unsupported attribute type {other:?}"))),
        None => Err(parse_err(line, "attribute without a type")),
    }
}

pub fn read_arff<S: Scalar, R: BufRead>(reader: R, options: &LoadOptions) -> Result<RawTable<S>> {
    let mut relation = String::new();
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut in_data = false;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if in_data {
            if t.starts_with('{') {
                return Err(parse_err(lineno, "sparse ARFF rows are not supported"));
            }
            rows.push((lineno, split_cells(t)));
            continue;
        }
        let lower = t.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = unquote(&t["@relation".len()..]);
        } else if lower.starts_with("@attribute") {
            let (name, ty) = split_attribute(&t["@attribute".len()..], lineno)?;
            attrs.push(Attribute { name, ty: parse_type(&ty, lineno)? });
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(parse_err(lineno, format!("unexpected header line {t:?}")));
        }
    }

    if attrs.is_empty() {
        return Err(Error::Empty("no @attribute declarations".into()));
    }
    if rows.is_empty() {
        return Err(Error::Empty("no data rows".into()));
    }
    let class_idx = match &options.class_column {
        Some(name) => {
            attrs.iter().position(|a| &a.name == name).ok_or_else(|| Error::MissingClassColumn(name.clone()))?
        }
        None => attrs.len() - 1,
    };

    let n_attr = attrs.len();
    let mut feature_cells: Vec<Vec<Option<String>>> = vec![Vec::with_capacity(rows.len()); n_attr];
    let mut class_cells: Vec<String> = Vec::with_capacity(rows.len());
    let mut dropped = 0;
    for (lineno, cells) in rows {
        if cells.len() != n_attr {
            return Err(Error::RaggedRow { line: lineno, expected: n_attr, found: cells.len() });
        }
        if cells[class_idx] == "?" || cells[class_idx].is_empty() {
            dropped += 1;
            continue;
        }
        for (a, cell) in cells.into_iter().enumerate() {
            if a == class_idx {
                if let AttrType::Nominal(dom) = &attrs[a].ty {
                    if !dom.contains(&cell) {
                        return Err(parse_err(lineno, format!("class value {cell:?} not declared")));
                    }
                }
                class_cells.push(cell);
            } else if cell == "?" {
                feature_cells[a].push(None);
            } else {
                match &attrs[a].ty {
                    AttrType::Nominal(dom) if !dom.contains(&cell) => {
                        return Err(parse_err(lineno, format!("value {cell:?} not in domain of {}", attrs[a].name)))
                    }
                    AttrType::Numeric if S::parse_finite(&cell).is_none() => {
                        return Err(parse_err(lineno, format!("{cell:?} is not a finite number")))
                    }
                    _ => feature_cells[a].push(Some(cell)),
                }
            }
        }
    }
    if dropped > 0 {
        warn!("{relation}: dropped {dropped} rows with a missing class value");
    }
    if class_cells.is_empty() {
        return Err(Error::Empty("every row has a missing class value".into()));
    }

    let mut features = Vec::with_capacity(n_attr - 1);
    let mut class_levels = Vec::new();
    let mut classes = Vec::new();
    let mut class_name = String::new();
    for (a, (attr, cells)) in attrs.into_iter().zip(feature_cells).enumerate() {
        if a == class_idx {
            class_name = attr.name;
            class_levels = match attr.ty {
                AttrType::Nominal(dom) => dom,
                AttrType::Numeric => first_seen_levels(class_cells.iter().map(String::as_str)),
            };
            classes = class_cells.iter().map(|c| class_levels.iter().position(|l| l == c).unwrap() as u32).collect();
            continue;
        }
        let data = match attr.ty {
            AttrType::Nominal(levels) => {
                let codes = cells
                    .iter()
                    .map(|c| c.as_ref().map(|v| levels.iter().position(|l| l == v).unwrap() as u32))
                    .collect();
                ColumnData::Categorical { levels, codes }
            }
            AttrType::Numeric => {
                ColumnData::Numeric(cells.iter().map(|c| c.as_deref().and_then(S::parse_finite)).collect())
            }
        };
        features.push(RawColumn { name: attr.name, data });
    }

    let name = options.name.clone().unwrap_or(relation);
    let mut table = RawTable::new(name, features, class_name, class_levels, classes)?;
    table.dropped_rows = dropped;
    Ok(table)
}

pub(crate) fn first_seen_levels<'a>(cells: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut levels: Vec<String> = Vec::new();
    for c in cells {
        if !levels.iter().any(|l| l == c) {
            levels.push(c.to_string());
        }
    }
    levels
}
