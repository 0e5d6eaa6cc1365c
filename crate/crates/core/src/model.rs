//! Versioned JSON persistence for trained classifiers.
//!
//! Rule bits are stored as hex, four bits per digit with the lowest bit index
//! in the most significant position of each digit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::data::DatasetSchema;
use crate::discretize::SplitCut;
use crate::error::{Error, Result};
use crate::learner::{Classifier, LearnerConfig};
use crate::rule::Rule;
use crate::scalar::Scalar;

pub const FORMAT: &str = "rumix-classifier";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct Document<S> {
    format: String,
    format_version: u32,
    library_version: String,
    schema: DatasetSchema<S>,
    cuts: Vec<SplitCut<S>>,
    default_class: String,
    config: LearnerConfig<S>,
    rules: Vec<RuleRecord<S>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct RuleRecord<S> {
    class: String,
    bits: String,
    fitness: S,
    seq: u64,
}

pub fn to_json<S: Scalar>(clf: &Classifier<S>) -> Result<String> {
    let doc = Document {
        format: FORMAT.into(),
        format_version: FORMAT_VERSION,
        library_version: env!("CARGO_PKG_VERSION").into(),
        schema: clf.schema.clone(),
        cuts: clf.cuts.clone(),
        default_class: clf.class_label(clf.default_class).to_string(),
        config: clf.config.clone(),
        rules: clf
            .rules
            .iter()
            .map(|r| RuleRecord {
                class: clf.class_label(r.class_index).to_string(),
                bits: r.bits.to_hex(),
                fitness: r.fitness.unwrap_or_else(S::zero),
                seq: r.seq,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<S: Scalar>(text: &str) -> Result<Classifier<S>> {
    let doc: Document<S> = serde_json::from_str(text)?;
    if doc.format != FORMAT {
        return Err(Error::Model(format!("unexpected format {:?}", doc.format)));
    }
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Model(format!("unsupported format version {}", doc.format_version)));
    }
    // rebuild the layout from scratch so stored offsets cannot disagree
    let schema = DatasetSchema::new(
        doc.schema.features.iter().map(|f| (f.name.clone(), f.kind.clone(), f.domain.clone())).collect(),
        doc.schema.class_labels.clone(),
    )?;
    if schema != doc.schema {
        return Err(Error::Model("schema offsets are inconsistent".into()));
    }
    let class_of =
        |label: &str| schema.class_index(label).ok_or_else(|| Error::Model(format!("unknown class {label:?}")));
    let default_class = class_of(&doc.default_class)?;
    let mut rules = Vec::with_capacity(doc.rules.len());
    for r in &doc.rules {
        rules.push(Rule {
            bits: BitVec::from_hex(&r.bits, schema.total_width)?,
            class_index: class_of(&r.class)?,
            fitness: Some(r.fitness),
            seq: r.seq,
        });
    }
    doc.config.validate()?;
    let clf = Classifier { rules, default_class, schema, cuts: doc.cuts, config: doc.config };
    clf.check_invariants().map_err(|e| Error::Model(e.to_string()))?;
    Ok(clf)
}

pub fn save<S: Scalar>(clf: &Classifier<S>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(clf)?)?;
    Ok(())
}

pub fn load<S: Scalar>(path: impl AsRef<Path>) -> Result<Classifier<S>> {
    from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_schema, ColumnData, Dataset, RawColumn, RawTable};
    use crate::learner::fit;

    fn trained<S: Scalar>() -> (Classifier<S>, Dataset<S>) {
        let t = RawTable::new(
            "toy",
            vec![
                RawColumn {
                    name: "outlook".into(),
                    data: ColumnData::Categorical {
                        levels: vec!["sun".into(), "rain".into(), "fog".into()],
                        codes: vec![Some(0), Some(1), Some(2), Some(0), None],
                    },
                },
                RawColumn {
                    name: "temp".into(),
                    data: ColumnData::Numeric(vec![
                        Some(S::lit(20.5)),
                        Some(S::lit(9.0)),
                        Some(S::lit(14.0)),
                        Some(S::lit(25.0)),
                        Some(S::lit(8.0)),
                    ]),
                },
            ],
            "play",
            vec!["yes".into(), "no".into()],
            vec![0, 1, 1, 0, 1],
        )
        .unwrap();
        let cuts = crate::discretize::discretize_table(&t);
        let data = Dataset::encode(&t, build_schema(&t, &cuts).unwrap()).unwrap();
        (fit(&data, &LearnerConfig::default()).unwrap(), data)
    }

    fn round_trip<S: Scalar>() {
        let (clf, data) = trained::<S>();
        let json = to_json(&clf).unwrap();
        let back: Classifier<S> = from_json(&json).unwrap();
        assert_eq!(back, clf);
        for inst in &data.instances {
            assert_eq!(back.predict(inst), clf.predict(inst));
        }
        assert_eq!(to_json(&back).unwrap(), json);
    }

    #[test]
    fn round_trip_f64() {
        round_trip::<f64>();
    }

    #[test]
    fn round_trip_f32() {
        round_trip::<f32>();
    }

    #[test]
    fn rejects_bad_documents() {
        let (clf, _) = trained::<f64>();
        let json = to_json(&clf).unwrap();
        let bumped = json.replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(matches!(from_json::<f64>(&bumped), Err(Error::Model(_))));
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["rules"][0]["bits"] = "0".into();
        assert!(from_json::<f64>(&v.to_string()).is_err());
        assert!(from_json::<f64>("{").is_err());
    }
}
