use super::schema::DatasetSchema;
use super::table::RawTable;
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedInstance {
    /// Feature bits plus the one-hot class bit.
    pub bits: BitVec,
    pub class_index: usize,
}

/// Training data encoded against a schema.
#[derive(Debug, Clone)]
pub struct Dataset<S> {
    pub schema: DatasetSchema<S>,
    pub instances: Vec<EncodedInstance>,
    pub majority_class: usize,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(schema: DatasetSchema<S>, instances: Vec<EncodedInstance>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::Empty("dataset has no instances".into()));
        }
        let m = schema.n_classes();
        let class_offset = schema.class_offset();
        for inst in &instances {
            if inst.bits.len() != schema.total_width {
                return Err(Error::WidthMismatch { expected: schema.total_width, found: inst.bits.len() });
            }
            if inst.class_index >= m
                || inst.bits.count_ones_in(class_offset, m) != 1
                || !inst.bits.get(class_offset + inst.class_index)
            {
                return Err(Error::SchemaMismatch("class segment must be one-hot at class_index".into()));
            }
        }
        let mut counts = vec![0usize; m];
        for inst in &instances {
            counts[inst.class_index] += 1;
        }
        // ties go to the lowest class index
        let majority_class = counts.iter().enumerate().fold(0, |best, (c, &n)| if n > counts[best] { c } else { best });
        Ok(Dataset { schema, instances, majority_class })
    }

    /// Encode every row of `table`; values outside the schema are errors.
    pub fn encode(table: &RawTable<S>, schema: DatasetSchema<S>) -> Result<Self> {
        let instances = {
            let enc = schema.encoder_for(table)?;
            let class_offset = schema.class_offset();
            let mut out = Vec::with_capacity(table.n_rows());
            for row in 0..table.n_rows() {
                let label = table.class_label(row);
                let class_index = schema
                    .class_index(label)
                    .ok_or_else(|| Error::SchemaMismatch(format!("class {label:?} not in schema")))?;
                let mut bits = enc.encode_features(table, row, true)?;
                bits.set(class_offset + class_index);
                out.push(EncodedInstance { bits, class_index });
            }
            out
        };
        Dataset::new(schema, instances)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.n_classes()];
        for inst in &self.instances {
            counts[inst.class_index] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::build_schema;
    use crate::data::table::{ColumnData, RawColumn};

    fn toy() -> RawTable<f64> {
        let levels = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        RawTable::new(
            "toy",
            vec![
                RawColumn {
                    name: "a".into(),
                    data: ColumnData::Categorical {
                        levels: levels(&["x", "y"]),
                        codes: vec![Some(0), Some(1), None, Some(0)],
                    },
                },
                RawColumn {
                    name: "b".into(),
                    data: ColumnData::Categorical {
                        levels: levels(&["u", "v", "w"]),
                        codes: vec![Some(2), Some(2), Some(1), Some(2)],
                    },
                },
            ],
            "class",
            levels(&["p", "q"]),
            vec![0, 1, 1, 0],
        )
        .unwrap()
    }

    #[test]
    fn one_bit_per_segment_and_round_trip() {
        let t = toy();
        let schema = build_schema(&t, &[]).unwrap();
        let data = Dataset::encode(&t, schema).unwrap();
        let s = &data.schema;
        for (row, inst) in data.instances.iter().enumerate() {
            for f in &s.features {
                assert_eq!(inst.bits.count_ones_in(f.bit_offset, f.width), 1);
            }
            assert_eq!(inst.bits.count_ones_in(s.class_offset(), s.n_classes()), 1);
            let decoded = s.decode(&inst.bits);
            for (col, labels) in t.features.iter().zip(decoded) {
                let expect = col.label(row).unwrap_or(crate::data::MISSING_LABEL);
                assert_eq!(labels, vec![expect]);
            }
        }
        assert_eq!(data.instances[0].bits, data.instances[3].bits);
        // offsets tile the width
        let mut next = 0;
        for f in &s.features {
            assert_eq!(f.bit_offset, next);
            next += f.width;
        }
        assert_eq!(next + s.n_classes(), s.total_width);
    }

    #[test]
    fn majority_ties_take_lowest_index() {
        let t = toy();
        let data = Dataset::encode(&t, build_schema(&t, &[]).unwrap()).unwrap();
        assert_eq!(data.class_counts(), vec![2, 2]);
        assert_eq!(data.majority_class, 0);
    }
}
