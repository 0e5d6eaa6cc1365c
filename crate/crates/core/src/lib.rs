//! Bit-vector rule induction.
//!
//! Training records become rules, rules are generalized one bit at a time
//! under a weighted accuracy/coverage fitness, same-class rules are merged
//! by bitwise OR, and the survivors form a first-match decision list. The
//! `racer` mode skips mutation and the generalization pass that precedes
//! composition.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.
//!
//! ```
//! use rumix::{data, LearnerConfig};
//!
//! let arff = "@relation toy
//! @attribute a {x,y}
//! @attribute b {u,v}
//! @attribute class {p,q}
//! @data
//! x,u,p
//! x,v,p
//! y,u,q
//! y,v,q
//! ";
//! let table: rumix::RawTable =
//!     data::load_dataset(arff.as_bytes(), data::Format::Arff, &Default::default()).unwrap();
//! let cuts = rumix::discretize::discretize_table(&table);
//! let schema = data::build_schema(&table, &cuts).unwrap();
//! let train = rumix::Dataset::encode(&table, schema).unwrap();
//! let clf = rumix::learner::fit(&train, &LearnerConfig::default()).unwrap();
//! assert_eq!(clf.render_rules()[0], "if a=x then p");
//! for inst in &train.instances {
//!     assert_eq!(clf.predict(inst), inst.class_index);
//! }
//! ```

pub mod bits;
pub mod data;
pub mod discretize;
pub mod error;
pub mod eval;
pub mod fitness;
pub mod learner;
pub mod model;
pub mod rule;
pub mod scalar;

pub use bits::BitVec;
pub use error::{Error, Result};
pub use learner::{Mode, MutationStrategy};
pub use scalar::Scalar;

pub type RawTable = data::RawTable<f64>;
pub type Dataset = data::Dataset<f64>;
pub type DatasetSchema = data::DatasetSchema<f64>;
pub type Rule = rule::Rule<f64>;
pub type WeightProfile = fitness::WeightProfile<f64>;
pub type FitnessBreakdown = fitness::FitnessBreakdown<f64>;
pub type LearnerConfig = learner::LearnerConfig<f64>;
pub type Classifier = learner::Classifier<f64>;
pub type SplitCut = discretize::SplitCut<f64>;
pub type CvConfig = eval::CvConfig<f64>;
