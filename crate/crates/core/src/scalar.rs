use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real-number type the learner computes with.
///
/// Everything numeric in the pipeline (raw numeric cells, split points,
/// entropies, weight profiles, fitness) is expressed in one `Scalar`. Counts
/// stay integral; they are converted only when a ratio is formed.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + Default + Serialize + DeserializeOwned + Send + Sync + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as float")
    }

    fn parse_finite(s: &str) -> Option<Self> {
        let v: f64 = s.trim().parse().ok()?;
        if v.is_finite() {
            Self::from_f64(v)
        } else {
            None
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Ratio of two counts. `den` must be nonzero.
#[inline]
pub(crate) fn ratio<S: Scalar>(num: usize, den: usize) -> S {
    debug_assert!(den > 0);
    S::from_count(num) / S::from_count(den)
}
