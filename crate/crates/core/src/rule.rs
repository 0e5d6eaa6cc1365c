//! Bit-vector rules and their algebra.
//!
//! A set bit in a feature segment means "this value is acceptable". A rule
//! covers an instance when every feature segment of the two intersects; the
//! class segment takes no part in coverage.

use crate::bits::BitVec;
use crate::data::{DatasetSchema, EncodedInstance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Rule<S> {
    pub bits: BitVec,
    pub class_index: usize,
    /// Main-profile fitness; `None` until evaluated.
    pub fitness: Option<S>,
    pub seq: u64,
}

impl<S: Scalar> Rule<S> {
    /// The initial rule of a training record: its bits verbatim.
    pub fn from_instance(inst: &EncodedInstance, seq: u64) -> Self {
        Rule { bits: inst.bits.clone(), class_index: inst.class_index, fitness: None, seq }
    }

    /// Checks the structural invariants: one-hot class segment at
    /// `class_index`, and at least one set bit in every feature segment.
    pub fn validate(&self, schema: &DatasetSchema<S>) -> Result<()> {
        if self.bits.len() != schema.total_width {
            return Err(Error::WidthMismatch { expected: schema.total_width, found: self.bits.len() });
        }
        let co = schema.class_offset();
        if self.class_index >= schema.n_classes()
            || self.bits.count_ones_in(co, schema.n_classes()) != 1
            || !self.bits.get(co + self.class_index)
        {
            return Err(Error::ClassConflict(format!("rule {} has a malformed class segment", self.seq)));
        }
        for f in &schema.features {
            if self.bits.count_ones_in(f.bit_offset, f.width) == 0 {
                return Err(Error::InvalidBit(format!("rule {} has an empty segment for {}", self.seq, f.name)));
            }
        }
        Ok(())
    }
}

/// Coverage test without width checks; see [`covers`].
#[inline]
pub fn covers_bits<S: Scalar>(rule: &BitVec, instance: &BitVec, schema: &DatasetSchema<S>) -> bool {
    schema.features.iter().all(|f| rule.intersects_in(instance, f.bit_offset, f.width))
}

pub fn covers<S: Scalar>(rule: &Rule<S>, instance: &BitVec, schema: &DatasetSchema<S>) -> Result<bool> {
    for w in [rule.bits.len(), instance.len()] {
        if w != schema.total_width {
            return Err(Error::WidthMismatch { expected: schema.total_width, found: w });
        }
    }
    Ok(covers_bits(&rule.bits, instance, schema))
}

/// Bitwise OR of two rules of the same class. The result is unevaluated and
/// carries `seq`.
pub fn compose<S: Scalar>(a: &Rule<S>, b: &Rule<S>, seq: u64) -> Result<Rule<S>> {
    if a.class_index != b.class_index {
        return Err(Error::ClassConflict(format!(
            "cannot compose rules of classes {} and {}",
            a.class_index, b.class_index
        )));
    }
    Ok(Rule { bits: a.bits.or(&b.bits), class_index: a.class_index, fitness: None, seq })
}

/// Copy of `rule` with the zero feature bit `bit` set.
pub fn flip_zero_bit<S: Scalar>(rule: &Rule<S>, bit: usize, schema: &DatasetSchema<S>) -> Result<Rule<S>> {
    if bit >= schema.total_width {
        return Err(Error::InvalidBit(format!("bit {bit} outside width {}", schema.total_width)));
    }
    if schema.is_class_bit(bit) {
        return Err(Error::ClassConflict(format!("bit {bit} lies in the class segment")));
    }
    if rule.bits.get(bit) {
        return Err(Error::InvalidBit(format!("bit {bit} is already set")));
    }
    let mut bits = rule.bits.clone();
    bits.set(bit);
    Ok(Rule { bits, class_index: rule.class_index, fitness: None, seq: rule.seq })
}

/// Every set bit of `specific` is set in `general`, within one class.
pub fn subsumes<S: Scalar>(general: &Rule<S>, specific: &Rule<S>) -> bool {
    general.class_index == specific.class_index && specific.bits.is_subset_of(&general.bits)
}

/// `if F2=clear and (F5=medium or high) then yes`; all-ones segments are
/// omitted.
pub fn render<S: Scalar>(rule: &Rule<S>, schema: &DatasetSchema<S>) -> String {
    let mut terms = Vec::new();
    for f in &schema.features {
        let set: Vec<&str> =
            (0..f.width).filter(|&k| rule.bits.get(f.bit_offset + k)).map(|k| f.domain[k].as_str()).collect();
        match set.len() {
            n if n == f.width => {}
            0 => terms.push(format!("{}=<none>", f.name)),
            1 => terms.push(format!("{}={}", f.name, set[0])),
            _ => terms.push(format!("({}={})", f.name, set.join(" or "))),
        }
    }
    let class = schema.class_labels.get(rule.class_index).map(String::as_str).unwrap_or("?");
    if terms.is_empty() {
        format!("if true then {class}")
    } else {
        format!("if {} then {class}", terms.join(" and "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureKind;

    fn weather_schema() -> DatasetSchema<f64> {
        let d = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
        DatasetSchema::new(
            vec![
                ("F1".into(), FeatureKind::Categorical, d("morning", "evening")),
                ("F2".into(), FeatureKind::Categorical, d("clear", "cloudy")),
                ("F3".into(), FeatureKind::Categorical, d("excellent", "poor")),
                ("F4".into(), FeatureKind::Categorical, d("warm", "cool")),
                ("F5".into(), FeatureKind::Categorical, d("medium", "high")),
            ],
            d("yes", "no"),
        )
        .unwrap()
    }

    fn rule(bits: &str, seq: u64) -> Rule<f64> {
        Rule { bits: BitVec::from_bit_str(bits).unwrap(), class_index: 0, fitness: None, seq }
    }

    #[test]
    fn worked_example_coverage() {
        let s = weather_schema();
        let r = rule("10 10 01 10 11 10", 0);
        let medium = BitVec::from_bit_str("10 10 01 10 10 00").unwrap();
        let evening = BitVec::from_bit_str("01 10 01 10 10 00").unwrap();
        assert!(covers(&r, &medium, &s).unwrap());
        assert!(!covers(&r, &evening, &s).unwrap());
        let unseen = BitVec::from_bit_str("10 00 01 10 10 00").unwrap();
        assert!(!covers(&r, &unseen, &s).unwrap());
        assert!(covers(&r, &BitVec::zeros(3), &s).is_err());
        assert!(r.validate(&s).is_ok());
    }

    #[test]
    fn worked_example_composition() {
        let s = weather_schema();
        let a = rule("10 10 01 10 11 10", 0);
        let b = rule("01 10 01 11 01 10", 1);
        let c = compose(&a, &b, 7).unwrap();
        assert_eq!(c.bits.to_bit_string(), "111001111110");
        assert_eq!(c.seq, 7);
        assert!(c.fitness.is_none());
        assert!(subsumes(&c, &a) && subsumes(&c, &b) && subsumes(&a, &a));
        assert!(!subsumes(&a, &c));
        assert_eq!(render(&c, &s), "if F2=clear and F3=poor then yes");
        assert_eq!(compose(&a, &a, 9).unwrap().bits, a.bits);

        let mut other = b.clone();
        other.class_index = 1;
        assert!(matches!(compose(&a, &other, 8), Err(Error::ClassConflict(_))));
        assert!(!subsumes(&c, &other));
    }

    #[test]
    fn flips() {
        let s = weather_schema();
        let r = rule("10 10 01 10 11 10", 3);
        let f = flip_zero_bit(&r, 3, &s).unwrap();
        assert_eq!(f.bits.to_bit_string(), "101101101110");
        assert_eq!(f.bits.count_ones(), r.bits.count_ones() + 1);
        assert_eq!(f.seq, 3);
        assert!(matches!(flip_zero_bit(&r, 11, &s), Err(Error::ClassConflict(_))));
        assert!(flip_zero_bit(&r, 0, &s).is_err());
        assert!(flip_zero_bit(&r, 12, &s).is_err());
    }

    #[test]
    fn rendering() {
        let s = weather_schema();
        assert_eq!(render(&rule("11 11 11 11 11 10", 0), &s), "if true then yes");
        assert_eq!(
            render(&rule("10 10 01 10 10 10", 0), &s),
            "if F1=morning and F2=clear and F3=poor and F4=warm and F5=medium then yes"
        );
        assert_eq!(render(&rule("10 11 11 11 11 10", 0), &s), "if F1=morning then yes");
        let mut multi = rule("11 11 11 11 11 01", 0);
        multi.class_index = 1;
        assert_eq!(render(&multi, &s), "if true then no");
    }
}
