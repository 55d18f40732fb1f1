//! Compatibility scoring between intrinsic and selectional features.
//!
//! Three layers, each built on the previous one:
//!
//! * [`feature_compat`]: two single features. Different attributes score 0;
//!   same attribute scores `±1` for integer polarities, or the product of the
//!   magnitudes when either side is real.
//! * [`structure_compat`]: the sum of feature scores over every
//!   (selectional, intrinsic) pair, divided by the size of the selectional
//!   (filtering) set. This is deliberately asymmetric.
//! * [`weighted_value`]: a structure score multiplied by a [`fading`] weight
//!   of the positional distance between predicate and candidate.

use crate::lexicon::{Feature, FeatureSet, ValueKind};

/// Distance fading `D(d) = gamma^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    gamma: f64,
}

impl Default for FadingConfig {
    fn default() -> Self {
        FadingConfig { gamma: 0.5 }
    }
}

impl FadingConfig {
    pub fn new(gamma: f64) -> Result<Self, CompatError> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(FadingConfig { gamma })
        } else {
            Err(CompatError::InvalidGamma(gamma))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CompatError {
    #[error("selectional feature set is empty")]
    EmptySelectional,
    #[error("an icon cannot fill a role of itself (position {0})")]
    SelfAssignment(usize),
    #[error("fading gamma must lie strictly between 0 and 1, got {0}")]
    InvalidGamma(f64),
}

/// Feature-level compatibility. Symmetric, bounded by 1 in magnitude.
pub fn feature_compat(f1: &Feature, f2: &Feature) -> f64 {
    if f1.attribute != f2.attribute {
        return 0.0;
    }
    let (v1, v2) = (f1.value, f2.value);
    match (v1.kind(), v2.kind()) {
        (ValueKind::Integer, ValueKind::Integer) => {
            if v1.magnitude() == v2.magnitude() {
                1.0
            } else {
                -1.0
            }
        }
        _ => v1.magnitude() * v2.magnitude(),
    }
}

/// How well `intrinsic` meets the expectations in `selectional`.
///
/// Walks the full `|selectional| x |intrinsic|` double loop; pairs with
/// different attributes contribute 0.
pub fn structure_compat(intrinsic: &FeatureSet, selectional: &FeatureSet) -> Result<f64, CompatError> {
    if selectional.is_empty() {
        return Err(CompatError::EmptySelectional);
    }
    let mut sum = 0.0;
    for wanted in selectional {
        for have in intrinsic {
            sum += feature_compat(have, wanted);
        }
    }
    Ok(sum / selectional.len() as f64)
}

/// `gamma^distance`, computed by repeated multiplication so that every call
/// with the same distance yields the same bits.
pub fn fading(distance: usize, cfg: &FadingConfig) -> f64 {
    let mut weight = 1.0;
    for _ in 0..distance {
        weight *= cfg.gamma;
    }
    weight
}

/// Distance-faded value of a candidate filling one role of a predicate.
///
/// Positions are 1-based sequence positions; `raw` is the structure score for
/// this (predicate, role, candidate) triple. The case type does not enter the
/// arithmetic and is not taken here.
pub fn weighted_value(
    predicate_pos: usize,
    candidate_pos: usize,
    raw: f64,
    cfg: &FadingConfig,
) -> Result<f64, CompatError> {
    if predicate_pos == candidate_pos {
        return Err(CompatError::SelfAssignment(predicate_pos));
    }
    Ok(fading(predicate_pos.abs_diff(candidate_pos), cfg) * raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::fixtures::feats;
    use crate::lexicon::{Feature, FeatureSet, FeatureValue, ValueKind};
    use alloc::vec::Vec;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn int(a: &str, v: f64) -> Feature {
        Feature::new(a, FeatureValue::new(v, ValueKind::Integer).unwrap())
    }

    fn real(a: &str, v: f64) -> Feature {
        Feature::new(a, FeatureValue::real(v).unwrap())
    }

    #[test]
    fn feature_level_cases() {
        assert_eq!(feature_compat(&int("human", 1.0), &int("human", 1.0)), 1.0);
        assert_eq!(feature_compat(&int("human", 1.0), &int("male", 1.0)), 0.0);
        assert_eq!(feature_compat(&int("human", 1.0), &int("human", -1.0)), -1.0);
        assert_eq!(feature_compat(&real("liquid", 0.5), &int("liquid", 1.0)), 0.5);
        // A real +1.0 still multiplies rather than taking the integer branch.
        assert_eq!(feature_compat(&real("liquid", 1.0), &int("liquid", -1.0)), -1.0);
        assert_eq!(feature_compat(&real("liquid", -0.5), &real("liquid", 0.5)), -0.25);
    }

    #[test]
    fn structure_level_examples() {
        let daddy = feats(&[("human", 1.0), ("male", 1.0)]);
        assert!((structure_compat(&daddy, &feats(&[("human", 1.0)])).unwrap() - 1.0).abs() < TOL);
        assert_eq!(structure_compat(&FeatureSet::new(), &feats(&[("human", 1.0)])).unwrap(), 0.0);
        let cat = feats(&[("animate", 1.0), ("human", -1.0)]);
        assert!((structure_compat(&cat, &feats(&[("animate", 1.0)])).unwrap() - 1.0).abs() < TOL);
        let milk = feats(&[("liquid", 1.0)]);
        assert_eq!(structure_compat(&milk, &feats(&[("animate", 1.0)])).unwrap(), 0.0);
        // Two expectations, one met, one violated: (1 - 1) / 2.
        let sf = feats(&[("animate", 1.0), ("human", 1.0)]);
        assert_eq!(structure_compat(&cat, &sf).unwrap(), 0.0);
        // Real-valued intrinsic: (0.5 * 1) / 1.
        let juice = feats(&[("liquid", 0.5)]);
        assert_eq!(structure_compat(&juice, &feats(&[("liquid", 1.0)])).unwrap(), 0.5);
    }

    #[test]
    fn empty_filter_is_a_contract_violation() {
        assert_eq!(
            structure_compat(&feats(&[("human", 1.0)]), &FeatureSet::new()),
            Err(CompatError::EmptySelectional)
        );
    }

    #[test]
    fn fading_values() {
        let cfg = FadingConfig::default();
        assert_eq!(fading(0, &cfg), 1.0);
        assert_eq!(fading(1, &cfg), 0.5);
        assert_eq!(fading(3, &cfg), 0.125);
        assert!(FadingConfig::new(1.0).is_err());
        assert!(FadingConfig::new(0.0).is_err());
        assert!(FadingConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn weighted_value_examples() {
        let cfg = FadingConfig::default();
        assert_eq!(weighted_value(2, 1, 1.0, &cfg).unwrap(), 0.5);
        assert_eq!(weighted_value(2, 3, 1.0, &cfg).unwrap(), 0.5);
        assert_eq!(weighted_value(2, 2, 1.0, &cfg), Err(CompatError::SelfAssignment(2)));
        assert_eq!(weighted_value(1, 9, 0.0, &cfg).unwrap(), 0.0);
    }

    fn arb_value() -> impl Strategy<Value = FeatureValue> {
        prop_oneof![
            Just(FeatureValue::plus()),
            Just(FeatureValue::minus()),
            (-1.0f64..=1.0).prop_map(|m| FeatureValue::real(m).unwrap()),
        ]
    }

    fn arb_feature() -> impl Strategy<Value = Feature> {
        (prop::sample::select(&["a", "b", "c", "d", "e"][..]), arb_value())
            .prop_map(|(a, v)| Feature::new(a, v))
    }

    fn arb_set(min: usize) -> impl Strategy<Value = FeatureSet> {
        prop::collection::btree_map(prop::sample::select(&["a", "b", "c", "d", "e"][..]), arb_value(), min..=5)
            .prop_map(|m| FeatureSet::from_features(m.into_iter().map(|(a, v)| Feature::new(a, v))).unwrap())
    }

    proptest! {
        #[test]
        fn feature_compat_is_symmetric_and_bounded(f1 in arb_feature(), f2 in arb_feature()) {
            let c = feature_compat(&f1, &f2);
            prop_assert_eq!(c, feature_compat(&f2, &f1));
            prop_assert!(c.abs() <= 1.0);
        }

        #[test]
        fn structure_compat_cross_symmetry(a in arb_set(1), b in arb_set(1)) {
            let ab = structure_compat(&a, &b).unwrap();
            let ba = structure_compat(&b, &a).unwrap();
            prop_assert!((ab * b.len() as f64 - ba * a.len() as f64).abs() < TOL);
        }

        #[test]
        fn structure_compat_bound(a in arb_set(0), b in arb_set(1)) {
            let c = structure_compat(&a, &b).unwrap();
            let bound = a.len().min(b.len()) as f64 / b.len() as f64;
            prop_assert!(c.abs() <= bound + TOL);
            prop_assert!(bound <= 1.0);
        }

        #[test]
        fn fading_strictly_decreasing(gamma in 0.01f64..0.99, d in 0usize..40) {
            let cfg = FadingConfig::new(gamma).unwrap();
            let (now, next) = (fading(d, &cfg), fading(d + 1, &cfg));
            prop_assert!(now > next);
            prop_assert!(now <= 1.0 && next > 0.0);
        }

        #[test]
        fn weighted_value_bounded_by_fading(
            p in 1usize..20, k in 1usize..20, raw in -1.0f64..=1.0, gamma in 0.01f64..0.99,
        ) {
            prop_assume!(p != k);
            let cfg = FadingConfig::new(gamma).unwrap();
            let w = weighted_value(p, k, raw, &cfg).unwrap();
            prop_assert!(w.abs() <= fading(p.abs_diff(k), &cfg) + TOL);
        }
    }

    #[test]
    fn structure_compat_matches_matching_attribute_sum() {
        // Independent route: only attribute-matched pairs can contribute.
        let i = feats(&[("a", 0.3), ("b", -1.0), ("c", 1.0)]);
        let s = feats(&[("b", 1.0), ("c", 0.5), ("z", 1.0)]);
        let matched: Vec<f64> = s
            .iter()
            .filter_map(|w| i.get(&w.attribute).map(|h| feature_compat(&Feature::new(w.attribute.clone(), *h), w)))
            .collect();
        let expected = matched.iter().sum::<f64>() / 3.0;
        assert!((structure_compat(&i, &s).unwrap() - expected).abs() < TOL);
        assert!((expected - (-1.0 + 0.5) / 3.0).abs() < TOL);
    }
}
