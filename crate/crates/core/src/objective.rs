//! Scalar fitness from feature measurements and a realness score.
//!
//! Fitness is the product of one feature term per objective term times a
//! realness factor, and the search minimizes it. A minimized feature
//! contributes its value, a maximized one `1 - value`; GCF is mapped into
//! `[0, 1]` through `gcf_scale` first. The realness factor is
//! `1 + cutoff(|raw|, c, s)`: neutral while the image is more real than the
//! cut-off, growing with unrealness above it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aesthetics::{measure, FeatureId, FeatureValue};
use crate::genesis::{GenesisError, GeneratorEndpoint};
use crate::image::ImageError;
use crate::search::{LatentVector, Objective};

/// Default cut-off for single-feature runs.
pub const DEFAULT_SINGLE_CUTOFF: f64 = 0.02;
/// Default cut-off for feature-pair runs.
pub const DEFAULT_PAIR_CUTOFF: f64 = 0.008;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "min", alias = "minimize")]
    Minimize,
    #[serde(rename = "max", alias = "maximize")]
    Maximize,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Minimize, Direction::Maximize];

    pub fn short(self) -> &'static str {
        match self {
            Direction::Minimize => "Min",
            Direction::Maximize => "Max",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Direction {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimize" | "minimise" => Ok(Direction::Minimize),
            "max" | "maximize" | "maximise" => Ok(Direction::Maximize),
            _ => Err(ObjectiveError::Spec(format!("unknown direction {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub feature: FeatureId,
    pub direction: Direction,
}

impl Term {
    pub fn new(feature: FeatureId, direction: Direction) -> Self {
        Self { feature, direction }
    }
}

/// How the realness score enters the fitness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealnessMode {
    /// Multiply by `1 + cutoff(|raw|)`.
    #[default]
    Factor,
    /// Reject (infinite fitness) any candidate at or above the cut-off.
    /// Kept for comparison runs only.
    Discard,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub terms: Vec<Term>,
    #[serde(with = "crate::serde_inf")]
    pub cutoff_c: f64,
    #[serde(default)]
    pub stable_s: f64,
    #[serde(default = "one")]
    pub gcf_scale: f64,
    #[serde(default)]
    pub realness_mode: RealnessMode,
}

fn one() -> f64 {
    1.0
}

impl ObjectiveSpec {
    pub fn single(feature: FeatureId, direction: Direction) -> Self {
        Self {
            terms: vec![Term::new(feature, direction)],
            cutoff_c: DEFAULT_SINGLE_CUTOFF,
            stable_s: 0.0,
            gcf_scale: 1.0,
            realness_mode: RealnessMode::Factor,
        }
    }

    pub fn pair(first: Term, second: Term) -> Self {
        Self {
            terms: vec![first, second],
            cutoff_c: DEFAULT_PAIR_CUTOFF,
            ..Self::single(first.feature, first.direction)
        }
    }

    pub fn with_cutoff(mut self, cutoff_c: f64) -> Self {
        self.cutoff_c = cutoff_c;
        self
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        match self.terms.as_slice() {
            [_] => {}
            [a, b] if a.feature != b.feature => {}
            [_, _] => {
                return Err(ObjectiveError::Spec(
                    "the two features of a pair must differ".into(),
                ))
            }
            t => {
                return Err(ObjectiveError::Spec(format!(
                    "objective needs 1 or 2 terms, got {}",
                    t.len()
                )))
            }
        }
        if self.cutoff_c.is_nan() || self.cutoff_c < 0.0 {
            return Err(ObjectiveError::Spec(format!(
                "cut-off must be >= 0, got {}",
                self.cutoff_c
            )));
        }
        if !(self.stable_s.is_finite() && self.stable_s >= 0.0) {
            return Err(ObjectiveError::Spec(format!(
                "stable value must be finite and >= 0, got {}",
                self.stable_s
            )));
        }
        if !(self.gcf_scale.is_finite() && self.gcf_scale > 0.0) {
            return Err(ObjectiveError::Spec(format!(
                "gcf_scale must be positive, got {}",
                self.gcf_scale
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub fitness: f64,
    pub feature_values: Vec<FeatureValue>,
    pub realness_raw: f64,
    pub realness_factor: f64,
}

impl FitnessReport {
    /// Report for an objective without features or realness (plain benchmark functions).
    pub fn bare(fitness: f64) -> Self {
        Self {
            fitness,
            feature_values: Vec::new(),
            realness_raw: 0.0,
            realness_factor: 1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("objective specification error: {0}")]
    Spec(String),
    #[error("measure failed: {0}")]
    Measure(#[from] ImageError),
    #[error(transparent)]
    Endpoint(#[from] GenesisError),
}

/// `x` when `x >= c`, otherwise the stable value `s`.
pub fn cutoff(x: f64, c: f64, s: f64) -> f64 {
    if x >= c {
        x
    } else {
        s
    }
}

pub fn feature_term(value: FeatureValue, dir: Direction, spec: &ObjectiveSpec) -> f64 {
    if value.feature.is_bounded() {
        match dir {
            Direction::Minimize => value.value,
            Direction::Maximize => 1.0 - value.value,
        }
    } else {
        let scaled = value.value / spec.gcf_scale;
        match dir {
            Direction::Minimize => scaled.min(1.0),
            Direction::Maximize => 1.0 / (1.0 + scaled),
        }
    }
}

pub fn realness_factor(raw: f64, spec: &ObjectiveSpec) -> f64 {
    let x = raw.abs();
    match spec.realness_mode {
        RealnessMode::Factor => 1.0 + cutoff(x, spec.cutoff_c, spec.stable_s),
        RealnessMode::Discard => {
            if x >= spec.cutoff_c {
                f64::INFINITY
            } else {
                1.0
            }
        }
    }
}

pub fn combined_fitness(
    values: &[FeatureValue],
    raw_realness: f64,
    spec: &ObjectiveSpec,
) -> Result<FitnessReport, ObjectiveError> {
    if values.len() != spec.terms.len() {
        return Err(ObjectiveError::Spec(format!(
            "{} feature values for {} objective terms",
            values.len(),
            spec.terms.len()
        )));
    }
    let mut product = 1.0;
    for (value, term) in values.iter().zip(&spec.terms) {
        if value.feature != term.feature {
            return Err(ObjectiveError::Spec(format!(
                "value for {} supplied where {} was expected",
                value.feature, term.feature
            )));
        }
        product *= feature_term(*value, term.direction, spec);
    }
    let factor = realness_factor(raw_realness, spec);
    Ok(FitnessReport {
        fitness: product * factor,
        feature_values: values.to_vec(),
        realness_raw: raw_realness,
        realness_factor: factor,
    })
}

/// Generates the image for `z`, measures it and scores its realness.
pub fn evaluate(
    z: &LatentVector,
    endpoint: &GeneratorEndpoint,
    spec: &ObjectiveSpec,
) -> Result<FitnessReport, ObjectiveError> {
    let img = endpoint.generate(z)?;
    let values = spec
        .terms
        .iter()
        .map(|t| measure(t.feature, &img))
        .collect::<Result<Vec<_>, _>>()?;
    let raw = endpoint.realness(z, &img)?.raw;
    combined_fitness(&values, raw, spec)
}

/// [`Objective`] adapter pairing an endpoint with an objective spec.
pub struct LatentObjective<'a> {
    pub endpoint: &'a GeneratorEndpoint,
    pub spec: ObjectiveSpec,
}

impl<'a> LatentObjective<'a> {
    pub fn new(endpoint: &'a GeneratorEndpoint, spec: ObjectiveSpec) -> Result<Self, ObjectiveError> {
        spec.validate()?;
        Ok(Self { endpoint, spec })
    }
}

impl Objective for LatentObjective<'_> {
    fn evaluate(&self, z: &LatentVector) -> Result<FitnessReport, ObjectiveError> {
        evaluate(z, self.endpoint, &self.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(feature: FeatureId, value: f64) -> FeatureValue {
        FeatureValue { feature, value }
    }

    fn neutral(terms: Vec<Term>) -> ObjectiveSpec {
        ObjectiveSpec {
            terms,
            cutoff_c: f64::INFINITY,
            stable_s: 0.0,
            gcf_scale: 1.0,
            realness_mode: RealnessMode::Factor,
        }
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(cutoff(0.5, 0.02, 0.0), 0.5);
        assert_eq!(cutoff(0.01, 0.02, 0.0), 0.0);
        assert_eq!(cutoff(0.02, 0.02, 0.0), 0.02);
    }

    #[test]
    fn feature_term_examples() {
        let spec = ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize);
        assert_eq!(feature_term(fv(FeatureId::Hue, 0.3), Direction::Minimize, &spec), 0.3);
        assert_eq!(feature_term(fv(FeatureId::Hue, 0.3), Direction::Maximize, &spec), 0.7);
        assert_eq!(feature_term(fv(FeatureId::Gcf, 0.0), Direction::Maximize, &spec), 1.0);
        assert_eq!(feature_term(fv(FeatureId::Gcf, 3.0), Direction::Minimize, &spec), 1.0);
        assert_eq!(feature_term(fv(FeatureId::Gcf, 1.0), Direction::Maximize, &spec), 0.5);
        let scaled = ObjectiveSpec {
            gcf_scale: 0.5,
            ..spec
        };
        assert_eq!(feature_term(fv(FeatureId::Gcf, 0.25), Direction::Minimize, &scaled), 0.5);
    }

    #[test]
    fn realness_factor_examples() {
        let spec = ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize);
        assert_eq!(realness_factor(0.001, &spec), 1.0);
        assert_eq!(realness_factor(0.5, &spec), 1.5);
        assert_eq!(realness_factor(-0.5, &spec), 1.5);
        let off = spec.with_cutoff(f64::INFINITY);
        assert_eq!(realness_factor(0.5, &off), 1.0);
    }

    #[test]
    fn discard_mode_rejects_unreal() {
        let spec = ObjectiveSpec {
            realness_mode: RealnessMode::Discard,
            ..ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize)
        };
        assert_eq!(realness_factor(0.01, &spec), 1.0);
        assert_eq!(realness_factor(0.3, &spec), f64::INFINITY);
    }

    #[test]
    fn combined_examples() {
        let hue_min = neutral(vec![Term::new(FeatureId::Hue, Direction::Minimize)]);
        let r = combined_fitness(&[fv(FeatureId::Hue, 0.3)], 0.0, &hue_min).unwrap();
        assert_eq!(r.fitness, 0.3);

        let sat_sym = neutral(vec![
            Term::new(FeatureId::Saturation, Direction::Minimize),
            Term::new(FeatureId::Symmetry, Direction::Maximize),
        ]);
        let r = combined_fitness(
            &[fv(FeatureId::Saturation, 0.2), fv(FeatureId::Symmetry, 0.5)],
            0.0,
            &sat_sym,
        )
        .unwrap();
        assert!((r.fitness - 0.1).abs() < 1e-15);

        // factor 1.2 from a raw score of 0.2 above a 0.02 cut-off
        let hue_sat = ObjectiveSpec {
            cutoff_c: 0.02,
            ..neutral(vec![
                Term::new(FeatureId::Hue, Direction::Maximize),
                Term::new(FeatureId::Saturation, Direction::Maximize),
            ])
        };
        let r = combined_fitness(
            &[fv(FeatureId::Hue, 0.4), fv(FeatureId::Saturation, 0.25)],
            0.2,
            &hue_sat,
        )
        .unwrap();
        assert!((r.realness_factor - 1.2).abs() < 1e-15);
        assert!((r.fitness - 0.54).abs() < 1e-12);
    }

    #[test]
    fn combined_rejects_mismatch() {
        let spec = neutral(vec![Term::new(FeatureId::Hue, Direction::Minimize)]);
        assert!(matches!(
            combined_fitness(&[], 0.0, &spec),
            Err(ObjectiveError::Spec(_))
        ));
        assert!(matches!(
            combined_fitness(&[fv(FeatureId::Saturation, 0.1)], 0.0, &spec),
            Err(ObjectiveError::Spec(_))
        ));
    }

    #[test]
    fn spec_validation() {
        let hue = Term::new(FeatureId::Hue, Direction::Minimize);
        assert!(ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize).validate().is_ok());
        assert!(ObjectiveSpec::pair(hue, hue).validate().is_err());
        assert!(neutral(vec![]).validate().is_err());
        assert!(neutral(vec![hue; 3]).validate().is_err());
        assert!(ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize)
            .with_cutoff(-0.1)
            .validate()
            .is_err());
        assert_eq!(
            ObjectiveSpec::pair(hue, Term::new(FeatureId::Gcf, Direction::Maximize)).cutoff_c,
            DEFAULT_PAIR_CUTOFF
        );
    }

    #[test]
    fn spec_serde_handles_infinite_cutoff() {
        let spec = ObjectiveSpec::single(FeatureId::Gcf, Direction::Maximize).with_cutoff(f64::INFINITY);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"inf\""));
        let back: ObjectiveSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    proptest! {
        #[test]
        fn factor_is_at_least_one(raw in -10.0f64..10.0, c in 0.0f64..1.0) {
            let spec = ObjectiveSpec::single(FeatureId::Hue, Direction::Minimize).with_cutoff(c);
            let f = realness_factor(raw, &spec);
            prop_assert!(f >= 1.0);
            if raw.abs() < c {
                prop_assert_eq!(f, 1.0);
            }
        }

        #[test]
        fn ranking_follows_raw_value(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let min = neutral(vec![Term::new(FeatureId::Saturation, Direction::Minimize)]);
            let max = neutral(vec![Term::new(FeatureId::Saturation, Direction::Maximize)]);
            let fit = |spec: &ObjectiveSpec, v| {
                combined_fitness(&[fv(FeatureId::Saturation, v)], 0.0, spec).unwrap().fitness
            };
            prop_assert_eq!(a < b, fit(&min, a) < fit(&min, b));
            prop_assert_eq!(a < b, fit(&max, a) > fit(&max, b));
        }

        #[test]
        fn fitness_bounded_and_monotone(
            v1 in 0.0f64..1.0, v2 in 0.0f64..1.0, bump in 0.0f64..0.5,
            d1 in any::<bool>(), d2 in any::<bool>(), raw in 0.0f64..2.0,
        ) {
            let dir = |b: bool| if b { Direction::Maximize } else { Direction::Minimize };
            let spec = ObjectiveSpec {
                cutoff_c: 0.02,
                ..neutral(vec![
                    Term::new(FeatureId::Hue, dir(d1)),
                    Term::new(FeatureId::Symmetry, dir(d2)),
                ])
            };
            let values = [fv(FeatureId::Hue, v1), fv(FeatureId::Symmetry, v2)];
            let r = combined_fitness(&values, raw, &spec).unwrap();
            prop_assert!(r.fitness >= 0.0 && r.fitness <= r.realness_factor);
            let t1 = feature_term(values[0], dir(d1), &spec);
            let t2 = feature_term(values[1], dir(d2), &spec);
            prop_assert!((0.0..=1.0).contains(&t1) && (0.0..=1.0).contains(&t2));
            prop_assert!((r.fitness - t1 * t2 * r.realness_factor).abs() < 1e-12);
            // raising the first term never lowers fitness
            let bumped_value = if d1 { (v1 - bump).max(0.0) } else { (v1 + bump).min(1.0) };
            let r2 = combined_fitness(&[fv(FeatureId::Hue, bumped_value), values[1]], raw, &spec).unwrap();
            prop_assert!(r2.fitness >= r.fitness - 1e-15);
        }
    }
}
