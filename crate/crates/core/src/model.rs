//! Agents, their cultural state and behavioral attributes, and the four
//! elementary update rules applied during an interaction.
//!
//! All functions here are pure given an explicit random stream. The
//! iteration loop lives in [`crate::engine`].

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible cultural tolerance. Acceptance divides by `d`.
pub const MIN_TOLERANCE: f64 = 0.01;

/// Largest double strictly below one; weights saturate here.
const WEIGHT_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// A point in the continuous cultural space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CulturalVector(Vec<f64>);

impl CulturalVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteComponent { index });
        }
        Ok(Self(components))
    }

    pub fn zeros(dims: usize) -> Self {
        Self(alloc::vec![0.0; dims])
    }

    pub fn splat(dims: usize, value: f64) -> Self {
        Self(alloc::vec![value; dims])
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_dims(other)?;
        Ok(euclidean(&self.0, &other.0))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::sqrt(sq)
}

/// Per-agent behavioral attributes: tolerance `d`, cultural state change
/// rate `r_s` and edge weight change rate `r_w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehavioralAttributes {
    pub d: f64,
    pub r_s: f64,
    pub r_w: f64,
}

impl BehavioralAttributes {
    /// Clamps raw draws into the admissible ranges: `d >= 0.01`,
    /// `r_s` in `[0, 1]`, `r_w >= 0`.
    pub fn clamped(d: f64, r_s: f64, r_w: f64) -> Self {
        Self {
            d: d.max(MIN_TOLERANCE),
            r_s: r_s.clamp(0.0, 1.0),
            r_w: r_w.max(0.0),
        }
    }
}

/// Initial group label. Fixed for the lifetime of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::A => "A",
            Group::B => "B",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: usize,
    pub group: Group,
    pub culture: CulturalVector,
    pub attrs: BehavioralAttributes,
}

/// Population means and across-agent standard deviations of the three
/// behavioral attributes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiversityParams {
    pub sigma_d: f64,
    pub sigma_s: f64,
    pub sigma_w: f64,
    pub mean_d: f64,
    pub mean_s: f64,
    pub mean_w: f64,
}

impl Default for DiversityParams {
    fn default() -> Self {
        Self {
            sigma_d: 0.0,
            sigma_s: 0.0,
            sigma_w: 0.0,
            mean_d: 0.5,
            mean_s: 0.5,
            mean_w: 0.5,
        }
    }
}

impl DiversityParams {
    pub fn with_sigmas(sigma_d: f64, sigma_s: f64, sigma_w: f64) -> Self {
        Self {
            sigma_d,
            sigma_s,
            sigma_w,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("sigma_d", self.sigma_d),
            ("sigma_s", self.sigma_s),
            ("sigma_w", self.sigma_w),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig {
                    field,
                    reason: alloc::format!("must be a finite value >= 0, got {v}"),
                });
            }
        }
        let means = [
            ("mean_d", self.mean_d),
            ("mean_s", self.mean_s),
            ("mean_w", self.mean_w),
        ];
        for (field, v) in means {
            if !v.is_finite() {
                return Err(Error::InvalidConfig {
                    field,
                    reason: alloc::format!("must be finite, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Probability that a focal agent with tolerance `d` accepts culture `v_j`:
/// `(1/2)^(|v_i - v_j| / d)`.
pub fn acceptance_probability(v_i: &CulturalVector, v_j: &CulturalVector, d: f64) -> Result<f64> {
    if d.is_nan() || d < MIN_TOLERANCE {
        return Err(Error::ToleranceBelowFloor(d));
    }
    let dist = v_i.distance(v_j)?;
    Ok(libm::exp2(-dist / d))
}

/// Convex mix `(1 - r_s) v_i + r_s v_j`.
pub fn mix_culture(v_i: &CulturalVector, v_j: &CulturalVector, r_s: f64) -> Result<CulturalVector> {
    v_i.check_dims(v_j)?;
    if r_s >= 1.0 {
        return Ok(v_j.clone());
    }
    let mixed = v_i
        .0
        .iter()
        .zip(&v_j.0)
        .map(|(a, b)| a + r_s * (b - a))
        .collect();
    Ok(CulturalVector(mixed))
}

fn check_weight(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange(w))
    }
}

fn logit(x: f64) -> f64 {
    libm::log(x) - libm::log1p(-x)
}

// Saturates at the representable ends of (0, 1) so results never leave it.
fn logistic(y: f64) -> f64 {
    let v = 1.0 / (1.0 + libm::exp(-y));
    v.clamp(f64::MIN_POSITIVE, WEIGHT_CEIL)
}

/// `logistic(logit(w) + r_w)`.
pub fn reinforce_weight(w: f64, r_w: f64) -> Result<f64> {
    check_weight(w)?;
    if r_w == 0.0 {
        return Ok(w);
    }
    Ok(logistic(logit(w) + r_w))
}

/// `logistic(logit(w) - r_w)`.
pub fn weaken_weight(w: f64, r_w: f64) -> Result<f64> {
    check_weight(w)?;
    if r_w == 0.0 {
        return Ok(w);
    }
    Ok(logistic(logit(w) - r_w))
}

/// Unclamped normal draws `(d, r_s, r_w)`, one standard normal per attribute.
pub fn sample_raw_attributes<R: Rng + ?Sized>(params: &DiversityParams, rng: &mut R) -> (f64, f64, f64) {
    let mut draw = |mean: f64, sigma: f64| {
        let z: f64 = StandardNormal.sample(rng);
        if sigma == 0.0 {
            mean
        } else {
            mean + sigma * z
        }
    };
    let d = draw(params.mean_d, params.sigma_d);
    let r_s = draw(params.mean_s, params.sigma_s);
    let r_w = draw(params.mean_w, params.sigma_w);
    (d, r_s, r_w)
}

/// Independent normal draws clamped into the admissible attribute ranges.
pub fn sample_attributes<R: Rng + ?Sized>(params: &DiversityParams, rng: &mut R) -> BehavioralAttributes {
    let (d, r_s, r_w) = sample_raw_attributes(params, rng);
    BehavioralAttributes::clamped(d, r_s, r_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cv(v: &[f64]) -> CulturalVector {
        CulturalVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn acceptance_at_zero_distance_is_one() {
        let a = cv(&[0.3, -1.0, 2.0]);
        assert_eq!(acceptance_probability(&a, &a, 0.01).unwrap(), 1.0);
        assert_eq!(acceptance_probability(&a, &a, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn acceptance_halves_per_tolerance() {
        let a = CulturalVector::zeros(10);
        let mut b = CulturalVector::zeros(10);
        b.as_mut_slice()[0] = 0.5;
        assert_eq!(acceptance_probability(&a, &b, 0.5).unwrap(), 0.5);
        b.as_mut_slice()[0] = 1.0;
        assert_eq!(acceptance_probability(&a, &b, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn acceptance_rejects_bad_inputs() {
        let a = cv(&[0.0, 0.0]);
        let b = cv(&[0.0, 0.0, 0.0]);
        assert!(matches!(
            acceptance_probability(&a, &b, 0.5),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(
            acceptance_probability(&a, &a, 0.005),
            Err(Error::ToleranceBelowFloor(_))
        ));
        assert!(acceptance_probability(&a, &a, f64::NAN).is_err());
    }

    #[test]
    fn mix_identity_full_and_midpoint() {
        let a = cv(&[0.1, 0.7, -3.0]);
        let b = cv(&[1.0, -2.0, 5.5]);
        assert_eq!(mix_culture(&a, &b, 0.0).unwrap(), a);
        assert_eq!(mix_culture(&a, &b, 1.0).unwrap(), b);
        let mid = mix_culture(&CulturalVector::zeros(10), &CulturalVector::splat(10, 1.0), 0.5).unwrap();
        assert!(mid.as_slice().iter().all(|&c| c == 0.5));
        assert!(mix_culture(&a, &cv(&[1.0]), 0.5).is_err());
    }

    #[test]
    fn non_finite_culture_rejected() {
        assert_eq!(
            CulturalVector::new(alloc::vec![0.0, f64::INFINITY]),
            Err(Error::NonFiniteComponent { index: 1 })
        );
    }

    // Reference values from 30-digit mpmath evaluation.
    #[test]
    fn weight_updates_match_high_precision_values() {
        assert!((reinforce_weight(0.5, 0.5).unwrap() - 0.622_459_331_201_854_6).abs() < 1e-15);
        assert!((weaken_weight(0.5, 0.5).unwrap() - 0.377_540_668_798_145_4).abs() < 1e-15);
        let w = weaken_weight(0.01, 0.5).unwrap();
        assert!((w - 0.006_089_265_991_852_82).abs() < 1e-15);
        assert!(w < 0.01);
        assert_eq!(reinforce_weight(0.5, 0.0).unwrap(), 0.5);
        assert_eq!(weaken_weight(0.9, 0.0).unwrap(), 0.9);
    }

    #[test]
    fn weight_updates_are_inverse_pairs() {
        for w in [0.02, 0.5, 0.9] {
            for r in [0.1, 0.5, 1.0] {
                let back = reinforce_weight(weaken_weight(w, r).unwrap(), r).unwrap();
                assert!((back - w).abs() < 1e-12, "w={w} r={r} back={back}");
                let back = weaken_weight(reinforce_weight(w, r).unwrap(), r).unwrap();
                assert!((back - w).abs() < 1e-12, "w={w} r={r} back={back}");
            }
        }
    }

    #[test]
    fn weight_out_of_range_is_error() {
        for w in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(reinforce_weight(w, 0.5).is_err());
            assert!(weaken_weight(w, 0.5).is_err());
        }
    }

    #[test]
    fn weights_saturate_below_one() {
        let mut w = 0.5;
        for _ in 0..200 {
            w = reinforce_weight(w, 2.0).unwrap();
        }
        assert!(w < 1.0);
        assert!(weaken_weight(w, 2.0).unwrap() < w);
    }

    #[test]
    fn zero_sigmas_give_means_exactly() {
        let params = DiversityParams::default();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample_attributes(&params, &mut rng);
            assert_eq!(a, BehavioralAttributes { d: 0.5, r_s: 0.5, r_w: 0.5 });
        }
    }

    #[test]
    fn clamping_floors() {
        let a = BehavioralAttributes::clamped(-0.2, 1.4, -0.3);
        assert_eq!(a, BehavioralAttributes { d: 0.01, r_s: 1.0, r_w: 0.0 });
        let b = BehavioralAttributes::clamped(0.7, -0.1, 0.2);
        assert_eq!(b, BehavioralAttributes { d: 0.7, r_s: 0.0, r_w: 0.2 });
    }

    #[test]
    fn raw_tolerance_draws_match_generator_moments() {
        let params = DiversityParams::with_sigmas(0.3, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_raw_attributes(&params, &mut rng).0).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        assert!((libm::sqrt(var) - 0.3).abs() < 0.02, "sd {}", libm::sqrt(var));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..n {
            let a = sample_attributes(&params, &mut rng);
            assert!(a.d >= MIN_TOLERANCE);
        }
    }

    #[test]
    fn invalid_sigma_rejected() {
        let p = DiversityParams::with_sigmas(-0.1, 0.0, 0.0);
        assert!(matches!(p.validate(), Err(Error::InvalidConfig { field: "sigma_d", .. })));
    }
}
