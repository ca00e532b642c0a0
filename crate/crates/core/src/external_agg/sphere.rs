//! Preferences as unit directions and the normalized-mean aggregator.

use serde::Serialize;

use super::AggError;
use crate::internal_agg::UtilityVector;
use crate::profiles::{Mode, Profile};
use crate::rng::Prng;

const UNIT_TOLERANCE: f64 = 1e-9;
const DEGENERATE_NORM: f64 = 1e-12;

/// A point on the unit sphere in `m` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DirectionPoint(Vec<f64>);

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl DirectionPoint {
    /// Accepts coordinates whose Euclidean norm is 1 within 1e-9.
    pub fn new(coordinates: Vec<f64>) -> Result<Self, AggError> {
        let n = norm(&coordinates);
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(AggError::NotUnit(n));
        }
        Ok(DirectionPoint(coordinates))
    }

    /// Scales a non-zero vector to unit length.
    pub fn normalize(v: &[f64]) -> Result<Self, AggError> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(AggError::ZeroVector);
        }
        Ok(DirectionPoint(v.iter().map(|x| x / n).collect()))
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &DirectionPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// The direction in which the protein's linear utility increases.
pub fn direction_from_utility(u: &UtilityVector) -> Result<DirectionPoint, AggError> {
    DirectionPoint::normalize(u.values())
}

/// Normalized arithmetic mean of the directions.
///
/// Inputs are summed in a canonical (lexicographic) order, so permuting them
/// gives a bit-identical result.
pub fn aggregate_directions(vs: &[DirectionPoint]) -> Result<DirectionPoint, AggError> {
    let first = vs.first().ok_or(AggError::Empty)?;
    let dim = first.dimension();
    if let Some(v) = vs.iter().find(|v| v.dimension() != dim) {
        return Err(AggError::DimensionMismatch(dim, v.dimension()));
    }
    let mut sorted: Vec<&DirectionPoint> = vs.iter().collect();
    sorted.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut mean = vec![0.0; dim];
    for v in sorted {
        for (m, x) in mean.iter_mut().zip(&v.0) {
            *m += x;
        }
    }
    let n = vs.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    let len = norm(&mean);
    if len < DEGENERATE_NORM {
        return Err(AggError::AntipodalDegenerate { norm: len });
    }
    // unanimous inputs come back exactly
    if vs.iter().all(|v| v == first) {
        return Ok(first.clone());
    }
    Ok(DirectionPoint(mean.iter().map(|x| x / len).collect()))
}

/// Mean direction of a utility profile: each individual's utility vector is
/// normalized, then the directions are averaged.
pub fn mean_direction(p: &Profile) -> Result<DirectionPoint, AggError> {
    let rows = p.utilities().map_err(|_| AggError::WrongMode {
        rule: MeanDirection.name(),
        expected: Mode::Utility,
    })?;
    let vs = rows
        .iter()
        .map(|r| DirectionPoint::normalize(r))
        .collect::<Result<Vec<_>, _>>()?;
    aggregate_directions(&vs)
}

/// An aggregator from directions to a direction.
pub trait DirectionRule: Send + Sync {
    fn name(&self) -> String;
    fn aggregate(&self, vs: &[DirectionPoint]) -> Result<DirectionPoint, AggError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanDirection;

impl DirectionRule for MeanDirection {
    fn name(&self) -> String {
        "mean-direction".into()
    }

    fn aggregate(&self, vs: &[DirectionPoint]) -> Result<DirectionPoint, AggError> {
        aggregate_directions(vs)
    }
}

/// Two nearby direction profiles whose aggregates are far apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscontinuityWitness {
    pub rule: String,
    pub dimension: usize,
    pub epsilon: f64,
    /// The coordinate plane the construction lives in.
    pub plane: [usize; 2],
    pub seed: u64,
    pub profile_a: Vec<DirectionPoint>,
    pub profile_b: Vec<DirectionPoint>,
    pub output_a: DirectionPoint,
    pub output_b: DirectionPoint,
    /// Sum of Euclidean distances between aligned individuals.
    pub input_distance: f64,
    pub output_distance: f64,
}

impl DiscontinuityWitness {
    /// Re-runs `rule` on both profiles and checks the recorded outputs and distances.
    pub fn verify(&self, rule: &dyn DirectionRule) -> bool {
        let (Ok(a), Ok(b)) = (rule.aggregate(&self.profile_a), rule.aggregate(&self.profile_b)) else {
            return false;
        };
        let input: f64 = self
            .profile_a
            .iter()
            .zip(&self.profile_b)
            .map(|(x, y)| x.distance(y))
            .sum();
        a == self.output_a
            && b == self.output_b
            && (input - self.input_distance).abs() <= 1e-12
            && (a.distance(&b) - self.output_distance).abs() <= 1e-12
            && self.input_distance <= 2.0 * self.epsilon
            && self.output_distance >= 1.0
    }
}

/// Builds a discontinuity witness for `rule` next to an antipodal pair.
///
/// Individual 1 sits at `e_p`; individual 2 sits at `-cos ε e_p ± sin ε e_q`
/// in a coordinate plane `(p, q)` chosen from `seed` (always `(0, 1)` when
/// `m = 2`). The two profiles differ by `2 sin ε ≤ 2ε` while their means
/// point to opposite sides of the plane.
pub fn continuity_probe_with(
    rule: &dyn DirectionRule,
    m: usize,
    epsilon: f64,
    seed: u64,
) -> Result<DiscontinuityWitness, AggError> {
    if m < 2 {
        return Err(AggError::BadProbe(format!("dimension must be at least 2, got {m}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(AggError::BadProbe(format!("epsilon must lie in (0, 0.1), got {epsilon}")));
    }
    let mut rng = Prng::new(seed);
    let (p, q) = if m == 2 {
        (0, 1)
    } else {
        let a = rng.below(m);
        let mut b = rng.below(m - 1);
        if b >= a {
            b += 1;
        }
        (a.min(b), a.max(b))
    };
    let axis = |coefs: &[(usize, f64)]| {
        let mut v = vec![0.0; m];
        for &(i, c) in coefs {
            v[i] = c;
        }
        DirectionPoint::normalize(&v)
    };
    let (s, c) = epsilon.sin_cos();
    let v1 = axis(&[(p, 1.0)])?;
    let v2 = axis(&[(p, -c), (q, s)])?;
    let v2b = axis(&[(p, -c), (q, -s)])?;
    let profile_a = vec![v1.clone(), v2.clone()];
    let profile_b = vec![v1, v2b.clone()];
    let output_a = rule.aggregate(&profile_a)?;
    let output_b = rule.aggregate(&profile_b)?;
    Ok(DiscontinuityWitness {
        rule: rule.name(),
        dimension: m,
        epsilon,
        plane: [p, q],
        seed,
        input_distance: v2.distance(&v2b),
        output_distance: output_a.distance(&output_b),
        profile_a,
        profile_b,
        output_a,
        output_b,
    })
}

/// [`continuity_probe_with`] for the mean-direction aggregator.
pub fn continuity_probe(m: usize, epsilon: f64, seed: u64) -> Result<DiscontinuityWitness, AggError> {
    continuity_probe_with(&MeanDirection, m, epsilon, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;

    fn dp(v: &[f64]) -> DirectionPoint {
        DirectionPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn direction_examples() {
        let u = UtilityVector::new("p", Universe::synthetic(2).unwrap(), vec![3.0, 4.0]).unwrap();
        let d = direction_from_utility(&u).unwrap();
        assert!((d.coordinates()[0] - 0.6).abs() < 1e-15);
        assert!((d.coordinates()[1] - 0.8).abs() < 1e-15);
        let twice = UtilityVector::new("p", Universe::synthetic(2).unwrap(), vec![6.0, 8.0]).unwrap();
        assert_eq!(direction_from_utility(&twice).unwrap(), d);
        let zero = UtilityVector::new("p", Universe::synthetic(2).unwrap(), vec![0.0, 0.0]).unwrap();
        assert!(matches!(direction_from_utility(&zero), Err(AggError::ZeroVector)));
        assert!(DirectionPoint::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let out = aggregate_directions(&[dp(&[1.0, 0.0]), dp(&[0.0, 1.0])]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.coordinates()[0] - h).abs() < 1e-15);
        assert!((out.coordinates()[1] - h).abs() < 1e-15);
        let v = DirectionPoint::normalize(&[0.3, -0.2, 0.9]).unwrap();
        assert_eq!(aggregate_directions(&[v.clone(), v.clone(), v.clone()]).unwrap(), v);
        assert!(matches!(
            aggregate_directions(&[dp(&[1.0, 0.0]), dp(&[-1.0, 0.0])]),
            Err(AggError::AntipodalDegenerate { .. })
        ));
        assert!(matches!(aggregate_directions(&[]), Err(AggError::Empty)));
        assert!(matches!(
            aggregate_directions(&[dp(&[1.0, 0.0]), dp(&[1.0, 0.0, 0.0])]),
            Err(AggError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn probe_m2_matches_hand_computation() {
        let eps = 1e-3;
        let w = continuity_probe(2, eps, 0).unwrap();
        assert_eq!(w.plane, [0, 1]);
        // independent evaluation of the normalized mean of (1,0) and (-cos e, ±sin e)
        let (s, c) = (eps.sin(), eps.cos());
        let mean = [(1.0 - c) / 2.0, s / 2.0];
        let len = (mean[0] * mean[0] + mean[1] * mean[1]).sqrt();
        let expect_a = [mean[0] / len, mean[1] / len];
        assert!((w.output_a.coordinates()[0] - expect_a[0]).abs() < 1e-9);
        assert!((w.output_a.coordinates()[1] - expect_a[1]).abs() < 1e-9);
        assert!((w.output_b.coordinates()[1] + expect_a[1]).abs() < 1e-9);
        let expect_out = 2.0 * expect_a[1];
        assert!((w.output_distance - expect_out).abs() < 1e-9);
        assert!(w.output_distance > 1.999);
        assert!((w.input_distance - 2.0 * s).abs() < 1e-15);
        assert!(w.input_distance <= 2.0 * eps);
        assert!(w.verify(&MeanDirection));
    }

    #[test]
    fn probe_m3_in_a_coordinate_plane() {
        for seed in 0..10 {
            let w = continuity_probe(3, 1e-3, seed).unwrap();
            assert!(w.plane[0] < w.plane[1] && w.plane[1] < 3);
            assert!(w.output_distance >= 1.0);
            assert!(w.input_distance <= 2e-3);
            assert!(w.verify(&MeanDirection));
        }
        assert!(continuity_probe(1, 1e-3, 0).is_err());
        assert!(continuity_probe(2, 0.1, 0).is_err());
        assert!(continuity_probe(2, 0.0, 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn direction(m: usize) -> impl Strategy<Value = DirectionPoint> {
            prop::collection::vec(-1.0f64..1.0, m)
                .prop_filter("non-zero", |v| norm(v) > 1e-3)
                .prop_map(|v| DirectionPoint::normalize(&v).unwrap())
        }

        fn profile() -> impl Strategy<Value = Vec<DirectionPoint>> {
            (2usize..6, 1usize..6).prop_flat_map(|(m, n)| prop::collection::vec(direction(m), n))
        }

        proptest! {
            #[test]
            fn unit_norm_and_permutation_invariant(vs in profile(), rot in 0usize..6) {
                if let Ok(out) = aggregate_directions(&vs) {
                    prop_assert!((norm(out.coordinates()) - 1.0).abs() < 1e-9);
                    let mut rotated = vs.clone();
                    let k = rot % vs.len();
                    rotated.rotate_left(k);
                    rotated.reverse();
                    prop_assert_eq!(aggregate_directions(&rotated).unwrap(), out);
                }
            }
        }
    }
}
