//! Domain restrictions under which majority aggregation behaves:
//! single-peaked profiles and quasi-transitive outcomes.
//!
//! Definitions are the textbook ones. A strict order is single-peaked on an
//! axis when, walking away from its top class in either direction along the
//! axis, every step goes to a strictly worse class. An outcome is
//! quasi-transitive when its strict part is transitive.

use serde::{Deserialize, Serialize};

use crate::contacts::InteractionClass;
use crate::external_agg::{may_rule, AggError, AggregationOutcome};
use crate::order::{next_permutation, WeakOrder};
use crate::profiles::{Profile, ProfileError};
use crate::universe::{Universe, UniverseError};

pub const AXIS_SEARCH_MAX_CLASSES: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum RestrictError {
    #[error("individual {0:?} has ties; single-peakedness is defined for strict orders only")]
    TiesUnsupported(String),
    #[error("axis search is exhaustive and limited to m <= {max}, got m = {m}")]
    TooLarge { m: usize, max: usize },
    #[error("axis is not a permutation of the universe")]
    BadAxis,
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Aggregation(#[from] AggError),
}

/// A left-to-right arrangement of every class in the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Axis(pub Vec<InteractionClass>);

impl Axis {
    pub fn from_indices(universe: &Universe, idx: &[usize]) -> Axis {
        Axis(universe.names(idx))
    }

    fn positions(&self, universe: &Universe) -> Result<Vec<usize>, RestrictError> {
        if self.0.len() != universe.len() {
            return Err(RestrictError::BadAxis);
        }
        let mut pos = vec![usize::MAX; universe.len()];
        for (i, &c) in self.0.iter().enumerate() {
            let a = universe.index_of(c)?;
            if pos[a] != usize::MAX {
                return Err(RestrictError::BadAxis);
            }
            pos[a] = i;
        }
        Ok(pos)
    }

    pub fn reversed(&self) -> Axis {
        Axis(self.0.iter().rev().copied().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeakViolation {
    pub owner: String,
    /// Class that is ranked above its neighbour nearer the peak.
    pub class: InteractionClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinglePeakedReport {
    pub single_peaked: bool,
    pub violations: Vec<PeakViolation>,
}

/// Index-level check. `axis` lists alternatives left to right. Returns the
/// first alternative breaking monotone decline away from the peak, if any.
pub fn first_peak_violation(order: &WeakOrder, axis: &[usize]) -> Option<usize> {
    let peak = (0..axis.len()).min_by_key(|&i| order.level(axis[i]))?;
    for i in (0..peak).rev() {
        if !order.prefers(axis[i + 1], axis[i]) {
            return Some(axis[i]);
        }
    }
    for i in peak + 1..axis.len() {
        if !order.prefers(axis[i - 1], axis[i]) {
            return Some(axis[i]);
        }
    }
    None
}

fn strict_orders(p: &Profile) -> Result<&[WeakOrder], RestrictError> {
    let orders = p.orders()?;
    if let Some(i) = orders.iter().position(|w| !w.is_strict()) {
        return Err(RestrictError::TiesUnsupported(p.owners()[i].clone()));
    }
    Ok(orders)
}

pub fn is_single_peaked_on(p: &Profile, axis: &Axis) -> Result<SinglePeakedReport, RestrictError> {
    let orders = strict_orders(p)?;
    let pos = axis.positions(p.universe())?;
    let mut seq = vec![0; pos.len()];
    for (a, &i) in pos.iter().enumerate() {
        seq[i] = a;
    }
    let violations: Vec<PeakViolation> = orders
        .iter()
        .zip(p.owners())
        .filter_map(|(w, owner)| {
            first_peak_violation(w, &seq).map(|a| PeakViolation {
                owner: owner.clone(),
                class: p.universe().class(a),
            })
        })
        .collect();
    Ok(SinglePeakedReport {
        single_peaked: violations.is_empty(),
        violations,
    })
}

/// Index-level axis search over all `m!/2` axes (an axis and its reverse are
/// the same restriction). Returns the lexicographically first admissible axis.
pub fn find_axis_indices(orders: &[WeakOrder], m: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let canonical = m < 2 || perm[0] < perm[m - 1];
        if canonical && orders.iter().all(|w| first_peak_violation(w, &perm).is_none()) {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

pub fn find_axis(p: &Profile) -> Result<Option<Axis>, RestrictError> {
    let orders = strict_orders(p)?;
    let m = p.m();
    if m > AXIS_SEARCH_MAX_CLASSES {
        return Err(RestrictError::TooLarge {
            m,
            max: AXIS_SEARCH_MAX_CLASSES,
        });
    }
    Ok(find_axis_indices(orders, m).map(|idx| Axis::from_indices(p.universe(), &idx)))
}

/// True iff the strict part of the outcome's relation is transitive.
pub fn is_quasi_transitive(outcome: &AggregationOutcome) -> bool {
    outcome.relation.strict_transitivity_violation().is_none()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictReport {
    pub single_peaked: bool,
    pub axis: Option<Axis>,
    /// Whether the majority outcome of the profile is quasi-transitive.
    pub quasi_transitive: bool,
}

/// Axis search plus the quasi-transitivity of the profile's majority outcome.
pub fn restrict_report(p: &Profile) -> Result<RestrictReport, RestrictError> {
    let axis = find_axis(p)?;
    let outcome = may_rule(p)?;
    Ok(RestrictReport {
        single_peaked: axis.is_some(),
        axis,
        quasi_transitive: is_quasi_transitive(&outcome),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::external_agg::{borda, Outcome};
    use crate::order::{all_strict_orders, Relation};
    use crate::profiles::{generate, single_peaked_axis, SynthKind, SynthSpec};

    fn universe() -> Universe {
        Universe::synthetic(3).unwrap()
    }

    fn profile(seqs: &[&[usize]]) -> Profile {
        Profile::from_orders(
            Universe::synthetic(seqs[0].len()).unwrap(),
            seqs.iter().map(|s| WeakOrder::strict(s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn definition_examples() {
        let axis = Axis::from_indices(&universe(), &[0, 1, 2]);
        // Y ≻ X ≻ Z
        let p = profile(&[&[1, 0, 2], &[1, 0, 2]]);
        assert!(is_single_peaked_on(&p, &axis).unwrap().single_peaked);
        // X ≻ Z ≻ Y has a valley at Y
        let p = profile(&[&[0, 2, 1], &[1, 0, 2]]);
        let r = is_single_peaked_on(&p, &axis).unwrap();
        assert!(!r.single_peaked);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].owner, "P1");
        assert_eq!(r.violations[0].class, universe().class(2));
    }

    #[test]
    fn ties_rejected() {
        let p = Profile::from_orders(universe(), vec![WeakOrder::from_levels(&[0, 0, 1]); 2]).unwrap();
        assert!(matches!(find_axis(&p), Err(RestrictError::TiesUnsupported(_))));
    }

    #[test]
    fn condorcet_has_no_axis_by_exhaustion() {
        let p = generate(&SynthSpec {
            kind: SynthKind::CondorcetCycle,
            m: 3,
            n: 3,
            seed: 0,
        })
        .unwrap();
        // oracle: every one of the 3!/2 axes has some individual with a valley
        for axis in all_strict_orders(3) {
            let seq = axis.sequence().unwrap();
            let ax = Axis::from_indices(p.universe(), &seq);
            assert!(!is_single_peaked_on(&p, &ax).unwrap().single_peaked);
        }
        assert_eq!(find_axis(&p).unwrap(), None);
    }

    #[test]
    fn unanimous_has_axis() {
        let p = profile(&[&[2, 0, 1], &[2, 0, 1], &[2, 0, 1]]);
        let axis = find_axis(&p).unwrap().unwrap();
        assert!(is_single_peaked_on(&p, &axis).unwrap().single_peaked);
    }

    #[test]
    fn too_large() {
        let seq: Vec<usize> = (0..9).collect();
        let p = profile(&[&seq, &seq]);
        assert!(matches!(find_axis(&p), Err(RestrictError::TooLarge { m: 9, .. })));
    }

    #[test]
    fn generator_axis_cross_validation() {
        for seed in 0..20 {
            let spec = SynthSpec {
                kind: SynthKind::SinglePeaked,
                m: 5,
                n: 50,
                seed,
            };
            let p = generate(&spec).unwrap();
            let axis = Axis::from_indices(p.universe(), &single_peaked_axis(5, seed));
            assert!(is_single_peaked_on(&p, &axis).unwrap().single_peaked);
            assert!(is_single_peaked_on(&p, &axis.reversed()).unwrap().single_peaked);
        }
    }

    #[test]
    fn quasi_transitivity_examples() {
        let u = universe();
        let p = profile(&[&[0, 1, 2], &[1, 0, 2]]);
        assert!(is_quasi_transitive(&borda(&p).unwrap()));
        let cond = generate(&SynthSpec {
            kind: SynthKind::CondorcetCycle,
            m: 3,
            n: 3,
            seed: 0,
        })
        .unwrap();
        assert!(!is_quasi_transitive(&may_rule(&cond).unwrap()));
        // X ≻ Z, X ~ Y, Y ~ Z
        let r = Relation::from_fn(3, |a, b| !(a == 2 && b == 0));
        let o = AggregationOutcome::new("custom".into(), &u, &Outcome::from_relation(r));
        assert!(!o.transitive);
        assert!(is_quasi_transitive(&o));
    }

    #[test]
    fn report_json() {
        let p = profile(&[&[1, 0, 2], &[0, 1, 2], &[1, 2, 0]]);
        let r = restrict_report(&p).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"single_peaked":true,"axis":["A-A","A-C","A-D"],"quasi_transitive":true}"#);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn strict_profile() -> impl Strategy<Value = Profile> {
            (2usize..6, 2usize..6).prop_flat_map(|(m, n)| {
                prop::collection::vec(Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), n).prop_map(move |seqs| {
                    Profile::from_orders(
                        Universe::synthetic(m).unwrap(),
                        seqs.iter().map(|s| WeakOrder::strict(s)).collect(),
                    )
                    .unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn found_axis_confirms(p in strict_profile()) {
                if let Some(axis) = find_axis(&p).unwrap() {
                    prop_assert!(is_single_peaked_on(&p, &axis).unwrap().single_peaked);
                }
            }

            #[test]
            fn reversal_invariance(p in strict_profile(), seed in 0u64..1000) {
                let axis = Axis::from_indices(p.universe(), &single_peaked_axis(p.m(), seed));
                prop_assert_eq!(
                    is_single_peaked_on(&p, &axis).unwrap().single_peaked,
                    is_single_peaked_on(&p, &axis.reversed()).unwrap().single_peaked
                );
            }
        }
    }
}
