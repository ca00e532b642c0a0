//! Counterexample witnesses and their re-verification.
//!
//! Verification works from the witness alone: it re-runs the rule on the
//! witness profiles, checks that the recorded outcomes come back unchanged,
//! and re-checks the violated condition from scratch.

use serde::Serialize;

use super::{checks, space::Space, AuditError, AuditResult, AxiomId, SearchSpace, Verdict};
use crate::contacts::InteractionClass;
use crate::external_agg::{AggregationOutcome, DirectionPoint, DiscontinuityWitness, Outcome, RuleHandle};
use crate::order::{PairRel, WeakOrder};
use crate::profiles::{profile_half_distance, Profile};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A profile whose outcome is incomplete or intransitive.
    Outcome {
        profile: Profile,
        outcome: AggregationOutcome,
    },
    /// A profile on which the rule returns no outcome.
    Undefined { profile: Profile, error: String },
    /// Individuals agree on `pair` (or weakly agree with one strict), and the
    /// outcome does not follow.
    Unanimous {
        profile: Profile,
        outcome: AggregationOutcome,
        pair: [InteractionClass; 2],
    },
    /// `permuted[i]` is `profile[permutation[i]]`, with a different outcome.
    Permutation {
        profile: Profile,
        permutation: Vec<usize>,
        permuted: Profile,
        outcomes: [AggregationOutcome; 2],
    },
    /// Two profiles that look alike on the given pairs (as the axiom
    /// requires) while their outcomes differ there. `voter` (1-based) is the
    /// individual whose preference was raised, for responsiveness.
    PairConflict {
        profiles: [Profile; 2],
        pairs: [[InteractionClass; 2]; 2],
        outcomes: [AggregationOutcome; 2],
        voter: Option<usize>,
    },
    /// Individual `voter` (1-based) is never overruled anywhere in the
    /// searched space. The example shows them winning against another
    /// individual's opposite strict preference.
    NeverOverruled {
        voter: usize,
        example_profile: Option<Profile>,
        example_outcome: Option<AggregationOutcome>,
        example_pair: Option<[InteractionClass; 2]>,
    },
    /// `D(I, I') <= D(I, I'')` but `d(O, O') > d(O, O'')`; profiles are
    /// `[I, I', I'']`. Distances are Kendall distances.
    Proximity {
        profiles: [Profile; 3],
        outcomes: [AggregationOutcome; 3],
        profile_distances: [f64; 2],
        outcome_distances: [f64; 2],
    },
    Discontinuity(DiscontinuityWitness),
    /// Direction profiles and outputs showing a unanimity or anonymity
    /// violation on the sphere. A missing output means the rule failed.
    DirectionConflict {
        inputs: Vec<Vec<DirectionPoint>>,
        outputs: Vec<Option<DirectionPoint>>,
    },
    /// The outcome on `pair` differs from pairwise majority.
    MajorityDivergence {
        profile: Profile,
        outcome: AggregationOutcome,
        pair: [InteractionClass; 2],
        /// `[N(a > b), N(b > a)]`.
        counts: [usize; 2],
    },
    /// A premise of majority coincidence fails; the nested witness shows it.
    Premise { axiom: AxiomId, witness: Box<Witness> },
}

fn rerun(rule: &RuleHandle, p: &Profile) -> Option<Outcome> {
    match rule {
        RuleHandle::Ordinal(r) => r.aggregate(p.orders().ok()?).ok(),
        RuleHandle::Utility(r) => r.aggregate(p.utilities().ok()?).ok(),
        RuleHandle::Direction(_) => None,
    }
}

/// Re-runs the rule and demands the recorded outcome back.
fn reproduce(rule: &RuleHandle, p: &Profile, recorded: &AggregationOutcome) -> Option<Outcome> {
    let out = rerun(rule, p)?;
    (AggregationOutcome::new(rule.name(), p.universe(), &out) == *recorded).then_some(out)
}

fn voter_orders(p: &Profile) -> Vec<WeakOrder> {
    match p.orders() {
        Ok(o) => o.to_vec(),
        Err(_) => p.to_ordinal(0.0).orders().map(|o| o.to_vec()).unwrap_or_default(),
    }
}

fn pair_index(p: &Profile, pair: &[InteractionClass; 2]) -> Option<(usize, usize)> {
    let u = p.universe();
    Some((u.index_of(pair[0]).ok()?, u.index_of(pair[1]).ok()?))
}

/// Checks a result: a pass must carry no witness, a fail must carry one that
/// re-verifies.
pub fn verify(rule: &RuleHandle, result: &AuditResult) -> Result<bool, AuditError> {
    match (&result.verdict, &result.witness) {
        (Verdict::PassWithinSearch, w) => Ok(w.is_none()),
        (Verdict::Fail, None) => Ok(false),
        (Verdict::Fail, Some(w)) => verify_witness(rule, result.axiom, w, &result.search.space),
    }
}

fn verify_witness(rule: &RuleHandle, axiom: AxiomId, w: &Witness, space: &SearchSpace) -> Result<bool, AuditError> {
    let ok = match (axiom, w) {
        (AxiomId::Agreement, Witness::Outcome { profile, outcome }) => {
            reproduce(rule, profile, outcome).is_some_and(|o| !o.relation.is_complete())
        }
        (AxiomId::Transitivity, Witness::Outcome { profile, outcome }) => {
            reproduce(rule, profile, outcome).is_some_and(|o| !o.is_transitive())
                && !outcome.transitive
                && outcome.witness_holds(profile.universe())
        }
        (AxiomId::UnrestrictedDomain, Witness::Undefined { profile, .. }) => rerun(rule, profile).is_none(),
        (AxiomId::Unanimity | AxiomId::StrictUnanimity, Witness::Unanimous { profile, outcome, pair }) => {
            let (Some(out), Some((a, b))) = (reproduce(rule, profile, outcome), pair_index(profile, pair)) else {
                return Ok(false);
            };
            let rels: Vec<PairRel> = voter_orders(profile).iter().map(|w| w.pair(a, b)).collect();
            let got = out.relation.pair(a, b);
            let plain = rels.iter().all(|&r| r == rels[0]) && got != rels[0];
            let strong = axiom == AxiomId::StrictUnanimity
                && rels.iter().all(|&r| r != PairRel::Below)
                && rels.contains(&PairRel::Above)
                && got != PairRel::Above;
            plain || strong
        }
        (
            AxiomId::Anonymity,
            Witness::Permutation {
                profile,
                permutation,
                permuted,
                outcomes,
            },
        ) => {
            let mut sorted = permutation.clone();
            sorted.sort_unstable();
            let is_perm = sorted == (0..profile.n()).collect::<Vec<_>>();
            let same_members = is_perm
                && permuted.n() == profile.n()
                && match (profile.preferences(), permuted.preferences()) {
                    (crate::profiles::Preferences::Ordinal(x), crate::profiles::Preferences::Ordinal(y)) => {
                        permutation.iter().enumerate().all(|(i, &s)| y[i] == x[s])
                    }
                    (crate::profiles::Preferences::Utility(x), crate::profiles::Preferences::Utility(y)) => {
                        permutation.iter().enumerate().all(|(i, &s)| y[i] == x[s])
                    }
                    _ => false,
                };
            match (
                reproduce(rule, profile, &outcomes[0]),
                reproduce(rule, permuted, &outcomes[1]),
            ) {
                (Some(x), Some(y)) => same_members && x.relation != y.relation,
                _ => false,
            }
        }
        (
            AxiomId::Neutrality
            | AxiomId::Iia
            | AxiomId::UtilityIia
            | AxiomId::PositiveResponsiveness
            | AxiomId::MonotonicResponsiveness,
            Witness::PairConflict {
                profiles,
                pairs,
                outcomes,
                voter,
            },
        ) => verify_pair_conflict(rule, axiom, profiles, pairs, outcomes, *voter),
        (AxiomId::NonDictatorship, Witness::NeverOverruled { voter, .. }) => {
            if *voter == 0 {
                return Ok(false);
            }
            let s = Space::build(rule, space, AxiomId::NonDictatorship)?;
            *voter <= s.n && checks::first_overruled(&s, *voter - 1).is_none()
        }
        (
            AxiomId::ProximityPreservation,
            Witness::Proximity {
                profiles,
                outcomes,
                profile_distances,
                outcome_distances,
            },
        ) => {
            let outs: Vec<Option<Outcome>> = profiles
                .iter()
                .zip(outcomes)
                .map(|(p, o)| reproduce(rule, p, o))
                .collect();
            let [Some(o0), Some(o1), Some(o2)] = [&outs[0], &outs[1], &outs[2]] else {
                return Ok(false);
            };
            let d1 = profile_half_distance(&profiles[0], &profiles[1])? as f64 / 2.0;
            let d2 = profile_half_distance(&profiles[0], &profiles[2])? as f64 / 2.0;
            let e1 = o0.relation.half_distance(&o1.relation) as f64 / 2.0;
            let e2 = o0.relation.half_distance(&o2.relation) as f64 / 2.0;
            [d1, d2] == *profile_distances && [e1, e2] == *outcome_distances && d1 <= d2 && e1 > e2
        }
        (AxiomId::Continuity, Witness::Discontinuity(d)) => match rule {
            RuleHandle::Direction(r) => d.verify(r.as_ref()),
            _ => false,
        },
        (
            AxiomId::ContinuousUnanimity | AxiomId::ContinuousAnonymity,
            Witness::DirectionConflict { inputs, outputs },
        ) => match rule {
            RuleHandle::Direction(r) => {
                let again: Vec<Option<DirectionPoint>> = inputs.iter().map(|vs| r.aggregate(vs).ok()).collect();
                again == *outputs && checks::direction_violation(axiom, inputs, outputs)
            }
            _ => false,
        },
        (
            AxiomId::MajorityCoincidence,
            Witness::MajorityDivergence {
                profile,
                outcome,
                pair,
                counts,
            },
        ) => {
            let (Some(out), Some((a, b))) = (reproduce(rule, profile, outcome), pair_index(profile, pair)) else {
                return Ok(false);
            };
            let orders = voter_orders(profile);
            let above = orders.iter().filter(|w| w.prefers(a, b)).count();
            let below = orders.iter().filter(|w| w.prefers(b, a)).count();
            [above, below] == *counts && out.relation.weakly(a, b) != (above >= below)
        }
        (AxiomId::MajorityCoincidence, Witness::Premise { axiom, witness }) => {
            *axiom != AxiomId::MajorityCoincidence && verify_witness(rule, *axiom, witness, space)?
        }
        _ => false,
    };
    Ok(ok)
}

fn verify_pair_conflict(
    rule: &RuleHandle,
    axiom: AxiomId,
    profiles: &[Profile; 2],
    pairs: &[[InteractionClass; 2]; 2],
    outcomes: &[AggregationOutcome; 2],
    voter: Option<usize>,
) -> bool {
    let (Some(x), Some(y)) = (
        reproduce(rule, &profiles[0], &outcomes[0]),
        reproduce(rule, &profiles[1], &outcomes[1]),
    ) else {
        return false;
    };
    let (Some((a, b)), Some((c, d))) = (pair_index(&profiles[0], &pairs[0]), pair_index(&profiles[1], &pairs[1])) else {
        return false;
    };
    if profiles[0].n() != profiles[1].n() || a == b || c == d {
        return false;
    }
    let ox = voter_orders(&profiles[0]);
    let oy = voter_orders(&profiles[1]);
    match axiom {
        AxiomId::Neutrality => {
            ox.iter().zip(&oy).all(|(p, q)| p.pair(a, b) == q.pair(c, d))
                && x.relation.pair(a, b) != y.relation.pair(c, d)
        }
        AxiomId::Iia => {
            (a, b) == (c, d)
                && ox.iter().zip(&oy).all(|(p, q)| p.pair(a, b) == q.pair(a, b))
                && x.relation.pair(a, b) != y.relation.pair(a, b)
        }
        AxiomId::UtilityIia => {
            let (Ok(ux), Ok(uy)) = (profiles[0].utilities(), profiles[1].utilities()) else {
                return false;
            };
            (a, b) == (c, d)
                && ux.iter().zip(uy).all(|(p, q)| p[a] == q[a] && p[b] == q[b])
                && x.relation.pair(a, b) != y.relation.pair(a, b)
        }
        AxiomId::PositiveResponsiveness | AxiomId::MonotonicResponsiveness => {
            let Some(j) = voter.and_then(|v| v.checked_sub(1)) else {
                return false;
            };
            if (a, b) != (c, d) || j >= ox.len() {
                return false;
            }
            let others_same = (0..ox.len())
                .filter(|&i| i != j)
                .all(|i| ox[i].pair(a, b) == oy[i].pair(a, b));
            let raised = checks::raised(ox[j].pair(a, b), oy[j].pair(a, b));
            let premise = x.relation.weakly(a, b);
            let broken = if axiom == AxiomId::PositiveResponsiveness {
                !y.relation.strictly(a, b)
            } else {
                !y.relation.weakly(a, b)
            };
            others_same && raised && premise && broken
        }
        _ => false,
    }
}
