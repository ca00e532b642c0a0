//! The per-axiom searches.
//!
//! Profiles are visited in space order (mixed radix over ballots, first
//! individual most significant, when exhaustive) and pairs in index order, so
//! the first witness found is the reported one.

use std::collections::HashMap;

use super::space::Space;
use super::witness::Witness;
use super::{
    AuditError, AuditResult, AxiomId, Domain, SearchReport, SearchSpace, Verdict, PAIR_BUDGET, PROXIMITY_CAVEAT,
};
use crate::contacts::InteractionClass;
use crate::external_agg::{continuity_probe_with, DirectionPoint, DirectionRule, Outcome, RuleHandle};
use crate::order::{kendall_half_units, permutations, PairRel, Relation};
use crate::rng::Prng;

pub(crate) const DEFAULT_COINCIDENCE_TRIALS: usize = 10_000;

/// Agreement tolerance for direction outputs.
const SPHERE_TOLERANCE: f64 = 1e-12;

fn result(s: &Space, axiom: AxiomId, witness: Option<Witness>, notes: Vec<String>) -> AuditResult {
    AuditResult {
        rule: s.rule.name(),
        axiom,
        verdict: if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::PassWithinSearch
        },
        witness,
        search: SearchReport {
            space: s.spec.clone(),
            profiles_examined: s.examined(),
            exhausted: s.spec.is_exhaustive(),
        },
        seed: s.spec.seed(),
        notes,
    }
}

pub(crate) fn run(s: &Space, axiom: AxiomId) -> AuditResult {
    let mut notes = Vec::new();
    let witness = match axiom {
        AxiomId::Agreement => agreement(s),
        AxiomId::Transitivity => transitivity(s),
        AxiomId::UnrestrictedDomain => unrestricted(s),
        AxiomId::Unanimity => unanimity(s, false),
        AxiomId::StrictUnanimity => unanimity(s, true),
        AxiomId::Anonymity => anonymity(s),
        AxiomId::NonDictatorship => non_dictatorship(s),
        AxiomId::Neutrality => pair_consistency(s, PairKey::Neutral),
        AxiomId::Iia => pair_consistency(s, PairKey::SamePair),
        AxiomId::UtilityIia => pair_consistency(s, PairKey::SameUtilities),
        AxiomId::PositiveResponsiveness => responsiveness(s, true),
        AxiomId::MonotonicResponsiveness => responsiveness(s, false),
        AxiomId::ProximityPreservation => {
            notes.push(PROXIMITY_CAVEAT.to_string());
            proximity(s)
        }
        AxiomId::Continuity
        | AxiomId::ContinuousUnanimity
        | AxiomId::ContinuousAnonymity
        | AxiomId::MajorityCoincidence => unreachable!("dispatched elsewhere"),
    };
    result(s, axiom, witness, notes)
}

fn classes(s: &Space, a: usize, b: usize) -> [InteractionClass; 2] {
    [s.universe.class(a), s.universe.class(b)]
}

fn outcome_witness(s: &Space, i: usize, out: &Outcome) -> Witness {
    Witness::Outcome {
        profile: s.profile(&s.profiles[i]),
        outcome: s.outcome(out),
    }
}

fn ok_outcomes<'a>(s: &'a Space) -> impl Iterator<Item = (usize, &'a Outcome)> + 'a {
    s.outcomes.iter().enumerate().filter_map(|(i, o)| o.as_ref().ok().map(|o| (i, o)))
}

fn agreement(s: &Space) -> Option<Witness> {
    ok_outcomes(s)
        .find(|(_, o)| !o.relation.is_complete())
        .map(|(i, o)| outcome_witness(s, i, o))
}

fn transitivity(s: &Space) -> Option<Witness> {
    ok_outcomes(s)
        .find(|(_, o)| !o.is_transitive())
        .map(|(i, o)| outcome_witness(s, i, o))
}

fn unrestricted(s: &Space) -> Option<Witness> {
    s.outcomes.iter().enumerate().find_map(|(i, o)| {
        o.as_ref().err().map(|e| Witness::Undefined {
            profile: s.profile(&s.profiles[i]),
            error: e.clone(),
        })
    })
}

fn unanimity(s: &Space, strong: bool) -> Option<Witness> {
    for (i, out) in ok_outcomes(s) {
        let codes = &s.profiles[i];
        for a in 0..s.m {
            for b in 0..s.m {
                if a == b {
                    continue;
                }
                let rels: Vec<PairRel> = codes.iter().map(|&c| s.order(c).pair(a, b)).collect();
                let got = out.relation.pair(a, b);
                let plain = a < b && rels.iter().all(|&r| r == rels[0]) && got != rels[0];
                let pareto = strong
                    && rels.iter().all(|&r| r != PairRel::Below)
                    && rels.contains(&PairRel::Above)
                    && got != PairRel::Above;
                if plain || pareto {
                    return Some(Witness::Unanimous {
                        profile: s.profile(codes),
                        outcome: s.outcome(out),
                        pair: classes(s, a, b),
                    });
                }
            }
        }
    }
    None
}

fn anonymity(s: &Space) -> Option<Witness> {
    let perms = permutations(s.n);
    for (i, out) in ok_outcomes(s) {
        let codes = &s.profiles[i];
        for sigma in perms.iter().skip(1) {
            let permuted: Vec<u32> = sigma.iter().map(|&k| codes[k]).collect();
            if permuted == *codes {
                continue;
            }
            let Ok(other) = s.outcome_of(&permuted) else {
                continue;
            };
            if other.relation != out.relation {
                return Some(Witness::Permutation {
                    profile: s.profile(codes),
                    permutation: sigma.clone(),
                    permuted: s.profile(&permuted),
                    outcomes: [s.outcome(out), s.outcome(&other)],
                });
            }
        }
    }
    None
}

/// First profile where individual `k` (0-based) strictly prefers some `a` to
/// `b` and the outcome does not.
pub(crate) fn first_overruled(s: &Space, k: usize) -> Option<usize> {
    ok_outcomes(s).map(|(i, _)| i).find(|&i| {
        let mine = s.order(s.profiles[i][k]);
        let out = s.outcomes[i].as_ref().expect("ok outcome");
        (0..s.m).any(|a| (0..s.m).any(|b| mine.prefers(a, b) && !out.relation.strictly(a, b)))
    })
}

fn non_dictatorship(s: &Space) -> Option<Witness> {
    let k = (0..s.n).find(|&k| first_overruled(s, k).is_none())?;
    // an illustration: k prevails against someone holding the opposite view
    let example = ok_outcomes(s).find_map(|(i, out)| {
        let codes = &s.profiles[i];
        let mine = s.order(codes[k]);
        (0..s.m).find_map(|a| {
            (0..s.m)
                .find(|&b| {
                    mine.prefers(a, b)
                        && out.relation.strictly(a, b)
                        && codes.iter().any(|&c| s.order(c).prefers(b, a))
                })
                .map(|b| (i, out, a, b))
        })
    });
    Some(Witness::NeverOverruled {
        voter: k + 1,
        example_profile: example.map(|(i, ..)| s.profile(&s.profiles[i])),
        example_outcome: example.map(|(_, out, ..)| s.outcome(out)),
        example_pair: example.map(|(.., a, b)| classes(s, a, b)),
    })
}

fn rel_code(r: PairRel) -> u8 {
    match r {
        PairRel::Above => 0,
        PairRel::Tied => 1,
        PairRel::Below => 2,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairKey {
    /// Individuals' views of the pair, whichever pair it is.
    Neutral,
    /// Individuals' views of this very pair.
    SamePair,
    /// Individuals' utilities for the two classes of this pair.
    SameUtilities,
}

fn signature(s: &Space, codes: &[u32], a: usize, b: usize, key: PairKey) -> Vec<u64> {
    let mut sig = Vec::with_capacity(2 * codes.len() + 2);
    if key != PairKey::Neutral {
        sig.extend([a as u64, b as u64]);
    }
    match key {
        PairKey::SameUtilities => {
            let rows = s.utilities.as_ref().expect("utility space");
            for &c in codes {
                let row = &rows[c as usize];
                sig.extend([row[a].to_bits(), row[b].to_bits()]);
            }
        }
        _ => sig.extend(codes.iter().map(|&c| rel_code(s.order(c).pair(a, b)) as u64)),
    }
    sig
}

/// Neutrality and the two IIA variants: profiles that look alike on a pair
/// must get the same outcome on it.
fn pair_consistency(s: &Space, key: PairKey) -> Option<Witness> {
    let mut first: HashMap<Vec<u64>, (usize, usize, usize, PairRel)> = HashMap::new();
    for (i, out) in ok_outcomes(s) {
        let codes = &s.profiles[i];
        for a in 0..s.m {
            for b in 0..s.m {
                if a == b {
                    continue;
                }
                let got = out.relation.pair(a, b);
                let sig = signature(s, codes, a, b, key);
                match first.get(&sig) {
                    Some(&(j, c, d, rel)) if rel != got => {
                        let other = s.outcomes[j].as_ref().expect("ok outcome");
                        return Some(Witness::PairConflict {
                            profiles: [s.profile(&s.profiles[j]), s.profile(codes)],
                            pairs: [classes(s, c, d), classes(s, a, b)],
                            outcomes: [s.outcome(other), s.outcome(out)],
                            voter: None,
                        });
                    }
                    Some(_) => {}
                    None => {
                        first.insert(sig, (i, a, b, got));
                    }
                }
            }
        }
    }
    None
}

/// Whether an individual's view of `(a, b)` moved up: below to tied or above,
/// or tied to above.
pub(crate) fn raised(before: PairRel, after: PairRel) -> bool {
    matches!(
        (before, after),
        (PairRel::Below, PairRel::Tied) | (PairRel::Below, PairRel::Above) | (PairRel::Tied, PairRel::Above)
    )
}

fn responsiveness(s: &Space, positive: bool) -> Option<Witness> {
    // per (pair, signature): first profile whose outcome would break the
    // conclusion if it were the raised profile
    let mut breaking: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, out) in ok_outcomes(s) {
        for a in 0..s.m {
            for b in 0..s.m {
                if a == b {
                    continue;
                }
                let broken = if positive {
                    !out.relation.strictly(a, b)
                } else {
                    !out.relation.weakly(a, b)
                };
                if broken {
                    breaking
                        .entry(signature(s, &s.profiles[i], a, b, PairKey::SamePair))
                        .or_insert(i);
                }
            }
        }
    }
    for (i, out) in ok_outcomes(s) {
        let codes = &s.profiles[i];
        for a in 0..s.m {
            for b in 0..s.m {
                if a == b || !out.relation.weakly(a, b) {
                    continue;
                }
                let sig = signature(s, codes, a, b, PairKey::SamePair);
                for j in 0..s.n {
                    let before = s.order(codes[j]).pair(a, b);
                    for after in [PairRel::Tied, PairRel::Above] {
                        if !raised(before, after) {
                            continue;
                        }
                        let mut raised_sig = sig.clone();
                        raised_sig[2 + j] = rel_code(after) as u64;
                        if let Some(&k) = breaking.get(&raised_sig) {
                            let other = s.outcomes[k].as_ref().expect("ok outcome");
                            return Some(Witness::PairConflict {
                                profiles: [s.profile(codes), s.profile(&s.profiles[k])],
                                pairs: [classes(s, a, b); 2],
                                outcomes: [s.outcome(out), s.outcome(other)],
                                voter: Some(j + 1),
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

fn proximity(s: &Space) -> Option<Witness> {
    let b = s.ballot_count();
    let mut kendall = vec![0u64; b * b];
    for x in 0..b {
        for y in 0..b {
            kendall[x * b + y] = kendall_half_units(&s.orders[x], &s.orders[y]);
        }
    }
    // intern outcome relations
    let mut ids: HashMap<&Relation, usize> = HashMap::new();
    let mut rels: Vec<&Relation> = Vec::new();
    let rel_id: Vec<Option<usize>> = s
        .outcomes
        .iter()
        .map(|o| {
            o.as_ref().ok().map(|o| {
                *ids.entry(&o.relation).or_insert_with(|| {
                    rels.push(&o.relation);
                    rels.len() - 1
                })
            })
        })
        .collect();
    let r = rels.len();
    let mut rel_dist = vec![0u64; r * r];
    for x in 0..r {
        for y in 0..r {
            rel_dist[x * r + y] = rels[x].half_distance(rels[y]);
        }
    }
    let max_d = s.n * s.m * (s.m - 1);
    let valid: Vec<usize> = (0..s.profiles.len()).filter(|&i| rel_id[i].is_some()).collect();
    let mut big = vec![0usize; s.profiles.len()];
    let mut small = vec![0u64; s.profiles.len()];
    for &i in &valid {
        let pi = &s.profiles[i];
        let oi = rel_id[i].expect("valid");
        let mut suffix = vec![u64::MAX; max_d + 2];
        for &x in &valid {
            let px = &s.profiles[x];
            let dist: u64 = pi.iter().zip(px).map(|(&u, &v)| kendall[u as usize * b + v as usize]).sum();
            big[x] = dist as usize;
            small[x] = rel_dist[oi * r + rel_id[x].expect("valid")];
            suffix[big[x]] = suffix[big[x]].min(small[x]);
        }
        for d in (0..=max_d).rev() {
            suffix[d] = suffix[d].min(suffix[d + 1]);
        }
        let Some(&near) = valid.iter().find(|&&x| small[x] > suffix[big[x]]) else {
            continue;
        };
        let far = *valid
            .iter()
            .find(|&&x| big[x] >= big[near] && small[x] < small[near])
            .expect("suffix minimum is attained");
        let out = |k: usize| s.outcome(s.outcomes[k].as_ref().expect("valid"));
        return Some(Witness::Proximity {
            profiles: [i, near, far].map(|k| s.profile(&s.profiles[k])),
            outcomes: [out(i), out(near), out(far)],
            profile_distances: [big[near] as f64 / 2.0, big[far] as f64 / 2.0],
            outcome_distances: [small[near] as f64 / 2.0, small[far] as f64 / 2.0],
        });
    }
    None
}

fn premise_space(m: usize, n: usize, trials: usize, seed: u64) -> SearchSpace {
    let exhaustive = SearchSpace::exhaustive(m, n, Domain::WeakOrders);
    let estimate = super::profile_count(m, n, &Domain::WeakOrders).saturating_mul((m * m) as u128);
    if estimate <= PAIR_BUDGET {
        exhaustive
    } else {
        SearchSpace::sampled(m, n, trials, seed, Domain::WeakOrders)
    }
}

pub(crate) fn majority_coincidence(
    rule: &RuleHandle,
    m: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<AuditResult, AuditError> {
    let premises = [
        AxiomId::Unanimity,
        AxiomId::Neutrality,
        AxiomId::PositiveResponsiveness,
    ];
    let pspace = premise_space(m, n, trials, seed);
    let mut notes = Vec::new();
    for axiom in premises {
        let s = Space::build(rule, &pspace, axiom)?;
        let r = run(&s, axiom);
        if let Some(w) = r.witness {
            let mut out = result(&s, AxiomId::MajorityCoincidence, None, Vec::new());
            out.verdict = Verdict::Fail;
            out.witness = Some(Witness::Premise {
                axiom,
                witness: Box::new(w),
            });
            out.notes.push(format!(
                "premise {axiom} fails, so the rule is not forced to be pairwise majority"
            ));
            return Ok(out);
        }
        notes.push(format!("premise {axiom} passes within the {} search", pspace_label(&pspace)));
    }
    let sample = SearchSpace::sampled(m, n, trials, seed, Domain::WeakOrders);
    let s = Space::build(rule, &sample, AxiomId::MajorityCoincidence)?;
    let mut witness = None;
    'search: for (i, out) in ok_outcomes(&s) {
        let codes = &s.profiles[i];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let above = codes.iter().filter(|&&c| s.order(c).prefers(a, b)).count();
                let below = codes.iter().filter(|&&c| s.order(c).prefers(b, a)).count();
                if out.relation.weakly(a, b) != (above >= below) {
                    witness = Some(Witness::MajorityDivergence {
                        profile: s.profile(codes),
                        outcome: s.outcome(out),
                        pair: classes(&s, a, b),
                        counts: [above, below],
                    });
                    break 'search;
                }
            }
        }
    }
    Ok(result(&s, AxiomId::MajorityCoincidence, witness, notes))
}

fn pspace_label(space: &SearchSpace) -> &'static str {
    if space.is_exhaustive() {
        "exhaustive"
    } else {
        "sampled"
    }
}

fn random_direction(rng: &mut Prng, m: usize) -> DirectionPoint {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        if let Ok(d) = DirectionPoint::normalize(&v) {
            return d;
        }
    }
}

fn close(x: &Option<DirectionPoint>, y: &Option<DirectionPoint>) -> bool {
    match (x, y) {
        (Some(x), Some(y)) => x.dimension() == y.dimension() && x.distance(y) <= SPHERE_TOLERANCE,
        (None, None) => true,
        _ => false,
    }
}

/// Re-checks a direction witness: a unanimous input must come back, and
/// permuted inputs must agree.
pub(crate) fn direction_violation(
    axiom: AxiomId,
    inputs: &[Vec<DirectionPoint>],
    outputs: &[Option<DirectionPoint>],
) -> bool {
    match (axiom, inputs, outputs) {
        (AxiomId::ContinuousUnanimity, [vs], [out]) => {
            !vs.is_empty() && vs.iter().all(|v| *v == vs[0]) && !close(out, &Some(vs[0].clone()))
        }
        (AxiomId::ContinuousAnonymity, [xs, ys], [ox, oy]) => {
            let mut a = xs.clone();
            let mut b = ys.clone();
            let key = |p: &DirectionPoint, q: &DirectionPoint| {
                p.coordinates()
                    .iter()
                    .zip(q.coordinates())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            };
            a.sort_by(key);
            b.sort_by(key);
            a == b && !close(ox, oy)
        }
        _ => false,
    }
}

pub(crate) fn sphere_audit(
    rule: &dyn DirectionRule,
    axiom: AxiomId,
    space: &SearchSpace,
) -> Result<AuditResult, AuditError> {
    let SearchSpace::Sampled {
        m,
        n,
        trials,
        seed,
        domain: Domain::Sphere { epsilon },
    } = *space
    else {
        return Err(AuditError::DomainMismatch {
            rule: rule.name(),
            domain: space.domain().name(),
        });
    };
    if m < 2 || n < 1 || trials == 0 {
        return Err(AuditError::BadSpace(format!(
            "sphere audits need m >= 2, n >= 1 and trials >= 1, got m = {m}, n = {n}, trials = {trials}"
        )));
    }
    let mut examined = 0u64;
    let mut notes = Vec::new();
    let witness = match axiom {
        AxiomId::Continuity => {
            let w = continuity_probe_with(rule, m, epsilon, seed)?;
            examined = 2;
            notes.push(format!(
                "profiles {:.3e} apart map to outputs {:.6} apart",
                w.input_distance, w.output_distance
            ));
            (w.output_distance >= 1.0).then_some(Witness::Discontinuity(w))
        }
        AxiomId::ContinuousUnanimity => {
            let mut rng = Prng::new(seed);
            (0..trials).find_map(|_| {
                let v = random_direction(&mut rng, m);
                let vs = vec![v; n];
                let out = rule.aggregate(&vs).ok();
                examined += 1;
                let inputs = vec![vs];
                let outputs = vec![out];
                direction_violation(axiom, &inputs, &outputs).then_some(Witness::DirectionConflict { inputs, outputs })
            })
        }
        AxiomId::ContinuousAnonymity => {
            let mut rng = Prng::new(seed);
            (0..trials).find_map(|_| {
                let xs: Vec<DirectionPoint> = (0..n).map(|_| random_direction(&mut rng, m)).collect();
                let mut ys = xs.clone();
                rng.shuffle(&mut ys);
                let outputs = vec![rule.aggregate(&xs).ok(), rule.aggregate(&ys).ok()];
                examined += 2;
                let inputs = vec![xs, ys];
                direction_violation(axiom, &inputs, &outputs).then_some(Witness::DirectionConflict { inputs, outputs })
            })
        }
        _ => {
            return Err(AuditError::InapplicableAxiom {
                axiom,
                rule: rule.name(),
            })
        }
    };
    Ok(AuditResult {
        rule: rule.name(),
        axiom,
        verdict: if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::PassWithinSearch
        },
        witness,
        search: SearchReport {
            space: space.clone(),
            profiles_examined: examined,
            exhausted: false,
        },
        seed: Some(seed),
        notes,
    })
}
