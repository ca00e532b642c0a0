use serde::Serialize;

use super::{run_ordinal, run_utility, AggError, AggregationOutcome, OrdinalRule, Outcome, UtilityRule};
use crate::contacts::InteractionClass;
use crate::order::{next_permutation, PairRel, Relation, WeakOrder};
use crate::profiles::{Mode, Profile};

/// Pairwise strict-preference counts: `counts[a][b]` individuals rank `a` above `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tournament {
    pub universe: Vec<InteractionClass>,
    pub counts: Vec<Vec<u32>>,
}

fn strict_counts(orders: &[WeakOrder]) -> Vec<Vec<u32>> {
    let m = orders.first().map_or(0, |w| w.len());
    let mut counts = vec![vec![0u32; m]; m];
    for w in orders {
        for a in 0..m {
            for b in 0..m {
                if w.prefers(a, b) {
                    counts[a][b] += 1;
                }
            }
        }
    }
    counts
}

pub fn majority_tournament(p: &Profile) -> Result<Tournament, AggError> {
    let orders = p.orders().map_err(|_| AggError::WrongMode {
        rule: "majority_tournament".into(),
        expected: Mode::Ordinal,
    })?;
    Ok(Tournament {
        universe: p.universe().classes().to_vec(),
        counts: strict_counts(orders),
    })
}

/// Simple majority on every pair: `a ≽ b` iff at least as many individuals
/// strictly prefer `a` to `b` as the reverse. May be intransitive.
#[derive(Debug, Clone, Copy, Default)]
pub struct MajorityRule;

impl OrdinalRule for MajorityRule {
    fn name(&self) -> String {
        "may".into()
    }

    fn aggregate(&self, orders: &[WeakOrder]) -> Result<Outcome, AggError> {
        let counts = strict_counts(orders);
        let m = counts.len();
        Ok(Outcome::from_relation(Relation::from_fn(m, |a, b| counts[a][b] >= counts[b][a])))
    }
}

/// Borda count: each class scores the number of classes strictly below it,
/// plus half a point per other class tied with it, summed over individuals.
#[derive(Debug, Clone, Copy, Default)]
pub struct BordaRule;

impl BordaRule {
    /// Totals in half points, so ties stay exact.
    pub fn half_scores(orders: &[WeakOrder]) -> Vec<u64> {
        let m = orders.first().map_or(0, |w| w.len());
        let mut total = vec![0u64; m];
        for w in orders {
            for (a, t) in total.iter_mut().enumerate() {
                for b in 0..m {
                    if b == a {
                        continue;
                    }
                    *t += match w.pair(a, b) {
                        PairRel::Above => 2,
                        PairRel::Tied => 1,
                        PairRel::Below => 0,
                    };
                }
            }
        }
        total
    }
}

impl OrdinalRule for BordaRule {
    fn name(&self) -> String {
        "borda".into()
    }

    fn aggregate(&self, orders: &[WeakOrder]) -> Result<Outcome, AggError> {
        Ok(Outcome::from_order(WeakOrder::by_descending_score(&Self::half_scores(orders))))
    }
}

pub const KEMENY_MAX_CLASSES: usize = 8;

/// Kemeny consensus: the strict order with least total Kendall distance to
/// the profile, by exhaustion over all `m!` orders. Among equally distant
/// orders the lexicographically first best-to-worst sequence wins.
#[derive(Debug, Clone, Copy, Default)]
pub struct KemenyRule;

impl KemenyRule {
    /// Minimal total distance (half units) and every order attaining it, in
    /// lexicographic order.
    pub fn optima(orders: &[WeakOrder]) -> Result<(u64, Vec<Vec<usize>>), AggError> {
        let m = orders.first().map_or(0, |w| w.len());
        if m > KEMENY_MAX_CLASSES {
            return Err(AggError::TooLarge {
                m,
                max: KEMENY_MAX_CLASSES,
            });
        }
        // cost[a][b]: half units paid for placing a above b
        let mut cost = vec![vec![0u64; m]; m];
        for w in orders {
            for a in 0..m {
                for b in 0..m {
                    if a != b {
                        cost[a][b] += PairRel::Above.half_disagreement(w.pair(a, b));
                    }
                }
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        let mut best = u64::MAX;
        let mut winners = Vec::new();
        loop {
            let mut total = 0;
            for i in 0..m {
                for j in i + 1..m {
                    total += cost[perm[i]][perm[j]];
                }
            }
            if total < best {
                best = total;
                winners.clear();
            }
            if total == best {
                winners.push(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok((best, winners))
    }
}

impl OrdinalRule for KemenyRule {
    fn name(&self) -> String {
        "kemeny".into()
    }

    fn aggregate(&self, orders: &[WeakOrder]) -> Result<Outcome, AggError> {
        let (_, winners) = Self::optima(orders)?;
        Ok(Outcome::from_order(WeakOrder::strict(&winners[0])))
    }
}

/// Copies individual `k` (1-based).
#[derive(Debug, Clone, Copy)]
pub struct DictatorRule {
    pub k: usize,
}

impl OrdinalRule for DictatorRule {
    fn name(&self) -> String {
        format!("dictator:{}", self.k)
    }

    fn aggregate(&self, orders: &[WeakOrder]) -> Result<Outcome, AggError> {
        if self.k == 0 || self.k > orders.len() {
            return Err(AggError::BadIndex {
                k: self.k,
                n: orders.len(),
            });
        }
        Ok(Outcome::from_order(orders[self.k - 1].clone()))
    }
}

/// Ranks classes by the sum of utilities across individuals.
#[derive(Debug, Clone, Copy, Default)]
pub struct UtilitarianRule;

impl UtilitarianRule {
    /// Per-class sums, accumulated in individual order.
    pub fn sums(utilities: &[Vec<f64>]) -> Vec<f64> {
        let m = utilities.first().map_or(0, |u| u.len());
        let mut sums = vec![0.0; m];
        for row in utilities {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }
}

impl UtilityRule for UtilitarianRule {
    fn name(&self) -> String {
        "utilitarian".into()
    }

    fn aggregate(&self, utilities: &[Vec<f64>]) -> Result<Outcome, AggError> {
        Ok(Outcome::from_order(WeakOrder::by_descending_score(&Self::sums(utilities))))
    }
}

pub fn may_rule(p: &Profile) -> Result<AggregationOutcome, AggError> {
    run_ordinal(&MajorityRule, p)
}

pub fn borda(p: &Profile) -> Result<AggregationOutcome, AggError> {
    run_ordinal(&BordaRule, p)
}

pub fn kemeny(p: &Profile) -> Result<AggregationOutcome, AggError> {
    run_ordinal(&KemenyRule, p)
}

/// Individual `k`'s ranking verbatim (1-based).
pub fn dictator(p: &Profile, k: usize) -> Result<AggregationOutcome, AggError> {
    run_ordinal(&DictatorRule { k }, p)
}

pub fn utilitarian(p: &Profile) -> Result<AggregationOutcome, AggError> {
    run_utility(&UtilitarianRule, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{all_strict_orders, kendall_half_units};
    use crate::profiles::{default_owners, generate, SynthKind, SynthSpec};
    use crate::universe::Universe;

    fn condorcet() -> Profile {
        generate(&SynthSpec {
            kind: SynthKind::CondorcetCycle,
            m: 3,
            n: 3,
            seed: 0,
        })
        .unwrap()
    }

    fn profile(seqs: &[&[usize]]) -> Profile {
        let m = seqs[0].len();
        Profile::from_orders(
            Universe::synthetic(m).unwrap(),
            seqs.iter().map(|s| WeakOrder::strict(s)).collect(),
        )
        .unwrap()
    }

    fn unanimous() -> Profile {
        profile(&[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]])
    }

    fn tiers_idx(o: &AggregationOutcome, u: &Universe) -> Vec<Vec<usize>> {
        o.tiers
            .as_ref()
            .unwrap()
            .iter()
            .map(|t| t.iter().map(|&c| u.index_of(c).unwrap()).collect())
            .collect()
    }

    #[test]
    fn tournament_examples() {
        let t = majority_tournament(&condorcet()).unwrap();
        assert_eq!(t.counts, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]]);
        let t = majority_tournament(&unanimous()).unwrap();
        assert_eq!(t.counts, vec![vec![0, 3, 3], vec![0, 0, 3], vec![0, 0, 0]]);
        let indifferent = Profile::from_orders(
            Universe::synthetic(3).unwrap(),
            vec![WeakOrder::from_levels(&[0, 0, 0]); 3],
        )
        .unwrap();
        let t = majority_tournament(&indifferent).unwrap();
        assert!(t.counts.iter().flatten().all(|&c| c == 0));
    }

    #[test]
    fn may_examples() {
        let p = condorcet();
        let o = may_rule(&p).unwrap();
        assert!(!o.transitive);
        let u = p.universe();
        assert_eq!(o.cycle_witness, Some([u.class(0), u.class(1), u.class(2)]));
        assert!(o.witness_holds(u));
        assert!(o.tiers.is_none());

        let o = may_rule(&unanimous()).unwrap();
        assert!(o.transitive);
        assert_eq!(tiers_idx(&o, u), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn borda_examples() {
        let p = condorcet();
        assert_eq!(BordaRule::half_scores(p.orders().unwrap()), vec![6, 6, 6]);
        let o = borda(&p).unwrap();
        assert_eq!(o.tiers.as_ref().unwrap().len(), 1);
        assert!(o.transitive);

        let o = borda(&unanimous()).unwrap();
        assert_eq!(tiers_idx(&o, p.universe()), vec![vec![0], vec![1], vec![2]]);

        let p = profile(&[&[0, 1, 2], &[1, 0, 2]]);
        assert_eq!(BordaRule::half_scores(p.orders().unwrap()), vec![6, 6, 0]);
        assert_eq!(tiers_idx(&borda(&p).unwrap(), p.universe()), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn kemeny_condorcet_matches_exhaustive_oracle() {
        // oracle: total Kendall distance of every strict order to the profile
        let p = condorcet();
        let orders = p.orders().unwrap();
        let totals: Vec<(Vec<usize>, u64)> = all_strict_orders(3)
            .into_iter()
            .map(|c| {
                let t = orders.iter().map(|w| kendall_half_units(&c, w)).sum::<u64>();
                (c.sequence().unwrap(), t)
            })
            .collect();
        let best = totals.iter().map(|t| t.1).min().unwrap();
        // each rotation is at distance 0 + 2 + 2 swaps from the template
        assert_eq!(best, 8);
        let optimal: Vec<Vec<usize>> = totals.iter().filter(|t| t.1 == best).map(|t| t.0.clone()).collect();
        assert_eq!(optimal, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);

        let (cost, winners) = KemenyRule::optima(orders).unwrap();
        assert_eq!(cost, best);
        assert_eq!(winners, optimal);
        let o = kemeny(&p).unwrap();
        assert_eq!(tiers_idx(&o, p.universe()), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn kemeny_unanimous_and_too_large() {
        let o = kemeny(&unanimous()).unwrap();
        assert_eq!(tiers_idx(&o, unanimous().universe()), vec![vec![0], vec![1], vec![2]]);
        let big = profile(&[&[0, 1, 2, 3, 4, 5, 6, 7, 8], &[8, 7, 6, 5, 4, 3, 2, 1, 0]]);
        assert!(matches!(kemeny(&big), Err(AggError::TooLarge { m: 9, .. })));
    }

    #[test]
    fn dictator_examples() {
        let p = condorcet();
        let u = p.universe();
        assert_eq!(tiers_idx(&dictator(&p, 1).unwrap(), u), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(tiers_idx(&dictator(&p, 2).unwrap(), u), vec![vec![1], vec![2], vec![0]]);
        assert!(matches!(dictator(&p, 4), Err(AggError::BadIndex { k: 4, n: 3 })));
    }

    fn utility_profile(rows: Vec<Vec<f64>>) -> Profile {
        let m = rows[0].len();
        Profile::utility(Universe::synthetic(m).unwrap(), default_owners(rows.len()), rows).unwrap()
    }

    #[test]
    fn utilitarian_examples() {
        let p = utility_profile(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let o = utilitarian(&p).unwrap();
        assert_eq!(tiers_idx(&o, p.universe()), vec![vec![1], vec![0]]);

        let p = utility_profile(vec![vec![0.5, 3.0, -1.0]; 3]);
        assert_eq!(tiers_idx(&utilitarian(&p).unwrap(), p.universe()), vec![vec![1], vec![0], vec![2]]);

        let rows = vec![vec![1.0, 0.0, 0.25], vec![0.0, 2.0, 0.5]];
        let shifted: Vec<Vec<f64>> = rows
            .iter()
            .zip([3.0, -7.5])
            .map(|(r, beta)| r.iter().map(|v| 2.0 * v + beta).collect())
            .collect();
        assert_eq!(
            utilitarian(&utility_profile(rows)).unwrap().tiers,
            utilitarian(&utility_profile(shifted)).unwrap().tiers
        );
    }

    #[test]
    fn wrong_mode() {
        let p = utility_profile(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert!(matches!(may_rule(&p), Err(AggError::WrongMode { .. })));
        assert!(matches!(majority_tournament(&p), Err(AggError::WrongMode { .. })));
        assert!(matches!(utilitarian(&condorcet()), Err(AggError::WrongMode { .. })));
    }
}
