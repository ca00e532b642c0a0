//! Materialized search spaces: the ballots an individual may cast, the
//! profiles to examine, and the rule's outcome on each.

use std::cell::Cell;
use std::collections::HashMap;

use super::{AuditError, AxiomId, Domain, SearchSpace, PAIR_BUDGET};
use crate::external_agg::{AggError, AggregationOutcome, Outcome, RuleHandle};
use crate::internal_agg::order_from_values;
use crate::order::{all_strict_orders, all_weak_orders, WeakOrder};
use crate::profiles::{default_owners, Profile};
use crate::rng::Prng;
use crate::universe::Universe;

/// Utility levels used when no grid is given. Every sum of these is exact in
/// binary floating point, so ties are decided exactly.
pub const DEFAULT_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

const MAX_BALLOTS: u128 = 1_000_000;

/// Number of weak orders over `m` alternatives.
pub fn ordered_bell(m: usize) -> u128 {
    // a(m) = sum_k C(m, k) a(m - k)
    let mut a = vec![1u128];
    for i in 1..=m {
        let mut binom = 1u128;
        let mut total = 0u128;
        for k in 1..=i {
            binom = binom * (i - k + 1) as u128 / k as u128;
            total = total.saturating_add(binom.saturating_mul(a[i - k]));
        }
        a.push(total);
    }
    a[m]
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

fn ballots_per_individual(m: usize, domain: &Domain) -> u128 {
    match domain {
        Domain::StrictOrders => factorial(m),
        Domain::WeakOrders => ordered_bell(m),
        Domain::UtilityGrid { values } => (values.len() as u128).saturating_pow(m as u32),
        Domain::Sphere { .. } => u128::MAX,
    }
}

/// Profiles in the full domain at `(m, n)`, saturating.
pub fn profile_count(m: usize, n: usize, domain: &Domain) -> u128 {
    ballots_per_individual(m, domain).saturating_pow(n as u32)
}

fn work_estimate(axiom: AxiomId, profiles: u128, m: usize, n: usize) -> u128 {
    let pairs = (m * m) as u128;
    match axiom {
        AxiomId::ProximityPreservation => profiles.saturating_mul(profiles),
        AxiomId::Anonymity => profiles.saturating_mul(factorial(n)),
        AxiomId::Transitivity | AxiomId::Agreement | AxiomId::UnrestrictedDomain => profiles,
        _ => profiles.saturating_mul(pairs),
    }
}

pub(crate) struct Space<'r> {
    pub rule: &'r RuleHandle,
    pub spec: SearchSpace,
    pub m: usize,
    pub n: usize,
    pub universe: Universe,
    /// The order each ballot induces (the ballot itself for ordinal rules).
    pub orders: Vec<WeakOrder>,
    /// Utility ballots, for utility rules.
    pub utilities: Option<Vec<Vec<f64>>>,
    /// Each profile as one ballot code per individual.
    pub profiles: Vec<Vec<u32>>,
    pub outcomes: Vec<Result<Outcome, String>>,
    /// Rule evaluations beyond the cached ones.
    pub extra_runs: Cell<u64>,
}

fn validate_grid(values: &[f64]) -> Result<(), AuditError> {
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(AuditError::BadSpace("utility grid must be non-empty and finite".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AuditError::BadSpace("utility grid must be strictly increasing".into()));
    }
    Ok(())
}

fn grid_ballots(m: usize, values: &[f64]) -> Vec<Vec<f64>> {
    let g = values.len();
    let total = g.pow(m as u32);
    (0..total)
        .map(|mut k| {
            let mut row = vec![0.0; m];
            for slot in row.iter_mut().rev() {
                *slot = values[k % g];
                k /= g;
            }
            row
        })
        .collect()
}

impl<'r> Space<'r> {
    pub fn build(rule: &'r RuleHandle, spec: &SearchSpace, axiom: AxiomId) -> Result<Space<'r>, AuditError> {
        let (m, n) = (spec.m(), spec.n());
        if m < 2 || n < 2 {
            return Err(AuditError::BadSpace(format!("need m >= 2 and n >= 2, got m = {m}, n = {n}")));
        }
        let domain = spec.domain();
        match (rule, domain) {
            (RuleHandle::Ordinal(_), Domain::StrictOrders | Domain::WeakOrders) => {}
            (RuleHandle::Utility(_), Domain::UtilityGrid { values }) => validate_grid(values)?,
            _ => {
                return Err(AuditError::DomainMismatch {
                    rule: rule.name(),
                    domain: domain.name(),
                })
            }
        }
        let universe = Universe::synthetic(m).map_err(|e| AuditError::BadSpace(e.to_string()))?;
        let per = ballots_per_individual(m, domain);
        let profiles_estimate = match *spec {
            SearchSpace::Exhaustive { .. } => profile_count(m, n, domain),
            SearchSpace::Sampled { trials, .. } => {
                if trials == 0 {
                    return Err(AuditError::BadSpace("trials must be positive".into()));
                }
                trials as u128
            }
        };
        let estimate = work_estimate(axiom, profiles_estimate, m, n);
        if estimate > PAIR_BUDGET {
            return Err(AuditError::BudgetExceeded {
                estimate,
                budget: PAIR_BUDGET,
            });
        }

        let mut space = Space {
            rule,
            spec: spec.clone(),
            m,
            n,
            universe,
            orders: Vec::new(),
            utilities: None,
            profiles: Vec::new(),
            outcomes: Vec::new(),
            extra_runs: Cell::new(0),
        };
        match *spec {
            SearchSpace::Exhaustive { .. } => {
                if per > MAX_BALLOTS {
                    return Err(AuditError::BudgetExceeded {
                        estimate: per,
                        budget: MAX_BALLOTS,
                    });
                }
                match domain {
                    Domain::StrictOrders => space.orders = all_strict_orders(m),
                    Domain::WeakOrders => space.orders = all_weak_orders(m),
                    Domain::UtilityGrid { values } => space.set_utilities(grid_ballots(m, values)),
                    Domain::Sphere { .. } => unreachable!(),
                }
                let b = space.ballot_count() as u64;
                let total = b.pow(n as u32);
                space.profiles = (0..total)
                    .map(|mut k| {
                        let mut codes = vec![0u32; n];
                        for c in codes.iter_mut().rev() {
                            *c = (k % b) as u32;
                            k /= b;
                        }
                        codes
                    })
                    .collect();
            }
            SearchSpace::Sampled { trials, seed, .. } => space.sample(domain, trials, seed)?,
        }
        space.outcomes = Vec::with_capacity(space.profiles.len());
        for i in 0..space.profiles.len() {
            let out = space.run(&space.profiles[i])?;
            space.outcomes.push(out);
        }
        Ok(space)
    }

    fn set_utilities(&mut self, rows: Vec<Vec<f64>>) {
        self.orders = rows.iter().map(|r| order_from_values(r, 0.0)).collect();
        self.utilities = Some(rows);
    }

    /// Draws `trials` profiles. Ballots are interned in first-draw order.
    fn sample(&mut self, domain: &Domain, trials: usize, seed: u64) -> Result<(), AuditError> {
        let (m, n) = (self.m, self.n);
        let mut rng = Prng::new(seed);
        let weak = match domain {
            Domain::WeakOrders => {
                if ordered_bell(m) > MAX_BALLOTS {
                    return Err(AuditError::BadSpace(format!("weak-order sampling supports m <= 8, got {m}")));
                }
                Some(all_weak_orders(m))
            }
            _ => None,
        };
        let mut seen_orders: HashMap<WeakOrder, u32> = HashMap::new();
        let mut seen_rows: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut rows = Vec::new();
        for _ in 0..trials {
            let mut codes = Vec::with_capacity(n);
            for _ in 0..n {
                let code = match domain {
                    Domain::StrictOrders | Domain::WeakOrders => {
                        let w = match &weak {
                            Some(all) => all[rng.below(all.len())].clone(),
                            None => WeakOrder::strict(&rng.permutation(m)),
                        };
                        let next = self.orders.len() as u32;
                        *seen_orders.entry(w.clone()).or_insert_with(|| {
                            self.orders.push(w);
                            next
                        })
                    }
                    Domain::UtilityGrid { values } => {
                        let row: Vec<f64> = (0..m).map(|_| values[rng.below(values.len())]).collect();
                        let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
                        let next = rows.len() as u32;
                        *seen_rows.entry(key).or_insert_with(|| {
                            rows.push(row);
                            next
                        })
                    }
                    Domain::Sphere { .. } => unreachable!(),
                };
                codes.push(code);
            }
            self.profiles.push(codes);
        }
        if matches!(domain, Domain::UtilityGrid { .. }) {
            self.set_utilities(rows);
        }
        Ok(())
    }

    pub fn ballot_count(&self) -> usize {
        self.orders.len()
    }

    /// Runs the rule. Configuration errors (a rule that cannot handle this
    /// `m` or `n` at all) abort the audit; anything else is recorded as the
    /// rule being undefined on the profile.
    pub fn run(&self, codes: &[u32]) -> Result<Result<Outcome, String>, AuditError> {
        let result = match self.rule {
            RuleHandle::Ordinal(r) => r.aggregate(&self.orders_of(codes)),
            RuleHandle::Utility(r) => r.aggregate(&self.utilities_of(codes)),
            RuleHandle::Direction(_) => unreachable!("direction rules have no profile space"),
        };
        match result {
            Ok(o) => Ok(Ok(o)),
            Err(e @ (AggError::TooLarge { .. } | AggError::BadIndex { .. })) => Err(e.into()),
            Err(e) => Ok(Err(e.to_string())),
        }
    }

    /// Outcome for an arbitrary profile over this space's ballots, served
    /// from the cache when the space is exhaustive.
    pub fn outcome_of(&self, codes: &[u32]) -> Result<Outcome, String> {
        if self.spec.is_exhaustive() {
            return self.outcomes[self.index_of(codes)].clone();
        }
        self.extra_runs.set(self.extra_runs.get() + 1);
        match self.run(codes) {
            Ok(r) => r,
            Err(e) => Err(e.to_string()),
        }
    }

    fn index_of(&self, codes: &[u32]) -> usize {
        let b = self.ballot_count();
        codes.iter().fold(0, |acc, &c| acc * b + c as usize)
    }

    pub fn orders_of(&self, codes: &[u32]) -> Vec<WeakOrder> {
        codes.iter().map(|&c| self.orders[c as usize].clone()).collect()
    }

    pub fn utilities_of(&self, codes: &[u32]) -> Vec<Vec<f64>> {
        let rows = self.utilities.as_ref().expect("utility space");
        codes.iter().map(|&c| rows[c as usize].clone()).collect()
    }

    pub fn order(&self, code: u32) -> &WeakOrder {
        &self.orders[code as usize]
    }

    pub fn profile(&self, codes: &[u32]) -> Profile {
        let owners = default_owners(self.n);
        let built = match &self.utilities {
            Some(_) => Profile::utility(self.universe.clone(), owners, self.utilities_of(codes)),
            None => Profile::ordinal(self.universe.clone(), owners, self.orders_of(codes)),
        };
        built.expect("audit profiles are well formed")
    }

    pub fn outcome(&self, out: &Outcome) -> AggregationOutcome {
        AggregationOutcome::new(self.rule.name(), &self.universe, out)
    }

    pub fn examined(&self) -> u64 {
        self.profiles.len() as u64 + self.extra_runs.get()
    }
}
