//! Axiom audits: black-box searches for counterexamples to the classical
//! aggregation axioms.
//!
//! A search runs a rule over a space of profiles, either every profile of a
//! small domain (exhaustive) or a seeded sample of one. A failed audit
//! carries a concrete witness that [`verify`] re-checks by running the rule
//! again. A passing audit only says that nothing was found in the space.

mod checks;
mod space;
mod witness;

use serde::{Deserialize, Serialize};

use crate::external_agg::{AggError, RuleHandle};
use crate::profiles::ProfileError;

pub use space::{ordered_bell, profile_count, DEFAULT_GRID};
pub use witness::{verify, Witness};

/// Largest search, in profile pairs, an audit may run.
pub const PAIR_BUDGET: u128 = 10_000_000;

/// Reported on every proximity audit.
pub const PROXIMITY_CAVEAT: &str = "proximity preservation asks for some distance d under which the rule \
preserves proximity; this audit fixes d to the Kendall distance (a tie against a strict preference counts \
one half), so a fail refutes that choice of d only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomId {
    Agreement,
    Transitivity,
    UnrestrictedDomain,
    Unanimity,
    Anonymity,
    NonDictatorship,
    Neutrality,
    Iia,
    ProximityPreservation,
    PositiveResponsiveness,
    MonotonicResponsiveness,
    UtilityIia,
    StrictUnanimity,
    Continuity,
    ContinuousUnanimity,
    ContinuousAnonymity,
    MajorityCoincidence,
}

impl AxiomId {
    pub const ALL: [AxiomId; 17] = [
        AxiomId::Agreement,
        AxiomId::Transitivity,
        AxiomId::UnrestrictedDomain,
        AxiomId::Unanimity,
        AxiomId::Anonymity,
        AxiomId::NonDictatorship,
        AxiomId::Neutrality,
        AxiomId::Iia,
        AxiomId::ProximityPreservation,
        AxiomId::PositiveResponsiveness,
        AxiomId::MonotonicResponsiveness,
        AxiomId::UtilityIia,
        AxiomId::StrictUnanimity,
        AxiomId::Continuity,
        AxiomId::ContinuousUnanimity,
        AxiomId::ContinuousAnonymity,
        AxiomId::MajorityCoincidence,
    ];

    /// The set a social welfare function cannot satisfy all at once.
    pub const ARROW: [AxiomId; 6] = [
        AxiomId::Agreement,
        AxiomId::Transitivity,
        AxiomId::UnrestrictedDomain,
        AxiomId::Unanimity,
        AxiomId::NonDictatorship,
        AxiomId::Iia,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Agreement => "agreement",
            AxiomId::Transitivity => "transitivity",
            AxiomId::UnrestrictedDomain => "unrestricted_domain",
            AxiomId::Unanimity => "unanimity",
            AxiomId::Anonymity => "anonymity",
            AxiomId::NonDictatorship => "non_dictatorship",
            AxiomId::Neutrality => "neutrality",
            AxiomId::Iia => "iia",
            AxiomId::ProximityPreservation => "proximity_preservation",
            AxiomId::PositiveResponsiveness => "positive_responsiveness",
            AxiomId::MonotonicResponsiveness => "monotonic_responsiveness",
            AxiomId::UtilityIia => "utility_iia",
            AxiomId::StrictUnanimity => "strict_unanimity",
            AxiomId::Continuity => "continuity",
            AxiomId::ContinuousUnanimity => "continuous_unanimity",
            AxiomId::ContinuousAnonymity => "continuous_anonymity",
            AxiomId::MajorityCoincidence => "majority_coincidence",
        }
    }

    fn family(self) -> Family {
        match self {
            AxiomId::Neutrality
            | AxiomId::ProximityPreservation
            | AxiomId::PositiveResponsiveness
            | AxiomId::MonotonicResponsiveness
            | AxiomId::MajorityCoincidence => Family::Ordinal,
            AxiomId::UtilityIia | AxiomId::StrictUnanimity => Family::Utility,
            AxiomId::Continuity | AxiomId::ContinuousUnanimity | AxiomId::ContinuousAnonymity => Family::Sphere,
            _ => Family::Any,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Any,
    Ordinal,
    Utility,
    Sphere,
}

impl std::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AxiomId {
    type Err = AuditError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().replace('-', "_");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or(AuditError::UnknownAxiom(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassWithinSearch,
    Fail,
}

/// Which individual preferences a search ranges over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum Domain {
    /// Linear orders, `m!` per individual.
    StrictOrders,
    /// Orders with ties, `ordered_bell(m)` per individual.
    WeakOrders,
    /// Utility vectors with every entry drawn from `values`.
    UtilityGrid { values: Vec<f64> },
    /// Unit directions; `epsilon` sizes the continuity probe.
    Sphere { epsilon: f64 },
}

impl Domain {
    pub fn utility_grid() -> Domain {
        Domain::UtilityGrid {
            values: DEFAULT_GRID.to_vec(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::StrictOrders => "strict_orders",
            Domain::WeakOrders => "weak_orders",
            Domain::UtilityGrid { .. } => "utility_grid",
            Domain::Sphere { .. } => "sphere",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchSpace {
    Exhaustive {
        m: usize,
        n: usize,
        #[serde(flatten)]
        domain: Domain,
    },
    Sampled {
        m: usize,
        n: usize,
        trials: usize,
        seed: u64,
        #[serde(flatten)]
        domain: Domain,
    },
}

impl SearchSpace {
    pub fn exhaustive(m: usize, n: usize, domain: Domain) -> Self {
        SearchSpace::Exhaustive { m, n, domain }
    }

    pub fn sampled(m: usize, n: usize, trials: usize, seed: u64, domain: Domain) -> Self {
        SearchSpace::Sampled {
            m,
            n,
            trials,
            seed,
            domain,
        }
    }

    pub fn m(&self) -> usize {
        match *self {
            SearchSpace::Exhaustive { m, .. } | SearchSpace::Sampled { m, .. } => m,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            SearchSpace::Exhaustive { n, .. } | SearchSpace::Sampled { n, .. } => n,
        }
    }

    pub fn domain(&self) -> &Domain {
        match self {
            SearchSpace::Exhaustive { domain, .. } | SearchSpace::Sampled { domain, .. } => domain,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            SearchSpace::Exhaustive { .. } => None,
            SearchSpace::Sampled { seed, .. } => Some(seed),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, SearchSpace::Exhaustive { .. })
    }
}

/// What a search actually covered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    #[serde(flatten)]
    pub space: SearchSpace,
    /// Profiles the rule was run on (more than the space size when the check
    /// builds derived profiles, e.g. permutations).
    pub profiles_examined: u64,
    /// True when the space was the whole domain at this `(m, n)`.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditResult {
    pub rule: String,
    pub axiom: AxiomId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub search: SearchReport,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl AuditResult {
    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error("search needs about {estimate} profile pairs, over the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("axiom {axiom} does not apply to rule {rule}")]
    InapplicableAxiom { axiom: AxiomId, rule: String },
    #[error("rule {rule} cannot be searched over the {domain} domain")]
    DomainMismatch { rule: String, domain: &'static str },
    #[error("invalid search space: {0}")]
    BadSpace(String),
    #[error("unknown axiom {0:?}")]
    UnknownAxiom(String),
    #[error(transparent)]
    Aggregation(#[from] AggError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

fn applicable(rule: &RuleHandle, axiom: AxiomId) -> bool {
    match (rule, axiom.family()) {
        (RuleHandle::Direction(_), f) => f == Family::Sphere,
        (_, Family::Sphere) => false,
        (RuleHandle::Ordinal(_), f) => f != Family::Utility,
        (RuleHandle::Utility(_), f) => f == Family::Any || f == Family::Utility,
    }
}

/// Audits one axiom for `rule` over `space`.
pub fn audit(rule: &RuleHandle, axiom: AxiomId, space: &SearchSpace) -> Result<AuditResult, AuditError> {
    if !applicable(rule, axiom) {
        return Err(AuditError::InapplicableAxiom {
            axiom,
            rule: rule.name(),
        });
    }
    if axiom == AxiomId::MajorityCoincidence {
        let (trials, seed) = match *space {
            SearchSpace::Sampled { trials, seed, .. } => (trials, seed),
            SearchSpace::Exhaustive { .. } => (checks::DEFAULT_COINCIDENCE_TRIALS, 0),
        };
        return checks::majority_coincidence(rule, space.m(), space.n(), trials, seed);
    }
    match rule {
        RuleHandle::Direction(r) => checks::sphere_audit(r.as_ref(), axiom, space),
        _ => {
            let s = space::Space::build(rule, space, axiom)?;
            Ok(checks::run(&s, axiom))
        }
    }
}

/// Outcome of auditing the Arrow axioms together.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrowAudit {
    pub rule: String,
    pub results: Vec<AuditResult>,
    /// Set when every axiom passed an exhaustive search. No rule can do that,
    /// so a set flag points at a bug in the rule or in the checks.
    pub contradiction: bool,
}

/// Audits the Arrow set exhaustively over strict orders (utility grid for
/// utility rules).
pub fn arrow_audit(rule: &RuleHandle, m: usize, n: usize) -> Result<ArrowAudit, AuditError> {
    if m < 3 || n < 2 {
        return Err(AuditError::BadSpace(format!(
            "the Arrow audit needs m >= 3 and n >= 2, got m = {m}, n = {n}"
        )));
    }
    let domain = match rule {
        RuleHandle::Ordinal(_) => Domain::StrictOrders,
        RuleHandle::Utility(_) => Domain::utility_grid(),
        RuleHandle::Direction(_) => {
            return Err(AuditError::InapplicableAxiom {
                axiom: AxiomId::Transitivity,
                rule: rule.name(),
            })
        }
    };
    let space = SearchSpace::exhaustive(m, n, domain);
    let results = AxiomId::ARROW
        .iter()
        .map(|&a| audit(rule, a, &space))
        .collect::<Result<Vec<_>, _>>()?;
    let contradiction = results.iter().all(|r| !r.failed());
    Ok(ArrowAudit {
        rule: rule.name(),
        results,
        contradiction,
    })
}

/// Checks whether an ordinal rule is pairwise simple majority.
///
/// Unanimity, neutrality and positive responsiveness are audited first over
/// weak orders (exhaustively when the budget allows, else on the sample). If
/// one fails, its witness is returned. Otherwise the rule is compared with the
/// majority formula on `trials` sampled profiles.
pub fn may_coincidence_check(
    rule: &RuleHandle,
    m: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<AuditResult, AuditError> {
    audit(
        rule,
        AxiomId::MajorityCoincidence,
        &SearchSpace::sampled(m, n, trials, seed, Domain::WeakOrders),
    )
}

#[cfg(test)]
mod tests;
