//! External aggregation: rules that turn a profile of individual preferences
//! into one global preference.
//!
//! Rules are implemented against index-level inputs (`&[WeakOrder]` or
//! utility rows) through the [`OrdinalRule`] and [`UtilityRule`] traits, which
//! is also how the audit engine drives them as black boxes. The free
//! functions ([`may_rule`], [`borda`], ...) are the profile-level entry points.

mod rules;
mod sphere;

pub use rules::{
    borda, dictator, kemeny, majority_tournament, may_rule, utilitarian, BordaRule, DictatorRule, KemenyRule,
    MajorityRule, Tournament, UtilitarianRule, KEMENY_MAX_CLASSES,
};
pub use sphere::{
    aggregate_directions, continuity_probe, continuity_probe_with, direction_from_utility, mean_direction, DirectionPoint, DirectionRule,
    DiscontinuityWitness, MeanDirection,
};

use serde::Serialize;

use crate::contacts::InteractionClass;
use crate::order::{Relation, WeakOrder};
use crate::profiles::{Mode, Profile, ProfileError};
use crate::universe::Universe;

#[derive(Debug, thiserror::Error)]
pub enum AggError {
    #[error("rule {rule} needs a {expected} profile")]
    WrongMode { rule: String, expected: Mode },
    #[error("kemeny is exhaustive over m! orders and limited to m <= {max}, got m = {m}")]
    TooLarge { m: usize, max: usize },
    #[error("dictator index {k} out of range 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("cannot take the direction of an all-zero utility vector")]
    ZeroVector,
    #[error("mean of directions has norm {norm:e} < 1e-12; the aggregate is undefined at antipodal inputs")]
    AntipodalDegenerate { norm: f64 },
    #[error("direction dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("no input directions")]
    Empty,
    #[error("not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("invalid continuity probe: {0}")]
    BadProbe(String),
    #[error("unknown rule {0:?}; available: may, borda, kemeny, dictator[:k], utilitarian, mean-direction")]
    UnknownRule(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Index-level result of a rule: the full pairwise relation, plus the ranking
/// when the relation is transitive, or a witness triple when it is not.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub relation: Relation,
    pub ranking: Option<WeakOrder>,
    /// `(a, b, c)` with `a ≽ b`, `b ≽ c` and `c ≻ a`.
    pub cycle: Option<[usize; 3]>,
}

impl Outcome {
    pub fn from_order(order: WeakOrder) -> Outcome {
        Outcome {
            relation: order.relation(),
            ranking: Some(order),
            cycle: None,
        }
    }

    /// Wraps a complete relation, checking transitivity.
    pub fn from_relation(relation: Relation) -> Outcome {
        match relation.transitivity_violation() {
            Some(cycle) => Outcome {
                relation,
                ranking: None,
                cycle: Some(cycle),
            },
            None => Outcome {
                ranking: relation.to_weak_order(),
                relation,
                cycle: None,
            },
        }
    }

    pub fn is_transitive(&self) -> bool {
        self.cycle.is_none() && self.ranking.is_some()
    }
}

/// A rule over ordinal profiles.
pub trait OrdinalRule: Send + Sync {
    fn name(&self) -> String;
    fn aggregate(&self, orders: &[WeakOrder]) -> Result<Outcome, AggError>;
}

/// A rule over utility profiles; each row holds one individual's utilities.
pub trait UtilityRule: Send + Sync {
    fn name(&self) -> String;
    fn aggregate(&self, utilities: &[Vec<f64>]) -> Result<Outcome, AggError>;
}

/// The global preference produced by a rule, in class names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationOutcome {
    pub rule: String,
    pub transitive: bool,
    pub tiers: Option<Vec<Vec<InteractionClass>>>,
    pub cycle_witness: Option<[InteractionClass; 3]>,
    #[serde(skip)]
    pub relation: Relation,
}

impl AggregationOutcome {
    pub fn new(rule: String, universe: &Universe, outcome: &Outcome) -> Self {
        AggregationOutcome {
            rule,
            transitive: outcome.is_transitive(),
            tiers: outcome
                .ranking
                .as_ref()
                .map(|w| w.tiers().iter().map(|t| universe.names(t)).collect()),
            cycle_witness: outcome.cycle.map(|c| c.map(|i| universe.class(i))),
            relation: outcome.relation.clone(),
        }
    }

    /// Re-checks the cycle witness against the relation.
    pub fn witness_holds(&self, universe: &Universe) -> bool {
        let Some(cycle) = self.cycle_witness else {
            return self.transitive;
        };
        let Ok(idx) = cycle
            .iter()
            .map(|&c| universe.index_of(c))
            .collect::<Result<Vec<_>, _>>()
        else {
            return false;
        };
        let r = &self.relation;
        r.weakly(idx[0], idx[1]) && r.weakly(idx[1], idx[2]) && r.strictly(idx[2], idx[0])
    }
}

pub(crate) fn run_ordinal(rule: &dyn OrdinalRule, p: &Profile) -> Result<AggregationOutcome, AggError> {
    let orders = p.orders().map_err(|_| AggError::WrongMode {
        rule: rule.name(),
        expected: Mode::Ordinal,
    })?;
    let out = rule.aggregate(orders)?;
    Ok(AggregationOutcome::new(rule.name(), p.universe(), &out))
}

pub(crate) fn run_utility(rule: &dyn UtilityRule, p: &Profile) -> Result<AggregationOutcome, AggError> {
    let rows = p.utilities().map_err(|_| AggError::WrongMode {
        rule: rule.name(),
        expected: Mode::Utility,
    })?;
    let out = rule.aggregate(rows)?;
    Ok(AggregationOutcome::new(rule.name(), p.universe(), &out))
}

/// A rule chosen by name, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedRule {
    May,
    Borda,
    Kemeny,
    /// 1-based individual index.
    Dictator(usize),
    Utilitarian,
    MeanDirection,
}

impl std::str::FromStr for NamedRule {
    type Err = AggError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rule = match s {
            "may" | "majority" => NamedRule::May,
            "borda" => NamedRule::Borda,
            "kemeny" => NamedRule::Kemeny,
            "dictator" => NamedRule::Dictator(1),
            "utilitarian" => NamedRule::Utilitarian,
            "mean-direction" => NamedRule::MeanDirection,
            other => match other.strip_prefix("dictator:").and_then(|k| k.parse().ok()) {
                Some(k) if k >= 1 => NamedRule::Dictator(k),
                _ => return Err(AggError::UnknownRule(s.to_string())),
            },
        };
        Ok(rule)
    }
}

/// A concrete rule, by the kind of input it consumes.
pub enum RuleHandle {
    Ordinal(Box<dyn OrdinalRule>),
    Utility(Box<dyn UtilityRule>),
    Direction(Box<dyn DirectionRule>),
}

impl RuleHandle {
    pub fn name(&self) -> String {
        match self {
            RuleHandle::Ordinal(r) => r.name(),
            RuleHandle::Utility(r) => r.name(),
            RuleHandle::Direction(r) => r.name(),
        }
    }
}

impl NamedRule {
    pub fn handle(&self) -> RuleHandle {
        match *self {
            NamedRule::May => RuleHandle::Ordinal(Box::new(MajorityRule)),
            NamedRule::Borda => RuleHandle::Ordinal(Box::new(BordaRule)),
            NamedRule::Kemeny => RuleHandle::Ordinal(Box::new(KemenyRule)),
            NamedRule::Dictator(k) => RuleHandle::Ordinal(Box::new(DictatorRule { k })),
            NamedRule::Utilitarian => RuleHandle::Utility(Box::new(UtilitarianRule)),
            NamedRule::MeanDirection => RuleHandle::Direction(Box::new(MeanDirection)),
        }
    }

    /// Applies the rule to a profile. Utility profiles fed to ordinal rules are
    /// first reduced to the orders they induce.
    pub fn apply(&self, p: &Profile) -> Result<AggregationOutcome, AggError> {
        match self.handle() {
            RuleHandle::Ordinal(r) => run_ordinal(r.as_ref(), &p.to_ordinal(0.0)),
            RuleHandle::Utility(r) => run_utility(r.as_ref(), p),
            RuleHandle::Direction(r) => Err(AggError::WrongMode {
                rule: r.name(),
                expected: Mode::Utility,
            }),
        }
    }
}
