//! Internal aggregation: one protein's contacts collapsed into its individual
//! preference, either a utility per class or a ranking with ties.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contacts::{InteractionClass, InteractionInstance};
use crate::order::WeakOrder;
use crate::universe::{Universe, UniverseError};

#[derive(Debug, thiserror::Error)]
pub enum InternalAggError {
    #[error("instances come from more than one protein: {0:?} and {1:?}")]
    MixedProteins(String, String),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("non-finite utility for class {0}")]
    NonFinite(InteractionClass),
    #[error("tie_epsilon must be finite and non-negative, got {0}")]
    BadEpsilon(f64),
    #[error("ranking tiers do not partition universe {0:?}")]
    NotAPartition(String),
}

/// How the scores of a class's contacts become its utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    Sum,
    Mean,
    Count,
}

impl std::str::FromStr for Combine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Combine::Sum),
            "mean" => Ok(Combine::Mean),
            "count" => Ok(Combine::Count),
            other => Err(format!("unknown combine mode {other:?} (expected sum, mean or count)")),
        }
    }
}

/// Utility of every class in a universe for one protein.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    pub owner: String,
    universe: Universe,
    values: Vec<f64>,
}

impl UtilityVector {
    pub fn new(owner: impl Into<String>, universe: Universe, values: Vec<f64>) -> Result<Self, InternalAggError> {
        assert_eq!(universe.len(), values.len(), "one value per class");
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(InternalAggError::NonFinite(universe.class(i)));
        }
        Ok(UtilityVector {
            owner: owner.into(),
            universe,
            values,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, class: InteractionClass) -> Result<f64, InternalAggError> {
        Ok(self.values[self.universe.index_of(class)?])
    }
}

#[derive(Serialize, Deserialize)]
struct UtilityVectorJson {
    owner: String,
    universe: String,
    values: BTreeMap<InteractionClass, f64>,
}

impl Serialize for UtilityVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        UtilityVectorJson {
            owner: self.owner.clone(),
            universe: self.universe.id().to_string(),
            values: self
                .universe
                .classes()
                .iter()
                .copied()
                .zip(self.values.iter().copied())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UtilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = UtilityVectorJson::deserialize(deserializer)?;
        let universe = match Universe::from_id(&j.universe) {
            Ok(u) => u,
            Err(_) => Universe::from_classes(j.values.keys().copied().collect()).map_err(D::Error::custom)?,
        };
        let mut values = vec![0.0; universe.len()];
        for (c, v) in &j.values {
            values[universe.index_of(*c).map_err(D::Error::custom)?] = *v;
        }
        UtilityVector::new(j.owner, universe, values).map_err(D::Error::custom)
    }
}

/// A total preorder over a universe, most preferred tier first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingWithTies {
    pub owner: String,
    pub universe: String,
    pub tiers: Vec<Vec<InteractionClass>>,
}

impl RankingWithTies {
    pub fn from_order(owner: impl Into<String>, universe: &Universe, order: &WeakOrder) -> Self {
        RankingWithTies {
            owner: owner.into(),
            universe: universe.id().to_string(),
            tiers: order.tiers().iter().map(|t| universe.names(t)).collect(),
        }
    }

    /// Index-level order; fails unless the tiers partition `universe`.
    pub fn to_order(&self, universe: &Universe) -> Result<WeakOrder, InternalAggError> {
        let tiers = self
            .tiers
            .iter()
            .map(|t| t.iter().map(|&c| universe.index_of(c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        WeakOrder::from_tiers(&tiers, universe.len())
            .ok_or_else(|| InternalAggError::NotAPartition(universe.id().to_string()))
    }
}

/// Utility per class from the protein's contacts; classes without contacts get 0.
pub fn utility_from_instances(
    instances: &[InteractionInstance],
    universe: &Universe,
    combine: Combine,
) -> Result<UtilityVector, InternalAggError> {
    let owner = match instances.first() {
        Some(i) => i.protein_id.clone(),
        None => String::new(),
    };
    let mut sums = vec![0.0; universe.len()];
    let mut counts = vec![0usize; universe.len()];
    for inst in instances {
        if inst.protein_id != owner {
            return Err(InternalAggError::MixedProteins(owner, inst.protein_id.clone()));
        }
        let i = universe.index_of(inst.class)?;
        sums[i] += inst.score;
        counts[i] += 1;
    }
    let values = match combine {
        Combine::Sum => sums,
        Combine::Count => counts.iter().map(|&c| c as f64).collect(),
        Combine::Mean => sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect(),
    };
    UtilityVector::new(owner, universe.clone(), values)
}

/// Index-level version of [`ordinal_from_utility`].
pub fn order_from_values(values: &[f64], tie_epsilon: f64) -> WeakOrder {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut level = vec![0u32; values.len()];
    let mut tier = 0;
    for w in 1..idx.len() {
        // single linkage: a gap larger than epsilon between neighbours opens a new tier
        if values[idx[w - 1]] - values[idx[w]] > tie_epsilon {
            tier += 1;
        }
        level[idx[w]] = tier;
    }
    WeakOrder::from_levels(&level)
}

/// Ranks classes by decreasing utility. Neighbouring utilities within
/// `tie_epsilon` are chained into one tier; `0.0` groups exact equality only.
pub fn ordinal_from_utility(u: &UtilityVector, tie_epsilon: f64) -> Result<RankingWithTies, InternalAggError> {
    if !(tie_epsilon.is_finite() && tie_epsilon >= 0.0) {
        return Err(InternalAggError::BadEpsilon(tie_epsilon));
    }
    let order = order_from_values(&u.values, tie_epsilon);
    Ok(RankingWithTies::from_order(u.owner.clone(), &u.universe, &order))
}
