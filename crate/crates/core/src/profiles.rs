//! Preference profiles, Kendall distances between them, and seeded synthetic
//! profile generators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contacts::InteractionClass;
use crate::internal_agg::{order_from_values, InternalAggError, RankingWithTies, UtilityVector};
use crate::order::{kendall_half_units, WeakOrder};
use crate::rng::Prng;
use crate::universe::{Universe, UniverseError};

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("a profile needs at least 2 individuals, got {0}")]
    TooFewIndividuals(usize),
    #[error("rankings range over different universes ({0:?} vs {1:?})")]
    UniverseMismatch(String, String),
    #[error("profiles are not compatible: {0}")]
    Incompatible(String),
    #[error("expected a {expected} profile")]
    WrongMode { expected: Mode },
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
    #[error("individual {owner:?} has {got} values for a universe of {want}")]
    WrongLength { owner: String, got: usize, want: usize },
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Internal(#[from] InternalAggError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ordinal,
    Utility,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Ordinal => "ordinal",
            Mode::Utility => "utility",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preferences {
    Ordinal(Vec<WeakOrder>),
    Utility(Vec<Vec<f64>>),
}

/// The ordered list of individual preferences over a shared universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    universe: Universe,
    owners: Vec<String>,
    prefs: Preferences,
}

/// `P1`, `P2`, ... for synthetic individuals.
pub fn default_owners(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("P{i}")).collect()
}

impl Profile {
    pub fn ordinal(universe: Universe, owners: Vec<String>, orders: Vec<WeakOrder>) -> Result<Profile, ProfileError> {
        assert_eq!(owners.len(), orders.len());
        if orders.len() < 2 {
            return Err(ProfileError::TooFewIndividuals(orders.len()));
        }
        for (o, w) in owners.iter().zip(&orders) {
            if w.len() != universe.len() {
                return Err(ProfileError::WrongLength {
                    owner: o.clone(),
                    got: w.len(),
                    want: universe.len(),
                });
            }
        }
        Ok(Profile {
            universe,
            owners,
            prefs: Preferences::Ordinal(orders),
        })
    }

    pub fn utility(universe: Universe, owners: Vec<String>, values: Vec<Vec<f64>>) -> Result<Profile, ProfileError> {
        assert_eq!(owners.len(), values.len());
        if values.len() < 2 {
            return Err(ProfileError::TooFewIndividuals(values.len()));
        }
        for (o, v) in owners.iter().zip(&values) {
            if v.len() != universe.len() {
                return Err(ProfileError::WrongLength {
                    owner: o.clone(),
                    got: v.len(),
                    want: universe.len(),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(InternalAggError::NonFinite(universe.class(i)).into());
            }
        }
        Ok(Profile {
            universe,
            owners,
            prefs: Preferences::Utility(values),
        })
    }

    /// Synthetic ordinal profile with owners `P1..Pn`.
    pub fn from_orders(universe: Universe, orders: Vec<WeakOrder>) -> Result<Profile, ProfileError> {
        Self::ordinal(universe, default_owners(orders.len()), orders)
    }

    pub fn from_rankings(universe: Universe, rankings: &[RankingWithTies]) -> Result<Profile, ProfileError> {
        let orders = rankings
            .iter()
            .map(|r| r.to_order(&universe))
            .collect::<Result<Vec<_>, _>>()?;
        let owners = rankings.iter().map(|r| r.owner.clone()).collect();
        Self::ordinal(universe, owners, orders)
    }

    pub fn from_utility_vectors(vectors: &[UtilityVector]) -> Result<Profile, ProfileError> {
        let Some(first) = vectors.first() else {
            return Err(ProfileError::TooFewIndividuals(0));
        };
        let universe = first.universe().clone();
        for v in vectors {
            if v.universe() != &universe {
                return Err(ProfileError::UniverseMismatch(
                    universe.id().to_string(),
                    v.universe().id().to_string(),
                ));
            }
        }
        Self::utility(
            universe,
            vectors.iter().map(|v| v.owner.clone()).collect(),
            vectors.iter().map(|v| v.values().to_vec()).collect(),
        )
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn owners(&self) -> &[String] {
        &self.owners
    }

    pub fn mode(&self) -> Mode {
        match self.prefs {
            Preferences::Ordinal(_) => Mode::Ordinal,
            Preferences::Utility(_) => Mode::Utility,
        }
    }

    pub fn preferences(&self) -> &Preferences {
        &self.prefs
    }

    /// Number of individuals.
    pub fn n(&self) -> usize {
        self.owners.len()
    }

    /// Number of classes.
    pub fn m(&self) -> usize {
        self.universe.len()
    }

    pub fn orders(&self) -> Result<&[WeakOrder], ProfileError> {
        match &self.prefs {
            Preferences::Ordinal(o) => Ok(o),
            Preferences::Utility(_) => Err(ProfileError::WrongMode { expected: Mode::Ordinal }),
        }
    }

    pub fn utilities(&self) -> Result<&[Vec<f64>], ProfileError> {
        match &self.prefs {
            Preferences::Utility(u) => Ok(u),
            Preferences::Ordinal(_) => Err(ProfileError::WrongMode { expected: Mode::Utility }),
        }
    }

    /// The ordinal profile each individual's utilities induce (exact ties only
    /// at `tie_epsilon = 0`). Ordinal profiles are returned unchanged.
    pub fn to_ordinal(&self, tie_epsilon: f64) -> Profile {
        match &self.prefs {
            Preferences::Ordinal(_) => self.clone(),
            Preferences::Utility(u) => Profile {
                universe: self.universe.clone(),
                owners: self.owners.clone(),
                prefs: Preferences::Ordinal(u.iter().map(|v| order_from_values(v, tie_epsilon)).collect()),
            },
        }
    }

    pub fn rankings(&self) -> Result<Vec<RankingWithTies>, ProfileError> {
        Ok(self
            .orders()?
            .iter()
            .zip(&self.owners)
            .map(|(w, o)| RankingWithTies::from_order(o.clone(), &self.universe, w))
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct IndividualJson {
    owner: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tiers: Option<Vec<Vec<InteractionClass>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<BTreeMap<InteractionClass, f64>>,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    universe: Universe,
    mode: Mode,
    individuals: Vec<IndividualJson>,
}

impl Serialize for Profile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let individuals = match &self.prefs {
            Preferences::Ordinal(orders) => orders
                .iter()
                .zip(&self.owners)
                .map(|(w, o)| IndividualJson {
                    owner: o.clone(),
                    tiers: Some(w.tiers().iter().map(|t| self.universe.names(t)).collect()),
                    values: None,
                })
                .collect(),
            Preferences::Utility(values) => values
                .iter()
                .zip(&self.owners)
                .map(|(v, o)| IndividualJson {
                    owner: o.clone(),
                    tiers: None,
                    values: Some(self.universe.classes().iter().copied().zip(v.iter().copied()).collect()),
                })
                .collect(),
        };
        ProfileJson {
            universe: self.universe.clone(),
            mode: self.mode(),
            individuals,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = ProfileJson::deserialize(deserializer)?;
        let universe = j.universe;
        let owners: Vec<String> = j.individuals.iter().map(|i| i.owner.clone()).collect();
        match j.mode {
            Mode::Ordinal => {
                let rankings = j
                    .individuals
                    .into_iter()
                    .map(|i| {
                        let tiers = i
                            .tiers
                            .ok_or_else(|| D::Error::custom(format!("individual {:?} has no tiers", i.owner)))?;
                        Ok(RankingWithTies {
                            owner: i.owner,
                            universe: universe.id().to_string(),
                            tiers,
                        })
                    })
                    .collect::<Result<Vec<_>, D::Error>>()?;
                Profile::from_rankings(universe, &rankings).map_err(D::Error::custom)
            }
            Mode::Utility => {
                let mut rows = Vec::with_capacity(owners.len());
                for i in j.individuals {
                    let vals = i
                        .values
                        .ok_or_else(|| D::Error::custom(format!("individual {:?} has no values", i.owner)))?;
                    if vals.len() != universe.len() {
                        return Err(D::Error::custom(format!(
                            "individual {:?} has {} values for a universe of {}",
                            i.owner,
                            vals.len(),
                            universe.len()
                        )));
                    }
                    let mut row = vec![0.0; universe.len()];
                    for (c, v) in vals {
                        row[universe.index_of(c).map_err(D::Error::custom)?] = v;
                    }
                    rows.push(row);
                }
                Profile::utility(universe, owners, rows).map_err(D::Error::custom)
            }
        }
    }
}

/// Kendall distance: 1 per class pair ordered oppositely, ½ per pair tied in
/// exactly one of the two rankings.
pub fn kendall_distance(a: &RankingWithTies, b: &RankingWithTies) -> Result<f64, ProfileError> {
    if a.universe != b.universe {
        return Err(ProfileError::UniverseMismatch(a.universe.clone(), b.universe.clone()));
    }
    let mut classes: Vec<InteractionClass> = a.tiers.iter().flatten().copied().collect();
    classes.sort();
    let universe = Universe::from_classes(classes)?;
    let x = a.to_order(&universe)?;
    let y = b
        .to_order(&universe)
        .map_err(|_| ProfileError::UniverseMismatch(a.universe.clone(), b.universe.clone()))?;
    Ok(kendall_half_units(&x, &y) as f64 / 2.0)
}

/// Profile distance in half units; both profiles must be ordinal and compatible.
pub fn profile_half_distance(p: &Profile, q: &Profile) -> Result<u64, ProfileError> {
    if p.n() != q.n() {
        return Err(ProfileError::Incompatible(format!("{} vs {} individuals", p.n(), q.n())));
    }
    if p.universe != q.universe {
        return Err(ProfileError::Incompatible(format!(
            "universes {:?} vs {:?}",
            p.universe.id(),
            q.universe.id()
        )));
    }
    Ok(p.orders()?
        .iter()
        .zip(q.orders()?)
        .map(|(x, y)| kendall_half_units(x, y))
        .sum())
}

/// Sum of Kendall distances between aligned individuals.
pub fn profile_distance(p: &Profile, q: &Profile) -> Result<f64, ProfileError> {
    Ok(profile_half_distance(p, q)? as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthKind {
    /// Uniformly random strict orders.
    ImpartialCulture,
    /// Strict orders single-peaked on one random axis.
    SinglePeaked,
    /// Rotations of the first three classes, repeated; needs `m >= 3`, `n = 3k`.
    CondorcetCycle,
    /// Explicit strict orders, best first, one per individual.
    Custom { orders: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |s: String| Err(ProfileError::BadSpec(s));
        if self.m < 1 || self.m > 210 {
            return bad(format!("m must be in 1..=210, got {}", self.m));
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        match &self.kind {
            SynthKind::CondorcetCycle if self.m < 3 || !self.n.is_multiple_of(3) => {
                bad(format!("condorcet_cycle needs m >= 3 and n divisible by 3, got m={} n={}", self.m, self.n))
            }
            SynthKind::Custom { orders } => {
                if orders.len() != self.n {
                    return bad(format!("{} custom orders for n={}", orders.len(), self.n));
                }
                for o in orders {
                    let mut s = o.clone();
                    s.sort_unstable();
                    if s != (0..self.m).collect::<Vec<_>>() {
                        return bad(format!("custom order {o:?} is not a permutation of 0..{}", self.m));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// The axis the single-peaked generator uses for `(m, seed)`.
pub fn single_peaked_axis(m: usize, seed: u64) -> Vec<usize> {
    Prng::new(seed).permutation(m)
}

/// A strict order single-peaked on `axis`: start at a random peak and grow
/// the visited interval one neighbour at a time.
fn single_peaked_order(axis: &[usize], rng: &mut Prng) -> Vec<usize> {
    let m = axis.len();
    let peak = rng.below(m);
    let mut seq = vec![axis[peak]];
    let (mut left, mut right) = (peak as isize - 1, peak + 1);
    while seq.len() < m {
        let go_left = if left < 0 {
            false
        } else if right >= m {
            true
        } else {
            rng.coin()
        };
        if go_left {
            seq.push(axis[left as usize]);
            left -= 1;
        } else {
            seq.push(axis[right]);
            right += 1;
        }
    }
    seq
}

/// Builds a synthetic ordinal profile over [`Universe::synthetic`]`(m)`.
/// Output is a pure function of `spec`.
pub fn generate(spec: &SynthSpec) -> Result<Profile, ProfileError> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let universe = Universe::synthetic(m)?;
    let orders: Vec<WeakOrder> = match &spec.kind {
        SynthKind::ImpartialCulture => {
            let mut rng = Prng::new(spec.seed);
            (0..n).map(|_| WeakOrder::strict(&rng.permutation(m))).collect()
        }
        SynthKind::SinglePeaked => {
            let mut rng = Prng::new(spec.seed);
            // the axis consumes the first draws, matching single_peaked_axis
            let axis = rng.permutation(m);
            (0..n)
                .map(|_| WeakOrder::strict(&single_peaked_order(&axis, &mut rng)))
                .collect()
        }
        SynthKind::CondorcetCycle => (0..n)
            .map(|i| {
                let r = i % 3;
                let mut seq: Vec<usize> = (0..3).map(|k| (k + r) % 3).collect();
                seq.extend(3..m);
                WeakOrder::strict(&seq)
            })
            .collect(),
        SynthKind::Custom { orders } => orders.iter().map(|o| WeakOrder::strict(o)).collect(),
    };
    Profile::from_orders(universe, orders)
}
