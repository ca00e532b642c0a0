//! Ordered sets of interaction classes that preferences range over.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::contacts::{class_universe, InteractionClass};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum UniverseError {
    #[error("universe is empty")]
    Empty,
    #[error("class {0} appears twice in the universe")]
    Duplicate(InteractionClass),
    #[error("class {0} is not in universe {1:?}")]
    UnknownClass(InteractionClass, String),
    #[error("unknown universe identifier {0:?}")]
    UnknownId(String),
    #[error("synthetic universes hold 1..=210 classes, got {0}")]
    BadSize(usize),
}

/// An ordered list of distinct interaction classes with a short identifier.
///
/// Identifiers `classes-210`, `classes-190` and `first-<m>` name the built-in
/// universes; anything else is `custom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UniverseRepr", into = "UniverseRepr")]
pub struct Universe {
    id: String,
    classes: Vec<InteractionClass>,
    index: HashMap<InteractionClass, usize>,
}

#[derive(Serialize, Deserialize)]
struct UniverseRepr(Vec<InteractionClass>);

impl TryFrom<UniverseRepr> for Universe {
    type Error = UniverseError;

    fn try_from(r: UniverseRepr) -> Result<Self, Self::Error> {
        Universe::from_classes(r.0)
    }
}

impl From<Universe> for UniverseRepr {
    fn from(u: Universe) -> Self {
        UniverseRepr(u.classes)
    }
}

impl Universe {
    fn build(id: String, classes: Vec<InteractionClass>) -> Result<Universe, UniverseError> {
        if classes.is_empty() {
            return Err(UniverseError::Empty);
        }
        let mut index = HashMap::with_capacity(classes.len());
        for (i, &c) in classes.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(UniverseError::Duplicate(c));
            }
        }
        Ok(Universe { id, classes, index })
    }

    /// All 210 classes, or the 190 heteropairs.
    pub fn full(include_homopairs: bool) -> Universe {
        let id = if include_homopairs { "classes-210" } else { "classes-190" };
        Self::build(id.into(), class_universe(include_homopairs)).expect("built-in universe")
    }

    /// The first `m` classes of the 210-class universe; used for synthetic profiles.
    pub fn synthetic(m: usize) -> Result<Universe, UniverseError> {
        if m == 0 || m > 210 {
            return Err(UniverseError::BadSize(m));
        }
        let mut classes = class_universe(true);
        classes.truncate(m);
        Self::build(format!("first-{m}"), classes)
    }

    /// Recognizes built-in universes by their class list, otherwise `custom`.
    pub fn from_classes(classes: Vec<InteractionClass>) -> Result<Universe, UniverseError> {
        let full = class_universe(true);
        let id = if classes == full {
            "classes-210".to_string()
        } else if classes == class_universe(false) {
            "classes-190".to_string()
        } else if !classes.is_empty() && classes.len() <= full.len() && classes[..] == full[..classes.len()] {
            format!("first-{}", classes.len())
        } else {
            "custom".to_string()
        };
        Self::build(id, classes)
    }

    pub fn from_id(id: &str) -> Result<Universe, UniverseError> {
        match id {
            "classes-210" => Ok(Self::full(true)),
            "classes-190" => Ok(Self::full(false)),
            _ => match id.strip_prefix("first-").and_then(|m| m.parse().ok()) {
                Some(m) => Self::synthetic(m),
                None => Err(UniverseError::UnknownId(id.to_string())),
            },
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn classes(&self) -> &[InteractionClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> InteractionClass {
        self.classes[i]
    }

    pub fn index_of(&self, c: InteractionClass) -> Result<usize, UniverseError> {
        self.index
            .get(&c)
            .copied()
            .ok_or_else(|| UniverseError::UnknownClass(c, self.id.clone()))
    }

    pub fn names(&self, idx: &[usize]) -> Vec<InteractionClass> {
        idx.iter().map(|&i| self.classes[i]).collect()
    }
}
