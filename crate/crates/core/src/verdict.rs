//! Verdicts, witnesses, and their JSON form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, Nfa};
use crate::observer::Observer;
use crate::reach;
use crate::stateset::{EventId, StateSet};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "cs")]
    CurrentState,
    #[serde(rename = "k-weak")]
    KStepWeak,
    #[serde(rename = "k-strong")]
    KStepStrong,
    #[serde(rename = "inf-weak")]
    InfiniteStepWeak,
    #[serde(rename = "inf-strong")]
    InfiniteStepStrong,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::CurrentState,
        Property::KStepWeak,
        Property::KStepStrong,
        Property::InfiniteStepWeak,
        Property::InfiniteStepStrong,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::CurrentState => "cs",
            Property::KStepWeak => "k-weak",
            Property::KStepStrong => "k-strong",
            Property::InfiniteStepWeak => "inf-weak",
            Property::InfiniteStepStrong => "inf-strong",
        }
    }

    pub fn takes_k(self) -> bool {
        matches!(self, Property::KStepWeak | Property::KStepStrong)
    }

    pub fn is_strong(self) -> bool {
        matches!(self, Property::KStepStrong | Property::InfiniteStepStrong)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// Observation `prefix · continuation` exposing a secret.
///
/// For tree-based checks `prefix` reaches the root's observer state and
/// `continuation` descends to the violating node `(x1, x2)`. For the
/// infinite-step strong check the whole observation sits in `prefix` and the
/// node is the first verifier state with empty second component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub prefix: Vec<EventId>,
    pub continuation: Vec<EventId>,
    pub x1: StateSet,
    pub x2: StateSet,
}

impl Witness {
    pub fn word(&self) -> Vec<EventId> {
        let mut w = self.prefix.clone();
        w.extend_from_slice(&self.continuation);
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub k: Option<usize>,
    pub opaque: bool,
    pub witness: Option<Witness>,
    /// Nodes or states materialized before the verdict was reached.
    pub explored: usize,
}

impl Verdict {
    pub(crate) fn new(
        property: Property,
        k: Option<usize>,
        witness: Option<Witness>,
        explored: usize,
    ) -> Self {
        Verdict {
            property,
            k,
            opaque: witness.is_none(),
            witness,
            explored,
        }
    }

    pub fn to_report(&self, nfa: &Nfa) -> VerdictReport {
        VerdictReport {
            property: self.property,
            k: self.k,
            opaque: self.opaque,
            witness: self.witness.as_ref().map(|w| WitnessReport {
                prefix: nfa.word_names(&w.prefix),
                continuation: nfa.word_names(&w.continuation),
                node: nfa.format_pair(&w.x1, &w.x2),
            }),
        }
    }

    /// Checks the witness against direct set computations on `nfa`. Opaque
    /// verdicts trivially pass.
    pub fn replay(&self, nfa: &Nfa, obs: &Observer) -> Result<(), String> {
        match &self.witness {
            None => Ok(()),
            Some(w) => replay_witness(nfa, obs, self.property, self.k, w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub prefix: Vec<String>,
    pub continuation: Vec<String>,
    pub node: String,
}

/// `(prefix, continuation)`.
pub type WitnessWords = (Vec<EventId>, Vec<EventId>);

/// Serialized verdict: `{property, k, opaque, witness}` with event names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub property: Property,
    pub k: Option<usize>,
    pub opaque: bool,
    pub witness: Option<WitnessReport>,
}

impl VerdictReport {
    /// Rebuilds the witness words against `nfa`; the node pair is recomputed
    /// by replay rather than parsed.
    pub fn witness_words(&self, nfa: &Nfa) -> Result<Option<WitnessWords>, ModelError> {
        match &self.witness {
            None => Ok(None),
            Some(w) => Ok(Some((
                nfa.parse_events(&w.prefix)?,
                nfa.parse_events(&w.continuation)?,
            ))),
        }
    }
}

fn replay_witness(
    nfa: &Nfa,
    obs: &Observer,
    property: Property,
    k: Option<usize>,
    w: &Witness,
) -> Result<(), String> {
    let q = obs
        .run(&w.prefix)
        .ok_or_else(|| format!("prefix {} is not observable", nfa.format_word(&w.prefix)))?;
    let root = obs.state(q).clone();
    let observable = |e: EventId| {
        if nfa.is_observable(e) {
            Ok(())
        } else {
            Err(format!("event {} is unobservable", nfa.event(e).name))
        }
    };
    let end = match obs.run(&w.word()) {
        Some(q) => obs.state(q).clone(),
        None => return Err(format!("{} is not observable", nfa.format_word(&w.word()))),
    };
    let (x1, x2) = match property {
        Property::CurrentState | Property::KStepWeak | Property::InfiniteStepWeak => {
            let limit = match property {
                Property::CurrentState => Some(0),
                Property::KStepWeak => k,
                _ => None,
            };
            if limit.is_some_and(|k| w.continuation.len() > k) {
                return Err("continuation longer than K".into());
            }
            let mut x1 = root.intersection(nfa.secret());
            let mut x2 = root.intersection(nfa.nonsecret());
            if x1.is_empty() {
                return Err("root has no secret state".into());
            }
            for &e in &w.continuation {
                observable(e)?;
                x1 = reach::observable_reach_unchecked(nfa, &x1, e);
                x2 = reach::observable_reach_unchecked(nfa, &x2, e);
            }
            if x1.is_empty() {
                return Err("secret part does not survive the continuation".into());
            }
            (x1, x2)
        }
        Property::KStepStrong => {
            if k.is_some_and(|k| w.continuation.len() > k) {
                return Err("continuation longer than K".into());
            }
            let mut x2 = root.intersection(nfa.nonsecret());
            for &e in &w.continuation {
                observable(e)?;
                x2 = reach::secret_avoiding_reach_unchecked(nfa, &x2, e);
            }
            (end.clone(), x2)
        }
        Property::InfiniteStepStrong => {
            let start = nfa.initial().intersection(nfa.nonsecret());
            let mut x2 = reach::nonsecret_unobservable_reach(nfa, &start);
            for &e in &w.word() {
                observable(e)?;
                x2 = reach::secret_avoiding_reach_unchecked(nfa, &x2, e);
            }
            (end.clone(), x2)
        }
    };
    if !x2.is_empty() {
        return Err(format!(
            "replay ends at {} with nonempty second component",
            nfa.format_pair(&x1, &x2)
        ));
    }
    if (x1.clone(), x2.clone()) != (w.x1.clone(), w.x2.clone()) {
        return Err(format!(
            "replay ends at {}, witness claims {}",
            nfa.format_pair(&x1, &x2),
            nfa.format_pair(&w.x1, &w.x2)
        ));
    }
    Ok(())
}
