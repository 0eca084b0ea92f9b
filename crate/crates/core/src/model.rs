//! Partially observed NFA with secret states, and its JSON model format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reach;
use crate::stateset::{EventId, StateId, StateSet};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{location}: empty name")]
    EmptyName { location: String },
    #[error("{location}: duplicate identifier \"{name}\"")]
    Duplicate { name: String, location: String },
    #[error("{location}: unknown state \"{name}\"")]
    UnknownState { name: String, location: String },
    #[error("{location}: unknown event \"{name}\"")]
    UnknownEvent { name: String, location: String },
    #[error("transitions[{index}]: duplicate of transitions[{first}]")]
    DuplicateTransition { index: usize, first: usize },
    #[error("empty initial set")]
    EmptyInitial,
}

/// Event declaration as it appears in a model file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub name: String,
    pub observable: bool,
}

/// Raw model description: the exact shape of the JSON model file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub states: Vec<String>,
    pub events: Vec<Event>,
    pub initial: Vec<String>,
    pub secret: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }
}

/// A validated nondeterministic automaton `(X, E, δ, X_0)` with secret states.
///
/// States and events are referred to by [`StateId`] / [`EventId`], their
/// position in declaration order. Unobservable and nonsecret closures plus the
/// single-state observable reach tables are computed once at construction.
#[derive(Clone, Debug)]
pub struct Nfa {
    state_names: Vec<String>,
    state_index: HashMap<String, StateId>,
    events: Vec<Event>,
    event_index: HashMap<String, EventId>,
    transitions: Vec<(StateId, EventId, StateId)>,
    // successors[state][event], ascending
    successors: Vec<Vec<Vec<StateId>>>,
    initial: StateSet,
    secret: StateSet,
    nonsecret: StateSet,
    pub(crate) tables: reach::ReachTables,
}

fn check_name(name: &str, location: impl FnOnce() -> String) -> Result<(), ModelError> {
    if name.trim().is_empty() {
        return Err(ModelError::EmptyName {
            location: location(),
        });
    }
    Ok(())
}

impl Nfa {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self, ModelError> {
        let mut state_index = HashMap::new();
        for (i, name) in spec.states.iter().enumerate() {
            check_name(name, || format!("states[{i}]"))?;
            if state_index.insert(name.clone(), StateId::new(i)).is_some() {
                return Err(ModelError::Duplicate {
                    name: name.clone(),
                    location: format!("states[{i}]"),
                });
            }
        }
        let mut event_index = HashMap::new();
        for (i, ev) in spec.events.iter().enumerate() {
            check_name(&ev.name, || format!("events[{i}]"))?;
            if event_index
                .insert(ev.name.clone(), EventId::new(i))
                .is_some()
            {
                return Err(ModelError::Duplicate {
                    name: ev.name.clone(),
                    location: format!("events[{i}]"),
                });
            }
        }

        let lookup_state = |name: &str, location: String| {
            state_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownState {
                    name: name.to_string(),
                    location,
                })
        };
        let collect_states = |names: &[String], field: &str| -> Result<StateSet, ModelError> {
            let mut set = StateSet::new();
            for (i, name) in names.iter().enumerate() {
                let id = lookup_state(name, format!("{field}[{i}]"))?;
                if !set.insert(id) {
                    return Err(ModelError::Duplicate {
                        name: name.clone(),
                        location: format!("{field}[{i}]"),
                    });
                }
            }
            Ok(set)
        };
        let initial = collect_states(&spec.initial, "initial")?;
        if initial.is_empty() {
            return Err(ModelError::EmptyInitial);
        }
        let secret = collect_states(&spec.secret, "secret")?;

        let mut transitions = Vec::with_capacity(spec.transitions.len());
        let mut seen: HashMap<(StateId, EventId, StateId), usize> = HashMap::new();
        for (i, (src, ev, dst)) in spec.transitions.iter().enumerate() {
            let s = lookup_state(src, format!("transitions[{i}] source"))?;
            let e =
                event_index
                    .get(ev.as_str())
                    .copied()
                    .ok_or_else(|| ModelError::UnknownEvent {
                        name: ev.clone(),
                        location: format!("transitions[{i}] event"),
                    })?;
            let d = lookup_state(dst, format!("transitions[{i}] target"))?;
            if let Some(&first) = seen.get(&(s, e, d)) {
                return Err(ModelError::DuplicateTransition { index: i, first });
            }
            seen.insert((s, e, d), i);
            transitions.push((s, e, d));
        }

        let n = spec.states.len();
        let mut successors = vec![vec![Vec::new(); spec.events.len()]; n];
        for &(s, e, d) in &transitions {
            successors[s.index()][e.index()].push(d);
        }
        for row in &mut successors {
            for targets in row {
                targets.sort();
            }
        }

        let nonsecret = StateSet::full(n).difference(&secret);
        let mut nfa = Nfa {
            state_names: spec.states.clone(),
            state_index,
            events: spec.events.clone(),
            event_index,
            transitions,
            successors,
            initial,
            secret,
            nonsecret,
            tables: reach::ReachTables::default(),
        };
        nfa.tables = reach::ReachTables::build(&nfa);
        Ok(nfa)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Nfa::from_spec(&ModelSpec::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Nfa::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> ModelSpec {
        let names = |set: &StateSet| set.iter().map(|s| self.state_name(s).to_string()).collect();
        ModelSpec {
            states: self.state_names.clone(),
            events: self.events.clone(),
            initial: names(&self.initial),
            secret: names(&self.secret),
            transitions: self
                .transitions
                .iter()
                .map(|&(s, e, d)| {
                    (
                        self.state_name(s).to_string(),
                        self.event(e).name.clone(),
                        self.state_name(d).to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).map(StateId::new)
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.num_events()).map(EventId::new)
    }

    /// Observable events in declaration order.
    pub fn observable_events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.event_ids().filter(|&e| self.is_observable(e))
    }

    pub fn unobservable_events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.event_ids().filter(|&e| !self.is_observable(e))
    }

    pub fn event(&self, e: EventId) -> &Event {
        &self.events[e.index()]
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.events[e.index()].observable
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    pub fn transitions(&self) -> &[(StateId, EventId, StateId)] {
        &self.transitions
    }

    /// `δ(x, e)` for a single state, ascending.
    pub fn successors(&self, s: StateId, e: EventId) -> &[StateId] {
        &self.successors[s.index()][e.index()]
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn secret(&self) -> &StateSet {
        &self.secret
    }

    /// `X_NS = X \ X_S`.
    pub fn nonsecret(&self) -> &StateSet {
        &self.nonsecret
    }

    pub fn is_secret(&self, s: StateId) -> bool {
        self.secret.contains(s)
    }

    /// Resolves a list of state names into a set.
    pub fn parse_states<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet, ModelError> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                self.state_id(n.as_ref().trim())
                    .ok_or_else(|| ModelError::UnknownState {
                        name: n.as_ref().to_string(),
                        location: format!("state list position {i}"),
                    })
            })
            .collect()
    }

    /// Resolves a list of event names into an event string.
    pub fn parse_events<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<EventId>, ModelError> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                self.event_id(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownEvent {
                        name: n.as_ref().to_string(),
                        location: format!("event string position {}", i + 1),
                    })
            })
            .collect()
    }

    /// Natural projection: drops unobservable events, keeps order.
    pub fn project(&self, word: &[EventId]) -> Vec<EventId> {
        word.iter()
            .copied()
            .filter(|&e| self.is_observable(e))
            .collect()
    }

    /// `{2,5,8}` style rendering with state names; `{}` for the empty set.
    pub fn format_set(&self, set: &StateSet) -> String {
        let mut out = String::from("{");
        for (i, s) in set.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(self.state_name(s));
        }
        out.push('}');
        out
    }

    pub fn format_pair(&self, a: &StateSet, b: &StateSet) -> String {
        format!("({},{})", self.format_set(a), self.format_set(b))
    }

    /// Space separated event names, `ε` for the empty word.
    pub fn format_word(&self, word: &[EventId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let mut out = String::new();
        for (i, &e) in word.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", self.event(e).name);
        }
        out
    }

    pub fn word_names(&self, word: &[EventId]) -> Vec<String> {
        word.iter().map(|&e| self.event(e).name.clone()).collect()
    }
}
