//! Observer: the deterministic state estimator obtained by subset
//! construction with unobservable closure.

use std::collections::{HashMap, VecDeque};

use crate::model::Nfa;
use crate::reach;
use crate::stateset::{EventId, StateSet};
use crate::LimitExceeded;

/// Index of an observer state, in BFS discovery order (the initial state is 0).
pub type ObsStateId = usize;

#[derive(Clone, Debug)]
pub struct Observer {
    states: Vec<StateSet>,
    index: HashMap<StateSet, ObsStateId>,
    // [state][event], None where R is empty or the event is unobservable
    delta: Vec<Vec<Option<ObsStateId>>>,
    // BFS tree edge that discovered each state
    parent: Vec<Option<(ObsStateId, EventId)>>,
    events: Vec<EventId>,
}

/// Builds the observer with no state cap.
pub fn build_observer(nfa: &Nfa) -> Observer {
    build_observer_bounded(nfa, usize::MAX).expect("unbounded build cannot exceed its limit")
}

/// Builds the observer, failing once more than `max_states` estimates exist.
pub fn build_observer_bounded(nfa: &Nfa, max_states: usize) -> Result<Observer, LimitExceeded> {
    let events: Vec<EventId> = nfa.observable_events().collect();
    let initial = reach::unobservable_reach(nfa, nfa.initial());
    let mut obs = Observer {
        states: vec![initial.clone()],
        index: HashMap::from([(initial, 0)]),
        delta: vec![vec![None; nfa.num_events()]],
        parent: vec![None],
        events: events.clone(),
    };
    let mut queue = VecDeque::from([0]);
    while let Some(q) = queue.pop_front() {
        for &e in &events {
            let target = reach::observable_reach_unchecked(nfa, &obs.states[q], e);
            if target.is_empty() {
                continue;
            }
            let id = match obs.index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = obs.states.len();
                    if id >= max_states {
                        return Err(LimitExceeded {
                            structure: "observer",
                            limit: max_states,
                        });
                    }
                    obs.states.push(target.clone());
                    obs.index.insert(target, id);
                    obs.delta.push(vec![None; nfa.num_events()]);
                    obs.parent.push(Some((q, e)));
                    queue.push_back(id);
                    id
                }
            };
            obs.delta[q][e.index()] = Some(id);
        }
    }
    Ok(obs)
}

impl Observer {
    pub fn initial(&self) -> ObsStateId {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, q: ObsStateId) -> &StateSet {
        &self.states[q]
    }

    pub fn states(&self) -> impl Iterator<Item = (ObsStateId, &StateSet)> {
        self.states.iter().enumerate()
    }

    pub fn find(&self, set: &StateSet) -> Option<ObsStateId> {
        self.index.get(set).copied()
    }

    /// Observable events of the source model, in declaration order.
    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn successor(&self, q: ObsStateId, e: EventId) -> Option<ObsStateId> {
        self.delta[q].get(e.index()).copied().flatten()
    }

    /// Defined transitions out of `q`, events in declaration order.
    pub fn out_edges(&self, q: ObsStateId) -> impl Iterator<Item = (EventId, ObsStateId)> + '_ {
        self.events
            .iter()
            .filter_map(move |&e| self.successor(q, e).map(|t| (e, t)))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (ObsStateId, EventId, ObsStateId)> + '_ {
        (0..self.len()).flat_map(move |q| self.out_edges(q).map(move |(e, t)| (q, e, t)))
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions().count()
    }

    /// State reached by `word` from the initial estimate, `None` if the word is
    /// not in the observer's language.
    pub fn run(&self, word: &[EventId]) -> Option<ObsStateId> {
        word.iter()
            .try_fold(self.initial(), |q, &e| self.successor(q, e))
    }

    pub fn state_after(&self, word: &[EventId]) -> Option<&StateSet> {
        self.run(word).map(|q| self.state(q))
    }

    /// Shortest observation reaching `q` (first found in BFS order).
    pub fn access_word(&self, q: ObsStateId) -> Vec<EventId> {
        let mut word = Vec::new();
        let mut cur = q;
        while let Some((p, e)) = self.parent[cur] {
            word.push(e);
            cur = p;
        }
        word.reverse();
        word
    }
}
