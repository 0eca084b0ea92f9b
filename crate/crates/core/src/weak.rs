//! K-step weak, current-state and infinite-step weak opacity via state-trees.

use crate::model::Nfa;
use crate::observer::{build_observer, Observer};
use crate::reach;
use crate::stateset::{EventId, StateSet};
use crate::tree::{self, PairRule, StateTree, TreeError, TreeKind};
use crate::verdict::{Property, Verdict, Witness};

struct WeakRule<'a> {
    nfa: &'a Nfa,
}

impl PairRule for WeakRule<'_> {
    fn root(&self, state: &StateSet) -> (StateSet, StateSet) {
        (
            state.intersection(self.nfa.secret()),
            state.intersection(self.nfa.nonsecret()),
        )
    }

    fn child(
        &self,
        (x1, x2): (&StateSet, &StateSet),
        e: EventId,
        _target: &StateSet,
    ) -> (StateSet, StateSet) {
        (
            reach::observable_reach_unchecked(self.nfa, x1, e),
            reach::observable_reach_unchecked(self.nfa, x2, e),
        )
    }
}

/// Literal state-tree of depth `k` rooted at the observer state `root_state`.
pub fn build_weak_state_tree(
    nfa: &Nfa,
    obs: &Observer,
    root_state: &StateSet,
    k: usize,
) -> Result<StateTree, TreeError> {
    let root = tree::resolve_root(nfa, obs, root_state)?;
    Ok(tree::build_tree(
        obs,
        &WeakRule { nfa },
        TreeKind::Weak,
        root,
        k,
    ))
}

fn secret_roots(nfa: &Nfa, obs: &Observer) -> Vec<usize> {
    obs.states()
        .filter(|(_, s)| s.intersects(nfa.secret()))
        .map(|(q, _)| q)
        .collect()
}

fn weak_search(nfa: &Nfa, obs: &Observer, property: Property, k: Option<usize>) -> Verdict {
    let out = tree::search(obs, &WeakRule { nfa }, secret_roots(nfa, obs), k);
    let witness = out.violation.map(|f| Witness {
        prefix: obs.access_word(f.root),
        continuation: f.continuation,
        x1: f.x1,
        x2: f.x2,
    });
    Verdict::new(property, k, witness, out.explored)
}

pub fn verify_k_step_weak(nfa: &Nfa, k: usize) -> Verdict {
    verify_k_step_weak_in(nfa, &build_observer(nfa), k)
}

pub fn verify_k_step_weak_in(nfa: &Nfa, obs: &Observer, k: usize) -> Verdict {
    weak_search(nfa, obs, Property::KStepWeak, Some(k))
}

/// The `K = 0` case: no reachable estimate lies entirely inside the secrets.
pub fn verify_current_state_opacity(nfa: &Nfa) -> Verdict {
    verify_current_state_opacity_in(nfa, &build_observer(nfa))
}

pub fn verify_current_state_opacity_in(nfa: &Nfa, obs: &Observer) -> Verdict {
    let mut v = weak_search(nfa, obs, Property::CurrentState, Some(0));
    v.k = None;
    v
}

/// Explores the pair graph from every secret-intersecting root with one
/// visited set; terminates because pairs are finite.
pub fn verify_infinite_step_weak(nfa: &Nfa) -> Verdict {
    verify_infinite_step_weak_in(nfa, &build_observer(nfa))
}

pub fn verify_infinite_step_weak_in(nfa: &Nfa, obs: &Observer) -> Verdict {
    weak_search(nfa, obs, Property::InfiniteStepWeak, None)
}
