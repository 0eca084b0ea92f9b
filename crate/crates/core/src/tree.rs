//! Rooted trees of `(x1, x2)` node pairs hanging off observer states, and the
//! breadth-first pair search shared by the weak and strong checks.
//!
//! A tree node's children follow the observer's transitions from the node's
//! observer state; how `x1`/`x2` evolve is supplied by a [`PairRule`]. The
//! literal trees (no merging of equal pairs) are what [`StateTree`] stores.
//! Verification instead runs [`search`], which visits each
//! `(observer state, x1, x2)` once, at its minimal depth. Children depend only
//! on the pair and the event, so the minimal-depth visit sees every descendant
//! the literal trees would contain within the same depth budget.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::model::Nfa;
use crate::observer::{ObsStateId, Observer};
use crate::stateset::{EventId, StateSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("root {0} is not a reachable observer state")]
    UnreachableRoot(String),
    #[error("root {0} contains no secret state")]
    NoSecret(String),
    #[error("secret-involved projected automaton has no N state for {0}")]
    MissingTaggedState(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// `x1` descends from the root's secret part, `x2` from its nonsecret part.
    Weak,
    /// `x1` is the full observer state, `x2` the secret-avoiding subset.
    SecretUnvisited,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub x1: StateSet,
    pub x2: StateSet,
    pub depth: usize,
    pub observer_state: ObsStateId,
}

#[derive(Clone, Debug)]
pub struct StateTree {
    pub kind: TreeKind,
    pub root_observer: ObsStateId,
    nodes: Vec<TreeNode>,
    edges: Vec<(usize, EventId, usize)>,
    parent: Vec<Option<(usize, EventId)>>,
}

impl StateTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Nodes in breadth-first order; index 0 is the root.
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, EventId, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, node: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.edges
            .iter()
            .filter(move |(p, _, _)| *p == node)
            .map(|&(_, e, c)| (e, c))
    }

    /// Edge labels from the root down to `node`.
    pub fn word_to(&self, node: usize) -> Vec<EventId> {
        let mut word = Vec::new();
        let mut cur = node;
        while let Some((p, e)) = self.parent[cur] {
            word.push(e);
            cur = p;
        }
        word.reverse();
        word
    }

    /// `1 + |E_o| + ... + |E_o|^k`, saturating.
    pub fn node_bound(observable_events: usize, k: usize) -> u128 {
        let mut total: u128 = 0;
        let mut term: u128 = 1;
        for _ in 0..=k {
            total = total.saturating_add(term);
            term = term.saturating_mul(observable_events as u128);
        }
        total
    }
}

/// How the pair of a tree node is formed at the root and after an event.
pub(crate) trait PairRule {
    fn root(&self, state: &StateSet) -> (StateSet, StateSet);
    fn child(
        &self,
        parent: (&StateSet, &StateSet),
        e: EventId,
        target_state: &StateSet,
    ) -> (StateSet, StateSet);
}

pub(crate) fn build_tree(
    obs: &Observer,
    rule: &impl PairRule,
    kind: TreeKind,
    root: ObsStateId,
    k: usize,
) -> StateTree {
    let (x1, x2) = rule.root(obs.state(root));
    let mut tree = StateTree {
        kind,
        root_observer: root,
        nodes: vec![TreeNode {
            x1,
            x2,
            depth: 0,
            observer_state: root,
        }],
        edges: Vec::new(),
        parent: vec![None],
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if tree.nodes[i].depth >= k {
            continue;
        }
        let q = tree.nodes[i].observer_state;
        for (e, target) in obs.out_edges(q) {
            let node = &tree.nodes[i];
            let (x1, x2) = rule.child((&node.x1, &node.x2), e, obs.state(target));
            let depth = node.depth + 1;
            let c = tree.nodes.len();
            tree.nodes.push(TreeNode {
                x1,
                x2,
                depth,
                observer_state: target,
            });
            tree.parent.push(Some((i, e)));
            tree.edges.push((i, e, c));
            queue.push_back(c);
        }
    }
    tree
}

/// Resolves a root estimate to an observer state and checks it meets a secret.
pub(crate) fn resolve_root(
    nfa: &Nfa,
    obs: &Observer,
    root_state: &StateSet,
) -> Result<ObsStateId, TreeError> {
    let q = obs
        .find(root_state)
        .ok_or_else(|| TreeError::UnreachableRoot(nfa.format_set(root_state)))?;
    if !root_state.intersects(nfa.secret()) {
        return Err(TreeError::NoSecret(nfa.format_set(root_state)));
    }
    Ok(q)
}

#[derive(Clone, Debug)]
pub(crate) struct Found {
    pub root: ObsStateId,
    pub continuation: Vec<EventId>,
    pub x1: StateSet,
    pub x2: StateSet,
}

#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub violation: Option<Found>,
    pub explored: usize,
}

struct SearchNode {
    q: ObsStateId,
    x1: StateSet,
    x2: StateSet,
    depth: usize,
    root: ObsStateId,
    parent: Option<(usize, EventId)>,
}

/// Breadth-first search for a node with empty `x2`, from all `roots` at once,
/// expanding nodes only while `depth < depth_limit` (unbounded for `None`).
pub(crate) fn search(
    obs: &Observer,
    rule: &impl PairRule,
    roots: impl IntoIterator<Item = ObsStateId>,
    depth_limit: Option<usize>,
) -> SearchOutcome {
    let mut arena: Vec<SearchNode> = Vec::new();
    let mut visited: HashMap<(ObsStateId, StateSet, StateSet), usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let found = |arena: &Vec<SearchNode>, i: usize| {
        let mut word = Vec::new();
        let mut cur = i;
        while let Some((p, e)) = arena[cur].parent {
            word.push(e);
            cur = p;
        }
        word.reverse();
        Found {
            root: arena[i].root,
            continuation: word,
            x1: arena[i].x1.clone(),
            x2: arena[i].x2.clone(),
        }
    };

    for q in roots {
        let (x1, x2) = rule.root(obs.state(q));
        let key = (q, x1.clone(), x2.clone());
        if visited.contains_key(&key) {
            continue;
        }
        let i = arena.len();
        visited.insert(key, i);
        arena.push(SearchNode {
            q,
            x1,
            x2,
            depth: 0,
            root: q,
            parent: None,
        });
        if arena[i].x2.is_empty() {
            return SearchOutcome {
                violation: Some(found(&arena, i)),
                explored: arena.len(),
            };
        }
        queue.push_back(i);
    }

    while let Some(i) = queue.pop_front() {
        if depth_limit.is_some_and(|k| arena[i].depth >= k) {
            continue;
        }
        let q = arena[i].q;
        for (e, target) in obs.out_edges(q) {
            let (x1, x2) = rule.child((&arena[i].x1, &arena[i].x2), e, obs.state(target));
            let key = (target, x1.clone(), x2.clone());
            if visited.contains_key(&key) {
                continue;
            }
            let c = arena.len();
            visited.insert(key, c);
            let empty = x2.is_empty();
            arena.push(SearchNode {
                q: target,
                x1,
                x2,
                depth: arena[i].depth + 1,
                root: arena[i].root,
                parent: Some((i, e)),
            });
            if empty {
                return SearchOutcome {
                    violation: Some(found(&arena, c)),
                    explored: arena.len(),
                };
            }
            queue.push_back(c);
        }
    }
    SearchOutcome {
        violation: None,
        explored: arena.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_bound_values() {
        assert_eq!(StateTree::node_bound(4, 0), 1);
        assert_eq!(StateTree::node_bound(4, 3), 1 + 4 + 16 + 64);
        assert_eq!(StateTree::node_bound(1, 5), 6);
        assert_eq!(StateTree::node_bound(0, 5), 1);
        assert_eq!(StateTree::node_bound(4, 200), u128::MAX);
    }
}
