//! Opacity verification for partially observed nondeterministic automata.
//!
//! The model is an [`Nfa`] with observable/unobservable events and a set of
//! secret states. Four opacity notions are checked, each by a structural
//! construction and, independently, by a brute-force [`oracle`]:
//!
//! | property | construction | entry point |
//! |---|---|---|
//! | current-state | state-trees, `K = 0` | [`verify_current_state_opacity`] |
//! | K-step weak | state-trees | [`verify_k_step_weak`] |
//! | infinite-step weak | deduplicated pair graph | [`verify_infinite_step_weak`] |
//! | K-step strong | secret-unvisited state-trees | [`verify_k_step_strong`] |
//! | infinite-step strong | verifier automaton | [`verify_infinite_step_strong`] |
//!
//! ```
//! use opaq_core::{fixtures, verify_k_step_strong};
//!
//! let g = fixtures::g2();
//! let v = verify_k_step_strong(&g, 2);
//! assert!(!v.opaque);
//! let w = v.witness.unwrap();
//! assert_eq!(g.format_word(&w.prefix), "a");
//! assert_eq!(g.format_word(&w.continuation), "b c");
//! ```

pub mod crosscheck;
pub mod dot;
pub mod fixtures;
pub mod model;
pub mod observer;
pub mod oracle;
pub mod projection;
pub mod reach;
pub mod stateset;
pub mod strong;
pub mod tree;
pub mod verdict;
pub mod weak;

use thiserror::Error;

pub use model::{Event, ModelError, ModelSpec, Nfa};
pub use observer::{build_observer, build_observer_bounded, ObsStateId, Observer};
pub use projection::{
    build_projected_automaton, build_sipa, build_sipa_with, ProjectedAutomaton, Sipa, SipaUniverse,
    Tag, TaggedState,
};
pub use stateset::{EventId, StateId, StateSet};
pub use strong::{
    build_sst, build_verifier, check_verifier_observer_language_equality,
    verify_infinite_step_strong, verify_k_step_strong, verify_k_step_strong_with, RootPolicy,
    VerifierAutomaton,
};
pub use tree::{StateTree, TreeError, TreeKind, TreeNode};
pub use verdict::{Property, Verdict, VerdictReport, Witness};
pub use weak::{
    build_weak_state_tree, verify_current_state_opacity, verify_infinite_step_weak,
    verify_k_step_weak,
};

/// A construction outgrew its configured state cap.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{structure} exceeded {limit} states")]
pub struct LimitExceeded {
    pub structure: &'static str,
    pub limit: usize,
}
