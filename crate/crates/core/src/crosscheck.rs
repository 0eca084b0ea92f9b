//! Seeded batches of random models checked against the oracle, plus the
//! structural properties every construction must satisfy.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ModelSpec, Nfa};
use crate::observer::build_observer;
use crate::oracle::{self, random_nfa, OracleConfig, OracleVerdict, RandomModelConfig};
use crate::projection::{build_sipa, build_sipa_with, SipaUniverse};
use crate::strong::{
    build_sst, build_verifier, check_verifier_observer_language_equality,
    verify_infinite_step_strong_in, verify_k_step_strong_in, RootPolicy,
};
use crate::tree::StateTree;
use crate::verdict::{Property, Verdict};
use crate::weak::{
    build_weak_state_tree, verify_current_state_opacity_in, verify_infinite_step_weak_in,
    verify_k_step_weak_in,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub models: usize,
    pub max_states: usize,
    pub max_events: usize,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub oracle: OracleConfig,
    pub policy: RootPolicy,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            models: 500,
            max_states: 5,
            max_events: 4,
            ks: vec![0, 1, 2, 3],
            seed: 7,
            oracle: OracleConfig::default(),
            policy: RootPolicy::default(),
        }
    }
}

/// Model parameters for entry `index` of a batch. Odd entries get at least
/// two events and a positive unobservable fraction, so at least one
/// unobservable event whenever `max_events >= 2`.
pub fn model_config(cfg: &BatchConfig, index: usize) -> RandomModelConfig {
    let seed = cfg
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let silent = index % 2 == 1 && cfg.max_events >= 2;
    let min_events = if silent { 2 } else { 1 };
    RandomModelConfig {
        states: rng.gen_range(1..=cfg.max_states.max(1)),
        events: rng.gen_range(min_events..=cfg.max_events.max(min_events)),
        unobservable_fraction: if silent { 0.35 } else { 0.0 },
        secret_fraction: rng.gen_range(0.2..0.5),
        density: rng.gen_range(0.8..1.6),
        seed,
    }
}

/// One line of the JSONL report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub seed: u64,
    pub property: Property,
    pub k: Option<usize>,
    pub verdict: bool,
    pub oracle: bool,
    pub oracle_exact: bool,
    pub agree: bool,
    /// Witness replays (vacuously true when opaque).
    pub witness_ok: bool,
    /// K-step strong only: verdict with trees rooted at secret-intersecting
    /// estimates alone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secret_roots_only: Option<bool>,
}

/// Structural facts about one model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFacts {
    pub index: usize,
    pub seed: u64,
    pub states: usize,
    pub events: usize,
    pub observable_events: usize,
    pub unobservable_events: usize,
    pub observer_states: usize,
    pub sipa_states: usize,
    pub sipa_transitions: usize,
    pub verifier_states: usize,
    pub projected_transitions: usize,
    pub max_tree_nodes: usize,
    /// Verifier-to-observer map is a functional bisimulation.
    pub language_equal: bool,
    pub verifier_map_injective: bool,
    /// x2-emptiness absorbing on every edge of every SST built.
    pub sst_absorbing: bool,
    pub bounds_hold: bool,
    pub bound_violations: Vec<String>,
    /// `verify_k_step_weak` at `2^|X| - 2` equals the infinite-step verdict;
    /// only computed for `|X| <= 4`.
    pub bounded_weak_matches_infinite: Option<bool>,
    #[serde(skip)]
    pub spec: Option<ModelSpec>,
}

#[derive(Clone, Debug, Default)]
pub struct BatchReport {
    pub records: Vec<Record>,
    pub models: Vec<ModelFacts>,
}

impl BatchReport {
    pub fn disagreements(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.agree)
    }

    /// K-step strong records where the secret-roots-only verdict differs from
    /// the oracle.
    pub fn secret_root_divergences(&self) -> impl Iterator<Item = &Record> {
        self.records
            .iter()
            .filter(|r| r.secret_roots_only.is_some_and(|v| v != r.oracle))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn model(&self, index: usize) -> Option<&ModelFacts> {
        self.models.iter().find(|m| m.index == index)
    }
}

fn record(
    index: usize,
    seed: u64,
    nfa: &Nfa,
    obs: &crate::observer::Observer,
    v: &Verdict,
    o: &OracleVerdict,
) -> Record {
    Record {
        index,
        seed,
        property: v.property,
        k: v.k,
        verdict: v.opaque,
        oracle: o.opaque,
        oracle_exact: o.exact,
        agree: v.opaque == o.opaque,
        witness_ok: v.replay(nfa, obs).is_ok(),
        secret_roots_only: None,
    }
}

fn check_model(cfg: &BatchConfig, index: usize) -> (Vec<Record>, ModelFacts) {
    let mcfg = model_config(cfg, index);
    let seed = mcfg.seed;
    let nfa = random_nfa(&mcfg).expect("batch configs are valid");
    let obs = build_observer(&nfa);
    let sipa = build_sipa(&nfa);
    let full = build_sipa_with(&nfa, SipaUniverse::Full);
    let ver = build_verifier(&nfa, &obs, &sipa);
    let oc = &cfg.oracle;
    let mut records = Vec::new();

    let cs = verify_current_state_opacity_in(&nfa, &obs);
    records.push(record(
        index,
        seed,
        &nfa,
        &obs,
        &cs,
        &oracle::oracle_current_state(&nfa, oc),
    ));
    for &k in &cfg.ks {
        let w = verify_k_step_weak_in(&nfa, &obs, k);
        records.push(record(
            index,
            seed,
            &nfa,
            &obs,
            &w,
            &oracle::oracle_k_step_weak(&nfa, k, oc),
        ));
    }
    for &k in &cfg.ks {
        let s = verify_k_step_strong_in(&nfa, &obs, &full, k, cfg.policy);
        let literal = verify_k_step_strong_in(&nfa, &obs, &full, k, RootPolicy::SecretIntersecting);
        let mut r = record(
            index,
            seed,
            &nfa,
            &obs,
            &s,
            &oracle::oracle_k_step_strong(&nfa, k, oc),
        );
        r.secret_roots_only = Some(literal.opaque);
        records.push(r);
    }
    let iw = verify_infinite_step_weak_in(&nfa, &obs);
    records.push(record(
        index,
        seed,
        &nfa,
        &obs,
        &iw,
        &oracle::oracle_infinite_step_weak(&nfa, oc),
    ));
    let is = verify_infinite_step_strong_in(&nfa, &obs, &sipa, usize::MAX)
        .expect("unbounded build cannot exceed its limit");
    records.push(record(
        index,
        seed,
        &nfa,
        &obs,
        &is,
        &oracle::oracle_infinite_step_strong(&nfa, oc),
    ));

    let n = nfa.num_states();
    let eo = obs.events().len();
    let mut violations = Vec::new();
    let mut absorbing = true;
    let mut max_tree_nodes = 0;
    for (_, root) in obs.states() {
        if !root.intersects(nfa.secret()) {
            continue;
        }
        for &k in &cfg.ks {
            let bound = StateTree::node_bound(eo, k);
            let weak =
                build_weak_state_tree(&nfa, &obs, root, k).expect("root is a secret estimate");
            let sst = build_sst(&nfa, &obs, &full, root, k).expect("root is a secret estimate");
            for t in [&weak, &sst] {
                max_tree_nodes = max_tree_nodes.max(t.len());
                if t.len() as u128 > bound {
                    violations.push(format!(
                        "tree at {} K={k} has {} nodes > {bound}",
                        nfa.format_set(root),
                        t.len()
                    ));
                }
            }
            for &(p, _, c) in sst.edges() {
                if sst.nodes()[p].x2.is_empty() && !sst.nodes()[c].x2.is_empty() {
                    absorbing = false;
                }
            }
        }
    }
    if n < 64 && obs.len() as u128 > 1u128 << n {
        violations.push(format!("observer has {} states > 2^{n}", obs.len()));
    }
    if sipa.states().len() > 2 * n {
        violations.push(format!(
            "SIPA has {} states > 2|X| = {}",
            sipa.states().len(),
            2 * n
        ));
    }
    if n < 32 && ver.len() as u128 > 1u128 << (2 * n) {
        violations.push(format!("verifier has {} states > 4^{n}", ver.len()));
    }
    let check = check_verifier_observer_language_equality(&obs, &ver);
    let bounded_weak = (n <= 4).then(|| {
        let k = (1usize << n) - 2;
        verify_k_step_weak_in(&nfa, &obs, k).opaque == iw.opaque
    });

    let facts = ModelFacts {
        index,
        seed,
        states: n,
        events: nfa.num_events(),
        observable_events: eo,
        unobservable_events: nfa.unobservable_events().count(),
        observer_states: obs.len(),
        sipa_states: sipa.states().len(),
        sipa_transitions: sipa.transitions().len(),
        verifier_states: ver.len(),
        projected_transitions: crate::projection::build_projected_automaton(&nfa).num_transitions(),
        max_tree_nodes,
        language_equal: check.equal,
        verifier_map_injective: check.injective,
        sst_absorbing: absorbing,
        bounds_hold: violations.is_empty(),
        bound_violations: violations,
        bounded_weak_matches_infinite: bounded_weak,
        spec: Some(nfa.to_spec()),
    };
    (records, facts)
}

/// Runs the batch in parallel; output is ordered by model index.
pub fn run_batch(cfg: &BatchConfig) -> BatchReport {
    let results: Vec<(Vec<Record>, ModelFacts)> = (0..cfg.models)
        .into_par_iter()
        .map(|i| check_model(cfg, i))
        .collect();
    let mut report = BatchReport::default();
    for (records, facts) in results {
        report.records.extend(records);
        report.models.push(facts);
    }
    report
}

#[derive(Serialize)]
struct Fixture<'a> {
    seed: u64,
    property: Property,
    k: Option<usize>,
    oracle_opaque: bool,
    verdict_opaque: bool,
    secret_roots_only_opaque: Option<bool>,
    model: &'a ModelSpec,
}

/// Writes each disagreement, and each K-step strong case where
/// secret-intersecting roots alone miss a violation, as a JSON fixture under
/// `dir`. Returns the written paths.
pub fn write_divergence_fixtures(report: &BatchReport, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut wanted: Vec<&Record> = report.disagreements().collect();
    wanted.extend(report.secret_root_divergences());
    wanted.sort_by_key(|r| (r.index, r.property, r.k));
    wanted.dedup_by_key(|r| (r.index, r.property, r.k));
    if wanted.is_empty() {
        return Ok(written);
    }
    fs::create_dir_all(dir)?;
    for r in wanted {
        let Some(spec) = report.model(r.index).and_then(|m| m.spec.as_ref()) else {
            continue;
        };
        let fixture = Fixture {
            seed: r.seed,
            property: r.property,
            k: r.k,
            oracle_opaque: r.oracle,
            verdict_opaque: r.verdict,
            secret_roots_only_opaque: r.secret_roots_only,
            model: spec,
        };
        let k = r.k.map_or(String::new(), |k| format!("-k{k}"));
        let path = dir.join(format!("{}-seed{}{k}.json", r.property, r.seed));
        fs::write(
            &path,
            serde_json::to_string_pretty(&fixture).expect("fixtures serialize"),
        )?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_are_reproducible_and_half_silent() {
        let cfg = BatchConfig {
            models: 40,
            ..Default::default()
        };
        let a: Vec<_> = (0..40).map(|i| model_config(&cfg, i)).collect();
        let b: Vec<_> = (0..40).map(|i| model_config(&cfg, i)).collect();
        assert_eq!(a, b);
        let silent = a
            .iter()
            .filter(|c| random_nfa(c).unwrap().unobservable_events().count() > 0)
            .count();
        assert!(silent >= 20);
        assert!(a
            .iter()
            .all(|c| (1..=5).contains(&c.states) && (1..=4).contains(&c.events)));
    }

    #[test]
    fn small_batch_agrees() {
        let cfg = BatchConfig {
            models: 24,
            ..Default::default()
        };
        let report = run_batch(&cfg);
        assert_eq!(report.records.len(), 24 * (3 + 2 * cfg.ks.len()));
        assert_eq!(report.disagreements().count(), 0);
        assert!(report.records.iter().all(|r| r.witness_ok));
        assert!(report
            .models
            .iter()
            .all(|m| m.language_equal && m.sst_absorbing && m.bounds_hold));
        let lines = report.to_jsonl();
        assert_eq!(lines.lines().count(), report.records.len());
        let first: Record = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(first, report.records[0]);
    }
}
