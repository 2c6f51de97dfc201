//! Oracle-assisted instance merging: candidate shortlisting, true/false
//! judgments, the mergeability graph, maximal cliques, representatives and
//! journaled merges that can be reverted.

mod cliques;
mod merge;
mod oracle;
mod review;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ontology::{Iri, OntologyGraph};

pub use cliques::{maximal_cliques, resolve_overlaps};
pub use merge::{apply_merges, replay, revert, revert_all, Assertion, MergeEntry, MergeLog, RetiredInstance};
pub use oracle::{
    judge_all, judge_pair, parse_verdict, request_body, HttpOracle, HttpOracleConfig, JudgeOutcome, JudgeReport,
    Oracle, OracleError, OracleReply, StubOracle, StubTable, SYSTEM_PROMPT,
};
pub use review::{approved_cliques, review_entries, ReviewEntry};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RefineError {
    #[error("clique needs at least 2 members, got {0}")]
    TooFewMembers(usize),
    #[error("{0} is not an active instance")]
    UnknownInstance(Iri),
    #[error("representative {0} is not a member of its clique")]
    RepresentativeNotMember(Iri),
    #[error("cliques overlap on {0:?}")]
    Overlap(Vec<Iri>),
    #[error("merge log has no entry {index} (length {len})")]
    NoSuchEntry { index: usize, len: usize },
    #[error("merge log entry {0} is already reverted")]
    AlreadyReverted(usize),
    #[error("entry {later} depends on entry {index}; revert it first")]
    Dependent { index: usize, later: usize },
    #[error("merge log does not match the ontology: {0}")]
    LogMismatch(String),
    #[error("no approved cliques")]
    NothingApproved,
}

/// Canonical unordered pair of instances proposed to the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidatePair {
    pub a: Iri,
    pub b: Iri,
    pub a_label: String,
    pub b_label: String,
    pub block_key: String,
}

impl CandidatePair {
    /// Orders the two sides; `None` when they are the same instance.
    pub fn new(x: (Iri, String), y: (Iri, String), block_key: impl Into<String>) -> Option<Self> {
        let (lo, hi) = match x.0.cmp(&y.0) {
            std::cmp::Ordering::Less => (x, y),
            std::cmp::Ordering::Greater => (y, x),
            std::cmp::Ordering::Equal => return None,
        };
        Some(Self {
            a: lo.0,
            b: hi.0,
            a_label: lo.1,
            b_label: hi.1,
            block_key: block_key.into(),
        })
    }

    pub fn key(&self) -> (Iri, Iri) {
        (self.a.clone(), self.b.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingConfig {
    /// Minimum number of shared name tokens; `None` keeps every same-class
    /// pair.
    #[serde(default)]
    pub token_overlap: Option<usize>,
}

/// Lowercased alphanumeric runs of `label`.
pub fn name_tokens(label: &str) -> BTreeSet<String> {
    label
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Same-class pairs of active instances, optionally filtered by name-token
/// overlap, sorted by `(a, b)`.
pub fn enumerate_candidates(onto: &OntologyGraph, blocking: &BlockingConfig) -> Vec<CandidatePair> {
    // instance, label, label tokens
    type Entry<'a> = (&'a Iri, String, BTreeSet<String>);
    let mut by_class: BTreeMap<&Iri, Vec<Entry>> = BTreeMap::new();
    for (i, c) in &onto.instances {
        let label = onto.label(i);
        let tokens = name_tokens(&label);
        by_class.entry(c).or_default().push((i, label, tokens));
    }
    let mut out = Vec::new();
    for (class, members) in &by_class {
        let key = format!("class:{}", crate::ontology::display_local(class));
        for (x, (ia, la, ta)) in members.iter().enumerate() {
            for (ib, lb, tb) in &members[x + 1..] {
                if let Some(min) = blocking.token_overlap {
                    if ta.intersection(tb).count() < min {
                        continue;
                    }
                }
                let block_key = match blocking.token_overlap {
                    Some(min) => format!("{key};tokens>={min}"),
                    None => key.clone(),
                };
                out.extend(CandidatePair::new(
                    ((*ia).clone(), la.clone()),
                    ((*ib).clone(), lb.clone()),
                    block_key,
                ));
            }
        }
    }
    out.sort_by_key(|p| p.key());
    out
}

/// One oracle answer. `invalid` marks a response that parsed to neither
/// true nor false; such judgments never contribute an edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub pair: CandidatePair,
    pub mergeable: bool,
    #[serde(default)]
    pub invalid: bool,
    pub raw_response: String,
    pub latency_seconds: f64,
    #[serde(default)]
    pub cost_estimate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeGraph {
    pub vertices: BTreeSet<Iri>,
    pub edges: BTreeSet<(Iri, Iri)>,
}

impl MergeGraph {
    pub fn adjacency(&self) -> BTreeMap<&Iri, BTreeSet<&Iri>> {
        let mut adj: BTreeMap<&Iri, BTreeSet<&Iri>> = self.vertices.iter().map(|v| (v, BTreeSet::new())).collect();
        for (a, b) in &self.edges {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }
}

/// Per-pair verdict: positive iff some valid judgment says true and none
/// says false. Pairs with only invalid judgments get `None`.
pub fn aggregate_verdicts(judgments: &[Judgment]) -> BTreeMap<(Iri, Iri), Option<bool>> {
    let mut out: BTreeMap<(Iri, Iri), Option<bool>> = BTreeMap::new();
    for j in judgments {
        let slot = out.entry(j.pair.key()).or_insert(None);
        if j.invalid {
            continue;
        }
        *slot = Some(match *slot {
            None => j.mergeable,
            Some(prev) => prev && j.mergeable,
        });
    }
    out
}

/// Vertices are every instance named in a judgment; edges are the pairs
/// whose aggregated verdict is positive.
pub fn build_merge_graph(judgments: &[Judgment]) -> MergeGraph {
    let mut g = MergeGraph::default();
    for j in judgments {
        g.vertices.insert(j.pair.a.clone());
        g.vertices.insert(j.pair.b.clone());
    }
    g.edges = aggregate_verdicts(judgments)
        .into_iter()
        .filter(|(_, v)| *v == Some(true))
        .map(|(k, _)| k)
        .collect();
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub members: BTreeSet<Iri>,
    pub representative: Iri,
}

/// Member with the highest assertion degree; ties go to the shortest label,
/// then the smallest IRI.
pub fn select_representative(members: &BTreeSet<Iri>, onto: &OntologyGraph) -> Result<Iri, RefineError> {
    if members.len() < 2 {
        return Err(RefineError::TooFewMembers(members.len()));
    }
    if let Some(m) = members.iter().find(|m| !onto.instances.contains_key(*m)) {
        return Err(RefineError::UnknownInstance(m.clone()));
    }
    let best = members
        .iter()
        .map(|m| (m, onto.degree(m), onto.label(m).chars().count()))
        .min_by(|x, y| y.1.cmp(&x.1).then(x.2.cmp(&y.2)).then(x.0.cmp(y.0)))
        .expect("non-empty");
    Ok(best.0.clone())
}
