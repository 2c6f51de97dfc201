//! Scoring of pairwise and grouping oracles against a labelled pair set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::ontology::Iri;
use crate::refine::{aggregate_verdicts, maximal_cliques, Judgment, MergeGraph};

pub type Pair = (Iri, Iri);

pub fn canonical(a: Iri, b: Iri) -> Pair {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("judged pair ({}, {}) is not in the ground-truth universe", .0.0, .0.1)]
    OutsideUniverse(Pair),
    #[error("positive pair ({}, {}) is not in the universe", .0.0, .0.1)]
    PositiveOutsideUniverse(Pair),
    #[error("pair ({0}, {0}) pairs an instance with itself")]
    SelfPair(Iri),
    #[error("groups overlap on {0:?}")]
    OverlappingGroups(Vec<Iri>),
    #[error("bin width must be positive, got {0}")]
    BadBinWidth(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub universe: BTreeSet<Pair>,
    pub positives: BTreeSet<Pair>,
}

/// On-disk form: lists of two-element arrays, in any order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub universe: Vec<(String, String)>,
    pub positives: Vec<(String, String)>,
}

impl GroundTruth {
    /// Canonicalize pairs, resolving each id through `resolve`.
    pub fn from_file(file: &GroundTruthFile, resolve: impl Fn(&str) -> Iri) -> Result<Self, EvalError> {
        let conv = |(a, b): &(String, String)| -> Result<Pair, EvalError> {
            let (a, b) = (resolve(a), resolve(b));
            if a == b {
                return Err(EvalError::SelfPair(a));
            }
            Ok(canonical(a, b))
        };
        let universe = file.universe.iter().map(conv).collect::<Result<BTreeSet<_>, _>>()?;
        let positives = file.positives.iter().map(conv).collect::<Result<BTreeSet<_>, _>>()?;
        let truth = GroundTruth { universe, positives };
        truth.check()?;
        Ok(truth)
    }

    pub fn to_file(&self) -> GroundTruthFile {
        let conv = |(a, b): &Pair| (a.to_string(), b.to_string());
        GroundTruthFile {
            universe: self.universe.iter().map(conv).collect(),
            positives: self.positives.iter().map(conv).collect(),
        }
    }

    pub fn check(&self) -> Result<(), EvalError> {
        match self.positives.iter().find(|p| !self.universe.contains(*p)) {
            Some(p) => Err(EvalError::PositiveOutsideUniverse(p.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    /// Pairs whose judgments were all unparseable; not in the counts above.
    pub invalid: usize,
    /// Universe pairs that were never judged.
    pub unjudged: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_score: Option<f64>,
    pub calls: usize,
    pub mean_latency_seconds: Option<f64>,
    pub total_cost: Option<f64>,
}

pub fn precision(tp: usize, fp: usize) -> Option<f64> {
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

pub fn recall(tp: usize, fn_: usize) -> Option<f64> {
    (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64)
}

/// Harmonic mean of precision and recall; `None` when their sum is zero.
pub fn f_score(precision: f64, recall: f64) -> Option<f64> {
    let sum = precision + recall;
    (sum > 0.0).then(|| 2.0 * precision * recall / sum)
}

fn report(tp: usize, fp: usize, fn_: usize, tn: usize) -> EvalReport {
    let p = precision(tp, fp);
    let r = recall(tp, fn_);
    EvalReport {
        tp,
        fp,
        fn_,
        tn,
        invalid: 0,
        unjudged: 0,
        precision: p,
        recall: r,
        f_score: p.zip(r).and_then(|(p, r)| f_score(p, r)),
        calls: 0,
        mean_latency_seconds: None,
        total_cost: None,
    }
}

fn confusion(predicted: &BTreeMap<Pair, bool>, truth: &GroundTruth) -> EvalReport {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (pair, &pos) in predicted {
        match (pos, truth.positives.contains(pair)) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    report(tp, fp, fn_, tn)
}

/// Confusion counts over the judged pairs. Repeated judgments of a pair are
/// aggregated conservatively (any false wins); pairs with only invalid
/// judgments are counted separately.
pub fn score_pairwise(judgments: &[Judgment], truth: &GroundTruth) -> Result<EvalReport, EvalError> {
    let verdicts = aggregate_verdicts(judgments);
    if let Some(p) = verdicts.keys().find(|p| !truth.universe.contains(*p)) {
        return Err(EvalError::OutsideUniverse(p.clone()));
    }
    let predicted: BTreeMap<Pair, bool> = verdicts.iter().filter_map(|(k, v)| v.map(|v| (k.clone(), v))).collect();
    let mut r = confusion(&predicted, truth);
    r.invalid = verdicts.values().filter(|v| v.is_none()).count();
    r.unjudged = truth.universe.len() - verdicts.len();
    r.calls = judgments.len();
    r.mean_latency_seconds = mean(judgments.iter().map(|j| j.latency_seconds));
    let costs: Vec<f64> = judgments.iter().filter_map(|j| j.cost_estimate).collect();
    r.total_cost = (!costs.is_empty()).then(|| costs.iter().sum());
    Ok(r)
}

/// Every pair inside one of the groups counts as predicted positive; every
/// other universe pair as predicted negative.
pub fn score_grouping(groups: &[BTreeSet<Iri>], truth: &GroundTruth) -> Result<EvalReport, EvalError> {
    let mut seen = BTreeSet::new();
    let mut overlap = BTreeSet::new();
    for g in groups {
        for m in g {
            if !seen.insert(m) {
                overlap.insert(m.clone());
            }
        }
    }
    if !overlap.is_empty() {
        return Err(EvalError::OverlappingGroups(overlap.into_iter().collect()));
    }
    let mut predicted: BTreeMap<Pair, bool> = truth.universe.iter().map(|p| (p.clone(), false)).collect();
    for g in groups {
        let members: Vec<&Iri> = g.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let pair = canonical((*a).clone(), (*b).clone());
                if !truth.universe.contains(&pair) {
                    return Err(EvalError::OutsideUniverse(pair));
                }
                predicted.insert(pair, true);
            }
        }
    }
    Ok(confusion(&predicted, truth))
}

/// Replace the positives by the pairs inside the maximal cliques of the
/// positive graph; the universe grows to contain them.
pub fn adapt_ground_truth_to_groups(truth: &GroundTruth) -> GroundTruth {
    let mut graph = MergeGraph::default();
    for (a, b) in &truth.positives {
        graph.vertices.insert(a.clone());
        graph.vertices.insert(b.clone());
        graph.edges.insert((a.clone(), b.clone()));
    }
    let mut positives = BTreeSet::new();
    for clique in maximal_cliques(&graph) {
        let members: Vec<&Iri> = clique.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                positives.insert(canonical((*a).clone(), (*b).clone()));
            }
        }
    }
    let mut universe = truth.universe.clone();
    universe.extend(positives.iter().cloned());
    GroundTruth { universe, positives }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Bin index `k` covers `[k*w, (k+1)*w)`.
    pub bins: BTreeMap<u64, usize>,
    pub count: usize,
    pub mean: Option<f64>,
}

impl Histogram {
    /// `bin_start_seconds,count`, one row per non-empty bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start_seconds,count\n");
        for (k, c) in &self.bins {
            let _ = writeln!(out, "{},{c}", *k as f64 * self.bin_width);
        }
        out
    }
}

pub fn latency_histogram(latencies: &[f64], bin_width: f64) -> Result<Histogram, EvalError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(EvalError::BadBinWidth(bin_width));
    }
    let mut bins = BTreeMap::new();
    for l in latencies {
        *bins.entry((l.max(0.0) / bin_width).floor() as u64).or_insert(0) += 1;
    }
    Ok(Histogram {
        bin_width,
        bins,
        count: latencies.len(),
        mean: mean(latencies.iter().copied()),
    })
}

pub fn total_cost(calls: usize, price_per_call: f64) -> f64 {
    calls as f64 * price_per_call
}
