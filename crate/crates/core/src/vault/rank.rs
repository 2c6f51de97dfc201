use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{NoteGraph, VaultError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Treat every link as bidirectional.
    #[serde(default)]
    pub undirected: bool,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            undirected: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub scores: BTreeMap<String, f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl RankTable {
    /// Notes sorted by descending score, ties by id.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.scores.iter().map(|(k, s)| (k.as_str(), *s)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("note_id,score\n");
        for (id, score) in self.ranked() {
            out.push_str(&csv_field(id));
            out.push(',');
            out.push_str(&format!("{score:.12}\n"));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Power-iteration PageRank with uniform teleport. Dangling notes spread
/// their mass uniformly over all notes; duplicate links count once.
pub fn pagerank(graph: &NoteGraph, params: &PageRankParams) -> Result<RankTable, VaultError> {
    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(VaultError::InvalidParameter(format!(
            "damping {} not in (0,1)",
            params.damping
        )));
    }
    if params.tolerance.is_nan() || params.tolerance <= 0.0 {
        return Err(VaultError::InvalidParameter(format!(
            "tolerance {} must be positive",
            params.tolerance
        )));
    }
    let n = graph.notes.len();
    if n == 0 {
        return Err(VaultError::EmptyGraph);
    }
    let ids: Vec<&String> = graph.notes.keys().collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect();

    let mut out_links: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, t) in graph.edges() {
        let (si, ti) = (index[s.as_str()], index[t.as_str()]);
        out_links[si].push(ti);
        if params.undirected {
            out_links[ti].push(si);
        }
    }
    for targets in &mut out_links {
        targets.sort_unstable();
        targets.dedup();
    }

    let d = params.damping;
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        let dangling: f64 = out_links
            .iter()
            .zip(&rank)
            .filter(|(o, _)| o.is_empty())
            .map(|(_, r)| r)
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for (src, targets) in out_links.iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let share = d * rank[src] / targets.len() as f64;
            for &t in targets {
                next[t] += share;
            }
        }
        let delta: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < params.tolerance {
            converged = true;
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    let scores = ids
        .into_iter()
        .zip(rank)
        .map(|(id, r)| (id.clone(), r / total))
        .collect();
    Ok(RankTable {
        scores,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vault::{build_graph, Note};

    fn graph(notes: &[(&str, &str)]) -> NoteGraph {
        build_graph(notes.iter().map(|(n, b)| Note::new(format!("{n}.md"), *b)))
            .unwrap()
            .graph
    }

    #[test]
    fn mutual_pair_is_uniform() {
        let g = graph(&[("a", "[[b]]"), ("b", "[[a]]")]);
        let t = pagerank(&g, &PageRankParams::default()).unwrap();
        assert!(t.converged);
        for s in t.scores.values() {
            assert!((s - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn star_hub_wins() {
        let g = graph(&[
            ("hub", ""),
            ("l1", "[[hub]]"),
            ("l2", "[[hub]]"),
            ("l3", "[[hub]]"),
            ("l4", "[[hub]]"),
            ("l5", "[[hub]]"),
        ]);
        let t = pagerank(&g, &PageRankParams::default()).unwrap();
        let ranked = t.ranked();
        assert_eq!(ranked[0].0, "hub");
        assert!(ranked[0].1 > ranked[1].1);
    }

    #[test]
    fn rejects_bad_input() {
        let g = NoteGraph::default();
        assert!(matches!(
            pagerank(&g, &PageRankParams::default()),
            Err(VaultError::EmptyGraph)
        ));
        let g = graph(&[("a", "")]);
        let bad = PageRankParams {
            damping: 1.0,
            ..Default::default()
        };
        assert!(pagerank(&g, &bad).is_err());
    }

    #[test]
    fn undirected_switch_symmetrizes() {
        let g = graph(&[("a", "[[b]]"), ("b", ""), ("c", "[[b]]")]);
        let p = PageRankParams {
            undirected: true,
            ..Default::default()
        };
        let t = pagerank(&g, &p).unwrap();
        assert!((t.scores["a"] - t.scores["c"]).abs() < 1e-12);
        assert!(t.scores["b"] > t.scores["a"]);
    }

    #[test]
    fn csv_export_header() {
        let g = graph(&[("a", "[[b]]"), ("b", "[[a]]")]);
        let t = pagerank(&g, &PageRankParams::default()).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("note_id,score\na,0.5"));
    }
}
