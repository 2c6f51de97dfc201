use std::collections::{BTreeMap, BTreeSet};

use crate::ontology::Iri;

use super::MergeGraph;

/// Maximal cliques with at least two members, largest first and then in
/// lexicographic member order. Bron-Kerbosch with pivoting.
pub fn maximal_cliques(graph: &MergeGraph) -> Vec<BTreeSet<Iri>> {
    let index: Vec<&Iri> = graph.vertices.iter().collect();
    let pos: BTreeMap<&Iri, usize> = index.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut adj = vec![BTreeSet::new(); index.len()];
    for (a, b) in &graph.edges {
        let (Some(&x), Some(&y)) = (pos.get(a), pos.get(b)) else {
            continue;
        };
        if x != y {
            adj[x].insert(y);
            adj[y].insert(x);
        }
    }

    let mut found: Vec<Vec<usize>> = Vec::new();
    let p: BTreeSet<usize> = (0..index.len()).filter(|&v| !adj[v].is_empty()).collect();
    bron_kerbosch(&adj, &mut Vec::new(), p, BTreeSet::new(), &mut found);

    let mut out: Vec<BTreeSet<Iri>> = found
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| c.into_iter().map(|i| index[i].clone()).collect())
        .collect();
    sort_cliques(&mut out);
    out
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = *p
        .union(&x)
        .max_by_key(|&&u| adj[u].intersection(&p).count())
        .expect("p is non-empty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

pub(crate) fn sort_cliques(cliques: &mut [BTreeSet<Iri>]) {
    cliques.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.iter().cmp(b.iter())));
}

/// Make cliques pairwise disjoint: walking from the largest, a vertex
/// already claimed is dropped from later cliques. Cliques left with fewer
/// than two members disappear.
pub fn resolve_overlaps(cliques: &[BTreeSet<Iri>]) -> Vec<BTreeSet<Iri>> {
    let mut ordered = cliques.to_vec();
    sort_cliques(&mut ordered);
    let mut claimed = BTreeSet::new();
    let mut out = Vec::new();
    for c in ordered {
        let kept: BTreeSet<Iri> = c.difference(&claimed).cloned().collect();
        if kept.len() >= 2 {
            claimed.extend(kept.iter().cloned());
            out.push(kept);
        }
    }
    sort_cliques(&mut out);
    out
}
