use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::populate::{clause_sections, parse_sections, Section};
use super::{normalize_id, NoteGraph, NoteKind, VaultError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSection {
    pub spec_id: String,
    pub clause_path: String,
    pub text: String,
    /// BFS distance of the note the section was taken from.
    pub depth: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBundle {
    pub concept: String,
    pub max_depth: usize,
    pub sections: Vec<ContextSection>,
}

impl ContextBundle {
    /// Plain-text rendering suitable as extra prompt material.
    pub fn render(&self) -> String {
        self.sections
            .iter()
            .map(|s| format!("## {} {}\n{}\n", s.spec_id, s.clause_path, s.text))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Gather the clause text around `concept`.
///
/// Notes are visited breadth-first over links in either direction, up to
/// `max_depth` hops. A concept note closer than `max_depth` contributes its
/// populated sections; a clause note at distance `k` contributes the
/// paragraphs linking to a note at distance below `k`. Sections are
/// deduplicated on (spec, clause, text) and ordered by layer, note id, then
/// position in the note.
pub fn collect_context(graph: &NoteGraph, concept: &str, max_depth: usize) -> Result<ContextBundle, VaultError> {
    let start = normalize_id(concept);
    if !graph.notes.contains_key(&start) {
        return Err(VaultError::UnknownNote(concept.to_string()));
    }
    let adjacency = graph.undirected_adjacency();
    let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
    dist.insert(start.as_str(), 0);
    let mut queue = VecDeque::from([start.as_str()]);
    while let Some(id) = queue.pop_front() {
        let d = dist[id];
        if d == max_depth {
            continue;
        }
        for &next in adjacency.get(id).into_iter().flatten() {
            if !dist.contains_key(next) {
                dist.insert(next, d + 1);
                queue.push_back(next);
            }
        }
    }

    let mut layered: Vec<(usize, &str)> = dist.iter().map(|(id, d)| (*d, *id)).collect();
    layered.sort();

    let mut seen: BTreeSet<Section> = BTreeSet::new();
    let mut sections = Vec::new();
    for (depth, id) in layered {
        let note = &graph.notes[id];
        let found: Vec<Section> = match note.kind {
            NoteKind::Concept if depth < max_depth => parse_sections(&note.body),
            NoteKind::Clause if depth > 0 => match note.clause_tag() {
                Some(tag) => clause_sections(&note.body, &tag)
                    .into_iter()
                    .filter(|(_, targets)| {
                        targets
                            .iter()
                            .any(|t| dist.get(t.as_str()).is_some_and(|&td| td < depth))
                    })
                    .map(|(s, _)| s)
                    .collect(),
                None => Vec::new(),
            },
            _ => Vec::new(),
        };
        for s in found {
            if seen.insert(s.clone()) {
                sections.push(ContextSection {
                    spec_id: s.tag.spec_id,
                    clause_path: s.tag.clause_path,
                    text: s.text,
                    depth,
                    note: id.to_string(),
                });
            }
        }
    }
    Ok(ContextBundle {
        concept: start,
        max_depth,
        sections,
    })
}
