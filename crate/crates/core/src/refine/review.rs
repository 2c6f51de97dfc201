use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ontology::{Iri, OntologyGraph};

use super::{select_representative, Clique, RefineError};

/// One editable line of the review file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewEntry {
    pub members: Vec<Iri>,
    #[serde(default)]
    pub member_labels: Vec<String>,
    pub representative: Iri,
    #[serde(default)]
    pub approved: bool,
    #[serde(default)]
    pub note: String,
}

/// Review entries for the disjoint `cliques`, none approved. `original` is
/// the clique list before overlap resolution; vertices dropped from a
/// clique are mentioned in its note.
pub fn review_entries(
    cliques: &[BTreeSet<Iri>],
    onto: &OntologyGraph,
    original: &[BTreeSet<Iri>],
) -> Result<Vec<ReviewEntry>, RefineError> {
    cliques
        .iter()
        .map(|c| {
            let representative = select_representative(c, onto)?;
            let dropped: BTreeSet<&Iri> = original
                .iter()
                .filter(|o| c.is_subset(o) && o.len() > c.len())
                .flat_map(|o| o.difference(c))
                .collect();
            let note = if dropped.is_empty() {
                String::new()
            } else {
                format!(
                    "overlap: also mergeable with {}",
                    dropped.iter().map(|d| onto.label(d)).collect::<Vec<_>>().join(", ")
                )
            };
            Ok(ReviewEntry {
                members: c.iter().cloned().collect(),
                member_labels: c.iter().map(|m| onto.label(m)).collect(),
                representative,
                approved: false,
                note,
            })
        })
        .collect()
}

/// Approved entries as cliques; errors when none is approved.
pub fn approved_cliques(entries: &[ReviewEntry]) -> Result<Vec<Clique>, RefineError> {
    let out: Vec<Clique> = entries
        .iter()
        .filter(|e| e.approved)
        .map(|e| Clique {
            members: e.members.iter().cloned().collect(),
            representative: e.representative.clone(),
        })
        .collect();
    if out.is_empty() {
        Err(RefineError::NothingApproved)
    } else {
        Ok(out)
    }
}
