use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::markdown::{extract_links, paragraphs, strip_clause_tags};
use super::{normalize_target, ClauseTag, Diagnostic, NoteGraph, NoteKind};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationReport {
    pub notes_touched: usize,
    pub sections_appended: usize,
    /// Concept notes that did not exist and were created, relative paths.
    pub created_notes: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

/// A `## <spec_id> <clause_path>` heading and the paragraph under it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Section {
    pub tag: ClauseTag,
    pub text: String,
}

impl Section {
    fn render(&self) -> String {
        format!("{}\n{}\n", self.tag.heading(), self.text)
    }
}

/// Sections previously written into a concept note. A section is a
/// paragraph whose first line is a two-word level-2 heading.
pub(crate) fn parse_sections(body: &str) -> Vec<Section> {
    paragraphs(body)
        .into_iter()
        .filter_map(|para| {
            let (head, text) = para.split_once('\n')?;
            let rest = head.strip_prefix("## ")?.trim();
            let (spec_id, clause_path) = rest.split_once(char::is_whitespace)?;
            let clause_path = clause_path.trim();
            if spec_id.is_empty() || clause_path.is_empty() || text.trim().is_empty() {
                return None;
            }
            Some(Section {
                tag: ClauseTag {
                    spec_id: spec_id.to_string(),
                    clause_path: clause_path.to_string(),
                },
                text: text.to_string(),
            })
        })
        .collect()
}

/// Clause paragraphs that link to at least one note, with the normalized
/// ids of the notes they link to (first-occurrence order, no repeats).
pub(crate) fn clause_sections(body: &str, tag: &ClauseTag) -> Vec<(Section, Vec<String>)> {
    paragraphs(body)
        .into_iter()
        .filter_map(|para| {
            let (links, _) = extract_links(&para);
            let mut seen = BTreeSet::new();
            let targets: Vec<String> = links
                .iter()
                .map(|l| normalize_target(&l.target))
                .filter(|t| seen.insert(t.clone()))
                .collect();
            let text = strip_clause_tags(&para);
            if targets.is_empty() || text.is_empty() {
                return None;
            }
            Some((Section { tag: tag.clone(), text }, targets))
        })
        .collect()
}

fn concept_file_name(raw_target: &str) -> Option<String> {
    let no_anchor = raw_target.split('#').next().unwrap_or(raw_target);
    let last = no_anchor.rsplit('/').next().unwrap_or(no_anchor).trim();
    let last = last.strip_suffix(".md").unwrap_or(last).trim();
    if last.is_empty() || last.contains('\\') || last == "." || last == ".." {
        None
    } else {
        Some(format!("{last}.md"))
    }
}

/// Copy every linked clause paragraph into the concept notes it links to,
/// under a `## <spec_id> <clause_path>` heading. Sections already present in
/// a note are not appended again, so re-running is a no-op.
pub fn populate_concept_notes(graph: &NoteGraph, root: &Path) -> PopulationReport {
    let mut report = PopulationReport::default();
    // relative path -> sections to add, in clause order
    let mut plan: BTreeMap<String, Vec<Section>> = BTreeMap::new();
    let mut created: BTreeMap<String, String> = BTreeMap::new();

    for note in graph.notes.values().filter(|n| n.kind == NoteKind::Clause) {
        let Some(tag) = note.clause_tag() else { continue };
        for (section, _) in clause_sections(&note.body, &tag) {
            let (raw_links, _) = extract_links(&section.text);
            let mut done = BTreeSet::new();
            for link in raw_links {
                let id = normalize_target(&link.target);
                if id == note.id || !done.insert(id.clone()) {
                    continue;
                }
                let rel = match graph.notes.get(&id) {
                    Some(target) if target.kind == NoteKind::Clause => continue,
                    Some(target) => target.path.clone(),
                    None => match created.get(&id) {
                        Some(p) => p.clone(),
                        None => match concept_file_name(&link.target) {
                            Some(name) => {
                                created.insert(id.clone(), name.clone());
                                name
                            }
                            None => continue,
                        },
                    },
                };
                plan.entry(rel).or_default().push(section.clone());
            }
        }
    }

    for (rel, sections) in plan {
        let path: PathBuf = root.join(&rel);
        let existed = path.exists();
        let mut content = if existed {
            match fs::read_to_string(&path) {
                Ok(c) => c,
                Err(e) => {
                    report.diagnostics.push(Diagnostic::WriteFailed {
                        path: rel,
                        message: e.to_string(),
                    });
                    continue;
                }
            }
        } else {
            String::new()
        };
        let mut present: BTreeSet<Section> = parse_sections(&content).into_iter().collect();
        let mut appended = 0;
        for section in sections {
            if present.contains(&section) {
                continue;
            }
            if !content.is_empty() {
                if !content.ends_with('\n') {
                    content.push('\n');
                }
                content.push('\n');
            }
            content.push_str(&section.render());
            present.insert(section);
            appended += 1;
        }
        if appended == 0 {
            continue;
        }
        match fs::write(&path, &content) {
            Ok(()) => {
                report.notes_touched += 1;
                report.sections_appended += appended;
                if !existed {
                    report.created_notes.push(rel);
                }
            }
            Err(e) => report.diagnostics.push(Diagnostic::WriteFailed {
                path: rel,
                message: e.to_string(),
            }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_round_trip_through_render() {
        let s = Section {
            tag: ClauseTag {
                spec_id: "S1".into(),
                clause_path: "4.2".into(),
            },
            text: "line one\nline two".into(),
        };
        let body = format!("intro\n\n{}\n{}", s.render(), s.render());
        assert_eq!(parse_sections(&body), vec![s.clone(), s]);
    }

    #[test]
    fn clause_sections_strip_tag_and_dedup_targets() {
        let tag = ClauseTag::parse("spec/S1/4.2").unwrap();
        let body = "#spec/S1/4.2\n\nthe [[User]] of [[device]] and [[user|them]]\n\nno links";
        let secs = clause_sections(body, &tag);
        assert_eq!(secs.len(), 1);
        assert_eq!(secs[0].1, vec!["user", "device"]);
        assert_eq!(secs[0].0.text, "the [[User]] of [[device]] and [[user|them]]");
    }

    #[test]
    fn file_names_for_new_concepts() {
        assert_eq!(
            concept_file_name("Medical Device").as_deref(),
            Some("Medical Device.md")
        );
        assert_eq!(concept_file_name("dir/x#h").as_deref(), Some("x.md"));
        assert_eq!(concept_file_name(".."), None);
    }
}
