//! Line-level Markdown scanning: wikilinks, inline tags and paragraphs.
//!
//! Fenced code blocks (lines starting with ```` ``` ````) are opaque to every
//! scanner in this module.

use serde::{Deserialize, Serialize};

/// One `[[target]]` or `[[target|alias]]` occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLink {
    pub target: String,
    pub alias: Option<String>,
}

/// Problems found while scanning a note body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkWarning {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Iterate the lines of `body` that are outside fenced code blocks, with
/// their 1-based line numbers.
fn prose_lines(body: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut in_fence = false;
    body.split('\n').enumerate().filter_map(move |(idx, line)| {
        if is_fence(line) {
            in_fence = !in_fence;
            return None;
        }
        if in_fence {
            None
        } else {
            Some((idx + 1, line))
        }
    })
}

/// Extract every wikilink outside fenced code blocks, in document order.
/// Links do not span lines; an unterminated `[[` produces a warning and is
/// skipped.
pub fn extract_links(body: &str) -> (Vec<RawLink>, Vec<LinkWarning>) {
    let mut links = Vec::new();
    let mut warnings = Vec::new();
    for (line_no, line) in prose_lines(body) {
        let mut rest = line;
        while let Some(start) = rest.find("[[") {
            let after = &rest[start + 2..];
            let Some(end) = after.find("]]") else {
                warnings.push(LinkWarning {
                    line: line_no,
                    message: "unterminated wikilink".to_string(),
                });
                break;
            };
            let inner = &after[..end];
            let (target, alias) = match inner.split_once('|') {
                Some((t, a)) => (t.trim(), Some(a.trim().to_string())),
                None => (inner.trim(), None),
            };
            if target.is_empty() {
                warnings.push(LinkWarning {
                    line: line_no,
                    message: "wikilink with empty target".to_string(),
                });
            } else {
                links.push(RawLink {
                    target: target.to_string(),
                    alias,
                });
            }
            rest = &after[end + 2..];
        }
    }
    (links, warnings)
}

/// Inline `#tag` tokens outside code fences: whitespace-delimited tokens
/// starting with a single `#`. Heading markers (`#`, `##`) are not tags.
pub fn extract_tags(body: &str) -> Vec<String> {
    prose_lines(body)
        .flat_map(|(_, line)| line.split_whitespace())
        .filter_map(|tok| tok.strip_prefix('#'))
        .filter(|tag| !tag.is_empty() && !tag.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Maximal runs of non-blank lines outside fenced code blocks. A fence line
/// terminates the current paragraph.
pub fn paragraphs(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut in_fence = false;
    for line in body.split('\n') {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if is_fence(line) {
            in_fence = !in_fence;
            flush(&mut current, &mut out);
            continue;
        }
        if in_fence || line.trim().is_empty() {
            flush(&mut current, &mut out);
        } else {
            current.push(line);
        }
    }
    flush(&mut current, &mut out);
    out
}

fn flush(current: &mut Vec<&str>, out: &mut Vec<String>) {
    if !current.is_empty() {
        out.push(current.join("\n"));
        current.clear();
    }
}

/// Remove `#spec/...` tag tokens from a paragraph so copied text does not
/// turn concept notes into clause notes.
pub fn strip_clause_tags(paragraph: &str) -> String {
    paragraph
        .split('\n')
        .map(|line| {
            line.split(' ')
                .filter(|tok| !tok.starts_with("#spec/"))
                .collect::<Vec<_>>()
                .join(" ")
                .trim_end()
                .to_string()
        })
        .filter(|line| !line.trim().is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}
