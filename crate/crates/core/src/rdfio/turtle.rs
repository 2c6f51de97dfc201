use std::fmt::Write;

use crate::ontology::{Datatype, Iri, OntologyGraph, XSD};

use super::{OWL, RDF, RDFS};

fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub(super) fn iri_ref(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len() + 2);
    out.push('<');
    for c in iri.chars() {
        if c <= ' ' || "<>\"{}|^`\\".contains(c) {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
    out
}

fn term(o: &OntologyGraph, iri: &Iri) -> String {
    let ns = o.namespace();
    match iri.as_str().strip_prefix(&ns) {
        Some(local) if is_simple_local(local) => format!(":{local}"),
        _ => iri_ref(iri.as_str()),
    }
}

fn string_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7F => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn literal(value: &str, datatype: Datatype) -> String {
    match datatype {
        Datatype::String => string_literal(value),
        d => format!("{}^^xsd:{}", string_literal(value), d.xsd_local()),
    }
}

/// Subject block: `s p1 o1 ;\n    p2 o2 .`
fn block(out: &mut String, subject: &str, pairs: &[(String, String)]) {
    out.push_str(subject);
    for (i, (p, o)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push_str(" ;\n   ");
        }
        let _ = write!(out, " {p} {o}");
    }
    out.push_str(" .\n\n");
}

pub(super) fn write(o: &OntologyGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@prefix : {} .", iri_ref(&o.namespace()));
    let _ = writeln!(out, "@prefix owl: <{OWL}> .");
    let _ = writeln!(out, "@prefix rdf: <{RDF}> .");
    let _ = writeln!(out, "@prefix rdfs: <{RDFS}> .");
    let _ = writeln!(out, "@prefix xsd: <{XSD}> .");
    out.push('\n');
    let _ = write!(out, "{} a owl:Ontology .\n\n", iri_ref(&o.base_iri));

    for (p, decl) in &o.object_properties {
        let mut pairs = vec![("a".to_string(), "owl:ObjectProperty".to_string())];
        pairs.extend(decl.domains.iter().map(|d| ("rdfs:domain".into(), term(o, d))));
        pairs.extend(decl.ranges.iter().map(|r| ("rdfs:range".into(), term(o, r))));
        block(&mut out, &term(o, p), &pairs);
    }
    for (p, decl) in &o.data_properties {
        let mut pairs = vec![("a".to_string(), "owl:DatatypeProperty".to_string())];
        pairs.extend(decl.domains.iter().map(|d| ("rdfs:domain".into(), term(o, d))));
        pairs.push(("rdfs:range".into(), format!("xsd:{}", decl.datatype.xsd_local())));
        block(&mut out, &term(o, p), &pairs);
    }
    if !o.merged_into.is_empty() {
        block(
            &mut out,
            &term(o, &o.merged_into_property()),
            &[("a".into(), "owl:AnnotationProperty".into())],
        );
    }
    for c in &o.classes {
        let mut pairs = vec![("a".to_string(), "owl:Class".to_string())];
        pairs.extend(
            o.subclass_axioms
                .range((c.clone(), Iri::new(""))..)
                .take_while(|(sub, _)| sub == c)
                .map(|(_, sup)| ("rdfs:subClassOf".into(), term(o, sup))),
        );
        block(&mut out, &term(o, c), &pairs);
    }
    for (i, class) in &o.instances {
        let mut pairs = vec![
            ("a".to_string(), "owl:NamedIndividual".to_string()),
            ("a".to_string(), term(o, class)),
        ];
        for a in o.object_assertions.iter().filter(|a| a.subject == *i) {
            pairs.push((term(o, &a.property), term(o, &a.object)));
        }
        for a in o.data_assertions.iter().filter(|a| a.subject == *i) {
            pairs.push((term(o, &a.property), literal(&a.value.value, a.value.datatype)));
        }
        block(&mut out, &term(o, i), &pairs);
    }
    let merged = term(o, &o.merged_into_property());
    for (retired, rep) in &o.merged_into {
        block(&mut out, &term(o, retired), &[(merged.clone(), term(o, rep))]);
    }
    out
}
