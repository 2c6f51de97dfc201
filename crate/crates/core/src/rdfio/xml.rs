use std::fmt::Write;

use crate::ontology::{Datatype, Iri, OntologyGraph, XSD};

use super::{RdfError, OWL, RDF, RDFS};

fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_.-".contains(c))
}

fn escape(s: &str) -> Result<String, RdfError> {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c if (c as u32) < 0x20 || c == '\u{FFFE}' || c == '\u{FFFF}' => return Err(RdfError::NotXmlChar(c as u32)),
            c => out.push(c),
        }
    }
    Ok(out)
}

fn prop_name(o: &OntologyGraph, p: &Iri) -> Result<String, RdfError> {
    match p.as_str().strip_prefix(&o.namespace()) {
        Some(local) if is_ncname(local) => Ok(local.to_string()),
        _ => Err(RdfError::NotXmlName(p.to_string())),
    }
}

fn resource(out: &mut String, tag: &str, iri: &str) -> Result<(), RdfError> {
    let _ = writeln!(out, "        <{tag} rdf:resource=\"{}\"/>", escape(iri)?);
    Ok(())
}

fn section(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "\n\n    <!--\n    ///////////////////////////////////////////////////////////////////////////////////////\n    //\n    // {title}\n    //\n    ///////////////////////////////////////////////////////////////////////////////////////\n     -->\n\n"
    );
}

pub(super) fn write(o: &OntologyGraph) -> Result<String, RdfError> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    let _ = writeln!(out, "<rdf:RDF xmlns=\"{}\"", escape(&o.namespace())?);
    let _ = writeln!(out, "     xml:base=\"{}\"", escape(&o.base_iri)?);
    let _ = writeln!(out, "     xmlns:owl=\"{OWL}\"");
    let _ = writeln!(out, "     xmlns:rdf=\"{RDF}\"");
    let _ = writeln!(out, "     xmlns:xml=\"http://www.w3.org/XML/1998/namespace\"");
    let _ = writeln!(out, "     xmlns:xsd=\"{XSD}\"");
    let _ = writeln!(out, "     xmlns:rdfs=\"{RDFS}\">");
    let _ = writeln!(out, "    <owl:Ontology rdf:about=\"{}\"/>", escape(&o.base_iri)?);

    if !o.merged_into.is_empty() {
        section(&mut out, "Annotation properties");
        let _ = writeln!(
            out,
            "    <owl:AnnotationProperty rdf:about=\"{}\"/>",
            escape(o.merged_into_property().as_str())?
        );
    }
    if !o.object_properties.is_empty() {
        section(&mut out, "Object Properties");
        for (p, decl) in &o.object_properties {
            prop_name(o, p)?;
            let _ = writeln!(out, "    <owl:ObjectProperty rdf:about=\"{}\">", escape(p.as_str())?);
            for d in &decl.domains {
                resource(&mut out, "rdfs:domain", d.as_str())?;
            }
            for r in &decl.ranges {
                resource(&mut out, "rdfs:range", r.as_str())?;
            }
            out.push_str("    </owl:ObjectProperty>\n\n");
        }
    }
    if !o.data_properties.is_empty() {
        section(&mut out, "Data properties");
        for (p, decl) in &o.data_properties {
            prop_name(o, p)?;
            let _ = writeln!(out, "    <owl:DatatypeProperty rdf:about=\"{}\">", escape(p.as_str())?);
            for d in &decl.domains {
                resource(&mut out, "rdfs:domain", d.as_str())?;
            }
            resource(&mut out, "rdfs:range", &decl.datatype.iri())?;
            out.push_str("    </owl:DatatypeProperty>\n\n");
        }
    }
    if !o.classes.is_empty() {
        section(&mut out, "Classes");
        for c in &o.classes {
            let supers: Vec<_> = o.subclass_axioms.iter().filter(|(s, _)| s == c).collect();
            if supers.is_empty() {
                let _ = writeln!(out, "    <owl:Class rdf:about=\"{}\"/>\n", escape(c.as_str())?);
                continue;
            }
            let _ = writeln!(out, "    <owl:Class rdf:about=\"{}\">", escape(c.as_str())?);
            for (_, sup) in supers {
                resource(&mut out, "rdfs:subClassOf", sup.as_str())?;
            }
            out.push_str("    </owl:Class>\n\n");
        }
    }
    if !o.instances.is_empty() || !o.merged_into.is_empty() {
        section(&mut out, "Individuals");
    }
    for (i, class) in &o.instances {
        let _ = writeln!(out, "    <owl:NamedIndividual rdf:about=\"{}\">", escape(i.as_str())?);
        resource(&mut out, "rdf:type", class.as_str())?;
        for a in o.object_assertions.iter().filter(|a| a.subject == *i) {
            resource(&mut out, &prop_name(o, &a.property)?, a.object.as_str())?;
        }
        for a in o.data_assertions.iter().filter(|a| a.subject == *i) {
            let tag = prop_name(o, &a.property)?;
            let value = escape(&a.value.value)?;
            match a.value.datatype {
                Datatype::String => {
                    let _ = writeln!(out, "        <{tag}>{value}</{tag}>");
                }
                d => {
                    let _ = writeln!(out, "        <{tag} rdf:datatype=\"{}\">{value}</{tag}>", d.iri());
                }
            }
        }
        out.push_str("    </owl:NamedIndividual>\n\n");
    }
    for (retired, rep) in &o.merged_into {
        let _ = writeln!(out, "    <rdf:Description rdf:about=\"{}\">", escape(retired.as_str())?);
        let _ = writeln!(
            out,
            "        <{} rdf:resource=\"{}\"/>",
            crate::ontology::MERGED_INTO,
            escape(rep.as_str())?
        );
        out.push_str("    </rdf:Description>\n\n");
    }
    out.push_str("</rdf:RDF>\n");
    Ok(out)
}
