use std::collections::{BTreeMap, BTreeSet};

use oxrdf::{NamedOrBlankNode, Term, Triple};

use crate::ontology::{
    DataAssertion, DataPropertyDecl, Datatype, Iri, Literal, ObjectAssertion, ObjectPropertyDecl, OntologyGraph,
};

use super::{Format, RdfError, OWL, RDF, RDFS};

enum Object {
    Iri(String),
    Literal { value: String, datatype: String },
}

fn triples(bytes: &[u8], format: Format) -> Result<Vec<(String, String, Object)>, RdfError> {
    let raw: Vec<Triple> = match format {
        Format::Turtle => oxttl::TurtleParser::new()
            .for_slice(bytes)
            .collect::<Result<_, _>>()
            .map_err(|e| RdfError::Syntax(e.to_string()))?,
        Format::RdfXml => oxrdfxml::RdfXmlParser::new()
            .for_slice(bytes)
            .collect::<Result<_, _>>()
            .map_err(|e| RdfError::Syntax(e.to_string()))?,
    };
    raw.into_iter()
        .map(|t| {
            let subject = match t.subject {
                NamedOrBlankNode::NamedNode(n) => n.into_string(),
                NamedOrBlankNode::BlankNode(b) => return Err(RdfError::BlankNode(b.to_string())),
            };
            #[allow(unreachable_patterns)]
            let object = match t.object {
                Term::NamedNode(n) => Object::Iri(n.into_string()),
                Term::BlankNode(b) => return Err(RdfError::BlankNode(b.to_string())),
                Term::Literal(l) => {
                    if let Some(lang) = l.language() {
                        return Err(RdfError::Unsupported(format!(
                            "language-tagged literal @{lang} on {subject}"
                        )));
                    }
                    Object::Literal {
                        value: l.value().to_string(),
                        datatype: l.datatype().as_str().to_string(),
                    }
                }
                _ => return Err(RdfError::Unsupported(format!("quoted triple on {subject}"))),
            };
            Ok((subject, t.predicate.into_string(), object))
        })
        .collect()
}

/// Parse a Turtle or RDF/XML document restricted to the vocabulary written
/// by [`super::serialize`].
pub fn parse(bytes: &[u8], format: Format) -> Result<OntologyGraph, RdfError> {
    let ts = triples(bytes, format)?;
    let rdf_type = format!("{RDF}type");
    let owl = |l: &str| format!("{OWL}{l}");

    let headers: Vec<String> = ts
        .iter()
        .filter(|(_, p, o)| *p == rdf_type && matches!(o, Object::Iri(i) if *i == owl("Ontology")))
        .map(|(s, _, _)| s.clone())
        .collect();
    let base = match headers.as_slice() {
        [] => return Err(RdfError::MissingHeader),
        [one] => one.clone(),
        _ => return Err(RdfError::SeveralHeaders(headers)),
    };
    let mut onto = OntologyGraph::new(base.clone());
    let merged_prop = onto.merged_into_property();

    // declarations first, so assertions can be classified in any order
    let mut named_individuals = BTreeSet::new();
    let mut object_props = BTreeSet::new();
    let mut data_props = BTreeSet::new();
    for (s, p, o) in &ts {
        if *p != rdf_type {
            continue;
        }
        let Object::Iri(o) = o else { continue };
        if *o == owl("Class") {
            onto.classes.insert(Iri::new(s.as_str()));
        } else if *o == owl("ObjectProperty") {
            object_props.insert(s.clone());
        } else if *o == owl("DatatypeProperty") {
            data_props.insert(s.clone());
        } else if *o == owl("NamedIndividual") {
            named_individuals.insert(s.clone());
        }
    }

    let mut data_ranges: BTreeMap<String, Datatype> = BTreeMap::new();
    let mut instance_classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut data_domains: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
    for p in &object_props {
        onto.object_properties
            .insert(Iri::new(p.as_str()), ObjectPropertyDecl::default());
    }

    for (s, p, o) in &ts {
        let iri_obj = match o {
            Object::Iri(i) => Some(i.as_str()),
            Object::Literal { .. } => None,
        };
        let unsupported = || RdfError::Unsupported(format!("triple <{s}> <{p}> on this subject"));
        if *p == rdf_type {
            let o = iri_obj.ok_or_else(unsupported)?;
            if o == owl("Ontology")
                || o == owl("Class")
                || o == owl("ObjectProperty")
                || o == owl("DatatypeProperty")
                || o == owl("NamedIndividual")
            {
                continue;
            }
            if o == owl("AnnotationProperty") && *s == merged_prop.as_str() {
                continue;
            }
            if o.starts_with(OWL) || o.starts_with(RDF) || o.starts_with(RDFS) {
                return Err(RdfError::Unsupported(format!("<{s}> is typed <{o}>")));
            }
            instance_classes.entry(s.clone()).or_default().push(o.to_string());
        } else if *p == format!("{RDFS}subClassOf") {
            let o = iri_obj.ok_or_else(unsupported)?;
            onto.subclass_axioms.insert((Iri::new(s.as_str()), Iri::new(o)));
        } else if *p == format!("{RDFS}domain") {
            let o = Iri::new(iri_obj.ok_or_else(unsupported)?);
            if let Some(d) = onto.object_properties.get_mut(&Iri::new(s.as_str())) {
                d.domains.insert(o);
            } else if data_props.contains(s) {
                data_domains.entry(s.clone()).or_default().insert(o);
            } else {
                return Err(RdfError::Unsupported(format!(
                    "rdfs:domain on undeclared property <{s}>"
                )));
            }
        } else if *p == format!("{RDFS}range") {
            let o = iri_obj.ok_or_else(unsupported)?;
            if let Some(d) = onto.object_properties.get_mut(&Iri::new(s.as_str())) {
                d.ranges.insert(Iri::new(o));
            } else if data_props.contains(s) {
                let dt = Datatype::from_iri(o)
                    .ok_or_else(|| RdfError::Unsupported(format!("datatype range <{o}> of <{s}>")))?;
                if data_ranges.insert(s.clone(), dt).is_some_and(|prev| prev != dt) {
                    return Err(RdfError::Unsupported(format!("several ranges on <{s}>")));
                }
            } else {
                return Err(RdfError::Unsupported(format!(
                    "rdfs:range on undeclared property <{s}>"
                )));
            }
        } else if *p == merged_prop.as_str() {
            let o = iri_obj.ok_or_else(unsupported)?;
            onto.merged_into.insert(Iri::new(s.as_str()), Iri::new(o));
        } else if object_props.contains(p) {
            let o = iri_obj
                .ok_or_else(|| RdfError::Unsupported(format!("literal value for object property <{p}> on <{s}>")))?;
            onto.object_assertions.insert(ObjectAssertion {
                subject: Iri::new(s.as_str()),
                property: Iri::new(p.as_str()),
                object: Iri::new(o),
            });
        } else if data_props.contains(p) {
            let Object::Literal { value, datatype } = o else {
                return Err(RdfError::Unsupported(format!(
                    "IRI value for datatype property <{p}> on <{s}>"
                )));
            };
            let dt = Datatype::from_iri(datatype)
                .ok_or_else(|| RdfError::Unsupported(format!("literal datatype <{datatype}>")))?;
            onto.data_assertions.insert(DataAssertion {
                subject: Iri::new(s.as_str()),
                property: Iri::new(p.as_str()),
                value: Literal::new(value.clone(), dt),
            });
        } else {
            return Err(RdfError::Unsupported(format!("predicate <{p}>")));
        }
    }

    for p in &data_props {
        let datatype = *data_ranges
            .get(p)
            .ok_or_else(|| RdfError::Unsupported(format!("datatype property <{p}> without an xsd range")))?;
        onto.data_properties.insert(
            Iri::new(p.as_str()),
            DataPropertyDecl {
                domains: data_domains.remove(p).unwrap_or_default(),
                datatype,
            },
        );
    }
    for (i, classes) in instance_classes {
        if !named_individuals.contains(&i) {
            return Err(RdfError::Unsupported(format!(
                "<{i}> is typed but not an owl:NamedIndividual"
            )));
        }
        let [class] = classes.as_slice() else {
            return Err(RdfError::Unsupported(format!(
                "individual <{i}> has several classes: {classes:?}"
            )));
        };
        onto.instances.insert(Iri::new(i.as_str()), Iri::new(class.as_str()));
    }
    if let Some(i) = named_individuals
        .iter()
        .find(|i| !onto.instances.contains_key(&Iri::new(i.as_str())))
    {
        return Err(RdfError::Unsupported(format!("individual <{i}> has no class")));
    }
    onto.validate()?;
    Ok(onto)
}
