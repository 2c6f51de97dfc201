//! Turtle and RDF/XML serialization of [`OntologyGraph`], and parsing back.
//!
//! Serializers are hand-written so the byte output is stable: subjects and
//! predicates come out in a fixed order. Parsing goes through `oxttl` and
//! `oxrdfxml` and then maps the triple set onto the ontology model, refusing
//! anything the model cannot represent.

mod read;
mod turtle;
mod xml;

use serde::{Deserialize, Serialize};

use crate::ontology::{OntologyError, OntologyGraph};

pub use read::parse;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Turtle,
    RdfXml,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Turtle => "ttl",
            Format::RdfXml => "owl",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RdfError {
    #[error("ontology is inconsistent: {0}")]
    Invalid(#[from] OntologyError),
    #[error("property {0} has a local name that is not an XML name; RDF/XML cannot encode it")]
    NotXmlName(String),
    #[error("character U+{0:04X} cannot appear in an XML document")]
    NotXmlChar(u32),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("anonymous node {0} is not supported")]
    BlankNode(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("document has no owl:Ontology header")]
    MissingHeader,
    #[error("document declares several ontologies: {0:?}")]
    SeveralHeaders(Vec<String>),
}

/// Serialize `ontology`. The ontology is validated first, so nothing is
/// produced for an inconsistent graph.
pub fn serialize(ontology: &OntologyGraph, format: Format) -> Result<Vec<u8>, RdfError> {
    ontology.validate()?;
    match format {
        Format::Turtle => Ok(turtle::write(ontology).into_bytes()),
        Format::RdfXml => xml::write(ontology).map(String::into_bytes),
    }
}

/// Component-wise equality. Sound because the model has no anonymous nodes.
pub fn equal(a: &OntologyGraph, b: &OntologyGraph) -> bool {
    a == b
}
