//! Toolchain turning annotated requirements into an OWL ontology.
//!
//! The pipeline: a markdown vault of concept and clause notes ([`vault`]),
//! an XSD describing requirement structure ([`schema`]), class generation
//! ([`classgen`]), instance population from XML ([`instancegen`]),
//! oracle-assisted merging of duplicate instances ([`refine`]), scoring
//! ([`eval`]) and RDF serialization ([`rdfio`]).

pub mod classgen;
pub mod cli;
pub mod config;
pub mod eval;
pub mod fsutil;
pub mod instancegen;
pub mod ontology;
pub mod rdfio;
pub mod refine;
pub mod schema;
pub mod vault;
