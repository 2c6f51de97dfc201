//! The constrained XSD subset used to structure requirements: named complex
//! types with single inheritance by extension, sequences, annotated choices,
//! and boolean/string/anyURI leaves.

mod model;
mod parse;

pub use model::*;
pub use parse::parse_schema;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("ill-formed XML at line {line}, column {column}: {message}")]
    Xml { line: u32, column: u32, message: String },
    #[error("document root <{0}> is not xs:schema")]
    NotASchema(String),
    #[error("unsupported construct {construct} at {location}")]
    Unsupported { construct: String, location: String },
    #[error("missing attribute {attribute} at {location}")]
    MissingAttribute { attribute: String, location: String },
    #[error("invalid {attribute}=\"{value}\" at {location}")]
    InvalidAttribute {
        attribute: String,
        value: String,
        location: String,
    },
    #[error("schema declares no top-level element")]
    MissingRoot,
    #[error("schema declares several top-level elements: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("complex type {0} declared twice")]
    DuplicateType(String),
    #[error("unknown type {name} referenced at {location}")]
    UnknownType { name: String, location: String },
    #[error("extension cycle: {}", .0.join(" -> "))]
    ExtensionCycle(Vec<String>),
    #[error("unknown enclosing type {0}")]
    UnknownEnclosingType(String),
    #[error("element {element} is not declared in {enclosing}; candidates: {candidates:?}")]
    UndeclaredElement {
        element: String,
        enclosing: String,
        candidates: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Every complex type carries a name; it becomes the class name.
    NamelessType,
    /// Every choice carries an `xs:appinfo` name; it becomes the property
    /// name.
    UnnamedChoice,
    /// The root element's type is a plain list of complex-typed elements.
    RootNotList,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolation {
    pub rule: Rule,
    pub location: String,
    pub message: String,
}

/// Check the three authoring rules. An empty result means the schema can be
/// turned into classes and properties.
pub fn validate_authoring_rules(model: &SchemaModel) -> Vec<RuleViolation> {
    let mut out = Vec::new();
    for (location, def) in &model.anonymous_types {
        out.push(RuleViolation {
            rule: Rule::NamelessType,
            location: location.clone(),
            message: "complex type has no name; name it and reference it with type=".into(),
        });
        unnamed_choices(def, &mut out);
    }
    for def in model.types.values() {
        unnamed_choices(def, &mut out);
    }

    let root = &model.root_element;
    let root_problem = match model.type_def(&root.type_ref) {
        None => Some(format!("root element {} has simple type {}", root.name, root.type_ref)),
        Some(def) => {
            let closure: Vec<&TypeDef> = model.ancestry(def);
            let nested = closure
                .iter()
                .flat_map(|t| &t.particles)
                .find(|p| !matches!(p, Particle::Element(_)));
            let leaves = model
                .visible_elements(def)
                .into_iter()
                .filter(|e| !e.decl.type_ref.is_complex())
                .map(|e| e.decl.name.clone())
                .collect::<Vec<_>>();
            if nested.is_some() {
                Some(format!(
                    "root element {} must contain a plain sequence of elements, found a nested group",
                    root.name
                ))
            } else if !leaves.is_empty() {
                Some(format!(
                    "root element {} contains simple-typed elements {:?}",
                    root.name, leaves
                ))
            } else if model.visible_elements(def).is_empty() {
                Some(format!("root element {} declares no elements", root.name))
            } else {
                None
            }
        }
    };
    if let Some(message) = root_problem {
        out.push(RuleViolation {
            rule: Rule::RootNotList,
            location: root.location.clone(),
            message,
        });
    }
    out
}

fn unnamed_choices(def: &TypeDef, out: &mut Vec<RuleViolation>) {
    for choice in def.choices() {
        if choice.annotation_name.is_none() {
            out.push(RuleViolation {
                rule: Rule::UnnamedChoice,
                location: choice.location.clone(),
                message: "choice has no xs:annotation/xs:appinfo name".into(),
            });
        }
    }
}
