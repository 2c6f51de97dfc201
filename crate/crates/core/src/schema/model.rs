use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SchemaError;

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";

/// Built-in simple types accepted by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimpleType {
    Boolean,
    String,
    AnyUri,
}

impl SimpleType {
    pub fn from_xsd_local(local: &str) -> Option<Self> {
        match local {
            "boolean" => Some(Self::Boolean),
            "string" => Some(Self::String),
            "anyURI" => Some(Self::AnyUri),
            _ => None,
        }
    }

    pub fn xsd_local(self) -> &'static str {
        match self {
            Self::Boolean => "boolean",
            Self::String => "string",
            Self::AnyUri => "anyURI",
        }
    }

    /// Canonical lexical form of `raw`, or `None` if it is not a valid
    /// value of this type. Booleans canonicalize to `true`/`false`.
    pub fn canonical_value(self, raw: &str) -> Option<String> {
        match self {
            Self::Boolean => match raw.trim() {
                "true" | "1" => Some("true".into()),
                "false" | "0" => Some("false".into()),
                _ => None,
            },
            Self::String => Some(raw.to_string()),
            Self::AnyUri => Some(raw.trim().to_string()),
        }
    }
}

/// What an element or attribute declaration points at.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeRef {
    Simple(SimpleType),
    Named(String),
    /// Inline, nameless complex type; keyed by its location in the schema.
    Anonymous(String),
}

impl TypeRef {
    pub fn is_complex(&self) -> bool {
        !matches!(self, TypeRef::Simple(_))
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Simple(s) => write!(f, "xs:{}", s.xsd_local()),
            TypeRef::Named(n) => f.write_str(n),
            TypeRef::Anonymous(loc) => write!(f, "<anonymous at {loc}>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaxOccurs {
    Bounded(u32),
    Unbounded,
}

impl MaxOccurs {
    pub fn allows(self, count: u32) -> bool {
        match self {
            MaxOccurs::Bounded(max) => count <= max,
            MaxOccurs::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDecl {
    pub name: String,
    pub type_ref: TypeRef,
    pub min_occurs: u32,
    pub max_occurs: MaxOccurs,
    pub default: Option<String>,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: String,
    pub datatype: SimpleType,
    pub required: bool,
    pub default: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceGroup {
    /// Text of `xs:annotation/xs:appinfo`; `None` when missing or blank.
    pub annotation_name: Option<String>,
    pub alternatives: Vec<ElementDecl>,
    pub min_occurs: u32,
    pub max_occurs: MaxOccurs,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Particle {
    Element(ElementDecl),
    Choice(ChoiceGroup),
    Sequence(Vec<Particle>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDef {
    /// Empty for anonymous types.
    pub name: String,
    pub base: Option<String>,
    pub particles: Vec<Particle>,
    pub attributes: Vec<AttributeDecl>,
    pub location: String,
}

/// An element declaration found in a type, with the choice group it belongs
/// to (if any).
#[derive(Debug, Clone, Copy)]
pub struct DeclaredElement<'a> {
    pub decl: &'a ElementDecl,
    pub choice: Option<&'a ChoiceGroup>,
}

#[derive(Debug, Clone, Copy)]
pub struct ResolvedElement<'a> {
    pub decl: &'a ElementDecl,
    pub choice: Option<&'a ChoiceGroup>,
    /// Name of the type in the extension chain that declares the element.
    pub declared_in: &'a str,
}

impl TypeDef {
    /// Own element declarations in document order, sequences flattened.
    pub fn elements(&self) -> Vec<DeclaredElement<'_>> {
        fn walk<'a>(particles: &'a [Particle], out: &mut Vec<DeclaredElement<'a>>) {
            for p in particles {
                match p {
                    Particle::Element(decl) => out.push(DeclaredElement { decl, choice: None }),
                    Particle::Choice(group) => out.extend(group.alternatives.iter().map(|decl| DeclaredElement {
                        decl,
                        choice: Some(group),
                    })),
                    Particle::Sequence(inner) => walk(inner, out),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.particles, &mut out);
        out
    }

    /// Own choice groups, sequences flattened.
    pub fn choices(&self) -> Vec<&ChoiceGroup> {
        fn walk<'a>(particles: &'a [Particle], out: &mut Vec<&'a ChoiceGroup>) {
            for p in particles {
                match p {
                    Particle::Choice(g) => out.push(g),
                    Particle::Sequence(inner) => walk(inner, out),
                    Particle::Element(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.particles, &mut out);
        out
    }

    /// Boolean child elements with their defaults, e.g. the adjective flags
    /// on a risk.
    pub fn boolean_flags(&self) -> Vec<(&str, Option<&str>)> {
        self.elements()
            .into_iter()
            .filter(|e| e.decl.type_ref == TypeRef::Simple(SimpleType::Boolean))
            .map(|e| (e.decl.name.as_str(), e.decl.default.as_deref()))
            .collect()
    }
}

/// Parsed schema: named complex types, inline anonymous ones (kept so the
/// authoring rules can report them) and the single top-level element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaModel {
    pub target_namespace: String,
    pub types: BTreeMap<String, TypeDef>,
    pub anonymous_types: BTreeMap<String, TypeDef>,
    pub root_element: ElementDecl,
}

impl SchemaModel {
    pub fn type_def(&self, r: &TypeRef) -> Option<&TypeDef> {
        match r {
            TypeRef::Named(n) => self.types.get(n),
            TypeRef::Anonymous(loc) => self.anonymous_types.get(loc),
            TypeRef::Simple(_) => None,
        }
    }

    /// The type and its bases, most-derived first.
    pub fn ancestry<'a>(&'a self, ty: &'a TypeDef) -> Vec<&'a TypeDef> {
        let mut chain = vec![ty];
        let mut cur = ty;
        while let Some(base) = cur.base.as_ref().and_then(|b| self.types.get(b)) {
            // acyclicity is checked at parse time; guard anyway
            if chain.iter().any(|t| std::ptr::eq(*t, base)) {
                break;
            }
            chain.push(base);
            cur = base;
        }
        chain
    }

    /// Every element visible in `ty`, walking the extension chain from the
    /// most-derived type. A redeclaration in a derived type shadows the
    /// base declaration.
    pub fn visible_elements<'a>(&'a self, ty: &'a TypeDef) -> Vec<ResolvedElement<'a>> {
        let mut out: Vec<ResolvedElement<'a>> = Vec::new();
        for t in self.ancestry(ty) {
            for e in t.elements() {
                if !out.iter().any(|r| r.decl.name == e.decl.name) {
                    out.push(ResolvedElement {
                        decl: e.decl,
                        choice: e.choice,
                        declared_in: &t.name,
                    });
                }
            }
        }
        out
    }

    /// Every attribute visible in `ty` (derived declarations win).
    pub fn visible_attributes<'a>(&'a self, ty: &'a TypeDef) -> Vec<&'a AttributeDecl> {
        let mut out: Vec<&AttributeDecl> = Vec::new();
        for t in self.ancestry(ty) {
            for a in &t.attributes {
                if !out.iter().any(|o| o.name == a.name) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn lookup_element_in<'a>(
        &'a self,
        ty: &'a TypeDef,
        element_name: &str,
    ) -> Result<ResolvedElement<'a>, SchemaError> {
        let visible = self.visible_elements(ty);
        visible
            .iter()
            .find(|r| r.decl.name == element_name)
            .copied()
            .ok_or_else(|| SchemaError::UndeclaredElement {
                element: element_name.to_string(),
                enclosing: if ty.name.is_empty() {
                    ty.location.clone()
                } else {
                    ty.name.clone()
                },
                candidates: visible.iter().map(|r| r.decl.name.clone()).collect(),
            })
    }

    pub fn lookup_element(&self, enclosing_type: &str, element_name: &str) -> Result<ResolvedElement<'_>, SchemaError> {
        let ty = self
            .types
            .get(enclosing_type)
            .ok_or_else(|| SchemaError::UnknownEnclosingType(enclosing_type.to_string()))?;
        self.lookup_element_in(ty, element_name)
    }

    /// Governing type of `element_name` when it occurs inside an element of
    /// type `enclosing_type`.
    pub fn resolve_element_type(&self, element_name: &str, enclosing_type: &str) -> Result<&TypeRef, SchemaError> {
        self.lookup_element(enclosing_type, element_name)
            .map(|r| &r.decl.type_ref)
    }

    /// Pretty JSON dump of the model.
    pub fn debug_dump(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema model serializes")
    }
}
