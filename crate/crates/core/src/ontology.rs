//! In-memory OWL ontology restricted to named entities: classes, a subclass
//! forest, object and datatype properties, named individuals and their
//! assertions. There are no blank nodes, so two ontologies are equal exactly
//! when their component sets are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
/// Local name of the annotation property linking a retired instance to the
/// instance it was merged into.
pub const MERGED_INTO: &str = "mergedInto";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("local name {0:?} is empty after trimming")]
    EmptyLocalName(String),
    #[error("IRI {iri} is outside the ontology namespace {base}#")]
    ForeignIri { iri: String, base: String },
    #[error("{what} {iri} is not declared")]
    Undeclared { what: &'static str, iri: String },
    #[error("{0} is declared both as object and datatype property")]
    PropertyKindClash(String),
    #[error("literal {value:?} does not match the {expected:?} range of {property}")]
    LiteralMismatch {
        property: String,
        value: String,
        expected: Datatype,
    },
    #[error("retired instance {0} is still active")]
    RetiredStillActive(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Iri(String);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Text after the last `#`.
    pub fn local_name(&self) -> &str {
        self.0.rsplit_once('#').map_or(self.0.as_str(), |(_, l)| l)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Datatype {
    Boolean,
    String,
    AnyUri,
}

impl Datatype {
    pub fn iri(self) -> String {
        format!("{XSD}{}", self.xsd_local())
    }

    pub fn xsd_local(self) -> &'static str {
        match self {
            Datatype::Boolean => "boolean",
            Datatype::String => "string",
            Datatype::AnyUri => "anyURI",
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        match iri.strip_prefix(XSD)? {
            "boolean" => Some(Datatype::Boolean),
            "string" => Some(Datatype::String),
            "anyURI" => Some(Datatype::AnyUri),
            _ => None,
        }
    }

    fn accepts(self, value: &str) -> bool {
        match self {
            Datatype::Boolean => value == "true" || value == "false",
            _ => true,
        }
    }
}

impl From<crate::schema::SimpleType> for Datatype {
    fn from(s: crate::schema::SimpleType) -> Self {
        use crate::schema::SimpleType;
        match s {
            SimpleType::Boolean => Datatype::Boolean,
            SimpleType::String => Datatype::String,
            SimpleType::AnyUri => Datatype::AnyUri,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    pub datatype: Datatype,
}

impl Literal {
    pub fn new(value: impl Into<String>, datatype: Datatype) -> Self {
        Self {
            value: value.into(),
            datatype,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectAssertion {
    pub subject: Iri,
    pub property: Iri,
    pub object: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DataAssertion {
    pub subject: Iri,
    pub property: Iri,
    pub value: Literal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectPropertyDecl {
    pub domains: BTreeSet<Iri>,
    pub ranges: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataPropertyDecl {
    pub domains: BTreeSet<Iri>,
    pub datatype: Datatype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IriKind {
    Class,
    Property,
    Instance,
}

/// `base#local`, with spaces turned into underscores and every byte outside
/// the URI unreserved set percent-encoded.
pub fn mint_iri(base: &str, local: &str, _kind: IriKind) -> Result<Iri, OntologyError> {
    let trimmed = local.trim();
    if trimmed.is_empty() {
        return Err(OntologyError::EmptyLocalName(local.to_string()));
    }
    let mut out = String::with_capacity(base.len() + trimmed.len() + 1);
    out.push_str(base);
    out.push('#');
    for b in trimmed.bytes() {
        match b {
            b' ' => out.push('_'),
            b if b.is_ascii_alphanumeric() || b"-._~".contains(&b) => out.push(b as char),
            b => out.push_str(&format!("%{b:02X}")),
        }
    }
    Ok(Iri(out))
}

/// Inverse of the encoding in [`mint_iri`], for display.
pub fn display_local(iri: &Iri) -> String {
    let local = iri.local_name();
    let mut bytes = Vec::with_capacity(local.len());
    let raw = local.as_bytes();
    let mut i = 0;
    while i < raw.len() {
        if raw[i] == b'%' && i + 2 < raw.len() {
            let hex = std::str::from_utf8(&raw[i + 1..i + 3]).unwrap_or("");
            if let Ok(v) = u8::from_str_radix(hex, 16) {
                bytes.push(v);
                i += 3;
                continue;
            }
        }
        bytes.push(if raw[i] == b'_' { b' ' } else { raw[i] });
        i += 1;
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyGraph {
    /// Ontology IRI; entity IRIs are `base_iri#local`.
    pub base_iri: String,
    pub classes: BTreeSet<Iri>,
    /// (subclass, superclass)
    pub subclass_axioms: BTreeSet<(Iri, Iri)>,
    pub object_properties: BTreeMap<Iri, ObjectPropertyDecl>,
    pub data_properties: BTreeMap<Iri, DataPropertyDecl>,
    /// Active instance -> its class.
    pub instances: BTreeMap<Iri, Iri>,
    pub object_assertions: BTreeSet<ObjectAssertion>,
    pub data_assertions: BTreeSet<DataAssertion>,
    /// Retired instance -> the representative it was merged into.
    pub merged_into: BTreeMap<Iri, Iri>,
}

impl OntologyGraph {
    pub fn new(base_iri: impl Into<String>) -> Self {
        Self {
            base_iri: base_iri.into(),
            classes: BTreeSet::new(),
            subclass_axioms: BTreeSet::new(),
            object_properties: BTreeMap::new(),
            data_properties: BTreeMap::new(),
            instances: BTreeMap::new(),
            object_assertions: BTreeSet::new(),
            data_assertions: BTreeSet::new(),
            merged_into: BTreeMap::new(),
        }
    }

    pub fn namespace(&self) -> String {
        format!("{}#", self.base_iri)
    }

    pub fn mint(&self, local: &str, kind: IriKind) -> Result<Iri, OntologyError> {
        mint_iri(&self.base_iri, local, kind)
    }

    pub fn merged_into_property(&self) -> Iri {
        Iri(format!("{}#{MERGED_INTO}", self.base_iri))
    }

    /// True when `iri` already names a class or property.
    pub fn is_schema_term(&self, iri: &Iri) -> bool {
        self.classes.contains(iri)
            || self.object_properties.contains_key(iri)
            || self.data_properties.contains_key(iri)
            || *iri == self.merged_into_property()
    }

    /// Total number of assertions naming `instance` as subject or object.
    pub fn degree(&self, instance: &Iri) -> usize {
        let obj = self
            .object_assertions
            .iter()
            .filter(|a| a.subject == *instance || a.object == *instance)
            .count();
        let data = self.data_assertions.iter().filter(|a| a.subject == *instance).count();
        obj + data
    }

    /// Human-facing name: the value of a `name` data assertion when present,
    /// else the decoded local name.
    pub fn label(&self, instance: &Iri) -> String {
        let name_prop = Iri(format!("{}#name", self.base_iri));
        self.data_assertions
            .iter()
            .find(|a| a.subject == *instance && a.property == name_prop)
            .map(|a| a.value.value.clone())
            .unwrap_or_else(|| display_local(instance))
    }

    /// Superclass closure of `class`, including itself.
    pub fn superclasses(&self, class: &Iri) -> BTreeSet<Iri> {
        let mut out = BTreeSet::from([class.clone()]);
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            for (sub, sup) in &self.subclass_axioms {
                if *sub == c && out.insert(sup.clone()) {
                    stack.push(sup.clone());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), OntologyError> {
        let ns = self.namespace();
        let own = |iri: &Iri| -> Result<(), OntologyError> {
            if iri.as_str().starts_with(&ns) && iri.as_str().len() > ns.len() {
                Ok(())
            } else {
                Err(OntologyError::ForeignIri {
                    iri: iri.to_string(),
                    base: self.base_iri.clone(),
                })
            }
        };
        let class = |iri: &Iri| -> Result<(), OntologyError> {
            if self.classes.contains(iri) {
                Ok(())
            } else {
                Err(OntologyError::Undeclared {
                    what: "class",
                    iri: iri.to_string(),
                })
            }
        };
        let instance = |iri: &Iri| -> Result<(), OntologyError> {
            if self.instances.contains_key(iri) {
                Ok(())
            } else {
                Err(OntologyError::Undeclared {
                    what: "instance",
                    iri: iri.to_string(),
                })
            }
        };
        for c in &self.classes {
            own(c)?;
        }
        for (sub, sup) in &self.subclass_axioms {
            class(sub)?;
            class(sup)?;
        }
        for (p, decl) in &self.object_properties {
            own(p)?;
            if self.data_properties.contains_key(p) {
                return Err(OntologyError::PropertyKindClash(p.to_string()));
            }
            decl.domains.iter().chain(&decl.ranges).try_for_each(class)?;
        }
        for (p, decl) in &self.data_properties {
            own(p)?;
            decl.domains.iter().try_for_each(class)?;
        }
        for (i, c) in &self.instances {
            own(i)?;
            class(c)?;
        }
        for a in &self.object_assertions {
            instance(&a.subject)?;
            instance(&a.object)?;
            if !self.object_properties.contains_key(&a.property) {
                return Err(OntologyError::Undeclared {
                    what: "object property",
                    iri: a.property.to_string(),
                });
            }
        }
        for a in &self.data_assertions {
            instance(&a.subject)?;
            let Some(decl) = self.data_properties.get(&a.property) else {
                return Err(OntologyError::Undeclared {
                    what: "datatype property",
                    iri: a.property.to_string(),
                });
            };
            if decl.datatype != a.value.datatype || !decl.datatype.accepts(&a.value.value) {
                return Err(OntologyError::LiteralMismatch {
                    property: a.property.to_string(),
                    value: a.value.value.clone(),
                    expected: decl.datatype,
                });
            }
        }
        for (retired, rep) in &self.merged_into {
            own(retired)?;
            own(rep)?;
            if self.instances.contains_key(retired) {
                return Err(OntologyError::RetiredStillActive(retired.to_string()));
            }
        }
        Ok(())
    }
}
