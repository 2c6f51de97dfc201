//! Instance population from an XML document.
//!
//! Every complex-typed element becomes an instance of the class named by its
//! governing schema type, unless a structurally identical element was seen
//! before, in which case the existing instance is referenced instead.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use roxmltree::{Document, Node};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ontology::{DataAssertion, Datatype, Iri, IriKind, Literal, ObjectAssertion, OntologyError, OntologyGraph};
use crate::schema::{SchemaError, SchemaModel, TypeDef, TypeRef};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("ill-formed XML at line {line}, column {column}: {message}")]
    Xml { line: u32, column: u32, message: String },
    #[error("document root <{found}> does not match schema root <{expected}>")]
    RootMismatch { expected: String, found: String },
    #[error("invalid document at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("ontology has no class for schema type {0}; was it generated from this schema?")]
    MissingClass(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// Canonical digest of an element's type, its non-default simple values and
/// its complex children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub digest: String,
}

#[derive(Serialize)]
struct CanonicalForm<'a> {
    #[serde(rename = "type")]
    type_name: &'a str,
    /// (name, canonical value, datatype)
    values: &'a BTreeSet<(String, String, String)>,
    /// (property name, child digest)
    children: &'a BTreeSet<(String, String)>,
}

fn digest_of(
    type_name: &str,
    values: &BTreeSet<(String, String, String)>,
    children: &BTreeSet<(String, String)>,
) -> Fingerprint {
    let form = CanonicalForm {
        type_name,
        values,
        children,
    };
    let bytes = serde_json::to_vec(&form).expect("canonical form serializes");
    Fingerprint {
        digest: hex::encode(Sha256::digest(&bytes)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameCollision {
    pub name: String,
    pub iri: Iri,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    /// Complex-typed elements visited (the root list element excluded).
    pub elements_seen: usize,
    pub instances_created: usize,
    pub duplicates_referenced: usize,
    pub name_collisions: Vec<NameCollision>,
    pub wall_time_seconds: f64,
    pub stage_seconds: BTreeMap<String, f64>,
}

fn xml_error(e: roxmltree::Error) -> InstanceError {
    let pos = e.pos();
    InstanceError::Xml {
        line: pos.row,
        column: pos.col,
        message: e.to_string(),
    }
}

fn element_children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|c| c.is_element())
}

fn text_of(node: Node) -> String {
    node.children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect::<String>()
}

/// `/root/child[2]` style path of `node`.
fn path_of(node: Node) -> String {
    let mut parts: Vec<String> = node
        .ancestors()
        .filter(|n| n.is_element())
        .map(|n| {
            let name = n.tag_name().name();
            let index = n
                .prev_siblings()
                .skip(1)
                .filter(|s| s.is_element() && s.tag_name().name() == name)
                .count();
            if n.parent().is_some_and(|p| p.is_element()) {
                format!("{name}[{}]", index + 1)
            } else {
                name.to_string()
            }
        })
        .collect();
    parts.reverse();
    format!("/{}", parts.join("/"))
}

fn invalid(node: Node, message: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        path: path_of(node),
        message: message.into(),
    }
}

fn complex_def<'m>(model: &'m SchemaModel, r: &TypeRef, node: Node) -> Result<&'m TypeDef, InstanceError> {
    match r {
        TypeRef::Named(_) => model
            .type_def(r)
            .ok_or_else(|| invalid(node, format!("unknown type {r}"))),
        TypeRef::Anonymous(_) => Err(invalid(node, "element has an anonymous type")),
        TypeRef::Simple(_) => Err(invalid(node, "expected a complex-typed element")),
    }
}

/// Check `node` against its governing complex type, recursively.
fn validate_element(model: &SchemaModel, node: Node, ty: &TypeDef) -> Result<(), InstanceError> {
    let attrs = model.visible_attributes(ty);
    for a in node.attributes() {
        if a.namespace().is_some() {
            continue;
        }
        let decl = attrs
            .iter()
            .find(|d| d.name == a.name())
            .ok_or_else(|| invalid(node, format!("undeclared attribute {}", a.name())))?;
        if decl.datatype.canonical_value(a.value()).is_none() {
            return Err(invalid(
                node,
                format!(
                    "attribute {}=\"{}\" is not a valid {:?}",
                    a.name(),
                    a.value(),
                    decl.datatype
                ),
            ));
        }
    }
    for d in attrs.iter().filter(|d| d.required) {
        if node.attribute(d.name.as_str()).is_none() {
            return Err(invalid(node, format!("missing required attribute {}", d.name)));
        }
    }
    if !text_of(node).trim().is_empty() {
        return Err(invalid(node, "unexpected text content in complex element"));
    }

    let visible = model.visible_elements(ty);
    let mut counts: HashMap<&str, u32> = HashMap::new();
    for child in element_children(node) {
        let name = child.tag_name().name();
        let resolved = model
            .lookup_element_in(ty, name)
            .map_err(|e| invalid(child, e.to_string()))?;
        *counts.entry(resolved.decl.name.as_str()).or_default() += 1;
        match &resolved.decl.type_ref {
            TypeRef::Simple(st) => {
                if element_children(child).next().is_some() {
                    return Err(invalid(child, "simple-typed element has child elements"));
                }
                if st.canonical_value(&text_of(child)).is_none() {
                    return Err(invalid(child, format!("{:?} is not a valid {:?}", text_of(child), st)));
                }
            }
            r => validate_element(model, child, complex_def(model, r, child)?)?,
        }
    }

    let mut choices_seen: Vec<*const crate::schema::ChoiceGroup> = Vec::new();
    for r in &visible {
        let count = counts.get(r.decl.name.as_str()).copied().unwrap_or(0);
        match r.choice {
            None => {
                if count < r.decl.min_occurs || !r.decl.max_occurs.allows(count) {
                    return Err(invalid(
                        node,
                        format!(
                            "element {} occurs {count} time(s), allowed {}..{:?}",
                            r.decl.name, r.decl.min_occurs, r.decl.max_occurs
                        ),
                    ));
                }
            }
            Some(group) => {
                let key = group as *const _;
                if choices_seen.contains(&key) {
                    continue;
                }
                choices_seen.push(key);
                let used: Vec<(&str, u32)> = group
                    .alternatives
                    .iter()
                    .map(|a| (a.name.as_str(), counts.get(a.name.as_str()).copied().unwrap_or(0)))
                    .filter(|(_, c)| *c > 0)
                    .collect();
                let total: u32 = used.iter().map(|(_, c)| c).sum();
                if total < group.min_occurs {
                    return Err(invalid(
                        node,
                        format!(
                            "choice {} requires one of {:?}",
                            group.annotation_name.as_deref().unwrap_or("?"),
                            group.alternatives.iter().map(|a| &a.name).collect::<Vec<_>>()
                        ),
                    ));
                }
                if !group.max_occurs.allows(total) {
                    return Err(invalid(
                        node,
                        format!(
                            "choice {} allows at most {:?} selection(s), found {:?}",
                            group.annotation_name.as_deref().unwrap_or("?"),
                            group.max_occurs,
                            used
                        ),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Validate a whole document; returns the root's governing type.
pub fn validate_document<'m>(model: &'m SchemaModel, doc: &Document) -> Result<&'m TypeDef, InstanceError> {
    let root = doc.root_element();
    if root.tag_name().name() != model.root_element.name {
        return Err(InstanceError::RootMismatch {
            expected: model.root_element.name.clone(),
            found: root.tag_name().name().to_string(),
        });
    }
    let ty = complex_def(model, &model.root_element.type_ref, root)?;
    validate_element(model, root, ty)?;
    Ok(ty)
}

/// Simple values of `node` that differ from the schema default, keyed by
/// attribute or element name.
fn simple_values(model: &SchemaModel, node: Node, ty: &TypeDef) -> Vec<(String, String, Datatype)> {
    let mut out = Vec::new();
    for decl in model.visible_attributes(ty) {
        if let Some(raw) = node.attribute(decl.name.as_str()) {
            let value = decl.datatype.canonical_value(raw).unwrap_or_default();
            let default = decl.default.as_deref().and_then(|d| decl.datatype.canonical_value(d));
            if default.as_deref() != Some(value.as_str()) {
                out.push((decl.name.clone(), value, decl.datatype.into()));
            }
        }
    }
    for child in element_children(node) {
        let Ok(r) = model.lookup_element_in(ty, child.tag_name().name()) else {
            continue;
        };
        if let TypeRef::Simple(st) = r.decl.type_ref {
            let value = st.canonical_value(&text_of(child)).unwrap_or_default();
            let default = r.decl.default.as_deref().and_then(|d| st.canonical_value(d));
            if default.as_deref() != Some(value.as_str()) {
                out.push((r.decl.name.clone(), value, st.into()));
            }
        }
    }
    out
}

fn value_set(values: &[(String, String, Datatype)]) -> BTreeSet<(String, String, String)> {
    values
        .iter()
        .map(|(n, v, d)| (n.clone(), v.clone(), d.xsd_local().to_string()))
        .collect()
}

/// Fingerprint of an element occurrence whose governing type is
/// `type_name`. Child order does not matter; simple values equal to the
/// schema default are ignored.
pub fn fingerprint(model: &SchemaModel, node: Node, type_name: &str) -> Result<Fingerprint, InstanceError> {
    let ty = model
        .types
        .get(type_name)
        .ok_or_else(|| SchemaError::UnknownEnclosingType(type_name.to_string()))?;
    fingerprint_in(model, node, ty)
}

fn fingerprint_in(model: &SchemaModel, node: Node, ty: &TypeDef) -> Result<Fingerprint, InstanceError> {
    let values = value_set(&simple_values(model, node, ty));
    let mut children = BTreeSet::new();
    for child in element_children(node) {
        let r = model.lookup_element_in(ty, child.tag_name().name())?;
        if r.decl.type_ref.is_complex() {
            let child_ty = complex_def(model, &r.decl.type_ref, child)?;
            let prop = property_name(&r);
            children.insert((prop, fingerprint_in(model, child, child_ty)?.digest));
        }
    }
    Ok(digest_of(&ty.name, &values, &children))
}

fn property_name(r: &crate::schema::ResolvedElement) -> String {
    r.choice
        .and_then(|c| c.annotation_name.clone())
        .unwrap_or_else(|| r.decl.name.clone())
}

/// Fingerprints of the instances already in `onto`, computed from their
/// assertions. Instances on an assertion cycle are skipped.
fn index_existing(onto: &OntologyGraph) -> HashMap<String, Iri> {
    fn visit(
        onto: &OntologyGraph,
        iri: &Iri,
        memo: &mut HashMap<Iri, Option<String>>,
        stack: &mut BTreeSet<Iri>,
    ) -> Option<String> {
        if let Some(d) = memo.get(iri) {
            return d.clone();
        }
        if !stack.insert(iri.clone()) {
            return None;
        }
        let class = onto.instances.get(iri)?;
        let values: BTreeSet<(String, String, String)> = onto
            .data_assertions
            .iter()
            .filter(|a| a.subject == *iri)
            .map(|a| {
                (
                    a.property.local_name().to_string(),
                    a.value.value.clone(),
                    a.value.datatype.xsd_local().to_string(),
                )
            })
            .collect();
        let mut children = BTreeSet::new();
        let mut ok = true;
        for a in onto.object_assertions.iter().filter(|a| a.subject == *iri) {
            match visit(onto, &a.object, memo, stack) {
                Some(d) => {
                    children.insert((a.property.local_name().to_string(), d));
                }
                None => ok = false,
            }
        }
        stack.remove(iri);
        let digest = ok.then(|| digest_of(class.local_name(), &values, &children).digest);
        memo.insert(iri.clone(), digest.clone());
        digest
    }

    let mut memo = HashMap::new();
    let mut out = HashMap::new();
    for iri in onto.instances.keys() {
        if let Some(d) = visit(onto, iri, &mut memo, &mut BTreeSet::new()) {
            out.entry(d).or_insert_with(|| iri.clone());
        }
    }
    out
}

struct Populator<'m> {
    model: &'m SchemaModel,
    onto: OntologyGraph,
    registry: HashMap<String, Iri>,
    unnamed: BTreeMap<String, usize>,
    report: BuildReport,
}

impl<'m> Populator<'m> {
    fn class_of(&self, ty: &TypeDef) -> Result<Iri, InstanceError> {
        let c = self.onto.mint(&ty.name, IriKind::Class)?;
        if self.onto.classes.contains(&c) {
            Ok(c)
        } else {
            Err(InstanceError::MissingClass(ty.name.clone()))
        }
    }

    fn is_taken(&self, iri: &Iri) -> bool {
        self.onto.instances.contains_key(iri)
            || self.onto.merged_into.contains_key(iri)
            || self.onto.is_schema_term(iri)
    }

    fn mint_instance(&mut self, name: &str) -> Result<Iri, InstanceError> {
        let first = self.onto.mint(name, IriKind::Instance)?;
        if !self.is_taken(&first) {
            return Ok(first);
        }
        let mut k = 2;
        loop {
            let candidate = Iri::new(format!("{first}_{k}"));
            if !self.is_taken(&candidate) {
                self.report.name_collisions.push(NameCollision {
                    name: name.to_string(),
                    iri: candidate.clone(),
                });
                return Ok(candidate);
            }
            k += 1;
        }
    }

    /// Post-order visit; returns the instance standing for `node`.
    fn visit(&mut self, node: Node, ty: &'m TypeDef) -> Result<(Fingerprint, Iri), InstanceError> {
        let model = self.model;
        let class = self.class_of(ty)?;
        let values = simple_values(model, node, ty);
        let mut children = BTreeSet::new();
        let mut links = Vec::new();
        for child in element_children(node) {
            let r = model.lookup_element_in(ty, child.tag_name().name())?;
            if !r.decl.type_ref.is_complex() {
                continue;
            }
            let child_ty = complex_def(model, &r.decl.type_ref, child)?;
            let (fp, iri) = self.visit(child, child_ty)?;
            let prop = property_name(&r);
            children.insert((prop.clone(), fp.digest));
            links.push((prop, iri));
        }
        let fp = digest_of(&ty.name, &value_set(&values), &children);
        self.report.elements_seen += 1;
        if let Some(existing) = self.registry.get(&fp.digest) {
            self.report.duplicates_referenced += 1;
            return Ok((fp, existing.clone()));
        }

        let name = element_children(node)
            .find(|c| c.tag_name().name() == "name")
            .map(|c| text_of(c).trim().to_string())
            .filter(|n| !n.is_empty())
            .unwrap_or_else(|| {
                let n = self.unnamed.entry(ty.name.clone()).or_insert(0);
                *n += 1;
                format!("{}_{}", ty.name, n)
            });
        let iri = self.mint_instance(&name)?;
        self.onto.instances.insert(iri.clone(), class);
        for (prop, value, datatype) in values {
            self.onto.data_assertions.insert(DataAssertion {
                subject: iri.clone(),
                property: self.onto.mint(&prop, IriKind::Property)?,
                value: Literal::new(value, datatype),
            });
        }
        for (prop, object) in links {
            self.onto.object_assertions.insert(ObjectAssertion {
                subject: iri.clone(),
                property: self.onto.mint(&prop, IriKind::Property)?,
                object,
            });
        }
        self.registry.insert(fp.digest.clone(), iri.clone());
        self.report.instances_created += 1;
        Ok((fp, iri))
    }
}

/// Validate `document` against `model` and add its instances to `ontology`.
pub fn populate_instances(
    ontology: OntologyGraph,
    document: &[u8],
    model: &SchemaModel,
) -> Result<(OntologyGraph, BuildReport), InstanceError> {
    let started = Instant::now();
    let mut stages = BTreeMap::new();

    let t = Instant::now();
    let text = std::str::from_utf8(document).map_err(|e| InstanceError::Xml {
        line: 0,
        column: 0,
        message: format!("invalid UTF-8: {e}"),
    })?;
    let doc = Document::parse(text).map_err(xml_error)?;
    stages.insert("parse".to_string(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let root_ty = validate_document(model, &doc)?;
    stages.insert("validate".to_string(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let registry = index_existing(&ontology);
    stages.insert("index".to_string(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let mut pop = Populator {
        model,
        onto: ontology,
        registry,
        unnamed: BTreeMap::new(),
        report: BuildReport::default(),
    };
    for child in element_children(doc.root_element()) {
        let r = model.lookup_element_in(root_ty, child.tag_name().name())?;
        let child_ty = complex_def(model, &r.decl.type_ref, child)?;
        pop.visit(child, child_ty)?;
    }
    stages.insert("populate".to_string(), t.elapsed().as_secs_f64());
    pop.onto.validate()?;

    let mut report = pop.report;
    report.stage_seconds = stages;
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    Ok((pop.onto, report))
}

/// Repeated-run timing samples as `run_index,seconds` CSV.
pub fn timing_csv(samples: &[f64]) -> String {
    let mut out = String::from("run_index,seconds\n");
    for (i, s) in samples.iter().enumerate() {
        out.push_str(&format!("{i},{s:.6}\n"));
    }
    out
}
