//! Schema-to-ontology translation: classes, the subclass forest and property
//! declarations. Produces no instances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ontology::{DataPropertyDecl, Datatype, IriKind, ObjectPropertyDecl, OntologyError, OntologyGraph};
use crate::schema::{validate_authoring_rules, RuleViolation, SchemaModel, TypeRef};

#[derive(Debug, thiserror::Error)]
pub enum ClassgenError {
    #[error("schema violates {} authoring rule(s)", .0.len())]
    RuleViolations(Vec<RuleViolation>),
    #[error("{name} is used as object property in {object_in} and as datatype property in {data_in}")]
    PropertyKindConflict {
        name: String,
        object_in: String,
        data_in: String,
    },
    #[error("datatype property {name} declared with both {first:?} and {second:?}")]
    DatatypeConflict {
        name: String,
        first: Datatype,
        second: Datatype,
    },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub classes: usize,
    pub subclass_axioms: usize,
    pub object_properties: usize,
    pub data_properties: usize,
}

impl ClassSummary {
    pub fn of(o: &OntologyGraph) -> Self {
        Self {
            classes: o.classes.len(),
            subclass_axioms: o.subclass_axioms.len(),
            object_properties: o.object_properties.len(),
            data_properties: o.data_properties.len(),
        }
    }
}

/// Build the class-level ontology for `model`.
///
/// Element declarations of complex type become object properties named
/// after the element; a choice becomes one object property named by its
/// annotation whose ranges are the alternatives' classes. Simple-typed
/// elements and attributes become datatype properties.
pub fn generate_schema_ontology(model: &SchemaModel, base_iri: &str) -> Result<OntologyGraph, ClassgenError> {
    let violations = validate_authoring_rules(model);
    if !violations.is_empty() {
        return Err(ClassgenError::RuleViolations(violations));
    }
    let mut onto = OntologyGraph::new(base_iri);
    // property name -> first declaring type, for conflict messages
    let mut object_owner: BTreeMap<String, String> = BTreeMap::new();
    let mut data_owner: BTreeMap<String, String> = BTreeMap::new();

    for def in model.types.values() {
        let class = onto.mint(&def.name, IriKind::Class)?;
        onto.classes.insert(class.clone());
        if let Some(base) = &def.base {
            let sup = onto.mint(base, IriKind::Class)?;
            onto.subclass_axioms.insert((class.clone(), sup));
        }

        for e in def.elements() {
            let object_name = match (&e.decl.type_ref, e.choice) {
                (TypeRef::Simple(_), _) => None,
                (_, Some(choice)) => choice.annotation_name.clone(),
                (_, None) => Some(e.decl.name.clone()),
            };
            match (object_name, &e.decl.type_ref) {
                (Some(prop_name), TypeRef::Named(range)) => {
                    if let Some(owner) = data_owner.get(&prop_name) {
                        return Err(ClassgenError::PropertyKindConflict {
                            name: prop_name,
                            object_in: def.name.clone(),
                            data_in: owner.clone(),
                        });
                    }
                    object_owner
                        .entry(prop_name.clone())
                        .or_insert_with(|| def.name.clone());
                    let prop = onto.mint(&prop_name, IriKind::Property)?;
                    let range = onto.mint(range, IriKind::Class)?;
                    let decl = onto.object_properties.entry(prop).or_default();
                    decl.domains.insert(class.clone());
                    decl.ranges.insert(range);
                }
                (None, TypeRef::Simple(st)) => {
                    declare_data(
                        &mut onto,
                        &mut data_owner,
                        &object_owner,
                        &e.decl.name,
                        (*st).into(),
                        &def.name,
                        &class,
                    )?;
                }
                // anonymous types and unnamed choices are excluded by the rules
                _ => {}
            }
        }
        for a in &def.attributes {
            declare_data(
                &mut onto,
                &mut data_owner,
                &object_owner,
                &a.name,
                a.datatype.into(),
                &def.name,
                &class,
            )?;
        }
    }
    onto.validate()?;
    Ok(onto)
}

fn declare_data(
    onto: &mut OntologyGraph,
    data_owner: &mut BTreeMap<String, String>,
    object_owner: &BTreeMap<String, String>,
    name: &str,
    datatype: Datatype,
    type_name: &str,
    class: &crate::ontology::Iri,
) -> Result<(), ClassgenError> {
    if let Some(owner) = object_owner.get(name) {
        return Err(ClassgenError::PropertyKindConflict {
            name: name.to_string(),
            object_in: owner.clone(),
            data_in: type_name.to_string(),
        });
    }
    data_owner
        .entry(name.to_string())
        .or_insert_with(|| type_name.to_string());
    let prop = onto.mint(name, IriKind::Property)?;
    let decl = onto.data_properties.entry(prop).or_insert_with(|| DataPropertyDecl {
        domains: Default::default(),
        datatype,
    });
    if decl.datatype != datatype {
        return Err(ClassgenError::DatatypeConflict {
            name: name.to_string(),
            first: decl.datatype,
            second: datatype,
        });
    }
    decl.domains.insert(class.clone());
    Ok(())
}

/// Object properties declared on `class` or any of its superclasses.
pub fn properties_of(
    onto: &OntologyGraph,
    class: &crate::ontology::Iri,
) -> Vec<(crate::ontology::Iri, ObjectPropertyDecl)> {
    let supers = onto.superclasses(class);
    onto.object_properties
        .iter()
        .filter(|(_, d)| d.domains.iter().any(|c| supers.contains(c)))
        .map(|(p, d)| (p.clone(), d.clone()))
        .collect()
}
