use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ontology::{DataAssertion, Iri, ObjectAssertion, OntologyGraph};

use super::{Clique, RefineError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assertion {
    Object(ObjectAssertion),
    Data(DataAssertion),
}

impl Assertion {
    fn endpoints(&self) -> Vec<&Iri> {
        match self {
            Assertion::Object(a) => vec![&a.subject, &a.object],
            Assertion::Data(a) => vec![&a.subject],
        }
    }

    fn touches(&self, set: &BTreeSet<Iri>) -> bool {
        self.endpoints().into_iter().any(|e| set.contains(e))
    }

    fn substitute(&self, from: &BTreeSet<Iri>, to: &Iri) -> Assertion {
        let sub = |i: &Iri| if from.contains(i) { to.clone() } else { i.clone() };
        match self {
            Assertion::Object(a) => Assertion::Object(ObjectAssertion {
                subject: sub(&a.subject),
                property: a.property.clone(),
                object: sub(&a.object),
            }),
            Assertion::Data(a) => Assertion::Data(DataAssertion {
                subject: sub(&a.subject),
                property: a.property.clone(),
                value: a.value.clone(),
            }),
        }
    }

    fn present_in(&self, o: &OntologyGraph) -> bool {
        match self {
            Assertion::Object(a) => o.object_assertions.contains(a),
            Assertion::Data(a) => o.data_assertions.contains(a),
        }
    }

    fn insert_into(&self, o: &mut OntologyGraph) {
        match self {
            Assertion::Object(a) => o.object_assertions.insert(a.clone()),
            Assertion::Data(a) => o.data_assertions.insert(a.clone()),
        };
    }

    fn remove_from(&self, o: &mut OntologyGraph) {
        match self {
            Assertion::Object(a) => o.object_assertions.remove(a),
            Assertion::Data(a) => o.data_assertions.remove(a),
        };
    }
}

fn all_assertions(o: &OntologyGraph) -> impl Iterator<Item = Assertion> + '_ {
    o.object_assertions
        .iter()
        .cloned()
        .map(Assertion::Object)
        .chain(o.data_assertions.iter().cloned().map(Assertion::Data))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetiredInstance {
    pub iri: Iri,
    pub class: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewrite {
    pub before: Assertion,
    pub after: Assertion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEntry {
    pub clique: Clique,
    pub retired: Vec<RetiredInstance>,
    pub rewrites: Vec<Rewrite>,
    /// Original assertions touching a retired member.
    pub removed: BTreeSet<Assertion>,
    /// Rewritten assertions that were not already present.
    pub added: BTreeSet<Assertion>,
    /// Unix seconds.
    pub timestamp: u64,
    #[serde(default)]
    pub reverted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeLog {
    pub entries: Vec<MergeEntry>,
}

fn check_cliques(onto: &OntologyGraph, cliques: &[Clique]) -> Result<(), RefineError> {
    let mut seen = BTreeSet::new();
    let mut overlap = BTreeSet::new();
    for c in cliques {
        if c.members.len() < 2 {
            return Err(RefineError::TooFewMembers(c.members.len()));
        }
        if !c.members.contains(&c.representative) {
            return Err(RefineError::RepresentativeNotMember(c.representative.clone()));
        }
        for m in &c.members {
            if !onto.instances.contains_key(m) {
                return Err(RefineError::UnknownInstance(m.clone()));
            }
            if !seen.insert(m.clone()) {
                overlap.insert(m.clone());
            }
        }
    }
    if overlap.is_empty() {
        Ok(())
    } else {
        Err(RefineError::Overlap(overlap.into_iter().collect()))
    }
}

fn merge_one(onto: &mut OntologyGraph, clique: &Clique, timestamp: u64) -> MergeEntry {
    let rep = &clique.representative;
    let others: BTreeSet<Iri> = clique.members.iter().filter(|m| *m != rep).cloned().collect();
    let touched: Vec<Assertion> = all_assertions(onto).filter(|a| a.touches(&others)).collect();
    for a in &touched {
        a.remove_from(onto);
    }
    let mut rewrites = Vec::new();
    let mut added = BTreeSet::new();
    for a in &touched {
        let after = a.substitute(&others, rep);
        if !after.present_in(onto) {
            after.insert_into(onto);
            added.insert(after.clone());
        }
        rewrites.push(Rewrite {
            before: a.clone(),
            after,
        });
    }
    let mut retired = Vec::new();
    for r in &others {
        let class = onto.instances.remove(r).expect("checked active");
        onto.merged_into.insert(r.clone(), rep.clone());
        retired.push(RetiredInstance { iri: r.clone(), class });
    }
    MergeEntry {
        clique: clique.clone(),
        retired,
        rewrites,
        removed: touched.into_iter().collect(),
        added,
        timestamp,
        reverted: false,
    }
}

/// Merge every clique into its representative. Cliques must be pairwise
/// disjoint and made of active instances.
pub fn apply_merges(
    ontology: &OntologyGraph,
    cliques: &[Clique],
    timestamp: u64,
) -> Result<(OntologyGraph, MergeLog), RefineError> {
    check_cliques(ontology, cliques)?;
    let mut onto = ontology.clone();
    let mut log = MergeLog::default();
    for c in cliques {
        log.entries.push(merge_one(&mut onto, c, timestamp));
    }
    Ok((onto, log))
}

fn undo(onto: &mut OntologyGraph, e: &MergeEntry) -> Result<(), RefineError> {
    for r in &e.retired {
        if onto.instances.contains_key(&r.iri) {
            return Err(RefineError::LogMismatch(format!("{} is active", r.iri)));
        }
    }
    for a in &e.added {
        a.remove_from(onto);
    }
    for a in &e.removed {
        a.insert_into(onto);
    }
    for r in &e.retired {
        onto.instances.insert(r.iri.clone(), r.class.clone());
        onto.merged_into.remove(&r.iri);
    }
    Ok(())
}

fn redo(onto: &mut OntologyGraph, e: &MergeEntry) -> Result<(), RefineError> {
    for r in &e.retired {
        if onto.instances.remove(&r.iri).is_none() {
            return Err(RefineError::LogMismatch(format!("{} is not active", r.iri)));
        }
        onto.merged_into.insert(r.iri.clone(), e.clique.representative.clone());
    }
    for a in &e.removed {
        a.remove_from(onto);
    }
    for a in &e.added {
        a.insert_into(onto);
    }
    Ok(())
}

fn depends_on(later: &MergeEntry, earlier: &MergeEntry) -> bool {
    let members = &earlier.clique.members;
    later.clique.members.iter().any(|m| members.contains(m))
        || later.removed.iter().any(|a| earlier.added.contains(a))
        || later.added.iter().any(|a| earlier.removed.contains(a))
}

/// Undo entry `index`. Later entries that touched the same instances or
/// assertions must be reverted first.
pub fn revert(ontology: &OntologyGraph, log: &mut MergeLog, index: usize) -> Result<OntologyGraph, RefineError> {
    let len = log.entries.len();
    let entry = log.entries.get(index).ok_or(RefineError::NoSuchEntry { index, len })?;
    if entry.reverted {
        return Err(RefineError::AlreadyReverted(index));
    }
    for (later, e) in log.entries.iter().enumerate().skip(index + 1) {
        if !e.reverted && depends_on(e, entry) {
            return Err(RefineError::Dependent { index, later });
        }
    }
    let mut onto = ontology.clone();
    undo(&mut onto, entry)?;
    log.entries[index].reverted = true;
    Ok(onto)
}

/// Undo every entry that is still active, newest first.
pub fn revert_all(ontology: &OntologyGraph, log: &mut MergeLog) -> Result<OntologyGraph, RefineError> {
    let mut onto = ontology.clone();
    for i in (0..log.entries.len()).rev() {
        if !log.entries[i].reverted {
            onto = revert(&onto, log, i)?;
        }
    }
    Ok(onto)
}

/// Re-apply the active entries of `log` to the pre-merge ontology.
pub fn replay(pre: &OntologyGraph, log: &MergeLog) -> Result<OntologyGraph, RefineError> {
    let mut onto = pre.clone();
    for e in log.entries.iter().filter(|e| !e.reverted) {
        redo(&mut onto, e)?;
    }
    Ok(onto)
}
