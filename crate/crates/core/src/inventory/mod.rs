//! Term inventories (support sets) extracted from ontology sources.

pub mod turtle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use turtle::{parse_turtle, to_ntriples, Literal, Node, Resource, Triple, TurtleError, TurtleErrorKind};
use turtle::{OWL, RDF, RDFS, RDF_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Class,
    ObjectProperty,
    DataProperty,
    Individual,
    Unknown,
}

impl TermKind {
    /// Lower is more specific; used when the same subject is typed twice.
    fn precedence(self) -> u8 {
        match self {
            TermKind::Class => 0,
            TermKind::ObjectProperty => 1,
            TermKind::DataProperty => 2,
            TermKind::Individual => 3,
            TermKind::Unknown => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TermKind::Class => "Class",
            TermKind::ObjectProperty => "ObjectProperty",
            TermKind::DataProperty => "DataProperty",
            TermKind::Individual => "Individual",
            TermKind::Unknown => "Unknown",
        }
    }
}

impl FromStr for TermKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "class" => TermKind::Class,
            "objectproperty" => TermKind::ObjectProperty,
            "dataproperty" | "datatypeproperty" => TermKind::DataProperty,
            "individual" => TermKind::Individual,
            "unknown" => TermKind::Unknown,
            _ => return Err(format!("unknown term kind `{s}`")),
        })
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OntologyId {
    Brick,
    Delta,
    EfOnt,
    Custom(String),
}

impl OntologyId {
    pub const SHIPPED: [OntologyId; 3] = [OntologyId::Brick, OntologyId::Delta, OntologyId::EfOnt];

    pub fn parse(s: &str) -> OntologyId {
        match s.to_ascii_lowercase().as_str() {
            "brick" => OntologyId::Brick,
            "delta" => OntologyId::Delta,
            "efont" => OntologyId::EfOnt,
            _ => OntologyId::Custom(s.to_string()),
        }
    }
}

impl fmt::Display for OntologyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OntologyId::Brick => f.write_str("Brick"),
            OntologyId::Delta => f.write_str("DELTA"),
            OntologyId::EfOnt => f.write_str("EFOnt"),
            OntologyId::Custom(name) => f.write_str(name),
        }
    }
}

impl Serialize for OntologyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OntologyId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(OntologyId::parse(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub iri: String,
    pub kind: TermKind,
    pub labels: BTreeSet<String>,
}

impl Term {
    /// A term whose label set is just the local name.
    pub fn new(iri: impl Into<String>, kind: TermKind) -> Term {
        let iri = iri.into();
        let labels = BTreeSet::from([local_name(&iri).to_string()]);
        Term { iri, kind, labels }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Term {
        self.labels.insert(label.into());
        self
    }
}

/// Text after the last `#` or `/` (or `:` for prefixed and URN forms).
pub fn local_name(iri: &str) -> &str {
    let cut = iri
        .rfind(['#', '/'])
        .or_else(|| iri.rfind(':'))
        .map_or(0, |i| i + 1);
    let tail = &iri[cut..];
    if tail.is_empty() {
        iri
    } else {
        tail
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyInventory {
    pub ontology_id: OntologyId,
    pub terms: BTreeMap<String, Term>,
}

impl OntologyInventory {
    pub fn empty(ontology_id: OntologyId) -> Self {
        OntologyInventory { ontology_id, terms: BTreeMap::new() }
    }

    pub fn with_id(mut self, id: OntologyId) -> Self {
        self.ontology_id = id;
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, iri: &str) -> Option<&Term> {
        self.terms.get(iri)
    }

    /// Inserts a term, unioning labels if the iri already exists.
    pub fn insert(&mut self, term: Term) {
        match self.terms.get_mut(&term.iri) {
            Some(existing) => {
                existing.labels.extend(term.labels);
                if term.kind.precedence() < existing.kind.precedence() {
                    existing.kind = term.kind;
                }
            }
            None => {
                self.terms.insert(term.iri.clone(), term);
            }
        }
    }
}

fn declared_kind(type_iri: &str) -> Option<TermKind> {
    let owl = |n: &str| format!("{OWL}{n}");
    if type_iri == owl("Class") || type_iri == format!("{RDFS}Class") {
        Some(TermKind::Class)
    } else if type_iri == owl("ObjectProperty") {
        Some(TermKind::ObjectProperty)
    } else if type_iri == owl("DatatypeProperty") {
        Some(TermKind::DataProperty)
    } else if type_iri == owl("NamedIndividual") {
        Some(TermKind::Individual)
    } else {
        None
    }
}

/// Schema-level types that neither declare a term nor make their subject an
/// individual.
fn is_vocabulary(type_iri: &str) -> bool {
    type_iri.starts_with(OWL) || type_iri.starts_with(RDFS) || type_iri.starts_with(RDF)
}

fn assign<'a>(kinds: &mut BTreeMap<&'a str, TermKind>, iri: &'a str, kind: TermKind) {
    let slot = kinds.entry(iri).or_insert(kind);
    if kind.precedence() < slot.precedence() {
        *slot = kind;
    }
}

pub fn extract_inventory(triples: &BTreeSet<Triple>, ontology_id: OntologyId) -> OntologyInventory {
    let mut kinds: BTreeMap<&str, TermKind> = BTreeMap::new();
    let mut referenced_types: BTreeSet<&str> = BTreeSet::new();
    for t in triples {
        if t.predicate != RDF_TYPE {
            continue;
        }
        let (Resource::Iri(subject), Some(ty)) = (&t.subject, t.object.as_iri()) else { continue };
        if let Some(kind) = declared_kind(ty) {
            assign(&mut kinds, subject.as_str(), kind);
        } else if !is_vocabulary(ty) {
            assign(&mut kinds, subject.as_str(), TermKind::Individual);
            referenced_types.insert(ty);
        }
    }
    for ty in referenced_types {
        kinds.entry(ty).or_insert(TermKind::Unknown);
    }

    let mut inv = OntologyInventory::empty(ontology_id);
    for (iri, kind) in &kinds {
        inv.insert(Term::new(*iri, *kind));
    }
    let label = format!("{RDFS}label");
    for t in triples {
        if t.predicate != label {
            continue;
        }
        let (Resource::Iri(subject), Node::Literal(lit)) = (&t.subject, &t.object) else { continue };
        if let Some(term) = inv.terms.get_mut(subject) {
            term.labels.insert(lit.lexical.clone());
        }
    }
    inv
}

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Turtle {
        path: String,
        #[source]
        source: TurtleError,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: line {line}: duplicate iri `{iri}`")]
    DuplicateIri { path: String, line: usize, iri: String },
}

/// Parses the flat tab-separated format: `iri<TAB>kind<TAB>label|label`.
pub fn parse_inventory_text(text: &str, ontology_id: OntologyId, path: &str) -> Result<OntologyInventory, InventoryError> {
    let mut inv = OntologyInventory::empty(ontology_id);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| InventoryError::Parse { path: path.to_string(), line, message };
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(format!("expected 2 or 3 tab-separated fields, found {}", fields.len())));
        }
        let iri = fields[0];
        if iri.is_empty() {
            return Err(parse_err("empty iri".into()));
        }
        let kind: TermKind = fields[1].parse().map_err(parse_err)?;
        if inv.terms.contains_key(iri) {
            return Err(InventoryError::DuplicateIri { path: path.to_string(), line, iri: iri.to_string() });
        }
        let mut term = Term::new(iri, kind);
        if let Some(labels) = fields.get(2) {
            term.labels.extend(labels.split('|').map(str::trim).filter(|l| !l.is_empty()).map(String::from));
        }
        inv.terms.insert(iri.to_string(), term);
    }
    Ok(inv)
}

pub fn load_inventory_file(path: impl AsRef<Path>, ontology_id: OntologyId) -> Result<OntologyInventory, InventoryError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InventoryError::Io { path: display.clone(), source })?;
    parse_inventory_text(&text, ontology_id, &display)
}

pub fn inventory_from_turtle(text: &str, ontology_id: OntologyId, path: &str) -> Result<OntologyInventory, InventoryError> {
    let triples = parse_turtle(text).map_err(|source| InventoryError::Turtle { path: path.to_string(), source })?;
    Ok(extract_inventory(&triples, ontology_id))
}

/// Loads a `.ttl` file through the Turtle parser, anything else as a flat inventory.
pub fn load_any(path: impl AsRef<Path>, ontology_id: OntologyId) -> Result<OntologyInventory, InventoryError> {
    let path = path.as_ref();
    let is_turtle = path.extension().map_or(false, |e| e.eq_ignore_ascii_case("ttl"));
    if !is_turtle {
        return load_inventory_file(path, ontology_id);
    }
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InventoryError::Io { path: display.clone(), source })?;
    inventory_from_turtle(&text, ontology_id, &display)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("iri `{iri}` is {left} in one inventory and {right} in the other")]
pub struct KindConflict {
    pub iri: String,
    pub left: TermKind,
    pub right: TermKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} irreconcilable kind conflict(s), first: {}", .0.len(), .0[0])]
pub struct MergeError(pub Vec<KindConflict>);

/// Union of two inventories under `a`'s id. `Unknown` yields to any other
/// kind; two different concrete kinds are a conflict.
pub fn merge_inventories(a: &OntologyInventory, b: &OntologyInventory) -> Result<OntologyInventory, MergeError> {
    let mut out = a.clone();
    let mut conflicts = Vec::new();
    for (iri, term) in &b.terms {
        match out.terms.get_mut(iri) {
            None => {
                out.terms.insert(iri.clone(), term.clone());
            }
            Some(existing) => {
                match (existing.kind, term.kind) {
                    (x, y) if x == y => {}
                    (TermKind::Unknown, y) => existing.kind = y,
                    (_, TermKind::Unknown) => {}
                    (x, y) => {
                        conflicts.push(KindConflict { iri: iri.clone(), left: x, right: y });
                        continue;
                    }
                }
                existing.labels.extend(term.labels.iter().cloned());
            }
        }
    }
    if conflicts.is_empty() {
        Ok(out)
    } else {
        Err(MergeError(conflicts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples(doc: &str) -> BTreeSet<Triple> {
        parse_turtle(doc).unwrap()
    }

    const PREFIXES: &str = "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
        @prefix ex: <http://x/ns#> .\n";

    #[test]
    fn object_property_extracted() {
        let t = triples(&format!("{PREFIXES}ex:hasAccuracy a owl:ObjectProperty ."));
        let inv = extract_inventory(&t, OntologyId::Delta);
        let term = inv.get("http://x/ns#hasAccuracy").unwrap();
        assert_eq!(term.kind, TermKind::ObjectProperty);
        assert!(term.labels.contains("hasAccuracy"));
    }

    #[test]
    fn empty_triples_empty_inventory() {
        assert!(extract_inventory(&BTreeSet::new(), OntologyId::Brick).is_empty());
    }

    #[test]
    fn two_labels_plus_local_name() {
        let t = triples(&format!("{PREFIXES}ex:Meter a owl:Class ; rdfs:label \"Meter\"@en, \"Electricity meter\" ."));
        let inv = extract_inventory(&t, OntologyId::Brick);
        let labels: Vec<_> = inv.get("http://x/ns#Meter").unwrap().labels.iter().cloned().collect();
        assert_eq!(labels, vec!["Electricity meter", "Meter"]);
    }

    #[test]
    fn individuals_and_referenced_types() {
        let t = triples(&format!("{PREFIXES}ex:m1 a ex:Meter . ex:Ont a owl:Ontology . ex:p a owl:DatatypeProperty, owl:FunctionalProperty ."));
        let inv = extract_inventory(&t, OntologyId::Brick);
        assert_eq!(inv.get("http://x/ns#m1").unwrap().kind, TermKind::Individual);
        assert_eq!(inv.get("http://x/ns#Meter").unwrap().kind, TermKind::Unknown);
        assert_eq!(inv.get("http://x/ns#p").unwrap().kind, TermKind::DataProperty);
        assert!(inv.get("http://x/ns#Ont").is_none());
    }

    #[test]
    fn class_beats_individual() {
        let t = triples(&format!("{PREFIXES}ex:A a owl:Class, ex:Meta ."));
        let inv = extract_inventory(&t, OntologyId::Brick);
        assert_eq!(inv.get("http://x/ns#A").unwrap().kind, TermKind::Class);
    }

    #[test]
    fn labels_on_untyped_subjects_are_ignored() {
        let t = triples(&format!("{PREFIXES}ex:Loose rdfs:label \"loose\" ."));
        assert!(extract_inventory(&t, OntologyId::Brick).is_empty());
    }

    #[test]
    fn flat_file_records() {
        let text = "# comment\nex:A\tClass\tAlpha|A thing\nex:b\tObjectProperty\t\nex:c\tDataProperty\n";
        let inv = parse_inventory_text(text, OntologyId::EfOnt, "t.tsv").unwrap();
        assert_eq!(inv.len(), 3);
        assert!(inv.get("ex:A").unwrap().labels.contains("Alpha"));
        assert!(inv.get("ex:A").unwrap().labels.contains("A"));
    }

    #[test]
    fn flat_file_duplicate() {
        let err = parse_inventory_text("ex:A\tClass\nex:A\tClass\n", OntologyId::EfOnt, "t.tsv").unwrap_err();
        match err {
            InventoryError::DuplicateIri { iri, line, .. } => {
                assert_eq!(iri, "ex:A");
                assert_eq!(line, 2);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn flat_file_bad_kind_has_line() {
        let err = parse_inventory_text("\nex:A\tWidget\n", OntologyId::EfOnt, "t.tsv").unwrap_err();
        assert!(matches!(err, InventoryError::Parse { line: 2, .. }));
    }

    #[test]
    fn merge_identity_and_conflict() {
        let mut a = OntologyInventory::empty(OntologyId::Delta);
        a.insert(Term::new("x:A", TermKind::Class));
        let empty = OntologyInventory::empty(OntologyId::Custom("openadr".into()));
        assert_eq!(merge_inventories(&a, &empty).unwrap(), a);

        let mut b = OntologyInventory::empty(OntologyId::Delta);
        b.insert(Term::new("x:A", TermKind::ObjectProperty));
        let err = merge_inventories(&a, &b).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].iri, "x:A");
    }

    #[test]
    fn merge_unknown_yields() {
        let mut a = OntologyInventory::empty(OntologyId::Delta);
        a.insert(Term::new("x:A", TermKind::Unknown).with_label("alpha"));
        let mut b = OntologyInventory::empty(OntologyId::Delta);
        b.insert(Term::new("x:A", TermKind::Class).with_label("beta"));
        let m = merge_inventories(&a, &b).unwrap();
        let t = m.get("x:A").unwrap();
        assert_eq!(t.kind, TermKind::Class);
        assert_eq!(t.labels.len(), 3);
    }

    #[test]
    fn local_names() {
        assert_eq!(local_name("http://x/a#B"), "B");
        assert_eq!(local_name("http://x/a/B"), "B");
        assert_eq!(local_name("ex:B"), "B");
        assert_eq!(local_name("urn:flexcover:ext#hasInterval"), "hasInterval");
    }
}
