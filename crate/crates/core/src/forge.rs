//! Proposed ontology extensions for unsatisfied requirements, the program
//! requirement skeleton, and closure checks over the extended inventories.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, IRClass};
use crate::coverage::{full_report, CoverageError, CoverageReport, DenominatorOverrides};
use crate::inventory::turtle::escape_literal;
use crate::inventory::{local_name, merge_inventories, MergeError, OntologyId, OntologyInventory, Term, TermKind};
use crate::matching::{build_matrix, AdjudicationOverlay, MatrixError, SatisfactionMatrix, SynonymTable};

pub const EXT_NS: &str = "urn:flexcover:ext#";
pub const ISO_NS: &str = "urn:flexcover:iso#";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposedTerm {
    pub iri: String,
    pub kind: TermKind,
    pub label: String,
    /// Superclass for classes, domain for properties.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionProposal {
    pub new_terms: Vec<ProposedTerm>,
    pub target_ir_ids: BTreeSet<String>,
    pub source_rule: String,
    pub integration_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionSet {
    pub proposals: Vec<ExtensionProposal>,
    pub base_ontology: OntologyId,
}

impl ExtensionSet {
    pub fn empty(base_ontology: OntologyId) -> Self {
        ExtensionSet { proposals: Vec::new(), base_ontology }
    }

    pub fn terms(&self) -> impl Iterator<Item = &ProposedTerm> {
        self.proposals.iter().flat_map(|p| p.new_terms.iter())
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    /// The proposed terms as an inventory under the base ontology id.
    pub fn to_inventory(&self) -> OntologyInventory {
        let mut inv = OntologyInventory::empty(self.base_ontology.clone());
        for t in self.terms() {
            inv.insert(Term::new(t.iri.as_str(), t.kind).with_label(t.label.as_str()));
        }
        inv
    }

    /// The same set without proposal `index`.
    pub fn without(&self, index: usize) -> ExtensionSet {
        let mut out = self.clone();
        out.proposals.remove(index);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ExtensionRule {
    pub source_rule: String,
    pub targets: Vec<String>,
    pub integration_note: String,
    pub terms: Vec<ProposedTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct IsoProperty {
    pub iri: String,
    pub label: String,
    /// Catalog requirement the property represents.
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct IsoGroup {
    pub iri: String,
    pub label: String,
    pub properties: Vec<IsoProperty>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct IsoProgram {
    pub namespace: String,
    pub integration_note: String,
    pub groups: Vec<IsoGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RuleTable {
    pub version: String,
    pub namespace: String,
    pub base_ontology: OntologyId,
    pub rules: Vec<ExtensionRule>,
    pub iso_program: IsoProgram,
}

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("cannot read rule table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("rule table parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("iri `{0}` is defined by more than one rule")]
    DuplicateIri(String),
    #[error("rule `{0}` has no targets or no terms")]
    EmptyRule(String),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

impl RuleTable {
    pub fn builtin() -> RuleTable {
        RuleTable::from_json(crate::fixtures::EXTENSION_RULES_JSON).expect("embedded rule table is well-formed")
    }

    pub fn from_json(text: &str) -> Result<RuleTable, ForgeError> {
        let table: RuleTable = serde_json::from_str(text).map_err(|e| ForgeError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut seen = BTreeSet::new();
        for rule in &table.rules {
            if rule.targets.is_empty() || rule.terms.is_empty() {
                return Err(ForgeError::EmptyRule(rule.source_rule.clone()));
            }
            for t in &rule.terms {
                if !seen.insert(t.iri.as_str()) {
                    return Err(ForgeError::DuplicateIri(t.iri.clone()));
                }
            }
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RuleTable, ForgeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ForgeError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Target ids not present in `catalog`.
    pub fn unknown_targets(&self, catalog: &Catalog) -> Vec<String> {
        self.rules
            .iter()
            .flat_map(|r| r.targets.iter())
            .filter(|id| catalog.get(id).is_none())
            .cloned()
            .collect()
    }
}

/// One proposal per rule with at least one target that no loaded ontology
/// satisfies; the proposal's targets are exactly those unsatisfied ones.
pub fn generate_extensions_with(m: &SatisfactionMatrix, catalog: &Catalog, rules: &RuleTable) -> ExtensionSet {
    let mut proposals = Vec::new();
    for rule in &rules.rules {
        let open: BTreeSet<String> = rule
            .targets
            .iter()
            .filter(|id| catalog.get(id).is_some() && !m.satisfied_any(id, &m.ontologies))
            .cloned()
            .collect();
        if open.is_empty() {
            continue;
        }
        proposals.push(ExtensionProposal {
            new_terms: rule.terms.clone(),
            target_ir_ids: open,
            source_rule: rule.source_rule.clone(),
            integration_note: rule.integration_note.clone(),
        });
    }
    ExtensionSet { proposals, base_ontology: rules.base_ontology.clone() }
}

pub fn generate_extensions(m: &SatisfactionMatrix, catalog: &Catalog) -> ExtensionSet {
    generate_extensions_with(m, catalog, &RuleTable::builtin())
}

pub fn generate_iso_program_ontology_with(rules: &RuleTable) -> ExtensionSet {
    let iso = &rules.iso_program;
    let proposals = iso
        .groups
        .iter()
        .map(|g| {
            let mut new_terms = vec![ProposedTerm {
                iri: g.iri.clone(),
                kind: TermKind::Class,
                label: g.label.clone(),
                parent: None,
            }];
            new_terms.extend(g.properties.iter().map(|p| ProposedTerm {
                iri: p.iri.clone(),
                kind: TermKind::DataProperty,
                label: p.label.clone(),
                parent: Some(g.iri.clone()),
            }));
            ExtensionProposal {
                target_ir_ids: g.properties.iter().map(|p| p.target.clone()).collect(),
                new_terms,
                source_rule: format!("program-requirements/{}", local_name(&g.iri)),
                integration_note: iso.integration_note.clone(),
            }
        })
        .collect();
    ExtensionSet { proposals, base_ontology: OntologyId::Custom("ISO".into()) }
}

/// Skeleton of a program-requirement ontology: one class per requirement
/// group and one property per enrollment requirement.
pub fn generate_iso_program_ontology() -> ExtensionSet {
    generate_iso_program_ontology_with(&RuleTable::builtin())
}

fn kind_type(kind: TermKind) -> &'static str {
    match kind {
        TermKind::Class | TermKind::Unknown => "owl:Class",
        TermKind::ObjectProperty => "owl:ObjectProperty",
        TermKind::DataProperty => "owl:DatatypeProperty",
        TermKind::Individual => "owl:NamedIndividual",
    }
}

fn iri_text(iri: &str) -> String {
    for (prefix, ns) in [("ext", EXT_NS), ("iso", ISO_NS)] {
        if let Some(local) = iri.strip_prefix(ns) {
            if !local.is_empty() && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return format!("{prefix}:{local}");
            }
        }
    }
    format!("<{iri}>")
}

/// Turtle text for the set, terms ordered by iri.
pub fn emit_ontology_text(e: &ExtensionSet) -> String {
    let mut out = String::new();
    out.push_str("@prefix owl: <http://www.w3.org/2002/07/owl#> .\n");
    out.push_str("@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n");
    out.push_str(&format!("@prefix ext: <{EXT_NS}> .\n"));
    out.push_str(&format!("@prefix iso: <{ISO_NS}> .\n"));
    let terms: BTreeMap<&str, &ProposedTerm> = e.terms().map(|t| (t.iri.as_str(), t)).collect();
    for t in terms.values() {
        out.push('\n');
        out.push_str(&format!("{} a {} ;\n", iri_text(&t.iri), kind_type(t.kind)));
        match (&t.parent, t.kind) {
            (Some(parent), TermKind::Class) => {
                out.push_str(&format!("    rdfs:subClassOf {} ;\n", iri_text(parent)));
            }
            (Some(parent), TermKind::ObjectProperty | TermKind::DataProperty) => {
                out.push_str(&format!("    rdfs:domain {} ;\n", iri_text(parent)));
            }
            _ => {}
        }
        out.push_str(&format!("    rdfs:label \"{}\" .\n", escape_literal(&t.label)));
    }
    out
}

/// Base inventories with every extension set merged into its base ontology,
/// or appended as a new column when that ontology is not loaded.
pub fn extend_inventories(
    base: &[OntologyInventory],
    sets: &[ExtensionSet],
) -> Result<Vec<OntologyInventory>, ForgeError> {
    let mut out = base.to_vec();
    for set in sets {
        let ext = set.to_inventory();
        match out.iter_mut().find(|inv| inv.ontology_id == set.base_ontology) {
            Some(inv) => *inv = merge_inventories(inv, &ext)?,
            None => out.push(ext),
        }
    }
    Ok(out)
}

/// Satisfaction after extension: a cell keeps its adjudicated value and
/// becomes satisfied when the extension newly lets the matcher satisfy it.
pub fn closure_matrix(
    base: &[OntologyInventory],
    sets: &[ExtensionSet],
    catalog: &Catalog,
    syn: &SynonymTable,
    overlay: Option<&AdjudicationOverlay>,
) -> Result<SatisfactionMatrix, ForgeError> {
    BaseState::new(base, catalog, syn, overlay)?.close(sets)
}

/// Base matrices shared by every closure over the same inputs.
struct BaseState<'a> {
    base: &'a [OntologyInventory],
    catalog: &'a Catalog,
    syn: &'a SynonymTable,
    overlay_applied: bool,
    auto: SatisfactionMatrix,
    pinned: SatisfactionMatrix,
}

impl<'a> BaseState<'a> {
    fn new(
        base: &'a [OntologyInventory],
        catalog: &'a Catalog,
        syn: &'a SynonymTable,
        overlay: Option<&AdjudicationOverlay>,
    ) -> Result<Self, ForgeError> {
        let auto = build_matrix(catalog, base, syn, None)?;
        let pinned = match overlay {
            Some(_) => build_matrix(catalog, base, syn, overlay)?,
            None => auto.clone(),
        };
        Ok(BaseState { base, catalog, syn, overlay_applied: overlay.is_some(), auto, pinned })
    }

    fn close(&self, sets: &[ExtensionSet]) -> Result<SatisfactionMatrix, ForgeError> {
        let extended = extend_inventories(self.base, sets)?;
        let mut out = build_matrix(self.catalog, &extended, self.syn, None)?;
        for ((ir_id, ont), rec) in out.records.iter_mut() {
            let before = self.pinned.satisfied(ir_id, ont).unwrap_or(false);
            let auto_before = self.auto.satisfied(ir_id, ont).unwrap_or(false);
            let gained = rec.auto_satisfied && !auto_before;
            if let Some(prev) = self.pinned.get(ir_id, ont) {
                rec.provenance = prev.provenance;
                rec.note = prev.note.clone();
            }
            rec.satisfied = before || gained;
        }
        out.overlay_applied = self.overlay_applied;
        Ok(out)
    }
}

/// Post-extension coverage. Denominator overrides are not applied: they
/// describe the reference evaluation, and closure can exceed them.
pub fn verify_closure(
    base: &[OntologyInventory],
    sets: &[ExtensionSet],
    catalog: &Catalog,
    syn: &SynonymTable,
    overlay: Option<&AdjudicationOverlay>,
) -> Result<CoverageReport, ForgeError> {
    let m = closure_matrix(base, sets, catalog, syn, overlay)?;
    Ok(full_report(&m, catalog, &DenominatorOverrides::new())?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityEntry {
    pub source_rule: String,
    /// Requirements satisfied with the full set but not without this proposal.
    pub lost_without: Vec<String>,
}

impl MinimalityEntry {
    pub fn load_bearing(&self) -> bool {
        !self.lost_without.is_empty()
    }
}

fn combined_satisfied(m: &SatisfactionMatrix) -> BTreeSet<String> {
    m.irs.iter().filter(|(id, _)| m.satisfied_any(id, &m.ontologies)).map(|(id, _)| id.clone()).collect()
}

/// For each proposal of `set`, which requirements drop out of the combined
/// coverage when only that proposal is removed. `extra` sets stay applied.
pub fn minimality_report(
    base: &[OntologyInventory],
    set: &ExtensionSet,
    extra: &[ExtensionSet],
    catalog: &Catalog,
    syn: &SynonymTable,
    overlay: Option<&AdjudicationOverlay>,
) -> Result<Vec<MinimalityEntry>, ForgeError> {
    let with = |s: ExtensionSet| -> Vec<ExtensionSet> {
        let mut v = vec![s];
        v.extend(extra.iter().cloned());
        v
    };
    let state = BaseState::new(base, catalog, syn, overlay)?;
    let full = combined_satisfied(&state.close(&with(set.clone()))?);
    let mut out = Vec::new();
    for (i, p) in set.proposals.iter().enumerate() {
        let reduced = combined_satisfied(&state.close(&with(set.without(i)))?);
        out.push(MinimalityEntry {
            source_rule: p.source_rule.clone(),
            lost_without: full.difference(&reduced).cloned().collect(),
        });
    }
    Ok(out)
}

/// Classes whose combined coverage is below 100% in `report`.
pub fn open_classes(report: &CoverageReport) -> Vec<IRClass> {
    IRClass::ALL
        .into_iter()
        .filter(|c| report.percent(*c, &crate::coverage::ColumnId::Combined) != Some(100))
        .collect()
}
