//! The satisfaction function: does an inventory contain every component of
//! an IR's component set?

mod matrix;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{ConceptDescriptor, InformationalRequirement, KindHint};
use crate::inventory::{OntologyId, OntologyInventory, Term, TermKind};

pub use matrix::{
    build_matrix, compare_auto_vs_overlay, AdjudicationOverlay, AgreementReport, Disagreement, MatrixError,
    OntologyAgreement, OverlayError, Pin, SatisfactionMatrix,
};

/// Case-folded tokens. Splits on every non-alphanumeric character and on
/// lower-to-upper camelCase boundaries.
pub fn normalize(phrase: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for c in phrase.chars() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            prev_lower = false;
            continue;
        }
        if c.is_uppercase() && prev_lower && !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        prev_lower = c.is_lowercase() || c.is_ascii_digit();
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Normalized tokens joined by single spaces; the comparison key for phrases.
pub fn phrase_key(phrase: &str) -> String {
    normalize(phrase).join(" ")
}

#[derive(Debug, Error)]
pub enum SynonymError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Symmetric, non-transitive phrase equivalences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `a ~ b` in both directions. Phrases that normalize to nothing
    /// are ignored.
    pub fn add(&mut self, a: &str, b: &str) {
        let (ka, kb) = (phrase_key(a), phrase_key(b));
        if ka.is_empty() || kb.is_empty() || ka == kb {
            return;
        }
        self.entries.entry(ka.clone()).or_default().insert(kb.clone());
        self.entries.entry(kb).or_default().insert(ka);
    }

    pub fn equivalents(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(key)
    }

    pub fn are_synonyms(&self, key_a: &str, key_b: &str) -> bool {
        self.entries.get(key_a).map_or(false, |s| s.contains(key_b))
    }

    pub fn entries(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One `phrase<TAB>phrase` pair per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, SynonymError> {
        let mut table = SynonymTable::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [a, b] = parts[..] else {
                return Err(SynonymError::Parse {
                    line,
                    message: format!("expected two tab-separated phrases, found {}", parts.len()),
                });
            };
            if normalize(a).is_empty() || normalize(b).is_empty() {
                return Err(SynonymError::Parse { line, message: "empty phrase".into() });
            }
            table.add(a, b);
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SynonymError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| SynonymError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MatchRule {
    Direct,
    Synonym,
    /// Every descriptor of a multi-component set matched.
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchEvidence {
    pub descriptor: ConceptDescriptor,
    pub matched_iri: String,
    pub rule: MatchRule,
    pub matched_label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Auto,
    Adjudicated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SatisfactionRecord {
    pub ir_id: String,
    pub ontology_id: OntologyId,
    pub satisfied: bool,
    /// What the matcher decided, before any overlay pin.
    pub auto_satisfied: bool,
    pub satisfied_by: Option<MatchRule>,
    pub evidence: Vec<MatchEvidence>,
    pub provenance: Provenance,
    pub note: Option<String>,
}

fn kind_allowed(hint: KindHint, kind: TermKind) -> bool {
    match hint {
        KindHint::Any => true,
        KindHint::Class => kind == TermKind::Class,
        KindHint::ObjectProperty => kind == TermKind::ObjectProperty,
        KindHint::DataProperty => kind == TermKind::DataProperty,
    }
}

/// Normalized label keys of every term, computed once per inventory.
pub struct LabelIndex<'a> {
    inv: &'a OntologyInventory,
    keys: Vec<(&'a Term, Vec<(String, &'a String)>)>,
}

impl<'a> LabelIndex<'a> {
    pub fn new(inv: &'a OntologyInventory) -> Self {
        let keys = inv
            .terms
            .values()
            .map(|t| (t, t.labels.iter().map(|l| (phrase_key(l), l)).collect()))
            .collect();
        LabelIndex { inv, keys }
    }

    pub fn inventory(&self) -> &'a OntologyInventory {
        self.inv
    }

    pub fn match_descriptor(&self, d: &ConceptDescriptor, syn: &SynonymTable) -> Vec<MatchEvidence> {
        let key = phrase_key(&d.phrase);
        if key.is_empty() {
            return Vec::new();
        }
        let synonyms = syn.equivalents(&key);
        let mut out = Vec::new();
        for (term, labels) in self.keys.iter().filter(|(t, _)| kind_allowed(d.kind_hint, t.kind)) {
            let mut best: Option<(MatchRule, &String)> = None;
            for (lk, label) in labels {
                let rule = if *lk == key {
                    MatchRule::Direct
                } else if synonyms.map_or(false, |s| s.contains(lk)) {
                    MatchRule::Synonym
                } else {
                    continue;
                };
                if best.map_or(true, |(r, _)| rule < r) {
                    best = Some((rule, label));
                }
            }
            if let Some((rule, label)) = best {
                out.push(MatchEvidence {
                    descriptor: d.clone(),
                    matched_iri: term.iri.clone(),
                    rule,
                    matched_label: label.clone(),
                });
            }
        }
        out.sort_by(|a, b| (a.rule, &a.matched_iri).cmp(&(b.rule, &b.matched_iri)));
        out
    }

    pub fn evaluate_ir(&self, ir: &InformationalRequirement, syn: &SynonymTable) -> SatisfactionRecord {
        let mut evidence = Vec::new();
        let mut satisfied = !ir.components.is_empty();
        let mut single_rule = None;
        for d in &ir.components {
            let found = self.match_descriptor(d, syn);
            if found.is_empty() {
                satisfied = false;
            }
            single_rule = found.first().map(|e| e.rule);
            evidence.extend(found);
        }
        let satisfied_by = match (satisfied, ir.components.len()) {
            (false, _) => None,
            (true, 1) => single_rule,
            (true, _) => Some(MatchRule::Composite),
        };
        SatisfactionRecord {
            ir_id: ir.id.clone(),
            ontology_id: self.inv.ontology_id.clone(),
            satisfied,
            auto_satisfied: satisfied,
            satisfied_by,
            evidence,
            provenance: Provenance::Auto,
            note: None,
        }
    }
}

/// All terms matching one descriptor, at most one evidence per term
/// (Direct preferred), ordered by rule then iri.
pub fn match_descriptor(d: &ConceptDescriptor, inv: &OntologyInventory, syn: &SynonymTable) -> Vec<MatchEvidence> {
    LabelIndex::new(inv).match_descriptor(d, syn)
}

pub fn evaluate_ir(ir: &InformationalRequirement, inv: &OntologyInventory, syn: &SynonymTable) -> SatisfactionRecord {
    LabelIndex::new(inv).evaluate_ir(ir, syn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::IRClass;
    use crate::inventory::Term;

    fn inv(terms: &[(&str, TermKind, &[&str])]) -> OntologyInventory {
        let mut inv = OntologyInventory::empty(OntologyId::Brick);
        for (iri, kind, labels) in terms {
            let mut t = Term::new(*iri, *kind);
            t.labels.extend(labels.iter().map(|l| l.to_string()));
            inv.insert(t);
        }
        inv
    }

    fn ir(components: Vec<ConceptDescriptor>) -> InformationalRequirement {
        InformationalRequirement {
            id: "x".into(),
            name: "X".into(),
            ir_class: IRClass::EvChargingInfrastructure,
            stages: [crate::catalog::Stage::DeploymentRealtimeComms].into(),
            components,
            sources: ["w".to_string()].into(),
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Zone_Air_Temperature_Setpoint"), ["zone", "air", "temperature", "setpoint"]);
        assert_eq!(normalize("hasSamplingRate"), ["has", "sampling", "rate"]);
        assert_eq!(normalize("VAV damper positions"), ["vav", "damper", "positions"]);
        assert_eq!(normalize("  --__ "), Vec::<String>::new());
        assert_eq!(normalize("HVAC_System"), ["hvac", "system"]);
        assert_eq!(normalize("co2Sensor"), ["co2", "sensor"]);
    }

    #[test]
    fn power_meter_synonym() {
        let mut syn = SynonymTable::new();
        syn.add("power meter", "electricity meter");
        let i = inv(&[("b:Electricity_Meter", TermKind::Class, &[])]);
        let ev = match_descriptor(&ConceptDescriptor::new("Power Meter"), &i, &syn);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].rule, MatchRule::Synonym);
        assert_eq!(ev[0].matched_iri, "b:Electricity_Meter");
    }

    #[test]
    fn direct_beats_synonym_and_sorting() {
        let mut syn = SynonymTable::new();
        syn.add("meter", "electricity meter");
        let i = inv(&[
            ("b:Z", TermKind::Class, &["meter"]),
            ("b:A", TermKind::Class, &["Electricity meter"]),
            ("b:M", TermKind::Class, &["Electricity meter"]),
        ]);
        let ev = match_descriptor(&ConceptDescriptor::new("Meter"), &i, &syn);
        let got: Vec<_> = ev.iter().map(|e| (e.rule, e.matched_iri.as_str())).collect();
        assert_eq!(got, [(MatchRule::Direct, "b:Z"), (MatchRule::Synonym, "b:A"), (MatchRule::Synonym, "b:M")]);
    }

    #[test]
    fn kind_hint_filters() {
        let i = inv(&[("b:Meter", TermKind::ObjectProperty, &[])]);
        let syn = SynonymTable::new();
        assert!(match_descriptor(&ConceptDescriptor::with_hint("meter", KindHint::Class), &i, &syn).is_empty());
        assert_eq!(match_descriptor(&ConceptDescriptor::new("meter"), &i, &syn).len(), 1);
    }

    #[test]
    fn synonyms_are_not_transitive() {
        let mut syn = SynonymTable::new();
        syn.add("a", "b");
        syn.add("b", "c");
        assert!(syn.are_synonyms("a", "b") && syn.are_synonyms("b", "a"));
        assert!(!syn.are_synonyms("a", "c"));
        assert_eq!(syn.len(), 2);
    }

    #[test]
    fn synonym_file_errors_carry_line() {
        let err = SynonymTable::parse("# c\na\tb\nonly-one\n").unwrap_err();
        assert!(matches!(err, SynonymError::Parse { line: 3, .. }));
    }

    #[test]
    fn composite_and_empty() {
        let syn = SynonymTable::new();
        let i = inv(&[("e:ElectricVehicle", TermKind::Class, &[]), ("e:GenericLoadProfile", TermKind::Class, &[])]);
        let target = ir(vec![
            ConceptDescriptor::with_hint("electric vehicle", KindHint::Class),
            ConceptDescriptor::new("generic load profile"),
        ]);
        let rec = evaluate_ir(&target, &i, &syn);
        assert!(rec.satisfied);
        assert_eq!(rec.satisfied_by, Some(MatchRule::Composite));
        assert_eq!(rec.evidence.len(), 2);

        let empty = OntologyInventory::empty(OntologyId::Brick);
        assert!(!evaluate_ir(&target, &empty, &syn).satisfied);
    }
}
