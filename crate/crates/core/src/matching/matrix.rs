use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{LabelIndex, Provenance, SatisfactionRecord, SynonymTable};
use crate::catalog::{Catalog, IRClass};
use crate::inventory::{OntologyId, OntologyInventory};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub satisfied: bool,
    pub note: Option<String>,
}

/// Manual per-cell judgments plus per-class denominator overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdjudicationOverlay {
    pub version: String,
    pub pins: BTreeMap<(String, OntologyId), Pin>,
    pub denominator_overrides: BTreeMap<IRClass, u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OverlayFile {
    #[serde(default)]
    version: String,
    #[serde(default)]
    pins: Vec<PinRecord>,
    #[serde(default)]
    denominator_overrides: BTreeMap<IRClass, u32>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct PinRecord {
    ir_id: String,
    ontology_id: OntologyId,
    satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Debug, Error)]
pub enum OverlayError {
    #[error("cannot read overlay {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("overlay parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("pin ({ir_id}, {ontology_id}) appears more than once")]
    DuplicatePin { ir_id: String, ontology_id: OntologyId },
    #[error("denominator override for {0:?} must be positive")]
    ZeroOverride(IRClass),
}

impl AdjudicationOverlay {
    pub fn from_json(text: &str) -> Result<Self, OverlayError> {
        let file: OverlayFile = serde_json::from_str(text).map_err(|e| OverlayError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut pins = BTreeMap::new();
        for p in file.pins {
            let key = (p.ir_id, p.ontology_id);
            if pins.contains_key(&key) {
                return Err(OverlayError::DuplicatePin { ir_id: key.0, ontology_id: key.1 });
            }
            pins.insert(key, Pin { satisfied: p.satisfied, note: p.note });
        }
        if let Some((class, _)) = file.denominator_overrides.iter().find(|(_, n)| **n == 0) {
            return Err(OverlayError::ZeroOverride(*class));
        }
        Ok(AdjudicationOverlay { version: file.version, pins, denominator_overrides: file.denominator_overrides })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OverlayError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| OverlayError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn pin(&mut self, ir_id: &str, ontology: OntologyId, satisfied: bool) {
        self.pins.insert((ir_id.to_string(), ontology), Pin { satisfied, note: None });
    }

    pub fn get(&self, ir_id: &str, ontology: &OntologyId) -> Option<&Pin> {
        self.pins.get(&(ir_id.to_string(), ontology.clone()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("overlay pins unknown IR `{0}`")]
    UnknownIr(String),
    #[error("overlay pins ontology `{0}`, which has no loaded inventory")]
    UnknownOntology(OntologyId),
    #[error("two inventories share the ontology id `{0}`")]
    DuplicateOntology(OntologyId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionMatrix {
    /// IR ids and classes in catalog order.
    pub irs: Vec<(String, IRClass)>,
    /// Ontology columns in load order.
    pub ontologies: Vec<OntologyId>,
    pub records: BTreeMap<(String, OntologyId), SatisfactionRecord>,
    pub overlay_applied: bool,
}

impl SatisfactionMatrix {
    pub fn get(&self, ir_id: &str, ontology: &OntologyId) -> Option<&SatisfactionRecord> {
        self.records.get(&(ir_id.to_string(), ontology.clone()))
    }

    pub fn satisfied(&self, ir_id: &str, ontology: &OntologyId) -> Option<bool> {
        self.get(ir_id, ontology).map(|r| r.satisfied)
    }

    pub fn is_complete(&self) -> bool {
        self.irs.len() * self.ontologies.len() == self.records.len()
            && self
                .irs
                .iter()
                .all(|(ir, _)| self.ontologies.iter().all(|o| self.get(ir, o).is_some()))
    }

    /// Satisfied under at least one of the listed ontologies.
    pub fn satisfied_any(&self, ir_id: &str, ontologies: &[OntologyId]) -> bool {
        ontologies.iter().any(|o| self.satisfied(ir_id, o) == Some(true))
    }
}

pub fn build_matrix(
    catalog: &Catalog,
    inventories: &[OntologyInventory],
    syn: &SynonymTable,
    overlay: Option<&AdjudicationOverlay>,
) -> Result<SatisfactionMatrix, MatrixError> {
    let mut ontologies: Vec<OntologyId> = Vec::new();
    for inv in inventories {
        if ontologies.contains(&inv.ontology_id) {
            return Err(MatrixError::DuplicateOntology(inv.ontology_id.clone()));
        }
        ontologies.push(inv.ontology_id.clone());
    }
    if let Some(ov) = overlay {
        for (ir_id, ont) in ov.pins.keys() {
            if catalog.get(ir_id).is_none() {
                return Err(MatrixError::UnknownIr(ir_id.clone()));
            }
            if !ontologies.contains(ont) {
                return Err(MatrixError::UnknownOntology(ont.clone()));
            }
        }
    }

    let indexes: Vec<LabelIndex> = inventories.iter().map(LabelIndex::new).collect();
    let mut records = BTreeMap::new();
    for ir in &catalog.irs {
        for index in &indexes {
            let inv = index.inventory();
            let mut rec = index.evaluate_ir(ir, syn);
            if let Some(pin) = overlay.and_then(|ov| ov.get(&ir.id, &inv.ontology_id)) {
                rec.satisfied = pin.satisfied;
                rec.provenance = Provenance::Adjudicated;
                rec.note = pin.note.clone();
            }
            records.insert((ir.id.clone(), inv.ontology_id.clone()), rec);
        }
    }
    Ok(SatisfactionMatrix {
        irs: catalog.irs.iter().map(|ir| (ir.id.clone(), ir.ir_class)).collect(),
        ontologies,
        records,
        overlay_applied: overlay.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologyAgreement {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_negative: usize,
    pub precision: f64,
    pub recall: f64,
    /// Set when there were no auto positives; precision is then 1.0 by convention.
    pub precision_undefined: bool,
    /// Set when there were no pinned positives; recall is then 1.0 by convention.
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub ir_id: String,
    pub ontology_id: OntologyId,
    pub auto: bool,
    pub pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub per_ontology: BTreeMap<OntologyId, OntologyAgreement>,
    pub disagreements: Vec<Disagreement>,
    /// Matrix cells with no pin; left out of the comparison.
    pub unpinned: usize,
}

/// Scores the matcher's own decisions against the overlay's pins.
pub fn compare_auto_vs_overlay(matrix: &SatisfactionMatrix, overlay: &AdjudicationOverlay) -> AgreementReport {
    let mut counts: BTreeMap<OntologyId, [usize; 4]> =
        matrix.ontologies.iter().map(|o| (o.clone(), [0; 4])).collect();
    let mut disagreements = Vec::new();
    let mut unpinned = 0;
    for ((ir_id, ont), rec) in &matrix.records {
        let Some(pin) = overlay.get(ir_id, ont) else {
            unpinned += 1;
            continue;
        };
        let slot = match (rec.auto_satisfied, pin.satisfied) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts.entry(ont.clone()).or_insert([0; 4])[slot] += 1;
        if rec.auto_satisfied != pin.satisfied {
            disagreements.push(Disagreement {
                ir_id: ir_id.clone(),
                ontology_id: ont.clone(),
                auto: rec.auto_satisfied,
                pinned: pin.satisfied,
            });
        }
    }
    let per_ontology = counts
        .into_iter()
        .map(|(ont, [tp, fp, fn_, tn])| {
            let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
            let agreement = OntologyAgreement {
                true_positive: tp,
                false_positive: fp,
                false_negative: fn_,
                true_negative: tn,
                precision: ratio(tp, tp + fp),
                recall: ratio(tp, tp + fn_),
                precision_undefined: tp + fp == 0,
                recall_undefined: tp + fn_ == 0,
            };
            (ont, agreement)
        })
        .collect();
    AgreementReport { per_ontology, disagreements, unpinned }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inventory::{Term, TermKind};

    fn small_catalog() -> Catalog {
        Catalog::from_json(
            r#"{"version":"t","works":[{"id":"w","citation":"W"}],"irs":[
            {"id":"a","name":"A","ir_class":"TimeBasedParameters","stages":["DeploymentRealtimeComms"],
             "components":[{"phrase":"timestamp"}],"sources":["w"]},
            {"id":"b","name":"B","ir_class":"TimeBasedParameters","stages":["DeploymentRealtimeComms"],
             "components":[{"phrase":"clock"}],"sources":["w"]}]}"#,
        )
        .unwrap()
    }

    fn inv(id: OntologyId, iris: &[&str]) -> OntologyInventory {
        let mut inv = OntologyInventory::empty(id);
        for i in iris {
            inv.insert(Term::new(*i, TermKind::Class));
        }
        inv
    }

    #[test]
    fn overlay_pins_one_record() {
        let c = small_catalog();
        let invs = [inv(OntologyId::Brick, &["x:Timestamp"]), inv(OntologyId::Delta, &[])];
        let mut ov = AdjudicationOverlay::default();
        ov.pin("b", OntologyId::Delta, true);
        let m = build_matrix(&c, &invs, &SynonymTable::new(), Some(&ov)).unwrap();
        assert!(m.is_complete());
        let adjudicated = m.records.values().filter(|r| r.provenance == Provenance::Adjudicated).count();
        assert_eq!(adjudicated, 1);
        assert_eq!(m.satisfied("b", &OntologyId::Delta), Some(true));
        assert_eq!(m.satisfied("a", &OntologyId::Brick), Some(true));
    }

    #[test]
    fn overlay_unknown_references() {
        let c = small_catalog();
        let invs = [inv(OntologyId::Brick, &[])];
        let mut ov = AdjudicationOverlay::default();
        ov.pin("zzz", OntologyId::Brick, true);
        assert_eq!(build_matrix(&c, &invs, &SynonymTable::new(), Some(&ov)), Err(MatrixError::UnknownIr("zzz".into())));
        let mut ov = AdjudicationOverlay::default();
        ov.pin("a", OntologyId::EfOnt, true);
        assert_eq!(
            build_matrix(&c, &invs, &SynonymTable::new(), Some(&ov)),
            Err(MatrixError::UnknownOntology(OntologyId::EfOnt))
        );
    }

    #[test]
    fn agreement_conventions() {
        let c = small_catalog();
        let invs = [inv(OntologyId::Brick, &[])];
        let m = build_matrix(&c, &invs, &SynonymTable::new(), None).unwrap();
        let mut ov = AdjudicationOverlay::default();
        ov.pin("a", OntologyId::Brick, true);
        let rep = compare_auto_vs_overlay(&m, &ov);
        let b = &rep.per_ontology[&OntologyId::Brick];
        assert_eq!(b.recall, 0.0);
        assert_eq!(b.precision, 1.0);
        assert!(b.precision_undefined);
        assert_eq!(rep.unpinned, 1);
        assert_eq!(rep.disagreements.len(), 1);
    }

    #[test]
    fn overlay_json_shape() {
        let ov = AdjudicationOverlay::from_json(
            r#"{"version":"1","pins":[{"ir_id":"a","ontology_id":"DELTA","satisfied":true,"note":"n"}],
                "denominator_overrides":{"EnvironmentalFactorsForecasts":8}}"#,
        )
        .unwrap();
        assert!(ov.get("a", &OntologyId::Delta).unwrap().satisfied);
        assert_eq!(ov.denominator_overrides[&IRClass::EnvironmentalFactorsForecasts], 8);
        let dup = r#"{"pins":[{"ir_id":"a","ontology_id":"Brick","satisfied":true},{"ir_id":"a","ontology_id":"brick","satisfied":false}]}"#;
        assert!(matches!(AdjudicationOverlay::from_json(dup), Err(OverlayError::DuplicatePin { .. })));
    }
}
