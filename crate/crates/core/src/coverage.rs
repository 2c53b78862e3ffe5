//! Per-class coverage percentages and the rendered coverage grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::catalog::{Catalog, IRClass, Stage};
use crate::inventory::OntologyId;
use crate::matching::SatisfactionMatrix;

pub type DenominatorOverrides = BTreeMap<IRClass, u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColumnId {
    Ontology(OntologyId),
    Combined,
}

impl fmt::Display for ColumnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnId::Ontology(o) => o.fmt(f),
            ColumnId::Combined => f.write_str("Combined"),
        }
    }
}

impl Serialize for ColumnId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageCell {
    pub ir_class: IRClass,
    pub ontology: ColumnId,
    pub satisfied_count: u32,
    pub denominator: u32,
    pub percentage: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverageError {
    #[error("denominator override {denominator} for {class:?} is below its satisfied count {satisfied}")]
    OverrideTooSmall { class: IRClass, denominator: u32, satisfied: u32 },
    #[error("{0:?} has no requirements and no denominator override")]
    EmptyClass(IRClass),
    #[error("combined coverage needs at least one ontology")]
    EmptyOntologyList,
    #[error("matrix has no column for ontology `{0}`")]
    MissingOntology(OntologyId),
}

/// `100 * satisfied / denominator`, rounded half away from zero, in integers.
pub fn percentage(satisfied: u32, denominator: u32) -> u8 {
    assert!(denominator > 0 && satisfied <= denominator);
    let (s, d) = (u64::from(satisfied), u64::from(denominator));
    ((200 * s + d) / (2 * d)) as u8
}

fn aggregate(
    m: &SatisfactionMatrix,
    class: IRClass,
    column: ColumnId,
    ontologies: &[OntologyId],
    overrides: &DenominatorOverrides,
) -> Result<CoverageCell, CoverageError> {
    if ontologies.is_empty() {
        return Err(CoverageError::EmptyOntologyList);
    }
    if let Some(missing) = ontologies.iter().find(|o| !m.ontologies.contains(o)) {
        return Err(CoverageError::MissingOntology(missing.clone()));
    }
    let members: Vec<&str> = m.irs.iter().filter(|(_, c)| *c == class).map(|(id, _)| id.as_str()).collect();
    let satisfied = members.iter().filter(|id| m.satisfied_any(id, ontologies)).count() as u32;
    let denominator = match overrides.get(&class) {
        Some(&d) if d < satisfied => {
            return Err(CoverageError::OverrideTooSmall { class, denominator: d, satisfied })
        }
        Some(&d) => d,
        None if members.is_empty() => return Err(CoverageError::EmptyClass(class)),
        None => members.len() as u32,
    };
    Ok(CoverageCell {
        ir_class: class,
        ontology: column,
        satisfied_count: satisfied,
        denominator,
        percentage: percentage(satisfied, denominator),
    })
}

pub fn class_coverage(
    m: &SatisfactionMatrix,
    class: IRClass,
    ontology: &OntologyId,
    overrides: &DenominatorOverrides,
) -> Result<CoverageCell, CoverageError> {
    aggregate(m, class, ColumnId::Ontology(ontology.clone()), std::slice::from_ref(ontology), overrides)
}

/// Per-IR maximum across `ontologies`, aggregated like [`class_coverage`].
pub fn combined_coverage(
    m: &SatisfactionMatrix,
    class: IRClass,
    ontologies: &[OntologyId],
    overrides: &DenominatorOverrides,
) -> Result<CoverageCell, CoverageError> {
    aggregate(m, class, ColumnId::Combined, ontologies, overrides)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub ontologies: Vec<OntologyId>,
    /// Class-major, ontologies in matrix order, Combined last in each class.
    pub cells: Vec<CoverageCell>,
    pub stages_per_class: BTreeMap<IRClass, BTreeSet<Stage>>,
}

impl CoverageReport {
    pub fn cell(&self, class: IRClass, column: &ColumnId) -> Option<&CoverageCell> {
        self.cells.iter().find(|c| c.ir_class == class && &c.ontology == column)
    }

    pub fn percent(&self, class: IRClass, column: &ColumnId) -> Option<u8> {
        self.cell(class, column).map(|c| c.percentage)
    }

    pub fn is_complete(&self) -> bool {
        self.cells.len() == IRClass::ALL.len() * (self.ontologies.len() + 1)
    }

    fn stages_text(&self, class: IRClass, sep: &str) -> String {
        self.stages_per_class
            .get(&class)
            .map(|s| s.iter().map(|st| st.code()).collect::<Vec<_>>().join(sep))
            .unwrap_or_default()
    }
}

pub fn full_report(
    m: &SatisfactionMatrix,
    catalog: &Catalog,
    overrides: &DenominatorOverrides,
) -> Result<CoverageReport, CoverageError> {
    let mut cells = Vec::with_capacity(IRClass::ALL.len() * (m.ontologies.len() + 1));
    for class in IRClass::ALL {
        for o in &m.ontologies {
            cells.push(class_coverage(m, class, o, overrides)?);
        }
        cells.push(combined_coverage(m, class, &m.ontologies, overrides)?);
    }
    let mut stages_per_class: BTreeMap<IRClass, BTreeSet<Stage>> =
        IRClass::ALL.iter().map(|c| (*c, BTreeSet::new())).collect();
    for ir in &catalog.irs {
        stages_per_class.entry(ir.ir_class).or_default().extend(ir.stages.iter().copied());
    }
    Ok(CoverageReport { ontologies: m.ontologies.clone(), cells, stages_per_class })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    JsonRecords,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown format `{0}` (expected markdown, csv or json)")]
pub struct UnknownFormat(pub String);

impl FromStr for ReportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" | "json-records" => Ok(ReportFormat::JsonRecords),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

struct JsonCell<'a> {
    cell: &'a CoverageCell,
    stages: Vec<&'static str>,
}

impl Serialize for JsonCell<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CoverageCell", 6)?;
        st.serialize_field("ir_class", &self.cell.ir_class)?;
        st.serialize_field("ontology", &self.cell.ontology)?;
        st.serialize_field("satisfied_count", &self.cell.satisfied_count)?;
        st.serialize_field("denominator", &self.cell.denominator)?;
        st.serialize_field("percentage", &self.cell.percentage)?;
        st.serialize_field("stages", &self.stages)?;
        st.end()
    }
}

pub fn render_report(r: &CoverageReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => render_markdown(r),
        ReportFormat::Csv => render_csv(r),
        ReportFormat::JsonRecords => {
            let records: Vec<JsonCell> = r
                .cells
                .iter()
                .map(|cell| JsonCell {
                    cell,
                    stages: r.stages_per_class.get(&cell.ir_class).into_iter().flatten().map(|s| s.code()).collect(),
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&records).expect("cells serialize");
            out.push('\n');
            out
        }
    }
}

fn render_markdown(r: &CoverageReport) -> String {
    let mut columns: Vec<ColumnId> = r.ontologies.iter().cloned().map(ColumnId::Ontology).collect();
    columns.push(ColumnId::Combined);
    let mut out = String::from("| IR Class |");
    for c in &columns {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str(" Stage |\n|---|");
    out.push_str(&"---|".repeat(columns.len() + 1));
    out.push('\n');
    for class in IRClass::ALL {
        out.push_str(&format!("| {} |", class.display_name()));
        for c in &columns {
            match r.percent(class, c) {
                Some(p) => out.push_str(&format!(" {p}% |")),
                None => out.push_str(" - |"),
            }
        }
        out.push_str(&format!(" {} |\n", r.stages_text(class, ", ")));
    }
    out
}

fn render_csv(r: &CoverageReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "ontology", "satisfied", "denominator", "percentage", "stages"])
        .expect("in-memory write");
    for cell in &r.cells {
        w.write_record([
            format!("{:?}", cell.ir_class),
            cell.ontology.to_string(),
            cell.satisfied_count.to_string(),
            cell.denominator.to_string(),
            cell.percentage.to_string(),
            r.stages_text(cell.ir_class, ";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush in-memory csv")).expect("csv output is utf-8")
}
