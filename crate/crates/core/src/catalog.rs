//! Catalog of informational requirements (IRs) for incentive-based demand
//! response, plus the read-only queries and statistics run over it.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::normalize;

/// Sentinel path that selects the embedded catalog.
pub const BUILTIN: &str = "builtin";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IRClass {
    RegulatoryConstraints,
    HvacSystemParameters,
    BuildingOperationSettings,
    DrSchedulingManagement,
    EvChargingInfrastructure,
    EnvironmentalFactorsForecasts,
    TimeBasedParameters,
    ForecastsOfEnergyBaseline,
    EnergyConsumptionMetering,
}

impl IRClass {
    pub const ALL: [IRClass; 9] = [
        IRClass::RegulatoryConstraints,
        IRClass::HvacSystemParameters,
        IRClass::BuildingOperationSettings,
        IRClass::DrSchedulingManagement,
        IRClass::EvChargingInfrastructure,
        IRClass::EnvironmentalFactorsForecasts,
        IRClass::TimeBasedParameters,
        IRClass::ForecastsOfEnergyBaseline,
        IRClass::EnergyConsumptionMetering,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            IRClass::RegulatoryConstraints => "Regulatory Constraints",
            IRClass::HvacSystemParameters => "HVAC System Parameters",
            IRClass::BuildingOperationSettings => "Building Operation Settings & Measurements",
            IRClass::DrSchedulingManagement => "Demand Response (DR) Scheduling and Management",
            IRClass::EvChargingInfrastructure => "Electric Vehicle (EV) Charging Infrastructure",
            IRClass::EnvironmentalFactorsForecasts => "Environmental Factors and Forecasts",
            IRClass::TimeBasedParameters => "Time-Based Parameters",
            IRClass::ForecastsOfEnergyBaseline => "Forecasts of Energy Baseline",
            IRClass::EnergyConsumptionMetering => "Energy Consumption and Metering",
        }
    }

    /// Number of requirements the reference categorization lists for this class.
    pub fn reference_cardinality(self) -> usize {
        match self {
            IRClass::RegulatoryConstraints => 13,
            IRClass::HvacSystemParameters => 7,
            IRClass::BuildingOperationSettings => 13,
            IRClass::DrSchedulingManagement => 7,
            IRClass::EvChargingInfrastructure => 12,
            IRClass::EnvironmentalFactorsForecasts => 9,
            IRClass::TimeBasedParameters => 2,
            IRClass::ForecastsOfEnergyBaseline => 3,
            IRClass::EnergyConsumptionMetering => 2,
        }
    }

    pub fn parse(s: &str) -> Option<IRClass> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        IRClass::ALL.into_iter().find(|c| {
            let variant = format!("{c:?}");
            variant.eq_ignore_ascii_case(&key)
        })
    }
}

impl fmt::Display for IRClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Stage of the wholesale DR business process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    EnrollmentQualification,
    SchedulingAwardNotification,
    DeploymentRealtimeComms,
    MeasurementPerformance,
}

impl Stage {
    pub const ALL: [Stage; 4] = [
        Stage::EnrollmentQualification,
        Stage::SchedulingAwardNotification,
        Stage::DeploymentRealtimeComms,
        Stage::MeasurementPerformance,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Stage::EnrollmentQualification => "E&Q",
            Stage::SchedulingAwardNotification => "S&AN",
            Stage::DeploymentRealtimeComms => "D&RC",
            Stage::MeasurementPerformance => "M&P",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.code().eq_ignore_ascii_case(s) || format!("{st:?}").eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceWork {
    pub id: String,
    pub citation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum KindHint {
    Class,
    ObjectProperty,
    DataProperty,
    #[default]
    Any,
}

/// One element of an IR's component set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDescriptor {
    pub phrase: String,
    #[serde(default)]
    pub kind_hint: KindHint,
}

impl ConceptDescriptor {
    pub fn new(phrase: impl Into<String>) -> Self {
        ConceptDescriptor { phrase: phrase.into(), kind_hint: KindHint::Any }
    }

    pub fn with_hint(phrase: impl Into<String>, kind_hint: KindHint) -> Self {
        ConceptDescriptor { phrase: phrase.into(), kind_hint }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationalRequirement {
    pub id: String,
    pub name: String,
    pub ir_class: IRClass,
    pub stages: BTreeSet<Stage>,
    pub components: Vec<ConceptDescriptor>,
    pub sources: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: String,
    pub works: Vec<SourceWork>,
    pub irs: Vec<InformationalRequirement>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("IR `{ir_id}` references unknown source work `{work_id}`")]
    DanglingSource { ir_id: String, work_id: String },
    #[error("duplicate {what} id `{id}`")]
    DuplicateId { what: &'static str, id: String },
    #[error("unknown work id `{0}` in ordering")]
    UnknownWork(String),
    #[error("work id `{0}` appears more than once in ordering")]
    DuplicateWork(String),
    #[error("ordering omits work `{0}`, which is the only source of at least one IR")]
    MissingWork(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ViolationRule {
    EmptyComponents,
    EmptyStages,
    EmptySources,
    EmptyPhrase,
    DuplicateIrId,
    DuplicateWorkId,
    DanglingSource,
    ClassCardinality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Offending IR, or `None` for catalog-wide rules.
    pub ir_id: Option<String>,
    pub rule: ViolationRule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ir_id {
            Some(id) => write!(f, "{id}: {:?}: {}", self.rule, self.detail),
            None => write!(f, "{:?}: {}", self.rule, self.detail),
        }
    }
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> Catalog {
        Catalog::from_json(crate::fixtures::CATALOG_JSON).expect("embedded catalog is well-formed")
    }

    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let catalog: Catalog = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        catalog.check_references()?;
        Ok(catalog)
    }

    fn check_references(&self) -> Result<(), CatalogError> {
        let mut works = HashSet::new();
        for w in &self.works {
            if !works.insert(w.id.as_str()) {
                return Err(CatalogError::DuplicateId { what: "work", id: w.id.clone() });
            }
        }
        let mut irs = HashSet::new();
        for ir in &self.irs {
            if !irs.insert(ir.id.as_str()) {
                return Err(CatalogError::DuplicateId { what: "IR", id: ir.id.clone() });
            }
            if let Some(missing) = ir.sources.iter().find(|s| !works.contains(s.as_str())) {
                return Err(CatalogError::DanglingSource {
                    ir_id: ir.id.clone(),
                    work_id: missing.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, ir_id: &str) -> Option<&InformationalRequirement> {
        self.irs.iter().find(|ir| ir.id == ir_id)
    }

    pub fn class_of(&self, ir_id: &str) -> Option<IRClass> {
        self.get(ir_id).map(|ir| ir.ir_class)
    }

    pub fn class_counts(&self) -> BTreeMap<IRClass, usize> {
        let mut counts: BTreeMap<IRClass, usize> = IRClass::ALL.iter().map(|c| (*c, 0)).collect();
        for ir in &self.irs {
            *counts.entry(ir.ir_class).or_default() += 1;
        }
        counts
    }

    pub fn stage_counts(&self) -> BTreeMap<Stage, usize> {
        let mut counts: BTreeMap<Stage, usize> = Stage::ALL.iter().map(|s| (*s, 0)).collect();
        for ir in &self.irs {
            for s in &ir.stages {
                *counts.entry(*s).or_default() += 1;
            }
        }
        counts
    }

    /// Works ordered by where they first contribute requirements in the
    /// stage-by-stage review (enrollment, scheduling, deployment, measurement).
    pub fn default_work_order(&self) -> Vec<String> {
        self.works.iter().map(|w| w.id.clone()).collect()
    }
}

/// Loads a catalog file, or the embedded catalog for [`BUILTIN`].
pub fn load_catalog(path: &str) -> Result<Catalog, CatalogError> {
    if path == BUILTIN {
        return Ok(Catalog::builtin());
    }
    let text = std::fs::read_to_string(Path::new(path))
        .map_err(|source| CatalogError::Io { path: path.to_string(), source })?;
    Catalog::from_json(&text)
}

pub fn validate_catalog(c: &Catalog) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen_works = HashSet::new();
    for w in &c.works {
        if !seen_works.insert(w.id.as_str()) {
            out.push(Violation {
                ir_id: None,
                rule: ViolationRule::DuplicateWorkId,
                detail: format!("work `{}` declared more than once", w.id),
            });
        }
    }
    let mut seen_irs = HashSet::new();
    for ir in &c.irs {
        let v = |rule, detail: String| Violation { ir_id: Some(ir.id.clone()), rule, detail };
        if !seen_irs.insert(ir.id.as_str()) {
            out.push(v(ViolationRule::DuplicateIrId, "id declared more than once".into()));
        }
        if ir.components.is_empty() {
            out.push(v(ViolationRule::EmptyComponents, "component set is empty".into()));
        }
        for d in &ir.components {
            if normalize(&d.phrase).is_empty() {
                out.push(v(
                    ViolationRule::EmptyPhrase,
                    format!("descriptor `{}` normalizes to nothing", d.phrase),
                ));
            }
        }
        if ir.stages.is_empty() {
            out.push(v(ViolationRule::EmptyStages, "no stage tags".into()));
        }
        if ir.sources.is_empty() {
            out.push(v(ViolationRule::EmptySources, "no source works".into()));
        }
        for s in &ir.sources {
            if !seen_works.contains(s.as_str()) {
                out.push(v(ViolationRule::DanglingSource, format!("unknown source work `{s}`")));
            }
        }
    }
    let counts = c.class_counts();
    for class in IRClass::ALL {
        let have = counts[&class];
        let want = class.reference_cardinality();
        if have != want {
            out.push(Violation {
                ir_id: None,
                rule: ViolationRule::ClassCardinality,
                detail: format!("{class}: {have} IRs, expected {want}"),
            });
        }
    }
    out
}

pub fn query_irs<'a>(
    c: &'a Catalog,
    class_filter: Option<IRClass>,
    stage_filter: Option<Stage>,
) -> Vec<&'a InformationalRequirement> {
    c.irs
        .iter()
        .filter(|ir| class_filter.map_or(true, |cl| ir.ir_class == cl))
        .filter(|ir| stage_filter.map_or(true, |st| ir.stages.contains(&st)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    pub index: usize,
    pub cumulative_unique: usize,
}

/// Cumulative number of distinct IRs attributable to the first `k` works of
/// `ordering`, for `k = 1..=ordering.len()`.
pub fn discovery_curve(c: &Catalog, ordering: &[String]) -> Result<Vec<CurvePoint>, CatalogError> {
    let known: HashSet<&str> = c.works.iter().map(|w| w.id.as_str()).collect();
    let mut seen = HashSet::new();
    for id in ordering {
        if !known.contains(id.as_str()) {
            return Err(CatalogError::UnknownWork(id.clone()));
        }
        if !seen.insert(id.as_str()) {
            return Err(CatalogError::DuplicateWork(id.clone()));
        }
    }
    for ir in &c.irs {
        if !ir.sources.iter().any(|s| seen.contains(s.as_str())) {
            let work = ir.sources.iter().next().cloned().unwrap_or_default();
            return Err(CatalogError::MissingWork(work));
        }
    }

    let mut covered: HashSet<&str> = HashSet::new();
    let mut points = Vec::with_capacity(ordering.len());
    for (k, work) in ordering.iter().enumerate() {
        for ir in &c.irs {
            if ir.sources.contains(work) {
                covered.insert(ir.id.as_str());
            }
        }
        points.push(CurvePoint { index: k + 1, cumulative_unique: covered.len() });
    }
    Ok(points)
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),
    #[error("x values must be >= 1 (got {0})")]
    XOutOfRange(f64),
    #[error("ln(x) has zero variance")]
    DegenerateX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

/// Least-squares fit of `y = a ln(x) + b`.
pub fn fit_log_trend(points: &[(f64, f64)]) -> Result<LogFit, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if let Some(&(x, _)) = points.iter().find(|(x, _)| !(*x >= 1.0)) {
        return Err(FitError::XOutOfRange(x));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let mean_x = lx.iter().sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(FitError::DegenerateX);
    }
    let sxy: f64 = lx.iter().zip(points).map(|(x, (_, y))| (x - mean_x) * (y - mean_y)).sum();
    let a = sxy / sxx;
    let b = mean_y - a * mean_x;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = lx.iter().zip(points).map(|(x, (_, y))| (y - (a * x + b)).powi(2)).sum();
    // Constant y is fitted exactly by a = 0.
    let r2 = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(LogFit { a, b, r2 })
}

pub fn curve_as_points(curve: &[CurvePoint]) -> Vec<(f64, f64)> {
    curve.iter().map(|p| (p.index as f64, p.cumulative_unique as f64)).collect()
}
