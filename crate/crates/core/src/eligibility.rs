//! Building eligibility against demand-response program requirements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inventory::OntologyInventory;
use crate::matching::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ServiceType {
    Energy,
    Capacity,
    Regulation,
    OperatingReserves,
    SecondaryReserves,
}

impl ServiceType {
    pub const ALL: [ServiceType; 5] = [
        ServiceType::Energy,
        ServiceType::Capacity,
        ServiceType::Regulation,
        ServiceType::OperatingReserves,
        ServiceType::SecondaryReserves,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramRequirements {
    pub program_id: String,
    pub service_type: ServiceType,
    #[serde(default)]
    pub min_resource_size_kw: Option<f64>,
    #[serde(default)]
    pub min_reduction_kw: Option<f64>,
    /// Free-text schedule; kept for display, never evaluated.
    #[serde(default)]
    pub availability_window: Option<String>,
    #[serde(default)]
    pub aggregation_allowed: bool,
    #[serde(default)]
    pub after_the_fact_metering_required: bool,
    #[serde(default)]
    pub meter_interval_s: Option<u32>,
    #[serde(default)]
    pub meter_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub meter_reporting_deadline_h: Option<f64>,
    #[serde(default)]
    pub telemetry_required: bool,
    #[serde(default)]
    pub comm_protocols: BTreeSet<String>,
    #[serde(default)]
    pub telemetry_interval_s: Option<u32>,
    #[serde(default)]
    pub telemetry_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub advance_notification_min: Option<f64>,
    #[serde(default)]
    pub lead_time_min: Option<f64>,
    #[serde(default)]
    pub sustained_response_min: Option<f64>,
    #[serde(default)]
    pub recovery_period_min: Option<f64>,
    #[serde(default)]
    pub non_participation_notice: bool,
}

impl ProgramRequirements {
    /// A program with no requirements at all.
    pub fn open(program_id: impl Into<String>, service_type: ServiceType) -> Self {
        ProgramRequirements {
            program_id: program_id.into(),
            service_type,
            min_resource_size_kw: None,
            min_reduction_kw: None,
            availability_window: None,
            aggregation_allowed: false,
            after_the_fact_metering_required: false,
            meter_interval_s: None,
            meter_accuracy_pct: None,
            meter_reporting_deadline_h: None,
            telemetry_required: false,
            comm_protocols: BTreeSet::new(),
            telemetry_interval_s: None,
            telemetry_accuracy_pct: None,
            advance_notification_min: None,
            lead_time_min: None,
            sustained_response_min: None,
            recovery_period_min: None,
            non_participation_notice: false,
        }
    }

    /// Invariant violations, empty when the record is well-formed.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let meter_fields = self.meter_interval_s.is_some()
            || self.meter_accuracy_pct.is_some()
            || self.meter_reporting_deadline_h.is_some();
        if meter_fields && !self.after_the_fact_metering_required {
            out.push("meter fields set without after_the_fact_metering_required".into());
        }
        let telemetry_fields = !self.comm_protocols.is_empty()
            || self.telemetry_interval_s.is_some()
            || self.telemetry_accuracy_pct.is_some();
        if telemetry_fields && !self.telemetry_required {
            out.push("telemetry fields set without telemetry_required".into());
        }
        let non_negative = [
            ("min_resource_size_kw", self.min_resource_size_kw),
            ("min_reduction_kw", self.min_reduction_kw),
            ("advance_notification_min", self.advance_notification_min),
            ("lead_time_min", self.lead_time_min),
            ("recovery_period_min", self.recovery_period_min),
        ];
        for (name, v) in non_negative {
            if v.map_or(false, |v| !(v.is_finite() && v >= 0.0)) {
                out.push(format!("{name} must be a non-negative number"));
            }
        }
        let positive = [
            ("meter_accuracy_pct", self.meter_accuracy_pct),
            ("meter_reporting_deadline_h", self.meter_reporting_deadline_h),
            ("telemetry_accuracy_pct", self.telemetry_accuracy_pct),
            ("sustained_response_min", self.sustained_response_min),
        ];
        for (name, v) in positive {
            if v.map_or(false, |v| !(v.is_finite() && v > 0.0)) {
                out.push(format!("{name} must be a positive number"));
            }
        }
        if self.meter_interval_s == Some(0) || self.telemetry_interval_s == Some(0) {
            out.push("intervals must be positive".into());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceTiming {
    pub service_type: ServiceType,
    pub ramp_min_lo: f64,
    pub ramp_min_hi: f64,
    pub sustain_lo_min: f64,
    /// `None` means open-ended.
    #[serde(default)]
    pub sustain_hi_min: Option<f64>,
}

impl ServiceTiming {
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.ramp_min_lo >= 0.0 && self.ramp_min_lo <= self.ramp_min_hi) {
            out.push(format!("{:?}: ramp bounds must satisfy 0 <= lo <= hi", self.service_type));
        }
        if !(self.sustain_lo_min >= 0.0 && self.sustain_hi_min.map_or(true, |hi| self.sustain_lo_min <= hi)) {
            out.push(format!("{:?}: sustain bounds must satisfy 0 <= lo <= hi", self.service_type));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingProfile {
    pub building_id: String,
    #[serde(default)]
    pub shed_capability_kw: Option<f64>,
    #[serde(default)]
    pub metering_present: bool,
    #[serde(default)]
    pub meter_interval_s: Option<u32>,
    #[serde(default)]
    pub meter_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub telemetry_present: bool,
    #[serde(default)]
    pub telemetry_protocols: BTreeSet<String>,
    #[serde(default)]
    pub telemetry_interval_s: Option<u32>,
    #[serde(default)]
    pub telemetry_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub fastest_ramp_min: Option<f64>,
    #[serde(default)]
    pub max_sustain_min: Option<f64>,
    #[serde(default)]
    pub in_aggregation: bool,
}

impl BuildingProfile {
    /// Nothing known about the building.
    pub fn unknown(building_id: impl Into<String>) -> Self {
        BuildingProfile {
            building_id: building_id.into(),
            shed_capability_kw: None,
            metering_present: false,
            meter_interval_s: None,
            meter_accuracy_pct: None,
            telemetry_present: false,
            telemetry_protocols: BTreeSet::new(),
            telemetry_interval_s: None,
            telemetry_accuracy_pct: None,
            fastest_ramp_min: None,
            max_sustain_min: None,
            in_aggregation: false,
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.metering_present && (self.meter_interval_s.is_some() || self.meter_accuracy_pct.is_some()) {
            out.push("meter interval/accuracy set without metering_present".into());
        }
        let telemetry_fields = self.telemetry_interval_s.is_some()
            || self.telemetry_accuracy_pct.is_some()
            || !self.telemetry_protocols.is_empty();
        if !self.telemetry_present && telemetry_fields {
            out.push("telemetry fields set without telemetry_present".into());
        }
        let values = [
            ("shed_capability_kw", self.shed_capability_kw),
            ("meter_accuracy_pct", self.meter_accuracy_pct),
            ("telemetry_accuracy_pct", self.telemetry_accuracy_pct),
            ("fastest_ramp_min", self.fastest_ramp_min),
            ("max_sustain_min", self.max_sustain_min),
        ];
        for (name, v) in values {
            if v.map_or(false, |v| !(v.is_finite() && v >= 0.0)) {
                out.push(format!("{name} must be a non-negative number"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Unsatisfied,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RequirementVerdict {
    pub requirement_name: String,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Overall {
    Eligible,
    NeedsData,
    Ineligible,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EligibilityReport {
    pub building_id: String,
    pub program_id: String,
    pub verdicts: Vec<RequirementVerdict>,
    pub overall: Overall,
}

impl EligibilityReport {
    pub fn unknown_count(&self) -> usize {
        self.verdicts.iter().filter(|v| v.verdict == Verdict::Unknown).count()
    }

    pub fn verdict(&self, requirement_name: &str) -> Option<Verdict> {
        self.verdicts.iter().find(|v| v.requirement_name == requirement_name).map(|v| v.verdict)
    }
}

pub fn classify(verdicts: &[RequirementVerdict]) -> Overall {
    if verdicts.iter().any(|v| v.verdict == Verdict::Unsatisfied) {
        Overall::Ineligible
    } else if verdicts.iter().any(|v| v.verdict == Verdict::Unknown) {
        Overall::NeedsData
    } else {
        Overall::Eligible
    }
}

#[derive(Debug, Error)]
pub enum EligibilityError {
    #[error("program `{program_id}` is {program:?} but its timing record is {timing:?}")]
    ServiceMismatch { program_id: String, program: ServiceType, timing: ServiceType },
    #[error("no timing record for service {0:?}")]
    MissingTiming(ServiceType),
    #[error("invalid {what}: {}", problems.join("; "))]
    Invalid { what: String, problems: Vec<String> },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("duplicate program id `{0}`")]
    DuplicateProgram(String),
}

pub const REQ_RESOURCE_SIZE: &str = "Minimum Eligible Resource Size";
pub const REQ_REDUCTION: &str = "Minimum Reduction Amount";
pub const REQ_AVAILABILITY: &str = "Availability";
pub const REQ_METERING: &str = "After-the-Fact Metering";
pub const REQ_METER_INTERVAL: &str = "Meter Interval";
pub const REQ_METER_ACCURACY: &str = "Meter Accuracy";
pub const REQ_TELEMETRY: &str = "Telemetry";
pub const REQ_PROTOCOL: &str = "Communication Protocol";
pub const REQ_TELEMETRY_INTERVAL: &str = "Telemetry Reporting Interval";
pub const REQ_TELEMETRY_ACCURACY: &str = "Telemetry Accuracy";
pub const REQ_LEAD_TIME: &str = "Lead Time for Reduction";
pub const REQ_SUSTAIN: &str = "Sustained Response Period";

fn verdict(name: &str, v: Verdict, reason: impl Into<String>) -> RequirementVerdict {
    RequirementVerdict { requirement_name: name.to_string(), verdict: v, reason: reason.into() }
}

fn at_least(name: &str, have: Option<f64>, need: f64, unit: &str) -> RequirementVerdict {
    match have {
        None => verdict(name, Verdict::Unknown, format!("building value unknown; program needs >= {need} {unit}")),
        Some(h) if h >= need => verdict(name, Verdict::Satisfied, format!("{h} {unit} >= {need} {unit}")),
        Some(h) => verdict(name, Verdict::Unsatisfied, format!("{h} {unit} < {need} {unit}")),
    }
}

/// Smaller-is-better building value gated on a capability flag.
fn at_most_with(name: &str, present: bool, what: &str, have: Option<f64>, need: f64, unit: &str) -> RequirementVerdict {
    if !present {
        return verdict(name, Verdict::Unsatisfied, format!("no {what}"));
    }
    match have {
        None => verdict(name, Verdict::Unknown, format!("building value unknown; program needs <= {need} {unit}")),
        Some(h) if h <= need => verdict(name, Verdict::Satisfied, format!("{h} {unit} <= {need} {unit}")),
        Some(h) => verdict(name, Verdict::Unsatisfied, format!("{h} {unit} > {need} {unit}")),
    }
}

fn canonical_protocol(p: &str) -> String {
    p.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase()
}

/// Per-requirement verdicts for one program. Reporting deadlines, advance
/// notice, recovery period and non-participation notice are obligations the
/// program places on the participant after enrollment, so they carry no verdict.
pub fn assess(b: &BuildingProfile, p: &ProgramRequirements, t: &ServiceTiming) -> Result<EligibilityReport, EligibilityError> {
    if t.service_type != p.service_type {
        return Err(EligibilityError::ServiceMismatch {
            program_id: p.program_id.clone(),
            program: p.service_type,
            timing: t.service_type,
        });
    }
    let mut v = Vec::new();

    if let Some(min) = p.min_resource_size_kw {
        if p.aggregation_allowed && b.in_aggregation {
            v.push(verdict(REQ_RESOURCE_SIZE, Verdict::Satisfied, "met through aggregation"));
        } else {
            v.push(at_least(REQ_RESOURCE_SIZE, b.shed_capability_kw, min, "kW"));
        }
    }
    if let Some(min) = p.min_reduction_kw {
        v.push(at_least(REQ_REDUCTION, b.shed_capability_kw, min, "kW"));
    }
    if let Some(window) = &p.availability_window {
        v.push(verdict(REQ_AVAILABILITY, Verdict::Unknown, format!("availability `{window}` is not machine-checkable")));
    }

    if p.after_the_fact_metering_required {
        let (ok, why) = if b.metering_present { (Verdict::Satisfied, "meter present") } else { (Verdict::Unsatisfied, "no meter") };
        v.push(verdict(REQ_METERING, ok, why));
    }
    if let Some(need) = p.meter_interval_s {
        v.push(at_most_with(REQ_METER_INTERVAL, b.metering_present, "meter", b.meter_interval_s.map(f64::from), f64::from(need), "s"));
    }
    if let Some(need) = p.meter_accuracy_pct {
        v.push(at_most_with(REQ_METER_ACCURACY, b.metering_present, "meter", b.meter_accuracy_pct, need, "%"));
    }

    if p.telemetry_required {
        let (ok, why) =
            if b.telemetry_present { (Verdict::Satisfied, "telemetry present") } else { (Verdict::Unsatisfied, "no telemetry") };
        v.push(verdict(REQ_TELEMETRY, ok, why));
    }
    if !p.comm_protocols.is_empty() {
        let wanted: BTreeSet<String> = p.comm_protocols.iter().map(|s| canonical_protocol(s)).collect();
        let item = if !b.telemetry_present {
            verdict(REQ_PROTOCOL, Verdict::Unsatisfied, "no telemetry")
        } else if b.telemetry_protocols.is_empty() {
            verdict(REQ_PROTOCOL, Verdict::Unknown, "building protocols unknown")
        } else if b.telemetry_protocols.iter().any(|s| wanted.contains(&canonical_protocol(s))) {
            verdict(REQ_PROTOCOL, Verdict::Satisfied, "shared protocol")
        } else {
            verdict(REQ_PROTOCOL, Verdict::Unsatisfied, "no protocol in common")
        };
        v.push(item);
    }
    if let Some(need) = p.telemetry_interval_s {
        v.push(at_most_with(
            REQ_TELEMETRY_INTERVAL,
            b.telemetry_present,
            "telemetry",
            b.telemetry_interval_s.map(f64::from),
            f64::from(need),
            "s",
        ));
    }
    if let Some(need) = p.telemetry_accuracy_pct {
        v.push(at_most_with(REQ_TELEMETRY_ACCURACY, b.telemetry_present, "telemetry", b.telemetry_accuracy_pct, need, "%"));
    }

    if let Some(lead) = p.lead_time_min {
        let item = match b.fastest_ramp_min {
            None => verdict(REQ_LEAD_TIME, Verdict::Unknown, "building ramp time unknown"),
            Some(r) if r > lead => verdict(REQ_LEAD_TIME, Verdict::Unsatisfied, format!("ramp {r} min > lead time {lead} min")),
            Some(r) if r > t.ramp_min_hi => verdict(
                REQ_LEAD_TIME,
                Verdict::Unsatisfied,
                format!("ramp {r} min > {:?} ramp bound {} min", t.service_type, t.ramp_min_hi),
            ),
            Some(r) => verdict(REQ_LEAD_TIME, Verdict::Satisfied, format!("ramp {r} min within lead time and service bound")),
        };
        v.push(item);
    }
    if let Some(need) = p.sustained_response_min {
        v.push(at_least(REQ_SUSTAIN, b.max_sustain_min, need, "min"));
    }

    let overall = classify(&v);
    Ok(EligibilityReport { building_id: b.building_id.clone(), program_id: p.program_id.clone(), verdicts: v, overall })
}

/// Sort key: Eligible, then NeedsData with fewer unknowns first, then
/// Ineligible; ties by program id.
pub fn portfolio_key(r: &EligibilityReport) -> (Overall, usize, String) {
    let unknowns = if r.overall == Overall::NeedsData { r.unknown_count() } else { 0 };
    (r.overall, unknowns, r.program_id.clone())
}

pub fn assess_portfolio(
    b: &BuildingProfile,
    programs: &[(ProgramRequirements, ServiceTiming)],
) -> Result<Vec<EligibilityReport>, EligibilityError> {
    let mut out = programs.iter().map(|(p, t)| assess(b, p, t)).collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(portfolio_key);
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileOverrides {
    #[serde(default)]
    pub building_id: Option<String>,
    #[serde(default)]
    pub shed_capability_kw: Option<f64>,
    #[serde(default)]
    pub meter_interval_s: Option<u32>,
    #[serde(default)]
    pub meter_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub telemetry_protocols: Option<BTreeSet<String>>,
    #[serde(default)]
    pub telemetry_interval_s: Option<u32>,
    #[serde(default)]
    pub telemetry_accuracy_pct: Option<f64>,
    #[serde(default)]
    pub fastest_ramp_min: Option<f64>,
    #[serde(default)]
    pub max_sustain_min: Option<f64>,
    #[serde(default)]
    pub in_aggregation: Option<bool>,
}

/// Protocol names recognized in building models, keyed by their compact
/// lowercase spelling.
const PROTOCOLS: &[(&str, &str)] = &[
    ("bacnet", "BACnet"),
    ("openadr", "OpenADR"),
    ("modbus", "Modbus"),
    ("dnp3", "DNP3"),
    ("iec61850", "IEC 61850"),
    ("ieee2030", "IEEE 2030.5"),
    ("mqtt", "MQTT"),
    ("lonworks", "LonWorks"),
    ("knx", "KNX"),
];

/// Capabilities visible in a building model. Booleans come from term names
/// and labels; numbers come only from `overrides`, and overrides that
/// contradict the inferred booleans are dropped.
pub fn profile_from_inventory(inv: &OntologyInventory, overrides: &ProfileOverrides) -> BuildingProfile {
    let mut metering = false;
    let mut telemetry = false;
    let mut protocols = BTreeSet::new();
    for term in inv.terms.values() {
        let names = std::iter::once(crate::inventory::local_name(&term.iri)).chain(term.labels.iter().map(String::as_str));
        for name in names {
            let tokens = normalize(name);
            metering |= tokens.iter().any(|t| t == "meter" || t == "meters");
            telemetry |= tokens.iter().any(|t| t == "telemetry");
            let compact = canonical_protocol(name);
            for (key, display) in PROTOCOLS {
                if compact.contains(key) {
                    telemetry = true;
                    protocols.insert(display.to_string());
                }
            }
        }
    }
    if let Some(extra) = &overrides.telemetry_protocols {
        if telemetry {
            protocols.extend(extra.iter().cloned());
        }
    }
    BuildingProfile {
        building_id: overrides.building_id.clone().unwrap_or_else(|| inv.ontology_id.to_string()),
        shed_capability_kw: overrides.shed_capability_kw,
        metering_present: metering,
        meter_interval_s: overrides.meter_interval_s.filter(|_| metering),
        meter_accuracy_pct: overrides.meter_accuracy_pct.filter(|_| metering),
        telemetry_present: telemetry,
        telemetry_protocols: protocols,
        telemetry_interval_s: overrides.telemetry_interval_s.filter(|_| telemetry),
        telemetry_accuracy_pct: overrides.telemetry_accuracy_pct.filter(|_| telemetry),
        fastest_ramp_min: overrides.fastest_ramp_min,
        max_sustain_min: overrides.max_sustain_min,
        in_aggregation: overrides.in_aggregation.unwrap_or(false),
    }
}

#[derive(Debug, Clone, Deserialize)]
struct TimingFile {
    #[allow(dead_code)]
    #[serde(default)]
    version: String,
    timings: Vec<ServiceTiming>,
}

#[derive(Debug, Clone, Deserialize)]
struct ProgramEntry {
    #[serde(flatten)]
    requirements: ProgramRequirements,
    #[serde(default)]
    timing: Option<ServiceTiming>,
}

#[derive(Debug, Clone, Deserialize)]
struct ProgramFile {
    #[allow(dead_code)]
    #[serde(default)]
    version: String,
    programs: Vec<ProgramEntry>,
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &str) -> Result<T, EligibilityError> {
    serde_json::from_str(text).map_err(|e| EligibilityError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read_file(path: &Path) -> Result<String, EligibilityError> {
    std::fs::read_to_string(path).map_err(|source| EligibilityError::Io { path: path.display().to_string(), source })
}

pub fn parse_timings(text: &str, path: &str) -> Result<BTreeMap<ServiceType, ServiceTiming>, EligibilityError> {
    let file: TimingFile = parse_json(text, path)?;
    let mut out = BTreeMap::new();
    for t in file.timings {
        let problems = t.problems();
        if !problems.is_empty() {
            return Err(EligibilityError::Invalid { what: format!("timing in {path}"), problems });
        }
        out.insert(t.service_type, t);
    }
    Ok(out)
}

/// Service timing bounds shipped with the crate.
pub fn builtin_timings() -> BTreeMap<ServiceType, ServiceTiming> {
    parse_timings(crate::fixtures::SERVICE_TIMINGS_JSON, "service_timings.json").expect("embedded timings are well-formed")
}

/// Programs paired with their timing record. A program without its own
/// `timing` uses `defaults` for its service type.
pub fn parse_programs(
    text: &str,
    path: &str,
    defaults: &BTreeMap<ServiceType, ServiceTiming>,
) -> Result<Vec<(ProgramRequirements, ServiceTiming)>, EligibilityError> {
    let file: ProgramFile = parse_json(text, path)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for entry in file.programs {
        let p = entry.requirements;
        if !seen.insert(p.program_id.clone()) {
            return Err(EligibilityError::DuplicateProgram(p.program_id));
        }
        let problems = p.problems();
        if !problems.is_empty() {
            return Err(EligibilityError::Invalid { what: format!("program `{}`", p.program_id), problems });
        }
        let timing = match entry.timing {
            Some(t) => {
                let problems = t.problems();
                if !problems.is_empty() {
                    return Err(EligibilityError::Invalid { what: format!("timing of `{}`", p.program_id), problems });
                }
                t
            }
            None => defaults.get(&p.service_type).cloned().ok_or(EligibilityError::MissingTiming(p.service_type))?,
        };
        if timing.service_type != p.service_type {
            return Err(EligibilityError::ServiceMismatch {
                program_id: p.program_id.clone(),
                program: p.service_type,
                timing: timing.service_type,
            });
        }
        out.push((p, timing));
    }
    Ok(out)
}

pub fn load_programs(
    path: impl AsRef<Path>,
    defaults: &BTreeMap<ServiceType, ServiceTiming>,
) -> Result<Vec<(ProgramRequirements, ServiceTiming)>, EligibilityError> {
    let path = path.as_ref();
    parse_programs(&read_file(path)?, &path.display().to_string(), defaults)
}

pub fn parse_profile(text: &str, path: &str) -> Result<BuildingProfile, EligibilityError> {
    let profile: BuildingProfile = parse_json(text, path)?;
    let problems = profile.problems();
    if !problems.is_empty() {
        return Err(EligibilityError::Invalid { what: format!("building profile in {path}"), problems });
    }
    Ok(profile)
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<BuildingProfile, EligibilityError> {
    let path = path.as_ref();
    parse_profile(&read_file(path)?, &path.display().to_string())
}

pub fn parse_overrides(text: &str, path: &str) -> Result<ProfileOverrides, EligibilityError> {
    parse_json(text, path)
}

pub fn load_overrides(path: impl AsRef<Path>) -> Result<ProfileOverrides, EligibilityError> {
    let path = path.as_ref();
    parse_overrides(&read_file(path)?, &path.display().to_string())
}
