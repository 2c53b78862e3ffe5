//! Independent oracles and seeded instance generators shared by the
//! integration tests and the acceptance harness.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use flexcover_core::catalog::{ConceptDescriptor, IRClass, InformationalRequirement, KindHint, Stage};
use flexcover_core::eligibility::{
    BuildingProfile, EligibilityReport, Overall, ProgramRequirements, ServiceTiming, ServiceType, Verdict,
};
use flexcover_core::inventory::{OntologyId, OntologyInventory, Term, TermKind};
use flexcover_core::matching::{MatchRule, Provenance, SatisfactionMatrix, SatisfactionRecord, SynonymTable};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SEED_ENV: &str = "FLEXCOVER_SEED";
pub const DEFAULT_SEED: u64 = 0x5eed_f1e7;

pub fn seed() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(offset: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed().wrapping_add(offset))
}

// ---------------------------------------------------------------- coverage

/// 100 * s / d rounded half away from zero, in exact rational arithmetic.
pub fn rounded_percent(s: u32, d: u32) -> u8 {
    let r = Ratio::new(100 * i64::from(s), i64::from(d)).round();
    *r.numer() as u8
}

/// A matrix with every class populated (1..=max_per_class IRs) and
/// `n_ont` ontology columns filled with coin flips.
pub fn random_matrix(rng: &mut ChaCha8Rng, n_ont: usize, max_per_class: usize) -> SatisfactionMatrix {
    let ontologies: Vec<OntologyId> = (0..n_ont).map(|i| OntologyId::Custom(format!("O{i}"))).collect();
    let mut irs = Vec::new();
    let mut records = BTreeMap::new();
    for class in IRClass::ALL {
        for k in 0..rng.gen_range(1..=max_per_class) {
            let id = format!("{class:?}_{k}");
            for o in &ontologies {
                let sat = rng.gen_bool(0.4);
                records.insert((id.clone(), o.clone()), record(&id, o, sat));
            }
            irs.push((id, class));
        }
    }
    SatisfactionMatrix { irs, ontologies, records, overlay_applied: false }
}

fn record(id: &str, o: &OntologyId, sat: bool) -> SatisfactionRecord {
    SatisfactionRecord {
        ir_id: id.to_string(),
        ontology_id: o.clone(),
        satisfied: sat,
        auto_satisfied: sat,
        satisfied_by: None,
        evidence: Vec::new(),
        provenance: Provenance::Auto,
        note: None,
    }
}

// ---------------------------------------------------------------- matching

const WORDS: &[&str] = &["air", "zone", "meter", "load", "price", "signal", "battery", "power", "setpoint", "ev", "temp2"];

fn styled(rng: &mut ChaCha8Rng, words: &[&str]) -> String {
    let cap = |w: &str| {
        let mut c = w.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
    };
    match rng.gen_range(0..5) {
        0 => words.join(" "),
        1 => words.iter().map(|w| cap(w)).collect::<Vec<_>>().join("_"),
        2 => {
            let mut s = words[0].to_string();
            for w in &words[1..] {
                s.push_str(&cap(w));
            }
            s
        }
        3 => words.join("-").to_uppercase(),
        _ => format!(" {} ", words.iter().map(|w| cap(w)).collect::<Vec<_>>().join("  ")),
    }
}

fn random_words<'a>(rng: &mut ChaCha8Rng) -> Vec<&'a str> {
    let n = rng.gen_range(1..=2);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect()
}

pub struct MatchInstance {
    pub irs: Vec<InformationalRequirement>,
    pub inventory: OntologyInventory,
    pub synonym_pairs: Vec<(String, String)>,
    pub synonyms: SynonymTable,
}

pub fn random_match_instance(rng: &mut ChaCha8Rng) -> MatchInstance {
    let kinds = [TermKind::Class, TermKind::ObjectProperty, TermKind::DataProperty, TermKind::Individual];
    let mut inventory = OntologyInventory::empty(OntologyId::Brick);
    for i in 0..rng.gen_range(0..=30) {
        let words = random_words(rng);
        let local = styled(rng, &words).replace(' ', "_");
        let mut t = Term::new(format!("urn:t{i}#{}", local.trim_matches('_')), *kinds.choose(rng).unwrap());
        for _ in 0..rng.gen_range(0..=2) {
            let words = random_words(rng);
            t = t.with_label(styled(rng, &words));
        }
        inventory.insert(t);
    }
    let mut synonym_pairs = Vec::new();
    let mut synonyms = SynonymTable::new();
    for _ in 0..rng.gen_range(0..=20) {
        let (a, b) = (random_words(rng), random_words(rng));
        let (a, b) = (styled(rng, &a), styled(rng, &b));
        synonyms.add(&a, &b);
        synonym_pairs.push((a, b));
    }
    let hints = [KindHint::Any, KindHint::Any, KindHint::Class, KindHint::ObjectProperty, KindHint::DataProperty];
    let irs = (0..rng.gen_range(1..=10))
        .map(|i| InformationalRequirement {
            id: format!("ir{i}"),
            name: format!("IR {i}"),
            ir_class: *IRClass::ALL.choose(rng).unwrap(),
            stages: [Stage::ALL[0]].into(),
            components: (0..rng.gen_range(1..=3))
                .map(|_| {
                    let words = random_words(rng);
                    ConceptDescriptor::with_hint(styled(rng, &words), *hints.choose(rng).unwrap())
                })
                .collect(),
            sources: ["w".to_string()].into(),
        })
        .collect();
    MatchInstance { irs, inventory, synonym_pairs, synonyms }
}

/// Lowercased words; written independently of the library tokenizer.
pub fn oracle_key(phrase: &str) -> String {
    let chars: Vec<char> = phrase.chars().collect();
    let mut spaced = String::new();
    for (i, c) in chars.iter().enumerate() {
        if i > 0 && c.is_uppercase() && (chars[i - 1].is_lowercase() || chars[i - 1].is_ascii_digit()) {
            spaced.push(' ');
        }
        spaced.push(if c.is_alphanumeric() { *c } else { ' ' });
    }
    spaced.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn oracle_kind_ok(hint: KindHint, kind: TermKind) -> bool {
    match hint {
        KindHint::Any => true,
        KindHint::Class => kind == TermKind::Class,
        KindHint::ObjectProperty => kind == TermKind::ObjectProperty,
        KindHint::DataProperty => kind == TermKind::DataProperty,
    }
}

/// For each descriptor, the matching `(iri, rule)` pairs found by trying
/// every term label against the phrase and every listed synonym pair.
pub fn oracle_evidence(
    ir: &InformationalRequirement,
    inv: &OntologyInventory,
    pairs: &[(String, String)],
) -> Vec<BTreeSet<(String, MatchRule)>> {
    ir.components
        .iter()
        .map(|d| {
            let dk = oracle_key(&d.phrase);
            let mut found = BTreeSet::new();
            for t in inv.terms.values() {
                if !oracle_kind_ok(d.kind_hint, t.kind) {
                    continue;
                }
                let mut direct = false;
                let mut syn = false;
                for l in &t.labels {
                    let lk = oracle_key(l);
                    if lk.is_empty() || dk.is_empty() {
                        continue;
                    }
                    if lk == dk {
                        direct = true;
                    }
                    for (a, b) in pairs {
                        let (ka, kb) = (oracle_key(a), oracle_key(b));
                        if (ka == dk && kb == lk) || (kb == dk && ka == lk) {
                            syn = true;
                        }
                    }
                }
                if direct {
                    found.insert((t.iri.clone(), MatchRule::Direct));
                } else if syn {
                    found.insert((t.iri.clone(), MatchRule::Synonym));
                }
            }
            found
        })
        .collect()
}

// ---------------------------------------------------------------- eligibility

pub fn random_profile(rng: &mut ChaCha8Rng) -> BuildingProfile {
    let protocols = ["BACnet", "OpenADR", "Modbus", "DNP3"];
    let mut b = BuildingProfile::unknown(format!("b{}", rng.gen_range(0..1000)));
    b.shed_capability_kw = rng.gen_bool(0.7).then(|| f64::from(rng.gen_range(0..=600u32)));
    b.metering_present = rng.gen_bool(0.7);
    if b.metering_present {
        b.meter_interval_s = rng.gen_bool(0.7).then(|| *[1u32, 60, 300, 900, 3600].choose(rng).unwrap());
        b.meter_accuracy_pct = rng.gen_bool(0.7).then(|| *[0.5, 1.0, 2.0, 5.0].choose(rng).unwrap());
    }
    b.telemetry_present = rng.gen_bool(0.6);
    if b.telemetry_present {
        for p in protocols {
            if rng.gen_bool(0.3) {
                b.telemetry_protocols.insert(p.to_string());
            }
        }
        b.telemetry_interval_s = rng.gen_bool(0.7).then(|| *[1u32, 2, 4, 10, 60].choose(rng).unwrap());
        b.telemetry_accuracy_pct = rng.gen_bool(0.7).then(|| *[0.5, 1.0, 2.0].choose(rng).unwrap());
    }
    b.fastest_ramp_min = rng.gen_bool(0.7).then(|| f64::from(rng.gen_range(0..=40u32)));
    b.max_sustain_min = rng.gen_bool(0.7).then(|| f64::from(rng.gen_range(0..=300u32)));
    b.in_aggregation = rng.gen_bool(0.5);
    b
}

pub fn random_program(rng: &mut ChaCha8Rng, id: usize) -> ProgramRequirements {
    let service = *ServiceType::ALL.choose(rng).unwrap();
    let mut p = ProgramRequirements::open(format!("p{id:03}"), service);
    let maybe = |rng: &mut ChaCha8Rng, v: f64| rng.gen_bool(0.5).then_some(v);
    p.min_resource_size_kw = {
        let v = f64::from(rng.gen_range(0..=500u32));
        maybe(rng, v)
    };
    p.min_reduction_kw = {
        let v = f64::from(rng.gen_range(0..=500u32));
        maybe(rng, v)
    };
    p.availability_window = rng.gen_bool(0.2).then(|| "weekdays".to_string());
    p.aggregation_allowed = rng.gen_bool(0.5);
    p.after_the_fact_metering_required = rng.gen_bool(0.6);
    if p.after_the_fact_metering_required {
        p.meter_interval_s = rng.gen_bool(0.5).then(|| *[60u32, 300, 900, 3600].choose(rng).unwrap());
        p.meter_accuracy_pct = rng.gen_bool(0.5).then(|| *[1.0, 2.0].choose(rng).unwrap());
        p.meter_reporting_deadline_h = rng.gen_bool(0.3).then_some(60.0);
    }
    p.telemetry_required = rng.gen_bool(0.5);
    if p.telemetry_required {
        for proto in ["openadr", "DNP3", "bac-net", "ICCP"] {
            if rng.gen_bool(0.3) {
                p.comm_protocols.insert(proto.to_string());
            }
        }
        p.telemetry_interval_s = rng.gen_bool(0.5).then(|| *[2u32, 4, 10, 60].choose(rng).unwrap());
        p.telemetry_accuracy_pct = rng.gen_bool(0.5).then(|| *[1.0, 2.0].choose(rng).unwrap());
    }
    p.advance_notification_min = rng.gen_bool(0.3).then_some(60.0);
    p.lead_time_min = {
        let v = f64::from(rng.gen_range(0..=60u32));
        maybe(rng, v)
    };
    p.sustained_response_min = {
        let v = f64::from(rng.gen_range(1..=240u32));
        maybe(rng, v)
    };
    p.recovery_period_min = rng.gen_bool(0.3).then_some(30.0);
    p.non_participation_notice = rng.gen_bool(0.3);
    p
}

fn squash(s: &str) -> String {
    s.to_lowercase().chars().filter(char::is_ascii_alphanumeric).collect()
}

fn cmp(have: Option<f64>, need: f64, higher_is_better: bool) -> Verdict {
    match have {
        None => Verdict::Unknown,
        Some(h) if (higher_is_better && h >= need) || (!higher_is_better && h <= need) => Verdict::Satisfied,
        Some(_) => Verdict::Unsatisfied,
    }
}

/// Requirement name and verdict for every requirement the program states,
/// in the fixed evaluation order.
pub fn oracle_verdicts(b: &BuildingProfile, p: &ProgramRequirements, t: &ServiceTiming) -> Vec<(&'static str, Verdict)> {
    use Verdict::*;
    let gate = |present: bool, v: Verdict| if present { v } else { Unsatisfied };
    let mut out = Vec::new();
    if let Some(min) = p.min_resource_size_kw {
        let v = if p.aggregation_allowed && b.in_aggregation { Satisfied } else { cmp(b.shed_capability_kw, min, true) };
        out.push(("Minimum Eligible Resource Size", v));
    }
    if let Some(min) = p.min_reduction_kw {
        out.push(("Minimum Reduction Amount", cmp(b.shed_capability_kw, min, true)));
    }
    if p.availability_window.is_some() {
        out.push(("Availability", Unknown));
    }
    if p.after_the_fact_metering_required {
        out.push(("After-the-Fact Metering", if b.metering_present { Satisfied } else { Unsatisfied }));
    }
    if let Some(need) = p.meter_interval_s {
        out.push(("Meter Interval", gate(b.metering_present, cmp(b.meter_interval_s.map(f64::from), f64::from(need), false))));
    }
    if let Some(need) = p.meter_accuracy_pct {
        out.push(("Meter Accuracy", gate(b.metering_present, cmp(b.meter_accuracy_pct, need, false))));
    }
    if p.telemetry_required {
        out.push(("Telemetry", if b.telemetry_present { Satisfied } else { Unsatisfied }));
    }
    if !p.comm_protocols.is_empty() {
        let v = if !b.telemetry_present {
            Unsatisfied
        } else if b.telemetry_protocols.is_empty() {
            Unknown
        } else if p.comm_protocols.iter().any(|x| b.telemetry_protocols.iter().any(|y| squash(x) == squash(y))) {
            Satisfied
        } else {
            Unsatisfied
        };
        out.push(("Communication Protocol", v));
    }
    if let Some(need) = p.telemetry_interval_s {
        let v = gate(b.telemetry_present, cmp(b.telemetry_interval_s.map(f64::from), f64::from(need), false));
        out.push(("Telemetry Reporting Interval", v));
    }
    if let Some(need) = p.telemetry_accuracy_pct {
        out.push(("Telemetry Accuracy", gate(b.telemetry_present, cmp(b.telemetry_accuracy_pct, need, false))));
    }
    if let Some(lead) = p.lead_time_min {
        out.push(("Lead Time for Reduction", cmp(b.fastest_ramp_min, lead.min(t.ramp_min_hi), false)));
    }
    if let Some(need) = p.sustained_response_min {
        out.push(("Sustained Response Period", cmp(b.max_sustain_min, need, true)));
    }
    out
}

pub fn oracle_overall(v: &[(&str, Verdict)]) -> Overall {
    if v.iter().any(|(_, x)| *x == Verdict::Unsatisfied) {
        Overall::Ineligible
    } else if v.iter().any(|(_, x)| *x == Verdict::Unknown) {
        Overall::NeedsData
    } else {
        Overall::Eligible
    }
}

/// Reports re-sorted by an insertion sort on the documented ranking.
pub fn oracle_sort(mut reports: Vec<EligibilityReport>) -> Vec<EligibilityReport> {
    let rank = |r: &EligibilityReport| {
        let tier = match r.overall {
            Overall::Eligible => 0,
            Overall::NeedsData => 1,
            Overall::Ineligible => 2,
        };
        let unknown = if tier == 1 { r.verdicts.iter().filter(|v| v.verdict == Verdict::Unknown).count() } else { 0 };
        (tier, unknown, r.program_id.clone())
    };
    for i in 1..reports.len() {
        let mut j = i;
        while j > 0 && rank(&reports[j - 1]) > rank(&reports[j]) {
            reports.swap(j - 1, j);
            j -= 1;
        }
    }
    reports
}
