use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::anyhow;
use flexcover_core::catalog::{
    curve_as_points, discovery_curve, fit_log_trend, load_catalog, validate_catalog, Catalog, IRClass, Stage, BUILTIN,
};
use flexcover_core::coverage::{full_report, render_report, ReportFormat};
use flexcover_core::eligibility::{
    assess_portfolio, builtin_timings, load_overrides, load_profile, load_programs, parse_profile, parse_programs,
    parse_timings, profile_from_inventory, EligibilityReport, ProfileOverrides, ServiceTiming, ServiceType,
};
use flexcover_core::fixtures;
use flexcover_core::forge::{
    emit_ontology_text, generate_extensions_with, generate_iso_program_ontology_with, minimality_report,
    verify_closure, ExtensionSet, ForgeError, RuleTable,
};
use flexcover_core::inventory::{inventory_from_turtle, load_any, OntologyId, OntologyInventory};
use flexcover_core::matching::{
    build_matrix, compare_auto_vs_overlay, AdjudicationOverlay, AgreementReport, MatrixError, SatisfactionMatrix,
    SynonymTable,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Format, RunArgs};

/// Exit status 2 for bad input, 1 for broken internal invariants.
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

type Outcome<T = ()> = Result<T, Failure>;

trait InputContext<T> {
    fn input(self, what: &str) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self, what: &str) -> Outcome<T> {
        self.map_err(|e| Failure::Input(e.into().context(what.to_string())))
    }
}

fn internal(msg: String) -> Failure {
    Failure::Internal(anyhow!(msg))
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Markdown => ReportFormat::Markdown,
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::JsonRecords,
    }
}

fn emit(run: &RunArgs, text: &str) -> Outcome {
    match &run.out {
        Some(path) => std::fs::write(path, text).input(&format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_builtin(s: &str) -> bool {
    s == BUILTIN
}

struct Inputs {
    catalog: Catalog,
    inventories: Vec<OntologyInventory>,
    synonyms: SynonymTable,
    overlay: Option<AdjudicationOverlay>,
}

fn load_inventories(specs: &[String]) -> Outcome<Vec<OntologyInventory>> {
    if specs.is_empty() {
        return fixtures::inventories().input("cannot load shipped inventories");
    }
    let mut out = Vec::new();
    for spec in specs {
        let (id, path) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Input(anyhow!("inventory `{spec}` is not of the form <id>=<path>")))?;
        let id = OntologyId::parse(id.trim());
        let inv = if is_builtin(path) {
            match id {
                OntologyId::Brick => fixtures::brick(),
                OntologyId::Delta => fixtures::delta(),
                OntologyId::EfOnt => fixtures::efont(),
                OntologyId::Custom(ref c) => return Err(Failure::Input(anyhow!("no shipped inventory for `{c}`"))),
            }
            .input(&format!("cannot load shipped inventory {id}"))?
        } else {
            load_any(path, id.clone()).input(&format!("cannot load inventory {id}"))?
        };
        out.push(inv);
    }
    Ok(out)
}

fn load_inputs(run: &RunArgs) -> Outcome<Inputs> {
    let catalog = if is_builtin(&run.catalog) {
        fixtures::catalog().input("cannot load shipped catalog")?
    } else {
        load_catalog(&run.catalog).input("cannot load catalog")?
    };
    let violations = validate_catalog(&catalog);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Failure::Input(anyhow!("catalog fails validation:\n  {}", lines.join("\n  "))));
    }
    let inventories = load_inventories(&run.inventories)?;
    let synonyms = match run.synonyms.as_str() {
        "none" => SynonymTable::new(),
        s if is_builtin(s) => fixtures::synonyms().input("cannot load shipped synonyms")?,
        path => SynonymTable::load(path).input(&format!("cannot load synonyms {path}"))?,
    };
    let overlay = match run.overlay.as_deref() {
        None => None,
        Some(s) if is_builtin(s) => Some(fixtures::overlay().input("cannot load shipped overlay")?),
        Some(path) => Some(AdjudicationOverlay::load(path).input(&format!("cannot load overlay {path}"))?),
    };
    Ok(Inputs { catalog, inventories, synonyms, overlay })
}

fn matrix(inputs: &Inputs) -> Outcome<SatisfactionMatrix> {
    let m = build_matrix(&inputs.catalog, &inputs.inventories, &inputs.synonyms, inputs.overlay.as_ref())
        .input("cannot build satisfaction matrix")?;
    if !m.is_complete() {
        return Err(internal("satisfaction matrix is missing cells".into()));
    }
    Ok(m)
}

pub fn coverage(run: &RunArgs, agreement: bool) -> Outcome {
    let inputs = load_inputs(run)?;
    let m = matrix(&inputs)?;
    let overlay = inputs.overlay.as_ref();
    if agreement {
        let overlay = overlay.ok_or_else(|| Failure::Input(anyhow!("--agreement needs --overlay")))?;
        return emit(run, &render_agreement(&compare_auto_vs_overlay(&m, overlay), run.format)?);
    }
    let overrides = overlay.map(|o| o.denominator_overrides.clone()).unwrap_or_default();
    let report = full_report(&m, &inputs.catalog, &overrides).input("cannot compute coverage")?;
    if !report.is_complete() {
        return Err(internal("coverage report is missing cells".into()));
    }
    emit(run, &render_report(&report, report_format(run.format)))
}

fn render_agreement(r: &AgreementReport, format: Format) -> Outcome<String> {
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(r).map_err(|e| Failure::Internal(e.into()))? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header = ["ontology", "true_positive", "false_positive", "false_negative", "true_negative", "precision", "recall"];
            w.write_record(header).map_err(|e| Failure::Internal(e.into()))?;
            for (o, a) in &r.per_ontology {
                w.write_record([
                    o.to_string(),
                    a.true_positive.to_string(),
                    a.false_positive.to_string(),
                    a.false_negative.to_string(),
                    a.true_negative.to_string(),
                    format!("{:.4}", a.precision),
                    format!("{:.4}", a.recall),
                ])
                .map_err(|e| Failure::Internal(e.into()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Internal(anyhow!("{e}")))?;
            out = String::from_utf8(bytes).map_err(|e| Failure::Internal(e.into()))?;
        }
        Format::Markdown => {
            out.push_str("| Ontology | TP | FP | FN | TN | Precision | Recall |\n|---|---|---|---|---|---|---|\n");
            for (o, a) in &r.per_ontology {
                let _ = writeln!(
                    out,
                    "| {o} | {} | {} | {} | {} | {:.4} | {:.4} |",
                    a.true_positive, a.false_positive, a.false_negative, a.true_negative, a.precision, a.recall
                );
            }
            let _ = writeln!(out, "\nUnpinned cells: {}", r.unpinned);
            for d in &r.disagreements {
                let _ = writeln!(out, "- {} @ {}: matcher {}, overlay {}", d.ir_id, d.ontology_id, d.auto, d.pinned);
            }
        }
    }
    Ok(out)
}

pub fn match_ir(run: &RunArgs, ir_id: &str, ontology: &str, explain: bool) -> Outcome {
    let inputs = load_inputs(run)?;
    let ir = inputs.catalog.get(ir_id).ok_or_else(|| Failure::Input(anyhow!("unknown IR id `{ir_id}`")))?;
    let id = OntologyId::parse(ontology);
    if !inputs.inventories.iter().any(|i| i.ontology_id == id) {
        return Err(Failure::Input(anyhow!("ontology `{ontology}` is not loaded")));
    }
    let m = matrix(&inputs)?;
    let rec = m.get(ir_id, &id).ok_or_else(|| internal(format!("no record for {ir_id} @ {id}")))?;
    if run.format == Format::Json {
        let text = serde_json::to_string_pretty(rec).map_err(|e| Failure::Internal(e.into()))?;
        return emit(run, &(text + "\n"));
    }
    let mut out = String::new();
    let verdict = if rec.satisfied { "satisfied" } else { "unsatisfied" };
    let _ = write!(out, "{} @ {}: {verdict}", ir.id, id);
    if let Some(rule) = rec.satisfied_by {
        let _ = write!(out, " ({rule:?})");
    }
    if rec.satisfied != rec.auto_satisfied {
        let _ = write!(out, " [matcher: {}]", if rec.auto_satisfied { "satisfied" } else { "unsatisfied" });
    }
    out.push('\n');
    if explain {
        for d in &ir.components {
            let found: Vec<_> = rec.evidence.iter().filter(|e| &e.descriptor == d).collect();
            if found.is_empty() {
                let _ = writeln!(out, "  {}: no match", d.phrase);
            }
            for e in found {
                let _ = writeln!(out, "  {}: {} via {:?} on label \"{}\"", d.phrase, e.matched_iri, e.rule, e.matched_label);
            }
        }
        if let Some(note) = &rec.note {
            let _ = writeln!(out, "  note: {note}");
        }
    }
    emit(run, &out)
}

fn forge_failure(e: ForgeError) -> Failure {
    match e {
        ForgeError::Matrix(MatrixError::DuplicateOntology(_)) | ForgeError::Merge(_) => {
            Failure::Input(anyhow::Error::new(e).context("extension does not merge with the loaded inventories"))
        }
        other => Failure::Internal(other.into()),
    }
}

pub fn extend(run: &RunArgs, include_iso: bool, rules: &str, minimality: bool) -> Outcome {
    let inputs = load_inputs(run)?;
    let rules = if is_builtin(rules) {
        RuleTable::builtin()
    } else {
        RuleTable::load(rules).input(&format!("cannot load rule table {rules}"))?
    };
    let unknown = rules.unknown_targets(&inputs.catalog);
    if !unknown.is_empty() {
        return Err(Failure::Input(anyhow!("rule table names unknown IR ids: {}", unknown.join(", "))));
    }
    let m = matrix(&inputs)?;
    let mut sets = vec![generate_extensions_with(&m, &inputs.catalog, &rules)];
    if include_iso {
        sets.push(generate_iso_program_ontology_with(&rules));
    }

    if let Some(dir) = &run.out {
        std::fs::create_dir_all(dir).input(&format!("cannot create {}", dir.display()))?;
        for set in &sets {
            let name = format!("extension_{}.ttl", set.base_ontology.to_string().to_lowercase());
            let path = dir.join(name);
            std::fs::write(&path, emit_ontology_text(set)).input(&format!("cannot write {}", path.display()))?;
        }
    }

    let report = verify_closure(&inputs.inventories, &sets, &inputs.catalog, &inputs.synonyms, inputs.overlay.as_ref())
        .map_err(forge_failure)?;
    let mut out = render_report(&report, report_format(run.format));
    if minimality && run.format == Format::Markdown {
        out.push_str(&minimality_text(&inputs, &sets)?);
    }
    match &run.out {
        Some(dir) => {
            let path = dir.join(match run.format {
                Format::Markdown => "closure.md",
                Format::Csv => "closure.csv",
                Format::Json => "closure.json",
            });
            std::fs::write(&path, out).input(&format!("cannot write {}", path.display()))
        }
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn minimality_text(inputs: &Inputs, sets: &[ExtensionSet]) -> Outcome<String> {
    let mut out = String::from("\n| Proposal | Requirements lost without it |\n|---|---|\n");
    for i in 0..sets.len() {
        let extra: Vec<ExtensionSet> = sets.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s.clone()).collect();
        let entries = minimality_report(
            &inputs.inventories,
            &sets[i],
            &extra,
            &inputs.catalog,
            &inputs.synonyms,
            inputs.overlay.as_ref(),
        )
        .map_err(forge_failure)?;
        for e in entries {
            let lost = if e.lost_without.is_empty() { "none".to_string() } else { e.lost_without.join(", ") };
            let _ = writeln!(out, "| {} | {lost} |", e.source_rule);
        }
    }
    Ok(out)
}

pub fn eligibility(
    run: &RunArgs,
    profile: Option<&str>,
    model: Option<&Path>,
    overrides: Option<&Path>,
    programs: &str,
    timings: &str,
) -> Outcome {
    let timings: BTreeMap<ServiceType, ServiceTiming> = if is_builtin(timings) {
        builtin_timings()
    } else {
        let text = std::fs::read_to_string(timings).input(&format!("cannot read {timings}"))?;
        parse_timings(&text, timings).input("invalid timing table")?
    };
    let building = match (profile, model) {
        (_, Some(model)) => {
            let text = std::fs::read_to_string(model).input(&format!("cannot read {}", model.display()))?;
            let name = model.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let inv = inventory_from_turtle(&text, OntologyId::Custom(name), &model.display().to_string())
                .input("invalid building model")?;
            let o = match overrides {
                Some(p) => load_overrides(p).input("invalid profile overrides")?,
                None => ProfileOverrides::default(),
            };
            profile_from_inventory(&inv, &o)
        }
        (Some(p), None) if !is_builtin(p) => load_profile(p).input("invalid building profile")?,
        _ => parse_profile(&fixtures::read("building_profile.json").input("cannot read shipped profile")?, "builtin")
            .input("invalid shipped building profile")?,
    };
    let programs = if is_builtin(programs) {
        let text = fixtures::read("programs.json").input("cannot read shipped programs")?;
        parse_programs(&text, "builtin", &timings).input("invalid shipped programs")?
    } else {
        load_programs(programs, &timings).input("invalid program catalog")?
    };
    let reports = assess_portfolio(&building, &programs).input("cannot assess programs")?;
    let services: BTreeMap<&str, ServiceType> = programs.iter().map(|(p, _)| (p.program_id.as_str(), p.service_type)).collect();
    emit(run, &render_eligibility(&reports, &services, run.format)?)
}

fn render_eligibility(reports: &[EligibilityReport], services: &BTreeMap<&str, ServiceType>, format: Format) -> Outcome<String> {
    let service = |r: &EligibilityReport| services.get(r.program_id.as_str()).map(|s| format!("{s:?}")).unwrap_or_default();
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(reports).map_err(|e| Failure::Internal(e.into()))? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let write = |w: &mut csv::Writer<Vec<u8>>, rec: [String; 7]| w.write_record(rec).map_err(|e| Failure::Internal(e.into()));
            write(&mut w, ["building", "program", "service", "overall", "requirement", "verdict", "reason"].map(String::from))?;
            for r in reports {
                for v in &r.verdicts {
                    write(
                        &mut w,
                        [
                            r.building_id.clone(),
                            r.program_id.clone(),
                            service(r),
                            r.overall.to_string(),
                            v.requirement_name.clone(),
                            format!("{:?}", v.verdict),
                            v.reason.clone(),
                        ],
                    )?;
                }
            }
            let bytes = w.into_inner().map_err(|e| Failure::Internal(anyhow!("{e}")))?;
            String::from_utf8(bytes).map_err(|e| Failure::Internal(e.into()))
        }
        Format::Markdown => {
            let mut out = String::from("| Program | Service | Overall | Unknown |\n|---|---|---|---|\n");
            for r in reports {
                let _ = writeln!(out, "| {} | {} | {} | {} |", r.program_id, service(r), r.overall, r.unknown_count());
            }
            for r in reports {
                let _ = writeln!(out, "\n{} ({}):", r.program_id, r.building_id);
                for v in &r.verdicts {
                    let _ = writeln!(out, "- {}: {:?} ({})", v.requirement_name, v.verdict, v.reason);
                }
            }
            Ok(out)
        }
    }
}

fn read_ordering(path: &Path) -> Outcome<Vec<String>> {
    let text = std::fs::read_to_string(path).input(&format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

pub fn catalog_stats(run: &RunArgs, ordering: Option<&Path>, shuffle: bool) -> Outcome {
    let catalog = if is_builtin(&run.catalog) {
        fixtures::catalog().input("cannot load shipped catalog")?
    } else {
        load_catalog(&run.catalog).input("cannot load catalog")?
    };
    let order = match ordering {
        Some(p) => read_ordering(p)?,
        None => {
            let mut o = catalog.default_work_order();
            if shuffle {
                o.shuffle(&mut ChaCha8Rng::seed_from_u64(run.seed));
            }
            o
        }
    };
    let curve = discovery_curve(&catalog, &order).input("invalid work ordering")?;
    let fit = fit_log_trend(&curve_as_points(&curve)).input("cannot fit the discovery curve")?;
    let classes = catalog.class_counts();
    let stages = catalog.stage_counts();
    let summary = format!("irs={} works={} a={:.6} b={:.6} r2={:.6}", catalog.irs.len(), order.len(), fit.a, fit.b, fit.r2);

    let text = match run.format {
        Format::Markdown => {
            let mut out = String::from("| IR Class | IRs |\n|---|---|\n");
            for c in IRClass::ALL {
                let _ = writeln!(out, "| {} | {} |", c.display_name(), classes[&c]);
            }
            out.push_str("\n| Stage | IRs |\n|---|---|\n");
            for s in Stage::ALL {
                let _ = writeln!(out, "| {} | {} |", s.code(), stages.get(&s).copied().unwrap_or(0));
            }
            out.push_str("\n| Works | Unique IRs |\n|---|---|\n");
            for p in &curve {
                let _ = writeln!(out, "| {} | {} |", p.index, p.cumulative_unique);
            }
            let _ = writeln!(out, "\n{summary}");
            out
        }
        Format::Csv => {
            let mut out = String::from("section,key,value\n");
            for c in IRClass::ALL {
                let _ = writeln!(out, "class,{c:?},{}", classes[&c]);
            }
            for s in Stage::ALL {
                let _ = writeln!(out, "stage,{},{}", s.code(), stages.get(&s).copied().unwrap_or(0));
            }
            for p in &curve {
                let _ = writeln!(out, "curve,{},{}", p.index, p.cumulative_unique);
            }
            let _ = writeln!(out, "fit,a,{:.6}\nfit,b,{:.6}\nfit,r2,{:.6}", fit.a, fit.b, fit.r2);
            out
        }
        Format::Json => {
            let value = serde_json::json!({
                "classes": IRClass::ALL.iter().map(|c| (format!("{c:?}"), classes[c])).collect::<BTreeMap<_, _>>(),
                "stages": Stage::ALL.iter().map(|s| (s.code(), stages.get(s).copied().unwrap_or(0))).collect::<BTreeMap<_, _>>(),
                "curve": curve,
                "fit": fit,
            });
            serde_json::to_string_pretty(&value).map_err(|e| Failure::Internal(e.into()))? + "\n"
        }
    };
    emit(run, &text)?;
    if run.out.is_some() || run.format != Format::Markdown {
        eprintln!("{summary}");
    }
    Ok(())
}
