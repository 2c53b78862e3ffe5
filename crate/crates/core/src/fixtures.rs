//! Data files shipped with the crate, embedded at compile time.
//!
//! Setting `FLEXCOVER_DATA_DIR` makes [`read`] look for a file of the same
//! name in that directory first.

use std::borrow::Cow;
use std::path::PathBuf;

use thiserror::Error;

use crate::catalog::{Catalog, CatalogError};
use crate::inventory::{inventory_from_turtle, merge_inventories, parse_inventory_text, InventoryError, MergeError};
use crate::inventory::{OntologyId, OntologyInventory};
use crate::matching::{AdjudicationOverlay, OverlayError, SynonymError, SynonymTable};

pub const DATA_DIR_ENV: &str = "FLEXCOVER_DATA_DIR";

pub const CATALOG_JSON: &str = include_str!("../data/catalog.json");
pub const EXTENSION_RULES_JSON: &str = include_str!("../data/extension_rules.json");
pub const BRICK_TTL: &str = include_str!("../data/brick.ttl");
pub const DELTA_TTL: &str = include_str!("../data/delta.ttl");
pub const OPENADR_TTL: &str = include_str!("../data/openadr.ttl");
pub const EFONT_TSV: &str = include_str!("../data/efont.tsv");
pub const SYNONYMS_TSV: &str = include_str!("../data/synonyms.tsv");
pub const OVERLAY_JSON: &str = include_str!("../data/overlay.json");
pub const SERVICE_TIMINGS_JSON: &str = include_str!("../data/service_timings.json");
pub const PROGRAMS_JSON: &str = include_str!("../data/programs.json");
pub const BUILDING_PROFILE_JSON: &str = include_str!("../data/building_profile.json");
pub const BUILDING_MODEL_TTL: &str = include_str!("../data/building_model.ttl");

const EMBEDDED: &[(&str, &str)] = &[
    ("catalog.json", CATALOG_JSON),
    ("extension_rules.json", EXTENSION_RULES_JSON),
    ("brick.ttl", BRICK_TTL),
    ("delta.ttl", DELTA_TTL),
    ("openadr.ttl", OPENADR_TTL),
    ("efont.tsv", EFONT_TSV),
    ("synonyms.tsv", SYNONYMS_TSV),
    ("overlay.json", OVERLAY_JSON),
    ("service_timings.json", SERVICE_TIMINGS_JSON),
    ("programs.json", PROGRAMS_JSON),
    ("building_profile.json", BUILDING_PROFILE_JSON),
    ("building_model.ttl", BUILDING_MODEL_TTL),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    EMBEDDED.iter().map(|(n, _)| *n)
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("no shipped data file named `{0}`")]
    Unknown(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Synonyms(#[from] SynonymError),
    #[error(transparent)]
    Overlay(#[from] OverlayError),
}

/// Path a shipped file is read from when the data directory override is set.
pub fn override_path(name: &str) -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(|dir| PathBuf::from(dir).join(name))
}

pub fn read(name: &str) -> Result<Cow<'static, str>, FixtureError> {
    let embedded = EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
    match override_path(name) {
        Some(path) if path.exists() => std::fs::read_to_string(&path)
            .map(Cow::Owned)
            .map_err(|source| FixtureError::Io { path: path.display().to_string(), source }),
        _ => Ok(Cow::Borrowed(embedded)),
    }
}

pub fn catalog() -> Result<Catalog, FixtureError> {
    Ok(Catalog::from_json(&read("catalog.json")?)?)
}

pub fn brick() -> Result<OntologyInventory, FixtureError> {
    Ok(inventory_from_turtle(&read("brick.ttl")?, OntologyId::Brick, "brick.ttl")?)
}

/// DELTA together with the OpenADR ontology, as one support set.
pub fn delta() -> Result<OntologyInventory, FixtureError> {
    let delta = inventory_from_turtle(&read("delta.ttl")?, OntologyId::Delta, "delta.ttl")?;
    let oadr = inventory_from_turtle(&read("openadr.ttl")?, OntologyId::Custom("OpenADR".into()), "openadr.ttl")?;
    Ok(merge_inventories(&delta, &oadr)?)
}

pub fn efont() -> Result<OntologyInventory, FixtureError> {
    Ok(parse_inventory_text(&read("efont.tsv")?, OntologyId::EfOnt, "efont.tsv")?)
}

/// Brick, DELTA (with OpenADR) and EFOnt, in report column order.
pub fn inventories() -> Result<Vec<OntologyInventory>, FixtureError> {
    Ok(vec![brick()?, delta()?, efont()?])
}

pub fn synonyms() -> Result<SynonymTable, FixtureError> {
    Ok(SynonymTable::parse(&read("synonyms.tsv")?)?)
}

pub fn overlay() -> Result<AdjudicationOverlay, FixtureError> {
    Ok(AdjudicationOverlay::from_json(&read("overlay.json")?)?)
}
