//! Coverage analysis of building and demand-response ontologies against the
//! informational requirements of incentive-based demand response.

pub mod catalog;
pub mod coverage;
pub mod eligibility;
pub mod forge;
pub mod fixtures;
pub mod inventory;
pub mod matching;
