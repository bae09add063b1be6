//! Governance extensions for delegated work between agents: delegation
//! contracts, claimed-vs-attested quality metadata, typed failures and
//! verification lineage, plus a seeded simulator for claim-based routing.

pub mod cli;
pub mod contract;
pub mod error_model;
pub mod experiments;
pub mod protocol;
pub mod router;
pub mod sim;
pub mod stats;
