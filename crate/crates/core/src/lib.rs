//! Exact, desk-scale laboratory for three-move proofs of knowledge read as
//! sheaves over the views an observer can hold.

pub mod config;
pub mod dist;
pub mod group;
pub mod protocol;
pub mod record;
pub mod sheaf;
pub mod site;
pub mod suite;
pub mod sweep;
pub mod view;

pub use config::{parse_config, SuiteConfig};
pub use suite::{emit_report, run_suite, SuiteReport};
