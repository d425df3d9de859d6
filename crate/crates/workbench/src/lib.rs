//! Command-line workbench over `katetov-core`: scenarios, certificates and the acceptance suite.

pub mod certificate;
pub mod checks;
pub mod cli;
pub mod oracle;
pub mod request;
pub mod scenario;
pub mod suite;
