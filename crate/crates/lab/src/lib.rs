//! Host-side half of the laboratory: text formats, JSON reports, rayon
//! drivers over the core kernels, and the `dalab` command line.

pub mod campaign;
pub mod cli;
pub mod commands;
pub mod format;
pub mod par;
pub mod report;
