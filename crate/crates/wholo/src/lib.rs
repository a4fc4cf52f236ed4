//! Command-line front end for `wholo-core`: expansions, bases, congruence
//! verification sweeps and their JSON reports.

pub mod cli;
pub mod json;
pub mod sweep;
