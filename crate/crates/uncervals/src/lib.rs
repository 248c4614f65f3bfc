//! Command-line tool, file formats and parallel experiment runners for
//! conformal prediction sets under interval censoring.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
