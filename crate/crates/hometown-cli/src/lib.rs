//! File formats, JSON reports, and the `hometown` command-line frontend for
//! the prediction pipeline in `hometown-core`.

#![deny(unsafe_code)]

pub mod commands;
pub mod formats;
pub mod report;
