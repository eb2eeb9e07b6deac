//! Batch jobs over `wallcross-core`: job documents, a table cache and reports.

pub mod cache;
pub mod config;
pub mod report;
