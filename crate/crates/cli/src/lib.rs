//! Front-end plumbing shared by the binary and the integration tests:
//! the output formats and the acceptance-criteria runner.

#![forbid(unsafe_code)]

pub mod acceptance;
pub mod report;
