//! Image generators, brute-force oracles and property checks shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod checks;
pub mod oracle;
