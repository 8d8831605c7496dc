//! Oracles and fixtures shared by the integration tests and the acceptance
//! suite.
#![allow(dead_code)]

pub mod grad;
pub mod mini;
pub mod sampling;
pub mod svm;
