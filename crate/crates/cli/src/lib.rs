//! Dataset handling, experiment runner and verification harness for the
//! `subtraj` clustering library.

pub mod dataset;
pub mod experiment;
pub mod memory;
pub mod synth;
pub mod verify;
