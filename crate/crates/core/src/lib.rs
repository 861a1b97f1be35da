//! Classical, qubit and device-independent bounds for Cabello's nonlocality
//! argument in the two-input, two-output Bell scenario.

// Index loops mirror the tensor index notation of the kernels.
#![allow(clippy::needless_range_loop)]

pub mod mathcore;
pub mod npa;
pub mod optimize;
pub mod qubit;
pub mod scenario;
pub mod selftest;
pub mod table;
