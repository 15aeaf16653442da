// SPDX-License-Identifier: Apache-2.0

//! Scheduling of DSP signal-flow graphs under I/O timing and memory bank
//! constraints.

pub mod cli;
pub mod constraints;
pub mod corpus;
pub mod error;
pub mod explore;
pub mod graph;
pub mod memory;
pub mod pipeline;
pub mod report;
pub mod schedule;
pub mod testgen;
pub mod verify;

pub use error::{Error, Result};

/// Zero-based clock cycle within one iteration.
pub type Cycle = u32;
/// Number of clock cycles.
pub type Duration = u32;
