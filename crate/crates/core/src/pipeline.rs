// SPDX-License-Identifier: Apache-2.0

//! End-to-end flow: constraint graphs, windows, feasibility, memory model,
//! scheduling and report.

use crate::constraints::{
    build_acg, build_iocg, check_feasibility, compute_time_windows, merge_gcg, ConstraintGraph, FeasibilityReport,
    IoConstraintSpec, OperatorLibrary, TimeWindows,
};
use crate::error::Result;
use crate::graph::Sfg;
use crate::memory::{apply_mapping, build_mcg, extract_memory_table, Mcg, MemoryMapping, PlacementMode};
use crate::report::{build_report, ArchitectureReport};
use crate::schedule::{schedule, AllocationMode, Schedule, ScheduleFailure};

/// A complete scheduling problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub graph: Sfg,
    pub lib: OperatorLibrary,
    pub spec: IoConstraintSpec,
    pub mapping: MemoryMapping,
}

/// Derived models of a [`Problem`].
#[derive(Clone, Debug)]
pub struct Prepared {
    pub gcg: ConstraintGraph,
    pub windows: TimeWindows,
    pub feasibility: FeasibilityReport,
    pub mapping: MemoryMapping,
    pub mcg: Mcg,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Infeasible(FeasibilityReport),
    Failed(ScheduleFailure),
    Scheduled(Box<Schedule>, ArchitectureReport),
}

impl Outcome {
    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            Outcome::Scheduled(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn report(&self) -> Option<&ArchitectureReport> {
        match self {
            Outcome::Scheduled(_, r) => Some(r),
            _ => None,
        }
    }

    pub fn failure(&self) -> Option<&ScheduleFailure> {
        match self {
            Outcome::Failed(f) => Some(f),
            _ => None,
        }
    }
}

impl Problem {
    /// Validates the inputs against each other and builds every model.
    pub fn prepare(&self) -> Result<Prepared> {
        self.spec.validate(&self.graph)?;
        let acg = build_acg(&self.graph, &self.lib)?;
        let gcg = merge_gcg(&acg, &build_iocg(&self.spec)?, &self.spec)?;
        let windows = compute_time_windows(&gcg);
        let feasibility = check_feasibility(&gcg, &windows, &self.spec);
        let mapping = apply_mapping(&extract_memory_table(&self.graph), &self.mapping, PlacementMode::Strict)?;
        let mcg = build_mcg(&mapping);
        Ok(Prepared {
            gcg,
            windows,
            feasibility,
            mapping,
            mcg,
        })
    }

    pub fn run(&self, mode: &AllocationMode) -> Result<Outcome> {
        mode.validate(&self.lib)?;
        let p = self.prepare()?;
        Ok(self.run_prepared(&p, mode))
    }

    pub fn run_prepared(&self, p: &Prepared, mode: &AllocationMode) -> Outcome {
        if !p.feasibility.feasible() {
            return Outcome::Infeasible(p.feasibility.clone());
        }
        match schedule(&p.gcg, &p.windows, &p.mcg, &p.mapping, &self.lib, &self.spec, mode) {
            Ok(s) => {
                let mut report = build_report(&s, &self.graph, &self.spec, &p.mapping);
                report.diagnostics = p.feasibility.diagnostics.clone();
                Outcome::Scheduled(Box::new(s), report)
            }
            Err(f) => Outcome::Failed(f),
        }
    }

    pub fn with_latency(&self, latency: crate::Duration) -> Problem {
        let mut p = self.clone();
        p.spec.latency_bound = latency;
        p
    }
}
