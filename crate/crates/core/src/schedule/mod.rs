// SPDX-License-Identifier: Apache-2.0

//! Mobility-driven list scheduling under I/O and memory constraints.
//!
//! The scheduler walks the cycles of one iteration. At each cycle it ranks
//! the ready operations by mobility, then margin (ALAP minus the current
//! cycle), then burst preference, then node id, drops those whose operands
//! cannot be read this cycle, and assigns the rest to operator instances.
//! An operation with positive margin that cannot be placed is delayed. At
//! zero margin a missing operator is created (auto allocation) and a memory
//! conflict aborts the run with a [`ScheduleFailure`].

mod list;
mod registers;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constraints::{CgNodeKind, ConstraintGraph, Direction, OperatorLibrary};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::memory::{AccessRequest, MemoryMapping};
use crate::{Cycle, Duration};

pub(crate) use list::{access_record, assemble};
pub use list::{
    assign_step, rank_executable, schedule, Assignment, OperatorInstance, OperatorPool, Ranking, SchedContext,
    StepOutcome,
};
pub use registers::{estimate_registers, io_bus_count};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledOp {
    pub cycle: Cycle,
    pub node: NodeId,
    pub class: String,
    pub instance: u32,
    pub latency: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledAccess {
    pub cycle: Cycle,
    /// Position in the bank's access sequence; later accesses see the
    /// address of earlier ones when their cost is determined.
    pub order: u32,
    pub data: NodeId,
    pub kind: AccessKind,
    /// Consumer of a read, producer of a write.
    pub op: NodeId,
    pub bank: String,
    pub port: u32,
    pub cost: Duration,
    pub sequential: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledTransfer {
    pub cycle: Cycle,
    pub data: NodeId,
    pub dir: Direction,
    /// `None` for data outside the I/O specification; their cycle is the
    /// first use (inputs) or production (outputs).
    pub bus: Option<String>,
}

/// One iteration's schedule. Records are sorted by cycle, then node id
/// (operations, transfers) or access order (accesses).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub latency: Duration,
    pub latency_bound: Duration,
    pub cadence: Duration,
    /// Instances allocated per operator class, every library class listed.
    pub pool: BTreeMap<String, u32>,
    pub operations: Vec<ScheduledOp>,
    pub accesses: Vec<ScheduledAccess>,
    pub transfers: Vec<ScheduledTransfer>,
}

impl Schedule {
    pub fn op(&self, node: NodeId) -> Option<&ScheduledOp> {
        self.operations.iter().find(|o| o.node == node)
    }

    pub fn transfer(&self, data: NodeId) -> Option<&ScheduledTransfer> {
        self.transfers.iter().find(|t| t.data == data)
    }

    /// Re-sorts every record list into canonical order.
    pub fn normalize(&mut self) {
        self.operations.sort_by_key(|o| (o.cycle, o.node));
        self.accesses.sort_by_key(|a| (a.cycle, a.order, a.data));
        self.transfers.sort_by_key(|t| (t.cycle, t.data));
    }

    /// Last output cycle minus first input cycle, plus one. Inputs outside
    /// the specification count as present at cycle 0.
    pub fn measured_latency(&self) -> Duration {
        let first_in = self
            .transfers
            .iter()
            .filter(|t| t.dir == Direction::In)
            .map(|t| if t.bus.is_some() { t.cycle } else { 0 })
            .min()
            .unwrap_or(0);
        self.transfers
            .iter()
            .filter(|t| t.dir == Direction::Out)
            .map(|t| t.cycle)
            .max()
            .map(|last| (last + 1).saturating_sub(first_in))
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schedule serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from_json)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    MemoryConflictAtZeroMargin,
    FixedAllocationExhausted,
    InfeasibleWindows,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::MemoryConflictAtZeroMargin => "memory-conflict-at-zero-margin",
            FailureReason::FixedAllocationExhausted => "fixed-allocation-exhausted",
            FailureReason::InfeasibleWindows => "infeasible-windows",
        })
    }
}

/// Abort diagnostic: the cycle, the operation that could not be placed, the
/// operator class it needed and the bank it could not reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFailure {
    pub cycle: Cycle,
    pub operation: NodeId,
    pub operator_class: Option<String>,
    pub bank: Option<String>,
    pub reason: FailureReason,
}

impl fmt::Display for ScheduleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at cycle {}: operation {}",
            self.reason, self.cycle, self.operation
        )?;
        if let Some(c) = &self.operator_class {
            write!(f, " (class {c})")?;
        }
        if let Some(b) = &self.bank {
            write!(f, ", bank {b}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScheduleFailure {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum AllocationMode {
    /// One instance per used class to start; more are created at zero margin.
    #[default]
    Auto,
    /// Fixed instance counts per class name; absent classes get none.
    Fixed(BTreeMap<String, u32>),
}

impl AllocationMode {
    /// Parses `auto` or `fixed:<class>=<count>,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "auto" {
            return Ok(AllocationMode::Auto);
        }
        let body = text
            .strip_prefix("fixed:")
            .ok_or_else(|| Error::Library(format!("allocation `{text}` is neither `auto` nor `fixed:...`")))?;
        let mut counts = BTreeMap::new();
        for item in body.split(',').filter(|s| !s.is_empty()) {
            let (name, n) = item
                .split_once('=')
                .ok_or_else(|| Error::Library(format!("allocation entry `{item}` lacks `=`")))?;
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| Error::Library(format!("allocation count `{n}` is not a number")))?;
            counts.insert(name.trim().to_string(), n);
        }
        Ok(AllocationMode::Fixed(counts))
    }

    pub fn validate(&self, lib: &OperatorLibrary) -> Result<()> {
        if let AllocationMode::Fixed(counts) = self {
            for name in counts.keys() {
                if lib.class_index(name).is_none() {
                    return Err(Error::Library(format!("allocation names unknown class `{name}`")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllocationMode::Auto => f.write_str("auto"),
            AllocationMode::Fixed(c) => {
                let parts: Vec<String> = c.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "fixed:{}", parts.join(","))
            }
        }
    }
}

/// A node placed by the scheduler: an operation, or a write into memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchedUnit {
    /// Index into the constraint graph.
    pub node: usize,
    /// Operation id, or the written datum for writes.
    pub sfg: NodeId,
    /// Operator class; `None` for writes.
    pub class: Option<usize>,
    pub latency: Duration,
    /// Memory accesses issued in the unit's start cycle, in operand order.
    pub requests: Vec<AccessRequest>,
    /// `(unit, delay)`: this unit starts at least `delay` cycles after it.
    pub deps: Vec<(usize, Duration)>,
    /// Earliest start from input arrivals.
    pub earliest: Cycle,
    /// Producer of a write.
    pub producer: Option<NodeId>,
}

/// Collects the scheduled units of `gcg` in topological order. Reads are
/// folded into their consumer: a read's incoming write dependency becomes
/// a dependency of the consumer.
///
/// # Panics
///
/// If a memory datum read or written by the graph has no placement.
pub fn build_units(gcg: &ConstraintGraph, mapping: &MemoryMapping) -> Vec<SchedUnit> {
    let mut unit_of = vec![usize::MAX; gcg.nodes.len()];
    let mut units = Vec::new();
    for (i, n) in gcg.scheduled_units() {
        unit_of[i] = units.len();
        let (class, producer) = match n.kind {
            CgNodeKind::Operation { class, .. } => (Some(class), None),
            CgNodeKind::Write { producer, .. } => (None, Some(producer)),
            _ => unreachable!(),
        };
        let mut earliest = 0;
        let mut deps = Vec::new();
        let mut requests = Vec::new();
        let place = |data: NodeId| {
            let p = mapping
                .placement
                .get(&data)
                .unwrap_or_else(|| panic!("memory datum {data} has no placement"));
            (p.bank, p.address, data)
        };
        if let CgNodeKind::Write { data, .. } = n.kind {
            requests.push(place(data));
        }
        let mut reads = Vec::new();
        for e in gcg.preds(i) {
            let p = &gcg.nodes[e.from];
            match p.kind {
                CgNodeKind::Input => earliest = earliest.max(p.arrival.unwrap_or(0)),
                CgNodeKind::Operation { .. } | CgNodeKind::Write { .. } => deps.push((unit_of[e.from], e.delay)),
                CgNodeKind::Read { data, pos, .. } => {
                    reads.push((pos, data));
                    for w in gcg.preds(e.from) {
                        deps.push((unit_of[w.from], w.delay + e.delay));
                    }
                }
                CgNodeKind::Output => unreachable!("outputs have no successors"),
            }
        }
        reads.sort();
        requests.extend(reads.into_iter().map(|(_, d)| place(d)));
        units.push(SchedUnit {
            node: i,
            sfg: n.sfg,
            class,
            latency: n.latency,
            requests,
            deps,
            earliest,
            producer,
        });
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_parsing() {
        assert_eq!(AllocationMode::parse("auto").unwrap(), AllocationMode::Auto);
        let f = AllocationMode::parse("fixed:mult=2,add=1").unwrap();
        assert_eq!(f.to_string(), "fixed:add=1,mult=2");
        assert!(AllocationMode::parse("fixed:mult").is_err());
        assert!(AllocationMode::parse("greedy").is_err());
        let lib = OperatorLibrary::unit_latency();
        assert!(f.validate(&lib).is_ok());
        assert!(AllocationMode::parse("fixed:div=1").unwrap().validate(&lib).is_err());
    }

    #[test]
    fn failure_reason_spelling() {
        let j = serde_json::to_string(&FailureReason::MemoryConflictAtZeroMargin).unwrap();
        assert_eq!(j, "\"memory-conflict-at-zero-margin\"");
    }

    #[test]
    fn empty_schedule_latency() {
        assert_eq!(Schedule::default().measured_latency(), 0);
    }
}
