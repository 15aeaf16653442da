// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

use super::{CgNodeKind, ConstraintGraph, IoConstraintSpec};
use crate::graph::NodeId;
use crate::Duration;

/// ASAP/ALAP start cycles per constraint-graph node (same indexing as
/// [`ConstraintGraph::nodes`]). Values are signed so that infeasible
/// windows stay representable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeWindows {
    pub asap: Vec<i64>,
    pub alap: Vec<i64>,
}

impl TimeWindows {
    pub fn mobility(&self, i: usize) -> i64 {
        self.alap[i] - self.asap[i]
    }

    /// `(asap, alap, mobility)` of every operation, keyed by SFG node.
    pub fn by_operation(&self, gcg: &ConstraintGraph) -> BTreeMap<NodeId, (i64, i64, i64)> {
        gcg.operations()
            .map(|(i, n)| (n.sfg, (self.asap[i], self.alap[i], self.mobility(i))))
            .collect()
    }
}

fn own_bound(gcg: &ConstraintGraph, i: usize, horizon: i64) -> Option<i64> {
    let n = &gcg.nodes[i];
    match n.kind {
        CgNodeKind::Output => Some(n.deadline.map(i64::from).unwrap_or(horizon - 1)),
        _ if gcg.succs(i).next().is_none() => {
            let span = i64::from(n.latency.max(1));
            Some(horizon - span)
        }
        _ => None,
    }
}

/// Longest-path ASAP from the input arrivals and latest starts meeting all
/// deadlines. Negative mobility is returned as is.
pub fn compute_time_windows(gcg: &ConstraintGraph) -> TimeWindows {
    let n = gcg.nodes.len();
    let mut asap = vec![0i64; n];
    for i in 0..n {
        let mut t = gcg.nodes[i].arrival.map(i64::from).unwrap_or(0);
        for e in gcg.preds(i) {
            t = t.max(asap[e.from] + i64::from(e.delay));
        }
        asap[i] = t;
    }
    let horizon = i64::from(gcg.horizon());
    let mut alap = vec![i64::MAX; n];
    for i in (0..n).rev() {
        let mut t = own_bound(gcg, i, horizon).unwrap_or(i64::MAX);
        for e in gcg.succs(i) {
            t = t.min(alap[e.to] - i64::from(e.delay));
        }
        alap[i] = t;
    }
    TimeWindows { asap, alap }
}

/// Minimum iteration length from dependencies alone (all inputs at cycle
/// 0): the last output is produced in cycle `critical_path - 1` and every
/// dangling operation or write completes by `critical_path`.
pub fn critical_path(gcg: &ConstraintGraph) -> Duration {
    let n = gcg.nodes.len();
    let mut start = vec![0i64; n];
    let mut end = 0i64;
    for i in 0..n {
        let mut t = 0;
        for e in gcg.preds(i) {
            t = t.max(start[e.from] + i64::from(e.delay));
        }
        start[i] = t;
        let node = &gcg.nodes[i];
        let finish = match node.kind {
            CgNodeKind::Output => t + 1,
            CgNodeKind::Operation { .. } | CgNodeKind::Write { .. } => t + i64::from(node.latency),
            CgNodeKind::Input | CgNodeKind::Read { .. } => 0,
        };
        end = end.max(finish);
    }
    end as Duration
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    /// Offsets fit the cadence, the iteration fits the cadence, and the
    /// critical path and constrained I/O span fit the latency bound.
    pub cadence_ok: bool,
    /// Every output can be produced by its deadline given the input
    /// arrivals (every window is non-empty).
    pub output_dates_ok: bool,
    pub critical_path: Duration,
    pub diagnostics: Vec<String>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.cadence_ok && self.output_dates_ok
    }
}

pub fn check_feasibility(gcg: &ConstraintGraph, windows: &TimeWindows, spec: &IoConstraintSpec) -> FeasibilityReport {
    let mut diagnostics = Vec::new();
    let cp = critical_path(gcg);

    let mut cadence_ok = true;
    for t in &spec.transfers {
        if t.offset >= spec.cadence {
            cadence_ok = false;
            diagnostics.push(format!(
                "transfer of {} at offset {} exceeds cadence {}",
                t.data, t.offset, spec.cadence
            ));
        }
    }
    if spec.latency_bound > spec.cadence {
        cadence_ok = false;
        diagnostics.push(format!(
            "latency bound {} exceeds cadence {}: iterations would overlap",
            spec.latency_bound, spec.cadence
        ));
    }
    if cp > spec.latency_bound {
        cadence_ok = false;
        diagnostics.push(format!(
            "critical path of {} cycles exceeds latency bound {}",
            cp, spec.latency_bound
        ));
    }
    let first_in = gcg
        .nodes
        .iter()
        .filter(|n| n.kind == CgNodeKind::Input)
        .map(|n| n.arrival.unwrap_or(0))
        .min()
        .unwrap_or(0);
    let last_out = gcg
        .nodes
        .iter()
        .filter(|n| n.kind == CgNodeKind::Output && n.bus.is_some())
        .filter_map(|n| n.deadline)
        .max();
    if let Some(last) = last_out {
        let span = i64::from(last) - i64::from(first_in) + 1;
        if span > i64::from(spec.latency_bound) {
            cadence_ok = false;
            diagnostics.push(format!(
                "constrained outputs end {} cycles after the first input, above latency bound {}",
                span, spec.latency_bound
            ));
        }
    }

    let mut output_dates_ok = true;
    for (i, node) in gcg.nodes.iter().enumerate() {
        if windows.asap[i] > windows.alap[i] {
            output_dates_ok = false;
            let what = match node.kind {
                CgNodeKind::Output => "output",
                CgNodeKind::Input => "input",
                CgNodeKind::Operation { .. } => "operation",
                CgNodeKind::Read { .. } => "read of",
                CgNodeKind::Write { .. } => "write of",
            };
            diagnostics.push(format!(
                "{} {}: earliest cycle {} is past latest cycle {}",
                what, node.sfg, windows.asap[i], windows.alap[i]
            ));
        }
    }

    FeasibilityReport {
        cadence_ok,
        output_dates_ok,
        critical_path: cp,
        diagnostics,
    }
}
