// SPDX-License-Identifier: Apache-2.0

//! Independent schedule checker, exhaustive small-instance scheduler and
//! schedule mutators used to test the checker.

mod brute;
mod mutate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::constraints::{
    compute_time_windows, CgNodeKind, ConstraintGraph, Direction, IoConstraintSpec, OperatorLibrary,
};
use crate::graph::{NodeId, NodeKind, Sfg};
use crate::memory::MemoryMapping;
use crate::schedule::{AccessKind, Schedule, ScheduledAccess};
use crate::Cycle;

pub use brute::{brute_force_feasible, brute_force_min_latency, BRUTE_FORCE_LIMIT};
pub use mutate::{mutate, Mutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Dependency,
    OperatorOverlap,
    PortOverlap,
    IoTiming,
    Window,
    Unscheduled,
    AccessCost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub nodes: Vec<NodeId>,
    /// Operator instance (`class#rank`) or bank involved.
    pub resource: Option<String>,
    pub cycle: Option<Cycle>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

/// `(start, end, operation)` occupancy of an operator instance.
type Busy = (Cycle, Cycle, NodeId);

struct Sink(Vec<Violation>);

impl Sink {
    fn push(
        &mut self,
        kind: ViolationKind,
        nodes: Vec<NodeId>,
        resource: Option<String>,
        cycle: Option<Cycle>,
        message: String,
    ) {
        self.0.push(Violation {
            kind,
            nodes,
            resource,
            cycle,
            message,
        });
    }
}

/// Checks `s` against every constraint and returns the violations found.
///
/// Timing model: an operation reads its memory operands in its start cycle
/// and may start `latency` cycles after an operation it consumes; an output
/// value exists from the last cycle of its producer; a write may start once
/// its producer completes and a read of written data one access later.
/// Accesses of a bank are replayed by `(cycle, order)` to derive their
/// cost: `t_seq` for the first access or the address following the previous
/// one, `t_rand` otherwise.
pub fn verify_schedule(
    s: &Schedule,
    g: &Sfg,
    gcg: &ConstraintGraph,
    spec: &IoConstraintSpec,
    mapping: &MemoryMapping,
    lib: &OperatorLibrary,
) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Sink(Vec::new());
    let windows = compute_time_windows(gcg);

    // operations: exactly once, right class and latency
    let mut op_start: HashMap<NodeId, Cycle> = HashMap::new();
    for o in &s.operations {
        let Some(i) = gcg
            .index_of(o.node)
            .filter(|&i| matches!(gcg.nodes[i].kind, CgNodeKind::Operation { .. }))
        else {
            out.push(
                Unscheduled,
                vec![o.node],
                None,
                Some(o.cycle),
                format!("{} is not an operation", o.node),
            );
            continue;
        };
        if op_start.insert(o.node, o.cycle).is_some() {
            out.push(
                Unscheduled,
                vec![o.node],
                None,
                Some(o.cycle),
                format!("{} scheduled twice", o.node),
            );
        }
        let CgNodeKind::Operation { op, .. } = gcg.nodes[i].kind else {
            unreachable!()
        };
        match lib.classes.iter().find(|c| c.name == o.class) {
            Some(c) if c.executes.contains(&op) && c.latency == o.latency => {}
            _ => out.push(
                OperatorOverlap,
                vec![o.node],
                Some(o.class.clone()),
                Some(o.cycle),
                format!(
                    "{} `{}` cannot run on class `{}` with latency {}",
                    o.node, op, o.class, o.latency
                ),
            ),
        }
    }
    for (_, n) in gcg.operations() {
        if !op_start.contains_key(&n.sfg) {
            out.push(
                Unscheduled,
                vec![n.sfg],
                None,
                None,
                format!("operation {} is not scheduled", n.sfg),
            );
        }
    }

    // operator instances
    let mut by_instance: BTreeMap<(&str, u32), Vec<Busy>> = BTreeMap::new();
    for o in &s.operations {
        let res = format!("{}#{}", o.class, o.instance);
        if o.instance >= s.pool.get(&o.class).copied().unwrap_or(0) {
            out.push(
                OperatorOverlap,
                vec![o.node],
                Some(res),
                Some(o.cycle),
                format!("{} bound to an unallocated instance", o.node),
            );
            continue;
        }
        by_instance
            .entry((o.class.as_str(), o.instance))
            .or_default()
            .push((o.cycle, o.cycle + o.latency, o.node));
    }
    for ((class, rank), mut list) in by_instance {
        list.sort();
        for w in list.windows(2) {
            if w[1].0 < w[0].1 {
                out.push(
                    OperatorOverlap,
                    vec![w[0].2, w[1].2],
                    Some(format!("{class}#{rank}")),
                    Some(w[1].0),
                    format!("{} and {} overlap on {class}#{rank}", w[0].2, w[1].2),
                );
            }
        }
    }

    // accesses: one per read and write node
    let mut reads: HashMap<(NodeId, NodeId), Vec<&ScheduledAccess>> = HashMap::new();
    let mut writes: HashMap<NodeId, Vec<&ScheduledAccess>> = HashMap::new();
    for a in &s.accesses {
        match a.kind {
            AccessKind::Read => reads.entry((a.data, a.op)).or_default().push(a),
            AccessKind::Write => writes.entry(a.data).or_default().push(a),
        }
    }
    let mut expected_reads: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    for n in &gcg.nodes {
        if let CgNodeKind::Read { data, consumer, .. } = n.kind {
            *expected_reads.entry((data, consumer)).or_default() += 1;
        }
    }
    for (key, want) in &expected_reads {
        let got = reads.get(key).map_or(0, Vec::len);
        if got != *want {
            out.push(
                Unscheduled,
                vec![key.0, key.1],
                None,
                None,
                format!("{} reads {} {} times, expected {}", key.1, key.0, got, want),
            );
        }
    }
    for (key, list) in &reads {
        if !expected_reads.contains_key(key) {
            out.push(
                Unscheduled,
                vec![key.0, key.1],
                None,
                Some(list[0].cycle),
                format!("{} does not read {}", key.1, key.0),
            );
        }
        for a in list {
            if op_start.get(&a.op).is_some_and(|&c| c != a.cycle) {
                out.push(
                    AccessCost,
                    vec![a.data, a.op],
                    Some(a.bank.clone()),
                    Some(a.cycle),
                    format!(
                        "read of {} at cycle {} but {} starts at {}",
                        a.data, a.cycle, a.op, op_start[&a.op]
                    ),
                );
            }
        }
    }
    let mut write_start: HashMap<NodeId, Cycle> = HashMap::new();
    for n in &gcg.nodes {
        if let CgNodeKind::Write { data, .. } = n.kind {
            match writes.get(&data).map(Vec::as_slice) {
                Some([a]) => {
                    write_start.insert(data, a.cycle);
                }
                other => out.push(
                    Unscheduled,
                    vec![data],
                    None,
                    None,
                    format!("write of {} appears {} times", data, other.map_or(0, <[_]>::len)),
                ),
            }
        }
    }
    for (data, list) in &writes {
        if gcg.write_of(*data).is_none() {
            out.push(
                Unscheduled,
                vec![*data],
                None,
                Some(list[0].cycle),
                format!("{data} is never written"),
            );
        }
    }

    // bank ports and access costs
    let mut per_bank: BTreeMap<&str, Vec<&ScheduledAccess>> = BTreeMap::new();
    for a in &s.accesses {
        per_bank.entry(a.bank.as_str()).or_default().push(a);
    }
    let cadence = spec.cadence.max(1);
    for (name, mut list) in per_bank {
        let Some(bid) = mapping.bank_index(name) else {
            for a in list {
                out.push(
                    PortOverlap,
                    vec![a.data],
                    Some(name.to_string()),
                    Some(a.cycle),
                    format!("access to undeclared bank `{name}`"),
                );
            }
            continue;
        };
        let bank = mapping.bank(bid);
        let n_slots = (cadence / bank.t_seq).max(1);
        list.sort_by_key(|a| (a.cycle, a.order));
        let mut used: HashMap<(u32, u32), NodeId> = HashMap::new();
        let mut last: Option<u32> = None;
        for a in list {
            let placed = mapping.placement.get(&a.data);
            if placed.map(|p| p.bank) != Some(bid) {
                out.push(
                    PortOverlap,
                    vec![a.data],
                    Some(name.to_string()),
                    Some(a.cycle),
                    format!("{} is not stored in `{name}`", a.data),
                );
                continue;
            }
            let addr = placed.unwrap().address;
            let sequential = last.is_none_or(|l| l.checked_add(1) == Some(addr));
            let expect = if sequential { bank.t_seq } else { bank.t_rand };
            last = Some(addr);
            if a.cost != expect || a.sequential != sequential {
                out.push(
                    AccessCost,
                    vec![a.data],
                    Some(name.to_string()),
                    Some(a.cycle),
                    format!(
                        "access to {} costs {} (sequential {}), expected {}",
                        a.data, a.cost, a.sequential, expect
                    ),
                );
            }
            if a.port >= bank.ports {
                out.push(
                    PortOverlap,
                    vec![a.data],
                    Some(name.to_string()),
                    Some(a.cycle),
                    format!("`{name}` has no port {}", a.port),
                );
                continue;
            }
            let first = a.cycle / bank.t_seq;
            let count = a.cost.max(1).div_ceil(bank.t_seq);
            if first + count > n_slots {
                out.push(
                    PortOverlap,
                    vec![a.data],
                    Some(name.to_string()),
                    Some(a.cycle),
                    format!("access to {} runs past slot {} of `{name}`", a.data, n_slots),
                );
            }
            for slot in first..first + count {
                if let Some(prev) = used.insert((a.port, slot), a.data) {
                    out.push(
                        PortOverlap,
                        vec![prev, a.data],
                        Some(name.to_string()),
                        Some(a.cycle),
                        format!(
                            "{} and {} share port {} of `{name}` in slot {}",
                            prev, a.data, a.port, slot
                        ),
                    );
                }
            }
        }
    }

    // I/O transfers
    let mut transfer: HashMap<NodeId, Cycle> = HashMap::new();
    for t in &s.transfers {
        transfer.insert(t.data, t.cycle);
        let node = gcg.index_of(t.data).map(|i| &gcg.nodes[i]);
        let dir_ok = matches!(
            (node.map(|n| n.kind), t.dir),
            (Some(CgNodeKind::Input), Direction::In) | (Some(CgNodeKind::Output), Direction::Out)
        );
        if !dir_ok {
            out.push(
                IoTiming,
                vec![t.data],
                t.bus.clone(),
                Some(t.cycle),
                format!("{} is not an I/O node of that direction", t.data),
            );
            continue;
        }
        match spec.transfer_of(t.data) {
            Some(want) => {
                let bus = &spec.buses[want.bus].name;
                if t.cycle != want.offset || t.bus.as_deref() != Some(bus.as_str()) {
                    out.push(
                        IoTiming,
                        vec![t.data],
                        t.bus.clone(),
                        Some(t.cycle),
                        format!(
                            "{} moves at cycle {} on `{}`, specified {} on `{}`",
                            t.data,
                            t.cycle,
                            t.bus.as_deref().unwrap_or("no bus"),
                            want.offset,
                            bus
                        ),
                    );
                }
            }
            None if t.bus.is_some() => {
                out.push(
                    IoTiming,
                    vec![t.data],
                    t.bus.clone(),
                    Some(t.cycle),
                    format!("{} has no specified transfer", t.data),
                );
            }
            None => {}
        }
    }
    for n in &g.nodes {
        if matches!(n.kind, NodeKind::Input | NodeKind::Output) && !transfer.contains_key(&n.id) {
            out.push(IoTiming, vec![n.id], None, None, format!("{} has no transfer", n.id));
        }
    }

    // dependencies and windows over the constraint graph
    let time = |i: usize| -> Option<i64> {
        let n = &gcg.nodes[i];
        let c = match n.kind {
            CgNodeKind::Input => n.arrival.or(Some(0)),
            CgNodeKind::Output => transfer.get(&n.sfg).copied(),
            CgNodeKind::Operation { .. } => op_start.get(&n.sfg).copied(),
            CgNodeKind::Read { consumer, .. } => op_start.get(&consumer).copied(),
            CgNodeKind::Write { data, .. } => write_start.get(&data).copied(),
        };
        c.map(i64::from)
    };
    for e in &gcg.edges {
        let (Some(tu), Some(tv)) = (time(e.from), time(e.to)) else {
            continue;
        };
        if tv < tu + i64::from(e.delay) {
            let to = &gcg.nodes[e.to];
            let kind = if to.kind == CgNodeKind::Output {
                IoTiming
            } else {
                Dependency
            };
            out.push(
                kind,
                vec![gcg.nodes[e.from].sfg, to.sfg],
                None,
                Some(tv as Cycle),
                format!(
                    "{} at cycle {} needs {} from cycle {}",
                    to.sfg,
                    tv,
                    gcg.nodes[e.from].sfg,
                    tu + i64::from(e.delay)
                ),
            );
        }
    }
    for (i, n) in gcg.nodes.iter().enumerate() {
        let Some(t) = time(i) else { continue };
        match n.kind {
            CgNodeKind::Operation { .. } | CgNodeKind::Write { .. } => {
                if t < windows.asap[i] || t > windows.alap[i] {
                    out.push(
                        Window,
                        vec![n.sfg],
                        None,
                        Some(t as Cycle),
                        format!(
                            "{} starts at {} outside [{}, {}]",
                            n.sfg, t, windows.asap[i], windows.alap[i]
                        ),
                    );
                }
            }
            CgNodeKind::Output => {
                if let Some(d) = n.deadline.filter(|&d| t > i64::from(d)) {
                    out.push(
                        IoTiming,
                        vec![n.sfg],
                        None,
                        Some(t as Cycle),
                        format!("{} leaves at {} after deadline {}", n.sfg, t, d),
                    );
                }
            }
            _ => {}
        }
    }
    if s.latency != s.measured_latency() || s.latency > spec.latency_bound {
        out.push(
            IoTiming,
            vec![],
            None,
            None,
            format!(
                "recorded latency {} (measured {}, bound {})",
                s.latency,
                s.measured_latency(),
                spec.latency_bound
            ),
        );
    }

    out.0
        .sort_by(|a, b| (a.kind, a.cycle, &a.nodes).cmp(&(b.kind, b.cycle, &b.nodes)));
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::pipeline::Problem;
    use crate::schedule::AllocationMode;

    fn reference(latency: u32, two_banks: bool) -> Problem {
        let g = corpus::reference_sfg();
        Problem {
            spec: corpus::parallel_io(&g, latency),
            mapping: if two_banks {
                corpus::two_banks(&g)
            } else {
                corpus::single_bank(&g)
            },
            lib: OperatorLibrary::unit_latency(),
            graph: g,
        }
    }

    fn check(p: &Problem, s: &Schedule) -> Vec<Violation> {
        let pre = p.prepare().unwrap();
        verify_schedule(s, &p.graph, &pre.gcg, &p.spec, &pre.mapping, &p.lib)
    }

    fn scheduled(p: &Problem) -> Schedule {
        p.run(&AllocationMode::Auto)
            .unwrap()
            .schedule()
            .expect("schedules")
            .clone()
    }

    #[test]
    fn scheduler_output_is_clean() {
        for (l, two) in [(3, false), (2, true), (5, false)] {
            let p = reference(l, two);
            assert_eq!(check(&p, &scheduled(&p)), vec![]);
        }
    }

    #[test]
    fn both_multiplies_at_cycle_zero_overlap_the_port() {
        let p = reference(3, false);
        let mut s = scheduled(&p);
        for o in &mut s.operations {
            if o.node == corpus::MUL_A {
                o.cycle = 0;
            }
        }
        for a in &mut s.accesses {
            if a.op == corpus::MUL_A {
                a.cycle = 0;
            }
        }
        let v = check(&p, &s);
        assert!(v.iter().any(|v| v.kind == ViolationKind::PortOverlap), "{v:?}");
    }

    #[test]
    fn missing_operation_is_unscheduled() {
        let p = reference(3, false);
        let mut s = scheduled(&p);
        s.operations.retain(|o| o.node != corpus::ADD);
        let v = check(&p, &s);
        assert!(
            v.iter()
                .any(|v| v.kind == ViolationKind::Unscheduled && v.nodes == [corpus::ADD]),
            "{v:?}"
        );
    }

    #[test]
    fn every_mutation_is_caught() {
        for p in [reference(3, false), reference(2, true)] {
            let s = scheduled(&p);
            for kind in Mutation::ALL {
                let m = mutate(kind, &s, &p.graph, &p.mapping).expect("applicable");
                assert_ne!(m, s, "{kind:?} changed nothing");
                assert!(!check(&p, &m).is_empty(), "{kind:?} went unnoticed");
            }
        }
    }

    #[test]
    fn exhaustive_schedules_are_clean() {
        for (l, two) in [(3, false), (2, true), (4, false)] {
            let p = reference(l, two);
            let s = brute_force_feasible(&p.graph, &p.lib, &p.mapping, &p.spec, None)
                .unwrap()
                .unwrap();
            assert_eq!(check(&p, &s), vec![], "L={l}");
        }
    }
}
