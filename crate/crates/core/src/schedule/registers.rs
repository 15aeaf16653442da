// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{AccessKind, Schedule};
use crate::constraints::Direction;
use crate::graph::{NodeId, NodeKind, Sfg};
use crate::Cycle;

/// Bus counts `(inputs, outputs)`: distinct named buses, plus the peak
/// number of same-cycle transfers among data without a bus.
pub fn io_bus_count(s: &Schedule) -> (usize, usize) {
    let count = |dir: Direction| {
        let named: BTreeSet<&str> = s
            .transfers
            .iter()
            .filter(|t| t.dir == dir)
            .filter_map(|t| t.bus.as_deref())
            .collect();
        let mut per_cycle: BTreeMap<Cycle, usize> = BTreeMap::new();
        for t in s.transfers.iter().filter(|t| t.dir == dir && t.bus.is_none()) {
            *per_cycle.entry(t.cycle).or_default() += 1;
        }
        named.len() + per_cycle.values().copied().max().unwrap_or(0)
    };
    (count(Direction::In), count(Direction::Out))
}

/// Register estimate: the peak number of values held between cycles plus
/// one buffer per I/O bus.
///
/// An operation result is held from the cycle after its last execution
/// cycle through its last use; an input from the cycle after its transfer
/// through its last use. A use is the start of a consuming operation, the
/// transfer of an output or the write of a memory datum. Memory reads feed
/// their consumer directly and hold no register.
pub fn estimate_registers(s: &Schedule, g: &Sfg) -> usize {
    let adj = g.adjacency();
    let kind: HashMap<NodeId, NodeKind> = g.nodes.iter().map(|n| (n.id, n.kind)).collect();
    let op_start: HashMap<NodeId, (Cycle, Cycle)> =
        s.operations.iter().map(|o| (o.node, (o.cycle, o.latency))).collect();
    let transfer: HashMap<NodeId, Cycle> = s.transfers.iter().map(|t| (t.data, t.cycle)).collect();
    let write: HashMap<NodeId, Cycle> = s
        .accesses
        .iter()
        .filter(|a| a.kind == AccessKind::Write)
        .map(|a| (a.data, a.cycle))
        .collect();

    let use_cycle = |consumer: NodeId| -> Option<Cycle> {
        match kind.get(&consumer)? {
            NodeKind::Operation => op_start.get(&consumer).map(|(c, _)| *c),
            NodeKind::Output => transfer.get(&consumer).copied(),
            NodeKind::MemData => write.get(&consumer).copied(),
            _ => None,
        }
    };
    let mut intervals = Vec::new();
    for n in &g.nodes {
        let available = match n.kind {
            NodeKind::Operation => op_start.get(&n.id).map(|(c, l)| c + l),
            NodeKind::Input => transfer.get(&n.id).map(|c| c + 1),
            _ => None,
        };
        let Some(from) = available else { continue };
        let last = adj.consumers(n.id).iter().filter_map(|(c, _)| use_cycle(*c)).max();
        if let Some(to) = last.filter(|&to| to >= from) {
            intervals.push((from, to));
        }
    }
    let end = intervals.iter().map(|(_, to)| *to as usize + 2).max().unwrap_or(0);
    let mut delta = vec![0i64; end];
    for (from, to) in intervals {
        delta[from as usize] += 1;
        delta[to as usize + 1] -= 1;
    }
    let mut live = 0i64;
    let mut peak = 0i64;
    for d in delta {
        live += d;
        peak = peak.max(live);
    }
    let (i, o) = io_bus_count(s);
    peak as usize + i + o
}
