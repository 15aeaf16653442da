// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::constraints::Direction;
use crate::graph::{NodeKind, Sfg};
use crate::memory::MemoryMapping;
use crate::schedule::Schedule;

/// Single-point corruptions of a valid schedule. Each must be reported by
/// the checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Starts an operation together with an operand producer, or past the
    /// latency bound when it has none.
    ShiftStart,
    /// Binds an operation to a busy or unallocated instance.
    SwapInstance,
    /// Moves an access onto a port slot already taken, or off its cycle.
    MoveAccess,
    /// Records the wrong access cost.
    FlipCost,
    /// Removes an operation.
    DropOp,
    /// Moves an output transfer off its offset or past the latency bound.
    ShiftTransfer,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::ShiftStart,
        Mutation::SwapInstance,
        Mutation::MoveAccess,
        Mutation::FlipCost,
        Mutation::DropOp,
        Mutation::ShiftTransfer,
    ];
}

/// Applies `kind` to a copy of `s`. `None` when the schedule has nothing
/// the mutation can touch.
pub fn mutate(kind: Mutation, s: &Schedule, g: &Sfg, mapping: &MemoryMapping) -> Option<Schedule> {
    let mut m = s.clone();
    match kind {
        Mutation::ShiftStart => {
            let adj = g.adjacency();
            let is_op = |id| g.node(id).is_some_and(|n| n.kind == NodeKind::Operation);
            let hit = s.operations.iter().enumerate().find_map(|(k, o)| {
                let pred = adj.operands(o.node).iter().find(|(_, p)| is_op(*p))?;
                Some((k, s.op(pred.1)?.cycle))
            });
            match hit {
                Some((k, c)) => m.operations[k].cycle = c,
                None => {
                    let o = m.operations.first_mut()?;
                    o.cycle += s.latency_bound;
                }
            }
        }
        Mutation::SwapInstance => {
            let ops = &s.operations;
            let pair = (0..ops.len()).find_map(|i| {
                (0..ops.len())
                    .find(|&j| {
                        let (a, b) = (&ops[i], &ops[j]);
                        i != j
                            && a.class == b.class
                            && a.instance != b.instance
                            && a.cycle < b.cycle + b.latency.max(1)
                            && b.cycle < a.cycle + a.latency.max(1)
                    })
                    .map(|j| (i, j))
            });
            match pair {
                Some((i, j)) => m.operations[i].instance = ops[j].instance,
                None => {
                    let o = m.operations.first_mut()?;
                    o.instance = s.pool.get(&o.class).copied().unwrap_or(0);
                }
            }
        }
        Mutation::MoveAccess => {
            let acc = &s.accesses;
            let pair = (0..acc.len()).find_map(|i| {
                (0..acc.len())
                    .find(|&j| {
                        i != j
                            && acc[i].bank == acc[j].bank
                            && acc[i].port == acc[j].port
                            && acc[i].cycle != acc[j].cycle
                    })
                    .map(|j| (i, j))
            });
            match pair {
                Some((i, j)) => m.accesses[i].cycle = acc[j].cycle,
                None => m.accesses.first_mut()?.cycle += 1,
            }
        }
        Mutation::FlipCost => {
            let a = m.accesses.first_mut()?;
            let bank = mapping.banks.iter().find(|b| b.name == a.bank)?;
            if bank.t_seq == bank.t_rand {
                a.cost += 1;
            } else {
                a.cost = if a.sequential { bank.t_rand } else { bank.t_seq };
                a.sequential = !a.sequential;
            }
        }
        Mutation::DropOp => {
            if m.operations.is_empty() {
                return None;
            }
            m.operations.remove(0);
        }
        Mutation::ShiftTransfer => {
            let t = m.transfers.iter_mut().find(|t| t.dir == Direction::Out)?;
            match t.bus {
                Some(_) => t.cycle += 1,
                None => t.cycle = s.latency_bound,
            }
        }
    }
    m.normalize();
    Some(m)
}
