// SPDX-License-Identifier: Apache-2.0

//! Built-in reference instances: the `c = (a * var1) + (b * var2)` graph
//! with its I/O sequences and bank mappings.

use std::collections::BTreeMap;

use crate::constraints::{Bus, Direction, IoConstraintSpec, Transfer};
use crate::graph::{Edge, NodeId, NodeKind, OpKind, Sfg, SfgNode};
use crate::memory::{Bank, BankId, MemoryMapping};
use crate::Duration;

pub const A: NodeId = NodeId(0);
pub const B: NodeId = NodeId(1);
pub const VAR1: NodeId = NodeId(2);
pub const VAR2: NodeId = NodeId(3);
/// `a * var1`
pub const MUL_A: NodeId = NodeId(4);
/// `b * var2`
pub const MUL_B: NodeId = NodeId(5);
pub const ADD: NodeId = NodeId(6);
pub const C: NodeId = NodeId(7);

/// `c = (a * var1) + (b * var2)` with `var1`, `var2` in memory.
pub fn reference_sfg() -> Sfg {
    let nodes = vec![
        SfgNode::new(A, NodeKind::Input, "a"),
        SfgNode::new(B, NodeKind::Input, "b"),
        SfgNode::new(VAR1, NodeKind::MemData, "var1").with_value(0.5),
        SfgNode::new(VAR2, NodeKind::MemData, "var2").with_value(-1.5),
        SfgNode::operation(MUL_A, OpKind::Mul, "m1"),
        SfgNode::operation(MUL_B, OpKind::Mul, "m2"),
        SfgNode::operation(ADD, OpKind::Add, "s"),
        SfgNode::new(C, NodeKind::Output, "c"),
    ];
    let e = |from, to, pos| Edge { from, to, pos };
    let edges = vec![
        e(A, MUL_A, 0),
        e(VAR1, MUL_A, 1),
        e(B, MUL_B, 0),
        e(VAR2, MUL_B, 1),
        e(MUL_A, ADD, 0),
        e(MUL_B, ADD, 1),
        e(ADD, C, 0),
    ];
    Sfg { nodes, edges }
}

fn bus(name: &str, direction: Direction) -> Bus {
    Bus {
        name: name.into(),
        direction,
        width: None,
    }
}

/// `S = (a|b, c)`: `a` and `b` on two input buses at cycle 0, `c` on the
/// output bus in the last cycle of the latency window.
pub fn parallel_io(g: &Sfg, latency: Duration) -> IoConstraintSpec {
    let id = |l: &str| g.find_label(l).expect("reference labels").id;
    IoConstraintSpec {
        buses: vec![
            bus("bus1", Direction::In),
            bus("bus2", Direction::In),
            bus("bus3", Direction::Out),
        ],
        transfers: vec![
            Transfer {
                data: id("a"),
                bus: 0,
                offset: 0,
            },
            Transfer {
                data: id("b"),
                bus: 1,
                offset: 0,
            },
            Transfer {
                data: id("c"),
                bus: 2,
                offset: latency - 1,
            },
        ],
        cadence: latency,
        latency_bound: latency,
    }
}

/// `S = (a, b, c)`: `a` then `b` on one input bus, `c` in the last cycle.
pub fn sequential_io(g: &Sfg, latency: Duration) -> IoConstraintSpec {
    let id = |l: &str| g.find_label(l).expect("reference labels").id;
    IoConstraintSpec {
        buses: vec![bus("bus1", Direction::In), bus("bus2", Direction::Out)],
        transfers: vec![
            Transfer {
                data: id("a"),
                bus: 0,
                offset: 0,
            },
            Transfer {
                data: id("b"),
                bus: 0,
                offset: 1,
            },
            Transfer {
                data: id("c"),
                bus: 1,
                offset: latency - 1,
            },
        ],
        cadence: latency,
        latency_bound: latency,
    }
}

/// One single-port bank (`t_seq` 1, `t_rand` 2) holding `var2@0`, `var1@1`.
pub fn single_bank(g: &Sfg) -> MemoryMapping {
    let id = |l: &str| g.find_label(l).expect("reference labels").id;
    let mut m = MemoryMapping {
        banks: vec![Bank::new("bank0", 1, 1, 2)],
        placement: BTreeMap::new(),
    };
    m.place(id("var2"), BankId(0), 0).place(id("var1"), BankId(0), 1);
    m
}

/// Two single-port banks: `var1` in `bank0`, `var2` in `bank1`.
pub fn two_banks(g: &Sfg) -> MemoryMapping {
    let id = |l: &str| g.find_label(l).expect("reference labels").id;
    let mut m = MemoryMapping {
        banks: vec![Bank::new("bank0", 1, 1, 2), Bank::new("bank1", 1, 1, 2)],
        placement: BTreeMap::new(),
    };
    m.place(id("var1"), BankId(0), 0).place(id("var2"), BankId(1), 0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_sfg, tests::REFERENCE};

    #[test]
    fn builder_matches_document() {
        let mut built = reference_sfg();
        for n in &mut built.nodes {
            n.value = None;
        }
        assert_eq!(built, parse_sfg(REFERENCE).unwrap());
    }

    #[test]
    fn specs_validate() {
        let g = reference_sfg();
        for l in [2, 3, 4] {
            parallel_io(&g, l).validate(&g).unwrap();
            sequential_io(&g, l).validate(&g).unwrap();
        }
    }
}
