// SPDX-License-Identifier: Apache-2.0

//! Builds `c = (a * var1) + (b * var2)` by hand, validates it, evaluates it
//! and prints it as JSON and DOT.
//!
//! ```bash
//! cargo run --example build_graph
//! ```

use std::collections::BTreeMap;

use hlsched::graph::{evaluate, export_dot, serialize_sfg, validate_sfg, Edge, NodeId, NodeKind, OpKind, Sfg, SfgNode};

fn main() -> hlsched::Result<()> {
    let n = NodeId;
    let g = Sfg {
        nodes: vec![
            SfgNode::new(n(0), NodeKind::Input, "a"),
            SfgNode::new(n(1), NodeKind::Input, "b"),
            SfgNode::new(n(2), NodeKind::MemData, "var1").with_value(0.5),
            SfgNode::new(n(3), NodeKind::MemData, "var2").with_value(-1.5),
            SfgNode::operation(n(4), OpKind::Mul, "m1"),
            SfgNode::operation(n(5), OpKind::Mul, "m2"),
            SfgNode::operation(n(6), OpKind::Add, "s"),
            SfgNode::new(n(7), NodeKind::Output, "c"),
        ],
        edges: [
            (0, 4, 0),
            (2, 4, 1),
            (1, 5, 0),
            (3, 5, 1),
            (4, 6, 0),
            (5, 6, 1),
            (6, 7, 0),
        ]
        .into_iter()
        .map(|(from, to, pos)| Edge {
            from: n(from),
            to: n(to),
            pos,
        })
        .collect(),
    };
    assert!(validate_sfg(&g).is_empty());
    assert_eq!(g, hlsched::corpus::reference_sfg());

    let inputs = BTreeMap::from([(n(0), 2.0), (n(1), 4.0)]);
    let outputs = evaluate(&g, &inputs)?;
    println!("c = 2 * 0.5 + 4 * -1.5 = {}", outputs[&n(7)]);

    println!("{}", serialize_sfg(&g));
    println!("{}", export_dot(&g));
    Ok(())
}
