// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap};

use super::{validate_sfg, NodeId, NodeKind, Sfg};
use crate::error::{Error, Result};

/// Evaluates the graph numerically. Inputs missing from `inputs` read as
/// zero; memory data start from their node value (zero when absent) and
/// are overwritten by their writer. Returns the value of every output.
pub fn evaluate(g: &Sfg, inputs: &BTreeMap<NodeId, f64>) -> Result<BTreeMap<NodeId, f64>> {
    if let Some(v) = validate_sfg(g).into_iter().next() {
        return Err(Error::Validation(v.message));
    }
    let order = g.topological_order().expect("validated graph is acyclic");
    let index = g.node_index();
    let adj = g.adjacency();
    let mut values: HashMap<NodeId, f64> = HashMap::with_capacity(g.nodes.len());
    let mut outputs = BTreeMap::new();
    for id in order {
        let node = &g.nodes[index[&id]];
        let operand = |pos: usize| values[&adj.operands(id)[pos].1];
        let v = match node.kind {
            NodeKind::Input => inputs.get(&id).copied().unwrap_or(0.0),
            NodeKind::Constant => node.value.unwrap_or(0.0),
            NodeKind::MemData => match adj.operands(id).first() {
                Some(_) => operand(0),
                None => node.value.unwrap_or(0.0),
            },
            NodeKind::Operation => node.op.expect("validated").apply(operand(0), operand(1)),
            NodeKind::Output => {
                let v = operand(0);
                outputs.insert(id, v);
                v
            }
        };
        values.insert(id, v);
    }
    Ok(outputs)
}
