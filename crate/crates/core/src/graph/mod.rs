// SPDX-License-Identifier: Apache-2.0

//! Signal-flow graph intermediate representation.
//!
//! An [`Sfg`] is a straight-line dataflow DAG made of five node kinds:
//! inputs and outputs exchanged with the environment over buses, numeric
//! constants, memory-resident data (`memdata`) and two-operand arithmetic
//! operations. Edges carry an operand position so that the consumers of a
//! value are ordered deterministically.
//!
//! Graphs are exchanged as JSON documents:
//!
//! ```json
//! {
//!   "nodes": [
//!     { "id": 0, "kind": "input", "label": "a" },
//!     { "id": 1, "kind": "memdata", "label": "var1", "value": 0.5 },
//!     { "id": 2, "kind": "operation", "op": "*", "label": "m0" },
//!     { "id": 3, "kind": "output", "label": "c" }
//!   ],
//!   "edges": [
//!     { "from": 0, "to": 2, "pos": 0 },
//!     { "from": 1, "to": 2, "pos": 1 },
//!     { "from": 2, "to": 3, "pos": 0 }
//!   ]
//! }
//! ```
//!
//! [`serialize_sfg`] writes nodes sorted by id and edges sorted by
//! `(to, pos)`, so serialized graphs are byte-stable.

mod dot;
mod eval;
mod fft;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dot::export_dot;
pub use eval::evaluate;
pub use fft::{fft_counts, generate_fft_sfg, FftCounts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Input,
    Output,
    Constant,
    #[serde(alias = "mem")]
    MemData,
    #[serde(alias = "op")]
    Operation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OpKind {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-", alias = "−")]
    Sub,
    #[serde(rename = "*", alias = "×")]
    Mul,
}

impl OpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            OpKind::Add => "+",
            OpKind::Sub => "-",
            OpKind::Mul => "*",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(OpKind::Add),
            "-" | "−" => Some(OpKind::Sub),
            "*" | "×" => Some(OpKind::Mul),
            _ => None,
        }
    }

    /// Number of operands consumed.
    pub fn arity(self) -> usize {
        2
    }

    pub fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            OpKind::Add => lhs + rhs,
            OpKind::Sub => lhs - rhs,
            OpKind::Mul => lhs * rhs,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<OpKind>,
    #[serde(default)]
    pub label: String,
    /// Numeric value of a constant, or initial contents of a memory datum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl SfgNode {
    pub fn new(id: NodeId, kind: NodeKind, label: impl Into<String>) -> Self {
        SfgNode {
            id,
            kind,
            op: None,
            label: label.into(),
            value: None,
        }
    }

    pub fn operation(id: NodeId, op: OpKind, label: impl Into<String>) -> Self {
        SfgNode {
            op: Some(op),
            ..SfgNode::new(id, NodeKind::Operation, label)
        }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub pos: u32,
}

/// Signal-flow graph. Node and edge order is the construction (or document)
/// order; use [`Sfg::canonical`] for the sorted form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sfg {
    pub nodes: Vec<SfgNode>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    DuplicateId,
    MissingNode,
    OpSymbol,
    Arity,
    InputFanIn,
    OutputFanIn,
    OutputFanOut,
    ConstantFanIn,
    MemDataWriter,
    Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfgViolation {
    pub kind: ViolationKind,
    pub nodes: Vec<NodeId>,
    pub message: String,
}

impl fmt::Display for SfgViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Operand and consumer lists of every node, in edge order.
#[derive(Clone, Debug, Default)]
pub struct Adjacency {
    /// Producers indexed by consumer, sorted by operand position.
    pub operands: HashMap<NodeId, Vec<(u32, NodeId)>>,
    pub consumers: HashMap<NodeId, Vec<(NodeId, u32)>>,
}

impl Adjacency {
    pub fn operands(&self, id: NodeId) -> &[(u32, NodeId)] {
        self.operands.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn consumers(&self, id: NodeId) -> &[(NodeId, u32)] {
        self.consumers.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Sfg {
    pub fn new() -> Self {
        Sfg::default()
    }

    pub fn node(&self, id: NodeId) -> Option<&SfgNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self) -> HashMap<NodeId, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect()
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut adj = Adjacency::default();
        for e in &self.edges {
            adj.operands.entry(e.to).or_default().push((e.pos, e.from));
            adj.consumers.entry(e.from).or_default().push((e.to, e.pos));
        }
        for ops in adj.operands.values_mut() {
            ops.sort();
        }
        adj
    }

    pub fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = &SfgNode> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    /// First node with the given label.
    pub fn find_label(&self, label: &str) -> Option<&SfgNode> {
        self.nodes.iter().find(|n| n.label == label)
    }

    /// Topological order of node ids, or `None` when the graph has a cycle.
    /// Ties are broken by ascending id.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indegree: BTreeMap<NodeId, usize> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        let mut succs: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for e in &self.edges {
            if indegree.contains_key(&e.from) && indegree.contains_key(&e.to) {
                *indegree.get_mut(&e.to).unwrap() += 1;
                succs.entry(e.from).or_default().push(e.to);
            }
        }
        let mut ready: std::collections::BTreeSet<NodeId> =
            indegree.iter().filter(|(_, d)| **d == 0).map(|(id, _)| *id).collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(id) = ready.pop_first() {
            order.push(id);
            for s in succs.get(&id).into_iter().flatten() {
                let d = indegree.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(*s);
                }
            }
        }
        (order.len() == indegree.len()).then_some(order)
    }

    /// Copy with nodes sorted by id and edges sorted by `(to, pos)`.
    pub fn canonical(&self) -> Sfg {
        let mut g = self.clone();
        g.nodes.sort_by_key(|n| n.id);
        g.edges.sort_by_key(|e| (e.to, e.pos, e.from));
        g
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes_of(kind).count()
    }
}

/// Checks every structural invariant and returns one entry per violation.
///
/// Invariants: unique ids, existing edge endpoints, `op` present exactly on
/// operation nodes, operations with one operand per position `0..arity`,
/// inputs and constants without fan-in, outputs with fan-in 1 and fan-out 0,
/// memory data written at most once and only by an operation, acyclicity.
pub fn validate_sfg(g: &Sfg) -> Vec<SfgViolation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for n in &g.nodes {
        if !seen.insert(n.id) {
            out.push(SfgViolation {
                kind: ViolationKind::DuplicateId,
                nodes: vec![n.id],
                message: format!("duplicate node id {}", n.id),
            });
        }
    }
    let kinds: HashMap<NodeId, &SfgNode> = g.nodes.iter().map(|n| (n.id, n)).collect();
    for e in &g.edges {
        for end in [e.from, e.to] {
            if !kinds.contains_key(&end) {
                out.push(SfgViolation {
                    kind: ViolationKind::MissingNode,
                    nodes: vec![e.from, e.to],
                    message: format!("edge {} -> {} references missing node {}", e.from, e.to, end),
                });
            }
        }
    }
    for n in &g.nodes {
        let has_op = n.op.is_some();
        if has_op != (n.kind == NodeKind::Operation) {
            out.push(SfgViolation {
                kind: ViolationKind::OpSymbol,
                nodes: vec![n.id],
                message: format!(
                    "node {} ({:?}) must carry an op symbol iff it is an operation",
                    n.id, n.kind
                ),
            });
        }
    }

    let adj = g.adjacency();
    for n in &g.nodes {
        let ins = adj.operands(n.id);
        let outs = adj.consumers(n.id);
        match n.kind {
            NodeKind::Operation => {
                if let Some(op) = n.op {
                    let positions: Vec<u32> = ins.iter().map(|(p, _)| *p).collect();
                    let expected: Vec<u32> = (0..op.arity() as u32).collect();
                    if positions != expected {
                        out.push(SfgViolation {
                            kind: ViolationKind::Arity,
                            nodes: vec![n.id],
                            message: format!(
                                "operation {} `{}` needs operands at positions {:?}, has {:?}",
                                n.id, op, expected, positions
                            ),
                        });
                    }
                }
            }
            NodeKind::Input if !ins.is_empty() => out.push(SfgViolation {
                kind: ViolationKind::InputFanIn,
                nodes: vec![n.id],
                message: format!("input {} has fan-in {}", n.id, ins.len()),
            }),
            NodeKind::Constant if !ins.is_empty() => out.push(SfgViolation {
                kind: ViolationKind::ConstantFanIn,
                nodes: vec![n.id],
                message: format!("constant {} has fan-in {}", n.id, ins.len()),
            }),
            NodeKind::Output => {
                if ins.len() != 1 {
                    out.push(SfgViolation {
                        kind: ViolationKind::OutputFanIn,
                        nodes: vec![n.id],
                        message: format!("output {} has fan-in {}, expected 1", n.id, ins.len()),
                    });
                }
                if !outs.is_empty() {
                    out.push(SfgViolation {
                        kind: ViolationKind::OutputFanOut,
                        nodes: vec![n.id],
                        message: format!("output {} has fan-out {}", n.id, outs.len()),
                    });
                }
            }
            NodeKind::MemData => {
                let bad_writer = ins
                    .iter()
                    .any(|(_, w)| kinds.get(w).map(|k| k.kind != NodeKind::Operation).unwrap_or(false));
                if ins.len() > 1 || bad_writer {
                    let mut nodes = vec![n.id];
                    nodes.extend(ins.iter().map(|(_, w)| *w));
                    out.push(SfgViolation {
                        kind: ViolationKind::MemDataWriter,
                        nodes,
                        message: format!("memory datum {} must be written at most once, by an operation", n.id),
                    });
                }
            }
            _ => {}
        }
    }

    if let Some(cycle) = find_cycle(g) {
        out.push(SfgViolation {
            kind: ViolationKind::Cycle,
            message: format!(
                "graph is cyclic through {}",
                cycle.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
            ),
            nodes: cycle,
        });
    }
    out
}

/// Nodes left over by Kahn's algorithm (every cycle passes through them).
fn find_cycle(g: &Sfg) -> Option<Vec<NodeId>> {
    let ids: HashSet<NodeId> = g.nodes.iter().map(|n| n.id).collect();
    let mut indegree: HashMap<NodeId, usize> = ids.iter().map(|id| (*id, 0)).collect();
    let mut succs: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for e in &g.edges {
        if ids.contains(&e.from) && ids.contains(&e.to) {
            *indegree.get_mut(&e.to).unwrap() += 1;
            succs.entry(e.from).or_default().push(e.to);
        }
    }
    let mut queue: VecDeque<NodeId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(id, _)| *id).collect();
    let mut visited = 0;
    while let Some(id) = queue.pop_front() {
        visited += 1;
        for s in succs.get(&id).into_iter().flatten() {
            let d = indegree.get_mut(s).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(*s);
            }
        }
    }
    if visited == ids.len() {
        return None;
    }
    let mut left: Vec<NodeId> = indegree.into_iter().filter(|(_, d)| *d > 0).map(|(id, _)| id).collect();
    left.sort();
    Some(left)
}

/// Parses a graph document and validates it.
pub fn parse_sfg(text: &str) -> Result<Sfg> {
    let g: Sfg = serde_json::from_str(text).map_err(Error::from_json)?;
    if let Some(v) = validate_sfg(&g).into_iter().next() {
        return Err(Error::Validation(v.message));
    }
    Ok(g)
}

/// Serializes in canonical order (nodes by id, edges by `(to, pos)`).
pub fn serialize_sfg(g: &Sfg) -> String {
    let mut s = serde_json::to_string_pretty(&g.canonical()).expect("graph serialization");
    s.push('\n');
    s
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// c = (a * var1) + (b * var2)
    pub(crate) const REFERENCE: &str = r#"{
      "nodes": [
        { "id": 0, "kind": "input", "label": "a" },
        { "id": 1, "kind": "input", "label": "b" },
        { "id": 2, "kind": "memdata", "label": "var1" },
        { "id": 3, "kind": "memdata", "label": "var2" },
        { "id": 4, "kind": "operation", "op": "*", "label": "m1" },
        { "id": 5, "kind": "operation", "op": "*", "label": "m2" },
        { "id": 6, "kind": "operation", "op": "+", "label": "s" },
        { "id": 7, "kind": "output", "label": "c" }
      ],
      "edges": [
        { "from": 0, "to": 4, "pos": 0 },
        { "from": 2, "to": 4, "pos": 1 },
        { "from": 1, "to": 5, "pos": 0 },
        { "from": 3, "to": 5, "pos": 1 },
        { "from": 4, "to": 6, "pos": 0 },
        { "from": 5, "to": 6, "pos": 1 },
        { "from": 6, "to": 7, "pos": 0 }
      ]
    }"#;

    #[test]
    fn pass_through() {
        let g = parse_sfg(
            r#"{"nodes":[{"id":0,"kind":"input","label":"x"},{"id":1,"kind":"output","label":"y"}],
                "edges":[{"from":0,"to":1,"pos":0}]}"#,
        )
        .unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 1);
    }

    #[test]
    fn reference_counts() {
        let g = parse_sfg(REFERENCE).unwrap();
        assert_eq!(g.count(NodeKind::Input) + g.count(NodeKind::Output), 3);
        assert_eq!(g.count(NodeKind::MemData), 2);
        let muls = g.nodes.iter().filter(|n| n.op == Some(OpKind::Mul)).count();
        let adds = g.nodes.iter().filter(|n| n.op == Some(OpKind::Add)).count();
        assert_eq!((muls, adds), (2, 1));
        // six operand edges feed the operations, one more drives the output
        let into_ops = g
            .edges
            .iter()
            .filter(|e| g.node(e.to).unwrap().kind == NodeKind::Operation)
            .count();
        assert_eq!(into_ops, 6);
        assert_eq!(g.edges.len(), 7);
        assert!(validate_sfg(&g).is_empty());
        // document order kept
        assert_eq!(
            g.edges[1],
            Edge {
                from: NodeId(2),
                to: NodeId(4),
                pos: 1
            }
        );
    }

    #[test]
    fn cycle_rejected() {
        let doc = r#"{"nodes":[{"id":0,"kind":"operation","op":"+","label":"a"},
                               {"id":1,"kind":"operation","op":"+","label":"b"},
                               {"id":2,"kind":"constant","label":"k","value":1}],
                      "edges":[{"from":0,"to":1,"pos":0},{"from":1,"to":0,"pos":0},
                               {"from":2,"to":0,"pos":1},{"from":2,"to":1,"pos":1}]}"#;
        match parse_sfg(doc) {
            Err(Error::Validation(msg)) => assert!(msg.contains("cyclic"), "{msg}"),
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_document_reports_position() {
        match parse_sfg("{\n  \"nodes\": [\n    { \"id\": 0, \"kind\": \"input\" \n") {
            Err(Error::Parse { line, .. }) => assert!(line >= 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn arity_violation() {
        let mut g = parse_sfg(REFERENCE).unwrap();
        g.edges.retain(|e| !(e.to == NodeId(6) && e.pos == 1));
        let v = validate_sfg(&g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Arity);
        assert_eq!(v[0].nodes, vec![NodeId(6)]);
    }

    #[test]
    fn dangling_edge() {
        let mut g = parse_sfg(REFERENCE).unwrap();
        g.edges.push(Edge {
            from: NodeId(6),
            to: NodeId(42),
            pos: 0,
        });
        let v = validate_sfg(&g);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::MissingNode);
        assert!(v[0].nodes.contains(&NodeId(42)));
    }

    #[test]
    fn output_fan_in_and_duplicate_ids() {
        let mut g = parse_sfg(REFERENCE).unwrap();
        g.edges.push(Edge {
            from: NodeId(4),
            to: NodeId(7),
            pos: 1,
        });
        g.nodes.push(SfgNode::new(NodeId(0), NodeKind::Input, "dup"));
        let kinds: Vec<_> = validate_sfg(&g).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::OutputFanIn));
        assert!(kinds.contains(&ViolationKind::DuplicateId));
    }

    #[test]
    fn serializer_sorts() {
        let mut g = parse_sfg(REFERENCE).unwrap();
        g.nodes.reverse();
        g.edges.reverse();
        let text = serialize_sfg(&g);
        let back = parse_sfg(&text).unwrap();
        assert_eq!(back, g.canonical());
        assert_eq!(serialize_sfg(&back), text);
        assert!(back
            .edges
            .windows(2)
            .all(|w| (w[0].to, w[0].pos) <= (w[1].to, w[1].pos)));
    }

    #[test]
    fn op_aliases() {
        let g = parse_sfg(
            r#"{"nodes":[{"id":0,"kind":"input","label":"x"},{"id":1,"kind":"constant","label":"k","value":2},
                {"id":2,"kind":"operation","op":"×","label":"m"},{"id":3,"kind":"output","label":"y"}],
                "edges":[{"from":0,"to":2,"pos":0},{"from":1,"to":2,"pos":1},{"from":2,"to":3,"pos":0}]}"#,
        )
        .unwrap();
        assert_eq!(g.node(NodeId(2)).unwrap().op, Some(OpKind::Mul));
    }
}
