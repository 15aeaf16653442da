// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashMap};

use super::{Direction, IoConstraintSpec, OperatorLibrary};
use crate::error::{Error, Result};
use crate::graph::{validate_sfg, NodeId, NodeKind, OpKind, Sfg};
use crate::{Cycle, Duration};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Dependencies and operator latencies only.
    Algorithmic,
    /// Input arrivals and output deadlines attached.
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgNodeKind {
    Input,
    Output,
    Operation {
        op: OpKind,
        class: usize,
    },
    /// Memory read feeding operand `pos` of `consumer`.
    Read {
        data: NodeId,
        consumer: NodeId,
        pos: u32,
    },
    /// Store of `producer`'s result into `data`.
    Write {
        data: NodeId,
        producer: NodeId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CgNode {
    pub kind: CgNodeKind,
    /// The SFG node this stands for; the memory datum for reads and writes.
    pub sfg: NodeId,
    pub latency: Duration,
    pub arrival: Option<Cycle>,
    pub deadline: Option<Cycle>,
    /// Bus index of the constraining transfer, if any.
    pub bus: Option<usize>,
}

impl CgNode {
    /// Operations and writes are placed by the scheduler; every other node
    /// follows from them.
    pub fn is_scheduled(&self) -> bool {
        matches!(self.kind, CgNodeKind::Operation { .. } | CgNodeKind::Write { .. })
    }
}

/// `to` may start `delay` cycles after `from` starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CgEdge {
    pub from: usize,
    pub to: usize,
    pub delay: Duration,
}

/// Algorithmic (ACG) or global (GCG) constraint graph. Nodes are stored in
/// topological order.
///
/// Edge delays encode the timing model: an operation may start `latency`
/// cycles after an operation it consumes; reads complete within the first
/// cycle of their consumer (delay 0); an output is produced in the last
/// cycle of its producer (delay `latency - 1`); a write starts in the cycle
/// after its producer completes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub stage: Stage,
    pub nodes: Vec<CgNode>,
    pub edges: Vec<CgEdge>,
    pub latency_bound: Duration,
    pub cadence: Duration,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    by_sfg: HashMap<NodeId, usize>,
    writes: HashMap<NodeId, usize>,
}

impl ConstraintGraph {
    fn empty() -> Self {
        ConstraintGraph {
            stage: Stage::Algorithmic,
            nodes: Vec::new(),
            edges: Vec::new(),
            latency_bound: 0,
            cadence: 0,
            preds: Vec::new(),
            succs: Vec::new(),
            by_sfg: HashMap::new(),
            writes: HashMap::new(),
        }
    }

    fn add_node(&mut self, node: CgNode) -> usize {
        let i = self.nodes.len();
        match node.kind {
            CgNodeKind::Read { .. } => {}
            CgNodeKind::Write { data, .. } => {
                self.writes.insert(data, i);
            }
            _ => {
                self.by_sfg.insert(node.sfg, i);
            }
        }
        self.nodes.push(node);
        self.preds.push(Vec::new());
        self.succs.push(Vec::new());
        i
    }

    fn add_edge(&mut self, from: usize, to: usize, delay: Duration) {
        let e = self.edges.len();
        self.edges.push(CgEdge { from, to, delay });
        self.succs[from].push(e);
        self.preds[to].push(e);
    }

    /// Incoming edges of node `i`.
    pub fn preds(&self, i: usize) -> impl Iterator<Item = &CgEdge> {
        self.preds[i].iter().map(move |e| &self.edges[*e])
    }

    pub fn succs(&self, i: usize) -> impl Iterator<Item = &CgEdge> {
        self.succs[i].iter().map(move |e| &self.edges[*e])
    }

    /// Index of the input, output or operation node for an SFG node.
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.by_sfg.get(&id).copied()
    }

    /// Index of the write into memory datum `data`.
    pub fn write_of(&self, data: NodeId) -> Option<usize> {
        self.writes.get(&data).copied()
    }

    pub fn operations(&self) -> impl Iterator<Item = (usize, &CgNode)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, CgNodeKind::Operation { .. }))
    }

    /// Operations and writes, in topological order.
    pub fn scheduled_units(&self) -> impl Iterator<Item = (usize, &CgNode)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_scheduled())
    }

    /// Latency bound for the global stage; the dependency critical path for
    /// the algorithmic stage.
    pub fn horizon(&self) -> Duration {
        match self.stage {
            Stage::Global => self.latency_bound,
            Stage::Algorithmic => super::windows::critical_path(self),
        }
    }
}

/// Builds the algorithmic constraint graph: every operation annotated with
/// the latency of its selected class, every memory operand materialized as
/// a read node and every store into memory as a write node.
pub fn build_acg(g: &Sfg, lib: &OperatorLibrary) -> Result<ConstraintGraph> {
    if let Some(v) = validate_sfg(g).into_iter().next() {
        return Err(Error::Validation(v.message));
    }
    lib.validate()?;
    let order = g.topological_order().expect("validated graph is acyclic");
    let index = g.node_index();
    let adj = g.adjacency();
    let mut cg = ConstraintGraph::empty();
    let access = lib.access_latency;

    for id in order {
        let node = &g.nodes[index[&id]];
        match node.kind {
            NodeKind::Input => {
                cg.add_node(CgNode {
                    kind: CgNodeKind::Input,
                    sfg: id,
                    latency: 0,
                    arrival: None,
                    deadline: None,
                    bus: None,
                });
            }
            NodeKind::Constant => {}
            NodeKind::MemData => {
                if let Some(&(_, producer)) = adj.operands(id).first() {
                    let p = cg.index_of(producer).expect("writer precedes datum");
                    let w = cg.add_node(CgNode {
                        kind: CgNodeKind::Write { data: id, producer },
                        sfg: id,
                        latency: access,
                        arrival: None,
                        deadline: None,
                        bus: None,
                    });
                    cg.add_edge(p, w, cg.nodes[p].latency);
                }
            }
            NodeKind::Operation => {
                let op = node.op.expect("validated");
                let class = lib.select(op).ok_or_else(|| Error::UncoveredOperation {
                    symbol: op.symbol().to_string(),
                    node: id,
                })?;
                let mut incoming = Vec::new();
                for &(pos, src) in adj.operands(id) {
                    let src_node = &g.nodes[index[&src]];
                    match src_node.kind {
                        NodeKind::Constant => {}
                        NodeKind::Input => incoming.push((cg.index_of(src).unwrap(), 0)),
                        NodeKind::Operation => {
                            let u = cg.index_of(src).unwrap();
                            incoming.push((u, cg.nodes[u].latency));
                        }
                        NodeKind::MemData => {
                            let r = cg.add_node(CgNode {
                                kind: CgNodeKind::Read {
                                    data: src,
                                    consumer: id,
                                    pos,
                                },
                                sfg: src,
                                latency: access,
                                arrival: None,
                                deadline: None,
                                bus: None,
                            });
                            if let Some(w) = cg.write_of(src) {
                                cg.add_edge(w, r, cg.nodes[w].latency);
                            }
                            incoming.push((r, 0));
                        }
                        NodeKind::Output => unreachable!("outputs have no fan-out"),
                    }
                }
                let v = cg.add_node(CgNode {
                    kind: CgNodeKind::Operation { op, class },
                    sfg: id,
                    latency: lib.classes[class].latency,
                    arrival: None,
                    deadline: None,
                    bus: None,
                });
                for (u, delay) in incoming {
                    cg.add_edge(u, v, delay);
                }
            }
            NodeKind::Output => {
                let &(_, src) = adj.operands(id).first().expect("validated fan-in");
                let src_node = &g.nodes[index[&src]];
                let driver = match src_node.kind {
                    NodeKind::Input => Some((cg.index_of(src).unwrap(), 0)),
                    NodeKind::Operation => {
                        let u = cg.index_of(src).unwrap();
                        Some((u, cg.nodes[u].latency - 1))
                    }
                    NodeKind::Constant => None,
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "output {id} is driven directly by memory datum {src}"
                        )))
                    }
                };
                let o = cg.add_node(CgNode {
                    kind: CgNodeKind::Output,
                    sfg: id,
                    latency: 0,
                    arrival: None,
                    deadline: None,
                    bus: None,
                });
                if let Some((u, delay)) = driver {
                    cg.add_edge(u, o, delay);
                }
            }
        }
    }
    Ok(cg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IoNode {
    pub data: NodeId,
    pub bus: usize,
    pub offset: Cycle,
}

/// Transfers per bus, chained in time order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IoConstraintGraph {
    pub nodes: Vec<IoNode>,
    pub edges: Vec<(usize, usize)>,
}

pub fn build_iocg(spec: &IoConstraintSpec) -> Result<IoConstraintGraph> {
    let mut per_bus: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut iocg = IoConstraintGraph::default();
    for t in &spec.transfers {
        per_bus.entry(t.bus).or_default().push(iocg.nodes.len());
        iocg.nodes.push(IoNode {
            data: t.data,
            bus: t.bus,
            offset: t.offset,
        });
    }
    for list in per_bus.values_mut() {
        list.sort_by_key(|i| iocg.nodes[*i].offset);
        for w in list.windows(2) {
            let (a, b) = (iocg.nodes[w[0]], iocg.nodes[w[1]]);
            if a.offset == b.offset {
                let name = spec.buses.get(a.bus).map(|b| b.name.as_str()).unwrap_or("?");
                return Err(Error::IoConstraint(format!(
                    "{} and {} both use bus `{}` at offset {}",
                    a.data, b.data, name, a.offset
                )));
            }
            iocg.edges.push((w[0], w[1]));
        }
    }
    Ok(iocg)
}

/// Attaches the I/O constraints to the algorithmic graph. A constrained
/// input arrives at its transfer offset; a constrained output must be
/// produced by its transfer offset. Unconstrained inputs arrive at 0 and
/// unconstrained outputs are due by `latency_bound - 1`.
pub fn merge_gcg(acg: &ConstraintGraph, iocg: &IoConstraintGraph, spec: &IoConstraintSpec) -> Result<ConstraintGraph> {
    let mut gcg = acg.clone();
    gcg.stage = Stage::Global;
    gcg.latency_bound = spec.latency_bound;
    gcg.cadence = spec.cadence;
    for io in &iocg.nodes {
        let i = gcg
            .index_of(io.data)
            .ok_or_else(|| Error::IoConstraint(format!("transfer references unknown node {}", io.data)))?;
        let dir = spec.buses.get(io.bus).map(|b| b.direction);
        let node = &mut gcg.nodes[i];
        match (node.kind, dir) {
            (CgNodeKind::Input, Some(Direction::In)) => node.arrival = Some(io.offset),
            (CgNodeKind::Output, Some(Direction::Out)) => node.deadline = Some(io.offset),
            _ => {
                return Err(Error::IoConstraint(format!(
                    "transfer of {} does not match an I/O node of the bus direction",
                    io.data
                )))
            }
        }
        node.bus = Some(io.bus);
    }
    let default_deadline = spec.latency_bound.saturating_sub(1);
    for node in &mut gcg.nodes {
        match node.kind {
            CgNodeKind::Input => {
                node.arrival.get_or_insert(0);
            }
            CgNodeKind::Output => {
                node.deadline.get_or_insert(default_deadline);
            }
            _ => {}
        }
    }
    Ok(gcg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{Bus, Transfer};
    use crate::graph::parse_sfg;
    use crate::graph::tests::REFERENCE;

    pub(crate) fn parallel_spec(latency: Duration) -> IoConstraintSpec {
        IoConstraintSpec {
            buses: vec![
                Bus {
                    name: "bus1".into(),
                    direction: Direction::In,
                    width: None,
                },
                Bus {
                    name: "bus2".into(),
                    direction: Direction::In,
                    width: None,
                },
                Bus {
                    name: "bus3".into(),
                    direction: Direction::Out,
                    width: None,
                },
            ],
            transfers: vec![
                Transfer {
                    data: NodeId(0),
                    bus: 0,
                    offset: 0,
                },
                Transfer {
                    data: NodeId(1),
                    bus: 1,
                    offset: 0,
                },
                Transfer {
                    data: NodeId(7),
                    bus: 2,
                    offset: latency - 1,
                },
            ],
            cadence: latency,
            latency_bound: latency,
        }
    }

    #[test]
    fn acg_latencies_and_accesses() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::fft_reference()).unwrap();
        let m1 = acg.index_of(NodeId(4)).unwrap();
        assert_eq!(acg.nodes[m1].latency, 2);
        let reads = acg
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, CgNodeKind::Read { .. }))
            .count();
        assert_eq!(reads, 2);
        assert_eq!(acg.operations().count(), 3);
        assert_eq!(acg.stage, Stage::Algorithmic);
    }

    #[test]
    fn empty_acg() {
        let acg = build_acg(&Sfg::new(), &OperatorLibrary::unit_latency()).unwrap();
        assert!(acg.nodes.is_empty() && acg.edges.is_empty());
    }

    #[test]
    fn mul_add_chain_latency() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::unit_latency()).unwrap();
        let m1 = acg.index_of(NodeId(4)).unwrap();
        let s = acg.index_of(NodeId(6)).unwrap();
        assert_eq!(acg.nodes[m1].latency + acg.nodes[s].latency, 2);
    }

    #[test]
    fn uncovered_symbol() {
        let g = parse_sfg(REFERENCE).unwrap();
        let lib = OperatorLibrary::new(vec![crate::constraints::OperatorClass::new("add", &[OpKind::Add], 1)]);
        assert!(matches!(build_acg(&g, &lib), Err(Error::UncoveredOperation { .. })));
    }

    #[test]
    fn writes_are_materialized() {
        let g = parse_sfg(
            r#"{"nodes":[{"id":0,"kind":"input","label":"x"},{"id":1,"kind":"constant","label":"k","value":2},
                {"id":2,"kind":"operation","op":"*","label":"m"},{"id":3,"kind":"memdata","label":"t"},
                {"id":4,"kind":"operation","op":"+","label":"s"},{"id":5,"kind":"output","label":"y"}],
                "edges":[{"from":0,"to":2,"pos":0},{"from":1,"to":2,"pos":1},{"from":2,"to":3,"pos":0},
                         {"from":3,"to":4,"pos":0},{"from":0,"to":4,"pos":1},{"from":4,"to":5,"pos":0}]}"#,
        )
        .unwrap();
        let acg = build_acg(&g, &OperatorLibrary::fft_reference()).unwrap();
        let w = acg.write_of(NodeId(3)).unwrap();
        assert_eq!(acg.preds(w).next().unwrap().delay, 2);
        let r = acg
            .nodes
            .iter()
            .position(|n| matches!(n.kind, CgNodeKind::Read { data: NodeId(3), .. }))
            .unwrap();
        assert!(acg.preds(r).any(|e| e.from == w && e.delay == 1));
    }

    #[test]
    fn iocg_sequences() {
        // S = (a, b, c): one input bus carrying a then b, c on the output bus
        let seq = IoConstraintSpec {
            buses: vec![
                Bus {
                    name: "bus1".into(),
                    direction: Direction::In,
                    width: None,
                },
                Bus {
                    name: "bus2".into(),
                    direction: Direction::Out,
                    width: None,
                },
            ],
            transfers: vec![
                Transfer {
                    data: NodeId(0),
                    bus: 0,
                    offset: 0,
                },
                Transfer {
                    data: NodeId(1),
                    bus: 0,
                    offset: 1,
                },
                Transfer {
                    data: NodeId(7),
                    bus: 1,
                    offset: 2,
                },
            ],
            cadence: 3,
            latency_bound: 3,
        };
        let iocg = build_iocg(&seq).unwrap();
        assert_eq!(iocg.nodes.len(), 3);
        assert_eq!(iocg.edges, vec![(0, 1)]);

        // S = (a|b, c)
        let par = build_iocg(&parallel_spec(3)).unwrap();
        assert_eq!(par.nodes.len(), 3);
        assert!(par.edges.is_empty());

        assert_eq!(
            build_iocg(&IoConstraintSpec::unconstrained(4)).unwrap(),
            IoConstraintGraph::default()
        );

        let mut clash = seq.clone();
        clash.transfers[1].offset = 0;
        assert!(build_iocg(&clash).is_err());
    }

    #[test]
    fn merge_parallel_io() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::unit_latency()).unwrap();
        let spec = parallel_spec(3);
        let gcg = merge_gcg(&acg, &build_iocg(&spec).unwrap(), &spec).unwrap();
        let node = |id| &gcg.nodes[gcg.index_of(NodeId(id)).unwrap()];
        assert_eq!(node(0).arrival, Some(0));
        assert_eq!(node(1).arrival, Some(0));
        assert_eq!(node(7).deadline, Some(2));
        // the algorithmic part is untouched
        assert_eq!(gcg.edges, acg.edges);
        for (a, b) in acg.nodes.iter().zip(&gcg.nodes) {
            assert_eq!((a.kind, a.latency), (b.kind, b.latency));
        }
    }

    #[test]
    fn merge_without_iocg_uses_defaults() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::unit_latency()).unwrap();
        let spec = IoConstraintSpec::unconstrained(5);
        let gcg = merge_gcg(&acg, &build_iocg(&spec).unwrap(), &spec).unwrap();
        assert_eq!(gcg.nodes[gcg.index_of(NodeId(0)).unwrap()].arrival, Some(0));
        assert_eq!(gcg.nodes[gcg.index_of(NodeId(7)).unwrap()].deadline, Some(4));
    }

    #[test]
    fn merge_keeps_early_output_deadline() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::unit_latency()).unwrap();
        let mut spec = parallel_spec(3);
        spec.transfers[0].offset = 2;
        spec.transfers[2].offset = 0;
        let gcg = merge_gcg(&acg, &build_iocg(&spec).unwrap(), &spec).unwrap();
        assert_eq!(gcg.nodes[gcg.index_of(NodeId(7)).unwrap()].deadline, Some(0));
    }

    #[test]
    fn merge_rejects_unknown_node() {
        let g = parse_sfg(REFERENCE).unwrap();
        let acg = build_acg(&g, &OperatorLibrary::unit_latency()).unwrap();
        let spec = parallel_spec(3);
        let mut iocg = build_iocg(&spec).unwrap();
        iocg.nodes[0].data = NodeId(99);
        assert!(merge_gcg(&acg, &iocg, &spec).is_err());
    }
}
