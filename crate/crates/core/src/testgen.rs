// SPDX-License-Identifier: Apache-2.0

//! Seeded random problem instances for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{build_acg, critical_path, Bus, Direction, IoConstraintSpec, OperatorLibrary, Transfer};
use crate::graph::{Edge, NodeId, NodeKind, OpKind, Sfg, SfgNode};
use crate::memory::{Bank, BankId, MemoryMapping};
use crate::pipeline::Problem;

/// Size limits of generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomConfig {
    pub max_ops: usize,
    pub max_banks: usize,
    pub max_ports: u32,
    /// Extra cycles allowed above the critical path.
    pub max_slack: u32,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_ops: 6,
            max_banks: 2,
            max_ports: 2,
            max_slack: 3,
        }
    }
}

struct Builder {
    g: Sfg,
    /// Values an operation may consume.
    values: Vec<NodeId>,
}

impl Builder {
    fn add(&mut self, node: SfgNode) -> NodeId {
        let id = node.id;
        self.g.nodes.push(node);
        id
    }

    fn fresh(&self) -> NodeId {
        NodeId(self.g.nodes.len() as u32)
    }
}

/// Random DAG of 1 to `max_ops` operations over inputs, constants and
/// memory data. Operations may also store their result into a fresh
/// memory datum that later operations read. Every unconsumed result and
/// the last one feed an output.
pub fn random_sfg(rng: &mut impl Rng, max_ops: usize) -> Sfg {
    let mut b = Builder {
        g: Sfg::new(),
        values: Vec::new(),
    };
    let n_ops = rng.gen_range(1..=max_ops.max(1));
    let mut ops = Vec::new();
    for k in 0..n_ops {
        let mut operands = Vec::new();
        while operands.len() < 2 {
            let pick = rng.gen_range(0..10);
            let id = if pick < 4 && !b.values.is_empty() {
                *b.values.choose(rng).expect("non-empty")
            } else if pick < 6 {
                let id = b.fresh();
                b.add(SfgNode::new(id, NodeKind::Input, format!("i{}", id.0)))
            } else if pick < 9 {
                let id = b.fresh();
                let v = f64::from(rng.gen_range(-4i8..=4)) / 2.0;
                b.add(SfgNode::new(id, NodeKind::MemData, format!("m{}", id.0)).with_value(v))
            } else {
                let id = b.fresh();
                b.add(SfgNode::new(id, NodeKind::Constant, format!("k{}", id.0)).with_value(2.0))
            };
            if !operands.contains(&id) {
                operands.push(id);
                if !b.values.contains(&id) {
                    b.values.push(id);
                }
            }
        }
        let op = *[OpKind::Add, OpKind::Sub, OpKind::Mul].choose(rng).expect("non-empty");
        let id = b.fresh();
        b.add(SfgNode::operation(id, op, format!("op{k}")));
        for (pos, from) in operands.into_iter().enumerate() {
            b.g.edges.push(Edge {
                from,
                to: id,
                pos: pos as u32,
            });
        }
        b.values.push(id);
        if rng.gen_bool(0.2) {
            let m = b.fresh();
            b.add(SfgNode::new(m, NodeKind::MemData, format!("w{}", m.0)));
            b.g.edges.push(Edge {
                from: id,
                to: m,
                pos: 0,
            });
            b.values.push(m);
        }
        ops.push(id);
    }
    let last = *ops.last().expect("at least one operation");
    for id in ops {
        let used = id != last && b.g.edges.iter().any(|e| e.from == id);
        if !used || rng.gen_bool(0.2) {
            let out = b.fresh();
            b.add(SfgNode::new(out, NodeKind::Output, format!("o{}", out.0)));
            b.g.edges.push(Edge {
                from: id,
                to: out,
                pos: 0,
            });
        }
    }
    b.g
}

/// Places every memory datum of `g` into one of 1 to `max_banks` banks,
/// each with 1 to `max_ports` ports, at shuffled distinct addresses.
pub fn random_mapping(rng: &mut impl Rng, g: &Sfg, max_banks: usize, max_ports: u32) -> MemoryMapping {
    let n_banks = rng.gen_range(1..=max_banks.max(1));
    let mut m = MemoryMapping::default();
    for k in 0..n_banks {
        let ports = rng.gen_range(1..=max_ports.max(1));
        let t_rand = rng.gen_range(1..=2);
        m.banks.push(Bank::new(format!("bank{k}"), ports, 1, t_rand));
    }
    let mut per_bank: Vec<Vec<NodeId>> = vec![Vec::new(); n_banks];
    for n in g.nodes_of(NodeKind::MemData) {
        per_bank[rng.gen_range(0..n_banks)].push(n.id);
    }
    for (k, data) in per_bank.iter_mut().enumerate() {
        if rng.gen_bool(0.5) {
            data.shuffle(rng);
        }
        for (addr, d) in data.iter().enumerate() {
            m.place(*d, BankId(k), addr as u32);
        }
    }
    m
}

/// Latency bound of critical path plus up to `max_slack` cycles; each
/// input and output is independently pinned to a bus slot or left free.
pub fn random_spec(rng: &mut impl Rng, g: &Sfg, lib: &OperatorLibrary, max_slack: u32) -> IoConstraintSpec {
    let cp = build_acg(g, lib).map(|acg| critical_path(&acg)).unwrap_or(1).max(1);
    let latency = cp + rng.gen_range(0..=max_slack);
    let mut spec = IoConstraintSpec::unconstrained(latency);
    if rng.gen_bool(0.3) {
        return spec;
    }
    spec.buses = vec![
        Bus {
            name: "in0".into(),
            direction: Direction::In,
            width: None,
        },
        Bus {
            name: "in1".into(),
            direction: Direction::In,
            width: None,
        },
        Bus {
            name: "out0".into(),
            direction: Direction::Out,
            width: None,
        },
    ];
    let mut next_in = [0u32; 2];
    for n in g.nodes_of(NodeKind::Input) {
        if rng.gen_bool(0.6) {
            let bus = rng.gen_range(0..2);
            if next_in[bus] < latency {
                spec.transfers.push(Transfer {
                    data: n.id,
                    bus,
                    offset: next_in[bus],
                });
                next_in[bus] += 1;
            }
        }
    }
    let mut next_out = latency;
    for n in g.nodes_of(NodeKind::Output) {
        if next_out > 0 && rng.gen_bool(0.6) {
            next_out -= 1;
            spec.transfers.push(Transfer {
                data: n.id,
                bus: 2,
                offset: next_out,
            });
        }
    }
    spec
}

/// Unit-latency library with the multiplier latency drawn from 1 to 2.
pub fn random_library(rng: &mut impl Rng) -> OperatorLibrary {
    let mut lib = OperatorLibrary::unit_latency();
    lib.classes[0].latency = rng.gen_range(1..=2);
    lib
}

/// Complete random instance for `seed`.
pub fn random_problem(seed: u64, config: &RandomConfig) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_sfg(&mut rng, config.max_ops);
    let lib = random_library(&mut rng);
    let mapping = random_mapping(&mut rng, &graph, config.max_banks, config.max_ports);
    let spec = random_spec(&mut rng, &graph, &lib, config.max_slack);
    Problem {
        graph,
        lib,
        spec,
        mapping,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_sfg;

    #[test]
    fn instances_are_well_formed() {
        let config = RandomConfig::default();
        for seed in 0..200 {
            let p = random_problem(seed, &config);
            assert_eq!(validate_sfg(&p.graph), vec![], "seed {seed}");
            p.spec.validate(&p.graph).unwrap();
            p.prepare().unwrap();
            let ops = p.graph.count(NodeKind::Operation);
            assert!((1..=6).contains(&ops));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let config = RandomConfig::default();
        assert_eq!(random_problem(7, &config).graph, random_problem(7, &config).graph);
    }
}
