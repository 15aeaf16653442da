// SPDX-License-Identifier: Apache-2.0

//! Memory table, designer mapping of data onto banks, the memory
//! constraint graph (MCG) and per-port access reservation tables.

mod ports;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeKind, Sfg};
use crate::Duration;

pub use ports::{access_cost, AccessError, AccessRequest, BankState, PortAccessTable, Reservation};

pub type Address = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BankId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bank {
    pub name: String,
    pub ports: u32,
    /// Access time when the address follows the previous one.
    pub t_seq: Duration,
    /// Access time otherwise.
    pub t_rand: Duration,
}

impl Bank {
    pub fn new(name: impl Into<String>, ports: u32, t_seq: Duration, t_rand: Duration) -> Self {
        Bank {
            name: name.into(),
            ports,
            t_seq,
            t_rand,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placement {
    pub bank: BankId,
    pub address: Address,
}

/// Every memory-resident datum of the graph, in node-id order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MemoryTable {
    pub entries: Vec<(NodeId, String)>,
}

impl MemoryTable {
    pub fn contains(&self, id: NodeId) -> bool {
        self.entries.binary_search_by_key(&id, |(n, _)| *n).is_ok()
    }
}

pub fn extract_memory_table(g: &Sfg) -> MemoryTable {
    let mut entries: Vec<(NodeId, String)> = g.nodes_of(NodeKind::MemData).map(|n| (n.id, n.label.clone())).collect();
    entries.sort();
    MemoryTable { entries }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    /// Every table entry must be placed explicitly.
    #[default]
    Strict,
    /// Unplaced entries go round-robin over the banks at ascending addresses.
    Auto,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MemoryMapping {
    pub banks: Vec<Bank>,
    pub placement: BTreeMap<NodeId, Placement>,
}

impl MemoryMapping {
    pub fn bank(&self, id: BankId) -> &Bank {
        &self.banks[id.0]
    }

    pub fn bank_index(&self, name: &str) -> Option<BankId> {
        self.banks.iter().position(|b| b.name == name).map(BankId)
    }

    pub fn place(&mut self, data: NodeId, bank: BankId, address: Address) -> &mut Self {
        self.placement.insert(data, Placement { bank, address });
        self
    }

    /// Parses a mapping document and validates it against the graph's
    /// memory table:
    ///
    /// ```json
    /// { "mode": "strict",
    ///   "banks": [ { "name": "bank0", "ports": 1, "t_seq": 1, "t_rand": 2 } ],
    ///   "placements": [ { "data": "var1", "bank": "bank0", "address": 1 } ] }
    /// ```
    pub fn from_document(text: &str, g: &Sfg) -> Result<Self> {
        let doc: MappingDoc = serde_json::from_str(text).map_err(Error::from_json)?;
        let table = extract_memory_table(g);
        let mut by_label: HashMap<&str, NodeId> = HashMap::new();
        for (id, label) in &table.entries {
            if by_label.insert(label.as_str(), *id).is_some() {
                return Err(Error::Mapping(format!("label `{label}` names several memory data")));
            }
        }
        let mut mapping = MemoryMapping {
            banks: doc.banks,
            placement: BTreeMap::new(),
        };
        for p in doc.placements {
            let bank = mapping
                .bank_index(&p.bank)
                .ok_or_else(|| Error::Mapping(format!("undeclared bank `{}`", p.bank)))?;
            let data = match by_label.get(p.data.as_str()) {
                Some(id) => *id,
                None => match g.find_label(&p.data) {
                    Some(n) => n.id,
                    None => return Err(Error::Mapping(format!("no node labelled `{}`", p.data))),
                },
            };
            if mapping
                .placement
                .insert(
                    data,
                    Placement {
                        bank,
                        address: p.address,
                    },
                )
                .is_some()
            {
                return Err(Error::Mapping(format!("`{}` placed twice", p.data)));
            }
        }
        apply_mapping(&table, &mapping, doc.mode)
    }

    pub fn to_document(&self, g: &Sfg) -> String {
        let label = |id: NodeId| g.node(id).map(|n| n.label.clone()).unwrap_or_else(|| id.to_string());
        let doc = MappingDoc {
            mode: PlacementMode::Strict,
            banks: self.banks.clone(),
            placements: self
                .placement
                .iter()
                .map(|(id, p)| PlacementDoc {
                    data: label(*id),
                    bank: self.banks[p.bank.0].name.clone(),
                    address: p.address,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("mapping serialization");
        s.push('\n');
        s
    }
}

#[derive(Serialize, Deserialize)]
struct PlacementDoc {
    data: String,
    bank: String,
    address: Address,
}

#[derive(Serialize, Deserialize)]
struct MappingDoc {
    #[serde(default)]
    mode: PlacementMode,
    banks: Vec<Bank>,
    #[serde(default)]
    placements: Vec<PlacementDoc>,
}

/// Validates `m` against the table. In [`PlacementMode::Auto`] unplaced
/// entries are assigned round-robin across banks, each bank filling its
/// lowest free addresses.
pub fn apply_mapping(t: &MemoryTable, m: &MemoryMapping, mode: PlacementMode) -> Result<MemoryMapping> {
    if m.banks.is_empty() && !t.entries.is_empty() {
        return Err(Error::Mapping("memory data present but no bank declared".into()));
    }
    let mut names = BTreeSet::new();
    for b in &m.banks {
        if !names.insert(b.name.as_str()) {
            return Err(Error::Mapping(format!("bank `{}` declared twice", b.name)));
        }
        if b.ports == 0 {
            return Err(Error::Mapping(format!("bank `{}` has no port", b.name)));
        }
        if b.t_seq == 0 || b.t_seq > b.t_rand {
            return Err(Error::Mapping(format!(
                "bank `{}` needs 1 <= t_seq <= t_rand (got {} / {})",
                b.name, b.t_seq, b.t_rand
            )));
        }
    }
    let mut used: BTreeSet<(BankId, Address)> = BTreeSet::new();
    for (id, p) in &m.placement {
        if !t.contains(*id) {
            return Err(Error::Mapping(format!("{id} is not a memory datum")));
        }
        if p.bank.0 >= m.banks.len() {
            return Err(Error::Mapping(format!("{id} placed in undeclared bank #{}", p.bank.0)));
        }
        if !used.insert((p.bank, p.address)) {
            return Err(Error::Mapping(format!(
                "{id} collides at {}@{}",
                m.banks[p.bank.0].name, p.address
            )));
        }
    }
    let mut out = m.clone();
    let unplaced: Vec<NodeId> = t
        .entries
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| !m.placement.contains_key(id))
        .collect();
    match mode {
        PlacementMode::Strict => {
            if let Some(id) = unplaced.first() {
                return Err(Error::Mapping(format!("{id} has no placement")));
            }
        }
        PlacementMode::Auto => {
            let mut next = vec![0 as Address; m.banks.len()];
            for (k, id) in unplaced.into_iter().enumerate() {
                let bank = BankId(k % m.banks.len());
                while used.contains(&(bank, next[bank.0])) {
                    next[bank.0] += 1;
                }
                used.insert((bank, next[bank.0]));
                out.placement.insert(
                    id,
                    Placement {
                        bank,
                        address: next[bank.0],
                    },
                );
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McgEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: Duration,
    /// `to` sits at the address right after `from`.
    pub sequential: bool,
}

/// Memory constraint graph: one directed edge per ordered pair of data
/// sharing a bank, weighted by the cost of accessing `to` right after
/// `from`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mcg {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<McgEdge>,
    index: HashMap<(NodeId, NodeId), usize>,
    next: HashMap<NodeId, NodeId>,
}

impl Mcg {
    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<&McgEdge> {
        self.index.get(&(from, to)).map(|i| &self.edges[*i])
    }

    pub fn is_sequential(&self, from: NodeId, to: NodeId) -> bool {
        self.edge(from, to).map(|e| e.sequential).unwrap_or(false)
    }

    /// Datum reached from `from` by a sequential edge, if any.
    pub fn sequential_successor(&self, from: NodeId) -> Option<NodeId> {
        self.next.get(&from).copied()
    }
}

pub fn build_mcg(m: &MemoryMapping) -> Mcg {
    let mut per_bank: BTreeMap<BankId, Vec<(NodeId, Address)>> = BTreeMap::new();
    for (id, p) in &m.placement {
        per_bank.entry(p.bank).or_default().push((*id, p.address));
    }
    let mut mcg = Mcg {
        nodes: m.placement.keys().copied().collect(),
        ..Mcg::default()
    };
    for (bank, data) in per_bank {
        let b = m.bank(bank);
        for &(u, au) in &data {
            for &(v, av) in &data {
                if u == v {
                    continue;
                }
                let sequential = au.checked_add(1) == Some(av);
                mcg.index.insert((u, v), mcg.edges.len());
                if sequential {
                    mcg.next.insert(u, v);
                }
                mcg.edges.push(McgEdge {
                    from: u,
                    to: v,
                    weight: if sequential { b.t_seq } else { b.t_rand },
                    sequential,
                });
            }
        }
    }
    mcg
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bank#{}@{}", self.bank.0, self.address)
    }
}
