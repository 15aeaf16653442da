// SPDX-License-Identifier: Apache-2.0

//! Timing constraint model: operator library, I/O constraint specification,
//! the algorithmic / I/O / global constraint graphs, time windows and the
//! two feasibility checks run before scheduling.

mod gcg;
mod library;
mod windows;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeKind, Sfg};
use crate::{Cycle, Duration};

pub use gcg::{
    build_acg, build_iocg, merge_gcg, CgEdge, CgNode, CgNodeKind, ConstraintGraph, IoConstraintGraph, IoNode, Stage,
};
pub use library::{OperatorClass, OperatorLibrary};
pub use windows::{check_feasibility, compute_time_windows, critical_path, FeasibilityReport, TimeWindows};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bus {
    pub name: String,
    #[serde(rename = "dir")]
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
}

/// One datum crossing a bus at a fixed offset within the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transfer {
    pub data: NodeId,
    /// Index into [`IoConstraintSpec::buses`].
    pub bus: usize,
    pub offset: Cycle,
}

/// The environment's timing contract: buses, the transfer sequence on each
/// bus, the iteration period and the latency bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoConstraintSpec {
    pub buses: Vec<Bus>,
    pub transfers: Vec<Transfer>,
    pub cadence: Duration,
    pub latency_bound: Duration,
}

#[derive(Serialize, Deserialize)]
struct TransferDoc {
    data: String,
    bus: String,
    offset: Cycle,
}

#[derive(Serialize, Deserialize)]
struct IoDoc {
    #[serde(default)]
    buses: Vec<Bus>,
    #[serde(default)]
    transfers: Vec<TransferDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cadence: Option<Duration>,
    latency: Duration,
}

impl IoConstraintSpec {
    /// No buses or transfers: every input is available at cycle 0 and every
    /// output is due by `latency_bound - 1`.
    pub fn unconstrained(latency_bound: Duration) -> Self {
        IoConstraintSpec {
            buses: Vec::new(),
            transfers: Vec::new(),
            cadence: latency_bound,
            latency_bound,
        }
    }

    pub fn is_constrained(&self) -> bool {
        !self.transfers.is_empty()
    }

    pub fn bus_index(&self, name: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.name == name)
    }

    pub fn transfer_of(&self, data: NodeId) -> Option<&Transfer> {
        self.transfers.iter().find(|t| t.data == data)
    }

    pub fn with_latency(mut self, latency_bound: Duration) -> Self {
        self.latency_bound = latency_bound;
        self
    }

    pub fn with_cadence(mut self, cadence: Duration) -> Self {
        self.cadence = cadence;
        self
    }

    /// Checks the spec against the graph: transfers name existing I/O nodes
    /// on buses of the right direction, each datum moves at most once, at
    /// most one transfer per bus and offset, and every offset is below the
    /// cadence.
    pub fn validate(&self, g: &Sfg) -> Result<()> {
        if self.latency_bound == 0 {
            return Err(Error::IoConstraint("latency bound must be at least 1 cycle".into()));
        }
        let mut names = BTreeSet::new();
        for b in &self.buses {
            if !names.insert(b.name.as_str()) {
                return Err(Error::IoConstraint(format!("bus `{}` declared twice", b.name)));
            }
        }
        let kinds: HashMap<NodeId, NodeKind> = g.nodes.iter().map(|n| (n.id, n.kind)).collect();
        let mut slots = BTreeSet::new();
        let mut moved = BTreeSet::new();
        for t in &self.transfers {
            let bus = self
                .buses
                .get(t.bus)
                .ok_or_else(|| Error::IoConstraint(format!("transfer of {} uses undeclared bus #{}", t.data, t.bus)))?;
            let expected = match bus.direction {
                Direction::In => NodeKind::Input,
                Direction::Out => NodeKind::Output,
            };
            match kinds.get(&t.data) {
                Some(k) if *k == expected => {}
                Some(k) => {
                    return Err(Error::IoConstraint(format!(
                        "{} is {:?} but bus `{}` carries {:?} data",
                        t.data, k, bus.name, expected
                    )))
                }
                None => {
                    return Err(Error::IoConstraint(format!(
                        "transfer references unknown node {}",
                        t.data
                    )))
                }
            }
            if !moved.insert(t.data) {
                return Err(Error::IoConstraint(format!("{} is transferred more than once", t.data)));
            }
            if !slots.insert((t.bus, t.offset)) {
                return Err(Error::IoConstraint(format!(
                    "two transfers on bus `{}` at offset {}",
                    bus.name, t.offset
                )));
            }
            if t.offset >= self.cadence {
                return Err(Error::IoConstraint(format!(
                    "transfer of {} at offset {} does not fit the cadence {}",
                    t.data, t.offset, self.cadence
                )));
            }
        }
        Ok(())
    }

    /// Parses a constraint document, resolving data labels against `g`.
    ///
    /// ```json
    /// { "buses": [ { "name": "bus1", "dir": "in" }, { "name": "bus2", "dir": "out" } ],
    ///   "transfers": [ { "data": "a", "bus": "bus1", "offset": 0 } ],
    ///   "cadence": 3, "latency": 3 }
    /// ```
    ///
    /// `cadence` defaults to the latency bound.
    pub fn from_document(text: &str, g: &Sfg) -> Result<Self> {
        let doc: IoDoc = serde_json::from_str(text).map_err(Error::from_json)?;
        let labels = io_labels(g)?;
        let mut spec = IoConstraintSpec {
            transfers: Vec::with_capacity(doc.transfers.len()),
            cadence: doc.cadence.unwrap_or(doc.latency),
            latency_bound: doc.latency,
            buses: doc.buses,
        };
        for t in doc.transfers {
            let data = *labels
                .get(t.data.as_str())
                .ok_or_else(|| Error::IoConstraint(format!("no input or output labelled `{}`", t.data)))?;
            let bus = spec
                .bus_index(&t.bus)
                .ok_or_else(|| Error::IoConstraint(format!("undeclared bus `{}`", t.bus)))?;
            spec.transfers.push(Transfer {
                data,
                bus,
                offset: t.offset,
            });
        }
        spec.validate(g)?;
        Ok(spec)
    }

    pub fn to_document(&self, g: &Sfg) -> String {
        let label = |id: NodeId| g.node(id).map(|n| n.label.clone()).unwrap_or_else(|| id.to_string());
        let mut transfers: Vec<&Transfer> = self.transfers.iter().collect();
        transfers.sort_by_key(|t| (t.offset, t.bus, t.data));
        let doc = IoDoc {
            buses: self.buses.clone(),
            transfers: transfers
                .into_iter()
                .map(|t| TransferDoc {
                    data: label(t.data),
                    bus: self.buses[t.bus].name.clone(),
                    offset: t.offset,
                })
                .collect(),
            cadence: Some(self.cadence),
            latency: self.latency_bound,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("io serialization");
        s.push('\n');
        s
    }
}

/// Label lookup restricted to input and output nodes; labels must be unique
/// among them.
pub(crate) fn io_labels(g: &Sfg) -> Result<BTreeMap<&str, NodeId>> {
    let mut map = BTreeMap::new();
    for n in g
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Input | NodeKind::Output))
    {
        if map.insert(n.label.as_str(), n.id).is_some() {
            return Err(Error::IoConstraint(format!(
                "label `{}` names several I/O nodes",
                n.label
            )));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_sfg;
    use crate::graph::tests::REFERENCE;

    #[test]
    fn document_roundtrip() {
        let g = parse_sfg(REFERENCE).unwrap();
        let doc = r#"{ "buses": [ {"name":"bus1","dir":"in"}, {"name":"bus2","dir":"in"}, {"name":"bus3","dir":"out"} ],
                      "transfers": [ {"data":"a","bus":"bus1","offset":0}, {"data":"b","bus":"bus2","offset":0},
                                     {"data":"c","bus":"bus3","offset":2} ],
                      "latency": 3 }"#;
        let spec = IoConstraintSpec::from_document(doc, &g).unwrap();
        assert_eq!(spec.cadence, 3);
        assert_eq!(spec.transfers.len(), 3);
        let again = IoConstraintSpec::from_document(&spec.to_document(&g), &g).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn rejects_bad_transfers() {
        let g = parse_sfg(REFERENCE).unwrap();
        let same_slot = r#"{ "buses": [ {"name":"bus1","dir":"in"} ],
            "transfers": [ {"data":"a","bus":"bus1","offset":0}, {"data":"b","bus":"bus1","offset":0} ], "latency": 3 }"#;
        assert!(matches!(
            IoConstraintSpec::from_document(same_slot, &g),
            Err(Error::IoConstraint(_))
        ));
        let wrong_dir = r#"{ "buses": [ {"name":"bus1","dir":"out"} ],
            "transfers": [ {"data":"a","bus":"bus1","offset":0} ], "latency": 3 }"#;
        assert!(IoConstraintSpec::from_document(wrong_dir, &g).is_err());
        let past_cadence = r#"{ "buses": [ {"name":"bus1","dir":"in"} ],
            "transfers": [ {"data":"a","bus":"bus1","offset":5} ], "cadence": 4, "latency": 4 }"#;
        assert!(IoConstraintSpec::from_document(past_cadence, &g).is_err());
        let unknown = r#"{ "buses": [ {"name":"bus1","dir":"in"} ],
            "transfers": [ {"data":"zz","bus":"bus1","offset":0} ], "latency": 4 }"#;
        assert!(IoConstraintSpec::from_document(unknown, &g).is_err());
    }
}
