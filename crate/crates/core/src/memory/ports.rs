// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::{Address, Bank, BankId, MemoryMapping};
use crate::graph::NodeId;
use crate::{Cycle, Duration};

/// Occupancy of one bank: `N = cadence / t_seq` slots per port, each slot
/// lasting `t_seq` cycles, plus the last address accessed on any port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BankState {
    pub t_seq: Duration,
    pub t_rand: Duration,
    slots: Vec<Vec<Option<NodeId>>>,
    last_address: Option<Address>,
    last_data: Option<NodeId>,
}

impl BankState {
    fn new(bank: &Bank, cadence: Duration) -> Self {
        let n = (cadence / bank.t_seq).max(1) as usize;
        BankState {
            t_seq: bank.t_seq,
            t_rand: bank.t_rand,
            slots: vec![vec![None; n]; bank.ports as usize],
            last_address: None,
            last_data: None,
        }
    }

    pub fn horizon(&self) -> usize {
        self.slots[0].len()
    }

    pub fn ports(&self) -> usize {
        self.slots.len()
    }

    pub fn last_address(&self) -> Option<Address> {
        self.last_address
    }

    pub fn last_data(&self) -> Option<NodeId> {
        self.last_data
    }

    /// Datum holding `slot` on `port`, if reserved.
    pub fn slot(&self, port: usize, slot: usize) -> Option<NodeId> {
        self.slots[port][slot]
    }

    fn cost_after(&self, last: Option<Address>, addr: Address) -> Duration {
        match last {
            None => self.t_seq,
            Some(l) if l.checked_add(1) == Some(addr) => self.t_seq,
            Some(_) => self.t_rand,
        }
    }

    fn slot_span(&self, cycle: Cycle, cost: Duration) -> (usize, usize) {
        let first = (cycle / self.t_seq) as usize;
        (first, cost.div_ceil(self.t_seq) as usize)
    }
}

/// Duration of an access to `addr`: sequential time when the bank is idle
/// or `addr` follows the last accessed address, random time otherwise.
pub fn access_cost(state: &BankState, addr: Address) -> Duration {
    state.cost_after(state.last_address, addr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reservation {
    pub bank: BankId,
    pub port: usize,
    pub cycle: Cycle,
    pub data: NodeId,
    pub address: Address,
    pub cost: Duration,
    pub sequential: bool,
    pub first_slot: usize,
    pub slots: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessError {
    /// No port of the bank has the required slots free.
    Conflict { bank: BankId },
    /// The access would run past the end of the table.
    Horizon { bank: BankId, cycle: Cycle },
}

impl AccessError {
    pub fn bank(&self) -> BankId {
        match *self {
            AccessError::Conflict { bank } | AccessError::Horizon { bank, .. } => bank,
        }
    }
}

impl fmt::Display for AccessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessError::Conflict { bank } => write!(f, "all ports of bank #{} busy", bank.0),
            AccessError::Horizon { bank, cycle } => {
                write!(f, "access to bank #{} at cycle {} runs past the table", bank.0, cycle)
            }
        }
    }
}

/// One access request: datum `data` at `address` in `bank`.
pub type AccessRequest = (BankId, Address, NodeId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortAccessTable {
    banks: Vec<BankState>,
}

impl PortAccessTable {
    pub fn new(mapping: &MemoryMapping, cadence: Duration) -> Self {
        PortAccessTable {
            banks: mapping.banks.iter().map(|b| BankState::new(b, cadence)).collect(),
        }
    }

    pub fn bank(&self, id: BankId) -> &BankState {
        &self.banks[id.0]
    }

    pub fn banks(&self) -> impl Iterator<Item = (BankId, &BankState)> {
        self.banks.iter().enumerate().map(|(i, b)| (BankId(i), b))
    }

    /// Plans `requests` in order, all starting at `cycle`, without touching
    /// the table. Each request takes the first port with its slots free;
    /// a request sees the address of the previous one on the same bank.
    pub fn plan(&self, requests: &[AccessRequest], cycle: Cycle) -> Result<Vec<Reservation>, AccessError> {
        let mut planned: Vec<Reservation> = Vec::with_capacity(requests.len());
        for &(bank, address, data) in requests {
            let state = &self.banks[bank.0];
            let last = planned
                .iter()
                .rev()
                .find(|r| r.bank == bank)
                .map(|r| Some(r.address))
                .unwrap_or(state.last_address);
            let cost = state.cost_after(last, address);
            let (first, count) = state.slot_span(cycle, cost);
            if first + count > state.horizon() {
                return Err(AccessError::Horizon { bank, cycle });
            }
            let taken = |port: usize, s: usize| {
                state.slots[port][s].is_some()
                    || planned.iter().any(|r| {
                        r.bank == bank && r.port == port && (r.first_slot..r.first_slot + r.slots).contains(&s)
                    })
            };
            let port = (0..state.ports())
                .find(|&p| (first..first + count).all(|s| !taken(p, s)))
                .ok_or(AccessError::Conflict { bank })?;
            planned.push(Reservation {
                bank,
                port,
                cycle,
                data,
                address,
                cost,
                sequential: cost == state.t_seq && last.is_none_or(|l| l.checked_add(1) == Some(address)),
                first_slot: first,
                slots: count,
            });
        }
        Ok(planned)
    }

    pub fn commit(&mut self, reservations: &[Reservation]) {
        for r in reservations {
            let state = &mut self.banks[r.bank.0];
            for s in r.first_slot..r.first_slot + r.slots {
                debug_assert!(state.slots[r.port][s].is_none(), "double booking");
                state.slots[r.port][s] = Some(r.data);
            }
            state.last_address = Some(r.address);
            state.last_data = Some(r.data);
        }
    }

    /// Reserves one access starting at `cycle` on the first free port.
    pub fn reserve_access(
        &mut self,
        bank: BankId,
        address: Address,
        data: NodeId,
        cycle: Cycle,
    ) -> Result<Reservation, AccessError> {
        let plan = self.plan(&[(bank, address, data)], cycle)?;
        self.commit(&plan);
        Ok(plan[0])
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn one_bank(ports: u32, cadence: Duration) -> PortAccessTable {
        let m = MemoryMapping {
            banks: vec![Bank::new("bank0", ports, 1, 2)],
            placement: BTreeMap::new(),
        };
        PortAccessTable::new(&m, cadence)
    }

    #[test]
    fn cost_rules() {
        let mut t = one_bank(1, 8);
        let b = BankId(0);
        assert_eq!(access_cost(t.bank(b), 5), 1, "idle bank");
        t.reserve_access(b, 0, NodeId(1), 0).unwrap();
        assert_eq!(access_cost(t.bank(b), 1), 1, "@0 then @1");
        t.reserve_access(b, 1, NodeId(2), 1).unwrap();
        assert_eq!(access_cost(t.bank(b), 0), 2, "@1 then @0");
        assert_eq!(access_cost(t.bank(b), 1), 2, "same address again");
    }

    #[test]
    fn single_port_conflicts() {
        let mut t = one_bank(1, 4);
        t.reserve_access(BankId(0), 0, NodeId(1), 0).unwrap();
        assert_eq!(
            t.reserve_access(BankId(0), 1, NodeId(2), 0),
            Err(AccessError::Conflict { bank: BankId(0) })
        );
    }

    #[test]
    fn dual_port_shares_a_cycle() {
        let mut t = one_bank(2, 4);
        let a = t.reserve_access(BankId(0), 0, NodeId(1), 0).unwrap();
        let b = t.reserve_access(BankId(0), 1, NodeId(2), 0).unwrap();
        assert_eq!((a.port, b.port), (0, 1));
        assert!(b.sequential);
    }

    #[test]
    fn random_access_at_last_slot_overflows() {
        let mut t = one_bank(1, 4);
        let n = t.bank(BankId(0)).horizon() as Cycle;
        assert_eq!(n, 4);
        t.reserve_access(BankId(0), 3, NodeId(1), 0).unwrap();
        assert_eq!(
            t.reserve_access(BankId(0), 0, NodeId(2), n - 1),
            Err(AccessError::Horizon {
                bank: BankId(0),
                cycle: n - 1
            })
        );
        // a sequential access still fits the last slot
        assert!(t.reserve_access(BankId(0), 4, NodeId(2), n - 1).is_ok());
    }

    #[test]
    fn random_access_holds_two_slots() {
        let mut t = one_bank(1, 6);
        t.reserve_access(BankId(0), 5, NodeId(1), 0).unwrap();
        let r = t.reserve_access(BankId(0), 0, NodeId(2), 1).unwrap();
        assert_eq!((r.cost, r.first_slot, r.slots), (2, 1, 2));
        assert!(t.reserve_access(BankId(0), 1, NodeId(3), 2).is_err());
        assert!(t.reserve_access(BankId(0), 1, NodeId(3), 3).is_ok());
    }

    #[test]
    fn plan_sees_earlier_requests() {
        let t = one_bank(2, 4);
        let plan = t
            .plan(&[(BankId(0), 4, NodeId(1)), (BankId(0), 5, NodeId(2))], 0)
            .unwrap();
        assert_eq!(plan[1].port, 1);
        assert!(plan[1].sequential);
        let single = one_bank(1, 4);
        assert!(single
            .plan(&[(BankId(0), 4, NodeId(1)), (BankId(0), 5, NodeId(2))], 0)
            .is_err());
    }
}
