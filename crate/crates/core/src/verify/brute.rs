// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, HashSet};

use crate::constraints::{
    build_acg, build_iocg, check_feasibility, compute_time_windows, critical_path, merge_gcg, CgNodeKind,
    ConstraintGraph, Direction, IoConstraintSpec, OperatorLibrary, TimeWindows,
};
use crate::error::{Error, Result};
use crate::graph::Sfg;
use crate::memory::{AccessRequest, MemoryMapping, PortAccessTable};
use crate::schedule::{build_units, SchedUnit, Schedule};
use crate::{Cycle, Duration};

/// Largest number of operations the exhaustive search accepts.
pub const BRUTE_FORCE_LIMIT: usize = 10;

#[derive(Clone)]
struct State {
    start: Vec<Option<Cycle>>,
    /// Busy-until cycle of every instance, per class, by rank.
    pool: Vec<Vec<Cycle>>,
    rank: Vec<Option<u32>>,
    table: PortAccessTable,
    accesses: Vec<(usize, crate::memory::Reservation)>,
}

struct Search<'a> {
    units: &'a [SchedUnit],
    alap: Vec<i64>,
    cap: Vec<Option<u32>>,
    end: Cycle,
    failed: HashSet<Vec<i64>>,
}

impl Search<'_> {
    fn ready_at(&self, st: &State, u: usize) -> Option<Cycle> {
        let unit = &self.units[u];
        let mut t = unit.earliest;
        for &(d, delay) in &unit.deps {
            t = t.max(st.start[d]? + delay);
        }
        Some(t)
    }

    fn key(&self, t: Cycle, st: &State) -> Vec<i64> {
        let mut key = vec![i64::from(t)];
        key.extend(st.start.iter().map(|s| s.map_or(-1, i64::from)));
        for class in &st.pool {
            let mut busy: Vec<i64> = class.iter().map(|&b| i64::from(b.max(t))).collect();
            busy.sort();
            key.push(-2);
            key.extend(busy);
        }
        for (_, bank) in st.table.banks() {
            key.push(-3);
            key.push(bank.last_address().map_or(-1, i64::from));
            let from = (t / bank.t_seq) as usize;
            let mut ports: Vec<Vec<i64>> = (0..bank.ports())
                .map(|p| {
                    (from..bank.horizon())
                        .map(|s| i64::from(bank.slot(p, s).is_some()))
                        .collect()
                })
                .collect();
            ports.sort();
            for p in ports {
                key.extend(p);
            }
        }
        key
    }

    fn dfs(&mut self, t: Cycle, st: &State) -> Option<State> {
        let pending: Vec<usize> = (0..self.units.len()).filter(|&u| st.start[u].is_none()).collect();
        if pending.is_empty() {
            return Some(st.clone());
        }
        if t >= self.end {
            return None;
        }
        let mut mandatory = Vec::new();
        let mut optional = Vec::new();
        for &u in &pending {
            let alap = self.alap[u];
            match self.ready_at(st, u) {
                Some(r) if r <= t => {
                    if alap < i64::from(t) {
                        return None;
                    } else if alap == i64::from(t) {
                        mandatory.push(u);
                    } else {
                        optional.push(u);
                    }
                }
                _ if alap <= i64::from(t) => return None,
                _ => {}
            }
        }
        let key = self.key(t, st);
        if self.failed.contains(&key) {
            return None;
        }
        for mask in 0u32..(1 << optional.len()) {
            let mut chosen = mandatory.clone();
            chosen.extend(
                optional
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &u)| u),
            );
            if let Some(done) = self.try_set(t, st, &chosen) {
                return Some(done);
            }
        }
        self.failed.insert(key);
        None
    }

    /// Starts every unit of `chosen` at `t`, trying each order of the
    /// memory-accessing ones.
    fn try_set(&mut self, t: Cycle, st: &State, chosen: &[usize]) -> Option<State> {
        let mut next = st.clone();
        for &u in chosen {
            let unit = &self.units[u];
            if let Some(c) = unit.class {
                let busy = &mut next.pool[c];
                let rank = match busy.iter().position(|&b| b <= t) {
                    Some(r) => r,
                    None => {
                        if self.cap[c].is_some_and(|cap| busy.len() as u32 >= cap) {
                            return None;
                        }
                        busy.push(0);
                        busy.len() - 1
                    }
                };
                busy[rank] = t + unit.latency;
                next.rank[u] = Some(rank as u32);
            }
            next.start[u] = Some(t);
        }
        let mut movers: Vec<usize> = chosen
            .iter()
            .copied()
            .filter(|&u| !self.units[u].requests.is_empty())
            .collect();
        let mut orders = Vec::new();
        permutations(&mut movers, 0, &mut |order| orders.push(order.to_vec()));
        for order in orders {
            let requests: Vec<AccessRequest> = order
                .iter()
                .flat_map(|&u| self.units[u].requests.iter().copied())
                .collect();
            let Ok(plan) = next.table.plan(&requests, t) else {
                continue;
            };
            let mut with = next.clone();
            with.table.commit(&plan);
            let mut k = 0;
            for &u in &order {
                for _ in &self.units[u].requests {
                    with.accesses.push((u, plan[k]));
                    k += 1;
                }
            }
            if let Some(done) = self.dfs(t + 1, &with) {
                return Some(done);
            }
        }
        None
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn guard(gcg: &ConstraintGraph) -> Result<()> {
    let ops = gcg.operations().count();
    if ops > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge {
            limit: BRUTE_FORCE_LIMIT,
            actual: ops,
        });
    }
    Ok(())
}

fn caps(lib: &OperatorLibrary, cap: Option<&BTreeMap<String, u32>>) -> Vec<Option<u32>> {
    lib.classes
        .iter()
        .map(|c| cap.map(|m| m.get(&c.name).copied().unwrap_or(0)))
        .collect()
}

fn run(
    gcg: &ConstraintGraph,
    windows: &TimeWindows,
    mapping: &MemoryMapping,
    lib: &OperatorLibrary,
    cap: Option<&BTreeMap<String, u32>>,
    cadence: Duration,
) -> Option<(Vec<SchedUnit>, State)> {
    if windows.asap.iter().zip(&windows.alap).any(|(a, l)| a > l) {
        return None;
    }
    let units = build_units(gcg, mapping);
    let mut search = Search {
        alap: units.iter().map(|u| windows.alap[u.node]).collect(),
        units: &units,
        cap: caps(lib, cap),
        end: gcg.latency_bound,
        failed: HashSet::new(),
    };
    let init = State {
        start: vec![None; units.len()],
        pool: vec![Vec::new(); lib.classes.len()],
        rank: vec![None; units.len()],
        table: PortAccessTable::new(mapping, cadence.max(1)),
        accesses: Vec::new(),
    };
    let done = search.dfs(0, &init)?;
    Some((units, done))
}

/// Exhaustive search for a schedule meeting `spec` (its latency bound
/// included). `cap` bounds the instances per class name; `None` leaves
/// them unbounded. Returns `None` when the feasibility checks fail or no
/// schedule exists.
pub fn brute_force_feasible(
    g: &Sfg,
    lib: &OperatorLibrary,
    mapping: &MemoryMapping,
    spec: &IoConstraintSpec,
    cap: Option<&BTreeMap<String, u32>>,
) -> Result<Option<Schedule>> {
    let acg = build_acg(g, lib)?;
    guard(&acg)?;
    let gcg = merge_gcg(&acg, &build_iocg(spec)?, spec)?;
    let windows = compute_time_windows(&gcg);
    if !check_feasibility(&gcg, &windows, spec).feasible() {
        return Ok(None);
    }
    let Some((units, st)) = run(&gcg, &windows, mapping, lib, cap, spec.cadence) else {
        return Ok(None);
    };
    let start: Vec<Cycle> = st.start.iter().map(|s| s.expect("complete")).collect();
    let mut order = vec![0u32; mapping.banks.len()];
    let accesses = st
        .accesses
        .iter()
        .map(|(u, r)| {
            let rec = crate::schedule::access_record(&units[*u], r, order[r.bank.0], mapping);
            order[r.bank.0] += 1;
            rec
        })
        .collect();
    let pool = lib
        .classes
        .iter()
        .zip(&st.pool)
        .map(|(c, p)| (c.name.clone(), p.len() as u32))
        .collect();
    let s = crate::schedule::assemble(&gcg, &units, &start, &st.rank, accesses, pool, lib, spec)
        .ok()
        .filter(|s| s.latency <= spec.latency_bound);
    Ok(s)
}

/// Smallest latency, measured from the first input arrival to the last
/// output, of any schedule of `g`. Output transfer offsets of `spec` are
/// ignored; input arrivals are kept. Work not feeding an output must end
/// within `horizon` cycles of the first input (default twice the critical
/// path). A graph without outputs has latency 0. Returns `None` when
/// nothing fits the horizon.
pub fn brute_force_min_latency(
    g: &Sfg,
    lib: &OperatorLibrary,
    mapping: &MemoryMapping,
    spec: &IoConstraintSpec,
    cap: Option<&BTreeMap<String, u32>>,
    horizon: Option<Duration>,
) -> Result<Option<Duration>> {
    let acg = build_acg(g, lib)?;
    guard(&acg)?;
    if !acg.nodes.iter().any(|n| n.kind == CgNodeKind::Output) {
        return Ok(Some(0));
    }
    let horizon = horizon.unwrap_or_else(|| 2 * critical_path(&acg)).max(1);
    let mut relaxed = spec.clone();
    relaxed
        .transfers
        .retain(|t| spec.buses[t.bus].direction == Direction::In);
    let first_in = acg
        .nodes
        .iter()
        .filter(|n| n.kind == CgNodeKind::Input)
        .map(|n| relaxed.transfer_of(n.sfg).map_or(0, |t| t.offset))
        .min()
        .unwrap_or(0);
    relaxed.latency_bound = first_in + horizon;
    relaxed.cadence = relaxed.cadence.max(relaxed.latency_bound);
    let base = merge_gcg(&acg, &build_iocg(&relaxed)?, &relaxed)?;
    for x in 1..=horizon {
        let mut gcg = base.clone();
        for n in &mut gcg.nodes {
            if n.kind == CgNodeKind::Output {
                n.deadline = Some(first_in + x - 1);
            }
        }
        let windows = compute_time_windows(&gcg);
        if run(&gcg, &windows, mapping, lib, cap, relaxed.cadence).is_some() {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::parse_sfg;

    #[test]
    fn reference_minimum_latencies() {
        let g = corpus::reference_sfg();
        let lib = OperatorLibrary::unit_latency();
        let spec = corpus::parallel_io(&g, 3);
        let one = brute_force_min_latency(&g, &lib, &corpus::single_bank(&g), &spec, None, None).unwrap();
        let two = brute_force_min_latency(&g, &lib, &corpus::two_banks(&g), &spec, None, None).unwrap();
        assert_eq!((one, two), (Some(3), Some(2)));
    }

    #[test]
    fn single_adder_takes_its_latency() {
        let g = parse_sfg(
            r#"{"nodes":[{"id":0,"kind":"input","label":"x"},{"id":1,"kind":"input","label":"y"},
               {"id":2,"kind":"operation","op":"+","label":"s"},{"id":3,"kind":"output","label":"z"}],
               "edges":[{"from":0,"to":2,"pos":0},{"from":1,"to":2,"pos":1},{"from":2,"to":3,"pos":0}]}"#,
        )
        .unwrap();
        let mut lib = OperatorLibrary::unit_latency();
        let spec = IoConstraintSpec::unconstrained(8);
        let m = MemoryMapping::default();
        assert_eq!(
            brute_force_min_latency(&g, &lib, &m, &spec, None, None).unwrap(),
            Some(1)
        );
        lib.classes[1].latency = 3;
        assert_eq!(
            brute_force_min_latency(&g, &lib, &m, &spec, None, None).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn feasibility_at_fixed_bound() {
        let g = corpus::reference_sfg();
        let lib = OperatorLibrary::unit_latency();
        let m = corpus::single_bank(&g);
        assert!(brute_force_feasible(&g, &lib, &m, &corpus::parallel_io(&g, 2), None)
            .unwrap()
            .is_none());
        let s = brute_force_feasible(&g, &lib, &m, &corpus::parallel_io(&g, 3), None)
            .unwrap()
            .unwrap();
        assert_eq!(s.latency, 3);
        let cap: BTreeMap<String, u32> = [("mult".to_string(), 1), ("add".to_string(), 1)].into();
        let two = corpus::two_banks(&g);
        assert!(
            brute_force_feasible(&g, &lib, &two, &corpus::parallel_io(&g, 2), Some(&cap))
                .unwrap()
                .is_none()
        );
        assert!(brute_force_feasible(&g, &lib, &two, &corpus::parallel_io(&g, 2), None)
            .unwrap()
            .is_some());
    }

    #[test]
    fn rejects_large_instances() {
        let g = crate::graph::generate_fft_sfg(8).unwrap();
        let lib = OperatorLibrary::fft_reference();
        let r = brute_force_min_latency(
            &g,
            &lib,
            &MemoryMapping::default(),
            &IoConstraintSpec::unconstrained(8),
            None,
            None,
        );
        assert!(matches!(r, Err(Error::InstanceTooLarge { limit: 10, .. })));
    }
}
