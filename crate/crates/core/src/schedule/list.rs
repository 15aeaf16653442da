// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{
    build_units, AccessKind, AllocationMode, FailureReason, SchedUnit, Schedule, ScheduleFailure, ScheduledAccess,
    ScheduledOp, ScheduledTransfer,
};
use crate::constraints::{CgNodeKind, ConstraintGraph, Direction, IoConstraintSpec, OperatorLibrary, TimeWindows};
use crate::memory::{Mcg, MemoryMapping, PortAccessTable, Reservation};
use crate::Cycle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorInstance {
    pub class: usize,
    /// Rank among the instances of its class.
    pub index: u32,
    /// First cycle at which the instance is free again.
    pub busy_until: Cycle,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPool {
    pub instances: Vec<OperatorInstance>,
    /// Instances created at zero margin.
    pub created: u32,
}

impl OperatorPool {
    /// Auto mode starts with one instance of every class some unit uses;
    /// fixed mode with the requested counts.
    pub fn initial(units: &[SchedUnit], lib: &OperatorLibrary, mode: &AllocationMode) -> Self {
        let mut pool = OperatorPool::default();
        for (c, class) in lib.classes.iter().enumerate() {
            let n = match mode {
                AllocationMode::Auto => u32::from(units.iter().any(|u| u.class == Some(c))),
                AllocationMode::Fixed(counts) => counts.get(&class.name).copied().unwrap_or(0),
            };
            for _ in 0..n {
                pool.add(c);
            }
        }
        pool
    }

    fn add(&mut self, class: usize) -> usize {
        let index = self.count(class);
        self.instances.push(OperatorInstance {
            class,
            index,
            busy_until: 0,
        });
        self.instances.len() - 1
    }

    pub fn count(&self, class: usize) -> u32 {
        self.instances.iter().filter(|i| i.class == class).count() as u32
    }

    /// Lowest-ranked instance of `class` free at `t`.
    pub fn free(&self, class: usize, t: Cycle) -> Option<usize> {
        self.instances
            .iter()
            .position(|i| i.class == class && i.busy_until <= t)
    }
}

/// Everything the ranking and assignment steps read.
#[derive(Clone, Copy)]
pub struct SchedContext<'a> {
    pub units: &'a [SchedUnit],
    pub windows: &'a TimeWindows,
    pub mcg: &'a Mcg,
    pub lib: &'a OperatorLibrary,
    pub mapping: &'a MemoryMapping,
}

impl SchedContext<'_> {
    fn mobility(&self, u: usize) -> i64 {
        self.windows.mobility(self.units[u].node)
    }

    fn margin(&self, u: usize, t: Cycle) -> i64 {
        self.windows.alap[self.units[u].node] - i64::from(t)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ranking {
    /// Accessible units, highest priority first.
    pub ranked: Vec<usize>,
    /// Units whose operands cannot be accessed at this cycle.
    pub removed: Vec<usize>,
}

/// Burst class: 0 when the unit continues its bank's last access, 1 when it
/// heads a sequential pair among candidates of equal mobility and margin,
/// 2 otherwise.
fn burst_class(
    ctx: &SchedContext<'_>,
    u: usize,
    table: &PortAccessTable,
    heads: &HashSet<(i64, i64, usize)>,
    t: Cycle,
) -> u8 {
    let unit = &ctx.units[u];
    let continues = unit.requests.iter().any(|&(bank, _, data)| {
        table
            .bank(bank)
            .last_data()
            .is_some_and(|last| ctx.mcg.is_sequential(last, data))
    });
    if continues {
        0
    } else if heads.contains(&(ctx.mobility(u), ctx.margin(u, t), u)) {
        1
    } else {
        2
    }
}

/// Orders the ready units by ascending mobility, margin, burst class and
/// node id, after removing those whose accesses cannot be planned at `t`.
pub fn rank_executable(ctx: &SchedContext<'_>, ready: &[usize], t: Cycle, table: &PortAccessTable) -> Ranking {
    let mut ranking = Ranking::default();
    let mut candidates = Vec::new();
    for &u in ready {
        if table.plan(&ctx.units[u].requests, t).is_ok() {
            candidates.push(u);
        } else {
            ranking.removed.push(u);
        }
    }
    // (mobility, margin, datum) of every candidate's reads
    let mut reads: BTreeMap<(i64, i64), Vec<(usize, crate::graph::NodeId)>> = BTreeMap::new();
    for &u in &candidates {
        let key = (ctx.mobility(u), ctx.margin(u, t));
        for &(_, _, d) in &ctx.units[u].requests {
            reads.entry(key).or_default().push((u, d));
        }
    }
    let mut heads = HashSet::new();
    for ((mob, margin), list) in &reads {
        let present: BTreeSet<_> = list.iter().map(|(u, d)| (*d, *u)).collect();
        for &(u, d) in list {
            if let Some(next) = ctx.mcg.sequential_successor(d) {
                if present.range((next, 0)..=(next, usize::MAX)).any(|&(_, v)| v != u) {
                    heads.insert((*mob, *margin, u));
                }
            }
        }
    }
    let mut keyed: Vec<_> = candidates
        .into_iter()
        .map(|u| {
            let key = (
                ctx.mobility(u),
                ctx.margin(u, t),
                burst_class(ctx, u, table, &heads, t),
                ctx.units[u].sfg,
            );
            (key, u)
        })
        .collect();
    keyed.sort();
    ranking.ranked = keyed.into_iter().map(|(_, u)| u).collect();
    ranking.removed.sort_by_key(|&u| ctx.units[u].sfg);
    ranking
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub unit: usize,
    /// Index into [`OperatorPool::instances`]; `None` for writes.
    pub instance: Option<usize>,
    pub reservations: Vec<Reservation>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub assigned: Vec<Assignment>,
    pub delayed: Vec<usize>,
}

fn failure(ctx: &SchedContext<'_>, u: usize, t: Cycle, reason: FailureReason, bank: Option<usize>) -> ScheduleFailure {
    let unit = &ctx.units[u];
    ScheduleFailure {
        cycle: t,
        operation: unit.sfg,
        operator_class: unit.class.map(|c| ctx.lib.classes[c].name.clone()),
        bank: bank.map(|b| ctx.mapping.banks[b].name.clone()),
        reason,
    }
}

/// Assigns the ranked units at cycle `t`:
///
/// | margin | accessible | free instance | action                       |
/// |--------|------------|---------------|------------------------------|
/// | > 0    | yes        | yes           | assign                       |
/// | > 0    | no         |               | delay                        |
/// | > 0    | yes        | no            | delay                        |
/// | 0      | yes        | yes           | assign                       |
/// | 0      | yes        | no            | create (auto) or fail (fixed)|
/// | 0      | no         |               | fail                         |
///
/// Accessibility is re-planned after each assignment, so a unit can lose
/// its port to a higher-ranked one.
pub fn assign_step(
    ctx: &SchedContext<'_>,
    ranking: &Ranking,
    t: Cycle,
    pool: &mut OperatorPool,
    mode: &AllocationMode,
    table: &mut PortAccessTable,
) -> Result<StepOutcome, ScheduleFailure> {
    let mut out = StepOutcome::default();
    for &u in &ranking.removed {
        if ctx.margin(u, t) <= 0 {
            let bank = table.plan(&ctx.units[u].requests, t).err().map(|e| e.bank().0);
            return Err(failure(ctx, u, t, FailureReason::MemoryConflictAtZeroMargin, bank));
        }
        out.delayed.push(u);
    }
    for &u in &ranking.ranked {
        let unit = &ctx.units[u];
        let zero = ctx.margin(u, t) <= 0;
        let plan = match table.plan(&unit.requests, t) {
            Ok(p) => p,
            Err(e) if zero => {
                return Err(failure(
                    ctx,
                    u,
                    t,
                    FailureReason::MemoryConflictAtZeroMargin,
                    Some(e.bank().0),
                ))
            }
            Err(_) => {
                out.delayed.push(u);
                continue;
            }
        };
        let instance = match unit.class {
            None => None,
            Some(c) => match pool.free(c, t) {
                Some(i) => Some(i),
                None if !zero => {
                    out.delayed.push(u);
                    continue;
                }
                None => match mode {
                    AllocationMode::Auto => {
                        pool.created += 1;
                        Some(pool.add(c))
                    }
                    AllocationMode::Fixed(_) => {
                        return Err(failure(ctx, u, t, FailureReason::FixedAllocationExhausted, None));
                    }
                },
            },
        };
        if let Some(i) = instance {
            pool.instances[i].busy_until = t + unit.latency;
        }
        table.commit(&plan);
        out.assigned.push(Assignment {
            unit: u,
            instance,
            reservations: plan,
        });
    }
    Ok(out)
}

/// Runs the list scheduler over cycles `0..latency_bound`.
///
/// Preconditions: the feasibility checks passed and `mapping` places every
/// memory datum of the graph.
pub fn schedule(
    gcg: &ConstraintGraph,
    windows: &TimeWindows,
    mcg: &Mcg,
    mapping: &MemoryMapping,
    lib: &OperatorLibrary,
    spec: &IoConstraintSpec,
    mode: &AllocationMode,
) -> Result<Schedule, ScheduleFailure> {
    let units = build_units(gcg, mapping);
    let ctx = SchedContext {
        units: &units,
        windows,
        mcg,
        lib,
        mapping,
    };
    let mut pool = OperatorPool::initial(&units, lib, mode);
    let mut table = PortAccessTable::new(mapping, spec.cadence.max(1));

    let mut succs: Vec<Vec<(usize, u32)>> = vec![Vec::new(); units.len()];
    let mut pending: Vec<usize> = vec![0; units.len()];
    for (v, unit) in units.iter().enumerate() {
        for &(u, delay) in &unit.deps {
            succs[u].push((v, delay));
            pending[v] += 1;
        }
    }
    let mut ready_at: Vec<Cycle> = units.iter().map(|u| u.earliest).collect();
    let mut ready: BTreeSet<usize> = (0..units.len()).filter(|&u| pending[u] == 0).collect();
    let mut start: Vec<Option<Cycle>> = vec![None; units.len()];
    let mut instance_of: Vec<Option<usize>> = vec![None; units.len()];
    let mut accesses = Vec::new();
    let mut bank_order = vec![0u32; mapping.banks.len()];

    for t in 0..spec.latency_bound {
        if let Some(&late) = ready
            .iter()
            .find(|&&u| i64::from(ready_at[u].max(t)) > windows.alap[units[u].node])
        {
            return Err(failure(&ctx, late, t, FailureReason::InfeasibleWindows, None));
        }
        let now: Vec<usize> = ready.iter().copied().filter(|&u| ready_at[u] <= t).collect();
        if now.is_empty() {
            continue;
        }
        let ranking = rank_executable(&ctx, &now, t, &table);
        let step = assign_step(&ctx, &ranking, t, &mut pool, mode, &mut table)?;
        for a in step.assigned {
            ready.remove(&a.unit);
            start[a.unit] = Some(t);
            instance_of[a.unit] = a.instance;
            for r in &a.reservations {
                accesses.push(access_record(&units[a.unit], r, bank_order[r.bank.0], mapping));
                bank_order[r.bank.0] += 1;
            }
            for &(v, delay) in &succs[a.unit] {
                ready_at[v] = ready_at[v].max(t + delay);
                pending[v] -= 1;
                if pending[v] == 0 {
                    ready.insert(v);
                }
            }
        }
    }
    if let Some(u) = start.iter().position(Option::is_none) {
        return Err(failure(
            &ctx,
            u,
            spec.latency_bound,
            FailureReason::InfeasibleWindows,
            None,
        ));
    }

    let start: Vec<Cycle> = start.into_iter().map(|c| c.expect("checked above")).collect();
    let ranks: Vec<Option<u32>> = instance_of.iter().map(|i| i.map(|i| pool.instances[i].index)).collect();
    let pool_counts = lib
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| (class.name.clone(), pool.count(c)))
        .collect();
    assemble(gcg, &units, &start, &ranks, accesses, pool_counts, lib, spec)
        .map_err(|(u, cycle)| failure(&ctx, u, cycle, FailureReason::InfeasibleWindows, None))
}

/// Access record for reservation `r` made by `unit`.
pub(crate) fn access_record(unit: &SchedUnit, r: &Reservation, order: u32, mapping: &MemoryMapping) -> ScheduledAccess {
    let (kind, op) = match unit.producer {
        Some(p) => (AccessKind::Write, p),
        None => (AccessKind::Read, unit.sfg),
    };
    ScheduledAccess {
        cycle: r.cycle,
        order,
        data: r.data,
        kind,
        op,
        bank: mapping.banks[r.bank.0].name.clone(),
        port: r.port as u32,
        cost: r.cost,
        sequential: r.sequential,
    }
}

/// Builds the schedule records from unit start cycles and instance ranks.
/// Fails with `(unit, cycle)` when a constrained output is produced after
/// its transfer.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    gcg: &ConstraintGraph,
    units: &[SchedUnit],
    start: &[Cycle],
    ranks: &[Option<u32>],
    accesses: Vec<ScheduledAccess>,
    pool: BTreeMap<String, u32>,
    lib: &OperatorLibrary,
    spec: &IoConstraintSpec,
) -> Result<Schedule, (usize, Cycle)> {
    let mut unit_index = vec![usize::MAX; gcg.nodes.len()];
    for (k, u) in units.iter().enumerate() {
        unit_index[u.node] = k;
    }
    let node_start = |i: usize| start[unit_index[i]];

    let mut operations = Vec::new();
    for (k, unit) in units.iter().enumerate() {
        if let (Some(c), Some(rank)) = (unit.class, ranks[k]) {
            operations.push(ScheduledOp {
                cycle: start[k],
                node: unit.sfg,
                class: lib.classes[c].name.clone(),
                instance: rank,
                latency: unit.latency,
            });
        }
    }

    let bus_name = |b: Option<usize>| b.map(|b| spec.buses[b].name.clone());
    let mut transfers = Vec::new();
    for (i, n) in gcg.nodes.iter().enumerate() {
        match n.kind {
            CgNodeKind::Input => {
                let cycle = match n.bus {
                    Some(_) => n.arrival.unwrap_or(0),
                    None => first_use(gcg, i, &node_start).unwrap_or(0),
                };
                transfers.push(ScheduledTransfer {
                    cycle,
                    data: n.sfg,
                    dir: Direction::In,
                    bus: bus_name(n.bus),
                });
            }
            CgNodeKind::Output => {
                let ready = gcg
                    .preds(i)
                    .map(|e| match gcg.nodes[e.from].kind {
                        CgNodeKind::Input => gcg.nodes[e.from].arrival.unwrap_or(0) + e.delay,
                        _ => node_start(e.from) + e.delay,
                    })
                    .max()
                    .unwrap_or(0);
                let cycle = match (n.bus, n.deadline) {
                    (Some(_), Some(d)) => {
                        if ready > d {
                            let driver = gcg.preds(i).next().map(|e| e.from);
                            let unit = driver.map(|d| unit_index[d]).filter(|&u| u != usize::MAX).unwrap_or(0);
                            return Err((unit, ready));
                        }
                        d
                    }
                    _ => ready,
                };
                transfers.push(ScheduledTransfer {
                    cycle,
                    data: n.sfg,
                    dir: Direction::Out,
                    bus: bus_name(n.bus),
                });
            }
            _ => {}
        }
    }

    let mut s = Schedule {
        latency: 0,
        latency_bound: spec.latency_bound,
        cadence: spec.cadence,
        pool,
        operations,
        accesses,
        transfers,
    };
    s.normalize();
    s.latency = s.measured_latency();
    Ok(s)
}

/// Earliest start among the scheduled consumers of input `i`; an output
/// fed directly by the input uses it at cycle 0.
fn first_use(gcg: &ConstraintGraph, i: usize, node_start: &dyn Fn(usize) -> Cycle) -> Option<Cycle> {
    gcg.succs(i)
        .map(|e| match gcg.nodes[e.to].kind {
            CgNodeKind::Output => 0,
            _ => node_start(e.to),
        })
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::NodeId;
    use crate::memory::{Bank, BankId};
    use crate::pipeline::{Outcome, Problem};
    use crate::schedule::{estimate_registers, FailureReason};

    fn reference(latency: u32, two_banks: bool) -> Problem {
        let g = corpus::reference_sfg();
        Problem {
            spec: corpus::parallel_io(&g, latency),
            mapping: if two_banks {
                corpus::two_banks(&g)
            } else {
                corpus::single_bank(&g)
            },
            lib: OperatorLibrary::unit_latency(),
            graph: g,
        }
    }

    #[test]
    fn burst_order_at_latency_3() {
        let out = reference(3, false).run(&AllocationMode::Auto).unwrap();
        let s = out.schedule().expect("schedules");
        assert_eq!(s.op(corpus::MUL_B).unwrap().cycle, 0);
        assert_eq!(s.op(corpus::MUL_A).unwrap().cycle, 1);
        assert_eq!(s.op(corpus::ADD).unwrap().cycle, 2);
        let second = s.accesses.iter().find(|a| a.data == corpus::VAR1).unwrap();
        assert!(second.sequential && second.cost == 1);
        assert_eq!(s.latency, 3);
        assert_eq!(s.pool["mult"], 1);
    }

    #[test]
    fn abort_at_latency_2() {
        match reference(2, false).run(&AllocationMode::Auto).unwrap() {
            Outcome::Failed(f) => {
                assert_eq!(f.reason, FailureReason::MemoryConflictAtZeroMargin);
                assert_eq!(f.cycle, 0);
                assert_eq!(f.operation, corpus::MUL_A);
                assert_eq!(f.bank.as_deref(), Some("bank0"));
                assert_eq!(f.operator_class.as_deref(), Some("mult"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn two_banks_two_multipliers() {
        let out = reference(2, true).run(&AllocationMode::Auto).unwrap();
        let r = out.report().expect("schedules");
        assert_eq!((r.operator_count("mult"), r.operator_count("add"), r.banks), (2, 1, 2));
        assert_eq!(r.registers, 5);
    }

    #[test]
    fn sequential_io_registers() {
        let g = corpus::reference_sfg();
        let p = Problem {
            spec: corpus::sequential_io(&g, 3),
            mapping: corpus::single_bank(&g),
            lib: OperatorLibrary::unit_latency(),
            graph: g,
        };
        let out = p.run(&AllocationMode::Auto).unwrap();
        let s = out.schedule().expect("schedules");
        assert_eq!(estimate_registers(s, &p.graph), 4);
        assert_eq!(out.report().unwrap().operator_count("mult"), 1);
    }

    #[test]
    fn fixed_allocation_exhausted() {
        let mode = AllocationMode::parse("fixed:mult=1,add=1").unwrap();
        match reference(2, true).run(&mode).unwrap() {
            Outcome::Failed(f) => {
                assert_eq!(f.reason, FailureReason::FixedAllocationExhausted);
                // separate banks give no burst preference, so node id decides
                assert_eq!(f.operation, corpus::MUL_B);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(reference(3, true).run(&mode).unwrap().schedule().is_some());
    }

    fn ctx_fixture(p: &Problem) -> (crate::pipeline::Prepared, Vec<SchedUnit>) {
        let prep = p.prepare().unwrap();
        let units = build_units(&prep.gcg, &prep.mapping);
        (prep, units)
    }

    #[test]
    fn ranking_prefers_burst_head() {
        let p = reference(3, false);
        let (prep, units) = ctx_fixture(&p);
        let ctx = SchedContext {
            units: &units,
            windows: &prep.windows,
            mcg: &prep.mcg,
            lib: &p.lib,
            mapping: &prep.mapping,
        };
        let ua = units.iter().position(|u| u.sfg == corpus::MUL_A).unwrap();
        let ub = units.iter().position(|u| u.sfg == corpus::MUL_B).unwrap();
        let table = PortAccessTable::new(&prep.mapping, 3);
        let r = rank_executable(&ctx, &[ua, ub], 0, &table);
        assert_eq!(r.ranked, vec![ub, ua]);

        // once bank0 is held at cycle 0 the other read is removed
        let mut busy = table.clone();
        busy.reserve_access(BankId(0), 0, corpus::VAR2, 0).unwrap();
        let r = rank_executable(&ctx, &[ua], 0, &busy);
        assert!(r.ranked.is_empty());
        assert_eq!(r.removed, vec![ua]);
    }

    #[test]
    fn ranking_by_mobility_first() {
        // y = (x * k) + z, w = x2 * k2: the chain has less slack than the lone product
        let g = crate::graph::parse_sfg(
            r#"{"nodes":[{"id":0,"kind":"input","label":"x"},{"id":1,"kind":"constant","label":"k","value":2},
               {"id":2,"kind":"input","label":"z"},{"id":3,"kind":"operation","op":"*","label":"m"},
               {"id":4,"kind":"operation","op":"+","label":"s"},{"id":5,"kind":"output","label":"y"},
               {"id":6,"kind":"operation","op":"*","label":"m2"},{"id":7,"kind":"output","label":"w"}],
               "edges":[{"from":0,"to":3,"pos":0},{"from":1,"to":3,"pos":1},{"from":3,"to":4,"pos":0},
               {"from":2,"to":4,"pos":1},{"from":4,"to":5,"pos":0},{"from":2,"to":6,"pos":0},
               {"from":1,"to":6,"pos":1},{"from":6,"to":7,"pos":0}]}"#,
        )
        .unwrap();
        let p = Problem {
            spec: IoConstraintSpec::unconstrained(4),
            mapping: MemoryMapping::default(),
            lib: OperatorLibrary::unit_latency(),
            graph: g,
        };
        let (prep, units) = ctx_fixture(&p);
        let ctx = SchedContext {
            units: &units,
            windows: &prep.windows,
            mcg: &prep.mcg,
            lib: &p.lib,
            mapping: &prep.mapping,
        };
        let m = units.iter().position(|u| u.sfg == NodeId(3)).unwrap();
        let m2 = units.iter().position(|u| u.sfg == NodeId(6)).unwrap();
        assert_eq!((ctx.mobility(m), ctx.mobility(m2)), (2, 3));
        let table = PortAccessTable::new(&prep.mapping, 4);
        assert_eq!(rank_executable(&ctx, &[m2, m], 0, &table).ranked, vec![m, m2]);
    }

    #[test]
    fn assign_step_rules() {
        let p = reference(3, true);
        let (prep, units) = ctx_fixture(&p);
        let ctx = SchedContext {
            units: &units,
            windows: &prep.windows,
            mcg: &prep.mcg,
            lib: &p.lib,
            mapping: &prep.mapping,
        };
        let ua = units.iter().position(|u| u.sfg == corpus::MUL_A).unwrap();
        let ub = units.iter().position(|u| u.sfg == corpus::MUL_B).unwrap();
        let ranking = Ranking {
            ranked: vec![ub, ua],
            removed: vec![],
        };

        // margin 1 and one multiplier: the second product waits
        let mut pool = OperatorPool::initial(&units, &p.lib, &AllocationMode::Auto);
        let mut table = PortAccessTable::new(&prep.mapping, 3);
        let step = assign_step(&ctx, &ranking, 0, &mut pool, &AllocationMode::Auto, &mut table).unwrap();
        assert_eq!(step.assigned.len(), 1);
        assert_eq!(step.delayed, vec![ua]);
        assert_eq!(pool.created, 0);

        // at cycle 1 both have margin 0: the busy multiplier forces a new one
        let mut pool = OperatorPool::initial(&units, &p.lib, &AllocationMode::Auto);
        pool.instances.iter_mut().for_each(|i| i.busy_until = 2);
        let mut table = PortAccessTable::new(&prep.mapping, 3);
        let step = assign_step(&ctx, &ranking, 1, &mut pool, &AllocationMode::Auto, &mut table).unwrap();
        assert_eq!(step.assigned.len(), 2);
        assert_eq!(pool.created, 2);

        // zero margin and a blocked bank is fatal
        let mut pool = OperatorPool::initial(&units, &p.lib, &AllocationMode::Auto);
        let mut table = PortAccessTable::new(&prep.mapping, 3);
        table.reserve_access(BankId(0), 0, corpus::VAR1, 1).unwrap();
        let err = assign_step(&ctx, &ranking, 1, &mut pool, &AllocationMode::Auto, &mut table).unwrap_err();
        assert_eq!(err.reason, FailureReason::MemoryConflictAtZeroMargin);
        assert_eq!(
            (err.cycle, err.operation, err.bank.as_deref()),
            (1, corpus::MUL_A, Some("bank0"))
        );
    }

    #[test]
    fn dual_port_bank_needs_no_second_bank() {
        let mut p = reference(2, false);
        p.mapping.banks[0] = Bank::new("bank0", 2, 1, 2);
        let out = p.run(&AllocationMode::Auto).unwrap();
        assert_eq!(out.report().expect("schedules").operator_count("mult"), 2);
    }
}
