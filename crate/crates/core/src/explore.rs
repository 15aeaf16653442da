// SPDX-License-Identifier: Apache-2.0

//! Architecture exploration on generated FFT graphs: three configurations
//! trading memory banks, I/O buses and latency against each other.
//!
//! * `E1`: inputs `X{k}` on one bus at offset `k`, outputs `Yr{k}` and
//!   `Yi{k}` on two buses at `D + k`. Coefficients are spread round-robin
//!   over as many banks and ports as the schedule needs.
//! * `E2`: two single-port banks (`Wr{k}` in `bank0`, `Wi{k}` in `bank1`,
//!   address `k`), free I/O timing, operator counts fixed to those of `E1`.
//! * `E3`: the `E2` banks with one input bus as in `E1` and one output bus
//!   carrying `Yr{k}` at `D + 2k` and `Yi{k}` at `D + 2k + 1`.
//!
//! Each configuration takes the smallest latency that schedules.

use std::collections::BTreeMap;

use crate::constraints::{build_acg, critical_path, Bus, Direction, IoConstraintSpec, OperatorLibrary, Transfer};
use crate::error::{Error, Result};
use crate::graph::{generate_fft_sfg, NodeId, NodeKind, Sfg};
use crate::memory::{Bank, BankId, MemoryMapping};
use crate::pipeline::{Outcome, Problem};
use crate::report::{render_table, ArchitectureReport};
use crate::schedule::{AllocationMode, Schedule};
use crate::Duration;

/// Sequential and random access times of the coefficient banks.
pub const T_SEQ: Duration = 1;
pub const T_RAND: Duration = 2;

#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub name: String,
    pub problem: Problem,
    pub mode: AllocationMode,
    pub schedule: Schedule,
    pub report: ArchitectureReport,
}

fn id(g: &Sfg, label: &str) -> NodeId {
    g.find_label(label)
        .unwrap_or_else(|| panic!("FFT graph lacks `{label}`"))
        .id
}

fn bus(name: &str, direction: Direction) -> Bus {
    Bus {
        name: name.into(),
        direction,
        width: None,
    }
}

fn points(g: &Sfg) -> usize {
    g.count(NodeKind::Input)
}

/// Read coefficients first, in `Wr0, Wi0, Wr1, Wi1, ...` order, then the
/// unread upper halves.
fn coefficients(g: &Sfg) -> Vec<NodeId> {
    let n = points(g);
    let mut order: Vec<NodeId> = (0..n / 2)
        .flat_map(|k| [id(g, &format!("Wr{k}")), id(g, &format!("Wi{k}"))])
        .collect();
    order.extend((n / 2..n).flat_map(|k| [id(g, &format!("Wr{k}")), id(g, &format!("Wi{k}"))]));
    order
}

/// Coefficients dealt round-robin over `banks` single-port banks.
pub fn spread_mapping(g: &Sfg, banks: usize) -> MemoryMapping {
    let mut m = MemoryMapping::default();
    for b in 0..banks {
        m.banks.push(Bank::new(format!("bank{b}"), 1, T_SEQ, T_RAND));
    }
    for (k, d) in coefficients(g).into_iter().enumerate() {
        m.place(d, BankId(k % banks), (k / banks) as u32);
    }
    m
}

/// `Wr{k}` at `bank0@k`, `Wi{k}` at `bank1@k`.
pub fn split_mapping(g: &Sfg) -> MemoryMapping {
    let mut m = MemoryMapping::default();
    m.banks.push(Bank::new("bank0", 1, T_SEQ, T_RAND));
    m.banks.push(Bank::new("bank1", 1, T_SEQ, T_RAND));
    for k in 0..points(g) {
        m.place(id(g, &format!("Wr{k}")), BankId(0), k as u32);
        m.place(id(g, &format!("Wi{k}")), BankId(1), k as u32);
    }
    m
}

fn input_bus(g: &Sfg, spec: &mut IoConstraintSpec) {
    spec.buses.push(bus("in", Direction::In));
    for k in 0..points(g) {
        spec.transfers.push(Transfer {
            data: id(g, &format!("X{k}")),
            bus: 0,
            offset: k as u32,
        });
    }
}

/// `E1` timing: serial inputs, `Yr{k}` and `Yi{k}` side by side from `d`.
pub fn parallel_output_spec(g: &Sfg, d: Duration) -> IoConstraintSpec {
    let n = points(g) as u32;
    let mut spec = IoConstraintSpec::unconstrained(d + n);
    input_bus(g, &mut spec);
    spec.buses.push(bus("out_r", Direction::Out));
    spec.buses.push(bus("out_i", Direction::Out));
    for k in 0..n {
        spec.transfers.push(Transfer {
            data: id(g, &format!("Yr{k}")),
            bus: 1,
            offset: d + k,
        });
        spec.transfers.push(Transfer {
            data: id(g, &format!("Yi{k}")),
            bus: 2,
            offset: d + k,
        });
    }
    spec
}

/// `E3` timing: serial inputs, `Yr{k}` and `Yi{k}` interleaved from `d`.
pub fn serial_output_spec(g: &Sfg, d: Duration) -> IoConstraintSpec {
    let n = points(g) as u32;
    let mut spec = IoConstraintSpec::unconstrained(d + 2 * n);
    input_bus(g, &mut spec);
    spec.buses.push(bus("out", Direction::Out));
    for k in 0..n {
        spec.transfers.push(Transfer {
            data: id(g, &format!("Yr{k}")),
            bus: 1,
            offset: d + 2 * k,
        });
        spec.transfers.push(Transfer {
            data: id(g, &format!("Yi{k}")),
            bus: 1,
            offset: d + 2 * k + 1,
        });
    }
    spec
}

/// Smallest `x` in `lo..=hi` for which `attempt` succeeds.
pub fn first_success<T>(
    lo: Duration,
    hi: Duration,
    mut attempt: impl FnMut(Duration) -> Option<T>,
) -> Option<(Duration, T)> {
    (lo..=hi).find_map(|x| attempt(x).map(|t| (x, t)))
}

/// Doubles `x` from `lo` until `attempt` succeeds, then bisects down to a
/// succeeding value with a failing predecessor. Assumes success is
/// monotone in `x`; otherwise the result succeeds but need not be least.
pub fn doubling_search<T>(
    lo: Duration,
    hi: Duration,
    mut attempt: impl FnMut(Duration) -> Option<T>,
) -> Option<(Duration, T)> {
    let mut fail = lo.checked_sub(1);
    let mut x = lo.max(1);
    let mut found = loop {
        if let Some(t) = attempt(x) {
            break (x, t);
        }
        fail = Some(x);
        if x >= hi {
            return None;
        }
        x = (2 * x).min(hi);
    };
    while fail.map_or(0, |f| f + 1) < found.0 {
        let mid = fail.map_or(0, |f| f + 1) + (found.0 - fail.map_or(0, |f| f + 1)) / 2;
        match attempt(mid) {
            Some(t) => found = (mid, t),
            None => fail = Some(mid),
        }
    }
    Some(found)
}

fn scheduled(p: &Problem, mode: &AllocationMode) -> Option<(Schedule, ArchitectureReport)> {
    match p.run(mode).ok()? {
        Outcome::Scheduled(s, r) => Some((*s, r)),
        _ => None,
    }
}

fn finish(
    name: &str,
    problem: Problem,
    mode: AllocationMode,
    (schedule, report): (Schedule, ArchitectureReport),
) -> ExperimentRun {
    ExperimentRun {
        name: name.into(),
        problem,
        mode,
        schedule,
        report,
    }
}

fn lower_bound(g: &Sfg, lib: &OperatorLibrary) -> Result<Duration> {
    Ok(critical_path(&build_acg(g, lib)?))
}

/// Most ports per bank tried by `E1`.
pub const MAX_PORTS: u32 = 4;

/// `E1`: least output start `D` with one bank per coefficient and
/// [`MAX_PORTS`] ports, then at that `D` the bank shape with the fewest
/// ports in total (fewer banks on ties).
pub fn run_e1(g: &Sfg, lib: &OperatorLibrary) -> Result<ExperimentRun> {
    let n = points(g);
    let mode = AllocationMode::Auto;
    let cp = lower_bound(g, lib)?;
    let problem = |d, banks, ports| {
        let mut mapping = spread_mapping(g, banks);
        for b in &mut mapping.banks {
            b.ports = ports;
        }
        Problem {
            graph: g.clone(),
            lib: lib.clone(),
            spec: parallel_output_spec(g, d),
            mapping,
        }
    };
    let (d, _) = first_success(cp.saturating_sub(n as Duration), cp + 4 * n as Duration, |d| {
        scheduled(&problem(d, n, MAX_PORTS), &mode)
    })
    .ok_or_else(|| Error::Search("E1 found no output offset".into()))?;
    let mut shapes: Vec<(usize, u32)> = (1..=n).flat_map(|b| (1..=MAX_PORTS).map(move |p| (b, p))).collect();
    shapes.sort_by_key(|&(b, p)| (b * p as usize, b));
    let (banks, ports, out) = shapes
        .into_iter()
        .find_map(|(b, p)| scheduled(&problem(d, b, p), &mode).map(|out| (b, p, out)))
        .expect("succeeds with the widest shape");
    Ok(finish("E1", problem(d, banks, ports), mode, out))
}

/// `E2`: least latency with free I/O and the operator counts of `pool`.
pub fn run_e2(g: &Sfg, lib: &OperatorLibrary, pool: &BTreeMap<String, u32>) -> Result<ExperimentRun> {
    let mode = AllocationMode::Fixed(pool.clone());
    let cp = lower_bound(g, lib)?;
    let problem = |l| Problem {
        graph: g.clone(),
        lib: lib.clone(),
        spec: IoConstraintSpec::unconstrained(l),
        mapping: split_mapping(g),
    };
    let (l, out) = first_success(cp.max(1), 8 * cp + 64, |l| scheduled(&problem(l), &mode))
        .ok_or_else(|| Error::Search("E2 found no latency".into()))?;
    Ok(finish("E2", problem(l), mode, out))
}

fn e3_problem(g: &Sfg, lib: &OperatorLibrary, d: Duration) -> Problem {
    Problem {
        graph: g.clone(),
        lib: lib.clone(),
        spec: serial_output_spec(g, d),
        mapping: split_mapping(g),
    }
}

/// `E3`: least output start `D` with two banks and one bus per direction.
pub fn run_e3(g: &Sfg, lib: &OperatorLibrary) -> Result<ExperimentRun> {
    let mode = AllocationMode::Auto;
    let cp = lower_bound(g, lib)?;
    let (d, out) = first_success(cp.saturating_sub(points(g) as Duration), 8 * cp + 64, |d| {
        scheduled(&e3_problem(g, lib, d), &mode)
    })
    .ok_or_else(|| Error::Search("E3 found no output offset".into()))?;
    Ok(finish("E3", e3_problem(g, lib, d), mode, out))
}

/// `E3` located by [`doubling_search`] over the output start; meant for
/// large transforms.
pub fn run_e3_fast(g: &Sfg, lib: &OperatorLibrary) -> Result<ExperimentRun> {
    let mode = AllocationMode::Auto;
    let cp = lower_bound(g, lib)?;
    let (d, out) = doubling_search(cp, 64 * cp + 1024, |d| scheduled(&e3_problem(g, lib, d), &mode))
        .ok_or_else(|| Error::Search("E3 found no output offset".into()))?;
    Ok(finish("E3", e3_problem(g, lib, d), mode, out))
}

/// The three configurations on an `n`-point FFT with the reference library.
pub fn run_table(n: usize) -> Result<Vec<ExperimentRun>> {
    let g = generate_fft_sfg(n)?;
    let lib = OperatorLibrary::fft_reference();
    let e1 = run_e1(&g, &lib)?;
    let e2 = run_e2(&g, &lib, &e1.schedule.pool)?;
    let e3 = run_e3(&g, &lib)?;
    Ok(vec![e1, e2, e3])
}

pub fn render_runs(runs: &[ExperimentRun]) -> String {
    let rows: Vec<(String, ArchitectureReport)> = runs.iter().map(|r| (r.name.clone(), r.report.clone())).collect();
    render_table(&rows)
}
