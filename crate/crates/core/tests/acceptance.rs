// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria 1 to 8, one PASS/FAIL line each.

use std::path::Path;
use std::time::{Duration, Instant};

use hlsched::cli::{run_cli_with, EXIT_ABORT};
use hlsched::constraints::OperatorLibrary;
use hlsched::corpus;
use hlsched::explore::{run_e3_fast, run_table, ExperimentRun};
use hlsched::graph::generate_fft_sfg;
use hlsched::pipeline::Problem;
use hlsched::schedule::{AllocationMode, FailureReason, Schedule};
use hlsched::testgen::{random_problem, RandomConfig};
use hlsched::verify::{brute_force_feasible, brute_force_min_latency, mutate, verify_schedule, Mutation};

type Verdict = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

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

fn violations(p: &Problem, s: &Schedule) -> usize {
    let pre = p.prepare().expect("valid inputs");
    verify_schedule(s, &p.graph, &pre.gcg, &p.spec, &pre.mapping, &p.lib).len()
}

fn corpus_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .display()
        .to_string()
}

/// Runs `schedule` through the CLI into `dir`; returns the exit code.
fn cli_schedule(io: &str, mem: &str, dir: &Path) -> i32 {
    let args = [
        "hlsched".to_string(),
        "schedule".into(),
        "--graph".into(),
        corpus_file("reference.json"),
        "--lib".into(),
        corpus_file("lib_unit.json"),
        "--io".into(),
        corpus_file(io),
        "--mem".into(),
        corpus_file(mem),
        "--out".into(),
        dir.display().to_string(),
    ];
    run_cli_with(args, &mut Vec::new(), &mut Vec::new())
}

fn files(dir: &Path) -> Vec<Vec<u8>> {
    ["schedule.json", "report.json", "report.txt"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap_or_default())
        .collect()
}

fn burst_reproduction() -> Verdict {
    let p = reference(3, false);
    let out = p.run(&AllocationMode::Auto).map_err(|e| e.to_string())?;
    let s = out.schedule().ok_or_else(|| format!("no schedule: {out:?}"))?;
    let at = |n| s.op(n).map(|o| o.cycle);
    ensure(at(corpus::MUL_B) == Some(0), "b*var2 not in the first cycle")?;
    ensure(at(corpus::MUL_A) == Some(1), "a*var1 not in the second cycle")?;
    let second = s
        .accesses
        .iter()
        .find(|a| a.data == corpus::VAR1)
        .ok_or("no var1 read")?;
    ensure(
        second.cycle == 1 && second.sequential && second.cost == 1,
        "var1 read is not a 1-cycle burst",
    )?;
    ensure(s.latency <= 3, format!("latency {}", s.latency))?;
    ensure(violations(&p, s) == 0, "schedule has violations")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    ensure(
        cli_schedule("io_parallel_3.json", "mem_single_bank.json", dir.path()) == 0,
        "CLI failed",
    )?;
    let golden = std::fs::read(corpus_file("golden/single_bank_l3/schedule.json")).map_err(|e| e.to_string())?;
    ensure(files(dir.path())[0] == golden, "CLI schedule differs from golden")?;
    Ok(format!(
        "b*var2@0, a*var1@1 burst cost {}, latency {}",
        second.cost, s.latency
    ))
}

fn burst_abort() -> Verdict {
    let out = reference(2, false)
        .run(&AllocationMode::Auto)
        .map_err(|e| e.to_string())?;
    let f = out
        .failure()
        .ok_or_else(|| format!("expected a failure, got {out:?}"))?;
    ensure(
        f.reason == FailureReason::MemoryConflictAtZeroMargin,
        format!("reason {}", f.reason),
    )?;
    ensure(f.bank.as_deref() == Some("bank0") && f.cycle == 0, format!("{f}"))?;
    ensure(
        f.operation == corpus::MUL_A && f.operator_class.as_deref() == Some("mult"),
        format!("{f}"),
    )?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let code = cli_schedule("io_parallel_2.json", "mem_single_bank.json", dir.path());
    ensure(code == EXIT_ABORT, format!("CLI exit {code}"))?;
    Ok(format!("{f}; exit {code}"))
}

fn two_bank_architecture() -> Verdict {
    let p = reference(2, true);
    let out = p.run(&AllocationMode::Auto).map_err(|e| e.to_string())?;
    let r = out.report().ok_or_else(|| format!("no schedule: {out:?}"))?;
    ensure(
        r.operator_count("mult") == 2 && r.operator_count("add") == 1 && r.banks == 2,
        format!("{r:?}"),
    )?;
    ensure(violations(&p, out.schedule().unwrap()) == 0, "schedule has violations")?;
    Ok(format!(
        "mult {}, add {}, banks {}, latency {}",
        r.operator_count("mult"),
        r.operator_count("add"),
        r.banks,
        r.latency
    ))
}

fn oracle_suite() -> Verdict {
    let config = RandomConfig::default();
    let (mut scheduled, mut refuted, mut failed) = (0, 0, 0);
    for seed in 0..120 {
        let p = random_problem(seed, &config);
        let out = p.run(&AllocationMode::Auto).map_err(|e| format!("seed {seed}: {e}"))?;
        let exact = brute_force_feasible(&p.graph, &p.lib, &p.mapping, &p.spec, None).map_err(|e| e.to_string())?;
        match out.schedule() {
            Some(s) => {
                scheduled += 1;
                ensure(violations(&p, s) == 0, format!("seed {seed}: violations"))?;
                let horizon = p.spec.latency_bound.max(p.spec.cadence);
                let best = brute_force_min_latency(&p.graph, &p.lib, &p.mapping, &p.spec, None, Some(horizon))
                    .map_err(|e| e.to_string())?
                    .ok_or(format!("seed {seed}: no optimum"))?;
                ensure(
                    s.latency >= best,
                    format!("seed {seed}: latency {} below optimum {best}", s.latency),
                )?;
                ensure(
                    exact.is_some(),
                    format!("seed {seed}: scheduled but exhaustive search failed"),
                )?;
            }
            None => {
                failed += 1;
                if exact.is_none() {
                    refuted += 1;
                }
            }
        }
    }
    Ok(format!(
        "120 instances: {scheduled} scheduled, {failed} failed ({refuted} exhaustively infeasible)"
    ))
}

fn mutation_suite() -> Verdict {
    let cases = [
        (reference(3, false), "single_bank_l3"),
        (reference(2, true), "two_banks_l2"),
    ];
    let g = corpus::reference_sfg();
    let seq = Problem {
        spec: corpus::sequential_io(&g, 3),
        mapping: corpus::single_bank(&g),
        lib: OperatorLibrary::unit_latency(),
        graph: g,
    };
    let mut killed = 0;
    for (p, name) in cases.iter().map(|(p, n)| (p, *n)).chain([(&seq, "sequential_io_l3")]) {
        let text =
            std::fs::read_to_string(corpus_file(&format!("golden/{name}/schedule.json"))).map_err(|e| e.to_string())?;
        let s = Schedule::from_json(&text).map_err(|e| e.to_string())?;
        ensure(violations(p, &s) == 0, format!("{name}: golden has violations"))?;
        for kind in Mutation::ALL {
            let m = mutate(kind, &s, &p.graph, &p.mapping).ok_or(format!("{name}: {kind:?} not applicable"))?;
            ensure(violations(p, &m) > 0, format!("{name}: {kind:?} survived"))?;
            killed += 1;
        }
    }
    Ok(format!(
        "{} operators x 3 goldens, {killed} killed",
        Mutation::ALL.len()
    ))
}

fn table_trend(runs: &[ExperimentRun]) -> Verdict {
    let [e1, e2, e3] = runs else {
        return Err("expected three runs".into());
    };
    let (r1, r2, r3) = (&e1.report, &e2.report, &e3.report);
    ensure(
        r1.banks > 2 && r3.banks == 2,
        format!("banks E1 {} E3 {}", r1.banks, r3.banks),
    )?;
    ensure(
        r2.input_buses > r3.input_buses && r3.input_buses == 1,
        format!("input buses E2 {} E3 {}", r2.input_buses, r3.input_buses),
    )?;
    ensure(
        r3.latency > r1.latency && r3.latency > r2.latency,
        format!("latency E1 {} E2 {} E3 {}", r1.latency, r2.latency, r3.latency),
    )?;
    for r in runs {
        ensure(
            violations(&r.problem, &r.schedule) == 0,
            format!("{} has violations", r.name),
        )?;
    }
    Ok(format!(
        "banks {}/{}/{}, input buses {}/{}/{}, latency {}/{}/{}",
        r1.banks,
        r2.banks,
        r3.banks,
        r1.input_buses,
        r2.input_buses,
        r3.input_buses,
        r1.latency,
        r2.latency,
        r3.latency
    ))
}

fn scale_smoke() -> Verdict {
    let g = generate_fft_sfg(128).map_err(|e| e.to_string())?;
    let lib = OperatorLibrary::fft_reference();
    let t = Instant::now();
    let found = run_e3_fast(&g, &lib).map_err(|e| e.to_string())?;
    let search = t.elapsed();
    let t = Instant::now();
    let out = found.problem.run(&found.mode).map_err(|e| e.to_string())?;
    let sched = t.elapsed();
    let s = out.schedule().ok_or("the located configuration no longer schedules")?;
    let t = Instant::now();
    let v = violations(&found.problem, s);
    let verify = t.elapsed();
    ensure(v == 0, format!("{v} violations"))?;
    ensure(sched < Duration::from_secs(10), format!("scheduling took {sched:?}"))?;
    ensure(
        verify < Duration::from_secs(10),
        format!("verification took {verify:?}"),
    )?;
    Ok(format!(
        "{} nodes, {} edges, latency {}, schedule {:.2?}, verify {:.2?}, latency search {:.2?}",
        g.nodes.len(),
        g.edges.len(),
        s.latency,
        sched,
        verify,
        search
    ))
}

fn determinism(first_table: &[ExperimentRun]) -> Verdict {
    for (io, mem) in [
        ("io_parallel_3.json", "mem_single_bank.json"),
        ("io_parallel_2.json", "mem_two_banks.json"),
    ] {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        ensure(
            cli_schedule(io, mem, a.path()) == 0 && cli_schedule(io, mem, b.path()) == 0,
            "CLI failed",
        )?;
        ensure(
            files(a.path()) == files(b.path()),
            format!("{io} + {mem}: outputs differ"),
        )?;
    }
    let again = run_table(16).map_err(|e| e.to_string())?;
    for (x, y) in first_table.iter().zip(&again) {
        ensure(
            x.schedule.to_json() == y.schedule.to_json(),
            format!("{} schedule differs", x.name),
        )?;
        ensure(
            x.report.to_json() == y.report.to_json(),
            format!("{} report differs", x.name),
        )?;
    }
    Ok("criteria 1, 3 and 6 outputs byte-identical across two runs".into())
}

fn report(n: u32, limit: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let t = Instant::now();
    let verdict = f();
    let took = t.elapsed();
    let (ok, detail) = match verdict {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {took:.2?}, limit {limit:?}")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {n}: {} ({detail}) [{took:.2?}]",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, secs(1), burst_reproduction);
    ok &= report(2, secs(1), burst_abort);
    ok &= report(3, secs(1), two_bank_architecture);
    ok &= report(4, secs(60), oracle_suite);
    ok &= report(5, secs(10), mutation_suite);
    let mut table = Vec::new();
    ok &= report(6, secs(30), || {
        table = run_table(16).map_err(|e| e.to_string())?;
        table_trend(&table)
    });
    ok &= report(7, secs(60), scale_smoke);
    ok &= report(8, secs(60), || determinism(&table));
    if !ok {
        std::process::exit(1);
    }
}
