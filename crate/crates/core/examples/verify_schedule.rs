// SPDX-License-Identifier: Apache-2.0

//! Checks a schedule with the independent verifier, then corrupts it with
//! each mutation and prints what the verifier reports.
//!
//! ```bash
//! cargo run --example verify_schedule
//! ```

use hlsched::constraints::OperatorLibrary;
use hlsched::corpus;
use hlsched::pipeline::Problem;
use hlsched::schedule::{AllocationMode, Schedule};
use hlsched::verify::{mutate, verify_schedule, Mutation};

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    let problem = Problem {
        spec: corpus::parallel_io(&g, 3),
        mapping: corpus::single_bank(&g),
        lib: OperatorLibrary::unit_latency(),
        graph: g,
    };
    let prepared = problem.prepare()?;
    let out = problem.run(&AllocationMode::Auto)?;
    let s = out.schedule().expect("schedules at latency 3");
    let check = |s: &Schedule| {
        verify_schedule(
            s,
            &problem.graph,
            &prepared.gcg,
            &problem.spec,
            &prepared.mapping,
            &problem.lib,
        )
    };
    println!("scheduler output: {} violation(s)", check(s).len());

    for kind in Mutation::ALL {
        let Some(m) = mutate(kind, s, &problem.graph, &problem.mapping) else {
            continue;
        };
        println!("\n{kind:?}:");
        for v in check(&m) {
            println!("  {v}");
        }
    }
    Ok(())
}
