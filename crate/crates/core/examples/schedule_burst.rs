// SPDX-License-Identifier: Apache-2.0

//! Schedules the reference example on a single-port bank holding `var2` at
//! address 0 and `var1` at address 1. With a 3-cycle bound the scheduler
//! orders the reads as a burst; with 2 cycles both products need the bank
//! in the first cycle and scheduling stops with a memory conflict.
//!
//! ```bash
//! cargo run --example schedule_burst
//! ```

use hlsched::constraints::OperatorLibrary;
use hlsched::corpus;
use hlsched::pipeline::{Outcome, Problem};
use hlsched::schedule::AllocationMode;

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    for latency in [3, 2] {
        let problem = Problem {
            spec: corpus::parallel_io(&g, latency),
            mapping: corpus::single_bank(&g),
            lib: OperatorLibrary::unit_latency(),
            graph: g.clone(),
        };
        println!("latency bound {latency}:");
        match problem.run(&AllocationMode::Auto)? {
            Outcome::Scheduled(s, _) => {
                for o in &s.operations {
                    println!(
                        "  cycle {}: {} on {}#{}",
                        o.cycle,
                        g.node(o.node).unwrap().label,
                        o.class,
                        o.instance
                    );
                }
                for a in &s.accesses {
                    let data = &g.node(a.data).unwrap().label;
                    println!(
                        "  cycle {}: read {data} from {} port {}, {} cycle(s), sequential {}",
                        a.cycle, a.bank, a.port, a.cost, a.sequential
                    );
                }
            }
            Outcome::Failed(f) => println!("  aborted: {f}"),
            Outcome::Infeasible(r) => println!("  infeasible: {:?}", r.diagnostics),
        }
    }
    Ok(())
}
