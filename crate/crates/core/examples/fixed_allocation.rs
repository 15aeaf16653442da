// SPDX-License-Identifier: Apache-2.0

//! Sweeps the latency bound of a 16-point FFT with fixed operator counts
//! and shows where the fixed pool stops being enough.
//!
//! ```bash
//! cargo run --release --example fixed_allocation
//! ```

use hlsched::constraints::{IoConstraintSpec, OperatorLibrary};
use hlsched::explore::split_mapping;
use hlsched::graph::generate_fft_sfg;
use hlsched::pipeline::{Outcome, Problem};
use hlsched::schedule::AllocationMode;

fn main() -> hlsched::Result<()> {
    let g = generate_fft_sfg(16)?;
    let lib = OperatorLibrary::fft_reference();
    for alloc in ["fixed:mult=4,add=2,sub=2", "fixed:mult=1,add=1,sub=1", "auto"] {
        let mode = AllocationMode::parse(alloc)?;
        println!("{mode}:");
        for latency in (40..=200).step_by(40) {
            let problem = Problem {
                graph: g.clone(),
                lib: lib.clone(),
                spec: IoConstraintSpec::unconstrained(latency),
                mapping: split_mapping(&g),
            };
            match problem.run(&mode)? {
                Outcome::Scheduled(s, r) => println!(
                    "  bound {latency:>3}: latency {:>3}, operators {:?}",
                    s.latency, r.operators
                ),
                Outcome::Failed(f) => println!("  bound {latency:>3}: {f}"),
                Outcome::Infeasible(_) => println!("  bound {latency:>3}: below the critical path"),
            }
        }
    }
    Ok(())
}
