// SPDX-License-Identifier: Apache-2.0

//! Finds the least achievable latency of small graphs by exhaustive search
//! and compares it with the list scheduler.
//!
//! ```bash
//! cargo run --example exhaustive_oracle
//! ```

use std::collections::BTreeMap;

use hlsched::constraints::OperatorLibrary;
use hlsched::corpus;
use hlsched::pipeline::Problem;
use hlsched::schedule::AllocationMode;
use hlsched::verify::{brute_force_feasible, brute_force_min_latency};

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    let lib = OperatorLibrary::unit_latency();
    let spec = corpus::parallel_io(&g, 3);
    for (name, mapping) in [
        ("one bank", corpus::single_bank(&g)),
        ("two banks", corpus::two_banks(&g)),
    ] {
        let best = brute_force_min_latency(&g, &lib, &mapping, &spec, None, None)?;
        let one_each: BTreeMap<String, u32> = [("mult".into(), 1), ("add".into(), 1)].into();
        let capped = brute_force_min_latency(&g, &lib, &mapping, &spec, Some(&one_each), None)?;
        println!("{name}: least latency {best:?}, with one operator per class {capped:?}");

        for latency in 1..=3 {
            let problem = Problem {
                graph: g.clone(),
                lib: lib.clone(),
                spec: corpus::parallel_io(&g, latency),
                mapping: mapping.clone(),
            };
            let exact = brute_force_feasible(&g, &lib, &mapping, &problem.spec, None)?.is_some();
            let greedy = problem.run(&AllocationMode::Auto)?.schedule().is_some();
            println!("  bound {latency}: exhaustive {exact:<5}  list scheduler {greedy}");
        }
    }
    Ok(())
}
