// SPDX-License-Identifier: Apache-2.0

//! Draws seeded random problems and checks the list scheduler against the
//! exhaustive search on each.
//!
//! ```bash
//! cargo run --example random_instances -- 20
//! ```

use hlsched::graph::NodeKind;
use hlsched::schedule::AllocationMode;
use hlsched::testgen::{random_problem, RandomConfig};
use hlsched::verify::{brute_force_feasible, brute_force_min_latency};

fn main() -> hlsched::Result<()> {
    let count: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let config = RandomConfig::default();
    println!("seed  ops  banks  bound  list  exhaustive  optimum");
    for seed in 0..count {
        let p = random_problem(seed, &config);
        let out = p.run(&AllocationMode::Auto)?;
        let list = out.schedule().map_or("-".to_string(), |s| s.latency.to_string());
        let exact = brute_force_feasible(&p.graph, &p.lib, &p.mapping, &p.spec, None)?;
        let exact = if exact.is_some() { "feasible" } else { "-" };
        let best = brute_force_min_latency(&p.graph, &p.lib, &p.mapping, &p.spec, None, Some(p.spec.latency_bound))?;
        println!(
            "{seed:>4}  {:>3}  {:>5}  {:>5}  {list:>4}  {exact:>10}  {:>7}",
            p.graph.count(NodeKind::Operation),
            p.mapping.banks.len(),
            p.spec.latency_bound,
            best.map_or("-".to_string(), |b| b.to_string())
        );
    }
    Ok(())
}
