// SPDX-License-Identifier: Apache-2.0

//! Compares the architectures obtained for the reference example with one
//! bank and with two banks, under parallel and serial input buses.
//!
//! ```bash
//! cargo run --example architecture_report
//! ```

use hlsched::constraints::OperatorLibrary;
use hlsched::corpus;
use hlsched::pipeline::Problem;
use hlsched::report::render_table;
use hlsched::schedule::AllocationMode;

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    let configs = [
        ("1 bank, a|b, L=3", corpus::parallel_io(&g, 3), corpus::single_bank(&g)),
        ("2 banks, a|b, L=2", corpus::parallel_io(&g, 2), corpus::two_banks(&g)),
        (
            "1 bank, a;b, L=3",
            corpus::sequential_io(&g, 3),
            corpus::single_bank(&g),
        ),
        ("2 banks, a;b, L=3", corpus::sequential_io(&g, 3), corpus::two_banks(&g)),
    ];
    let mut rows = Vec::new();
    for (name, spec, mapping) in configs {
        let problem = Problem {
            graph: g.clone(),
            lib: OperatorLibrary::unit_latency(),
            spec,
            mapping,
        };
        let out = problem.run(&AllocationMode::Auto)?;
        match out.report() {
            Some(r) => rows.push((name.to_string(), r.clone())),
            None => println!("{name}: {:?}", out.failure()),
        }
    }
    print!("{}", render_table(&rows));
    println!("\n{}", rows[1].1.to_json());
    Ok(())
}
