// SPDX-License-Identifier: Apache-2.0

//! Builds the constraint graphs of the reference example under the
//! `(a|b, c)` I/O sequence and prints each operation's window for several
//! latency bounds, with the static feasibility verdict.
//!
//! ```bash
//! cargo run --example time_windows
//! ```

use hlsched::constraints::{
    build_acg, build_iocg, check_feasibility, compute_time_windows, critical_path, merge_gcg, OperatorLibrary,
};
use hlsched::corpus;

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    let lib = OperatorLibrary::unit_latency();
    let acg = build_acg(&g, &lib)?;
    println!("critical path: {} cycles", critical_path(&acg));

    for latency in 1..=4 {
        let spec = corpus::parallel_io(&g, latency);
        let gcg = merge_gcg(&acg, &build_iocg(&spec)?, &spec)?;
        let windows = compute_time_windows(&gcg);
        let report = check_feasibility(&gcg, &windows, &spec);
        println!("\nlatency bound {latency}: feasible = {}", report.feasible());
        for (op, (asap, alap, mobility)) in windows.by_operation(&gcg) {
            let label = &g.node(op).unwrap().label;
            println!("  {label:>2}  asap {asap:>2}  alap {alap:>2}  mobility {mobility:>2}");
        }
        for d in &report.diagnostics {
            println!("  ! {d}");
        }
    }
    Ok(())
}
