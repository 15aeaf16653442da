// SPDX-License-Identifier: Apache-2.0

//! Runs the three FFT architecture configurations (I/O-constrained with
//! as many banks as needed, two banks with free I/O, two banks with one
//! bus per direction) and tabulates banks, operators, buses and latency.
//!
//! ```bash
//! cargo run --release --example fft_exploration -- 16
//! ```

use hlsched::explore::{render_runs, run_table};

fn main() -> hlsched::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    let runs = run_table(n)?;
    print!("{}", render_runs(&runs));
    for r in &runs {
        let m = &r.problem.mapping;
        println!(
            "{}: {} bank(s) of {} port(s), latency bound {}, allocation {}",
            r.name,
            m.banks.len(),
            m.banks[0].ports,
            r.problem.spec.latency_bound,
            r.mode
        );
    }
    Ok(())
}
