// SPDX-License-Identifier: Apache-2.0

//! Generates radix-2 FFT graphs, checks their size against the closed-form
//! counts and compares one evaluation with a direct DFT.
//!
//! ```bash
//! cargo run --example fft_graph -- 16
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use hlsched::graph::{evaluate, fft_counts, generate_fft_sfg, NodeKind};

fn main() -> hlsched::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    for p in [8, 16, 128, 1024] {
        let c = fft_counts(p)?;
        println!(
            "{p:>5}-point: {:>6} nodes, {:>6} edges, {:>5} operations",
            c.nodes, c.edges, c.operations
        );
    }

    let g = generate_fft_sfg(n)?;
    let input = |k: usize| (k as f64 * 0.7).sin() + 0.25 * k as f64;
    let inputs: BTreeMap<_, _> = (0..n)
        .map(|k| (g.find_label(&format!("X{k}")).unwrap().id, input(k)))
        .collect();
    let out = evaluate(&g, &inputs)?;
    let mut worst = 0.0f64;
    for k in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, x) in (0..n).map(|j| (j, input(j))) {
            let w = -2.0 * PI * (j * k) as f64 / n as f64;
            re += x * w.cos();
            im += x * w.sin();
        }
        let yr = out[&g.find_label(&format!("Yr{k}")).unwrap().id];
        let yi = out[&g.find_label(&format!("Yi{k}")).unwrap().id];
        worst = worst.max((yr - re).abs()).max((yi - im).abs());
    }
    println!(
        "{n}-point graph: {} operations, largest deviation from a direct DFT {worst:.2e}",
        g.count(NodeKind::Operation)
    );
    Ok(())
}
