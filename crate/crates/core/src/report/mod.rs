// SPDX-License-Identifier: Apache-2.0

//! Architecture summary derived from a schedule: operators per class,
//! banks, buses, latency and a register estimate.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::constraints::{Direction, IoConstraintSpec};
use crate::graph::Sfg;
use crate::memory::MemoryMapping;
use crate::schedule::{estimate_registers, io_bus_count, Schedule};
use crate::Duration;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureReport {
    pub operators: BTreeMap<String, u32>,
    pub banks: usize,
    pub input_buses: usize,
    pub output_buses: usize,
    pub latency: Duration,
    pub registers: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl ArchitectureReport {
    pub fn operator_count(&self, class: &str) -> u32 {
        self.operators.get(class).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Recounts the architecture from `s`. Declared buses count as allocated;
/// data without a bus add the peak number of same-cycle transfers in their
/// direction.
pub fn build_report(s: &Schedule, g: &Sfg, spec: &IoConstraintSpec, mapping: &MemoryMapping) -> ArchitectureReport {
    let declared = |dir: Direction| spec.buses.iter().filter(|b| b.direction == dir).count();
    let mut unbussed = s.clone();
    unbussed.transfers.retain(|t| t.bus.is_none());
    let (peak_in, peak_out) = io_bus_count(&unbussed);
    let registers = if s.operations.is_empty() && s.transfers.is_empty() {
        0
    } else {
        estimate_registers(s, g)
    };
    ArchitectureReport {
        operators: s.pool.clone(),
        banks: mapping.banks.len(),
        input_buses: declared(Direction::In) + peak_in,
        output_buses: declared(Direction::Out) + peak_out,
        latency: s.measured_latency(),
        registers,
        diagnostics: Vec::new(),
    }
}

/// Aligned text table with one row per named report.
pub fn render_table(rows: &[(String, ArchitectureReport)]) -> String {
    let mut classes: Vec<&str> = Vec::new();
    for (_, r) in rows {
        for c in r.operators.keys() {
            if !classes.contains(&c.as_str()) {
                classes.push(c);
            }
        }
    }
    let mut header: Vec<String> = vec!["run".into(), "banks".into()];
    header.extend(classes.iter().map(|c| c.to_string()));
    header.extend(["in buses", "out buses", "latency", "registers"].map(String::from));
    let mut table = vec![header];
    for (name, r) in rows {
        let mut line = vec![name.clone(), r.banks.to_string()];
        line.extend(classes.iter().map(|c| r.operator_count(c).to_string()));
        line.extend([r.input_buses, r.output_buses, r.latency as usize, r.registers].map(|v| v.to_string()));
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|i| table.iter().map(|l| l[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (k, line) in table.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        if k == 0 {
            writeln!(
                out,
                "{}",
                "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1))
            )
            .unwrap();
        }
    }
    out
}
