// SPDX-License-Identifier: Apache-2.0

//! Places data in a bank, derives the memory constraint graph and reserves
//! port slots, showing the burst (sequential) and random access costs.
//!
//! ```bash
//! cargo run --example memory_ports
//! ```

use hlsched::corpus;
use hlsched::memory::{apply_mapping, build_mcg, extract_memory_table, PlacementMode, PortAccessTable};

fn main() -> hlsched::Result<()> {
    let g = corpus::reference_sfg();
    let mapping = apply_mapping(
        &extract_memory_table(&g),
        &corpus::single_bank(&g),
        PlacementMode::Strict,
    )?;
    let label = |id| g.node(id).unwrap().label.clone();

    let mcg = build_mcg(&mapping);
    for e in &mcg.edges {
        let kind = if e.sequential { "sequential" } else { "random" };
        println!("{} -> {}: {} cycle(s), {kind}", label(e.from), label(e.to), e.weight);
    }

    let bank = mapping.bank_index("bank0").unwrap();
    let at = |d| mapping.placement[&d].address;
    for order in [[corpus::VAR2, corpus::VAR1], [corpus::VAR1, corpus::VAR2]] {
        let mut table = PortAccessTable::new(&mapping, 4);
        println!("\nread {} then {}:", label(order[0]), label(order[1]));
        let mut cycle = 0;
        for d in order {
            match table.reserve_access(bank, at(d), d, cycle) {
                Ok(r) => {
                    println!(
                        "  cycle {cycle}: {} on port {} costs {} (sequential: {})",
                        label(d),
                        r.port,
                        r.cost,
                        r.sequential
                    );
                    cycle += r.cost;
                }
                Err(e) => println!("  cycle {cycle}: {} refused: {e}", label(d)),
            }
        }
    }

    let table = PortAccessTable::new(&mapping, 4);
    let both = [
        (bank, at(corpus::VAR1), corpus::VAR1),
        (bank, at(corpus::VAR2), corpus::VAR2),
    ];
    println!("\nboth reads in cycle 0 on one port: {:?}", table.plan(&both, 0).err());
    Ok(())
}
