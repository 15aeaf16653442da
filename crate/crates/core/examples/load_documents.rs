// SPDX-License-Identifier: Apache-2.0

//! Loads the reference problem from its JSON documents in `corpus/`,
//! schedules it and prints the schedule document.
//!
//! ```bash
//! cargo run --example load_documents
//! ```

use std::fs;
use std::path::Path;

use hlsched::constraints::{IoConstraintSpec, OperatorLibrary};
use hlsched::graph::parse_sfg;
use hlsched::memory::MemoryMapping;
use hlsched::pipeline::Problem;
use hlsched::schedule::AllocationMode;

fn main() -> hlsched::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let read = |name: &str| fs::read_to_string(dir.join(name));
    let graph = parse_sfg(&read("reference.json")?)?;
    let problem = Problem {
        lib: OperatorLibrary::parse(&read("lib_unit.json")?)?,
        spec: IoConstraintSpec::from_document(&read("io_parallel_3.json")?, &graph)?,
        mapping: MemoryMapping::from_document(&read("mem_single_bank.json")?, &graph)?,
        graph,
    };
    let out = problem.run(&AllocationMode::Auto)?;
    let s = out.schedule().expect("schedules");
    print!("{}", s.to_json());
    assert_eq!(s.to_json(), read("golden/single_bank_l3/schedule.json")?);
    Ok(())
}
