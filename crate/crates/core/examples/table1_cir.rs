//! First five taps seen by every receive antenna when antenna 1 transmits,
//! next to the published reference grid.
//!
//! ```text
//! cargo run --release --example table1_cir -- [molecules] [--reflective-block]
//! ```

use std::time::Instant;

use mcvd_im::geometry::Topology;
use mcvd_im::particle::{simulate_cir, DiffusionParams, RowFill};

const REFERENCE: [[f64; 5]; 8] = [
    [0.1042, 0.0346, 0.0141, 0.0078, 0.0049],
    [0.0357, 0.0227, 0.0106, 0.0062, 0.0039],
    [0.0052, 0.0090, 0.0057, 0.0036, 0.0026],
    [0.0014, 0.0045, 0.0033, 0.0023, 0.0017],
    [0.0009, 0.0035, 0.0029, 0.0021, 0.0014],
    [0.0014, 0.0045, 0.0033, 0.0023, 0.0017],
    [0.0052, 0.0090, 0.0057, 0.0036, 0.0026],
    [0.0357, 0.0227, 0.0106, 0.0062, 0.0039],
];

fn main() -> mcvd_im::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let molecules = args.iter().find_map(|a| a.parse::<u64>().ok()).unwrap_or(100_000);
    let reflective_block = args.iter().any(|a| a == "--reflective-block");

    let topology = Topology::uca(8, 8, 5.0, 10.0, 10.0)?;
    let params = DiffusionParams { n_molecules: molecules, reflective_block, ..DiffusionParams::default() };
    let start = Instant::now();
    let cir = simulate_cir(&topology, &params, 0.75, 5, 1, RowFill::Shift)?;
    let elapsed = start.elapsed();

    println!("{molecules} molecules, reflective block: {reflective_block}, {:.1} s", elapsed.as_secs_f64());
    let mut worst = 0.0f64;
    for (j, reference) in REFERENCE.iter().enumerate() {
        let row: Vec<String> = (0..5)
            .map(|n| {
                let h = cir.h(0, j, n);
                worst = worst.max((h - reference[n]).abs());
                format!("{h:.4} ({:+.4})", h - reference[n])
            })
            .collect();
        println!("h[1][{}]  {}", j + 1, row.join("  "));
    }
    println!("largest deviation from the reference grid: {worst:.4}");
    Ok(())
}
