//! Reads a reference profile, samples a computed field along the same line
//! and reports the deviation at every reference point.
//!
//! cargo run --release --example compare_reference -- [reference.csv]

use std::path::PathBuf;

use sbp_ins::cases::run::line_profile;
use sbp_ins::cases::{compare_to_reference, load_reference, simulate, CaseConfig};

fn main() -> sbp_ins::Result<()> {
    let path = std::env::args().nth(1).map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ghia_re100_v_y0.5.csv"),
        PathBuf::from,
    );
    let reference = load_reference(&path)?;
    println!("{} ({} points)", reference.source, reference.values.len());

    let mut cfg = CaseConfig::cavity(100.0);
    cfg.degree = 3;
    cfg.elements = (8, 8);
    let out = simulate(&cfg)?;
    let profile = line_profile(&out.sys, &out.march.state, reference.quantity, reference.line)?;
    let report = compare_to_reference(&profile, &reference)?;
    println!("{:>8} {:>10} {:>10}", "s", "reference", "computed");
    for (s, r, c) in &report.samples {
        println!("{s:8.4} {r:10.5} {c:10.5}");
    }
    println!("{report}");
    Ok(())
}
