//! Steady lid-driven cavity compared with the Ghia et al. centerlines.
//!
//! cargo run --release --example lid_driven_cavity -- [100|1000]

use std::path::Path;

use sbp_ins::cases::run::compare_state;
use sbp_ins::cases::{load_reference, simulate, CaseConfig};

fn main() -> sbp_ins::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let re: u32 = std::env::args().nth(1).map_or(100, |a| a.parse().expect("Reynolds number"));
    let mut cfg = CaseConfig::cavity(re as f64);
    if re >= 1000 {
        cfg.dt = 0.05;
        cfg.max_steps = 40_000;
    }
    let out = simulate(&cfg)?;
    let w = &out.march.state;
    println!("steady after {} steps (t = {:.1})", out.march.steps, out.march.time);

    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in [format!("ghia_re{re}_u_x0.5.csv"), format!("ghia_re{re}_v_y0.5.csv")] {
        let path = data.join(&name);
        if path.is_file() {
            println!("{}", compare_state(&out.sys, w, &load_reference(&path)?)?);
        }
    }
    let omega = out.sys.vorticity(w);
    let (g, _) = w
        .u()
        .iter()
        .zip(w.v())
        .enumerate()
        .filter(|(g, _)| {
            let (x, y) = out.sys.coords()[*g];
            x > 0.2 && x < 0.9 && y > 0.2 && y < 0.9
        })
        .min_by(|a, b| (a.1 .0.hypot(*a.1 .1)).total_cmp(&b.1 .0.hypot(*b.1 .1)))
        .expect("interior nodes");
    let (x, y) = out.sys.coords()[g];
    println!("primary vortex near ({x:.3}, {y:.3}), vorticity {:.3}", omega[g]);
    Ok(())
}
