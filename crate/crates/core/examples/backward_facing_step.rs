//! Backward-facing step at Re = 100: flux balance, outflow profile and the
//! extent of the recirculation zone behind the step.
//!
//! cargo run --release --example backward_facing_step

use sbp_ins::cases::post::{parabola_deviation, segment_flux};
use sbp_ins::cases::run::line_profile;
use sbp_ins::cases::{simulate, CaseConfig, LineSpec, Quantity};
use sbp_ins::sbp::Segment;

fn main() -> sbp_ins::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cfg = CaseConfig::bfs(100.0);
    let out = simulate(&cfg)?;
    let (sys, w) = (&out.sys, &out.march.state);
    println!("steady after {} steps", out.march.steps);
    println!(
        "flux in {:.8}, out {:.8}",
        -segment_flux(sys, w, Segment::West),
        segment_flux(sys, w, Segment::East)
    );
    let x_out = cfg.domain.1;
    let (dev, mean) = parabola_deviation(&line_profile(sys, w, Quantity::U, LineSpec::x(x_out))?)?;
    println!("outflow at x = {x_out}: mean u {mean:.6}, deviation from parabola {dev:.2e}");

    // The inflow fills the lower half, so the step corner is at (0, 0.5) and
    // the separated flow sits under the upper wall.
    let near_wall = line_profile(sys, w, Quantity::U, LineSpec::y(0.99))?;
    let xs = &near_wall.abscissa;
    let us = &near_wall.values;
    if let Some(i) = (1..xs.len()).find(|&i| us[i - 1] < 0.0 && us[i] >= 0.0) {
        let x = xs[i - 1] - us[i - 1] * (xs[i] - xs[i - 1]) / (us[i] - us[i - 1]);
        println!("reattachment at x = {x:.3} (step heights: {:.3})", x / 0.5);
    }
    Ok(())
}
