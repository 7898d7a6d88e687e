//! Manufactured-solution convergence for degrees 1 to 4 on 13 and 25 nodes
//! per direction.
//!
//! cargo run --release --example mms_convergence -- [end_time]

use sbp_ins::mms::{convergence_csv, convergence_sweep, MmsField, MmsRunSettings};
use sbp_ins::time::NewtonSettings;

fn main() -> sbp_ins::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let end_time = std::env::args().nth(1).map_or(0.1, |a| a.parse().expect("end time"));
    let settings = MmsRunSettings {
        end_time,
        newton: NewtonSettings {
            reuse_jacobian: true,
            ..NewtonSettings::default()
        },
        ..MmsRunSettings::default()
    };
    let rows = convergence_sweep(MmsField::default(), &[1, 2, 3, 4], &[13, 25], &settings)?;
    print!("{}", convergence_csv(&rows));
    Ok(())
}
