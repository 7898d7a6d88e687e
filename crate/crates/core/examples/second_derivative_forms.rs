//! Manufactured-solution errors with the two viscous operators: the
//! element-assembled stiffness and the product of global first derivatives.
//!
//! cargo run --release --example second_derivative_forms

use sbp_ins::cases::run::mms_errors;
use sbp_ins::cases::{simulate, CaseConfig};
use sbp_ins::sbp::SecondDerivative;

fn main() -> sbp_ins::Result<()> {
    println!("form,degree,nodes,error_u,error_v,error_p");
    for form in [SecondDerivative::Assembled, SecondDerivative::Global] {
        for (k, n_el) in [(2, 6), (2, 12), (3, 4), (3, 8)] {
            let mut cfg = CaseConfig::mms(k, n_el);
            cfg.second_derivative = form;
            cfg.end_time = Some(0.05);
            let out = simulate(&cfg)?;
            let e = mms_errors(&cfg, &out)?;
            println!("{},{k},{},{:.3e},{:.3e},{:.3e}", form.name(), k * n_el + 1, e.u, e.v, e.p);
        }
    }
    Ok(())
}
