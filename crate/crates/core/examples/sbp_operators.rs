//! Builds the one-dimensional CG operators on a stretched grid and checks
//! their summation-by-parts identities and accuracy.
//!
//! cargo run --example sbp_operators -- [degree] [elements]

use sbp_ins::basis::ReferenceElement;
use sbp_ins::mesh::{cosine_stretched_edges_on, global_nodes};
use sbp_ins::sbp::{metric_scaled_operators, SecondDerivative};
use sbp_ins::sparse::matvec;

fn main() -> sbp_ins::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let k = args.next().unwrap_or(3);
    let n_el = args.next().unwrap_or(6);
    let reference = ReferenceElement::new(k)?;
    let edges = cosine_stretched_edges_on(n_el, 0.0, 1.0)?;
    let ops = metric_scaled_operators(&reference, &edges)?;
    let x = global_nodes(&reference, &edges);
    println!("degree {k}, {n_el} stretched elements, {} nodes", ops.n_nodes());
    println!("max |Q + Q^T - B|              = {:.3e}", ops.sbp_defect());
    println!("max |Qxx - (B Dx - Dx^T P Dx)| = {:.3e}", ops.second_derivative_defect());
    println!("sum of P (interval length)     = {:.15}", ops.mass.iter().sum::<f64>());

    let f: Vec<f64> = x.iter().map(|t| t.powi(k as i32)).collect();
    let df = matvec(&ops.dx, &f);
    let worst = x
        .iter()
        .zip(&df)
        .map(|(t, d)| (d - k as f64 * t.powi(k as i32 - 1)).abs())
        .fold(0.0, f64::max);
    println!("Dx error on x^{k}                = {worst:.3e}");

    let g: Vec<f64> = x.iter().map(|t| (3.0 * t).sin()).collect();
    for form in [SecondDerivative::Assembled, SecondDerivative::Global] {
        let dxx = ops.second_derivative(form);
        let d2g = matvec(dxx, &g);
        let interior = (1..x.len() - 1)
            .map(|i| (d2g[i] + 9.0 * (3.0 * x[i]).sin()).abs())
            .fold(0.0, f64::max);
        println!("{:>9} Dxx interior error on sin(3x) = {interior:.3e}, nonzeros {}", form.name(), dxx.nnz());
    }
    Ok(())
}
