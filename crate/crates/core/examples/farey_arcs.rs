// Builds the major arcs around rationals a/q with q <= Q and classifies a
// few points of the unit interval.

use circlelab::arcs::{self, pruning_kernel};
use circlelab::error::Result;
use circlelab::params::GlobalParameters;

pub fn run() -> Result<()> {
    let params = GlobalParameters::new(1_000_000)?;
    let q = 400.0;
    let major = arcs::build(&params, q, false)?;
    let star = arcs::build(&params, q, true)?;

    println!("n = {}, Q = {q}: {} arcs on {:?}", params.n, major.arcs.len(), major.interval);
    println!("  measure {:.12e} (closed form {:.12e})", major.measure(), major.closed_form_measure());
    println!("  disjoint: {}  clipped system inside: {}", major.pairwise_disjoint(), star.is_subset_of(&major));
    println!("  clipped measure {:.6e}", star.measure());

    for alpha in [0.5, 0.5 + 2e-7, 0.3183, 1.0 / 7.0 + 1e-9, std::f64::consts::FRAC_1_SQRT_2] {
        let label = major.classify(alpha);
        if label.is_major() {
            println!(
                "  alpha = {alpha:.10}: near {}/{} with beta = {:+.3e}, kernel {:.4}",
                label.a,
                label.q,
                label.beta,
                pruning_kernel(&label, params.n)?
            );
        } else {
            println!("  alpha = {alpha:.10}: minor");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
