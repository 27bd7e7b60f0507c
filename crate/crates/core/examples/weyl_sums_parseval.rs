// Weighted Weyl sums: values at a few points, the major-arc approximation
// error, the minor-arc supremum, and a Parseval check of the arc-panel
// quadrature.
//
// Pass `--full` for n = 10^6 (about half a minute in release mode).

use circlelab::arcs;
use circlelab::error::Result;
use circlelab::params::GlobalParameters;
use circlelab::sums::{delta_scan, minor_arc_sup_scan, oscillatory_v, parseval_check, WeylSum};

pub fn run(n: u64) -> Result<()> {
    let params = GlobalParameters::new(n)?;
    let f2 = WeylSum::weighted(2, params.x(2))?;
    println!("F_2 at n = {n}: {} terms, F_2(0) = {:.6e}", f2.len(), f2.at_zero());
    for alpha in [0.0, 0.25, 1.0 / 3.0, 0.1234567] {
        let v = f2.eval(alpha);
        println!("  F_2({alpha:.7}) = {:+.6e} {:+.6e}i", v.re, v.im);
    }

    println!("\n|v_2(beta)| with X = n^(1/2):");
    for nb in [1.0, 10.0, 100.0] {
        let v = oscillatory_v(2, nb / n as f64, params.x(2));
        println!("  n|beta| = {nb:>5}: {:.6e}", v.value().norm());
    }

    let d = delta_scan(2, &params, 100.0, 100)?;
    println!("\nmax |F_2 - F_2*| / sqrt(Q) over 100 major-arc points: {:.6e} at {}/{}", d.ratio, d.a, d.q);
    let m = minor_arc_sup_scan(2, 50.0, &params, 20_000)?;
    println!("minor-arc sup / (F_2(0) Q^-1/2): {:.6} at alpha = {:.8}", m.ratio, m.alpha);

    let system = arcs::build(&params, 100.0, false)?;
    let p = parseval_check(&f2, &system);
    println!(
        "\nint |F_2|^2 = {:.12e} (major {:.6e}, minor {:.6e})\nsum w^2     = {:.12e}, relative error {:.2e}",
        p.quadrature.total, p.quadrature.major, p.quadrature.minor, p.exact, p.rel_error
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    run(if full { 1_000_000 } else { 40_000 })
}
