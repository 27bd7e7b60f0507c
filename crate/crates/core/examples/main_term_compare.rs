// Weighted counts of x^2 + y^3 = n next to the predicted main term
// S(n) J(n) over a short window of n.
//
// At n near 10^6 the weights leave only a handful of solutions in the
// window, so expect the ratio to be far from 1.

use circlelab::error::Result;
use circlelab::params::GlobalParameters;
use circlelab::series::{main_term_vs_count, singular_integral};
use circlelab::signature::PowerSignature;

pub fn run(n: u64, window: u64) -> Result<()> {
    let params = GlobalParameters::new(n)?;
    let sig: PowerSignature = "2w,3w".parse()?;
    let j = singular_integral(n, None, &sig, &params)?;
    println!("J({n}) = {:.6e} over |beta| <= {:.3e}, decayed: {}", j.value, j.b, j.decayed);

    let ns: Vec<u64> = (n..n + window).collect();
    let r = main_term_vs_count(&ns, &sig, &params, 400, None)?;
    println!("{:>9} {:>12} {:>10} {:>12} {:>10}", "n", "count", "S(n)", "S J", "ratio");
    for row in r.rows.iter().filter(|row| row.count > 0.0).chain(r.rows.iter().take(3)) {
        println!(
            "{:>9} {:>12.4e} {:>10.5} {:>12.4e} {:>10.4}",
            row.n, row.count, row.series, row.main_term, row.ratio
        );
    }
    println!(
        "\n{} of {window} n have a solution; mean ratio {:.4}, pooled ratio {:.4}",
        r.solutions, r.mean_ratio, r.pooled_ratio
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run(1_000_000, 100)
}
