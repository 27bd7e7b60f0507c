// Recomputes the exponent bookkeeping from the bundled permissible
// exponents and prints each derived constant beside its printed value.
//
// ```text
// cargo run --example constants_report
// ```

use circlelab::error::Result;
use circlelab::exponents::{all_pass, verify_all, ExponentReport, PermissibleExponentTable};

pub fn run() -> Result<bool> {
    let table = PermissibleExponentTable::bundled();
    let report = ExponentReport::compute(&table)?;
    println!("lambda = {:.7}  rho = {:.7}  delta_2 = {:.9}", report.lambda, report.rho, report.delta2);
    println!("Q1 = n^{:.7}  Q2 = n^{:.7}", report.q1_exp, report.q2_exp);
    println!();

    let rows = verify_all(&table);
    println!("{:<36} {:>16} {:>14} {:>9}  ok", "constant", "computed", "printed", "tol");
    for r in &rows {
        println!(
            "{:<36} {:>16.10} {:>14.9} {:>9.0e}  {}",
            r.name,
            r.computed,
            r.paper_value,
            r.tolerance,
            if r.pass { "yes" } else { "NO" }
        );
    }

    // Nudging every exponent upwards breaks the chain.
    let perturbed = verify_all(&table.shifted(1e-3));
    let broken = perturbed.iter().filter(|r| !r.pass).count();
    println!("\nwith every lambda_(k,s) raised by 1e-3: {broken} checks fail");
    Ok(all_pass(&rows))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    if !run()? {
        std::process::exit(1);
    }
    Ok(())
}
