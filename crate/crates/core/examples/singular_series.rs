// The truncated singular series for the thirteen-variable problem, its
// partial sums and the multiplicativity of its terms.

use circlelab::error::Result;
use circlelab::params::GlobalParameters;
use circlelab::series::SeriesContext;
use circlelab::signature::PowerSignature;

pub fn run() -> Result<()> {
    let params = GlobalParameters::new(1_000_000)?;
    let sig = PowerSignature::unlike_powers_mixed(&params);
    println!("signature {sig}");
    let ctx = SeriesContext::new(&sig, 400)?;

    for n in [1_000_000u64, 1_000_001, 999_999_937] {
        let s = ctx.series(n);
        println!(
            "\nn = {n}: S(400) = {:.14}, max |Im A(q)| = {:.1e}, tail <= {:.2e}",
            s.value(),
            s.max_imag,
            s.tail_estimate
        );
        for x in [1u64, 2, 4, 25, 100, 200, 400] {
            println!("  S({x:>3}) = {:.14}", s.at(x));
        }
        println!("  Cauchy decay at 100: {}", s.cauchy_decay(100));
    }

    println!("\nlargest |A(q1 q2) - A(q1) A(q2)|, coprime q1, q2 <= 40: {:.2e}", ctx.multiplicativity_defect(1_000_000, 40));

    // Plain squares and cubes: the local factors are far from trivial.
    let pair = SeriesContext::new(&PowerSignature::plain(&[2, 3]), 400)?;
    for n in [1_000_000u64, 1_000_003] {
        let s = pair.series(n);
        println!("x^2 + y^3 = {n}: S(100) = {:.6}, S(200) = {:.6}, S(400) = {:.6}", s.at(100), s.at(200), s.value());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
