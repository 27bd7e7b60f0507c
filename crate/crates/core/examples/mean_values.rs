// Even moments of exponential sums as exact solution counts, and how much
// of each moment the major arcs carry.

use circlelab::arcs;
use circlelab::counting::{diagonal_split, mean_value, restricted_mean_value, MeanFactor, MeanValueSpec};
use circlelab::error::Result;
use circlelab::params::GlobalParameters;

pub fn run() -> Result<()> {
    for text in ["f3[Y=30,R=7]^4", "F2[X=200]^2 * F3[X=40]^2", "g5[R=20,r=2]^2", "f2[Y=60,R=5]^2 * f3[Y=20,R=5]^4"] {
        let spec: MeanValueSpec = text.parse()?;
        let m = mean_value(&spec)?;
        match m.exact {
            Some(c) => println!("{spec:<40} = {c} solutions"),
            None => println!("{spec:<40} = {:.10e}", m.value),
        }
    }

    let params = GlobalParameters::new(40_000)?;
    let spec: MeanValueSpec = "f3[Y=30,R=7]^4".parse()?;
    for q in [2.0, 10.0, 50.0] {
        let system = arcs::build(&params, q, false)?;
        let r = restricted_mean_value(&spec, &system)?;
        println!(
            "Q = {q:>4}: major {:.4}, minor {:.4} of {}, closure error {:.1e}",
            r.major, r.minor, r.exact, r.closure_error
        );
    }

    let quartic: MeanFactor = "f4[Y=20,R=5]^2".parse::<MeanValueSpec>()?.factors.remove(0);
    let other: MeanFactor = "f3[Y=30,R=5]^2".parse::<MeanValueSpec>()?.factors.remove(0);
    let split = diagonal_split(&quartic, &other, 1)?;
    println!(
        "\nx^4 + u^3 = y^4 + v^3 over smooth ranges: {} solutions, {} with x = y",
        split.total, split.diagonal
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
