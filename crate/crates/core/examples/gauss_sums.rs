// Complete exponential sums modulo q, their multiplicative majorant, and
// the k-radical that decides when d divides m^k.

use circlelab::arith::{complete_sum, count_multiples_pow, k_radical, majorant_scan, omega_k};
use circlelab::error::Result;

pub fn run() -> Result<()> {
    println!("S_k(q, 1) for small moduli:");
    for (q, k) in [(7, 2), (7, 3), (9, 3), (16, 4), (2, 5)] {
        let s = complete_sum(q, 1, k)?;
        println!(
            "  q={q:<3} k={k:<2} S = {:>8.4} {:+.4}i  |S| = {:.4}  q*omega = {:.4}",
            s.re,
            s.im,
            s.abs(),
            q as f64 * omega_k(q, k)?
        );
    }

    let rec = majorant_scan(64, 6)?;
    println!(
        "\nworst |S_k|/(q omega_k) for q <= 64, k <= 6: {:.6} at q={} a={} k={} ({} sums)",
        rec.ratio, rec.q, rec.a, rec.k, rec.evaluations
    );

    println!("\nk-radicals, d | m^k exactly when rad_k(d) | m:");
    for (d, k) in [(72, 2), (72, 3), (1024, 4), (9000, 3)] {
        let r = k_radical(d, k)?;
        let brute = (1..=1000u64).filter(|m| (*m as u128).pow(k) % d as u128 == 0).count() as u64;
        println!(
            "  rad_{k}({d}) = {r:<5} multiples up to 1000: {} (brute force {brute})",
            count_multiples_pow(1000, d, k)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
