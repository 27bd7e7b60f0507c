// Which integers are not sums x_2^2 + x_3^3 + ... + x_14^14? Computed by a
// bitset table and, independently, by meet-in-the-middle.

use std::time::Instant;

use circlelab::counting::{MeetInMiddle, RepresentationTable, TableMode};
use circlelab::error::Result;
use circlelab::params::GlobalParameters;
use circlelab::signature::PowerSignature;

pub fn run(limit: u64) -> Result<()> {
    let params = GlobalParameters::new(limit.max(2))?;
    let sig = PowerSignature::unlike_powers();

    let t = Instant::now();
    let table = RepresentationTable::build(&sig, &params, limit, TableMode::Bitset)?;
    let exc = table.exceptional();
    println!("bitset table to {limit}: {:?}", t.elapsed());

    let t = Instant::now();
    let mitm = MeetInMiddle::new(&sig, &params, limit)?;
    let agree = mitm.to_table().same_support(&table);
    println!("meet-in-the-middle: {:?}, halves {:?}", t.elapsed(), mitm.side_sizes());

    println!("\n{} exceptional values, largest {:?}, methods agree: {agree}", exc.values.len(), exc.largest);
    println!("{:?}", exc.values);

    let counts = RepresentationTable::build(&sig, &params, 2_000, TableMode::Count)?;
    println!("\nrepresentations of a few n:");
    for n in [13u64, 100, 123, 124, 1000, 2000] {
        println!("  r({n}) = {}", counts.count(n).unwrap_or(0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let limit = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    run(limit)
}
