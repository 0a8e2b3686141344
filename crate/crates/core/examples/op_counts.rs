//! Exact arithmetic per minhash evaluation, and measured time, at d=128.
//!
//! ```text
//! cargo run --release --example op_counts
//! ```

use jl_lsh::families::FamilyKind;
use jl_lsh::harness::op_count_benchmark;
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    println!(
        "{:<40} {:>8} {:>6} {:>8} {:>5} {:>9}",
        "family", "add/sub", "mul", "mul-add", "cmp", "ns/hash"
    );
    for r in op_count_benchmark(&FamilyKind::table1_defaults(), 128, 50_000, Seed(0))? {
        println!(
            "{:<40} {:>8} {:>6} {:>8} {:>5} {:>9.0}",
            r.family.label(),
            r.counts.add_sub(),
            r.counts.multiplications,
            r.counts.multiply_adds,
            r.counts.comparisons,
            r.ns_per_hash
        );
    }
    Ok(())
}
