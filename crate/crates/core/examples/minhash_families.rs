//! The six minhash families hashing the same pair of vectors, and the
//! argmax / cross-polytope readouts on two hand-picked projections.
//!
//! ```text
//! cargo run --example minhash_families
//! ```

use jl_lsh::families::{argmax_of, cross_polytope_of, FamilyKind, MinhashFamily};
use jl_lsh::sample::sample_pair_at_angle;
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    let a = [3.0, 2.0, -5.0, -1.0, 2.0];
    let b = [1.0, 4.0, -6.0, 3.0, 1.0];
    println!("argmax:        {} vs {}", argmax_of(&a).0, argmax_of(&b).0);
    // Value 2*i + 1 is vertex -e_i.
    println!("cross-polytope: {} vs {}", cross_polytope_of(&a).0, cross_polytope_of(&b).0);

    let (u, v) = sample_pair_at_angle(128, 0.3, Seed(11))?;
    println!("\nfirst four minhashes of a pair 0.3 rad apart, d=128:");
    for kind in FamilyKind::table1_defaults() {
        let family = MinhashFamily::new(kind, 128, Seed(5))?;
        let hu: Vec<u64> = (0..4).map(|i| family.hash(i, &u).map(|h| h.0)).collect::<Result<_, _>>()?;
        let hv: Vec<u64> = (0..4).map(|i| family.hash(i, &v).map(|h| h.0)).collect::<Result<_, _>>()?;
        println!("  {:<40} {hu:?}\n  {:<40} {hv:?}", kind.label(), "");
    }
    Ok(())
}
