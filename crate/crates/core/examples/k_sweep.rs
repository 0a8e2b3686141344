//! Feature-hashing collision rate at a fixed distance as the number of
//! signed targets per coordinate grows, next to the dense Gaussian family.
//!
//! ```text
//! cargo run --release --example k_sweep
//! ```

use jl_lsh::harness::collision_vs_k;
use jl_lsh::seed::Seed;
use jl_lsh::vector::DistanceKind;

fn main() -> jl_lsh::Result<()> {
    let sweep = collision_vs_k(
        128,
        16,
        &[1, 2, 4, 8, 16, 32, 64],
        0.5,
        DistanceKind::EuclideanNormalizedUnitSphere,
        20_000,
        Seed(4),
    )?;
    for (k, e) in &sweep.points {
        println!("k={k:<3} {:.4} +- {:.4}", e.p_hat, e.std_err);
    }
    println!("dense {:.4} +- {:.4}", sweep.dense.p_hat, sweep.dense.std_err);
    Ok(())
}
