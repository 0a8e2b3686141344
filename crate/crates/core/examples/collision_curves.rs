//! Collision probability against distance for the six families at d=128,
//! with each curve's signed area relative to the neutral line `1 - d`.
//!
//! ```text
//! cargo run --release --example collision_curves [trials]
//! ```

use jl_lsh::amplify::neutral_deviation;
use jl_lsh::families::{FamilyKind, MinhashFamily};
use jl_lsh::harness::{default_grid, estimate_collision_curve, monotonicity_check};
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5_000);
    let (kind, grid) = default_grid();
    let seed = Seed(2024);
    let mut curves = Vec::new();
    for (i, f) in FamilyKind::table1_defaults().into_iter().enumerate() {
        let family = MinhashFamily::new(f, 128, seed.derive(i as u64))?;
        curves.push((f, estimate_collision_curve(&family, &grid, kind, trials, seed.derive(100 + i as u64))?));
    }

    print!("{:>6}", "d");
    for (f, _) in &curves {
        print!("{:>16}", f.name());
    }
    println!();
    for (g, d) in grid.iter().enumerate().step_by(2) {
        print!("{d:>6.2}");
        for (_, c) in &curves {
            print!("{:>16.4}", c.p_hat[g]);
        }
        println!();
    }
    println!("\narea above the neutral line, and isotonic check:");
    for (f, c) in &curves {
        let check = monotonicity_check(c);
        println!(
            "  {:<40} {:+.4}   max z = {:.2}",
            f.label(),
            neutral_deviation(c),
            check.max_z
        );
    }
    Ok(())
}
