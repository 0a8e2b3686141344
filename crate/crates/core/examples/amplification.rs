//! AND/OR amplification: the probability transform and the `(r, b)` solver.
//!
//! ```text
//! cargo run --example amplification -- 0.8 0.2
//! ```

use jl_lsh::amplify::{amplified_probability, solve_parameters, SensitivityTarget};
use jl_lsh::vector::DistanceKind;

fn main() -> jl_lsh::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (p1, p2) = match args[..] {
        [a, b, ..] => (a, b),
        _ => (0.8, 0.2),
    };

    println!("1 - (1 - p^r)^b for r=5:");
    for p in [0.2, 0.5, 0.8, 0.9] {
        let row: Vec<String> = [1, 5, 20, 100]
            .iter()
            .map(|&b| format!("b={b}: {:.4}", amplified_probability(p, 5, b).unwrap()))
            .collect();
        println!("  p={p}  {}", row.join("  "));
    }

    let target = SensitivityTarget::new(DistanceKind::EuclideanRaw, 0.2, 0.6, 0.95, 0.05)?;
    let s = solve_parameters(p1, p2, &target, 32, 100_000)?;
    println!(
        "\np1={p1}, p2={p2}: r={} b={} total={}  (amplified {:.4} / {:.4})",
        s.r,
        s.b,
        s.total(),
        s.probability(p1)?,
        s.probability(p2)?
    );
    Ok(())
}
