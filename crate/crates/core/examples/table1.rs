//! Minhashes and tables needed for 0.95 collision at chord distance 0.2 and
//! 0.05 at 0.6, per family, with a direct re-check of each scheme.
//!
//! ```text
//! cargo run --release --example table1 [trials]
//! ```

use jl_lsh::harness::{table1_experiment, Table1Config};
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let mut config = Table1Config::desk_default(Seed(1));
    config.trials = trials;
    config.validation_trials = trials / 5;
    println!(
        "{:<40} {:>7} {:>7} {:>4} {:>5} {:>6} {:>9} {:>9}",
        "family", "p1", "p2", "r", "b", "total", "check p1", "check p2"
    );
    for row in table1_experiment(&config)? {
        let Some(s) = row.scheme else {
            println!("{:<40} infeasible", row.family.label());
            continue;
        };
        println!(
            "{:<40} {:>7.4} {:>7.4} {:>4} {:>5} {:>6} {:>9.4} {:>9.4}",
            row.family.label(),
            row.p1.p_hat,
            row.p2.p_hat,
            s.r,
            s.b,
            s.total(),
            row.p1_validated.map_or(f64::NAN, |e| e.p_hat),
            row.p2_validated.map_or(f64::NAN, |e| e.p_hat),
        );
    }
    Ok(())
}
