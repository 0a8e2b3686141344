//! Recall@10 as tables are added, for each family, at the `r` solved for
//! the 0.95 / 0.05 targets.
//!
//! ```text
//! cargo run --release --example precision_curve
//! ```

use jl_lsh::amplify::SensitivityTarget;
use jl_lsh::families::FamilyKind;
use jl_lsh::harness::{
    compute_ground_truth, generate_synthetic, precision_vs_tables, PrecisionConfig, SyntheticSpec,
};
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    let spec = SyntheticSpec {
        n: 5_000,
        queries: 100,
        dim: 128,
        clusters: 100,
        spread: 0.2,
    };
    let (data, queries) = generate_synthetic(&spec, Seed(8))?;
    let target = SensitivityTarget::table1();
    let truth = compute_ground_truth(&data, &queries, 10, target.kind)?;
    let config = PrecisionConfig {
        families: FamilyKind::table1_defaults().to_vec(),
        target,
        trials: 10_000,
        r_max: 32,
        b_max: 10,
        kind: target.kind,
        seed: Seed(9),
    };
    for c in precision_vs_tables(&data, &queries, &truth, &config)? {
        let pts: Vec<String> = c.recall.iter().skip(1).map(|r| format!("{r:.2}")).collect();
        println!("{:<40} r={:<3} {}  slope {:.2}", c.family.label(), c.r, pts.join(" "), c.normalized_slope());
    }
    Ok(())
}
