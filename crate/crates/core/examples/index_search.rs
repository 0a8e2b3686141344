//! Build a multi-table index over clustered synthetic data, answer k-NN
//! queries, compare with exhaustive search, and round-trip a snapshot.
//!
//! ```text
//! cargo run --release --example index_search
//! ```

use jl_lsh::amplify::{estimate_base_probability, solve_parameters, SensitivityTarget};
use jl_lsh::families::{FamilyKind, MinhashFamily};
use jl_lsh::harness::{compute_ground_truth, generate_synthetic, recall, SyntheticSpec};
use jl_lsh::index::{read_snapshot, write_snapshot, LshIndex};
use jl_lsh::seed::Seed;

fn main() -> jl_lsh::Result<()> {
    let spec = SyntheticSpec {
        n: 10_000,
        queries: 100,
        dim: 128,
        clusters: 200,
        spread: 0.15,
    };
    let (data, queries) = generate_synthetic(&spec, Seed(1))?;
    let target = SensitivityTarget::table1();
    let kind = target.kind;

    let family = MinhashFamily::new(FamilyKind::FeatureHashing { t: 64, k: 1 }, 128, Seed(2))?;
    let p1 = estimate_base_probability(&family, target.d1, kind, 20_000, Seed(3))?;
    let p2 = estimate_base_probability(&family, target.d2, kind, 20_000, Seed(4))?;
    let scheme = solve_parameters(p1.p_hat, p2.p_hat, &target, 32, 100_000)?;
    println!("p1={:.4} p2={:.4} -> r={} b={}", p1.p_hat, p2.p_hat, scheme.r, scheme.b);

    let index = LshIndex::build(&data, family, scheme, Seed(5))?;
    let truth = compute_ground_truth(&data, &queries, 10, kind)?;
    let mut total_recall = 0.0;
    let mut candidates = 0;
    for (q, t) in queries.iter().zip(&truth.entries) {
        let (found, stats) = index.query_knn(q, 10, kind)?;
        total_recall += recall(&found, &t.neighbors);
        candidates += stats.candidates_examined;
    }
    println!(
        "mean recall@10 = {:.3}, mean candidates = {:.0} of {}",
        total_recall / queries.len() as f64,
        candidates as f64 / queries.len() as f64,
        data.len()
    );

    let mut bytes = Vec::new();
    write_snapshot(&index, &mut bytes)?;
    let loaded = read_snapshot(bytes.as_slice())?;
    let same = queries
        .iter()
        .all(|q| index.query_knn(q, 10, kind).unwrap().0 == loaded.query_knn(q, 10, kind).unwrap().0);
    println!("snapshot: {} bytes, reloaded index answers identically: {same}", bytes.len());
    Ok(())
}
