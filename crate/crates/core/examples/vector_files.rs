//! fvecs round trip and a cached ground truth, in a temporary directory.
//!
//! ```text
//! cargo run --example vector_files
//! ```

use jl_lsh::harness::{
    compute_ground_truth, generate_synthetic, load_vectors, parse_fvecs, write_fvecs, GroundTruth,
    SyntheticSpec,
};
use jl_lsh::seed::Seed;
use jl_lsh::vector::DistanceKind;

fn main() -> jl_lsh::Result<()> {
    let bytes = [2, 0, 0, 0, 0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x40];
    println!("fixture -> {:?}", parse_fvecs(&bytes)?[0].as_slice());
    match parse_fvecs(&bytes[..10]) {
        Err(e) => println!("truncated -> {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::temp_dir().join(format!("jl-lsh-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let spec = SyntheticSpec {
        n: 1_000,
        queries: 10,
        dim: 32,
        clusters: 0,
        spread: 0.0,
    };
    let (data, queries) = generate_synthetic(&spec, Seed(3))?;
    write_fvecs(dir.join("base.fvecs"), data.vectors())?;
    let reloaded = load_vectors(dir.join("base.fvecs"), true)?;
    println!("wrote and reloaded {} vectors of dim {:?}", reloaded.len(), reloaded.dim());

    let truth = compute_ground_truth(&reloaded, &queries, 10, DistanceKind::Angular)?;
    truth.write(dir.join("gt.bin"))?;
    let cached = GroundTruth::read(dir.join("gt.bin"))?;
    println!(
        "ground truth cached: {} queries, first neighbour of query 0 is {} at {:.4} rad",
        cached.entries.len(),
        cached.entries[0].neighbors[0].id,
        cached.entries[0].neighbors[0].distance
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
