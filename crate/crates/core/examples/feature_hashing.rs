//! Feature hashing as a projection: the hand-worked mapping, the same
//! projection as a matrix, and the `sqrt(k)` growth of the norm.
//!
//! ```text
//! cargo run --example feature_hashing
//! ```

use jl_lsh::projections::{
    apply_with_mapping, fh_norm_scale_estimate, make_feature_hashing, ExplicitFhMapping, Projection,
};
use jl_lsh::seed::Seed;
use jl_lsh::vector::RealVector;

fn main() -> jl_lsh::Result<()> {
    // Seven input coordinates hashed onto four outputs.
    let mapping = ExplicitFhMapping::single(4, &[2, 1, 3, 0, 1, 2, 3], &[1, 1, -1, 1, -1, -1, -1])?;
    let v = RealVector::new(vec![0.0, 1.0, 0.0, 3.0, 0.5, 0.0, 1.0])?;
    let w = apply_with_mapping(&mapping, &v)?;
    println!("V  = {:?}", v.as_slice());
    println!("V' = {:?}", w.as_slice());

    println!("\nas a 7x4 matrix:");
    let dense = mapping.to_dense();
    for row in 0..dense.rows() {
        let cells: Vec<String> = (0..dense.cols())
            .map(|c| format!("{:>3}", dense.entry(row, c)))
            .collect();
        println!("  {}", cells.join(""));
    }

    // Seeded projections evaluate hashes lazily and never store the matrix.
    let p = make_feature_hashing(128, 32, 2, Seed(1))?;
    println!("\nseeded FH 128->32, k=2: column 0 of row 5 is {:?}", p.entry(5, 0));

    println!("\nmean ||w||^2 / ||v||^2 over 10^4 draws (expected k):");
    for k in [1, 2, 4, 8] {
        let ratio = fh_norm_scale_estimate(128, 32, k, Seed(7), 10_000)?;
        println!("  k={k}: {ratio:.4}");
    }
    Ok(())
}
