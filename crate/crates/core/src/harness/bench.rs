use std::hint::black_box;
use std::time::Instant;

use crate::error::{LshError, Result};
use crate::families::{FamilyKind, MinhashFamily};
use crate::ops::{NoCount, OpCounts};
use crate::sample::sample_unit_vector;
use crate::seed::Seed;

/// Arithmetic performed by one minhash evaluation, plus measured speed.
#[derive(Debug, Clone, PartialEq)]
pub struct OpCountReport {
    pub family: FamilyKind,
    pub dim: usize,
    pub counts: OpCounts,
    /// Mean wall-clock nanoseconds per hash. Hardware dependent.
    pub ns_per_hash: f64,
}

/// Counts the operations of a single hash exactly, then times `trials`
/// hashes (cycling over 16 random unit vectors) with counting disabled.
/// `trials = 0` skips timing and reports `ns_per_hash = 0`.
pub fn op_count_benchmark(
    families: &[FamilyKind],
    dim: usize,
    trials: u64,
    seed: Seed,
) -> Result<Vec<OpCountReport>> {
    if dim == 0 {
        return Err(LshError::domain("dim must be at least 1"));
    }
    let inputs = (0..16)
        .map(|i| sample_unit_vector(dim, seed.derive(i)))
        .collect::<Result<Vec<_>>>()?;
    families
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let family = MinhashFamily::new(kind, dim, seed.derive(100 + i as u64))?;
            let f = family.function(0);
            let mut counts = OpCounts::default();
            f.hash_counted(inputs[0].as_slice(), &mut counts);
            let ns_per_hash = if trials == 0 {
                0.0
            } else {
                let start = Instant::now();
                for t in 0..trials {
                    let x = &inputs[(t % 16) as usize];
                    black_box(f.hash_counted(black_box(x.as_slice()), &mut NoCount));
                }
                start.elapsed().as_nanos() as f64 / trials as f64
            };
            Ok(OpCountReport {
                family: kind,
                dim,
                counts,
                ns_per_hash,
            })
        })
        .collect()
}
