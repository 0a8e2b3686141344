use crate::amplify::{collision_frequency, Estimate};
use crate::error::{LshError, Result};
use crate::families::{FamilyKind, MinhashFamily};
use crate::seed::Seed;
use crate::vector::DistanceKind;

/// Feature-hashing collision rate at one distance as `k` varies, next to
/// the dense Gaussian (Voronoi) family with the same `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweep {
    pub dim: usize,
    pub t: usize,
    pub kind: DistanceKind,
    pub distance: f64,
    pub points: Vec<(usize, Estimate)>,
    pub dense: Estimate,
    pub seed: Seed,
}

/// Collision rate of `FeatureHashing(T = d_prime, k)` for each `k` in
/// `k_list` at `distance`, plus the dense `Voronoi(T = d_prime)` reference.
pub fn collision_vs_k(
    dim: usize,
    d_prime: usize,
    k_list: &[usize],
    distance: f64,
    kind: DistanceKind,
    trials: u64,
    seed: Seed,
) -> Result<KSweep> {
    if k_list.is_empty() || k_list[0] == 0 || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LshError::domain(
            "k_list must be non-empty, strictly ascending and start at k >= 1",
        ));
    }
    let alpha = kind.to_angle(distance)?;
    let points = k_list
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let s = seed.derive(i as u64);
            let family = MinhashFamily::new(FamilyKind::FeatureHashing { t: d_prime, k }, dim, s.derive(0))?;
            Ok((k, collision_frequency(&family, alpha, trials, s.derive(1))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let s = seed.derive(u64::MAX);
    let dense_family = MinhashFamily::new(FamilyKind::Voronoi { t: d_prime }, dim, s.derive(0))?;
    let dense = collision_frequency(&dense_family, alpha, trials, s.derive(1))?;
    Ok(KSweep {
        dim,
        t: d_prime,
        kind,
        distance,
        points,
        dense,
        seed,
    })
}
