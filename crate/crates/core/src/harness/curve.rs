use crate::amplify::collision_frequency;
use crate::error::{LshError, Result};
use crate::families::MinhashFamily;
use crate::seed::Seed;
use crate::vector::DistanceKind;

/// Estimated single-minhash collision probability over a distance grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionCurve {
    pub kind: DistanceKind,
    pub grid: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub std_err: Vec<f64>,
    pub trials: u64,
    pub seed: Seed,
    /// Family descriptor (see [`MinhashFamily::descriptor`]).
    pub family: String,
}

impl CollisionCurve {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// `points` distances spread uniformly over `[0, max]` of `kind` on the sphere.
pub fn uniform_grid(kind: DistanceKind, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => {
            let max = kind.sphere_max();
            (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
        }
    }
}

/// The 21-point grid over normalized Euclidean distance `[0, 1]`.
pub fn default_grid() -> (DistanceKind, Vec<f64>) {
    let kind = DistanceKind::EuclideanNormalizedUnitSphere;
    (kind, uniform_grid(kind, 21))
}

/// Collision frequency of one minhash at each grid distance, over `trials`
/// pairs per point drawn at exactly that distance.
pub fn estimate_collision_curve(
    family: &MinhashFamily,
    grid: &[f64],
    kind: DistanceKind,
    trials: u64,
    seed: Seed,
) -> Result<CollisionCurve> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LshError::domain("grid must be strictly ascending"));
    }
    let mut p_hat = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    for (g, &d) in grid.iter().enumerate() {
        let alpha = kind.to_angle(d)?;
        let est = collision_frequency(family, alpha, trials, seed.derive(g as u64))?;
        p_hat.push(est.p_hat);
        std_err.push(est.std_err);
    }
    Ok(CollisionCurve {
        kind,
        grid: grid.to_vec(),
        p_hat,
        std_err,
        trials,
        seed,
        family: family.descriptor(),
    })
}

/// Least-squares non-increasing fit (pool adjacent violators, equal weights).
pub fn isotonic_nonincreasing(values: &[f64]) -> Vec<f64> {
    // Blocks of (mean, size).
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, n)| std::iter::repeat(m).take(n))
        .collect()
}

/// Result of checking a curve against its non-increasing isotonic fit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCheck {
    pub fitted: Vec<f64>,
    /// `|p_hat - fitted| / sigma` per grid point (0 when both are zero).
    pub z: Vec<f64>,
    pub max_z: f64,
}

impl MonotonicityCheck {
    pub fn passes(&self, sigmas: f64) -> bool {
        self.max_z < sigmas
    }
}

/// Compares a curve with its isotonic fit. The per-point sigma is the larger
/// of the estimate's standard error and the binomial error of the fitted
/// value, so points estimated at exactly 0 or 1 are not given zero slack
/// when pooled with their neighbours.
pub fn monotonicity_check(curve: &CollisionCurve) -> MonotonicityCheck {
    let fitted = isotonic_nonincreasing(&curve.p_hat);
    let n = curve.trials.max(1) as f64;
    let z: Vec<f64> = curve
        .p_hat
        .iter()
        .zip(&fitted)
        .zip(&curve.std_err)
        .map(|((&p, &f), &se)| {
            let resid = (p - f).abs();
            let sigma = se.max((f * (1.0 - f) / n).sqrt());
            if resid == 0.0 {
                0.0
            } else if sigma == 0.0 {
                f64::INFINITY
            } else {
                resid / sigma
            }
        })
        .collect();
    let max_z = z.iter().copied().fold(0.0, f64::max);
    MonotonicityCheck { fitted, z, max_z }
}
