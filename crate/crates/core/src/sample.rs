//! Seeded samplers for synthetic experiments.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LshError, Result};
use crate::seed::Seed;
use crate::vector::{check_angle, dot_slices, RealVector};

pub(crate) fn gaussian_vec<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn unit_from_rng<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let mut g = gaussian_vec(rng, dim);
        let n = dot_slices(&g, &g).sqrt();
        if n > 0.0 {
            g.iter_mut().for_each(|c| *c /= n);
            return g;
        }
    }
}

/// Uniform sample from the unit sphere in `R^dim` (normalized standard Gaussian).
pub fn sample_unit_vector(dim: usize, seed: Seed) -> Result<RealVector> {
    if dim == 0 {
        return Err(LshError::domain("dimension must be at least 1"));
    }
    Ok(RealVector::from_vec_unchecked(unit_from_rng(&mut seed.rng(), dim)))
}

/// A unit vector `v` at angle `alpha` from the given unit vector `u`, uniform on
/// that cone.
pub fn sample_at_angle_from(u: &RealVector, alpha: f64, seed: Seed) -> Result<RealVector> {
    check_angle(alpha)?;
    let dim = u.dim();
    if dim < 2 {
        return Err(LshError::domain("pairs at an angle need dim >= 2"));
    }
    let u = u.as_slice();
    let mut rng = seed.rng();
    // Gram-Schmidt a fresh Gaussian vector against u.
    let w = loop {
        let mut g = gaussian_vec(&mut rng, dim);
        let proj = dot_slices(&g, u);
        g.iter_mut().zip(u).for_each(|(gi, ui)| *gi -= proj * ui);
        let n = dot_slices(&g, &g).sqrt();
        if n > 1e-12 {
            g.iter_mut().for_each(|c| *c /= n);
            break g;
        }
    };
    let (s, c) = alpha.sin_cos();
    let v = u.iter().zip(&w).map(|(ui, wi)| c * ui + s * wi).collect();
    Ok(RealVector::from_vec_unchecked(v))
}

/// A pair of unit vectors at angle `alpha`: `u` uniform on the sphere, `v`
/// uniform on the cone of half-angle `alpha` around `u`.
pub fn sample_pair_at_angle(
    dim: usize,
    alpha: f64,
    seed: Seed,
) -> Result<(RealVector, RealVector)> {
    check_angle(alpha)?;
    if dim < 2 {
        return Err(LshError::domain("pairs at an angle need dim >= 2"));
    }
    let u = sample_unit_vector(dim, seed.derive(0))?;
    let v = sample_at_angle_from(&u, alpha, seed.derive(1))?;
    Ok((u, v))
}
