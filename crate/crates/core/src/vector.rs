//! Dense vectors and the distance measures used on and off the unit sphere.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Index;

use crate::error::{LshError, Result};

/// Inputs to sphere-only distances must have unit norm within this tolerance.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// A dense point in `R^d` with finite components and `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(LshError::domain("vector must have at least one component"));
        }
        if let Some(pos) = components.iter().position(|c| !c.is_finite()) {
            return Err(LshError::domain(format!(
                "component {pos} is not finite ({})",
                components[pos]
            )));
        }
        Ok(RealVector(components))
    }

    /// Widens single-precision storage (fvecs, SIFT) to `f64`.
    pub fn from_f32(components: &[f32]) -> Result<Self> {
        Self::new(components.iter().map(|&c| f64::from(c)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// Callers guarantee the invariants (non-empty, finite).
    pub(crate) fn from_vec_unchecked(components: Vec<f64>) -> Self {
        debug_assert!(!components.is_empty());
        debug_assert!(components.iter().all(|c| c.is_finite()));
        RealVector(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &RealVector) -> Result<f64> {
        dot(self, other)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn normalize(&self) -> Result<RealVector> {
        normalize(self)
    }

    pub fn scale(&self, factor: f64) -> Result<RealVector> {
        RealVector::new(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_NORM_TOLERANCE
    }
}

impl Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = LshError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVector::new(v)
    }
}

/// Which distance a caller means by "distance".
///
/// `EuclideanRaw` is the plain chord length `||x - y||`. On the unit sphere it
/// lies in `[0, 2]`; `EuclideanNormalizedUnitSphere` is that chord halved so it
/// lies in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Angular,
    EuclideanRaw,
    EuclideanNormalizedUnitSphere,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 3] = [
        DistanceKind::Angular,
        DistanceKind::EuclideanRaw,
        DistanceKind::EuclideanNormalizedUnitSphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Angular => "angular",
            DistanceKind::EuclideanRaw => "euclidean",
            DistanceKind::EuclideanNormalizedUnitSphere => "euclidean-normalized",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "angular" => Ok(DistanceKind::Angular),
            "euclidean" | "euclidean-raw" => Ok(DistanceKind::EuclideanRaw),
            "euclidean-normalized" | "normalized" => {
                Ok(DistanceKind::EuclideanNormalizedUnitSphere)
            }
            other => Err(LshError::Usage(format!(
                "unknown distance kind '{other}' (expected angular, euclidean, euclidean-normalized)"
            ))),
        }
    }

    /// Largest distance between two unit vectors under this measure.
    pub fn sphere_max(self) -> f64 {
        match self {
            DistanceKind::Angular => PI,
            DistanceKind::EuclideanRaw => 2.0,
            DistanceKind::EuclideanNormalizedUnitSphere => 1.0,
        }
    }

    /// Angle between two unit vectors lying at `distance` under this measure.
    pub fn to_angle(self, distance: f64) -> Result<f64> {
        let max = self.sphere_max();
        if !(0.0..=max).contains(&distance) {
            return Err(LshError::domain(format!(
                "{} distance {distance} outside [0, {max}] on the unit sphere",
                self.name()
            )));
        }
        Ok(match self {
            DistanceKind::Angular => distance,
            DistanceKind::EuclideanRaw => 2.0 * (distance / 2.0).asin(),
            DistanceKind::EuclideanNormalizedUnitSphere => 2.0 * distance.asin(),
        })
    }

    /// Inverse of [`DistanceKind::to_angle`].
    pub fn from_angle(self, alpha: f64) -> Result<f64> {
        check_angle(alpha)?;
        Ok(match self {
            DistanceKind::Angular => alpha,
            DistanceKind::EuclideanRaw => 2.0 * (alpha / 2.0).sin(),
            DistanceKind::EuclideanNormalizedUnitSphere => (alpha / 2.0).sin(),
        })
    }

    fn requires_unit_inputs(self) -> bool {
        !matches!(self, DistanceKind::EuclideanRaw)
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn check_angle(alpha: f64) -> Result<()> {
    if (0.0..=PI).contains(&alpha) {
        Ok(())
    } else {
        Err(LshError::domain(format!("angle {alpha} outside [0, pi]")))
    }
}

pub fn dot(x: &RealVector, y: &RealVector) -> Result<f64> {
    LshError::check_dim(x.dim(), y.dim())?;
    Ok(dot_slices(x.as_slice(), y.as_slice()))
}

#[inline]
pub(crate) fn dot_slices(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &RealVector) -> f64 {
    dot_slices(x.as_slice(), x.as_slice()).sqrt()
}

pub fn normalize(x: &RealVector) -> Result<RealVector> {
    let n = norm(x);
    if n == 0.0 {
        return Err(LshError::ZeroNorm);
    }
    Ok(RealVector(x.0.iter().map(|c| c / n).collect()))
}

/// Distance between `x` and `y` under `kind`.
///
/// Sphere-only kinds (`Angular`, `EuclideanNormalizedUnitSphere`) reject
/// inputs whose norm is further than [`UNIT_NORM_TOLERANCE`] from one.
pub fn distance(x: &RealVector, y: &RealVector, kind: DistanceKind) -> Result<f64> {
    LshError::check_dim(x.dim(), y.dim())?;
    if kind.requires_unit_inputs() {
        for (name, v) in [("x", x), ("y", y)] {
            if !v.is_unit() {
                return Err(LshError::domain(format!(
                    "{kind} distance needs unit vectors; ||{name}|| = {}",
                    v.norm()
                )));
            }
        }
    }
    Ok(match kind {
        DistanceKind::Angular => dot_slices(x.as_slice(), y.as_slice()).clamp(-1.0, 1.0).acos(),
        DistanceKind::EuclideanRaw => euclidean(x.as_slice(), y.as_slice()),
        DistanceKind::EuclideanNormalizedUnitSphere => euclidean(x.as_slice(), y.as_slice()) / 2.0,
    })
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn v(c: &[f64]) -> RealVector {
        RealVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(dot(&v(&[1.0, 2.0, 3.0]), &v(&[1.0, 2.0, 3.0])).unwrap(), 14.0);
        let col0 = v(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let x = v(&[0.0, 1.0, 0.0, 3.0, 0.5, 0.0, 1.0]);
        assert_eq!(dot(&x, &col0).unwrap(), 3.0);
    }

    #[test]
    fn dot_dimension_mismatch() {
        let err = dot(&v(&[1.0]), &v(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, LshError::Dimension { expected: 1, found: 2 }));
    }

    #[test]
    fn construction_rejects_bad_components() {
        assert!(RealVector::new(vec![]).is_err());
        assert!(RealVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(RealVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_and_normalize() {
        assert_eq!(norm(&v(&[3.0, 4.0])), 5.0);
        let n = normalize(&v(&[3.0, 4.0])).unwrap();
        assert!((n[0] - 0.6).abs() < 1e-15 && (n[1] - 0.8).abs() < 1e-15);
        assert!(matches!(normalize(&v(&[0.0, 0.0])), Err(LshError::ZeroNorm)));
    }

    #[test]
    fn distance_examples() {
        let u = v(&[1.0, 0.0]);
        assert_eq!(distance(&u, &u, DistanceKind::Angular).unwrap(), 0.0);
        let d = distance(&u, &v(&[0.0, 1.0]), DistanceKind::Angular).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        let d = distance(&u, &v(&[-1.0, 0.0]), DistanceKind::EuclideanNormalizedUnitSphere)
            .unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn sphere_kinds_reject_non_unit() {
        let a = v(&[2.0, 0.0]);
        let b = v(&[1.0, 0.0]);
        assert!(matches!(
            distance(&a, &b, DistanceKind::Angular),
            Err(LshError::Domain(_))
        ));
        assert!(matches!(
            distance(&a, &b, DistanceKind::EuclideanNormalizedUnitSphere),
            Err(LshError::Domain(_))
        ));
        assert_eq!(distance(&a, &b, DistanceKind::EuclideanRaw).unwrap(), 1.0);
    }

    #[test]
    fn clamp_absorbs_drift() {
        // Nearly identical unit vectors whose dot may exceed 1 by rounding.
        let x = normalize(&v(&[0.1, 0.2, 0.3, 0.4, 0.5])).unwrap();
        let d = distance(&x, &x, DistanceKind::Angular).unwrap();
        assert!(!d.is_nan());
        assert!(d < 1e-7);
    }

    #[test]
    fn angle_conversions_round_trip() {
        for kind in DistanceKind::ALL {
            for i in 0..=10 {
                let alpha = PI * f64::from(i) / 10.0;
                let d = kind.from_angle(alpha).unwrap();
                assert!((kind.to_angle(d).unwrap() - alpha).abs() < 1e-12);
            }
            assert!(kind.to_angle(-0.1).is_err());
            assert!(kind.to_angle(kind.sphere_max() + 1e-6).is_err());
        }
    }
}
