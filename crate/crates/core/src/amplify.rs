//! Amplification: AND over `r` minhashes per table, OR over `b` tables.
//!
//! A pair colliding with probability `p` under one minhash collides in a
//! given table with probability `p^r` and in at least one of `b` tables with
//! probability `1 - (1 - p^r)^b`.

use rayon::prelude::*;

use crate::error::{LshError, Result};
use crate::families::{MinhashFamily, MinhashFunction};
use crate::harness::CollisionCurve;
use crate::sample::sample_pair_at_angle;
use crate::seed::Seed;
use crate::vector::DistanceKind;

pub const DEFAULT_R_MAX: u32 = 32;
pub const DEFAULT_B_MAX: u32 = 100_000;

/// Distinct minhash functions drawn per Monte Carlo estimate; trial `t` uses
/// function `t % FUNCTION_POOL`. Pairs are fresh for every trial.
pub const FUNCTION_POOL: usize = 256;

/// `H(d1, d2, p1, p2)`: collide with probability at least `p1_min` at distance
/// `d1` or less, and at most `p2_max` at distance `d2` or more.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityTarget {
    pub kind: DistanceKind,
    pub d1: f64,
    pub d2: f64,
    pub p1_min: f64,
    pub p2_max: f64,
}

impl SensitivityTarget {
    pub fn new(kind: DistanceKind, d1: f64, d2: f64, p1_min: f64, p2_max: f64) -> Result<Self> {
        let t = SensitivityTarget {
            kind,
            d1,
            d2,
            p1_min,
            p2_max,
        };
        t.validate()?;
        Ok(t)
    }

    /// Collide with probability 0.95 at chord distance 0.2 and 0.05 at 0.6.
    pub fn table1() -> Self {
        SensitivityTarget {
            kind: DistanceKind::EuclideanRaw,
            d1: 0.2,
            d2: 0.6,
            p1_min: 0.95,
            p2_max: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.p2_max && self.p2_max <= self.p1_min && self.p1_min < 1.0) {
            return Err(LshError::domain(format!(
                "targets need 0 < p2_max <= p1_min < 1, got p1_min={} p2_max={}",
                self.p1_min, self.p2_max
            )));
        }
        if !(self.d1 >= 0.0 && self.d1 < self.d2) {
            return Err(LshError::domain(format!(
                "targets need 0 <= d1 < d2, got d1={} d2={}",
                self.d1, self.d2
            )));
        }
        self.kind.to_angle(self.d1)?;
        self.kind.to_angle(self.d2)?;
        Ok(())
    }
}

/// `r` minhashes per table, `b` tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AmplifiedScheme {
    pub r: u32,
    pub b: u32,
}

impl AmplifiedScheme {
    pub fn new(r: u32, b: u32) -> Result<Self> {
        if r == 0 || b == 0 {
            return Err(LshError::domain(format!("r and b must be >= 1, got r={r} b={b}")));
        }
        Ok(AmplifiedScheme { r, b })
    }

    pub fn total(&self) -> u64 {
        u64::from(self.r) * u64::from(self.b)
    }

    pub fn probability(&self, p: f64) -> Result<f64> {
        amplified_probability(p, self.r, self.b)
    }
}

/// `1 - (1 - p^r)^b`, evaluated as `-expm1(b * ln1p(-p^r))`.
pub fn amplified_probability(p: f64, r: u32, b: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(LshError::domain(format!("probability {p} outside [0, 1]")));
    }
    if r == 0 || b == 0 {
        return Err(LshError::domain(format!("r and b must be >= 1, got r={r} b={b}")));
    }
    let q = if r == 1 { p } else { p.powf(f64::from(r)) };
    if b == 1 {
        return Ok(q);
    }
    Ok(-(f64::from(b) * (-q).ln_1p()).exp_m1())
}

/// Smallest `b` with `amplified_probability(p, r, b) >= p_min`, if any is
/// at most `b_max`.
fn min_tables(p: f64, r: u32, p_min: f64, b_max: u32) -> Option<u32> {
    let q = p.powf(f64::from(r));
    if q >= 1.0 {
        return Some(1);
    }
    if q <= 0.0 {
        return None;
    }
    let estimate = ((-p_min).ln_1p() / (-q).ln_1p()).ceil();
    if !estimate.is_finite() || estimate > f64::from(b_max) + 1.0 {
        return None;
    }
    let meets = |b: u32| amplified_probability(p, r, b).map_or(false, |a| a >= p_min);
    let mut b = (estimate as u32).max(1);
    // The closed form can be off by one in floating point; settle on the
    // exact boundary of the same function used to check the result.
    while b > 1 && meets(b - 1) {
        b -= 1;
    }
    while !meets(b) {
        if b >= b_max {
            return None;
        }
        b += 1;
    }
    (b <= b_max).then_some(b)
}

/// The scheme with the fewest total minhashes `r * b` meeting both targets,
/// ties broken by smaller `r`.
///
/// For each `r` the smallest `b` meeting the `p1` target is also the best
/// one for `p2`, because the amplified probability grows with `b`.
pub fn solve_parameters(
    p1: f64,
    p2: f64,
    target: &SensitivityTarget,
    r_max: u32,
    b_max: u32,
) -> Result<AmplifiedScheme> {
    if !((0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2) && p2 <= p1) {
        return Err(LshError::domain(format!(
            "base probabilities need 0 <= p2 <= p1 <= 1, got p1={p1} p2={p2}"
        )));
    }
    if r_max == 0 || b_max == 0 {
        return Err(LshError::domain("r_max and b_max must be >= 1"));
    }
    let mut best: Option<AmplifiedScheme> = None;
    for r in 1..=r_max {
        let Some(b) = min_tables(p1, r, target.p1_min, b_max) else {
            continue;
        };
        if amplified_probability(p2, r, b)? > target.p2_max {
            continue;
        }
        let candidate = AmplifiedScheme { r, b };
        if best.map_or(true, |s| candidate.total() < s.total()) {
            best = Some(candidate);
        }
    }
    best.ok_or(LshError::Infeasible { r_max, b_max })
}

/// A Monte Carlo probability estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let p_hat = hits as f64 / trials as f64;
        Estimate {
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Collision frequency of one minhash over `trials` random pairs at `distance`.
pub fn estimate_base_probability(
    family: &MinhashFamily,
    distance: f64,
    kind: DistanceKind,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    let alpha = kind.to_angle(distance)?;
    collision_frequency(family, alpha, trials, seed)
}

pub(crate) fn function_pool(family: &MinhashFamily, count: usize, seed: Seed) -> Vec<MinhashFunction> {
    let base = seed.derive(u64::MAX).0;
    (0..count as u64)
        .into_par_iter()
        .map(|i| family.function(base.wrapping_add(i)))
        .collect()
}

pub(crate) fn collision_frequency(
    family: &MinhashFamily,
    alpha: f64,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(LshError::domain("trials must be at least 1"));
    }
    let dim = family.input_dim();
    let pool = function_pool(family, (trials as usize).min(FUNCTION_POOL), seed);
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let (u, v) = sample_pair_at_angle(dim, alpha, seed.derive(t))?;
            let f = &pool[(t % pool.len() as u64) as usize];
            Ok(u64::from(f.hash(&u)? == f.hash(&v)?))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::from_counts(hits, trials))
}

/// Signed area between a collision curve and the neutral line `1 - d`, with
/// `d` the normalized Euclidean distance. Positive means the family collides
/// more than neutral (fewer false negatives, more false positives).
///
/// Grids in other distance kinds are converted first; the area covers the
/// span of the grid (trapezoid rule).
pub fn neutral_deviation(curve: &CollisionCurve) -> f64 {
    let norm = DistanceKind::EuclideanNormalizedUnitSphere;
    let xs: Vec<f64> = curve
        .grid
        .iter()
        .map(|&d| {
            let alpha = curve.kind.to_angle(d).unwrap_or(std::f64::consts::PI);
            norm.from_angle(alpha).unwrap_or(1.0)
        })
        .collect();
    let gap: Vec<f64> = xs
        .iter()
        .zip(&curve.p_hat)
        .map(|(x, p)| p - (1.0 - x))
        .collect();
    xs.windows(2)
        .zip(gap.windows(2))
        .map(|(x, g)| 0.5 * (x[1] - x[0]) * (g[0] + g[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyKind;
    use rand::Rng;

    #[test]
    fn amplified_edges() {
        for (r, b) in [(1, 1), (3, 7), (20, 10_000)] {
            assert_eq!(amplified_probability(1.0, r, b).unwrap(), 1.0);
            assert_eq!(amplified_probability(0.0, r, b).unwrap(), 0.0);
        }
        for p in [0.0, 0.1, 0.37, 0.95, 1.0] {
            assert_eq!(amplified_probability(p, 1, 1).unwrap(), p);
        }
        assert!(amplified_probability(1.5, 1, 1).is_err());
        assert!(amplified_probability(0.5, 0, 1).is_err());
        assert!(amplified_probability(0.5, 1, 0).is_err());
    }

    #[test]
    fn amplified_matches_bernoulli_simulation() {
        // Independent oracle: simulate r x b Bernoulli(p) draws per trial.
        let mut rng = Seed(1).rng();
        let trials = 1_000_000;
        let hits = (0..trials)
            .filter(|_| (0..3).any(|_| (0..2).all(|_| rng.random::<f64>() < 0.5)))
            .count();
        let sim = hits as f64 / trials as f64;
        let exact = amplified_probability(0.5, 2, 3).unwrap();
        assert!((exact - 0.578125).abs() < 1e-12);
        assert!((sim - exact).abs() < 0.002, "{sim}");
    }

    #[test]
    fn amplified_is_stable_for_tiny_p() {
        // Naive evaluation loses everything below 1e-16.
        let a = amplified_probability(1e-6, 3, 1000).unwrap();
        assert!((a - 1e-15).abs() < 1e-24, "{a}");
    }

    #[test]
    fn amplified_monotonicity_scan() {
        let grid: Vec<f64> = (1..20).map(|i| f64::from(i) / 20.0).collect();
        for &p in &grid {
            for r in 1..6 {
                for b in 1..12 {
                    let a = amplified_probability(p, r, b).unwrap();
                    assert!(amplified_probability(p, r, b + 1).unwrap() >= a);
                    assert!(amplified_probability(p, r + 1, b).unwrap() <= a);
                    assert!(amplified_probability((p + 0.01).min(1.0), r, b).unwrap() >= a);
                }
            }
        }
    }

    #[test]
    fn solver_already_satisfied() {
        let t = SensitivityTarget::table1();
        let s = solve_parameters(0.96, 0.04, &t, DEFAULT_R_MAX, DEFAULT_B_MAX).unwrap();
        assert_eq!(s, AmplifiedScheme { r: 1, b: 1 });
    }

    #[test]
    fn solver_equal_probabilities_infeasible() {
        let t = SensitivityTarget::table1();
        for p in [0.1, 0.5, 0.9] {
            assert!(matches!(
                solve_parameters(p, p, &t, DEFAULT_R_MAX, DEFAULT_B_MAX),
                Err(LshError::Infeasible { .. })
            ));
        }
        assert!(solve_parameters(0.2, 0.8, &t, 10, 10).is_err());
    }

    fn brute_force(p1: f64, p2: f64, t1: f64, t2: f64, r_max: u32, b_max: u32) -> Option<u64> {
        let amp = |p: f64, r: u32, b: u32| 1.0 - (1.0 - p.powi(r as i32)).powi(b as i32);
        let mut best: Option<u64> = None;
        for r in 1..=r_max {
            for b in 1..=b_max {
                let total = u64::from(r * b);
                if best.is_some_and(|x| total >= x) {
                    break;
                }
                if amp(p1, r, b) >= t1 && amp(p2, r, b) <= t2 {
                    best = Some(total);
                    break;
                }
            }
        }
        best
    }

    #[test]
    fn solver_matches_exhaustive_search_example() {
        let t = SensitivityTarget::table1();
        let s = solve_parameters(0.8, 0.2, &t, 20, 10_000).unwrap();
        assert_eq!(Some(s.total()), brute_force(0.8, 0.2, 0.95, 0.05, 20, 10_000));
        assert!(s.probability(0.8).unwrap() >= 0.95);
        assert!(s.probability(0.2).unwrap() <= 0.05);
    }

    #[test]
    fn target_validation() {
        let k = DistanceKind::EuclideanRaw;
        assert!(SensitivityTarget::new(k, 0.2, 0.6, 0.95, 0.05).is_ok());
        assert!(SensitivityTarget::new(k, 0.6, 0.2, 0.95, 0.05).is_err());
        assert!(SensitivityTarget::new(k, 0.2, 0.6, 0.05, 0.95).is_err());
        assert!(SensitivityTarget::new(k, 0.2, 2.5, 0.95, 0.05).is_err());
        assert!(AmplifiedScheme::new(0, 3).is_err());
    }

    #[test]
    fn estimate_hyperplane_one_bit_right_angle() {
        let f = MinhashFamily::new(FamilyKind::Hyperplane { bits: 1 }, 128, Seed(5)).unwrap();
        let e = estimate_base_probability(
            &f,
            std::f64::consts::FRAC_PI_2,
            DistanceKind::Angular,
            100_000,
            Seed(6),
        )
        .unwrap();
        assert!((e.p_hat - 0.5).abs() < 0.005, "{e:?}");
        assert!((e.std_err - (0.25f64 / 100_000.0).sqrt()).abs() < 1e-5);
    }

    #[test]
    fn estimate_at_distance_zero_is_one() {
        for kind in FamilyKind::table1_defaults() {
            let f = MinhashFamily::new(kind, 32, Seed(1)).unwrap();
            let e = estimate_base_probability(&f, 0.0, DistanceKind::EuclideanRaw, 500, Seed(2))
                .unwrap();
            assert_eq!(e.p_hat, 1.0);
            assert_eq!(e.std_err, 0.0);
        }
    }

    #[test]
    fn estimate_is_deterministic() {
        let f = MinhashFamily::new(FamilyKind::FeatureHashing { t: 16, k: 1 }, 32, Seed(1)).unwrap();
        let a = estimate_base_probability(&f, 0.5, DistanceKind::Angular, 3000, Seed(9)).unwrap();
        let b = estimate_base_probability(&f, 0.5, DistanceKind::Angular, 3000, Seed(9)).unwrap();
        assert_eq!(a, b);
        assert!(estimate_base_probability(&f, 0.5, DistanceKind::Angular, 0, Seed(9)).is_err());
    }

    fn analytic_curve(values: impl Fn(f64) -> f64, points: usize) -> CollisionCurve {
        let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let p_hat = grid.iter().map(|&d| values(d)).collect();
        CollisionCurve {
            kind: DistanceKind::EuclideanNormalizedUnitSphere,
            std_err: vec![0.0; points],
            grid,
            p_hat,
            trials: 0,
            seed: Seed(0),
            family: String::new(),
        }
    }

    #[test]
    fn neutral_deviation_examples() {
        assert!(neutral_deviation(&analytic_curve(|d| 1.0 - d, 21)).abs() < 1e-15);
        assert!((neutral_deviation(&analytic_curve(|_| 1.0, 21)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn neutral_deviation_hyperplane_six_bits() {
        let hp = |d: f64| (1.0 - 2.0 * d.asin() / std::f64::consts::PI).powi(6);
        // Oracle: midpoint rule on a fine grid.
        let n = 200_000;
        let oracle: f64 = (0..n)
            .map(|i| {
                let d = (i as f64 + 0.5) / n as f64;
                hp(d) - (1.0 - d)
            })
            .sum::<f64>()
            / n as f64;
        let got = neutral_deviation(&analytic_curve(hp, 2001));
        assert!(got < 0.0);
        assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
    }
}
