use rayon::prelude::*;

use crate::amplify::{
    collision_frequency, solve_parameters, AmplifiedScheme, Estimate, SensitivityTarget,
};
use crate::error::{LshError, Result};
use crate::families::{FamilyKind, MinhashFamily, MinhashFunction};
use crate::ops::NoCount;
use crate::sample::sample_pair_at_angle;
use crate::seed::Seed;

/// Independent scheme instances used by [`validate_scheme`]; trial `t` runs
/// on instance `t % VALIDATION_INSTANCES`.
pub const VALIDATION_INSTANCES: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Config {
    pub families: Vec<FamilyKind>,
    pub dim: usize,
    pub target: SensitivityTarget,
    /// Pairs per base-probability estimate.
    pub trials: u64,
    /// Pairs per amplified re-check; 0 skips the re-check.
    pub validation_trials: u64,
    pub r_max: u32,
    pub b_max: u32,
    pub seed: Seed,
}

impl Table1Config {
    /// The six families at d=128 with the 0.95 / 0.05 targets.
    pub fn desk_default(seed: Seed) -> Self {
        Table1Config {
            families: FamilyKind::table1_defaults().to_vec(),
            dim: 128,
            target: SensitivityTarget::table1(),
            trials: 100_000,
            validation_trials: 20_000,
            r_max: crate::amplify::DEFAULT_R_MAX,
            b_max: crate::amplify::DEFAULT_B_MAX,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        if self.dim == 0 || self.trials == 0 {
            return Err(LshError::domain("dim and trials must be at least 1"));
        }
        if self.r_max == 0 || self.b_max == 0 {
            return Err(LshError::domain("r_max and b_max must be at least 1"));
        }
        for f in &self.families {
            f.validate()?;
        }
        Ok(())
    }
}

/// One family's line of the table. `scheme` is `None` when no `(r, b)`
/// within the bounds meets the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub family: FamilyKind,
    pub p1: Estimate,
    pub p2: Estimate,
    pub scheme: Option<AmplifiedScheme>,
    /// Amplified probabilities predicted from the estimates.
    pub p1_amplified: Option<f64>,
    pub p2_amplified: Option<f64>,
    /// Amplified probabilities measured by direct simulation.
    pub p1_validated: Option<Estimate>,
    pub p2_validated: Option<Estimate>,
}

impl Table1Row {
    pub fn total(&self) -> Option<u64> {
        self.scheme.map(|s| s.total())
    }
}

/// Estimates each family's base probabilities at `d1` and `d2`, solves for
/// the cheapest scheme, and re-checks it by simulating the full AND/OR
/// construction on fresh functions and pairs.
pub fn table1_experiment(config: &Table1Config) -> Result<Vec<Table1Row>> {
    config.validate()?;
    let t = &config.target;
    let a1 = t.kind.to_angle(t.d1)?;
    let a2 = t.kind.to_angle(t.d2)?;
    config
        .families
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let s = config.seed.derive(i as u64);
            let family = MinhashFamily::new(kind, config.dim, s.derive(0))?;
            let p1 = collision_frequency(&family, a1, config.trials, s.derive(1))?;
            let p2 = collision_frequency(&family, a2, config.trials, s.derive(2))?;
            let mut row = Table1Row {
                family: kind,
                p1,
                p2,
                scheme: None,
                p1_amplified: None,
                p2_amplified: None,
                p1_validated: None,
                p2_validated: None,
            };
            let scheme = match solve_parameters(p1.p_hat, p2.p_hat, t, config.r_max, config.b_max)
            {
                Ok(scheme) => scheme,
                Err(LshError::Infeasible { .. }) => return Ok(row),
                Err(e) => return Err(e),
            };
            row.scheme = Some(scheme);
            row.p1_amplified = Some(scheme.probability(p1.p_hat)?);
            row.p2_amplified = Some(scheme.probability(p2.p_hat)?);
            if config.validation_trials > 0 {
                let fresh = MinhashFamily::new(kind, config.dim, s.derive(3))?;
                let n = config.validation_trials;
                row.p1_validated = Some(validate_scheme(&fresh, scheme, a1, n, s.derive(4))?);
                row.p2_validated = Some(validate_scheme(&fresh, scheme, a2, n, s.derive(5))?);
            }
            Ok(row)
        })
        .collect()
}

/// Fraction of pairs at angle `alpha` that share a bucket in at least one of
/// `b` tables of `r` minhashes each, simulated directly.
pub fn validate_scheme(
    family: &MinhashFamily,
    scheme: AmplifiedScheme,
    alpha: f64,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(LshError::domain("trials must be at least 1"));
    }
    let dim = family.input_dim();
    let r = scheme.r as usize;
    let instances = trials.min(VALIDATION_INSTANCES);
    let function_seed = seed.derive(0);
    let pair_seed = seed.derive(1);
    let mut hits = 0u64;
    // One instance at a time keeps only r*b dense functions alive.
    for inst in 0..instances {
        let base = function_seed.derive(inst);
        let functions: Vec<MinhashFunction> = (0..scheme.total())
            .into_par_iter()
            .map(|j| family.function(base.derive(j).0))
            .collect();
        let trial_ids: Vec<u64> = (inst..trials).step_by(instances as usize).collect();
        hits += trial_ids
            .into_par_iter()
            .map(|t| -> Result<u64> {
                let (u, v) = sample_pair_at_angle(dim, alpha, pair_seed.derive(t))?;
                let (u, v) = (u.as_slice(), v.as_slice());
                let collide = functions.chunks(r).any(|table| {
                    table
                        .iter()
                        .all(|f| f.hash_counted(u, &mut NoCount) == f.hash_counted(v, &mut NoCount))
                });
                Ok(u64::from(collide))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
    }
    Ok(Estimate::from_counts(hits, trials))
}
