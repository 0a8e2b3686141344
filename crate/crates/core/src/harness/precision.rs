use crate::amplify::{
    collision_frequency, solve_parameters, AmplifiedScheme, SensitivityTarget, DEFAULT_B_MAX,
};
use crate::dataset::Dataset;
use crate::error::{LshError, Result};
use crate::families::{FamilyKind, MinhashFamily};
use crate::index::LshIndex;
use crate::seed::Seed;
use crate::vector::{DistanceKind, RealVector};

use super::data::{recall, GroundTruth};

/// Mean recall@k after consulting the first `b` tables, for `b = 0..=b_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionCurve {
    pub family: FamilyKind,
    pub r: u32,
    /// `recall[b]` with `recall[0] = 0`.
    pub recall: Vec<f64>,
    /// Standard error of each mean over queries.
    pub std_err: Vec<f64>,
    pub queries: usize,
}

impl PrecisionCurve {
    /// Least-squares slope of `recall[b] / recall[b_max]` against `b / b_max`
    /// over `b = 1..=b_max`. Curves with zero final recall have slope 0.
    pub fn normalized_slope(&self) -> f64 {
        let b_max = self.recall.len().saturating_sub(1);
        let last = self.recall.last().copied().unwrap_or(0.0);
        if b_max < 2 || last == 0.0 {
            return 0.0;
        }
        let pts: Vec<(f64, f64)> = (1..=b_max)
            .map(|b| (b as f64 / b_max as f64, self.recall[b] / last))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionConfig {
    pub families: Vec<FamilyKind>,
    pub target: SensitivityTarget,
    /// Pairs per base-probability estimate used to choose `r`.
    pub trials: u64,
    pub r_max: u32,
    pub b_max: u32,
    pub kind: DistanceKind,
    pub seed: Seed,
}

/// Recall of the index as tables are added, one curve per family. `r` is
/// the one solved for the target from estimated base probabilities (with
/// the default table bound); the first `b` of `b_max` nested tables are
/// used at step `b`.
pub fn precision_vs_tables(
    data: &Dataset,
    queries: &[RealVector],
    truth: &GroundTruth,
    config: &PrecisionConfig,
) -> Result<Vec<PrecisionCurve>> {
    config.target.validate()?;
    if truth.entries.len() != queries.len() {
        return Err(LshError::domain(format!(
            "ground truth covers {} queries, got {}",
            truth.entries.len(),
            queries.len()
        )));
    }
    if queries.is_empty() {
        return Err(LshError::domain("need at least one query"));
    }
    let dim = data
        .dim()
        .ok_or_else(|| LshError::domain("dataset is empty"))?;
    let t = &config.target;
    config
        .families
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let s = config.seed.derive(i as u64);
            let family = MinhashFamily::new(kind, dim, s.derive(0))?;
            let p1 = collision_frequency(&family, t.kind.to_angle(t.d1)?, config.trials, s.derive(1))?;
            let p2 = collision_frequency(&family, t.kind.to_angle(t.d2)?, config.trials, s.derive(2))?;
            let r = solve_parameters(p1.p_hat, p2.p_hat, t, config.r_max, DEFAULT_B_MAX)?.r;
            let scheme = AmplifiedScheme::new(r, config.b_max)?;
            let index = LshIndex::build(data, family, scheme, s.derive(3))?;
            let mut recall_sum = vec![0.0; config.b_max as usize + 1];
            let mut recall_sq = vec![0.0; config.b_max as usize + 1];
            for (q, e) in queries.iter().zip(&truth.entries) {
                for b in 1..=config.b_max as usize {
                    let (found, _) = index.query_knn_with_tables(q, truth.k, config.kind, b)?;
                    let rc = recall(&found, &e.neighbors);
                    recall_sum[b] += rc;
                    recall_sq[b] += rc * rc;
                }
            }
            let n = queries.len() as f64;
            let recall: Vec<f64> = recall_sum.iter().map(|s| s / n).collect();
            let std_err = recall_sq
                .iter()
                .zip(&recall)
                .map(|(sq, m)| ((sq / n - m * m).max(0.0) / n).sqrt())
                .collect();
            Ok(PrecisionCurve {
                family: kind,
                r,
                recall,
                std_err,
                queries: queries.len(),
            })
        })
        .collect()
}
