use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{LshError, Result};
use crate::index::{sort_neighbors, Neighbor};
use crate::sample::{sample_at_angle_from, sample_unit_vector};
use crate::seed::Seed;
use crate::vector::{distance, DistanceKind, RealVector};

use super::vecs::{read_bvecs, read_fvecs};

/// Synthetic unit-sphere data.
///
/// With `clusters == 0` points and queries are uniform on the sphere.
/// Otherwise `clusters` uniform centers each receive an equal share of the
/// points, placed at an angle drawn uniformly from `[0, spread]` around the
/// center in a uniform direction. Queries are drawn the same way around
/// centers chosen round-robin, but only up to `spread / 2`, so their nearest
/// neighbours are members of their own cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub queries: usize,
    pub dim: usize,
    pub clusters: usize,
    /// Angular radius of a cluster, radians.
    pub spread: f64,
}

impl SyntheticSpec {
    /// 10^4 uniform points and 100 queries in 128 dimensions.
    pub fn desk_default() -> Self {
        SyntheticSpec {
            n: 10_000,
            queries: 100,
            dim: 128,
            clusters: 0,
            spread: 0.15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(LshError::domain("dim must be at least 1"));
        }
        if self.clusters > 0 && self.clusters > self.n {
            return Err(LshError::domain(format!(
                "{} clusters need at least as many points, got {}",
                self.clusters, self.n
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.spread) {
            return Err(LshError::domain(format!("spread {} outside [0, pi]", self.spread)));
        }
        Ok(())
    }
}

/// Generates `(dataset, queries)`; dataset ids are `0..n`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: Seed) -> Result<(Dataset, Vec<RealVector>)> {
    spec.validate()?;
    let point_seed = seed.derive(1);
    let query_seed = seed.derive(2);
    if spec.clusters == 0 {
        let pts = (0..spec.n as u64)
            .into_par_iter()
            .map(|i| sample_unit_vector(spec.dim, point_seed.derive(i)))
            .collect::<Result<Vec<_>>>()?;
        let qs = (0..spec.queries as u64)
            .into_par_iter()
            .map(|i| sample_unit_vector(spec.dim, query_seed.derive(i)))
            .collect::<Result<Vec<_>>>()?;
        return Ok((Dataset::from_vectors(pts)?, qs));
    }
    let center_seed = seed.derive(0);
    let centers = (0..spec.clusters as u64)
        .map(|c| sample_unit_vector(spec.dim, center_seed.derive(c)))
        .collect::<Result<Vec<_>>>()?;
    let around = |center: &RealVector, max_angle: f64, s: Seed| {
        let alpha = s.derive(0).rng().random::<f64>() * max_angle;
        sample_at_angle_from(center, alpha, s.derive(1))
    };
    let pts = (0..spec.n)
        .into_par_iter()
        .map(|i| around(&centers[i % spec.clusters], spec.spread, point_seed.derive(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let qs = (0..spec.queries)
        .into_par_iter()
        .map(|i| {
            around(
                &centers[i % spec.clusters],
                spec.spread / 2.0,
                query_seed.derive(i as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Dataset::from_vectors(pts)?, qs))
}

/// Loads an `.fvecs` or `.bvecs` file (chosen by extension) as a dataset with
/// ids `0..n`, optionally scaled to unit norm.
pub fn load_vectors(path: impl AsRef<Path>, normalize: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let vectors = match path.extension().and_then(|e| e.to_str()) {
        Some("fvecs") => read_fvecs(path)?,
        Some("bvecs") => read_bvecs(path)?,
        _ => {
            return Err(LshError::Usage(format!(
                "{}: expected a .fvecs or .bvecs file",
                path.display()
            )))
        }
    };
    let data = Dataset::from_vectors(vectors)?;
    if normalize {
        data.normalized()
    } else {
        Ok(data)
    }
}

/// Where experiment vectors come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic { spec: SyntheticSpec, seed: Seed },
    Files {
        base: PathBuf,
        queries: PathBuf,
        normalize: bool,
    },
}

impl DataSource {
    pub fn load(&self) -> Result<(Dataset, Vec<RealVector>)> {
        match self {
            DataSource::Synthetic { spec, seed } => generate_synthetic(spec, *seed),
            DataSource::Files {
                base,
                queries,
                normalize,
            } => {
                let data = load_vectors(base, *normalize)?;
                let (_, qs) = load_vectors(queries, *normalize)?.into_parts();
                if let (Some(d), Some(q)) = (data.dim(), qs.first()) {
                    LshError::check_dim(d, q.dim())?;
                }
                Ok((data, qs))
            }
        }
    }
}

/// Exact k nearest neighbours of each query, found by exhaustive scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub k: usize,
    pub entries: Vec<TruthEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthEntry {
    pub query_id: u64,
    pub neighbors: Vec<Neighbor>,
}

/// Query `i` gets id `i`. Fewer than `k` neighbours are stored only when the
/// dataset itself is smaller than `k`.
pub fn compute_ground_truth(
    data: &Dataset,
    queries: &[RealVector],
    k: usize,
    kind: DistanceKind,
) -> Result<GroundTruth> {
    if k == 0 {
        return Err(LshError::domain("k must be at least 1"));
    }
    let entries = queries
        .par_iter()
        .enumerate()
        .map(|(qi, q)| {
            let mut all = data
                .iter()
                .map(|(id, v)| {
                    Ok(Neighbor {
                        id,
                        distance: distance(q, v, kind)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sort_neighbors(&mut all);
            all.truncate(k);
            Ok(TruthEntry {
                query_id: qi as u64,
                neighbors: all,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth { k, entries })
}

/// Fraction of `truth` ids present in `found`.
pub fn recall(found: &[Neighbor], truth: &[Neighbor]) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let hits = truth
        .iter()
        .filter(|t| found.iter().any(|f| f.id == t.id))
        .count();
    hits as f64 / truth.len() as f64
}

const TRUTH_MAGIC: &[u8; 8] = b"JLSHGT01";

impl GroundTruth {
    /// Binary cache layout, little-endian:
    /// magic `JLSHGT01`, `k: u32`, `count: u64`, then per query
    /// `query_id: u64`, `k` neighbour ids `u64`, `k` distances `f64`.
    /// Entries with fewer than `k` neighbours cannot be stored.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(TRUTH_MAGIC)?;
        out.write_all(&(self.k as u32).to_le_bytes())?;
        out.write_all(&(self.entries.len() as u64).to_le_bytes())?;
        for e in &self.entries {
            if e.neighbors.len() != self.k {
                return Err(LshError::domain(format!(
                    "query {} has {} neighbours, cache needs {}",
                    e.query_id,
                    e.neighbors.len(),
                    self.k
                )));
            }
            out.write_all(&e.query_id.to_le_bytes())?;
            for n in &e.neighbors {
                out.write_all(&n.id.to_le_bytes())?;
            }
            for n in &e.neighbors {
                out.write_all(&n.distance.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = fs::read(path)?;
        let mut pos = 0usize;
        let mut take = |n: usize, what: &str| -> Result<&[u8]> {
            let s = bytes
                .get(pos..pos + n)
                .ok_or_else(|| LshError::format(pos as u64, format!("truncated {what}")))?;
            pos += n;
            Ok(s)
        };
        if take(8, "magic")? != TRUTH_MAGIC {
            return Err(LshError::format(0, "not a ground-truth cache (bad magic)"));
        }
        let k = u32::from_le_bytes(take(4, "k")?.try_into().unwrap()) as usize;
        let count = u64::from_le_bytes(take(8, "count")?.try_into().unwrap());
        let u64_at = |s: &[u8], i: usize| u64::from_le_bytes(s[8 * i..8 * i + 8].try_into().unwrap());
        let mut entries = Vec::new();
        for _ in 0..count {
            let query_id = u64::from_le_bytes(take(8, "query id")?.try_into().unwrap());
            let ids = take(8 * k, "neighbour ids")?.to_vec();
            let dists = take(8 * k, "neighbour distances")?;
            let neighbors = (0..k)
                .map(|i| Neighbor {
                    id: u64_at(&ids, i),
                    distance: f64::from_bits(u64_at(dists, i)),
                })
                .collect();
            entries.push(TruthEntry {
                query_id,
                neighbors,
            });
        }
        if pos != bytes.len() {
            return Err(LshError::format(pos as u64, "trailing bytes after ground truth"));
        }
        Ok(GroundTruth { k, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustered_queries_sit_inside_their_cluster() {
        let spec = SyntheticSpec {
            n: 400,
            queries: 8,
            dim: 32,
            clusters: 4,
            spread: 0.15,
        };
        let (data, qs) = generate_synthetic(&spec, Seed(5)).unwrap();
        assert_eq!(data.len(), 400);
        assert!(data.vectors().iter().all(RealVector::is_unit));
        let truth = compute_ground_truth(&data, &qs, 10, DistanceKind::Angular).unwrap();
        for e in &truth.entries {
            let cluster = e.query_id % 4;
            for n in &e.neighbors {
                assert_eq!(n.id % 4, cluster);
                assert!(n.distance < 0.15 * 1.5);
            }
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec {
            n: 50,
            queries: 3,
            dim: 8,
            clusters: 5,
            spread: 0.3,
        };
        let a = generate_synthetic(&spec, Seed(1)).unwrap();
        let b = generate_synthetic(&spec, Seed(1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_synthetic(&spec, Seed(2)).unwrap());
    }

    #[test]
    fn truth_cache_round_trip() {
        let spec = SyntheticSpec {
            n: 100,
            queries: 5,
            dim: 6,
            clusters: 0,
            spread: 0.0,
        };
        let (data, qs) = generate_synthetic(&spec, Seed(3)).unwrap();
        let truth = compute_ground_truth(&data, &qs, 10, DistanceKind::EuclideanRaw).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gt.bin");
        truth.write(&path).unwrap();
        assert_eq!(GroundTruth::read(&path).unwrap(), truth);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(GroundTruth::read(&path), Err(LshError::Format { .. })));
    }

    #[test]
    fn truth_is_exhaustive_and_sorted() {
        let spec = SyntheticSpec {
            n: 60,
            queries: 4,
            dim: 5,
            clusters: 0,
            spread: 0.0,
        };
        let (data, qs) = generate_synthetic(&spec, Seed(9)).unwrap();
        let truth = compute_ground_truth(&data, &qs, 3, DistanceKind::Angular).unwrap();
        for (e, q) in truth.entries.iter().zip(&qs) {
            let mut d: Vec<f64> = data
                .vectors()
                .iter()
                .map(|v| distance(q, v, DistanceKind::Angular).unwrap())
                .collect();
            d.sort_by(f64::total_cmp);
            let got: Vec<f64> = e.neighbors.iter().map(|n| n.distance).collect();
            assert_eq!(got, d[..3]);
        }
    }

    #[test]
    fn recall_counts_overlap() {
        let n = |id| Neighbor { id, distance: 0.0 };
        assert_eq!(recall(&[n(1), n(2)], &[n(2), n(3)]), 0.5);
        assert_eq!(recall(&[], &[n(1)]), 0.0);
        assert_eq!(recall(&[], &[]), 1.0);
    }
}
