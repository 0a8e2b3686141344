//! Seeded Johnson-Lindenstrauss projections from `R^d` to `R^d'`.
//!
//! Three kinds share the [`Projection`] trait so that the generic argmax and
//! sign minhashes can run on any of them:
//!
//! * [`DenseProjection`] with i.i.d. standard normal entries (Voronoi,
//!   cross-polytope) or equiprobable `+-1` entries (hyperplanes);
//! * [`SparseSignedProjection`], feature hashing: every input dimension `i`
//!   sends its value to `k` targets `h(i, j)` with signs `s(i, j)`;
//! * [`ExplicitFhMapping`], the same structure with caller-supplied hashes.
//!
//! Feature hashing is evaluated lazily from the seed. For slot `j` of input
//! dimension `i` the 64-bit word `combine(combine(seed, i), j)` is computed
//! with the SplitMix64 mixer; its low 32 bits modulo `d'` give the target and
//! bit 63 gives the sign (set means `-1`). The modulo bias is below
//! `d' / 2^32` and is ignored. Slots of the same row that land on the same
//! target are summed, so materialized entries range over `[-k, k]`.
//!
//! Outputs are not rescaled: feature hashing inflates squared norms by `k`
//! on average, which does not matter to argmax or sign hashes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{LshError, Result};
use crate::ops::{NoCount, OpCounter};
use crate::sample::sample_unit_vector;
use crate::seed::{combine, Seed};
use crate::vector::{dot_slices, RealVector};

/// A linear map `x -> x * M` with `M` of shape `rows x cols`.
pub trait Projection: Send + Sync {
    fn rows(&self) -> usize;

    fn cols(&self) -> usize;

    /// Writes `x * M` into `out`, reporting every arithmetic operation on data
    /// values to `ops`. `out` must have length `cols()`; it is overwritten.
    fn project_into<C: OpCounter>(&self, x: &[f64], out: &mut [f64], ops: &mut C);

    /// The matrix written out densely, for tests and inspection.
    fn to_dense(&self) -> DenseProjection;

    fn apply(&self, x: &RealVector) -> Result<RealVector> {
        LshError::check_dim(self.rows(), x.dim())?;
        let mut out = vec![0.0; self.cols()];
        self.project_into(x.as_slice(), &mut out, &mut NoCount);
        RealVector::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseKind {
    Gaussian,
    SignBernoulli,
    /// Entries supplied by the caller or materialized from another projection.
    Explicit,
}

/// Row-major dense projection matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseProjection {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    kind: DenseKind,
    seed: Option<Seed>,
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(LshError::domain(format!(
            "projection shape {rows}x{cols} must be at least 1x1"
        )));
    }
    Ok(())
}

/// Dense projection with i.i.d. standard normal entries.
pub fn make_gaussian(rows: usize, cols: usize, seed: Seed) -> Result<DenseProjection> {
    check_shape(rows, cols)?;
    let mut rng = seed.rng();
    let entries = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(DenseProjection {
        rows,
        cols,
        entries,
        kind: DenseKind::Gaussian,
        seed: Some(seed),
    })
}

/// Dense projection with equiprobable `+1` / `-1` entries.
pub fn make_sign_dense(rows: usize, cols: usize, seed: Seed) -> Result<DenseProjection> {
    check_shape(rows, cols)?;
    let mut rng = seed.rng();
    let entries = (0..rows * cols)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    Ok(DenseProjection {
        rows,
        cols,
        entries,
        kind: DenseKind::SignBernoulli,
        seed: Some(seed),
    })
}

impl DenseProjection {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(LshError::Dimension {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(LshError::domain("projection entries must be finite"));
        }
        Ok(DenseProjection {
            rows,
            cols,
            entries,
            kind: DenseKind::Explicit,
            seed: None,
        })
    }

    pub fn kind(&self) -> DenseKind {
        self.kind
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.entry(r, col)).collect()
    }

    /// The `rows x 2*cols` matrix `[M | -M]`.
    pub fn concat_negated(&self) -> DenseProjection {
        let mut entries = Vec::with_capacity(self.entries.len() * 2);
        for row in self.entries.chunks_exact(self.cols) {
            entries.extend_from_slice(row);
            entries.extend(row.iter().map(|e| -e));
        }
        DenseProjection {
            rows: self.rows,
            cols: 2 * self.cols,
            entries,
            kind: DenseKind::Explicit,
            seed: None,
        }
    }
}

impl Projection for DenseProjection {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn project_into<C: OpCounter>(&self, x: &[f64], out: &mut [f64], ops: &mut C) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        let rows = self.entries.chunks_exact(self.cols);
        match self.kind {
            DenseKind::SignBernoulli => {
                // +-1 entries need no multiplication.
                for (&xi, row) in x.iter().zip(rows) {
                    for (acc, &e) in out.iter_mut().zip(row) {
                        if e > 0.0 {
                            *acc += xi;
                            ops.add();
                        } else {
                            *acc -= xi;
                            ops.sub();
                        }
                    }
                }
            }
            DenseKind::Gaussian | DenseKind::Explicit => {
                for (&xi, row) in x.iter().zip(rows) {
                    for (acc, &e) in out.iter_mut().zip(row) {
                        *acc += xi * e;
                        ops.mul_add();
                    }
                }
            }
        }
    }

    fn to_dense(&self) -> DenseProjection {
        self.clone()
    }
}

/// Lazily evaluated feature-hashing projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseSignedProjection {
    rows: usize,
    cols: usize,
    k: usize,
    seed: Seed,
}

/// Feature-hashing projection with `k` signed targets per input dimension.
pub fn make_feature_hashing(
    rows: usize,
    cols: usize,
    k: usize,
    seed: Seed,
) -> Result<SparseSignedProjection> {
    check_shape(rows, cols)?;
    if k == 0 {
        return Err(LshError::domain("feature hashing needs k >= 1"));
    }
    if cols > u32::MAX as usize {
        return Err(LshError::domain("feature hashing output dimension must fit 32 bits"));
    }
    Ok(SparseSignedProjection {
        rows,
        cols,
        k,
        seed,
    })
}

impl SparseSignedProjection {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Target column and sign (`true` = negative) of slot `slot` in row `row`.
    #[inline]
    pub fn entry(&self, row: usize, slot: usize) -> (usize, bool) {
        let h = combine(combine(self.seed.0, row as u64), slot as u64);
        let target = (h & 0xffff_ffff) as usize % self.cols;
        (target, h >> 63 == 1)
    }

    /// Materializes the hash values as an explicit mapping.
    pub fn mapping(&self) -> ExplicitFhMapping {
        let entries = (0..self.rows)
            .flat_map(|i| (0..self.k).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (t, neg) = self.entry(i, j);
                (t as u32, neg)
            })
            .collect();
        ExplicitFhMapping {
            rows: self.rows,
            cols: self.cols,
            k: self.k,
            entries,
        }
    }
}

impl Projection for SparseSignedProjection {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn project_into<C: OpCounter>(&self, x: &[f64], out: &mut [f64], ops: &mut C) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            for j in 0..self.k {
                let (t, neg) = self.entry(i, j);
                signed_accumulate(&mut out[t], xi, neg, ops);
            }
        }
    }

    fn to_dense(&self) -> DenseProjection {
        self.mapping().to_dense()
    }
}

#[inline(always)]
fn signed_accumulate<C: OpCounter>(acc: &mut f64, xi: f64, negative: bool, ops: &mut C) {
    if negative {
        *acc -= xi;
        ops.sub();
    } else {
        *acc += xi;
        ops.add();
    }
}

/// Feature-hashing projection with caller-supplied target and sign tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitFhMapping {
    rows: usize,
    cols: usize,
    k: usize,
    /// Row-major `rows x k` (target, negative) pairs.
    entries: Vec<(u32, bool)>,
}

impl ExplicitFhMapping {
    /// One `(target, sign)` list per input dimension; every list must have the
    /// same length `k >= 1`. Signs must be `+1` or `-1`.
    pub fn new(cols: usize, rows: &[Vec<(usize, i8)>]) -> Result<Self> {
        check_shape(rows.len(), cols)?;
        let k = rows[0].len();
        if k == 0 {
            return Err(LshError::domain("feature hashing needs k >= 1"));
        }
        let mut entries = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(LshError::domain(format!(
                    "row {i} has {} slots, expected {k}",
                    row.len()
                )));
            }
            for &(t, s) in row {
                if t >= cols {
                    return Err(LshError::domain(format!(
                        "row {i}: target {t} outside [0, {cols})"
                    )));
                }
                let neg = match s {
                    1 => false,
                    -1 => true,
                    other => {
                        return Err(LshError::domain(format!(
                            "row {i}: sign {other} is not +1 or -1"
                        )))
                    }
                };
                entries.push((t as u32, neg));
            }
        }
        Ok(ExplicitFhMapping {
            rows: rows.len(),
            cols,
            k,
            entries,
        })
    }

    /// Single-hash (`k = 1`) mapping from parallel target and sign tables.
    pub fn single(cols: usize, targets: &[usize], signs: &[i8]) -> Result<Self> {
        if targets.len() != signs.len() {
            return Err(LshError::Dimension {
                expected: targets.len(),
                found: signs.len(),
            });
        }
        let rows: Vec<Vec<(usize, i8)>> = targets
            .iter()
            .zip(signs)
            .map(|(&t, &s)| vec![(t, s)])
            .collect();
        Self::new(cols, &rows)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Target column and sign (`true` = negative) of slot `slot` in row `row`.
    pub fn entry(&self, row: usize, slot: usize) -> (usize, bool) {
        let (t, neg) = self.entries[row * self.k + slot];
        (t as usize, neg)
    }
}

impl Projection for ExplicitFhMapping {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn project_into<C: OpCounter>(&self, x: &[f64], out: &mut [f64], ops: &mut C) {
        debug_assert_eq!(x.len(), self.rows);
        out.fill(0.0);
        for (&xi, slots) in x.iter().zip(self.entries.chunks_exact(self.k)) {
            for &(t, neg) in slots {
                signed_accumulate(&mut out[t as usize], xi, neg, ops);
            }
        }
    }

    fn to_dense(&self) -> DenseProjection {
        let mut entries = vec![0.0; self.rows * self.cols];
        for (i, slots) in self.entries.chunks_exact(self.k).enumerate() {
            for &(t, neg) in slots {
                entries[i * self.cols + t as usize] += if neg { -1.0 } else { 1.0 };
            }
        }
        DenseProjection {
            rows: self.rows,
            cols: self.cols,
            entries,
            kind: DenseKind::Explicit,
            seed: None,
        }
    }
}

/// Applies a caller-supplied feature-hashing table to `x`.
pub fn apply_with_mapping(mapping: &ExplicitFhMapping, x: &RealVector) -> Result<RealVector> {
    mapping.apply(x)
}

/// Mean of `||x M||^2 / ||x||^2` over `trials` fresh random unit vectors and
/// fresh feature-hashing projections. Its expectation is `k`.
pub fn fh_norm_scale_estimate(
    rows: usize,
    cols: usize,
    k: usize,
    seed: Seed,
    trials: usize,
) -> Result<f64> {
    if trials == 0 {
        return Err(LshError::domain("trials must be at least 1"));
    }
    make_feature_hashing(rows, cols, k, seed)?;
    let ratios = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let v = sample_unit_vector(rows, seed.derive(2 * t))?;
            let p = make_feature_hashing(rows, cols, k, seed.derive(2 * t + 1))?;
            let w = p.apply(&v)?;
            let n2 = dot_slices(v.as_slice(), v.as_slice());
            Ok(dot_slices(w.as_slice(), w.as_slice()) / n2)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.iter().sum::<f64>() / trials as f64)
}

/// Writes the non-zero entries of a materialized projection as `row,col,value`.
pub fn write_projection_csv<P: Projection>(projection: &P, path: impl AsRef<Path>) -> Result<()> {
    let dense = projection.to_dense();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "row,col,value")?;
    for r in 0..dense.rows {
        for c in 0..dense.cols {
            let v = dense.entry(r, c);
            if v != 0.0 {
                writeln!(out, "{r},{c},{v:?}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
