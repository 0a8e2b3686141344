//! CSV artifacts.
//!
//! Every file starts with a header row. Reals are written with 17
//! significant digits (`{:.16e}`), so parsing recovers the exact `f64`.
//! Rows follow the order of the input structures.
//!
//! | file | columns |
//! |------|---------|
//! | `collision_curve.csv` | family, distance_kind, distance, p_hat, std_err, trials, seed |
//! | `table1.csv` | family, r, b, total, p1_hat, p2_hat, p1_std_err, p2_std_err, trials, p1_amplified, p2_amplified, p1_validated, p1_validated_std_err, p2_validated, p2_validated_std_err, validation_trials |
//! | `precision_vs_b.csv` | family, r, b, recall, std_err, queries |
//! | `collision_vs_k.csv` | family, k, distance_kind, distance, p_hat, std_err, trials, seed |
//! | `opcounts.csv` | family, dim, additions, subtractions, multiplications, multiply_adds, comparisons, ns_per_hash |
//!
//! Empty cells in `table1.csv` mark infeasible families or skipped
//! validation. In `collision_vs_k.csv` the dense reference row has an empty
//! `k`.

use std::path::Path;
use std::str::FromStr;

use csv::{ReaderBuilder, StringRecord, Writer};

use crate::amplify::{AmplifiedScheme, Estimate};
use crate::error::{LshError, Result};
use crate::families::{parse_family_spec, FamilyKind};
use crate::ops::OpCounts;
use crate::seed::Seed;
use crate::vector::DistanceKind;

use super::bench::OpCountReport;
use super::curve::CollisionCurve;
use super::ksweep::KSweep;
use super::precision::PrecisionCurve;
use super::table1::Table1Row;

pub const CURVE_HEADER: [&str; 7] = ["family", "distance_kind", "distance", "p_hat", "std_err", "trials", "seed"];
pub const TABLE1_HEADER: [&str; 16] = [
    "family",
    "r",
    "b",
    "total",
    "p1_hat",
    "p2_hat",
    "p1_std_err",
    "p2_std_err",
    "trials",
    "p1_amplified",
    "p2_amplified",
    "p1_validated",
    "p1_validated_std_err",
    "p2_validated",
    "p2_validated_std_err",
    "validation_trials",
];
pub const PRECISION_HEADER: [&str; 6] = ["family", "r", "b", "recall", "std_err", "queries"];
pub const KSWEEP_HEADER: [&str; 8] = [
    "family",
    "k",
    "distance_kind",
    "distance",
    "p_hat",
    "std_err",
    "trials",
    "seed",
];
pub const OPCOUNT_HEADER: [&str; 8] = [
    "family",
    "dim",
    "additions",
    "subtractions",
    "multiplications",
    "multiply_adds",
    "comparisons",
    "ns_per_hash",
];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads data rows after checking the header.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<StringRecord>> {
    let mut r = ReaderBuilder::new().has_headers(true).from_path(path)?;
    let found = r.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(LshError::format(0, format!("unexpected header {found:?}")));
    }
    r.records().map(|rec| rec.map_err(LshError::from)).collect()
}

struct Row<'a> {
    rec: &'a StringRecord,
    header: &'a [&'a str],
}

impl Row<'_> {
    fn offset(&self) -> u64 {
        self.rec.position().map_or(0, |p| p.byte())
    }

    fn text(&self, col: usize) -> Result<&str> {
        self.rec
            .get(col)
            .ok_or_else(|| LshError::format(self.offset(), format!("missing column {}", self.header[col])))
    }

    fn parse<T: FromStr>(&self, col: usize) -> Result<T> {
        let s = self.text(col)?;
        s.parse().map_err(|_| {
            LshError::format(
                self.offset(),
                format!("bad {} value {s:?}", self.header[col]),
            )
        })
    }

    fn opt<T: FromStr>(&self, col: usize) -> Result<Option<T>> {
        if self.text(col)?.is_empty() {
            Ok(None)
        } else {
            self.parse(col).map(Some)
        }
    }

    fn family(&self, col: usize) -> Result<FamilyKind> {
        parse_family_spec(self.text(col)?).map_err(|e| LshError::format(self.offset(), e.to_string()))
    }

    fn kind(&self, col: usize) -> Result<DistanceKind> {
        DistanceKind::parse(self.text(col)?).map_err(|e| LshError::format(self.offset(), e.to_string()))
    }
}

pub fn write_curves_csv(curves: &[CollisionCurve], path: impl AsRef<Path>) -> Result<()> {
    let rows = curves.iter().flat_map(|c| {
        (0..c.len()).map(move |i| {
            vec![
                c.family.clone(),
                c.kind.name().to_string(),
                real(c.grid[i]),
                real(c.p_hat[i]),
                real(c.std_err[i]),
                c.trials.to_string(),
                c.seed.0.to_string(),
            ]
        })
    });
    write_rows(path.as_ref(), &CURVE_HEADER, rows)
}

/// Consecutive rows sharing family, kind, trials and seed form one curve.
pub fn read_curves_csv(path: impl AsRef<Path>) -> Result<Vec<CollisionCurve>> {
    let recs = read_rows(path.as_ref(), &CURVE_HEADER)?;
    let mut curves: Vec<CollisionCurve> = Vec::new();
    for rec in &recs {
        let row = Row { rec, header: &CURVE_HEADER };
        let family = row.text(0)?.to_string();
        let kind = row.kind(1)?;
        let trials: u64 = row.parse(5)?;
        let seed = Seed(row.parse(6)?);
        let same = curves
            .last()
            .is_some_and(|c| c.family == family && c.kind == kind && c.trials == trials && c.seed == seed);
        if !same {
            curves.push(CollisionCurve {
                kind,
                grid: Vec::new(),
                p_hat: Vec::new(),
                std_err: Vec::new(),
                trials,
                seed,
                family,
            });
        }
        let c = curves.last_mut().unwrap();
        c.grid.push(row.parse(2)?);
        c.p_hat.push(row.parse(3)?);
        c.std_err.push(row.parse(4)?);
    }
    Ok(curves)
}

pub fn write_table1_csv(rows: &[Table1Row], path: impl AsRef<Path>) -> Result<()> {
    let lines = rows.iter().map(|r| {
        let validation_trials = r.p1_validated.or(r.p2_validated).map(|e| e.trials);
        vec![
            r.family.to_string(),
            opt(r.scheme.map(|s| s.r)),
            opt(r.scheme.map(|s| s.b)),
            opt(r.total()),
            real(r.p1.p_hat),
            real(r.p2.p_hat),
            real(r.p1.std_err),
            real(r.p2.std_err),
            r.p1.trials.to_string(),
            opt_real(r.p1_amplified),
            opt_real(r.p2_amplified),
            opt_real(r.p1_validated.map(|e| e.p_hat)),
            opt_real(r.p1_validated.map(|e| e.std_err)),
            opt_real(r.p2_validated.map(|e| e.p_hat)),
            opt_real(r.p2_validated.map(|e| e.std_err)),
            opt(validation_trials),
        ]
    });
    write_rows(path.as_ref(), &TABLE1_HEADER, lines)
}

pub fn read_table1_csv(path: impl AsRef<Path>) -> Result<Vec<Table1Row>> {
    let recs = read_rows(path.as_ref(), &TABLE1_HEADER)?;
    recs.iter()
        .map(|rec| {
            let row = Row { rec, header: &TABLE1_HEADER };
            let trials = row.parse(8)?;
            let scheme = match (row.opt(1)?, row.opt(2)?) {
                (Some(r), Some(b)) => Some(
                    AmplifiedScheme::new(r, b).map_err(|e| LshError::format(row.offset(), e.to_string()))?,
                ),
                _ => None,
            };
            let vt: Option<u64> = row.opt(15)?;
            let validated = |p: usize, se: usize| -> Result<Option<Estimate>> {
                Ok(match (row.opt(p)?, row.opt(se)?, vt) {
                    (Some(p_hat), Some(std_err), Some(trials)) => Some(Estimate {
                        p_hat,
                        std_err,
                        trials,
                    }),
                    _ => None,
                })
            };
            Ok(Table1Row {
                family: row.family(0)?,
                p1: Estimate {
                    p_hat: row.parse(4)?,
                    std_err: row.parse(6)?,
                    trials,
                },
                p2: Estimate {
                    p_hat: row.parse(5)?,
                    std_err: row.parse(7)?,
                    trials,
                },
                scheme,
                p1_amplified: row.opt(9)?,
                p2_amplified: row.opt(10)?,
                p1_validated: validated(11, 12)?,
                p2_validated: validated(13, 14)?,
            })
        })
        .collect()
}

pub fn write_precision_csv(curves: &[PrecisionCurve], path: impl AsRef<Path>) -> Result<()> {
    let rows = curves.iter().flat_map(|c| {
        (0..c.recall.len()).map(move |b| {
            vec![
                c.family.to_string(),
                c.r.to_string(),
                b.to_string(),
                real(c.recall[b]),
                real(c.std_err[b]),
                c.queries.to_string(),
            ]
        })
    });
    write_rows(path.as_ref(), &PRECISION_HEADER, rows)
}

/// Rows of one family must be consecutive with `b` counting up from 0.
pub fn read_precision_csv(path: impl AsRef<Path>) -> Result<Vec<PrecisionCurve>> {
    let recs = read_rows(path.as_ref(), &PRECISION_HEADER)?;
    let mut curves: Vec<PrecisionCurve> = Vec::new();
    for rec in &recs {
        let row = Row { rec, header: &PRECISION_HEADER };
        let b: usize = row.parse(2)?;
        if b == 0 {
            curves.push(PrecisionCurve {
                family: row.family(0)?,
                r: row.parse(1)?,
                recall: Vec::new(),
                std_err: Vec::new(),
                queries: row.parse(5)?,
            });
        }
        let c = curves
            .last_mut()
            .filter(|c| c.recall.len() == b)
            .ok_or_else(|| LshError::format(row.offset(), format!("b={b} out of sequence")))?;
        c.recall.push(row.parse(3)?);
        c.std_err.push(row.parse(4)?);
    }
    Ok(curves)
}

pub fn write_ksweep_csv(sweep: &KSweep, path: impl AsRef<Path>) -> Result<()> {
    let row = |family: FamilyKind, k: Option<usize>, e: &Estimate| {
        vec![
            family.to_string(),
            opt(k),
            sweep.kind.name().to_string(),
            real(sweep.distance),
            real(e.p_hat),
            real(e.std_err),
            e.trials.to_string(),
            sweep.seed.0.to_string(),
        ]
    };
    let t = sweep.t;
    let rows = sweep
        .points
        .iter()
        .map(|(k, e)| row(FamilyKind::FeatureHashing { t, k: *k }, Some(*k), e))
        .chain(std::iter::once(row(FamilyKind::Voronoi { t }, None, &sweep.dense)));
    write_rows(path.as_ref(), &KSWEEP_HEADER, rows)
}

/// `dim` is not stored in the file and is passed back in.
pub fn read_ksweep_csv(path: impl AsRef<Path>, dim: usize) -> Result<KSweep> {
    let recs = read_rows(path.as_ref(), &KSWEEP_HEADER)?;
    let mut points = Vec::new();
    let mut dense = None;
    let mut meta = None;
    for rec in &recs {
        let row = Row { rec, header: &KSWEEP_HEADER };
        let e = Estimate {
            p_hat: row.parse(4)?,
            std_err: row.parse(5)?,
            trials: row.parse(6)?,
        };
        let t = match row.family(0)? {
            FamilyKind::FeatureHashing { t, .. } | FamilyKind::Voronoi { t } => t,
            other => return Err(LshError::format(row.offset(), format!("unexpected family {other}"))),
        };
        meta = Some((t, row.kind(2)?, row.parse::<f64>(3)?, Seed(row.parse(7)?)));
        match row.opt::<usize>(1)? {
            Some(k) => points.push((k, e)),
            None => dense = Some(e),
        }
    }
    let (t, kind, distance, seed) = meta.ok_or_else(|| LshError::format(0, "no data rows"))?;
    Ok(KSweep {
        dim,
        t,
        kind,
        distance,
        points,
        dense: dense.ok_or_else(|| LshError::format(0, "missing dense reference row"))?,
        seed,
    })
}

pub fn write_opcounts_csv(reports: &[OpCountReport], path: impl AsRef<Path>) -> Result<()> {
    let rows = reports.iter().map(|r| {
        vec![
            r.family.to_string(),
            r.dim.to_string(),
            r.counts.additions.to_string(),
            r.counts.subtractions.to_string(),
            r.counts.multiplications.to_string(),
            r.counts.multiply_adds.to_string(),
            r.counts.comparisons.to_string(),
            real(r.ns_per_hash),
        ]
    });
    write_rows(path.as_ref(), &OPCOUNT_HEADER, rows)
}

pub fn read_opcounts_csv(path: impl AsRef<Path>) -> Result<Vec<OpCountReport>> {
    let recs = read_rows(path.as_ref(), &OPCOUNT_HEADER)?;
    recs.iter()
        .map(|rec| {
            let row = Row { rec, header: &OPCOUNT_HEADER };
            Ok(OpCountReport {
                family: row.family(0)?,
                dim: row.parse(1)?,
                counts: OpCounts {
                    additions: row.parse(2)?,
                    subtractions: row.parse(3)?,
                    multiplications: row.parse(4)?,
                    multiply_adds: row.parse(5)?,
                    comparisons: row.parse(6)?,
                },
                ns_per_hash: row.parse(7)?,
            })
        })
        .collect()
}
