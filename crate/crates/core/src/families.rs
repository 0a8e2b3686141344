//! Minhash families for the angular distance.
//!
//! Every family is one of two generic constructions applied to a random
//! projection `P` from `d` to `d'` dimensions:
//!
//! * argmax: `h(x) = argmax_i <p_i, x>` over the columns `p_i` of `P`;
//! * sign: bit `i` of `h(x)` is set when `<p_i, x> >= 0`.
//!
//! Cross-polytope hashing is the argmax construction over `[P | -P]`, which
//! is the same as picking the index and sign of the largest-magnitude
//! coordinate. Its value is encoded as `2 * index + (1 if negative)`.
//!
//! | kind                    | projection                          | hash          | range   |
//! |-------------------------|-------------------------------------|---------------|---------|
//! | `Hyperplane(bits)`      | dense +-1, `d x bits`               | sign          | 2^bits  |
//! | `Voronoi(T)`            | Gaussian, `d x T`                   | argmax        | T       |
//! | `CrossPolytope(T)`      | Gaussian, `d x T`                   | cross-polytope| 2T      |
//! | `FeatureHashing(T, k)`  | feature hashing, `d x T`            | argmax        | T       |
//! | `DirectionalFh(bits, k)`| feature hashing, `d x bits`         | sign          | 2^bits  |
//! | `FastCrossPolytope(m,T,k)` | feature hashing `d x m`, then Gaussian `m x T` | cross-polytope | 2T |
//!
//! Ties in argmax and max-abs go to the lowest index; `sign(0)` counts as
//! positive. Each minhash index `i` builds its projections from
//! `seed.derive(i)`, so a family holds as many independent minhashes as
//! there are `u64` values.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{LshError, Result};
use crate::ops::{NoCount, OpCounter};
use crate::projections::{
    make_feature_hashing, make_gaussian, make_sign_dense, DenseProjection, Projection,
    ExplicitFhMapping,
};
use crate::seed::Seed;
use crate::vector::{check_angle, RealVector};

pub const DEFAULT_T: usize = 64;
pub const DEFAULT_BITS: u32 = 6;
pub const DEFAULT_K: usize = 1;
pub const MAX_BITS: u32 = 62;

/// A bucket id in `[0, m)` where `m` is the family's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinhashValue(pub u64);

impl MinhashValue {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// A minhash family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Hyperplane { bits: u32 },
    Voronoi { t: usize },
    CrossPolytope { t: usize },
    FeatureHashing { t: usize, k: usize },
    DirectionalFh { bits: u32, k: usize },
    /// `m` is the intermediate feature-hashing dimension; `None` means
    /// `min(d, 4T)`, resolved when the family is bound to a dimension.
    FastCrossPolytope { m: Option<usize>, t: usize, k: usize },
}

impl FamilyKind {
    /// The six families with the parameterizations used for the Table 1 study.
    pub fn table1_defaults() -> [FamilyKind; 6] {
        [
            FamilyKind::Voronoi { t: DEFAULT_T },
            FamilyKind::CrossPolytope { t: DEFAULT_T },
            FamilyKind::Hyperplane { bits: DEFAULT_BITS },
            FamilyKind::FeatureHashing {
                t: DEFAULT_T,
                k: DEFAULT_K,
            },
            FamilyKind::FastCrossPolytope {
                m: None,
                t: DEFAULT_T,
                k: DEFAULT_K,
            },
            FamilyKind::DirectionalFh {
                bits: DEFAULT_BITS,
                k: DEFAULT_K,
            },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LshError::domain(msg));
        match *self {
            FamilyKind::Hyperplane { bits } | FamilyKind::DirectionalFh { bits, .. }
                if !(1..=MAX_BITS).contains(&bits) =>
            {
                bad(format!("bits must be in [1, {MAX_BITS}], got {bits}"))
            }
            FamilyKind::Voronoi { t }
            | FamilyKind::CrossPolytope { t }
            | FamilyKind::FeatureHashing { t, .. }
            | FamilyKind::FastCrossPolytope { t, .. }
                if t < 2 =>
            {
                bad(format!("T must be at least 2, got {t}"))
            }
            FamilyKind::FeatureHashing { k: 0, .. }
            | FamilyKind::DirectionalFh { k: 0, .. }
            | FamilyKind::FastCrossPolytope { k: 0, .. } => bad("k must be at least 1".into()),
            FamilyKind::FastCrossPolytope { m: Some(0), .. } => bad("m must be at least 1".into()),
            _ => Ok(()),
        }
    }

    /// Bucket count `m` of a single minhash.
    pub fn range(&self) -> u64 {
        match *self {
            FamilyKind::Hyperplane { bits } | FamilyKind::DirectionalFh { bits, .. } => 1u64 << bits,
            FamilyKind::Voronoi { t } | FamilyKind::FeatureHashing { t, .. } => t as u64,
            FamilyKind::CrossPolytope { t } | FamilyKind::FastCrossPolytope { t, .. } => {
                2 * t as u64
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Hyperplane { .. } => "hyperplane",
            FamilyKind::Voronoi { .. } => "voronoi",
            FamilyKind::CrossPolytope { .. } => "crosspolytope",
            FamilyKind::FeatureHashing { .. } => "fh",
            FamilyKind::DirectionalFh { .. } => "dfh",
            FamilyKind::FastCrossPolytope { .. } => "fastcp",
        }
    }

    /// Human-readable label in the style of the published tables.
    pub fn label(&self) -> String {
        match *self {
            FamilyKind::Hyperplane { bits } => format!("Hyperplane (bits={bits})"),
            FamilyKind::Voronoi { t } => format!("Voronoi LSH (T={t})"),
            FamilyKind::CrossPolytope { t } => format!("Cross Polytope (T={t})"),
            FamilyKind::FeatureHashing { t, k } => format!("Feature Hashing (T={t},k={k})"),
            FamilyKind::DirectionalFh { bits, k } => {
                format!("Directional Feature Hashing (bits={bits},k={k})")
            }
            FamilyKind::FastCrossPolytope { t, k, .. } => {
                format!("Fast Cross Polytope (T={t},k={k})")
            }
        }
    }

    fn with_resolved_m(self, input_dim: usize) -> FamilyKind {
        match self {
            FamilyKind::FastCrossPolytope { m: None, t, k } => FamilyKind::FastCrossPolytope {
                m: Some(input_dim.min(4 * t)),
                t,
                k,
            },
            other => other,
        }
    }
}

impl fmt::Display for FamilyKind {
    /// Formats in the `name:key=val,...` grammar accepted by [`parse_family_spec`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilyKind::Hyperplane { bits } => write!(f, "hyperplane:bits={bits}"),
            FamilyKind::Voronoi { t } => write!(f, "voronoi:T={t}"),
            FamilyKind::CrossPolytope { t } => write!(f, "crosspolytope:T={t}"),
            FamilyKind::FeatureHashing { t, k } => write!(f, "fh:T={t},k={k}"),
            FamilyKind::DirectionalFh { bits, k } => write!(f, "dfh:bits={bits},k={k}"),
            FamilyKind::FastCrossPolytope { m, t, k } => {
                write!(f, "fastcp:T={t},k={k}")?;
                if let Some(m) = m {
                    write!(f, ",m={m}")?;
                }
                Ok(())
            }
        }
    }
}

const FAMILY_NAMES: &str = "hyperplane, voronoi, crosspolytope, fh, dfh, fastcp";

/// Parses `name[:key=val[,key=val]*]`.
///
/// Omitted keys take the defaults `T=64`, `bits=6`, `k=1` and, for
/// `fastcp`, `m = min(d, 4T)` once the dimension is known.
pub fn parse_family_spec(text: &str) -> Result<FamilyKind> {
    let text = text.trim();
    let (name, params) = match text.split_once(':') {
        Some((n, p)) => (n.trim(), p.trim()),
        None => (text, ""),
    };
    let allowed: &[&str] = match name {
        "hyperplane" => &["bits"],
        "voronoi" | "crosspolytope" => &["T"],
        "fh" => &["T", "k"],
        "dfh" => &["bits", "k"],
        "fastcp" => &["T", "k", "m"],
        other => {
            return Err(LshError::Usage(format!(
                "unknown family '{other}' (valid: {FAMILY_NAMES})"
            )))
        }
    };
    let mut t = DEFAULT_T;
    let mut bits = DEFAULT_BITS as u64;
    let mut k = DEFAULT_K;
    let mut m = None;
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = pair.split_once('=').ok_or_else(|| {
            LshError::Usage(format!("expected key=value in family spec, got '{pair}'"))
        })?;
        let key = match key.trim() {
            "t" => "T",
            other => other,
        };
        if !allowed.contains(&key) {
            return Err(LshError::Usage(format!(
                "unknown key '{key}' for family '{name}' (valid: {})",
                allowed.join(", ")
            )));
        }
        let val: u64 = val.trim().parse().map_err(|_| {
            LshError::Usage(format!("value of '{key}' must be a non-negative integer, got '{val}'"))
        })?;
        match key {
            "T" => t = val as usize,
            "bits" => bits = val,
            "k" => k = val as usize,
            "m" => m = Some(val as usize),
            _ => unreachable!(),
        }
    }
    let bits = u32::try_from(bits).unwrap_or(u32::MAX);
    let kind = match name {
        "hyperplane" => FamilyKind::Hyperplane { bits },
        "voronoi" => FamilyKind::Voronoi { t },
        "crosspolytope" => FamilyKind::CrossPolytope { t },
        "fh" => FamilyKind::FeatureHashing { t, k },
        "dfh" => FamilyKind::DirectionalFh { bits, k },
        "fastcp" => FamilyKind::FastCrossPolytope { m, t, k },
        _ => unreachable!(),
    };
    kind.validate().map_err(|e| match e {
        LshError::Domain(msg) => LshError::Usage(format!("family '{text}': {msg}")),
        other => other,
    })?;
    Ok(kind)
}

impl FromStr for FamilyKind {
    type Err = LshError;

    fn from_str(s: &str) -> Result<Self> {
        parse_family_spec(s)
    }
}

/// A seeded family of minhash functions over `R^input_dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinhashFamily {
    kind: FamilyKind,
    input_dim: usize,
    seed: Seed,
}

impl MinhashFamily {
    pub fn new(kind: FamilyKind, input_dim: usize, seed: Seed) -> Result<Self> {
        kind.validate()?;
        if input_dim == 0 {
            return Err(LshError::domain("input dimension must be at least 1"));
        }
        Ok(MinhashFamily {
            kind: kind.with_resolved_m(input_dim),
            input_dim,
            seed,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn range(&self) -> u64 {
        self.kind.range()
    }

    /// Minhash number `index` of the family, with its projections materialized.
    pub fn function(&self, index: u64) -> MinhashFunction {
        let s = self.seed.derive(index);
        let d = self.input_dim;
        // Shapes were validated in `new`, so construction cannot fail.
        let built = match self.kind {
            FamilyKind::Hyperplane { bits } => {
                make_sign_dense(d, bits as usize, s).map(MinhashFunction::Hyperplane)
            }
            FamilyKind::Voronoi { t } => make_gaussian(d, t, s).map(MinhashFunction::Voronoi),
            FamilyKind::CrossPolytope { t } => {
                make_gaussian(d, t, s).map(MinhashFunction::CrossPolytope)
            }
            FamilyKind::FeatureHashing { t, k } => make_feature_hashing(d, t, k, s)
                .map(|p| MinhashFunction::FeatureHashing(p.mapping())),
            FamilyKind::DirectionalFh { bits, k } => make_feature_hashing(d, bits as usize, k, s)
                .map(|p| MinhashFunction::DirectionalFh(p.mapping())),
            FamilyKind::FastCrossPolytope { m, t, k } => {
                let m = m.unwrap_or_else(|| d.min(4 * t));
                make_feature_hashing(d, m, k, s.derive(0)).and_then(|fh| {
                    Ok(MinhashFunction::FastCrossPolytope {
                        reduce: fh.mapping(),
                        rotate: make_gaussian(m, t, s.derive(1))?,
                    })
                })
            }
        };
        built.expect("family parameters validated at construction")
    }

    pub fn hash(&self, index: u64, x: &RealVector) -> Result<MinhashValue> {
        LshError::check_dim(self.input_dim, x.dim())?;
        self.function(index).hash(x)
    }

    /// Plain-text `key=value` descriptor: `family=<spec> dim=<d> seed=<s>`.
    pub fn descriptor(&self) -> String {
        format!("family={} dim={} seed={}", self.kind, self.input_dim, self.seed.0)
    }

    pub fn from_descriptor(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut dim = None;
        let mut seed = None;
        for token in text.split_whitespace() {
            let (key, val) = token.split_once('=').ok_or_else(|| {
                LshError::Usage(format!("malformed descriptor token '{token}'"))
            })?;
            let num = || {
                val.parse::<u64>()
                    .map_err(|_| LshError::Usage(format!("'{key}' must be an integer, got '{val}'")))
            };
            match key {
                "family" => kind = Some(parse_family_spec(val)?),
                "dim" => dim = Some(num()? as usize),
                "seed" => seed = Some(Seed(num()?)),
                other => {
                    return Err(LshError::Usage(format!("unknown descriptor key '{other}'")))
                }
            }
        }
        match (kind, dim, seed) {
            (Some(k), Some(d), Some(s)) => MinhashFamily::new(k, d, s),
            _ => Err(LshError::Usage(format!(
                "descriptor '{text}' needs family, dim and seed"
            ))),
        }
    }
}

/// One materialized minhash function. Feature-hashing targets and signs are
/// tabulated once here rather than rehashed on every evaluation.
#[derive(Debug, Clone)]
pub enum MinhashFunction {
    Hyperplane(DenseProjection),
    Voronoi(DenseProjection),
    CrossPolytope(DenseProjection),
    FeatureHashing(ExplicitFhMapping),
    DirectionalFh(ExplicitFhMapping),
    FastCrossPolytope {
        reduce: ExplicitFhMapping,
        rotate: DenseProjection,
    },
}

impl MinhashFunction {
    pub fn input_dim(&self) -> usize {
        match self {
            MinhashFunction::Hyperplane(p)
            | MinhashFunction::Voronoi(p)
            | MinhashFunction::CrossPolytope(p) => p.rows(),
            MinhashFunction::FeatureHashing(p) | MinhashFunction::DirectionalFh(p) => p.rows(),
            MinhashFunction::FastCrossPolytope { reduce, .. } => reduce.rows(),
        }
    }

    pub fn hash(&self, x: &RealVector) -> Result<MinhashValue> {
        LshError::check_dim(self.input_dim(), x.dim())?;
        Ok(MinhashValue(self.hash_counted(x.as_slice(), &mut NoCount)))
    }

    /// Hashes `x` (of length `input_dim()`), reporting arithmetic to `ops`.
    pub fn hash_counted<C: OpCounter>(&self, x: &[f64], ops: &mut C) -> u64 {
        match self {
            MinhashFunction::Hyperplane(p) => sign_bits(&project(p, x, ops), ops),
            MinhashFunction::Voronoi(p) => argmax_index(&project(p, x, ops), ops) as u64,
            MinhashFunction::CrossPolytope(p) => cross_polytope_vertex(&project(p, x, ops), ops),
            MinhashFunction::FeatureHashing(p) => argmax_index(&project(p, x, ops), ops) as u64,
            MinhashFunction::DirectionalFh(p) => sign_bits(&project(p, x, ops), ops),
            MinhashFunction::FastCrossPolytope { reduce, rotate } => {
                let reduced = project(reduce, x, ops);
                cross_polytope_vertex(&project(rotate, &reduced, ops), ops)
            }
        }
    }
}

fn project<P: Projection, C: OpCounter>(p: &P, x: &[f64], ops: &mut C) -> Vec<f64> {
    let mut out = vec![0.0; p.cols()];
    p.project_into(x, &mut out, ops);
    out
}

/// Index of the largest entry, lowest index on ties.
fn argmax_index<C: OpCounter>(w: &[f64], ops: &mut C) -> usize {
    let mut best = 0;
    for i in 1..w.len() {
        ops.cmp();
        if w[i] > w[best] {
            best = i;
        }
    }
    best
}

/// Bit `i` set when `w[i] >= 0`.
fn sign_bits<C: OpCounter>(w: &[f64], ops: &mut C) -> u64 {
    debug_assert!(w.len() <= 64);
    let mut bits = 0u64;
    for (i, &wi) in w.iter().enumerate() {
        ops.cmp();
        if wi >= 0.0 {
            bits |= 1 << i;
        }
    }
    bits
}

/// `2 * i + neg` for the largest-magnitude entry `i`, lowest index on ties.
fn cross_polytope_vertex<C: OpCounter>(w: &[f64], ops: &mut C) -> u64 {
    let mut best = 0;
    for i in 1..w.len() {
        ops.cmp();
        if w[i].abs() > w[best].abs() {
            best = i;
        }
    }
    ops.cmp();
    2 * best as u64 + u64::from(w[best] < 0.0)
}

/// Argmax minhash of an already projected vector.
pub fn argmax_of(projected: &[f64]) -> MinhashValue {
    MinhashValue(argmax_index(projected, &mut NoCount) as u64)
}

/// Sign minhash of an already projected vector (at most 64 components).
pub fn sign_of(projected: &[f64]) -> MinhashValue {
    assert!(projected.len() <= 64, "sign hashes hold at most 64 bits");
    MinhashValue(sign_bits(projected, &mut NoCount))
}

/// Cross-polytope minhash of an already projected vector.
pub fn cross_polytope_of(projected: &[f64]) -> MinhashValue {
    MinhashValue(cross_polytope_vertex(projected, &mut NoCount))
}

fn projected<P: Projection>(p: &P, x: &RealVector) -> Result<Vec<f64>> {
    LshError::check_dim(p.rows(), x.dim())?;
    Ok(project(p, x.as_slice(), &mut NoCount))
}

/// `argmax_i <p_i, x>` over the columns of `p`.
pub fn argmax_hash<P: Projection>(p: &P, x: &RealVector) -> Result<MinhashValue> {
    Ok(argmax_of(&projected(p, x)?))
}

/// Bit `i` = `[<p_i, x> >= 0]` over the columns of `p`; needs `cols <= 64`.
pub fn sign_hash<P: Projection>(p: &P, x: &RealVector) -> Result<MinhashValue> {
    if p.cols() > 64 {
        return Err(LshError::domain(format!(
            "sign hash over {} columns does not fit 64 bits",
            p.cols()
        )));
    }
    Ok(sign_of(&projected(p, x)?))
}

/// Nearest cross-polytope vertex of `x * P`, encoded as `2 * index + negative`.
pub fn cross_polytope_hash<P: Projection>(p: &P, x: &RealVector) -> Result<MinhashValue> {
    Ok(cross_polytope_of(&projected(p, x)?))
}

pub fn family_hash(family: &MinhashFamily, index: u64, x: &RealVector) -> Result<MinhashValue> {
    family.hash(index, x)
}

pub fn family_range(family: &MinhashFamily) -> u64 {
    family.range()
}

/// Collision probability `(1 - alpha/pi)^bits` of a `bits`-bit hyperplane hash.
pub fn hyperplane_collision_prob(alpha: f64, bits: u32) -> Result<f64> {
    check_angle(alpha)?;
    if bits == 0 {
        return Err(LshError::domain("bits must be at least 1"));
    }
    Ok((1.0 - alpha / PI).powi(bits as i32))
}
