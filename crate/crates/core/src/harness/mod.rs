//! Experiments: collision curves, the amplification table, recall as tables
//! are added, collision rate against `k`, operation counts, and the data
//! plumbing they share (synthetic data, fvecs/bvecs, ground truth, CSV).
//!
//! Every experiment is a pure function of its inputs and seed. Per-unit
//! seeds are derived from the experiment seed and the unit's index, so the
//! results do not depend on the number of threads.

mod bench;
mod csvio;
mod curve;
mod data;
mod ksweep;
mod precision;
mod table1;
mod vecs;

pub use bench::{op_count_benchmark, OpCountReport};
pub use csvio::*;
pub use curve::{
    default_grid, estimate_collision_curve, isotonic_nonincreasing, monotonicity_check,
    uniform_grid, CollisionCurve, MonotonicityCheck,
};
pub use data::{
    compute_ground_truth, generate_synthetic, load_vectors, recall, DataSource, GroundTruth,
    SyntheticSpec, TruthEntry,
};
pub use ksweep::{collision_vs_k, KSweep};
pub use precision::{precision_vs_tables, PrecisionConfig, PrecisionCurve};
pub use table1::{table1_experiment, validate_scheme, Table1Config, Table1Row, VALIDATION_INSTANCES};
pub use vecs::{parse_bvecs, parse_fvecs, read_bvecs, read_fvecs, write_fvecs};
