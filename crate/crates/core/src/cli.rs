//! The `jl-lsh` command line.
//!
//! Every subcommand takes `--seed`, `--out`, `--threads` and `--config`.
//! A config file holds one `flag-name = value` pair per line (`#` starts a
//! comment); keys are long flag names without the dashes, switches take
//! `true` or `false`, and repeatable flags may appear on several lines.
//! Flags given on the command line override the file, which overrides the
//! built-in defaults.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data, format and
//! I/O errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::amplify::{
    amplified_probability, estimate_base_probability, solve_parameters, AmplifiedScheme,
    SensitivityTarget, DEFAULT_B_MAX, DEFAULT_R_MAX,
};
use crate::error::{LshError, Result};
use crate::families::{parse_family_spec, FamilyKind, MinhashFamily};
use crate::harness::{
    collision_vs_k, compute_ground_truth, estimate_collision_curve, load_vectors,
    op_count_benchmark, precision_vs_tables, table1_experiment, uniform_grid, write_curves_csv,
    write_fvecs, write_ksweep_csv, write_opcounts_csv, write_precision_csv, write_table1_csv,
    DataSource, GroundTruth, PrecisionConfig, SyntheticSpec, Table1Config,
};
use crate::index::{load_snapshot, save_snapshot, LshIndex};
use crate::seed::Seed;
use crate::vector::DistanceKind;

#[derive(Debug, Parser)]
#[command(
    name = "jl-lsh",
    version,
    about = "LSH families for the angular distance: experiments, index building and queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for all randomness (required by experiment commands).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, or a directory to receive the command's default file name.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Key-value file of flag defaults; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TargetArgs {
    /// Distance at or below which pairs should collide.
    #[arg(long, default_value_t = 0.2)]
    d1: f64,
    /// Distance at or above which pairs should not collide.
    #[arg(long, default_value_t = 0.6)]
    d2: f64,
    /// Required amplified collision probability at d1.
    #[arg(long, default_value_t = 0.95)]
    target_p1: f64,
    /// Allowed amplified collision probability at d2.
    #[arg(long, default_value_t = 0.05)]
    target_p2: f64,
    /// Measure for d1 and d2: angular, euclidean or euclidean-normalized.
    #[arg(long, default_value = "euclidean")]
    distance_kind: String,
    /// Largest minhashes per table considered.
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    r_max: u32,
    /// Largest number of tables considered.
    #[arg(long, default_value_t = DEFAULT_B_MAX)]
    b_max: u32,
}

impl TargetArgs {
    fn target(&self) -> Result<SensitivityTarget> {
        SensitivityTarget::new(
            parse_kind(&self.distance_kind)?,
            self.d1,
            self.d2,
            self.target_p1,
            self.target_p2,
        )
        .map_err(usage)
    }
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Base vectors (.fvecs or .bvecs). Synthetic data is generated when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Query vectors (.fvecs or .bvecs) to go with --data.
    #[arg(long)]
    queries_file: Option<PathBuf>,
    /// Keep file vectors as stored instead of scaling them to unit norm.
    #[arg(long)]
    no_normalize: bool,
    /// Synthetic point count.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Synthetic query count.
    #[arg(long, default_value_t = 100)]
    queries: usize,
    /// Synthetic dimension.
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Synthetic cluster count; 0 for uniform points.
    #[arg(long, default_value_t = 0)]
    clusters: usize,
    /// Angular radius of a synthetic cluster, radians.
    #[arg(long, default_value_t = 0.15)]
    spread: f64,
}

impl DataArgs {
    fn source(&self, seed: Seed) -> Result<DataSource> {
        match (&self.data, &self.queries_file) {
            (Some(base), Some(queries)) => Ok(DataSource::Files {
                base: base.clone(),
                queries: queries.clone(),
                normalize: !self.no_normalize,
            }),
            (Some(base), None) => Ok(DataSource::Files {
                base: base.clone(),
                queries: base.clone(),
                normalize: !self.no_normalize,
            }),
            (None, Some(_)) => Err(LshError::Usage("--queries-file needs --data".into())),
            (None, None) => Ok(DataSource::Synthetic {
                spec: SyntheticSpec {
                    n: self.n,
                    queries: self.queries,
                    dim: self.dim,
                    clusters: self.clusters,
                    spread: self.spread,
                },
                seed,
            }),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write synthetic unit vectors as base.fvecs and queries.fvecs under --out.
    GenData {
        #[command(flatten)]
        common: Common,
        /// Number of base vectors.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Number of query vectors.
        #[arg(long, default_value_t = 100)]
        queries: usize,
        /// Vector dimension.
        #[arg(long, default_value_t = 128)]
        dim: usize,
        /// Cluster count; 0 for uniform points.
        #[arg(long, default_value_t = 0)]
        clusters: usize,
        /// Angular radius of a cluster, radians.
        #[arg(long, default_value_t = 0.15)]
        spread: f64,
        /// Draw a fresh seed instead of requiring --seed; it is printed.
        #[arg(long)]
        random: bool,
    },
    /// Estimate single-minhash collision probability over a distance grid.
    CollisionCurve {
        #[command(flatten)]
        common: Common,
        /// Family spec such as voronoi:T=64 (repeatable; default: all six).
        #[arg(long, action = ArgAction::Append)]
        family: Vec<String>,
        /// Input dimension.
        #[arg(long, default_value_t = 128)]
        dim: usize,
        /// Pairs per grid point.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Grid points spread uniformly over the distance range.
        #[arg(long, default_value_t = 21)]
        grid_points: usize,
        /// Grid measure: angular, euclidean or euclidean-normalized.
        #[arg(long, default_value = "euclidean-normalized")]
        distance_kind: String,
    },
    /// Cheapest (r, b) turning base probabilities p1, p2 into the targets.
    SolveParams {
        #[command(flatten)]
        common: Common,
        /// Base collision probability at d1.
        #[arg(long)]
        p1: Option<f64>,
        /// Base collision probability at d2.
        #[arg(long)]
        p2: Option<f64>,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Estimate base probabilities, solve (r, b) and re-check each family.
    Table1 {
        #[command(flatten)]
        common: Common,
        /// Family spec (repeatable; default: all six).
        #[arg(long, action = ArgAction::Append)]
        family: Vec<String>,
        /// Input dimension.
        #[arg(long, default_value_t = 128)]
        dim: usize,
        /// Pairs per base-probability estimate.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Pairs per amplified re-check (0 skips it).
        #[arg(long, default_value_t = 20_000)]
        validation_trials: u64,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Build an index and save its snapshot.
    BuildIndex {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Family spec.
        #[arg(long, default_value = "fh")]
        family: String,
        /// Minhashes per table (solved from the targets when absent).
        #[arg(long)]
        r: Option<u32>,
        /// Number of tables (solved from the targets when absent).
        #[arg(long)]
        b: Option<u32>,
        /// Pairs per base-probability estimate when solving (r, b).
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Nearest neighbours of each query vector from a saved index.
    Query {
        #[command(flatten)]
        common: Common,
        /// Index snapshot written by build-index.
        #[arg(long)]
        index: Option<PathBuf>,
        /// Query vectors (.fvecs or .bvecs).
        #[arg(long)]
        vector_file: Option<PathBuf>,
        /// Neighbours per query.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Ranking measure: angular, euclidean or euclidean-normalized.
        #[arg(long, default_value = "euclidean")]
        distance_kind: String,
        /// Keep query vectors as stored instead of scaling them to unit norm.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Recall@k as tables are added, per family.
    PrecisionCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        /// Family spec (repeatable; default: all six).
        #[arg(long, action = ArgAction::Append)]
        family: Vec<String>,
        /// Tables in the index; recall is reported for b = 0..=tables.
        #[arg(long, default_value_t = 20)]
        tables: u32,
        /// Neighbours per query.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Pairs per base-probability estimate used to choose r.
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        /// Ground-truth cache: read if present, otherwise computed and written.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Feature-hashing collision rate at one distance as k grows.
    KSweep {
        #[command(flatten)]
        common: Common,
        /// Input dimension.
        #[arg(long, default_value_t = 128)]
        dim: usize,
        /// Projected dimension T.
        #[arg(long, default_value_t = 16)]
        t: usize,
        /// Comma-separated ascending k values.
        #[arg(long, default_value = "1,2,4,8,16,32,64")]
        k_list: String,
        /// Distance of every pair.
        #[arg(long, default_value_t = 0.5)]
        distance: f64,
        /// Measure of --distance: angular, euclidean or euclidean-normalized.
        #[arg(long, default_value = "euclidean-normalized")]
        distance_kind: String,
        /// Pairs per k.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Exact operation counts and timing per minhash evaluation.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Family spec (repeatable; default: all six).
        #[arg(long, action = ArgAction::Append)]
        family: Vec<String>,
        /// Input dimension.
        #[arg(long, default_value_t = 128)]
        dim: usize,
        /// Timed hash evaluations per family.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Summarize a saved index: parameters and bucket occupancy.
    InspectIndex {
        #[command(flatten)]
        common: Common,
        /// Index snapshot written by build-index.
        #[arg(long)]
        index: Option<PathBuf>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::GenData { common, .. }
            | Command::CollisionCurve { common, .. }
            | Command::SolveParams { common, .. }
            | Command::Table1 { common, .. }
            | Command::BuildIndex { common, .. }
            | Command::Query { common, .. }
            | Command::PrecisionCurve { common, .. }
            | Command::KSweep { common, .. }
            | Command::Bench { common, .. }
            | Command::InspectIndex { common, .. } => common,
        }
    }
}

fn usage(e: LshError) -> LshError {
    match e {
        LshError::Domain(m) => LshError::Usage(m),
        other => other,
    }
}

fn parse_kind(text: &str) -> Result<DistanceKind> {
    DistanceKind::parse(text)
}

fn parse_families(specs: &[String]) -> Result<Vec<FamilyKind>> {
    if specs.is_empty() {
        return Ok(FamilyKind::table1_defaults().to_vec());
    }
    specs.iter().map(|s| parse_family_spec(s)).collect()
}

fn require_seed(common: &Common) -> Result<Seed> {
    common
        .seed
        .map(Seed)
        .ok_or_else(|| LshError::Usage("--seed is required for this command".into()))
}

fn require<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| LshError::Usage(format!("--{flag} is required")))
}

/// `out` itself, or `out/default` when `out` is a directory (existing, or
/// written with a trailing separator). Parent directories are created.
fn resolve_out(out: Option<&Path>, default: &str) -> Result<PathBuf> {
    let path = match out {
        None => PathBuf::from(default),
        Some(p) if p.is_dir() || p.as_os_str().to_string_lossy().ends_with(['/', '\\']) => {
            p.join(default)
        }
        Some(p) => p.to_path_buf(),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(path)
}

fn log(msg: impl AsRef<str>) {
    eprintln!("jl-lsh: {}", msg.as_ref());
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(argv) {
        Ok(Parsed::Cli(cli)) => cli,
        Ok(Parsed::Display(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("jl-lsh: {e}");
            return exit_code(&e);
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("jl-lsh: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &LshError) -> i32 {
    match e {
        LshError::Usage(_) | LshError::Domain(_) => 1,
        _ => 2,
    }
}

enum Parsed {
    Cli(Cli),
    /// Help or version text.
    Display(String),
}

/// Parses argv after splicing in the values from `--config`, if any, for
/// flags not given on the command line.
fn parse(argv: Vec<OsString>) -> Result<Parsed> {
    let argv = merge_config(argv)?;
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(Parsed::Display(e.render().to_string()))
                }
                _ => Err(LshError::Usage(e.render().to_string().trim_end().to_string())),
            };
        }
    };
    Cli::from_arg_matches(&matches)
        .map(Parsed::Cli)
        .map_err(|e| LshError::Usage(e.to_string()))
}

/// Reads `key = value` lines. Repeated keys keep every value in order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            LshError::Usage(format!("config line {}: expected key = value", n + 1))
        })?;
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(LshError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let text: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config_path = None;
    for (i, a) in text.iter().enumerate() {
        if a == "--config" {
            config_path = text.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        }
    }
    let Some(config_path) = config_path else {
        return Ok(argv);
    };
    // The subcommand is the first argument after the program name.
    let Some(sub_name) = text.get(1).filter(|s| !s.starts_with('-')) else {
        return Ok(argv);
    };
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(sub_name) else {
        return Ok(argv);
    };
    let body = fs::read_to_string(&config_path)?;
    let entries = parse_config(&body)?;

    let given: Vec<&str> = text[2..]
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut flags: BTreeMap<String, bool> = BTreeMap::new();
    for arg in sub.get_arguments() {
        if let Some(long) = arg.get_long() {
            flags.insert(long.to_string(), arg.get_action().takes_values());
        }
    }
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        let takes_value = *flags.get(&key).ok_or_else(|| {
            LshError::Usage(format!(
                "config key '{key}' is not a flag of {sub_name} (valid: {})",
                flags.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })?;
        if key == "config" {
            return Err(LshError::Usage("config files cannot name another config".into()));
        }
        if given.contains(&key.as_str()) {
            continue;
        }
        if takes_value {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        } else {
            match value.as_str() {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(LshError::Usage(format!(
                        "config key '{key}' is a switch; expected true or false, got '{other}'"
                    )))
                }
            }
        }
    }
    let mut merged = argv[..2].to_vec();
    merged.extend(injected);
    merged.extend(argv[2..].iter().cloned());
    Ok(merged)
}

fn execute(command: Command) -> Result<()> {
    let threads = command.common().threads;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(LshError::Usage("--threads must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| LshError::Usage(format!("cannot start thread pool: {e}")))?
    };
    pool.install(|| dispatch(command))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::GenData {
            common,
            n,
            queries,
            dim,
            clusters,
            spread,
            random,
        } => {
            let seed = match (common.seed, random) {
                (Some(_), true) => {
                    return Err(LshError::Usage("give either --seed or --random, not both".into()))
                }
                (Some(s), false) => Seed(s),
                (None, true) => {
                    let s = rand::random::<u64>();
                    log(format!("random seed {s}"));
                    Seed(s)
                }
                (None, false) => {
                    return Err(LshError::Usage("gen-data needs --seed or --random".into()))
                }
            };
            let spec = SyntheticSpec {
                n,
                queries,
                dim,
                clusters,
                spread,
            };
            let (data, qs) = crate::harness::generate_synthetic(&spec, seed).map_err(usage)?;
            let dir = common.out.unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            write_fvecs(dir.join("base.fvecs"), data.vectors())?;
            write_fvecs(dir.join("queries.fvecs"), &qs)?;
            log(format!("wrote {n} base and {queries} query vectors to {}", dir.display()));
            Ok(())
        }
        Command::CollisionCurve {
            common,
            family,
            dim,
            trials,
            grid_points,
            distance_kind,
        } => {
            let seed = require_seed(&common)?;
            let kind = parse_kind(&distance_kind)?;
            let grid = uniform_grid(kind, grid_points);
            let families = parse_families(&family)?;
            let curves = families
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    log(format!("collision curve for {f}"));
                    let s = seed.derive(i as u64);
                    let fam = MinhashFamily::new(f, dim, s.derive(0)).map_err(usage)?;
                    estimate_collision_curve(&fam, &grid, kind, trials, s.derive(1)).map_err(usage)
                })
                .collect::<Result<Vec<_>>>()?;
            let path = resolve_out(common.out.as_deref(), "collision_curve.csv")?;
            write_curves_csv(&curves, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::SolveParams {
            common,
            p1,
            p2,
            target,
        } => {
            let p1 = require(&p1, "p1")?;
            let p2 = require(&p2, "p2")?;
            let t = target.target()?;
            let s = solve_parameters(p1, p2, &t, target.r_max, target.b_max).map_err(usage)?;
            let a1 = amplified_probability(p1, s.r, s.b)?;
            let a2 = amplified_probability(p2, s.r, s.b)?;
            let text = format!(
                "r={} b={} total={}\namplified_p1={a1:.6} amplified_p2={a2:.6}\n",
                s.r,
                s.b,
                s.total()
            );
            print!("{text}");
            if let Some(out) = common.out.as_deref() {
                fs::write(resolve_out(Some(out), "scheme.txt")?, text)?;
            }
            Ok(())
        }
        Command::Table1 {
            common,
            family,
            dim,
            trials,
            validation_trials,
            target,
        } => {
            let config = Table1Config {
                families: parse_families(&family)?,
                dim,
                target: target.target()?,
                trials,
                validation_trials,
                r_max: target.r_max,
                b_max: target.b_max,
                seed: require_seed(&common)?,
            };
            config.validate().map_err(usage)?;
            log("estimating base probabilities and solving (r, b)");
            let rows = table1_experiment(&config)?;
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            writeln!(w, "{:<44} {:>4} {:>6} {:>7} {:>8} {:>8}", "family", "r", "b", "total", "p1", "p2")?;
            for row in &rows {
                match row.scheme {
                    Some(s) => writeln!(
                        w,
                        "{:<44} {:>4} {:>6} {:>7} {:>8.4} {:>8.4}",
                        row.family.label(),
                        s.r,
                        s.b,
                        s.total(),
                        row.p1.p_hat,
                        row.p2.p_hat
                    )?,
                    None => writeln!(w, "{:<44} infeasible", row.family.label())?,
                }
            }
            let path = resolve_out(common.out.as_deref(), "table1.csv")?;
            write_table1_csv(&rows, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::BuildIndex {
            common,
            data,
            family,
            r,
            b,
            trials,
            target,
        } => {
            let seed = require_seed(&common)?;
            let kind = parse_family_spec(&family)?;
            log("loading data");
            let (dataset, _) = data.source(seed.derive(0))?.load()?;
            let dim = dataset.dim().unwrap_or(data.dim);
            let fam = MinhashFamily::new(kind, dim, seed.derive(1)).map_err(usage)?;
            let scheme = match (r, b) {
                (Some(r), Some(b)) => AmplifiedScheme::new(r, b).map_err(usage)?,
                (None, None) => {
                    let t = target.target()?;
                    let p1 = estimate_base_probability(&fam, t.d1, t.kind, trials, seed.derive(2))
                        .map_err(usage)?;
                    let p2 = estimate_base_probability(&fam, t.d2, t.kind, trials, seed.derive(3))
                        .map_err(usage)?;
                    let s = solve_parameters(p1.p_hat, p2.p_hat, &t, target.r_max, target.b_max)?;
                    log(format!(
                        "p1={:.4} p2={:.4} -> r={} b={}",
                        p1.p_hat, p2.p_hat, s.r, s.b
                    ));
                    s
                }
                _ => return Err(LshError::Usage("give both --r and --b, or neither".into())),
            };
            log(format!("building {} tables over {} points", scheme.b, dataset.len()));
            let index = LshIndex::build(&dataset, fam, scheme, seed.derive(4))?;
            let path = resolve_out(common.out.as_deref(), "index.bin")?;
            save_snapshot(&index, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::Query {
            common,
            index,
            vector_file,
            k,
            distance_kind,
            no_normalize,
        } => {
            let index = load_snapshot(require(&index, "index")?)?;
            let (_, queries) = load_vectors(require(&vector_file, "vector-file")?, !no_normalize)?
                .into_parts();
            let kind = parse_kind(&distance_kind)?;
            let mut rows = Vec::new();
            for (qi, q) in queries.iter().enumerate() {
                let (found, stats) = index.query_knn(q, k, kind).map_err(usage)?;
                for (rank, n) in found.iter().enumerate() {
                    rows.push(format!("{qi},{rank},{},{:.16e}", n.id, n.distance));
                }
                log(format!(
                    "query {qi}: {} candidates from {} tables",
                    stats.candidates_examined, stats.tables_hit
                ));
            }
            let body = format!("query,rank,id,distance\n{}", rows.iter().map(|r| format!("{r}\n")).collect::<String>());
            match common.out.as_deref() {
                Some(out) => fs::write(resolve_out(Some(out), "neighbors.csv")?, body)?,
                None => print!("{body}"),
            }
            Ok(())
        }
        Command::PrecisionCurve {
            common,
            data,
            family,
            tables,
            k,
            trials,
            ground_truth,
            target,
        } => {
            let seed = require_seed(&common)?;
            let t = target.target()?;
            log("loading data");
            let (dataset, queries) = data.source(seed.derive(0))?.load()?;
            let truth = match &ground_truth {
                Some(p) if p.exists() => {
                    let gt = GroundTruth::read(p)?;
                    if gt.k != k || gt.entries.len() != queries.len() {
                        return Err(LshError::format(
                            0,
                            format!(
                                "ground truth {} holds k={} for {} queries, need k={k} for {}",
                                p.display(),
                                gt.k,
                                gt.entries.len(),
                                queries.len()
                            ),
                        ));
                    }
                    gt
                }
                _ => {
                    log("computing exact neighbours");
                    let gt = compute_ground_truth(&dataset, &queries, k, t.kind)?;
                    if let Some(p) = &ground_truth {
                        gt.write(p)?;
                    }
                    gt
                }
            };
            let config = PrecisionConfig {
                families: parse_families(&family)?,
                target: t,
                trials,
                r_max: target.r_max,
                b_max: tables,
                kind: t.kind,
                seed: seed.derive(1),
            };
            let curves = precision_vs_tables(&dataset, &queries, &truth, &config)?;
            for c in &curves {
                log(format!(
                    "{}: r={} recall@{k} with {tables} tables = {:.4}",
                    c.family,
                    c.r,
                    c.recall.last().copied().unwrap_or(0.0)
                ));
            }
            let path = resolve_out(common.out.as_deref(), "precision_vs_b.csv")?;
            write_precision_csv(&curves, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::KSweep {
            common,
            dim,
            t,
            k_list,
            distance,
            distance_kind,
            trials,
        } => {
            let seed = require_seed(&common)?;
            let ks = k_list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| LshError::Usage(format!("bad k value '{s}' in --k-list")))
                })
                .collect::<Result<Vec<_>>>()?;
            let kind = parse_kind(&distance_kind)?;
            let sweep = collision_vs_k(dim, t, &ks, distance, kind, trials, seed).map_err(usage)?;
            for (k, e) in &sweep.points {
                log(format!("k={k}: {:.4} +- {:.4}", e.p_hat, e.std_err));
            }
            log(format!("dense: {:.4} +- {:.4}", sweep.dense.p_hat, sweep.dense.std_err));
            let path = resolve_out(common.out.as_deref(), "collision_vs_k.csv")?;
            write_ksweep_csv(&sweep, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::Bench {
            common,
            family,
            dim,
            trials,
        } => {
            let seed = require_seed(&common)?;
            let reports = op_count_benchmark(&parse_families(&family)?, dim, trials, seed).map_err(usage)?;
            for r in &reports {
                log(format!(
                    "{}: add/sub={} mul={} mul-add={} cmp={} ({:.0} ns/hash)",
                    r.family,
                    r.counts.add_sub(),
                    r.counts.multiplications,
                    r.counts.multiply_adds,
                    r.counts.comparisons,
                    r.ns_per_hash
                ));
            }
            let path = resolve_out(common.out.as_deref(), "opcounts.csv")?;
            write_opcounts_csv(&reports, &path)?;
            log(format!("wrote {}", path.display()));
            Ok(())
        }
        Command::InspectIndex { common, index } => {
            let index = load_snapshot(require(&index, "index")?)?;
            let mut text = format!(
                "{}\nr={} b={} points={} dim={}\n",
                index.family().descriptor(),
                index.scheme().r,
                index.scheme().b,
                index.len(),
                index.dim()
            );
            text.push_str("table,buckets,largest_bucket,singletons\n");
            for (table, hist) in index.tables().iter().zip(index.occupancy_report()) {
                let largest = hist.keys().next_back().copied().unwrap_or(0);
                let singletons = hist.get(&1).copied().unwrap_or(0);
                text.push_str(&format!(
                    "{},{},{largest},{singletons}\n",
                    table.table_id(),
                    table.bucket_count()
                ));
            }
            match common.out.as_deref() {
                Some(out) => fs::write(resolve_out(Some(out), "index_report.txt")?, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
