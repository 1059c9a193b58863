//! The `lampspeed` command line.
//!
//! Exit codes: 0 success, 2 usage or spec error, 3 resource limit,
//! 4 verification failure.

pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::ball::{balls_coincide, dgen_constants, DgenBudget, BALL_NODE_CAP};
use crate::group::DiagonalSpec;
use crate::scheduler::{build_schedule, EpsilonSpec, MonteCarlo, Profile, ScheduleConfig};
use crate::walk::{dihedral_dist, estimate_speed_curve, fit_exponent, ineq_32, Bound, SpeedCurve};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output directory used when neither `--out` nor `LAMPSPEED_OUT` is set.
pub const DEFAULT_OUT: &str = "lampspeed-out";

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Parser, Debug)]
#[command(name = "lampspeed", version, about = "Random-walk speed on dihedral lamplighter groups and their diagonal products")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "LAMPSPEED_OUT", default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    /// Overwrite results that already exist for the same configuration.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads for simulations; results do not depend on it.
    #[arg(long, global = true, default_value_t = default_parallelism())]
    pub parallelism: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate a speed curve and write it as CSV.
    Simulate {
        /// Group or diagonal spec such as `i=1,k=0,l=2,m=inf`, or `@file`.
        #[arg(long)]
        group: String,
        /// `2^a..2^b` (dyadic) or a comma-separated list.
        #[arg(long, default_value = "2^5..2^13")]
        times: String,
        /// Independent walkers per time.
        #[arg(long, default_value_t = 2000)]
        walkers: u64,
        /// Master seed; walker `j` uses stream `j`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit the log-log slope of a speed curve CSV.
    Exponent {
        /// Speed curve CSV written by `simulate` or `schedule`.
        curve: PathBuf,
        /// `lo..hi`, each an integer or `2^a`.
        #[arg(long, default_value = "2^7..2^13")]
        window: String,
        /// Which curve to fit: `lower` or `upper`.
        #[arg(long, default_value = "lower")]
        bound: String,
    },
    /// Compare the marked balls of two groups.
    Ball {
        /// First group spec, or `@file`.
        #[arg(long = "a")]
        spec_a: String,
        /// Second group spec, or `@file`.
        #[arg(long = "b")]
        spec_b: String,
        #[arg(long)]
        radius: u32,
        /// Largest number of ball vertices explored.
        #[arg(long, default_value_t = BALL_NODE_CAP)]
        node_cap: usize,
    },
    /// Comparison constants for the diagonal product of `G` with a finite `F`.
    Dgen {
        /// Finite factor spec, or `trivial`.
        #[arg(long = "f")]
        spec_f: String,
        /// Group spec of `G`.
        #[arg(long = "g")]
        spec_g: String,
        /// Radius of the ball searched in the diagonal product.
        #[arg(long, default_value_t = DgenBudget::default().radius)]
        radius: u32,
    },
    /// Exact alternating-word distance law in `D_l`.
    Dist {
        /// Word length.
        #[arg(long)]
        t: u64,
        /// Dihedral parameter, at least 2.
        #[arg(long)]
        l: u64,
    },
    /// Build a speed schedule.
    Schedule {
        /// Target exponent, inside the interval of the level.
        #[arg(long)]
        lambda: f64,
        /// Tower level `i`.
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// `loglog`, `log:c`, `power:c,p` or `constant-ramp:c,ramp`.
        #[arg(long, default_value = "power:4,0.05")]
        epsilon: String,
        /// Number of stages to build.
        #[arg(long, default_value_t = 1)]
        stages: u32,
        /// `desk`, `smoke` or `extended`.
        #[arg(long, default_value = "desk")]
        profile: String,
        #[arg(long, default_value_t = verify::SUITE_SEED)]
        seed: u64,
    },
    /// Run acceptance suites.
    Verify {
        /// all, speed, coupling, balls, dist, metric, dgen, schedule or determinism.
        #[arg(long, default_value = "all")]
        suite: String,
        /// `desk` for full scale, `smoke` for a quick reduced run.
        #[arg(long, default_value = "desk")]
        profile: String,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) | Error::Usage(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Resource(_) => 3,
        Error::Verification(_) => 4,
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lampspeed: {e}");
            exit_code(&e)
        }
    }
}

/// Read a spec argument; `@path` loads the file form.
pub fn parse_spec(arg: &str) -> Result<DiagonalSpec> {
    match arg.strip_prefix('@') {
        Some(path) => DiagonalSpec::parse_file(&fs::read_to_string(path)?),
        None => arg.parse(),
    }
}

fn parse_time(s: &str) -> Result<u64> {
    let s = s.trim();
    let bad = || Error::Usage(format!("bad time '{s}'"));
    match s.strip_prefix("2^") {
        Some(e) => {
            let e: u32 = e.parse().map_err(|_| bad())?;
            1u64.checked_shl(e).filter(|_| e < 64).ok_or_else(bad)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

/// `lo..hi` as a pair of times.
pub fn parse_window(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once("..").ok_or_else(|| Error::Usage(format!("window '{s}' is not lo..hi")))?;
    let (a, b) = (parse_time(a)?, parse_time(b)?);
    if a > b {
        return Err(Error::Usage(format!("empty window '{s}'")));
    }
    Ok((a, b))
}

/// `2^a..2^b` expands to the powers of two in between; otherwise a
/// comma-separated, strictly increasing list.
pub fn parse_times(s: &str) -> Result<Vec<u64>> {
    let times: Vec<u64> = if s.contains("..") {
        let (a, b) = parse_window(s)?;
        if !a.is_power_of_two() || !b.is_power_of_two() {
            return Err(Error::Usage(format!("range '{s}' needs powers of two")));
        }
        (a.trailing_zeros()..=b.trailing_zeros()).map(|j| 1u64 << j).collect()
    } else {
        s.split(',').map(parse_time).collect::<Result<_>>()?
    };
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage(format!("times '{s}' must be non-empty and increasing")));
    }
    Ok(times)
}

/// First 16 hex digits of the SHA-256 of the canonical JSON config.
pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: &'a str,
    config: &'a Value,
}

/// Output tree: `curves/`, `schedules/`, `balls/`, `fixtures/`.
pub struct ResultStore {
    root: PathBuf,
    force: bool,
}

impl ResultStore {
    pub fn new(root: impl AsRef<Path>, force: bool) -> Self {
        ResultStore { root: root.as_ref().to_path_buf(), force }
    }

    pub fn path(&self, dir: &str, name: &str) -> PathBuf {
        self.root.join(dir).join(name)
    }

    /// Refuse to overwrite unless forced.
    pub fn check_free(&self, dir: &str, name: &str) -> Result<PathBuf> {
        let path = self.path(dir, name);
        if path.exists() && !self.force {
            return Err(Error::Usage(format!("{} exists for this configuration; pass --force to overwrite", path.display())));
        }
        Ok(path)
    }

    pub fn write(&self, dir: &str, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.check_free(dir, name)?;
        fs::create_dir_all(self.root.join(dir))?;
        fs::write(&path, contents)?;
        Ok(path)
    }
}

fn with_meta(hash: &str, config: &Value, key: &str, payload: impl Serialize) -> Result<String> {
    let meta = Meta { tool: "lampspeed", version: VERSION, config_hash: hash, config };
    let mut v = json!({ "meta": meta });
    v[key] = serde_json::to_value(payload)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn csv_with_meta(hash: &str, config: &Value, curve: &SpeedCurve) -> Result<String> {
    Ok(format!("# tool: lampspeed {VERSION}\n# config: {hash} {config}\n{}", curve.to_csv_string()?))
}

pub fn run(cli: &Cli) -> Result<()> {
    let store = ResultStore::new(&cli.out, cli.force);
    match &cli.command {
        Command::Simulate { group, times, walkers, seed } => {
            let spec = parse_spec(group)?;
            let times = parse_times(times)?;
            let config = json!({ "command": "simulate", "group": spec.to_string(), "times": times, "walkers": walkers, "seed": seed });
            let hash = config_hash(&config);
            let name = format!("simulate-{hash}.csv");
            store.check_free("curves", &name)?;
            let curve = estimate_speed_curve(&spec, &times, *walkers, *seed, cli.parallelism)?;
            let path = store.write("curves", &name, &csv_with_meta(&hash, &config, &curve)?)?;
            println!("{}", path.display());
        }
        Command::Exponent { curve, window, bound } => {
            let bound: Bound = bound.parse()?;
            let window = parse_window(window)?;
            let c = SpeedCurve::read_csv(std::io::BufReader::new(fs::File::open(curve)?))?;
            let fit = fit_exponent(&c, window, bound)?;
            let config = json!({ "command": "exponent", "spec": c.spec, "seed": c.seed, "window": [window.0, window.1], "bound": bound });
            print!("{}", with_meta(&config_hash(&config), &config, "fit", fit)?);
        }
        Command::Ball { spec_a, spec_b, radius, node_cap } => {
            let (a, b) = (parse_spec(spec_a)?, parse_spec(spec_b)?);
            let config = json!({ "command": "ball", "specA": a.to_string(), "specB": b.to_string(), "radius": radius });
            let hash = config_hash(&config);
            let name = format!("ball-{hash}.json");
            store.check_free("balls", &name)?;
            let verdict = balls_coincide(&a, &b, *radius, *node_cap)?;
            let text = with_meta(&hash, &config, "result", verdict)?;
            store.write("balls", &name, &text)?;
            print!("{text}");
        }
        Command::Dgen { spec_f, spec_g, radius } => {
            let (f, g) = (parse_spec(spec_f)?, parse_spec(spec_g)?);
            let config = json!({ "command": "dgen", "F": f.to_string(), "G": g.to_string(), "radius": radius });
            let hash = config_hash(&config);
            let name = format!("dgen-{hash}.json");
            store.check_free("fixtures", &name)?;
            let c = dgen_constants(&f, &g, &DgenBudget { radius: *radius, ..DgenBudget::default() })?;
            let text = with_meta(&hash, &config, "constants", c)?;
            store.write("fixtures", &name, &text)?;
            print!("{text}");
        }
        Command::Dist { t, l } => {
            let d = dihedral_dist(*t, *l)?;
            let ineq = if *l >= 4 { Some(ineq_32(*t, *l)?) } else { None };
            let config = json!({ "command": "dist", "t": t, "l": l });
            let payload = json!({
                "distribution": d,
                "total_is_one": d.total() == crate::walk::Prob::from_integer(1),
                "non_increasing": d.is_non_increasing(),
                "ineq_32": ineq,
            });
            print!("{}", with_meta(&config_hash(&config), &config, "result", payload)?);
        }
        Command::Schedule { lambda, level, epsilon, stages, profile, seed } => {
            let epsilon: EpsilonSpec = epsilon.parse()?;
            let profile: Profile = profile.parse()?;
            let cfg = ScheduleConfig { lambda: *lambda, level: *level, epsilon, stages: *stages, profile, seed: *seed };
            crate::scheduler::Target::new(cfg.lambda, cfg.level)?;
            let config = json!({
                "command": "schedule", "lambda": lambda, "level": level, "epsilon": epsilon,
                "stages": stages, "profile": profile, "seed": seed,
            });
            let hash = config_hash(&config);
            let name = format!("schedule-{hash}.json");
            let curve_name = format!("schedule-{hash}-final.csv");
            store.check_free("schedules", &name)?;
            store.check_free("curves", &curve_name)?;
            let src = MonteCarlo { walkers: profile.params().walkers, parallelism: cli.parallelism };
            let (schedule, curve) = build_schedule(&cfg, &src)?;
            let path = store.write("schedules", &name, &with_meta(&hash, &config, "schedule", &schedule)?)?;
            store.write("curves", &curve_name, &csv_with_meta(&hash, &config, &curve)?)?;
            println!("{}", path.display());
            if !schedule.certificate.all_hold {
                return Err(Error::Verification(format!("schedule certificate has failures: {:?}", schedule.certificate.checks_failed)));
            }
        }
        Command::Verify { suite, profile } => {
            let profile: Profile = profile.parse()?;
            let results = verify::run_suite(suite, verify::Scale::for_profile(profile), cli.parallelism)?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed: Vec<u32> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
            if !failed.is_empty() {
                return Err(Error::Verification(format!("criteria {failed:?} failed")));
            }
        }
    }
    Ok(())
}
