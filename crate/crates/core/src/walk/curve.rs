use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::StepStream;
use super::state::{WalkBounds, Walker};
use crate::group::DiagonalSpec;
use crate::{Error, Result};

/// Run one walker and report its bounds at each checkpoint.
pub fn simulate_walk(spec: &DiagonalSpec, times: &[u64], master_seed: u64, walker: u64) -> Vec<WalkBounds> {
    let horizon = times.last().copied().unwrap_or(0);
    let mut w = Walker::new(spec, horizon);
    let mut stream = StepStream::new(master_seed, walker);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while w.time() < t {
            w.step(stream.next_bits());
        }
        out.push(w.bounds());
    }
    out
}

/// Monte Carlo estimate of the mean word length at each checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedCurve {
    pub spec: String,
    pub times: Vec<u64>,
    pub mean_lower: Vec<f64>,
    pub stderr_lower: Vec<f64>,
    pub mean_upper: Vec<f64>,
    pub stderr_upper: Vec<f64>,
    pub walkers: u64,
    pub seed: u64,
    /// The upper curve is a heuristic envelope (towers of level two or more).
    pub heuristic: bool,
    /// Per-walker samples `[walker][checkpoint]`; empty when read from CSV.
    #[serde(skip)]
    pub samples_lower: Vec<Vec<u64>>,
    #[serde(skip)]
    pub samples_upper: Vec<Vec<u64>>,
}

/// Sample mean and `std / sqrt(count)`.
pub(crate) fn mean_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulate `walkers` independent walks with per-walker streams derived from
/// `(master_seed, walker index)`. The result does not depend on
/// `parallelism`.
pub fn estimate_speed_curve(
    spec: &DiagonalSpec,
    times: &[u64],
    walkers: u64,
    master_seed: u64,
    parallelism: usize,
) -> Result<SpeedCurve> {
    if walkers < 2 {
        return Err(Error::Usage("a speed curve needs at least 2 walkers".into()));
    }
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("checkpoint times must be non-empty and strictly increasing".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    let runs: Vec<Vec<WalkBounds>> =
        pool.install(|| (0..walkers).into_par_iter().map(|w| simulate_walk(spec, times, master_seed, w)).collect());

    let samples_lower: Vec<Vec<u64>> = runs.iter().map(|r| r.iter().map(|b| b.lower).collect()).collect();
    let samples_upper: Vec<Vec<u64>> = runs.iter().map(|r| r.iter().map(|b| b.upper).collect()).collect();
    let heuristic = runs.iter().flatten().any(|b| b.heuristic);
    let mut curve = SpeedCurve {
        spec: spec.to_string(),
        times: times.to_vec(),
        mean_lower: Vec::new(),
        stderr_lower: Vec::new(),
        mean_upper: Vec::new(),
        stderr_upper: Vec::new(),
        walkers,
        seed: master_seed,
        heuristic,
        samples_lower,
        samples_upper,
    };
    for i in 0..times.len() {
        let (ml, sl) = mean_stderr(curve.samples_lower.iter().map(|s| s[i] as f64));
        let (mu, su) = mean_stderr(curve.samples_upper.iter().map(|s| s[i] as f64));
        curve.mean_lower.push(ml);
        curve.stderr_lower.push(sl);
        curve.mean_upper.push(mu);
        curve.stderr_upper.push(su);
    }
    Ok(curve)
}

#[derive(Serialize, Deserialize)]
struct Row {
    n: u64,
    mean_lower: f64,
    stderr_lower: f64,
    mean_upper: f64,
    stderr_upper: f64,
    walkers: u64,
    seed: u64,
}

impl SpeedCurve {
    /// CSV with `#` metadata lines followed by a header and one row per time.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# spec: {}", self.spec)?;
        writeln!(out, "# upper: {}", if self.heuristic { "heuristic" } else { "certified" })?;
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.times.len() {
            w.serialize(Row {
                n: self.times[i],
                mean_lower: self.mean_lower[i],
                stderr_lower: self.stderr_lower[i],
                mean_upper: self.mean_upper[i],
                stderr_upper: self.stderr_upper[i],
                walkers: self.walkers,
                seed: self.seed,
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv(input: impl BufRead) -> Result<Self> {
        let text = std::io::read_to_string(input)?;
        let mut spec = String::new();
        let mut heuristic = false;
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some(s) = line.trim().strip_prefix("spec:") {
                spec = s.trim().to_string();
            } else if let Some(s) = line.trim().strip_prefix("upper:") {
                heuristic = s.trim() == "heuristic";
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut c = SpeedCurve {
            spec,
            times: Vec::new(),
            mean_lower: Vec::new(),
            stderr_lower: Vec::new(),
            mean_upper: Vec::new(),
            stderr_upper: Vec::new(),
            walkers: 0,
            seed: 0,
            heuristic,
            samples_lower: Vec::new(),
            samples_upper: Vec::new(),
        };
        for row in r.deserialize::<Row>() {
            let row = row.map_err(csv_err)?;
            c.times.push(row.n);
            c.mean_lower.push(row.mean_lower);
            c.stderr_lower.push(row.stderr_lower);
            c.mean_upper.push(row.mean_upper);
            c.stderr_upper.push(row.stderr_upper);
            c.walkers = row.walkers;
            c.seed = row.seed;
        }
        if c.times.is_empty() {
            return Err(Error::Usage("speed curve CSV has no rows".into()));
        }
        Ok(c)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Usage(format!("csv: {e}"))
}
