use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curve::SpeedCurve;
use crate::{Error, Result};

/// Which bound curve a fit uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Lower,
    Upper,
}

impl std::str::FromStr for Bound {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Bound::Lower),
            "upper" => Ok(Bound::Upper),
            _ => Err(Error::Usage(format!("bound must be lower or upper, got {s:?}"))),
        }
    }
}

/// Least-squares slope of `log mean` against `log n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% interval on the slope.
    pub ci: f64,
    pub window: [u64; 2],
    pub bound: Bound,
}

pub const BOOTSTRAP_RESAMPLES: usize = 200;

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = if xs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, se)
}

/// Fit `mean(n) ~ C n^slope` over checkpoints with `n` in `window`.
///
/// The interval comes from 200 bootstrap resamples over walkers when the
/// curve carries per-walker samples, and from the regression standard error
/// otherwise.
pub fn fit_exponent(curve: &SpeedCurve, window: (u64, u64), bound: Bound) -> Result<ExponentFit> {
    let idx: Vec<usize> = (0..curve.times.len()).filter(|&i| (window.0..=window.1).contains(&curve.times[i])).collect();
    if idx.len() < 3 {
        return Err(Error::Usage(format!("window {window:?} holds {} points, need at least 3", idx.len())));
    }
    let means = match bound {
        Bound::Lower => &curve.mean_lower,
        Bound::Upper => &curve.mean_upper,
    };
    if idx.iter().any(|&i| curve.times[i] == 0 || means[i] <= 0.0) {
        return Err(Error::Usage("window contains a zero time or a zero mean".into()));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| (curve.times[i] as f64).ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| means[i].ln()).collect();
    let (slope, intercept, se) = ols(&xs, &ys);

    let samples = match bound {
        Bound::Lower => &curve.samples_lower,
        Bound::Upper => &curve.samples_upper,
    };
    let ci = if samples.len() >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(curve.seed ^ 0x5eed_b007);
        let w = samples.len();
        let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let mut sums = vec![0u64; idx.len()];
            for _ in 0..w {
                let s = &samples[rng.gen_range(0..w)];
                for (acc, &i) in sums.iter_mut().zip(&idx) {
                    *acc += s[i];
                }
            }
            let ys: Vec<f64> = sums.iter().map(|&t| (t.max(1) as f64 / w as f64).ln()).collect();
            slopes.push(ols(&xs, &ys).0);
        }
        slopes.sort_by(f64::total_cmp);
        let lo = slopes[(0.025 * BOOTSTRAP_RESAMPLES as f64) as usize];
        let hi = slopes[(0.975 * BOOTSTRAP_RESAMPLES as f64) as usize - 1];
        (hi - lo) / 2.0
    } else {
        1.96 * se
    };
    Ok(ExponentFit {
        slope,
        intercept,
        ci,
        window: [curve.times[idx[0]], curve.times[*idx.last().unwrap()]],
        bound,
    })
}
