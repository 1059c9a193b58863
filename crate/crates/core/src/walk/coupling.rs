use rayon::prelude::*;
use serde::Serialize;

use super::curve::mean_stderr;
use super::rng::StepStream;
use super::state::Walker;
use crate::group::{DiagonalSpec, Dihedral, GroupSpec, Order};
use crate::metric::{local_time, refined_from_parts, LengthBounds};
use crate::{Error, Result};

/// Outcome of driving `Gamma(k, 2l, inf)` and its quotient `Gamma(k, l, inf)`
/// with the same steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    pub k: u64,
    pub l: u64,
    pub n: u64,
    pub walkers: u64,
    pub seed: u64,
    /// Samples where `|Z^l| <= |Z^2l|` could not be confirmed: exact values
    /// when both are known, lower bounds otherwise.
    pub violations: u64,
    /// Samples with every local time at most `l/2`.
    pub short_local_time: u64,
    /// Among those, samples whose two brackets differ.
    pub short_local_time_mismatches: u64,
    pub mean_small: [f64; 2],
    pub mean_big: [f64; 2],
    pub stderr_small: [f64; 2],
    pub stderr_big: [f64; 2],
    /// `mean upper(Z^2l) / mean lower(Z^l)`: an upper estimate of the ratio.
    pub ratio_upper: f64,
    /// `mean lower(Z^2l) / mean upper(Z^l)`.
    pub ratio_lower: f64,
}

struct Sample {
    small: LengthBounds,
    big: LengthBounds,
    short: bool,
}

fn run_one(k: u64, l: u64, n: u64, seed: u64, walker: u64) -> Sample {
    let big_l = Order::Finite(2 * l);
    let small_l = Order::Finite(l);
    let spec = DiagonalSpec::single(GroupSpec::gamma(k, big_l, Order::Infinite));
    let mut w = Walker::new(&spec, n);
    let mut stream = StepStream::new(seed, walker);
    let mut path = Vec::with_capacity(n as usize + 1);
    path.push(0);
    for _ in 0..n {
        w.step(stream.next_bits());
        path.push(w.lift_parts(0).expect("level-one factor").0);
    }
    let (p, lamps) = w.lift_parts(0).expect("level-one factor");
    let projected: Vec<(i64, Dihedral)> =
        lamps.iter().map(|&(x, f)| (x, f.project(small_l))).filter(|(_, f)| !f.is_identity()).collect();
    let big = refined_from_parts(p, &lamps, k, big_l);
    let small = refined_from_parts(p, &projected, k, small_l);
    let short = local_time(&path, k).values().all(|&t| 2 * t <= l);
    Sample { small, big, short }
}

/// Couple the walks on `Gamma(k, 2l, inf)` and `Gamma(k, l, inf)` through
/// the quotient `D_2l -> D_l` and compare their lengths at time `n`.
pub fn coupled_2l_check(k: u64, l: u64, n: u64, walkers: u64, seed: u64) -> Result<CouplingReport> {
    if l < 1 || walkers < 2 {
        return Err(Error::Usage("coupling needs l >= 1 and at least 2 walkers".into()));
    }
    let samples: Vec<Sample> = (0..walkers).into_par_iter().map(|w| run_one(k, l, n, seed, w)).collect();
    let mut violations = 0;
    let mut short = 0;
    let mut mismatches = 0;
    for s in &samples {
        // Exact brackets have lower = upper, so one comparison covers both.
        violations += (s.small.lower > s.big.lower) as u64;
        if s.short {
            short += 1;
            mismatches += (s.small != s.big) as u64;
        }
    }
    let stat = |f: &dyn Fn(&Sample) -> u64| mean_stderr(samples.iter().map(|s| f(s) as f64));
    let (sl, sel) = stat(&|s| s.small.lower);
    let (su, seu) = stat(&|s| s.small.upper);
    let (bl, sbl) = stat(&|s| s.big.lower);
    let (bu, sbu) = stat(&|s| s.big.upper);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 1.0 };
    Ok(CouplingReport {
        k,
        l,
        n,
        walkers,
        seed,
        violations,
        short_local_time: short,
        short_local_time_mismatches: mismatches,
        mean_small: [sl, su],
        mean_big: [bl, bu],
        stderr_small: [sel, seu],
        stderr_big: [sbl, sbu],
        ratio_upper: ratio(bu, sl),
        ratio_lower: ratio(bl, su),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{MarkedGroup, WreathElem};
    use crate::metric::LengthOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quotient_is_never_longer_on_small_elements() {
        // Exact lengths on both sides by breadth-first search.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (k, l) in [(0u64, 2u64), (2, 2), (1, 3)] {
            let big = GroupSpec::gamma(k, Order::Finite(2 * l), Order::Infinite);
            let small = GroupSpec::gamma(k, Order::Finite(l), Order::Infinite);
            let ob = LengthOracle::sws(&big, 400_000).unwrap();
            let os = LengthOracle::sws(&small, 400_000).unwrap();
            for _ in 0..40 {
                let mut g = big.identity();
                let mut h = small.identity();
                for _ in 0..rng.gen_range(0..6) {
                    let bits = rng.gen::<u64>();
                    g = big.mul(&g, &big.step_elem(bits));
                    h = small.mul(&h, &small.step_elem(bits));
                }
                let projected: Vec<(i64, crate::group::Lamp)> = g
                    .dihedral_lamps()
                    .map(|(x, f)| (x, f.project(Order::Finite(l))))
                    .filter(|(_, f)| !f.is_identity())
                    .map(|(x, f)| (x, crate::group::Lamp::Dihedral(f)))
                    .collect();
                assert_eq!(WreathElem::from_parts(g.position(), projected), h);
                if let (Ok(a), Ok(b)) = (os.length(&h), ob.length(&g)) {
                    assert!(a <= b);
                }
            }
        }
    }

    #[test]
    fn coupling_report_is_consistent() {
        let r = coupled_2l_check(2, 4, 64, 200, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.short_local_time_mismatches, 0);
        assert!(r.ratio_lower <= r.ratio_upper);
        assert!(r.ratio_upper <= 594.0);
    }

    #[test]
    fn large_l_never_wraps() {
        let r = coupled_2l_check(1, 64, 32, 100, 2).unwrap();
        assert_eq!(r.short_local_time, 100);
        assert_eq!(r.short_local_time_mismatches, 0);
    }
}
