//! The acceptance criteria as runnable checks, shared by `lampspeed verify`
//! and the acceptance test target.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::{balls_coincide, dgen_constants, first_difference, DgenBudget, BALL_NODE_CAP};
use crate::group::{DiagonalSpec, Dihedral, FreeWord, GroupSpec, Letter, MarkedGroup, Order, PairGroup};
use crate::metric::{lemma_max_bounds, range_of, LengthOracle};
use crate::scheduler::{build_schedule, CheckKind, EpsilonSpec, MonteCarlo, Profile, ScheduleConfig};
use crate::walk::{coupled_2l_check, dihedral_dist, estimate_speed_curve, fit_exponent, ineq_32, Bound, Prob, SpeedCurve};
use crate::{Error, Result};

const INF: Order = Order::Infinite;

/// Seed shared by every simulation in the suite.
pub const SUITE_SEED: u64 = 20_240_601;

/// Sample sizes. `full` is the acceptance profile.
#[derive(Clone, Copy, Debug)]
pub struct Scale {
    pub walkers: u64,
    pub coupling_samples: u64,
    pub sandwich_elements: usize,
    pub dgen_words: usize,
    pub schedule_profile: Profile,
}

impl Scale {
    pub fn full() -> Scale {
        Scale { walkers: 2000, coupling_samples: 10_000, sandwich_elements: 200, dgen_words: 10_000, schedule_profile: Profile::Desk }
    }

    pub fn smoke() -> Scale {
        Scale { walkers: 400, coupling_samples: 1000, sandwich_elements: 64, dgen_words: 1000, schedule_profile: Profile::Smoke }
    }

    pub fn for_profile(p: Profile) -> Scale {
        match p {
            Profile::Smoke => Scale::smoke(),
            _ => Scale::full(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(id: u32, name: &str, f: impl FnOnce() -> (bool, String)) -> CriterionResult {
    let start = Instant::now();
    let (pass, detail) = f();
    CriterionResult { id, name: name.into(), pass, detail, seconds: start.elapsed().as_secs_f64() }
}

fn dyadic(a: u32, b: u32) -> Vec<u64> {
    (a..=b).map(|j| 1u64 << j).collect()
}

const SPEED_WINDOW: (u64, u64) = (1 << 7, 1 << 13);

/// Slope window for `Gamma(0, 2, inf)`.
pub const DIFFUSIVE_SLOPE: (f64, f64) = (0.44, 0.56);
/// Slope window for `Gamma(k, inf, inf)`.
pub const DINF_SLOPE: (f64, f64) = (0.69, 0.81);
/// Largest admissible mean ratio in the coupling check.
pub const COUPLING_RATIO_MAX: f64 = 594.0;

fn speed_curve(spec: GroupSpec, scale: Scale, parallelism: usize) -> Result<SpeedCurve> {
    estimate_speed_curve(&DiagonalSpec::single(spec), &dyadic(7, 13), scale.walkers, SUITE_SEED, parallelism)
}

fn slopes(spec: GroupSpec, scale: Scale, parallelism: usize, lo: f64, hi: f64) -> Result<(bool, String)> {
    let c = speed_curve(spec, scale, parallelism)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for b in [Bound::Lower, Bound::Upper] {
        let f = fit_exponent(&c, SPEED_WINDOW, b)?;
        ok &= (lo..=hi).contains(&f.slope);
        parts.push(format!("{b:?} {:.3}+-{:.3}", f.slope, f.ci));
    }
    Ok((ok, format!("{spec}: {}", parts.join(", "))))
}

fn or_fail(r: Result<(bool, String)>) -> (bool, String) {
    r.unwrap_or_else(|e| (false, format!("error: {e}")))
}

/// Log-log slope of both curves of `Gamma(0, 2, inf)` in `[0.44, 0.56]`.
pub fn criterion_1(scale: Scale, parallelism: usize) -> CriterionResult {
    timed(1, "diffusive baseline", || or_fail(slopes(GroupSpec::base_lamplighter(), scale, parallelism, DIFFUSIVE_SLOPE.0, DIFFUSIVE_SLOPE.1)))
}

/// Slopes of `Gamma(0, inf, inf)` and `Gamma(4, inf, inf)` in `[0.69, 0.81]`.
pub fn criterion_2(scale: Scale, parallelism: usize) -> CriterionResult {
    timed(2, "D_inf exponent", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for k in [0, 4] {
            let (p, d) = or_fail(slopes(GroupSpec::gamma(k, INF, INF), scale, parallelism, DINF_SLOPE.0, DINF_SLOPE.1));
            ok &= p;
            parts.push(d);
        }
        (ok, parts.join("; "))
    })
}

/// Coupled walks on `Gamma(k, 2l, inf)` and `Gamma(k, l, inf)`: no pointwise
/// violation and mean ratio at most 594.
pub fn criterion_3(scale: Scale) -> CriterionResult {
    timed(3, "2l coupling", || {
        let mut ok = true;
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for l in [2, 4, 8] {
            for k in [0, 2] {
                for n in [64, 256] {
                    match coupled_2l_check(k, l, n, scale.coupling_samples, SUITE_SEED) {
                        Ok(r) => {
                            ok &= r.violations == 0 && r.ratio_upper <= COUPLING_RATIO_MAX;
                            worst = worst.max(r.ratio_upper);
                            if r.violations > 0 {
                                parts.push(format!("k={k} l={l} n={n}: {} violations", r.violations));
                            }
                        }
                        Err(e) => {
                            ok = false;
                            parts.push(format!("k={k} l={l} n={n}: {e}"));
                        }
                    }
                }
            }
        }
        (ok, format!("12 configurations, largest mean ratio {worst:.3}; {}", if parts.is_empty() { "no violations".into() } else { parts.join(", ") }))
    })
}

/// Ball coincidences with the lamplighter and a distinguishing word for
/// `Gamma(1, 4, inf)`.
pub fn criterion_4() -> CriterionResult {
    timed(4, "ball suite", || {
        let base = GroupSpec::base_lamplighter();
        let mut checked = 0;
        let mut bad = Vec::new();
        for k in 1..=7u64 {
            let r = ((k - 1) / 2) as u32;
            for l in [Order::Finite(3), Order::Finite(4), Order::Finite(5), INF] {
                for m in [Order::Finite(2 * k + 1), INF] {
                    let g = GroupSpec::gamma(k, l, m);
                    match balls_coincide(&g, &base, r, BALL_NODE_CAP) {
                        Ok(c) if c.coincide => checked += 1,
                        Ok(_) => bad.push(format!("{g} at R={r}")),
                        Err(e) => bad.push(format!("{g}: {e}")),
                    }
                }
            }
        }
        for k in 1..=5 {
            let g = GroupSpec::gamma(k, Order::Finite(2), INF);
            for r in 0..=4 {
                match balls_coincide(&g, &base, r, BALL_NODE_CAP) {
                    Ok(c) if c.coincide => checked += 1,
                    Ok(_) => bad.push(format!("{g} at R={r}")),
                    Err(e) => bad.push(format!("{g}: {e}")),
                }
            }
        }
        let witness = first_difference(&GroupSpec::gamma(1, Order::Finite(4), INF), &base, 8, BALL_NODE_CAP);
        let wdesc = match &witness {
            Ok(Some(c)) => format!("witness {} at R={}", c.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(), c.radius),
            Ok(None) => "no witness up to R=8".into(),
            Err(e) => format!("witness search: {e}"),
        };
        let ok = bad.is_empty() && matches!(witness, Ok(Some(_)));
        (ok, format!("{checked} coincidences; {wdesc}{}", if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join(", ")) }))
    })
}

/// Brute-force law of the distance to `{e, a}` for `b a b a ...` words.
pub fn enumerate_distance_law(t: u64, l: u64) -> Vec<Prob> {
    let ord = Order::Finite(l);
    let mut counts = vec![0u64; l as usize];
    for mask in 0..1u64 << t {
        let mut y = Dihedral::IDENTITY;
        for s in 0..t {
            if mask >> s & 1 == 1 {
                y = if s % 2 == 0 { y.mul_b(ord) } else { y.mul_a(ord) };
            }
        }
        let d = y.norm(ord).min(Dihedral::a(ord).mul(y, ord).norm(ord));
        counts[d as usize] += 1;
    }
    counts.iter().map(|&c| Prob::new(c, 1 << t)).collect()
}

/// Exact distribution checks with zero tolerance.
pub fn criterion_5() -> CriterionResult {
    timed(5, "dihedral distribution and (3/2)", || {
        let mut bad = Vec::new();
        let mut n = 0;
        for l in 2..=8 {
            for t in 0..=12 {
                n += 1;
                if dihedral_dist(t, l).map(|d| d.p) .ok() != Some(enumerate_distance_law(t, l)) {
                    bad.push(format!("recursion t={t} l={l}"));
                }
            }
        }
        for l in 2..=16 {
            for t in 0..=20 {
                n += 1;
                match dihedral_dist(t, l) {
                    Ok(d) if d.is_non_increasing() && d.total() == Prob::from_integer(1) => {}
                    _ => bad.push(format!("monotone t={t} l={l}")),
                }
            }
        }
        for l in 4..=16 {
            for t in 0..=20 {
                n += 1;
                if !ineq_32(t, l).map(|r| r.holds).unwrap_or(false) {
                    bad.push(format!("(3/2) t={t} l={l}"));
                }
            }
        }
        (bad.is_empty(), format!("{n} exact checks; {}", if bad.is_empty() { "all hold".into() } else { bad.join(", ") }))
    })
}

/// Exact lengths inside the lamp bounds and above the range extent.
pub fn criterion_6(scale: Scale) -> CriterionResult {
    timed(6, "length sandwich", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
        let specs: Vec<GroupSpec> = (0..=3)
            .flat_map(|k| [Order::Finite(2), Order::Finite(3), Order::Finite(4), INF].map(|l| GroupSpec::gamma(k, l, INF)))
            .collect();
        let mut bad = Vec::new();
        let mut n = 0;
        for (j, spec) in specs.iter().enumerate() {
            let per = scale.sandwich_elements / specs.len() + usize::from(j < scale.sandwich_elements % specs.len());
            let oracle = match LengthOracle::sws(spec, 2_000_000) {
                Ok(o) => o,
                Err(e) => return (false, format!("{spec}: {e}")),
            };
            for _ in 0..per {
                let steps = rng.gen_range(1..=8);
                let mut g = spec.identity();
                for _ in 0..steps {
                    g = spec.mul(&g, &spec.step_elem(rng.gen::<u64>()));
                }
                n += 1;
                let exact = match oracle.length(&g) {
                    Ok(x) => x as u64,
                    Err(e) => {
                        bad.push(format!("{spec} {g}: {e}"));
                        continue;
                    }
                };
                let b = lemma_max_bounds(spec, &g).expect("level-one infinite spec");
                let r = range_of(spec, &g).expect("level-one infinite spec");
                if !(b.lower <= exact && exact <= b.upper && exact >= r.extent) {
                    bad.push(format!("{spec} {g}: exact {exact}, bounds [{}, {}], range {}", b.lower, b.upper, r.extent));
                }
            }
        }
        (bad.is_empty(), format!("{n} elements; {}", if bad.is_empty() { "no violations".into() } else { bad.join("; ") }))
    })
}

/// dgen constants for `F = Gamma(0, 2, 2)`: sandwich on random words and
/// locality under a ball-coincident replacement of `G`.
pub fn criterion_7(scale: Scale) -> CriterionResult {
    timed(7, "dgen constants", || {
        let f = DiagonalSpec::single(GroupSpec::gamma(0, Order::Finite(2), Order::Finite(2)));
        let g = GroupSpec::base_lamplighter();
        let g2 = GroupSpec::gamma(9, Order::Finite(5), Order::Finite(20));
        let run = || -> Result<(bool, String)> {
            let c = dgen_constants(&f, &g, &DgenBudget::default())?;
            let pair = PairGroup { first: g, second: f.clone() };
            let og = LengthOracle::letters(&g, 2_000_000)?;
            let od = LengthOracle::letters(&pair, 2_000_000)?;
            let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
            let mut violations = 0;
            for _ in 0..scale.dgen_words {
                let len = rng.gen_range(0..=8);
                let w = FreeWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect());
                let lg = og.length(&g.eval(&w))? as u64;
                let ld = od.length(&pair.eval(&w))? as u64;
                violations += !(lg <= ld && ld <= c.c1 * lg + c.c2) as u64;
            }
            let c2 = dgen_constants(&f, &g2, &DgenBudget::default())?;
            let local = (c.c1, c.c2) == (c2.c1, c2.c2);
            let coincide = if c.radius <= 4 { balls_coincide(&g, &g2, c.radius as u32, BALL_NODE_CAP)?.coincide } else { true };
            Ok((
                violations == 0 && local && coincide,
                format!(
                    "C1={} C2={} R={}; {} words, {violations} violations; {g2}: C1={} C2={}, balls coincide at R: {coincide}",
                    c.c1, c.c2, c.radius, scale.dgen_words, c2.c1, c2.c2
                ),
            ))
        };
        or_fail(run())
    })
}

/// The pinned schedule configuration of criteria 8 and 9.
pub fn schedule_config(profile: Profile) -> ScheduleConfig {
    ScheduleConfig { lambda: 0.65, level: 1, epsilon: EpsilonSpec::DESK, stages: 1, profile, seed: SUITE_SEED }
}

/// A one-stage configuration whose arithmetic condition holds from `n = 2`,
/// so every part of the pipeline produces output.
pub fn wide_schedule_config() -> ScheduleConfig {
    ScheduleConfig {
        epsilon: EpsilonSpec::ConstantRamp { c: 600.0, ramp: 1 << 20 },
        ..schedule_config(Profile::Smoke)
    }
}

/// Schedule JSON and final curve CSV, or the error text.
pub fn schedule_payload(cfg: &ScheduleConfig, parallelism: usize) -> std::result::Result<(String, String), String> {
    let src = MonteCarlo { walkers: cfg.profile.params().walkers, parallelism };
    let (s, c) = build_schedule(cfg, &src).map_err(|e| e.to_string())?;
    Ok((s.to_json().map_err(|e| e.to_string())?, c.to_csv_string().map_err(|e| e.to_string())?))
}

/// One-stage schedule at `lambda = 0.65`: valid stage parameters and the
/// two bracketing checkpoints.
pub fn criterion_8(scale: Scale, parallelism: usize) -> CriterionResult {
    timed(8, "end-to-end schedule", || {
        let src = MonteCarlo { walkers: scale.schedule_profile.params().walkers, parallelism };
        match build_schedule(&schedule_config(scale.schedule_profile), &src) {
            Err(e) => (false, format!("{e}")),
            Ok((s, _)) => {
                let Some(st) = s.stages.first() else { return (false, "no stage produced".into()) };
                let inv = st.invariant_violations(0);
                let witness: Vec<_> = st.checkpoints.iter().filter(|c| c.kind == CheckKind::WitnessLower).collect();
                let post: Vec<_> = st.checkpoints.iter().filter(|c| c.kind == CheckKind::PostWindowUpper).collect();
                let ok = inv.is_empty()
                    && !witness.is_empty()
                    && !post.is_empty()
                    && witness.iter().chain(&post).all(|c| c.holds);
                (
                    ok,
                    format!(
                        "n1={} k1={} l1={} N1={} m1={}; witness {}; post-window {}/{} hold; invariants: {}",
                        st.n_s,
                        st.k_s,
                        st.l_s,
                        st.big_n_s,
                        st.m_s,
                        witness.iter().all(|c| c.holds),
                        post.iter().filter(|c| c.holds).count(),
                        post.len(),
                        if inv.is_empty() { "ok".into() } else { inv.join(", ") }
                    ),
                )
            }
        }
    })
}

/// Parallelism 1 and 8 give byte-identical payloads for criteria 1 and 8.
/// When the criterion 8 configuration stops with an error, its report is
/// compared and the wide-epsilon schedule supplies the JSON and CSV payloads.
pub fn criterion_9(scale: Scale) -> CriterionResult {
    timed(9, "determinism", || {
        let csv = |p| speed_curve(GroupSpec::base_lamplighter(), scale, p).and_then(|c| c.to_csv_string());
        let curves_equal = match (csv(1), csv(8)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        let cfg = schedule_config(scale.schedule_profile);
        let a = schedule_payload(&cfg, 1);
        let schedule_equal = a == schedule_payload(&cfg, 8);
        let kind = if a.is_ok() { "schedule JSON and curve" } else { "schedule error report" };
        let wide = schedule_payload(&wide_schedule_config(), 1);
        let wide_equal = wide.is_ok() && wide == schedule_payload(&wide_schedule_config(), 8);
        (
            curves_equal && schedule_equal && wide_equal,
            format!("speed CSV identical: {curves_equal}; {kind} identical: {schedule_equal}; wide-epsilon schedule JSON and curve identical: {wide_equal}"),
        )
    })
}

pub const SUITES: [&str; 9] = ["all", "speed", "coupling", "balls", "dist", "metric", "dgen", "schedule", "determinism"];

/// Run a named suite.
pub fn run_suite(name: &str, scale: Scale, parallelism: usize) -> Result<Vec<CriterionResult>> {
    let ids: Vec<u32> = match name {
        "all" => (1..=9).collect(),
        "speed" => vec![1, 2],
        "coupling" => vec![3],
        "balls" => vec![4],
        "dist" => vec![5],
        "metric" => vec![6],
        "dgen" => vec![7],
        "schedule" => vec![8],
        "determinism" => vec![9],
        _ => return Err(Error::Usage(format!("unknown suite '{name}' (one of {})", SUITES.join(", ")))),
    };
    Ok(ids.into_iter().map(|id| run_criterion(id, scale, parallelism)).collect())
}

pub fn run_criterion(id: u32, scale: Scale, parallelism: usize) -> CriterionResult {
    match id {
        1 => criterion_1(scale, parallelism),
        2 => criterion_2(scale, parallelism),
        3 => criterion_3(scale),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(scale),
        7 => criterion_7(scale),
        8 => criterion_8(scale, parallelism),
        9 => criterion_9(scale),
        _ => panic!("no criterion {id}"),
    }
}
