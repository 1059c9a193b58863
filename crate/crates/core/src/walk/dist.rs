use num_rational::Ratio;
use serde::Serialize;

use crate::group::{Dihedral, Order};
use crate::{Error, Result};

pub type Prob = Ratio<u64>;

/// Largest word length with exact `u64` rationals (denominators are `2^t`).
pub const MAX_T: u64 = 62;

/// Distribution of the distance from `Y_t` to `{e, a}` in `D_l`, where `Y_t`
/// is the alternating word `b^e1 a^e2 b^e3 ...` of `t` letters with i.i.d.
/// fair exponents. Entry `x` is the probability of distance `x`, `0 <= x < l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DihedralDist {
    pub t: u64,
    pub l: u64,
    #[serde(serialize_with = "ser_probs")]
    pub p: Vec<Prob>,
}

fn ser_probs<S: serde::Serializer>(p: &[Prob], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
}

impl DihedralDist {
    pub fn total(&self) -> Prob {
        self.p.iter().copied().sum()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.p.windows(2).all(|w| w[0] >= w[1])
    }
}

fn check_args(t: u64, l: u64) -> Result<()> {
    if l < 2 {
        return Err(Error::Usage(format!("dihedral distribution needs l >= 2, got {l}")));
    }
    if t > MAX_T {
        return Err(Error::Usage(format!("t = {t} exceeds the exact range t <= {MAX_T}")));
    }
    Ok(())
}

/// Exact distribution by the parity-split recursion. Even steps (letters `b`)
/// average the pairs `(2x, 2x + 1)`; odd steps (letters `a`) average
/// `(2x + 1, 2x + 2)` and leave an unpaired end fixed.
pub fn dihedral_dist(t: u64, l: u64) -> Result<DihedralDist> {
    check_args(t, l)?;
    let n = l as usize;
    let half = Prob::new(1, 2);
    let mut p = vec![Prob::from_integer(0); n];
    p[0] = Prob::from_integer(1);
    for s in 0..t {
        let mut x = (s % 2) as usize;
        while x + 1 < n {
            let avg = (p[x] + p[x + 1]) * half;
            p[x] = avg;
            p[x + 1] = avg;
            x += 2;
        }
    }
    Ok(DihedralDist { t, l, p })
}

/// Exact law of the norm `|Y_t|` in `D_l`, for the alternating word that
/// starts with `a` (`a_first`) or with `b`. Entry `r` is `P(|Y_t| = r)`,
/// `0 <= r <= l`.
pub fn norm_law(t: u64, l: u64, a_first: bool) -> Result<Vec<Prob>> {
    check_args(t, l)?;
    let ord = Order::Finite(l);
    let size = 2 * l as usize;
    let half = Prob::new(1, 2);
    let mut mass = vec![Prob::from_integer(0); size];
    mass[0] = Prob::from_integer(1);
    for s in 0..t {
        let use_a = (s % 2 == 0) == a_first;
        let mut next = vec![Prob::from_integer(0); size];
        for (code, &m) in mass.iter().enumerate() {
            if m == Prob::from_integer(0) {
                continue;
            }
            let g = Dihedral::from_code(code as i64, ord);
            let h = if use_a { g.mul_a(ord) } else { g.mul_b(ord) };
            next[code] += m * half;
            next[h.code() as usize] += m * half;
        }
        mass = next;
    }
    let mut law = vec![Prob::from_integer(0); l as usize + 1];
    for (code, m) in mass.into_iter().enumerate() {
        law[Dihedral::from_code(code as i64, ord).norm(ord) as usize] += m;
    }
    Ok(law)
}

/// The two sides of `P(|Y_t| in [3l/2, 2l]) <= P(|Y_t| in [l/2, 3l/2])` in
/// `D_{2l}`, for the word starting with `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ineq32 {
    pub t: u64,
    pub l: u64,
    #[serde(serialize_with = "ser_prob")]
    pub left: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub right: Prob,
    /// Right side with the shared endpoint `3l/2` removed.
    #[serde(serialize_with = "ser_prob")]
    pub right_open: Prob,
    /// Bounds read off the distance law only, via `d <= |Y_t| <= d + 1`:
    /// an upper bound for the left side and a lower bound for the right.
    #[serde(serialize_with = "ser_prob")]
    pub left_from_distance: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub right_from_distance: Prob,
    pub holds: bool,
    pub equality: bool,
}

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", p.numer(), p.denom()))
}

/// Evaluate both sides exactly. `holds` requires the inequality with the
/// endpoint `3l/2` counted on both sides and with it counted on the left
/// only, and also the distance-only reading.
pub fn ineq_32(t: u64, l: u64) -> Result<Ineq32> {
    if l < 4 {
        return Err(Error::Usage(format!("inequality (3/2) needs l >= 4, got {l}")));
    }
    let law = norm_law(t, 2 * l, true)?;
    let sum = |f: &dyn Fn(u64) -> bool| -> Prob {
        law.iter().enumerate().filter(|(r, _)| f(*r as u64)).map(|(_, &p)| p).sum()
    };
    // Doubled comparisons keep l/2 and 3l/2 exact for odd l.
    let left = sum(&|r| 2 * r >= 3 * l && r <= 2 * l);
    let right = sum(&|r| 2 * r >= l && 2 * r <= 3 * l);
    let right_open = sum(&|r| 2 * r >= l && 2 * r < 3 * l);

    // The word starting with `a` has the distance law of the `b`-start word
    // one letter shorter: the first `a` never changes the distance to {e, a}.
    let d = if t == 0 { dihedral_dist(0, 2 * l)? } else { dihedral_dist(t - 1, 2 * l)? };
    let dsum = |f: &dyn Fn(u64) -> bool| -> Prob {
        d.p.iter().enumerate().filter(|(x, _)| f(*x as u64)).map(|(_, &p)| p).sum()
    };
    let left_from_distance = dsum(&|x| 2 * (x + 1) >= 3 * l);
    let right_from_distance = dsum(&|x| 2 * x >= l && 2 * (x + 1) <= 3 * l);

    let holds = left <= right && left <= right_open && left_from_distance <= right_from_distance;
    Ok(Ineq32 {
        t,
        l,
        left,
        right,
        right_open,
        left_from_distance,
        right_from_distance,
        holds,
        equality: left == right,
    })
}

/// Whether inequality (3/2) holds at `(t, l)`; see [`ineq_32`].
pub fn check_ineq_32(t: u64, l: u64) -> Result<bool> {
    Ok(ineq_32(t, l)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: evaluate every word of the template.
    fn enumerate(t: u64, l: u64, a_first: bool) -> Vec<Prob> {
        let ord = Order::Finite(l);
        let mut counts = vec![0u64; l as usize];
        for mask in 0..1u64 << t {
            let mut y = Dihedral::IDENTITY;
            for s in 0..t {
                if mask >> s & 1 == 1 {
                    y = if (s % 2 == 0) == a_first { y.mul_a(ord) } else { y.mul_b(ord) };
                }
            }
            let d = y.norm(ord).min(Dihedral::a(ord).mul(y, ord).norm(ord));
            counts[d as usize] += 1;
        }
        counts.iter().map(|&c| Prob::new(c, 1 << t)).collect()
    }

    #[test]
    fn start_is_a_point_mass() {
        let d = dihedral_dist(0, 5).unwrap();
        assert_eq!(d.p[0], Prob::from_integer(1));
        assert!(d.p[1..].iter().all(|p| *p == Prob::from_integer(0)));
    }

    #[test]
    fn recursion_matches_enumeration() {
        for l in 2..=8 {
            for t in 0..=12 {
                assert_eq!(dihedral_dist(t, l).unwrap().p, enumerate(t, l, false), "t={t} l={l}");
                if t >= 1 {
                    assert_eq!(dihedral_dist(t - 1, l).unwrap().p, enumerate(t, l, true), "a-first t={t} l={l}");
                }
            }
        }
    }

    #[test]
    fn sums_to_one_and_is_monotone() {
        for l in 2..=16 {
            for t in 0..=20 {
                let d = dihedral_dist(t, l).unwrap();
                assert_eq!(d.total(), Prob::from_integer(1));
                assert!(d.is_non_increasing(), "t={t} l={l}: {:?}", d.p);
            }
        }
    }

    #[test]
    fn boundary_entries_are_fixed_by_a_steps() {
        for l in [4u64, 6, 8] {
            for t in (1..20).step_by(2) {
                let before = dihedral_dist(t, l).unwrap();
                let after = dihedral_dist(t + 1, l).unwrap();
                assert_eq!(after.p[0], before.p[0]);
                assert_eq!(after.p[l as usize - 1], before.p[l as usize - 1]);
            }
        }
    }

    #[test]
    fn norm_law_matches_enumeration() {
        for l in 2..=6u64 {
            for t in 0..=10 {
                let law = norm_law(t, l, true).unwrap();
                let ord = Order::Finite(l);
                let mut counts = vec![0u64; l as usize + 1];
                for mask in 0..1u64 << t {
                    let mut y = Dihedral::IDENTITY;
                    for s in 0..t {
                        if mask >> s & 1 == 1 {
                            y = if s % 2 == 0 { y.mul_a(ord) } else { y.mul_b(ord) };
                        }
                    }
                    counts[y.norm(ord) as usize] += 1;
                }
                let want: Vec<Prob> = counts.iter().map(|&c| Prob::new(c, 1 << t)).collect();
                assert_eq!(law, want);
            }
        }
    }

    #[test]
    fn ineq_holds_on_even_grid() {
        for l in (4..=16).step_by(2) {
            for t in 0..=20 {
                let r = ineq_32(t, l).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
    }

    #[test]
    fn ineq_at_time_zero() {
        let r = ineq_32(0, 6).unwrap();
        assert_eq!(r.left, Prob::from_integer(0));
        assert!(r.holds);
    }

    #[test]
    fn small_l_rejected() {
        assert!(check_ineq_32(3, 3).is_err());
        assert!(dihedral_dist(3, 1).is_err());
    }
}
