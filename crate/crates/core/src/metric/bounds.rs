use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use super::construct;
use crate::group::{Dihedral, GroupSpec, LampLetter, Order, WreathElem};

/// Decomposition `f = b^e1 (ab)^L a^e2` of a lamp value along a shortest word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ell {
    pub len: u64,
    pub eps_before: bool,
    pub eps_after: bool,
}

/// `L` and the boundary letters of a lamp value. On a tie the reading
/// starting with `b` is used, which never has the larger `L`.
pub fn ell(d: Dihedral, l: Order) -> Ell {
    let n = d.norm(l);
    if n == 0 {
        return Ell { len: 0, eps_before: false, eps_after: false };
    }
    let b_start = d.is_tie(l) || d.first_letter(l) == Some(LampLetter::B);
    match (b_start, n.is_multiple_of(2)) {
        (false, true) => Ell { len: n / 2, eps_before: false, eps_after: false },
        (false, false) => Ell { len: (n - 1) / 2, eps_before: false, eps_after: true },
        (true, true) => Ell { len: (n - 2) / 2, eps_before: true, eps_after: true },
        (true, false) => Ell { len: (n - 1) / 2, eps_before: true, eps_after: false },
    }
}

fn level_one_infinite(spec: &GroupSpec) -> Result<()> {
    if spec.level() != 1 {
        return Err(Error::Spec(format!("lamp bounds need a level-one group, got {spec}")));
    }
    if spec.m().is_finite() {
        return Err(Error::Spec(format!("lamp bounds need an infinite base, got {spec}")));
    }
    Ok(())
}

/// `L` at every lit lamp.
pub fn ell_function(spec: &GroupSpec, g: &WreathElem) -> Result<BTreeMap<i64, Ell>> {
    level_one_infinite(spec)?;
    Ok(g.dihedral_lamps().map(|(s, d)| (s, ell(d, spec.l()))).collect())
}

/// Sites the walker must visit, with their spread.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeInfo {
    pub sites: BTreeSet<i64>,
    pub min: i64,
    pub max: i64,
    pub extent: u64,
}

fn required_sites(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order) -> RangeInfo {
    sites_with(position, lamps, k, l, false)
}

// In `D_1` we have `a = b`, so a lamp can be lit from either side and the
// required set is empty; with `route_all` its own site is added instead,
// which is what an explicit word visits.
pub(crate) fn sites_with(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order, route_all: bool) -> RangeInfo {
    let mut sites = BTreeSet::from([0, position]);
    for &(x, f) in lamps {
        if route_all && l == Order::Finite(1) && !f.is_identity() {
            sites.insert(x);
        }
        let needs_a = !f.in_b_subgroup(l);
        let needs_b = !f.in_a_subgroup(l);
        if needs_a || (k == 0 && !f.is_identity()) {
            sites.insert(x);
        }
        if needs_b {
            sites.insert(x - k as i64);
        }
    }
    let min = *sites.first().unwrap();
    let max = *sites.last().unwrap();
    RangeInfo { sites, min, max, extent: (max - min) as u64 }
}

/// Sites that any word for `g` must visit: `0`, the final position, every
/// `x` whose lamp needs an `a`, every `x - k` whose lamp needs a `b`.
pub fn range_of(spec: &GroupSpec, g: &WreathElem) -> Result<RangeInfo> {
    level_one_infinite(spec)?;
    let lamps: Vec<_> = g.dihedral_lamps().collect();
    Ok(required_sites(g.position(), &lamps, spec.k(), spec.l()))
}

/// `sum over x of 2 * max { L(y) : x < y <= x + k }` for sparse `(y, L(y))`.
pub fn window_sum(values: &[(i64, u64)], k: u64) -> u64 {
    let mut total = 0;
    sweep_windows(values, k, &[], |_, len, top| total += 2 * top * len);
    total
}

// Walk the integer line in maximal runs `[x, x + len)` on which the window
// `(x, x + k]` holds a constant maximum `top`. `cuts` adds extra run breaks.
fn sweep_windows(values: &[(i64, u64)], k: u64, cuts: &[i64], mut f: impl FnMut(i64, u64, u64)) {
    let k = k as i64;
    let mut events: Vec<(i64, u8, u64)> = Vec::with_capacity(2 * values.len() + cuts.len());
    for &(y, v) in values.iter().filter(|(_, v)| *v > 0) {
        events.push((y - k, 1, v));
        events.push((y, 0, v));
    }
    events.extend(cuts.iter().map(|&c| (c, 2, 0)));
    events.sort_unstable();
    let mut live: BTreeMap<u64, usize> = BTreeMap::new();
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            let (_, kind, v) = events[i];
            match kind {
                1 => *live.entry(v).or_default() += 1,
                0 => {
                    let c = live.get_mut(&v).expect("leaving value was never entered");
                    *c -= 1;
                    if *c == 0 {
                        live.remove(&v);
                    }
                }
                _ => {}
            }
            i += 1;
        }
        if let Some(next) = events.get(i) {
            let top = live.last_key_value().map_or(0, |(&t, _)| t);
            f(x, (next.0 - x) as u64, top);
        }
    }
}

// Edge `(x, x + 1)` is crossed at least `N_y - 1` times for every lamp `y`
// with `y - k <= x < y` (its letters alternate between visits to `y` and
// `y - k`), at least once if it separates `0` from the final position and
// twice if it lies elsewhere inside the required range. The crossing count
// is odd exactly on separating edges.
fn crossing_lower(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order, range: &RangeInfo) -> u64 {
    let values: Vec<(i64, u64)> = lamps.iter().map(|&(y, f)| (y, f.norm(l).saturating_sub(1))).collect();
    let (s0, s1) = (position.min(0), position.max(0));
    let cuts = [range.min, range.max, s0, s1];
    let mut total = 0;
    sweep_windows(&values, k, &cuts, |x, len, top| {
        let separating = s0 <= x && x < s1;
        let inside = range.min <= x && x < range.max;
        let cover = if separating { 1 } else if inside { 2 } else { 0 };
        let mut c = top.max(cover);
        if c % 2 != separating as u64 {
            c += 1;
        }
        total += c * len;
    });
    total
}

/// Length of the shortest nearest-neighbour path from `0` to `p` that
/// visits every site of `[lo, hi]` (which must contain `0` and `p`).
pub fn covering_length(p: i64, lo: i64, hi: i64) -> u64 {
    debug_assert!(lo <= p.min(0) && hi >= p.max(0));
    let span = hi - lo;
    (span + (hi - p - lo).min(hi + p - lo)) as u64
}

/// Lower and upper bounds on a word length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthBounds {
    pub lower: u64,
    pub upper: u64,
}

impl LengthBounds {
    pub fn exact(n: u64) -> Self {
        LengthBounds { lower: n, upper: n }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lower <= n && n <= self.upper
    }
}

// Offset 0: a visit to `x` carries at most four letters, two at the first
// or last time, so `x` needs `V_x >= (N_x + 2[x = 0] + 2[x = p]) / 4` visits
// and has degree `2 V_x - [x = 0] - [x = p]` in the path. The path length is
// half the total degree, and each degree is also at least what the covering
// path spends there.
fn degree_lower(position: i64, lamps: &[(i64, Dihedral)], l: Order, range: &RangeInfo) -> u64 {
    let (s0, s1) = (position.min(0), position.max(0));
    let cover_edge = |x: i64| {
        if s0 <= x && x < s1 {
            1
        } else if range.min <= x && x < range.max {
            2
        } else {
            0
        }
    };
    let cover = covering_length(position, range.min, range.max);
    let mut excess = 0u64;
    for &(x, f) in lamps {
        let ends = (x == 0) as u64 + (x == position) as u64;
        let visits = (f.norm(l) + 2 * ends).div_ceil(4);
        let degree = (2 * visits).saturating_sub(ends);
        let spent = cover_edge(x - 1) + cover_edge(x);
        excess += degree.saturating_sub(spent);
    }
    cover + excess.div_ceil(2)
}

/// Lamp-counting bounds from the data of a level-one element over `Z`.
pub(crate) fn lemma_from_parts(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order) -> LengthBounds {
    if lamps.is_empty() && position == 0 {
        return LengthBounds::exact(0);
    }
    let range = required_sites(position, lamps, k, l);
    let extent = range.extent;
    if k == 0 {
        let quarters: u64 = lamps.iter().map(|(_, f)| f.norm(l).div_ceil(4)).sum();
        return LengthBounds {
            lower: degree_lower(position, lamps, l, &range).max(quarters.saturating_sub(1)),
            upper: 5 * extent + 2 * quarters + 2,
        };
    }
    let high: Vec<(i64, u64)> = lamps.iter().map(|&(y, f)| (y, f.norm(l) / 2)).collect();
    let route = sites_with(position, lamps, k, l, true).extent;
    let bump = if route == 0 { 2 } else { 0 };
    LengthBounds {
        lower: crossing_lower(position, lamps, k, l, &range),
        upper: window_sum(&high, k) + 5 * route + bump,
    }
}

/// Lemma bounds tightened by the covering path and step parity, with the
/// length of an explicit word as upper bound; exact when `l = 2` or `k = 0`.
pub(crate) fn refined_from_parts(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order) -> LengthBounds {
    let base = lemma_from_parts(position, lamps, k, l);
    if base.upper == 0 {
        return base;
    }
    let range = required_sites(position, lamps, k, l);
    let cover = covering_length(position, range.min, range.max);
    let upper = construct(position, lamps, k, l).len();
    if l == Order::Finite(2) || k == 0 {
        return LengthBounds::exact(upper);
    }
    // Every step moves the walker by exactly one site, and a non-trivial
    // element at position 0 needs at least two steps.
    let parity = position.rem_euclid(2) as u64;
    let mut lower = base.lower.max(cover).max(if position == 0 { 2 } else { 0 });
    if lower % 2 != parity {
        lower += 1;
    }
    LengthBounds { lower, upper }
}

/// Lamp-counting bounds for a level-one element over `Z`.
///
/// Lower: per-edge crossing counts (each lamp `y` forces `N_y - 1` crossings
/// of every edge between `y - k` and `y`, the required range forces one or
/// two, rounded to the parity fixed by the endpoints). Upper: twice the
/// window maxima of `L` plus five times the range. For `k = 0` lamps are
/// counted four letters per visit instead.
pub fn lemma_max_bounds(spec: &GroupSpec, g: &WreathElem) -> Result<LengthBounds> {
    level_one_infinite(spec)?;
    let lamps: Vec<_> = g.dihedral_lamps().collect();
    Ok(lemma_from_parts(g.position(), &lamps, spec.k(), spec.l()))
}

/// [`lemma_max_bounds`] tightened by the covering path and step parity, with
/// the length of [`construct`](super::construct) as upper bound.
pub fn refined_bounds(spec: &GroupSpec, g: &WreathElem) -> Result<LengthBounds> {
    level_one_infinite(spec)?;
    let lamps: Vec<_> = g.dihedral_lamps().collect();
    Ok(refined_from_parts(g.position(), &lamps, spec.k(), spec.l()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeWord, MarkedGroup};
    use crate::metric::LengthOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: Order = Order::Infinite;

    fn lamp(word: &str, l: Order) -> Dihedral {
        word.chars().fold(Dihedral::IDENTITY, |x, c| if c == 'a' { x.mul_a(l) } else { x.mul_b(l) })
    }

    #[test]
    fn ell_on_small_words() {
        let e = |w: &str| {
            let x = ell(lamp(w, INF), INF);
            (x.len, x.eps_before as u8, x.eps_after as u8)
        };
        assert_eq!(e(""), (0, 0, 0));
        assert_eq!(e("a"), (0, 0, 1));
        assert_eq!(e("b"), (0, 1, 0));
        assert_eq!(e("ab"), (1, 0, 0));
        assert_eq!(e("ba"), (0, 1, 1));
        assert_eq!(e("bab"), (1, 1, 0));
        assert_eq!(e("ababa"), (2, 0, 1));
    }

    #[test]
    fn ell_reassembles_the_lamp() {
        for l in [Order::Finite(2), Order::Finite(3), Order::Finite(6), INF] {
            for code in 0..12 {
                let d = Dihedral::from_code(code, l);
                let x = ell(d, l);
                let mut w = String::new();
                if x.eps_before {
                    w.push('b');
                }
                for _ in 0..x.len {
                    w.push_str("ab");
                }
                if x.eps_after {
                    w.push('a');
                }
                assert_eq!(lamp(&w, l), d, "l = {l}, code {code}");
                assert_eq!(w.len() as u64, d.norm(l));
            }
        }
    }

    #[test]
    fn tie_uses_the_shorter_reading() {
        let l = Order::Finite(4);
        let d = lamp("abab", l);
        assert!(d.is_tie(l));
        assert_eq!(ell(d, l).len, 1);
    }

    #[test]
    fn window_sum_against_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let k = rng.gen_range(1..5u64);
            let mut vals: Vec<(i64, u64)> = (0..rng.gen_range(0..8))
                .map(|_| (rng.gen_range(-10..10), rng.gen_range(0..5)))
                .collect();
            vals.sort();
            vals.dedup_by_key(|v| v.0);
            let at = |y: i64| vals.iter().find(|v| v.0 == y).map_or(0, |v| v.1);
            let direct: u64 = (-30..30)
                .map(|x: i64| 2 * (x + 1..=x + k as i64).map(at).max().unwrap())
                .sum();
            assert_eq!(window_sum(&vals, k), direct);
        }
    }

    #[test]
    fn covering_length_examples() {
        assert_eq!(covering_length(0, 0, 0), 0);
        assert_eq!(covering_length(3, 0, 3), 3);
        assert_eq!(covering_length(0, -2, 3), 10);
        assert_eq!(covering_length(1, -2, 3), 9);
    }

    #[test]
    fn range_of_a_lamp_needing_both_letters() {
        let spec = GroupSpec::gamma(2, Order::Finite(3), INF);
        let g = spec.eval(&"tttabTTT".parse::<FreeWord>().unwrap());
        let r = range_of(&spec, &g).unwrap();
        assert_eq!(r.sites, BTreeSet::from([0, 3]));
        assert_eq!(r.extent, 3);
        assert!(range_of(&GroupSpec::gamma(0, Order::Finite(3), Order::Finite(5)), &WreathElem::identity()).is_err());
    }

    #[test]
    fn alternating_lamp_with_offset_two() {
        let spec = GroupSpec::gamma(2, INF, INF);
        // (ab)^3 at site 0: letters alternate between visits to 0 and -2.
        let g = WreathElem::from_parts(0, vec![(0, crate::group::Lamp::Dihedral(lamp("ababab", INF)))]);
        let b = lemma_max_bounds(&spec, &g).unwrap();
        assert_eq!((b.lower, b.upper), (12, 22));
    }

    #[test]
    fn single_lamp_crossed_once() {
        // One step lights `ab` at 0 and ends at -1.
        let spec = GroupSpec::gamma(1, Order::Finite(3), INF);
        let g = spec.eval(&"abTb".parse::<FreeWord>().unwrap());
        let b = refined_bounds(&spec, &g).unwrap();
        assert_eq!(b.lower, 1);
    }

    #[test]
    fn lone_switch_needs_two_steps() {
        let spec = GroupSpec::gamma(0, Order::Finite(2), INF);
        let g = spec.eval(&"a".parse::<FreeWord>().unwrap());
        let oracle = LengthOracle::sws(&spec, 100_000).unwrap();
        assert_eq!(oracle.length(&g).unwrap(), 2);
        assert_eq!(refined_bounds(&spec, &g).unwrap(), LengthBounds::exact(2));
    }

    #[test]
    fn lamps_in_the_two_letter_subgroups_only_cost_range() {
        let spec = GroupSpec::gamma(3, Order::Finite(4), INF);
        let g = spec.eval(&"attbTTTTb".parse::<FreeWord>().unwrap());
        let r = range_of(&spec, &g).unwrap();
        assert_eq!(lemma_max_bounds(&spec, &g).unwrap().lower, covering_length(g.position(), r.min, r.max));
    }

    fn random_element(spec: &GroupSpec, rng: &mut ChaCha8Rng, steps: usize) -> WreathElem {
        let mut g = spec.identity();
        for _ in 0..steps {
            let bits = rng.gen_range(0..1u64 << spec.step_bits());
            g = spec.mul(&g, &spec.step_elem(bits));
        }
        g
    }

    // Exact lengths from breadth-first search must lie inside both envelopes.
    fn sandwich(spec: &GroupSpec, samples: usize, max_steps: usize) {
        let oracle = LengthOracle::sws(spec, 400_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.k() * 31 + 5);
        for i in 0..samples {
            let steps = 1 + i % max_steps;
            let g = random_element(spec, &mut rng, steps);
            let exact = oracle.length(&g).unwrap() as u64;
            let lemma = lemma_max_bounds(spec, &g).unwrap();
            let refined = refined_bounds(spec, &g).unwrap();
            assert!(lemma.contains(exact), "{spec}: {g} has length {exact}, lemma {lemma:?}");
            assert!(refined.contains(exact), "{spec}: {g} has length {exact}, refined {refined:?}");
            assert!(refined.lower >= lemma.lower && refined.upper <= lemma.upper);
        }
    }

    #[test]
    fn sandwich_k1_l3() {
        sandwich(&GroupSpec::gamma(1, Order::Finite(3), INF), 150, 7);
    }

    #[test]
    fn sandwich_k0_l4() {
        sandwich(&GroupSpec::gamma(0, Order::Finite(4), INF), 150, 7);
    }

    #[test]
    fn sandwich_k2_l_inf() {
        sandwich(&GroupSpec::gamma(2, INF, INF), 150, 7);
    }

    #[test]
    fn sandwich_l2_is_exact() {
        sandwich(&GroupSpec::gamma(1, Order::Finite(2), INF), 150, 8);
        sandwich(&GroupSpec::gamma(0, Order::Finite(2), INF), 150, 8);
    }

    #[test]
    fn sandwich_l1() {
        sandwich(&GroupSpec::gamma(1, Order::Finite(1), INF), 40, 6);
    }
}
