use rustc_hash::FxHashMap;

use super::bounds::sites_with;
use super::k0::optimal_k0;
use crate::group::{Dihedral, FreeWord, LampLetter, Letter, Order, StepSample};

/// An explicit switch-walk-switch word: the base path `path[0..=T]` and the
/// switch letters applied while the walker stands at each time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub path: Vec<i64>,
    pub slots: Vec<Vec<Letter>>,
}

impl Construction {
    /// Number of steps.
    pub fn len(&self) -> u64 {
        (self.path.len() - 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() == 1
    }

    pub fn min_position(&self) -> i64 {
        *self.path.iter().min().unwrap()
    }

    pub fn max_position(&self) -> i64 {
        *self.path.iter().max().unwrap()
    }

    /// The word in the marked alphabet.
    pub fn word(&self) -> FreeWord {
        let mut w = Vec::new();
        for (t, slot) in self.slots.iter().enumerate() {
            w.extend_from_slice(slot);
            if let Some(&next) = self.path.get(t + 1) {
                w.push(if next > self.path[t] { Letter::Tau } else { Letter::TauInv });
            }
        }
        FreeWord::new(w)
    }

    /// The same word as a sequence of level-one step outcomes, or `None` if
    /// some slot does not split into `u2 u1`.
    pub fn steps(&self) -> Option<Vec<u64>> {
        let t_max = self.path.len() - 1;
        let mut before: Vec<Vec<Letter>> = vec![Vec::new(); t_max];
        let mut after: Vec<Vec<Letter>> = vec![Vec::new(); t_max];
        for (t, slot) in self.slots.iter().enumerate() {
            if t == t_max {
                if t == 0 {
                    return slot.is_empty().then(Vec::new);
                }
                after[t - 1] = slot.clone();
            } else if t == 0 {
                before[0] = slot.clone();
            } else {
                let cut = slot.len().saturating_sub(2);
                after[t - 1] = slot[..cut].to_vec();
                before[t] = slot[cut..].to_vec();
            }
        }
        (0..t_max)
            .map(|j| {
                let (e1, e2, o1) = switch_bits(&before[j])?;
                let (f1, f2, o2) = switch_bits(&after[j])?;
                let s = StepSample {
                    e1,
                    e2,
                    e1_after: f1,
                    e2_after: f2,
                    forward: self.path[j + 1] > self.path[j],
                    beta_first_before: o1,
                    beta_first_after: o2,
                };
                Some(s.to_bits())
            })
            .collect()
    }
}

fn switch_bits(u: &[Letter]) -> Option<(bool, bool, bool)> {
    match u {
        [] => Some((false, false, false)),
        [Letter::Alpha] => Some((true, false, false)),
        [Letter::Beta] => Some((false, true, false)),
        [Letter::Alpha, Letter::Beta] => Some((true, true, false)),
        [Letter::Beta, Letter::Alpha] => Some((true, true, true)),
        _ => None,
    }
}

fn walk_to(path: &mut Vec<i64>, target: i64) {
    let mut x = *path.last().unwrap();
    while x != target {
        x += (target - x).signum();
        path.push(x);
    }
}

fn lamp_letter(l: LampLetter) -> Letter {
    match l {
        LampLetter::A => Letter::Alpha,
        LampLetter::B => Letter::Beta,
    }
}

/// Minimal alternating words for `f`: the normal form, plus the other
/// reading on a tie.
fn targets(f: Dihedral, l: Order) -> Vec<Vec<LampLetter>> {
    let nf = f.normal_form(l);
    let mut out = vec![nf.clone()];
    if f.is_tie(l) {
        out.push(
            nf.iter()
                .map(|c| if *c == LampLetter::A { LampLetter::B } else { LampLetter::A })
                .collect(),
        );
    }
    out
}

/// Build an explicit word for the level-one element over `Z` with the given
/// data. The path stays inside the range of sites that must be visited
/// (with every lit site added); the result is the shorter of the two sweep
/// directions.
pub fn construct(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order) -> Construction {
    if lamps.is_empty() {
        let mut path = vec![0];
        walk_to(&mut path, position);
        let slots = vec![Vec::new(); path.len()];
        return Construction { path, slots };
    }
    if k == 0 {
        return optimal_k0(position, lamps, l);
    }
    let range = sites_with(position, lamps, k, l, true);
    let a = build(position, lamps, k, l, range.min, range.max, true);
    let b = build(position, lamps, k, l, range.min, range.max, false);
    if b.len() < a.len() {
        b
    } else {
        a
    }
}

fn build(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order, lo: i64, hi: i64, left_first: bool) -> Construction {
    build_offset(position, lamps, k as i64, l, lo, hi, left_first)
}

// Offset `k >= 1`: lamp `y` takes `a` while the walker is at `y` and `b`
// while it is at `y - k`, at most one of each per time. Each round trip over
// a window `[y - k, y]` adds two alternations; windows needing the same
// number of extra trips are merged into layers and traversed together.
fn build_offset(
    position: i64,
    lamps: &[(i64, Dihedral)],
    k: i64,
    l: Order,
    lo: i64,
    hi: i64,
    left_first: bool,
) -> Construction {
    let index: FxHashMap<i64, usize> = lamps.iter().enumerate().map(|(i, (y, _))| (*y, i)).collect();
    let goals: Vec<Vec<Vec<LampLetter>>> = lamps.iter().map(|(_, f)| targets(*f, l)).collect();
    let mut trips = vec![0u64; lamps.len()];
    loop {
        let path = offset_path(position, lamps, &trips, k, lo, hi, left_first);
        // Alternation blocks seen by each lamp: (letter, first time).
        let mut blocks: Vec<Vec<(LampLetter, usize)>> = vec![Vec::new(); lamps.len()];
        for (t, &x) in path.iter().enumerate() {
            for (site, letter) in [(x, LampLetter::A), (x + k, LampLetter::B)] {
                if let Some(&i) = index.get(&site) {
                    if blocks[i].last().map(|b| b.0) != Some(letter) {
                        blocks[i].push((letter, t));
                    }
                }
            }
        }
        let mut slots: Vec<Vec<Letter>> = vec![Vec::new(); path.len()];
        let mut short = false;
        for i in 0..lamps.len() {
            match best_match(&blocks[i], &goals[i]) {
                Ok(times) => {
                    for (letter, t) in times {
                        slots[t].push(lamp_letter(letter));
                    }
                }
                Err(deficit) => {
                    trips[i] += deficit.div_ceil(2);
                    short = true;
                }
            }
        }
        if !short {
            for s in &mut slots {
                s.sort();
            }
            return Construction { path, slots };
        }
    }
}

// Embed the first goal that fits as a subsequence of the blocks, or report
// the smallest shortfall.
fn best_match(blocks: &[(LampLetter, usize)], goals: &[Vec<LampLetter>]) -> Result<Vec<(LampLetter, usize)>, u64> {
    let mut deficit = u64::MAX;
    for goal in goals {
        let Some(first) = goal.first() else { return Ok(Vec::new()) };
        let start = blocks.iter().position(|b| b.0 == *first).unwrap_or(blocks.len());
        let available = blocks.len() - start;
        if available >= goal.len() {
            return Ok(blocks[start..start + goal.len()].to_vec());
        }
        deficit = deficit.min((goal.len() - available) as u64);
    }
    Err(deficit)
}

fn offset_path(
    position: i64,
    lamps: &[(i64, Dihedral)],
    trips: &[u64],
    k: i64,
    lo: i64,
    hi: i64,
    left_first: bool,
) -> Vec<i64> {
    // Round-trip intervals per layer, as (start, far end).
    let layers = trips.iter().copied().max().unwrap_or(0);
    let mut intervals: Vec<(i64, i64)> = Vec::new();
    for j in 1..=layers {
        let mut windows: Vec<(i64, i64)> = lamps
            .iter()
            .zip(trips)
            .filter(|(_, &b)| b >= j)
            .map(|((y, _), _)| (y - k, *y))
            .collect();
        windows.sort_unstable();
        let mut merged: Vec<(i64, i64)> = Vec::new();
        for (s, e) in windows {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        intervals.extend(merged);
    }
    // The main pass runs from `lo` to `hi` (or back); a trip starts when the
    // pass reaches the interval end it meets last.
    let mut at: FxHashMap<i64, Vec<i64>> = FxHashMap::default();
    for (s, e) in intervals {
        if left_first {
            at.entry(e).or_default().push(s);
        } else {
            at.entry(s).or_default().push(e);
        }
    }
    let mut path = vec![0];
    let (first, second) = if left_first { (lo, hi) } else { (hi, lo) };
    walk_to(&mut path, first);
    let dir = (second - first).signum();
    let mut x = first;
    loop {
        if let Some(ends) = at.get(&x) {
            for &far in ends {
                walk_to(&mut path, far);
                walk_to(&mut path, x);
            }
        }
        if x == second {
            break;
        }
        x += dir;
        path.push(x);
    }
    walk_to(&mut path, position);
    if path.len() == 1 {
        path.push(if left_first { -1 } else { 1 });
        path.push(0);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, Lamp, MarkedGroup, WreathElem};
    use crate::metric::{refined_bounds, LengthOracle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(spec: &GroupSpec, g: &WreathElem) -> Construction {
        let lamps: Vec<_> = g.dihedral_lamps().collect();
        let c = construct(g.position(), &lamps, spec.k(), spec.l());
        assert_eq!(spec.eval(&c.word()), *g, "{spec}: word {} for {g}", c.word());
        let steps = c.steps().expect("slots split into switch pairs");
        assert_eq!(steps.len() as u64, c.len());
        let by_steps = steps.iter().fold(spec.identity(), |h, &s| spec.mul(&h, &spec.step_elem(s)));
        assert_eq!(by_steps, *g);
        c
    }

    fn random_element(spec: &GroupSpec, rng: &mut ChaCha8Rng, steps: usize) -> WreathElem {
        (0..steps).fold(spec.identity(), |g, _| {
            spec.mul(&g, &spec.step_elem(rng.gen_range(0..1u64 << spec.step_bits())))
        })
    }

    #[test]
    fn constructions_evaluate_to_their_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (k, l) in [
            (0, Order::Finite(2)),
            (0, Order::Finite(5)),
            (0, Order::Infinite),
            (1, Order::Finite(1)),
            (1, Order::Finite(4)),
            (2, Order::Infinite),
            (3, Order::Finite(3)),
            (5, Order::Finite(8)),
        ] {
            let spec = GroupSpec::gamma(k, l, Order::Infinite);
            for n in [0, 1, 2, 5, 20, 80, 300] {
                let g = random_element(&spec, &mut rng, n);
                check(&spec, &g);
            }
        }
    }

    #[test]
    fn construction_is_at_least_the_exact_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (k, l) in [(1, Order::Finite(3)), (0, Order::Finite(4)), (2, Order::Infinite)] {
            let spec = GroupSpec::gamma(k, l, Order::Infinite);
            let oracle = LengthOracle::sws(&spec, 400_000).unwrap();
            for i in 0..60 {
                let g = random_element(&spec, &mut rng, 1 + i % 6);
                let c = check(&spec, &g);
                let exact = oracle.length(&g).unwrap() as u64;
                assert!(c.len() >= exact);
                assert!(refined_bounds(&spec, &g).unwrap().contains(exact));
            }
        }
    }

    #[test]
    fn alternating_lamp_uses_round_trips() {
        let spec = GroupSpec::gamma(2, Order::Infinite, Order::Infinite);
        let f = (0..6).fold(Dihedral::IDENTITY, |x, i| {
            if i % 2 == 0 { x.mul_a(Order::Infinite) } else { x.mul_b(Order::Infinite) }
        });
        let g = WreathElem::from_parts(0, vec![(0, Lamp::Dihedral(f))]);
        let c = check(&spec, &g);
        assert_eq!(c.len(), 12);
        assert!(c.min_position() >= -2 && c.max_position() <= 0);
    }

    #[test]
    fn lone_switch_bounces() {
        let spec = GroupSpec::gamma(0, Order::Finite(2), Order::Infinite);
        let g = spec.eval(&"a".parse().unwrap());
        assert_eq!(check(&spec, &g).len(), 2);
    }
}
