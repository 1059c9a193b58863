// Offset 0: both switches act on the current site, so a word is a base path
// plus at most four letters per visit (two at the first and last time).
// A path on the line is an Euler path of its edge multiset; site `x` then
// gets `2 * deg(x)` letters of room whatever the endpoints. So the shortest
// word is the cheapest choice of edge counts with the right parities and
// `deg(x) >= ceil(N_x / 2)`, which a left-to-right scan solves exactly.

use super::construct::Construction;
use crate::group::{Dihedral, LampLetter, Letter, Order};

/// Minimal word for a level-one element with `k = 0` over `Z`.
pub(crate) fn optimal_k0(position: i64, lamps: &[(i64, Dihedral)], l: Order) -> Construction {
    let lamps: Vec<(i64, Dihedral)> = lamps.iter().copied().filter(|(_, f)| !f.is_identity()).collect();
    let (s0, s1) = (position.min(0), position.max(0));
    let rlo = lamps.iter().map(|e| e.0).chain([s0]).min().unwrap();
    let rhi = lamps.iter().map(|e| e.0).chain([s1]).max().unwrap();
    if lamps.is_empty() {
        let path: Vec<i64> = if position >= 0 { (0..=position).collect() } else { (position..=0).rev().collect() };
        let slots = vec![Vec::new(); path.len()];
        return Construction { path, slots };
    }
    let (lo, hi) = (rlo - 1, rhi + 1);
    let edges = (hi - lo) as usize;
    let mut demand = vec![0u64; edges + 1];
    for &(x, f) in &lamps {
        demand[(x - lo) as usize] = f.norm(l).div_ceil(2);
    }
    let cmax = *demand.iter().max().unwrap() as usize + 2;
    let allowed = |i: usize, c: usize| {
        let x = lo + i as i64;
        if s0 <= x && x < s1 {
            !c.is_multiple_of(2)
        } else if i == 0 || i + 1 == edges {
            c.is_multiple_of(2)
        } else {
            c.is_multiple_of(2) && c >= 2
        }
    };

    const NONE: u64 = u64::MAX;
    let mut choice: Vec<Vec<usize>> = vec![vec![0; cmax + 1]; edges];
    let mut dp: Vec<u64> = (0..=cmax).map(|c| if allowed(0, c) { c as u64 } else { NONE }).collect();
    for i in 1..edges {
        // Suffix minima of the previous row with their arguments.
        let mut suf = vec![(NONE, 0usize); cmax + 2];
        for c in (0..=cmax).rev() {
            suf[c] = if dp[c] <= suf[c + 1].0 { (dp[c], c) } else { suf[c + 1] };
        }
        let need = demand[i] as usize;
        let mut next = vec![NONE; cmax + 1];
        for c in 0..=cmax {
            if !allowed(i, c) {
                continue;
            }
            let (best, arg) = suf[need.saturating_sub(c).min(cmax + 1)];
            if best != NONE {
                next[c] = best + c as u64;
                choice[i][c] = arg;
            }
        }
        dp = next;
    }
    let mut c = (0..=cmax).min_by_key(|&c| dp[c]).unwrap();
    let mut counts = vec![0usize; edges];
    for i in (0..edges).rev() {
        counts[i] = c;
        c = choice[i][c];
    }

    let path = euler_path(lo, &mut counts, position);
    let last = path.len() - 1;
    let cap = |t: usize| if t == 0 || t == last { 2 } else { 4 };
    let mut slots: Vec<Vec<Letter>> = vec![Vec::new(); path.len()];
    for &(x, f) in &lamps {
        let word = f.normal_form(l);
        let mut rest = &word[..];
        for t in (0..path.len()).filter(|&t| path[t] == x) {
            let take = cap(t).min(rest.len());
            slots[t].extend(rest[..take].iter().map(|&c| match c {
                LampLetter::A => Letter::Alpha,
                LampLetter::B => Letter::Beta,
            }));
            rest = &rest[take..];
        }
        debug_assert!(rest.is_empty());
    }
    Construction { path, slots }
}

// Euler path from 0 through the line multigraph with `counts[i]` copies of
// the edge `(lo + i, lo + i + 1)`; it ends at `position`.
fn euler_path(lo: i64, counts: &mut [usize], position: i64) -> Vec<i64> {
    let mut stack = vec![0i64];
    let mut out = Vec::new();
    while let Some(&v) = stack.last() {
        let right = (v - lo) as usize;
        if right < counts.len() && counts[right] > 0 {
            counts[right] -= 1;
            stack.push(v + 1);
        } else if right > 0 && counts[right - 1] > 0 {
            counts[right - 1] -= 1;
            stack.push(v - 1);
        } else {
            out.push(stack.pop().unwrap());
        }
    }
    out.reverse();
    debug_assert_eq!(*out.last().unwrap(), position);
    out
}
