use std::collections::BTreeSet;

use super::bounds::{covering_length, sites_with};
use super::construct::{construct, Construction};
use crate::group::{Dihedral, Order};

/// Lower bound on the length of a path on the `m`-cycle that starts at `0`,
/// ends at `position` and visits every residue in `sites`.
///
/// A path missing some edge lives on the segment left after cutting it, and
/// every edge sits in a gap between consecutive required residues. A path
/// using every edge has length at least `m`.
pub fn cycle_cover_lower(position: i64, sites: &BTreeSet<i64>, m: u64) -> u64 {
    let mi = m as i64;
    let mut res: Vec<i64> = sites.iter().map(|&x| x.rem_euclid(mi)).collect();
    res.push(0);
    res.push(position.rem_euclid(mi));
    res.sort_unstable();
    res.dedup();
    if res.len() == 1 {
        return 0;
    }
    let p = position.rem_euclid(mi);
    let mut best = m;
    for i in 0..res.len() {
        // Cut inside the gap that ends at res[i]; the segment starts there.
        let start = res[i];
        let prev = res[(i + res.len() - 1) % res.len()];
        let seg = (prev - start).rem_euclid(mi);
        let u = |r: i64| (r - start).rem_euclid(mi);
        let z = u(0);
        best = best.min(covering_length(u(p) - z, -z, seg - z));
    }
    best
}

/// Bounds for a level-one element of `Gamma(k, l, m)` with finite `m`, given
/// by its position and lamps as residues.
///
/// The upper bound unwraps the cycle at its largest gap and builds an
/// explicit word over `Z`; it is kept only when that word never brings two
/// lifts of one residue into play. `None` when no certified word was found.
pub fn cyclic_bounds(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order, m: u64) -> (u64, Option<u64>) {
    let mi = m as i64;
    let lamps: Vec<(i64, Dihedral)> = lamps
        .iter()
        .filter(|(_, f)| !f.is_identity())
        .map(|&(x, f)| (x.rem_euclid(mi), f))
        .collect();
    let p = position.rem_euclid(mi);
    if lamps.is_empty() && p == 0 {
        return (0, Some(0));
    }
    let needed = sites_with(p, &lamps, k, l, false).sites;
    let mut lower = cycle_cover_lower(p, &needed, m).max(1);
    if p == 0 && m >= 2 {
        lower = lower.max(2);
    }
    if m.is_multiple_of(2) && lower % 2 != (p as u64) % 2 {
        lower += 1;
    }

    let upper = cyclic_witness(p, &lamps, k, l, m).map(|c| c.len());
    (lower, upper.map(|u| u.max(lower)))
}

/// Explicit word over `Z` for the element with residue data `(position,
/// lamps)`, cut open at the largest gap. Its evaluation in `Gamma(k, l, m)`
/// is the element whenever `None` is not returned.
pub fn cyclic_witness(position: i64, lamps: &[(i64, Dihedral)], k: u64, l: Order, m: u64) -> Option<Construction> {
    let mi = m as i64;
    let lamps: Vec<(i64, Dihedral)> = lamps
        .iter()
        .filter(|(_, f)| !f.is_identity())
        .map(|&(x, f)| (x.rem_euclid(mi), f))
        .collect();
    let p = position.rem_euclid(mi);
    let sites = sites_with(p, &lamps, k, l, true).sites;
    let mut res: Vec<i64> = sites.iter().map(|&x| x.rem_euclid(mi)).collect();
    res.sort_unstable();
    res.dedup();
    let mut start = res[0];
    let mut widest = -1;
    for i in 0..res.len() {
        let prev = res[(i + res.len() - 1) % res.len()];
        let gap = (res[i] - prev).rem_euclid(mi);
        let gap = if gap == 0 { mi } else { gap };
        if gap > widest {
            widest = gap;
            start = res[i];
        }
    }
    let lift = |r: i64| (r - start).rem_euclid(mi) - (0 - start).rem_euclid(mi);
    let mut lifted: Vec<(i64, Dihedral)> = lamps.iter().map(|&(x, f)| (lift(x), f)).collect();
    lifted.sort_unstable_by_key(|e| e.0);
    let c = construct(lift(p), &lifted, k, l);
    let span = (c.max_position() - c.min_position()) as u64;
    (span + k < m).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, MarkedGroup, WreathElem};
    use crate::metric::LengthOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cover_on_a_cycle() {
        let s = BTreeSet::from([3]);
        assert_eq!(cycle_cover_lower(0, &s, 10), 6);
        let s = BTreeSet::from([2, 8]);
        // Going 0 -> 2 -> 8 the long way costs 10; via the wrap 2 + 2 + 4 + 2.
        assert_eq!(cycle_cover_lower(0, &s, 10), 8);
        let all: BTreeSet<i64> = (0..10).collect();
        assert_eq!(cycle_cover_lower(0, &all, 10), 10);
        assert_eq!(cycle_cover_lower(5, &BTreeSet::new(), 10), 5);
    }

    fn parts(g: &WreathElem) -> (i64, Vec<(i64, Dihedral)>) {
        (g.position(), g.dihedral_lamps().collect())
    }

    #[test]
    fn sandwich_exact_lengths_on_small_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (k, l, m) in [(1, 3, 5), (0, 4, 4), (2, 2, 6), (1, 2, 3), (3, 5, 7), (1, 1, 4), (0, 1, 3)] {
            let spec = GroupSpec::gamma(k, Order::Finite(l), Order::Finite(m));
            let oracle = LengthOracle::sws(&spec, 400_000).unwrap();
            for _ in 0..60 {
                let steps = rng.gen_range(0..6);
                let mut g = spec.identity();
                for _ in 0..steps {
                    g = spec.mul(&g, &spec.step_elem(rng.gen::<u64>()));
                }
                let Ok(exact) = oracle.length(&g) else { continue };
                let (p, lamps) = parts(&g);
                let (lo, up) = cyclic_bounds(p, &lamps, k, Order::Finite(l), m);
                assert!(lo <= exact as u64, "{spec} {g}: lower {lo} > {exact}");
                if let Some(u) = up {
                    assert!(u >= exact as u64, "{spec} {g}: upper {u} < {exact}");
                    let w = cyclic_witness(p, &lamps, k, Order::Finite(l), m).unwrap().word();
                    assert_eq!(spec.eval(&w), g, "{spec}: witness {w}");
                }
            }
        }
    }
}
