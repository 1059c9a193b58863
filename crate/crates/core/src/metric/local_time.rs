use std::collections::BTreeMap;

/// Local time per lamp site.
pub type LocalTimeMap = BTreeMap<i64, u64>;

/// Local times of a base trajectory `S_0, ..., S_n` (with `S_0 = 0`).
///
/// For `k > 0`, write for each lamp `x` the sequence of switch letters it can
/// receive: `a` at times with `S_j = x` and `b` at times with `S_j = x - k`.
/// `t_x` is the number of maximal constant blocks in that sequence. For
/// `k = 0` both letters come together and `t_x` is the visit count.
pub fn local_time(path: &[i64], k: u64) -> LocalTimeMap {
    let k = k as i64;
    let mut out = LocalTimeMap::new();
    if k == 0 {
        for &s in path {
            *out.entry(s).or_default() += 1;
        }
        return out;
    }
    // Last letter seen by each lamp: true for `a`.
    let mut last: BTreeMap<i64, bool> = BTreeMap::new();
    let mut touch = |x: i64, is_a: bool, out: &mut LocalTimeMap| {
        if last.insert(x, is_a) != Some(is_a) {
            *out.entry(x).or_default() += 1;
        }
    };
    for &s in path {
        touch(s, true, &mut out);
        touch(s + k, false, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_walk_touches_two_lamps() {
        let t = local_time(&[0], 1);
        assert_eq!(t, LocalTimeMap::from([(0, 1), (1, 1)]));
    }

    #[test]
    fn back_and_forth_alternates_letters() {
        // Lamp 1 sees b (at 0), a (at 1), b (at 0): three blocks.
        let t = local_time(&[0, 1, 0], 1);
        assert_eq!(t[&1], 3);
        assert_eq!(t[&0], 1);
        assert_eq!(t[&2], 1);
    }

    #[test]
    fn straight_walk_gives_two_blocks_per_lamp() {
        let path: Vec<i64> = (0..=5).collect();
        let t = local_time(&path, 2);
        assert_eq!(t[&3], 2);
        assert_eq!(t[&0], 1);
        assert_eq!(t[&7], 1);
    }

    #[test]
    fn k0_counts_visits() {
        let t = local_time(&[0, 1, 0, -1, 0], 0);
        assert_eq!(t[&0], 3);
        assert_eq!(t[&1], 1);
    }

    #[test]
    fn total_is_at_most_twice_the_number_of_times() {
        let path = [0, 1, 2, 1, 0, 1, 2, 3, 2];
        for k in 1..4 {
            let total: u64 = local_time(&path, k).values().sum();
            assert!(total <= 2 * path.len() as u64);
        }
    }
}
