use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::group::{DiagonalSpec, Letter, MarkedGroup};
use crate::{Error, Result};

/// Largest finite factor enumerated by closure.
pub const MAX_FINITE_ORDER: usize = 1_000_000;

/// Search limits for [`dgen_constants`].
#[derive(Clone, Copy, Debug)]
pub struct DgenBudget {
    /// Radius of the ball searched in the diagonal product.
    pub radius: u32,
    pub node_cap: usize,
}

impl Default for DgenBudget {
    fn default() -> Self {
        DgenBudget { radius: 10, node_cap: 4_000_000 }
    }
}

/// Constants with `|w^G| <= |w^D| <= c1 |w^G| + c2` for the diagonal product
/// `D` of `G` with a finite `F`, in the letter metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DgenConstants {
    pub c1: u64,
    pub c2: u64,
    /// Longest witness word used; `G` may be replaced by any group having
    /// it as marked quotient with the same ball of this radius.
    pub radius: u64,
    pub transversal_size: usize,
    pub order_f: usize,
    pub diameter_f: u64,
    /// Size of `{f : (e, f) in D}`.
    pub kernel_size: usize,
}

struct FiniteGroup {
    elems: Vec<<DiagonalSpec as MarkedGroup>::Elem>,
    index: FxHashMap<<DiagonalSpec as MarkedGroup>::Elem, u32>,
    /// `act[x][i]`: index of `x` times letter `i`.
    act: Vec<[u32; 4]>,
    diameter: u64,
}

fn closure(f: &DiagonalSpec) -> Result<FiniteGroup> {
    let mut elems = vec![f.identity()];
    let mut index = FxHashMap::default();
    index.insert(f.identity(), 0u32);
    let mut act: Vec<[u32; 4]> = Vec::new();
    let mut dist = vec![0u64];
    let mut v = 0;
    while v < elems.len() {
        let mut row = [0u32; 4];
        for (i, letter) in Letter::ALL.into_iter().enumerate() {
            let mut h = elems[v].clone();
            f.apply_letter(&mut h, letter);
            row[i] = match index.get(&h) {
                Some(&id) => id,
                None => {
                    if elems.len() >= MAX_FINITE_ORDER {
                        return Err(Error::Resource(format!("finite factor exceeds {MAX_FINITE_ORDER} elements")));
                    }
                    let id = elems.len() as u32;
                    index.insert(h.clone(), id);
                    elems.push(h);
                    dist.push(dist[v] + 1);
                    id
                }
            };
        }
        act.push(row);
        v += 1;
    }
    let diameter = dist.last().copied().unwrap_or(0);
    Ok(FiniteGroup { elems, index, act, diameter })
}

/// Build the transversal and the generating set of the diagonal product
/// from a ball search, and read off the constants.
///
/// The transversal takes, in each coset, the element of `F` met first by
/// breadth-first search with letters in the order `t, T, a, b`.
pub fn dgen_constants<G: MarkedGroup>(f: &DiagonalSpec, g: &G, budget: &DgenBudget) -> Result<DgenConstants> {
    if !f.is_finite() {
        return Err(Error::Spec(format!("dgen needs a finite factor, got {f}")));
    }
    let fg = closure(f)?;
    let n = fg.elems.len();
    if n == 1 {
        // D is G itself: every generator is a single letter.
        return Ok(DgenConstants { c1: 1, c2: 0, radius: 1, transversal_size: 1, order_f: 1, diameter_f: 0, kernel_size: 1 });
    }
    let mul = |x: u32, y: u32| fg.index[&f.mul(&fg.elems[x as usize], &fg.elems[y as usize])];
    let inv = |x: u32| fg.index[&f.inv(&fg.elems[x as usize])];

    // Ball in the diagonal product; F-parts stored by index.
    let mut dist: FxHashMap<(G::Elem, u32), u64> = FxHashMap::default();
    let mut frontier = vec![(g.identity(), 0u32)];
    dist.insert((g.identity(), 0), 0);
    for d in 1..=budget.radius as u64 {
        let mut next = Vec::new();
        for (x, y) in &frontier {
            for (i, letter) in Letter::ALL.into_iter().enumerate() {
                let mut x2 = x.clone();
                g.apply_letter(&mut x2, letter);
                let key = (x2, fg.act[*y as usize][i]);
                if !dist.contains_key(&key) {
                    if dist.len() >= budget.node_cap {
                        return Err(Error::Resource(format!("diagonal ball exceeds {} vertices", budget.node_cap)));
                    }
                    dist.insert(key.clone(), d);
                    next.push(key);
                }
            }
        }
        frontier = next;
    }

    // K = {f : (e, f) in D}, with the length of its shortest witness.
    let e = g.identity();
    let kernel: Vec<(u32, u64)> = (0..n as u32).filter_map(|y| dist.get(&(e.clone(), y)).map(|&d| (y, d))).collect();
    let in_kernel: Vec<bool> = {
        let mut v = vec![false; n];
        for &(y, _) in &kernel {
            v[y as usize] = true;
        }
        v
    };
    for &(a, _) in &kernel {
        for &(b, _) in &kernel {
            if !in_kernel[mul(a, b) as usize] {
                return Err(Error::Resource(format!(
                    "radius {} does not reveal the subgroup {{f : (e, f) in D}}",
                    budget.radius
                )));
            }
        }
    }

    // Right cosets K x, each represented by its least index.
    let mut rep = vec![u32::MAX; n];
    for x in 0..n as u32 {
        if rep[x as usize] != u32::MAX {
            continue;
        }
        for &(k, _) in &kernel {
            let y = mul(k, x);
            rep[y as usize] = x;
        }
    }
    let mut transversal: Vec<u32> = rep.clone();
    transversal.sort_unstable();
    transversal.dedup();

    let length = |x: &G::Elem, y: u32| -> Result<u64> {
        dist.get(&(x.clone(), y)).copied().ok_or_else(|| {
            Error::Resource(format!("generator of the diagonal product lies beyond radius {}", budget.radius))
        })
    };
    let mut c1 = 1;
    let mut radius = kernel.iter().map(|&(_, d)| d).max().unwrap_or(0);
    for &fi in &transversal {
        for (i, letter) in Letter::ALL.into_iter().enumerate() {
            // s = (letter in G, e): the coset of (e, letter_F^-1 f_i).
            let gamma = g.letter(letter);
            let gamma_f = fg.act[0][i];
            let aj = rep[mul(inv(gamma_f), fi) as usize];
            let d = length(&gamma, mul(fi, inv(aj)))?;
            c1 = c1.max(d);
            radius = radius.max(d);
            // s = (e, letter in F).
            let aj = rep[fg.act[fi as usize][i] as usize];
            let d = length(&e, mul(fg.act[fi as usize][i], inv(aj)))?;
            c1 = c1.max(d);
            radius = radius.max(d);
        }
    }
    Ok(DgenConstants {
        c1,
        c2: c1 * fg.diameter,
        radius,
        transversal_size: transversal.len(),
        order_f: n,
        diameter_f: fg.diameter,
        kernel_size: kernel.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, Order, PairGroup};
    use crate::metric::LengthOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f_small() -> DiagonalSpec {
        DiagonalSpec::single(GroupSpec::gamma(0, Order::Finite(2), Order::Finite(2)))
    }

    fn lamplighter() -> GroupSpec {
        GroupSpec::gamma(0, Order::Finite(2), Order::Infinite)
    }

    #[test]
    fn finite_factor_order() {
        assert_eq!(closure(&f_small()).unwrap().elems.len(), 32);
    }

    #[test]
    fn trivial_factor() {
        let c = dgen_constants(&DiagonalSpec::trivial(), &lamplighter(), &DgenBudget::default()).unwrap();
        assert_eq!((c.c1, c.c2), (1, 0));
        assert_eq!(c.transversal_size, 1);
    }

    #[test]
    fn infinite_factor_rejected() {
        let f = DiagonalSpec::single(lamplighter());
        assert!(matches!(dgen_constants(&f, &lamplighter(), &DgenBudget::default()), Err(Error::Spec(_))));
    }

    #[test]
    fn quotient_factor_gives_trivial_kernel() {
        let c = dgen_constants(&f_small(), &lamplighter(), &DgenBudget::default()).unwrap();
        assert_eq!((c.c1, c.c2, c.kernel_size, c.transversal_size, c.diameter_f), (1, 6, 1, 32, 6));
    }

    #[test]
    fn collapsed_lamps_give_a_kernel() {
        // With a = b the diagonal sees the extra lamp states as a subgroup of F.
        let g = GroupSpec::gamma(0, Order::Finite(1), Order::Infinite);
        let c = dgen_constants(&f_small(), &g, &DgenBudget::default()).unwrap();
        assert_eq!((c.c1, c.c2, c.kernel_size, c.transversal_size), (4, 24, 4, 8));
        sandwich(&f_small(), g, &c);
    }

    #[test]
    fn unrevealed_kernel_is_a_resource_error() {
        let f = DiagonalSpec::single(GroupSpec::gamma(0, Order::Finite(2), Order::Finite(4)));
        let g = GroupSpec::gamma(0, Order::Finite(2), Order::Finite(2));
        let r = dgen_constants(&f, &g, &DgenBudget { radius: 4, node_cap: 1_000_000 });
        assert!(matches!(r, Err(Error::Resource(_))));
    }

    fn sandwich(f: &DiagonalSpec, g: GroupSpec, c: &DgenConstants) {
        let pair = PairGroup { first: g, second: f.clone() };
        let og = LengthOracle::letters(&g, 400_000).unwrap();
        let od = LengthOracle::letters(&pair, 400_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let len = rng.gen_range(0..=8);
            let w = crate::group::FreeWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect());
            let lg = og.length(&g.eval(&w)).unwrap() as u64;
            let ld = od.length(&pair.eval(&w)).unwrap() as u64;
            assert!(lg <= ld && ld <= c.c1 * lg + c.c2, "{w}: {lg} {ld} {c:?}");
        }
    }

    #[test]
    fn sandwich_on_random_words() {
        let c = dgen_constants(&f_small(), &lamplighter(), &DgenBudget::default()).unwrap();
        sandwich(&f_small(), lamplighter(), &c);
    }

    #[test]
    fn constants_are_local() {
        let f = f_small();
        let a = dgen_constants(&f, &lamplighter(), &DgenBudget::default()).unwrap();
        let b = dgen_constants(&f, &GroupSpec::gamma(9, Order::Finite(5), Order::Finite(20)), &DgenBudget::default()).unwrap();
        assert_eq!((a.c1, a.c2), (b.c1, b.c2));
    }
}
