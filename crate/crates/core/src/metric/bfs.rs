use rustc_hash::{FxHashMap, FxHashSet};

use super::sws_generators;
use crate::error::{Error, Result};
use crate::group::{Letter, MarkedGroup};

/// Default limit on stored vertices for a single search.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

/// Exact word-length oracle.
///
/// A ball around the identity is built once; a query expands a second
/// ball around the target layer by layer. Since every generator set used
/// here is symmetric, the first layer touching the stored ball realizes the
/// distance.
pub struct LengthOracle<'a, G: MarkedGroup> {
    group: &'a G,
    gens: Vec<G::Elem>,
    ball: FxHashMap<G::Elem, u32>,
    radius: u32,
    complete: bool,
    node_cap: usize,
}

impl<'a, G: MarkedGroup> LengthOracle<'a, G> {
    /// Oracle for the switch-walk-switch metric.
    pub fn sws(group: &'a G, node_cap: usize) -> Result<Self> {
        let gens = sws_generators(group).elements;
        Self::new(group, gens, node_cap)
    }

    /// Oracle for the letter metric `{tau, tau^-1, alpha, beta}`.
    pub fn letters(group: &'a G, node_cap: usize) -> Result<Self> {
        let mut gens: Vec<G::Elem> = Vec::new();
        for l in Letter::ALL {
            let g = group.letter(l);
            if !group.is_identity(&g) && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Self::new(group, gens, node_cap)
    }

    /// Build with an explicit symmetric generating set. The stored ball
    /// grows while the next layer fits in half of `node_cap`.
    pub fn new(group: &'a G, gens: Vec<G::Elem>, node_cap: usize) -> Result<Self> {
        let mut oracle = LengthOracle {
            group,
            gens,
            ball: FxHashMap::default(),
            radius: 0,
            complete: false,
            node_cap,
        };
        oracle.ball.insert(group.identity(), 0);
        let mut frontier = vec![group.identity()];
        let budget = node_cap / 2;
        while !frontier.is_empty() {
            let estimate = frontier.len().saturating_mul(oracle.gens.len());
            if oracle.ball.len().saturating_add(estimate) > budget {
                break;
            }
            let next = oracle.expand(&frontier, oracle.radius + 1);
            oracle.radius += 1;
            frontier = next;
        }
        oracle.complete = frontier.is_empty();
        if oracle.complete {
            oracle.radius = oracle.radius.saturating_sub(1);
        }
        Ok(oracle)
    }

    fn expand(&mut self, frontier: &[G::Elem], depth: u32) -> Vec<G::Elem> {
        let mut next = Vec::new();
        for x in frontier {
            for s in &self.gens {
                let y = self.group.mul(x, s);
                if !self.ball.contains_key(&y) {
                    self.ball.insert(y.clone(), depth);
                    next.push(y);
                }
            }
        }
        next
    }

    pub fn group(&self) -> &G {
        self.group
    }

    pub fn generators(&self) -> &[G::Elem] {
        &self.gens
    }

    /// Radius of the stored ball.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Number of elements stored in the ball.
    pub fn ball_size(&self) -> usize {
        self.ball.len()
    }

    /// True when the stored ball is the whole (finite) group.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Distance from the identity if it is at most `cap`, `None` if larger.
    pub fn length_at_most(&self, g: &G::Elem, cap: u32) -> Result<Option<u32>> {
        if let Some(&d) = self.ball.get(g) {
            return Ok((d <= cap).then_some(d));
        }
        if self.complete {
            return Err(Error::Usage("element not in the finite group".into()));
        }
        if cap <= self.radius {
            return Ok(None);
        }
        let mut seen: FxHashSet<G::Elem> = FxHashSet::default();
        seen.insert(g.clone());
        let mut frontier = vec![g.clone()];
        let mut j = 0u32;
        while j + self.radius < cap {
            j += 1;
            let mut next = Vec::new();
            let mut best: Option<u32> = None;
            for x in &frontier {
                for s in &self.gens {
                    let y = self.group.mul(x, s);
                    if let Some(&d) = self.ball.get(&y) {
                        best = Some(best.map_or(j + d, |b: u32| b.min(j + d)));
                    } else if best.is_none() && seen.insert(y.clone()) {
                        if seen.len() > self.node_cap {
                            return Err(Error::Resource(format!(
                                "length search passed {} nodes at depth {}",
                                self.node_cap,
                                j + self.radius
                            )));
                        }
                        next.push(y);
                    }
                }
            }
            if let Some(b) = best {
                return Ok((b <= cap).then_some(b));
            }
            if next.is_empty() {
                return Err(Error::Usage("element not reachable from the identity".into()));
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Exact distance from the identity.
    pub fn length(&self, g: &G::Elem) -> Result<u32> {
        self.length_at_most(g, u32::MAX)?
            .ok_or_else(|| Error::Resource("length search exhausted its depth".into()))
    }
}

/// Exact switch-walk-switch length by breadth-first search, failing with a
/// resource error once the search holds more than `node_cap` vertices.
pub fn exact_length_bfs<G: MarkedGroup>(group: &G, g: &G::Elem, node_cap: usize) -> Result<u32> {
    let gens = sws_generators(group).elements;
    if group.is_identity(g) {
        return Ok(0);
    }
    let mut seen: FxHashSet<G::Elem> = FxHashSet::default();
    seen.insert(group.identity());
    let mut frontier = vec![group.identity()];
    let mut depth = 0u32;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = group.mul(x, s);
                if &y == g {
                    return Ok(depth);
                }
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if seen.len() > node_cap {
            return Err(Error::Resource(format!(
                "breadth-first search passed {node_cap} nodes at depth {depth}"
            )));
        }
        frontier = next;
    }
    Err(Error::Usage("element not reachable from the identity".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeWord, GroupSpec, Order};

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_matches_plain_bfs() {
        let spec = GroupSpec::gamma(1, Order::Finite(3), Order::Infinite);
        let oracle = LengthOracle::sws(&spec, 20_000).unwrap();
        assert!(oracle.radius() >= 1);
        for word in ["t", "ttt", "abtTTba", "atbtatbt", "abababtab", "ttaTTb"] {
            let g = spec.eval(&w(word));
            let plain = exact_length_bfs(&spec, &g, 2_000_000).unwrap();
            assert_eq!(oracle.length(&g).unwrap(), plain, "{word}");
        }
    }

    #[test]
    fn single_steps_have_length_one() {
        let spec = GroupSpec::gamma(2, Order::Finite(4), Order::Infinite);
        let oracle = LengthOracle::sws(&spec, 100_000).unwrap();
        for g in oracle.generators().to_vec() {
            assert_eq!(oracle.length(&g).unwrap(), 1);
        }
        assert_eq!(oracle.length(&spec.identity()).unwrap(), 0);
    }

    #[test]
    fn letter_metric_on_the_base_lamplighter() {
        let spec = GroupSpec::base_lamplighter();
        let oracle = LengthOracle::letters(&spec, 10_000).unwrap();
        // Lamp at 0 and 3, walker back home: go out, come back.
        let g = spec.eval(&w("atttaTTT"));
        assert_eq!(oracle.length(&g).unwrap(), 8);
        assert_eq!(oracle.length_at_most(&g, 7).unwrap(), None);
    }

    #[test]
    fn node_cap_is_reported_as_resource_error() {
        let spec = GroupSpec::gamma(0, Order::Finite(5), Order::Infinite);
        let g = spec.eval(&w("tttttttttttttttt"));
        let err = exact_length_bfs(&spec, &g, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn finite_group_is_enumerated_completely() {
        let spec = GroupSpec::gamma(0, Order::Finite(2), Order::Finite(2));
        let oracle = LengthOracle::letters(&spec, 1000).unwrap();
        assert!(oracle.is_complete());
        // Z/2 wr D_2: 2 * 4^2 elements.
        assert_eq!(oracle.ball_size(), 32);
    }
}
