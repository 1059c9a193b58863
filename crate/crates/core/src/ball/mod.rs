//! Marked Cayley balls, ball coincidence by product search, sampled quotient
//! checks and the comparison constants of a diagonal product with a finite
//! factor.

mod dgen;

pub use dgen::{dgen_constants, DgenBudget, DgenConstants};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::group::{FreeWord, Letter, MarkedGroup};
use crate::{Error, Result};

/// Default limit on stored vertices in ball searches.
pub const BALL_NODE_CAP: usize = 4_000_000;

/// Labeled ball of radius `radius` around the identity in the letter
/// Cayley graph. Vertex 0 is the identity; every vertex at distance below
/// `radius` has one outgoing edge per letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedBall {
    pub radius: u32,
    pub distance: Vec<u32>,
    pub edges: Vec<(u32, Letter, u32)>,
}

impl MarkedBall {
    pub fn vertex_count(&self) -> usize {
        self.distance.len()
    }

    /// Vertices at each distance `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius as usize + 1];
        for &d in &self.distance {
            out[d as usize] += 1;
        }
        out
    }
}

pub fn marked_ball<G: MarkedGroup>(group: &G, radius: u32, node_cap: usize) -> Result<MarkedBall> {
    let mut index: FxHashMap<G::Elem, u32> = FxHashMap::default();
    let mut elems = vec![group.identity()];
    let mut distance = vec![0];
    index.insert(group.identity(), 0);
    let mut edges = Vec::new();
    let mut start = 0;
    for d in 0..radius {
        let end = elems.len();
        for v in start..end {
            for letter in Letter::ALL {
                let mut h = elems[v].clone();
                group.apply_letter(&mut h, letter);
                let id = match index.get(&h) {
                    Some(&id) => id,
                    None => {
                        if elems.len() >= node_cap {
                            return Err(Error::Resource(format!("ball of radius {radius} exceeds {node_cap} vertices")));
                        }
                        let id = elems.len() as u32;
                        index.insert(h.clone(), id);
                        elems.push(h);
                        distance.push(d + 1);
                        id
                    }
                };
                edges.push((v as u32, letter, id));
            }
        }
        start = end;
    }
    Ok(MarkedBall { radius, distance, edges })
}

/// Result of comparing two marked balls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coincidence {
    #[serde(rename = "specA")]
    pub spec_a: String,
    #[serde(rename = "specB")]
    pub spec_b: String,
    pub radius: u32,
    pub coincide: bool,
    /// A word of length at most `2 * radius` that is trivial in exactly one
    /// of the groups.
    pub witness: Option<FreeWord>,
}

/// Decide whether the balls of radius `radius` coincide: for every word `w`
/// of length at most `2 * radius`, `w = e` in `a` exactly when `w = e` in
/// `b`. Both Cayley graphs are explored in lockstep; two words reaching one
/// vertex on one side and distinct vertices on the other give the witness.
pub fn balls_coincide<A: MarkedGroup, B: MarkedGroup>(a: &A, b: &B, radius: u32, node_cap: usize) -> Result<Coincidence> {
    let mut report = Coincidence {
        spec_a: a.describe(),
        spec_b: b.describe(),
        radius,
        coincide: true,
        witness: None,
    };
    // Node: (element in A, element in B, parent, letter from parent).
    type Node<A, B> = (<A as MarkedGroup>::Elem, <B as MarkedGroup>::Elem, u32, Option<Letter>);
    let mut nodes: Vec<Node<A, B>> = vec![(a.identity(), b.identity(), 0, None)];
    let mut in_a: FxHashMap<A::Elem, u32> = FxHashMap::default();
    let mut in_b: FxHashMap<B::Elem, u32> = FxHashMap::default();
    in_a.insert(a.identity(), 0);
    in_b.insert(b.identity(), 0);
    let word_of = |nodes: &[Node<A, B>], mut v: u32| {
        let mut w = Vec::new();
        while let Some(l) = nodes[v as usize].3 {
            w.push(l);
            v = nodes[v as usize].2;
        }
        w.reverse();
        FreeWord::new(w)
    };
    let mut start = 0;
    for _ in 0..radius {
        let end = nodes.len();
        for v in start..end {
            for letter in Letter::ALL {
                let (mut x, mut y) = (nodes[v].0.clone(), nodes[v].1.clone());
                a.apply_letter(&mut x, letter);
                b.apply_letter(&mut y, letter);
                let hit_a = in_a.get(&x).copied();
                let hit_b = in_b.get(&y).copied();
                let clash = match (hit_a, hit_b) {
                    (Some(i), Some(j)) if i == j => None,
                    (None, None) => None,
                    (Some(i), _) => Some(i),
                    (None, Some(j)) => Some(j),
                };
                if let Some(other) = clash {
                    let mut w = word_of(&nodes, v as u32);
                    w.push(letter);
                    let w = w.concat(&word_of(&nodes, other).inverse()).reduce();
                    report.coincide = false;
                    report.witness = Some(w);
                    return Ok(report);
                }
                if hit_a.is_none() {
                    if nodes.len() >= node_cap {
                        return Err(Error::Resource(format!("product ball exceeds {node_cap} vertices")));
                    }
                    let id = nodes.len() as u32;
                    in_a.insert(x.clone(), id);
                    in_b.insert(y.clone(), id);
                    nodes.push((x, y, v as u32, Some(letter)));
                }
            }
        }
        start = end;
    }
    Ok(report)
}

/// Smallest radius in `0..=max_radius` at which the balls differ, with its
/// witness; `None` if they coincide throughout.
pub fn first_difference<A: MarkedGroup, B: MarkedGroup>(
    a: &A,
    b: &B,
    max_radius: u32,
    node_cap: usize,
) -> Result<Option<Coincidence>> {
    for r in 0..=max_radius {
        let c = balls_coincide(a, b, r, node_cap)?;
        if !c.coincide {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Outcome of testing that relations of `a` hold in `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub holds: bool,
    pub words_checked: u64,
    /// A word trivial in `a` but not in `b`.
    pub witness: Option<FreeWord>,
}

/// Check `w = e in a  =>  w = e in b` on every word of length at most
/// `exhaustive_len` and on `samples` random words of length at most
/// `max_len`.
pub fn quotient_check<A: MarkedGroup, B: MarkedGroup>(
    a: &A,
    b: &B,
    samples: u64,
    max_len: usize,
    exhaustive_len: usize,
    seed: u64,
) -> QuotientReport {
    let mut checked = 0;
    let fails = |w: &FreeWord| a.is_identity(&a.eval(w)) && !b.is_identity(&b.eval(w));
    // Exhaustive part, by depth-first extension of prefixes.
    let mut stack: Vec<(A::Elem, B::Elem, Vec<Letter>)> = vec![(a.identity(), b.identity(), Vec::new())];
    while let Some((x, y, w)) = stack.pop() {
        checked += 1;
        if a.is_identity(&x) && !b.is_identity(&y) {
            return QuotientReport { holds: false, words_checked: checked, witness: Some(FreeWord::new(w)) };
        }
        if w.len() < exhaustive_len {
            for letter in Letter::ALL {
                let (mut x2, mut y2) = (x.clone(), y.clone());
                a.apply_letter(&mut x2, letter);
                b.apply_letter(&mut y2, letter);
                let mut w2 = w.clone();
                w2.push(letter);
                stack.push((x2, y2, w2));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let len = rng.gen_range(0..=max_len);
        let w = FreeWord::new((0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect());
        checked += 1;
        if fails(&w) {
            return QuotientReport { holds: false, words_checked: checked, witness: Some(w) };
        }
    }
    QuotientReport { holds: true, words_checked: checked, witness: None }
}
