use rustc_hash::FxHashMap;

use crate::group::MarkedGroup;

/// Distinct switch-walk-switch generators with the number of step outcomes
/// (order-resolved words at level one) mapping to each.
#[derive(Clone, Debug)]
pub struct SwsGenerators<E> {
    pub elements: Vec<E>,
    pub multiplicity: Vec<u32>,
}

impl<E> SwsGenerators<E> {
    /// Total number of step outcomes (`2^step_bits`).
    pub fn outcomes(&self) -> u64 {
        self.multiplicity.iter().map(|&m| m as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Evaluate every step outcome and deduplicate, keeping first-seen order.
pub fn sws_generators<G: MarkedGroup>(group: &G) -> SwsGenerators<G::Elem> {
    let mut index: FxHashMap<G::Elem, usize> = FxHashMap::default();
    let mut elements = Vec::new();
    let mut multiplicity = Vec::new();
    for bits in 0..(1u64 << group.step_bits()) {
        let g = group.step_elem(bits);
        match index.get(&g) {
            Some(&i) => multiplicity[i] += 1,
            None => {
                index.insert(g.clone(), elements.len());
                elements.push(g);
                multiplicity.push(1);
            }
        }
    }
    SwsGenerators { elements, multiplicity }
}
