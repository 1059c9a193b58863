//! Exact arithmetic for `D_l`, `Gamma_i(k, l, m)` and their diagonal products.

mod dihedral;
mod marked;
mod order;
mod spec;
mod word;
mod wreath;

pub use dihedral::{Dihedral, LampLetter, LampWord};
pub use marked::{MarkedGroup, PairGroup, StepSample, STEP_BITS_LEVEL1};
pub use order::Order;
pub use spec::{DiagonalSpec, GroupSpec, MAX_LEVEL};
pub use word::{FreeWord, Letter};
pub use wreath::{Lamp, WreathElem};
