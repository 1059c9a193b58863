//! Dihedral lamplighter groups `Z/mZ wr D_l`, their iterated towers and
//! diagonal products, together with switch-walk-switch random walks on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: exact arithmetic (dihedral normal forms, wreath products,
//!   diagonal products, free-word evaluation).
//! * [`metric`]: word length for the switch-walk-switch generating set,
//!   exact by breadth-first search and bounded by lamp/range estimates.
//! * [`ball`]: marked Cayley balls, ball coincidence and the finite-factor
//!   comparison constants of diagonal products.
//! * [`walk`]: random-walk sampling, parallel speed curves, exponent fits and
//!   exact alternating-word distributions in dihedral groups.
//! * [`scheduler`]: stage-by-stage parameter selection for diagonal products
//!   whose speed oscillates between `n^(1/2)` and `n^lambda`.
//! * [`cli`]: the `lampspeed` command line.

pub mod ball;
pub mod cli;
pub mod error;
pub mod group;
pub mod metric;
pub mod scheduler;
pub mod walk;

pub use error::{Error, Result};
