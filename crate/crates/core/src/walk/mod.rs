//! Switch-walk-switch random walks: walker state, speed curves, exponent
//! fits and alternating-word distributions in dihedral groups.

mod coupling;
mod curve;
mod dist;
mod fit;
mod rng;
mod state;

pub use coupling::{coupled_2l_check, CouplingReport};
pub use curve::{estimate_speed_curve, simulate_walk, SpeedCurve};
pub use dist::{check_ineq_32, dihedral_dist, ineq_32, norm_law, DihedralDist, Ineq32, Prob};
pub use fit::{fit_exponent, Bound, ExponentFit, BOOTSTRAP_RESAMPLES};
pub use rng::{sample_step, StepStream};
pub use state::{WalkBounds, Walker};
