//! Path simulation: Euler–Maruyama, coupled pairs, exit detection and
//! strip hitting times.

mod coupled;
pub mod coupling;
mod exit;
mod hitting;
mod integrate;
mod rng;
mod trajectory;

pub use coupled::{simulate_coupled, simulate_coupled_1d, simulate_coupled_nd, CoupledPair};
pub use coupling::{coupling_by_name, NoiseCoupling, PlainNoise, RotationCoupling, SignCoupling};
pub use exit::{bridge_exit_probability, first_exit, ExitSimulator, PathExits};
pub use hitting::{hitting_times, Excursion};
pub use integrate::{euler_maruyama, integrate, TimeGrid};
pub use rng::{fork_seed, GaussianSource, RngStream, UniformSource};
pub use trajectory::{ExitEvent, Trajectory};
