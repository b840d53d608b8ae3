//! Containment-probability bounds for nonlinear stochastic differential
//! equations of the form `dX = f(X) dt + σ dB`.
//!
//! The crate is organized around four pieces:
//!
//! * [`drift`]: drift fields (built-in families, parsed scalar expressions,
//!   radial profiles), noise and query types, and the radial rotation `R_x`.
//! * [`sim`]: Euler–Maruyama paths, sign/rotation coupled pairs, first-exit
//!   detection with Brownian-bridge correction, and strip hitting times.
//! * [`mc`] and [`spectral`]: Monte Carlo containment estimates and the
//!   Ornstein–Uhlenbeck decay rates (Kushner, Sturm–Liouville, asymptotic).
//! * [`dominance`]: symmetric pull-dominance checks, contraction-rate
//!   estimation and the contraction → OU containment bound.
//!
//! Decay-rate methods and noise couplings are strategies selected by name
//! at runtime; see [`rate::RateMethodRegistry`] and
//! [`sim::coupling::coupling_by_name`].

pub mod dominance;
pub mod drift;
mod error;
pub mod mc;
pub mod rate;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};

pub use drift::{ContainmentQuery, DriftSpec, NoiseSpec};
pub use rate::{RateEstimate, RateMethodKind};
pub use sim::{CoupledPair, RngStream, Trajectory};
