//! Learned hyper-parameter control for niching particle swarms on dynamic
//! optimization problems.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithmic piece:
//!
//! * [`bench`] builds non-stationary problem instances and scores runs by
//!   offline error.
//! * [`nbnc`] is the low-level optimizer, a nearest-better clustering PSO with
//!   an elite archive used to sense landscape drift.
//! * [`mdp`] turns a swarm into per-particle features, maps actions to PSO
//!   coefficients, and computes the drift-aligned reward.
//! * [`policy`] is the attention-based actor-critic with hand-written
//!   reverse-mode gradients.
//! * [`ppo`] runs rollouts, advantage estimation and clipped-surrogate updates.
//! * [`navsim`] re-frames path planning among moving obstacles as a dynamic
//!   optimization problem solved by the same stack.
//!
//! File formats, the CLI and reporting live in the companion `dynopt` crate.
#![no_std]

extern crate alloc;

pub mod bench;
pub mod error;
pub mod mdp;
pub mod navsim;
pub mod nbnc;
pub mod objective;
pub mod policy;
pub mod ppo;
pub mod rng;

mod prelude {
    pub(crate) use alloc::vec::Vec;
    // Float math for `no_std`; with `std` in the crate graph the inherent
    // methods take precedence.
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}

pub use error::Error;
pub use objective::{Budget, FnObjective, Objective};
