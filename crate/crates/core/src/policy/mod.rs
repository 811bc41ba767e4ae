//! Attention-based actor-critic.
//!
//! Every particle's features are embedded twice. One embedding goes through
//! a self-attention encoder so each particle sees the whole population; the
//! other queries the encoded population through cross-attention. Per-particle
//! Gaussian heads produce the coefficients, and the critic reads the mean of
//! the decoded tokens. There are no positional encodings, so outputs permute
//! with the rows of the input and the value is order-free.
//!
//! The network is generic over [`Real`]; rollouts and training run in `f32`.

mod adam;
pub mod checkpoint;
mod gaussian;
mod layers;
mod network;
mod params;
mod real;

pub use adam::Adam;
pub use gaussian::{doubling_entropy_gain, log_density, GaussianHead, SIGMA_MAX, SIGMA_MIN};
pub use network::{backward, forward, forward_batch, ForwardCache, PolicyOutput};
pub use params::{PolicyConfig, PolicyParams, TensorSpec};
pub use real::Real;
