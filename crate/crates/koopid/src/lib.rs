//! Koopman system identification from noisy input-output data.
//!
//! The crate fits lifted linear models `theta(x_{k+1}) = A theta(x_k) + B u_k`
//! to trajectory data. Plain least-squares estimates of `A` are biased toward
//! lower eigenvalue magnitudes when the measurements are noisy, and may be
//! unstable outright. Two remedies are provided, separately or combined:
//!
//! * regressions run both forward and backward in time, whose estimates are
//!   merged into a bias-reduced model ([`fbcombine`]);
//! * spectral-radius constraints imposed through linear matrix inequalities,
//!   solved as a semidefinite program ([`stability`]).
//!
//! The remaining modules supply the surrounding machinery: dense matrix
//! kernels ([`matlib`]), lifting functions ([`lifting`]), a simulated Duffing
//! oscillator benchmark ([`dataset`]), snapshot assembly ([`snapshots`]),
//! unconstrained EDMD ([`edmd`]), multi-step prediction and evaluation
//! metrics ([`rollout`]), and a JSON model file format ([`modelfile`]).

pub mod dataset;
pub mod edmd;
pub mod fbcombine;
pub mod lifting;
pub mod matlib;
pub mod modelfile;
pub mod rollout;
pub mod snapshots;
pub mod stability;



