//! Discrimination bounds and cloning fidelities for binary coherent state
//! (BCS) alphabets `{|+α>, |-α>}`.
//!
//! The crate is organized bottom-up:
//!
//! - [`fock`]: truncated number-basis states and operators, the ground truth
//!   every other layer is checked against.
//! - [`gaussian`]: exact phase-space calculus for the Gaussian schemes.
//! - [`alphabet`]: qubit and cat-state descriptions of the alphabet and the
//!   maps between 2×2 matrices and the oscillator space.
//! - [`discrimination`]: homodyne, Kennedy, optimized-displacement and
//!   Helstrom receivers, plus unambiguous discrimination.
//! - [`cloners`]: the optimal two-state cloner and five practical schemes.
//! - [`analysis`]: Wigner grids and quadrature cumulants.
//! - [`optimize`]: the bounded derivative-free maximizer used by the cloners.
//!
//! Quadratures follow `x = (a + a†)/2`, so the vacuum variance is 1/4.
//! Amplitudes `α` of the alphabet are real and non-negative.

pub mod alphabet;
pub mod analysis;
pub mod cloners;
pub mod discrimination;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod optimize;
pub mod par;

pub use error::{Error, Result};
pub use fock::{C64, DensityOp, LinearOp, PureState, TruncationConfig};
pub use gaussian::{GaussianMixture, GaussianState, TwoModeGaussian};
pub use par::Exec;
