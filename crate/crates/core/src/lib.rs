//! Spectral toolkit for step magnetic fields with an almost-flat barrier.
//!
//! The crate computes, for a piecewise-constant magnetic field (b1, b2):
//!
//! * [`fiber1d`] — the 1-D band function μ(ξ), its infimum β, and the
//!   normalized trapping ground state φ;
//! * [`moments`] — the weighted moments Mₙ of |φ|² and the J-decomposition
//!   controlling the corner energy gain;
//! * [`trialstate`] — an explicit 2-D test function on the broken-line
//!   domain whose Rayleigh quotient drops below β by ~M₃²δ²/4;
//! * [`wedge2d`] — gauge-link discretizations of the full 2-D operator on
//!   truncated broken-line planes and on bounded domains, with a
//!   shift-invert Lanczos eigensolver and decay/symmetry diagnostics;
//! * [`verify`] — the acceptance suite wiring all of the above together.

pub mod fiber1d;
pub mod moments;
pub mod trialstate;
pub mod util;
pub mod verify;
pub mod wedge2d;
