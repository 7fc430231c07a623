//! Shared numerical kernels: quadrature, tridiagonal eigensolves, scalar
//! minimization, interpolation, and fixed-step ODE integration.

pub mod interp;
pub mod ode;
pub mod optimize;
pub mod quad;
pub mod tridiag;
