//! Moment functionals of the trapping ground state and the J-decomposition
//! of the corner energy.
//!
//! The n-th moment weighs |φ|² by (ξ + σ(t)t)ⁿ/σ(t), where σ is the step
//! profile. The integrand jumps at t = 0 (σ does), so every quadrature here
//! splits there and evaluates σ branch-wise.

use crate::fiber1d::GroundState1D;
use crate::util::interp::stencil_derivative;
use crate::util::quad::{simpson, simpson_coarse};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("closed form needs the (b, 1) orientation with b in [-1, 0), got ({b1}, {b2})")]
    WrongOrientation { b1: f64, b2: f64 },
    #[error("fields are not swapped orderings of each other")]
    NotSwappedPair,
    #[error("moment order must be >= 0")]
    BadOrder,
}

/// A computed moment with a step-halving quadrature error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentReport {
    pub n: u32,
    pub value: f64,
    pub quadrature_error_estimate: f64,
}

/// The three-part decomposition of the δ-order energy coefficient.
/// j_total = j1 + j2 + j3 by construction; j1 = -j2 up to quadrature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JBreakdown {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub j_total: f64,
}

/// Split Simpson quadrature of a σ-branch-aware integrand over the grid.
/// `f(i, t, side)` receives side = -1 on [t_min, 0] and +1 on [0, t_max].
fn split_quadrature<F: Fn(usize, f64, i8) -> f64>(gs: &GroundState1D, f: F) -> (f64, f64) {
    let grid = &gs.grid;
    let h = grid.spacing();
    let i0 = grid.zero_index();
    let left: Vec<f64> = (0..=i0).map(|i| f(i, grid.node(i), -1)).collect();
    let right: Vec<f64> = (i0..grid.n).map(|i| f(i, grid.node(i), 1)).collect();
    let fine = simpson(&left, h) + simpson(&right, h);
    let coarse = simpson_coarse(&left, h) + simpson_coarse(&right, h);
    (fine, (fine - coarse).abs())
}

/// n-th moment of the ground state: ∫ (ξ + σt)ⁿ |φ|² / σ dt.
pub fn moment(gs: &GroundState1D, n: u32) -> MomentReport {
    let (b1, b2) = (gs.field.b1, gs.field.b2);
    let xi = gs.xi_b;
    let (value, err) = split_quadrature(gs, |i, t, side| {
        let s = if side < 0 { b1 } else { b2 };
        (xi + s * t).powi(n as i32) * gs.phi[i] * gs.phi[i] / s
    });
    MomentReport {
        n,
        value,
        quadrature_error_estimate: err,
    }
}

/// Closed form of the third moment, valid for fields in the (b, 1)
/// orientation with b in [-1, 0): (1/3)(1/b - 1) ξ φ(0) φ'(0).
pub fn m3_closed_form(gs: &GroundState1D) -> Result<f64, MomentError> {
    let (b1, b2) = (gs.field.b1, gs.field.b2);
    if !(b2 == 1.0 && (-1.0..0.0).contains(&b1)) {
        return Err(MomentError::WrongOrientation { b1, b2 });
    }
    Ok((1.0 / b1 - 1.0) / 3.0 * gs.xi_b * gs.phi0 * gs.dphi0)
}

/// Residual of the sign-flip identity Mₙ(b1, b2) = (-1)ⁿ Mₙ(b2, b1).
pub fn sign_flip_check(
    gs_ab: &GroundState1D,
    gs_ba: &GroundState1D,
    n: u32,
) -> Result<f64, MomentError> {
    let sw = gs_ab.field.swapped();
    if (sw.b1 - gs_ba.field.b1).abs() > 1e-12 || (sw.b2 - gs_ba.field.b2).abs() > 1e-12 {
        return Err(MomentError::NotSwappedPair);
    }
    let ma = moment(gs_ab, n).value;
    let mb = moment(gs_ba, n).value;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok((ma - sign * mb).abs())
}

/// The J-decomposition: J1 = -β∫t|φ|², J2 the t-weighted energy density,
/// J3 the t-weighted cross term; J = J1 + J2 + J3 collapses to
/// -M₃ + ξ²M₁ and its sign decides whether the corner gains energy.
pub fn j_breakdown(gs: &GroundState1D) -> JBreakdown {
    let (b1, b2) = (gs.field.b1, gs.field.b2);
    let xi = gs.xi_b;
    let dphi = stencil_derivative(&gs.phi, gs.grid.spacing());
    let (int_t_phi2, _) = split_quadrature(gs, |i, t, _| t * gs.phi[i] * gs.phi[i]);
    let j1 = -gs.beta_b * int_t_phi2;
    let (j2, _) = split_quadrature(gs, |i, t, side| {
        let b = if side < 0 { b1 } else { b2 };
        let w = b * t + xi;
        (dphi[i] * dphi[i] + w * w * gs.phi[i] * gs.phi[i]) * t
    });
    let (j3, _) = split_quadrature(gs, |i, t, side| {
        let b = if side < 0 { b1 } else { b2 };
        -(b * t + xi) * (b * t + 2.0 * xi) * gs.phi[i] * gs.phi[i] * t
    });
    JBreakdown {
        j1,
        j2,
        j3,
        j_total: j1 + j2 + j3,
    }
}

/// The per-side coefficients J_{b2} (upper) and J_{b1} (lower) entering the
/// transition-sector energies at angle parameter √δ; each carries its own
/// √δ-weighted correction term.
pub fn j_side_coefficients(gs: &GroundState1D, delta: f64) -> (f64, f64) {
    let (b1, b2) = (gs.field.b1, gs.field.b2);
    let xi = gs.xi_b;
    let sd = delta.sqrt();
    let dphi = stencil_derivative(&gs.phi, gs.grid.spacing());
    let grid = &gs.grid;
    let h = grid.spacing();
    let i0 = grid.zero_index();
    let upper_main: Vec<f64> = (i0..grid.n)
        .map(|i| {
            let t = grid.node(i);
            let w = b2 * t + xi;
            (dphi[i] * dphi[i] + w * w * gs.phi[i] * gs.phi[i]) * t
        })
        .collect();
    let upper_corr: Vec<f64> = (i0..grid.n)
        .map(|i| {
            let t = grid.node(i);
            (b2 * t + xi) * (b2 * t + 2.0 * xi) * gs.phi[i] * gs.phi[i] * t
        })
        .collect();
    let j_b2 = simpson(&upper_main, h) - sd * simpson(&upper_corr, h);
    let lower_main: Vec<f64> = (0..=i0)
        .map(|i| {
            let t = grid.node(i);
            let w = b1 * t + xi;
            (dphi[i] * dphi[i] + w * w * gs.phi[i] * gs.phi[i]) * t
        })
        .collect();
    let lower_corr: Vec<f64> = (0..=i0)
        .map(|i| {
            let t = grid.node(i);
            (b1 * t + xi) * (b1 * t + 2.0 * xi) * gs.phi[i] * gs.phi[i] * t
        })
        .collect();
    let j_b1 = -simpson(&lower_main, h) - sd * simpson(&lower_corr, h);
    (j_b2, j_b1)
}

/// ∫ t |φ(t)|² dt over the line (enters the trial-state norm expansion).
pub fn t_weighted_norm(gs: &GroundState1D) -> f64 {
    split_quadrature(gs, |i, t, _| t * gs.phi[i] * gs.phi[i]).0
}
