//! The 1-D fiber eigenproblem for a step magnetic field.
//!
//! A piecewise-constant field taking values `b1` (lower half-plane) and `b2`
//! (upper half-plane) reduces, for a flat barrier, to the family of
//! operators -d²/dt² + V(ξ, t) on the line, with
//! V(ξ, t) = (b1·t + ξ)² for t < 0 and (b2·t + ξ)² for t > 0.
//! This module computes the band function ξ ↦ μ(ξ), its infimum β, and the
//! normalized ground state φ with its boundary data φ(0), φ'(0).

use crate::util::interp::one_sided_forward;
use crate::util::ode::{integrate_linear_sampled, integrate_riccati};
use crate::util::optimize::{brent_min, brent_root};
use crate::util::quad::simpson;
use crate::util::tridiag::Tridiag;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Default node count for the finite-difference grid.
pub const DEFAULT_GRID_N: usize = 4001;
/// Absolute tolerance for eigenvalue bisection.
pub const EIG_TOL: f64 = 1e-10;
/// Tolerance for the band minimizer in ξ.
pub const XI_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FiberError {
    #[error("zero field: b1 = b2 = 0 has no magnetic content")]
    ZeroField,
    #[error("eigensolver did not converge within the iteration cap")]
    NotConverged,
    #[error("grid too narrow: endpoint potential {v_end:.3} must exceed 10x the eigenvalue {mu:.3}")]
    GridTooNarrow { v_end: f64, mu: f64 },
    #[error("no interior minimum in the scan bracket; field case `{0:?}` does not trap")]
    NoInteriorMinimum(FieldCase),
    #[error("band minimization requires a trapping or symmetric-trapping field, got {0:?}")]
    NotTrapping(FieldCase),
    #[error("shooting: no sign change of the matching function in the bracket")]
    NoRoot,
    #[error("one-sided derivatives at t=0 disagree: {left:.3e} vs {right:.3e}")]
    DerivativeMismatch { left: f64, right: f64 },
    #[error("invalid grid: {0}")]
    BadGrid(String),
}

/// Classification of the step pair (b1, b2), after rescaling so max|bᵢ| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldCase {
    /// One intensity vanishes: {0, 1}. No band minimum exists.
    MagneticWall,
    /// (1, b) or (b, 1) with b in (-1, 0): the band function has a
    /// non-degenerate interior minimum.
    Trapping,
    /// (-1, 1) or (1, -1): reduces to the half-line Neumann problem; the
    /// band minimum equals the de Gennes constant.
    SymmetricTrapping,
    /// (1, b) or (b, 1) with b in (0, 1): infimum b is not attained.
    NonTrapping,
    /// b1 = b2 != 0: constant field, flat band at |b|.
    Uniform,
    /// Any orientation not covered by the canonical list (for example both
    /// intensities negative, or (0, -1)); spectrally these are complex
    /// conjugates of canonical cases.
    Other,
}

/// A step field (b1 on t<0, b2 on t>0) with its classification and the
/// positive factor that rescaled it to max|bᵢ| = 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepField {
    pub b1: f64,
    pub b2: f64,
    pub case: FieldCase,
    /// max(|b1_in|, |b2_in|) of the original input.
    pub scale: f64,
}

/// Classify a field pair and rescale it to the canonical max|bᵢ| = 1.
///
/// The symmetric-trapping pair is stored in the (-1, 1) orientation: the two
/// orderings are images of each other under t ↦ -t, ξ ↦ -ξ, and (-1, 1) is
/// the representative whose minimum sits at ξ = -√Θ₀.
pub fn classify(b1: f64, b2: f64) -> Result<StepField, FiberError> {
    if b1 == 0.0 && b2 == 0.0 {
        return Err(FiberError::ZeroField);
    }
    let scale = b1.abs().max(b2.abs());
    let mut c1 = b1 / scale;
    let mut c2 = b2 / scale;
    let case = if c1 == 0.0 || c2 == 0.0 {
        FieldCase::MagneticWall
    } else if c1 == c2 {
        FieldCase::Uniform
    } else if c1 == -c2 {
        FieldCase::SymmetricTrapping
    } else if c1 == 1.0 && (-1.0..0.0).contains(&c2) || c2 == 1.0 && (-1.0..0.0).contains(&c1) {
        FieldCase::Trapping
    } else if c1 == 1.0 && (0.0..1.0).contains(&c2) || c2 == 1.0 && (0.0..1.0).contains(&c1) {
        FieldCase::NonTrapping
    } else {
        FieldCase::Other
    };
    if case == FieldCase::SymmetricTrapping && c1 > 0.0 {
        (c1, c2) = (c2, c1);
    }
    Ok(StepField {
        b1: c1,
        b2: c2,
        case,
        scale,
    })
}

impl StepField {
    /// The step profile σ(t): b1 for t < 0, b2 for t > 0.
    pub fn sigma(&self, t: f64) -> f64 {
        if t < 0.0 {
            self.b1
        } else {
            self.b2
        }
    }

    /// Fiber potential V(ξ, t); both branches give ξ² at t = 0.
    pub fn potential(&self, xi: f64, t: f64) -> f64 {
        let a = self.sigma(t) * t + xi;
        a * a
    }

    /// The field with the two intensities exchanged (re-classified).
    pub fn swapped(&self) -> StepField {
        classify(self.b2, self.b1).expect("nonzero field stays nonzero")
    }

    pub fn is_trapping(&self) -> bool {
        matches!(
            self.case,
            FieldCase::Trapping | FieldCase::SymmetricTrapping
        )
    }
}

/// Uniform grid on [t_min, t_max] with a node exactly at t = 0, where the
/// derivative-matching condition of the operator domain lives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grid1D {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self, FiberError> {
        if !(t_min < 0.0 && 0.0 < t_max) {
            return Err(FiberError::BadGrid("need t_min < 0 < t_max".into()));
        }
        if n < 8 {
            return Err(FiberError::BadGrid("need at least 8 nodes".into()));
        }
        let g = Self { t_min, t_max, n };
        let h = g.spacing();
        let k = -t_min / h;
        if (k - k.round()).abs() > 1e-9 {
            return Err(FiberError::BadGrid(
                "no grid node falls exactly on t = 0".into(),
            ));
        }
        Ok(g)
    }

    /// Symmetric grid [-l, l] with an odd node count (so t = 0 is a node).
    pub fn symmetric(l: f64, n: usize) -> Self {
        let n = if n % 2 == 0 { n + 1 } else { n };
        Self {
            t_min: -l,
            t_max: l,
            n,
        }
    }

    /// Default grid for a field: half-width 12/sqrt(min(1,|b1|,|b2|)), which
    /// keeps the Gaussian truncation error far below the solver tolerance.
    pub fn for_field(field: &StepField) -> Self {
        let bmin = field.b1.abs().min(field.b2.abs()).min(1.0);
        Self::symmetric(12.0 / bmin.sqrt(), DEFAULT_GRID_N)
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.spacing()
    }

    /// Index of the node at t = 0.
    pub fn zero_index(&self) -> usize {
        (-self.t_min / self.spacing()).round() as usize
    }

    /// Same span, doubled resolution (node at 0 is preserved).
    pub fn refined(&self) -> Self {
        Self {
            t_min: self.t_min,
            t_max: self.t_max,
            n: 2 * self.n - 1,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// One point of the band function: μ(ξ) with the solver residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandPoint {
    pub xi: f64,
    pub mu: f64,
    pub residual: f64,
}

/// Normalized band-minimizing ground state with boundary data.
#[derive(Debug, Clone, Serialize)]
pub struct GroundState1D {
    pub field: StepField,
    pub xi_b: f64,
    pub beta_b: f64,
    pub grid: Grid1D,
    pub phi: Vec<f64>,
    pub phi0: f64,
    pub dphi0: f64,
}

/// Second-order centered finite-difference matrix of -d²/dt² + V(ξ, t) with
/// Dirichlet ends. The t = 0 node takes the average of the one-sided
/// potential limits (both equal ξ²).
pub fn assemble_fiber(field: &StepField, xi: f64, grid: &Grid1D) -> Tridiag {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let i0 = grid.zero_index();
    let diag: Vec<f64> = (0..grid.n)
        .map(|i| {
            let t = grid.node(i);
            let v = if i == i0 {
                xi * xi
            } else {
                field.potential(xi, t)
            };
            2.0 * inv_h2 + v
        })
        .collect();
    let off = vec![-inv_h2; grid.n - 1];
    Tridiag { diag, off }
}

/// Lowest eigenvalue of the fiber operator on `grid` (Sturm bisection plus
/// inverse iteration for the residual).
pub fn mu(field: &StepField, xi: f64, grid: &Grid1D) -> Result<BandPoint, FiberError> {
    let t = assemble_fiber(field, xi, grid);
    let lam = t.lowest_eigenvalue(EIG_TOL);
    let (_, res) = t.inverse_iteration(lam, 3);
    let v_end = field
        .potential(xi, grid.t_min)
        .min(field.potential(xi, grid.t_max));
    if v_end < 10.0 * lam {
        return Err(FiberError::GridTooNarrow { v_end, mu: lam });
    }
    if res > 1e-6 {
        return Err(FiberError::NotConverged);
    }
    Ok(BandPoint {
        xi,
        mu: lam,
        residual: res,
    })
}

/// Sample the band function at the given momenta (order preserved; points
/// are independent and evaluated in parallel).
pub fn band_curve(
    field: &StepField,
    xi_values: &[f64],
    grid: &Grid1D,
) -> Result<Vec<BandPoint>, FiberError> {
    xi_values
        .par_iter()
        .map(|&xi| mu(field, xi, grid))
        .collect()
}

/// High-accuracy band value by shooting on the ODE -u'' + V u = μ u.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeberSolution {
    pub mu: f64,
    /// |u'/u(0+) - u'/u(0-)| at the returned μ.
    pub log_derivative_mismatch: f64,
}

const RICCATI_STEP: f64 = 1.0e-3;

fn riccati_mismatch(field: &StepField, xi: f64, mu: f64, l: f64) -> f64 {
    let q = |t: f64| field.potential(xi, t) - mu;
    let n = (l / RICCATI_STEP).ceil() as usize;
    // start on the decaying branch at each end; integration toward the
    // matching point is the stable direction
    let r_left = integrate_riccati(&q, -l, 0.0, q(-l).max(1e-12).sqrt(), n);
    let r_right = integrate_riccati(&q, l, 0.0, -q(l).max(1e-12).sqrt(), n);
    r_left - r_right
}

/// Shooting solver: integrate inward from both ends on the decaying branch
/// and root-find μ so the logarithmic derivatives match at t = 0.
///
/// Serves as the accuracy oracle for [`mu`]; the bracket is centered on the
/// finite-difference eigenvalue.
pub fn weber_solve(field: &StepField, xi: f64) -> Result<WeberSolution, FiberError> {
    if !field.is_trapping() {
        return Err(FiberError::NotTrapping(field.case));
    }
    weber_solve_any(field, xi)
}

/// Shooting solve without the trapping-case restriction (used internally and
/// for uniform-field sanity checks).
pub fn weber_solve_any(field: &StepField, xi: f64) -> Result<WeberSolution, FiberError> {
    let grid = Grid1D::for_field(field);
    let l = -grid.t_min;
    let center = mu(field, xi, &grid)?.mu;
    let f = |m: f64| riccati_mismatch(field, xi, m, l);
    let (mut lo, mut hi) = (center - 0.05, center + 0.05);
    if f(lo) * f(hi) > 0.0 {
        return Err(FiberError::NoRoot);
    }
    // tighten with a few bisections, then Brent
    for _ in 0..4 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = brent_root(f, lo, hi, 1e-13, 200).ok_or(FiberError::NoRoot)?;
    Ok(WeberSolution {
        mu: root,
        log_derivative_mismatch: riccati_mismatch(field, xi, root, l).abs(),
    })
}

/// Reconstruct the normalized ground state on `grid` at (ξ, μ) by linear
/// shooting from both ends.
fn ground_state_on_grid(
    field: &StepField,
    xi: f64,
    mu: f64,
    grid: &Grid1D,
) -> (Vec<f64>, f64, f64) {
    let q = |t: f64| field.potential(xi, t) - mu;
    let i0 = grid.zero_index();
    let n_right = grid.n - 1 - i0;
    // RK4 substeps sized so the per-e-fold error stays near 1e-12
    let sub = ((grid.spacing() / 4.0e-4).ceil() as usize).max(8);
    let start = 1e-120;
    let (ul, _) = integrate_linear_sampled(
        &q,
        grid.t_min,
        0.0,
        [start, start * q(grid.t_min).max(0.0).sqrt()],
        i0,
        sub,
    );
    let (ur_rev, _) = integrate_linear_sampled(
        &q,
        grid.t_max,
        0.0,
        [start, -start * q(grid.t_max).max(0.0).sqrt()],
        n_right,
        sub,
    );
    let scale = ul[i0] / ur_rev[n_right];
    let mut phi: Vec<f64> = Vec::with_capacity(grid.n);
    phi.extend_from_slice(&ul[..i0]);
    phi.extend(ur_rev.iter().rev().map(|&v| v * scale));
    // L2 normalization (Simpson) and the positive sign convention at t = 0
    let h = grid.spacing();
    let phi2: Vec<f64> = phi.iter().map(|&p| p * p).collect();
    let nrm = simpson(&phi2, h).sqrt();
    let sgn = if phi[i0] >= 0.0 { 1.0 } else { -1.0 };
    for p in phi.iter_mut() {
        *p *= sgn / nrm;
    }
    // one-sided fourth-order derivatives at t = 0 from each side
    let left: Vec<f64> = (0..5).map(|k| phi[i0 - k]).collect();
    let d_left = -one_sided_forward(&left, h);
    let d_right = one_sided_forward(&phi[i0..i0 + 5], h);
    (phi, d_left, d_right)
}

/// Minimize the band function over ξ and return the normalized ground state.
///
/// A coarse scan over ξ ∈ [-3, 3] brackets the minimum (the minimizer is
/// negative for (b, 1)-oriented fields and positive for (1, b); the scan
/// covers both). Brent refinement runs first on the finite-difference band,
/// then on the shooting band for the final ξ and β.
pub fn minimize_band(field: &StepField, grid: &Grid1D) -> Result<GroundState1D, FiberError> {
    if !field.is_trapping() {
        return Err(FiberError::NotTrapping(field.case));
    }
    let coarse = Grid1D::symmetric(-grid.t_min, 801);
    let scan: Vec<f64> = (0..121).map(|i| -3.0 + i as f64 * 0.05).collect();
    let pts = band_curve(field, &scan, &coarse)?;
    let k = pts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.mu.partial_cmp(&b.1.mu).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if k == 0 || k == scan.len() - 1 {
        return Err(FiberError::NoInteriorMinimum(field.case));
    }
    let (xi_fd, _) = brent_min(
        |xi| assemble_fiber(field, xi, grid).lowest_eigenvalue(EIG_TOL),
        scan[k - 1],
        scan[k + 1],
        1e-7,
        200,
    );
    // final refinement against the shooting band function
    let (xi_b, beta_b) = brent_min(
        |xi| match weber_solve_any(field, xi) {
            Ok(w) => w.mu,
            Err(_) => f64::INFINITY,
        },
        xi_fd - 5e-3,
        xi_fd + 5e-3,
        XI_TOL,
        200,
    );
    let (phi, d_left, d_right) = ground_state_on_grid(field, xi_b, beta_b, grid);
    let max_phi = phi.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if (d_left - d_right).abs() > 1e-4 * max_phi {
        return Err(FiberError::DerivativeMismatch {
            left: d_left,
            right: d_right,
        });
    }
    let i0 = grid.zero_index();
    Ok(GroundState1D {
        field: *field,
        xi_b,
        beta_b,
        grid: *grid,
        phi0: phi[i0],
        dphi0: 0.5 * (d_left + d_right),
        phi,
    })
}

/// De Gennes constant Θ₀: the minimum over ξ of the lowest Neumann
/// eigenvalue of -d²/dt² + (t + ξ)² on the half-line t > 0.
///
/// Brute-force finite differences with a ghost-node Neumann row and
/// Richardson extrapolation over a doubled grid; this is the in-repo
/// reference that anchors every Θ₀ comparison.
pub fn degennes_oracle() -> f64 {
    degennes_oracle_with(3001)
}

/// Same oracle at a caller-chosen base resolution (n and 2n-1 are combined).
pub fn degennes_oracle_with(n: usize) -> f64 {
    let f = |xi: f64| {
        let a = degennes_section_n(xi, n);
        let b = degennes_section_n(xi, 2 * n - 1);
        (4.0 * b - a) / 3.0
    };
    let (_, theta) = brent_min(f, -1.2, -0.3, 1e-9, 200);
    theta
}

/// Lowest Neumann eigenvalue of the half-line section at fixed ξ
/// (Richardson-extrapolated); exceeds Θ₀ for every ξ.
pub fn degennes_section(xi: f64) -> f64 {
    let a = degennes_section_n(xi, 3001);
    let b = degennes_section_n(xi, 6001);
    (4.0 * b - a) / 3.0
}

fn degennes_section_n(xi: f64, n: usize) -> f64 {
    let t_max = 12.0;
    let h = t_max / (n - 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * h;
            2.0 * inv_h2 + (t + xi) * (t + xi)
        })
        .collect();
    let mut off = vec![-inv_h2; n - 1];
    // ghost-node Neumann condition at t = 0, symmetrized
    off[0] = -std::f64::consts::SQRT_2 * inv_h2;
    Tridiag { diag, off }.lowest_eigenvalue(EIG_TOL)
}
