//! 2-D magnetic Schrödinger operators on broken-line-barrier domains,
//! discretized with gauge links (one phase per lattice edge, equal to the
//! line integral of the vector potential), so discrete gauge invariance is
//! exact. Dirichlet conditions are imposed by keeping only interior nodes.

mod eig;
mod diag;
mod sweeps;

pub use diag::{agmon_fit, ims_check, symmetry_check, AngularPartition, RadialPartition};
pub use eig::{lowest_eig, transfer_guess, LanczosOpts};
pub use sweeps::{lambda1_sweep, lambda_delta, BSweepRow, DeltaRow, DomainSpec};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WedgeError {
    #[error("mesh too coarse: h = {h} must satisfy h <= {limit:.4}")]
    MeshTooCoarse { h: f64, limit: f64 },
    #[error("truncation too small: r_trunc = {r} must be >= {need:.2}")]
    BoxTooSmall { r: f64, need: f64 },
    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),
    #[error("eigenvalue not simple: gap {gap:.3e} below 10x residual {res:.3e}")]
    DegenerateEigenvalue { gap: f64, res: f64 },
    #[error("no bound state: lambda = {lambda:.6} is not below the threshold {beta:.6}")]
    NoBoundState { lambda: f64, beta: f64 },
    #[error("domain invalid: {0}")]
    BadDomain(String),
}

/// Vector potential of the broken-line step field, 𝒜 = (a1, 0) with
/// a1 = -b1·x2 + (b1-b2)·x1·tanδ on the lower region for x1 < 0 and
/// a1 = -b2·x2 on the upper region; `strength` scales the whole field.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaugeField {
    pub b1: f64,
    pub b2: f64,
    pub delta: f64,
    pub strength: f64,
}

impl GaugeField {
    pub fn new(b1: f64, b2: f64, delta: f64) -> Self {
        Self {
            b1,
            b2,
            delta,
            strength: 1.0,
        }
    }

    pub fn with_strength(mut self, b: f64) -> Self {
        self.strength = b;
        self
    }

    /// Barrier height g(x1): x1·tanδ for x1 <= 0, else 0.
    pub fn barrier(&self, x1: f64) -> f64 {
        if x1 <= 0.0 {
            x1 * self.delta.tan()
        } else {
            0.0
        }
    }

    /// True if (x1, x2) lies in the lower region (below the barrier).
    pub fn in_lower(&self, x1: f64, x2: f64) -> bool {
        x2 < self.barrier(x1)
    }

    /// x-component of the (unscaled-by-strength) potential.
    fn a1_unit(&self, x1: f64, x2: f64) -> f64 {
        if self.in_lower(x1, x2) {
            let mut a = -self.b1 * x2;
            if x1 < 0.0 {
                a += (self.b1 - self.b2) * x1 * self.delta.tan();
            }
            a
        } else {
            -self.b2 * x2
        }
    }

    /// x-component of the vector potential including the strength factor.
    pub fn a1(&self, x1: f64, x2: f64) -> f64 {
        self.strength * self.a1_unit(x1, x2)
    }

    /// Field value (curl of the potential) at a point.
    pub fn curl(&self, x1: f64, x2: f64) -> f64 {
        self.strength * if self.in_lower(x1, x2) { self.b1 } else { self.b2 }
    }

    /// The quadratic gauge generator that absorbs the barrier-slope term:
    /// ζ = ½(b1-b2)·x1²·tanδ on the lower region for x1 < 0, else 0.
    pub fn zeta(&self, x1: f64, x2: f64) -> f64 {
        if self.in_lower(x1, x2) && x1 < 0.0 {
            self.strength * 0.5 * (self.b1 - self.b2) * x1 * x1 * self.delta.tan()
        } else {
            0.0
        }
    }
}

/// Uniform Cartesian mesh with a Dirichlet mask; unknowns are the kept
/// interior nodes.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh2D {
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    /// Unknown index per (ix, iy) node, or -1 for Dirichlet.
    pub index: Vec<i64>,
    /// Node coordinates per unknown.
    pub nodes: Vec<(u32, u32)>,
}

impl Mesh2D {
    /// Rectangle [x_lo, x_hi] x [y_lo, y_hi]; the outermost node ring is the
    /// Dirichlet boundary.
    pub fn rect(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, h: f64) -> Self {
        let nx = ((x_hi - x_lo) / h).round() as usize + 1;
        let ny = ((y_hi - y_lo) / h).round() as usize + 1;
        Self::masked(x_lo, y_lo, nx, ny, h, |_, _| true)
    }

    /// Mask-based mesh: keeps interior nodes of the bounding box for which
    /// `keep` is true (plus the implicit outer-ring Dirichlet).
    pub fn masked<F: Fn(f64, f64) -> bool>(
        x0: f64,
        y0: f64,
        nx: usize,
        ny: usize,
        h: f64,
        keep: F,
    ) -> Self {
        let mut index = vec![-1i64; nx * ny];
        let mut nodes = Vec::new();
        for ix in 1..nx - 1 {
            for iy in 1..ny - 1 {
                let (x, y) = (x0 + ix as f64 * h, y0 + iy as f64 * h);
                if keep(x, y) {
                    index[ix * ny + iy] = nodes.len() as i64;
                    nodes.push((ix as u32, iy as u32));
                }
            }
        }
        Self {
            x0,
            y0,
            nx,
            ny,
            h,
            index,
            nodes,
        }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (ix, iy) = self.nodes[k];
        (
            self.x0 + ix as f64 * self.h,
            self.y0 + iy as f64 * self.h,
        )
    }

    fn at(&self, ix: i64, iy: i64) -> i64 {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            -1
        } else {
            self.index[ix as usize * self.ny + iy as usize]
        }
    }
}

const NONE: u32 = u32::MAX;

/// Five-point gauge-link discretization of -(∇ - i𝒜)² on a mesh.
/// Horizontal edges carry the phase exp(-i ∫𝒜·dl) (midpoint rule); vertical
/// edges are phase-free since 𝒜 has no second component. Hermitian by
/// construction.
#[derive(Debug, Clone)]
pub struct SparseOperator2D {
    pub mesh: Mesh2D,
    pub field: GaugeField,
    inv_h2: f64,
    ixp: Vec<u32>,
    ixm: Vec<u32>,
    iyp: Vec<u32>,
    iym: Vec<u32>,
    /// Link factor for the edge to the +x neighbour.
    lxp: Vec<Complex64>,
    /// Optional extra diagonal (potential), used by diagnostics/tests.
    extra: Vec<f64>,
}

impl SparseOperator2D {
    pub fn assemble(field: GaugeField, mesh: Mesh2D) -> Self {
        let n = mesh.n();
        let h = mesh.h;
        let mut ixp = vec![NONE; n];
        let mut ixm = vec![NONE; n];
        let mut iyp = vec![NONE; n];
        let mut iym = vec![NONE; n];
        let mut lxp = vec![Complex64::new(1.0, 0.0); n];
        for k in 0..n {
            let (ix, iy) = mesh.nodes[k];
            let (x, y) = mesh.coords(k);
            let (ix, iy) = (ix as i64, iy as i64);
            let set = |v: i64| if v < 0 { NONE } else { v as u32 };
            ixp[k] = set(mesh.at(ix + 1, iy));
            ixm[k] = set(mesh.at(ix - 1, iy));
            iyp[k] = set(mesh.at(ix, iy + 1));
            iym[k] = set(mesh.at(ix, iy - 1));
            if ixp[k] != NONE {
                let p = h * field.a1(x + 0.5 * h, y);
                lxp[k] = Complex64::from_polar(1.0, -p);
            }
        }
        Self {
            mesh,
            field,
            inv_h2: 1.0 / (h * h),
            ixp,
            ixm,
            iyp,
            iym,
            lxp,
            extra: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.mesh.n()
    }

    /// Add a real diagonal potential sampled at the nodes.
    pub fn add_potential<F: Fn(f64, f64) -> f64>(&mut self, v: F) {
        if self.extra.is_empty() {
            self.extra = vec![0.0; self.n()];
        }
        for k in 0..self.n() {
            let (x, y) = self.mesh.coords(k);
            self.extra[k] += v(x, y);
        }
    }

    /// y = H x (parallel over rows; deterministic).
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let inv_h2 = self.inv_h2;
        let has_extra = !self.extra.is_empty();
        y.par_iter_mut().enumerate().for_each(|(k, out)| {
            let mut acc = 4.0 * x[k];
            if self.ixp[k] != NONE {
                acc -= self.lxp[k] * x[self.ixp[k] as usize];
            }
            if self.ixm[k] != NONE {
                let j = self.ixm[k] as usize;
                acc -= self.lxp[j].conj() * x[j];
            }
            if self.iyp[k] != NONE {
                acc -= x[self.iyp[k] as usize];
            }
            if self.iym[k] != NONE {
                acc -= x[self.iym[k] as usize];
            }
            let mut v = inv_h2 * acc;
            if has_extra {
                v += self.extra[k] * x[k];
            }
            *out = v;
        });
    }

    /// Quadratic form Re⟨v, Hv⟩.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let mut w = vec![Complex64::new(0.0, 0.0); self.n()];
        self.matvec(v, &mut w);
        eig::dot(v, &w).re
    }

    /// Conjugate the operator by node phases exp(iζ): links pick up the
    /// phase difference. The spectrum is exactly invariant; the entries are
    /// not.
    pub fn gauge_transformed<F: Fn(f64, f64) -> f64>(&self, zeta: F) -> Self {
        let mut out = self.clone();
        for k in 0..self.n() {
            if self.ixp[k] == NONE {
                continue;
            }
            let (x, y) = self.mesh.coords(k);
            let j = self.ixp[k] as usize;
            let (xj, yj) = self.mesh.coords(j);
            let dz = zeta(xj, yj) - zeta(x, y);
            out.lxp[k] = self.lxp[k] * Complex64::from_polar(1.0, dz);
        }
        out
    }

    /// Flux through the plaquette with lower-left unknown node k (sum of the
    /// four oriented link phases); `None` if any corner is masked.
    pub fn plaquette_flux(&self, k: usize) -> Option<f64> {
        let right = self.ixp[k];
        let up = self.iyp[k];
        if right == NONE || up == NONE {
            return None;
        }
        let right = right as usize;
        let up = up as usize;
        let diag = self.iyp[right];
        if diag == NONE || self.ixp[up] != diag {
            return None;
        }
        // phases: bottom edge (k -> right): -h·a1(mid); top edge carries the
        // reverse orientation.
        let bottom = -self.lxp[k].arg();
        let top = -self.lxp[up].arg();
        Some(bottom - top)
    }
}
