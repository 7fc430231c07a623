//! Eigenfunction diagnostics: reflection symmetry of the modulus, fitted
//! exponential (Agmon) decay rates, and the discrete localization (IMS)
//! identity with smooth partitions of unity.

use super::eig::EigenResult;
use super::{Mesh2D, SparseOperator2D, WedgeError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Max over nodes of ||u(x)| - |u(S_δ x)|| (bilinear interpolation at the
/// reflected point), for the sup-normalized ground state. Errors out if the
/// eigenvalue is not simple enough for the modulus to be well-defined.
pub fn symmetry_check(
    res: &EigenResult,
    mesh: &Mesh2D,
    delta: f64,
    radius: f64,
) -> Result<f64, WedgeError> {
    if res.eigenvalues.len() >= 2 {
        let gap = res.eigenvalues[1] - res.eigenvalues[0];
        if gap < 10.0 * res.residuals[0] {
            return Err(WedgeError::DegenerateEigenvalue {
                gap,
                res: res.residuals[0],
            });
        }
    }
    let (s, c) = delta.sin_cos();
    let sup = res
        .eigenvector
        .iter()
        .fold(0.0f64, |a, v| a.max(v.norm()));
    let mut worst = 0.0f64;
    for k in 0..mesh.n() {
        let (x, y) = mesh.coords(k);
        if x.hypot(y) > radius {
            continue;
        }
        let rx = -c * x - s * y;
        let ry = -s * x + c * y;
        let a = res.eigenvector[k].norm() / sup;
        let b = interp_abs(mesh, &res.eigenvector, rx, ry) / sup;
        worst = worst.max((a - b).abs());
    }
    Ok(worst)
}

fn interp_abs(mesh: &Mesh2D, v: &[Complex64], x: f64, y: f64) -> f64 {
    let fx = (x - mesh.x0) / mesh.h;
    let fy = (y - mesh.y0) / mesh.h;
    let ix = fx.floor() as i64;
    let iy = fy.floor() as i64;
    let (tx, ty) = (fx - ix as f64, fy - iy as f64);
    let mut acc = 0.0;
    for (dx, dy, w) in [
        (0, 0, (1.0 - tx) * (1.0 - ty)),
        (1, 0, tx * (1.0 - ty)),
        (0, 1, (1.0 - tx) * ty),
        (1, 1, tx * ty),
    ] {
        let id = mesh.at(ix + dx, iy + dy);
        if id >= 0 {
            acc += w * v[id as usize].norm();
        }
    }
    acc
}

/// Fitted exponential decay rate of |u| against |x| over the annulus
/// r ∈ [r_lo, r_hi]: the returned rate is the negated slope of log(max
/// bin amplitude) versus r, which tracks the slowest decay direction.
/// Requires λ < β (a true bound state).
pub fn agmon_fit(
    res: &EigenResult,
    mesh: &Mesh2D,
    beta: f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<f64, WedgeError> {
    let lambda = res.eigenvalues[0];
    if lambda >= beta {
        return Err(WedgeError::NoBoundState { lambda, beta });
    }
    let nbins = 32;
    let mut ridge = vec![0.0f64; nbins];
    for k in 0..mesh.n() {
        let (x, y) = mesh.coords(k);
        let r = x.hypot(y);
        if r < r_lo || r >= r_hi {
            continue;
        }
        let b = ((r - r_lo) / (r_hi - r_lo) * nbins as f64) as usize;
        let a = res.eigenvector[k].norm();
        if a > ridge[b] {
            ridge[b] = a;
        }
    }
    // least squares of log(ridge) on bin centers
    let mut pts = Vec::new();
    for (b, &a) in ridge.iter().enumerate() {
        if a > 1e-280 {
            let r = r_lo + (b as f64 + 0.5) / nbins as f64 * (r_hi - r_lo);
            pts.push((r, a.ln()));
        }
    }
    if pts.len() < 4 {
        return Err(WedgeError::NotConverged(
            "too few populated bins for a decay fit".into(),
        ));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(-slope)
}

/// A smooth two-patch radial partition of unity: χ1² + χ2² = 1, χ2 supported
/// outside radius r0, transition of width `width`.
#[derive(Debug, Clone, Copy)]
pub struct RadialPartition {
    pub r0: f64,
    pub width: f64,
}

fn smoothstep(s: f64) -> f64 {
    // C^2 transition 0 -> 1 on [0, 1]
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

fn smoothstep_deriv(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return 0.0;
    }
    30.0 * s * s * (1.0 - s) * (1.0 - s)
}

impl RadialPartition {
    /// (χ1, χ2) at a point.
    pub fn chi(&self, x: f64, y: f64) -> (f64, f64) {
        let s = (x.hypot(y) - self.r0) / self.width;
        let t = smoothstep(s) * std::f64::consts::FRAC_PI_2;
        (t.cos(), t.sin())
    }

    /// |∇χ1|² + |∇χ2|² at a point (equal magnitudes for the cos/sin pair).
    pub fn grad_sq(&self, x: f64, y: f64) -> (f64, f64) {
        let s = (x.hypot(y) - self.r0) / self.width;
        let dt = smoothstep_deriv(s) * std::f64::consts::FRAC_PI_2 / self.width;
        // |∇χ1| = |sin(t)·dt|, |∇χ2| = |cos(t)·dt|
        let t = smoothstep(s) * std::f64::consts::FRAC_PI_2;
        let g1 = t.sin() * dt;
        let g2 = t.cos() * dt;
        (g1 * g1, g2 * g2)
    }
}

/// A smooth angular partition: χ1 supported on [0, 2π/3] ∪ [4π/3, 2π],
/// χ2 on [π/3, 5π/3], χ1² + χ2² = 1.
#[derive(Debug, Clone, Copy)]
pub struct AngularPartition;

impl AngularPartition {
    fn t_of(theta: f64) -> (f64, f64) {
        // transition parameter and its d/dθ on the two crossover arcs
        let pi = std::f64::consts::PI;
        let th = theta.rem_euclid(2.0 * pi);
        if th < pi / 3.0 {
            (0.0, 0.0)
        } else if th < 2.0 * pi / 3.0 {
            (smoothstep((th - pi / 3.0) / (pi / 3.0)), smoothstep_deriv((th - pi / 3.0) / (pi / 3.0)) / (pi / 3.0))
        } else if th < 4.0 * pi / 3.0 {
            (1.0, 0.0)
        } else if th < 5.0 * pi / 3.0 {
            (
                1.0 - smoothstep((th - 4.0 * pi / 3.0) / (pi / 3.0)),
                -smoothstep_deriv((th - 4.0 * pi / 3.0) / (pi / 3.0)) / (pi / 3.0),
            )
        } else {
            (0.0, 0.0)
        }
    }

    /// (χ1, χ2) at a point; χ2 covers the sector around θ = π.
    pub fn chi(&self, x: f64, y: f64) -> (f64, f64) {
        let theta = y.atan2(x);
        let (t, _) = Self::t_of(theta);
        let a = t * std::f64::consts::FRAC_PI_2;
        (a.cos(), a.sin())
    }

    /// (|∇χ1|², |∇χ2|²); gradients are angular, so they carry a 1/r factor.
    pub fn grad_sq(&self, x: f64, y: f64) -> (f64, f64) {
        let r = x.hypot(y).max(1e-12);
        let theta = y.atan2(x);
        let (t, dt) = Self::t_of(theta);
        let a = t * std::f64::consts::FRAC_PI_2;
        let da = dt * std::f64::consts::FRAC_PI_2 / r;
        let g1 = a.sin() * da;
        let g2 = a.cos() * da;
        (g1 * g1, g2 * g2)
    }
}

/// Relative residual of the discrete localization identity
/// Q(v) = Σ Q(χⱼ v) - Σ ‖ |∇χⱼ| v ‖² on a given vector.
pub fn ims_check<C, G>(op: &SparseOperator2D, chi: C, grad_sq: G, v: &[Complex64]) -> f64
where
    C: Fn(f64, f64) -> (f64, f64),
    G: Fn(f64, f64) -> (f64, f64),
{
    let n = op.n();
    let q = op.quadratic_form(v);
    let mut v1 = vec![Complex64::new(0.0, 0.0); n];
    let mut v2 = vec![Complex64::new(0.0, 0.0); n];
    // both sides are plain lattice sums, which share the same 1/h² scaling
    // as the continuum integrals, so no volume factors appear
    let mut grad_term = 0.0;
    for k in 0..n {
        let (x, y) = op.mesh.coords(k);
        let (c1, c2) = chi(x, y);
        v1[k] = c1 * v[k];
        v2[k] = c2 * v[k];
        let (g1, g2) = grad_sq(x, y);
        grad_term += (g1 + g2) * v[k].norm_sqr();
    }
    let rhs = op.quadratic_form(&v1) + op.quadratic_form(&v2) - grad_term;
    ((q - rhs) / q.abs().max(1e-300)).abs()
}

/// A deterministic random complex vector on the mesh (for IMS checks).
pub fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
