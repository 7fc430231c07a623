//! Shift-invert Lanczos for the lowest eigenvalues: Lanczos on H⁻¹ (shift 0,
//! below the positive spectrum) with full reorthogonalization; the inner
//! inverse is applied by conjugate gradients, which needs only matvecs.

use super::{SparseOperator2D, WedgeError};
use crate::util::tridiag::Tridiag;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Deterministic parallel dot product: fixed-size chunks accumulated in
/// index order, so the result does not depend on thread scheduling.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    const CHUNK: usize = 8192;
    let partials: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(ca, cb)| {
            let mut s = Complex64::new(0.0, 0.0);
            for (x, y) in ca.iter().zip(cb) {
                s += x.conj() * y;
            }
            s
        })
        .collect();
    partials.into_iter().sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, &xi)| {
        *yi += alpha * xi;
    });
}

fn scale(a: f64, x: &mut [Complex64]) {
    x.par_iter_mut().for_each(|v| *v *= a);
}

/// Conjugate gradients for the positive-definite H. Returns the iteration
/// count used.
fn cg_solve(
    op: &SparseOperator2D,
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<usize, WedgeError> {
    let n = b.len();
    let mut r = b.to_vec();
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    let nonzero_guess = x.iter().any(|v| v.norm_sqr() > 0.0);
    if nonzero_guess {
        op.matvec(x, &mut ax);
        r.par_iter_mut()
            .zip(ax.par_iter())
            .for_each(|(ri, &ai)| *ri -= ai);
    }
    let b_norm = norm(b).max(1e-300);
    let mut p = r.clone();
    let mut rs = dot(&r, &r).re;
    if rs.sqrt() <= tol * b_norm {
        return Ok(0);
    }
    let mut hp = vec![Complex64::new(0.0, 0.0); n];
    for it in 0..max_iter {
        op.matvec(&p, &mut hp);
        let alpha = rs / dot(&p, &hp).re;
        axpy(Complex64::new(alpha, 0.0), &p, x);
        axpy(Complex64::new(-alpha, 0.0), &hp, &mut r);
        let rs_new = dot(&r, &r).re;
        if rs_new.sqrt() <= tol * b_norm {
            return Ok(it + 1);
        }
        let beta = rs_new / rs;
        rs = rs_new;
        p.par_iter_mut().zip(r.par_iter()).for_each(|(pi, &ri)| {
            *pi = ri + beta * *pi;
        });
    }
    Err(WedgeError::NotConverged(format!(
        "CG stalled at relative residual {:.2e}",
        rs.sqrt() / b_norm
    )))
}

/// Options for the eigensolver.
#[derive(Debug, Clone)]
pub struct LanczosOpts {
    pub max_steps: usize,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Residual threshold (relative to |λ|) for convergence of the k
    /// requested Ritz pairs.
    pub residual_tol: f64,
    pub seed: u64,
    /// Warm-start vector (for example the coarse-mesh eigenvector
    /// transferred to this mesh).
    pub guess: Option<Vec<Complex64>>,
}

impl Default for LanczosOpts {
    fn default() -> Self {
        Self {
            max_steps: 70,
            cg_tol: 1e-9,
            cg_max_iter: 50_000,
            residual_tol: 2e-5,
            seed: 7,
            guess: None,
        }
    }
}

/// Eigenvalues (ascending), the ground eigenvector, residual norms and mesh
/// metadata.
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvector: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub mesh_h: f64,
    pub unknowns: usize,
    pub lanczos_steps: usize,
    pub extrapolated: Option<f64>,
}

/// k smallest eigenvalues of the operator via shift-invert Lanczos at shift
/// zero. Eigenvalues are reported as Rayleigh quotients of the Ritz vectors
/// and each carries an explicit residual ‖Hv - λv‖/‖v‖.
pub fn lowest_eig(
    op: &SparseOperator2D,
    k: usize,
    opts: &LanczosOpts,
) -> Result<EigenResult, WedgeError> {
    let n = op.n();
    assert!(k >= 1 && k + 2 < opts.max_steps);
    let mut v0: Vec<Complex64> = match &opts.guess {
        Some(g) => {
            assert_eq!(g.len(), n, "guess length must match the mesh");
            g.clone()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        }
    };
    let nv = norm(&v0);
    scale(1.0 / nv, &mut v0);

    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut result: Option<(Vec<f64>, Vec<Vec<f64>>)> = None;

    for step in 0..opts.max_steps {
        // w = H^{-1} v_step  (CG warm-started from the previous solution)
        let b = basis[step].clone();
        cg_solve(op, &b, &mut w, opts.cg_tol, opts.cg_max_iter)?;
        let alpha = dot(&basis[step], &w).re;
        alphas.push(alpha);
        let mut wv = w.clone();
        axpy(Complex64::new(-alpha, 0.0), &basis[step], &mut wv);
        if step > 0 {
            axpy(Complex64::new(-betas[step - 1], 0.0), &basis[step - 1], &mut wv);
        }
        // full reorthogonalization (two passes)
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &wv);
                if c.norm() > 0.0 {
                    axpy(-c, v, &mut wv);
                }
            }
        }
        let beta = norm(&wv);
        // check convergence every few steps once enough directions exist
        let m = alphas.len();
        let last = step + 1 == opts.max_steps || beta < 1e-12;
        if m >= k + 2 && (m % 4 == 0 || last) {
            let (thetas, svecs) = ritz_pairs(&alphas, &betas, k);
            // Lanczos residual of the inverse-operator Ritz pair is
            // beta * |last component|; require it small relative to theta
            let ok = thetas
                .iter()
                .zip(&svecs)
                .all(|(t, s)| beta * s[m - 1].abs() <= 0.1 * opts.residual_tol * t);
            if ok || last {
                result = Some((thetas, svecs));
                if ok {
                    break;
                }
            }
        }
        if beta < 1e-12 {
            break;
        }
        scale(1.0 / beta, &mut wv);
        betas.push(beta);
        basis.push(wv);
    }

    let (thetas, svecs) =
        result.ok_or_else(|| WedgeError::NotConverged("no Ritz pairs formed".into()))?;
    // assemble Ritz vectors, refine eigenvalues via Rayleigh quotients
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut ground: Option<Vec<Complex64>> = None;
    for (idx, s) in svecs.iter().enumerate() {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for (j, &c) in s.iter().enumerate() {
            if c.abs() > 0.0 {
                axpy(Complex64::new(c, 0.0), &basis[j], &mut y);
            }
        }
        let ny = norm(&y);
        scale(1.0 / ny, &mut y);
        let mut hy = vec![Complex64::new(0.0, 0.0); n];
        op.matvec(&y, &mut hy);
        let lam = dot(&y, &hy).re;
        let mut r2 = 0.0;
        for (a, b) in hy.iter().zip(&y) {
            let d = a - lam * b;
            r2 += d.norm_sqr();
        }
        eigenvalues.push(lam);
        residuals.push(r2.sqrt());
        if idx == 0 {
            ground = Some(y);
        }
    }
    // ensure ascending order (theta descending should already give this)
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    if residuals[0] > opts.residual_tol * eigenvalues[0].abs().max(1e-3) {
        return Err(WedgeError::NotConverged(format!(
            "ground residual {:.2e} above tolerance",
            residuals[0]
        )));
    }
    let _ = thetas;
    Ok(EigenResult {
        eigenvalues,
        eigenvector: ground.unwrap(),
        residuals,
        mesh_h: op.mesh.h,
        unknowns: n,
        lanczos_steps: alphas.len(),
        extrapolated: None,
    })
}

/// Largest-k Ritz values of the Lanczos tridiagonal (these map to the
/// smallest eigenvalues of H), with their small eigenvectors.
fn ritz_pairs(alphas: &[f64], betas: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = alphas.len();
    let t = Tridiag {
        diag: alphas.to_vec(),
        off: betas[..m - 1].to_vec(),
    };
    // the top-k eigenvalues of T by bisection on the negated matrix
    let neg = Tridiag {
        diag: alphas.iter().map(|&a| -a).collect(),
        off: betas[..m - 1].to_vec(),
    };
    let mut thetas = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for i in 0..k.min(m) {
        let theta = -kth_smallest(&neg, i);
        let (v, _) = t.inverse_iteration(theta, 4);
        thetas.push(theta);
        vecs.push(v);
    }
    (thetas, vecs)
}

/// i-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by
/// Sturm bisection.
fn kth_smallest(t: &Tridiag, i: usize) -> f64 {
    let max_off = t.off.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut lo = t.diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * max_off;
    let mut hi = t.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * max_off;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if t.count_below(mid) >= i + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bilinear transfer of an eigenvector between meshes (warm start for a
/// finer solve). Nodes outside the source mesh get zero.
pub fn transfer_guess(
    from: &super::Mesh2D,
    v: &[Complex64],
    to: &super::Mesh2D,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); to.n()];
    for k in 0..to.n() {
        let (x, y) = to.coords(k);
        let fx = (x - from.x0) / from.h;
        let fy = (y - from.y0) / from.h;
        let ix = fx.floor() as i64;
        let iy = fy.floor() as i64;
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (dx, dy, w) in [
            (0, 0, (1.0 - tx) * (1.0 - ty)),
            (1, 0, tx * (1.0 - ty)),
            (0, 1, (1.0 - tx) * ty),
            (1, 1, tx * ty),
        ] {
            let id = from.at(ix + dx, iy + dy);
            if id >= 0 {
                acc += w * v[id as usize];
            }
        }
        out[k] = acc;
    }
    out
}
