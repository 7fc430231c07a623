//! Fixed-step RK4 integrators for the radial problems: the linear
//! Schrödinger form u'' = q(t) u and its Riccati reduction r' = q(t) - r^2.

/// One RK4 step for (u, u') with u'' = q(t) u.
#[inline]
fn rk4_linear_step<Q: Fn(f64) -> f64>(q: &Q, t: f64, h: f64, y: [f64; 2]) -> [f64; 2] {
    let f = |t: f64, y: [f64; 2]| [y[1], q(t) * y[0]];
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = f(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrate u'' = q(t) u from `t0` to `t1` with `n` RK4 steps, rescaling to
/// avoid overflow (the solution grows through hundreds of e-folds). Returns
/// (u, u') at `t1` up to an arbitrary positive scale, plus log of the scale.
pub fn integrate_linear<Q: Fn(f64) -> f64>(
    q: &Q,
    t0: f64,
    t1: f64,
    y0: [f64; 2],
    n: usize,
) -> ([f64; 2], f64) {
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    let mut log_scale = 0.0;
    for k in 0..n {
        y = rk4_linear_step(q, t0 + k as f64 * h, h, y);
        let m = y[0].abs().max(y[1].abs());
        if m > 1e100 {
            y[0] /= m;
            y[1] /= m;
            log_scale += m.ln();
        }
    }
    (y, log_scale)
}

/// Integrate u'' = q(t) u recording u and u' at the `m+1` uniformly spaced
/// output nodes between t0 and t1 inclusive, with `sub` RK4 substeps per
/// output interval. Values are rescaled jointly; the output is a consistent
/// (unnormalized) solution.
pub fn integrate_linear_sampled<Q: Fn(f64) -> f64>(
    q: &Q,
    t0: f64,
    t1: f64,
    y0: [f64; 2],
    m: usize,
    sub: usize,
) -> (Vec<f64>, Vec<f64>) {
    let big = (t1 - t0) / m as f64;
    let h = big / sub as f64;
    let mut u = Vec::with_capacity(m + 1);
    let mut du = Vec::with_capacity(m + 1);
    let mut y = y0;
    let mut scale_log: f64 = 0.0;
    let mut logs = Vec::with_capacity(m + 1);
    u.push(y[0]);
    du.push(y[1]);
    logs.push(0.0f64);
    for i in 0..m {
        for k in 0..sub {
            y = rk4_linear_step(q, t0 + i as f64 * big + k as f64 * h, h, y);
        }
        let mag = y[0].abs().max(y[1].abs());
        if mag > 1e100 {
            y[0] /= mag;
            y[1] /= mag;
            scale_log += mag.ln();
        }
        u.push(y[0]);
        du.push(y[1]);
        logs.push(scale_log);
    }
    // bring all samples to the final common scale
    let last = scale_log;
    for i in 0..u.len() {
        let f = (logs[i] - last).exp();
        u[i] *= f;
        du[i] *= f;
    }
    (u, du)
}

/// Integrate the Riccati equation r' = q(t) - r^2 from `t0` to `t1` with `n`
/// RK4 steps. Valid while the underlying solution has no zeros (ground-state
/// branches).
pub fn integrate_riccati<Q: Fn(f64) -> f64>(q: &Q, t0: f64, t1: f64, r0: f64, n: usize) -> f64 {
    let h = (t1 - t0) / n as f64;
    let f = |t: f64, r: f64| q(t) - r * r;
    let mut r = r0;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, r);
        let k2 = f(t + 0.5 * h, r + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, r + 0.5 * h * k2);
        let k4 = f(t + h, r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riccati_reproduces_gaussian_log_derivative() {
        // u'' = (t^2 - 1) u has solution exp(-t^2/2): r = u'/u = -t
        let q = |t: f64| t * t - 1.0;
        let r = integrate_riccati(&q, 6.0, 1.0, -6.0, 20_000);
        assert!((r - (-1.0)).abs() < 1e-10, "{r}");
    }

    #[test]
    fn linear_integration_tracks_gaussian() {
        let q = |t: f64| t * t - 1.0;
        let (u, du) = integrate_linear_sampled(&q, -6.0, 0.0, [1e-120, 6.0 * 1e-120], 600, 8);
        // ratio u(-1)/u(0) should match exp(-1/2)/exp(0)
        let i1 = 500; // t = -1
        let ratio = u[i1] / u[600];
        assert!((ratio - (-0.5f64).exp()).abs() < 1e-8, "{ratio}");
        let r = du[600] / u[600];
        assert!(r.abs() < 1e-8, "{r}");
    }
}
