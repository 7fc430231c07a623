//! Gauss-Legendre quadrature and composite Simpson rules.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the modest n used here (n <= 128).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre nodes/weights mapped to [a, b].
pub fn gl_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let s = 0.5 * (b - a);
    (
        x.iter().map(|&t| c + s * t).collect(),
        w.iter().map(|&wi| s * wi).collect(),
    )
}

/// Composite Gauss-Legendre over [a, b] split at the interior points of
/// `breaks` (values outside (a, b) are ignored).
pub fn gl_panels(a: f64, b: f64, breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&c| c > a + 1e-300 && c < b - 1e-300)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for pair in edges.windows(2) {
        if pair[1] - pair[0] <= 0.0 {
            continue;
        }
        let (x, w) = gl_on(pair[0], pair[1], n);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Composite Simpson rule for samples on a uniform grid (odd length).
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd sample count");
    let mut s4 = 0.0;
    let mut s2 = 0.0;
    for (i, &v) in y.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            s4 += v;
        } else {
            s2 += v;
        }
    }
    (h / 3.0) * (y[0] + y[n - 1] + 4.0 * s4 + 2.0 * s2)
}

/// Simpson on every other sample (spacing 2h); used for step-halving error
/// estimates against `simpson`.
pub fn simpson_coarse(y: &[f64], h: f64) -> f64 {
    let sub: Vec<f64> = y.iter().step_by(2).copied().collect();
    simpson(&sub, 2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gl_on(-1.0, 3.0, 8);
        // degree-15 polynomial x^15 over [-1,3]: exact 4^16-ish via antiderivative
        let num: f64 = x.iter().zip(&w).map(|(&t, &wi)| wi * t.powi(15)).sum();
        let exact = (3.0_f64.powi(16) - (-1.0_f64).powi(16)) / 16.0;
        assert!((num - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn gl_panel_split_matches_single_panel() {
        let f = |t: f64| (-t * t).exp();
        let (x1, w1) = gl_on(0.0, 2.0, 64);
        let (x2, w2) = gl_panels(0.0, 2.0, &[0.7, 1.3], 32);
        let i1: f64 = x1.iter().zip(&w1).map(|(&t, &w)| w * f(t)).sum();
        let i2: f64 = x2.iter().zip(&w2).map(|(&t, &w)| w * f(t)).sum();
        assert!((i1 - i2).abs() < 1e-13);
    }

    #[test]
    fn simpson_fourth_order() {
        let n = 201;
        let h = 1.0 / (n - 1) as f64;
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let exact = 1.0 - 1.0_f64.cos();
        assert!((simpson(&y, h) - exact).abs() < 1e-11);
    }
}
