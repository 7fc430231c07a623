//! Cubic Hermite interpolation on a uniform grid, with derivative values
//! produced by fourth-order finite-difference stencils.

/// Fourth-order derivative samples of `y` on a uniform grid of spacing `h`.
/// Centered five-point stencil in the interior, one-sided at the edges.
pub fn stencil_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 6);
    let mut dy = vec![0.0; n];
    for i in 2..n - 2 {
        dy[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
    }
    for i in [0usize, 1] {
        dy[i] = one_sided_forward(&y[i..i + 5], h);
    }
    for i in [n - 2, n - 1] {
        dy[i] = -one_sided_forward(
            &[y[i], y[i - 1], y[i - 2], y[i - 3], y[i - 4]],
            h,
        );
    }
    dy
}

/// Fourth-order one-sided first derivative at the first of five samples
/// spaced by `h` (increasing coordinate).
pub fn one_sided_forward(y: &[f64], h: f64) -> f64 {
    (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
}

/// C1 piecewise-cubic interpolant from values and derivatives on a uniform grid.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl CubicHermite {
    pub fn new(x0: f64, h: f64, y: Vec<f64>, dy: Vec<f64>) -> Self {
        assert_eq!(y.len(), dy.len());
        assert!(y.len() >= 2 && h > 0.0);
        Self { x0, h, y, dy }
    }

    /// Build the interpolant with stencil-generated derivatives.
    pub fn from_values(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let dy = stencil_derivative(&y, h);
        Self::new(x0, h, y, dy)
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    fn cell(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x0) / self.h;
        let i = (s.floor() as isize).clamp(0, self.y.len() as isize - 2) as usize;
        (i, s - i as f64)
    }

    /// Interpolated value; clamps to the grid range.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.cell(x);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.dy[i] * self.h, self.dy[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// Interpolated first derivative.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let (i, t) = self.cell(x);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.dy[i] * self.h, self.dy[i + 1] * self.h);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_gaussian_to_high_order() {
        let n = 2001;
        let h = 20.0 / (n - 1) as f64;
        let y: Vec<f64> = (0..n).map(|i| (-(-10.0 + i as f64 * h).powi(2) / 2.0).exp()).collect();
        let ch = CubicHermite::from_values(-10.0, h, y);
        for &x in &[-3.21, -0.017, 0.4441, 2.93] {
            let exact = (-(x * x) / 2.0f64).exp();
            let dexact = -x * exact;
            assert!((ch.eval(x) - exact).abs() < 1e-8);
            assert!((ch.eval_deriv(x) - dexact).abs() < 1e-6);
        }
    }
}
