//! Symmetric tridiagonal eigensolver pieces: Sturm-count bisection for the
//! lowest eigenvalue and inverse iteration for its eigenvector.

/// Symmetric tridiagonal matrix (diagonal + one off-diagonal).
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.n() {
            let e = self.off[i - 1];
            let mut dprev = d;
            if dprev == 0.0 {
                dprev = 1e-300;
            }
            d = self.diag[i] - x - e * e / dprev;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Smallest eigenvalue by bisection to absolute tolerance `tol`.
    pub fn lowest_eigenvalue(&self, tol: f64) -> f64 {
        let max_off = self.off.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * max_off;
        let mut hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * max_off;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // f64 resolution reached
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= tol {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve (T - shift) x = b by tridiagonal LU with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut dd: Vec<f64> = self.diag.iter().map(|&v| v - shift).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            let dl = self.off[i];
            if dl.abs() <= dd[i].abs() {
                if dd[i] == 0.0 {
                    dd[i] = 1e-300;
                }
                let m = dl / dd[i];
                dd[i + 1] -= m * du[i];
                x[i + 1] -= m * x[i];
            } else {
                // interchange rows i and i+1
                let m = dd[i] / dl;
                dd[i] = dl;
                let temp = dd[i + 1];
                dd[i + 1] = du[i] - m * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                du[i] = temp;
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
        }
        x[n - 1] /= dd[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
        }
        x
    }

    /// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration.
    /// Returns (normalized vector, residual ||T v - lambda v||).
    pub fn inverse_iteration(&self, lambda: f64, iters: usize) -> (Vec<f64>, f64) {
        let n = self.n();
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (i as f64 * 0.7391).sin())
            .collect();
        for _ in 0..iters {
            let w = self.solve_shifted(lambda, &v);
            let nrm = w.iter().map(|&a| a * a).sum::<f64>().sqrt();
            for (vi, &wi) in v.iter_mut().zip(&w) {
                *vi = wi / nrm;
            }
        }
        let mut res = 0.0;
        for i in 0..n {
            let mut r = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                r += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                r += self.off[i] * v[i + 1];
            }
            res += r * r;
        }
        (v, res.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_eigenvalue_of_discrete_laplacian() {
        // -u'' on (0,1), Dirichlet, n interior points: lambda_1 = (2/h^2)(1-cos(pi h))
        let n = 200;
        let h = 1.0 / (n + 1) as f64;
        let t = Tridiag {
            diag: vec![2.0 / (h * h); n],
            off: vec![-1.0 / (h * h); n - 1],
        };
        let exact = 2.0 / (h * h) * (1.0 - (std::f64::consts::PI * h).cos());
        let lam = t.lowest_eigenvalue(1e-12);
        assert!((lam - exact).abs() < 1e-9, "{lam} vs {exact}");
        let (v, res) = t.inverse_iteration(lam, 3);
        assert!(res < 1e-8);
        // eigenvector should look like sin(pi x)
        let mid = v[n / 2].abs();
        assert!((v[0].abs() / mid - (std::f64::consts::PI * h).sin()).abs() < 1e-3);
    }
}
