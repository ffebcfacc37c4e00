//! 1-D quadrature and interpolation utilities: Gauss-Legendre rules,
//! adaptive integration, cubic splines with exact piecewise integrals,
//! and finite-difference weights on arbitrary nodes.

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre polynomial with the Chebyshev initial
/// guess; converges to machine precision for any practical `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed 10-point Gauss-Legendre estimate of `∫_a^b f`.
fn gauss10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (&x, &w) in rule.0.iter().zip(&rule.1) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Adaptive quadrature by interval bisection with a two-level
/// Gauss-Legendre error estimate. Intended for smooth integrands.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(10);
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        rule: &(Vec<f64>, Vec<f64>),
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss10(f, a, m, rule);
        let right = gauss10(f, m, b, rule);
        let err = (left + right - whole).abs();
        if err < tol || depth >= 40 {
            return left + right;
        }
        recurse(f, a, m, left, 0.5 * tol, rule, depth + 1)
            + recurse(f, m, b, right, 0.5 * tol, rule, depth + 1)
    }
    let whole = gauss10(&f, a, b, &rule);
    recurse(&f, a, b, whole, tol, &rule, 0)
}

/// Solve a tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = upper[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - lower[i] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / d;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
///
/// Returns weights `w[m][j]` such that `f^(m)(z) ≈ Σ_j w[m][j] f(x[j])`
/// for derivative orders `m = 0..=max_order`.
pub fn fd_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let m = max_order;
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First and second derivatives of tabulated data by sliding local
/// polynomial interpolation (window of `width` nodes, Fornberg weights).
pub fn table_derivatives(x: &[f64], y: &[f64], width: usize) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    assert!(n >= width && width >= 3);
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let half = width / 2;
    for i in 0..n {
        let lo = i.saturating_sub(half).min(n - width);
        let w = fd_weights(x[i], &x[lo..lo + width], 2);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for j in 0..width {
            s1 += w[1][j] * y[lo + j];
            s2 += w[2][j] * y[lo + j];
        }
        d1[i] = s1;
        d2[i] = s2;
    }
    (d1, d2)
}

/// Cubic spline with not-a-knot end conditions.
///
/// Stores the node values and second derivatives; evaluates the piecewise
/// cubic, its derivatives, and exact segment integrals.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert_eq!(n, y.len());
        assert!(n >= 2);
        if n < 4 {
            // fall back to natural ends for tiny tables
            let mut m = vec![0.0; n];
            if n == 3 {
                let h0 = x[1] - x[0];
                let h1 = x[2] - x[1];
                let rhs = 6.0 * ((y[2] - y[1]) / h1 - (y[1] - y[0]) / h0);
                m[1] = rhs / (2.0 * (h0 + h1));
            }
            return CubicSpline {
                x: x.to_vec(),
                y: y.to_vec(),
                m,
            };
        }
        // Not-a-knot: third derivative continuous across x[1] and x[n-2].
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let h = |i: usize| x[i + 1] - x[i];
        for i in 1..n - 1 {
            lower[i] = h(i - 1);
            diag[i] = 2.0 * (h(i - 1) + h(i));
            upper[i] = h(i);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1));
        }
        // m0 - (1 + h0/h1) m1 + (h0/h1) m2 = 0 folded into row 1
        let r0 = h(0) / h(1);
        diag[1] += h(0) * (1.0 + r0);
        upper[1] -= h(0) * r0;
        let rn = h(n - 2) / h(n - 3);
        diag[n - 2] += h(n - 2) * (1.0 + rn);
        lower[n - 2] -= h(n - 2) * rn;
        let mut m = vec![0.0; n];
        {
            let mut sol: Vec<f64> = rhs[1..n - 1].to_vec();
            solve_tridiagonal(&lower[1..n - 1], &diag[1..n - 1], &upper[1..n - 1], &mut sol);
            m[1..n - 1].copy_from_slice(&sol);
        }
        m[0] = (1.0 + r0) * m[1] - r0 * m[2];
        m[n - 1] = (1.0 + rn) * m[n - 2] - rn * m[n - 3];
        CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    /// Exact integral of the spline over segment `i`.
    fn segment_integral(&self, i: usize) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        0.5 * h * (self.y[i] + self.y[i + 1]) - h * h * h * (self.m[i] + self.m[i + 1]) / 24.0
    }

    /// Cumulative integral from the first node to every node.
    pub fn cumulative(&self) -> Vec<f64> {
        let n = self.x.len();
        let mut c = vec![0.0; n];
        for i in 0..n - 1 {
            c[i + 1] = c[i] + self.segment_integral(i);
        }
        c
    }

    pub fn integral(&self) -> f64 {
        (0..self.x.len() - 1).map(|i| self.segment_integral(i)).sum()
    }
}

/// Cumulative integral `∫_{x0}^{x_i} f` of tabulated values by exact
/// integration of the not-a-knot cubic spline interpolant.
pub fn cumulative_integral(x: &[f64], y: &[f64]) -> Vec<f64> {
    CubicSpline::new(x, y).cumulative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 polynomial: x^14
        let s: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14, "got {s}");
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_quad_gaussian_tail() {
        let v = adaptive_quad(|r: f64| r * (-r * r / 4.0).exp(), 0.0, 60.0, 1e-13);
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn spline_reproduces_cubics_and_integrals() {
        let x: Vec<f64> = (0..30).map(|i| 0.1 * (i as f64).powf(1.3)).collect();
        let f = |t: f64| 1.0 + t - 2.0 * t * t + 0.5 * t * t * t;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&x, &y);
        // not-a-knot is exact on cubics
        for &t in &[0.05, 0.7, 1.3, 2.0] {
            assert!((s.eval(t) - f(t)).abs() < 1e-12, "at {t}");
            let df = 1.0 - 4.0 * t + 1.5 * t * t;
            assert!((s.deriv(t) - df).abs() < 1e-10, "deriv at {t}");
        }
        let a = *x.first().unwrap();
        let b = *x.last().unwrap();
        let exact = |t: f64| t + t * t / 2.0 - 2.0 * t * t * t / 3.0 + t * t * t * t / 8.0;
        assert!((s.integral() - (exact(b) - exact(a))).abs() < 1e-11);
    }

    #[test]
    fn fornberg_weights_match_known_stencil() {
        // uniform 3-point second derivative: [1, -2, 1]/h^2
        let w = fd_weights(0.0, &[-0.5, 0.0, 0.5], 2);
        assert!((w[2][0] - 4.0).abs() < 1e-12);
        assert!((w[2][1] + 8.0).abs() < 1e-12);
        assert!((w[2][2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn table_derivatives_high_order() {
        let x: Vec<f64> = (0..200).map(|i| (i as f64 / 199.0).powf(1.5) * 5.0).collect();
        let y: Vec<f64> = x.iter().map(|&t| (-t * t / 4.0).exp()).collect();
        let (d1, d2) = table_derivatives(&x, &y, 7);
        for (i, &t) in x.iter().enumerate().step_by(17) {
            let e = (-t * t / 4.0_f64).exp();
            let d1e = -t / 2.0 * e;
            let d2e = (t * t / 4.0 - 0.5) * e;
            assert!((d1[i] - d1e).abs() < 1e-6, "d1 at {t}: {} vs {}", d1[i], d1e);
            assert!((d2[i] - d2e).abs() < 1e-4, "d2 at {t}: {} vs {}", d2[i], d2e);
        }
    }
}
