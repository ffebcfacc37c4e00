//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
//! cubic Hermite dense output between accepted steps.

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-in-form system `y' = f(t, y)`.
/// Returning an error aborts the integration (used for collision checks).
pub trait OdeRhs {
    fn eval(&mut self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;
}

impl<F> OdeRhs for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn eval(&mut self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        self(t, y, dydt)
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// error coefficients b5 - b4
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One accepted integration path with derivatives stored at the accepted
/// points, enough for cubic Hermite interpolation in between.
#[derive(Debug, Clone)]
pub struct DensePath {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub fs: Vec<Vec<f64>>,
    pub n_steps: usize,
    pub n_rejected: usize,
}

impl DensePath {
    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    /// Cubic Hermite interpolation at `t` (clamped to the path range).
    pub fn sample(&self, t: f64, out: &mut [f64]) {
        let n = self.ts.len();
        let t = t.clamp(self.ts[0], self.ts[n - 1]);
        let k = match self
            .ts
            .binary_search_by(|v| v.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let h = self.ts[k + 1] - self.ts[k];
        let s = (t - self.ts[k]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        for j in 0..out.len() {
            out[j] = h00 * self.ys[k][j]
                + h10 * h * self.fs[k][j]
                + h01 * self.ys[k + 1][j]
                + h11 * h * self.fs[k + 1][j];
        }
    }
}

struct Stepper {
    dim: usize,
    k: Vec<Vec<f64>>,
    y_stage: Vec<f64>,
    tol: f64,
}

impl Stepper {
    fn new(dim: usize, tol: f64) -> Self {
        Stepper {
            dim,
            k: vec![vec![0.0; dim]; 7],
            y_stage: vec![0.0; dim],
            tol,
        }
    }

    /// Attempt one step from `(t, y)` with size `h`; `f0` holds `f(t, y)`.
    /// Returns `(error_norm, y_new, f_new)` scratch-filled in place.
    fn try_step<R: OdeRhs>(
        &mut self,
        rhs: &mut R,
        t: f64,
        y: &[f64],
        f0: &[f64],
        h: f64,
        y_new: &mut [f64],
        f_new: &mut [f64],
    ) -> Result<f64> {
        self.k[0].copy_from_slice(f0);
        for s in 1..7 {
            for j in 0..self.dim {
                let mut acc = 0.0;
                for (i, kk) in self.k.iter().enumerate().take(s) {
                    acc += A[s][i] * kk[j];
                }
                self.y_stage[j] = y[j] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s);
            let _ = head;
            rhs.eval(t + C[s] * h, &self.y_stage, &mut tail[0])?;
        }
        // 5th-order solution is stage 7's argument (FSAL): y_stage already
        // holds it after the s = 6 loop iteration
        y_new.copy_from_slice(&self.y_stage);
        f_new.copy_from_slice(&self.k[6]);
        let mut err_sq = 0.0;
        for j in 0..self.dim {
            let mut e = 0.0;
            for (i, kk) in self.k.iter().enumerate() {
                e += E[i] * kk[j];
            }
            let scale = self.tol + self.tol * y[j].abs().max(y_new[j].abs());
            let r = h * e / scale;
            err_sq += r * r;
        }
        Ok((err_sq / self.dim as f64).sqrt())
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end` adaptively; calls
/// `accepted` after every accepted step.
///
/// `tol` is used as both absolute and relative tolerance. The returned path
/// contains every accepted step.
pub fn integrate_adaptive<R: OdeRhs>(
    rhs: &mut R,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: f64,
    mut accepted: impl FnMut(f64, &[f64]) -> Result<()>,
) -> Result<DensePath> {
    if !(t_end > t0) {
        return Err(Error::Precondition(format!(
            "integration needs t_end > t0 ({t_end} <= {t0})"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let dim = y0.len();
    let mut stepper = Stepper::new(dim, tol);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    rhs.eval(t, &y, &mut f)?;
    let mut path = DensePath {
        ts: vec![t],
        ys: vec![y.clone()],
        fs: vec![f.clone()],
        n_steps: 0,
        n_rejected: 0,
    };
    // initial step: crude scale from the first derivative
    let fn0 = f.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let yn0 = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    let mut h = (0.01 * yn0 / fn0).min(t_end - t0);
    let mut y_new = vec![0.0; dim];
    let mut f_new = vec![0.0; dim];
    let max_steps = 50_000_000usize;
    let mut n_evals = 0usize;
    while t < t_end {
        if n_evals > max_steps {
            return Err(Error::Numerical(format!(
                "adaptive integrator exceeded {max_steps} evaluations"
            )));
        }
        h = h.min(t_end - t);
        let err = stepper.try_step(rhs, t, &y, &f, h, &mut y_new, &mut f_new)?;
        n_evals += 6;
        if err <= 1.0 || h <= 1e-14 * t.abs().max(1.0) {
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut f, &mut f_new);
            path.ts.push(t);
            path.ys.push(y.clone());
            path.fs.push(f.clone());
            path.n_steps += 1;
            accepted(t, &y)?;
        } else {
            path.n_rejected += 1;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(path)
}

/// Integrate through a strictly increasing list of abscissae, landing on
/// each node exactly; returns the solution values at the nodes.
///
/// Used for the radial homogeneous solutions where tables on a fixed grid
/// are needed.
pub fn integrate_to_nodes<R: OdeRhs>(
    rhs: &mut R,
    nodes: &[f64],
    y0: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let dim = y0.len();
    let mut out = Vec::with_capacity(nodes.len());
    out.push(y0.to_vec());
    let mut stepper = Stepper::new(dim, tol);
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut f_new = vec![0.0; dim];
    rhs.eval(nodes[0], &y, &mut f)?;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut t = a;
        let mut h = b - a;
        while t < b {
            h = h.min(b - t);
            let err = stepper.try_step(rhs, t, &y, &f, h, &mut y_new, &mut f_new)?;
            if err <= 1.0 || h <= 1e-14 * t.abs().max(1.0) {
                t += h;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut f, &mut f_new);
            }
            let factor = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h *= factor;
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = y[0];
            Ok(())
        };
        let path = integrate_adaptive(&mut rhs, 0.0, &[1.0], 2.0, 1e-11, |_, _| Ok(())).unwrap();
        let end = path.ys.last().unwrap()[0];
        assert!((end - 2f64.exp()).abs() < 1e-9, "e^2 = {end}");
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        };
        let path =
            integrate_adaptive(&mut rhs, 0.0, &[1.0, 0.0], 7.0, 1e-10, |_, _| Ok(())).unwrap();
        let mut buf = [0.0; 2];
        for i in 0..70 {
            let t = 0.1 * i as f64;
            path.sample(t, &mut buf);
            assert!((buf[0] - t.cos()).abs() < 1e-6, "cos({t}) vs {}", buf[0]);
        }
    }

    #[test]
    fn nodes_integration_matches() {
        let mut rhs = |t: f64, _y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = t.cos();
            Ok(())
        };
        let nodes: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let vals = integrate_to_nodes(&mut rhs, &nodes, &[0.0], 1e-12).unwrap();
        for (i, &t) in nodes.iter().enumerate() {
            assert!((vals[i][0] - t.sin()).abs() < 1e-10);
        }
    }
}
