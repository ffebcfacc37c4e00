//! Point-vortex dynamics: the Helmholtz-Kirchhoff system, its conserved
//! quantities, and the minimal distance / turnover time of a trajectory.
//!
//! `dz_i/dt = (1/2pi) Σ_{j≠i} α_j (z_i - z_j)^perp / |z_i - z_j|^2`

use crate::error::{Error, Result};
use crate::ode::{integrate_adaptive, DensePath};
use crate::vec2::Vec2;

/// Positions and circulations of N point vortices at one instant.
#[derive(Debug, Clone)]
pub struct PointVortexState {
    pub positions: Vec<Vec2>,
    pub circulations: Vec<f64>,
    pub time: f64,
}

impl PointVortexState {
    pub fn new(positions: Vec<Vec2>, circulations: Vec<f64>) -> Result<Self> {
        let st = PointVortexState {
            positions,
            circulations,
            time: 0.0,
        };
        st.validate()?;
        Ok(st)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::InvalidInput("need at least one vortex".into()));
        }
        if self.positions.len() != self.circulations.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions vs {} circulations",
                self.positions.len(),
                self.circulations.len()
            )));
        }
        if self.circulations.iter().any(|&a| a == 0.0 || !a.is_finite()) {
            return Err(Error::InvalidInput("circulations must be nonzero".into()));
        }
        if self.n() >= 2 && self.min_pair_distance() <= 0.0 {
            return Err(Error::InvalidInput(
                "vortex positions must be pairwise distinct".into(),
            ));
        }
        Ok(())
    }

    pub fn min_pair_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                d = d.min(self.positions[i].dist(self.positions[j]));
            }
        }
        d
    }

    /// Total absolute circulation `|α| = Σ |α_i|`.
    pub fn total_abs_circulation(&self) -> f64 {
        self.circulations.iter().map(|a| a.abs()).sum()
    }
}

/// Velocities of all vortices under the mutual-interaction law.
/// A single vortex does not move.
pub fn rhs(state: &PointVortexState) -> Result<Vec<Vec2>> {
    state.validate()?;
    let n = state.n();
    let mut v = vec![Vec2::ZERO; n];
    let inv2pi = 0.5 / std::f64::consts::PI;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dz = state.positions[i] - state.positions[j];
            let r2 = dz.norm_sq();
            if r2 == 0.0 {
                return Err(Error::SingularConfiguration(format!(
                    "vortices {i} and {j} coincide"
                )));
            }
            v[i] += dz.perp() * (state.circulations[j] * inv2pi / r2);
        }
    }
    Ok(v)
}

/// The classical first integrals of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals {
    /// interaction Hamiltonian `-(1/4pi) Σ_{i<j} α_i α_j ln |z_i - z_j|^2`
    pub h: f64,
    /// linear impulse `Σ α_i z_i`
    pub p: Vec2,
    /// angular impulse `Σ α_i |z_i|^2`
    pub i: f64,
}

pub fn first_integrals(state: &PointVortexState) -> FirstIntegrals {
    let n = state.n();
    let mut h = 0.0;
    let mut p = Vec2::ZERO;
    let mut moi = 0.0;
    for i in 0..n {
        p += state.positions[i] * state.circulations[i];
        moi += state.circulations[i] * state.positions[i].norm_sq();
        for j in i + 1..n {
            let r2 = (state.positions[i] - state.positions[j]).norm_sq();
            h -= state.circulations[i] * state.circulations[j] * r2.ln();
        }
    }
    FirstIntegrals {
        h: h / (4.0 * std::f64::consts::PI),
        p,
        i: moi,
    }
}

/// Integrated trajectory: accepted steps plus integrator statistics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub circulations: Vec<f64>,
    path: DensePath,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.path.ts
    }

    pub fn n_steps(&self) -> usize {
        self.path.n_steps
    }

    pub fn n_rejected(&self) -> usize {
        self.path.n_rejected
    }

    pub fn state_at_index(&self, k: usize) -> PointVortexState {
        PointVortexState {
            positions: unpack(&self.path.ys[k]),
            circulations: self.circulations.clone(),
            time: self.path.ts[k],
        }
    }

    /// Dense (cubic Hermite) sample of the positions at arbitrary `t`.
    pub fn sample(&self, t: f64) -> PointVortexState {
        let mut buf = vec![0.0; self.path.dim()];
        self.path.sample(t, &mut buf);
        PointVortexState {
            positions: unpack(&buf),
            circulations: self.circulations.clone(),
            time: t,
        }
    }

    pub fn final_state(&self) -> PointVortexState {
        self.state_at_index(self.path.ts.len() - 1)
    }
}

fn pack(positions: &[Vec2]) -> Vec<f64> {
    let mut y = Vec::with_capacity(2 * positions.len());
    for p in positions {
        y.push(p.x);
        y.push(p.y);
    }
    y
}

fn unpack(y: &[f64]) -> Vec<Vec2> {
    y.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

/// Integrate the system adaptively up to `t_end` with local tolerance `tol`.
///
/// Aborts with a collision error when the minimal pairwise distance drops
/// below `1e-8` times its initial value.
pub fn integrate(state: &PointVortexState, t_end: f64, tol: f64) -> Result<Trajectory> {
    state.validate()?;
    if !(t_end > state.time) {
        return Err(Error::Precondition(format!(
            "t_end = {t_end} must exceed state time {}",
            state.time
        )));
    }
    let circulations = state.circulations.clone();
    let n = state.n();
    let collision_floor = if n >= 2 {
        1e-8 * state.min_pair_distance()
    } else {
        0.0
    };
    let inv2pi = 0.5 / std::f64::consts::PI;
    let circ = circulations.clone();
    let mut rhs_fn = move |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        dy.fill(0.0);
        for i in 0..n {
            let zi = Vec2::new(y[2 * i], y[2 * i + 1]);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let zj = Vec2::new(y[2 * j], y[2 * j + 1]);
                let dz = zi - zj;
                let r2 = dz.norm_sq();
                if r2 < collision_floor * collision_floor {
                    return Err(Error::Collision {
                        t,
                        dist: r2.sqrt(),
                        threshold: collision_floor,
                    });
                }
                let f = circ[j] * inv2pi / r2;
                dy[2 * i] += -dz.y * f;
                dy[2 * i + 1] += dz.x * f;
            }
        }
        Ok(())
    };
    let y0 = pack(&state.positions);
    let path = integrate_adaptive(&mut rhs_fn, state.time, &y0, t_end, tol, |_, _| Ok(()))?;
    Ok(Trajectory { circulations, path })
}

/// Minimal pairwise distance along the trajectory (densely resampled
/// between accepted steps) and the turnover time `T0 = d^2 / Σ|α_i|`.
pub fn min_distance_and_turnover(traj: &Trajectory) -> Result<(f64, f64)> {
    if traj.circulations.len() < 2 {
        return Err(Error::Precondition(
            "minimal distance needs at least two vortices".into(),
        ));
    }
    let ts = traj.times();
    let mut d = f64::INFINITY;
    let resample = 16;
    for w in ts.windows(2) {
        for k in 0..resample {
            let t = w[0] + (w[1] - w[0]) * k as f64 / resample as f64;
            d = d.min(traj.sample(t).min_pair_distance());
        }
    }
    d = d.min(traj.final_state().min_pair_distance());
    let alpha_total: f64 = traj.circulations.iter().map(|a| a.abs()).sum();
    Ok((d, d * d / alpha_total))
}

/// Co-rotating pair of equal circulation `alpha` at separation `d`,
/// centered on the origin.
pub fn equal_pair(alpha: f64, d: f64) -> PointVortexState {
    PointVortexState::new(
        vec![Vec2::new(d / 2.0, 0.0), Vec2::new(-d / 2.0, 0.0)],
        vec![alpha, alpha],
    )
    .expect("valid pair")
}
