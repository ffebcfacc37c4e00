//! Radially symmetric vorticity profiles and their derived functions.
//!
//! A profile is `w*(x) = q(|x|^2)/pi` for a smooth positive decreasing `q`
//! normalized so that `∫ q = 1`. Everything downstream is expressed through
//! `q`, its cumulative `Q`, and the derived radial functions
//! `phi(r) = Q(r^2)/(2 pi r^2)`, `g(r) = -2 q'(r^2)/pi`, and the weight
//! `p(s) = -1/q'(s)` of the working Hilbert space.

use crate::error::{Error, Result};
use crate::quad::{adaptive_quad, gauss_legendre};
use crate::vec2::Vec2;
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radially symmetric vorticity profile with analytic derivatives.
///
/// The argument of `q`, `dq`, `d2q`, `Q` and `p` is the squared radius.
/// Derivatives are supplied analytically by the constructors; the weight
/// `p = -1/q'` amplifies differentiation noise far too much for numerical
/// differentiation of Gaussian-type tails.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    q: ScalarFn,
    dq: ScalarFn,
    d2q: ScalarFn,
    q_cumulative: ScalarFn,
    r_max: f64,
    n_quad: usize,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("r_max", &self.r_max)
            .field("n_quad", &self.n_quad)
            .finish()
    }
}

impl RadialProfile {
    /// The Gaussian (Lamb-Oseen) profile `q(s) = e^{-s/4}/4`.
    pub fn gaussian() -> Self {
        RadialProfile {
            name: "gaussian".into(),
            q: Arc::new(|s| 0.25 * (-s / 4.0).exp()),
            dq: Arc::new(|s| -(-s / 4.0).exp() / 16.0),
            d2q: Arc::new(|s| (-s / 4.0).exp() / 64.0),
            q_cumulative: Arc::new(|s| -(-s / 4.0).exp_m1()),
            r_max: 20.0,
            n_quad: 2048,
        }
    }

    /// Exponential profile `q(s) = γ e^{-γ s}`.
    pub fn exponential(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "exponential profile needs gamma > 0, got {gamma}"
            )));
        }
        Ok(RadialProfile {
            name: format!("exponential:{gamma}"),
            q: Arc::new(move |s| gamma * (-gamma * s).exp()),
            dq: Arc::new(move |s| -gamma * gamma * (-gamma * s).exp()),
            d2q: Arc::new(move |s| gamma * gamma * gamma * (-gamma * s).exp()),
            q_cumulative: Arc::new(move |s| -(-gamma * s).exp_m1()),
            // e^{-γ s} reaches the Gaussian default's tail mass at s ~ 100/γ
            r_max: (100.0 / gamma).sqrt().max(20.0),
            n_quad: 2048,
        })
    }

    /// Slowly decaying test profile `q(s) = (1+s)^{-2}/pi`.
    ///
    /// Violates the rapid-decay assumptions (and the unit normalization);
    /// used to exercise the admissibility report's failure paths.
    pub fn algebraic() -> Self {
        let pi = std::f64::consts::PI;
        RadialProfile {
            name: "algebraic".into(),
            q: Arc::new(move |s| 1.0 / (pi * (1.0 + s) * (1.0 + s))),
            dq: Arc::new(move |s| -2.0 / (pi * (1.0 + s).powi(3))),
            d2q: Arc::new(move |s| 6.0 / (pi * (1.0 + s).powi(4))),
            q_cumulative: Arc::new(move |s| (1.0 - 1.0 / (1.0 + s)) / pi),
            r_max: 20.0,
            n_quad: 2048,
        }
    }

    /// Resolve a profile by CLI name: `gaussian` or `exponential:<gamma>`.
    pub fn from_name(name: &str) -> Result<Self> {
        if name == "gaussian" {
            return Ok(Self::gaussian());
        }
        if let Some(g) = name.strip_prefix("exponential:") {
            let gamma: f64 = g
                .parse()
                .map_err(|_| Error::Format(format!("bad gamma in profile name {name:?}")))?;
            return Self::exponential(gamma);
        }
        Err(Error::InvalidInput(format!("unknown profile {name:?}")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_gaussian(&self) -> bool {
        self.name == "gaussian"
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    /// Override the truncation radius and node budget.
    pub fn with_grid_params(mut self, r_max: f64, n_quad: usize) -> Self {
        self.r_max = r_max;
        self.n_quad = n_quad;
        self
    }

    pub fn q(&self, s: f64) -> f64 {
        (self.q)(s)
    }

    pub fn dq(&self, s: f64) -> f64 {
        (self.dq)(s)
    }

    pub fn d2q(&self, s: f64) -> f64 {
        (self.d2q)(s)
    }

    /// Cumulative `Q(s) = ∫_0^s q`, monotone, `Q(0) = 0`.
    pub fn q_int(&self, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::Precondition(format!(
                "cumulative Q needs s >= 0, got {s}"
            )));
        }
        Ok((self.q_cumulative)(s))
    }

    /// Hilbert-space weight `p(s) = -1/q'(s)`.
    pub fn p(&self, s: f64) -> f64 {
        -1.0 / (self.dq)(s)
    }

    /// Vorticity profile `w*(x) = q(|x|^2)/pi`.
    pub fn w_star(&self, x: Vec2) -> f64 {
        (self.q)(x.norm_sq()) / std::f64::consts::PI
    }

    /// Azimuthal velocity of `w*`: `v*(x) = x^perp Q(|x|^2)/(2 pi |x|^2)`.
    pub fn v_star(&self, x: Vec2) -> Vec2 {
        let s = x.norm_sq();
        // Q(s)/s -> q(0) as s -> 0
        let factor = if s < 1e-12 {
            (self.q)(0.0)
        } else {
            (self.q_cumulative)(s) / s
        };
        x.perp() * (factor / (2.0 * std::f64::consts::PI))
    }

    /// `∇ w*(x) = -x g(|x|)`.
    pub fn grad_w_star(&self, x: Vec2) -> Vec2 {
        x * (-self.g(x.norm()))
    }

    /// `phi(r) = Q(r^2)/(2 pi r^2)`, with the limit `phi(0) = q(0)/(2 pi)`.
    pub fn phi(&self, r: f64) -> f64 {
        let s = r * r;
        let ratio = if s < 1e-12 {
            (self.q)(0.0) + 0.5 * (self.dq)(0.0) * s
        } else {
            (self.q_cumulative)(s) / s
        };
        ratio / (2.0 * std::f64::consts::PI)
    }

    /// `g(r) = -2 q'(r^2)/pi`.
    pub fn g(&self, r: f64) -> f64 {
        -2.0 * (self.dq)(r * r) / std::f64::consts::PI
    }

    /// Potential `g(r)/phi(r)` of the radial sector equation, with its
    /// small-r limit `-4 q'(0)/q(0)`.
    pub fn g_over_phi(&self, r: f64) -> f64 {
        let s = r * r;
        let q_over = if s < 1e-12 {
            (self.q)(0.0) + 0.5 * (self.dq)(0.0) * s
        } else {
            (self.q_cumulative)(s) / s
        };
        -4.0 * (self.dq)(s) / q_over
    }

    /// The triple `(phi(r), g(r), p(r))` of derived functions at `r`.
    pub fn derived_functions(&self, r: f64) -> (f64, f64, f64) {
        (self.phi(r), self.g(r), self.p(r))
    }
}

/// Strictly increasing radial quadrature nodes with weights for
/// `∫_0^∞ f(r) r dr`.
///
/// Composite Gauss-Legendre panels, geometrically graded from a short first
/// panel at the origin out to `r_max`; the first node lands near 1e-4 for
/// the default layout. Weights carry the measure factor `r`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
}

impl RadialGrid {
    /// Geometrically graded composite Gauss grid on `[0, r_max]`.
    pub fn clustered(
        r_max: f64,
        n_panels: usize,
        nodes_per_panel: usize,
        first_panel: f64,
    ) -> Result<Self> {
        if !(r_max > 0.0) || !(first_panel > 0.0) || first_panel >= r_max {
            return Err(Error::InvalidInput(format!(
                "bad radial grid: r_max={r_max}, first_panel={first_panel}"
            )));
        }
        if n_panels < 2 || nodes_per_panel < 2 {
            return Err(Error::InvalidInput(
                "need at least 2 panels and 2 nodes per panel".into(),
            ));
        }
        let (gx, gw) = gauss_legendre(nodes_per_panel);
        let ratio = (r_max / first_panel).powf(1.0 / (n_panels as f64 - 1.0));
        let mut bounds = Vec::with_capacity(n_panels + 1);
        bounds.push(0.0);
        let mut b = first_panel;
        for _ in 0..n_panels {
            bounds.push(b);
            b *= ratio;
        }
        *bounds.last_mut().unwrap() = r_max;
        let mut nodes = Vec::with_capacity(n_panels * nodes_per_panel);
        let mut weights = Vec::with_capacity(n_panels * nodes_per_panel);
        for p in 0..n_panels {
            let (a, b) = (bounds[p], bounds[p + 1]);
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (&x, &w) in gx.iter().zip(&gw) {
                let r = c + h * x;
                nodes.push(r);
                weights.push(w * h * r); // includes the polar measure r dr
            }
        }
        Ok(RadialGrid {
            nodes,
            weights,
            r_max,
        })
    }

    /// Default grid for a profile: `n_quad` nodes out to the profile's
    /// truncation radius.
    pub fn for_profile(profile: &RadialProfile) -> Self {
        let per_panel = 16;
        let n_panels = (profile.n_quad() / per_panel).max(4);
        Self::clustered(profile.r_max(), n_panels, per_panel, 0.02)
            .expect("default radial grid parameters are valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `∫ f(r) r dr` over the grid for tabulated `f`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.nodes.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `∫ f(r) r dr` for a function.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * f(r))
            .sum()
    }

    /// Grids are compatible when they share the same nodes.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.first() == other.nodes.first()
            && self.nodes.last() == other.nodes.last()
    }
}

/// Admissibility report: the strong-stability conditions and the
/// rapid-decay bounds, evaluated on a dense scan of the profile.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// q > 0 and q' < 0 everywhere sampled
    pub monotone_ok: bool,
    /// sup of -s^2 q'(s)/Q(s)
    pub ss_sup_ratio: f64,
    pub ss_ratio_ok: bool,
    /// π ∫ q - 1 (signed normalization defect of ∫ w* dx)
    pub normalization_defect: f64,
    pub normalization_ok: bool,
    /// max over the scan of s^k q^2/|q'| for k = 0..=K_MAX
    pub qdecay_max: Vec<f64>,
    pub qdecay_ok: bool,
    /// max over the scan of s^k q''^2/|q'| for k = 0..=K_MAX
    pub q2decay_max: Vec<f64>,
    pub q2decay_ok: bool,
}

/// Largest power checked in the decay conditions. The conditions hold "for
/// all k" in principle; only a finite range is checkable.
pub const K_MAX: usize = 12;

impl AdmissibilityReport {
    pub fn all_ok(&self) -> bool {
        self.monotone_ok
            && self.ss_ratio_ok
            && self.normalization_ok
            && self.qdecay_ok
            && self.q2decay_ok
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "monotone_ok={}", self.monotone_ok)?;
        writeln!(f, "ss_sup_ratio={:.12e}", self.ss_sup_ratio)?;
        writeln!(f, "ss_ratio_ok={}", self.ss_ratio_ok)?;
        writeln!(f, "normalization_defect={:.12e}", self.normalization_defect)?;
        writeln!(f, "normalization_ok={}", self.normalization_ok)?;
        for (k, v) in self.qdecay_max.iter().enumerate() {
            writeln!(f, "qdecay_max_k{k}={v:.12e}")?;
        }
        writeln!(f, "qdecay_ok={}", self.qdecay_ok)?;
        for (k, v) in self.q2decay_max.iter().enumerate() {
            writeln!(f, "q2decay_max_k{k}={v:.12e}")?;
        }
        writeln!(f, "q2decay_ok={}", self.q2decay_ok)
    }
}

/// Scan grid in the squared-radius variable: log-spaced out to at least 100.
fn admissibility_scan(profile: &RadialProfile) -> Vec<f64> {
    let s_max = (profile.r_max() * profile.r_max()).max(100.0);
    let n = 4000;
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            1e-6 * (s_max / 1e-6f64).powf(t)
        })
        .collect()
}

/// Evaluate the strong-stability and decay conditions for a profile.
pub fn check_admissibility(profile: &RadialProfile) -> AdmissibilityReport {
    let scan = admissibility_scan(profile);
    let mut monotone_ok = true;
    let mut ss_sup: f64 = 0.0;
    let mut qdecay_max = vec![0.0f64; K_MAX + 1];
    let mut q2decay_max = vec![0.0f64; K_MAX + 1];
    // tail behavior decides whether the k-weighted ratios are genuinely
    // bounded or still growing at the truncation radius
    let mut qdecay_growing = vec![false; K_MAX + 1];
    let mut q2decay_growing = vec![false; K_MAX + 1];
    let tail_start = scan.len() - scan.len() / 10;
    let mut prev_q = vec![f64::NAN; K_MAX + 1];
    let mut prev_q2 = vec![f64::NAN; K_MAX + 1];
    for (i, &s) in scan.iter().enumerate() {
        let q = profile.q(s);
        let dq = profile.dq(s);
        let d2q = profile.d2q(s);
        if !(q > 0.0) || !(dq < 0.0) {
            monotone_ok = false;
        }
        let qq = profile.q_int(s).unwrap_or(f64::NAN);
        if qq > 0.0 {
            ss_sup = ss_sup.max(-s * s * dq / qq);
        }
        let rq = q * q / dq.abs();
        let rq2 = d2q * d2q / dq.abs();
        for k in 0..=K_MAX {
            let sk = s.powi(k as i32);
            let a = sk * rq;
            let b = sk * rq2;
            qdecay_max[k] = qdecay_max[k].max(a);
            q2decay_max[k] = q2decay_max[k].max(b);
            if i >= tail_start {
                if a > prev_q[k] * (1.0 + 1e-12) && prev_q[k].is_finite() {
                    qdecay_growing[k] = true;
                }
                if b > prev_q2[k] * (1.0 + 1e-12) && prev_q2[k].is_finite() {
                    q2decay_growing[k] = true;
                }
            }
            prev_q[k] = a;
            prev_q2[k] = b;
        }
    }
    let s_max = *scan.last().unwrap();
    // ∫ w* dx = ∫_0^∞ q(s) ds in the squared-radius variable
    let total = adaptive_quad(|s| profile.q(s), 0.0, s_max, 1e-12);
    let normalization_defect = total - 1.0;
    AdmissibilityReport {
        monotone_ok,
        ss_sup_ratio: ss_sup,
        ss_ratio_ok: ss_sup < 1.0,
        normalization_defect,
        normalization_ok: normalization_defect.abs() < 1e-8,
        qdecay_ok: !qdecay_growing.iter().any(|&g| g),
        qdecay_max,
        q2decay_ok: !q2decay_growing.iter().any(|&g| g),
        q2decay_max,
    }
}
