//! Reflected Euler scheme with boundary local time, a moving orthonormal
//! frame, and the damped parallel transport that feeds the gradient
//! estimators.
//!
//! The chart step is the plain Euler-Ito scheme for the generator
//! Delta + Z: the conformal drift (d-1) grad log phi and the Ito
//! correction of the conformally changed connection cancel exactly, so
//! phi never enters a single-path step (it matters only for coupled
//! pairs, where the partner's noise is transported in the changed
//! metric). Boundary crossings are handled by symmetrized reflection
//! across the boundary; the accumulated penetration depth, doubled,
//! is a consistent estimator of the boundary local time.

use crate::error::{CoreError, Result};
use crate::geometry::ManifoldModel;
use crate::linalg::{self, Mat2, Vec2, IDENT, ZERO_M};
use crate::rng::PathRng;
use serde::{Deserialize, Serialize};

/// Penetration-to-local-time constant of the symmetrized scheme.
pub const LOCAL_TIME_SCALE: f64 = 2.0;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SdeConfig {
    /// Time horizon T.
    pub t: f64,
    /// Step size; T/dt is rounded to the nearest whole step count.
    pub dt: f64,
}

impl SdeConfig {
    pub fn new(t: f64, dt: f64) -> Result<Self> {
        let c = SdeConfig { t, dt };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.t >= 0.0) || !self.t.is_finite() {
            errs.push(format!("horizon t = {} must be finite and >= 0", self.t));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            errs.push(format!("dt = {} must be finite and > 0", self.dt));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CoreError::Config(errs))
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t / self.dt).round().max(0.0) as usize
    }
}

/// Evolving state of one path. The frame columns are g-orthonormal; `q`
/// is the damped transport expressed in frame coordinates; `bismut`
/// accumulates int h'(s) Q_s dB_s for the constant-rate h(s) = s/T.
#[derive(Clone, Debug)]
pub struct PathState {
    pub x: Vec2,
    pub frame: Mat2,
    pub q: Mat2,
    pub local_time: f64,
    pub time: f64,
    pub bismut: Vec2,
    pub reflections: usize,
}

/// Outcome of the position part of one Euler step.
#[derive(Clone, Copy, Debug)]
pub struct Moved {
    /// Post-reflection position before chart canonicalization (small
    /// displacement from the start point; used for frame transport).
    pub x_pre: Vec2,
    /// Canonical new position.
    pub x: Vec2,
    /// Local time increment.
    pub dl: f64,
    pub reflected: bool,
    /// Whether canonicalization flipped the polar coordinate.
    pub flipped: bool,
}

/// One-path driver: holds the model and step size, mutates `PathState`.
pub struct Stepper<'a> {
    pub m: &'a ManifoldModel,
    pub dt: f64,
    /// Horizon used for the Bismut weight h(s) = s/T.
    pub t_horizon: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(m: &'a ManifoldModel, cfg: &SdeConfig) -> Self {
        Stepper {
            m,
            dt: cfg.dt,
            t_horizon: cfg.t.max(cfg.dt),
        }
    }

    pub fn init(&self, x0: Vec2) -> Result<PathState> {
        if !self.m.contains(x0) {
            let (rho, _) = self.m.boundary_distance(x0);
            return Err(CoreError::DomainViolation { rho });
        }
        let g = self.m.metric_raw(x0);
        Ok(PathState {
            x: x0,
            frame: linalg::gram_schmidt(&g, &IDENT, self.m.dim),
            q: IDENT,
            local_time: 0.0,
            time: 0.0,
            bismut: [0.0, 0.0],
            reflections: 0,
        })
    }

    /// Drift of the chart Euler step: Z^k - Gamma^k_{ij} g^{ij}.
    pub fn chart_drift(&self, x: Vec2) -> Vec2 {
        let z = self.m.drift_at(x);
        if self.m.dim == 1 {
            return z;
        }
        let gamma = self.m.christoffel_at(x);
        let ginv = linalg::inverse(&self.m.metric_raw(x), self.m.dim);
        let mut b = z;
        for k in 0..self.m.dim {
            for i in 0..self.m.dim {
                for j in 0..self.m.dim {
                    b[k] -= gamma[k][i][j] * ginv[i][j];
                }
            }
        }
        b
    }

    /// Position part of one step: tamed drift, the noise displacement
    /// `noise` (a chart vector already scaled by sqrt(2 dt)), reflection,
    /// and chart canonicalization. Shared by single paths and the partner
    /// path of a coupling.
    pub fn advance_position(&self, x: Vec2, noise: Vec2) -> Result<Moved> {
        let dt = self.dt;
        // taming keeps the step stable where the chart drift is singular
        // (the polar Bessel term cot(phi) near a pole)
        let b_raw = self.chart_drift(x);
        let g0 = self.m.metric_raw(x);
        let bn = linalg::norm(&g0, b_raw) * dt;
        let b = linalg::scale(b_raw, 1.0 / (1.0 + bn));
        let mut x_new = [
            x[0] + noise[0] + b[0] * dt,
            x[1] + noise[1] + b[1] * dt,
        ];
        if self.m.dim == 1 {
            x_new[1] = 0.0;
        }

        // symmetrized reflection; accumulate penetration as local time
        let mut dl = 0.0;
        let mut reflected = false;
        for _ in 0..8 {
            let (rho, n) = self.m.boundary_distance(x_new);
            if rho >= 0.0 {
                break;
            }
            reflected = true;
            x_new = linalg::axpy(x_new, -2.0 * rho, n);
            dl += -rho * LOCAL_TIME_SCALE;
        }
        let (rho_f, n_f) = self.m.boundary_distance(x_new);
        if rho_f < 0.0 {
            // deep multi-reflection corner case: project just inside
            x_new = linalg::axpy(x_new, -rho_f + self.m.tol_boundary(), n_f);
        }

        let x_pre = x_new;
        let x_canon = self.m.canonicalize(x_new);
        let flipped = x_canon[0] != x_new[0];
        x_new = x_canon;
        if !self.m.chart_valid(x_new) {
            return Err(CoreError::Numeric(format!(
                "step left the chart at ({}, {})",
                x_new[0], x_new[1]
            )));
        }
        Ok(Moved {
            x_pre,
            x: x_new,
            dl,
            reflected,
            flipped,
        })
    }

    /// Advance one step with standard normal increments `xi`.
    pub fn step(&self, s: &mut PathState, xi: Vec2) -> Result<()> {
        let dt = self.dt;
        let sq = (2.0 * dt).sqrt();
        // dB in frame coordinates, mapped to the chart through the frame
        let mut noise = [0.0f64; 2];
        for k in 0..self.m.dim {
            for a in 0..self.m.dim {
                noise[k] += sq * self.frame_col(&s.frame, a)[k] * xi[a];
            }
        }
        let mv = self.advance_position(s.x, noise)?;

        // damped transport in frame coordinates: the Bakry-Emery form
        // damps in time, the shape operator damps in local time
        let ric = self.m.ricci_z_form(s.x);
        let r_frame = pullback(&ric, &s.frame, self.m.dim);
        let mut a = linalg::mat_scale(&r_frame, -dt);
        if mv.dl > 0.0 {
            let bd = self.nearest_boundary_point(mv.x);
            let ii = self.m.ii_form_at(bd);
            let ii_frame = pullback(&ii, &s.frame, self.m.dim);
            a = linalg::mat_add(&a, &linalg::mat_scale(&ii_frame, -mv.dl));
        }
        s.q = linalg::mat_mul(&s.q, &expm_small(&a, self.m.dim));

        // Bismut accumulator: h(s) = s/T, so dh = dt/T at every step
        let w = 1.0 / self.t_horizon;
        let qx = linalg::mat_vec(&s.q, [xi[0] * dt.sqrt(), xi[1] * dt.sqrt()]);
        s.bismut = linalg::axpy(s.bismut, w, qx);

        // transport the frame to first order, then restore orthonormality
        let dx = linalg::sub(mv.x_pre, s.x);
        let gamma = self.m.christoffel_at(s.x);
        let mut f_new = s.frame;
        for a_col in 0..self.m.dim {
            for k in 0..self.m.dim {
                let mut corr = 0.0;
                for i in 0..self.m.dim {
                    for j in 0..self.m.dim {
                        corr += gamma[k][i][j] * dx[i] * s.frame[j][a_col];
                    }
                }
                f_new[k][a_col] -= corr;
            }
        }
        // a polar flip has Jacobian diag(-1, 1) on tangent vectors
        if mv.flipped {
            f_new[0][0] = -f_new[0][0];
            f_new[0][1] = -f_new[0][1];
        }
        let g_new = self.m.metric_raw(mv.x);
        s.frame = linalg::gram_schmidt(&g_new, &f_new, self.m.dim);

        s.x = mv.x;
        s.local_time += mv.dl;
        s.time += dt;
        if mv.reflected {
            s.reflections += 1;
        }
        Ok(())
    }

    fn frame_col(&self, f: &Mat2, a: usize) -> Vec2 {
        [f[0][a], f[1][a]]
    }

    fn nearest_boundary_point(&self, x: Vec2) -> Vec2 {
        let (rho, n) = self.m.boundary_distance(x);
        linalg::axpy(x, -rho, n)
    }
}

/// Pull a covariant 2-form back through the frame: out_ab = e_a^i T_ij e_b^j.
fn pullback(t: &Mat2, frame: &Mat2, dim: usize) -> Mat2 {
    let mut out = ZERO_M;
    for a in 0..dim {
        for b in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    out[a][b] += frame[i][a] * t[i][j] * frame[j][b];
                }
            }
        }
    }
    out
}

/// exp(A) for a small-norm d x d matrix via the plain power series.
pub fn expm_small(a: &Mat2, dim: usize) -> Mat2 {
    if dim == 1 {
        let mut out = IDENT;
        out[0][0] = a[0][0].exp();
        return out;
    }
    let mut out = IDENT;
    let mut term = IDENT;
    for k in 1..=12 {
        term = linalg::mat_scale(&linalg::mat_mul(&term, a), 1.0 / k as f64);
        out = linalg::mat_add(&out, &term);
        if linalg::op_norm(&term, dim) < 1e-18 {
            break;
        }
    }
    out
}

/// A fully stored path: chart positions and cumulative local time at
/// every step (index 0 is the start).
#[derive(Clone, Debug)]
pub struct ReflectedPath {
    pub dt: f64,
    pub states: Vec<Vec2>,
    pub local_time: Vec<f64>,
}

impl ReflectedPath {
    pub fn terminal(&self) -> Vec2 {
        *self.states.last().unwrap()
    }

    pub fn terminal_local_time(&self) -> f64 {
        *self.local_time.last().unwrap()
    }
}

/// Simulate one path with the stream `(seed, path_index)`, storing every
/// state. Use `Stepper` directly for streaming functionals.
pub fn simulate_path(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    seed: u64,
    path_index: u64,
) -> Result<ReflectedPath> {
    let stepper = Stepper::new(m, cfg);
    let mut state = stepper.init(x0)?;
    let mut rng = PathRng::new(seed, path_index);
    let n = cfg.n_steps();
    let mut states = Vec::with_capacity(n + 1);
    let mut lt = Vec::with_capacity(n + 1);
    states.push(state.x);
    lt.push(0.0);
    for _ in 0..n {
        let xi = draw_normals(&mut rng, m.dim);
        stepper.step(&mut state, xi)?;
        states.push(state.x);
        lt.push(state.local_time);
    }
    Ok(ReflectedPath {
        dt: cfg.dt,
        states,
        local_time: lt,
    })
}

/// Draw a chart-dimension block of standard normals.
pub fn draw_normals(rng: &mut PathRng, dim: usize) -> Vec2 {
    let mut xi = [0.0f64; 2];
    for v in xi.iter_mut().take(dim) {
        *v = rng.normal();
    }
    xi
}
