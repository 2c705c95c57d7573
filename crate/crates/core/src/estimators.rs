//! Monte Carlo estimators: semigroup averages, three gradient
//! estimators that must agree with each other, empirical Wasserstein
//! distances via exact assignment, and relative entropy of a Girsanov
//! tilt.
//!
//! Everything is deterministic for a fixed seed: paths are keyed by
//! `(seed, path_index)` and reductions run in index order, so repeated
//! runs produce byte-identical output even with rayon parallelism.

use crate::error::{CoreError, Result};
use crate::geometry::ManifoldModel;
use crate::linalg::{self, Vec2};
use crate::rng::PathRng;
use crate::sde::{draw_normals, SdeConfig, Stepper};
use rayon::prelude::*;

/// Mean, standard error and sample count of a Monte Carlo average.
#[derive(Clone, Copy, Debug)]
pub struct MCEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MCEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (n.saturating_sub(1).max(1)) as f64;
        MCEstimate {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }
}

/// Parallel Monte Carlo over path indices with an order-stable reduction.
pub fn monte_carlo<F>(n_paths: usize, f: F) -> Result<MCEstimate>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let samples: Result<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(&f)
        .collect();
    Ok(MCEstimate::from_samples(&samples?))
}

/// Vector-valued analogue (used by the gradient estimators).
pub fn monte_carlo_vec<F>(n_paths: usize, f: F) -> Result<(Vec2, Vec2, usize)>
where
    F: Fn(u64) -> Result<Vec2> + Sync,
{
    let samples: Result<Vec<Vec2>> = (0..n_paths as u64)
        .into_par_iter()
        .map(&f)
        .collect();
    let samples = samples?;
    let n = samples.len();
    let mut mean = [0.0f64; 2];
    for s in &samples {
        mean = linalg::add(mean, *s);
    }
    mean = linalg::scale(mean, 1.0 / n as f64);
    let mut var = [0.0f64; 2];
    for s in &samples {
        let d = linalg::sub(*s, mean);
        var[0] += d[0] * d[0];
        var[1] += d[1] * d[1];
    }
    let denom = (n.saturating_sub(1).max(1) * n) as f64;
    Ok((mean, [(var[0] / denom).sqrt(), (var[1] / denom).sqrt()], n))
}

/// Run one path to the horizon and return its terminal state.
fn terminal_state(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    seed: u64,
    idx: u64,
) -> Result<crate::sde::PathState> {
    let stepper = Stepper::new(m, cfg);
    let mut st = stepper.init(x0)?;
    let mut rng = PathRng::new(seed, idx);
    for _ in 0..cfg.n_steps() {
        stepper.step(&mut st, draw_normals(&mut rng, m.dim))?;
    }
    Ok(st)
}

/// P_T f(x0) = E f(X_T).
pub fn estimate_semigroup<F>(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    f: F,
    n_paths: usize,
    seed: u64,
) -> Result<MCEstimate>
where
    F: Fn(Vec2) -> f64 + Sync,
{
    monte_carlo(n_paths, |i| Ok(f(terminal_state(m, cfg, x0, seed, i)?.x)))
}

/// Vector gradient estimate in the coordinates of the initial frame
/// (g-orthonormal, so the Euclidean norm of `mean` is |grad P_T f|_g).
#[derive(Clone, Copy, Debug)]
pub struct GradientEstimate {
    pub mean: Vec2,
    pub se: Vec2,
    pub n: usize,
}

impl GradientEstimate {
    pub fn norm(&self) -> f64 {
        linalg::dot(self.mean, self.mean).sqrt()
    }

    /// Conservative standard error for the norm.
    pub fn norm_se(&self) -> f64 {
        linalg::dot(self.se, self.se).sqrt()
    }
}

/// Bismut-type formula with weight h(s) = s/T:
/// u_0^{-1} grad P_T f = 2^{-1/2} E[ f(X_T) int h'(s) Q_s dB_s ].
pub fn gradient_bismut<F>(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    f: F,
    n_paths: usize,
    seed: u64,
) -> Result<GradientEstimate>
where
    F: Fn(Vec2) -> f64 + Sync,
{
    let (mean, se, n) = monte_carlo_vec(n_paths, |i| {
        let st = terminal_state(m, cfg, x0, seed, i)?;
        Ok(linalg::scale(st.bismut, f(st.x) / 2.0f64.sqrt()))
    })?;
    Ok(GradientEstimate { mean, se, n })
}

/// Derivative form of the same identity:
/// u_0^{-1} grad P_T f = E[ Q_T u_T^{-1} grad f(X_T) ],
/// taking the chart gradient of f (raised index) as input.
pub fn gradient_derivative_form<F>(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    grad_f: F,
    n_paths: usize,
    seed: u64,
) -> Result<GradientEstimate>
where
    F: Fn(Vec2) -> Vec2 + Sync,
{
    let (mean, se, n) = monte_carlo_vec(n_paths, |i| {
        let st = terminal_state(m, cfg, x0, seed, i)?;
        let g = m.metric_raw(st.x);
        let gf = grad_f(st.x);
        // frame coordinates of grad f: c_a = <grad f, e_a>_g
        let mut c = [0.0f64; 2];
        for a in 0..m.dim {
            let e = [st.frame[0][a], st.frame[1][a]];
            c[a] = linalg::inner(&g, gf, e);
        }
        Ok(linalg::mat_vec(&st.q, c))
    })?;
    Ok(GradientEstimate { mean, se, n })
}

/// Common-random-numbers central difference of P_T f along a direction
/// `v` (chart vector, normalized to unit g-length internally).
pub fn gradient_fd_crn<F>(
    m: &ManifoldModel,
    cfg: &SdeConfig,
    x0: Vec2,
    v: Vec2,
    eps: f64,
    f: F,
    n_paths: usize,
    seed: u64,
) -> Result<MCEstimate>
where
    F: Fn(Vec2) -> f64 + Sync,
{
    let g = m.metric_raw(x0);
    let nv = linalg::norm(&g, v);
    if nv == 0.0 || eps <= 0.0 {
        return Err(CoreError::Precondition(
            "fd direction must be nonzero and eps > 0".into(),
        ));
    }
    let u = linalg::scale(v, 1.0 / nv);
    let xp = linalg::axpy(x0, eps, u);
    let xm = linalg::axpy(x0, -eps, u);
    if !m.contains(xp) || !m.contains(xm) {
        return Err(CoreError::Precondition(
            "fd stencil leaves the domain; reduce eps or move x0".into(),
        ));
    }
    monte_carlo(n_paths, |i| {
        let a = f(terminal_state(m, cfg, xp, seed, i)?.x);
        let b = f(terminal_state(m, cfg, xm, seed, i)?.x);
        Ok((a - b) / (2.0 * eps))
    })
}

/// Hard cap on ensemble size for the exact assignment solver.
pub const ASSIGNMENT_MAX: usize = 2048;

/// Exact minimum-cost assignment (Jonker-Volgenant shortest augmenting
/// paths). `cost[i][j]` square; returns (total cost, column of each row).
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Result<(f64, Vec<usize>)> {
    let n = cost.len();
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    if n > ASSIGNMENT_MAX {
        return Err(CoreError::Capacity {
            n,
            max: ASSIGNMENT_MAX,
        });
    }
    for row in cost {
        if row.len() != n {
            return Err(CoreError::Precondition("cost matrix must be square".into()));
        }
        if row.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::Numeric("non-finite assignment cost".into()));
        }
    }
    // dual potentials u (rows), v (columns); p[j] = row matched to
    // column j, with a virtual column n seeding each augmentation
    let mut pot_u = vec![0.0f64; n + 1];
    let mut pot_v = vec![0.0f64; n + 1];
    let mut p = vec![usize::MAX; n + 1];
    for i in 0..n {
        p[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut way = vec![n; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0][j] - pot_u[i0] - pot_v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    pot_u[p[j]] += delta;
                    pot_v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == usize::MAX {
                break;
            }
        }
        // walk back the alternating path
        while j0 != n {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }
    let mut col_of = vec![usize::MAX; n];
    for (j, &pi) in p.iter().enumerate().take(n) {
        if pi != usize::MAX {
            col_of[pi] = j;
        }
    }
    let total = (0..n).map(|i| cost[i][col_of[i]]).sum();
    Ok((total, col_of))
}

/// Empirical 2-Wasserstein distance between equal-size point clouds under
/// the model's geodesic distance.
pub fn empirical_w2(m: &ManifoldModel, xs: &[Vec2], ys: &[Vec2]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(CoreError::Precondition(
            "W2 needs two nonempty clouds of equal size".into(),
        ));
    }
    let cost: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| {
                    let d = m.distance_g(*x, *y);
                    d * d
                })
                .collect()
        })
        .collect();
    let (total, _) = min_cost_assignment(&cost)?;
    Ok((total / xs.len() as f64).sqrt())
}

/// Sup-distance between two stored paths: sup_s d_g(x_s, y_s).
pub fn path_sup_distance(m: &ManifoldModel, a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| m.distance_g(*x, *y))
        .fold(0.0, f64::max)
}

/// Empirical W2 on path space with the uniform metric
/// rho_inf(x, y) = sup_s d_g(x_s, y_s).
pub fn pathspace_w2_sup(
    m: &ManifoldModel,
    xs: &[Vec<Vec2>],
    ys: &[Vec<Vec2>],
) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(CoreError::Precondition(
            "path-space W2 needs two nonempty ensembles of equal size".into(),
        ));
    }
    let cost: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| {
                    let d = path_sup_distance(m, x, y);
                    d * d
                })
                .collect()
        })
        .collect();
    let (total, _) = min_cost_assignment(&cost)?;
    Ok((total / xs.len() as f64).sqrt())
}

/// Relative entropy of a Girsanov tilt with drift beta(s) in frame
/// coordinates: H = (1/2) int |beta|^2 ds for noise coefficient sqrt(2)
/// ... the driving Brownian motion is standard, so the usual formula
/// applies to the shift of B itself.
pub fn entropy_of_tilt(beta_sq_integral: f64) -> f64 {
    0.5 * beta_sq_integral
}
