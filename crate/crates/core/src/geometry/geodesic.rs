//! Boundary-value geodesics and parallel transport, for the chart metric g
//! and for its conformal rescaling g' = phi^{-2} g.
//!
//! The geodesic ODE is integrated with classical RK4 on the affine
//! parameter [0, 1]; the boundary-value problem is solved by shooting with a
//! finite-difference Newton step and step-halving fallback. Transport is the
//! parallel frame integrated along the solved geodesic, then projected onto
//! the exact isometry group of the two endpoint metrics.

use crate::error::{CoreError, Result};
use crate::linalg::{self, Mat2, Vec2, IDENT, ZERO_M};

use super::{Family, ManifoldModel};

pub const SHOOTING_MAX_ITER: usize = 200;

/// Supplies log(phi) and its gradient for the conformal metric. The phi
/// module implements this; geometry stays independent of the construction.
pub trait ConformalFactor: Sync {
    fn log_phi(&self, m: &ManifoldModel, x: Vec2) -> f64;
    /// Gradient of log(phi) as a chart vector (index raised with g).
    fn grad_log_phi(&self, m: &ManifoldModel, x: Vec2) -> Vec2;
}

#[derive(Clone, Copy)]
pub enum MetricTag<'a> {
    G,
    GPrime(&'a dyn ConformalFactor),
}

impl<'a> MetricTag<'a> {
    pub fn metric_at(&self, m: &ManifoldModel, x: Vec2) -> Mat2 {
        let g = m.metric_raw(x);
        match self {
            MetricTag::G => g,
            MetricTag::GPrime(cf) => {
                let f = (-2.0 * cf.log_phi(m, x)).exp();
                linalg::mat_scale(&g, f)
            }
        }
    }

    /// Christoffel symbols of the selected metric. For g' they are
    /// assembled from the analytic gradient of log(phi):
    /// Gamma'^k_ij = Gamma^k_ij - d^k_i w_j - d^k_j w_i + g_ij w^k,
    /// with w = log(phi).
    pub fn christoffel_at(&self, m: &ManifoldModel, x: Vec2) -> [[[f64; 2]; 2]; 2] {
        let gamma = m.christoffel_at(x);
        match self {
            MetricTag::G => gamma,
            MetricTag::GPrime(cf) => {
                let g = m.metric_raw(x);
                let wv = cf.grad_log_phi(m, x); // raised
                let wc = linalg::mat_vec(&g, wv); // lowered
                let mut out = gamma;
                let d = m.dim;
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            let mut corr = 0.0;
                            if k == i {
                                corr -= wc[j];
                            }
                            if k == j {
                                corr -= wc[i];
                            }
                            corr += g[i][j] * wv[k];
                            out[k][i][j] += corr;
                        }
                    }
                }
                out
            }
        }
    }
}

/// Result of a solved boundary-value geodesic.
#[derive(Clone, Copy, Debug)]
pub struct Geodesic {
    /// Length in the selected metric.
    pub distance: f64,
    /// Parallel transport T_x -> T_y, chart components, exactly isometric.
    pub transport: Mat2,
    /// Initial velocity (affine parameter on [0, 1]).
    pub v_start: Vec2,
    /// Arrival velocity at y.
    pub v_end: Vec2,
}

/// Metric data in the coordinates the shooting loop integrates in. The
/// polar chart of the sphere cap degenerates at the pole (an interior
/// point), so the cap is shot in an azimuthal-equidistant chart instead;
/// every other family uses its model chart directly.
trait ChartMetric {
    fn dim(&self) -> usize;
    fn scale(&self) -> f64;
    fn metric(&self, x: Vec2) -> Mat2;
    fn christoffel(&self, x: Vec2) -> [[[f64; 2]; 2]; 2];
}

/// The model chart with closed-form Christoffel symbols.
struct ModelChart<'a> {
    m: &'a ManifoldModel,
    tag: MetricTag<'a>,
}

impl ChartMetric for ModelChart<'_> {
    fn dim(&self) -> usize {
        self.m.dim
    }
    fn scale(&self) -> f64 {
        self.m.domain_scale
    }
    fn metric(&self, x: Vec2) -> Mat2 {
        self.tag.metric_at(self.m, x)
    }
    fn christoffel(&self, x: Vec2) -> [[[f64; 2]; 2]; 2] {
        self.tag.christoffel_at(self.m, x)
    }
}

/// Azimuthal-equidistant chart for the sphere cap:
/// u = (phi cos lambda, phi sin lambda). Smooth across the pole, where
/// the polar chart metric is singular. Christoffel symbols come from
/// central differences of the closed-form metric.
struct CapChart<'a> {
    m: &'a ManifoldModel,
    tag: MetricTag<'a>,
    a2: f64,
}

fn cap_to_cart(p: Vec2) -> Vec2 {
    let (s, c) = p[1].sin_cos();
    [p[0] * c, p[0] * s]
}

/// Jacobian d(cart)/d(polar) at the polar point p.
fn cap_jacobian(p: Vec2) -> Mat2 {
    let (s, c) = p[1].sin_cos();
    [[c, -p[0] * s], [s, p[0] * c]]
}

impl CapChart<'_> {
    fn to_polar(&self, u: Vec2) -> Vec2 {
        [u[0].hypot(u[1]), u[1].atan2(u[0])]
    }
}

impl ChartMetric for CapChart<'_> {
    fn dim(&self) -> usize {
        2
    }
    fn scale(&self) -> f64 {
        self.m.domain_scale
    }
    fn metric(&self, u: Vec2) -> Mat2 {
        let r2 = u[0] * u[0] + u[1] * u[1];
        // s = sin^2(r)/r^2 and q = (r^2 - sin^2(r))/r^4, with series
        // near the pole where the direct formulas lose precision.
        let (s, q) = if r2 < 1e-8 {
            (
                1.0 - r2 / 3.0 + 2.0 * r2 * r2 / 45.0,
                1.0 / 3.0 - 2.0 * r2 / 45.0,
            )
        } else {
            let s2 = r2.sqrt().sin().powi(2);
            (s2 / r2, (r2 - s2) / (r2 * r2))
        };
        let f = match &self.tag {
            MetricTag::G => self.a2,
            MetricTag::GPrime(cf) => {
                let w = cf.log_phi(self.m, self.to_polar(u));
                self.a2 * (-2.0 * w).exp()
            }
        };
        [
            [f * (s + q * u[0] * u[0]), f * q * u[0] * u[1]],
            [f * q * u[0] * u[1], f * (s + q * u[1] * u[1])],
        ]
    }
    fn christoffel(&self, u: Vec2) -> [[[f64; 2]; 2]; 2] {
        let h = 1e-5;
        let mut dg = [ZERO_M; 2]; // dg[l][i][j] = partial_l g_ij
        for l in 0..2 {
            let mut up = u;
            let mut um = u;
            up[l] += h;
            um[l] -= h;
            let gp = self.metric(up);
            let gm = self.metric(um);
            for i in 0..2 {
                for j in 0..2 {
                    dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                }
            }
        }
        let ginv = linalg::inverse(&self.metric(u), 2);
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                    out[k][i][j] = s;
                }
            }
        }
        out
    }
}

fn accel<C: ChartMetric>(c: &C, x: Vec2, v: Vec2) -> Vec2 {
    let gamma = c.christoffel(x);
    let d = c.dim();
    let mut a = [0.0; 2];
    for k in 0..d {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += gamma[k][i][j] * v[i] * v[j];
            }
        }
        a[k] = -s;
    }
    a
}

/// One RK4 step of the geodesic system.
fn rk4_step<C: ChartMetric>(c: &C, x: Vec2, v: Vec2, h: f64) -> (Vec2, Vec2) {
    let (k1x, k1v) = (v, accel(c, x, v));
    let (k2x, k2v) = {
        let xm = linalg::axpy(x, 0.5 * h, k1x);
        let vm = linalg::axpy(v, 0.5 * h, k1v);
        (vm, accel(c, xm, vm))
    };
    let (k3x, k3v) = {
        let xm = linalg::axpy(x, 0.5 * h, k2x);
        let vm = linalg::axpy(v, 0.5 * h, k2v);
        (vm, accel(c, xm, vm))
    };
    let (k4x, k4v) = {
        let xe = linalg::axpy(x, h, k3x);
        let ve = linalg::axpy(v, h, k3v);
        (ve, accel(c, xe, ve))
    };
    let xn = [
        x[0] + h / 6.0 * (k1x[0] + 2.0 * k2x[0] + 2.0 * k3x[0] + k4x[0]),
        x[1] + h / 6.0 * (k1x[1] + 2.0 * k2x[1] + 2.0 * k3x[1] + k4x[1]),
    ];
    let vn = [
        v[0] + h / 6.0 * (k1v[0] + 2.0 * k2v[0] + 2.0 * k3v[0] + k4v[0]),
        v[1] + h / 6.0 * (k1v[1] + 2.0 * k2v[1] + 2.0 * k3v[1] + k4v[1]),
    ];
    (xn, vn)
}

fn n_steps(dist_guess: f64) -> usize {
    (16.0 + 12.0 * dist_guess).clamp(16.0, 160.0) as usize
}

/// Exponential map at affine time 1: integrate the geodesic from (x, v).
pub fn exp_map(m: &ManifoldModel, tag: &MetricTag, x: Vec2, v: Vec2, steps: usize) -> (Vec2, Vec2) {
    exp_map_in(&ModelChart { m, tag: *tag }, x, v, steps)
}

fn exp_map_in<C: ChartMetric>(c: &C, x: Vec2, v: Vec2, steps: usize) -> (Vec2, Vec2) {
    let h = 1.0 / steps as f64;
    let (mut xc, mut vc) = (x, v);
    for _ in 0..steps {
        let (xn, vn) = rk4_step(c, xc, vc, h);
        xc = xn;
        vc = vn;
    }
    (xc, vc)
}

/// Solve the boundary-value geodesic from `x` to `y` and transport a frame.
pub fn geodesic_and_transport(
    m: &ManifoldModel,
    tag: &MetricTag,
    x: Vec2,
    y: Vec2,
) -> Result<Geodesic> {
    let guess = linalg::sub(y, x);
    shoot_with_guess(m, tag, x, y, guess)
}

/// Same as [`geodesic_and_transport`] with a caller-provided initial
/// velocity (warm start for per-step coupling use). A failed warm start
/// falls back to the straight-chart-line guess before giving up.
pub fn shoot_with_guess(
    m: &ManifoldModel,
    tag: &MetricTag,
    x: Vec2,
    y: Vec2,
    guess: Vec2,
) -> Result<Geodesic> {
    if let Family::SphereCap { .. } = m.family {
        let chart = CapChart { m, tag: *tag, a2: m.domain_scale * m.domain_scale };
        let xc = cap_to_cart(x);
        let yc = cap_to_cart(y);
        let gc = linalg::mat_vec(&cap_jacobian(x), guess);
        let geo = shoot_in(&chart, xc, yc, gc)
            .or_else(|_| shoot_in(&chart, xc, yc, linalg::sub(yc, xc)))?;
        // convert chart components back to the polar chart at the endpoints
        let jx = cap_jacobian(x);
        let jy_inv = linalg::inverse(&cap_jacobian(y), 2);
        let transport = linalg::mat_mul(&jy_inv, &linalg::mat_mul(&geo.transport, &jx));
        return Ok(Geodesic {
            distance: geo.distance,
            transport,
            v_start: linalg::mat_vec(&linalg::inverse(&jx, 2), geo.v_start),
            v_end: linalg::mat_vec(&jy_inv, geo.v_end),
        });
    }
    let chart = ModelChart { m, tag: *tag };
    shoot_in(&chart, x, y, guess)
        .or_else(|_| shoot_in(&chart, x, y, linalg::sub(y, x)))
}

fn shoot_in<C: ChartMetric>(chart: &C, x: Vec2, y: Vec2, guess: Vec2) -> Result<Geodesic> {
    let d = chart.dim();
    let gx = chart.metric(x);
    let gy = chart.metric(y);
    let chart_sep = linalg::norm(&IDENT, linalg::sub(y, x));
    if chart_sep < 1e-13 * (1.0 + chart.scale()) {
        return Ok(Geodesic {
            distance: 0.0,
            transport: IDENT,
            v_start: [0.0; 2],
            v_end: [0.0; 2],
        });
    }

    let mut v = guess;
    if linalg::dot(v, v) == 0.0 || !v[0].is_finite() || !v[1].is_finite() {
        v = linalg::sub(y, x);
    }
    let steps = n_steps(linalg::norm(&gx, v));
    let mut best_res = f64::INFINITY;
    let mut iters = 0usize;
    loop {
        let (end, _) = exp_map_in(chart, x, v, steps);
        let res_v = linalg::sub(end, y);
        let mut res = (res_v[0].powi(2) + res_v[1].powi(2)).sqrt();
        if !res.is_finite() {
            // the guess integrates out of the chart's numeric range;
            // shrink toward zero velocity until the endpoint is finite
            res = f64::INFINITY;
        }
        if res < 1e-11 * (1.0 + chart.scale()) {
            break;
        }
        if iters >= SHOOTING_MAX_ITER {
            return Err(CoreError::Convergence {
                what: "geodesic shooting",
                iters,
                residual: res,
            });
        }
        if res.is_infinite() {
            v = linalg::scale(v, 0.5);
            iters += 1;
            continue;
        }
        // finite-difference Jacobian of the endpoint map
        let eps = 1e-6 * (1.0 + linalg::dot(v, v).sqrt());
        let mut jac = ZERO_M;
        for c in 0..d {
            let mut vp = v;
            vp[c] += eps;
            let (endp, _) = exp_map_in(chart, x, vp, steps);
            for r in 0..d {
                jac[r][c] = (endp[r] - end[r]) / eps;
            }
        }
        if d == 1 {
            jac[1][1] = 1.0;
        }
        let delta = linalg::solve(&jac, res_v, d);
        // step halving if the full Newton step does not decrease the residual
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let vt = linalg::axpy(v, -lambda, delta);
            let (et, _) = exp_map_in(chart, x, vt, steps);
            let rt = {
                let rv = linalg::sub(et, y);
                let r = (rv[0].powi(2) + rv[1].powi(2)).sqrt();
                if r.is_finite() {
                    r
                } else {
                    f64::INFINITY
                }
            };
            if rt < res {
                v = vt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            if res >= best_res {
                return Err(CoreError::Convergence {
                    what: "geodesic shooting",
                    iters,
                    residual: res,
                });
            }
            best_res = res;
        }
        iters += 1;
    }

    // transport the coordinate frame along the solved geodesic
    let h = 1.0 / steps as f64;
    let (mut xc, mut vc) = (x, v);
    let mut p = IDENT;
    for _ in 0..steps {
        // parallel transport RK4 synchronized with the position update
        let cols: Vec<Vec2> = (0..2).map(|a| [p[0][a], p[1][a]]).collect();
        let mut new_cols = cols.clone();
        for (a, col) in cols.iter().enumerate() {
            if a >= d {
                continue;
            }
            let f = |xs: Vec2, vs: Vec2, w: Vec2| -> Vec2 {
                let gamma = chart.christoffel(xs);
                let mut out = [0.0; 2];
                for k in 0..d {
                    let mut s = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            s += gamma[k][i][j] * vs[i] * w[j];
                        }
                    }
                    out[k] = -s;
                }
                out
            };
            let (k1x, k1v) = (vc, accel(chart, xc, vc));
            let w1 = f(xc, vc, *col);
            let xm = linalg::axpy(xc, 0.5 * h, k1x);
            let vm = linalg::axpy(vc, 0.5 * h, k1v);
            let w2 = f(xm, vm, linalg::axpy(*col, 0.5 * h, w1));
            let w3 = f(xm, vm, linalg::axpy(*col, 0.5 * h, w2));
            let xe = linalg::axpy(xc, h, k1x);
            let ve = linalg::axpy(vc, h, k1v);
            let w4 = f(xe, ve, linalg::axpy(*col, h, w3));
            new_cols[a] = [
                col[0] + h / 6.0 * (w1[0] + 2.0 * w2[0] + 2.0 * w3[0] + w4[0]),
                col[1] + h / 6.0 * (w1[1] + 2.0 * w2[1] + 2.0 * w3[1] + w4[1]),
            ];
        }
        for a in 0..2 {
            p[0][a] = new_cols[a][0];
            p[1][a] = new_cols[a][1];
        }
        let (xn, vn) = rk4_step(chart, xc, vc, h);
        xc = xn;
        vc = vn;
    }

    let transport = project_isometry(&p, &gx, &gy, d);
    Ok(Geodesic {
        distance: linalg::norm(&gx, v),
        transport,
        v_start: v,
        v_end: vc,
    })
}

/// Project P onto the set of exact (gx -> gy)-isometries: with
/// Gx = Lx Lx^T, Gy = Ly Ly^T, the matrix B = Ly^T P Lx^{-T} is made
/// orthogonal by polar decomposition and mapped back.
fn project_isometry(p: &Mat2, gx: &Mat2, gy: &Mat2, dim: usize) -> Mat2 {
    if dim == 1 {
        let s = (gx[0][0] / gy[0][0]).sqrt();
        let mut out = IDENT;
        out[0][0] = if p[0][0] >= 0.0 { s } else { -s };
        return out;
    }
    let lx = chol(gx);
    let ly = chol(gy);
    let lx_it = inv_lower_t(&lx); // Lx^{-T}, upper triangular
    let b = linalg::mat_mul(&linalg::transpose(&ly), &linalg::mat_mul(p, &lx_it));
    let q = polar_orth(&b);
    // P = Ly^{-T} Q Lx^T
    let ly_it = inv_lower_t(&ly);
    linalg::mat_mul(&ly_it, &linalg::mat_mul(&q, &linalg::transpose(&lx)))
}

fn chol(g: &Mat2) -> Mat2 {
    let l00 = g[0][0].sqrt();
    let l10 = g[1][0] / l00;
    let l11 = (g[1][1] - l10 * l10).sqrt();
    [[l00, 0.0], [l10, l11]]
}

/// Inverse transpose of a lower-triangular 2x2 matrix.
fn inv_lower_t(l: &Mat2) -> Mat2 {
    let a = 1.0 / l[0][0];
    let c = 1.0 / l[1][1];
    // L^{-1} = [[a, 0], [-l10*a*c, c]]; transpose it
    [[a, -l[1][0] * a * c], [0.0, c]]
}

/// Nearest orthogonal matrix (2x2 polar factor).
fn polar_orth(b: &Mat2) -> Mat2 {
    // For 2x2: Q = (B + sign(det B) adj(B)^T) normalized columns via
    // the closed form Q = (B + s*J B J^T)/norm with J = rot90.
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let s = if det >= 0.0 { 1.0 } else { -1.0 };
    let m = [
        [b[0][0] + s * b[1][1], b[0][1] - s * b[1][0]],
        [b[1][0] - s * b[0][1], b[1][1] + s * b[0][0]],
    ];
    let n0 = (m[0][0].powi(2) + m[1][0].powi(2)).sqrt();
    [[m[0][0] / n0, -s * m[1][0] / n0], [m[1][0] / n0, s * m[0][0] / n0]]
}
