//! Model manifolds with boundary.
//!
//! Every family here is analytically tractable: metric, Christoffel symbols,
//! Ricci curvature, distance to the boundary and its Laplacian, and the
//! second fundamental form are all closed-form in chart coordinates. This is
//! what makes the downstream inequality checks certifiable rather than
//! merely plausible.
//!
//! Chart conventions per family:
//! - `HalfLine`: x >= 0 on the real line, flat.
//! - `HalfPlane`: (x, y) with y >= 0, flat.
//! - `DiskExterior { radius }`: Cartesian plane minus the open disk,
//!   boundary circle of the given radius; the boundary is concave seen from
//!   the domain (II = -1/R).
//! - `Annulus { r_in, r_out }`: flat ring; the inner circle is the
//!   non-convex boundary component.
//! - `SphereCap { k, alpha }`: round sphere of curvature k in polar chart
//!   (phi_pol, lambda), domain phi_pol <= alpha. For alpha > pi/2 the cap is
//!   more than a hemisphere and its boundary is non-convex.
//! - `HyperbolicBand { curv, width }`: hyperbolic plane of curvature -curv^2
//!   in Fermi coordinates (s, t) about a geodesic, domain t >= width. The
//!   boundary equidistant curve is non-convex from this side.

pub mod geodesic;

pub use geodesic::{geodesic_and_transport, ConformalFactor, Geodesic, MetricTag};

use crate::error::{CoreError, Result};
use crate::linalg::{self, Mat2, Vec2, IDENT, ZERO_M, ZERO_V};
use serde::{Deserialize, Serialize};

/// Relative tolerance for "is this point on the boundary" checks.
pub const TOL_BOUNDARY_REL: f64 = 1e-9;

/// Tolerance for transport isometry checks.
pub const TOL_TRANSPORT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    HalfLine,
    HalfPlane,
    DiskExterior { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    SphereCap { k: f64, alpha: f64 },
    HyperbolicBand { curv: f64, width: f64 },
}

/// Drift vector field Z in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Drift {
    Zero,
    /// Z(x) = A x (chart-linear; only meaningful on the flat families).
    Linear { a: [[f64; 2]; 2] },
}

#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub x: Vec2,
}

#[derive(Clone, Copy, Debug)]
pub struct TangentVector {
    pub base: Vec2,
    pub v: Vec2,
}

/// A model manifold-with-boundary carrying all certified curvature data.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    pub family: Family,
    pub dim: usize,
    pub drift: Drift,
    /// Upper bound k > 0 on sectional curvature used for the comparison
    /// function h (flat and hyperbolic families certify with a user-chosen
    /// positive k).
    pub sect_bound: f64,
    /// Lower bound on Ric^Z = Ric - sym(grad Z).
    pub ric_bound: f64,
    /// (sigma, theta) with -sigma <= II <= theta.
    pub ii_bounds: (f64, f64),
    /// Collar radius of Assumption-style smoothness for rho_boundary.
    pub r0: f64,
    /// Characteristic length used for relative tolerances.
    pub domain_scale: f64,
}

impl ManifoldModel {
    /// Build a model. `theta_override` and `k_cert` may strengthen the
    /// stored bounds; they are validated against the closed-form values.
    pub fn new(
        family: Family,
        drift: Drift,
        r0: f64,
        theta_override: Option<f64>,
        k_cert: Option<f64>,
    ) -> Result<Self> {
        let dim = match family {
            Family::HalfLine => 1,
            _ => 2,
        };
        if let Drift::Linear { .. } = drift {
            if !family_is_flat(family) {
                return Err(CoreError::Config(vec![
                    "linear drift is only supported on the flat families".into(),
                ]));
            }
        }
        let (sigma, theta_cf, sect_cf, scale, inj) = match family {
            Family::HalfLine => (0.0, 0.0, 0.0, 1.0, f64::INFINITY),
            Family::HalfPlane => (0.0, 0.0, 0.0, 1.0, f64::INFINITY),
            Family::DiskExterior { radius } => {
                if radius <= 0.0 {
                    return Err(CoreError::Config(vec!["disk radius must be > 0".into()]));
                }
                (1.0 / radius, 0.0, 0.0, radius, f64::INFINITY)
            }
            Family::Annulus { r_in, r_out } => {
                if !(0.0 < r_in && r_in < r_out) {
                    return Err(CoreError::Config(vec![
                        "annulus requires 0 < r_in < r_out".into(),
                    ]));
                }
                (
                    1.0 / r_in,
                    1.0 / r_out,
                    0.0,
                    r_out - r_in,
                    0.5 * (r_out - r_in),
                )
            }
            Family::SphereCap { k, alpha } => {
                if k <= 0.0 || !(0.0 < alpha && alpha < std::f64::consts::PI) {
                    return Err(CoreError::Config(vec![
                        "sphere cap requires k > 0 and 0 < alpha < pi".into(),
                    ]));
                }
                let ii = k.sqrt() * (alpha.cos() / alpha.sin());
                let a = 1.0 / k.sqrt();
                ((-ii).max(0.0), ii.max(0.0), k, a, a * alpha)
            }
            Family::HyperbolicBand { curv, width } => {
                if curv <= 0.0 || width <= 0.0 {
                    return Err(CoreError::Config(vec![
                        "hyperbolic band requires curv > 0 and width > 0".into(),
                    ]));
                }
                (curv * (curv * width).tanh(), 0.0, 0.0, 1.0 / curv, f64::INFINITY)
            }
        };
        let theta = match theta_override {
            Some(t) => {
                if t < theta_cf {
                    return Err(CoreError::Config(vec![format!(
                        "theta = {t} below the family's supremum of II ({theta_cf})"
                    )]));
                }
                t
            }
            None => theta_cf,
        };
        let sect_bound = match k_cert {
            Some(k) => {
                if k < sect_cf || k <= 0.0 {
                    return Err(CoreError::Config(vec![format!(
                        "certification k = {k} must be positive and >= the sectional bound {sect_cf}"
                    )]));
                }
                k
            }
            None => {
                if sect_cf > 0.0 {
                    sect_cf
                } else {
                    1.0
                }
            }
        };
        if r0 <= 0.0 || r0 > inj {
            return Err(CoreError::Config(vec![format!(
                "r0 = {r0} must lie in (0, {inj}] for this family"
            )]));
        }
        let ric_z = ric_z_lower_bound(family, drift);
        Ok(ManifoldModel {
            family,
            dim,
            drift,
            sect_bound,
            ric_bound: ric_z,
            ii_bounds: (sigma, theta),
            r0,
            domain_scale: scale,
        })
    }

    /// True when the chart metric is the identity everywhere, so parallel
    /// transport of chart vectors is trivial.
    pub fn chart_is_euclidean(&self) -> bool {
        matches!(
            self.family,
            Family::HalfLine
                | Family::HalfPlane
                | Family::DiskExterior { .. }
                | Family::Annulus { .. }
        )
    }

    pub fn tol_boundary(&self) -> f64 {
        TOL_BOUNDARY_REL * self.domain_scale
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.boundary_distance(x).0 >= -self.tol_boundary()
    }

    fn check_domain(&self, x: Vec2) -> Result<()> {
        let rho = self.boundary_distance(x).0;
        if rho < -self.tol_boundary() {
            Err(CoreError::DomainViolation { rho })
        } else {
            Ok(())
        }
    }

    /// Chart validity (independent of the boundary): coordinate
    /// singularities of the chart itself.
    pub fn chart_valid(&self, x: Vec2) -> bool {
        match self.family {
            Family::SphereCap { .. } => x[0] > 0.0 && x[0] < std::f64::consts::PI,
            Family::DiskExterior { .. } | Family::Annulus { .. } => {
                x[0].hypot(x[1]) > 1e-12
            }
            _ => true,
        }
    }

    /// Map chart coordinates to a canonical representative of the same
    /// manifold point. On the sphere cap a step can overshoot through the
    /// pole (an interior point that the polar chart degenerates at); the
    /// physical point has phi reflected and the longitude shifted by pi.
    pub fn canonicalize(&self, x: Vec2) -> Vec2 {
        match self.family {
            Family::SphereCap { .. } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let mut phi = x[0].rem_euclid(two_pi);
                let mut lam = x[1].rem_euclid(two_pi);
                if phi > std::f64::consts::PI {
                    phi = two_pi - phi;
                    lam = (lam + std::f64::consts::PI).rem_euclid(two_pi);
                }
                [phi, lam]
            }
            _ => x,
        }
    }

    /// Shift the periodic coordinate of `y` to the representative nearest
    /// `anchor`, so chart differences stay small across the seam. The
    /// chart formulas are periodic, so the shifted point is equivalent.
    pub fn align_chart(&self, anchor: Vec2, y: Vec2) -> Vec2 {
        match self.family {
            Family::SphereCap { .. } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let mut out = y;
                out[1] = y[1] + two_pi * ((anchor[1] - y[1]) / two_pi).round();
                out
            }
            _ => y,
        }
    }

    pub fn metric_at(&self, x: Vec2) -> Result<Mat2> {
        self.check_domain(x)?;
        Ok(self.metric_raw(x))
    }

    /// Metric without the domain check (the SDE reflection step evaluates
    /// slightly outside the domain).
    pub fn metric_raw(&self, x: Vec2) -> Mat2 {
        match self.family {
            Family::HalfLine | Family::HalfPlane => IDENT,
            Family::DiskExterior { .. } | Family::Annulus { .. } => IDENT,
            Family::SphereCap { k, .. } => {
                let a2 = 1.0 / k;
                [[a2, 0.0], [0.0, a2 * x[0].sin().powi(2)]]
            }
            Family::HyperbolicBand { curv, .. } => {
                let c = (curv * x[1]).cosh();
                [[c * c, 0.0], [0.0, 1.0]]
            }
        }
    }

    /// Christoffel symbols Gamma^k_{ij}, indexed as out[k][i][j].
    pub fn christoffel_at(&self, x: Vec2) -> [[[f64; 2]; 2]; 2] {
        let mut g = [ZERO_M; 2];
        match self.family {
            Family::HalfLine
            | Family::HalfPlane
            | Family::DiskExterior { .. }
            | Family::Annulus { .. } => {}
            Family::SphereCap { .. } => {
                let (s, c) = x[0].sin_cos();
                let cot = c / s;
                // Gamma^phi_{ll} = -sin phi cos phi, Gamma^l_{phi l} = cot phi
                g[0][1][1] = -s * c;
                g[1][0][1] = cot;
                g[1][1][0] = cot;
            }
            Family::HyperbolicBand { curv, .. } => {
                let at = curv * x[1];
                let th = at.tanh();
                // Gamma^s_{st} = curv tanh, Gamma^t_{ss} = -curv cosh sinh
                g[0][0][1] = curv * th;
                g[0][1][0] = curv * th;
                g[1][0][0] = -curv * at.cosh() * at.sinh();
            }
        }
        g
    }

    /// Ricci tensor (lower indices). Constant-curvature in all families:
    /// Ric = (d-1) * K_sect * g.
    pub fn ricci_at(&self, x: Vec2) -> Mat2 {
        let kc = match self.family {
            Family::SphereCap { k, .. } => k,
            Family::HyperbolicBand { curv, .. } => -curv * curv,
            _ => 0.0,
        };
        if self.dim < 2 || kc == 0.0 {
            return ZERO_M;
        }
        linalg::mat_scale(&self.metric_raw(x), kc * (self.dim as f64 - 1.0))
    }

    pub fn drift_at(&self, x: Vec2) -> Vec2 {
        match self.drift {
            Drift::Zero => ZERO_V,
            Drift::Linear { a } => linalg::mat_vec(&a, x),
        }
    }

    /// Covariant derivative matrix (grad Z)^k_i = partial_i Z^k + Gamma^k_{ij} Z^j.
    pub fn drift_jacobian(&self, x: Vec2) -> Mat2 {
        match self.drift {
            Drift::Zero => ZERO_M,
            Drift::Linear { a } => {
                let gamma = self.christoffel_at(x);
                let z = self.drift_at(x);
                let mut out = a;
                for k in 0..self.dim {
                    for i in 0..self.dim {
                        for j in 0..self.dim {
                            out[k][i] += gamma[k][i][j] * z[j];
                        }
                    }
                }
                out
            }
        }
    }

    /// The Bakry-Emery form Ric^Z as a symmetric bilinear form with lower
    /// indices: Ric_ij - sym(g_ik (grad Z)^k_j).
    pub fn ricci_z_form(&self, x: Vec2) -> Mat2 {
        let ric = self.ricci_at(x);
        let g = self.metric_raw(x);
        let dz = self.drift_jacobian(x);
        // b_ij = g_ik dz^k_j
        let mut b = ZERO_M;
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    b[i][j] += g[i][k] * dz[k][j];
                }
            }
        }
        let mut out = ric;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i][j] -= 0.5 * (b[i][j] + b[j][i]);
            }
        }
        out
    }

    /// Ric^Z(v, v) for `v` normalized to unit g-length internally.
    pub fn ricci_z_at(&self, x: Vec2, v: Vec2) -> f64 {
        let g = self.metric_raw(x);
        let n = linalg::norm(&g, v);
        if n == 0.0 {
            return 0.0;
        }
        let u = linalg::scale(v, 1.0 / n);
        let form = self.ricci_z_form(x);
        linalg::inner(&form, u, u)
    }

    /// Minimum of Ric^Z over unit tangent vectors at x.
    pub fn ricci_z_min(&self, x: Vec2) -> f64 {
        let form = self.ricci_z_form(x);
        let g = self.metric_raw(x);
        linalg::min_gen_eigenvalue(&form, &g, self.dim)
    }

    /// Signed Riemannian distance to the boundary (negative outside the
    /// domain) together with the inward unit gradient, as a chart vector.
    pub fn boundary_distance(&self, x: Vec2) -> (f64, Vec2) {
        match self.family {
            Family::HalfLine => (x[0], [1.0, 0.0]),
            Family::HalfPlane => (x[1], [0.0, 1.0]),
            Family::DiskExterior { radius } => {
                let r = x[0].hypot(x[1]);
                (r - radius, [x[0] / r, x[1] / r])
            }
            Family::Annulus { r_in, r_out } => {
                let r = x[0].hypot(x[1]);
                let inner = r - r_in;
                let outer = r_out - r;
                if inner <= outer {
                    (inner, [x[0] / r, x[1] / r])
                } else {
                    (outer, [-x[0] / r, -x[1] / r])
                }
            }
            Family::SphereCap { k, alpha } => {
                let a = 1.0 / k.sqrt();
                // grad rho = -(1/a) d_phi (index-raised; unit length)
                (a * (alpha - x[0]), [-1.0 / a, 0.0])
            }
            Family::HyperbolicBand { width, .. } => (x[1] - width, [0.0, 1.0]),
        }
    }

    /// Analytic Laplacian of the distance-to-boundary function.
    pub fn laplacian_boundary_distance(&self, x: Vec2) -> f64 {
        match self.family {
            Family::HalfLine | Family::HalfPlane => 0.0,
            Family::DiskExterior { .. } => {
                let r = x[0].hypot(x[1]);
                1.0 / r
            }
            Family::Annulus { r_in, r_out } => {
                let r = x[0].hypot(x[1]);
                if r - r_in <= r_out - r {
                    1.0 / r
                } else {
                    -1.0 / r
                }
            }
            Family::SphereCap { k, .. } => {
                -k.sqrt() * x[0].cos() / x[0].sin()
            }
            Family::HyperbolicBand { curv, .. } => curv * (curv * x[1]).tanh(),
        }
    }

    /// Second fundamental form II(u, u) for `x_bd` on the boundary and `u`
    /// a unit vector tangent to the boundary.
    pub fn second_fundamental_form(&self, x_bd: Vec2, u: Vec2) -> Result<f64> {
        let (rho, grad) = self.boundary_distance(x_bd);
        if rho.abs() > 100.0 * self.tol_boundary() {
            return Err(CoreError::Precondition(format!(
                "point not on boundary (rho = {rho:.3e})"
            )));
        }
        if self.dim == 1 {
            return Ok(0.0);
        }
        let g = self.metric_raw(x_bd);
        let nrm = linalg::inner(&g, grad, u).abs();
        if nrm > 1e-6 {
            return Err(CoreError::Precondition(
                "vector not tangent to the boundary".into(),
            ));
        }
        Ok(self.ii_value(x_bd))
    }

    /// Closed-form value of II at a boundary point (constant along each
    /// boundary component for every family here).
    pub fn ii_value(&self, x_bd: Vec2) -> f64 {
        match self.family {
            Family::HalfLine | Family::HalfPlane => 0.0,
            Family::DiskExterior { radius } => -1.0 / radius,
            Family::Annulus { r_in, r_out } => {
                let r = x_bd[0].hypot(x_bd[1]);
                if r - r_in <= r_out - r {
                    -1.0 / r_in
                } else {
                    1.0 / r_out
                }
            }
            Family::SphereCap { k, alpha } => k.sqrt() * alpha.cos() / alpha.sin(),
            Family::HyperbolicBand { curv, width } => -curv * (curv * width).tanh(),
        }
    }

    /// Shape-operator quadratic form at the boundary, lower indices:
    /// S(v, v) = II * <v, tau>^2 for tau the unit boundary tangent.
    /// Vanishes on the normal direction.
    pub fn ii_form_at(&self, x_bd: Vec2) -> Mat2 {
        if self.dim == 1 {
            return ZERO_M;
        }
        let (_, n) = self.boundary_distance(x_bd);
        let g = self.metric_raw(x_bd);
        // unit tangent: g-orthogonal complement of the unit normal
        let frame = linalg::gram_schmidt(&g, &[[n[0], -n[1]], [n[1], n[0]]], 2);
        let tau = [frame[0][1], frame[1][1]];
        let gt = linalg::mat_vec(&g, tau);
        let ii = self.ii_value(x_bd);
        let mut out = ZERO_M;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = ii * gt[i] * gt[j];
            }
        }
        out
    }

    /// Closed-form g-geodesic distance between two domain points (scenario
    /// design guarantees the minimizing geodesic stays in the domain).
    pub fn distance_g(&self, x: Vec2, y: Vec2) -> f64 {
        match self.family {
            Family::HalfLine => (x[0] - y[0]).abs(),
            Family::HalfPlane
            | Family::DiskExterior { .. }
            | Family::Annulus { .. } => (x[0] - y[0]).hypot(x[1] - y[1]),
            Family::SphereCap { k, .. } => {
                let a = 1.0 / k.sqrt();
                let c = x[0].cos() * y[0].cos()
                    + x[0].sin() * y[0].sin() * (x[1] - y[1]).cos();
                a * c.clamp(-1.0, 1.0).acos()
            }
            Family::HyperbolicBand { curv, .. } => {
                let (s1, t1) = (curv * x[0], curv * x[1]);
                let (s2, t2) = (curv * y[0], curv * y[1]);
                let ch = t1.cosh() * t2.cosh() * (s1 - s2).cosh() - t1.sinh() * t2.sinh();
                ch.max(1.0).acosh() / curv
            }
        }
    }

    /// Sample points covering the region of interest: a refined collar grid
    /// plus a bulk grid. Used by curvature-infimum and supremum scans.
    pub fn sample_grid(&self, n_collar: usize, n_bulk: usize) -> Vec<Vec2> {
        let mut pts = Vec::with_capacity(n_collar + n_bulk);
        let collar_depths: Vec<f64> = (0..n_collar)
            .map(|i| self.r0 * (i as f64 + 0.5) / n_collar as f64)
            .collect();
        match self.family {
            Family::HalfLine => {
                for &d in &collar_depths {
                    pts.push([d, 0.0]);
                }
                for i in 0..n_bulk {
                    pts.push([self.r0 + 4.0 * (i as f64 + 0.5) / n_bulk as f64, 0.0]);
                }
            }
            Family::HalfPlane => {
                for (j, &d) in collar_depths.iter().enumerate() {
                    pts.push([(j as f64 * 0.37).sin() * 2.0, d]);
                }
                for i in 0..n_bulk {
                    let y = self.r0 + 4.0 * (i as f64 + 0.5) / n_bulk as f64;
                    pts.push([(i as f64 * 0.61).cos() * 2.0, y]);
                }
            }
            Family::DiskExterior { radius } => {
                for (j, &d) in collar_depths.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5)
                        / n_collar.max(1) as f64;
                    let r = radius + d;
                    pts.push([r * th.cos(), r * th.sin()]);
                }
                for i in 0..n_bulk {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.25)
                        / n_bulk.max(1) as f64;
                    let r = radius + self.r0 + 3.0 * radius * (i as f64 + 0.5)
                        / n_bulk as f64;
                    pts.push([r * th.cos(), r * th.sin()]);
                }
            }
            Family::Annulus { r_in, r_out } => {
                for (j, &d) in collar_depths.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5)
                        / n_collar.max(1) as f64;
                    // collar at the non-convex inner boundary
                    pts.push([(r_in + d) * th.cos(), (r_in + d) * th.sin()]);
                }
                for i in 0..n_bulk {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.25)
                        / n_bulk.max(1) as f64;
                    let r = r_in + (r_out - r_in) * (i as f64 + 0.5) / n_bulk as f64;
                    pts.push([r * th.cos(), r * th.sin()]);
                }
            }
            Family::SphereCap { k, alpha } => {
                let a = 1.0 / k.sqrt();
                for &d in &collar_depths {
                    pts.push([alpha - d / a, 0.0]);
                }
                for i in 0..n_bulk {
                    let phi = 0.05 + (alpha - self.r0 / a - 0.05).max(0.0)
                        * (i as f64 + 0.5)
                        / n_bulk as f64;
                    pts.push([phi, 0.0]);
                }
            }
            Family::HyperbolicBand { width, .. } => {
                for &d in &collar_depths {
                    pts.push([0.0, width + d]);
                }
                for i in 0..n_bulk {
                    let t = width + self.r0 + 3.0 * (i as f64 + 0.5) / n_bulk as f64;
                    pts.push([(i as f64 * 0.41).sin(), t]);
                }
            }
        }
        pts
    }

    /// Supremum of |Z| over the collar of depth `r1` (10x refined grid;
    /// closed form for the zero drift).
    pub fn drift_sup_collar(&self, r1: f64) -> f64 {
        if let Drift::Zero = self.drift {
            return 0.0;
        }
        let saved = self.r0;
        let mut m = self.clone();
        m.r0 = r1.min(saved);
        m.sample_grid(2000, 0)
            .into_iter()
            .map(|x| {
                let g = m.metric_raw(x);
                linalg::norm(&g, m.drift_at(x))
            })
            .fold(0.0, f64::max)
    }
}

fn family_is_flat(f: Family) -> bool {
    matches!(
        f,
        Family::HalfLine
            | Family::HalfPlane
            | Family::DiskExterior { .. }
            | Family::Annulus { .. }
    )
}

fn ric_z_lower_bound(family: Family, drift: Drift) -> f64 {
    let ric = match family {
        Family::SphereCap { k, .. } => k,
        Family::HyperbolicBand { curv, .. } => -curv * curv,
        _ => 0.0,
    };
    match drift {
        Drift::Zero => ric,
        Drift::Linear { a } => {
            // flat families only: Ric^Z = -sym(A); constant over the chart
            let sym = [
                [-a[0][0], -0.5 * (a[0][1] + a[1][0])],
                [-0.5 * (a[0][1] + a[1][0]), -a[1][1]],
            ];
            let tr = sym[0][0] + sym[1][1];
            let dt = sym[0][0] * sym[1][1] - sym[0][1] * sym[1][0];
            let disc = (tr * tr / 4.0 - dt).max(0.0).sqrt();
            ric + tr / 2.0 - disc
        }
    }
}


/// Families used across the internal test suites.
#[cfg(test)]
pub fn test_families() -> Vec<ManifoldModel> {
    vec![
        ManifoldModel::new(Family::HalfLine, Drift::Zero, 1.0, None, None).unwrap(),
        ManifoldModel::new(Family::HalfPlane, Drift::Zero, 1.0, None, None).unwrap(),
        ManifoldModel::new(Family::DiskExterior { radius: 2.0 }, Drift::Zero, 0.5, None, None)
            .unwrap(),
        ManifoldModel::new(
            Family::Annulus { r_in: 1.0, r_out: 3.0 },
            Drift::Zero,
            0.4,
            None,
            None,
        )
        .unwrap(),
        ManifoldModel::new(Family::SphereCap { k: 1.0, alpha: 2.0 }, Drift::Zero, 0.5, None, None)
            .unwrap(),
        ManifoldModel::new(
            Family::HyperbolicBand { curv: 1.0, width: 0.5 },
            Drift::Zero,
            0.6,
            Some(0.1),
            Some(0.25),
        )
        .unwrap(),
    ]
}
