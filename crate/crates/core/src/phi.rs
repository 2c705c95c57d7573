//! Construction of the boundary-taming conformal factor phi and the
//! curvature constants derived from it.
//!
//! Two constructions are provided: the smooth-modifier profile (the default)
//! and the older double-integral profile, plus the trivial phi = 1 for
//! convex boundaries. Both satisfy: inf phi = 1, N log phi = sigma on the
//! boundary, |grad log phi| <= sigma, and a quantified lower bound on
//! L log phi, which together yield the modified curvature constants that
//! feed every inequality check downstream.

use crate::error::{CoreError, Result};
use crate::geometry::{ConformalFactor, ManifoldModel};
use crate::linalg::{self, Vec2, ZERO_V};
use serde::{Deserialize, Serialize};

/// Comparison function h(t): the k >= 0 branch is
/// cos(sqrt(k) t) - (theta/sqrt(k)) sin(sqrt(k) t), the k < 0 branch its
/// hyperbolic analogue, and k = 0 is the continuous limit 1 - theta t.
pub fn h_eval(k: f64, theta: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if k.abs() < 1e-12 {
        1.0 - theta * t
    } else if k > 0.0 {
        let q = k.sqrt();
        (q * t).cos() - theta / q * (q * t).sin()
    } else {
        let q = (-k).sqrt();
        (q * t).cosh() - theta / q * (q * t).sinh()
    }
}

pub fn h_prime(k: f64, theta: f64, t: f64) -> f64 {
    if k.abs() < 1e-12 {
        -theta
    } else if k > 0.0 {
        let q = k.sqrt();
        -q * (q * t).sin() - theta * (q * t).cos()
    } else {
        let q = (-k).sqrt();
        q * (q * t).sinh() - theta * (q * t).cosh()
    }
}

/// First zero of h, or +infinity when h stays positive.
pub fn first_zero(k: f64, theta: f64) -> f64 {
    if k > 1e-12 {
        let t = (k / (k + theta * theta)).sqrt().asin() / k.sqrt();
        return polish_root(k, theta, t);
    }
    if k.abs() <= 1e-12 {
        return if theta > 0.0 { 1.0 / theta } else { f64::INFINITY };
    }
    // k < 0: h vanishes iff theta > sqrt(-k)
    let q = (-k).sqrt();
    if theta <= q {
        return f64::INFINITY;
    }
    let t = (q / theta).atanh() / q;
    polish_root(k, theta, t)
}

fn polish_root(k: f64, theta: f64, t0: f64) -> f64 {
    // a couple of Newton steps to push |h| below 1e-12
    let mut t = t0;
    for _ in 0..4 {
        let f = h_eval(k, theta, t);
        if f.abs() <= 1e-13 {
            break;
        }
        t -= f / h_prime(k, theta, t);
    }
    t
}

/// H(r) = integral of h from 0 to r /\ r1. Equivalent to the displayed
/// trigonometric closed form for k > 0 (H' = h, H(0) = 0) and continuous
/// through k = 0.
pub fn h_integral(k: f64, theta: f64, r1: f64, r: f64) -> f64 {
    let rho = r.min(r1);
    if k.abs() < 1e-12 {
        rho - 0.5 * theta * rho * rho
    } else if k > 0.0 {
        let q = k.sqrt();
        (q * rho).sin() / q - theta * (1.0 - (q * rho).cos()) / k
    } else {
        let q = (-k).sqrt();
        (q * rho).sinh() / q - theta * ((q * rho).cosh() - 1.0) / (q * q)
    }
}

/// Maximum of the modifier derivative (attained at r = 0).
pub const MODIFIER_D1_MAX: f64 = 4.0 * 0.135_335_283_236_612_7; // 4 e^{-2}

/// Cutoff modifier: C^2, zero at 0 with derivative 4 e^{-2}, plateau e^{-2}
/// from r = 1/2 on. Returns (l, l', l'').
pub fn modifier_eval(r: f64) -> (f64, f64, f64) {
    debug_assert!(r >= 0.0);
    let e2 = (-2.0f64).exp();
    if r >= 0.5 {
        return (e2, 0.0, 0.0);
    }
    let u = 1.0 / (1.0 - 2.0 * r);
    let ex = (-2.0 * u).exp();
    let l = e2 - ex;
    let d1 = 4.0 * u * u * ex;
    let d2 = -32.0 * r * u.powi(4) * ex;
    (l, d1, d2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    NewModifier,
    LegacyWang,
    ConstantOne,
}

/// The constructed conformal factor: log phi, its gradient and L-action,
/// with everything needed cached at build time.
#[derive(Clone, Debug)]
pub struct PhiProfile {
    pub sigma: f64,
    pub theta: f64,
    pub k: f64,
    pub r0: f64,
    /// r1 = r0 /\ (first zero of h).
    pub r1: f64,
    /// H(r1), cached.
    pub h_r1: f64,
    pub construction: Construction,
    legacy: Option<LegacyTable>,
}

impl PhiProfile {
    pub fn constant_one() -> Self {
        PhiProfile {
            sigma: 0.0,
            theta: 0.0,
            k: 1.0,
            r0: 1.0,
            r1: 1.0,
            h_r1: 1.0,
            construction: Construction::ConstantOne,
            legacy: None,
        }
    }

    pub fn new(construction: Construction, m: &ManifoldModel) -> Result<Self> {
        let (sigma, theta) = m.ii_bounds;
        if construction == Construction::ConstantOne || sigma == 0.0 {
            return Ok(Self::constant_one());
        }
        let k = m.sect_bound;
        let r0 = m.r0;
        let r1 = r0.min(first_zero(k, theta));
        if !(r1 > 0.0) {
            return Err(CoreError::ConstructionInvalid(format!(
                "r1 = {r1} must be positive"
            )));
        }
        let h_r1 = h_integral(k, theta, r1, r1);
        if h_r1 <= 0.0 {
            return Err(CoreError::ConstructionInvalid(format!(
                "H(r1) = {h_r1} must be positive"
            )));
        }
        let legacy = if construction == Construction::LegacyWang {
            Some(LegacyTable::build(sigma, theta, k, r1, m.dim)?)
        } else {
            None
        };
        Ok(PhiProfile {
            sigma,
            theta,
            k,
            r0,
            r1,
            h_r1,
            construction,
            legacy,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.construction == Construction::ConstantOne || self.sigma == 0.0
    }

    /// sup phi bound: exp(sigma H(r1) / 2) for the modifier construction,
    /// exp(sigma d r1 / 2) for the legacy one, 1 when trivial.
    pub fn sup_phi_bound(&self, dim: usize) -> f64 {
        match self.construction {
            Construction::ConstantOne => 1.0,
            Construction::NewModifier => (0.5 * self.sigma * self.h_r1).exp(),
            Construction::LegacyWang => (0.5 * self.sigma * dim as f64 * self.r1).exp(),
        }
    }

    /// log phi together with its gradient (chart vector, index raised) and
    /// L log phi = Delta log phi + <Z, grad log phi>.
    pub fn eval(&self, m: &ManifoldModel, x: Vec2) -> LogPhiEval {
        if self.is_trivial() {
            return LogPhiEval::default();
        }
        let (rho, grad_rho) = m.boundary_distance(x);
        let rho = rho.max(0.0);
        let (d0, d1, d2) = match self.construction {
            Construction::NewModifier => self.radial_new(rho),
            Construction::LegacyWang => self.legacy.as_ref().unwrap().radial(rho),
            Construction::ConstantOne => (0.0, 0.0, 0.0),
        };
        let grad = linalg::scale(grad_rho, d1);
        let lap_rho = m.laplacian_boundary_distance(x);
        let g = m.metric_raw(x);
        let z = m.drift_at(x);
        let l_log_phi = d2 + d1 * lap_rho + linalg::inner(&g, z, grad);
        LogPhiEval {
            value: d0,
            grad,
            l_log_phi,
        }
    }

    /// Radial profile of the modifier construction:
    /// log phi = (sigma e^2 / 2) l(H(rho)/(2 H(r1))) H(r1).
    /// Returns (value, d/drho, d^2/drho^2).
    fn radial_new(&self, rho: f64) -> (f64, f64, f64) {
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let arg = h_integral(self.k, self.theta, self.r1, rho) / (2.0 * self.h_r1);
        let (l, l1, l2) = modifier_eval(arg);
        let value = 0.5 * self.sigma * e2 * l * self.h_r1;
        if rho >= self.r1 {
            return (value, 0.0, 0.0);
        }
        let h = h_eval(self.k, self.theta, rho);
        let hp = h_prime(self.k, self.theta, rho);
        let c = 0.25 * self.sigma * e2;
        let d1 = c * l1 * h;
        let d2 = c * (l2 * h * h / (2.0 * self.h_r1) + l1 * hp);
        (value, d1, d2)
    }

    /// phi itself.
    pub fn phi(&self, m: &ManifoldModel, x: Vec2) -> f64 {
        self.eval(m, x).value.exp()
    }
}

impl ConformalFactor for PhiProfile {
    fn log_phi(&self, m: &ManifoldModel, x: Vec2) -> f64 {
        self.eval(m, x).value
    }
    fn grad_log_phi(&self, m: &ManifoldModel, x: Vec2) -> Vec2 {
        self.eval(m, x).grad
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LogPhiEval {
    pub value: f64,
    /// Chart vector components of grad log phi (index raised).
    pub grad: Vec2,
    pub l_log_phi: f64,
}

/// Tabulated double-integral construction (adaptive Simpson inner integral,
/// Hermite-interpolated outer cumulative).
#[derive(Clone, Debug)]
struct LegacyTable {
    sigma: f64,
    theta: f64,
    k: f64,
    r1: f64,
    dim: usize,
    alpha: f64,
    grid: Vec<f64>,
    cum: Vec<f64>,
    slope: Vec<f64>,
}

const LEGACY_GRID: usize = 1024;
const QUAD_TOL: f64 = 1e-10;

impl LegacyTable {
    fn build(sigma: f64, theta: f64, k: f64, r1: f64, dim: usize) -> Result<Self> {
        let h_r1 = h_eval(k, theta, r1);
        let denom = adaptive_simpson(
            &|s| (h_eval(k, theta, s) - h_r1).powi(dim as i32 - 1),
            0.0,
            r1,
            QUAD_TOL,
        )?;
        let alpha = (1.0 - h_r1).powi(1 - dim as i32) * denom;
        if !(alpha > 0.0) {
            return Err(CoreError::ConstructionInvalid(format!(
                "legacy normalization alpha = {alpha}"
            )));
        }
        let mut table = LegacyTable {
            sigma,
            theta,
            k,
            r1,
            dim,
            alpha,
            grid: Vec::new(),
            cum: Vec::new(),
            slope: Vec::new(),
        };
        let mut cum = 0.0;
        let mut prev_s = 0.0;
        for i in 0..=LEGACY_GRID {
            let s = r1 * i as f64 / LEGACY_GRID as f64;
            if i > 0 {
                cum += adaptive_simpson(&|u| table.weight(u), prev_s, s, QUAD_TOL)?;
            }
            table.grid.push(s);
            table.cum.push(cum);
            table.slope.push(table.weight(s));
            prev_s = s;
        }
        Ok(table)
    }

    /// Outer integrand w(s) = [h(s) - h(r1)]^{1-d} * inner(s); extended by
    /// zero at s >= r1 where the inner integral vanishes.
    fn weight(&self, s: f64) -> f64 {
        if s >= self.r1 {
            return 0.0;
        }
        let h_r1 = h_eval(self.k, self.theta, self.r1);
        let base = h_eval(self.k, self.theta, s) - h_r1;
        if base <= 0.0 {
            return 0.0;
        }
        let inner = adaptive_simpson(
            &|u| (h_eval(self.k, self.theta, u) - h_r1).powi(self.dim as i32 - 1),
            s,
            self.r1,
            QUAD_TOL,
        )
        .unwrap_or(0.0);
        base.powi(1 - self.dim as i32) * inner
    }

    /// (value, d/drho, d^2/drho^2) of log phi at boundary distance rho.
    fn radial(&self, rho: f64) -> (f64, f64, f64) {
        let c = self.sigma / self.alpha;
        if rho >= self.r1 {
            return (c * self.cum[LEGACY_GRID], 0.0, 0.0);
        }
        // cubic Hermite on the tabulated cumulative, exact slopes w(s)
        let t = rho / self.r1 * LEGACY_GRID as f64;
        let i = (t as usize).min(LEGACY_GRID - 1);
        let u = t - i as f64;
        let dx = self.r1 / LEGACY_GRID as f64;
        let (y0, y1) = (self.cum[i], self.cum[i + 1]);
        let (m0, m1) = (self.slope[i] * dx, self.slope[i + 1] * dx);
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        let value = c * (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1);
        let d1 = c * self.weight(rho);
        // w'(s) = (1-d) h'(s) [h-h(r1)]^{-d} * inner(s) - 1
        let h_r1 = h_eval(self.k, self.theta, self.r1);
        let base = h_eval(self.k, self.theta, rho) - h_r1;
        let inner = adaptive_simpson(
            &|x| (h_eval(self.k, self.theta, x) - h_r1).powi(self.dim as i32 - 1),
            rho,
            self.r1,
            QUAD_TOL,
        )
        .unwrap_or(0.0);
        let wp = (1.0 - self.dim as f64) * h_prime(self.k, self.theta, rho)
            * base.powi(-(self.dim as i32))
            * inner
            - 1.0;
        (value, d1, c * wp)
    }
}

/// Adaptive Simpson quadrature; errors out if the recursion cannot reach
/// the requested tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol || (b - a) < 1e-14 {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(CoreError::Numeric(format!(
                "quadrature failed to reach tolerance (achieved {:.3e})",
                err.abs() / 15.0
            )));
        }
        Ok(rec(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1)?
            + rec(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, fm, tol, 48)
}

/// All curvature constants the inequalities consume.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureConstants {
    /// Verified lower bound for Ric^Z.
    pub k_lower: f64,
    pub p: f64,
    /// tilde K = K - sigma (d sqrt(theta^2 + k) + delta_r1(Z) + 5/(2 H(r1))).
    pub tilde_k: f64,
    /// tilde K_p = tilde K - p sigma^2.
    pub tilde_k_p: f64,
    /// K_phi (p = 1 form) = tilde K - sigma^2.
    pub k_phi: f64,
    /// K_{phi,p} = tilde K - p sigma^2 (same as tilde_k_p; kept for the
    /// p-indexed call sites).
    pub k_phi_p: f64,
    /// Legacy-construction K_p = K - sigma (delta + d / r1) - p sigma^2.
    pub legacy_k_p: f64,
    pub delta_r1_z: f64,
    pub phi_sup_bound: f64,
    pub grad_logphi_bound: f64,
}

/// Analytic constants of the phi construction on model `m`, with verified
/// Ricci lower bound `k_lower`.
pub fn constants(profile: &PhiProfile, m: &ManifoldModel, k_lower: f64, p: f64) -> Result<CurvatureConstants> {
    let d = m.dim as f64;
    let sigma = profile.sigma;
    let delta = m.drift_sup_collar(profile.r1);
    if sigma == 0.0 {
        return Ok(CurvatureConstants {
            k_lower,
            p,
            tilde_k: k_lower,
            tilde_k_p: k_lower,
            k_phi: k_lower,
            k_phi_p: k_lower,
            legacy_k_p: k_lower,
            delta_r1_z: delta,
            phi_sup_bound: 1.0,
            grad_logphi_bound: 0.0,
        });
    }
    if profile.h_r1 <= 0.0 {
        return Err(CoreError::ConstructionInvalid(
            "H(r1) <= 0".into(),
        ));
    }
    let tilde_k = k_lower
        - sigma
            * (d * (profile.theta * profile.theta + profile.k).sqrt()
                + delta
                + 2.5 / profile.h_r1);
    let tilde_k_p = tilde_k - p * sigma * sigma;
    let legacy_k_p = k_lower - sigma * (delta + d / profile.r1) - p * sigma * sigma;
    Ok(CurvatureConstants {
        k_lower,
        p,
        tilde_k,
        tilde_k_p,
        k_phi: tilde_k - sigma * sigma,
        k_phi_p: tilde_k_p,
        legacy_k_p,
        delta_r1_z: delta,
        phi_sup_bound: profile.sup_phi_bound(m.dim),
        grad_logphi_bound: sigma,
    })
}

/// Grid infimum of Ric^Z + L log phi - p |grad log phi|^2 (minimizing
/// Ric^Z over unit tangents pointwise).
pub fn empirical_k_phi(
    profile: &PhiProfile,
    m: &ManifoldModel,
    p: f64,
    n_collar: usize,
    n_bulk: usize,
) -> f64 {
    m.sample_grid(n_collar, n_bulk)
        .into_iter()
        .map(|x| {
            let ric = m.ricci_z_min(x);
            let e = profile.eval(m, x);
            let g = m.metric_raw(x);
            let gn2 = linalg::inner(&g, e.grad, e.grad);
            ric + e.l_log_phi - p * gn2
        })
        .fold(f64::INFINITY, f64::min)
}

/// Keep clippy quiet about the unused import on d=1 paths.
#[allow(dead_code)]
fn _unused(_: Vec2) -> Vec2 {
    ZERO_V
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Drift, Family};
    use approx::assert_relative_eq;

    #[test]
    fn h_values() {
        assert_relative_eq!(h_eval(1.0, 0.0, std::f64::consts::FRAC_PI_2), 0.0, epsilon = 1e-15);
        assert_relative_eq!(h_eval(1.0, 3.0, 0.0), 1.0);
        assert_relative_eq!(h_eval(-1.0, 0.0, 1.0), 1.0f64.cosh(), epsilon = 1e-14);
    }

    #[test]
    fn first_zero_values() {
        assert_relative_eq!(first_zero(1.0, 0.0), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        // root of cos t - sin t
        assert_relative_eq!(first_zero(1.0, 1.0), std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        // root of cosh t - 2 sinh t
        assert_relative_eq!(first_zero(-1.0, 2.0), 0.5f64.atanh(), epsilon = 1e-12);
        assert!(first_zero(-1.0, 0.5).is_infinite());
        // residual requirement
        for (k, th) in [(1.0, 0.7), (2.0, 0.0), (-1.0, 3.0), (0.0, 2.0)] {
            let z = first_zero(k, th);
            if z.is_finite() {
                assert!(h_eval(k, th, z).abs() <= 1e-12, "k={k} th={th}");
            }
        }
    }

    #[test]
    fn h_integral_examples() {
        let r1 = std::f64::consts::FRAC_PI_2;
        assert_relative_eq!(h_integral(1.0, 0.0, r1, 0.0), 0.0);
        assert_relative_eq!(h_integral(1.0, 0.0, r1, r1), 1.0, epsilon = 1e-14);
        // matches the displayed trigonometric closed form for k > 0
        for (k, th) in [(1.0f64, 0.5f64), (2.0, 1.3), (0.7, 0.0)] {
            let r1 = first_zero(k, th).min(0.9);
            for r in [0.1, 0.3, 0.5 * r1, r1, 2.0 * r1] {
                let s = (k / (k + th * th)).sqrt().asin();
                let display = (k + th * th).sqrt() / k * (s - k.sqrt() * r.min(r1)).cos() - th / k;
                assert_relative_eq!(h_integral(k, th, r1, r), display, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn h_integral_derivative_is_h() {
        for (k, th) in [(1.0, 0.0), (1.0, 1.0), (0.5, 0.3), (0.0, 0.7), (-0.5, 0.2)] {
            let r1 = first_zero(k, th).min(1.2);
            let fd = 1e-6;
            for r in [0.05, 0.3, 0.7 * r1] {
                let d = (h_integral(k, th, r1, r + fd) - h_integral(k, th, r1, r - fd)) / (2.0 * fd);
                assert_relative_eq!(d, h_eval(k, th, r), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn modifier_properties() {
        let e2 = (-2.0f64).exp();
        let (l0, d10, _) = modifier_eval(0.0);
        assert_relative_eq!(l0, 0.0);
        assert_relative_eq!(d10, 4.0 * e2, epsilon = 1e-15);
        let (lp, d1p, d2p) = modifier_eval(0.5);
        assert_eq!((lp, d1p, d2p), (e2, 0.0, 0.0));
        // bounds over a fine grid; the displayed derivative constants hold
        let mut min_d2 = f64::INFINITY;
        for i in 0..=20_000 {
            let r = 0.6 * i as f64 / 20_000.0;
            let (l, d1, d2) = modifier_eval(r);
            assert!(l <= e2 + 1e-15 && l >= 0.0);
            assert!(d1 >= 0.0 && d1 <= 4.0 * e2 + 1e-15);
            assert!(d2 >= -20.0 * e2);
            min_d2 = min_d2.min(d2);
        }
        // the stated sharp minimum of l'' at r = sqrt(3)/6
        let sharp = -(3.0f64).sqrt().recip() * (3.0 + 3.0f64.sqrt()).powi(4)
            * (-(3.0 + 3.0f64.sqrt())).exp();
        assert_relative_eq!(min_d2, sharp, max_relative = 1e-5);
        // modifier derivatives match finite differences of the definition
        for r in [0.05, 0.2, 0.35, 0.45] {
            let fd = 1e-6;
            let (_, d1, d2) = modifier_eval(r);
            let (lp, d1p, _) = modifier_eval(r + fd);
            let (lm, d1m, _) = modifier_eval(r - fd);
            assert_relative_eq!((lp - lm) / (2.0 * fd), d1, max_relative = 1e-5);
            assert_relative_eq!((d1p - d1m) / (2.0 * fd), d2, max_relative = 1e-5);
        }
    }

    #[test]
    fn logphi_boundary_behaviour() {
        let m = ManifoldModel::new(
            Family::DiskExterior { radius: 2.0 },
            Drift::Zero,
            0.5,
            Some(0.5),
            Some(1.0),
        )
        .unwrap();
        let profile = PhiProfile::new(Construction::NewModifier, &m).unwrap();
        let sigma = profile.sigma;
        assert_relative_eq!(sigma, 0.5);
        // boundary point: log phi = 0
        let e = profile.eval(&m, [2.0, 0.0]);
        assert_relative_eq!(e.value, 0.0, epsilon = 1e-14);
        // normal derivative equals sigma: directional along inward normal
        let fd = 1e-7;
        let ep = profile.eval(&m, [2.0 + fd, 0.0]);
        assert_relative_eq!((ep.value - e.value) / fd, sigma, epsilon = 1e-6);
        // plateau: log phi = sigma H(r1) / 2
        let plateau = profile.eval(&m, [2.0 + profile.r1 + 0.1, 0.0]);
        assert_relative_eq!(plateau.value, 0.5 * sigma * profile.h_r1, epsilon = 1e-14);
        assert_eq!(plateau.grad, [0.0, 0.0]);
        assert_eq!(plateau.l_log_phi, 0.0);
    }

    #[test]
    fn legacy_construction_basics() {
        let m = ManifoldModel::new(
            Family::DiskExterior { radius: 2.0 },
            Drift::Zero,
            0.5,
            Some(0.5),
            Some(1.0),
        )
        .unwrap();
        let profile = PhiProfile::new(Construction::LegacyWang, &m).unwrap();
        let e0 = profile.eval(&m, [2.0, 0.0]);
        assert_relative_eq!(e0.value, 0.0, epsilon = 1e-12);
        // normal derivative sigma at the boundary
        let fd = 1e-6;
        let ep = profile.eval(&m, [2.0 + fd, 0.0]);
        assert_relative_eq!((ep.value - e0.value) / fd, profile.sigma, epsilon = 1e-4);
        // radial derivative consistent with the tabulated value derivative
        for rho in [0.1, 0.25, 0.4] {
            let vp = profile.eval(&m, [2.0 + rho + fd, 0.0]).value;
            let vm = profile.eval(&m, [2.0 + rho - fd, 0.0]).value;
            let d1 = profile.eval(&m, [2.0 + rho, 0.0]).grad[0];
            assert_relative_eq!((vp - vm) / (2.0 * fd), d1, max_relative = 1e-6);
        }
        // monotone, bounded by the legacy sup bound
        let top = profile.eval(&m, [2.0 + profile.r1 + 0.2, 0.0]).value;
        assert!(top > 0.0);
        assert!(top.exp() <= profile.sup_phi_bound(m.dim) * (1.0 + 1e-10));
    }

    #[test]
    fn constants_degenerate_sigma_zero() {
        let m = ManifoldModel::new(Family::HalfPlane, Drift::Zero, 1.0, None, None).unwrap();
        let profile = PhiProfile::new(Construction::NewModifier, &m).unwrap();
        assert!(profile.is_trivial());
        let c = constants(&profile, &m, 0.7, 2.0).unwrap();
        assert_eq!(c.tilde_k, 0.7);
        assert_eq!(c.tilde_k_p, 0.7);
        assert_eq!(c.phi_sup_bound, 1.0);
    }

    #[test]
    fn constants_disk_example() {
        // K=0, sigma=1, theta=1, k=1, d=2, Z=0, r1=pi/4
        let m = ManifoldModel::new(
            Family::DiskExterior { radius: 1.0 },
            Drift::Zero,
            2.0,
            Some(1.0),
            Some(1.0),
        )
        .unwrap();
        let profile = PhiProfile::new(Construction::NewModifier, &m).unwrap();
        assert_relative_eq!(profile.r1, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        let c = constants(&profile, &m, 0.0, 2.0).unwrap();
        let h_r1 = h_integral(1.0, 1.0, profile.r1, profile.r1);
        // cross-check H(pi/4) by quadrature of h
        let quad = adaptive_simpson(&|s| h_eval(1.0, 1.0, s), 0.0, profile.r1, 1e-12).unwrap();
        assert_relative_eq!(h_r1, quad, epsilon = 1e-10);
        let expect = -(2.0 * 2.0f64.sqrt() + 2.5 / h_r1) - 2.0;
        assert_relative_eq!(c.tilde_k_p, expect, epsilon = 1e-12);
        // legacy: K - sigma (0 + d/r1) - p sigma^2 with r1=1, d=2, p=1 -> -3
        let m1 = ManifoldModel::new(
            Family::DiskExterior { radius: 1.0 },
            Drift::Zero,
            1.0,
            Some(0.0),
            Some(1e-6),
        )
        .unwrap();
        let p1 = PhiProfile::new(Construction::NewModifier, &m1).unwrap();
        assert_relative_eq!(p1.r1, 1.0, epsilon = 1e-9);
        let c1 = constants(&p1, &m1, 0.0, 1.0).unwrap();
        assert_relative_eq!(c1.legacy_k_p, -3.0, epsilon = 1e-9);
    }

    #[test]
    fn empirical_k_phi_flat_trivial() {
        let m = ManifoldModel::new(Family::HalfPlane, Drift::Zero, 1.0, None, None).unwrap();
        let profile = PhiProfile::constant_one();
        assert_eq!(empirical_k_phi(&profile, &m, 2.0, 50, 50), 0.0);
        let s = ManifoldModel::new(
            Family::SphereCap { k: 1.0, alpha: 0.8 },
            Drift::Zero,
            0.5,
            None,
            None,
        )
        .unwrap();
        assert_relative_eq!(empirical_k_phi(&profile, &s, 2.0, 50, 50), 1.0, epsilon = 1e-6);
    }
}
