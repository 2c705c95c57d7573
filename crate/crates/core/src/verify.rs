//! Inequality checks. Every theorem becomes a two-sided Monte Carlo
//! comparison: the left side is estimated from simulation, the right side
//! is assembled from the certified curvature constants, and the check
//! passes when the slack survives a 3-sigma statistical band plus a
//! documented discretization budget. The right side never consumes
//! estimator output, only constants and scenario inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{coupled_paths, tilted_pair};
use crate::error::{CoreError, Result};
use crate::estimators::{
    empirical_w2, estimate_semigroup, gradient_fd_crn, pathspace_w2_sup,
};
use crate::geometry::ManifoldModel;
use crate::linalg::{self, Vec2, IDENT};
use crate::phi::{constants, empirical_k_phi, PhiProfile};
use crate::sde::{simulate_path, SdeConfig};

/// Test functions the checks run against. The catalog is fixed so
/// reference values stay stable across runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// a . x + b in chart coordinates.
    Linear { a: [f64; 2], b: f64 },
    /// Distance to the boundary.
    BoundaryDistance,
    /// 1 + height exp(-d_g(x, c)^2 / width^2); bounded in [1, 1 + height].
    Bump { center: [f64; 2], width: f64, height: f64 },
    /// Smoothed indicator of the geodesic ball B(c, radius),
    /// (1 + tanh((radius - d)/width)) / 2.
    IndicatorSmooth { center: [f64; 2], radius: f64, width: f64 },
    One,
}

impl TestFunction {
    pub fn eval(&self, m: &ManifoldModel, x: Vec2) -> f64 {
        match *self {
            TestFunction::Linear { a, b } => a[0] * x[0] + a[1] * x[1] + b,
            TestFunction::BoundaryDistance => m.boundary_distance(x).0,
            TestFunction::Bump { center, width, height } => {
                let d = m.distance_g(x, center);
                1.0 + height * (-d * d / (width * width)).exp()
            }
            TestFunction::IndicatorSmooth { center, radius, width } => {
                let d = m.distance_g(x, center);
                0.5 * (1.0 + ((radius - d) / width).tanh())
            }
            TestFunction::One => 1.0,
        }
    }

    /// Chart gradient with the index raised: g^{-1} df. The differential
    /// is taken by central differences; every catalog entry is smooth so
    /// the stencil error is ~1e-10, far below Monte Carlo noise.
    pub fn grad_chart(&self, m: &ManifoldModel, x: Vec2) -> Vec2 {
        if let TestFunction::Linear { a, .. } = *self {
            let inv = linalg::inverse(&m.metric_raw(x), m.dim);
            return linalg::mat_vec(&inv, a);
        }
        if let TestFunction::One = *self {
            return [0.0, 0.0];
        }
        let h = 1e-6 * (1.0 + m.domain_scale);
        let mut df = [0.0f64; 2];
        for i in 0..m.dim {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            df[i] = (self.eval(m, xp) - self.eval(m, xm)) / (2.0 * h);
        }
        let inv = linalg::inverse(&m.metric_raw(x), m.dim);
        linalg::mat_vec(&inv, df)
    }

    pub fn grad_norm(&self, m: &ManifoldModel, x: Vec2) -> f64 {
        let g = m.metric_raw(x);
        let v = self.grad_chart(m, x);
        linalg::norm(&g, v)
    }

    /// Grid supremum of |grad f|_g over the domain of interest.
    pub fn sup_grad_norm(&self, m: &ManifoldModel) -> f64 {
        m.sample_grid(200, 400)
            .into_iter()
            .map(|x| self.grad_norm(m, x))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckTag {
    GradUniform,
    GradLp,
    GradL2Heat,
    LogHarnack,
    PowerHarnack,
    W2Contraction,
    TciI,
    TciIPrime,
    TciIi,
    TciCorI,
    TciCorIPrime,
    TciOrdering,
    TciConvexForm,
}

impl CheckTag {
    pub fn label(&self) -> &'static str {
        match self {
            CheckTag::GradUniform => "grad_uniform",
            CheckTag::GradLp => "grad_lp",
            CheckTag::GradL2Heat => "grad_l2_heat",
            CheckTag::LogHarnack => "log_harnack",
            CheckTag::PowerHarnack => "power_harnack",
            CheckTag::W2Contraction => "w2_contraction",
            CheckTag::TciI => "tci_i",
            CheckTag::TciIPrime => "tci_i_prime",
            CheckTag::TciIi => "tci_ii",
            CheckTag::TciCorI => "tci_cor_i",
            CheckTag::TciCorIPrime => "tci_cor_i_prime",
            CheckTag::TciOrdering => "tci_ordering",
            CheckTag::TciConvexForm => "tci_convex_form",
        }
    }

    pub fn from_label(label: &str) -> Option<CheckTag> {
        CheckTag::ALL.into_iter().find(|t| t.label() == label)
    }

    pub const ALL: [CheckTag; 13] = [
        CheckTag::GradUniform,
        CheckTag::GradLp,
        CheckTag::GradL2Heat,
        CheckTag::LogHarnack,
        CheckTag::PowerHarnack,
        CheckTag::W2Contraction,
        CheckTag::TciI,
        CheckTag::TciIPrime,
        CheckTag::TciIi,
        CheckTag::TciCorI,
        CheckTag::TciCorIPrime,
        CheckTag::TciOrdering,
        CheckTag::TciConvexForm,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsMode {
    /// Grid infimum of Ric^Z + L log phi - p |grad log phi|^2 (sharper).
    Empirical,
    /// The closed-form constant chain (looser; exercises the whole
    /// analytic construction end to end).
    Analytic,
}

/// One fully resolved check target.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub model: ManifoldModel,
    pub phi: PhiProfile,
    pub f: TestFunction,
    pub x: Vec2,
    pub y: Vec2,
    pub t: f64,
    pub p: f64,
    /// Magnitude of the constant Girsanov tilt (first frame coordinate).
    pub beta: f64,
    pub n_paths: usize,
    pub n_atoms: usize,
    pub dt: f64,
    pub seed: u64,
    /// Certified lower bound for Ric^Z.
    pub k_lower: f64,
    /// Deliberate corruption of the curvature constant; nonzero only in
    /// failure-canary scenarios.
    pub k_inflate: f64,
    /// Relative band for optimal-transport estimates (calibrated at the
    /// default atom count).
    pub w2_band: f64,
    /// Absolute band for the squared path-space transport estimates.
    pub tci_band: f64,
    pub constants_mode: ConstantsMode,
    pub checks: Vec<CheckTag>,
}

impl Scenario {
    pub fn sde_config(&self) -> Result<SdeConfig> {
        SdeConfig::new(self.t, self.dt)
    }

    /// The constant K_{phi,p} entering every right-hand side.
    pub fn k_phi_p(&self, p: f64) -> Result<f64> {
        let base = match self.constants_mode {
            ConstantsMode::Empirical => {
                empirical_k_phi(&self.phi, &self.model, p, 200, 400)
            }
            ConstantsMode::Analytic => {
                constants(&self.phi, &self.model, self.k_lower, p)?.tilde_k_p
            }
        };
        Ok(base + self.k_inflate)
    }

    pub fn phi_sup(&self) -> f64 {
        self.phi.sup_phi_bound(self.model.dim)
    }

    fn check_seed(&self, tag: CheckTag) -> u64 {
        let idx = CheckTag::ALL.iter().position(|t| t == &tag).unwrap() as u64;
        self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(idx)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub scenario_id: String,
    pub theorem: CheckTag,
    pub lhs: f64,
    pub se: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub bias_budget: f64,
}

impl InequalityReport {
    pub fn new(
        scenario_id: &str,
        theorem: CheckTag,
        lhs: f64,
        se: f64,
        rhs: f64,
        bias_budget: f64,
    ) -> Self {
        let slack = rhs - lhs;
        InequalityReport {
            scenario_id: scenario_id.to_string(),
            theorem,
            lhs,
            se,
            rhs,
            slack,
            pass: slack >= -(3.0 * se + bias_budget),
            bias_budget,
        }
    }
}

/// K / (e^{2Kt} - 1), the heat-kernel prefactor, extended by continuity
/// to K = 0 where it equals 1/(2t).
pub fn heat_prefactor(k: f64, t: f64) -> f64 {
    if k.abs() < 1e-12 {
        1.0 / (2.0 * t)
    } else {
        k / ((2.0 * k * t).exp() - 1.0)
    }
}

/// (e^{2Kt} - 1)/K extended by continuity to 2t at K = 0. Equals
/// (e^{2K+ t} - e^{2K- t})/K for either sign of K.
pub fn exp_growth_factor(k: f64, t: f64) -> f64 {
    if k.abs() < 1e-12 {
        2.0 * t
    } else {
        ((2.0 * k * t).exp() - 1.0) / k
    }
}

/// (1 - e^{-2Kt})/K extended by continuity to 2t at K = 0.
pub fn exp_decay_factor(k: f64, t: f64) -> f64 {
    if k.abs() < 1e-12 {
        2.0 * t
    } else {
        (1.0 - (-2.0 * k * t).exp()) / k
    }
}

/// inf_{R>0} (1 + 1/R) exp(a (1 + R)). The minimizer solves
/// a R^2 + a R - 1 = 0, so R* = (sqrt(1 + 4/a) - 1)/2 for a > 0; the
/// infimum is 1 (R -> infinity) when a = 0.
pub fn inf_r_factor(a: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    let r = 0.5 * ((1.0 + 4.0 / a).sqrt() - 1.0);
    (1.0 + 1.0 / r) * (a * (1.0 + r)).exp()
}

/// Discretization budget per unit dt; calibrated on the flat families
/// where the exact answers are known.
const BIAS_DT: f64 = 2.0;

/// |grad P_t f|(x) by common-random-numbers central differences along a
/// g-orthonormal frame at x.
fn grad_norm_fd(s: &Scenario, x: Vec2, seed: u64) -> Result<(f64, f64)> {
    let m = &s.model;
    let cfg = s.sde_config()?;
    let frame = linalg::gram_schmidt(&m.metric_raw(x), &IDENT, m.dim);
    let eps = 1e-3 * m.domain_scale;
    let f = s.f;
    let mut sum2 = 0.0;
    let mut se2 = 0.0;
    for a in 0..m.dim {
        let dir = [frame[0][a], frame[1][a]];
        let est = gradient_fd_crn(
            m,
            &cfg,
            x,
            dir,
            eps,
            |z| f.eval(m, z),
            s.n_paths,
            seed,
        )?;
        sum2 += est.mean * est.mean;
        se2 += est.se * est.se;
    }
    let norm = sum2.sqrt();
    // d|v| = v.dv/|v|; bounded by the Euclidean se norm
    Ok((norm, se2.sqrt()))
}

fn fd_bias(s: &Scenario) -> f64 {
    let eps = 1e-3 * s.model.domain_scale;
    BIAS_DT * s.dt + eps * eps
}

pub fn check_gradient_uniform(s: &Scenario) -> Result<InequalityReport> {
    let (lhs, se) = grad_norm_fd(s, s.x, s.check_seed(CheckTag::GradUniform))?;
    let k_phi = s.k_phi_p(1.0)?;
    let rhs = s.phi_sup() * s.f.sup_grad_norm(&s.model) * (-k_phi * s.t).exp();
    Ok(InequalityReport::new(&s.id, CheckTag::GradUniform, lhs, se, rhs, fd_bias(s)))
}

pub fn check_gradient_lp(s: &Scenario) -> Result<InequalityReport> {
    let p = s.p;
    if p <= 1.0 {
        return Err(CoreError::Precondition("Lp gradient check needs p > 1".into()));
    }
    let seed = s.check_seed(CheckTag::GradLp);
    let (lhs, se_lhs) = grad_norm_fd(s, s.x, seed)?;
    let m = &s.model;
    let cfg = s.sde_config()?;
    let q = p / (p - 1.0);
    let f = s.f;
    let phi = &s.phi;
    let est = estimate_semigroup(
        m,
        &cfg,
        s.x,
        |z| (phi.phi(m, z) * f.grad_norm(m, z)).powf(q),
        s.n_paths,
        seed.wrapping_add(101),
    )?;
    let k_phi_p = s.k_phi_p(p)?;
    let pref = (-k_phi_p * s.t).exp() / phi.phi(m, s.x);
    let rhs = pref * est.mean.powf(1.0 / q);
    let se_rhs = if est.mean > 0.0 {
        pref * est.mean.powf(1.0 / q - 1.0) / q * est.se
    } else {
        0.0
    };
    let se = (se_lhs * se_lhs + se_rhs * se_rhs).sqrt();
    Ok(InequalityReport::new(&s.id, CheckTag::GradLp, lhs, se, rhs, fd_bias(s)))
}

pub fn check_gradient_l2_heat(s: &Scenario) -> Result<InequalityReport> {
    let seed = s.check_seed(CheckTag::GradL2Heat);
    let (norm, norm_se) = grad_norm_fd(s, s.x, seed)?;
    let lhs = norm * norm;
    let se_lhs = 2.0 * norm * norm_se;
    let m = &s.model;
    let cfg = s.sde_config()?;
    let f = s.f;
    let est = estimate_semigroup(
        m,
        &cfg,
        s.x,
        |z| {
            let v = f.eval(m, z);
            v * v
        },
        s.n_paths,
        seed.wrapping_add(101),
    )?;
    let k2 = s.k_phi_p(2.0)?;
    let pref = s.phi_sup().powi(2) * heat_prefactor(k2, s.t);
    let rhs = pref * est.mean;
    let se = (se_lhs * se_lhs + (pref * est.se).powi(2)).sqrt();
    Ok(InequalityReport::new(&s.id, CheckTag::GradL2Heat, lhs, se, rhs, fd_bias(s)))
}

pub fn check_log_harnack(s: &Scenario) -> Result<InequalityReport> {
    let m = &s.model;
    let cfg = s.sde_config()?;
    let f = s.f;
    let seed = s.check_seed(CheckTag::LogHarnack);
    let at_y = estimate_semigroup(
        m,
        &cfg,
        s.y,
        |z| f.eval(m, z).max(1e-300).ln(),
        s.n_paths,
        seed,
    )?;
    let at_x = estimate_semigroup(m, &cfg, s.x, |z| f.eval(m, z), s.n_paths, seed.wrapping_add(101))?;
    if at_x.mean <= 0.0 {
        return Err(CoreError::Numeric("log-Harnack needs P_T f > 0".into()));
    }
    let k2 = s.k_phi_p(2.0)?;
    let rho = m.distance_g(s.x, s.y);
    let penalty = 0.5 * s.phi_sup().powi(2) * rho * rho * heat_prefactor(k2, s.t);
    let rhs = at_x.mean.ln() + penalty;
    let se = (at_y.se * at_y.se + (at_x.se / at_x.mean).powi(2)).sqrt();
    Ok(InequalityReport::new(&s.id, CheckTag::LogHarnack, at_y.mean, se, rhs, BIAS_DT * s.dt))
}

pub fn check_power_harnack(s: &Scenario) -> Result<InequalityReport> {
    let phi_sup = s.phi_sup();
    // smallest integer-free choice clear of the precondition p > |phi|^2
    let p = 2.0 * phi_sup * phi_sup + 1.0;
    let sp = p.sqrt();
    let delta_p = (phi_sup - 1.0).max(0.5 * (sp - 1.0));
    if sp - 1.0 - delta_p <= 0.0 {
        return Err(CoreError::Precondition(
            "power Harnack needs |phi|_inf < sqrt(p)".into(),
        ));
    }
    let m = &s.model;
    let cfg = s.sde_config()?;
    let f = s.f;
    let seed = s.check_seed(CheckTag::PowerHarnack);
    let at_y = estimate_semigroup(m, &cfg, s.y, |z| f.eval(m, z), s.n_paths, seed)?;
    let at_x = estimate_semigroup(
        m,
        &cfg,
        s.x,
        |z| f.eval(m, z).powf(p),
        s.n_paths,
        seed.wrapping_add(101),
    )?;
    let lhs = at_y.mean.powf(p);
    let se_lhs = p * at_y.mean.powf(p - 1.0) * at_y.se;
    let k2 = s.k_phi_p(2.0)?;
    let rho = m.distance_g(s.x, s.y);
    let exponent = sp * (sp - 1.0) * phi_sup * phi_sup * rho * rho
        * heat_prefactor(k2, s.t)
        / (8.0 * delta_p * (sp - 1.0 - delta_p));
    let factor = exponent.exp();
    let rhs = at_x.mean * factor;
    let se = (se_lhs * se_lhs + (factor * at_x.se).powi(2)).sqrt();
    Ok(InequalityReport::new(&s.id, CheckTag::PowerHarnack, lhs, se, rhs, BIAS_DT * s.dt))
}

/// Terminal ensembles from x and y driven by identical noise streams.
fn endpoint_ensembles(s: &Scenario, seed: u64) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    let m = &s.model;
    let cfg = s.sde_config()?;
    let pts: Vec<(Vec2, Vec2)> = (0..s.n_atoms as u64)
        .into_par_iter()
        .map(|i| {
            let a = simulate_path(m, &cfg, s.x, seed, i)?.terminal();
            let b = simulate_path(m, &cfg, s.y, seed, i)?.terminal();
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    Ok(pts.into_iter().unzip())
}

pub fn check_w2_contraction(s: &Scenario) -> Result<InequalityReport> {
    let seed = s.check_seed(CheckTag::W2Contraction);
    let (xs, ys) = endpoint_ensembles(s, seed)?;
    let lhs = empirical_w2(&s.model, &xs, &ys)?;
    let k2 = s.k_phi_p(2.0)?;
    let rho = s.model.distance_g(s.x, s.y);
    let rhs = s.phi_sup() * (-k2 * s.t).exp() * rho;
    let bias = s.w2_band * rhs + BIAS_DT * s.dt;
    Ok(InequalityReport::new(&s.id, CheckTag::W2Contraction, lhs, 0.0, rhs, bias))
}

/// Ensembles of full paths: the tilted leading path and its untilted
/// partner, coupled through the transported noise.
fn tilted_path_ensembles(
    s: &Scenario,
    seed: u64,
) -> Result<(Vec<Vec<Vec2>>, Vec<Vec<Vec2>>, f64)> {
    let m = &s.model;
    let phi = &s.phi;
    let cfg = s.sde_config()?;
    let c = s.beta;
    let pairs: Vec<(Vec<Vec2>, Vec<Vec2>, f64)> = (0..s.n_atoms as u64)
        .into_par_iter()
        .map(|i| {
            let (tp, ys) = tilted_pair(m, phi, &cfg, s.x, |_t, _x| [c, 0.0], seed, i)?;
            Ok((tp.states, ys, tp.entropy))
        })
        .collect::<Result<_>>()?;
    let entropy = pairs[0].2;
    let (mut xs, mut ys) = (Vec::with_capacity(pairs.len()), Vec::with_capacity(pairs.len()));
    for (a, b, _) in pairs {
        xs.push(a);
        ys.push(b);
    }
    Ok((xs, ys, entropy))
}

/// The path-space transport coefficients; entropy multiplies these.
pub fn tci_coefficient(s: &Scenario, tag: CheckTag) -> Result<f64> {
    let k = s.k_phi_p(1.0)?;
    let kp = k.max(0.0);
    let sigma = if s.phi.is_trivial() { 0.0 } else { s.phi.sigma };
    let phi2 = s.phi_sup().powi(2);
    let t = s.t;
    Ok(match tag {
        CheckTag::TciI => {
            2.0 * phi2 * exp_growth_factor(k, t) * inf_r_factor(8.0 * sigma * sigma)
        }
        CheckTag::TciIPrime => {
            2.0 * phi2
                * exp_decay_factor(k, t)
                * inf_r_factor(8.0 * sigma * sigma * (2.0 * kp * t).exp())
        }
        CheckTag::TciCorI => {
            2.0 * phi2
                * exp_growth_factor(k, t)
                * (8.0 * sigma * sigma + 4.0 * 2.0f64.sqrt() * sigma).exp()
        }
        CheckTag::TciCorIPrime => {
            2.0 * phi2
                * exp_decay_factor(k, t)
                * (8.0 * sigma * sigma * (2.0 * kp * t).exp()
                    + 4.0 * 2.0f64.sqrt() * sigma * (kp * t).exp())
                    .exp()
        }
        _ => {
            return Err(CoreError::Precondition(
                "not a coefficient-style transport variant".into(),
            ))
        }
    })
}

fn check_tci_entropy_variant(s: &Scenario, tag: CheckTag) -> Result<InequalityReport> {
    let seed = s.check_seed(tag);
    let (xs, ys, entropy) = tilted_path_ensembles(s, seed)?;
    let w2 = pathspace_w2_sup(&s.model, &xs, &ys)?;
    let lhs = w2 * w2;
    let rhs = tci_coefficient(s, tag)? * entropy;
    let bias = s.tci_band + s.tci_band * rhs + BIAS_DT * s.dt;
    Ok(InequalityReport::new(&s.id, tag, lhs, 0.0, rhs, bias))
}

pub fn check_tci_i(s: &Scenario) -> Result<InequalityReport> {
    check_tci_entropy_variant(s, CheckTag::TciI)
}

pub fn check_tci_i_prime(s: &Scenario) -> Result<InequalityReport> {
    check_tci_entropy_variant(s, CheckTag::TciIPrime)
}

pub fn check_tci_cor_i(s: &Scenario) -> Result<InequalityReport> {
    check_tci_entropy_variant(s, CheckTag::TciCorI)
}

pub fn check_tci_cor_i_prime(s: &Scenario) -> Result<InequalityReport> {
    check_tci_entropy_variant(s, CheckTag::TciCorIPrime)
}

/// Full-path ensembles from x and y, paired through the parallel
/// coupling (the coupling whose uniform distance the path-space bounds
/// control; the synchronous chart pair is not contractive on the curved
/// families).
fn path_ensembles(s: &Scenario, seed: u64) -> Result<(Vec<Vec<Vec2>>, Vec<Vec<Vec2>>)> {
    let m = &s.model;
    let cfg = s.sde_config()?;
    let pairs: Vec<(Vec<Vec2>, Vec<Vec2>)> = (0..s.n_atoms as u64)
        .into_par_iter()
        .map(|i| coupled_paths(m, &s.phi, &cfg, s.x, s.y, seed, i))
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

pub fn check_tci_ii(s: &Scenario) -> Result<InequalityReport> {
    let seed = s.check_seed(CheckTag::TciIi);
    let (xs, ys) = path_ensembles(s, seed)?;
    let lhs = pathspace_w2_sup(&s.model, &xs, &ys)?;
    let k = s.k_phi_p(1.0)?;
    let sigma = if s.phi.is_trivial() { 0.0 } else { s.phi.sigma };
    let rho = s.model.distance_g(s.x, s.y);
    let rhs = 2.0 * s.phi_sup() * (((-k).max(0.0) + sigma) * s.t).exp() * rho;
    let bias = s.w2_band * rhs + BIAS_DT * s.dt;
    Ok(InequalityReport::new(&s.id, CheckTag::TciIi, lhs, 0.0, rhs, bias))
}

/// Coefficient ordering of the two entropy variants: the first is
/// sharper whenever the tilt of the metric is active and the curvature
/// constant is positive.
pub fn check_tci_ordering(s: &Scenario) -> Result<InequalityReport> {
    let k = s.k_phi_p(1.0)?;
    let sigma = if s.phi.is_trivial() { 0.0 } else { s.phi.sigma };
    if !(sigma > 0.0 && k > 0.0) {
        return Err(CoreError::Precondition(
            "coefficient ordering holds for sigma > 0 and positive curvature constant".into(),
        ));
    }
    let lhs = tci_coefficient(s, CheckTag::TciI)?;
    let rhs = tci_coefficient(s, CheckTag::TciIPrime)?;
    Ok(InequalityReport::new(&s.id, CheckTag::TciOrdering, lhs, 0.0, rhs, 0.0))
}

/// Corrected convex-case form: with phi identically 1 the path-space
/// distance of the two laws is bounded by e^{K^- T} times the starting
/// distance.
pub fn check_tci_convex_form(s: &Scenario) -> Result<InequalityReport> {
    if !s.phi.is_trivial() {
        return Err(CoreError::Precondition(
            "convex-case form requires the trivial conformal factor".into(),
        ));
    }
    let seed = s.check_seed(CheckTag::TciConvexForm);
    let (xs, ys) = path_ensembles(s, seed)?;
    let lhs = pathspace_w2_sup(&s.model, &xs, &ys)?;
    let k = s.k_phi_p(1.0)?;
    let rho = s.model.distance_g(s.x, s.y);
    let rhs = ((-k).max(0.0) * s.t).exp() * rho;
    let bias = s.w2_band * rhs + BIAS_DT * s.dt;
    Ok(InequalityReport::new(&s.id, CheckTag::TciConvexForm, lhs, 0.0, rhs, bias))
}

pub fn run_check(s: &Scenario, tag: CheckTag) -> Result<InequalityReport> {
    match tag {
        CheckTag::GradUniform => check_gradient_uniform(s),
        CheckTag::GradLp => check_gradient_lp(s),
        CheckTag::GradL2Heat => check_gradient_l2_heat(s),
        CheckTag::LogHarnack => check_log_harnack(s),
        CheckTag::PowerHarnack => check_power_harnack(s),
        CheckTag::W2Contraction => check_w2_contraction(s),
        CheckTag::TciI => check_tci_i(s),
        CheckTag::TciIPrime => check_tci_i_prime(s),
        CheckTag::TciIi => check_tci_ii(s),
        CheckTag::TciCorI => check_tci_cor_i(s),
        CheckTag::TciCorIPrime => check_tci_cor_i_prime(s),
        CheckTag::TciOrdering => check_tci_ordering(s),
        CheckTag::TciConvexForm => check_tci_convex_form(s),
    }
}

pub fn run_scenario(s: &Scenario) -> Result<Vec<InequalityReport>> {
    s.checks.iter().map(|&tag| run_check(s, tag)).collect()
}

/// Run every scenario; the report list is sorted by (scenario, check) so
/// identical inputs give byte-identical output.
pub fn run_suite(scenarios: &[Scenario]) -> Result<Vec<InequalityReport>> {
    let mut reports: Vec<InequalityReport> = scenarios
        .iter()
        .map(run_scenario)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    reports.sort_by(|a, b| {
        (a.scenario_id.as_str(), a.theorem).cmp(&(b.scenario_id.as_str(), b.theorem))
    });
    Ok(reports)
}

/// Process exit code for a finished suite.
pub fn suite_exit_code(reports: &[InequalityReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}
