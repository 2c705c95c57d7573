//! Scenario suite configuration: TOML in, fully resolved `Scenario`s out.
//! Validation is collected, not fail-fast, so a bad file reports every
//! problem at once.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::{Drift, Family, ManifoldModel};
use crate::phi::{Construction, PhiProfile};
use crate::verify::{CheckTag, ConstantsMode, Scenario, TestFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Defaults {
    pub seed: u64,
    pub n_paths: usize,
    pub n_atoms: usize,
    pub dt: f64,
    /// Relative acceptance band for empirical optimal-transport values,
    /// calibrated at the default atom count.
    pub w2_band: f64,
    /// Absolute + relative band for squared path-space transport values.
    pub tci_band: f64,
    pub constants: ConstantsMode,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            seed: 42,
            n_paths: 20_000,
            n_atoms: 1024,
            dt: 2e-3,
            w2_band: 0.12,
            tci_band: 0.05,
            constants: ConstantsMode::Empirical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub family: Family,
    #[serde(default = "default_drift")]
    pub drift: Drift,
    pub r0: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub k_cert: Option<f64>,
    #[serde(default = "default_construction")]
    pub construction: Construction,
    /// Certified Ric^Z lower bound; defaults to the family's closed form.
    #[serde(default)]
    pub k_lower: Option<f64>,
    pub f: TestFunction,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub t: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub n_paths: Option<usize>,
    #[serde(default)]
    pub n_atoms: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Deliberate corruption of the curvature constant (failure canary).
    #[serde(default)]
    pub k_inflate: f64,
    pub checks: Vec<CheckTag>,
}

fn default_drift() -> Drift {
    Drift::Zero
}

fn default_construction() -> Construction {
    Construction::ConstantOne
}

fn default_p() -> f64 {
    2.0
}

fn default_beta() -> f64 {
    0.5
}

/// Runtime overrides from the command line; `None` keeps the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_paths: Option<usize>,
    pub dt: Option<f64>,
    pub constants: Option<ConstantsMode>,
    /// Restrict the run to a single scenario id.
    pub scenario: Option<String>,
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(text)
            .map_err(|e| CoreError::Config(vec![format!("TOML parse error: {e}")]))?;
        let errors = cfg.validation_errors();
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(CoreError::Config(errors))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| CoreError::Config(vec![format!("TOML serialize error: {e}")]))
    }

    /// Every validation problem in the file, in document order.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for sc in &self.scenarios {
            if !seen.insert(sc.id.clone()) {
                errors.push(format!("duplicate scenario id '{}'", sc.id));
            }
            let dt = sc.dt.unwrap_or(self.defaults.dt);
            if !(dt > 0.0) {
                errors.push(format!("scenario '{}': dt = {dt} must be > 0", sc.id));
            }
            if !(sc.t >= dt) {
                errors.push(format!("scenario '{}': t = {} must be >= dt", sc.id, sc.t));
            }
            if sc.n_paths.unwrap_or(self.defaults.n_paths) < 2 {
                errors.push(format!("scenario '{}': need at least 2 paths", sc.id));
            }
            if sc.checks.is_empty() {
                errors.push(format!("scenario '{}': no checks listed", sc.id));
            }
            match sc.build_model() {
                Ok(m) => {
                    if !m.contains(sc.x) {
                        errors.push(format!(
                            "scenario '{}': x = {:?} is outside the domain",
                            sc.id, sc.x
                        ));
                    }
                    if !m.contains(sc.y) {
                        errors.push(format!(
                            "scenario '{}': y = {:?} is outside the domain",
                            sc.id, sc.y
                        ));
                    }
                }
                Err(e) => errors.push(format!("scenario '{}': {e}", sc.id)),
            }
        }
        errors
    }

    /// Resolve the configured scenarios into runnable ones.
    pub fn build(&self, ov: &Overrides) -> Result<Vec<Scenario>> {
        let mut out = Vec::new();
        for sc in &self.scenarios {
            if let Some(only) = &ov.scenario {
                if &sc.id != only {
                    continue;
                }
            }
            out.push(sc.build_scenario(&self.defaults, ov)?);
        }
        if let Some(only) = &ov.scenario {
            if out.is_empty() {
                return Err(CoreError::Config(vec![format!(
                    "no scenario named '{only}' in suite '{}'",
                    self.suite
                )]));
            }
        }
        Ok(out)
    }
}

impl ScenarioConfig {
    pub fn build_model(&self) -> Result<ManifoldModel> {
        ManifoldModel::new(self.family, self.drift, self.r0, self.theta, self.k_cert)
    }

    pub fn build_scenario(&self, d: &Defaults, ov: &Overrides) -> Result<Scenario> {
        let model = self.build_model()?;
        let phi = PhiProfile::new(self.construction, &model)?;
        Ok(Scenario {
            id: self.id.clone(),
            k_lower: self.k_lower.unwrap_or(model.ric_bound),
            model,
            phi,
            f: self.f,
            x: self.x,
            y: self.y,
            t: self.t,
            p: self.p,
            beta: self.beta,
            n_paths: ov.n_paths.or(self.n_paths).unwrap_or(d.n_paths),
            n_atoms: self.n_atoms.unwrap_or(d.n_atoms),
            dt: ov.dt.or(self.dt).unwrap_or(d.dt),
            seed: ov.seed.or(self.seed).unwrap_or(d.seed),
            k_inflate: self.k_inflate,
            w2_band: d.w2_band,
            tci_band: d.tci_band,
            constants_mode: ov.constants.unwrap_or(d.constants),
            checks: self.checks.clone(),
        })
    }
}

/// The registered default suite. Covers the convex flat baseline, the
/// non-convex disk exterior with the constructed conformal factor, both
/// convex and past-hemisphere spherical caps, and a hyperbolic band.
pub const DEFAULT_SUITE: &str = r#"
suite = "default"

[defaults]
seed = 42
n_paths = 20000
n_atoms = 1024
dt = 2e-3
w2_band = 0.12
tci_band = 0.05
constants = "empirical"

[[scenarios]]
id = "flat_grad"
family = { family = "half_plane" }
r0 = 1.0
x = [0.0, 2.0]
y = [0.5, 2.0]
t = 0.25
f = { kind = "linear", a = [1.0, 0.0], b = 0.0 }
checks = ["grad_uniform", "grad_lp", "grad_l2_heat"]

[[scenarios]]
id = "flat_harnack"
family = { family = "half_plane" }
r0 = 1.0
x = [0.0, 2.0]
y = [0.3, 2.0]
t = 0.5
f = { kind = "bump", center = [0.0, 2.0], width = 1.0, height = 1.0 }
checks = ["log_harnack", "power_harnack"]

[[scenarios]]
id = "flat_w2"
family = { family = "half_plane" }
r0 = 1.0
x = [0.0, 2.0]
y = [0.5, 2.0]
t = 0.25
f = { kind = "one" }
checks = ["w2_contraction"]

[[scenarios]]
id = "flat_tci"
family = { family = "half_plane" }
r0 = 1.0
x = [0.0, 2.0]
y = [0.5, 2.0]
t = 0.5
beta = 0.5
f = { kind = "one" }
checks = ["tci_i", "tci_i_prime", "tci_ii", "tci_cor_i", "tci_cor_i_prime", "tci_convex_form"]

[[scenarios]]
id = "disk_grad"
family = { family = "disk_exterior", radius = 2.0 }
r0 = 1.0
construction = "new_modifier"
x = [3.5, 0.0]
y = [3.0, 1.0]
t = 0.25
f = { kind = "boundary_distance" }
checks = ["grad_uniform", "grad_lp", "grad_l2_heat"]

[[scenarios]]
id = "disk_harnack"
family = { family = "disk_exterior", radius = 2.0 }
r0 = 1.0
construction = "new_modifier"
x = [3.5, 0.0]
y = [3.2, 0.6]
t = 0.5
f = { kind = "bump", center = [3.5, 0.0], width = 1.0, height = 1.0 }
checks = ["log_harnack", "power_harnack"]

[[scenarios]]
id = "disk_w2"
family = { family = "disk_exterior", radius = 2.0 }
r0 = 1.0
construction = "new_modifier"
x = [3.5, 0.0]
y = [3.0, 1.0]
t = 0.25
f = { kind = "one" }
checks = ["w2_contraction"]

[[scenarios]]
id = "disk_tci"
family = { family = "disk_exterior", radius = 2.0 }
r0 = 1.0
construction = "new_modifier"
x = [3.5, 0.0]
y = [3.0, 1.0]
t = 0.5
beta = 0.5
n_atoms = 512
f = { kind = "one" }
checks = ["tci_i", "tci_i_prime", "tci_ii", "tci_cor_i", "tci_cor_i_prime"]

[[scenarios]]
id = "cap_convex"
family = { family = "sphere_cap", k = 1.0, alpha = 1.0 }
r0 = 0.5
x = [0.3, 1.0]
y = [0.5, 1.0]
t = 0.25
f = { kind = "linear", a = [1.0, 0.0], b = 0.0 }
checks = ["grad_uniform", "w2_contraction"]

[[scenarios]]
id = "cap_nonconvex"
family = { family = "sphere_cap", k = 1.0, alpha = 1.85 }
r0 = 1.0
theta = 0.1
construction = "new_modifier"
x = [0.4, 0.0]
y = [0.6, 0.3]
t = 0.5
beta = 0.5
n_atoms = 512
f = { kind = "one" }
checks = ["tci_ordering", "tci_i", "tci_i_prime", "tci_ii"]

[[scenarios]]
id = "hyperbolic_grad"
family = { family = "hyperbolic_band", curv = 1.0, width = 0.5 }
r0 = 0.5
construction = "new_modifier"
x = [0.0, 1.5]
y = [0.3, 1.5]
t = 0.25
f = { kind = "linear", a = [0.0, 1.0], b = 0.0 }
checks = ["grad_uniform", "grad_lp"]
"#;

/// A copy of the flat gradient scenario with the curvature constant
/// deliberately inflated; running it must fail.
pub const CANARY_SUITE: &str = r#"
suite = "canary"

[defaults]
seed = 42
n_paths = 4000
dt = 2e-3

[[scenarios]]
id = "canary_inflated_k"
family = { family = "half_plane" }
r0 = 1.0
x = [0.0, 2.0]
y = [0.5, 2.0]
t = 0.25
k_inflate = 10.0
f = { kind = "linear", a = [1.0, 0.0], b = 0.0 }
checks = ["grad_uniform"]
"#;

pub fn default_suite() -> SuiteConfig {
    SuiteConfig::parse(DEFAULT_SUITE).expect("embedded default suite must parse")
}

pub fn canary_suite() -> SuiteConfig {
    SuiteConfig::parse(CANARY_SUITE).expect("embedded canary suite must parse")
}
