//! Experiment configuration: a TOML document with a required `[scenario]`
//! section and optional `[run]`, `[solver]` and `[output]` sections.
//!
//! Canonical text is the TOML serialization with `None` fields omitted and
//! keys sorted within each section; the config hash is the SHA-256 of that
//! text with `[output]` cleared, so moving the output directory does not
//! change file names.

use frachs::scenario::{NonlinearityPreset, PotentialPreset, Scenario, ScenarioParams};
use frachs::solver::SolverConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PRESETS: [&str; 5] = ["default", "envelope", "rotated", "no-nonlinearity", "regularized"];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, reason: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("invalid value for `{field}`: {reason}"))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    #[serde(default, skip_serializing_if = "RunSection::is_empty")]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "SolverSection::is_empty")]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "OutputSection::is_empty")]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub preset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sobolev_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steepness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishing_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_scale: Option<f64>,
}

/// Lambda values are either absolute (`lambda`, `lambdas`) or multiples of
/// the threshold (`lambda_factor`, `lambda_factors`); not both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_factors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest_trials: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub armijo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_backtracks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory: Option<usize>,
    /// `false` turns the spectral preconditioner off.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrink: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl RunSection {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

impl SolverSection {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

impl OutputSection {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// How the lambda values of a run are given.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSpec {
    Absolute(Vec<f64>),
    Factors(Vec<f64>),
}

impl LambdaSpec {
    /// The numbers as written, before scaling by the threshold.
    pub fn values(&self) -> &[f64] {
        match self {
            Self::Absolute(v) | Self::Factors(v) => v,
        }
    }

    pub fn resolve(&self, threshold: f64) -> Vec<f64> {
        match self {
            Self::Absolute(v) => v.clone(),
            Self::Factors(f) => f.iter().map(|x| x * threshold).collect(),
        }
    }
}

/// Fully resolved parameters, echoed into every manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Effective {
    pub scenario: ScenarioParams,
    pub solver: SolverConfig,
    pub single_lambda: LambdaSpec,
    pub ladder: LambdaSpec,
    pub selftest_trials: usize,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The built-in default experiment.
    pub fn preset(name: &str) -> Self {
        Self { scenario: ScenarioSection { preset: name.into(), ..Default::default() }, ..Default::default() }
    }

    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical text with the output section removed, hex encoded.
    pub fn hash(&self) -> String {
        let stripped = Self { output: OutputSection::default(), ..self.clone() };
        hex::encode(Sha256::digest(stripped.canonical().as_bytes()))
    }

    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }

    pub fn resolve(&self) -> Result<Effective, ConfigError> {
        let s = &self.scenario;
        let mut params = ScenarioParams::default();
        match s.preset.as_str() {
            "default" => {}
            "envelope" => params.potential = PotentialPreset::Envelope,
            "rotated" => params.potential = PotentialPreset::Rotated { angle: 0.4 },
            "no-nonlinearity" => params.nonlinearity = NonlinearityPreset::Zero,
            "regularized" => {
                params.nonlinearity = NonlinearityPreset::PowerRegularized;
                params.eps = 1e-2;
            }
            other => return Err(invalid("scenario.preset", format!("unknown preset {other:?}; expected one of {PRESETS:?}"))),
        }
        if let Some(name) = &s.potential {
            let angle = s.angle.unwrap_or(0.4);
            params.potential = PotentialPreset::parse(name, angle)
                .ok_or_else(|| invalid("scenario.potential", format!("unknown potential {name:?}")))?;
        } else if let (Some(a), PotentialPreset::Rotated { .. }) = (s.angle, params.potential) {
            params.potential = PotentialPreset::Rotated { angle: a };
        }
        if let Some(name) = &s.nonlinearity {
            params.nonlinearity = NonlinearityPreset::parse(name)
                .ok_or_else(|| invalid("scenario.nonlinearity", format!("unknown nonlinearity {name:?}")))?;
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut params.alpha, s.alpha);
        set(&mut params.vanishing.0, s.vanishing_start);
        set(&mut params.vanishing.1, s.vanishing_end);
        set(&mut params.kernel.0, s.kernel_start);
        set(&mut params.kernel.1, s.kernel_end);
        set(&mut params.k, s.k);
        set(&mut params.steepness, s.steepness);
        set(&mut params.p, s.p);
        set(&mut params.eps, s.eps);
        set(&mut params.delta, s.delta);
        set(&mut params.xi_scale, s.xi_scale);
        set(&mut params.domain, s.domain);
        params.nu = s.nu.or(params.nu);
        params.grid_n = s.grid_n.unwrap_or(params.grid_n);
        params.sobolev_trials = s.sobolev_trials.unwrap_or(params.sobolev_trials);
        if let Some(seed) = self.run.seed {
            params.seed = seed;
        }
        validate_scenario(&params)?;

        let v = &self.solver;
        let base = SolverConfig::default();
        let solver = SolverConfig {
            max_iters: v.max_iters.unwrap_or(base.max_iters),
            grad_tol: v.grad_tol.unwrap_or(base.grad_tol),
            armijo: v.armijo.unwrap_or(base.armijo),
            shrink: v.shrink.unwrap_or(base.shrink),
            max_backtracks: v.max_backtracks.unwrap_or(base.max_backtracks),
            memory: v.memory.unwrap_or(base.memory),
            precondition_shift: match v.precondition {
                Some(false) => None,
                _ => v.precondition_shift.or(base.precondition_shift),
            },
            seed: params.seed,
            probes: v.probes.unwrap_or(base.probes),
            warm_start: v.warm_start.unwrap_or(base.warm_start),
            threads: v.threads.unwrap_or(base.threads),
        };
        solver.validate().map_err(|e| ConfigError(format!("invalid solver settings: {e}")))?;

        let r = &self.run;
        let single_lambda = match (r.lambda, r.lambda_factor) {
            (Some(_), Some(_)) => return Err(invalid("run.lambda", "give either lambda or lambda_factor, not both")),
            (Some(l), None) => LambdaSpec::Absolute(vec![l]),
            (None, Some(f)) => LambdaSpec::Factors(vec![f]),
            (None, None) => LambdaSpec::Factors(vec![10.0]),
        };
        let ladder = match (&r.lambdas, &r.lambda_factors) {
            (Some(_), Some(_)) => return Err(invalid("run.lambdas", "give either lambdas or lambda_factors, not both")),
            (Some(l), None) => LambdaSpec::Absolute(l.clone()),
            (None, Some(f)) => LambdaSpec::Factors(f.clone()),
            (None, None) => LambdaSpec::Factors(vec![1.0, 10.0, 100.0, 1000.0]),
        };
        for (name, spec) in [("run.lambda", &single_lambda), ("run.lambdas", &ladder)] {
            if spec.values().iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(invalid(name, "values must be positive and finite"));
            }
        }
        let selftest_trials = r.selftest_trials.unwrap_or(50);
        if selftest_trials == 0 {
            return Err(invalid("run.selftest_trials", "must be positive"));
        }
        Ok(Effective { scenario: params, solver, single_lambda, ladder, selftest_trials })
    }
}

fn validate_scenario(params: &ScenarioParams) -> Result<(), ConfigError> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(invalid("scenario.alpha", format!("must lie in (0, 1), got {}", params.alpha)));
    }
    if !(params.p > 1.0 && params.p < 2.0) {
        return Err(invalid("scenario.p", format!("must lie in (1, 2), got {}", params.p)));
    }
    if !(params.domain > 0.0 && params.domain.is_finite()) {
        return Err(invalid("scenario.domain", "must be positive"));
    }
    if params.grid_n < 8 || !params.grid_n.is_power_of_two() {
        return Err(invalid("scenario.grid_n", format!("must be a power of two >= 8, got {}", params.grid_n)));
    }
    if params.sobolev_trials == 0 {
        return Err(invalid("scenario.sobolev_trials", "must be positive"));
    }
    Scenario::<f64>::build(params.clone()).map(|_| ()).map_err(|e| ConfigError(format!("invalid scenario: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[solver]
max_iters = 300
warm_start = false

[scenario]
preset = "default"
p = 1.4
alpha = 0.8

[run]
lambda_factors = [1.0, 4.0, 16.0]
seed = 11
"#;

    #[test]
    fn canonical_text_round_trips() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        let text = c.canonical();
        let again = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.canonical(), text);
        assert!(text.find("alpha").unwrap() < text.find("p =").unwrap());
        assert!(text.find("[scenario]").unwrap() < text.find("[run]").unwrap());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut c = ExperimentConfig::parse(SAMPLE).unwrap();
        let h = c.hash();
        c.output.dir = Some("elsewhere".into());
        assert_eq!(c.hash(), h);
        c.run.seed = Some(12);
        assert_ne!(c.hash(), h);
        assert_eq!(h.len(), 64);
    }

    #[test]
    fn overrides_reach_effective_parameters() {
        let e = ExperimentConfig::parse(SAMPLE).unwrap().resolve().unwrap();
        assert_eq!(e.scenario.p, 1.4);
        assert_eq!(e.scenario.alpha, 0.8);
        assert_eq!(e.scenario.seed, 11);
        assert_eq!(e.solver.seed, 11);
        assert_eq!(e.solver.max_iters, 300);
        assert!(!e.solver.warm_start);
        assert_eq!(e.ladder, LambdaSpec::Factors(vec![1.0, 4.0, 16.0]));
        assert_eq!(e.single_lambda.resolve(2.0), vec![20.0]);
    }

    #[test]
    fn missing_preset_is_rejected() {
        let err = ExperimentConfig::parse("[scenario]\nalpha = 0.7\n").unwrap_err();
        assert!(err.0.contains("preset"), "{err}");
    }

    #[test]
    fn unknown_field_is_rejected_with_location() {
        let err = ExperimentConfig::parse("[scenario]\npreset = \"default\"\nalpah = 0.7\n").unwrap_err();
        assert!(err.0.contains("alpah") && err.0.contains("line 3"), "{err}");
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        for (key, value) in [("alpha", "1.5"), ("p", "2.5"), ("grid_n", "1000"), ("k", "-1.0")] {
            let text = format!("[scenario]\npreset = \"default\"\n{key} = {value}\n");
            assert!(ExperimentConfig::parse(&text).unwrap().resolve().is_err(), "{key}");
        }
        let both = "[scenario]\npreset = \"default\"\n[run]\nlambda = 3.0\nlambda_factor = 2.0\n";
        assert!(ExperimentConfig::parse(both).unwrap().resolve().is_err());
        assert!(ExperimentConfig::preset("nope").resolve().is_err());
    }
}
