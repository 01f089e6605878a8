#![allow(dead_code)]

use std::sync::OnceLock;

use frachs::energy::Problem;
use frachs::fracops::SampledSignal;
use frachs::random::SignalSampler;
use frachs::scenario::{Scenario, ScenarioParams};
use frachs::spaces::EmbeddingConstants;

pub struct Fixture {
    pub scenario: Scenario<f64>,
    pub constants: EmbeddingConstants<f64>,
}

impl Fixture {
    pub fn problem(&self, lambda_factor: f64) -> Problem<f64> {
        self.scenario.problem(self.constants, lambda_factor * self.constants.lambda_threshold).unwrap()
    }
}

pub fn default_fixture() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let scenario = Scenario::build(ScenarioParams::default()).unwrap();
        let constants = scenario.constants().unwrap();
        Fixture { scenario, constants }
    })
}

/// Localized packet near the wells, scaled to sup norm `amplitude`.
pub fn packet(rng: &mut SignalSampler, fx: &Fixture, amplitude: f64) -> SampledSignal<f64> {
    let center = rng.uniform(-1.5, 2.0);
    let width = rng.uniform(0.15, 1.5);
    let u = rng.localized(fx.scenario.grid, fx.scenario.dim(), center, width);
    let sup = u.sup_norm();
    u.scaled(amplitude / sup)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `(u, phi)` sharing a Gaussian envelope with `u` of one sign and
/// `|phi| <= K |u|`, so `u + h phi` never crosses zero for small `h`.
pub fn sign_preserving_pair(rng: &mut SignalSampler, fx: &Fixture, amplitude: f64) -> (SampledSignal<f64>, SampledSignal<f64>) {
    let center = rng.uniform(-1.0, 1.5);
    let width = rng.uniform(0.2, 1.5);
    let freq = rng.uniform(0.0, 6.0);
    let phase = rng.uniform(0.0, std::f64::consts::TAU);
    let sign = if rng.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
    let c: [f64; 3] = [rng.normal(), rng.normal(), rng.normal()];
    let grid = fx.scenario.grid;
    let env = move |t: f64| {
        let x = (t - center) / width;
        (x, (-x * x).exp())
    };
    let u = SampledSignal::from_scalar_fn(grid, |t| {
        let (x, e) = env(t);
        sign * amplitude * e * (1.5 + (freq * x + phase).sin())
    })
    .unwrap();
    let phi = SampledSignal::from_scalar_fn(grid, |t| {
        let (x, e) = env(t);
        e * (c[0] + c[1] * x + c[2] * (freq * x).cos())
    })
    .unwrap();
    (u, phi)
}
