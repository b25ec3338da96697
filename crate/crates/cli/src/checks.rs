//! Fast self-checks behind `lisbt validate`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use lisbt::channel::{exact_channel, far_field_channel, geometric_sum, ChannelScene, PhaseProfile};
use lisbt::estimator::{estimate_far_field, noiseless_estimate, EstimatorConfig, FarFieldForm, ModelSounder};
use lisbt::experiments::{run_scenario, Scenario};
use lisbt::geometry::{fraunhofer_distance, LisConfig, UserGeometry};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_geom(rng: &mut impl Rng, d0: f64) -> UserGeometry {
    UserGeometry::new(d0, rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..TAU)).expect("valid draw")
}

fn geometric_sums(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for m in [3usize, 33, 257] {
        for _ in 0..200 {
            let a = rng.random_range(0.01..PI);
            let start = -((m as f64 - 1.0) / 2.0);
            let direct: Complex64 = (0..m).map(|k| Complex64::from_polar(1.0, (start + k as f64) * a)).sum();
            worst = worst.max((direct - geometric_sum(start, m, a)).norm());
        }
    }
    check("geometric sum identity", worst < 1e-10, format!("max |diff| = {worst:.2e}"))
}

fn far_field_agreement(rng: &mut ChaCha8Rng) -> lisbt::Result<Check> {
    let cfg = LisConfig::reference_30ghz().with_elements(33, 33)?;
    let d0 = 2.0 * fraunhofer_distance(&cfg);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..20 {
        let g = random_geom(rng, d0);
        let (b1, b2) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let ff = far_field_channel(&cfg, &g, b1, b2).value.norm();
        let ex = exact_channel(&cfg, &g, &PhaseProfile::linear(lisbt::channel::LinearPhase::steer(b1, b2)))?.norm();
        num += (ff - ex).powi(2);
        den += ex * ex;
    }
    let rel = (num / den).sqrt();
    Ok(check("far-field magnitude agreement", rel < 0.02, format!("ensemble relative error = {rel:.2e}")))
}

fn five_pilot_exactness(rng: &mut ChaCha8Rng) -> lisbt::Result<Check> {
    let cfg = LisConfig::reference_30ghz();
    let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
    let mut worst = 0.0f64;
    let mut pilots_ok = true;
    for _ in 0..200 {
        let g = random_geom(rng, 400.0);
        let mut s = ModelSounder::new(cfg.clone(), g.clone(), FarFieldForm::Sinc, 1.0);
        let r = noiseless_estimate(&mut s, &est, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))?;
        pilots_ok &= r.pilots_used >= 5;
        worst = worst.max((r.alpha1_hat - g.alpha1()).abs().max((r.alpha2_hat - g.alpha2()).abs()));
    }
    Ok(check(
        "noiseless five-pilot recovery",
        worst < 1e-9 && pilots_ok,
        format!("max error = {worst:.2e}"),
    ))
}

fn null_seed() -> lisbt::Result<Check> {
    let cfg = LisConfig::reference_30ghz();
    let g = UserGeometry::new(400.0, 0.4, 1.1)?;
    let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
    let mut s = ModelSounder::new(cfg.clone(), g.clone(), FarFieldForm::Sinc, 1.0);
    let r = noiseless_estimate(&mut s, &est, g.alpha1() + 1.0 / cfg.kx(), g.alpha2())?;
    let err = (r.alpha1_hat - g.alpha1()).abs().max((r.alpha2_hat - g.alpha2()).abs());
    Ok(check("null recovery", err < 1e-6, format!("error = {err:.2e}")))
}

fn pilot_accounting(rng: &mut ChaCha8Rng) -> lisbt::Result<Check> {
    let cfg = LisConfig::reference_30ghz().with_elements(33, 33)?;
    let mut ok = true;
    for k in 1..=4 {
        let scene = ChannelScene::los_only(cfg.clone(), random_geom(rng, 100.0), 1e-15)?;
        let est = EstimatorConfig::for_surface(&cfg, 100.0, 0.1).with_iterations(1e-300, k);
        let r = estimate_far_field(&scene, &est, rng)?;
        ok &= r.pilots_used == 3 + 5 * k && r.iterations == k;
    }
    Ok(check("pilot accounting 3 + 5k", ok, "k = 1..4".into()))
}

fn determinism() -> lisbt::Result<Check> {
    let scn = Scenario {
        cfg: LisConfig::reference_30ghz().with_elements(17, 17)?,
        realizations: 4,
        ..Scenario::reference("determinism")
    };
    let same = run_scenario(&scn)? == run_scenario(&scn)?;
    Ok(check("seeded runs repeat", same, "two runs of a 4-realization scenario".into()))
}

/// Runs every check; a check that errors counts as failed.
pub fn run_checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let or_fail = |name: &'static str, r: lisbt::Result<Check>| {
        r.unwrap_or_else(|e| check(name, false, e.to_string()))
    };
    vec![
        geometric_sums(&mut rng),
        or_fail("far-field magnitude agreement", far_field_agreement(&mut rng)),
        or_fail("noiseless five-pilot recovery", five_pilot_exactness(&mut rng)),
        or_fail("null recovery", null_seed()),
        or_fail("pilot accounting 3 + 5k", pilot_accounting(&mut rng)),
        or_fail("seeded runs repeat", determinism()),
    ]
}
