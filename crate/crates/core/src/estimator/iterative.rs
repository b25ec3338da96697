use rand::Rng;

use super::candidates::{candidates, select_consistent};
use super::initializer::{initialize_from_actives, INITIALIZER_PILOTS};
use super::{EstimationResult, EstimatorConfig, SceneSounder, Sounder};
use crate::channel::{ChannelScene, LinearPhase};
use crate::error::{Error, Result};
use crate::geometry::LisConfig;

/// Null-recovery shifts attempted before a round gives up.
pub const MAX_NULL_SHIFTS: usize = 4;

/// Moves a seed sitting on a pattern null toward the nearest peak:
/// `(β̂1 + 1/(2Kx), β̂2 + 1/(2Ky))`.
pub fn null_recovery(beta_hat1: f64, beta_hat2: f64, cfg: &LisConfig) -> (f64, f64) {
    (beta_hat1 + 0.5 / cfg.kx(), beta_hat2 + 0.5 / cfg.ky())
}

/// One five-pilot round around `(b1, b2)`. With `v = 1/Kx` the half-offset
/// shift is exactly [`null_recovery`].
fn five_pilot_round<S: Sounder + ?Sized>(sounder: &mut S, est: &EstimatorConfig, b1: f64, b2: f64) -> Result<(f64, f64)> {
    let (mut b1, mut b2) = (b1, b2);
    let mut y0 = sounder.sound(LinearPhase::steer(b1, b2))?.norm();
    let mut shifts = 0;
    while y0 < est.magnitude_floor {
        if shifts == MAX_NULL_SHIFTS {
            return Err(Error::EstimationFailure(format!(
                "center observation below {:e} after {shifts} null shifts",
                est.magnitude_floor
            )));
        }
        b1 += 0.5 * est.v;
        b2 += 0.5 * est.w;
        shifts += 1;
        y0 = sounder.sound(LinearPhase::steer(b1, b2))?.norm();
    }
    let yp = sounder.sound(LinearPhase::steer(b1 + est.v, b2))?.norm();
    let ym = sounder.sound(LinearPhase::steer(b1 - est.v, b2))?.norm();
    let zp = sounder.sound(LinearPhase::steer(b1, b2 + est.w))?.norm();
    let zm = sounder.sound(LinearPhase::steer(b1, b2 - est.w))?.norm();
    let a1 = select_consistent(&candidates(y0, yp, ym, b1, est.v))?;
    let a2 = select_consistent(&candidates(y0, zp, zm, b2, est.w))?;
    Ok((a1, a2))
}

fn clamp_unit(p: (f64, f64)) -> (f64, f64) {
    (p.0.clamp(-1.0, 1.0), p.1.clamp(-1.0, 1.0))
}

/// Single closed-form round from seed `(β̂1, β̂2)`: five pilots, plus one per
/// null shift if the seed sits on a null.
pub fn noiseless_estimate<S: Sounder + ?Sized>(
    sounder: &mut S,
    est: &EstimatorConfig,
    beta_hat1: f64,
    beta_hat2: f64,
) -> Result<EstimationResult> {
    est.validate()?;
    let start = sounder.pilots_used();
    let a = clamp_unit(five_pilot_round(sounder, est, beta_hat1, beta_hat2)?);
    Ok(EstimationResult {
        alpha1_hat: a.0,
        alpha2_hat: a.1,
        iterations: 1,
        pilots_used: sounder.pilots_used() - start,
        trace: vec![a],
        converged: true,
    })
}

/// Repeated five-pilot rounds, each seeded by the previous (clamped) estimate.
/// Stops once the squared change drops below `delta` or after `k_max` rounds.
pub fn iterative_estimate<S: Sounder + ?Sized>(
    sounder: &mut S,
    est: &EstimatorConfig,
    init: (f64, f64),
) -> Result<EstimationResult> {
    est.validate()?;
    let start = sounder.pilots_used();
    let mut current = clamp_unit(init);
    let mut trace = Vec::with_capacity(est.k_max);
    let mut converged = false;
    while trace.len() < est.k_max {
        let next = clamp_unit(five_pilot_round(sounder, est, current.0, current.1)?);
        let change = (next.0 - current.0).powi(2) + (next.1 - current.1).powi(2);
        trace.push(next);
        current = next;
        if change < est.delta {
            converged = true;
            break;
        }
    }
    Ok(EstimationResult {
        alpha1_hat: current.0,
        alpha2_hat: current.1,
        iterations: trace.len(),
        pilots_used: sounder.pilots_used() - start,
        trace,
        converged,
    })
}

/// Full far-field pipeline: three-pilot initializer, then the iterative
/// estimator through the whole surface.
pub fn estimate_far_field<R: Rng + ?Sized>(
    scene: &ChannelScene,
    est: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimationResult> {
    let init = initialize_from_actives(scene, est.pilot_power, rng)?;
    let mut sounder = SceneSounder::new(scene, est.pilot_power, rng);
    let mut result = iterative_estimate(&mut sounder, est, init)?;
    result.pilots_used += INITIALIZER_PILOTS;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::far_field_channel_sinc;
    use crate::estimator::{FarFieldForm, ModelSounder};
    use crate::geometry::UserGeometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_cfg() -> LisConfig {
        LisConfig::reference_30ghz()
    }

    /// Geometry with prescribed direction cosines.
    fn geom_for(d0: f64, a1: f64, a2: f64) -> UserGeometry {
        let s = (a1 * a1 + a2 * a2).sqrt();
        let phi = a2.atan2(a1).rem_euclid(std::f64::consts::TAU);
        UserGeometry::new(d0, s.asin(), phi).unwrap()
    }

    #[test]
    fn null_recovery_examples() {
        let cfg = LisConfig::new(0.01, 257, 257, 0.01 * 64.0 / 257.0, 0.001, 1.0).unwrap();
        let (b1, b2) = null_recovery(0.0, 0.0, &cfg);
        assert!((b1 - 0.0078125).abs() < 1e-15 && (b2 - 0.0078125).abs() < 1e-15);
        let again = null_recovery(b1, b2, &cfg);
        assert!((again.0 - 0.015625).abs() < 1e-15);

        let cfg = table_cfg();
        let g = geom_for(500.0, 0.3, -0.2);
        let null = 0.3 + 1.0 / cfg.kx();
        assert!(far_field_channel_sinc(&cfg, &g, null, -0.2).value.norm() < 1e-12);
        let (s1, s2) = null_recovery(null, -0.2, &cfg);
        assert!(far_field_channel_sinc(&cfg, &g, s1, s2).value.norm() > 1e-6);
    }

    #[test]
    fn model_consistent_recovery_is_exact() {
        let cfg = table_cfg();
        let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
        let g = geom_for(400.0, 0.3, -0.5);
        let mut s = ModelSounder::new(cfg.clone(), g, FarFieldForm::Sinc, 1.0);
        let r = noiseless_estimate(&mut s, &est, 0.305, -0.49).unwrap();
        assert!((r.alpha1_hat - 0.3).abs() < 1e-9 && (r.alpha2_hat + 0.5).abs() < 1e-9);
        assert_eq!(r.pilots_used, 5);
    }

    #[test]
    fn exact_channel_observations_at_200m() {
        let cfg = table_cfg();
        let g = geom_for(200.0, 0.3, -0.5);
        let scene = ChannelScene::los_only(cfg.clone(), g, 0.0).unwrap();
        let est = EstimatorConfig::for_surface(&cfg, 200.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = SceneSounder::new(&scene, 1.0, &mut rng);
        // A seed inside the main lobe; from (0, 0) the first round lands in a
        // side lobe and a second round is needed.
        let r = noiseless_estimate(&mut s, &est, 0.3 + 0.3 * est.v, -0.5 - 0.2 * est.w).unwrap();
        assert!((r.alpha1_hat - 0.3).abs() < 1e-3 && (r.alpha2_hat + 0.5).abs() < 1e-3, "{r:?}");
        let far = iterative_estimate(&mut s, &est, (0.0, 0.0)).unwrap();
        assert!((far.alpha1_hat - 0.3).abs() < 1e-3 && (far.alpha2_hat + 0.5).abs() < 1e-3, "{far:?}");
    }

    #[test]
    fn seed_on_null_still_succeeds() {
        let cfg = table_cfg();
        let g = geom_for(400.0, 0.3, -0.5);
        let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
        let mut s = ModelSounder::new(cfg.clone(), g, FarFieldForm::Sinc, 1.0);
        let r = noiseless_estimate(&mut s, &est, 0.3 + 1.0 / cfg.kx(), -0.5).unwrap();
        assert!((r.alpha1_hat - 0.3).abs() < 1e-6 && (r.alpha2_hat + 0.5).abs() < 1e-6, "{r:?}");
        assert_eq!(r.pilots_used, 6);
    }

    #[test]
    fn noiseless_iteration_confirms_then_stops() {
        let cfg = table_cfg();
        let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
        let mut s = ModelSounder::new(cfg.clone(), geom_for(400.0, -0.1, 0.6), FarFieldForm::Sinc, 1.0);
        let r = iterative_estimate(&mut s, &est, (-0.1 + 0.004, 0.6 - 0.003)).unwrap();
        assert_eq!(r.iterations, 2);
        assert!(r.converged);
        assert_eq!(r.pilots_used, 10);

        let one = iterative_estimate(&mut s, &est.with_iterations(1e-6, 1), (-0.096, 0.597)).unwrap();
        assert_eq!(one.iterations, 1);
        assert!(!one.converged);
    }

    #[test]
    fn iterates_are_clamped() {
        let cfg = table_cfg();
        let est = EstimatorConfig::for_surface(&cfg, 400.0, 1.0);
        let mut s = ModelSounder::new(cfg.clone(), geom_for(400.0, 0.999, 0.0), FarFieldForm::Sinc, 1.0);
        let r = iterative_estimate(&mut s, &est, (1.5, -3.0)).unwrap();
        for &(a, b) in &r.trace {
            assert!(a.abs() <= 1.0 && b.abs() <= 1.0);
        }
    }
}
