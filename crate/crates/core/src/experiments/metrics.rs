use crate::channel::{received_power, ChannelScene, PhaseProfile};
use crate::error::{domain, Result};

/// `log2(1 + P_r/N0)` with `P_r` from the LoS channel under `profile`.
pub fn achieved_rate(scene: &ChannelScene, profile: &PhaseProfile, data_power: f64) -> Result<f64> {
    if !(scene.noise_power > 0.0) {
        return domain("achieved rate needs a positive noise power");
    }
    let pr = received_power(&scene.cfg, &scene.geom, profile, data_power)?;
    Ok(rate_from_snr(pr / scene.noise_power))
}

pub fn rate_from_snr(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// Per-component mean squared error of `(α̂1 - α1, α̂2 - α2)` samples.
pub fn mse(errors: &[(f64, f64)]) -> Result<(f64, f64)> {
    if errors.is_empty() {
        return domain("mse of zero realizations");
    }
    let n = errors.len() as f64;
    let (s1, s2) = errors
        .iter()
        .fold((0.0, 0.0), |(a, b), &(e1, e2)| (a + e1 * e1, b + e2 * e2));
    Ok((s1 / n, s2 / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::optimal_phases_exact;
    use crate::geometry::{LisConfig, UserGeometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn snr_examples() {
        assert_eq!(rate_from_snr(1.0), 1.0);
        assert_eq!(rate_from_snr(0.0), 0.0);
        let cfg = LisConfig::reference_30ghz().with_elements(9, 9).unwrap();
        let s = ChannelScene::los_only(cfg, UserGeometry::new(10.0, 0.1, 0.1).unwrap(), 0.0).unwrap();
        assert!(achieved_rate(&s, &PhaseProfile::linear(Default::default()), 1.0).is_err());
    }

    #[test]
    fn table_one_perfect_rate() {
        let cfg = LisConfig::reference_30ghz();
        let n0 = 10f64.powf(-14.5);
        let s = ChannelScene::los_only(cfg.clone(), UserGeometry::new(200.0, 0.0, 0.0).unwrap(), n0).unwrap();
        let r = achieved_rate(&s, &optimal_phases_exact(&cfg, &s.geom), 1.0).unwrap();
        // Plug-in of the coherent maximum (λ·M/(4π·d0))², computed by hand:
        // 0.01·66049/(4π·200) = 0.2628006..., squared 0.0690642..., /N0.
        let amp = 0.01 * 66049.0 / (4.0 * std::f64::consts::PI * 200.0);
        let oracle = (1.0 + amp * amp / n0).log2();
        assert!((oracle - 44.3120386).abs() < 1e-6, "{oracle}");
        // The exact per-element distances differ slightly from d0.
        assert!((r - oracle).abs() < 1e-3, "{r} {oracle}");
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[(0.0, 0.0), (0.0, 0.0)]).unwrap(), (0.0, 0.0));
        let (a, b) = mse(&[(0.1, -0.2)]).unwrap();
        assert!((a - 0.01).abs() < 1e-15 && (b - 0.04).abs() < 1e-15);
        assert!(mse(&[]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Normal::new(0.0, 0.01).unwrap();
        let errs: Vec<(f64, f64)> = (0..1000).map(|_| (g.sample(&mut rng), g.sample(&mut rng))).collect();
        let (a, b) = mse(&errs).unwrap();
        assert!((a / 1e-4 - 1.0).abs() < 0.2 && (b / 1e-4 - 1.0).abs() < 0.2);
    }
}
