//! Surface-to-user channel models.
//!
//! [`exact_channel`] sums the spherical-wave contribution of every element and
//! is the reference for everything else. [`far_field_channel`] is the
//! closed-form sin-ratio product valid beyond the Fraunhofer distance, and
//! [`near_field_channel`] superposes per-tile far-field terms.

mod pattern;
mod profile;
mod scene;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::geometry::{distance_unchecked, exact_distance, fraunhofer_distance, LisConfig, TileGrid, UserGeometry};

pub use pattern::{dirichlet, geometric_sum, sinc, SERIES_THRESHOLD};
pub use profile::{linear_phase_profile, Aperture, LinearPhase, PhaseMatrix, PhaseProfile, Rect};
pub use scene::{
    complex_noise, observe_pilot, observe_pilot_on, single_element_observation, ChannelScene, NlosPath, NlosSpec,
    PilotObservation, SceneRng,
};

use profile::Segment;

/// Free-space amplitude `λ·√F / (4π·d)`.
#[inline]
pub fn path_amplitude(cfg: &LisConfig, distance: f64) -> f64 {
    cfg.wavelength * cfg.pattern_factor.sqrt() / (4.0 * PI * distance)
}

/// LoS coefficient between one element and the user.
pub fn los_element_channel(cfg: &LisConfig, geom: &UserGeometry, mx_idx: i64, my_idx: i64) -> Result<Complex64> {
    let d = exact_distance(cfg, geom, mx_idx, my_idx)?;
    Ok(Complex64::from_polar(path_amplitude(cfg, d), -cfg.k0() * d))
}

/// `Σ Γ·t` over every element.
pub fn exact_channel(cfg: &LisConfig, geom: &UserGeometry, profile: &PhaseProfile) -> Result<Complex64> {
    exact_channel_on(cfg, geom, profile, &Aperture::Full)
}

/// `Σ Γ·t` over the active elements only.
pub fn exact_channel_on(
    cfg: &LisConfig,
    geom: &UserGeometry,
    profile: &PhaseProfile,
    aperture: &Aperture,
) -> Result<Complex64> {
    profile.check(cfg)?;
    let active = aperture.rect(cfg)?;
    let k0 = cfg.k0();
    let scale = cfg.wavelength * cfg.pattern_factor.sqrt() / (4.0 * PI);
    let mut total = Complex64::new(0.0, 0.0);
    for (rect, seg) in profile.segments(cfg) {
        let Some(r) = rect.intersect(&active) else {
            continue;
        };
        for i in r.x.0..=r.x.1 {
            for j in r.y.0..=r.y.1 {
                let d = distance_unchecked(cfg, geom, i, j);
                let beta = match &seg {
                    Segment::Linear { params, center } => params.raw_phase(cfg, i - center.0, j - center.1),
                    Segment::Matrix(m) => m.get(i, j),
                };
                let (s, c) = (beta - k0 * d).sin_cos();
                total += Complex64::new(c, s) * (scale / d);
            }
        }
    }
    Ok(total)
}

/// Received power `pt·|H|²` under a given profile.
pub fn received_power(cfg: &LisConfig, geom: &UserGeometry, profile: &PhaseProfile, pt: f64) -> Result<f64> {
    if !(pt >= 0.0) {
        return domain(format!("transmit power must be non-negative, got {pt}"));
    }
    Ok(pt * exact_channel(cfg, geom, profile)?.norm_sqr())
}

/// Co-phasing profile `β = mod(k0·d, 2π)` for every element.
pub fn optimal_phases_exact(cfg: &LisConfig, geom: &UserGeometry) -> PhaseProfile {
    let k0 = cfg.k0();
    PhaseProfile::Full(PhaseMatrix::from_fn(cfg, |i, j| k0 * distance_unchecked(cfg, geom, i, j)))
}

/// Closed-form far-field channel value with a flag telling whether the user
/// actually lies beyond the Fraunhofer distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldChannel {
    pub value: Complex64,
    pub within_fraunhofer: bool,
}

fn far_field_prefactor(cfg: &LisConfig, distance: f64) -> Complex64 {
    Complex64::from_polar(path_amplitude(cfg, distance), -cfg.k0() * distance)
}

/// Far-field channel under the linear profile `(0, β1, β2)` as a product of
/// sin-ratios.
pub fn far_field_channel(cfg: &LisConfig, geom: &UserGeometry, beta1: f64, beta2: f64) -> FarFieldChannel {
    let kd = cfg.k0() * cfg.dr;
    let value = far_field_prefactor(cfg, geom.d0)
        * dirichlet(cfg.mx, kd * (geom.alpha1() - beta1))
        * dirichlet(cfg.my, kd * (geom.alpha2() - beta2));
    FarFieldChannel {
        value,
        within_fraunhofer: geom.d0 >= fraunhofer_distance(cfg),
    }
}

/// Continuous-aperture limit of [`far_field_channel`]: `Mx·My·sinc·sinc`.
pub fn far_field_channel_sinc(cfg: &LisConfig, geom: &UserGeometry, beta1: f64, beta2: f64) -> FarFieldChannel {
    let k0 = cfg.k0();
    let value = far_field_prefactor(cfg, geom.d0)
        * (cfg.mx * cfg.my) as f64
        * sinc(0.5 * k0 * cfg.lx() * (geom.alpha1() - beta1))
        * sinc(0.5 * k0 * cfg.ly() * (geom.alpha2() - beta2));
    FarFieldChannel {
        value,
        within_fraunhofer: geom.d0 >= fraunhofer_distance(cfg),
    }
}

/// Far-field channel of one tile under its tile-local linear profile.
pub fn tile_channel(
    cfg: &LisConfig,
    tiles: &TileGrid,
    geom: &UserGeometry,
    tile_index: usize,
    params: LinearPhase,
) -> Result<Complex64> {
    let tile = tiles.get(tile_index)?;
    let view = tile.user_view(cfg, geom);
    let kd = cfg.k0() * cfg.dr;
    Ok(far_field_prefactor(cfg, view.distance)
        * dirichlet(tile.mx(), kd * (view.alpha1 - params.beta1))
        * dirichlet(tile.my(), kd * (view.alpha2 - params.beta2))
        * Complex64::from_polar(1.0, -params.beta0))
}

/// Superposition of [`tile_channel`] over all tiles.
pub fn near_field_channel(
    cfg: &LisConfig,
    tiles: &TileGrid,
    geom: &UserGeometry,
    per_tile: &[LinearPhase],
) -> Result<Complex64> {
    if per_tile.len() != tiles.len() {
        return domain(format!("{} parameter triples for {} tiles", per_tile.len(), tiles.len()));
    }
    per_tile
        .iter()
        .enumerate()
        .map(|(k, p)| tile_channel(cfg, tiles, geom, k, *p))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_tile_grid, wrap_phase};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn cfg33() -> LisConfig {
        LisConfig::reference_30ghz().with_elements(33, 33).unwrap()
    }

    fn random_geom(rng: &mut impl Rng, d0: f64) -> UserGeometry {
        UserGeometry::new(d0, rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..TAU)).unwrap()
    }

    /// Independent per-element oracle: Cartesian distances, explicit weights.
    fn brute_channel(cfg: &LisConfig, geom: &UserGeometry, phase: impl Fn(i64, i64) -> f64) -> Complex64 {
        let u = geom.position();
        let mut h = Complex64::new(0.0, 0.0);
        for i in -cfg.half_x()..=cfg.half_x() {
            for j in -cfg.half_y()..=cfg.half_y() {
                let (x, y) = (i as f64 * cfg.dr, j as f64 * cfg.dr);
                let d = ((u[0] - x).powi(2) + (u[1] - y).powi(2) + u[2].powi(2)).sqrt();
                let t = Complex64::from_polar(cfg.wavelength * cfg.pattern_factor.sqrt() / (4.0 * PI * d), -TAU / cfg.wavelength * d);
                h += Complex64::from_polar(1.0, phase(i, j)) * t;
            }
        }
        h
    }

    #[test]
    fn single_element_examples() {
        let cfg = LisConfig::reference_30ghz();
        let g = UserGeometry::new(cfg.wavelength, 0.3, 0.2).unwrap();
        let t = los_element_channel(&cfg, &g, 0, 0).unwrap();
        assert!((t.norm() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((t.arg()).abs() < 1e-9);

        let dark = LisConfig { pattern_factor: 0.0, ..cfg };
        assert_eq!(los_element_channel(&dark, &g, 0, 0).unwrap().norm(), 0.0);

        let g = UserGeometry::new(25.0, 0.0, 0.0).unwrap();
        let t = los_element_channel(&cfg, &g, 0, 0).unwrap();
        assert!((t.norm() - 3.1830988618379e-5).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_surface() {
        let cfg = LisConfig::new(0.01, 1, 1, 0.0025, 0.002, 1.0).unwrap();
        let g = UserGeometry::new(cfg.wavelength, 0.0, 0.0).unwrap();
        let h = exact_channel(&cfg, &g, &linear_phase_profile(0.0, 0.0, 0.0)).unwrap();
        assert!((h - los_element_channel(&cfg, &g, 0, 0).unwrap()).norm() < 1e-16);
        let pr = received_power(&cfg, &g, &linear_phase_profile(0.0, 0.0, 0.0), 1.0).unwrap();
        assert!((pr - (1.0 / (4.0 * PI)).powi(2)).abs() < 1e-15);
        assert!((pr - 6.333e-3).abs() < 1e-6);
        assert_eq!(received_power(&cfg, &g, &linear_phase_profile(0.0, 0.0, 0.0), 0.0).unwrap(), 0.0);
        assert!(received_power(&cfg, &g, &linear_phase_profile(0.0, 0.0, 0.0), -1.0).is_err());

        let opt = optimal_phases_exact(&cfg, &g);
        assert!(opt.phase(&cfg, 0, 0).unwrap() < 1e-9 || opt.phase(&cfg, 0, 0).unwrap() > TAU - 1e-9);
    }

    #[test]
    fn exact_channel_matches_brute_force() {
        let cfg = LisConfig::reference_30ghz().with_elements(21, 15).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phases = PhaseMatrix::from_fn(&cfg, |_, _| rng.random_range(0.0..TAU));
        let profile = PhaseProfile::Full(phases.clone());
        for d0 in [0.3, 2.0, 40.0] {
            let g = random_geom(&mut rng, d0);
            let h = exact_channel(&cfg, &g, &profile).unwrap();
            let b = brute_channel(&cfg, &g, |i, j| phases.get(i, j));
            assert!((h - b).norm() / b.norm() < 1e-10);
        }
        let other = LisConfig::reference_30ghz().with_elements(5, 5).unwrap();
        assert!(exact_channel(&other, &random_geom(&mut rng, 3.0), &profile).is_err());
    }

    #[test]
    fn optimal_phases_cophase_all_terms() {
        let cfg = cfg33();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_geom(&mut rng, 3.0);
        let opt = optimal_phases_exact(&cfg, &g);
        let h = exact_channel(&cfg, &g, &opt).unwrap();
        let magnitude_sum: f64 = (-16..=16)
            .flat_map(|i| (-16..=16).map(move |j| (i, j)))
            .map(|(i, j)| los_element_channel(&cfg, &g, i, j).unwrap().norm())
            .sum();
        assert!((h.norm() - magnitude_sum).abs() / magnitude_sum < 1e-12);
        assert!(h.arg().abs() < 1e-6);
        if let PhaseProfile::Full(m) = &opt {
            assert!(m.phases().iter().all(|&b| (0.0..TAU).contains(&b)));
        }
        let best = h.norm();
        for _ in 0..200 {
            let p = PhaseProfile::Full(PhaseMatrix::from_fn(&cfg, |_, _| rng.random_range(0.0..TAU)));
            assert!(exact_channel(&cfg, &g, &p).unwrap().norm() <= best);
            let lp = linear_phase_profile(rng.random_range(0.0..TAU), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            assert!(exact_channel(&cfg, &g, &lp).unwrap().norm() <= best);
        }
    }

    #[test]
    fn received_power_ignores_global_phase() {
        let cfg = cfg33();
        let g = UserGeometry::new(4.0, 0.5, 2.0).unwrap();
        let base = linear_phase_profile(0.0, 0.2, -0.3);
        let shifted = linear_phase_profile(1.234, 0.2, -0.3);
        let a = received_power(&cfg, &g, &base, 1.0).unwrap();
        let b = received_power(&cfg, &g, &shifted, 1.0).unwrap();
        assert!((a - b).abs() / a < 1e-9, "{a} {b}");
    }

    #[test]
    fn far_field_peak_and_nulls() {
        let cfg = LisConfig::reference_30ghz();
        let g = UserGeometry::new(200.0, 0.7, 4.0).unwrap();
        let peak = far_field_channel(&cfg, &g, g.alpha1(), g.alpha2());
        let expected = path_amplitude(&cfg, 200.0) * (257.0 * 257.0);
        assert!((peak.value.norm() - expected).abs() / expected < 1e-12);
        assert!(peak.within_fraunhofer);
        let sinc_peak = far_field_channel_sinc(&cfg, &g, g.alpha1(), g.alpha2());
        assert!((sinc_peak.value.norm() - expected).abs() / expected < 1e-12);

        for q in 1..4 {
            let b1 = g.alpha1() + q as f64 / cfg.kx();
            let null = far_field_channel(&cfg, &g, b1, g.alpha2()).value.norm();
            assert!(null / expected < 1e-12, "q = {q}");
            let null = far_field_channel_sinc(&cfg, &g, g.alpha1(), g.alpha2() - q as f64 / cfg.ky()).value.norm();
            assert!(null / expected < 1e-12);
        }
        let near = UserGeometry::new(100.0, 0.7, 4.0).unwrap();
        assert!(!far_field_channel(&cfg, &near, 0.0, 0.0).within_fraunhofer);
    }

    #[test]
    fn far_field_matches_exact_at_200m() {
        let cfg = LisConfig::reference_30ghz();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let g = random_geom(&mut rng, 200.0);
            // Main-lobe neighbourhood, where the relative comparison is meaningful.
            let b1 = g.alpha1() + rng.random_range(-0.5..0.5) / cfg.kx();
            let b2 = g.alpha2() + rng.random_range(-0.5..0.5) / cfg.ky();
            let ff = far_field_channel(&cfg, &g, b1, b2).value.norm();
            let ex = exact_channel(&cfg, &g, &linear_phase_profile(0.0, b1, b2)).unwrap().norm();
            assert!((ff - ex).abs() / ex < 0.02, "{ff} vs {ex}");
        }
    }

    #[test]
    fn far_field_argmax_on_grid() {
        let cfg = cfg33();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid: Vec<f64> = (0..41).map(|k| -1.0 + 2.0 * k as f64 / 40.0).collect();
        for _ in 0..20 {
            let g = random_geom(&mut rng, 10.0);
            let mut best = (0.0, 0.0, f64::MIN);
            for &b1 in &grid {
                for &b2 in &grid {
                    let v = far_field_channel(&cfg, &g, b1, b2).value.norm();
                    if v > best.2 {
                        best = (b1, b2, v);
                    }
                }
            }
            let nearest = |a: f64| grid.iter().copied().min_by(|x, y| (x - a).abs().total_cmp(&(y - a).abs())).unwrap();
            assert_eq!((best.0, best.1), (nearest(g.alpha1()), nearest(g.alpha2())));
        }
    }

    #[test]
    fn tile_channel_degenerate_and_offset() {
        let cfg = cfg33();
        let g = UserGeometry::new(12.0, 0.4, 0.9).unwrap();
        let single = TileGrid::with_tiles(&cfg, 1).unwrap();
        let t = tile_channel(&cfg, &single, &g, 0, LinearPhase::steer(0.1, 0.2)).unwrap();
        let f = far_field_channel(&cfg, &g, 0.1, 0.2).value;
        assert!((t - f).norm() / f.norm() < 1e-12);
        let flipped = tile_channel(&cfg, &single, &g, 0, LinearPhase::new(PI, 0.1, 0.2)).unwrap();
        assert!((flipped + t).norm() / t.norm() < 1e-12);
        assert!(tile_channel(&cfg, &single, &g, 1, LinearPhase::default()).is_err());
        let nf = near_field_channel(&cfg, &single, &g, &[LinearPhase::steer(0.1, 0.2)]).unwrap();
        assert_eq!(nf, t);
        assert!(near_field_channel(&cfg, &single, &g, &[]).is_err());
    }

    #[test]
    fn tile_channel_matches_restricted_exact_sum() {
        let cfg = LisConfig::reference_30ghz();
        let tiles = make_tile_grid(&cfg, 50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_geom(&mut rng, 50.0);
        let params: Vec<LinearPhase> = tiles
            .tiles()
            .iter()
            .map(|t| {
                let v = t.user_view(&cfg, &g);
                LinearPhase::new(rng.random_range(0.0..TAU), v.alpha1 + 0.003, v.alpha2 - 0.002)
            })
            .collect();
        let profile = PhaseProfile::tiled(tiles.clone(), params.clone()).unwrap();
        for (k, t) in tiles.tiles().iter().enumerate() {
            let model = tile_channel(&cfg, &tiles, &g, k, params[k]).unwrap();
            let exact = exact_channel_on(&cfg, &g, &profile, &Aperture::tile(t)).unwrap();
            assert!((model.norm() - exact.norm()).abs() / exact.norm() < 0.02);
        }
    }

    #[test]
    fn cophased_tiles_add_in_magnitude() {
        let cfg = LisConfig::reference_30ghz();
        let tiles = make_tile_grid(&cfg, 50.0).unwrap();
        let g = UserGeometry::new(50.0, 0.3, 1.0).unwrap();
        let mut params = Vec::new();
        let mut magnitude_sum = 0.0;
        for (k, t) in tiles.tiles().iter().enumerate() {
            let v = t.user_view(&cfg, &g);
            let h = tile_channel(&cfg, &tiles, &g, k, LinearPhase::steer(v.alpha1, v.alpha2)).unwrap();
            magnitude_sum += h.norm();
            params.push(LinearPhase::new(wrap_phase(h.arg()), v.alpha1, v.alpha2));
        }
        let nf = near_field_channel(&cfg, &tiles, &g, &params).unwrap();
        assert!((nf.norm() - magnitude_sum).abs() / magnitude_sum < 1e-12);
    }
}
