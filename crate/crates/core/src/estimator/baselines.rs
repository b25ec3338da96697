//! Comparison baselines: exhaustive grid search and a bisection beam search.

use rand::Rng;

use super::{EstimationResult, SceneSounder, Sounder};
use crate::channel::{Aperture, ChannelScene, LinearPhase};
use crate::error::{domain, Result};

/// Coordinate `i` of an `n`-point uniform grid over `[-1, 1]`.
pub fn grid_point(i: usize, n: usize) -> f64 {
    if n == 1 {
        0.0
    } else {
        -1.0 + 2.0 * i as f64 / (n - 1) as f64
    }
}

/// Steers the whole surface to every point of a `grid_n x grid_n` grid and
/// returns the strongest.
pub fn baseline_grid_search<R: Rng + ?Sized>(
    scene: &ChannelScene,
    grid_n: usize,
    pilot_budget: usize,
    pilot_power: f64,
    rng: &mut R,
) -> Result<EstimationResult> {
    if grid_n == 0 || grid_n * grid_n > pilot_budget {
        return domain(format!("a {grid_n}x{grid_n} grid does not fit {pilot_budget} pilots"));
    }
    let mut sounder = SceneSounder::new(scene, pilot_power, rng);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid_n {
        for j in 0..grid_n {
            let (b1, b2) = (grid_point(i, grid_n), grid_point(j, grid_n));
            let mag = sounder.sound(LinearPhase::steer(b1, b2))?.norm();
            if mag > best.0 {
                best = (mag, b1, b2);
            }
        }
    }
    Ok(EstimationResult {
        alpha1_hat: best.1,
        alpha2_hat: best.2,
        iterations: 1,
        pilots_used: sounder.pilots_used(),
        trace: vec![(best.1, best.2)],
        converged: true,
    })
}

/// Largest odd element count whose beam half-width covers `half_width` in
/// direction-cosine units, clipped to `[1, max]`.
fn beam_elements(wavelength_over_dr: f64, half_width: f64, max: usize) -> usize {
    let n = (wavelength_over_dr / half_width).floor().max(1.0) as usize;
    let odd = if n % 2 == 0 { n - 1 } else { n };
    odd.clamp(1, max)
}

/// Interval bisection on each axis with beams widened to the interval: each
/// probe uses a centered sub-aperture whose main lobe spans half the current
/// interval. Two pilots per axis per level.
pub fn baseline_hierarchical<R: Rng + ?Sized>(
    scene: &ChannelScene,
    levels: usize,
    pilot_power: f64,
    rng: &mut R,
) -> Result<EstimationResult> {
    if levels == 0 {
        return domain("hierarchical search needs at least one level");
    }
    let cfg = &scene.cfg;
    let ratio = cfg.wavelength / cfg.dr;
    let mut pilots = 0;
    let mut x = (-1.0f64, 1.0f64);
    let mut y = (-1.0f64, 1.0f64);
    let mid = |r: (f64, f64)| 0.5 * (r.0 + r.1);
    let mut trace = Vec::with_capacity(levels);
    for _ in 0..levels {
        for axis in 0..2 {
            let (cur, other) = if axis == 0 { (x, y) } else { (y, x) };
            let width = cur.1 - cur.0;
            let n_cur = beam_elements(ratio, 0.5 * width, if axis == 0 { cfg.mx } else { cfg.my });
            let n_other = beam_elements(ratio, 0.5 * (other.1 - other.0), if axis == 0 { cfg.my } else { cfg.mx });
            let (nx, ny) = if axis == 0 { (n_cur, n_other) } else { (n_other, n_cur) };
            let c = mid(cur);
            let mut probe = |b: f64| -> Result<f64> {
                let steer = if axis == 0 {
                    LinearPhase::steer(b, mid(other))
                } else {
                    LinearPhase::steer(mid(other), b)
                };
                let mut sub = SceneSounder::on_aperture(scene, Aperture::centered(nx, ny), (0, 0), pilot_power, rng);
                pilots += 1;
                Ok(sub.sound(steer)?.norm())
            };
            let low = probe(c - 0.25 * width)?;
            let high = probe(c + 0.25 * width)?;
            let next = if high > low { (c, cur.1) } else { (cur.0, c) };
            if axis == 0 {
                x = next;
            } else {
                y = next;
            }
        }
        trace.push((mid(x), mid(y)));
    }
    Ok(EstimationResult {
        alpha1_hat: mid(x),
        alpha2_hat: mid(y),
        iterations: levels,
        pilots_used: pilots,
        trace,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LisConfig, UserGeometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom_for(d0: f64, a1: f64, a2: f64) -> UserGeometry {
        let s = (a1 * a1 + a2 * a2).sqrt();
        UserGeometry::new(d0, s.asin(), a2.atan2(a1).rem_euclid(std::f64::consts::TAU)).unwrap()
    }

    fn scene(m: usize, a1: f64, a2: f64) -> ChannelScene {
        let cfg = LisConfig::reference_30ghz().with_elements(m, m).unwrap();
        ChannelScene::los_only(cfg, geom_for(50.0, a1, a2), 0.0).unwrap()
    }

    #[test]
    fn grid_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = baseline_grid_search(&scene(33, 0.5, -0.25), 9, 81, 1.0, &mut rng).unwrap();
        assert!((r.alpha1_hat - 0.5).abs() < 1e-12 && (r.alpha2_hat + 0.25).abs() < 1e-12);
        assert_eq!(r.pilots_used, 81);
        let r = baseline_grid_search(&scene(33, 0.5, -0.25), 1, 23, 1.0, &mut rng).unwrap();
        assert_eq!(r.alpha(), (0.0, 0.0));
        assert!(baseline_grid_search(&scene(9, 0.0, 0.0), 5, 23, 1.0, &mut rng).is_err());
    }

    #[test]
    fn grid_error_bounded_by_spacing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 21;
        for &(a1, a2) in &[(0.13, -0.41), (-0.66, 0.2), (0.05, 0.71), (0.33, 0.33)] {
            let r = baseline_grid_search(&scene(33, a1, a2), n, n * n, 1.0, &mut rng).unwrap();
            let bound = 1.0 / (n - 1) as f64 + 1e-12;
            assert!((r.alpha1_hat - a1).abs() <= bound && (r.alpha2_hat - a2).abs() <= bound, "{r:?}");
        }
    }

    #[test]
    fn hierarchical_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(a1, a2) in &[(0.3, -0.5), (-0.72, 0.11), (0.01, 0.6)] {
            let r = baseline_hierarchical(&scene(257, a1, a2), 12, 1.0, &mut rng).unwrap();
            let bound = 2f64.powi(-12);
            assert!((r.alpha1_hat - a1).abs() <= bound && (r.alpha2_hat - a2).abs() <= bound, "{r:?}");
            assert_eq!(r.pilots_used, 48);
        }
        let r = baseline_hierarchical(&scene(33, 0.3, -0.5), 1, 1.0, &mut rng).unwrap();
        assert_eq!(r.alpha(), (0.5, -0.5));
        assert_eq!(r.pilots_used, 4);
    }
}
