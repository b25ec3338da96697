use rand::Rng;

use crate::channel::{single_element_observation, ChannelScene};
use crate::error::{domain, Result};
use crate::geometry::wrap_signed;

/// Pilots consumed by [`initialize_from_actives`].
pub const INITIALIZER_PILOTS: usize = 3;

/// Coarse direction estimate from the phases seen by three single active
/// elements at `(0,0)`, `(1,0)` and `(0,1)`.
pub fn initialize_from_actives<R: Rng + ?Sized>(
    scene: &ChannelScene,
    pilot_power: f64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let cfg = &scene.cfg;
    if cfg.dr > 0.5 * cfg.wavelength {
        return domain(format!("phase differences are ambiguous for dr = {} > λ/2", cfg.dr));
    }
    if cfg.mx < 3 || cfg.my < 3 {
        return domain("the initializer needs at least 3x3 elements");
    }
    let y1 = single_element_observation(scene, (0, 0), pilot_power, rng)?.value;
    let y2 = single_element_observation(scene, (1, 0), pilot_power, rng)?.value;
    let y3 = single_element_observation(scene, (0, 1), pilot_power, rng)?.value;
    let kd = cfg.k0() * cfg.dr;
    let a1 = wrap_signed(y2.arg() - y1.arg()) / kd;
    let a2 = wrap_signed(y3.arg() - y1.arg()) / kd;
    Ok((a1.clamp(-1.0, 1.0), a2.clamp(-1.0, 1.0)))
}
