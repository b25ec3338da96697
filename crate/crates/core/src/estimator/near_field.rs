use rand::Rng;

use super::initializer::{initialize_from_actives, INITIALIZER_PILOTS};
use super::iterative::iterative_estimate;
use super::{EstimationResult, EstimatorConfig, SceneSounder, Sounder};
use crate::channel::{ChannelScene, LinearPhase, PhaseProfile};
use crate::error::Result;
use crate::geometry::{wrap_phase, TileGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct TileEstimate {
    /// Tile-local direction cosine estimate.
    pub result: EstimationResult,
    /// Measured phase of the tile channel at the estimated steering.
    pub beta0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearFieldEstimate {
    /// Global initializer output every tile starts from.
    pub init: (f64, f64),
    pub tiles: Vec<TileEstimate>,
    /// Assembled per-tile linear profile.
    pub profile: PhaseProfile,
    pub pilots_used: usize,
}

/// Per-tile estimation for users inside the Fraunhofer distance of the whole
/// surface. Each tile is sounded alone, then one more pilot per tile reads the
/// phase offset that co-phases the tiles.
pub fn near_field_estimate<R: Rng + ?Sized>(
    scene: &ChannelScene,
    tiles: &TileGrid,
    est: &EstimatorConfig,
    rng: &mut R,
) -> Result<NearFieldEstimate> {
    let cfg = &scene.cfg;
    let init = initialize_from_actives(scene, est.pilot_power, rng)?;
    let mut pilots = INITIALIZER_PILOTS;
    let mut out = Vec::with_capacity(tiles.len());
    for tile in tiles.tiles() {
        let tile_est = est.for_tile(cfg, tile);
        let mut sounder = SceneSounder::on_tile(scene, tile, est.pilot_power, rng);
        let result = iterative_estimate(&mut sounder, &tile_est, init)?;
        let y = sounder.sound(LinearPhase::steer(result.alpha1_hat, result.alpha2_hat))?;
        pilots += sounder.pilots_used();
        out.push(TileEstimate {
            beta0: wrap_phase(y.arg()),
            result,
        });
    }
    let params = out
        .iter()
        .map(|t| LinearPhase::new(t.beta0, t.result.alpha1_hat, t.result.alpha2_hat))
        .collect();
    Ok(NearFieldEstimate {
        init,
        profile: PhaseProfile::tiled(tiles.clone(), params)?,
        tiles: out,
        pilots_used: pilots,
    })
}
