//! Pilot-based estimation of the user's direction cosines.
//!
//! Every procedure talks to the channel through a [`Sounder`], which turns a
//! linear steering profile into one complex observation and counts pilots.
//! [`SceneSounder`] observes a [`ChannelScene`] (exact LoS, NLoS and noise);
//! [`ModelSounder`] returns noise-free closed-form far-field values.

mod baselines;
mod candidates;
mod initializer;
mod iterative;
mod near_field;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{
    far_field_channel, far_field_channel_sinc, observe_pilot_on, path_amplitude, Aperture, ChannelScene, LinearPhase,
    PhaseProfile,
};
use crate::error::{domain, Result};
use crate::geometry::{LisConfig, Tile, UserGeometry};

pub use baselines::{baseline_grid_search, baseline_hierarchical, grid_point};
pub use candidates::{candidates, closest_pair, probe_offsets, select_consistent, CandidateQuad};
pub use initializer::{initialize_from_actives, INITIALIZER_PILOTS};
pub use iterative::{estimate_far_field, iterative_estimate, noiseless_estimate, null_recovery, MAX_NULL_SHIFTS};
pub use near_field::{near_field_estimate, NearFieldEstimate, TileEstimate};

/// Default convergence threshold on the squared iterate change.
pub const DEFAULT_DELTA: f64 = 1e-6;
/// Default iteration cap.
pub const DEFAULT_K_MAX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Probe offset along β1.
    pub v: f64,
    /// Probe offset along β2.
    pub w: f64,
    /// Stop when the squared iterate change falls below this.
    pub delta: f64,
    pub k_max: usize,
    /// Pilot transmit power in watts.
    pub pilot_power: f64,
    /// Center magnitudes below this trigger null recovery.
    pub magnitude_floor: f64,
}

impl EstimatorConfig {
    /// Defaults for sounding surface `cfg` from distance `d0`.
    pub fn for_surface(cfg: &LisConfig, d0: f64, pilot_power: f64) -> Self {
        let (v, w) = probe_offsets(cfg);
        Self {
            v,
            w,
            delta: DEFAULT_DELTA,
            k_max: DEFAULT_K_MAX,
            pilot_power,
            magnitude_floor: 1e-3 * pilot_power.sqrt() * path_amplitude(cfg, d0),
        }
    }

    /// Same stopping rule and power, probe offsets matched to one tile.
    pub fn for_tile(&self, cfg: &LisConfig, tile: &Tile) -> Self {
        let (v, w) = probe_offsets(&tile.as_surface(cfg));
        Self { v, w, ..*self }
    }

    pub fn with_iterations(self, delta: f64, k_max: usize) -> Self {
        Self { delta, k_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.w > 0.0 && self.v.is_finite() && self.w.is_finite()) {
            return domain(format!("probe offsets must be positive, got ({}, {})", self.v, self.w));
        }
        if !(self.delta > 0.0) || self.k_max == 0 {
            return domain(format!("need delta > 0 and k_max >= 1, got {} and {}", self.delta, self.k_max));
        }
        if !(self.pilot_power >= 0.0 && self.pilot_power.is_finite()) || !(self.magnitude_floor >= 0.0) {
            return domain("pilot power and magnitude floor must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub alpha1_hat: f64,
    pub alpha2_hat: f64,
    pub iterations: usize,
    pub pilots_used: usize,
    /// Iterate `(β̂1, β̂2)` after each iteration.
    pub trace: Vec<(f64, f64)>,
    pub converged: bool,
}

impl EstimationResult {
    pub fn alpha(&self) -> (f64, f64) {
        (self.alpha1_hat, self.alpha2_hat)
    }
}

/// Source of pilot observations under linear steering profiles.
pub trait Sounder {
    /// One received pilot with the surface steered by `steer`.
    fn sound(&mut self, steer: LinearPhase) -> Result<Complex64>;
    fn pilots_used(&self) -> usize;
}

/// Observes a scene through a fixed aperture, with the steering profile
/// centered on the aperture.
pub struct SceneSounder<'a, R: Rng + ?Sized> {
    scene: &'a ChannelScene,
    aperture: Aperture,
    center: (i64, i64),
    pilot_power: f64,
    rng: &'a mut R,
    pilots: usize,
}

impl<'a, R: Rng + ?Sized> SceneSounder<'a, R> {
    pub fn new(scene: &'a ChannelScene, pilot_power: f64, rng: &'a mut R) -> Self {
        Self::on_aperture(scene, Aperture::Full, (0, 0), pilot_power, rng)
    }

    /// Only the elements of `tile` active, every other element switched off.
    pub fn on_tile(scene: &'a ChannelScene, tile: &Tile, pilot_power: f64, rng: &'a mut R) -> Self {
        Self::on_aperture(scene, Aperture::tile(tile), tile.center_index(), pilot_power, rng)
    }

    pub fn on_aperture(
        scene: &'a ChannelScene,
        aperture: Aperture,
        center: (i64, i64),
        pilot_power: f64,
        rng: &'a mut R,
    ) -> Self {
        Self {
            scene,
            aperture,
            center,
            pilot_power,
            rng,
            pilots: 0,
        }
    }
}

impl<R: Rng + ?Sized> Sounder for SceneSounder<'_, R> {
    fn sound(&mut self, steer: LinearPhase) -> Result<Complex64> {
        let profile = PhaseProfile::Linear {
            params: steer,
            center: self.center,
        };
        let obs = observe_pilot_on(self.scene, &profile, &self.aperture, self.pilot_power, self.rng)?;
        self.pilots += 1;
        Ok(obs.value)
    }

    fn pilots_used(&self) -> usize {
        self.pilots
    }
}

/// Which closed form a [`ModelSounder`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFieldForm {
    /// Discrete-array sin-ratio product.
    SinRatio,
    /// Continuous-aperture sinc product.
    Sinc,
}

/// Noise-free observations `√P_p·H` from a far-field closed form.
#[derive(Debug, Clone)]
pub struct ModelSounder {
    pub cfg: LisConfig,
    pub geom: UserGeometry,
    pub form: FarFieldForm,
    pub pilot_power: f64,
    pilots: usize,
}

impl ModelSounder {
    pub fn new(cfg: LisConfig, geom: UserGeometry, form: FarFieldForm, pilot_power: f64) -> Self {
        Self {
            cfg,
            geom,
            form,
            pilot_power,
            pilots: 0,
        }
    }
}

impl Sounder for ModelSounder {
    fn sound(&mut self, steer: LinearPhase) -> Result<Complex64> {
        let h = match self.form {
            FarFieldForm::SinRatio => far_field_channel(&self.cfg, &self.geom, steer.beta1, steer.beta2),
            FarFieldForm::Sinc => far_field_channel_sinc(&self.cfg, &self.geom, steer.beta1, steer.beta2),
        };
        self.pilots += 1;
        Ok(self.pilot_power.sqrt() * h.value * Complex64::from_polar(1.0, -steer.beta0))
    }

    fn pilots_used(&self) -> usize {
        self.pilots
    }
}
