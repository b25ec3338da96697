//! Channel realizations and pilot observations.
//!
//! A [`ChannelScene`] fixes the LoS geometry, the NLoS ensemble and the noise
//! level. Randomness is always drawn from a caller-supplied generator in a
//! fixed order: NLoS gains, NLoS angles, then one complex noise sample per
//! pilot in pilot order.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::pattern::geometric_sum;
use super::profile::{Aperture, PhaseProfile, Segment};
use super::{exact_channel_on, path_amplitude};
use crate::error::{domain, Result};
use crate::geometry::{LisConfig, UserGeometry};
use crate::db_to_linear;

/// Generator used for every stochastic draw in the crate.
pub type SceneRng = ChaCha8Rng;

/// One scattered planar-wave component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlosPath {
    pub gain: Complex64,
    pub theta: f64,
    pub phi: f64,
}

impl NlosPath {
    pub fn alpha1(&self) -> f64 {
        self.theta.sin() * self.phi.cos()
    }

    pub fn alpha2(&self) -> f64 {
        self.theta.sin() * self.phi.sin()
    }
}

/// How many NLoS paths to draw and how far below the per-element LoS power
/// each path's mean power sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlosSpec {
    pub paths: usize,
    pub gap_db: f64,
}

impl NlosSpec {
    pub const NONE: NlosSpec = NlosSpec {
        paths: 0,
        gap_db: 20.0,
    };
}

impl Default for NlosSpec {
    fn default() -> Self {
        Self {
            paths: 4,
            gap_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScene {
    pub cfg: LisConfig,
    pub geom: UserGeometry,
    pub nlos: Vec<NlosPath>,
    /// Receiver noise power per observation, in watts.
    pub noise_power: f64,
    /// Seed the scene was drawn from, when it was drawn by [`ChannelScene::seeded`].
    pub rng_seed: Option<u64>,
}

impl ChannelScene {
    pub fn los_only(cfg: LisConfig, geom: UserGeometry, noise_power: f64) -> Result<Self> {
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return domain(format!("noise power must be non-negative, got {noise_power}"));
        }
        Ok(Self {
            cfg,
            geom,
            nlos: Vec::new(),
            noise_power,
            rng_seed: None,
        })
    }

    /// Draws `spec.paths` NLoS components: all complex gains first, then all
    /// `(θ, φ)` pairs.
    pub fn with_nlos<R: Rng + ?Sized>(
        cfg: LisConfig,
        geom: UserGeometry,
        noise_power: f64,
        spec: NlosSpec,
        rng: &mut R,
    ) -> Result<Self> {
        let mut scene = Self::los_only(cfg, geom, noise_power)?;
        let sigma2 = db_to_linear(-spec.gap_db) * scene.los_element_power();
        let gains: Vec<Complex64> = (0..spec.paths).map(|_| complex_noise(rng, sigma2)).collect();
        scene.nlos = gains
            .into_iter()
            .map(|gain| NlosPath {
                gain,
                theta: rng.random_range(0.0..FRAC_PI_2),
                phi: rng.random_range(0.0..TAU),
            })
            .collect();
        Ok(scene)
    }

    /// Scene drawn from a fresh generator seeded with `seed`. The returned
    /// generator continues the same stream and is meant for pilot noise.
    pub fn seeded(
        cfg: LisConfig,
        geom: UserGeometry,
        noise_power: f64,
        spec: NlosSpec,
        seed: u64,
    ) -> Result<(Self, SceneRng)> {
        let mut rng = SceneRng::seed_from_u64(seed);
        let mut scene = Self::with_nlos(cfg, geom, noise_power, spec, &mut rng)?;
        scene.rng_seed = Some(seed);
        Ok((scene, rng))
    }

    /// Power of a single center-element LoS coefficient, `(λ√F/(4π·d0))²`.
    pub fn los_element_power(&self) -> f64 {
        path_amplitude(&self.cfg, self.geom.d0).powi(2)
    }

    /// NLoS contribution `Σ_l g_l·Σ Γ·e^{j·k0·dr·(m_x·α1_l + m_y·α2_l)}` over the
    /// active elements.
    pub fn nlos_response(&self, profile: &PhaseProfile, aperture: &Aperture) -> Result<Complex64> {
        if self.nlos.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let cfg = &self.cfg;
        profile.check(cfg)?;
        let active = aperture.rect(cfg)?;
        let kd = cfg.k0() * cfg.dr;
        let mut total = Complex64::new(0.0, 0.0);
        for (rect, seg) in profile.segments(cfg) {
            let Some(r) = rect.intersect(&active) else {
                continue;
            };
            for path in &self.nlos {
                let (a1, a2) = (path.alpha1(), path.alpha2());
                let response = match &seg {
                    Segment::Linear { params, center } => {
                        // Γ = e^{-j(kd·((i-cx)β1 + (j-cy)β2) + β0)} makes the sum separable.
                        let offset = Complex64::from_polar(
                            1.0,
                            kd * (center.0 as f64 * params.beta1 + center.1 as f64 * params.beta2) - params.beta0,
                        );
                        offset
                            * geometric_sum(r.x.0 as f64, r.width(), kd * (a1 - params.beta1))
                            * geometric_sum(r.y.0 as f64, r.height(), kd * (a2 - params.beta2))
                    }
                    Segment::Matrix(m) => {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for i in r.x.0..=r.x.1 {
                            for j in r.y.0..=r.y.1 {
                                acc += Complex64::from_polar(1.0, m.get(i, j) + kd * (i as f64 * a1 + j as f64 * a2));
                            }
                        }
                        acc
                    }
                };
                total += path.gain * response;
            }
        }
        Ok(total)
    }

    /// Noise-free LoS plus NLoS response of the active elements.
    pub fn response(&self, profile: &PhaseProfile, aperture: &Aperture) -> Result<Complex64> {
        Ok(exact_channel_on(&self.cfg, &self.geom, profile, aperture)? + self.nlos_response(profile, aperture)?)
    }
}

/// Circularly-symmetric complex Gaussian sample with total variance `power`.
pub fn complex_noise<R: Rng + ?Sized>(rng: &mut R, power: f64) -> Complex64 {
    let s = (0.5 * power).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// One received pilot.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub value: Complex64,
    pub profile_used: PhaseProfile,
    pub aperture: Aperture,
    pub pilot_power: f64,
}

/// Pilot received through the whole surface.
pub fn observe_pilot<R: Rng + ?Sized>(
    scene: &ChannelScene,
    profile: &PhaseProfile,
    pilot_power: f64,
    rng: &mut R,
) -> Result<PilotObservation> {
    observe_pilot_on(scene, profile, &Aperture::Full, pilot_power, rng)
}

/// Pilot received with only the elements of `aperture` active. Exactly one
/// noise sample is drawn per call, even when the noise power is zero.
pub fn observe_pilot_on<R: Rng + ?Sized>(
    scene: &ChannelScene,
    profile: &PhaseProfile,
    aperture: &Aperture,
    pilot_power: f64,
    rng: &mut R,
) -> Result<PilotObservation> {
    if !(pilot_power >= 0.0 && pilot_power.is_finite()) {
        return domain(format!("pilot power must be non-negative, got {pilot_power}"));
    }
    let h = scene.response(profile, aperture)?;
    let value = pilot_power.sqrt() * h + complex_noise(rng, scene.noise_power);
    Ok(PilotObservation {
        value,
        profile_used: profile.clone(),
        aperture: *aperture,
        pilot_power,
    })
}

/// Pilot received through one element with zero phase shift.
pub fn single_element_observation<R: Rng + ?Sized>(
    scene: &ChannelScene,
    element: (i64, i64),
    pilot_power: f64,
    rng: &mut R,
) -> Result<PilotObservation> {
    scene.cfg.check_index(element.0, element.1)?;
    let profile = PhaseProfile::linear(Default::default());
    observe_pilot_on(scene, &profile, &Aperture::single(element.0, element.1), pilot_power, rng)
}
