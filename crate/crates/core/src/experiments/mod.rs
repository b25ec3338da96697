//! Monte-Carlo harness: scenarios, per-realization evaluation and aggregation.
//!
//! Realization `i` of every sweep point draws its user from the seed
//! `base_seed + i`: direction first, then distance (when a range is given),
//! then the NLoS paths. Every estimator then starts from its own copy of the
//! generator, so all estimators see the same scene and the same noise stream.

mod metrics;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::channel::{optimal_phases_exact, ChannelScene, LinearPhase, NlosSpec, PhaseProfile, SceneRng};
use crate::dbm_to_watts;
use crate::error::{domain, Error, Result};
use crate::estimator::{
    baseline_grid_search, baseline_hierarchical, estimate_far_field, near_field_estimate, EstimationResult,
    EstimatorConfig, DEFAULT_DELTA, INITIALIZER_PILOTS,
};
use crate::geometry::{fraunhofer_distance, make_tile_grid, LisConfig, UserGeometry};

pub use metrics::{achieved_rate, mse, rate_from_snr};

/// Pilot budget of the reference experiments: initializer plus four rounds.
pub const DEFAULT_PILOT_BUDGET: usize = 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Initializer plus iterative five-pilot rounds (per tile in the near field).
    Proposed,
    /// Exhaustive grid over `[-1, 1]²`.
    Grid,
    /// Bisection beam search.
    Hierarchical,
    /// Exact optimal phases, no pilots.
    Perfect,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [Self::Proposed, Self::Grid, Self::Hierarchical, Self::Perfect];

    pub fn name(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Grid => "grid",
            Self::Hierarchical => "hierarchical",
            Self::Perfect => "perfect",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    PilotPowerDbm,
    PilotCount,
    /// Elements per axis of a square surface.
    ElementCount,
    LosNlosGapDb,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 4] = [
        Self::PilotPowerDbm,
        Self::PilotCount,
        Self::ElementCount,
        Self::LosNlosGapDb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PilotPowerDbm => "pilot_power_dbm",
            Self::PilotCount => "pilot_count",
            Self::ElementCount => "element_count",
            Self::LosNlosGapDb => "los_nlos_gap_db",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// User distance: fixed, or drawn uniformly per realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Fixed(f64),
    Uniform(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub cfg: LisConfig,
    pub distance: Distance,
    pub nlos: NlosSpec,
    /// Receiver noise in watts, used for the rate and for pilots.
    pub noise_power: f64,
    /// Observe pilots without noise; the rate still uses `noise_power`.
    pub noiseless_pilots: bool,
    /// Watts.
    pub pilot_power: f64,
    /// Data transmit power used for the rate, in watts.
    pub data_power: f64,
    pub pilot_budget: usize,
    pub delta: f64,
    /// Rounds per tile in the near field; `None` uses the budget's round count.
    pub tile_iterations: Option<usize>,
    pub sweep: Sweep,
    pub estimators: Vec<EstimatorKind>,
    pub realizations: usize,
    pub base_seed: u64,
}

impl Scenario {
    /// Table-I surface and powers, user at 200 m, default NLoS, all
    /// estimators, swept over the single default pilot power of 20 dBm.
    pub fn reference(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cfg: LisConfig::reference_30ghz(),
            distance: Distance::Fixed(200.0),
            nlos: NlosSpec::default(),
            noise_power: dbm_to_watts(-115.0),
            noiseless_pilots: false,
            pilot_power: dbm_to_watts(20.0),
            data_power: dbm_to_watts(30.0),
            pilot_budget: DEFAULT_PILOT_BUDGET,
            delta: DEFAULT_DELTA,
            tile_iterations: None,
            sweep: Sweep {
                variable: SweepVariable::PilotPowerDbm,
                values: vec![20.0],
            },
            estimators: EstimatorKind::ALL.to_vec(),
            realizations: 100,
            base_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return domain("realizations must be at least 1");
        }
        if self.sweep.values.is_empty() {
            return domain("sweep has no points");
        }
        if self.estimators.is_empty() {
            return domain("no estimators selected");
        }
        match self.distance {
            Distance::Fixed(d) if d > 0.0 && d.is_finite() => {}
            Distance::Uniform(lo, hi) if lo > 0.0 && hi > lo && hi.is_finite() => {}
            d => return domain(format!("invalid user distance {d:?}")),
        }
        if !(self.noise_power > 0.0) || !(self.pilot_power >= 0.0) || !(self.data_power >= 0.0) {
            return domain("noise power must be positive and powers non-negative");
        }
        if !(self.delta > 0.0) || self.tile_iterations == Some(0) {
            return domain("delta must be positive and tile iterations at least 1");
        }
        for &v in &self.sweep.values {
            self.at(v)?;
        }
        Ok(())
    }

    /// The scenario with its sweep variable fixed to `value`.
    pub fn at(&self, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match self.sweep.variable {
            SweepVariable::PilotPowerDbm => s.pilot_power = dbm_to_watts(value),
            SweepVariable::PilotCount => s.pilot_budget = whole(value, "pilot count")?,
            SweepVariable::ElementCount => {
                let m = whole(value, "element count")?;
                s.cfg = self.cfg.with_elements(m, m)?;
            }
            SweepVariable::LosNlosGapDb => s.nlos.gap_db = value,
        }
        if s.estimators.contains(&EstimatorKind::Proposed) && proposed_rounds(s.pilot_budget).is_none() {
            return domain(format!(
                "{} pilots leave no room for a five-pilot round after the initializer",
                s.pilot_budget
            ));
        }
        Ok(s)
    }
}

fn whole(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        domain(format!("{what} must be a positive integer, got {value}"))
    }
}

/// Rounds of the proposed scheme that fit `budget` pilots.
pub fn proposed_rounds(budget: usize) -> Option<usize> {
    let k = budget.checked_sub(INITIALIZER_PILOTS)? / 5;
    (k >= 1).then_some(k)
}

/// Outcome of one estimator on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub rate: f64,
    /// `(α̂1 - α1, α̂2 - α2)`.
    pub error: (f64, f64),
    pub pilots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub index: usize,
    pub seed: u64,
    pub geom: UserGeometry,
    /// Rate under the exact optimal phases.
    pub optimal_rate: f64,
    /// One entry per roster estimator, in roster order.
    pub records: Vec<(EstimatorKind, Result<EstimateRecord>)>,
}

/// Draws the user and NLoS of realization `index`.
pub fn draw_scene(scn: &Scenario, index: usize) -> Result<(ChannelScene, SceneRng)> {
    let seed = scn.base_seed.wrapping_add(index as u64);
    let mut rng = SceneRng::seed_from_u64(seed);
    let theta = rng.random_range(0.0..FRAC_PI_2);
    let phi = rng.random_range(0.0..TAU);
    let d0 = match scn.distance {
        Distance::Fixed(d) => d,
        Distance::Uniform(lo, hi) => rng.random_range(lo..hi),
    };
    let geom = UserGeometry::new(d0, theta, phi)?;
    let noise = if scn.noiseless_pilots { 0.0 } else { scn.noise_power };
    let mut scene = ChannelScene::with_nlos(scn.cfg.clone(), geom, noise, scn.nlos, &mut rng)?;
    scene.rng_seed = Some(seed);
    Ok((scene, rng))
}

/// Runs one estimator and configures the phases from its estimate.
fn run_estimator(
    scn: &Scenario,
    kind: EstimatorKind,
    scene: &ChannelScene,
    rng: &mut SceneRng,
) -> Result<(PhaseProfile, (f64, f64), usize)> {
    let cfg = &scene.cfg;
    let d0 = scene.geom.d0;
    let truth = (scene.geom.alpha1(), scene.geom.alpha2());
    let steer = |r: &EstimationResult| PhaseProfile::linear(LinearPhase::steer(r.alpha1_hat, r.alpha2_hat));
    match kind {
        EstimatorKind::Proposed => {
            let rounds = proposed_rounds(scn.pilot_budget)
                .ok_or_else(|| Error::Domain(format!("pilot budget {} too small", scn.pilot_budget)))?;
            let est = EstimatorConfig::for_surface(cfg, d0, scn.pilot_power).with_iterations(scn.delta, rounds);
            if d0 >= fraunhofer_distance(cfg) {
                let r = estimate_far_field(scene, &est, rng)?;
                Ok((steer(&r), r.alpha(), r.pilots_used))
            } else {
                let grid = make_tile_grid(cfg, d0)?;
                let est = est.with_iterations(scn.delta, scn.tile_iterations.unwrap_or(rounds));
                let nf = near_field_estimate(scene, &grid, &est, rng)?;
                let center = grid.index_of(0, 0)?;
                Ok((nf.profile, nf.tiles[center].result.alpha(), nf.pilots_used))
            }
        }
        EstimatorKind::Grid => {
            let n = (scn.pilot_budget as f64).sqrt().floor() as usize;
            let r = baseline_grid_search(scene, n, scn.pilot_budget, scn.pilot_power, rng)?;
            Ok((steer(&r), r.alpha(), r.pilots_used))
        }
        EstimatorKind::Hierarchical => {
            let levels = scn.pilot_budget / 4;
            let r = baseline_hierarchical(scene, levels, scn.pilot_power, rng)?;
            Ok((steer(&r), r.alpha(), r.pilots_used))
        }
        EstimatorKind::Perfect => Ok((optimal_phases_exact(cfg, &scene.geom), truth, 0)),
    }
}

/// Evaluates every roster estimator on realization `index` of `scn`, which
/// must already have its sweep variable applied.
pub fn run_realization(scn: &Scenario, index: usize) -> Result<RealizationOutcome> {
    let (scene, rng) = draw_scene(scn, index)?;
    let rate_scene = ChannelScene {
        noise_power: scn.noise_power,
        ..scene.clone()
    };
    let truth = (scene.geom.alpha1(), scene.geom.alpha2());
    let optimal_rate = achieved_rate(&rate_scene, &optimal_phases_exact(&scene.cfg, &scene.geom), scn.data_power)?;
    let records = scn
        .estimators
        .iter()
        .map(|&kind| {
            let mut rng = rng.clone();
            let rec = run_estimator(scn, kind, &scene, &mut rng).and_then(|(profile, est, pilots)| {
                Ok(EstimateRecord {
                    rate: achieved_rate(&rate_scene, &profile, scn.data_power)?,
                    error: (est.0 - truth.0, est.1 - truth.1),
                    pilots,
                })
            });
            (kind, rec)
        })
        .collect();
    Ok(RealizationOutcome {
        index,
        seed: scene.rng_seed.unwrap_or_default(),
        geom: scene.geom,
        optimal_rate,
        records,
    })
}

/// All realizations of one sweep point, in index order.
pub fn run_point(scn: &Scenario) -> Result<Vec<RealizationOutcome>> {
    (0..scn.realizations)
        .into_par_iter()
        .map(|i| run_realization(scn, i))
        .collect()
}

/// Aggregated result of one estimator at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub sweep_value: f64,
    pub estimator: EstimatorKind,
    /// Mean rate in bits/s/Hz over successful realizations.
    pub rate: f64,
    pub mse_alpha1: f64,
    pub mse_alpha2: f64,
    pub mean_pilots: f64,
    /// Successful realizations.
    pub realizations: usize,
    /// Realizations where the estimator failed.
    pub exclusions: usize,
}

/// Reduces outcomes in index order; failed realizations are counted, not averaged.
pub fn aggregate(sweep_value: f64, estimators: &[EstimatorKind], outcomes: &[RealizationOutcome]) -> Vec<MetricRow> {
    estimators
        .iter()
        .enumerate()
        .map(|(slot, &kind)| {
            let ok: Vec<&EstimateRecord> = outcomes.iter().filter_map(|o| o.records[slot].1.as_ref().ok()).collect();
            let n = ok.len();
            let errors: Vec<(f64, f64)> = ok.iter().map(|r| r.error).collect();
            let (m1, m2) = mse(&errors).unwrap_or((f64::NAN, f64::NAN));
            let mean = |f: &dyn Fn(&EstimateRecord) -> f64| {
                if n == 0 {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / n as f64
                }
            };
            MetricRow {
                sweep_value,
                estimator: kind,
                rate: mean(&|r| r.rate),
                mse_alpha1: m1,
                mse_alpha2: m2,
                mean_pilots: mean(&|r| r.pilots as f64),
                realizations: n,
                exclusions: outcomes.len() - n,
            }
        })
        .collect()
}

/// Every sweep point, every estimator.
pub fn run_scenario(scn: &Scenario) -> Result<Vec<MetricRow>> {
    scn.validate()?;
    let mut rows = Vec::with_capacity(scn.sweep.values.len() * scn.estimators.len());
    for &value in &scn.sweep.values {
        let point = scn.at(value)?;
        let outcomes = run_point(&point)?;
        rows.extend(aggregate(value, &point.estimators, &outcomes));
    }
    Ok(rows)
}
