//! Scenario files, experiment runs and result files for the `lisbt` binary.

pub mod checks;
pub mod config;
pub mod output;
pub mod units;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lisbt::experiments::{run_scenario, Distance, Scenario};
use serde_json::json;

pub use config::{parse_config, ConfigError};

/// Size presets applied on top of a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// 65x65 elements, 100 realizations.
    Desk,
    /// 257x257 elements, 1000 realizations.
    Paper,
}

impl Scale {
    pub fn elements(self) -> usize {
        match self {
            Scale::Desk => 65,
            Scale::Paper => 257,
        }
    }

    pub fn realizations(self) -> usize {
        match self {
            Scale::Desk => 100,
            Scale::Paper => 1000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub scale: Option<Scale>,
}

/// Applies, in order, the scale preset and then the explicit overrides.
pub fn apply_overrides(
    mut scn: Scenario,
    scale: Option<Scale>,
    seed: Option<u64>,
    realizations: Option<usize>,
) -> anyhow::Result<Scenario> {
    if let Some(s) = scale {
        scn.cfg = scn.cfg.with_elements(s.elements(), s.elements())?;
        scn.realizations = s.realizations();
    }
    if let Some(seed) = seed {
        scn.base_seed = seed;
    }
    if let Some(n) = realizations {
        if n == 0 {
            bail!("--realizations must be positive");
        }
        scn.realizations = n;
    }
    scn.validate()?;
    Ok(scn)
}

pub fn load_scenario(path: &Path) -> anyhow::Result<(String, Scenario)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scn = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    Ok((text, scn))
}

/// Files written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
}

fn manifest(cfg: &RunConfig, text: &str, scn: &Scenario, csv_name: &str, rows: usize) -> serde_json::Value {
    let distance = match scn.distance {
        Distance::Fixed(d) => json!({ "fixed_m": d }),
        Distance::Uniform(lo, hi) => json!({ "uniform_m": [lo, hi] }),
    };
    json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "scenario": scn.name,
        "config_file": cfg.config.display().to_string(),
        "config_text": text,
        "overrides": {
            "seed": cfg.seed,
            "realizations": cfg.realizations,
            "scale": cfg.scale.map(Scale::name),
        },
        "effective": {
            "base_seed": scn.base_seed,
            "realizations": scn.realizations,
            "elements": [scn.cfg.mx, scn.cfg.my],
            "wavelength_m": scn.cfg.wavelength,
            "dr_m": scn.cfg.dr,
            "le_m": scn.cfg.le,
            "pattern_factor": scn.cfg.pattern_factor,
            "distance": distance,
            "noise_power_w": scn.noise_power,
            "noiseless_pilots": scn.noiseless_pilots,
            "pilot_power_w": scn.pilot_power,
            "data_power_w": scn.data_power,
            "pilot_budget": scn.pilot_budget,
            "delta": scn.delta,
            "tile_iterations": scn.tile_iterations,
            "nlos": { "paths": scn.nlos.paths, "gap_db": scn.nlos.gap_db },
            "sweep": { "variable": scn.sweep.variable.name(), "values": scn.sweep.values },
            "estimators": scn.estimators.iter().map(|e| e.name()).collect::<Vec<_>>(),
        },
        "csv": csv_name,
        "rows": rows,
    })
}

/// Runs the scenario file and writes `<name>.csv` and `<name>.manifest.json`
/// into the output directory, creating it if needed.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutput> {
    let (text, scn) = load_scenario(&cfg.config)?;
    let scn = apply_overrides(scn, cfg.scale, cfg.seed, cfg.realizations)?;
    let rows = run_scenario(&scn)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let csv_name = format!("{}.csv", scn.name);
    let csv = cfg.out.join(&csv_name);
    fs::write(&csv, output::to_csv(&rows)).with_context(|| format!("writing {}", csv.display()))?;
    let manifest_path = cfg.out.join(format!("{}.manifest.json", scn.name));
    let m = manifest(cfg, &text, &scn, &csv_name, rows.len());
    fs::write(&manifest_path, serde_json::to_string_pretty(&m)? + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(RunOutput {
        csv,
        manifest: manifest_path,
        rows: rows.len(),
    })
}
