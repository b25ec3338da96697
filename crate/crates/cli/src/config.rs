//! Scenario files.
//!
//! ```toml
//! [geometry]
//! fc = "30 GHz"          # or lambda; if both are given they must agree within 1 %
//! lambda = "1 cm"
//! Mx = 257
//! My = 257
//! dr = "lambda/4"
//! Le = "0.8 dr"
//! P = "30 dBm"           # data transmit power
//! N0 = "-115 dBm"
//! F = 1.0                # optional element pattern factor
//!
//! [scenario]
//! name = "pilot-power"
//! d0 = "200 m"           # or d0_range = ["20 m", "60 m"]
//! estimators = ["proposed", "grid", "hierarchical", "perfect"]
//! realizations = 100
//! seed = 1
//! pilot_power = "20 dBm" # fixed unless swept
//! pilot_budget = 23
//! noiseless_pilots = false
//!
//! [scenario.nlos]
//! paths = 4
//! gap = "20 dB"
//!
//! [scenario.sweep]
//! variable = "pilot_power_dbm"   # pilot_count | element_count | los_nlos_gap_db
//! values = [-10, 0, 10, 20]
//!
//! [estimator]
//! delta = 1e-6
//! tile_iterations = 1
//! ```

use std::ops::Range;

use lisbt::channel::NlosSpec;
use lisbt::experiments::{Distance, EstimatorKind, Scenario, Sweep, SweepVariable, DEFAULT_PILOT_BUDGET};
use lisbt::geometry::LisConfig;
use serde::Deserialize;
use toml::Spanned;

use crate::units::{decibels, frequency, length, power, LengthContext, Quantity};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    geometry: Spanned<RawGeometry>,
    scenario: Spanned<RawScenario>,
    estimator: Option<Spanned<RawEstimator>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawGeometry {
    fc: Option<Spanned<Quantity>>,
    lambda: Option<Spanned<Quantity>>,
    Mx: Spanned<i64>,
    My: Spanned<i64>,
    dr: Spanned<Quantity>,
    Le: Spanned<Quantity>,
    P: Spanned<Quantity>,
    N0: Spanned<Quantity>,
    F: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<Spanned<String>>,
    d0: Option<Spanned<Quantity>>,
    d0_range: Option<Spanned<[Quantity; 2]>>,
    estimators: Option<Spanned<Vec<String>>>,
    realizations: Spanned<i64>,
    seed: Option<Spanned<i64>>,
    pilot_power: Option<Spanned<Quantity>>,
    pilot_budget: Option<Spanned<i64>>,
    noiseless_pilots: Option<bool>,
    nlos: Option<Spanned<RawNlos>>,
    sweep: Spanned<RawSweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNlos {
    paths: Option<Spanned<i64>>,
    gap: Option<Spanned<Quantity>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Spanned<String>,
    values: Spanned<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEstimator {
    delta: Option<Spanned<f64>>,
    tile_iterations: Option<Spanned<i64>>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: Range<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError::Invalid {
            line: self.line(span),
            message: message.into(),
        })
    }

    fn at<T, E: ToString>(&self, span: Range<usize>, r: Result<T, E>) -> Result<T, ConfigError> {
        r.or_else(|e| self.err(span, e.to_string()))
    }

    fn count(&self, v: &Spanned<i64>, what: &str) -> Result<usize, ConfigError> {
        match usize::try_from(*v.get_ref()) {
            Ok(n) if n >= 1 => Ok(n),
            _ => self.err(v.span(), format!("{what} must be a positive integer, got {}", v.get_ref())),
        }
    }
}

/// Parses and validates a scenario file. Powers given in dBm are converted to
/// watts here.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let cx = Ctx { text };
    let g = raw.geometry.get_ref();
    let g_span = raw.geometry.span();

    let from_fc = g
        .fc
        .as_ref()
        .map(|fc| cx.at(fc.span(), frequency(fc.get_ref())).map(|f| (SPEED_OF_LIGHT / f, fc.span())))
        .transpose()?;
    let given = g
        .lambda
        .as_ref()
        .map(|l| cx.at(l.span(), length(l.get_ref(), LengthContext::default())).map(|v| (v, l.span())))
        .transpose()?;
    let wavelength = match (given, from_fc) {
        (Some((l, span)), Some((lf, _))) => {
            if ((l - lf) / l).abs() > 0.01 {
                return cx.err(span, format!("lambda = {l} m disagrees with fc (c/fc = {lf} m)"));
            }
            l
        }
        (Some((l, _)), None) | (None, Some((l, _))) => l,
        (None, None) => return cx.err(g_span, "geometry needs fc or lambda"),
    };
    if !(wavelength > 0.0) {
        return cx.err(g_span, "wavelength must be positive");
    }

    for (v, name) in [(&g.Mx, "Mx"), (&g.My, "My")] {
        let n = *v.get_ref();
        if n < 1 || n % 2 == 0 {
            return cx.err(v.span(), format!("{name} must be a positive odd integer, got {n}"));
        }
    }
    let ctx = LengthContext {
        lambda: Some(wavelength),
        dr: None,
    };
    let dr = cx.at(g.dr.span(), length(g.dr.get_ref(), ctx))?;
    let le = cx.at(
        g.Le.span(),
        length(g.Le.get_ref(), LengthContext { dr: Some(dr), ..ctx }),
    )?;
    let f = g.F.as_ref().map(|f| *f.get_ref()).unwrap_or(1.0);
    let cfg = cx.at(
        g_span.clone(),
        LisConfig::new(wavelength, *g.Mx.get_ref() as usize, *g.My.get_ref() as usize, dr, le, f),
    )?;
    let data_power = cx.at(g.P.span(), power(g.P.get_ref()))?;
    let noise_power = cx.at(g.N0.span(), power(g.N0.get_ref()))?;
    if !(noise_power > 0.0) {
        return cx.err(g.N0.span(), "N0 must be positive");
    }

    let s = raw.scenario.get_ref();
    let s_span = raw.scenario.span();
    let length_of = |q: &Spanned<Quantity>| cx.at(q.span(), length(q.get_ref(), ctx));
    let distance = match (&s.d0, &s.d0_range) {
        (Some(d), None) => Distance::Fixed(length_of(d)?),
        (None, Some(r)) => {
            let [lo, hi] = r.get_ref();
            let lo = cx.at(r.span(), length(lo, ctx))?;
            let hi = cx.at(r.span(), length(hi, ctx))?;
            Distance::Uniform(lo, hi)
        }
        _ => return cx.err(s_span.clone(), "scenario needs exactly one of d0 and d0_range"),
    };
    let estimators = match &s.estimators {
        None => EstimatorKind::ALL.to_vec(),
        Some(list) => list
            .get_ref()
            .iter()
            .map(|e| cx.at(list.span(), e.parse::<EstimatorKind>()))
            .collect::<Result<_, _>>()?,
    };
    let seed = match &s.seed {
        None => 0,
        Some(v) => cx.at(v.span(), u64::try_from(*v.get_ref()).map_err(|_| "seed must be non-negative"))?,
    };
    let nlos = match &s.nlos {
        None => NlosSpec::default(),
        Some(n) => {
            let n = n.get_ref();
            NlosSpec {
                paths: match &n.paths {
                    None => NlosSpec::default().paths,
                    Some(p) if *p.get_ref() == 0 => 0,
                    Some(p) => cx.count(p, "paths")?,
                },
                gap_db: match &n.gap {
                    None => NlosSpec::default().gap_db,
                    Some(q) => cx.at(q.span(), decibels(q.get_ref()))?,
                },
            }
        }
    };
    let sweep = s.sweep.get_ref();
    let variable = cx.at(sweep.variable.span(), sweep.variable.get_ref().parse::<SweepVariable>())?;

    let mut delta = lisbt::estimator::DEFAULT_DELTA;
    let mut tile_iterations = None;
    if let Some(e) = &raw.estimator {
        let e = e.get_ref();
        if let Some(d) = &e.delta {
            delta = *d.get_ref();
            if !(delta > 0.0) {
                return cx.err(d.span(), "delta must be positive");
            }
        }
        if let Some(t) = &e.tile_iterations {
            tile_iterations = Some(cx.count(t, "tile_iterations")?);
        }
    }

    let scenario = Scenario {
        name: s.name.as_ref().map(|n| n.get_ref().clone()).unwrap_or_else(|| "scenario".into()),
        cfg,
        distance,
        nlos,
        noise_power,
        noiseless_pilots: s.noiseless_pilots.unwrap_or(false),
        pilot_power: match &s.pilot_power {
            None => lisbt::dbm_to_watts(20.0),
            Some(q) => cx.at(q.span(), power(q.get_ref()))?,
        },
        data_power,
        pilot_budget: match &s.pilot_budget {
            None => DEFAULT_PILOT_BUDGET,
            Some(b) => cx.count(b, "pilot_budget")?,
        },
        delta,
        tile_iterations,
        sweep: Sweep {
            variable,
            values: sweep.values.get_ref().clone(),
        },
        estimators,
        realizations: cx.count(&s.realizations, "realizations")?,
        base_seed: seed,
    };
    if let Some(name) = &s.name {
        let n = name.get_ref();
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return cx.err(name.span(), "name must be a non-empty identifier of [A-Za-z0-9_-]");
        }
    }
    cx.at(s.sweep.span(), scenario.validate())?;
    Ok(scenario)
}
