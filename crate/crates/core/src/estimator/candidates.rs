//! Closed-form candidate solutions from pilot magnitude ratios.

use crate::error::{Error, Result};
use crate::geometry::LisConfig;

/// Probe offsets `(v, w) = (1/Kx, 1/Ky)`, so that `Kx·v = Ky·w = 1`.
pub fn probe_offsets(cfg: &LisConfig) -> (f64, f64) {
    (1.0 / cfg.kx(), 1.0 / cfg.ky())
}

/// The four candidate values for one direction cosine. Non-finite entries
/// mark candidates whose denominator vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateQuad(pub [f64; 4]);

impl CandidateQuad {
    pub fn is_valid(&self, k: usize) -> bool {
        self.0[k].is_finite()
    }
}

/// Candidates from the center magnitude `y0` and the magnitudes at `+v` and
/// `-v`, in the order `(+, -)` for the `+v` pair then `(+, -)` for the `-v`
/// pair.
pub fn candidates(y0: f64, y_plus: f64, y_minus: f64, beta_hat: f64, v: f64) -> CandidateQuad {
    let cand = |num: f64, den: f64| {
        if den == 0.0 {
            f64::INFINITY
        } else {
            let c = beta_hat + num * v / den;
            if c.is_finite() {
                c
            } else {
                f64::INFINITY
            }
        }
    };
    CandidateQuad([
        cand(y_plus, y_plus + y0),
        cand(y_plus, y_plus - y0),
        cand(y_minus, -y_minus + y0),
        cand(y_minus, -y_minus - y0),
    ])
}

/// Index pair and gap of the closest `(i, j)`, `i ∈ {0, 1}`, `j ∈ {2, 3}`.
/// Exact ties keep the lexicographically first pair.
pub fn closest_pair(quad: &CandidateQuad) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..2 {
        for j in 2..4 {
            if !(quad.is_valid(i) && quad.is_valid(j)) {
                continue;
            }
            let gap = (quad.0[i] - quad.0[j]).abs();
            if best.is_none_or(|(_, _, g)| gap < g) {
                best = Some((i, j, gap));
            }
        }
    }
    best
}

/// Mean of the closest consistent pair.
pub fn select_consistent(quad: &CandidateQuad) -> Result<f64> {
    closest_pair(quad)
        .map(|(i, j, _)| 0.5 * (quad.0[i] + quad.0[j]))
        .ok_or_else(|| Error::EstimationFailure(format!("no consistent candidate pair in {:?}", quad.0)))
}
