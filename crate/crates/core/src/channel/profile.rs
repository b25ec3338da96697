//! Phase profiles and apertures.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::geometry::{wrap_phase, LisConfig, Tile, TileGrid};

/// Parametric linear phase `β = -mod(k0·dr·(m_x·β1 + m_y·β2) + β0, 2π)`,
/// indexed relative to some center element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearPhase {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl LinearPhase {
    pub fn new(beta0: f64, beta1: f64, beta2: f64) -> Self {
        Self { beta0, beta1, beta2 }
    }

    /// Steering toward direction cosines `(beta1, beta2)` with no phase offset.
    pub fn steer(beta1: f64, beta2: f64) -> Self {
        Self::new(0.0, beta1, beta2)
    }

    /// False when a steering coefficient leaves `[-1, 1]`. Such profiles are
    /// still valid and are used by probes around edge-of-range iterates.
    pub fn is_physical(&self) -> bool {
        self.beta1.abs() <= 1.0 && self.beta2.abs() <= 1.0
    }

    /// Unwrapped phase at local offset `(di, dj)` from the profile center.
    #[inline]
    pub(crate) fn raw_phase(&self, cfg: &LisConfig, di: i64, dj: i64) -> f64 {
        -(cfg.k0() * cfg.dr * (di as f64 * self.beta1 + dj as f64 * self.beta2) + self.beta0)
    }

    /// Wrapped phase in `[0, 2π)` at local offset `(di, dj)`.
    pub fn phase_at(&self, cfg: &LisConfig, di: i64, dj: i64) -> f64 {
        wrap_phase(self.raw_phase(cfg, di, dj))
    }
}

/// Explicit per-element phases, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    mx: usize,
    my: usize,
    phases: Vec<f64>,
}

impl PhaseMatrix {
    /// Builds the matrix by evaluating `f(mx_idx, my_idx)` on every element;
    /// results are wrapped into `[0, 2π)`.
    pub fn from_fn(cfg: &LisConfig, mut f: impl FnMut(i64, i64) -> f64) -> Self {
        let (hx, hy) = (cfg.half_x(), cfg.half_y());
        let mut phases = Vec::with_capacity(cfg.element_count());
        for i in -hx..=hx {
            for j in -hy..=hy {
                phases.push(wrap_phase(f(i, j)));
            }
        }
        Self {
            mx: cfg.mx,
            my: cfg.my,
            phases,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.mx, self.my)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn get(&self, mx_idx: i64, my_idx: i64) -> f64 {
        let hx = (self.mx as i64 - 1) / 2;
        let hy = (self.my as i64 - 1) / 2;
        self.phases[((mx_idx + hx) as usize) * self.my + (my_idx + hy) as usize]
    }
}

/// Phase configuration of the whole surface.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseProfile {
    Full(PhaseMatrix),
    /// One linear profile centered on element `center`.
    Linear { params: LinearPhase, center: (i64, i64) },
    /// One linear profile per tile, each centered on its tile.
    Tiled { grid: TileGrid, params: Vec<LinearPhase> },
}

/// Rectangular block of elements, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: (i64, i64),
    pub y: (i64, i64),
}

impl Rect {
    pub fn whole(cfg: &LisConfig) -> Self {
        Self {
            x: (-cfg.half_x(), cfg.half_x()),
            y: (-cfg.half_y(), cfg.half_y()),
        }
    }

    pub fn of_tile(tile: &Tile) -> Self {
        Self {
            x: tile.x_range,
            y: tile.y_range,
        }
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x = (self.x.0.max(other.x.0), self.x.1.min(other.x.1));
        let y = (self.y.0.max(other.y.0), self.y.1.min(other.y.1));
        (x.0 <= x.1 && y.0 <= y.1).then_some(Rect { x, y })
    }

    pub fn width(&self) -> usize {
        (self.x.1 - self.x.0 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y.1 - self.y.0 + 1) as usize
    }
}

/// Set of active elements; inactive elements carry zero amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aperture {
    #[default]
    Full,
    Rect(Rect),
}

impl Aperture {
    pub fn single(mx_idx: i64, my_idx: i64) -> Self {
        Aperture::Rect(Rect {
            x: (mx_idx, mx_idx),
            y: (my_idx, my_idx),
        })
    }

    pub fn tile(tile: &Tile) -> Self {
        Aperture::Rect(Rect::of_tile(tile))
    }

    /// A centered `nx x ny` window (both odd).
    pub fn centered(nx: usize, ny: usize) -> Self {
        let (hx, hy) = ((nx as i64 - 1) / 2, (ny as i64 - 1) / 2);
        Aperture::Rect(Rect {
            x: (-hx, hx),
            y: (-hy, hy),
        })
    }

    pub fn rect(&self, cfg: &LisConfig) -> Result<Rect> {
        let whole = Rect::whole(cfg);
        match self {
            Aperture::Full => Ok(whole),
            Aperture::Rect(r) => {
                if r.x.0 > r.x.1 || r.y.0 > r.y.1 || r.intersect(&whole) != Some(*r) {
                    return domain(format!("aperture {r:?} outside a {}x{} surface", cfg.mx, cfg.my));
                }
                Ok(*r)
            }
        }
    }
}

/// A block of elements sharing one phase rule.
pub(crate) enum Segment<'a> {
    Linear { params: LinearPhase, center: (i64, i64) },
    Matrix(&'a PhaseMatrix),
}

impl PhaseProfile {
    /// Linear profile centered on the surface origin.
    pub fn linear(params: LinearPhase) -> Self {
        PhaseProfile::Linear {
            params,
            center: (0, 0),
        }
    }

    pub fn tiled(grid: TileGrid, params: Vec<LinearPhase>) -> Result<Self> {
        if grid.len() != params.len() {
            return domain(format!(
                "{} tile parameter triples for {} tiles",
                params.len(),
                grid.len()
            ));
        }
        Ok(PhaseProfile::Tiled { grid, params })
    }

    /// Checks that the profile fits the surface.
    pub fn check(&self, cfg: &LisConfig) -> Result<()> {
        match self {
            PhaseProfile::Full(m) if m.dims() != (cfg.mx, cfg.my) => domain(format!(
                "phase matrix {:?} does not match a {}x{} surface",
                m.dims(),
                cfg.mx,
                cfg.my
            )),
            PhaseProfile::Tiled { grid, .. } => {
                let covered: usize = grid.tiles().iter().map(|t| t.mx() * t.my()).sum();
                let corner = grid.tiles().last().map(|t| (t.x_range.1, t.y_range.1));
                if covered != cfg.element_count() || corner != Some((cfg.half_x(), cfg.half_y())) {
                    return domain("tile grid does not match the surface");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Wrapped phase of element `(mx_idx, my_idx)` in `[0, 2π)`.
    pub fn phase(&self, cfg: &LisConfig, mx_idx: i64, my_idx: i64) -> Result<f64> {
        cfg.check_index(mx_idx, my_idx)?;
        self.check(cfg)?;
        Ok(match self {
            PhaseProfile::Full(m) => m.get(mx_idx, my_idx),
            PhaseProfile::Linear { params, center } => {
                params.phase_at(cfg, mx_idx - center.0, my_idx - center.1)
            }
            PhaseProfile::Tiled { grid, params } => {
                let k = grid.locate(mx_idx, my_idx).expect("checked grid covers the surface");
                let (cx, cy) = grid.tiles()[k].center_index();
                params[k].phase_at(cfg, mx_idx - cx, my_idx - cy)
            }
        })
    }

    /// Unit-magnitude weight `e^{jβ}` of one element.
    pub fn weight(&self, cfg: &LisConfig, mx_idx: i64, my_idx: i64) -> Result<Complex64> {
        Ok(Complex64::from_polar(1.0, self.phase(cfg, mx_idx, my_idx)?))
    }

    /// Explicit per-element phases.
    pub fn expand(&self, cfg: &LisConfig) -> Result<PhaseMatrix> {
        self.check(cfg)?;
        if let PhaseProfile::Full(m) = self {
            return Ok(m.clone());
        }
        let mut out = PhaseMatrix::from_fn(cfg, |_, _| 0.0);
        for (rect, seg) in self.segments(cfg) {
            for i in rect.x.0..=rect.x.1 {
                for j in rect.y.0..=rect.y.1 {
                    let idx = ((i + cfg.half_x()) as usize) * cfg.my + (j + cfg.half_y()) as usize;
                    out.phases[idx] = match &seg {
                        Segment::Linear { params, center } => params.phase_at(cfg, i - center.0, j - center.1),
                        Segment::Matrix(m) => m.get(i, j),
                    };
                }
            }
        }
        Ok(out)
    }

    /// Decomposes the profile into rectangles with a single phase rule each.
    pub(crate) fn segments(&self, cfg: &LisConfig) -> Vec<(Rect, Segment<'_>)> {
        match self {
            PhaseProfile::Full(m) => vec![(Rect::whole(cfg), Segment::Matrix(m))],
            PhaseProfile::Linear { params, center } => vec![(
                Rect::whole(cfg),
                Segment::Linear {
                    params: *params,
                    center: *center,
                },
            )],
            PhaseProfile::Tiled { grid, params } => grid
                .tiles()
                .iter()
                .zip(params)
                .map(|(t, p)| {
                    (
                        Rect::of_tile(t),
                        Segment::Linear {
                            params: *p,
                            center: t.center_index(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Linear profile `(β0, β1, β2)` over the whole surface.
pub fn linear_phase_profile(beta0: f64, beta1: f64, beta2: f64) -> PhaseProfile {
    PhaseProfile::linear(LinearPhase::new(beta0, beta1, beta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn small() -> LisConfig {
        LisConfig::new(0.01, 9, 7, 0.0025, 0.002, 1.0).unwrap()
    }

    #[test]
    fn zero_profile_is_all_zero() {
        let cfg = small();
        let m = linear_phase_profile(0.0, 0.0, 0.0).expand(&cfg).unwrap();
        assert!(m.phases().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn quarter_wave_step() {
        let cfg = small();
        let p = linear_phase_profile(0.0, 1.0, 0.0);
        let b = p.phase(&cfg, 1, 0).unwrap();
        assert!((b - 3.0 * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn weights_unit_magnitude_and_in_range() {
        let cfg = small();
        let p = linear_phase_profile(2.3, -0.7, 0.41);
        let m = p.expand(&cfg).unwrap();
        assert!(m.phases().iter().all(|&b| (0.0..TAU).contains(&b)));
        for i in -4..=4 {
            for j in -3..=3 {
                let w = p.weight(&cfg, i, j).unwrap();
                assert!((w.norm() - 1.0).abs() < 1e-15);
                let expect = wrap_phase(-(cfg.k0() * cfg.dr * (i as f64 * -0.7 + j as f64 * 0.41) + 2.3));
                assert!((m.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tiled_profile_uses_tile_local_indices() {
        let cfg = LisConfig::new(0.01, 9, 9, 0.0025, 0.002, 1.0).unwrap();
        let grid = TileGrid::with_tiles(&cfg, 3).unwrap();
        let params: Vec<_> = (0..9).map(|k| LinearPhase::new(0.1 * k as f64, 0.3, -0.2)).collect();
        let p = PhaseProfile::tiled(grid.clone(), params.clone()).unwrap();
        for (k, t) in grid.tiles().iter().enumerate() {
            let (cx, cy) = t.center_index();
            assert!((p.phase(&cfg, cx, cy).unwrap() - wrap_phase(-params[k].beta0)).abs() < 1e-12);
        }
        assert!(PhaseProfile::tiled(grid, params[..4].to_vec()).is_err());
    }

    #[test]
    fn matrix_dimension_mismatch() {
        let cfg = small();
        let other = LisConfig::new(0.01, 5, 5, 0.0025, 0.002, 1.0).unwrap();
        let m = PhaseProfile::Full(PhaseMatrix::from_fn(&other, |_, _| 0.0));
        assert!(m.check(&cfg).is_err());
    }

    #[test]
    fn aperture_bounds() {
        let cfg = small();
        assert!(Aperture::single(4, 3).rect(&cfg).is_ok());
        assert!(Aperture::single(5, 0).rect(&cfg).is_err());
        assert_eq!(Aperture::centered(3, 1).rect(&cfg).unwrap().width(), 3);
    }
}
