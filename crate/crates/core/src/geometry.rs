//! Surface geometry: element grid, user position, distances and near-field
//! tiling.
//!
//! The surface lies in the x-y plane with its center element at the origin.
//! Element indices are center-symmetric integers, so both element counts must
//! be odd.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{domain, Error, Result};

/// Geometry and radio constants of a planar surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LisConfig {
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Elements along x (odd).
    pub mx: usize,
    /// Elements along y (odd).
    pub my: usize,
    /// Element spacing in meters.
    pub dr: f64,
    /// Element edge length in meters.
    pub le: f64,
    /// Element power-pattern factor, the same for every element.
    pub pattern_factor: f64,
}

impl LisConfig {
    pub fn new(
        wavelength: f64,
        mx: usize,
        my: usize,
        dr: f64,
        le: f64,
        pattern_factor: f64,
    ) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return domain(format!("wavelength must be positive, got {wavelength}"));
        }
        if mx == 0 || my == 0 || mx % 2 == 0 || my % 2 == 0 {
            return domain(format!("element counts must be odd and positive, got {mx}x{my}"));
        }
        if !(dr > 0.0 && dr.is_finite()) {
            return domain(format!("element spacing must be positive, got {dr}"));
        }
        if !(le > 0.0 && le <= dr) {
            return domain(format!("element size must lie in (0, dr], got {le}"));
        }
        if !(pattern_factor >= 0.0 && pattern_factor.is_finite()) {
            return domain(format!("pattern factor must be non-negative, got {pattern_factor}"));
        }
        Ok(Self {
            wavelength,
            mx,
            my,
            dr,
            le,
            pattern_factor,
        })
    }

    /// 30 GHz reference surface: 257x257 elements at a quarter-wavelength
    /// pitch, element size 0.8 of the pitch, isotropic pattern.
    pub fn reference_30ghz() -> Self {
        let wavelength = 0.01;
        let dr = wavelength / 4.0;
        Self::new(wavelength, 257, 257, dr, 0.8 * dr, 1.0).expect("reference surface is valid")
    }

    /// Same radio constants with a different element grid.
    pub fn with_elements(&self, mx: usize, my: usize) -> Result<Self> {
        Self::new(self.wavelength, mx, my, self.dr, self.le, self.pattern_factor)
    }

    pub fn lx(&self) -> f64 {
        self.mx as f64 * self.dr
    }

    pub fn ly(&self) -> f64 {
        self.my as f64 * self.dr
    }

    /// Wave number 2π/λ.
    pub fn k0(&self) -> f64 {
        TAU / self.wavelength
    }

    /// Surface diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lx().hypot(self.ly())
    }

    /// Aperture width in wavelengths.
    pub fn kx(&self) -> f64 {
        self.lx() / self.wavelength
    }

    /// Aperture length in wavelengths.
    pub fn ky(&self) -> f64 {
        self.ly() / self.wavelength
    }

    pub fn element_count(&self) -> usize {
        self.mx * self.my
    }

    /// Largest element index magnitude along x.
    pub fn half_x(&self) -> i64 {
        (self.mx as i64 - 1) / 2
    }

    /// Largest element index magnitude along y.
    pub fn half_y(&self) -> i64 {
        (self.my as i64 - 1) / 2
    }

    pub fn contains(&self, mx_idx: i64, my_idx: i64) -> bool {
        mx_idx.abs() <= self.half_x() && my_idx.abs() <= self.half_y()
    }

    pub(crate) fn check_index(&self, mx_idx: i64, my_idx: i64) -> Result<()> {
        if self.contains(mx_idx, my_idx) {
            Ok(())
        } else {
            domain(format!(
                "element ({mx_idx}, {my_idx}) outside a {}x{} surface",
                self.mx, self.my
            ))
        }
    }
}

/// User position relative to the surface center, in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserGeometry {
    pub d0: f64,
    pub theta: f64,
    pub phi: f64,
}

impl UserGeometry {
    pub fn new(d0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(d0 > 0.0 && d0.is_finite()) {
            return domain(format!("user distance must be positive, got {d0}"));
        }
        direction_cosines(theta, phi)?;
        Ok(Self { d0, theta, phi })
    }

    pub fn alpha1(&self) -> f64 {
        self.theta.sin() * self.phi.cos()
    }

    pub fn alpha2(&self) -> f64 {
        self.theta.sin() * self.phi.sin()
    }

    /// Cartesian user position in meters.
    pub fn position(&self) -> [f64; 3] {
        [
            self.d0 * self.alpha1(),
            self.d0 * self.alpha2(),
            self.d0 * self.theta.cos(),
        ]
    }
}

/// Direction cosines `(sinθ·cosφ, sinθ·sinφ)`.
pub fn direction_cosines(theta: f64, phi: f64) -> Result<(f64, f64)> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return domain(format!("elevation {theta} outside [0, π/2]"));
    }
    if !(0.0..TAU).contains(&phi) {
        return domain(format!("azimuth {phi} outside [0, 2π)"));
    }
    let s = theta.sin();
    Ok((s * phi.cos(), s * phi.sin()))
}

pub fn element_position(cfg: &LisConfig, mx_idx: i64, my_idx: i64) -> Result<[f64; 3]> {
    cfg.check_index(mx_idx, my_idx)?;
    Ok([mx_idx as f64 * cfg.dr, my_idx as f64 * cfg.dr, 0.0])
}

/// Distance from element `(mx_idx, my_idx)` to the user, by the cosine rule.
pub fn exact_distance(cfg: &LisConfig, geom: &UserGeometry, mx_idx: i64, my_idx: i64) -> Result<f64> {
    cfg.check_index(mx_idx, my_idx)?;
    Ok(distance_unchecked(cfg, geom, mx_idx, my_idx))
}

#[inline]
pub(crate) fn distance_unchecked(cfg: &LisConfig, geom: &UserGeometry, mx_idx: i64, my_idx: i64) -> f64 {
    let (i, j) = (mx_idx as f64, my_idx as f64);
    let d0 = geom.d0;
    let dr = cfg.dr;
    (d0 * d0 + dr * dr * (i * i + j * j) - 2.0 * d0 * dr * (i * geom.alpha1() + j * geom.alpha2())).sqrt()
}

/// Fraunhofer distance `2·D²/λ` of the whole surface.
pub fn fraunhofer_distance(cfg: &LisConfig) -> f64 {
    2.0 * cfg.diagonal().powi(2) / cfg.wavelength
}

/// Whether the user lies in the far field of the whole surface.
pub fn is_far_field(cfg: &LisConfig, d0: f64) -> bool {
    d0 >= fraunhofer_distance(cfg)
}

/// One rectangular sub-aperture of a [`TileGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tile {
    /// Tile index along x, in `-(N-1)/2 ..= (N-1)/2`.
    pub nx: i64,
    /// Tile index along y.
    pub ny: i64,
    /// Inclusive global element index range along x.
    pub x_range: (i64, i64),
    /// Inclusive global element index range along y.
    pub y_range: (i64, i64),
}

impl Tile {
    pub fn mx(&self) -> usize {
        (self.x_range.1 - self.x_range.0 + 1) as usize
    }

    pub fn my(&self) -> usize {
        (self.y_range.1 - self.y_range.0 + 1) as usize
    }

    /// Global index of the tile's center element. Tile element counts are odd,
    /// so the center is always an element.
    pub fn center_index(&self) -> (i64, i64) {
        (
            (self.x_range.0 + self.x_range.1) / 2,
            (self.y_range.0 + self.y_range.1) / 2,
        )
    }

    pub fn center(&self, cfg: &LisConfig) -> [f64; 3] {
        let (cx, cy) = self.center_index();
        [cx as f64 * cfg.dr, cy as f64 * cfg.dr, 0.0]
    }

    pub fn lx(&self, cfg: &LisConfig) -> f64 {
        self.mx() as f64 * cfg.dr
    }

    pub fn ly(&self, cfg: &LisConfig) -> f64 {
        self.my() as f64 * cfg.dr
    }

    pub fn diagonal(&self, cfg: &LisConfig) -> f64 {
        self.lx(cfg).hypot(self.ly(cfg))
    }

    /// Fraunhofer distance of this tile alone.
    pub fn fraunhofer_distance(&self, cfg: &LisConfig) -> f64 {
        2.0 * self.diagonal(cfg).powi(2) / cfg.wavelength
    }

    /// The tile viewed as a stand-alone surface.
    pub fn as_surface(&self, cfg: &LisConfig) -> LisConfig {
        LisConfig {
            mx: self.mx(),
            my: self.my(),
            ..*cfg
        }
    }

    pub fn contains(&self, mx_idx: i64, my_idx: i64) -> bool {
        (self.x_range.0..=self.x_range.1).contains(&mx_idx)
            && (self.y_range.0..=self.y_range.1).contains(&my_idx)
    }

    /// Distance from the tile center to the user and the tile-local direction
    /// cosines of the user.
    pub fn user_view(&self, cfg: &LisConfig, geom: &UserGeometry) -> TileView {
        let u = geom.position();
        let c = self.center(cfg);
        let (dx, dy, dz) = (u[0] - c[0], u[1] - c[1], u[2] - c[2]);
        let distance = (dx * dx + dy * dy + dz * dz).sqrt();
        TileView {
            distance,
            alpha1: dx / distance,
            alpha2: dy / distance,
        }
    }
}

/// User distance and direction cosines seen from a tile center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileView {
    pub distance: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Partition of the surface into `n x n` tiles, each in its own far field.
#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid {
    n: usize,
    tiles: Vec<Tile>,
}

impl TileGrid {
    /// Tiles per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Tiles in row-major order: `nx` outer, `ny` inner, both ascending.
    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn get(&self, index: usize) -> Result<&Tile> {
        self.tiles
            .get(index)
            .ok_or_else(|| Error::Domain(format!("tile {index} outside a grid of {}", self.tiles.len())))
    }

    /// Position in [`Self::tiles`] of tile `(nx, ny)`.
    pub fn index_of(&self, nx: i64, ny: i64) -> Result<usize> {
        let half = (self.n as i64 - 1) / 2;
        if nx.abs() > half || ny.abs() > half {
            return domain(format!("tile ({nx}, {ny}) outside a {0}x{0} grid", self.n));
        }
        Ok(((nx + half) * self.n as i64 + (ny + half)) as usize)
    }

    /// Tile containing a given element.
    pub fn locate(&self, mx_idx: i64, my_idx: i64) -> Option<usize> {
        self.tiles.iter().position(|t| t.contains(mx_idx, my_idx))
    }

    /// Largest tile Fraunhofer distance in the grid.
    pub fn max_fraunhofer_distance(&self, cfg: &LisConfig) -> f64 {
        self.tiles
            .iter()
            .map(|t| t.fraunhofer_distance(cfg))
            .fold(0.0, f64::max)
    }

    /// A grid with exactly `n` tiles per axis, regardless of distance.
    pub fn with_tiles(cfg: &LisConfig, n: usize) -> Result<Self> {
        if n == 0 || n % 2 == 0 {
            return domain(format!("tile count per axis must be odd, got {n}"));
        }
        if n > cfg.mx.min(cfg.my) {
            return domain(format!("{n} tiles per axis exceed a {}x{} surface", cfg.mx, cfg.my));
        }
        let xs = split_odd(cfg.mx, n);
        let ys = split_odd(cfg.my, n);
        let half = (n as i64 - 1) / 2;
        let mut tiles = Vec::with_capacity(n * n);
        for (ix, &x_range) in xs.iter().enumerate() {
            for (iy, &y_range) in ys.iter().enumerate() {
                tiles.push(Tile {
                    nx: ix as i64 - half,
                    ny: iy as i64 - half,
                    x_range,
                    y_range,
                });
            }
        }
        Ok(Self { n, tiles })
    }
}

/// Splits `count` (odd) elements into `parts` (odd) contiguous runs of odd
/// length, as equal as possible and symmetric about the center. Returns
/// inclusive center-based index ranges.
fn split_odd(count: usize, parts: usize) -> Vec<(i64, i64)> {
    debug_assert!(count % 2 == 1 && parts % 2 == 1 && parts <= count);
    let mut base = count / parts;
    if base % 2 == 0 {
        base -= 1;
    }
    let mut sizes = vec![base; parts];
    // Remainder is even and below 2·parts: hand out +2 from the center outward.
    let mut bumps = (count - base * parts) / 2;
    let mid = parts / 2;
    if bumps % 2 == 1 {
        sizes[mid] += 2;
        bumps -= 1;
    }
    for k in 1..=bumps / 2 {
        sizes[mid - k] += 2;
        sizes[mid + k] += 2;
    }
    let mut start = -((count as i64 - 1) / 2);
    sizes
        .into_iter()
        .map(|s| {
            let r = (start, start + s as i64 - 1);
            start += s as i64;
            r
        })
        .collect()
}

/// Smallest odd tiling whose every tile satisfies `d0 ≥ 2·D_T²/λ`.
pub fn make_tile_grid(cfg: &LisConfig, d0: f64) -> Result<TileGrid> {
    if !(d0 > 0.0) {
        return domain(format!("user distance must be positive, got {d0}"));
    }
    let max_tiles = cfg.mx.min(cfg.my);
    let longest = |count: usize, n: usize| split_odd(count, n).iter().map(|r| r.1 - r.0 + 1).max();
    for n in (1..=max_tiles).step_by(2) {
        let (sx, sy) = (longest(cfg.mx, n).unwrap_or(0), longest(cfg.my, n).unwrap_or(0));
        let diag2 = (sx as f64 * cfg.dr).powi(2) + (sy as f64 * cfg.dr).powi(2);
        if 2.0 * diag2 / cfg.wavelength <= d0 {
            return TileGrid::with_tiles(cfg, n);
        }
    }
    Err(Error::InfeasibleTiling { d0, max_tiles })
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Wraps a phase difference into `(-π, π]`.
pub fn wrap_signed(phase: f64) -> f64 {
    let p = (phase + PI).rem_euclid(TAU) - PI;
    if p <= -PI {
        p + TAU
    } else {
        p
    }
}
