//! Hermite-Gaussian transverse modes of a Fabry-Perot cavity.
//!
//! Lab frame: `x` is vertical and points along the fall direction, `y` is the
//! horizontal off-axis coordinate, `z` runs along the cavity axis with an
//! antinode at `z = 0`. The mode frame is the lab frame rotated by the tilt
//! angle about `z`.

use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::math;
use crate::{Error, Result};

/// Highest Hermite order accepted by [`hermite`].
pub const MAX_HERMITE_ORDER: u32 = 10;

/// Transverse mode orders `(m, n)` along the mode-frame `x` and `y` axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub m: u32,
    pub n: u32,
}

impl ModeIndex {
    pub const TEM00: ModeIndex = ModeIndex { m: 0, n: 0 };
    pub const TEM10: ModeIndex = ModeIndex { m: 1, n: 0 };
    pub const TEM01: ModeIndex = ModeIndex { m: 0, n: 1 };

    pub fn new(m: u32, n: u32) -> Result<Self> {
        let idx = ModeIndex { m, n };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        let order = self.m.max(self.n);
        if order > MAX_HERMITE_ORDER {
            return Err(Error::UnsupportedOrder {
                order,
                max: MAX_HERMITE_ORDER,
            });
        }
        Ok(())
    }

    /// `C_mn / C_00 = (2^(m+n) m! n!)^(-1/2)`.
    fn relative_norm(&self) -> f64 {
        let mut denom = 1.0;
        for k in 1..=self.m {
            denom *= 2.0 * k as f64;
        }
        for k in 1..=self.n {
            denom *= 2.0 * k as f64;
        }
        1.0 / math::sqrt(denom)
    }
}

impl Default for ModeIndex {
    fn default() -> Self {
        ModeIndex::TEM10
    }
}

/// Waist, wavelength and tilt of the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    /// Mode waist in μm.
    pub w0: f64,
    /// Optical wavelength in nm.
    pub lambda: f64,
    /// Rotation of the mode frame about the cavity axis, degrees in [-90, 90).
    pub tilt_deg: f64,
}

/// Cesium D2 line.
pub const CESIUM_D2_NM: f64 = 852.347;

impl ModeGeometry {
    pub fn new(w0: f64, lambda: f64, tilt_deg: f64) -> Result<Self> {
        let geo = ModeGeometry {
            w0,
            lambda,
            tilt_deg: normalize_tilt(tilt_deg),
        };
        geo.validate()?;
        Ok(geo)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "w0",
                reason: "must be positive and finite",
            });
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be positive and finite",
            });
        }
        if !self.tilt_deg.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tilt",
                reason: "must be finite",
            });
        }
        Ok(())
    }

    pub fn tilt_rad(&self) -> f64 {
        self.tilt_deg.to_radians()
    }

    /// Precomputed rotation for repeated lab-to-mode conversions.
    pub fn rotation(&self) -> Rotation {
        Rotation::new(self.tilt_rad())
    }
}

impl Default for ModeGeometry {
    fn default() -> Self {
        ModeGeometry {
            w0: 23.8,
            lambda: CESIUM_D2_NM,
            tilt_deg: 45.0,
        }
    }
}

/// Maps any angle onto [-90°, 90°). A Hermite-Gaussian mode rotated by 180°
/// differs only by an overall sign.
pub fn normalize_tilt(deg: f64) -> f64 {
    let r = (deg + 90.0) % 180.0;
    let r = if r < 0.0 { r + 180.0 } else { r };
    r - 90.0
}

/// A point in the lab frame. `x`, `y` in μm, `z` in nm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A point in the (tilted) mode frame. `x`, `y` in μm, `z` in nm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LabPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        LabPoint { x, y, z }
    }
}

impl ModePoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ModePoint { x, y, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    sin: f64,
    cos: f64,
}

impl Rotation {
    pub fn new(theta_rad: f64) -> Self {
        let (sin, cos) = math::sin_cos(theta_rad);
        Rotation { sin, cos }
    }

    #[inline]
    pub fn to_mode(&self, p: LabPoint) -> ModePoint {
        ModePoint {
            x: p.x * self.cos + p.y * self.sin,
            y: -p.x * self.sin + p.y * self.cos,
            z: p.z,
        }
    }

    #[inline]
    pub fn to_lab(&self, p: ModePoint) -> LabPoint {
        LabPoint {
            x: p.x * self.cos - p.y * self.sin,
            y: p.x * self.sin + p.y * self.cos,
            z: p.z,
        }
    }
}

/// Physicists' Hermite polynomial `H_order(u)` by upward recurrence.
pub fn hermite(order: u32, u: f64) -> Result<f64> {
    if order > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(hermite_unchecked(order, u))
}

#[inline]
fn hermite_unchecked(order: u32, u: f64) -> f64 {
    match order {
        0 => 1.0,
        1 => 2.0 * u,
        _ => {
            let (mut prev, mut cur) = (1.0, 2.0 * u);
            for k in 1..order {
                let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `x_m = x cosθ + y sinθ`, `y_m = -x sinθ + y cosθ`, `z` unchanged.
pub fn lab_to_mode(p: LabPoint, theta_rad: f64) -> ModePoint {
    Rotation::new(theta_rad).to_mode(p)
}

/// Inverse of [`lab_to_mode`].
pub fn mode_to_lab(p: ModePoint, theta_rad: f64) -> LabPoint {
    Rotation::new(theta_rad).to_lab(p)
}

/// Transverse and axial shape without normalization:
/// `exp(-(x²+y²)/w0²) H_m(√2 x/w0) H_n(√2 y/w0) cos(2πz/λ)`.
#[inline]
fn shape(idx: ModeIndex, geo: &ModeGeometry, p: ModePoint) -> f64 {
    let sx = p.x / geo.w0;
    let sy = p.y / geo.w0;
    let gauss = math::exp(-(sx * sx + sy * sy));
    let hm = hermite_unchecked(idx.m, SQRT_2 * sx);
    let hn = hermite_unchecked(idx.n, SQRT_2 * sy);
    gauss * hm * hn * math::cos(2.0 * PI * p.z / geo.lambda)
}

/// Normalized mode function `Ψ_mn(x, y, z)` in μm⁻¹ (signed).
///
/// The transverse part is normalized so that `∫∫ Ψ² dx dy = 1` at an antinode.
pub fn mode_amplitude_3d(idx: ModeIndex, geo: &ModeGeometry, p: ModePoint) -> f64 {
    let c00 = 1.0 / math::sqrt(geo.w0 * geo.w0 * FRAC_PI_2);
    c00 * idx.relative_norm() * shape(idx, geo, p)
}

/// `Ψ_mn(p) / Ψ_00(0, 0, 0)`.
pub fn relative_amplitude(idx: ModeIndex, geo: &ModeGeometry, p: ModePoint) -> f64 {
    idx.relative_norm() * shape(idx, geo, p)
}

/// `g0 · |Ψ_mn(p) / Ψ_00(0)|`. Only `g_eff²` enters the transmission, so the
/// magnitude is returned.
pub fn effective_coupling(g0: f64, idx: ModeIndex, geo: &ModeGeometry, p: ModePoint) -> f64 {
    g0 * relative_amplitude(idx, geo, p).abs()
}
