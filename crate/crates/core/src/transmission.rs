//! Weak-field transmission of the atom-cavity system.
//!
//! With rates in MHz (ν = ω/2π),
//!
//! ```text
//!              κ²(γ² + Δpa²)
//! T = ─────────────────────────────────────────────────────────────
//!     [g² − Δpa² − s·Δca·Δpa + γκ]² + (κΔpa + γΔpa − γΔca)²
//! ```
//!
//! where `s = +1` for [`DetuningConvention::NegativeCross`] and `s = −1` for
//! [`DetuningConvention::Standard`]. The empty cavity on resonance has `T = 1`.

use alloc::vec::Vec;

use crate::mode::{effective_coupling, LabPoint, ModeGeometry, ModeIndex, Rotation};
use crate::{Error, Result};

/// Coupling and decay rates in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    /// Optimal TEM00 coupling.
    pub g0: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Atomic dipole decay rate.
    pub gamma: f64,
}

impl Rates {
    pub fn new(g0: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let r = Rates { g0, kappa, gamma };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g0", self.g0),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "rate must be positive and finite",
                });
            }
        }
        Ok(())
    }

    /// `g0 > κ` and `g0 > γ`. Callers report a failure as a warning.
    pub fn is_strong_coupling(&self) -> bool {
        self.g0 > self.kappa && self.g0 > self.gamma
    }
}

impl Default for Rates {
    fn default() -> Self {
        Rates {
            g0: 23.9,
            kappa: 2.6,
            gamma: 2.6,
        }
    }
}

/// Probe-atom and cavity-atom detunings in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Detunings {
    pub delta_pa: f64,
    pub delta_ca: f64,
}

impl Detunings {
    pub fn validate(&self) -> Result<()> {
        if !self.delta_pa.is_finite() || !self.delta_ca.is_finite() {
            return Err(Error::InvalidParameter {
                name: "detuning",
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// Sign of the `Δca·Δpa` cross term in the real part of the denominator.
///
/// `NegativeCross` uses `−Δca·Δpa`. `Standard` uses `+Δca·Δpa`, which is what the
/// expansion of `|(γ + iΔpa)(κ + i(Δpa − Δca)) + g²|²` gives. The two agree
/// whenever `Δca = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningConvention {
    #[default]
    NegativeCross,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemConfig {
    pub rates: Rates,
    pub detunings: Detunings,
    pub convention: DetuningConvention,
    pub mode: ModeIndex,
    pub geometry: ModeGeometry,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.rates.validate()?;
        self.detunings.validate()?;
        self.mode.validate()?;
        self.geometry.validate()
    }

    /// Evaluates transmission at many lab points with one precomputed rotation.
    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            cfg: self,
            rotation: self.geometry.rotation(),
        }
    }
}

/// Transmission for a given effective coupling `g` (MHz).
pub fn transmission_from_coupling(
    rates: &Rates,
    det: &Detunings,
    convention: DetuningConvention,
    g: f64,
) -> Result<f64> {
    let Rates { kappa, gamma, .. } = *rates;
    let Detunings { delta_pa, delta_ca } = *det;
    let cross = match convention {
        DetuningConvention::NegativeCross => -delta_ca * delta_pa,
        DetuningConvention::Standard => delta_ca * delta_pa,
    };
    let re = g * g - delta_pa * delta_pa + cross + gamma * kappa;
    let im = kappa * delta_pa + gamma * delta_pa - gamma * delta_ca;
    let denom = re * re + im * im;
    if denom == 0.0 {
        return Err(Error::SingularParameters);
    }
    Ok(kappa * kappa * (gamma * gamma + delta_pa * delta_pa) / denom)
}

pub struct Evaluator<'a> {
    cfg: &'a SystemConfig,
    rotation: Rotation,
}

impl Evaluator<'_> {
    #[inline]
    pub fn coupling(&self, p: LabPoint) -> f64 {
        let mp = self.rotation.to_mode(p);
        effective_coupling(self.cfg.rates.g0, self.cfg.mode, &self.cfg.geometry, mp)
    }

    #[inline]
    pub fn transmission(&self, p: LabPoint) -> Result<f64> {
        let g = self.coupling(p);
        transmission_from_coupling(&self.cfg.rates, &self.cfg.detunings, self.cfg.convention, g)
    }
}

/// Transmission at a lab-frame point. With `p.z = 0` this is the
/// two-dimensional form used near an antinode.
pub fn transmission_at(cfg: &SystemConfig, p: LabPoint) -> Result<f64> {
    cfg.evaluator().transmission(p)
}

fn grid(start: f64, end: f64, samples: usize) -> Result<impl Iterator<Item = f64>> {
    if !(start < end) || !start.is_finite() || !end.is_finite() {
        return Err(Error::EmptyRange { start, end });
    }
    if samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let step = (end - start) / (samples - 1) as f64;
    Ok((0..samples).map(move |i| {
        if i == samples - 1 {
            end
        } else {
            start + step * i as f64
        }
    }))
}

/// Transmission along the vertical lab line at `y_lab` (μm), `z = 0`.
/// Returns `(x_um, T)` pairs.
pub fn position_scan(
    cfg: &SystemConfig,
    y_lab: f64,
    x_range: (f64, f64),
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let eval = cfg.evaluator();
    grid(x_range.0, x_range.1, samples)?
        .map(|x| Ok((x, eval.transmission(LabPoint::new(x, y_lab, 0.0))?)))
        .collect()
}

/// Transmission versus probe-atom detuning at a fixed point, `Δca` held at
/// its configured value. Returns `(Δpa_MHz, T)` pairs.
pub fn detuning_scan(
    cfg: &SystemConfig,
    p: LabPoint,
    delta_pa_range: (f64, f64),
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    coupling_detuning_scan(cfg, cfg.evaluator().coupling(p), delta_pa_range, samples)
}

/// As [`detuning_scan`], for a given effective coupling `g` (MHz) instead of
/// a position.
pub fn coupling_detuning_scan(
    cfg: &SystemConfig,
    g: f64,
    delta_pa_range: (f64, f64),
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: "coupling must be non-negative",
        });
    }
    grid(delta_pa_range.0, delta_pa_range.1, samples)?
        .map(|d| {
            let det = Detunings {
                delta_pa: d,
                delta_ca: cfg.detunings.delta_ca,
            };
            Ok((
                d,
                transmission_from_coupling(&cfg.rates, &det, cfg.convention, g)?,
            ))
        })
        .collect()
}

/// Indices of strict three-point local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    values
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] && w[1] > w[2])
        .map(|(i, _)| i + 1)
        .collect()
}

/// Indices of strict three-point local minima.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    values
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0] && w[1] < w[2])
        .map(|(i, _)| i + 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::ModeGeometry;
    use approx::assert_relative_eq;

    fn default_rates() -> Rates {
        Rates::default()
    }

    fn t_of(g: f64, dpa: f64, dca: f64) -> f64 {
        let det = Detunings {
            delta_pa: dpa,
            delta_ca: dca,
        };
        transmission_from_coupling(&default_rates(), &det, DetuningConvention::NegativeCross, g)
            .unwrap()
    }

    #[test]
    fn empty_cavity_on_resonance_is_unity() {
        assert_eq!(t_of(0.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn resonant_suppression() {
        let t = t_of(23.9, 0.0, 0.0);
        assert_relative_eq!(t, (6.76f64 / 577.97).powi(2), max_relative = 1e-12);
        assert_relative_eq!(t, 1.368e-4, max_relative = 1e-3);
    }

    #[test]
    fn detuned_term_by_term() {
        // numerator 6.76·(6.76 + 571.21), denominator (-144.2)² + (-124.28)²
        let t = t_of(20.5, -23.9, 0.0);
        assert_relative_eq!(t, 3907.0772 / 36239.1584, max_relative = 1e-12);
        assert_relative_eq!(t, 0.10782, epsilon = 1e-5);
    }

    #[test]
    fn conventions_agree_without_cavity_detuning() {
        let det = Detunings {
            delta_pa: -7.0,
            delta_ca: 0.0,
        };
        let r = default_rates();
        let a =
            transmission_from_coupling(&r, &det, DetuningConvention::NegativeCross, 11.0).unwrap();
        let b = transmission_from_coupling(&r, &det, DetuningConvention::Standard, 11.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standard_convention_matches_complex_expansion() {
        // |(γ + iΔpa)(κ + i(Δpa − Δca)) + g²|², expanded independently.
        let r = default_rates();
        let (g, dpa, dca) = (9.0, 3.0, -4.5);
        let (ar, ai) = (r.gamma, dpa);
        let (br, bi) = (r.kappa, dpa - dca);
        let re = ar * br - ai * bi + g * g;
        let im = ar * bi + ai * br;
        let expected = r.kappa * r.kappa * (r.gamma * r.gamma + dpa * dpa) / (re * re + im * im);
        let det = Detunings {
            delta_pa: dpa,
            delta_ca: dca,
        };
        let got = transmission_from_coupling(&r, &det, DetuningConvention::Standard, g).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-13);
        let negative =
            transmission_from_coupling(&r, &det, DetuningConvention::NegativeCross, g).unwrap();
        assert!((negative - expected).abs() > 1e-6);
    }

    #[test]
    fn singular_denominator() {
        // γ = 1, κ = 7/8, Δpa = 3, Δca = 45/8, g = 5 zero both parts of the
        // denominator with the negative cross term, exactly in binary.
        let r = Rates::new(23.9, 0.875, 1.0).unwrap();
        let det = Detunings {
            delta_pa: 3.0,
            delta_ca: 5.625,
        };
        assert_eq!(
            transmission_from_coupling(&r, &det, DetuningConvention::NegativeCross, 5.0),
            Err(Error::SingularParameters)
        );
        assert!(transmission_from_coupling(&r, &det, DetuningConvention::Standard, 5.0).is_ok());
        assert!(
            transmission_from_coupling(&r, &det, DetuningConvention::NegativeCross, 4.0).is_ok()
        );
    }

    #[test]
    fn rate_validation() {
        assert!(Rates::new(23.9, 0.0, 2.6).is_err());
        assert!(Rates::new(-1.0, 2.6, 2.6).is_err());
        assert!(!Rates::new(1.0, 2.6, 2.6).unwrap().is_strong_coupling());
        assert!(Rates::default().is_strong_coupling());
    }

    fn untilted() -> SystemConfig {
        SystemConfig {
            geometry: ModeGeometry {
                tilt_deg: 0.0,
                ..ModeGeometry::default()
            },
            ..SystemConfig::default()
        }
    }

    #[test]
    fn position_scan_double_dip() {
        let cfg = untilted();
        let scan = position_scan(&cfg, 0.0, (-60.0, 60.0), 2001).unwrap();
        let t: Vec<f64> = scan.iter().map(|s| s.1).collect();
        let minima = local_minima(&t);
        assert_eq!(minima.len(), 2);
        let w = cfg.geometry.w0 / core::f64::consts::SQRT_2;
        assert!((scan[minima[0]].0 + w).abs() < 0.1);
        assert!((scan[minima[1]].0 - w).abs() < 0.1);
    }

    #[test]
    fn position_scan_even_in_y() {
        let cfg = untilted();
        let a = position_scan(&cfg, 45.0, (-80.0, 80.0), 501).unwrap();
        let b = position_scan(&cfg, -45.0, (-80.0, 80.0), 501).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.1 - q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn tem00_single_dip() {
        let cfg = SystemConfig {
            mode: ModeIndex::TEM00,
            ..untilted()
        };
        let scan = position_scan(&cfg, 0.0, (-50.0, 50.0), 2001).unwrap();
        let t: Vec<f64> = scan.iter().map(|s| s.1).collect();
        let minima = local_minima(&t);
        assert_eq!(minima.len(), 1);
        assert_eq!(scan[minima[0]].0, 0.0);
        assert_relative_eq!(t[minima[0]], 1.368e-4, max_relative = 1e-3);
    }

    #[test]
    fn scan_range_errors() {
        let cfg = untilted();
        assert!(matches!(
            position_scan(&cfg, 0.0, (1.0, 1.0), 10),
            Err(Error::EmptyRange { .. })
        ));
        assert!(matches!(
            detuning_scan(&cfg, LabPoint::default(), (-1.0, 1.0), 1),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn detuning_scan_lorentzian_and_rabi_split() {
        let cfg = untilted();
        // Nodal line: g = 0.
        let empty = detuning_scan(&cfg, LabPoint::default(), (-30.0, 30.0), 2001).unwrap();
        for (d, t) in &empty {
            assert!((t - 6.76 / (6.76 + d * d)).abs() < 1e-12);
        }
        // TEM00 at the centre: g = g0, peaks near ±g0.
        let cfg00 = SystemConfig {
            mode: ModeIndex::TEM00,
            ..cfg
        };
        let split = detuning_scan(&cfg00, LabPoint::default(), (-40.0, 40.0), 4001).unwrap();
        let t: Vec<f64> = split.iter().map(|s| s.1).collect();
        let peaks = local_maxima(&t);
        assert_eq!(peaks.len(), 2);
        for (&i, sign) in peaks.iter().zip([-1.0, 1.0]) {
            assert!((split[i].0 - sign * 23.9).abs() < 0.5, "{}", split[i].0);
        }
        let on_res = split.iter().find(|s| s.0 == 0.0).unwrap();
        assert!(on_res.1 < 1.0);
    }
}
