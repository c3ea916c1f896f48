//! Temperature of the MOT from arrival times and speeds at the cavity.

use alloc::vec;
use alloc::vec::Vec;

use crate::kinematics::{EnsembleRecord, FallConfig, BOLTZMANN};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureEstimate {
    /// K.
    pub temperature: f64,
    /// Statistical one-sigma error, K.
    pub sigma_t: f64,
    pub n_used: usize,
    /// Slowest arrival speed, m/s.
    pub v_min: f64,
    /// Arrival time of the slowest atom, ms.
    pub t_min: f64,
}

/// Mean arrival speed in uniform arrival-time bins. Only populated bins are
/// returned, as `(bin centre ms, mean speed m/s)`.
///
/// When every record has the same arrival time the result is that single
/// point.
pub fn v_shape_curve(records: &[EnsembleRecord], n_bins: usize) -> Result<Vec<(f64, f64)>> {
    if records.is_empty() {
        return Err(Error::TooFewSamples { needed: 2, got: 0 });
    }
    if n_bins < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_bins,
        });
    }
    let (lo, hi) = records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.t_arr), hi.max(r.t_arr))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_arr",
            reason: "arrival times must be finite",
        });
    }
    if hi == lo {
        let mean = records.iter().map(|r| r.v_arr).sum::<f64>() / records.len() as f64;
        return Ok(vec![(lo, mean)]);
    }
    let width = (hi - lo) / n_bins as f64;
    let mut sum = vec![0.0; n_bins];
    let mut count = vec![0usize; n_bins];
    for r in records {
        let b = (((r.t_arr - lo) / width) as usize).min(n_bins - 1);
        sum[b] += r.v_arr;
        count[b] += 1;
    }
    Ok((0..n_bins)
        .filter(|&b| count[b] > 0)
        .map(|b| (lo + (b as f64 + 0.5) * width, sum[b] / count[b] as f64))
        .collect())
}

/// Minimum of a V-curve: the lowest bin, refined by the vertex of the
/// parabola through it and its two neighbours when both exist.
pub fn curve_minimum(curve: &[(f64, f64)]) -> Option<(f64, f64)> {
    let (i, &(t, v)) = curve.iter().enumerate().fold(
        None,
        |acc: Option<(usize, &(f64, f64))>, (i, p)| match acc {
            Some(a) if a.1 .1 <= p.1 => Some(a),
            _ => Some((i, p)),
        },
    )?;
    if i == 0 || i + 1 == curve.len() {
        return Some((t, v));
    }
    let (t0, v0) = curve[i - 1];
    let (t2, v2) = curve[i + 1];
    let d0 = (v - v0) / (t - t0);
    let d1 = (v2 - v) / (t2 - t);
    let curvature = (d1 - d0) / (t2 - t0);
    if !(curvature > 0.0) {
        return Some((t, v));
    }
    // vertex of the interpolating parabola, kept inside the bracket
    let t_star = (0.5 * (t + t0) - d0 / (2.0 * curvature)).clamp(t0, t2);
    let v_star = v0 + d0 * (t_star - t0) + curvature * (t_star - t0) * (t_star - t);
    Some((t_star, v_star))
}

/// One-dimensional temperature `m·var(v0)/k_B`, with `v0 = v_arr − g·t_arr`
/// recovered from each record and the unbiased sample variance.
pub fn estimate_temperature(
    records: &[EnsembleRecord],
    fc: &FallConfig,
    atom_mass: f64,
) -> Result<TemperatureEstimate> {
    fc.validate()?;
    if !(atom_mass > 0.0 && atom_mass.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "atom_mass",
            reason: "must be positive",
        });
    }
    let n = records.len();
    if n < 10 {
        return Err(Error::TooFewSamples { needed: 10, got: n });
    }
    let v0: Vec<f64> = records
        .iter()
        .map(|r| r.v_arr - fc.gravity * r.t_arr * 1e-3)
        .collect();
    let nf = n as f64;
    let mean = v0.iter().sum::<f64>() / nf;
    let var = v0.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let scale = v0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // v0 is reconstructed from rounded records; spreads at rounding level are zero.
    let temperature = atom_mass * var / BOLTZMANN;
    if !(var > (1e-9 * scale).powi(2)) || !(temperature > 0.0) {
        return Err(Error::ZeroTemperature);
    }
    let slowest = records
        .iter()
        .fold(&records[0], |a, r| if r.v_arr < a.v_arr { r } else { a });
    Ok(TemperatureEstimate {
        temperature,
        sigma_t: temperature * math::sqrt(2.0 / (nf - 1.0)),
        n_used: n,
        v_min: slowest.v_arr,
        t_min: slowest.t_arr,
    })
}
