//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; missing keys keep their defaults, unknown keys are rejected.

use std::fmt::Write as _;
use std::path::PathBuf;

use cavitrack_core::mode::CESIUM_D2_NM;
use cavitrack_core::{
    DetectorConfig, DetuningConvention, Detunings, FallConfig, ModeGeometry, ModeIndex, Rates,
    SystemConfig, CESIUM_MASS,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub g0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub delta_pa: f64,
    pub delta_ca: f64,
    pub convention: DetuningConvention,
    pub mode: (u32, u32),
    pub w0_um: f64,
    pub lambda_nm: f64,
    pub tilt_deg: f64,
    pub drop_height_m: f64,
    pub gravity: f64,
    pub timing_jitter_s: f64,
    pub atom_mass_kg: f64,
    pub bin_width_us: f64,
    pub flux0: f64,
    pub background: f64,
    pub window_start_us: f64,
    pub window_end_us: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rates = Rates::default();
        let fall = FallConfig::default();
        let det = DetectorConfig::default();
        RunConfig {
            g0: rates.g0,
            kappa: rates.kappa,
            gamma: rates.gamma,
            delta_pa: 0.0,
            delta_ca: 0.0,
            convention: DetuningConvention::NegativeCross,
            mode: (1, 0),
            w0_um: 23.8,
            lambda_nm: CESIUM_D2_NM,
            tilt_deg: 45.0,
            drop_height_m: fall.drop_height,
            gravity: fall.gravity,
            timing_jitter_s: fall.timing_jitter,
            atom_mass_kg: CESIUM_MASS,
            bin_width_us: det.bin_width,
            flux0: det.flux0,
            background: det.background,
            window_start_us: det.window.0,
            window_end_us: det.window.1,
            seed: 0,
            out: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "g0",
    "kappa",
    "gamma",
    "delta_pa",
    "delta_ca",
    "convention",
    "mode",
    "w0_um",
    "lambda_nm",
    "tilt_deg",
    "drop_height_m",
    "gravity",
    "timing_jitter_s",
    "atom_mass_kg",
    "bin_width_us",
    "flux0",
    "background",
    "window_start_us",
    "window_end_us",
    "seed",
    "out",
];

fn number(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::invalid(format!("{key}: `{value}` is not a finite number")))
}

impl RunConfig {
    /// Reads a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        cfg.merge(text)?;
        Ok(cfg)
    }

    pub fn merge(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::invalid(format!("config line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::invalid(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "g0" => self.g0 = number(key, value)?,
            "kappa" => self.kappa = number(key, value)?,
            "gamma" => self.gamma = number(key, value)?,
            "delta_pa" => self.delta_pa = number(key, value)?,
            "delta_ca" => self.delta_ca = number(key, value)?,
            "convention" => {
                self.convention = match value {
                    "negative-cross" => DetuningConvention::NegativeCross,
                    "standard" => DetuningConvention::Standard,
                    _ => {
                        return Err(CliError::invalid(format!(
                            "convention: expected `negative-cross` or `standard`, got `{value}`"
                        )))
                    }
                }
            }
            "mode" => {
                let parsed = value
                    .split_once(',')
                    .and_then(|(m, n)| Some((m.trim().parse().ok()?, n.trim().parse().ok()?)));
                self.mode = parsed.ok_or_else(|| {
                    CliError::invalid(format!("mode: expected `m,n`, got `{value}`"))
                })?;
            }
            "w0_um" => self.w0_um = number(key, value)?,
            "lambda_nm" => self.lambda_nm = number(key, value)?,
            "tilt_deg" => self.tilt_deg = number(key, value)?,
            "drop_height_m" => self.drop_height_m = number(key, value)?,
            "gravity" => self.gravity = number(key, value)?,
            "timing_jitter_s" => self.timing_jitter_s = number(key, value)?,
            "atom_mass_kg" => self.atom_mass_kg = number(key, value)?,
            "bin_width_us" => self.bin_width_us = number(key, value)?,
            "flux0" => self.flux0 = number(key, value)?,
            "background" => self.background = number(key, value)?,
            "window_start_us" => self.window_start_us = number(key, value)?,
            "window_end_us" => self.window_end_us = number(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| CliError::invalid(format!("seed: `{value}` is not an integer")))?
            }
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(CliError::invalid(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Every key with its effective value, in a form [`RunConfig::parse`]
    /// reads back unchanged.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let conv = match self.convention {
            DetuningConvention::NegativeCross => "negative-cross",
            DetuningConvention::Standard => "standard",
        };
        // `{:?}` prints the shortest decimal that parses back to the same f64
        let _ = writeln!(
            s,
            "# rates and detunings in MHz, flux0 and background in counts/s"
        );
        let _ = writeln!(s, "g0 = {:?}", self.g0);
        let _ = writeln!(s, "kappa = {:?}", self.kappa);
        let _ = writeln!(s, "gamma = {:?}", self.gamma);
        let _ = writeln!(s, "delta_pa = {:?}", self.delta_pa);
        let _ = writeln!(s, "delta_ca = {:?}", self.delta_ca);
        let _ = writeln!(s, "convention = {conv}");
        let _ = writeln!(s, "mode = {},{}", self.mode.0, self.mode.1);
        let _ = writeln!(s, "w0_um = {:?}", self.w0_um);
        let _ = writeln!(s, "lambda_nm = {:?}", self.lambda_nm);
        let _ = writeln!(s, "tilt_deg = {:?}", self.tilt_deg);
        let _ = writeln!(s, "drop_height_m = {:?}", self.drop_height_m);
        let _ = writeln!(s, "gravity = {:?}", self.gravity);
        let _ = writeln!(s, "timing_jitter_s = {:?}", self.timing_jitter_s);
        let _ = writeln!(s, "atom_mass_kg = {:?}", self.atom_mass_kg);
        let _ = writeln!(s, "bin_width_us = {:?}", self.bin_width_us);
        let _ = writeln!(s, "flux0 = {:?}", self.flux0);
        let _ = writeln!(s, "background = {:?}", self.background);
        let _ = writeln!(s, "window_start_us = {:?}", self.window_start_us);
        let _ = writeln!(s, "window_end_us = {:?}", self.window_end_us);
        let _ = writeln!(s, "seed = {}", self.seed);
        let out = self.out.as_ref().map(|p| p.display().to_string());
        let _ = writeln!(s, "out = {}", out.unwrap_or_default());
        s
    }

    pub fn system(&self) -> Result<SystemConfig, CliError> {
        let cfg = SystemConfig {
            rates: Rates {
                g0: self.g0,
                kappa: self.kappa,
                gamma: self.gamma,
            },
            detunings: Detunings {
                delta_pa: self.delta_pa,
                delta_ca: self.delta_ca,
            },
            convention: self.convention,
            mode: ModeIndex::new(self.mode.0, self.mode.1)?,
            geometry: ModeGeometry::new(self.w0_um, self.lambda_nm, self.tilt_deg)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn detector(&self) -> Result<DetectorConfig, CliError> {
        let det = DetectorConfig {
            bin_width: self.bin_width_us,
            flux0: self.flux0,
            background: self.background,
            window: (self.window_start_us, self.window_end_us),
        };
        det.validate()?;
        Ok(det)
    }

    pub fn fall(&self) -> Result<FallConfig, CliError> {
        let fc = FallConfig {
            drop_height: self.drop_height_m,
            gravity: self.gravity,
            timing_jitter: self.timing_jitter_s,
        };
        fc.validate()?;
        Ok(fc)
    }
}
