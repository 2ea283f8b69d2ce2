//! Flat `key = value unit` run configuration.
//!
//! Every key has a physical dimension; values may carry any unit of that
//! dimension and are stored in SI. The canonical echo writes SI values with
//! the shortest exact decimal representation, so parsing an echo gives back
//! the same configuration bit for bit.

use std::fmt::Write as _;

use ghost_opa_core::presets;
use ghost_opa_core::rates::angular_bandwidth;
use ghost_opa_core::{DetectionSpec, DoubleSlitAperture, OpticalGeometry, QuadOptions, SourceSpec};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Time,
    Angle,
    Frequency,
    Dimensionless,
    Count,
}

impl Dim {
    fn si_unit(self) -> &'static str {
        match self {
            Dim::Length => "m",
            Dim::Time => "s",
            Dim::Angle => "rad",
            Dim::Frequency => "Hz",
            Dim::Dimensionless | Dim::Count => "",
        }
    }

    /// Decimal exponent of `unit` relative to the SI unit.
    fn exponent(self, unit: &str) -> Option<i32> {
        let e = match (self, unit) {
            (Dim::Dimensionless | Dim::Count, "") => 0,
            (Dim::Length, "m") => 0,
            (Dim::Length, "cm") => -2,
            (Dim::Length, "mm") => -3,
            (Dim::Length, "um" | "µm") => -6,
            (Dim::Length, "nm") => -9,
            (Dim::Time, "s") => 0,
            (Dim::Time, "ms") => -3,
            (Dim::Time, "us" | "µs") => -6,
            (Dim::Time, "ns") => -9,
            (Dim::Time, "ps") => -12,
            (Dim::Time, "fs") => -15,
            (Dim::Angle, "rad") => 0,
            (Dim::Angle, "mrad") => -3,
            (Dim::Angle, "urad" | "µrad") => -6,
            (Dim::Frequency, "Hz" | "1/s") => 0,
            (Dim::Frequency, "kHz") => 3,
            (Dim::Frequency, "MHz") => 6,
            (Dim::Frequency, "GHz") => 9,
            _ => return None,
        };
        Some(e)
    }
}

/// Everything a command needs. All quantities SI.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda_p: f64,
    pub d1: f64,
    pub d1p: f64,
    pub d2: f64,
    pub slit_separation: f64,
    pub slit_width: f64,
    pub slit_length: f64,
    pub window_t: f64,
    pub xi: f64,
    /// Filter bandwidth (wavelength) for single-bandwidth commands.
    pub bandwidth: f64,
    /// Filter bandwidths compared by `visibility`.
    pub bandwidths: Vec<f64>,
    /// Full acceptance angles of the D1 and D2 filters.
    pub accept_angle_a: f64,
    pub accept_angle_b: f64,
    pub rho2_y: f64,
    /// Angular resolution of a scanning D1 for the single-count verdict.
    pub detection_angle: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_points: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_points: usize,
    pub angle_min: f64,
    pub angle_max: f64,
    pub singles_points: usize,
    pub mc_points: usize,
    pub mc_singles_rate: f64,
    pub mc_duration: f64,
    pub mc_bootstrap: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda_p: presets::LAMBDA_P,
            d1: presets::D1,
            d1p: presets::D1P,
            d2: presets::D2,
            slit_separation: presets::SLIT_SEPARATION,
            slit_width: presets::SLIT_WIDTH,
            slit_length: presets::SLIT_LENGTH,
            window_t: presets::WINDOW_T,
            xi: 1.0,
            bandwidth: 1e-9,
            bandwidths: vec![1e-9, 10e-9],
            accept_angle_a: presets::ACCEPT_ANGLE,
            accept_angle_b: presets::ACCEPT_ANGLE,
            rho2_y: 0.0,
            detection_angle: presets::ACCEPT_ANGLE,
            rho_min: -5e-3,
            rho_max: 5e-3,
            rho_points: 201,
            xi_min: 0.0,
            xi_max: 10.0,
            xi_points: 101,
            angle_min: 1e-3,
            angle_max: 30e-3,
            singles_points: 30,
            mc_points: 21,
            mc_singles_rate: 1e6,
            mc_duration: 1.0,
            mc_bootstrap: 400,
            rel_tol: 1e-6,
            seed: 0,
        }
    }
}

enum Slot<'a> {
    Real(&'a mut f64),
    List(&'a mut Vec<f64>),
    Count(&'a mut usize),
    Seed(&'a mut u64),
}

/// Key names with their dimensions, in canonical order.
pub const KEYS: [(&str, Dim); 30] = [
    ("lambda_p", Dim::Length),
    ("d1", Dim::Length),
    ("d1p", Dim::Length),
    ("d2", Dim::Length),
    ("slit_separation", Dim::Length),
    ("slit_width", Dim::Length),
    ("slit_length", Dim::Length),
    ("T", Dim::Time),
    ("xi", Dim::Dimensionless),
    ("bandwidth", Dim::Length),
    ("bandwidths", Dim::Length),
    ("accept_angle_a", Dim::Angle),
    ("accept_angle_b", Dim::Angle),
    ("rho2_y", Dim::Length),
    ("detection_angle", Dim::Angle),
    ("rho_min", Dim::Length),
    ("rho_max", Dim::Length),
    ("rho_points", Dim::Count),
    ("xi_min", Dim::Dimensionless),
    ("xi_max", Dim::Dimensionless),
    ("xi_points", Dim::Count),
    ("angle_min", Dim::Angle),
    ("angle_max", Dim::Angle),
    ("singles_points", Dim::Count),
    ("mc_points", Dim::Count),
    ("mc_singles_rate", Dim::Frequency),
    ("mc_duration", Dim::Time),
    ("mc_bootstrap", Dim::Count),
    ("rel_tol", Dim::Dimensionless),
    ("seed", Dim::Count),
];

fn dim_of(key: &str) -> Option<Dim> {
    KEYS.iter().find(|(k, _)| *k == key).map(|&(_, d)| d)
}

fn parse_quantity(key: &str, dim: Dim, text: &str) -> Result<f64, CliError> {
    let text = text.trim();
    let split = text.find(char::is_whitespace).unwrap_or(text.len());
    let (number, unit) = (&text[..split], text[split..].trim());
    let bad_number = || CliError::Usage(format!("{key}: cannot parse '{number}' as a number"));
    let exp = dim.exponent(unit).ok_or_else(|| {
        let expected = match dim.si_unit() {
            "" => "no unit".to_string(),
            u => format!("a unit of {u}"),
        };
        CliError::Usage(format!(
            "{key}: unit '{unit}' not recognised, expected {expected}"
        ))
    })?;
    // shift the decimal exponent in text so "1.8 ns" gives exactly 1.8e-9
    let (mantissa, own_exp) = match number.find(['e', 'E']) {
        Some(i) => (
            &number[..i],
            number[i + 1..].parse::<i32>().map_err(|_| bad_number())?,
        ),
        None => (number, 0),
    };
    let value: f64 = format!("{mantissa}e{}", own_exp + exp)
        .parse()
        .map_err(|_| bad_number())?;
    if !value.is_finite() {
        return Err(CliError::Usage(format!("{key}: value must be finite")));
    }
    Ok(value)
}

fn parse_count(key: &str, text: &str) -> Result<u64, CliError> {
    text.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "{key}: expected a non-negative integer, got '{}'",
            text.trim()
        ))
    })
}

impl RunConfig {
    fn slot(&mut self, key: &str) -> Option<Slot<'_>> {
        Some(match key {
            "lambda_p" => Slot::Real(&mut self.lambda_p),
            "d1" => Slot::Real(&mut self.d1),
            "d1p" => Slot::Real(&mut self.d1p),
            "d2" => Slot::Real(&mut self.d2),
            "slit_separation" => Slot::Real(&mut self.slit_separation),
            "slit_width" => Slot::Real(&mut self.slit_width),
            "slit_length" => Slot::Real(&mut self.slit_length),
            "T" => Slot::Real(&mut self.window_t),
            "xi" => Slot::Real(&mut self.xi),
            "bandwidth" => Slot::Real(&mut self.bandwidth),
            "bandwidths" => Slot::List(&mut self.bandwidths),
            "accept_angle_a" => Slot::Real(&mut self.accept_angle_a),
            "accept_angle_b" => Slot::Real(&mut self.accept_angle_b),
            "rho2_y" => Slot::Real(&mut self.rho2_y),
            "detection_angle" => Slot::Real(&mut self.detection_angle),
            "rho_min" => Slot::Real(&mut self.rho_min),
            "rho_max" => Slot::Real(&mut self.rho_max),
            "rho_points" => Slot::Count(&mut self.rho_points),
            "xi_min" => Slot::Real(&mut self.xi_min),
            "xi_max" => Slot::Real(&mut self.xi_max),
            "xi_points" => Slot::Count(&mut self.xi_points),
            "angle_min" => Slot::Real(&mut self.angle_min),
            "angle_max" => Slot::Real(&mut self.angle_max),
            "singles_points" => Slot::Count(&mut self.singles_points),
            "mc_points" => Slot::Count(&mut self.mc_points),
            "mc_singles_rate" => Slot::Real(&mut self.mc_singles_rate),
            "mc_duration" => Slot::Real(&mut self.mc_duration),
            "mc_bootstrap" => Slot::Count(&mut self.mc_bootstrap),
            "rel_tol" => Slot::Real(&mut self.rel_tol),
            "seed" => Slot::Seed(&mut self.seed),
            _ => return None,
        })
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let dim = dim_of(key)
            .ok_or_else(|| CliError::Usage(format!("unknown configuration key '{key}'")))?;
        match self.slot(key).expect("every listed key has a slot") {
            Slot::Real(v) => *v = parse_quantity(key, dim, value)?,
            Slot::List(v) => {
                *v = value
                    .split(',')
                    .map(|item| parse_quantity(key, dim, item))
                    .collect::<Result<_, _>>()?
            }
            Slot::Count(v) => {
                *v = usize::try_from(parse_count(key, value)?)
                    .map_err(|_| CliError::Usage(format!("{key}: value too large")))?
            }
            Slot::Seed(v) => *v = parse_count(key, value)?,
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("line {}: expected 'key = value'", n + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::Usage(format!(
                    "line {}: '{key}' given twice",
                    n + 1
                )));
            }
            seen.push(key);
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--set expects key=value, got '{assignment}'"))
        })?;
        self.set(key.trim(), value)
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Canonical SI echo, one `key = value unit` line per key.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut copy = self.clone();
        for &(key, dim) in &KEYS {
            let unit = dim.si_unit();
            let fmt = |v: f64| {
                if unit.is_empty() {
                    format!("{v}")
                } else {
                    format!("{v} {unit}")
                }
            };
            let value = match copy.slot(key).expect("listed key") {
                Slot::Real(v) => fmt(*v),
                Slot::List(v) => v.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(", "),
                Slot::Count(v) => v.to_string(),
                Slot::Seed(v) => v.to_string(),
            };
            writeln!(out, "{key} = {value}").expect("writing to a String");
        }
        out
    }

    /// SHA-256 of the canonical echo, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }

    pub fn geometry(&self) -> Result<OpticalGeometry, CliError> {
        Ok(OpticalGeometry::new(
            self.d1,
            self.d1p,
            self.d2,
            self.lambda_p,
        )?)
    }

    pub fn aperture(&self) -> Result<DoubleSlitAperture, CliError> {
        Ok(DoubleSlitAperture::new(
            self.slit_separation,
            self.slit_width,
            self.slit_length,
        )?)
    }

    /// Bandwidth in rad/s of a filter `bandwidth` wide at the signal wavelength.
    pub fn delta_for(&self, bandwidth: f64) -> Result<f64, CliError> {
        let lambda_s = self.geometry()?.signal_wavelength();
        if !(bandwidth > 0.0) {
            return Err(CliError::Usage(format!(
                "bandwidth must be positive, got {bandwidth} m"
            )));
        }
        Ok(angular_bandwidth(bandwidth, lambda_s))
    }

    pub fn source(&self) -> Result<SourceSpec, CliError> {
        Ok(SourceSpec::new(self.xi, self.delta_for(self.bandwidth)?)?)
    }

    pub fn detection(&self) -> Result<DetectionSpec, CliError> {
        let geom = self.geometry()?;
        Ok(DetectionSpec::new(
            self.window_t,
            (0.0, self.rho2_y),
            presets::q_accept(&geom, self.accept_angle_a),
            presets::q_accept(&geom, self.accept_angle_b),
        )?)
    }

    pub fn quad(&self) -> Result<QuadOptions, CliError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::Usage(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(QuadOptions::with_rel_tol(self.rel_tol))
    }

    pub fn rho_grid(&self) -> Result<Vec<f64>, CliError> {
        linspace("rho", self.rho_min, self.rho_max, self.rho_points)
    }

    pub fn xi_grid(&self) -> Result<Vec<f64>, CliError> {
        linspace("xi", self.xi_min, self.xi_max, self.xi_points)
    }

    pub fn angle_grid(&self) -> Result<Vec<f64>, CliError> {
        linspace("angle", self.angle_min, self.angle_max, self.singles_points)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n == 0 {
        return Err(CliError::Usage(format!(
            "{name} grid needs at least one point"
        )));
    }
    if !(lo <= hi) {
        return Err(CliError::Usage(format!(
            "{name}_min must not exceed {name}_max"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}
