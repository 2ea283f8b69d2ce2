//! Reference double-slit ghost-interference setup.

use crate::error::Result;
use crate::optics::{DoubleSlitAperture, OpticalGeometry};
use crate::rates::{angular_bandwidth, DetectionSpec, SourceSpec};

pub const LAMBDA_P: f64 = 351e-9;
pub const D1: f64 = 0.3;
pub const D1P: f64 = 1.0;
pub const D2: f64 = 1.5;
pub const SLIT_SEPARATION: f64 = 0.4e-3;
pub const SLIT_WIDTH: f64 = 0.165e-3;
/// Not fixed by the experiment; long compared to the slit width.
pub const SLIT_LENGTH: f64 = 10e-3;
pub const WINDOW_T: f64 = 1.8e-9;
/// Full angular acceptance of the 1 nm filter.
pub const ACCEPT_ANGLE: f64 = 15e-3;
pub const BANDWIDTHS_NM: [f64; 2] = [1.0, 10.0];

pub fn geometry() -> OpticalGeometry {
    OpticalGeometry::new(D1, D1P, D2, LAMBDA_P).expect("valid preset")
}

pub fn aperture() -> DoubleSlitAperture {
    DoubleSlitAperture::new(SLIT_SEPARATION, SLIT_WIDTH, SLIT_LENGTH).expect("valid preset")
}

/// Filter radius in q for a full acceptance angle: `k_s·θ/2`.
pub fn q_accept(geom: &OpticalGeometry, full_angle: f64) -> f64 {
    0.5 * geom.signal_wavenumber() * full_angle
}

pub fn detection() -> DetectionSpec {
    let q = q_accept(&geometry(), ACCEPT_ANGLE);
    DetectionSpec::new(WINDOW_T, (0.0, 0.0), q, q).expect("valid preset")
}

/// Bandwidth in rad/s for a filter of `nm` nanometres at the signal wavelength.
pub fn delta_for_nm(nm: f64) -> f64 {
    angular_bandwidth(nm * 1e-9, geometry().signal_wavelength())
}

pub fn source(xi: f64, bandwidth_nm: f64) -> Result<SourceSpec> {
    SourceSpec::new(xi, delta_for_nm(bandwidth_nm))
}
