//! Coincidence and singles rates, the visibility law and its constants.
//!
//! Rates are normalized: field prefactors are dropped and only the factors
//! that depend on gain, bandwidth, window, geometry and filters are kept, so
//! every ratio built from them is meaningful while absolute values are not.

use std::f64::consts::PI;

use crate::error::{non_negative, positive, Error, Result};
use crate::optics::{paraxial_limit, sinc, DoubleSlitAperture, OpticalGeometry};
use crate::quadrature::QuadOptions;
use crate::SPEED_OF_LIGHT;

/// Smallest `Δ·T` for which the time/frequency integrals are replaced by `2πΔT`.
pub const MIN_DELTA_T: f64 = 10.0;

/// Converts a wavelength bandwidth into an angular-frequency bandwidth at the
/// centre wavelength `lambda`: `Δ = 2πc·Δλ/λ²`.
pub fn angular_bandwidth(delta_lambda: f64, lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * delta_lambda / (lambda * lambda)
}

/// Gain and bandwidth of the light reaching the detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    /// Squeeze parameter `|ξ|`, the same for every mode.
    pub xi: f64,
    /// Bandwidth in rad/s.
    pub delta: f64,
}

impl SourceSpec {
    pub fn new(xi: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            xi: non_negative("xi", xi)?,
            delta: positive("delta", delta)?,
        })
    }

    pub fn cosh2(&self) -> f64 {
        self.xi.cosh().powi(2)
    }

    pub fn sinh2(&self) -> f64 {
        self.xi.sinh().powi(2)
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::new(xi, self.delta)
    }
}

/// Coincidence window, D2 position and the filter acceptances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionSpec {
    /// Coincidence window `T` in seconds.
    pub window_t: f64,
    /// Transverse position of D2 in metres.
    pub rho2: (f64, f64),
    /// Radius of the transverse-wavevector disc passed by filter f1, rad/m.
    pub q_accept_a: f64,
    /// Same for filter f2.
    pub q_accept_b: f64,
}

impl DetectionSpec {
    pub fn new(window_t: f64, rho2: (f64, f64), q_accept_a: f64, q_accept_b: f64) -> Result<Self> {
        if !(rho2.0.is_finite() && rho2.1.is_finite()) {
            return Err(Error::Domain {
                field: "rho2",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        Ok(Self {
            window_t: positive("T", window_t)?,
            rho2,
            q_accept_a: positive("qA_accept", q_accept_a)?,
            q_accept_b: positive("qB_accept", q_accept_b)?,
        })
    }

    pub fn at(&self, rho2: (f64, f64)) -> Self {
        Self { rho2, ..*self }
    }

    /// Both acceptances must lie inside the paraxial guard at `omega`.
    pub fn check_paraxial(&self, omega: f64) -> Result<()> {
        let limit = paraxial_limit(omega);
        for (field, q) in [
            ("qA_accept", self.q_accept_a),
            ("qB_accept", self.q_accept_b),
        ] {
            if q > limit {
                return Err(Error::Domain {
                    field,
                    value: q,
                    reason: "outside the paraxial guard 0.1 omega/c",
                });
            }
        }
        Ok(())
    }
}

fn check_delta_t(delta: f64, window_t: f64) -> Result<f64> {
    let product = delta * window_t;
    if product >= MIN_DELTA_T {
        Ok(product)
    } else {
        Err(Error::Contract(format!(
            "bandwidth-window product ΔT = {product:e} is below {MIN_DELTA_T}; the 2πΔT \
             approximation of the time and frequency integrals does not apply"
        )))
    }
}

/// The visibility law's experimental constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityConstants {
    pub a: f64,
    pub b: f64,
}

impl VisibilityConstants {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            a: positive("A", a)?,
            b: positive("B", b)?,
        })
    }

    /// Large-gain limit `A/(A + 2BΔT)`.
    pub fn plateau(&self, delta_t: f64) -> f64 {
        self.a / (self.a + 2.0 * self.b * delta_t)
    }
}

/// Sinc²·Cos²·Sinc² fringe factor at D2 position `rho2`; equals 1 at the origin.
pub fn pattern_factor(rho2: (f64, f64), geom: &OpticalGeometry, ap: &DoubleSlitAperture) -> f64 {
    let scale = geom.signal_wavenumber() / (2.0 * geom.unfolded_distance());
    let ux = scale * rho2.0;
    let uy = scale * rho2.1;
    (sinc(ux * ap.b) * (ux * ap.a).cos() * sinc(uy * ap.slit_len)).powi(2)
}

/// Fringe period `λ_s(d1+d2)/a` along x.
pub fn fringe_period(geom: &OpticalGeometry, ap: &DoubleSlitAperture) -> f64 {
    geom.signal_wavelength() * geom.unfolded_distance() / ap.a
}

/// Position of the `k`-th zero of the cosine factor, `(2k+1)·λ_s(d1+d2)/(2a)`.
pub fn fringe_zero(k: i64, geom: &OpticalGeometry, ap: &DoubleSlitAperture) -> f64 {
    (2 * k + 1) as f64 * 0.5 * fringe_period(geom, ap)
}

/// Geometric part of the entangled prefactor: `(ω_p/2c)⁴·(L·b/(d1′(d1+d2)))²`.
fn entangled_geometry(geom: &OpticalGeometry, ap: &DoubleSlitAperture) -> f64 {
    let k = geom.signal_wavenumber();
    k.powi(4) * (ap.slit_len * ap.b / (geom.d1p * geom.unfolded_distance())).powi(2)
}

/// `(ω_p/(2πc·d1′))²`, the far-field weight of arm A.
fn arm_a_weight(geom: &OpticalGeometry) -> f64 {
    (geom.omega_p / (2.0 * PI * SPEED_OF_LIGHT * geom.d1p)).powi(2)
}

/// Area of the accepted q-disc of filter f2, `π·qB²` (`|g_B| = 1`).
fn arm_b_area(det: &DetectionSpec) -> f64 {
    PI * det.q_accept_b * det.q_accept_b
}

/// True coincidences from mutually entangled photons at D2 position `rho2`.
pub fn entangled_rate(
    rho2: (f64, f64),
    src: &SourceSpec,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
) -> f64 {
    2.0 * PI
        * src.delta
        * entangled_geometry(geom, ap)
        * src.cosh2()
        * src.sinh2()
        * pattern_factor(rho2, geom, ap)
}

/// Accidental coincidences between photons of different pairs. Independent of
/// the D2 position.
pub fn accidental_rate(
    src: &SourceSpec,
    det: &DetectionSpec,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    opts: &QuadOptions,
) -> Result<f64> {
    Ok(RateModel::new(*src, *det, *geom, *ap, opts)?.accidental())
}

/// `entangled_rate + accidental_rate`.
pub fn total_rate(
    rho2: (f64, f64),
    src: &SourceSpec,
    det: &DetectionSpec,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    opts: &QuadOptions,
) -> Result<f64> {
    Ok(RateModel::new(*src, *det, *geom, *ap, opts)?.total(rho2))
}

/// A fixed configuration with the filter integral evaluated once, for scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub src: SourceSpec,
    pub det: DetectionSpec,
    pub geom: OpticalGeometry,
    pub ap: DoubleSlitAperture,
    /// `∫_{|q| ≤ qA} |t̃(q)|² d²q`.
    pub aperture_power_a: f64,
    delta_t: f64,
}

impl RateModel {
    pub fn new(
        src: SourceSpec,
        det: DetectionSpec,
        geom: OpticalGeometry,
        ap: DoubleSlitAperture,
        opts: &QuadOptions,
    ) -> Result<Self> {
        let delta_t = check_delta_t(src.delta, det.window_t)?;
        det.check_paraxial(geom.signal_omega())?;
        let aperture_power_a = ap.power_in_disc(det.q_accept_a, opts)?;
        Ok(Self {
            src,
            det,
            geom,
            ap,
            aperture_power_a,
            delta_t,
        })
    }

    /// Same filters and geometry with another source; the filter integral is
    /// reused.
    pub fn with_source(&self, src: SourceSpec) -> Result<Self> {
        Ok(Self {
            src,
            delta_t: check_delta_t(src.delta, self.det.window_t)?,
            ..*self
        })
    }

    pub fn with_window(&self, window_t: f64) -> Result<Self> {
        let det = DetectionSpec {
            window_t: positive("T", window_t)?,
            ..self.det
        };
        Ok(Self {
            det,
            delta_t: check_delta_t(self.src.delta, window_t)?,
            ..*self
        })
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn entangled(&self, rho2: (f64, f64)) -> f64 {
        entangled_rate(rho2, &self.src, &self.geom, &self.ap)
    }

    pub fn accidental(&self) -> f64 {
        let src = &self.src;
        src.delta.powi(2)
            * self.det.window_t
            * src.sinh2().powi(2)
            * arm_a_weight(&self.geom)
            * self.aperture_power_a
            * arm_b_area(&self.det)
    }

    pub fn total(&self, rho2: (f64, f64)) -> f64 {
        self.entangled(rho2) + self.accidental()
    }

    pub fn constants(&self) -> Result<VisibilityConstants> {
        VisibilityConstants::new(
            2.0 * PI * entangled_geometry(&self.geom, &self.ap),
            arm_a_weight(&self.geom) * self.aperture_power_a * arm_b_area(&self.det),
        )
    }

    /// Total rate over `rho_x` at the configured `rho2.y`.
    pub fn pattern_scan(&self, rho_x: &[f64]) -> Result<ScanResult> {
        let y = self.det.rho2.1;
        let values = rho_x.iter().map(|&x| self.total((x, y))).collect();
        ScanResult::new(
            rho_x.to_vec(),
            values,
            vec![("quantity".into(), "total_rate".into())],
        )
    }

    pub fn singles_a(&self) -> f64 {
        self.src.sinh2() * self.src.delta * arm_a_weight(&self.geom) * self.aperture_power_a
    }

    pub fn singles_b(&self) -> f64 {
        singles_rate_b(self.det.rho2, &self.src, &self.det)
    }
}

/// Derives `A` and `B` from geometry, aperture and filters so that
/// `V(ξ) = A·cosh²ξ / (A·cosh²ξ + 2B·ΔT·sinh²ξ)` reproduces the fringe
/// contrast of [`total_rate`] exactly.
pub fn derive_visibility_constants(
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    det: &DetectionSpec,
    opts: &QuadOptions,
) -> Result<VisibilityConstants> {
    det.check_paraxial(geom.signal_omega())?;
    let power = ap.power_in_disc(det.q_accept_a, opts)?;
    VisibilityConstants::new(
        2.0 * PI * entangled_geometry(geom, ap),
        arm_a_weight(geom) * power * arm_b_area(det),
    )
}

/// Fringe visibility at gain `xi` and bandwidth-window product `delta_t`.
pub fn visibility(xi: f64, delta_t: f64, consts: &VisibilityConstants) -> Result<f64> {
    let xi = non_negative("xi", xi)?;
    if !(delta_t >= MIN_DELTA_T) {
        return Err(Error::Contract(format!(
            "ΔT = {delta_t:e} is below {MIN_DELTA_T}; the visibility law does not apply"
        )));
    }
    let c2 = xi.cosh().powi(2);
    let s2 = xi.sinh().powi(2);
    let num = consts.a * c2;
    Ok(num / (num + 2.0 * consts.b * delta_t * s2))
}

/// `(max − min)/(max + min)` of a sampled pattern. `None` for an all-zero or
/// empty scan.
pub fn scan_visibility(values: &[f64]) -> Option<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || !(max + min > 0.0) {
        None
    } else {
        Some((max - min) / (max + min))
    }
}

/// Visibility against gain, one scan per bandwidth in `deltas` (rad/s), all at
/// the window of `det`.
pub fn visibility_curve(
    xi_grid: &[f64],
    deltas: &[f64],
    det: &DetectionSpec,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    opts: &QuadOptions,
) -> Result<Vec<ScanResult>> {
    if xi_grid.is_empty() {
        return Err(Error::Contract("gain grid is empty".into()));
    }
    if xi_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Contract("gain grid must be sorted ascending".into()));
    }
    let consts = derive_visibility_constants(geom, ap, det, opts)?;
    deltas
        .iter()
        .map(|&delta| {
            let delta = positive("delta", delta)?;
            let dt = check_delta_t(delta, det.window_t)?;
            let values = xi_grid
                .iter()
                .map(|&xi| visibility(xi, dt, &consts))
                .collect::<Result<Vec<_>>>()?;
            ScanResult::visibility(
                xi_grid.to_vec(),
                values,
                vec![
                    ("delta_rad_per_s".into(), format!("{delta:e}")),
                    ("delta_t".into(), format!("{dt:e}")),
                    ("A".into(), format!("{:e}", consts.a)),
                    ("B".into(), format!("{:e}", consts.b)),
                ],
            )
        })
        .collect()
}

/// Singles at D1 (behind the slit, on axis) with filter acceptance `q_accept_a`.
pub fn singles_rate_a(
    q_accept_a: f64,
    src: &SourceSpec,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    opts: &QuadOptions,
) -> Result<f64> {
    let q = positive("qA_accept", q_accept_a)?;
    if q > paraxial_limit(geom.signal_omega()) {
        return Err(Error::Domain {
            field: "qA_accept",
            value: q,
            reason: "outside the paraxial guard 0.1 omega/c",
        });
    }
    let power = ap.power_in_disc(q, opts)?;
    Ok(src.sinh2() * src.delta * arm_a_weight(geom) * power)
}

/// Singles at D2. Flat: no dependence on `rho2`.
pub fn singles_rate_b(_rho2: (f64, f64), src: &SourceSpec, det: &DetectionSpec) -> f64 {
    src.sinh2() * src.delta * arm_b_area(det)
}

/// Angular threshold `2λ_p/a` below which a single-count pattern behind the
/// slit is resolvable.
pub fn fringe_threshold(lambda_p: f64, a: f64) -> f64 {
    2.0 * lambda_p / a
}

pub fn singles_fringe_visible(detection_angle: f64, lambda_p: f64, a: f64) -> bool {
    detection_angle < fringe_threshold(lambda_p, a)
}

/// A sampled curve with a free-form metadata echo.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: Vec<(String, String)>,
}

impl ScanResult {
    pub fn new(abscissa: Vec<f64>, values: Vec<f64>, meta: Vec<(String, String)>) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(Error::Contract(format!(
                "scan has {} abscissa values but {} values",
                abscissa.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("scan value {v} is not finite")));
        }
        Ok(Self {
            abscissa,
            values,
            meta,
        })
    }

    /// As [`ScanResult::new`], additionally requiring values in [0, 1].
    pub fn visibility(
        abscissa: Vec<f64>,
        values: Vec<f64>,
        meta: Vec<(String, String)>,
    ) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Contract(format!("visibility {v} outside [0, 1]")));
        }
        Self::new(abscissa, values, meta)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
