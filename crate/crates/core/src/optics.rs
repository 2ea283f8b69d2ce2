//! Double-slit aperture, Fresnel kernels and the Green's functions of the two
//! arms, in the closed-form far-field regime and by direct quadrature.
//!
//! Conventions used throughout:
//!
//! * `t̃(q) = ∫ d²ρ t(ρ) e^{−i q·ρ}` (no unitary prefactor).
//! * Closed forms for the propagators carry one extra factor of
//!   [`FOURIER_NORM`] relative to that transform. The quadrature regime is
//!   multiplied by the same constant, so both regimes report on one scale and
//!   any ratio (visibility, normalized pattern) is independent of the choice.
//! * Dimensional field prefactors (`ħω/2ε₀V` and friends) are not carried.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{positive, Error, Result};
use crate::quadrature::{integrate_2d, integrate_real, QuadOptions};
use crate::SPEED_OF_LIGHT;

/// Scale constant attached to every propagator value (both regimes).
pub const FOURIER_NORM: f64 = 2.0 * PI;

/// Largest admissible `|q|` as a fraction of the wavenumber `ω/c`.
pub const PARAXIAL_FRACTION: f64 = 0.1;

/// `sin(u)/u` with `sinc(0) = 1`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Paraxial wavevector bound `0.1·ω/c` at angular frequency `omega`.
pub fn paraxial_limit(omega: f64) -> f64 {
    PARAXIAL_FRACTION * omega / SPEED_OF_LIGHT
}

/// Distances of the two arms and the pump wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalGeometry {
    /// Crystal to double slit.
    pub d1: f64,
    /// Double slit to detector D1.
    pub d1p: f64,
    /// Crystal to the detector D2 plane.
    pub d2: f64,
    pub lambda_p: f64,
    pub omega_p: f64,
}

impl OpticalGeometry {
    pub fn new(d1: f64, d1p: f64, d2: f64, lambda_p: f64) -> Result<Self> {
        let lambda_p = positive("lambda_p", lambda_p)?;
        Ok(Self {
            d1: positive("d1", d1)?,
            d1p: positive("d1p", d1p)?,
            d2: positive("d2", d2)?,
            lambda_p,
            omega_p: 2.0 * PI * SPEED_OF_LIGHT / lambda_p,
        })
    }

    /// Constructs from both the wavelength and the angular frequency, which
    /// must agree to 1e-12 relative.
    pub fn with_omega(d1: f64, d1p: f64, d2: f64, lambda_p: f64, omega_p: f64) -> Result<Self> {
        let geom = Self::new(d1, d1p, d2, lambda_p)?;
        let omega_p = positive("omega_p", omega_p)?;
        if ((omega_p - geom.omega_p) / geom.omega_p).abs() > 1e-12 {
            return Err(Error::Domain {
                field: "omega_p",
                value: omega_p,
                reason: "inconsistent with 2πc/lambda_p",
            });
        }
        Ok(Self { omega_p, ..geom })
    }

    /// Degenerate signal/idler angular frequency `ω_p/2`.
    pub fn signal_omega(&self) -> f64 {
        0.5 * self.omega_p
    }

    /// Signal wavenumber `ω_p/2c`.
    pub fn signal_wavenumber(&self) -> f64 {
        self.signal_omega() / SPEED_OF_LIGHT
    }

    /// Degenerate signal wavelength `2λ_p`.
    pub fn signal_wavelength(&self) -> f64 {
        2.0 * self.lambda_p
    }

    /// Unfolded crystal-to-D2 distance seen through the slit, `d1 + d2`.
    pub fn unfolded_distance(&self) -> f64 {
        self.d1 + self.d2
    }

    /// Same geometry with every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.d1 * factor,
            self.d1p * factor,
            self.d2 * factor,
            self.lambda_p,
        )
    }
}

/// Two identical slits of width `b` centred at `x = ±a/2`, length `slit_len`
/// along y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitAperture {
    pub a: f64,
    pub b: f64,
    pub slit_len: f64,
}

impl DoubleSlitAperture {
    pub fn new(a: f64, b: f64, slit_len: f64) -> Result<Self> {
        let b = positive("b", b)?;
        let a = positive("a", a)?;
        if a <= b {
            return Err(Error::Domain {
                field: "a",
                value: a,
                reason: "slit separation must exceed slit width",
            });
        }
        Ok(Self {
            a,
            b,
            slit_len: positive("slit_len", slit_len)?,
        })
    }

    /// Open x-intervals of the two slits, left to right.
    pub fn slit_intervals(&self) -> [(f64, f64); 2] {
        let (h, w) = (0.5 * self.a, 0.5 * self.b);
        [(-h - w, -h + w), (h - w, h + w)]
    }

    /// Open area of both slits.
    pub fn open_area(&self) -> f64 {
        2.0 * self.b * self.slit_len
    }

    /// Transmission `t(x, y)`; edges count as opaque.
    pub fn transmission(&self, x: f64, y: f64) -> f64 {
        let half_b = 0.5 * self.b;
        let in_x = (x - 0.5 * self.a).abs() < half_b || (x + 0.5 * self.a).abs() < half_b;
        let in_y = y.abs() < 0.5 * self.slit_len;
        if in_x && in_y {
            1.0
        } else {
            0.0
        }
    }

    /// x factor of the transform, `2b·sinc(qx b/2)·cos(qx a/2)`.
    pub fn ft_x(&self, qx: f64) -> f64 {
        2.0 * self.b * sinc(0.5 * qx * self.b) * (0.5 * qx * self.a).cos()
    }

    /// y factor of the transform, `L·sinc(qy L/2)`.
    pub fn ft_y(&self, qy: f64) -> f64 {
        self.slit_len * sinc(0.5 * qy * self.slit_len)
    }

    /// `t̃(q)`; real and even because the aperture is symmetric.
    pub fn ft(&self, q: TransverseWavevector) -> f64 {
        self.ft_x(q.qx) * self.ft_y(q.qy)
    }

    /// Highest oscillation rate of `|t̃|²` along qx.
    fn power_rate_x(&self) -> f64 {
        self.a + self.b
    }

    /// `∫|t̃(q)|² d²q / (2π)²` over the box `|qx| ≤ qx_max`, `|qy| ≤ qy_max`.
    ///
    /// The transform factorizes, so this is a product of two 1D quadratures.
    /// Over the whole plane the value equals the open area.
    pub fn power_in_box(&self, qx_max: f64, qy_max: f64, opts: &QuadOptions) -> Result<f64> {
        let rate_x = self.power_rate_x();
        let (px, _) = integrate_real(
            |q| self.ft_x(q).powi(2),
            0.0,
            positive("qx_max", qx_max)?,
            |_| rate_x,
            opts,
        )?;
        let (py, _) = integrate_real(
            |q| self.ft_y(q).powi(2),
            0.0,
            positive("qy_max", qy_max)?,
            |_| self.slit_len,
            opts,
        )?;
        Ok(4.0 * px * py / (2.0 * PI).powi(2))
    }

    /// `∫_{|q| ≤ q_accept} |t̃(q)|² d²q`, the aperture power passed by a hard
    /// disc filter in transverse-wavevector space.
    pub fn power_in_disc(&self, q_accept: f64, opts: &QuadOptions) -> Result<f64> {
        let q_accept = positive("q_accept", q_accept)?;
        let rate_x = self.power_rate_x();
        let slit_len = self.slit_len;
        // one quadrant; the integrand is even in both components
        let est = integrate_2d(
            |qy, qx| Complex64::new(self.ft_x(qx).powi(2) * self.ft_y(qy).powi(2), 0.0),
            (0.0, q_accept),
            |qx| vec![(0.0, (q_accept * q_accept - qx * qx).max(0.0).sqrt())],
            |_| rate_x,
            |_, _| slit_len,
            opts,
        )?;
        Ok(4.0 * est.value.re)
    }
}

/// Transverse wavevector `q = (qx, qy)` in rad/m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransverseWavevector {
    pub qx: f64,
    pub qy: f64,
}

impl TransverseWavevector {
    pub fn new(qx: f64, qy: f64) -> Self {
        Self { qx, qy }
    }

    pub fn norm(&self) -> f64 {
        self.qx.hypot(self.qy)
    }

    /// Rejects `|q| > 0.1·ω/c`.
    pub fn check_paraxial(&self, omega: f64) -> Result<()> {
        let limit = paraxial_limit(omega);
        let norm = self.norm();
        if norm.is_finite() && norm <= limit {
            Ok(())
        } else {
            Err(Error::Domain {
                field: "q",
                value: norm,
                reason: "outside the paraxial guard |q| <= 0.1 omega/c",
            })
        }
    }
}

/// A propagator value. Always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAmplitude(Complex64);

impl ComplexAmplitude {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::Contract(format!("non-finite amplitude {z}")))
        }
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn arg(&self) -> f64 {
        self.0.arg()
    }
}

/// Propagation regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Every quadratic phase kept; aperture integrals by quadrature.
    Fresnel,
    /// Quadratic phases set to one; closed forms.
    Fraunhofer,
}

/// Quadratic phase `ψ(r, κ) = e^{iκr²/2}`.
fn psi(r2: f64, kappa: f64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * kappa * r2)
}

/// Fresnel kernel `h_ω(ρ, d) = (−iω/2πc)·(e^{iωd/c}/d)·e^{i(ω/2cd)ρ²}`, in 1/m².
pub fn fresnel_kernel(omega: f64, rho: (f64, f64), d: f64) -> Result<ComplexAmplitude> {
    let d = positive("d", d)?;
    let omega = positive("omega", omega)?;
    let k = omega / SPEED_OF_LIGHT;
    let r2 = rho.0 * rho.0 + rho.1 * rho.1;
    let z = Complex64::new(0.0, -k / (2.0 * PI))
        * Complex64::from_polar(1.0 / d, k * d)
        * psi(r2, k / d);
    ComplexAmplitude::new(z)
}

/// Green's function of the slit arm, detector D1 on axis:
/// `g_A(q, ω) = (−iω/2πc)·e^{iω(d1+d1′)/c}/d1′ · ∫d²ρ_a ψ(ρ_a, k/d1′) t(ρ_a) e^{iq·ρ_a} · ψ(q, −d1/k)`,
/// times [`FOURIER_NORM`].
pub fn green_a(
    omega: f64,
    q: TransverseWavevector,
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    regime: Regime,
    opts: &QuadOptions,
) -> Result<ComplexAmplitude> {
    let omega = positive("omega", omega)?;
    q.check_paraxial(omega)?;
    let k = omega / SPEED_OF_LIGHT;
    let prefactor = Complex64::new(0.0, -k / (2.0 * PI))
        * Complex64::from_polar(FOURIER_NORM / geom.d1p, k * (geom.d1 + geom.d1p));

    let aperture_integral = match regime {
        // t̃(−q) = t̃(q) for the symmetric double slit
        Regime::Fraunhofer => Complex64::new(ap.ft(q), 0.0),
        Regime::Fresnel => {
            let gamma = 0.5 * k / geom.d1p;
            let est = integrate_2d(
                |x, y| Complex64::from_polar(1.0, gamma * (x * x + y * y) + q.qx * x + q.qy * y),
                (-0.5 * ap.slit_len, 0.5 * ap.slit_len),
                |_| ap.slit_intervals().to_vec(),
                |y| (2.0 * gamma * y + q.qy).abs(),
                |x, _| (2.0 * gamma * x + q.qx).abs(),
                opts,
            )?;
            est.value * psi(q.norm().powi(2), -geom.d1 / k)
        }
    };
    ComplexAmplitude::new(prefactor * aperture_integral)
}

/// Green's function of the free arm for one plane-wave mode:
/// `g_B = e^{iωd2/c}·e^{iq·ρ}·ψ(|q|, −(c/ω)d2)`. Unit modulus.
pub fn green_b(
    omega: f64,
    q: TransverseWavevector,
    rho2: (f64, f64),
    d2: f64,
) -> Result<ComplexAmplitude> {
    let d2 = positive("d2", d2)?;
    let omega = positive("omega", omega)?;
    let k = omega / SPEED_OF_LIGHT;
    // the carrier phase is kept apart so the small transverse phase keeps its precision
    let transverse = q.qx * rho2.0 + q.qy * rho2.1 - 0.5 * d2 / k * q.norm().powi(2);
    ComplexAmplitude::new(
        Complex64::from_polar(1.0, k * d2) * Complex64::from_polar(1.0, transverse),
    )
}

/// Two-arm propagator `∫d²q g_A(−q) g_B(q)` with D2 at transverse position
/// `rho2`, in closed far-field form or with every quadratic phase kept.
///
/// The q integral is Gaussian and is done analytically; the Fresnel regime
/// then integrates
/// `−k²·e^{ik(d1+d1′+d2)}/(d1′D)·ψ(ρ, k/D)·∫d²ρ_a ψ(ρ_a, k(1/d1′ + 1/D)) e^{−ikρ·ρ_a/D} t(ρ_a)`
/// over the aperture, with `D = d1 + d2`.
pub fn combined_propagator(
    omega: f64,
    rho2: (f64, f64),
    geom: &OpticalGeometry,
    ap: &DoubleSlitAperture,
    regime: Regime,
    opts: &QuadOptions,
) -> Result<ComplexAmplitude> {
    let omega = positive("omega", omega)?;
    let k = omega / SPEED_OF_LIGHT;
    let dist = geom.unfolded_distance();
    let beta = k / dist;
    let q_eff = TransverseWavevector::new(beta * rho2.0, beta * rho2.1);
    q_eff.check_paraxial(omega)?;

    let total_path = geom.d1 + geom.d1p + geom.d2;
    let prefactor =
        Complex64::from_polar(-FOURIER_NORM * k * k / (geom.d1p * dist), k * total_path);

    let z = match regime {
        Regime::Fraunhofer => prefactor * ap.ft(q_eff),
        Regime::Fresnel => {
            let gamma = 0.5 * k * (1.0 / geom.d1p + 1.0 / dist);
            let (bx, by) = (q_eff.qx, q_eff.qy);
            let est = integrate_2d(
                |x, y| Complex64::from_polar(1.0, gamma * (x * x + y * y) - bx * x - by * y),
                (-0.5 * ap.slit_len, 0.5 * ap.slit_len),
                |_| ap.slit_intervals().to_vec(),
                |y| (2.0 * gamma * y - by).abs(),
                |x, _| (2.0 * gamma * x - bx).abs(),
                opts,
            )?;
            let r2 = rho2.0 * rho2.0 + rho2.1 * rho2.1;
            prefactor * psi(r2, beta) * est.value
        }
    };
    ComplexAmplitude::new(z)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_aperture() -> DoubleSlitAperture {
        DoubleSlitAperture::new(0.4e-3, 0.165e-3, 10e-3).unwrap()
    }

    fn reference_geometry() -> OpticalGeometry {
        OpticalGeometry::new(0.3, 1.0, 1.5, 351e-9).unwrap()
    }

    #[test]
    fn transmission_examples() {
        let ap = reference_aperture();
        assert_eq!(ap.transmission(0.0, 0.0), 0.0);
        assert_eq!(ap.transmission(0.2e-3, 0.0), 1.0);
        assert_eq!(ap.transmission(5e-3, 0.0), 0.0);
        assert_eq!(ap.transmission(-0.2e-3, 4.9e-3), 1.0);
    }

    #[test]
    fn transmission_edges_are_opaque() {
        let ap = DoubleSlitAperture::new(4.0, 2.0, 8.0).unwrap();
        assert_eq!(ap.transmission(3.0, 0.0), 0.0);
        assert_eq!(ap.transmission(1.0, 0.0), 0.0);
        assert_eq!(ap.transmission(2.0, 4.0), 0.0);
        assert_eq!(ap.transmission(2.0, 3.999), 1.0);
    }

    #[test]
    fn overlapping_slits_are_rejected() {
        assert!(DoubleSlitAperture::new(0.1e-3, 0.165e-3, 10e-3).is_err());
        assert!(DoubleSlitAperture::new(0.4e-3, 0.165e-3, 0.0).is_err());
    }

    #[test]
    fn transform_examples() {
        let ap = reference_aperture();
        assert_eq!(
            ap.ft(TransverseWavevector::default()),
            2.0 * ap.b * ap.slit_len
        );
        let cos_zero = ap.ft(TransverseWavevector::new(PI / ap.a, 0.0));
        assert!(cos_zero.abs() < 1e-15 * ap.open_area());
        let sinc_zero = ap.ft(TransverseWavevector::new(2.0 * PI / ap.b, 0.0));
        assert!(sinc_zero.abs() < 1e-15 * ap.open_area());
    }

    #[test]
    fn geometry_omega_consistency() {
        let g = reference_geometry();
        assert!(
            OpticalGeometry::with_omega(0.3, 1.0, 1.5, 351e-9, g.omega_p * (1.0 + 1e-13)).is_ok()
        );
        assert!(
            OpticalGeometry::with_omega(0.3, 1.0, 1.5, 351e-9, g.omega_p * (1.0 + 1e-9)).is_err()
        );
        assert!(OpticalGeometry::new(0.3, 0.0, 1.5, 351e-9).is_err());
        assert!(OpticalGeometry::new(-0.3, 1.0, 1.5, 351e-9).is_err());
    }

    #[test]
    fn fresnel_kernel_modulus_and_phase() {
        let omega = reference_geometry().signal_omega();
        let d = 1.3;
        let h0 = fresnel_kernel(omega, (0.0, 0.0), d).unwrap();
        assert_relative_eq!(
            h0.norm(),
            omega / (2.0 * PI * SPEED_OF_LIGHT * d),
            max_relative = 1e-14
        );

        let x = 2e-5;
        let hx = fresnel_kernel(omega, (x, 0.0), d).unwrap();
        let dphi = (hx.value() / h0.value()).arg();
        let expected = omega / (2.0 * SPEED_OF_LIGHT * d) * x * x;
        assert!(expected < PI);
        assert_relative_eq!(dphi, expected, max_relative = 1e-9);

        assert!(fresnel_kernel(omega, (0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn fresnel_kernel_curvature_scaling() {
        // doubling ω and d together keeps the quadratic curvature ω/2cd
        let omega = 1e15;
        let (d, x) = (0.7, 1e-5);
        let curvature = |w: f64, dd: f64| {
            let a = fresnel_kernel(w, (x, 0.0), dd).unwrap().value();
            let b = fresnel_kernel(w, (0.0, 0.0), dd).unwrap().value();
            (a / b).arg() / (x * x)
        };
        assert_relative_eq!(
            curvature(omega, d),
            curvature(2.0 * omega, 2.0 * d),
            max_relative = 1e-9
        );
    }

    #[test]
    fn green_b_is_a_pure_phase() {
        let omega = reference_geometry().signal_omega();
        let q = TransverseWavevector::new(3.0e4, -1.2e4);
        let g = green_b(omega, q, (1.1e-3, -0.4e-3), 1.5).unwrap();
        assert_relative_eq!(g.norm(), 1.0, max_relative = 1e-15);

        let k = omega / SPEED_OF_LIGHT;
        let g0 = green_b(omega, TransverseWavevector::default(), (0.0, 0.0), 1.5).unwrap();
        let expected = Complex64::from_polar(1.0, k * 1.5);
        assert!((g0.value() - expected).norm() < 1e-12);

        let rho = (2e-4, 1e-4);
        let q = TransverseWavevector::new(1.0e3, 2.0e3);
        let at_rho = green_b(omega, q, rho, 1.5).unwrap().value();
        let at_origin = green_b(omega, q, (0.0, 0.0), 1.5).unwrap().value();
        assert_relative_eq!(
            (at_rho / at_origin).arg(),
            q.qx * rho.0 + q.qy * rho.1,
            max_relative = 1e-9
        );
    }

    #[test]
    fn green_a_far_field_zero_and_modulus() {
        let (g, ap) = (reference_geometry(), reference_aperture());
        let omega = g.signal_omega();
        let opts = QuadOptions::default();
        let zero = green_a(
            omega,
            TransverseWavevector::new(PI / ap.a, 0.0),
            &g,
            &ap,
            Regime::Fraunhofer,
            &opts,
        )
        .unwrap();
        assert!(zero.norm() < 1e-12);

        let q = TransverseWavevector::new(2.1e3, 150.0);
        let ga = green_a(omega, q, &g, &ap, Regime::Fraunhofer, &opts).unwrap();
        let k = omega / SPEED_OF_LIGHT;
        let expected = (k / (2.0 * PI * g.d1p)).powi(2) * (2.0 * PI).powi(2) * ap.ft(q).powi(2);
        assert_relative_eq!(ga.norm_sqr(), expected, max_relative = 1e-12);
    }

    #[test]
    fn green_a_rejects_non_paraxial_q() {
        let (g, ap) = (reference_geometry(), reference_aperture());
        let omega = g.signal_omega();
        let q = TransverseWavevector::new(1.01 * paraxial_limit(omega), 0.0);
        let err = green_a(
            omega,
            q,
            &g,
            &ap,
            Regime::Fraunhofer,
            &QuadOptions::default(),
        );
        assert!(matches!(err, Err(Error::Domain { field: "q", .. })));
    }

    #[test]
    fn green_a_fresnel_matches_far_field_at_far_field_parameters() {
        // distances ×10⁴: aperture Fresnel numbers ≪ 1
        let g = reference_geometry().scaled(1e4).unwrap();
        let ap = reference_aperture();
        let omega = g.signal_omega();
        let opts = QuadOptions::default();
        let q = TransverseWavevector::default();
        let fresnel = green_a(omega, q, &g, &ap, Regime::Fresnel, &opts).unwrap();
        let far = green_a(omega, q, &g, &ap, Regime::Fraunhofer, &opts).unwrap();
        assert!((fresnel.norm() / far.norm() - 1.0).abs() < 0.05);
    }

    #[test]
    fn green_a_fresnel_at_reference_geometry_matches_fresnel_integral_oracle() {
        // |∫ψ t| / open area at q = 0 from closed-form Fresnel integrals
        // (mpmath, 40 digits): 0.079464766744506203
        let (g, ap) = (reference_geometry(), reference_aperture());
        let omega = g.signal_omega();
        let opts = QuadOptions::with_rel_tol(1e-9);
        let q = TransverseWavevector::default();
        let fresnel = green_a(omega, q, &g, &ap, Regime::Fresnel, &opts).unwrap();
        let far = green_a(omega, q, &g, &ap, Regime::Fraunhofer, &opts).unwrap();
        assert_relative_eq!(
            fresnel.norm() / far.norm(),
            0.079_464_766_744_506_203,
            max_relative = 1e-7
        );
    }

    #[test]
    fn combined_far_field_peak_and_first_zero() {
        let (g, ap) = (reference_geometry(), reference_aperture());
        let omega = g.signal_omega();
        let opts = QuadOptions::default();
        let peak =
            combined_propagator(omega, (0.0, 0.0), &g, &ap, Regime::Fraunhofer, &opts).unwrap();
        let k = omega / SPEED_OF_LIGHT;
        let expected = FOURIER_NORM * k * k / (g.d1p * g.unfolded_distance()) * ap.open_area();
        assert_relative_eq!(peak.norm(), expected, max_relative = 1e-12);

        // first cos zero at λ_s(d1+d2)/(2a) = 1.5795 mm
        let x0 = g.signal_wavelength() * g.unfolded_distance() / (2.0 * ap.a);
        assert_relative_eq!(x0, 1.58e-3, max_relative = 1e-2);
        let zero =
            combined_propagator(omega, (x0, 0.0), &g, &ap, Regime::Fraunhofer, &opts).unwrap();
        assert!(zero.norm() < 1e-12 * peak.norm());
    }

    // Fresnel/Fraunhofer modulus ratios |F(ρ)|/|G(0)| from closed-form Fresnel
    // integrals (mpmath, 40 digits).
    const REFERENCE_FRESNEL_RATIOS: [(f64, f64); 4] = [
        (0.0, 0.065_368_057_207_146_148),
        (0.79e-3, 0.045_440_731_491_757_722),
        (1.5795e-3, 0.003_120_449_973_457_802_7),
        (3e-3, 0.049_546_512_202_170_615),
    ];
    const FAR_FIELD_FRESNEL_RATIOS: [(f64, f64); 4] = [
        (0.0, 0.999_986_538_456_630_46),
        (0.79e-3, 0.694_611_907_855_841_41),
        (3e-3, 0.756_445_264_984_993_84),
        (4.74e-3, 0.000_714_283_287_730_690_13),
    ];

    fn check_ratios(scale: f64, table: &[(f64, f64)]) {
        let g = reference_geometry().scaled(scale).unwrap();
        let ap = reference_aperture();
        let omega = g.signal_omega();
        let opts = QuadOptions::with_rel_tol(1e-9);
        let peak = combined_propagator(omega, (0.0, 0.0), &g, &ap, Regime::Fraunhofer, &opts)
            .unwrap()
            .norm();
        for &(rho, ratio) in table {
            let f = combined_propagator(omega, (rho * scale, 0.0), &g, &ap, Regime::Fresnel, &opts)
                .unwrap();
            assert_relative_eq!(f.norm() / peak, ratio, max_relative = 1e-6);
        }
    }

    #[test]
    fn combined_fresnel_matches_oracle_at_reference_geometry() {
        check_ratios(1.0, &REFERENCE_FRESNEL_RATIOS);
    }

    #[test]
    fn combined_fresnel_matches_oracle_in_far_field() {
        check_ratios(1e4, &FAR_FIELD_FRESNEL_RATIOS);
    }

    #[test]
    fn parseval_in_wide_box() {
        let ap = reference_aperture();
        let p = ap
            .power_in_box(
                2000.0 * PI / ap.b,
                2000.0 * PI / ap.slit_len,
                &QuadOptions::with_rel_tol(1e-9),
            )
            .unwrap();
        assert!((p / ap.open_area() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn parseval_box_truncation_matches_oracle() {
        // mpmath: the ±40π/b × ±40π/L box holds 1 − 0.0101056 of the power
        let ap = reference_aperture();
        let p = ap
            .power_in_box(
                40.0 * PI / ap.b,
                40.0 * PI / ap.slit_len,
                &QuadOptions::with_rel_tol(1e-10),
            )
            .unwrap();
        assert_relative_eq!(p / ap.open_area() - 1.0, -0.010_105_6, max_relative = 1e-4);
    }

    #[test]
    fn disc_power_grows_with_radius_and_tends_to_total() {
        let ap = reference_aperture();
        let opts = QuadOptions::default();
        let small = ap.power_in_disc(2.0e3, &opts).unwrap();
        let large = ap.power_in_disc(2.0e4, &opts).unwrap();
        assert!(large > small && small > 0.0);
        // tiny disc: |t̃(0)|²·π q²
        let q = 10.0;
        let tiny = ap.power_in_disc(q, &opts).unwrap();
        assert_relative_eq!(
            tiny,
            ap.open_area().powi(2) * PI * q * q,
            max_relative = 1e-3
        );
        // total power (2π)²·open area bounds every disc
        assert!(large < (2.0 * PI).powi(2) * ap.open_area());
    }
}
