//! Ghost interference with a multimode optical parametric amplifier.
//!
//! * [`optics`]: double-slit aperture, Fresnel kernel and the Green's
//!   functions of both arms, closed-form far field or by quadrature.
//! * [`rates`]: entangled, accidental and singles rates and the visibility law.
//! * [`photon_stats`]: truncated multimode OPA state and good/bad count
//!   classification.
//! * [`coincidence`]: seeded timestamp-stream Monte Carlo and a coincidence
//!   circuit.
//! * [`quadrature`]: adaptive oscillation-aware Gauss-Kronrod rules.
//! * [`presets`]: the reference experiment.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coincidence;
pub mod error;
pub mod optics;
pub mod photon_stats;
pub mod presets;
pub mod quadrature;
pub mod rates;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub use coincidence::{
    count_coincidences, mc_visibility, simulate_streams, CoincidenceTally, McSettings,
    McVisibility, StreamSpec, Streams,
};
pub use error::{Error, Result};
pub use optics::{
    combined_propagator, fresnel_kernel, green_a, green_b, ComplexAmplitude, DoubleSlitAperture,
    OpticalGeometry, Regime, TransverseWavevector,
};
pub use photon_stats::{
    build_truncated_state, classify_counts, p_good_closed, p_good_oracle, CountClassification,
    TruncatedOpaState,
};
pub use quadrature::QuadOptions;
pub use rates::{
    accidental_rate, derive_visibility_constants, entangled_rate, singles_fringe_visible,
    singles_rate_a, singles_rate_b, total_rate, visibility, visibility_curve, DetectionSpec,
    RateModel, ScanResult, SourceSpec, VisibilityConstants,
};
