//! Adaptive Gauss-Kronrod quadrature for smooth oscillatory integrands.
//!
//! Every interval is first cut into panels no wider than a quarter period of
//! the fastest local phase (supplied by the caller as a rate bound in rad per
//! unit of the integration variable). Panels are then bisected globally, worst
//! error first, until the summed G7/K15 error estimate meets the requested
//! tolerance or the panel cap is hit.
//!
//! Two-dimensional integrals are iterated: the outer rule integrates a function
//! whose value at each node is itself an adaptive inner integral, and the inner
//! error estimates are folded into the outer panel error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], descending; the even-indexed entries (1, 3, 5)
/// and the centre are shared with the 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`] and [`integrate_2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the number of panels of a single 1D rule.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_panels: 1 << 22,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    /// Number of panels in the final partition (outer panels for 2D rules).
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the bisection order is
    // fully deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod_panel<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<(Complex64, f64)>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let (fc, ec) = f(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut inner_err = ec * WGK[7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, e1) = f(centre - dx)?;
        let (f2, e2) = f(centre + dx)?;
        let pair = f1 + f2;
        kronrod += pair * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        inner_err += (e1 + e2) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }

    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).norm() + inner_err * half.abs();
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value,
    })
}

/// Splits [a, b] so that no panel is wider than a quarter period of the local
/// phase. `rate` must be convex (for example `|affine|`), so its maximum over
/// a panel is attained at an endpoint.
fn oscillation_breaks<R>(a: f64, b: f64, rate: &R, max_panels: usize) -> Result<Vec<(f64, f64)>>
where
    R: Fn(f64) -> f64,
{
    let mut out = Vec::new();
    let mut x = a;
    while x < b {
        let r0 = rate(x).abs();
        let trial = if r0 > 0.0 { FRAC_PI_2 / r0 } else { b - x };
        let end = (x + trial).min(b);
        let r = r0.max(rate(end).abs());
        let width = if r > 0.0 { FRAC_PI_2 / r } else { b - x };
        let next = if x + width >= b { b } else { x + width };
        // guards against a width below the floating-point spacing of x
        if next <= x {
            return Err(Error::Numerical {
                estimate: f64::INFINITY,
                requested: 0.0,
                panels: out.len(),
            });
        }
        out.push((x, next));
        if out.len() > max_panels {
            return Err(Error::Numerical {
                estimate: f64::INFINITY,
                requested: 0.0,
                panels: out.len(),
            });
        }
        x = next;
    }
    Ok(out)
}

fn adaptive<F, R>(f: &F, a: f64, b: f64, rate: &R, opts: &QuadOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Result<(Complex64, f64)>,
    R: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Contract(format!(
            "quadrature interval [{a}, {b}] must be finite and ordered"
        )));
    }

    let mut heap = BinaryHeap::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut abs_value = 0.0;
    for (lo, hi) in oscillation_breaks(a, b, rate, opts.max_panels)? {
        let p = kronrod_panel(f, lo, hi)?;
        value += p.value;
        error += p.error;
        abs_value += p.abs_value;
        heap.push(p);
    }

    let target = |value: Complex64, abs_value: f64| {
        opts.abs_tol
            .max(opts.rel_tol * value.norm())
            .max(50.0 * f64::EPSILON * abs_value)
    };

    while error > target(value, abs_value) {
        if heap.len() >= opts.max_panels {
            return Err(Error::Numerical {
                estimate: error,
                requested: target(value, abs_value),
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect any further in floating point
            return Err(Error::Numerical {
                estimate: error,
                requested: target(value, abs_value),
                panels: heap.len() + 1,
            });
        }
        let left = kronrod_panel(f, worst.a, mid)?;
        let right = kronrod_panel(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in left-to-right order so the result does not depend on the
    // history of incremental updates.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        error,
        panels: panels.len(),
    })
}

/// Integrates a complex function over [a, b].
///
/// `rate(x)` bounds the local angular frequency of the integrand's phase; pass
/// `|_| 0.0` for non-oscillatory integrands.
pub fn integrate<F, R>(f: F, a: f64, b: f64, rate: R, opts: &QuadOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
    R: Fn(f64) -> f64,
{
    adaptive(&|x| Ok((f(x), 0.0)), a, b, &rate, opts)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F, R>(f: F, a: f64, b: f64, rate: R, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), a, b, rate, opts)?;
    Ok((est.value.re, est.error))
}

/// Iterated 2D integral `∫ dy ∫ dx f(x, y)`.
///
/// `x_ranges(y)` lists the (disjoint) inner intervals at a given `y`, which
/// lets the domain be a union of rectangles or a region with curved edges.
/// `y_rate` and `x_rate` are the oscillation bounds of each direction.
pub fn integrate_2d<F, XR, YR, XS>(
    f: F,
    y_range: (f64, f64),
    x_ranges: XS,
    y_rate: YR,
    x_rate: XR,
    opts: &QuadOptions,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Complex64,
    XS: Fn(f64) -> Vec<(f64, f64)>,
    YR: Fn(f64) -> f64,
    XR: Fn(f64, f64) -> f64,
{
    let inner_opts = QuadOptions {
        rel_tol: 0.1 * opts.rel_tol,
        abs_tol: 0.1 * opts.abs_tol,
        max_panels: opts.max_panels,
    };
    let outer = |y: f64| -> Result<(Complex64, f64)> {
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for (lo, hi) in x_ranges(y) {
            let est = adaptive(
                &|x| Ok((f(x, y), 0.0)),
                lo,
                hi,
                &|x| x_rate(x, y),
                &inner_opts,
            )?;
            value += est.value;
            error += est.error;
        }
        Ok((value, error))
    };
    adaptive(&outer, y_range.0, y_range.1, &y_rate, opts)
}
