//! Seeded Monte Carlo of two photon-timestamp streams and an ideal
//! coincidence circuit.
//!
//! Pair emissions form a homogeneous Poisson process; each puts one click in
//! stream A and one in stream B, the latter displaced by Gaussian jitter.
//! Independent Poisson background (photons whose partner never reaches the
//! other detector) is added to both streams. Every click keeps its provenance
//! so the circuit's output can be split into true and accidental coincidences.
//!
//! The circuit walks stream A in time order and pairs each click with the
//! earliest unmatched B click within `±T`; every click is used at most once.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;

use crate::error::{non_negative, positive, Error, Result};
use crate::rates::{fringe_period, visibility, RateModel, ScanResult};

/// Generator identifier recorded in output metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.9; streams 0-3 per simulation, seeds split from a master stream)";

/// Upper bound on the expected number of clicks of one simulation.
pub const MAX_EXPECTED_EVENTS: f64 = 1e8;

const STREAM_PAIRS: u64 = 0;
const STREAM_JITTER: u64 = 1;
const STREAM_BACKGROUND_A: u64 = 2;
const STREAM_BACKGROUND_B: u64 = 3;
const STREAM_SEEDS: u64 = 1 << 32;
const STREAM_BOOTSTRAP: u64 = (1 << 32) + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamSpec {
    /// Pair emissions per second.
    pub pair_rate: f64,
    /// Standard deviation of the B click relative to its A partner, seconds.
    pub jitter_sigma: f64,
    pub uncorrelated_rate_a: f64,
    pub uncorrelated_rate_b: f64,
    pub duration: f64,
    pub seed: u64,
}

impl StreamSpec {
    pub fn new(
        pair_rate: f64,
        jitter_sigma: f64,
        uncorrelated_rate_a: f64,
        uncorrelated_rate_b: f64,
        duration: f64,
        seed: u64,
    ) -> Result<Self> {
        Ok(Self {
            pair_rate: non_negative("pair_rate", pair_rate)?,
            jitter_sigma: non_negative("jitter_sigma", jitter_sigma)?,
            uncorrelated_rate_a: non_negative("uncorrelated_rate_a", uncorrelated_rate_a)?,
            uncorrelated_rate_b: non_negative("uncorrelated_rate_b", uncorrelated_rate_b)?,
            duration: positive("duration", duration)?,
            seed,
        })
    }

    /// Expected clicks over both streams.
    pub fn expected_events(&self) -> f64 {
        (2.0 * self.pair_rate + self.uncorrelated_rate_a + self.uncorrelated_rate_b) * self.duration
    }

    fn check_resources(&self) -> Result<()> {
        let n = self.expected_events();
        if n > MAX_EXPECTED_EVENTS {
            Err(Error::Resource(format!(
                "simulation would produce {n:e} clicks, above the bound {MAX_EXPECTED_EVENTS:e}"
            )))
        } else {
            Ok(())
        }
    }
}

/// Where a click came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Member of the pair with this emission index.
    Pair(u64),
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub origin: Origin,
}

/// Two time-ordered click streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Streams {
    pub a: Vec<Event>,
    pub b: Vec<Event>,
    pub spec: StreamSpec,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn poisson_times(rate: f64, duration: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if rate <= 0.0 {
        return Vec::new();
    }
    let gap = Exp::new(rate).expect("positive rate");
    let mut times = Vec::with_capacity((rate * duration * 1.05) as usize + 16);
    let mut t = gap.sample(rng);
    while t < duration {
        times.push(t);
        t += gap.sample(rng);
    }
    times
}

fn sort_by_time(events: &mut [Event]) {
    events.sort_by(|x, y| x.time.total_cmp(&y.time));
}

/// Generates both click streams. Identical specs give identical streams.
pub fn simulate_streams(spec: &StreamSpec) -> Result<Streams> {
    spec.check_resources()?;

    let pair_times = poisson_times(
        spec.pair_rate,
        spec.duration,
        &mut rng_for(spec.seed, STREAM_PAIRS),
    );
    let mut jitter_rng = rng_for(spec.seed, STREAM_JITTER);
    let jitter = Normal::new(0.0, spec.jitter_sigma).map_err(|e| Error::Contract(e.to_string()))?;

    let background_a = poisson_times(
        spec.uncorrelated_rate_a,
        spec.duration,
        &mut rng_for(spec.seed, STREAM_BACKGROUND_A),
    );
    let background_b = poisson_times(
        spec.uncorrelated_rate_b,
        spec.duration,
        &mut rng_for(spec.seed, STREAM_BACKGROUND_B),
    );

    let mut a = Vec::with_capacity(pair_times.len() + background_a.len());
    let mut b = Vec::with_capacity(pair_times.len() + background_b.len());
    for (id, &t) in pair_times.iter().enumerate() {
        let origin = Origin::Pair(id as u64);
        a.push(Event { time: t, origin });
        let dt = if spec.jitter_sigma > 0.0 {
            jitter.sample(&mut jitter_rng)
        } else {
            0.0
        };
        b.push(Event {
            time: t + dt,
            origin,
        });
    }
    a.extend(background_a.into_iter().map(|time| Event {
        time,
        origin: Origin::Background,
    }));
    b.extend(background_b.into_iter().map(|time| Event {
        time,
        origin: Origin::Background,
    }));
    sort_by_time(&mut a);
    sort_by_time(&mut b);
    Ok(Streams { a, b, spec: *spec })
}

/// Output of the coincidence circuit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoincidenceTally {
    pub true_count: u64,
    pub accidental_count: u64,
    pub total_count: u64,
    pub duration: f64,
}

impl CoincidenceTally {
    /// Combines tallies from independent shards.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            true_count: self.true_count + other.true_count,
            accidental_count: self.accidental_count + other.accidental_count,
            total_count: self.total_count + other.total_count,
            duration: self.duration + other.duration,
        }
    }
}

/// Greedy earliest-match coincidence circuit without the jitter precondition.
pub fn count_coincidences_raw(streams: &Streams, window_t: f64) -> Result<CoincidenceTally> {
    let window_t = positive("T", window_t)?;
    let b = &streams.b;
    let mut used = vec![false; b.len()];
    let mut lo = 0;
    let mut tally = CoincidenceTally {
        duration: streams.spec.duration,
        ..CoincidenceTally::default()
    };

    for ea in &streams.a {
        // B clicks before the window, or already used at the front, are
        // never candidates again because A is time ordered.
        while lo < b.len() && (used[lo] || b[lo].time < ea.time - window_t) {
            lo += 1;
        }
        let mut j = lo;
        while j < b.len() && b[j].time <= ea.time + window_t {
            if !used[j] {
                used[j] = true;
                tally.total_count += 1;
                match (ea.origin, b[j].origin) {
                    (Origin::Pair(x), Origin::Pair(y)) if x == y => tally.true_count += 1,
                    _ => tally.accidental_count += 1,
                }
                break;
            }
            j += 1;
        }
    }
    Ok(tally)
}

/// Coincidences within `±window_t`. The window must be wider than three
/// jitter widths so that true pairs are not lost.
pub fn count_coincidences(streams: &Streams, window_t: f64) -> Result<CoincidenceTally> {
    let window_t = positive("T", window_t)?;
    if !(streams.spec.jitter_sigma < window_t / 3.0) {
        return Err(Error::Contract(format!(
            "jitter {:e} s is not below T/3 = {:e} s",
            streams.spec.jitter_sigma,
            window_t / 3.0
        )));
    }
    count_coincidences_raw(streams, window_t)
}

/// Monte Carlo fringe scan settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    /// Detector positions across one fringe period, odd so the peak is sampled.
    pub n_points: usize,
    /// Target flat singles rate per detector, 1/s.
    pub singles_rate: f64,
    /// Acquisition time per position, s.
    pub duration: f64,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n_points: 21,
            singles_rate: 1e6,
            duration: 1.0,
            bootstrap: 400,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McVisibility {
    /// Total coincidences against D2 x position.
    pub scan: ScanResult,
    pub tallies: Vec<CoincidenceTally>,
    /// Expected coincidences per position from the analytic rates.
    pub expected: Vec<f64>,
    pub stream_specs: Vec<StreamSpec>,
    /// Fitted `floor + amplitude·shape` visibility.
    pub visibility: f64,
    /// Bootstrap standard error of `visibility`.
    pub std_error: f64,
    /// Visibility law at the same configuration.
    pub analytic: f64,
    /// Flat singles rate actually used.
    pub singles_rate: f64,
    pub peak_pair_rate: f64,
}

/// Least-squares fit of `counts = floor + amplitude·shape`; returns the
/// visibility `amplitude/(amplitude + 2·floor)`, or `None` when the shape is
/// constant over the chosen points.
fn fitted_visibility(
    shape: &[f64],
    counts: &[f64],
    idx: impl Iterator<Item = usize> + Clone,
) -> Option<f64> {
    let n = idx.clone().count() as f64;
    let (sx, sy) = idx
        .clone()
        .fold((0.0, 0.0), |(sx, sy), i| (sx + shape[i], sy + counts[i]));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = idx.fold((0.0, 0.0), |(sxx, sxy), i| {
        let dx = shape[i] - mx;
        (sxx + dx * dx, sxy + dx * (counts[i] - my))
    });
    if !(sxx > 1e-12 * n) {
        return None;
    }
    let amplitude = sxy / sxx;
    let floor = my - amplitude * mx;
    Some(amplitude / (amplitude + 2.0 * floor))
}

/// D2 x positions spanning one fringe period centred on the central maximum.
pub fn fringe_positions(model: &RateModel, n_points: usize) -> Vec<f64> {
    let period = fringe_period(&model.geom, &model.ap);
    let last = (n_points - 1) as f64;
    (0..n_points)
        .map(|i| period * (i as f64 / last - 0.5))
        .collect()
}

/// Simulates the coincidence fringe and estimates its visibility.
///
/// Rates are calibrated so that the expected coincidences at every position
/// are proportional to the analytic total rate: singles are flat at
/// `S = min(singles_rate, R_acc/(2T·R_peak))`, pairs are emitted at
/// `κ·R_ent(ρ)` with `κ = 2T·S²/R_acc`, and the remaining `S − κR_ent(ρ)`
/// clicks per detector are uncorrelated. Pair jitter is `1/Δ`.
pub fn mc_visibility(model: &RateModel, settings: &McSettings) -> Result<McVisibility> {
    if settings.n_points < 3 || settings.n_points.is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "fringe scan needs an odd number of points >= 3, got {}",
            settings.n_points
        )));
    }
    positive("mc_singles_rate", settings.singles_rate)?;
    positive("mc_duration", settings.duration)?;

    let y = model.det.rho2.1;
    let window_t = model.det.window_t;
    let peak = model.entangled((0.0, y));
    let acc = model.accidental();
    if !(peak > 0.0 && acc > 0.0) {
        return Err(Error::Contract(
            "Monte Carlo fringe needs nonzero gain and a nonzero entangled rate at the D2 row"
                .into(),
        ));
    }
    let jitter_sigma = 1.0 / model.src.delta;

    let singles = settings.singles_rate.min(acc / (2.0 * window_t * peak));
    let kappa = 2.0 * window_t * singles * singles / acc;
    let positions = fringe_positions(model, settings.n_points);
    let shape: Vec<f64> = positions
        .iter()
        .map(|&x| model.entangled((x, y)) / peak)
        .collect();

    let mut master = rng_for(settings.seed, STREAM_SEEDS);
    let specs = shape
        .iter()
        .map(|&s| {
            let pair_rate = kappa * peak * s;
            let background = (singles - pair_rate).max(0.0);
            StreamSpec::new(
                pair_rate,
                jitter_sigma,
                background,
                background,
                settings.duration,
                master.next_u64(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    // every bound is checked before any simulation starts
    for spec in &specs {
        spec.check_resources()?;
    }

    let tallies = specs
        .par_iter()
        .map(|spec| count_coincidences(&simulate_streams(spec)?, window_t))
        .collect::<Result<Vec<_>>>()?;

    let counts: Vec<f64> = tallies.iter().map(|t| t.total_count as f64).collect();
    let floor_rate = kappa * acc;
    let expected: Vec<f64> = shape
        .iter()
        .map(|&s| (kappa * peak * s + floor_rate) * settings.duration)
        .collect();

    let n = counts.len();
    let visibility_mc = fitted_visibility(&shape, &counts, 0..n)
        .ok_or_else(|| Error::Contract("fringe shape is flat over the scanned points".into()))?;

    let mut rng = rng_for(settings.seed, STREAM_BOOTSTRAP);
    let mut resampled = Vec::with_capacity(settings.bootstrap);
    let mut idx = vec![0usize; n];
    for _ in 0..settings.bootstrap {
        for slot in idx.iter_mut() {
            *slot = rng.random_range(0..n);
        }
        if let Some(v) = fitted_visibility(&shape, &counts, idx.iter().copied()) {
            resampled.push(v);
        }
    }
    let std_error = if resampled.len() > 1 {
        let m = resampled.iter().sum::<f64>() / resampled.len() as f64;
        let var =
            resampled.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (resampled.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };

    let consts = model.constants()?;
    let analytic = visibility(model.src.xi, model.delta_t(), &consts)?;
    let scan = ScanResult::new(
        positions,
        counts,
        vec![
            ("quantity".into(), "total_coincidences".into()),
            ("rng".into(), RNG_ALGORITHM.into()),
            ("seed".into(), settings.seed.to_string()),
        ],
    )?;

    Ok(McVisibility {
        scan,
        tallies,
        expected,
        stream_specs: specs,
        visibility: visibility_mc,
        std_error,
        analytic,
        singles_rate: singles,
        peak_pair_rate: kappa * peak,
    })
}
