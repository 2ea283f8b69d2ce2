//! Truncated multimode OPA state and the good/bad classification of the
//! coincidences it produces.
//!
//! The state keeps terms up to second order in the gain for `n` signal/idler
//! mode pairs:
//!
//! ```text
//! |ψ⟩ = |0⟩ − (ξ/2) Σ_k |1_k 1_k⟩ + (ξ²/8) [ Σ_k |2_k 2_k⟩ + Σ_{k≠k′} |1_k 1_k⟩|1_k′ 1_k′⟩ ]
//! ```
//!
//! The double sum over distinct modes is stored once per unordered pair
//! `{k, k′}` with amplitude `ξ²/8` and multiplicity 2. A term contributes
//! `multiplicity · amplitude²` to the detection weight.

use crate::error::{Error, Result};

/// Largest mode count the brute-force enumeration accepts.
pub const MAX_ORACLE_MODES: usize = 12;

/// Largest gain for which the second-order truncation is accepted.
pub const MAX_PERTURBATIVE_XI: f64 = 0.5;

/// Occupation pattern of one term. Nothing beyond second order in `ξ` is
/// representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Occupancy {
    Vacuum,
    /// One photon in each of signal and idler of mode pair `k`.
    Pair(usize),
    /// Two photons in each of signal and idler of mode pair `k`.
    DoublePair(usize),
    /// One pair in mode `k` and one in mode `k′`, `k < k′`.
    PairProduct(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermClass {
    Vacuum,
    Pair,
    DoublePairSameMode,
    PairProductDistinctModes,
}

impl Occupancy {
    pub fn class(&self) -> TermClass {
        match self {
            Occupancy::Vacuum => TermClass::Vacuum,
            Occupancy::Pair(_) => TermClass::Pair,
            Occupancy::DoublePair(_) => TermClass::DoublePairSameMode,
            Occupancy::PairProduct(..) => TermClass::PairProductDistinctModes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub amplitude: f64,
    /// Number of terms of the ordered double sum this entry stands for.
    pub multiplicity: u32,
    pub occupancy: Occupancy,
}

impl Term {
    pub fn class(&self) -> TermClass {
        self.occupancy.class()
    }

    pub fn weight(&self) -> f64 {
        f64::from(self.multiplicity) * self.amplitude * self.amplitude
    }
}

/// Unnormalized, second-order OPA output state.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOpaState {
    pub n_modes: usize,
    pub xi: f64,
    pub terms: Vec<Term>,
}

impl TruncatedOpaState {
    pub fn count(&self, class: TermClass) -> usize {
        self.terms.iter().filter(|t| t.class() == class).count()
    }
}

/// Enumerates every term of the truncated state for `n` mode pairs.
pub fn build_truncated_state(n: usize, xi: f64) -> Result<TruncatedOpaState> {
    if n == 0 {
        return Err(Error::Contract(
            "the state needs at least one mode pair".into(),
        ));
    }
    if !(xi > 0.0 && xi <= MAX_PERTURBATIVE_XI) {
        return Err(Error::Contract(format!(
            "xi = {xi} outside the perturbative range (0, {MAX_PERTURBATIVE_XI}]"
        )));
    }

    let pair_amp = -0.5 * xi;
    let second = xi * xi / 8.0;
    let mut terms = Vec::with_capacity(1 + 2 * n + n * (n - 1) / 2);
    terms.push(Term {
        amplitude: 1.0,
        multiplicity: 1,
        occupancy: Occupancy::Vacuum,
    });
    terms.extend((0..n).map(|k| Term {
        amplitude: pair_amp,
        multiplicity: 1,
        occupancy: Occupancy::Pair(k),
    }));
    terms.extend((0..n).map(|k| Term {
        amplitude: second,
        multiplicity: 1,
        occupancy: Occupancy::DoublePair(k),
    }));
    for k in 0..n {
        for kp in k + 1..n {
            terms.push(Term {
                amplitude: second,
                multiplicity: 2,
                occupancy: Occupancy::PairProduct(k, kp),
            });
        }
    }
    Ok(TruncatedOpaState {
        n_modes: n,
        xi,
        terms,
    })
}

/// Detection weights of coincidences from photons of one entangled state
/// (good) and from two different states (bad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountClassification {
    pub good_weight: f64,
    pub bad_weight: f64,
}

impl CountClassification {
    pub fn p_good(&self) -> f64 {
        self.good_weight / (self.good_weight + self.bad_weight)
    }
}

/// One photon is registered per arm per event. Pair and same-mode double-pair
/// terms always give good counts; a two-pair product term gives a good count
/// when both clicks come from the same pair, which is half of the time.
pub fn classify_counts(state: &TruncatedOpaState) -> CountClassification {
    let mut good = 0.0;
    let mut bad = 0.0;
    for term in &state.terms {
        let w = term.weight();
        match term.class() {
            TermClass::Vacuum => {}
            TermClass::Pair | TermClass::DoublePairSameMode => good += w,
            TermClass::PairProductDistinctModes => {
                good += 0.5 * w;
                bad += 0.5 * w;
            }
        }
    }
    CountClassification {
        good_weight: good,
        bad_weight: bad,
    }
}

/// Closed form `P(good|n) = (16 + ((n+1)/2)·ξ²) / (16 + n·ξ²)`.
pub fn p_good_closed(n: u64, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Contract("n must be at least 1".into()));
    }
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::Domain {
            field: "xi",
            value: xi,
            reason: "must be finite and non-negative",
        });
    }
    let n = n as f64;
    let x2 = xi * xi;
    Ok((16.0 + 0.5 * (n + 1.0) * x2) / (16.0 + n * x2))
}

/// `P(good|n)` by enumerating the truncated state and classifying every term.
pub fn p_good_oracle(n: usize, xi: f64) -> Result<f64> {
    if n > MAX_ORACLE_MODES {
        return Err(Error::Resource(format!(
            "enumeration is limited to n <= {MAX_ORACLE_MODES} mode pairs, got {n}"
        )));
    }
    Ok(classify_counts(&build_truncated_state(n, xi)?).p_good())
}
