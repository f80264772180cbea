//! Measures under which an untrusted expert is expected to be less accurate.
//!
//! On every gamble where trust fails, and on its mirror image, the pointwise
//! gap integrand is strictly positive. Putting a symmetric pair of Gaussian
//! bumps on a violation box and its mirror, and escalating their weight, makes
//! the expected gap positive while the base Gaussian keeps the density
//! positive everywhere.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::accuracy::expected_gap_with;
use crate::error::{Error, Result};
use crate::estimate::{ChunkRunner, ScoreEstimate, Sequential};
use crate::lemma1::{
    build_nondesirable_box, build_positive_box, build_violation_box, ViolationBox,
};
use crate::measure::MeasureSpec;
use crate::prob::Gamble;
use crate::trust::{check_global_trust_with, Scenario, TrustVerdict, LOCAL_TOLERANCE};

/// Number of bump weights tried: `1 - 2^-1, 1 - 2^-2, .., 1 - 2^-20`.
pub const WEIGHT_STEPS: u32 = 20;

/// Required significance of the positive gap.
pub const SUCCESS_SIGMAS: f64 = 5.0;

/// Midpoint of the box and a scale of `delta / 6`, so each coordinate of a
/// bump draw stays within the box half-width with probability 0.9973.
pub fn bump_pair_for_box(b: &ViolationBox) -> (Gamble, f64) {
    (b.midpoint(), b.delta / 6.0)
}

pub fn candidate_weights() -> impl Iterator<Item = f64> {
    (1..=WEIGHT_STEPS).map(|k| 1.0 - libm::ldexp(1.0, -(k as i32)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialMeasure {
    pub measure: MeasureSpec,
    pub weight: f64,
    pub estimate: ScoreEstimate,
    /// Weights tried, including the successful one.
    pub attempts: usize,
}

/// Escalates the bump weight on `b` until the expected gap is positive at
/// [`SUCCESS_SIGMAS`]. Fails with [`Error::TrustHolds`] if the scenario is
/// trusted.
pub fn build_adversarial_measure(
    s: &Scenario,
    b: &ViolationBox,
    base_sigma: f64,
    samples: u64,
    seed: u64,
) -> Result<AdversarialMeasure> {
    build_adversarial_measure_with(&Sequential, s, b, base_sigma, samples, seed)
}

pub fn build_adversarial_measure_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    b: &ViolationBox,
    base_sigma: f64,
    samples: u64,
    seed: u64,
) -> Result<AdversarialMeasure> {
    if check_global_trust_with(runner, s)?.holds {
        return Err(Error::TrustHolds);
    }
    search_weights(runner, s, b, base_sigma, samples, seed)
}

fn search_weights<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    b: &ViolationBox,
    base_sigma: f64,
    samples: u64,
    seed: u64,
) -> Result<AdversarialMeasure> {
    if b.dim() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: b.dim(),
        });
    }
    let (center, scale) = bump_pair_for_box(b);
    let mut best: Option<(f64, ScoreEstimate)> = None;
    for (attempt, weight) in candidate_weights().enumerate() {
        let measure =
            MeasureSpec::mixture(s.n(), base_sigma, vec![(center.clone(), scale, weight)])?;
        let estimate = expected_gap_with(runner, s, &measure, samples, seed)?;
        if estimate.positive_at(SUCCESS_SIGMAS) {
            return Ok(AdversarialMeasure {
                measure,
                weight,
                estimate,
                attempts: attempt + 1,
            });
        }
        if best.is_none_or(|(_, e)| estimate.z_score() > e.z_score()) {
            best = Some((weight, estimate));
        }
    }
    let (best_weight, e) = best.expect("at least one weight");
    Err(Error::SearchExhausted {
        best_weight,
        best_value: e.value,
        best_std_error: e.std_error,
    })
}

/// Picks the box that carries the bump mass for a witness `X`:
///
/// * `pi(X) < 0`: the upward box, capped to stay outside `D_pi`;
/// * `pi(X) > 0`: the downward box on `[P(X) < 0]`;
/// * `pi(X) = 0` up to rounding, or the downward box degenerates: the
///   uncapped upward box. Every gamble in it violates trust, so the gap
///   integrand is positive there and on its mirror either way.
pub fn select_measure_box(s: &Scenario, witness: &Gamble) -> Result<ViolationBox> {
    let value = s.agent().dot(witness.values());
    let scale = witness.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if value.abs() <= LOCAL_TOLERANCE * scale {
        return build_violation_box(s, witness);
    }
    if value < 0.0 {
        return build_nondesirable_box(s, witness);
    }
    match build_positive_box(s, witness) {
        Ok(b) => Ok(b),
        Err(Error::DegenerateBox(_) | Error::NotAWitness(_)) => build_violation_box(s, witness),
        Err(e) => Err(e),
    }
}

/// Everything produced by the end-to-end counterexample pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub verdict: TrustVerdict,
    /// The open violation box around the witness.
    pub witness_box: ViolationBox,
    /// The box whose bump pair drives the measure.
    pub measure_box: ViolationBox,
    pub result: AdversarialMeasure,
}

/// Partial results of a weight search that never reached significance.
#[derive(Debug, Clone, PartialEq)]
pub struct Exhausted {
    pub verdict: TrustVerdict,
    pub witness_box: ViolationBox,
    pub measure_box: ViolationBox,
    /// Always [`Error::SearchExhausted`].
    pub error: Error,
}

/// Failure modes of [`find_counterexample`] that still carry partial results.
#[derive(Debug, Clone, PartialEq)]
pub enum CounterexampleError {
    TrustHolds(TrustVerdict),
    Exhausted(Box<Exhausted>),
    Other(Error),
}

impl From<Error> for CounterexampleError {
    fn from(e: Error) -> Self {
        CounterexampleError::Other(e)
    }
}

/// Global check, violation box, measure box and weight search in one go.
pub fn find_counterexample(
    s: &Scenario,
    base_sigma: f64,
    samples: u64,
    seed: u64,
) -> core::result::Result<Counterexample, CounterexampleError> {
    find_counterexample_with(&Sequential, s, base_sigma, samples, seed)
}

pub fn find_counterexample_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    base_sigma: f64,
    samples: u64,
    seed: u64,
) -> core::result::Result<Counterexample, CounterexampleError> {
    let verdict = check_global_trust_with(runner, s)?;
    let Some(witness) = verdict.witness.clone() else {
        return Err(CounterexampleError::TrustHolds(verdict));
    };
    let witness_box = build_violation_box(s, &witness)?;
    let measure_box = select_measure_box(s, &witness)?;
    match search_weights(runner, s, &measure_box, base_sigma, samples, seed) {
        Ok(result) => Ok(Counterexample {
            verdict,
            witness_box,
            measure_box,
            result,
        }),
        Err(error @ Error::SearchExhausted { .. }) => {
            Err(CounterexampleError::Exhausted(Box::new(Exhausted {
                verdict,
                witness_box,
                measure_box,
                error,
            })))
        }
        Err(e) => Err(e.into()),
    }
}

/// The bump centers of a measure, both signs, for reporting.
pub fn bump_centers(mu: &MeasureSpec) -> Vec<(Gamble, Gamble)> {
    mu.bumps()
        .iter()
        .map(|b| (b.center.clone(), b.center.negated()))
        .collect()
}
