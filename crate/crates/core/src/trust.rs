//! Total Trust: exact local and global decisions, and Almost Everywhere Trust
//! estimated by sampling.
//!
//! The agent `pi` trusts the expert on `X` when `pi(X | [P(X) >= t]) >= t` for
//! every `t` at which the conditional is defined. Globally it suffices to check
//! `t = 0` over all gambles. The sign vector of `(P_1(X), .., P_n(X))` splits
//! gamble space into finitely many polyhedral cones, one per event
//! `A = [P(X) >= 0]`, and within each cone a violation is a strict linear
//! inequality. Each cone is decided by a small margin-maximizing LP.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{chunk_count, chunk_len, chunk_rng, ChunkRunner, Sequential};
use crate::lp::{LinearProgram, Relation};
use crate::measure::MeasureSpec;
use crate::prob::{conditional_raw, sum_left_to_right, Event, Gamble, ProbMass, WorldSpace};

/// LP margins at or below this are treated as "no violation in this cone".
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Largest world count accepted by [`check_global_trust`] (`2^n` LPs).
pub const MAX_GLOBAL_WORLDS: usize = 20;

/// Relative slack on local threshold comparisons, scaled by `max |x_i|`.
pub const LOCAL_TOLERANCE: f64 = 1e-12;

const EVENTS_PER_CHUNK: u64 = 256;

/// An agent prevision together with the expert's prevision at each world.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    space: WorldSpace,
    agent: ProbMass,
    expert: Vec<ProbMass>,
}

impl Scenario {
    pub fn new(space: WorldSpace, agent: ProbMass, expert: Vec<ProbMass>) -> Result<Self> {
        let n = space.len();
        if agent.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: agent.len(),
            });
        }
        if expert.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: expert.len(),
            });
        }
        if let Some(row) = expert.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        Ok(Self {
            space,
            agent,
            expert,
        })
    }

    /// Builds a scenario over worlds `w1..wn` from raw weight rows.
    pub fn from_weights(agent: &[f64], expert: &[&[f64]]) -> Result<Self> {
        let space = WorldSpace::numbered(agent.len())?;
        let agent = ProbMass::new(agent.to_vec())?;
        let expert = expert
            .iter()
            .map(|row| ProbMass::new(row.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, agent, expert)
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn agent(&self) -> &ProbMass {
        &self.agent
    }

    pub fn expert(&self) -> &[ProbMass] {
        &self.expert
    }

    pub fn expert_at(&self, i: usize) -> &ProbMass {
        &self.expert[i]
    }

    /// `(P_1(X), .., P_n(X))`.
    pub fn expert_values(&self, x: &[f64]) -> Vec<f64> {
        self.expert.iter().map(|p| p.dot(x)).collect()
    }

    /// Membership mask of `[P(X) >= t]`.
    #[inline]
    pub fn expert_mask(&self, x: &[f64], t: f64) -> Vec<bool> {
        self.expert.iter().map(|p| p.dot(x) >= t).collect()
    }

    pub fn event_name(&self, event: &Event) -> String {
        let mut out = String::from("{");
        for (k, i) in event.members().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(self.space.label(i));
        }
        out.push('}');
        out
    }

    fn check_gamble(&self, x: &Gamble) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Outcome of a trust check.
///
/// When trust fails, `witness_event = [P(witness) >= threshold]` and
/// `witness_value = pi(witness | witness_event) < threshold`. Global checks
/// always use `threshold = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustVerdict {
    pub holds: bool,
    pub witness: Option<Gamble>,
    pub witness_event: Option<Event>,
    pub witness_value: Option<f64>,
    pub threshold: Option<f64>,
    pub margin: Option<f64>,
}

impl TrustVerdict {
    fn holding(margin: Option<f64>) -> Self {
        Self {
            holds: true,
            witness: None,
            witness_event: None,
            witness_value: None,
            threshold: None,
            margin,
        }
    }

    fn violated(
        witness: Gamble,
        event: Event,
        value: f64,
        threshold: f64,
        margin: Option<f64>,
    ) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
            witness_event: Some(event),
            witness_value: Some(value),
            threshold: Some(threshold),
            margin,
        }
    }
}

/// `[P(X) >= t] = { i : P_i(X) >= t }`, compared exactly.
pub fn expert_event(s: &Scenario, x: &Gamble, t: f64) -> Result<Event> {
    s.check_gamble(x)?;
    Ok(Event::from_mask(s.expert_mask(x.values(), t)))
}

/// Whether `pi(X | A) < 0` for `A = [P(X) >= 0]`, with `pi(A) > 0`.
#[inline]
pub fn violates_at_zero(s: &Scenario, x: &[f64]) -> bool {
    let mask = s.expert_mask(x, 0.0);
    matches!(conditional_raw(&s.agent, x, &mask), Some(v) if v < 0.0)
}

/// Decides trust on a single gamble over every threshold `t`.
///
/// `[P(X) >= t]` only changes at the values `P_i(X)`, so it is enough to test
/// each distinct value `v` with `A_v = [P(X) >= v]`. Thresholds where `pi(A_v)`
/// is zero are skipped. The first violating threshold (in increasing order) is
/// reported.
pub fn check_local_trust(s: &Scenario, x: &Gamble) -> Result<TrustVerdict> {
    s.check_gamble(x)?;
    let values = s.expert_values(x.values());
    let mut thresholds = values.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let slack = LOCAL_TOLERANCE * x.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for &v in &thresholds {
        let mask: Vec<bool> = values.iter().map(|&pv| pv >= v).collect();
        if let Some(cond) = conditional_raw(&s.agent, x.values(), &mask) {
            if cond < v - slack {
                return Ok(TrustVerdict::violated(
                    x.clone(),
                    Event::from_mask(mask),
                    cond,
                    v,
                    None,
                ));
            }
        }
    }
    Ok(TrustVerdict::holding(None))
}

/// A solved event-cone LP: the margin and the maximizing gamble.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMargin {
    pub margin: f64,
    pub gamble: Gamble,
}

/// Margin LP for the cone of event `A`:
///
/// maximize `s` subject to `P_i(X) >= 0` (i in A), `P_i(X) <= -s` (i not in A),
/// `pi(X * I_A) <= -s`, `-1 <= x_j <= 1`, `s >= 0`.
///
/// Trust fails somewhere in the cone iff the optimum exceeds
/// [`MARGIN_TOLERANCE`].
pub fn cone_margin(s: &Scenario, event: &Event) -> Result<ConeMargin> {
    solve_cone(s, event, false)
}

/// Like [`cone_margin`] but also pushes `P_i(X) >= s` for `i in A` and
/// normalizes the agent row to `pi(X | A) <= -s`, which picks a witness deep
/// inside the violating part of the cone, away from every expert hyperplane.
pub fn interior_witness(s: &Scenario, event: &Event) -> Result<ConeMargin> {
    solve_cone(s, event, true)
}

fn solve_cone(s: &Scenario, event: &Event, interior: bool) -> Result<ConeMargin> {
    let n = s.n();
    if event.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: event.n(),
        });
    }
    // Shifted variables u = x + 1 keep everything non-negative; s is column n.
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for (i, p) in s.expert.iter().enumerate() {
        let row_sum = sum_left_to_right(p.weights().iter().copied());
        let mut coeffs: Vec<f64> = p.weights().to_vec();
        if event.contains(i) {
            coeffs.push(if interior { -1.0 } else { 0.0 });
            lp.add(coeffs, Relation::Ge, row_sum);
        } else {
            coeffs.push(1.0);
            lp.add(coeffs, Relation::Le, row_sum);
        }
    }
    let mass = s.agent.mass_of(event.mask());
    let mut coeffs: Vec<f64> = s
        .agent
        .weights()
        .iter()
        .zip(event.mask())
        .map(|(&w, &m)| if m { w } else { 0.0 })
        .collect();
    coeffs.push(if interior { mass } else { 1.0 });
    lp.add(coeffs, Relation::Le, mass);
    for j in 0..n {
        lp.bound(j, 2.0);
    }
    let sol = lp.solve().map_err(|e| Error::Lp {
        event: s.event_name(event),
        reason: alloc::format!("{e}"),
    })?;
    let gamble = Gamble::new(sol.x[..n].iter().map(|u| u - 1.0).collect())?;
    Ok(ConeMargin {
        margin: sol.x[n],
        gamble,
    })
}

/// Decides global Total Trust exactly by enumerating the `2^n - 1` non-empty
/// events with positive agent mass.
pub fn check_global_trust(s: &Scenario) -> Result<TrustVerdict> {
    check_global_trust_with(&Sequential, s)
}

/// [`check_global_trust`] with the event LPs scheduled by `runner`.
///
/// Events are visited in decreasing bit order (bit `i` = world `i`); the
/// reported witness comes from the first event attaining the largest margin.
pub fn check_global_trust_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
) -> Result<TrustVerdict> {
    let n = s.n();
    if n > MAX_GLOBAL_WORLDS {
        return Err(Error::InvalidParameter(alloc::format!(
            "global trust check supports at most {MAX_GLOBAL_WORLDS} worlds, got {n}"
        )));
    }
    let top: u64 = (1u64 << n) - 1;
    let chunks = top.div_ceil(EVENTS_PER_CHUNK);
    let results = runner.map_chunks(chunks, |k| -> Result<Vec<(u64, f64)>> {
        let hi = top - k * EVENTS_PER_CHUNK;
        let lo = hi.saturating_sub(EVENTS_PER_CHUNK - 1).max(1);
        let mut out = Vec::new();
        for bits in (lo..=hi).rev() {
            let event = Event::from_bits(n, bits);
            if s.agent.mass_of(event.mask()) <= 0.0 {
                continue;
            }
            out.push((bits, cone_margin(s, &event)?.margin));
        }
        Ok(out)
    });

    let mut max_margin = 0.0f64;
    let mut best: Option<(u64, f64)> = None;
    for chunk in results {
        for (bits, margin) in chunk? {
            max_margin = max_margin.max(margin);
            if margin > MARGIN_TOLERANCE && best.is_none_or(|(_, m)| margin > m) {
                best = Some((bits, margin));
            }
        }
    }
    let Some((bits, margin)) = best else {
        // `+ 0.0` turns a -0.0 margin into 0.0.
        return Ok(TrustVerdict::holding(Some(max_margin + 0.0)));
    };

    let event = Event::from_bits(n, bits);
    let candidates = [
        interior_witness(s, &event)?.gamble,
        cone_margin(s, &event)?.gamble,
    ];
    for x in candidates {
        let mask = s.expert_mask(x.values(), 0.0);
        if let Some(value) = conditional_raw(&s.agent, x.values(), &mask) {
            if value < 0.0 {
                return Ok(TrustVerdict::violated(
                    x,
                    Event::from_mask(mask),
                    value,
                    0.0,
                    Some(margin),
                ));
            }
        }
    }
    Err(Error::Lp {
        event: s.event_name(&event),
        reason: String::from("optimal gamble does not reproduce the violation"),
    })
}

/// Fraction of Gaussian-sampled gambles on which trust fails at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeTrustEstimate {
    pub frequency: f64,
    /// Binomial standard error `sqrt(f (1 - f) / N)`.
    pub std_error: f64,
    pub violations: u64,
    pub samples: u64,
    pub seed: u64,
}

impl AeTrustEstimate {
    pub fn positive_at(&self, sigmas: f64) -> bool {
        self.violations > 0 && self.frequency > sigmas * self.std_error
    }
}

/// Samples `samples` gambles from the centered spherical Gaussian with scale
/// `sigma` and counts trust violations.
pub fn estimate_ae_trust(
    s: &Scenario,
    sigma: f64,
    samples: u64,
    seed: u64,
) -> Result<AeTrustEstimate> {
    estimate_ae_trust_with(&Sequential, s, sigma, samples, seed)
}

pub fn estimate_ae_trust_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    sigma: f64,
    samples: u64,
    seed: u64,
) -> Result<AeTrustEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter(String::from(
            "samples must be at least 1",
        )));
    }
    let mu = MeasureSpec::gaussian(s.n(), sigma)?;
    let counts = runner.map_chunks(chunk_count(samples), |k| {
        let mut rng = chunk_rng(seed, k);
        let mut x = vec![0.0; s.n()];
        let mut hits = 0u64;
        for _ in 0..chunk_len(samples, k) {
            mu.sample_into(&mut rng, &mut x);
            if violates_at_zero(s, &x) {
                hits += 1;
            }
        }
        hits
    });
    let violations: u64 = counts.into_iter().sum();
    let n = samples as f64;
    let frequency = violations as f64 / n;
    Ok(AeTrustEstimate {
        frequency,
        std_error: libm::sqrt(frequency * (1.0 - frequency) / n),
        violations,
        samples,
        seed,
    })
}
