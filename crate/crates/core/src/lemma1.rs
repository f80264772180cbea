//! Open neighbourhoods of gambles on which Total Trust fails.
//!
//! Given a witness `X` with `pi(X | A) < 0` for `A = [P(X) >= 0]`, every
//! `Y = X + Z` with `0 < Z_j < delta` keeps the same expert event and a
//! negative conditional, where `delta = min(lambda, xi)`:
//!
//! * `lambda = -pi(X | A)`, since `pi(X + e | A) = pi(X | A) + e`;
//! * `xi = min { -P_i(X) : i not in A }`, the largest shift that flips no
//!   negative expert prevision (`+inf` when `A` is everything).
//!
//! For `i in A` the shift makes `P_i(Y) > 0`, and for `i not in A` it keeps
//! `P_i(Y) < 0`, so the box misses every expert hyperplane `P_i(Y) = 0`.
//! Membership still excludes the hyperplanes pointwise.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::estimate::chunk_rng;
use crate::prob::{conditional_raw, Event, Gamble, ProbMass};
use crate::trust::Scenario;

/// Interior points checked before [`build_positive_box`] returns.
pub const POSITIVE_BOX_CHECKS: usize = 1000;
/// Halvings of `delta` tried before reporting a degenerate box.
pub const POSITIVE_BOX_RETRIES: usize = 20;

const CHECK_SEED: u64 = 0x5eed_b0c5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `pi(Y | [P(Y) >= 0]) < 0` throughout the box.
    NegativeSide,
    /// `pi(Y | [P(Y) < 0]) > 0` throughout the box.
    PositiveSide,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::NegativeSide => Orientation::PositiveSide,
            Orientation::PositiveSide => Orientation::NegativeSide,
        }
    }
}

/// An open axis-aligned box of gambles, minus the expert hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationBox {
    pub base: Gamble,
    /// `[P(Y) >= 0]`, constant over the box.
    pub event: Event,
    pub lambda: f64,
    pub xi: f64,
    pub delta: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub orientation: Orientation,
    pub hyperplanes: Vec<ProbMass>,
}

impl ViolationBox {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn midpoint(&self) -> Gamble {
        Gamble::new(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
        )
        .expect("finite bounds")
    }

    /// Lebesgue volume `delta^n`.
    pub fn volume(&self) -> f64 {
        libm::pow(self.delta, self.dim() as f64)
    }

    /// Strictly inside the box and off every hyperplane.
    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.dim()
            && y.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l < v && v < u)
            && self.hyperplanes.iter().all(|p| p.dot(y) != 0.0)
    }

    /// Whether `y` satisfies the inequality this box is built around.
    pub fn orientation_holds(&self, s: &Scenario, y: &[f64]) -> bool {
        let values = s.expert_values(y);
        match self.orientation {
            Orientation::NegativeSide => {
                let mask: Vec<bool> = values.iter().map(|&v| v >= 0.0).collect();
                matches!(conditional_raw(s.agent(), y, &mask), Some(c) if c < 0.0)
            }
            Orientation::PositiveSide => {
                let mask: Vec<bool> = values.iter().map(|&v| v < 0.0).collect();
                matches!(conditional_raw(s.agent(), y, &mask), Some(c) if c > 0.0)
            }
        }
    }

    /// Uniform draw from the open box (hyperplanes are hit with probability 0).
    pub fn sample_interior<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for ((o, l), u) in out.iter_mut().zip(&self.lower).zip(&self.upper) {
            let t = loop {
                let t: f64 = rng.random();
                if t > 0.0 {
                    break t;
                }
            };
            let v = l + (u - l) * t;
            *o = if v < *u { v } else { 0.5 * (l + u) };
        }
    }

    /// The box `-Y`: bounds and base negated, expert event complemented and
    /// orientation flipped.
    pub fn mirrored(&self) -> Self {
        Self {
            base: self.base.negated(),
            event: self.event.complement(),
            lambda: self.lambda,
            xi: self.xi,
            delta: self.delta,
            lower: self.upper.iter().map(|u| -u).collect(),
            upper: self.lower.iter().map(|l| -l).collect(),
            orientation: self.orientation.flipped(),
            hyperplanes: self.hyperplanes.clone(),
        }
    }
}

struct Witness {
    mask: Vec<bool>,
    conditional: f64,
    values: Vec<f64>,
}

fn witness(s: &Scenario, x: &Gamble) -> Result<Witness> {
    if x.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: x.len(),
        });
    }
    let values = s.expert_values(x.values());
    let mask: Vec<bool> = values.iter().map(|&v| v >= 0.0).collect();
    match conditional_raw(s.agent(), x.values(), &mask) {
        None => Err(Error::NotAWitness(String::from(
            "the agent gives the expert event probability zero",
        ))),
        Some(c) if c >= 0.0 => Err(Error::NotAWitness(alloc::format!(
            "conditional prevision {c} is not negative"
        ))),
        Some(conditional) => Ok(Witness {
            mask,
            conditional,
            values,
        }),
    }
}

/// `lambda = -pi(X | [P(X) >= 0])`.
pub fn compute_lambda(s: &Scenario, x: &Gamble) -> Result<f64> {
    Ok(-witness(s, x)?.conditional)
}

/// `xi = min { -P_i(X) : P_i(X) < 0 }`, or `+inf` if there is none.
pub fn compute_xi(s: &Scenario, x: &Gamble) -> Result<f64> {
    let w = witness(s, x)?;
    Ok(xi_of(&w))
}

fn xi_of(w: &Witness) -> f64 {
    w.values
        .iter()
        .zip(&w.mask)
        .filter(|(_, &m)| !m)
        .fold(f64::INFINITY, |acc, (&v, _)| acc.min(-v))
}

fn upward_box(s: &Scenario, x: &Gamble, cap: Option<f64>) -> Result<ViolationBox> {
    let w = witness(s, x)?;
    let lambda = -w.conditional;
    let xi = xi_of(&w);
    let mut delta = lambda.min(xi);
    if let Some(cap) = cap {
        delta = delta.min(cap);
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::DegenerateBox(alloc::format!("delta = {delta}")));
    }
    Ok(ViolationBox {
        base: x.clone(),
        event: Event::from_mask(w.mask),
        lambda,
        xi,
        delta,
        lower: x.values().to_vec(),
        upper: x.values().iter().map(|v| v + delta).collect(),
        orientation: Orientation::NegativeSide,
        hyperplanes: s.expert().to_vec(),
    })
}

/// The open box `X + (0, delta)^n` with `delta = min(lambda, xi)`.
pub fn build_violation_box(s: &Scenario, x: &Gamble) -> Result<ViolationBox> {
    upward_box(s, x, None)
}

/// As [`build_violation_box`], but when `pi(X) < 0` also caps `delta` at
/// `-pi(X)` so that every gamble in the box stays outside `D_pi`.
pub fn build_nondesirable_box(s: &Scenario, x: &Gamble) -> Result<ViolationBox> {
    let agent_value = s.agent().dot(x.values());
    upward_box(s, x, (agent_value < 0.0).then_some(-agent_value))
}

/// Mirrored construction for a gamble the agent finds almost desirable.
///
/// Requires `pi(X) >= 0` and `pi(X | C) > 0` for `C = [P(X) < 0]` with
/// `pi(C) > 0`. Returns the box `X - (0, delta)^n` on which `C` is constant,
/// `pi(Y | C) > 0` and `pi(Y) >= 0`. `delta` starts at the minimum of
/// `pi(X | C)`, the smallest non-zero `|P_i(X)|` and `pi(X)`, and is halved
/// until [`POSITIVE_BOX_CHECKS`] interior samples all pass.
pub fn build_positive_box(s: &Scenario, x: &Gamble) -> Result<ViolationBox> {
    if x.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: x.len(),
        });
    }
    let agent = s.agent();
    let agent_value = agent.dot(x.values());
    if agent_value < 0.0 {
        return Err(Error::NotAWitness(alloc::format!(
            "pi(X) = {agent_value} is negative"
        )));
    }
    let values = s.expert_values(x.values());
    let below: Vec<bool> = values.iter().map(|&v| v < 0.0).collect();
    let conditional = match conditional_raw(agent, x.values(), &below) {
        None => {
            return Err(Error::NotAWitness(String::from(
                "the agent gives [P(X) < 0] probability zero",
            )))
        }
        Some(c) if c <= 0.0 => {
            return Err(Error::NotAWitness(alloc::format!(
                "pi(X | [P(X) < 0]) = {c} is not positive"
            )))
        }
        Some(c) => c,
    };
    if values.contains(&0.0) {
        return Err(Error::DegenerateBox(String::from(
            "the gamble lies on an expert hyperplane",
        )));
    }
    let stability = values
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v.abs()));
    let mut delta = conditional.min(stability).min(agent_value);
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::DegenerateBox(alloc::format!(
            "no room below the gamble (delta = {delta})"
        )));
    }

    let event = Event::from_mask(below.iter().map(|b| !b).collect());
    for _ in 0..=POSITIVE_BOX_RETRIES {
        let candidate = ViolationBox {
            base: x.clone(),
            event: event.clone(),
            lambda: conditional,
            xi: stability,
            delta,
            lower: x.values().iter().map(|v| v - delta).collect(),
            upper: x.values().to_vec(),
            orientation: Orientation::PositiveSide,
            hyperplanes: s.expert().to_vec(),
        };
        if positive_box_verified(s, &candidate, &below) {
            return Ok(candidate);
        }
        delta *= 0.5;
    }
    Err(Error::DegenerateBox(alloc::format!(
        "post-condition failed after {POSITIVE_BOX_RETRIES} halvings"
    )))
}

fn positive_box_verified(s: &Scenario, b: &ViolationBox, below: &[bool]) -> bool {
    let mut rng = chunk_rng(CHECK_SEED, 0);
    let mut y = alloc::vec![0.0; b.dim()];
    (0..POSITIVE_BOX_CHECKS).all(|_| {
        b.sample_interior(&mut rng, &mut y);
        let values = s.expert_values(&y);
        values.iter().all(|&v| v != 0.0)
            && values.iter().zip(below).all(|(&v, &m)| (v < 0.0) == m)
            && matches!(conditional_raw(s.agent(), &y, below), Some(c) if c > 0.0)
            && s.agent().dot(&y) >= 0.0
    })
}
