//! Global inaccuracy under symmetric measures.
//!
//! A prevision `p` almost-accepts `X` when `p(X) >= 0` (the set `D_p`). The
//! ideal prevision at world `i` accepts exactly the gambles with `x_i >= 0`.
//! `p` commits a type 1 error at `i` on `X` when it accepts a gamble the ideal
//! prevision rejects, and a type 2 error in the opposite case. The score
//!
//! ```text
//! I(p, w_i) = integral over error gambles of |x_i| dmu
//! ```
//!
//! is estimated by Monte Carlo. The expected inaccuracy gap between expert and
//! agent equals, pointwise in `X`,
//!
//! ```text
//! -pi(X * I_A) [pi(A) != 0, pi(X) < 0] + pi(X * I_Ac) [pi(Ac) != 0, pi(X) >= 0]
//! ```
//!
//! with `A = [P(X) >= 0]`; [`rhs_identity`] integrates that form on the same
//! sample stream as [`expected_gap`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{
    chunk_rng, derive_seed, moments_with, ChunkRunner, Moments, ScoreEstimate, Sequential,
};
use crate::measure::MeasureSpec;
use crate::prob::{Gamble, ProbMass};
use crate::trust::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    None,
    /// Accepted by `p`, rejected at the world.
    Type1,
    /// Rejected by `p`, accepted at the world.
    Type2,
}

/// `X in D_p`, i.e. `p(X) >= 0`.
pub fn is_almost_desirable(p: &ProbMass, x: &Gamble) -> Result<bool> {
    Ok(crate::prob::expectation(p, x)? >= 0.0)
}

pub fn error_class(p: &ProbMass, i: usize, x: &Gamble) -> Result<ErrorClass> {
    let value = crate::prob::expectation(p, x)?;
    if i >= x.len() {
        return Err(Error::WorldOutOfRange {
            index: i,
            n: x.len(),
        });
    }
    Ok(classify(value >= 0.0, x[i] >= 0.0))
}

#[inline]
fn classify(accepted: bool, accepted_at_world: bool) -> ErrorClass {
    match (accepted, accepted_at_world) {
        (true, false) => ErrorClass::Type1,
        (false, true) => ErrorClass::Type2,
        _ => ErrorClass::None,
    }
}

#[inline]
fn errs(value: f64, xi: f64) -> bool {
    (value >= 0.0) != (xi >= 0.0)
}

/// `|x_i|` if `p` errs on `X` at world `i`, else 0.
#[inline]
pub fn inaccuracy_integrand(p: &ProbMass, i: usize, x: &[f64]) -> f64 {
    if errs(p.dot(x), x[i]) {
        x[i].abs()
    } else {
        0.0
    }
}

/// `sum_i pi_i |x_i| ([P_i errs at i] - [pi errs at i])`.
#[inline]
pub fn gap_integrand(s: &Scenario, x: &[f64]) -> f64 {
    let agent = s.agent();
    let agent_value = agent.dot(x);
    let mut acc = 0.0;
    for (i, (p, &w)) in s.expert().iter().zip(agent.weights()).enumerate() {
        let expert_err = errs(p.dot(x), x[i]) as u8 as f64;
        let agent_err = errs(agent_value, x[i]) as u8 as f64;
        acc += w * x[i].abs() * (expert_err - agent_err);
    }
    acc
}

/// Pointwise right-hand side of the gap identity.
#[inline]
pub fn rhs_integrand(s: &Scenario, x: &[f64]) -> f64 {
    let agent = s.agent();
    let mask = s.expert_mask(x, 0.0);
    if agent.dot(x) < 0.0 {
        if agent.mass_of(&mask) != 0.0 {
            -agent.restricted_dot(x, &mask)
        } else {
            0.0
        }
    } else {
        let complement: Vec<bool> = mask.iter().map(|m| !m).collect();
        if agent.mass_of(&complement) != 0.0 {
            agent.restricted_dot(x, &complement)
        } else {
            0.0
        }
    }
}

fn check_run(dim: usize, mu: &MeasureSpec, samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "samples must be at least 1",
        )));
    }
    if mu.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: mu.dim(),
        });
    }
    Ok(())
}

/// Monte-Carlo estimate of `I(p, w_i)`.
pub fn inaccuracy_mc(
    p: &ProbMass,
    i: usize,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    inaccuracy_mc_with(&Sequential, p, i, mu, samples, seed)
}

pub fn inaccuracy_mc_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    p: &ProbMass,
    i: usize,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    check_run(p.len(), mu, samples)?;
    if i >= p.len() {
        return Err(Error::WorldOutOfRange {
            index: i,
            n: p.len(),
        });
    }
    Ok(crate::estimate::estimate_with(
        runner,
        mu,
        samples,
        seed,
        |x| inaccuracy_integrand(p, i, x),
    ))
}

/// Estimate of `sum_i pi(w_i) (I(P_i, w_i) - I(pi, w_i))`, the agent's
/// expected inaccuracy of the expert minus its own.
pub fn expected_gap(
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    expected_gap_with(&Sequential, s, mu, samples, seed)
}

pub fn expected_gap_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    check_run(s.n(), mu, samples)?;
    Ok(crate::estimate::estimate_with(
        runner,
        mu,
        samples,
        seed,
        |x| gap_integrand(s, x),
    ))
}

pub fn rhs_identity(
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    rhs_identity_with(&Sequential, s, mu, samples, seed)
}

pub fn rhs_identity_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    check_run(s.n(), mu, samples)?;
    Ok(crate::estimate::estimate_with(
        runner,
        mu,
        samples,
        seed,
        |x| rhs_integrand(s, x),
    ))
}

/// Both sides of the gap identity and their pointwise difference, from one
/// shared stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub gap: ScoreEstimate,
    pub rhs: ScoreEstimate,
    pub difference: ScoreEstimate,
}

impl IdentityCheck {
    /// `sqrt(se_gap^2 + se_rhs^2)`.
    pub fn combined_std_error(&self) -> f64 {
        libm::sqrt(
            self.gap.std_error * self.gap.std_error + self.rhs.std_error * self.rhs.std_error,
        )
    }

    pub fn agrees_within(&self, sigmas: f64) -> bool {
        (self.gap.value - self.rhs.value).abs() <= sigmas * self.combined_std_error()
    }
}

pub fn identity_check(
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<IdentityCheck> {
    identity_check_with(&Sequential, s, mu, samples, seed)
}

pub fn identity_check_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    s: &Scenario,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
) -> Result<IdentityCheck> {
    check_run(s.n(), mu, samples)?;
    let [gap, rhs, diff] = moments_with(runner, mu, samples, seed, |x| {
        let g = gap_integrand(s, x);
        let h = rhs_integrand(s, x);
        [g, h, g - h]
    });
    Ok(IdentityCheck {
        gap: ScoreEstimate::from_moments(&gap, seed),
        rhs: ScoreEstimate::from_moments(&rhs, seed),
        difference: ScoreEstimate::from_moments(&diff, seed),
    })
}

/// Result of probing `mu(B) = mu(-B)` on random boxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub max_discrepancy: f64,
    /// Largest discrepancy in units of the combined binomial standard error.
    pub worst_z: f64,
    pub trials: usize,
    pub passed: bool,
}

/// Estimates `mu(B)` and `mu(-B)` with independent streams for `trials` boxes.
/// The first box is `[0, 1]^n`; the rest are centred on draws from `mu`.
/// Passes when every discrepancy is below 4 combined standard errors.
pub fn measure_symmetry_check(
    mu: &MeasureSpec,
    trials: usize,
    samples: u64,
    seed: u64,
) -> Result<SymmetryReport> {
    measure_symmetry_check_with(&Sequential, mu, trials, samples, seed)
}

pub fn measure_symmetry_check_with<R: ChunkRunner + ?Sized>(
    runner: &R,
    mu: &MeasureSpec,
    trials: usize,
    samples: u64,
    seed: u64,
) -> Result<SymmetryReport> {
    if samples == 0 || trials == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "trials and samples must be at least 1",
        )));
    }
    let n = mu.dim();
    let mut box_rng = chunk_rng(derive_seed(seed, u64::MAX), 0);
    let mut center = alloc::vec![0.0; n];
    let mut report = SymmetryReport {
        max_discrepancy: 0.0,
        worst_z: 0.0,
        trials,
        passed: true,
    };
    for t in 0..trials {
        let (lower, upper): (Vec<f64>, Vec<f64>) = if t == 0 {
            (alloc::vec![0.0; n], alloc::vec![1.0; n])
        } else {
            mu.sample_into(&mut box_rng, &mut center);
            center
                .iter()
                .map(|&c| {
                    let half = mu.sigma() * (0.25 + 0.75 * rand::Rng::random::<f64>(&mut box_rng));
                    (c - half, c + half)
                })
                .unzip()
        };
        let inside = |x: &[f64], sign: f64| {
            x.iter()
                .zip(lower.iter().zip(&upper))
                .all(|(&v, (&l, &u))| l <= sign * v && sign * v <= u)
        };
        let [plus] = moments_with(runner, mu, samples, derive_seed(seed, 2 * t as u64), |x| {
            [inside(x, 1.0) as u8 as f64]
        });
        let [minus] = moments_with(
            runner,
            mu,
            samples,
            derive_seed(seed, 2 * t as u64 + 1),
            |x| [inside(x, -1.0) as u8 as f64],
        );
        let (p, q) = (frequency(&plus), frequency(&minus));
        let nf = samples as f64;
        let se = libm::sqrt(p * (1.0 - p) / nf + q * (1.0 - q) / nf);
        let discrepancy = (p - q).abs();
        report.max_discrepancy = report.max_discrepancy.max(discrepancy);
        let z = if se > 0.0 {
            discrepancy / se
        } else if discrepancy > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        report.worst_z = report.worst_z.max(z);
        if z >= 4.0 {
            report.passed = false;
        }
    }
    Ok(report)
}

fn frequency(m: &Moments) -> f64 {
    // Mean of 0/1 values; rounding from the running update is far below
    // the binomial error this feeds.
    m.mean.clamp(0.0, 1.0)
}
