//! Finite-world probability and prevision algebra.
//!
//! All reductions over worlds run left to right in index order, so the same
//! inputs always produce the same bits.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// Tolerance on the total mass accepted by [`ProbMass::new`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite set of labelled worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSpace {
    labels: Vec<String>,
}

impl WorldSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Worlds labelled `w1..wn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| alloc::format!("w{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A real-valued payoff per world.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble(Vec<f64>);

impl Gamble {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(alloc::vec![c; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| c * x).collect())
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| x + c).collect())
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Pointwise product with the indicator of `event`.
    pub fn restricted_to(&self, event: &Event) -> Self {
        Self(
            self.0
                .iter()
                .zip(event.mask())
                .map(|(&x, &m)| if m { x } else { 0.0 })
                .collect(),
        )
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Index<usize> for Gamble {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// A subset of worlds, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    mask: Vec<bool>,
}

impl Event {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: alloc::vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            mask: alloc::vec![true; n],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn from_indices(n: usize, members: &[usize]) -> Result<Self> {
        let mut mask = alloc::vec![false; n];
        for &i in members {
            if i >= n {
                return Err(Error::WorldOutOfRange { index: i, n });
            }
            mask[i] = true;
        }
        Ok(Self { mask })
    }

    /// Bit `i` of `bits` selects world `i`. Requires `n <= 64`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            mask: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    /// The 0/1 gamble that pays 1 exactly on members.
    pub fn indicator(&self) -> Gamble {
        Gamble(
            self.mask
                .iter()
                .map(|&m| if m { 1.0 } else { 0.0 })
                .collect(),
        )
    }
}

/// A probability mass function over `n` worlds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMass(Vec<f64>);

impl ProbMass {
    /// Validates non-negativity and total mass within [`MASS_TOLERANCE`] of 1,
    /// then divides by the total once. Inputs already normalized to rounding
    /// precision are kept bit-for-bit, which makes normalization idempotent.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum = sum_left_to_right(weights.iter().copied());
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        let rounding = 2.0 * weights.len() as f64 * f64::EPSILON;
        if (sum - 1.0).abs() <= rounding {
            return Ok(Self(weights));
        }
        Ok(Self(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// Point mass on world `i`: the ideal prevision at that world.
    pub fn ideal(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::WorldOutOfRange { index: i, n });
        }
        let mut w = alloc::vec![0.0; n];
        w[i] = 1.0;
        Ok(Self(w))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(alloc::vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// `sum_i p_i * x_i` on raw slices; callers guarantee equal lengths.
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), x.len());
        sum_left_to_right(self.0.iter().zip(x).map(|(p, x)| p * x))
    }

    /// `p(A)` on a raw membership mask.
    #[inline]
    pub fn mass_of(&self, mask: &[bool]) -> f64 {
        sum_left_to_right(
            self.0
                .iter()
                .zip(mask)
                .map(|(&p, &m)| if m { p } else { 0.0 }),
        )
    }

    /// `p(X * I_A)` on raw slices.
    #[inline]
    pub fn restricted_dot(&self, x: &[f64], mask: &[bool]) -> f64 {
        sum_left_to_right(
            self.0
                .iter()
                .zip(x)
                .zip(mask)
                .map(|((p, x), &m)| if m { p * x } else { 0.0 }),
        )
    }
}

impl Index<usize> for ProbMass {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

#[inline]
pub(crate) fn sum_left_to_right(terms: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    for t in terms {
        acc += t;
    }
    acc
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `p(X) = sum_i p(w_i) x_i`.
pub fn expectation(p: &ProbMass, x: &Gamble) -> Result<f64> {
    check_dim(p.len(), x.len())?;
    Ok(p.dot(x.values()))
}

/// `p(A) = sum_{w_i in A} p(w_i)`; bit-identical to `expectation(p, I_A)`.
pub fn event_probability(p: &ProbMass, a: &Event) -> Result<f64> {
    check_dim(p.len(), a.n())?;
    Ok(p.mass_of(a.mask()))
}

pub fn indicator(a: &Event) -> Gamble {
    a.indicator()
}

/// `p(X | A) = p(X * I_A) / p(A)`, or `None` when `p(A) = 0`.
pub fn conditional_expectation(p: &ProbMass, x: &Gamble, a: &Event) -> Result<Option<f64>> {
    check_dim(p.len(), x.len())?;
    check_dim(p.len(), a.n())?;
    Ok(conditional_raw(p, x.values(), a.mask()))
}

#[inline]
pub(crate) fn conditional_raw(p: &ProbMass, x: &[f64], mask: &[bool]) -> Option<f64> {
    let mass = p.mass_of(mask);
    (mass > 0.0).then(|| p.restricted_dot(x, mask) / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pm(w: &[f64]) -> ProbMass {
        ProbMass::new(w.to_vec()).unwrap()
    }

    fn g(x: &[f64]) -> Gamble {
        Gamble::new(x.to_vec()).unwrap()
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(
            expectation(&pm(&[0.5, 0.5]), &g(&[2.0, -1.0])).unwrap(),
            0.5
        );
        assert_eq!(
            expectation(&pm(&[1.0, 0.0]), &g(&[7.25, -3.0])).unwrap(),
            7.25
        );
        assert_eq!(
            expectation(&pm(&[0.25, 0.75]), &g(&[4.0, 0.0])).unwrap(),
            1.0
        );
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let err = expectation(&pm(&[0.5, 0.5]), &g(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn event_probability_examples() {
        let p = pm(&[0.25, 0.75]);
        let a = Event::from_indices(2, &[1]).unwrap();
        assert_eq!(event_probability(&p, &a).unwrap(), 0.75);
        assert_eq!(event_probability(&p, &Event::empty(2)).unwrap(), 0.0);
        assert_eq!(event_probability(&p, &Event::full(2)).unwrap(), 1.0);
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(
            indicator(&Event::from_indices(2, &[0]).unwrap()).values(),
            &[1.0, 0.0]
        );
        assert_eq!(indicator(&Event::empty(3)).values(), &[0.0, 0.0, 0.0]);
        assert_eq!(indicator(&Event::full(2)).values(), &[1.0, 1.0]);
    }

    #[test]
    fn conditional_examples() {
        let p = pm(&[0.5, 0.5]);
        let x = g(&[2.0, -1.0]);
        let w1 = Event::from_indices(2, &[0]).unwrap();
        assert_eq!(conditional_expectation(&p, &x, &w1).unwrap(), Some(2.0));
        assert_eq!(
            conditional_expectation(&p, &x, &Event::full(2)).unwrap(),
            Some(0.5)
        );
        let w2 = Event::from_indices(2, &[1]).unwrap();
        assert_eq!(
            conditional_expectation(&pm(&[1.0, 0.0]), &g(&[5.0, 5.0]), &w2).unwrap(),
            None
        );
    }

    #[test]
    fn mass_validation() {
        assert_eq!(
            ProbMass::new(vec![0.4, 0.5]).unwrap_err(),
            Error::NotNormalized { sum: 0.9 }
        );
        assert!(matches!(
            ProbMass::new(vec![1.5, -0.5]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert!(matches!(
            ProbMass::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFinite(0))
        ));
        assert_eq!(ProbMass::new(vec![]).unwrap_err(), Error::EmptySpace);
    }

    #[test]
    fn normalization_is_idempotent() {
        let w = vec![0.1, 0.2, 0.3, 0.4 + 5e-13];
        let once = ProbMass::new(w).unwrap();
        let twice = ProbMass::new(once.weights().to_vec()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn world_space_validation() {
        assert_eq!(WorldSpace::new(vec![]).unwrap_err(), Error::EmptySpace);
        let dup = WorldSpace::new(vec!["a".into(), "a".into()]).unwrap_err();
        assert_eq!(dup, Error::DuplicateLabel("a".into()));
        let ws = WorldSpace::numbered(3).unwrap();
        assert_eq!(ws.index_of("w3"), Some(2));
    }

    #[test]
    fn event_out_of_range() {
        assert!(matches!(
            Event::from_indices(2, &[2]),
            Err(Error::WorldOutOfRange { index: 2, n: 2 })
        ));
    }
}
