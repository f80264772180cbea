//! Symmetric, everywhere-positive sampling measures on gamble space.
//!
//! A [`MeasureSpec`] is a centered spherical Gaussian optionally mixed with
//! bumps. Each bump is a pair of spherical Gaussians at `+center` and `-center`
//! sharing the bump's weight equally, so `mu(A) = mu(-A)` holds by construction.
//! The base Gaussian always keeps positive weight, which gives a density that is
//! strictly positive everywhere.

use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::prob::Gamble;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Gaussian,
    Mixture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Gamble,
    pub scale: f64,
    pub weight: f64,
    paired: bool,
}

impl Bump {
    pub fn paired(&self) -> bool {
        self.paired
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    dim: usize,
    sigma: f64,
    bumps: Vec<Bump>,
}

impl MeasureSpec {
    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        Self::mixture(dim, sigma, Vec::new())
    }

    /// `bumps` holds `(center, scale, weight)`; the base Gaussian gets the
    /// remaining `1 - sum(weight)`, which must be positive.
    pub fn mixture(dim: usize, sigma: f64, bumps: Vec<(Gamble, f64, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptySpace);
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        let mut total = 0.0;
        let mut out = Vec::with_capacity(bumps.len());
        for (center, scale, weight) in bumps {
            if center.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: center.len(),
                });
            }
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "bump scale must be positive and finite, got {scale}"
                )));
            }
            if !(weight.is_finite() && (0.0..1.0).contains(&weight)) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "bump weight must lie in [0, 1), got {weight}"
                )));
            }
            total += weight;
            out.push(Bump {
                center,
                scale,
                weight,
                paired: true,
            });
        }
        if total >= 1.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "bump weights sum to {total}; the base Gaussian needs positive weight"
            )));
        }
        Ok(Self {
            dim,
            sigma,
            bumps: out,
        })
    }

    /// A deliberately asymmetric measure: one bump without its mirror image.
    #[cfg(test)]
    pub(crate) fn with_unpaired_bump(dim: usize, center: Gamble, scale: f64, weight: f64) -> Self {
        Self {
            dim,
            sigma: 1.0,
            bumps: alloc::vec![Bump {
                center,
                scale,
                weight,
                paired: false,
            }],
        }
    }

    pub fn kind(&self) -> MeasureKind {
        if self.bumps.is_empty() {
            MeasureKind::Gaussian
        } else {
            MeasureKind::Mixture
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn base_weight(&self) -> f64 {
        1.0 - self.bumps.iter().fold(0.0, |acc, b| acc + b.weight)
    }

    /// True when every bump carries its mirror half.
    pub fn is_symmetric(&self) -> bool {
        self.bumps.iter().all(|b| b.paired)
    }

    /// Writes one draw into `out` (length `dim`).
    pub fn sample_into<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        if !self.bumps.is_empty() {
            let u: f64 = rng.random();
            let mut cumulative = 0.0;
            for bump in &self.bumps {
                cumulative += bump.weight;
                if u < cumulative {
                    let sign = if !bump.paired || rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    };
                    for (o, c) in out.iter_mut().zip(bump.center.values()) {
                        let z: f64 = rng.sample(StandardNormal);
                        *o = sign * c + bump.scale * z;
                    }
                    return;
                }
            }
        }
        for o in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *o = self.sigma * z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::chunk_rng;
    use alloc::vec;

    #[test]
    fn rejects_bad_parameters() {
        assert!(MeasureSpec::gaussian(2, 0.0).is_err());
        assert!(MeasureSpec::gaussian(0, 1.0).is_err());
        let c = Gamble::new(vec![1.0, 1.0]).unwrap();
        assert!(MeasureSpec::mixture(2, 1.0, vec![(c.clone(), 0.5, 1.0)]).is_err());
        assert!(MeasureSpec::mixture(2, 1.0, vec![(c.clone(), 0.0, 0.5)]).is_err());
        assert!(
            MeasureSpec::mixture(2, 1.0, vec![(c.clone(), 0.5, 0.6), (c.clone(), 0.5, 0.4)])
                .is_err()
        );
        let short = Gamble::new(vec![1.0]).unwrap();
        assert!(MeasureSpec::mixture(2, 1.0, vec![(short, 0.5, 0.5)]).is_err());
    }

    #[test]
    fn base_weight_stays_positive() {
        let c = Gamble::new(vec![1.0, 1.0]).unwrap();
        let mu = MeasureSpec::mixture(2, 1.0, vec![(c, 0.1, 1.0 - 1.0 / 1048576.0)]).unwrap();
        assert!(mu.base_weight() > 0.0);
        assert_eq!(mu.kind(), MeasureKind::Mixture);
        assert!(mu.is_symmetric());
    }

    #[test]
    fn bump_draws_land_near_both_centers() {
        let c = Gamble::new(vec![10.0, -10.0]).unwrap();
        let mu = MeasureSpec::mixture(2, 1.0, vec![(c, 0.1, 0.9)]).unwrap();
        let mut rng = chunk_rng(3, 0);
        let mut x = [0.0; 2];
        let (mut plus, mut minus) = (0, 0);
        for _ in 0..2000 {
            mu.sample_into(&mut rng, &mut x);
            if x[0] > 5.0 {
                plus += 1;
            } else if x[0] < -5.0 {
                minus += 1;
            }
        }
        assert!(plus > 800 && minus > 800, "{plus} {minus}");
    }
}
