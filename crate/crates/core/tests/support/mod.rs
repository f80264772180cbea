//! Deterministic random scenario families shared by the integration suites.
#![allow(dead_code)]

use deflab_core::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Agent and expert rows drawn independently from the flat Dirichlet.
    Dirichlet,
    /// Expert rows drawn from a sparse Dirichlet (some exact zeros).
    Sparse,
    /// `P_i = pi( . | E)` for the partition cell `E` containing world `i`.
    Partition,
    /// `P_i = a * ideal_i + (1 - a) * pi`.
    Shrunk,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub family: Family,
    pub scenario: Scenario,
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

fn sparse(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut w = dirichlet(rng, n);
        for v in w.iter_mut() {
            if rng.random::<f64>() < 0.35 {
                *v = 0.0;
            }
        }
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.iter().map(|v| v / total).collect();
        }
    }
}

fn build(agent: &[f64], rows: &[Vec<f64>]) -> Scenario {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Scenario::from_weights(agent, &refs).expect("valid scenario")
}

pub fn generate(rng: &mut ChaCha8Rng, family: Family, n: usize) -> Scenario {
    let agent = dirichlet(rng, n);
    let rows: Vec<Vec<f64>> = match family {
        Family::Dirichlet => (0..n).map(|_| dirichlet(rng, n)).collect(),
        Family::Sparse => (0..n).map(|_| sparse(rng, n)).collect(),
        Family::Partition => {
            let cells: Vec<usize> = (0..n).map(|_| rng.random_range(0..n.div_ceil(2))).collect();
            (0..n)
                .map(|i| {
                    let mass: f64 = (0..n)
                        .filter(|&j| cells[j] == cells[i])
                        .map(|j| agent[j])
                        .sum();
                    (0..n)
                        .map(|j| {
                            if cells[j] == cells[i] {
                                agent[j] / mass
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        }
        Family::Shrunk => {
            let a: f64 = rng.random_range(0.05..0.95);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (1.0 - a) * agent[j] + if i == j { a } else { 0.0 })
                        .collect()
                })
                .collect()
        }
    };
    build(&agent, &rows)
}

/// `count` scenarios with `n` cycling through 2, 3, 4 and families cycling
/// Dirichlet, Sparse, Partition, Shrunk, Dirichlet, Sparse.
pub fn suite(seed: u64, count: usize) -> Vec<Case> {
    const ORDER: [Family; 6] = [
        Family::Dirichlet,
        Family::Sparse,
        Family::Partition,
        Family::Shrunk,
        Family::Dirichlet,
        Family::Sparse,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let family = ORDER[k % ORDER.len()];
            let n = 2 + k % 3;
            Case {
                name: format!("#{k} {family:?} n={n}"),
                family,
                scenario: generate(&mut rng, family, n),
            }
        })
        .collect()
}

pub fn anti_expert() -> Scenario {
    Scenario::from_weights(&[0.5, 0.5], &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn truth_expert() -> Scenario {
    Scenario::from_weights(&[0.5, 0.5], &[&[1.0, 0.0], &[0.0, 1.0]]).unwrap()
}

pub fn agent_as_expert(agent: &[f64]) -> Scenario {
    let rows: Vec<&[f64]> = (0..agent.len()).map(|_| agent).collect();
    Scenario::from_weights(agent, &rows).unwrap()
}
