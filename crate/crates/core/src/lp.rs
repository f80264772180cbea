//! Dense two-phase simplex for small linear programs.
//!
//! Variables are non-negative. Pivoting follows Bland's rule (lowest eligible
//! index enters, lowest basic index breaks ratio ties), which cannot cycle.

use alloc::vec;
use alloc::vec::Vec;

/// Pivot cap shared by both phases.
pub const ITERATION_CAP: usize = 10_000;

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl core::fmt::Display for LpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            LpError::Infeasible => "infeasible",
            LpError::Unbounded => "unbounded",
            LpError::IterationLimit => "iteration cap reached",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    /// Adds `x_var <= bound`.
    pub fn bound(&mut self, var: usize, bound: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars];
        coeffs[var] = 1.0;
        self.add(coeffs, Relation::Le, bound)
    }

    pub fn solve(&self) -> Result<Solution, LpError> {
        let m = self.constraints.len();
        let n = self.num_vars;

        // Column layout: structural | slack/surplus | artificial.
        let num_slack = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let mut num_art = 0;
        for c in &self.constraints {
            let flipped = c.rhs < 0.0;
            let rel = effective_relation(c.relation, flipped);
            if rel != Relation::Le {
                num_art += 1;
            }
        }
        let ncols = n + num_slack + num_art;
        let width = ncols + 1;
        let mut t = Tableau {
            m,
            width,
            a: vec![0.0; m * width],
            basis: vec![0; m],
        };

        let mut slack_col = n;
        let mut art_col = n + num_slack;
        for (r, c) in self.constraints.iter().enumerate() {
            let flipped = c.rhs < 0.0;
            let sign = if flipped { -1.0 } else { 1.0 };
            for (j, &v) in c.coeffs.iter().enumerate() {
                t.a[r * width + j] = sign * v;
            }
            t.a[r * width + ncols] = sign * c.rhs;
            match effective_relation(c.relation, flipped) {
                Relation::Le => {
                    t.a[r * width + slack_col] = 1.0;
                    t.basis[r] = slack_col;
                    slack_col += 1;
                }
                Relation::Ge => {
                    t.a[r * width + slack_col] = -1.0;
                    slack_col += 1;
                    t.a[r * width + art_col] = 1.0;
                    t.basis[r] = art_col;
                    art_col += 1;
                }
                Relation::Eq => {
                    t.a[r * width + art_col] = 1.0;
                    t.basis[r] = art_col;
                    art_col += 1;
                }
            }
        }

        let first_art = n + num_slack;
        let mut iterations = 0;

        if num_art > 0 {
            let mut cost = vec![0.0; ncols];
            for c in cost.iter_mut().skip(first_art) {
                *c = 1.0;
            }
            let enterable = vec![true; ncols];
            t.optimize(&cost, &enterable, &mut iterations)?;
            let infeasibility: f64 = (0..m)
                .filter(|&r| t.basis[r] >= first_art)
                .map(|r| t.rhs(r))
                .sum();
            if infeasibility > FEASIBILITY_EPS {
                return Err(LpError::Infeasible);
            }
            // Drive zero-level artificials out of the basis where possible.
            for r in 0..m {
                if t.basis[r] < first_art {
                    continue;
                }
                if let Some(j) = (0..first_art).find(|&j| t.at(r, j).abs() > PIVOT_EPS) {
                    t.pivot(r, j);
                }
            }
        }

        let mut cost = vec![0.0; ncols];
        for (c, &o) in cost.iter_mut().zip(&self.objective) {
            *c = -o;
        }
        let enterable: Vec<bool> = (0..ncols).map(|j| j < first_art).collect();
        t.optimize(&cost, &enterable, &mut iterations)?;

        let mut x = vec![0.0; n];
        for r in 0..m {
            if t.basis[r] < n {
                x[t.basis[r]] = t.rhs(r);
            }
        }
        let objective = self
            .objective
            .iter()
            .zip(&x)
            .fold(0.0, |acc, (c, v)| acc + c * v);
        Ok(Solution {
            objective,
            x,
            iterations,
        })
    }
}

fn effective_relation(rel: Relation, flipped: bool) -> Relation {
    match (rel, flipped) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}

struct Tableau {
    m: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.a[r * w + c] = 1.0;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.a[i * w + j] -= f * self.a[r * w + j];
            }
            self.a[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost . x` from the current basic feasible solution.
    fn optimize(
        &mut self,
        cost: &[f64],
        enterable: &[bool],
        iterations: &mut usize,
    ) -> Result<(), LpError> {
        let ncols = self.width - 1;
        loop {
            let entering = (0..ncols).find(|&j| {
                if !enterable[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j];
                for r in 0..self.m {
                    reduced -= cost[self.basis[r]] * self.at(r, j);
                }
                reduced < -PIVOT_EPS
            });
            let Some(c) = entering else {
                return Ok(());
            };

            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let coef = self.at(r, c);
                if coef <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(r) / coef;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - PIVOT_EPS
                            || (ratio <= best_ratio + PIVOT_EPS && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leaving else {
                return Err(LpError::Unbounded);
            };

            *iterations += 1;
            if *iterations > ITERATION_CAP {
                return Err(LpError::IterationLimit);
            }
            self.pivot(r, c);
        }
    }
}
