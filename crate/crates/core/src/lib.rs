//! Total Trust between an agent and an expert on a finite possibility space.
//!
//! Worlds are indexed `0..n`. A [`Gamble`] is a payoff vector over worlds and
//! a [`ProbMass`] is a probability mass function, whose expectation functional
//! is the (coherent) prevision. A [`Scenario`] pairs an agent prevision with one
//! expert prevision per world.
//!
//! The crate decides Total Trust exactly ([`trust`]), builds open neighbourhoods
//! of gambles on which trust fails ([`lemma1`]), estimates global inaccuracy
//! scores under symmetric measures ([`accuracy`]) and synthesizes measures that
//! make the expected inaccuracy gap strictly positive whenever trust fails
//! ([`advmeasure`]).
//!
//! Everything here is `no_std` with `alloc`. Monte-Carlo work is split into
//! fixed-size chunks with one ChaCha stream per chunk, so results only depend on
//! the seed and the sample count; see [`estimate::ChunkRunner`] for plugging in
//! a parallel executor.
#![no_std]

extern crate alloc;

pub mod accuracy;
pub mod advmeasure;
mod error;
pub mod estimate;
pub mod lemma1;
pub mod lp;
pub mod measure;
pub mod prob;
pub mod trust;

pub use error::{Error, Result};
pub use estimate::{ChunkRunner, ScoreEstimate, Sequential};
pub use lemma1::{Orientation, ViolationBox};
pub use measure::{Bump, MeasureSpec};
pub use prob::{Event, Gamble, ProbMass, WorldSpace};
pub use trust::{Scenario, TrustVerdict};
