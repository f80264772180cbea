//! Subcommand implementations. Each returns a [`Report`] and an exit code.

use deflab_core::accuracy::{identity_check_with, measure_symmetry_check_with};
use deflab_core::advmeasure::{
    bump_centers, find_counterexample_with, Counterexample, CounterexampleError, Exhausted,
    SUCCESS_SIGMAS,
};
use deflab_core::trust::{check_global_trust_with, check_local_trust, estimate_ae_trust_with};
use deflab_core::{
    ChunkRunner, Error, Event, MeasureSpec, Orientation, Scenario, ScoreEstimate, TrustVerdict,
    ViolationBox,
};
use serde_json::{json, Map, Value};

use crate::report::Report;
use crate::scenario_file::ScenarioFile;
use crate::{InputError, RunError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUST_HOLDS: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;

/// Boxes probed by the symmetry check on a counterexample measure.
pub const SYMMETRY_TRIALS: usize = 8;

/// Agreement threshold for the identity check, in combined standard errors.
pub const IDENTITY_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Check,
    Score,
    Identity,
    Counterexample,
    AeTrust,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Score => "score",
            Command::Identity => "identity",
            Command::Counterexample => "counterexample",
            Command::AeTrust => "ae-trust",
        }
    }

    fn samples_gambles(self) -> bool {
        self != Command::Check
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub command: Command,
    /// Echoed verbatim in the report.
    pub scenario: String,
    pub gamble: Option<String>,
    pub sigma: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Options {
    pub fn new(command: Command, scenario: &str) -> Self {
        Self {
            command,
            scenario: scenario.to_owned(),
            gamble: None,
            sigma: 1.0,
            samples: 100_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if self.gamble.is_some() && self.command != Command::Check {
            return Err(InputError::new(format!(
                "--gamble is only accepted by check, not {}",
                self.command.name()
            )));
        }
        if self.command.samples_gambles() {
            if !(self.sigma.is_finite() && self.sigma > 0.0) {
                return Err(InputError::new(format!(
                    "--sigma must be positive, got {}",
                    self.sigma
                )));
            }
            if self.samples == 0 {
                return Err(InputError::new("--samples must be positive, got 0"));
            }
        }
        Ok(())
    }

    fn echo(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.command.name()));
        m.insert("scenario".into(), json!(self.scenario));
        if let Some(g) = &self.gamble {
            m.insert("gamble".into(), json!(g));
        }
        if self.command.samples_gambles() {
            m.insert("sigma".into(), json!(self.sigma));
            m.insert("samples".into(), json!(self.samples));
            m.insert("seed".into(), json!(self.seed));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self {
            report,
            exit_code: EXIT_OK,
        }
    }
}

pub fn execute<R: ChunkRunner + ?Sized>(
    runner: &R,
    opts: &Options,
    file: &ScenarioFile,
) -> Result<Outcome, RunError> {
    opts.validate()?;
    let head = Report::new().section("command", opts.echo()).section(
        "scenario",
        json!({
            "digest": file.digest(),
            "worlds": file.scenario.space().labels(),
        }),
    );
    let s = &file.scenario;
    match opts.command {
        Command::Check => check(runner, head, opts, file),
        Command::Score => {
            let mu = MeasureSpec::gaussian(s.n(), opts.sigma)?;
            let id = identity_check_with(runner, s, &mu, opts.samples, opts.seed)?;
            Ok(Outcome::ok(
                head.section("measure", measure_json(&mu))
                    .section("gap", estimate_json(&id.gap))
                    .section("rhs", estimate_json(&id.rhs)),
            ))
        }
        Command::Identity => {
            let mu = MeasureSpec::gaussian(s.n(), opts.sigma)?;
            let id = identity_check_with(runner, s, &mu, opts.samples, opts.seed)?;
            Ok(Outcome::ok(
                head.section("measure", measure_json(&mu))
                    .section("gap", estimate_json(&id.gap))
                    .section("rhs", estimate_json(&id.rhs))
                    .section("difference", estimate_json(&id.difference))
                    .section(
                        "agreement",
                        json!({
                            "abs_difference": (id.gap.value - id.rhs.value).abs(),
                            "combined_std_error": id.combined_std_error(),
                            "sigmas": IDENTITY_SIGMAS,
                            "agrees": id.agrees_within(IDENTITY_SIGMAS),
                        }),
                    ),
            ))
        }
        Command::AeTrust => {
            let verdict = check_global_trust_with(runner, s)?;
            let ae = estimate_ae_trust_with(runner, s, opts.sigma, opts.samples, opts.seed)?;
            Ok(Outcome::ok(
                head.section("global", verdict_json(s, &verdict)).section(
                    "ae_trust",
                    json!({
                        "frequency": ae.frequency,
                        "std_error": ae.std_error,
                        "violations": ae.violations,
                        "samples": ae.samples,
                        "seed": ae.seed,
                        "positive_at_5se": ae.positive_at(5.0),
                    }),
                ),
            ))
        }
        Command::Counterexample => counterexample(runner, head, opts, s),
    }
}

fn check<R: ChunkRunner + ?Sized>(
    runner: &R,
    head: Report,
    opts: &Options,
    file: &ScenarioFile,
) -> Result<Outcome, RunError> {
    let s = &file.scenario;
    let local = match &opts.gamble {
        Some(name) => Some((name, file.gamble(name)?)),
        None => None,
    };
    let verdict = check_global_trust_with(runner, s)?;
    let mut report = head.section("global", verdict_json(s, &verdict));
    if let Some((name, x)) = local {
        let v = check_local_trust(s, x)?;
        let mut section = json!({ "gamble": name, "values": x.values() });
        merge(&mut section, verdict_json(s, &v));
        report = report.section("local", section);
    }
    Ok(Outcome::ok(report))
}

fn counterexample<R: ChunkRunner + ?Sized>(
    runner: &R,
    head: Report,
    opts: &Options,
    s: &Scenario,
) -> Result<Outcome, RunError> {
    match find_counterexample_with(runner, s, opts.sigma, opts.samples, opts.seed) {
        Ok(found) => {
            let report = counterexample_report(runner, head, s, &found, opts)?;
            Ok(Outcome::ok(report))
        }
        Err(CounterexampleError::TrustHolds(v)) => Ok(Outcome {
            report: head.section("global", verdict_json(s, &v)),
            exit_code: EXIT_TRUST_HOLDS,
        }),
        Err(CounterexampleError::Exhausted(partial)) => {
            let Exhausted {
                verdict,
                witness_box,
                measure_box,
                error,
            } = *partial;
            let mut search = json!({ "status": "exhausted", "weights_tried": deflab_core::advmeasure::WEIGHT_STEPS });
            if let Error::SearchExhausted {
                best_weight,
                best_value,
                best_std_error,
            } = error
            {
                merge(
                    &mut search,
                    json!({
                        "best_weight": best_weight,
                        "best_gap": best_value,
                        "best_std_error": best_std_error,
                    }),
                );
            }
            Ok(Outcome {
                report: head
                    .section("global", verdict_json(s, &verdict))
                    .section("witness_box", box_json(s, &witness_box))
                    .section("measure_box", box_json(s, &measure_box))
                    .section("search", search),
                exit_code: EXIT_EXHAUSTED,
            })
        }
        Err(CounterexampleError::Other(e)) => Err(e.into()),
    }
}

fn counterexample_report<R: ChunkRunner + ?Sized>(
    runner: &R,
    head: Report,
    s: &Scenario,
    found: &Counterexample,
    opts: &Options,
) -> Result<Report, RunError> {
    let mu = &found.result.measure;
    let symmetry =
        measure_symmetry_check_with(runner, mu, SYMMETRY_TRIALS, opts.samples, opts.seed)?;
    let gap = &found.result.estimate;
    Ok(head
        .section("global", verdict_json(s, &found.verdict))
        .section("witness_box", box_json(s, &found.witness_box))
        .section("measure_box", box_json(s, &found.measure_box))
        .section("measure", measure_json(mu))
        .section(
            "search",
            json!({
                "status": "found",
                "weight": found.result.weight,
                "attempts": found.result.attempts,
            }),
        )
        .section("gap", estimate_json(gap))
        .section(
            "checks",
            json!({
                "positive_density": mu.base_weight() > 0.0,
                "symmetric": mu.is_symmetric() && symmetry.passed,
                "symmetry_worst_z": symmetry.worst_z,
                "symmetry_trials": symmetry.trials,
                "gap_positive_5se": gap.positive_at(SUCCESS_SIGMAS),
            }),
        ))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn labels(s: &Scenario, e: &Event) -> Value {
    json!(e.members().map(|i| s.space().label(i)).collect::<Vec<_>>())
}

pub fn verdict_json(s: &Scenario, v: &TrustVerdict) -> Value {
    let mut m = Map::new();
    m.insert("holds".into(), json!(v.holds));
    if let Some(margin) = v.margin {
        m.insert("margin".into(), json!(margin));
    }
    if let Some(x) = &v.witness {
        m.insert("witness".into(), json!(x.values()));
    }
    if let Some(e) = &v.witness_event {
        m.insert("witness_event".into(), labels(s, e));
    }
    if let Some(t) = v.threshold {
        m.insert("threshold".into(), json!(t));
    }
    if let Some(c) = v.witness_value {
        m.insert("conditional_value".into(), json!(c));
    }
    Value::Object(m)
}

/// Infinite `xi` (no world outside the event) is written as `null`.
pub fn box_json(s: &Scenario, b: &ViolationBox) -> Value {
    json!({
        "base": b.base.values(),
        "event": labels(s, &b.event),
        "orientation": match b.orientation {
            Orientation::NegativeSide => "negative_side",
            Orientation::PositiveSide => "positive_side",
        },
        "lambda": b.lambda,
        "xi": b.xi,
        "delta": b.delta,
        "lower": b.lower,
        "upper": b.upper,
    })
}

pub fn measure_json(mu: &MeasureSpec) -> Value {
    let bumps: Vec<Value> = mu
        .bumps()
        .iter()
        .zip(bump_centers(mu))
        .map(|(b, (plus, minus))| {
            json!({
                "center": plus.values(),
                "mirror": minus.values(),
                "scale": b.scale,
                "weight": b.weight,
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("sigma".into(), json!(mu.sigma()));
    if bumps.is_empty() {
        m.insert("kind".into(), json!("gaussian"));
    } else {
        m.insert("kind".into(), json!("symmetric_mixture"));
        m.insert("base_weight".into(), json!(mu.base_weight()));
        m.insert("bumps".into(), json!(bumps));
    }
    Value::Object(m)
}

pub fn estimate_json(e: &ScoreEstimate) -> Value {
    json!({
        "value": e.value,
        "std_error": e.std_error,
        "samples": e.samples,
        "seed": e.seed,
    })
}
