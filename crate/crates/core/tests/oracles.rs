//! Reference values computed independently of the estimators: hand-solved
//! LPs, brute-force sampling with a direct trust test, and deterministic
//! quadrature of the two-world error regions.

mod support;

use deflab_core::accuracy::{expected_gap, identity_check, inaccuracy_mc};
use deflab_core::advmeasure::{build_adversarial_measure, bump_pair_for_box};
use deflab_core::lemma1::{build_positive_box, build_violation_box};
use deflab_core::trust::{check_global_trust, cone_margin, MARGIN_TOLERANCE};
use deflab_core::{Event, Gamble, MeasureSpec, ProbMass, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// `int_{-L}^{L}` by composite Simpson on each half-line (the integrand has a
/// kink at 0).
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// `I(p, w_i)` for two worlds under the standard Gaussian, by quadrature over
/// `x_i` of `|x_i| phi(x_i) P(error | x_i)`.
fn quadrature_inaccuracy(p: [f64; 2], i: usize) -> f64 {
    let std = Normal::new(0.0, 1.0).unwrap();
    let (pi, pj) = (p[i], p[1 - i]);
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    // p accepts X iff pi x_i + pj x_j >= 0.
    let accept_prob = |xi: f64| -> f64 {
        if pj == 0.0 {
            if pi * xi >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 - std.cdf(-pi * xi / pj)
        }
    };
    let neg = simpson(|x| x.abs() * phi(x) * accept_prob(x), -12.0, 0.0, 20_000);
    let pos = simpson(|x| x * phi(x) * (1.0 - accept_prob(x)), 0.0, 12.0, 20_000);
    neg + pos
}

/// Closed form of the same integral: `(1 - a / sqrt(1 + a^2)) / sqrt(2 pi)`
/// with `a = p_i / p_j`.
fn closed_form_inaccuracy(p: [f64; 2], i: usize) -> f64 {
    let a = p[i] / p[1 - i];
    (1.0 - a / (1.0 + a * a).sqrt()) / (2.0 * std::f64::consts::PI).sqrt()
}

#[test]
fn quadrature_agrees_with_closed_form() {
    for (p, i) in [
        ([0.5, 0.5], 0),
        ([0.9, 0.1], 0),
        ([0.9, 0.1], 1),
        ([0.3, 0.7], 0),
    ] {
        let q = quadrature_inaccuracy(p, i);
        let c = closed_form_inaccuracy(p, i);
        assert!((q - c).abs() < 1e-9, "{p:?} {i}: {q} vs {c}");
    }
}

#[test]
fn inaccuracy_matches_quadrature() {
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    for (k, (p, i)) in [
        ([0.5, 0.5], 0),
        ([0.9, 0.1], 0),
        ([0.9, 0.1], 1),
        ([0.3, 0.7], 0),
        ([0.25, 0.75], 1),
    ]
    .into_iter()
    .enumerate()
    {
        let reference = quadrature_inaccuracy(p, i);
        let pm = ProbMass::new(p.to_vec()).unwrap();
        let est = inaccuracy_mc(&pm, i, &mu, 1_000_000, 100 + k as u64).unwrap();
        assert!(
            (est.value - reference).abs() <= 3.0 * est.std_error,
            "p={p:?} i={i}: mc {} +/- {} vs quadrature {reference}",
            est.value,
            est.std_error
        );
    }
}

#[test]
fn confident_prevision_errs_less() {
    let confident = quadrature_inaccuracy([0.9, 0.1], 0);
    let even = quadrature_inaccuracy([0.5, 0.5], 0);
    assert!(confident < even);
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    let a = inaccuracy_mc(&ProbMass::new(vec![0.9, 0.1]).unwrap(), 0, &mu, 200_000, 5).unwrap();
    let b = inaccuracy_mc(&ProbMass::new(vec![0.5, 0.5]).unwrap(), 0, &mu, 200_000, 5).unwrap();
    assert!(a.value < b.value);
}

#[test]
fn truth_expert_gap_matches_quadrature() {
    let s = support::truth_expert();
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    let reference =
        -(0.5 * quadrature_inaccuracy([0.5, 0.5], 0) + 0.5 * quadrature_inaccuracy([0.5, 0.5], 1));
    let est = expected_gap(&s, &mu, 1_000_000, 17).unwrap();
    assert!(est.value < 0.0);
    assert!(
        (est.value - reference).abs() <= 3.0 * est.std_error,
        "{est:?} vs {reference}"
    );
}

#[test]
fn anti_expert_gap_is_positive() {
    let s = support::anti_expert();
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    let est = expected_gap(&s, &mu, 1_000_000, 23).unwrap();
    assert!(est.positive_at(5.0), "{est:?}");
}

#[test]
fn identity_holds_on_named_scenarios() {
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    for s in [support::anti_expert(), support::truth_expert()] {
        let check = identity_check(&s, &mu, 1_000_000, 31).unwrap();
        assert!(check.agrees_within(3.0), "{check:?}");
    }
}

#[test]
fn anti_expert_margin_solved_by_hand() {
    // For A = {w2}: x1 >= 0, x2 <= -s, x2 / 2 <= -s, |x| <= 1, so s* = 1/2.
    let s = support::anti_expert();
    let m = cone_margin(&s, &Event::from_indices(2, &[1]).unwrap()).unwrap();
    assert!((m.margin - 0.5).abs() < 1e-9);
    assert!((m.gamble[1] + 1.0).abs() < 1e-12 && m.gamble[0] >= -1e-12);
}

/// Independent violation test, written directly from the definition.
fn violates(s: &Scenario, x: &[f64]) -> bool {
    let n = x.len();
    let dot = |w: &[f64]| (0..n).map(|j| w[j] * x[j]).sum::<f64>();
    let inside: Vec<bool> = s.expert().iter().map(|p| dot(p.weights()) >= 0.0).collect();
    let pi = s.agent().weights();
    let mass: f64 = (0..n).filter(|&j| inside[j]).map(|j| pi[j]).sum();
    let num: f64 = (0..n).filter(|&j| inside[j]).map(|j| pi[j] * x[j]).sum();
    mass > 0.0 && num < 0.0
}

#[test]
fn trusted_scenarios_survive_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for s in [
        support::truth_expert(),
        support::agent_as_expert(&[0.2, 0.5, 0.3]),
    ] {
        assert!(check_global_trust(&s).unwrap().holds);
        let n = s.n();
        for bits in 1..(1u64 << n) {
            let m = cone_margin(&s, &Event::from_bits(n, bits)).unwrap();
            assert!(m.margin <= MARGIN_TOLERANCE);
        }
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(rand_distr_normal()))
                .collect();
            assert!(!violates(&s, &x), "{x:?}");
        }
    }
}

fn rand_distr_normal() -> impl rand::distr::Distribution<f64> {
    // Box-Muller keeps this oracle off the sampler used by the crate.
    struct BoxMuller;
    impl rand::distr::Distribution<f64> for BoxMuller {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }
    BoxMuller
}

#[test]
fn anti_expert_violation_box_by_sampling() {
    let s = support::anti_expert();
    let b = build_violation_box(&s, &Gamble::new(vec![1.0, -1.0]).unwrap()).unwrap();
    assert_eq!(
        (b.lower.as_slice(), b.upper.as_slice()),
        (&[1.0, -1.0][..], &[2.0, 0.0][..])
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let y = [rng.random_range(1.0..2.0), rng.random_range(-1.0..0.0)];
        if y[0] == 1.0 || y[1] == -1.0 {
            continue;
        }
        assert!(violates(&s, &y));
        let local = deflab_core::trust::check_local_trust(&s, &Gamble::new(y.to_vec()).unwrap());
        assert!(!local.unwrap().holds);
    }
}

#[test]
fn positive_box_by_sampling() {
    let s = support::anti_expert();
    let b = build_positive_box(&s, &Gamble::new(vec![-0.2, 1.0]).unwrap()).unwrap();
    assert!((b.delta - 0.2).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pi = s.agent().weights();
    for _ in 0..1000 {
        let y = [
            -0.2 - 0.2 * rng.random::<f64>(),
            1.0 - 0.2 * rng.random::<f64>(),
        ];
        // [P(Y) < 0] = {w2}: P_2(Y) = y1 < 0, P_1(Y) = y2 > 0.
        // pi(Y | {w2}) = y2 > 0 as well.
        assert!(y[0] < 0.0 && y[1] > 0.0);
        assert!(pi[0] * y[0] + pi[1] * y[1] >= 0.0);
    }
}

#[test]
fn mirrored_bump_mass_stays_in_mirrored_box() {
    let s = support::anti_expert();
    let b = build_violation_box(&s, &Gamble::new(vec![1.0, -1.0]).unwrap()).unwrap();
    let (center, scale) = bump_pair_for_box(&b);
    let mirror = b.mirrored();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let normal = rand_distr_normal();
    let trials = 200_000;
    let inside = (0..trials)
        .filter(|_| {
            let y: Vec<f64> = center
                .values()
                .iter()
                .map(|c| -c + scale * rng.sample(&normal))
                .collect();
            y.iter()
                .zip(mirror.lower.iter().zip(&mirror.upper))
                .all(|(v, (l, u))| l < v && v < u)
        })
        .count();
    let frac = inside as f64 / trials as f64;
    // 0.9973^2 = 0.9946 in expectation.
    assert!(frac >= 0.99, "{frac}");
}

#[test]
fn small_violation_needs_concentrated_mass() {
    // Violated only on a thin wedge: the plain Gaussian gap is negative.
    let s = Scenario::from_weights(&[0.97, 0.03], &[&[0.96, 0.04], &[0.55, 0.45]]).unwrap();
    let verdict = check_global_trust(&s).unwrap();
    assert!(!verdict.holds);
    let mu = MeasureSpec::gaussian(2, 1.0).unwrap();
    let plain = expected_gap(&s, &mu, 1_000_000, 41).unwrap();
    assert!(plain.value <= 0.0, "{plain:?}");

    let witness = verdict.witness.unwrap();
    let b = deflab_core::advmeasure::select_measure_box(&s, &witness).unwrap();
    let found = build_adversarial_measure(&s, &b, 1.0, 1_000_000, 41).unwrap();
    assert!(found.weight < 1.0, "{found:?}");
    assert!(found.estimate.positive_at(5.0));
    println!(
        "small-violation scenario: weight {} gap {:?}",
        found.weight, found.estimate
    );
}
