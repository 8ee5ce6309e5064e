//! `threshold_functional` against an exhaustive search over the candidate
//! set `{0, p_(1), ..., p_(m), κ}`.

use dynfdr::selection::twenty_bin_grid;
use dynfdr::{
    select_lambda, threshold_functional, EmpiricalProcesses, FdrEstimatorConfig, LambdaRule,
    PValueSample, RuleKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest candidate `c` with `F(c) <= α`, evaluating the estimator by a
/// linear scan.
fn brute_force_threshold(values: &[f64], pi0: f64, alpha: f64, kappa: f64) -> f64 {
    let m = values.len();
    let estimate = |t: f64| -> f64 {
        if t > kappa {
            return 1.0;
        }
        let r = values.iter().filter(|&&p| p <= t).count();
        m as f64 * pi0 * t / r.max(1) as f64
    };
    let mut candidates = vec![0.0, kappa];
    candidates.extend_from_slice(values);
    candidates
        .into_iter()
        .filter(|&c| estimate(c) <= alpha)
        .fold(0.0, f64::max)
}

fn rejection_set(values: &[f64], t: f64) -> Vec<usize> {
    (0..values.len()).filter(|&i| values[i] <= t).collect()
}

fn random_instance(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = rng.random_range(1..=12);
    (0..m)
        .map(|_| match rng.random_range(0..4) {
            0 => rng.random_range(0.0..0.01),
            1 => rng.random_range(0.0..0.08),
            2 => [0.0, 0.005, 0.05, 1.0][rng.random_range(0..4)],
            _ => rng.random::<f64>(),
        })
        .collect()
}

#[test]
fn matches_exhaustive_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..500 {
        let values = random_instance(&mut rng);
        let alpha = [0.05, 0.1, 0.2][case % 3];
        let kappa = [alpha, 0.05, 0.1, 0.3][rng.random_range(0..4)];
        let cfg = FdrEstimatorConfig::new(alpha, kappa).unwrap();
        let pi0 = rng.random_range(0.05..2.5);
        let proc = EmpiricalProcesses::new(&PValueSample::new(values.clone()).unwrap());

        let t = threshold_functional(&proc, pi0, &cfg).unwrap();
        let oracle = brute_force_threshold(&values, pi0, alpha, kappa);
        assert_eq!(t, oracle, "case {case}: {values:?} pi0 {pi0}");
        assert_eq!(proc.sorted().indices_le(t), rejection_set(&values, oracle));
    }
}

#[test]
fn matches_exhaustive_candidates_with_selected_pi0() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let rules = [
        RuleKind::RightBoundary {
            grid: twenty_bin_grid(),
            comparison: dynfdr::Pi0Variant::Storey,
        },
        RuleKind::LowestSlope,
        RuleKind::Fixed(0.5),
    ];
    for case in 0..500 {
        let mut values = random_instance(&mut rng);
        if values.len() < 2 {
            values.push(rng.random());
        }
        let cfg = FdrEstimatorConfig::with_alpha(0.05).unwrap();
        let proc = EmpiricalProcesses::new(&PValueSample::new(values.clone()).unwrap());
        let rule = LambdaRule::new(rules[case % rules.len()].clone(), cfg.kappa);
        let pi0 = select_lambda(&proc, &rule).unwrap().value;

        let t = threshold_functional(&proc, pi0, &cfg).unwrap();
        assert_eq!(
            proc.sorted().indices_le(t),
            rejection_set(
                &values,
                brute_force_threshold(&values, pi0, cfg.alpha, cfg.kappa)
            ),
            "case {case}: {values:?}"
        );
    }
}
