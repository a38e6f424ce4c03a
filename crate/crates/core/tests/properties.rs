//! Property tests over randomly generated distributions, chains and states.

use entrobound_core::entropy::{
    mixing_entropy, mixture, mutual_entropy, relative_entropy, shannon_entropy, BITS,
};
use entrobound_core::inequalities::{
    cerf_adami_all_forms, cerf_adami_check, dpi_check, joint_triangle_check, narrowed_bound_check,
    triangle_check, two_hb_bound_check,
};
use entrobound_core::markov::is_markov;
use entrobound_core::quantum::{
    cerf_adami_quantum, is_entangled_pure, measure_pair, partial_trace, von_neumann_entropy,
};
use entrobound_core::sampling::{
    dense_distribution, markov_spec, mixed_distribution, random_pure_two_qubit,
};
use entrobound_core::statmech::{coin_reversal_probability, combine_multiplicities, mixing_demo};
use entrobound_core::{
    BoundMode, DensityMatrix, EntropyValue, JointDistribution, MacrostateSpec, MatchMode,
    MeasurementSettings, MutualInfoSource, Subsystem,
};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sizes(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| r.random_range(2..=4)).collect()
}

/// Plain `-Σ p log2 p`, written out independently of the crate.
fn h2(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn keep_sets() -> impl Strategy<Value = Vec<usize>> {
    prop::sample::subsequence(vec![0usize, 1, 2], 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn marginalizing_twice_equals_marginalizing_the_intersection(
        seed in any::<u64>(),
        first in keep_sets(),
        second in keep_sets(),
    ) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, 3);
        let d: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        let once = d.marginalize(&first).unwrap();
        // `second` is expressed in the original labels; map the survivors to
        // their positions inside `once`.
        let inner: Vec<usize> = first
            .iter()
            .enumerate()
            .filter(|(_, v)| second.contains(v))
            .map(|(pos, _)| pos)
            .collect();
        prop_assume!(!inner.is_empty());
        let twice = once.marginalize(&inner).unwrap();
        let direct_keep: Vec<usize> = first.iter().copied().filter(|v| second.contains(v)).collect();
        let direct = d.marginalize(&direct_keep).unwrap();
        prop_assert_eq!(twice.alphabet_sizes(), direct.alphabet_sizes());
        prop_assert!(twice.max_abs_diff(&direct).unwrap() < 1e-12);
        prop_assert!(twice.validate().is_ok());
    }

    #[test]
    fn product_marginal_recovers_factor(seed in any::<u64>(), n1 in 1usize..=2) {
        let mut r = rng(seed);
        let s1 = random_sizes(&mut r, n1);
        let s2 = random_sizes(&mut r, 3 - n1);
        let d1: JointDistribution = mixed_distribution(&mut r, &s1).unwrap();
        let d2: JointDistribution = mixed_distribution(&mut r, &s2).unwrap();
        let p = d1.product(&d2).unwrap();
        let axes: Vec<usize> = (0..n1).collect();
        let back = p.marginalize(&axes).unwrap();
        prop_assert!(back.max_abs_diff(&d1).unwrap() < 1e-12);
        let h = shannon_entropy(&p, BITS).unwrap().value;
        let sum = shannon_entropy(&d1, BITS).unwrap().value + shannon_entropy(&d2, BITS).unwrap().value;
        prop_assert!((h - sum).abs() < TOL);
    }

    #[test]
    fn entropy_between_zero_and_log_alphabet(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, n);
        let d: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        let h = shannon_entropy(&d, BITS).unwrap().value;
        let cells: usize = sizes.iter().product();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (cells as f64).log2() + TOL);
        prop_assert!((h - h2(d.probs())).abs() < 1e-12);
    }

    #[test]
    fn subadditivity_and_mutual_information_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, 2);
        let d: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        let a = d.marginalize(&[0]).unwrap();
        let b = d.marginalize(&[1]).unwrap();
        let hab = shannon_entropy(&d, BITS).unwrap().value;
        let ha = shannon_entropy(&a, BITS).unwrap().value;
        let hb = shannon_entropy(&b, BITS).unwrap().value;
        prop_assert!(hab <= ha + hb + TOL);

        let mi = mutual_entropy(&d, 0, 1, BITS).unwrap();
        prop_assert_eq!(mi.value, mutual_entropy(&d, 1, 0, BITS).unwrap().value);
        let kl = relative_entropy(&d, &a.product(&b).unwrap(), BITS).unwrap();
        let kl = kl.finite().expect("joint is dominated by the product of its marginals");
        prop_assert!((mi.value - kl.value).abs() < TOL);
    }

    #[test]
    fn cerf_adami_absolute_difference_cancels(x in 0.0f64..5.0, y in 0.0f64..5.0) {
        let r = cerf_adami_check(
            EntropyValue::bits(x),
            EntropyValue::bits(x),
            EntropyValue::bits(y),
            1.0,
            MutualInfoSource::PairwiseExperiments,
        )
        .unwrap();
        prop_assert_eq!(r.lhs(), y);
    }

    #[test]
    fn shannon_inequalities_hold_for_any_tripartite(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, 3);
        let d: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        for report in [
            joint_triangle_check(&d).unwrap(),
            two_hb_bound_check(&d).unwrap(),
            narrowed_bound_check(&d).unwrap(),
        ] {
            prop_assert!(report.satisfied(), "{} lhs {} rhs {}", report.name(), report.lhs(), report.rhs());
        }
    }

    #[test]
    fn cerf_adami_holds_for_binary_tripartites(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d: JointDistribution = mixed_distribution(&mut r, &[2, 2, 2]).unwrap();
        for report in cerf_adami_all_forms(&d, BoundMode::Unit).unwrap() {
            prop_assert!(report.lhs() <= 1.0 + TOL);
        }
    }

    #[test]
    fn mixing_entropy_is_nonnegative(seed in any::<u64>(), k in 2usize..=4, identical in any::<bool>()) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, 1);
        let first: JointDistribution = dense_distribution(&mut r, &sizes).unwrap();
        let comps: Vec<JointDistribution> = (0..k)
            .map(|_| if identical { first.clone() } else { dense_distribution(&mut r, &sizes).unwrap() })
            .collect();
        let w: Vec<f64> = entrobound_core::sampling::dirichlet(&mut r, k, 1.0);
        let before: Vec<(f64, &JointDistribution)> = w.iter().copied().zip(comps.iter()).collect();
        let after = mixture(&before).unwrap();
        let m = mixing_entropy(&before, &after, BITS).unwrap().value;
        prop_assert!(m >= 0.0);
        if identical {
            prop_assert!(m <= TOL);
        }
    }

    #[test]
    fn boltzmann_entropy_is_additive(a in 1u128..1_000_000_000, b in 1u128..1_000_000_000) {
        let ma = MacrostateSpec::new("a", a).unwrap();
        let mb = MacrostateSpec::new("b", b).unwrap();
        let both = combine_multiplicities(&ma, &mb).unwrap();
        prop_assert_eq!(both.multiplicity, a * b);
        let sum = ma.entropy::<f64>().unwrap().value + mb.entropy::<f64>().unwrap().value;
        prop_assert!((both.entropy::<f64>().unwrap().value - sum).abs() < 1e-12 * sum.max(1.0));
    }

    #[test]
    fn mixing_demo_is_monotone_in_first_species(n_a in 1u64..30, n_b in 1u64..30) {
        let lo = mixing_demo::<f64>(n_a, n_b, false).unwrap().value;
        let hi = mixing_demo::<f64>(n_a + 1, n_b, false).unwrap().value;
        prop_assert!(lo >= 0.0);
        prop_assert!(hi >= lo);
        prop_assert_eq!(mixing_demo::<f64>(n_a, n_b, true).unwrap().value, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3);
        let sizes = random_sizes(&mut r, n);
        let p: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        let q: JointDistribution = mixed_distribution(&mut r, &sizes).unwrap();
        let kl = relative_entropy(&p, &q, BITS).unwrap();
        if let Some(v) = kl.finite() {
            prop_assert!(v.value >= 0.0);
        } else {
            let escapes = p.probs().iter().zip(q.probs()).any(|(&a, &b)| a > 0.0 && b == 0.0);
            prop_assert!(escapes);
        }
    }

    #[test]
    fn markov_constructions_satisfy_chain_properties(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes = [r.random_range(2..=4), r.random_range(2..=4), r.random_range(2..=4)];
        let spec = markov_spec::<f64, _>(&mut r, sizes).unwrap();
        let d = spec.build_tripartite().unwrap();
        prop_assert!(is_markov(&d, [0, 1, 2]).unwrap());
        prop_assert!(is_markov(&d, [2, 1, 0]).unwrap());
        prop_assert!(triangle_check(&d).unwrap().satisfied());
        for report in dpi_check(&d, true).unwrap() {
            prop_assert!(report.satisfied(), "{}", report.name());
        }
    }
}

// ---- quantum ----

/// `ρ_A = M M†` for the 2×2 amplitude matrix `M`; its eigenvalues are
/// `(1 ± sqrt(1 − 4 det ρ_A)) / 2` with `det ρ_A = |det M|²`.
fn schmidt_rank(amps: &[Complex<f64>]) -> usize {
    let det = amps[0] * amps[3] - amps[1] * amps[2];
    let d = det.norm_sqr();
    let small = (1.0 - (1.0 - 4.0 * d).max(0.0).sqrt()) / 2.0;
    if small > 1e-9 {
        2
    } else {
        1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pure_states_have_zero_entropy_and_entanglement_matches_schmidt_rank(
        seed in any::<u64>(),
        product in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let (rho, amps) = random_pure_two_qubit::<f64, _>(&mut r, product).unwrap();
        prop_assert!(von_neumann_entropy(&rho, BITS).unwrap().value.abs() < TOL);
        prop_assert_eq!(is_entangled_pure(&rho).unwrap(), schmidt_rank(&amps) > 1);
        if product {
            prop_assert_eq!(schmidt_rank(&amps), 1);
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (pure, _) = random_pure_two_qubit::<f64, _>(&mut r, false).unwrap();
        let p = r.random_range(0.0..1.0);
        let rho = DensityMatrix::new(
            2,
            2,
            pure.matrix().scale(p).add(&DensityMatrix::maximally_mixed(2, 2).unwrap().matrix().scale(1.0 - p)),
        )
        .unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(&rho, keep).unwrap();
            prop_assert!((red.matrix().trace().re - 1.0).abs() < 1e-14);
            prop_assert!(red.matrix().trace().im.abs() < 1e-14);
            prop_assert!(red.matrix().hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn diagonal_states_reduce_to_shannon(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d: JointDistribution = mixed_distribution(&mut r, &[2, 2]).unwrap();
        let rho = DensityMatrix::diagonal(2, 2, d.probs()).unwrap();
        let s = von_neumann_entropy(&rho, BITS).unwrap().value;
        prop_assert!((s - h2(d.probs())).abs() < 1e-12);
    }

    #[test]
    fn singlet_statistics_match_closed_form(a1 in -10.0f64..10.0, a2 in -10.0f64..10.0) {
        let d = measure_pair(&DensityMatrix::singlet(), a1, a2).unwrap();
        let c = (a1 - a2).cos();
        for (k, signs) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].iter().enumerate() {
            let expected = 0.25 * (1.0 - signs.0 * signs.1 * c);
            prop_assert!((d.probs()[k] - expected).abs() < TOL);
        }
    }

    #[test]
    fn product_states_never_violate(seed in any::<u64>(), angles in prop::array::uniform3(0.0f64..std::f64::consts::PI)) {
        let mut r = rng(seed);
        let (rho, _) = random_pure_two_qubit::<f64, _>(&mut r, true).unwrap();
        let report = cerf_adami_quantum(&rho, &MeasurementSettings::new(angles).unwrap()).unwrap();
        prop_assert!(report.lhs() <= 1.0 + TOL);
    }
}

#[test]
fn coin_probability_is_exact_power_of_two() {
    for n in 1..=50u32 {
        let p: f64 = coin_reversal_probability(n, MatchMode::Ordered).unwrap();
        assert_eq!(p, 2f64.powi(-(n as i32)), "n = {n}");
    }
}
