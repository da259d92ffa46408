use proptest::prelude::*;
use shuffled_core::*;

fn moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

proptest! {
    #[test]
    fn permute_then_inverse_is_identity(n in 2usize..40, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let h = match (frac * n as f64).round() as usize { 1 => 2, h => h };
        let perm = sample_permutation_with_hamming_weight(n, h, seed).unwrap();
        prop_assert_eq!(perm.displaced(), h);
        let m = sample_design_matrix::<f64>(n, 3, DistributionKind::Uniform, seed ^ 1).unwrap();
        let back = perm.inverse().apply(&perm.apply(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
        prop_assert!(perm.compose(&perm.inverse()).unwrap().is_identity());
    }
}

#[test]
fn design_moments() {
    let n = 100_000;
    for (dist, var) in
        [(DistributionKind::Gaussian, 1.0), (DistributionKind::Uniform, 1.0 / 3.0), (DistributionKind::Rademacher, 1.0)]
    {
        let x = sample_design_matrix::<f64>(n, 1, dist, 99).unwrap().into_vec();
        let (mean, sample_var) = moments(&x);
        assert!(mean.abs() < 5.0 * (var / n as f64).sqrt(), "{dist:?} mean {mean}");
        // generous: the fourth moment is at most 3σ⁴ for all three
        assert!((sample_var - var).abs() < 5.0 * var * (2.0 / n as f64).sqrt(), "{dist:?} var {sample_var}");
        let scaled = sample_design_matrix_with::<f64>(n, 1, dist, 99, true).unwrap().into_vec();
        let (_, unit) = moments(&scaled);
        assert!((unit - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt());
    }
    let r = sample_design_matrix::<f64>(1000, 1, DistributionKind::Rademacher, 1).unwrap();
    assert!(r.as_slice().iter().all(|v| v.abs() == 1.0));
}

#[test]
fn noise_has_requested_level() {
    let b = build_canonical_signal(4, 4, 1.0).unwrap();
    let inst = synthesize_instance(5000, 4, 4, 100, DistributionKind::Gaussian, &b, 0.5, 3).unwrap();
    let w = inst.y.sub(&inst.clean_signal()).unwrap().into_vec();
    let (mean, var) = moments(&w);
    assert!(mean.abs() < 0.02);
    assert!((var - 0.25).abs() < 5.0 * 0.25 * (2.0 / w.len() as f64).sqrt());
}

#[test]
fn synthesis_is_deterministic_and_seed_sensitive() {
    let b = build_canonical_signal(3, 2, 2.0).unwrap();
    let make = |seed| synthesize_instance(50, 3, 2, 20, DistributionKind::Gaussian, &b, 0.1, seed).unwrap();
    let (a, a2, c) = (make(8), make(8), make(9));
    assert_eq!(a.y, a2.y);
    assert_eq!(a.perm_true, a2.perm_true);
    assert_ne!(a.x, c.x);
    assert_eq!(a.perm_true.displaced(), 20);
    assert_eq!(a.h, 20);
}

#[test]
fn noiseless_instance_is_exact() {
    let b = build_canonical_signal(3, 3, 1.0).unwrap();
    let inst = synthesize_instance(30, 3, 3, 10, DistributionKind::Rademacher, &b, 0.0, 4).unwrap();
    assert_eq!(inst.y, inst.clean_signal());
}

#[test]
fn invalid_requests() {
    assert!(sample_permutation_with_hamming_weight(10, 1, 0).is_err());
    assert!(sample_permutation_with_hamming_weight(10, 11, 0).is_err());
    assert!(build_canonical_signal::<f64>(0, 2, 1.0).is_err());
    let b = build_canonical_signal(3, 2, 1.0).unwrap();
    assert!(synthesize_instance(10, 2, 2, 0, DistributionKind::Gaussian, &b, 0.0, 0).is_err());
    assert!(synthesize_instance(10, 3, 2, 0, DistributionKind::Gaussian, &b, -1.0, 0).is_err());
}
