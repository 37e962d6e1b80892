//! Density verification against brute-force recounting, growth bound
//! behavior, and the scattered construction at small depth.

use primecurve::{
    pi_qa, primes_in_progression, scattered_boundary, scattered_levels, scattered_sequence,
    DenseSubset, DensityProfile, PrimeSequence, ProfileKind, Progression,
};
use proptest::prelude::*;

fn all_primes_to(x: u64) -> PrimeSequence {
    primes_in_progression(Progression::all_primes(), x).unwrap()
}

/// Brute-force density check at EVERY integer x, not just parent primes.
/// Confirms that sampling at parent primes loses nothing: both sides of the
/// inequality step only there.
fn oracle_violations(
    subset: &PrimeSequence,
    parent: &PrimeSequence,
    profile: &DensityProfile,
    x_max: u64,
) -> Vec<u64> {
    let mut out = Vec::new();
    for x in 3..=x_max {
        if (x as f64) < profile.x0 {
            continue;
        }
        let have = subset.count_leq(x) as f64;
        let pi = parent.count_leq(x) as f64;
        if have < profile.delta_at(x as f64).unwrap() * pi {
            out.push(x);
        }
    }
    out
}

#[test]
fn every_other_prime_is_04_dense() {
    let parent = all_primes_to(10_000);
    let every_other: Vec<u64> = parent.as_slice().iter().copied().step_by(2).collect();
    let subset = PrimeSequence::from_parts(Progression::all_primes(), every_other, 10_000).unwrap();
    let profile = DensityProfile::constant(0.4, 10.0).unwrap();
    let dense = DenseSubset::new(subset.clone(), parent.clone(), profile.clone()).unwrap();

    let sampled = dense.check_delta_dense(10_000).unwrap();
    assert!(sampled.is_empty(), "violations: {sampled:?}");

    let brute = oracle_violations(&subset, &parent, &profile, 10_000);
    assert!(brute.is_empty(), "oracle found violations: {brute:?}");
}

#[test]
fn prime_sampling_equals_integer_sampling() {
    // A subset engineered to fail: keep only every fifth prime, demand 0.4.
    let parent = all_primes_to(2_000);
    let sparse: Vec<u64> = parent.as_slice().iter().copied().step_by(5).collect();
    let subset = PrimeSequence::from_parts(Progression::all_primes(), sparse, 2_000).unwrap();
    let profile = DensityProfile::constant(0.4, 10.0).unwrap();
    let dense = DenseSubset::new(subset.clone(), parent.clone(), profile.clone()).unwrap();

    let sampled: Vec<u64> = dense
        .check_delta_dense(2_000)
        .unwrap()
        .iter()
        .map(|v| v.x)
        .collect();
    assert!(!sampled.is_empty());
    let brute = oracle_violations(&subset, &parent, &profile, 2_000);
    // Every integer violation belongs to the half-open run starting at the
    // parent prime the sampler reports: counts change only at parent primes.
    for x in &brute {
        let covering = sampled.iter().rev().find(|&&s| s <= *x);
        assert!(covering.is_some(), "integer violation at {x} not covered");
    }
    // And every sampled violation is itself an integer violation.
    for s in &sampled {
        assert!(brute.contains(s), "sampled {s} not confirmed by oracle");
    }
}

#[test]
fn growth_bound_values_at_small_indices() {
    // p_100 = 541 sits between (3/4) * 100 log 100 and 2 * 100 log 100.
    let lower100 = 0.75 * 100.0 * 100f64.ln();
    let upper100 = 2.0 * 100.0 * 100f64.ln();
    assert!((lower100 - 345.3877639491069).abs() < 1e-10);
    assert!((upper100 - 921.0340371976183).abs() < 1e-10);
    assert!(lower100 <= 541.0 && 541.0 <= upper100);
    // p_4 = 7 clears the lower bound (3/4) * 4 log 4.
    let lower4 = 0.75 * 4.0 * 4f64.ln();
    assert!((lower4 - 4.1588830833596715).abs() < 1e-12);
    assert!(lower4 <= 7.0);
    let parent = all_primes_to(1000);
    let dense = DenseSubset::whole(parent, DensityProfile::constant(1.0, 3.0).unwrap()).unwrap();
    let report = dense.growth_bounds_check(4, 100).unwrap();
    assert!(!report.violations.iter().any(|v| v.n == 4 || v.n == 100));
}

#[test]
fn scattered_ratios_blow_up_at_block_boundaries() {
    // p_2m / p_m spans an inter-interval gap for suitable m; the maximum is
    // recorded, never asserted against a constant, since it grows like the
    // interval recursion.
    let sc = scattered_sequence(4).unwrap();
    let ratio = primecurve::bounded_ratio_check(&sc.sequence, sc.sequence.len() / 2).unwrap();
    assert!(ratio.max_ratio > 2.0, "boundary jump missing: {ratio:?}");
    let all = all_primes_to(100_000);
    let dense_ratio = primecurve::bounded_ratio_check(&all, all.len() / 2).unwrap();
    assert!(ratio.max_ratio > dense_ratio.max_ratio);
}

#[test]
fn growth_bounds_hold_from_small_n_for_all_primes() {
    let parent = all_primes_to(2_000_000);
    let dense = DenseSubset::whole(parent, DensityProfile::constant(1.0, 3.0).unwrap()).unwrap();
    let n_max = dense.subset().len();
    let report = dense.growth_bounds_check(1, n_max).unwrap();
    // p_100 = 541 sits inside [345.39, 921.03].
    assert!(report.violations.iter().all(|v| v.n < 100));
    assert!(report.lower_holds_from.unwrap() <= 10);
    let upper_from = report.upper_holds_from.unwrap();
    assert!(upper_from <= 100, "upper bound settles by n={upper_from}");
}

#[test]
fn density_floor_examples() {
    let parent = all_primes_to(200_000);
    let constant =
        DenseSubset::whole(parent.clone(), DensityProfile::constant(0.7, 3.0).unwrap()).unwrap();
    // Constant profiles satisfy the floor trivially.
    for n in [3usize, 10, 1000, 10_000] {
        assert!(constant.density_floor_check(n).unwrap());
    }
    let recip = DenseSubset::whole(parent, DensityProfile::reciprocal_log(3.0).unwrap()).unwrap();
    assert!(recip.density_floor_check(10_000).unwrap());
}

#[test]
fn scattered_depth_four_against_plain_sieve() {
    let sc = scattered_sequence(4).unwrap();
    // Frozen from an independent run: counts per interval and parities.
    let counts: Vec<(u64, u64, Option<u64>)> = sc
        .levels
        .iter()
        .map(|l| (l.prime_count, l.kept_count, l.dropped))
        .collect();
    assert_eq!(
        counts,
        vec![
            (8, 8, None),
            (41, 40, Some(79)),
            (326, 326, None),
            (3936, 3936, None),
        ]
    );
    for level in &sc.levels {
        assert_eq!(level.kept_count % 2, 0);
        // Cross-check the count against an independent progression sieve.
        let direct = primes_in_progression(Progression::all_primes(), level.hi)
            .unwrap()
            .as_slice()
            .iter()
            .filter(|&&p| p >= level.lo)
            .count() as u64;
        assert_eq!(direct, level.prime_count, "level {}", level.l);
    }
    assert_eq!(sc.sequence.len() as u64, 8 + 40 + 326 + 3936);
}

#[test]
fn scattered_is_reciprocal_log_dense_at_small_depth() {
    let sc = scattered_sequence(4).unwrap();
    let parent = all_primes_to(sc.sequence.limit());
    let profile = DensityProfile::reciprocal_log(17.0).unwrap();
    let dense = DenseSubset::new(sc.sequence.clone(), parent, profile).unwrap();
    let violations = dense.check_delta_dense(sc.sequence.limit()).unwrap();
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn scattered_boundaries_track_interval_jumps() {
    let levels = scattered_levels(4).unwrap();
    for l in 1..=3 {
        let b = scattered_boundary(&levels, l).unwrap();
        // The second difference at a boundary spans the inter-interval gap,
        // so it dwarfs log N from level 2 on.
        assert!(b.delta_2n < 0);
        assert!(b.ratio > b.quarter_log_n, "level {l}: {b:?}");
    }
    let b2 = scattered_boundary(&levels, 2).unwrap();
    assert_eq!(b2.n, 24);
    assert_eq!((b2.q_2n, b2.q_2n_plus_1, b2.q_2n_plus_2), (293, 853, 857));
}

#[test]
fn pi_qa_feeds_density_requirement() {
    // Sanity link between modules: the density requirement at x equals
    // delta(x) * pi(x; q, a).
    let prog = Progression::new(4, 1).unwrap();
    let parent = primes_in_progression(prog, 10_000).unwrap();
    let dense = DenseSubset::whole(parent, DensityProfile::constant(1.0, 3.0).unwrap()).unwrap();
    assert!(dense.check_delta_dense(10_000).unwrap().is_empty());
    assert_eq!(pi_qa(10_000, prog).unwrap() as usize, dense.subset().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profiles_are_non_increasing_and_floored(
        kind in 0usize..3,
        c in 0.2f64..1.0,
        beta in 0.0f64..0.45,
        x1 in 3.0f64..1e9,
        factor in 1.0f64..1e3,
    ) {
        let profile = match kind {
            0 => DensityProfile::constant(c, 3.0).unwrap(),
            1 => DensityProfile::reciprocal_log(3.0).unwrap(),
            _ => {
                let ln3 = 3f64.ln();
                // Scale c into the admissible band for this beta.
                let c_ok = ln3.powf(beta - 1.0) + c * (ln3.powf(beta) - ln3.powf(beta - 1.0));
                DensityProfile::power_log(c_ok, beta, 3.0).unwrap()
            }
        };
        let x2 = x1 * factor;
        let d1 = profile.delta_at(x1).unwrap();
        let d2 = profile.delta_at(x2).unwrap();
        prop_assert!(d1 >= d2, "{profile:?} not monotone: {d1} < {d2}");
        prop_assert!(d1 > 0.0 && d1 <= 1.0);
        // The 1/log x floor applies to the decaying families.
        if !matches!(profile.kind, ProfileKind::Constant { .. }) {
            prop_assert!(d1 * x1.ln() >= 1.0 - 1e-12);
            prop_assert!(d2 * x2.ln() >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn crude_bounds_settle_quickly_for_all_primes() {
    let parent = all_primes_to(200_000);
    let dense = DenseSubset::whole(parent, DensityProfile::constant(1.0, 3.0).unwrap()).unwrap();
    let n_max = dense.subset().len();
    let report = dense.crude_bounds_check(1, n_max).unwrap();
    // n = 1: p_1 = 2 > 1 = n^2 and 2 log 1 = 0 < 1; guaranteed violation.
    assert_eq!(report.violations.first().map(|v| v.n), Some(1));
    let from = report.holds_from.expect("bounds settle");
    assert!(from <= 3, "crude bounds settle by n = {from}");
    // With the reciprocal-log profile the delta condition becomes
    // log p_n <= 2 log n, the same as p_n <= n^2.
    let parent = all_primes_to(200_000);
    let recip = DenseSubset::whole(parent, DensityProfile::reciprocal_log(3.0).unwrap()).unwrap();
    let r = recip.crude_bounds_check(2, n_max).unwrap();
    for v in &r.violations {
        assert!(v.p_n > (v.n as u64) * (v.n as u64) || v.delta_inv > v.two_log_n);
    }
}
