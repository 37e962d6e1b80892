//! Sieve output checked against an independent trial-division oracle, plus
//! determinism across segment sizes and worker counts.

use primecurve::{
    count_in_range, pi_qa, primes_in_progression, sieve_range, sieve_range_cached,
    sieve_range_with, Error, PrimeSequence, Progression,
};
use proptest::prelude::*;

fn trial_division_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi)
        .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

#[test]
fn sieve_matches_trial_division_on_small_windows() {
    assert_eq!(
        sieve_range(10, 40).unwrap(),
        vec![11, 13, 17, 19, 23, 29, 31, 37]
    );
    for (lo, hi) in [(2, 3000), (9_973, 10_500), (1, 2), (500, 500)] {
        assert_eq!(
            sieve_range(lo, hi).unwrap(),
            trial_division_primes(lo, hi),
            "window [{lo}, {hi}]"
        );
    }
}

#[test]
fn segment_size_never_changes_output() {
    let reference = sieve_range(2, 100_000).unwrap();
    for seg in [64, 1009, 4096, 1 << 20] {
        assert_eq!(sieve_range_with(2, 100_000, seg).unwrap(), reference);
    }
    // A window that straddles many tiny segments.
    let reference = sieve_range(1_000_000, 1_050_000).unwrap();
    assert_eq!(
        sieve_range_with(1_000_000, 1_050_000, 64).unwrap(),
        reference
    );
}

#[test]
fn worker_count_never_changes_output() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sieve_range_with(2, 2_000_000, 1 << 14).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(8));
}

#[test]
fn progression_membership_examples() {
    let all = primes_in_progression(Progression::all_primes(), 10).unwrap();
    assert_eq!(all.as_slice(), &[2, 3, 5, 7]);

    let q4a1 = primes_in_progression(Progression::new(4, 1).unwrap(), 30).unwrap();
    assert_eq!(q4a1.as_slice(), &[5, 13, 17, 29]);
    assert_eq!(q4a1.nth(2).unwrap(), 13);

    let q4a3 = primes_in_progression(Progression::new(4, 3).unwrap(), 30).unwrap();
    assert_eq!(q4a3.as_slice(), &[3, 7, 11, 19, 23]);
}

#[test]
fn pi_qa_examples_and_agreement_with_enumeration() {
    assert_eq!(pi_qa(100, Progression::all_primes()).unwrap(), 25);
    assert_eq!(pi_qa(100, Progression::new(4, 1).unwrap()).unwrap(), 11);
    assert_eq!(pi_qa(2, Progression::new(3, 1).unwrap()).unwrap(), 0);
    for (q, a, x) in [
        (1u64, 1u64, 5000u64),
        (4, 1, 5000),
        (4, 3, 5000),
        (12, 7, 9999),
    ] {
        let prog = Progression::new(q, a).unwrap();
        assert_eq!(
            pi_qa(x, prog).unwrap() as usize,
            primes_in_progression(prog, x).unwrap().len(),
            "q={q} a={a} x={x}"
        );
    }
}

#[test]
fn residues_partition_the_primes() {
    for q in [2u64, 4, 6, 12] {
        let x = 2000;
        let mut union: Vec<u64> = (1..=q)
            .filter(|&a| num_integer::gcd(a, q) == 1)
            .flat_map(|a| {
                primes_in_progression(Progression::new(q, a).unwrap(), x)
                    .unwrap()
                    .as_slice()
                    .to_vec()
            })
            .collect();
        // Primes dividing q fall in no reduced class.
        union.extend(
            sieve_range(2, q)
                .unwrap()
                .into_iter()
                .filter(|&p| q % p == 0),
        );
        union.sort_unstable();
        assert_eq!(union, sieve_range(2, x).unwrap(), "q={q}");
    }
}

#[test]
fn nth_prime_oracle_values() {
    let seq = primes_in_progression(Progression::all_primes(), 1000).unwrap();
    assert_eq!(seq.nth(4).unwrap(), 7);
    assert_eq!(seq.nth(100).unwrap(), 541);
}

#[test]
fn count_in_range_agrees_with_materialization() {
    for (lo, hi) in [(2u64, 10u64), (10, 40), (24, 28), (2, 123_456)] {
        assert_eq!(
            count_in_range(lo, hi).unwrap(),
            sieve_range(lo, hi).unwrap().len() as u64
        );
    }
}

#[test]
fn cache_round_trip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = sieve_range_cached(10, 5000, Some(dir.path())).unwrap();
    assert_eq!(fresh, sieve_range(10, 5000).unwrap());
    // Second call must hit the file and agree bit for bit.
    let cached = sieve_range_cached(10, 5000, Some(dir.path())).unwrap();
    assert_eq!(fresh, cached);

    // A truncated file is rejected, not silently accepted.
    let path = dir.path().join("primes_10_5000.seg");
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(sieve_range_cached(10, 5000, Some(dir.path())).is_err());

    // Garbage magic is rejected.
    std::fs::write(&path, b"garbagegarbagegarbage").unwrap();
    match sieve_range_cached(10, 5000, Some(dir.path())) {
        Err(Error::Format(_)) => {}
        other => panic!("expected format error, got {other:?}"),
    }
}

#[test]
fn sequence_file_loading_validates_entries() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("subset.txt");
    std::fs::write(&good, "# comment\n5\n13\n17\n").unwrap();
    let seq = PrimeSequence::from_file(&good, Progression::new(4, 1).unwrap()).unwrap();
    assert_eq!(seq.as_slice(), &[5, 13, 17]);
    assert_eq!(seq.limit(), 17);

    let composite = dir.path().join("composite.txt");
    std::fs::write(&composite, "5\n13\n15\n").unwrap();
    assert!(PrimeSequence::from_file(&composite, Progression::new(4, 1).unwrap()).is_err());

    let unordered = dir.path().join("unordered.txt");
    std::fs::write(&unordered, "13\n5\n").unwrap();
    assert!(PrimeSequence::from_file(&unordered, Progression::new(4, 1).unwrap()).is_err());

    let wrong_class = dir.path().join("wrong_class.txt");
    std::fs::write(&wrong_class, "5\n7\n").unwrap();
    assert!(PrimeSequence::from_file(&wrong_class, Progression::new(4, 1).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sieve_window_matches_oracle(lo in 0u64..5000, len in 0u64..400) {
        let hi = lo + len;
        prop_assert_eq!(sieve_range(lo, hi).unwrap(), trial_division_primes(lo, hi));
    }

    #[test]
    fn pi_equals_sequence_length(x in 2u64..3000, q in 1u64..20, a in 1u64..20) {
        prop_assume!(a <= q && num_integer::gcd(a, q) == 1);
        let prog = Progression::new(q, a).unwrap();
        prop_assert_eq!(
            pi_qa(x, prog).unwrap() as usize,
            primes_in_progression(prog, x).unwrap().len()
        );
    }
}
