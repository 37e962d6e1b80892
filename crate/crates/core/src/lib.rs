//! Desk-scale computations around gaps and oscillations in sequences of
//! primes: segmented sieving in arithmetic progressions, density profiles
//! and density verification, turning angles and total curvature of the
//! log-prime polygon, singular products with rigorous truncation bounds,
//! and exact censuses of near-progression prime triples.
//!
//! Everything is deterministic: parallel work is split into fixed blocks
//! and reduced in ascending order, so results are bit-identical for every
//! worker count.

pub mod census;
pub mod curvature;
pub mod density;
pub mod error;
pub mod numeric;
pub mod primes;
pub mod singular;

pub use census::{
    census_ratio, census_reference_bound, count_near_progressions, exception_partition,
    oscillation_set, CensusCount, CensusQuery, CensusRatio, ExceptionPartition, OscillationParams,
    OscillationSet,
};
pub use curvature::{
    bounded_ratio_check, curvature, delta_sum, gamma, renyi_identity_holds, second_difference,
    sign_changes, telescoping_bound, trip_sign, turning_angle, BoundedRatio, CurvatureSeries,
    DeltaSum, Rational, SignChanges, TripleStats,
};
pub use density::{
    scattered_boundary, scattered_levels, scattered_sequence, scattered_thresholds,
    CrudeBoundsReport, CrudeViolation, DenseSubset, DensityProfile, DensityViolation,
    GrowthBoundsReport, ProfileKind, Scattered, ScatteredBoundary, ScatteredLevel,
};
pub use error::{Error, Result};
pub use numeric::{fmt_f64, KahanSum};
pub use primes::{
    count_in_range, euler_phi, first_in_range, is_prime_u64, last_in_range, pi_qa,
    primes_in_progression, progression_with_len, sieve_range, sieve_range_cached, sieve_range_with,
    PrimeSequence, Progression, DEFAULT_SEGMENT_LEN,
};
pub use singular::{
    a_coeff, a_multiplicative, local_factor, nu, series_tail_bound, singular_average,
    singular_average_with, singular_product, singular_series_via_series, t_count, AverageResult,
    OffsetPair, SingularEngine, SingularValue, DEFAULT_TRUNCATION_PRIME,
};
