//! Turning angles, total curvature, second differences, and the bookkeeping
//! around the sequence p_{n+1}^2 - p_n p_{n+2}.
//!
//! The polygonal line through the points (n, log p_n) turns at each interior
//! vertex by
//!
//!   k_n = | arctan log(p_{n+2}/p_{n+1}) - arctan log(p_{n+1}/p_n) |,
//!
//! and K_N = k_1 + ... + k_{N-2} is the total curvature truncated at N. The
//! arctan difference is the canonical value; the same angle computed as the
//! argument of the quotient of the two edge vectors serves as a cross-check
//! and the two must agree to 1e-12.
//!
//! Exact quantities (second difference, the gap product Gamma_n, and the
//! identity tying them to p_n p_{n+2} / p_{n+1}^2) are kept in integer and
//! rational arithmetic so identity checks carry no tolerance at all.

use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::density::DensityProfile;
use crate::error::{Error, Result};
use crate::numeric::{fmt_f64, KahanSum};
use crate::primes::PrimeSequence;

/// Exact rational with 128-bit components, wide enough for every desk-scale
/// identity here.
pub type Rational = Ratio<i128>;

/// Tolerance for the agreement of the two turning-angle forms.
pub const ANGLE_FORM_TOLERANCE: f64 = 1e-12;

fn check_ascending(p: u64, p1: u64, p2: u64) -> Result<()> {
    if !(p < p1 && p1 < p2) {
        return Err(Error::usage(format!(
            "triple ({p}, {p1}, {p2}) is not strictly ascending"
        )));
    }
    Ok(())
}

/// Second difference p'' - 2 p' + p.
pub fn second_difference(p: u64, p1: u64, p2: u64) -> Result<i64> {
    check_ascending(p, p1, p2)?;
    Ok(p2 as i64 - 2 * p1 as i64 + p as i64)
}

/// Gamma = (p'' - p')(p' - p) / p'^2 as an exact rational.
pub fn gamma(p: u64, p1: u64, p2: u64) -> Result<Rational> {
    check_ascending(p, p1, p2)?;
    let num = (p2 - p1) as i128 * (p1 - p) as i128;
    Ok(Rational::new(num, (p1 as i128) * (p1 as i128)))
}

/// Verify p'' p / p'^2 = 1 + Delta/p' - Gamma in exact rational arithmetic.
pub fn renyi_identity_holds(p: u64, p1: u64, p2: u64) -> Result<bool> {
    check_ascending(p, p1, p2)?;
    let lhs = Rational::new(p2 as i128 * p as i128, p1 as i128 * p1 as i128);
    let delta = Rational::new(second_difference(p, p1, p2)? as i128, p1 as i128);
    let rhs = Rational::from_integer(1) + delta - gamma(p, p1, p2)?;
    Ok(lhs == rhs)
}

/// Sign of p'^2 - p p'': +1, 0, or -1. Zero demands p'^2 = p p'', impossible
/// for a triple of distinct primes but reachable for surrogate inputs.
pub fn trip_sign(p: u64, p1: u64, p2: u64) -> Result<i8> {
    check_ascending(p, p1, p2)?;
    let v = (p1 as i128) * (p1 as i128) - (p as i128) * (p2 as i128);
    Ok(v.signum() as i8)
}

/// Turning angle at the middle vertex, in radians.
pub fn turning_angle(p: u64, p1: u64, p2: u64) -> Result<f64> {
    check_ascending(p, p1, p2)?;
    let u = (p2 as f64 / p1 as f64).ln();
    let v = (p1 as f64 / p as f64).ln();
    let arctan_form = (u.atan() - v.atan()).abs();
    // Edge vectors are 1 + iu and 1 + iv; the argument of their quotient is
    // atan2(u - v, 1 + uv).
    let arg_form = (u - v).atan2(1.0 + u * v).abs();
    if (arctan_form - arg_form).abs() > ANGLE_FORM_TOLERANCE {
        return Err(Error::Numerics(format!(
            "angle forms disagree at ({p}, {p1}, {p2}): {arctan_form} vs {arg_form}"
        )));
    }
    Ok(arctan_form)
}

/// Per-triple record at index n (1-based): the triple starts at p_n.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleStats {
    pub n: usize,
    pub p_n: u64,
    pub delta: i64,
    pub gamma: Rational,
    pub angle: f64,
    pub trip_sign: i8,
}

/// All triple statistics of a sequence plus prefix curvature. Row i holds the
/// triple starting at index i + 1 and the prefix K_{i+3} through that row.
#[derive(Debug, Clone)]
pub struct CurvatureSeries {
    stats: Vec<TripleStats>,
    prefix: Vec<f64>,
}

impl CurvatureSeries {
    /// Compute every triple, in parallel over disjoint index blocks; the
    /// prefix sums are then accumulated sequentially in ascending order.
    pub fn compute(seq: &PrimeSequence) -> Result<Self> {
        let primes = seq.as_slice();
        if primes.len() < 3 {
            return Err(Error::usage(format!(
                "need at least 3 primes, have {}",
                primes.len()
            )));
        }
        let stats: Vec<TripleStats> = primes
            .par_windows(3)
            .enumerate()
            .map(|(i, w)| {
                let (p, p1, p2) = (w[0], w[1], w[2]);
                Ok(TripleStats {
                    n: i + 1,
                    p_n: p,
                    delta: second_difference(p, p1, p2)?,
                    gamma: gamma(p, p1, p2)?,
                    angle: turning_angle(p, p1, p2)?,
                    trip_sign: trip_sign(p, p1, p2)?,
                })
            })
            .collect::<Result<_>>()?;
        let mut acc = KahanSum::new();
        let prefix = stats
            .iter()
            .map(|s| {
                acc.add(s.angle);
                acc.value()
            })
            .collect();
        Ok(CurvatureSeries { stats, prefix })
    }

    pub fn stats(&self) -> &[TripleStats] {
        &self.stats
    }

    /// K_N, valid for 3 <= N <= len + 2.
    pub fn curvature_at(&self, n: usize) -> Result<f64> {
        if n < 3 || n > self.stats.len() + 2 {
            return Err(Error::usage(format!(
                "K_N defined for 3 <= N <= {}, got {n}",
                self.stats.len() + 2
            )));
        }
        Ok(self.prefix[n - 3])
    }

    /// CSV export: n, p_n, delta_n, gamma_num, gamma_den, k_n, trip_sign,
    /// K_n_prefix.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(
            out,
            "n,p_n,delta_n,gamma_num,gamma_den,k_n,trip_sign,K_n_prefix"
        )?;
        for (s, k) in self.stats.iter().zip(&self.prefix) {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.n,
                s.p_n,
                s.delta,
                s.gamma.numer(),
                s.gamma.denom(),
                fmt_f64(s.angle),
                s.trip_sign,
                fmt_f64(*k)
            )?;
        }
        Ok(())
    }
}

/// K_N = sum of the first N - 2 turning angles, in fixed ascending order with
/// compensated summation.
pub fn curvature(seq: &PrimeSequence, n: usize) -> Result<f64> {
    let primes = seq.as_slice();
    if n < 3 || n > primes.len() {
        return Err(Error::usage(format!(
            "curvature needs 3 <= N <= {}, got {n}",
            primes.len()
        )));
    }
    let mut acc = KahanSum::new();
    for w in primes[..n].windows(3) {
        acc.add(turning_angle(w[0], w[1], w[2])?);
    }
    Ok(acc.value())
}

/// Sign-change positions of p_{n+1}^2 - p_n p_{n+2} up to index N.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChanges {
    pub count: usize,
    /// Indices n where the sign differs from the sign at the next index with
    /// nonzero sign. Zeros are skipped, never counted as changes.
    pub positions: Vec<usize>,
}

/// Core of the sign-change count, shared with tests that inject zeros.
fn change_positions(signs: impl IntoIterator<Item = i8>) -> Vec<usize> {
    let mut positions = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (i, s) in signs.into_iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some((pos, prev)) = last {
            if prev != s {
                positions.push(pos + 1);
            }
        }
        last = Some((i, s));
    }
    positions
}

/// Count sign changes among s_1 .. s_N.
pub fn sign_changes(seq: &PrimeSequence, n: usize) -> Result<SignChanges> {
    let primes = seq.as_slice();
    if n + 2 > primes.len() {
        return Err(Error::usage(format!(
            "sign_changes needs N + 2 <= {}, got N = {n}",
            primes.len()
        )));
    }
    let signs: Vec<i8> = primes[..n + 2]
        .par_windows(3)
        .map(|w| trip_sign(w[0], w[1], w[2]))
        .collect::<Result<_>>()?;
    let positions = change_positions(signs);
    Ok(SignChanges {
        count: positions.len(),
        positions,
    })
}

/// The window sum over N < n <= 2N of |Delta_n| / p_n together with the two
/// reference values it is bracketed by: 11 / delta_{2N+2} above and
/// 1e-7 * delta_{2N}^3 below (the latter meaningful only under the
/// delta^2 log x -> infinity hypothesis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSum {
    pub sum: f64,
    pub upper_ref: f64,
    pub lower_ref: f64,
}

pub fn delta_sum(seq: &PrimeSequence, profile: &DensityProfile, n: usize) -> Result<DeltaSum> {
    let primes = seq.as_slice();
    if n == 0 || 2 * n + 2 > primes.len() {
        return Err(Error::usage(format!(
            "delta_sum needs 1 <= N and 2N + 2 <= {}, got N = {n}",
            primes.len()
        )));
    }
    let mut acc = KahanSum::new();
    for m in n + 1..=2 * n {
        let d = second_difference(primes[m - 1], primes[m], primes[m + 1])?;
        acc.add(d.unsigned_abs() as f64 / primes[m - 1] as f64);
    }
    let delta_2n2 = profile.delta_at(primes[2 * n + 1] as f64)?;
    let delta_2n = profile.delta_at(primes[2 * n - 1] as f64)?;
    Ok(DeltaSum {
        sum: acc.value(),
        upper_ref: 11.0 / delta_2n2,
        lower_ref: 1e-7 * delta_2n.powi(3),
    })
}

/// The telescoping majorant 2 p_{2N+2} / p_{N+1} of the window sum.
pub fn telescoping_bound(seq: &PrimeSequence, n: usize) -> Result<f64> {
    let primes = seq.as_slice();
    if n == 0 || 2 * n + 2 > primes.len() {
        return Err(Error::usage(format!(
            "telescoping_bound needs 2N + 2 <= {}, got N = {n}",
            primes.len()
        )));
    }
    Ok(2.0 * primes[2 * n + 1] as f64 / primes[n] as f64)
}

/// max over m <= n_max of p_{2m} / p_m, and the first index attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedRatio {
    pub max_ratio: f64,
    pub argmax: usize,
}

pub fn bounded_ratio_check(seq: &PrimeSequence, n_max: usize) -> Result<BoundedRatio> {
    let primes = seq.as_slice();
    if n_max == 0 || 2 * n_max > primes.len() {
        return Err(Error::usage(format!(
            "bounded_ratio_check needs 1 <= N_max and 2 N_max <= {}, got {n_max}",
            primes.len()
        )));
    }
    let mut best = BoundedRatio {
        max_ratio: 0.0,
        argmax: 0,
    };
    for m in 1..=n_max {
        let r = primes[2 * m - 1] as f64 / primes[m - 1] as f64;
        if r > best.max_ratio {
            best = BoundedRatio {
                max_ratio: r,
                argmax: m,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::{primes_in_progression, Progression};

    fn all_primes_to(x: u64) -> PrimeSequence {
        primes_in_progression(Progression::all_primes(), x).unwrap()
    }

    #[test]
    fn second_difference_examples() {
        assert_eq!(second_difference(3, 5, 7).unwrap(), 0);
        assert_eq!(second_difference(2, 3, 5).unwrap(), 1);
        assert_eq!(second_difference(5, 7, 11).unwrap(), 2);
        assert!(second_difference(5, 5, 7).is_err());
        assert!(second_difference(7, 5, 3).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(3, 5, 7).unwrap(), Rational::new(4, 25));
        assert_eq!(gamma(2, 3, 5).unwrap(), Rational::new(2, 9));
        assert_eq!(gamma(5, 7, 11).unwrap(), Rational::new(8, 49));
    }

    #[test]
    fn renyi_identity_examples() {
        assert!(renyi_identity_holds(3, 5, 7).unwrap());
        assert!(renyi_identity_holds(2, 3, 5).unwrap());
        assert!(renyi_identity_holds(5, 7, 11).unwrap());
    }

    #[test]
    fn turning_angle_values() {
        // Frozen from direct evaluation of the arctan difference.
        assert!((turning_angle(3, 5, 7).unwrap() - 0.1476976517271017).abs() < 1e-15);
        assert!((turning_angle(5, 7, 11).unwrap() - 0.09993062761213206).abs() < 1e-15);
        // Geometric surrogate: log points collinear, angle exactly zero.
        assert_eq!(turning_angle(4, 6, 9).unwrap(), 0.0);
    }

    #[test]
    fn curvature_single_term_and_termwise() {
        let seq = all_primes_to(100);
        let k1 = turning_angle(2, 3, 5).unwrap();
        assert_eq!(curvature(&seq, 3).unwrap(), k1);
        let by_terms: f64 = [(2u64, 3u64, 5u64), (3, 5, 7), (5, 7, 11)]
            .iter()
            .map(|&(a, b, c)| turning_angle(a, b, c).unwrap())
            .sum();
        assert!((curvature(&seq, 5).unwrap() - by_terms).abs() < 1e-12);
        assert!(curvature(&seq, 2).is_err());
        assert!(curvature(&seq, 1000).is_err());
    }

    #[test]
    fn series_prefix_matches_direct_curvature() {
        let seq = all_primes_to(10_000);
        let series = CurvatureSeries::compute(&seq).unwrap();
        for n in [3usize, 10, 100, seq.len()] {
            let direct = curvature(&seq, n).unwrap();
            let via = series.curvature_at(n).unwrap();
            assert!((direct - via).abs() <= 1e-12, "N={n}: {direct} vs {via}");
        }
        // Non-negative angles make K_N non-decreasing.
        for w in series.prefix.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn first_sign_change_sits_at_position_one() {
        let seq = all_primes_to(100);
        assert_eq!(trip_sign(2, 3, 5).unwrap(), -1); // 9 - 10
        assert_eq!(trip_sign(3, 5, 7).unwrap(), 1); // 25 - 21
        let sc = sign_changes(&seq, 10).unwrap();
        assert_eq!(sc.positions[0], 1);
        assert_eq!(sc.count, sc.positions.len());
    }

    #[test]
    fn zero_signs_are_skipped_not_counted() {
        // +, 0, + is no change; +, 0, - changes once, attributed to the
        // position of the earlier nonzero sign.
        assert_eq!(change_positions([1, 0, 1, 0, -1]), vec![3]);
        assert_eq!(change_positions([0, 0, 1, 1]), Vec::<usize>::new());
        assert_eq!(change_positions([1, -1, 1]), vec![1, 2]);
        // A geometric surrogate triple really does produce the zero sign.
        assert_eq!(trip_sign(4, 6, 9).unwrap(), 0);
    }

    #[test]
    fn delta_sum_small_windows() {
        let seq = all_primes_to(100);
        let one = DensityProfile::constant(1.0, 3.0).unwrap();
        let d1 = delta_sum(&seq, &one, 1).unwrap();
        assert_eq!(d1.sum, 0.0); // |Delta_2| / p_2 = 0 / 3
        assert_eq!(d1.upper_ref, 11.0);
        let d2 = delta_sum(&seq, &one, 2).unwrap();
        assert!((d2.sum - 24.0 / 35.0).abs() < 1e-15);
        assert!(delta_sum(&seq, &one, 13).is_err());
    }

    #[test]
    fn bounded_ratio_small_cases() {
        let seq = all_primes_to(1000);
        let r1 = bounded_ratio_check(&seq, 1).unwrap();
        assert_eq!(r1.max_ratio, 1.5);
        let r2 = bounded_ratio_check(&seq, 2).unwrap();
        assert!((r2.max_ratio - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(r2.argmax, 2);
    }

    #[test]
    fn csv_header_and_first_row() {
        let seq = all_primes_to(20);
        let series = CurvatureSeries::compute(&seq).unwrap();
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,p_n,delta_n,gamma_num,gamma_den,k_n,trip_sign,K_n_prefix"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,2,1,2,9,"), "{first}");
    }
}
