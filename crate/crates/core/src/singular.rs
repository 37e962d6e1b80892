//! Local factors and rigorously truncated evaluation of the singular product
//! for a pair of offsets, the equivalent series form, and the quadratic
//! average of the product over a fan of offset pairs.
//!
//! For offsets h' < h put D = h h' (h - h'), and for a prime p let nu(p) be
//! the number of distinct residue classes of {0, h', h} mod p; nu(p) = 3
//! exactly when p does not divide D. The singular product over p not
//! dividing q multiplies the local factors
//!
//!   (1 - nu(p)/p) (1 - 1/p)^(-3) = 1 + a(p, nu(p)),
//!   a(p, nu) = (p^3 - (p-1)^3 - nu p^2) / (p-1)^3.
//!
//! Every prime beyond the divisors of D contributes the generic nu = 3
//! factor, which does not depend on the pair. The engine therefore caches
//! the generic product over [5, p_max] once and corrects it per pair with
//! exact rational local factors, so a vanishing factor yields an exact zero
//! rather than an underflowed float.

// Negated range checks are deliberate: they reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::primes::sieve_range;

pub type Rational = Ratio<i128>;

/// Default truncation prime: relative tail below 1e-6 at negligible cost.
pub const DEFAULT_TRUNCATION_PRIME: u64 = 10_000_000;

/// Offsets 0 < h' < h. Kept small enough that D and every local numerator
/// stay comfortably inside i128.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OffsetPair {
    h: u64,
    h_prime: u64,
}

impl OffsetPair {
    pub fn new(h: u64, h_prime: u64) -> Result<Self> {
        if !(0 < h_prime && h_prime < h) {
            return Err(Error::usage(format!(
                "offsets need 0 < h' < h, got h={h}, h'={h_prime}"
            )));
        }
        if h > 2_000_000 {
            return Err(Error::usage(format!("h={h} exceeds the supported 2e6")));
        }
        Ok(OffsetPair { h, h_prime })
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn h_prime(&self) -> u64 {
        self.h_prime
    }

    /// D = h h' (h - h'), always even.
    pub fn d(&self) -> u64 {
        let d = self.h * self.h_prime * (self.h - self.h_prime);
        debug_assert_eq!(d % 2, 0);
        d
    }
}

/// Number of distinct residue classes of {0, h, h'} modulo p.
pub fn nu(pair: OffsetPair, p: u64) -> u8 {
    let a = pair.h % p;
    let b = pair.h_prime % p;
    if a == 0 && b == 0 {
        1
    } else if a == 0 || b == 0 || a == b {
        2
    } else {
        3
    }
}

/// a(p, nu) = (p^3 - (p-1)^3 - nu p^2) / (p-1)^3, exactly.
pub fn a_coeff(p: u64, nu: u8) -> Result<Rational> {
    if !(1..=3).contains(&nu) {
        return Err(Error::usage(format!("nu={nu} outside 1..=3")));
    }
    let p = p as i128;
    let num = 3 * p * p - 3 * p + 1 - (nu as i128) * p * p;
    Ok(Rational::new(num, (p - 1).pow(3)))
}

/// Number of pairs (a, a') in [1, p]^2 whose triple {0, a, a'} occupies
/// exactly nu residue classes mod p: 1, 3(p-1), and (p-1)(p-2).
pub fn t_count(p: u64, nu: u8) -> Result<u64> {
    match nu {
        1 => Ok(1),
        2 => Ok(3 * (p - 1)),
        3 => Ok((p - 1) * (p - 2)),
        _ => Err(Error::usage(format!("nu={nu} outside 1..=3"))),
    }
}

/// The local factor (1 - nu(p)/p)(1 - 1/p)^(-3) = (p - nu) p^2 / (p-1)^3.
pub fn local_factor(pair: OffsetPair, p: u64) -> Rational {
    let n = nu(pair, p) as i128;
    let p = p as i128;
    Rational::new((p - n) * p * p, (p - 1).pow(3))
}

/// A truncated singular product value with a rigorous relative tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValue {
    pub value: f64,
    /// Relative bound on the neglected tail of the product: every prime past
    /// the truncation exceeds every divisor of D q, hence contributes
    /// 1 + a(p, 3) with |a(p, 3)| <= 4/(p-1)^2, and
    /// sum_{p > P} |log(1 + a(p,3))| <= 8 sum_{n >= P} n^-2 <= 8/(P-1).
    pub tail_error: f64,
    pub truncation_prime: u64,
}

impl SingularValue {
    /// Exactly zero: some local factor vanished.
    pub fn is_exact_zero(&self) -> bool {
        self.value == 0.0
    }
}

/// Distinct prime divisors by trial division; fine for the desk-scale
/// moduli and offsets used here.
fn prime_divisors(mut n: u64, out: &mut Vec<u64>) {
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
}

/// Caches the generic (nu = 3) part of the product over primes in
/// [5, p_max], so evaluating many pairs costs only their local corrections.
#[derive(Debug, Clone)]
pub struct SingularEngine {
    p_max: u64,
    generic: f64,
}

#[inline]
fn generic_factor(p: u64) -> f64 {
    let p = p as f64;
    (p - 3.0) * p * p / ((p - 1.0) * (p - 1.0) * (p - 1.0))
}

impl SingularEngine {
    pub fn new(p_max: u64) -> Result<Self> {
        if p_max < 5 {
            return Err(Error::usage(format!("p_max={p_max} must be at least 5")));
        }
        let primes = sieve_range(5, p_max)?;
        // Parallel over fixed blocks, partial products multiplied in
        // ascending block order.
        let partials: Vec<f64> = primes
            .par_chunks(8192)
            .map(|chunk| chunk.iter().map(|&p| generic_factor(p)).product())
            .collect();
        let generic = partials.iter().product();
        Ok(SingularEngine { p_max, generic })
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    /// The truncated singular product for a pair and modulus q.
    pub fn singular_product(&self, q: u64, pair: OffsetPair) -> Result<SingularValue> {
        if q == 0 {
            return Err(Error::usage("q must be positive"));
        }
        // Special primes: 2 and 3 (their generic factor would be wrong or
        // zero), every divisor of D, every divisor of q.
        let mut special = vec![2, 3];
        prime_divisors(pair.d(), &mut special);
        let mut q_primes = Vec::new();
        prime_divisors(q, &mut q_primes);
        special.extend_from_slice(&q_primes);
        special.sort_unstable();
        special.dedup();
        if let Some(&worst) = special.last() {
            if worst > self.p_max {
                return Err(Error::Precondition(format!(
                    "p_max={} is below the largest prime factor {worst} of D*q; \
                     the tail bound would not be valid",
                    self.p_max
                )));
            }
        }
        let tail_error = (8.0 / (self.p_max - 1) as f64).exp_m1();
        let mut value = 1.0f64;
        let mut generic = self.generic;
        for &p in &special {
            if p >= 5 {
                // This prime sits inside the cached generic product; take its
                // generic factor out before applying the true local one.
                generic /= generic_factor(p);
            }
            if q.is_multiple_of(p) {
                continue; // the product runs over p not dividing q
            }
            let f = local_factor(pair, p);
            if f == Rational::from_integer(0) {
                return Ok(SingularValue {
                    value: 0.0,
                    tail_error,
                    truncation_prime: self.p_max,
                });
            }
            value *= *f.numer() as f64 / *f.denom() as f64;
        }
        Ok(SingularValue {
            value: value * generic,
            tail_error,
            truncation_prime: self.p_max,
        })
    }
}

/// One-shot evaluation; builds a throwaway engine.
pub fn singular_product(q: u64, pair: OffsetPair, p_max: u64) -> Result<SingularValue> {
    SingularEngine::new(p_max)?.singular_product(q, pair)
}

/// a_h(r) = prod_{p | r} a(p, nu_h(p)) for squarefree r; a_h(1) = 1.
pub fn a_multiplicative(pair: OffsetPair, r: u64) -> Result<Rational> {
    if r == 0 {
        return Err(Error::usage("r must be positive"));
    }
    let mut n = r;
    let mut acc = Rational::from_integer(1);
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return Err(Error::usage(format!("r={r} is not squarefree")));
            }
            acc *= a_coeff(d, nu(pair, d))?;
        }
        d += 1;
    }
    if n > 1 {
        acc *= a_coeff(n, nu(pair, n))?;
    }
    Ok(acc)
}

/// Series form: sum over squarefree r <= r_max coprime to q of a_h(r).
/// Serves as an oracle for the product route; the two agree within the sum
/// of their truncation bounds.
pub fn singular_series_via_series(q: u64, pair: OffsetPair, r_max: u64) -> Result<f64> {
    if r_max == 0 {
        return Err(Error::usage("r_max must be at least 1"));
    }
    if r_max > (1 << 31) {
        return Err(Error::Resource(format!(
            "r_max={r_max} beyond the 2^31 cap"
        )));
    }
    // Smallest prime factor table for fast factorization of every r.
    let n = r_max as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut acc = KahanSum::new();
    acc.add(1.0); // r = 1
    'outer: for r in 2..=r_max {
        if num_integer::gcd(r, q) != 1 {
            continue;
        }
        let mut m = r as usize;
        let mut term = 1.0f64;
        while m > 1 {
            let p = spf[m] as usize;
            m /= p;
            if m.is_multiple_of(p) {
                continue 'outer; // not squarefree
            }
            let a = a_coeff(p as u64, nu(pair, p as u64))?;
            term *= *a.numer() as f64 / *a.denom() as f64;
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// Rigorous (crude) bound on the series tail beyond r_max: for any sigma in
/// (0, 1),
///
///   sum_{r > R} mu(r)^2 |a_h(r)| <= R^(-sigma) prod_p (1 + p^sigma |a(p, nu_h(p))|),
///
/// by Rankin's trick. The product is evaluated over primes up to 1e4 and the
/// remainder, where nu = 3 forces |a| <= 4/(p-1)^2, is absorbed via an
/// integral estimate. The returned bound is the best over a sigma grid.
pub fn series_tail_bound(pair: OffsetPair, r_max: u64) -> Result<f64> {
    if r_max == 0 {
        return Err(Error::usage("r_max must be at least 1"));
    }
    const P0: f64 = 10_000.0;
    let primes = sieve_range(2, P0 as u64)?;
    let mut best = f64::INFINITY;
    for step in 0..=9 {
        let sigma = 0.5 + 0.05 * step as f64;
        let mut log_pi = 0.0f64;
        for &p in &primes {
            let a = a_coeff(p, nu(pair, p))?;
            let abs_a = (*a.numer() as f64 / *a.denom() as f64).abs();
            log_pi += ((p as f64).powf(sigma) * abs_a).ln_1p();
        }
        // Primes beyond P0: |a(p,3)| <= 4/(p-1)^2 <= 4.002 p^(sigma-2), and
        // the integral of t^(sigma-2) from P0 bounds the prime sum by
        // P0^(sigma-1)/(1-sigma); 5.0 absorbs the constant with room.
        let tail_log = 5.0 * P0.powf(sigma - 1.0) / (1.0 - sigma);
        let bound = (log_pi + tail_log).exp() * (r_max as f64).powf(-sigma);
        best = best.min(bound);
    }
    Ok(best)
}

/// Result of averaging the singular product over the fan of offset pairs
/// `{(h, h') : h <= H, |2h' - h| < alpha h}` against the main term
/// alpha H^2 / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageResult {
    pub sum: f64,
    pub main_term: f64,
    pub pair_count: u64,
}

impl AverageResult {
    pub fn ratio(&self) -> f64 {
        self.sum / self.main_term
    }
}

/// Enumerate the fan row for one h: every h' >= 1 with |2h' - h| < alpha h.
/// alpha <= 1 forces h' < h, so each (h, h') is a valid offset pair.
fn fan_row(alpha: f64, h: u64) -> impl Iterator<Item = u64> {
    (1..h).filter(move |&hp| {
        let lhs = (2.0 * hp as f64 - h as f64).abs();
        lhs < alpha * h as f64
    })
}

/// Sum the singular product over the pair fan by an explicit double loop,
/// parallel over h with an ascending-h reduction.
pub fn singular_average(q: u64, alpha: f64, h_max: u64, p_max: u64) -> Result<AverageResult> {
    singular_average_with(&SingularEngine::new(p_max)?, q, alpha, h_max)
}

/// As [`singular_average`], reusing an engine across calls (an H ladder pays
/// for the generic product once).
pub fn singular_average_with(
    engine: &SingularEngine,
    q: u64,
    alpha: f64,
    h_max: u64,
) -> Result<AverageResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::usage(format!("alpha={alpha} outside (0, 1]")));
    }
    if h_max == 0 {
        return Err(Error::usage("H must be at least 1"));
    }
    let rows: Vec<(f64, u64)> = (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let mut acc = KahanSum::new();
            let mut count = 0u64;
            for hp in fan_row(alpha, h) {
                let pair = OffsetPair::new(h, hp)?;
                acc.add(engine.singular_product(q, pair)?.value);
                count += 1;
            }
            Ok((acc.value(), count))
        })
        .collect::<Result<_>>()?;
    let mut acc = KahanSum::new();
    let mut pair_count = 0u64;
    for (s, c) in rows {
        acc.add(s);
        pair_count += c;
    }
    Ok(AverageResult {
        sum: acc.value(),
        main_term: 0.5 * alpha * (h_max as f64) * (h_max as f64),
        pair_count,
    })
}
