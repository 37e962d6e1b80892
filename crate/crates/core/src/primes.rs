//! Segmented sieve of Eratosthenes and prime sequences in arithmetic
//! progressions.
//!
//! The sieve works on fixed-size segments (default 2^20 integers) so that
//! memory stays bounded up to the ~10^9 range needed by the scattered
//! construction. Segments are sieved independently, possibly in parallel,
//! and assembled in ascending segment order, so the output is bit-identical
//! for every segment length and worker count.
//!
//! Only odd numbers are represented inside a segment; the prime 2 is handled
//! at the range level. Progression filtering happens after sieving rather
//! than through a wheel, since every experiment uses a small modulus.
//!
//! Base primes up to sqrt(hi) are sieved densely per call: one byte each,
//! 32 kB at the 1e9 scale the experiments reach, still only megabytes out
//! to 1e14.

use std::io::{Read, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default segment length in integers.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 20;

/// Largest supported sieve endpoint. Primes are stored as `u64`; staying
/// below 2^63 keeps every intermediate product of the census and curvature
/// paths inside `i128` without wrap-around.
pub const MAX_SIEVE_LIMIT: u64 = (1 << 63) - 1;

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo > hi {
        return Err(Error::usage(format!("range inverted: lo={lo} > hi={hi}")));
    }
    if hi > MAX_SIEVE_LIMIT {
        return Err(Error::usage(format!(
            "hi={hi} exceeds the supported limit 2^63-1"
        )));
    }
    Ok(())
}

/// Plain sieve of Eratosthenes, used for base primes up to sqrt(hi).
fn small_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Sieve the odd numbers of `[seg_lo, seg_hi]` (requires `seg_lo >= 3`).
fn sieve_segment_odds(seg_lo: u64, seg_hi: u64, base: &[u64]) -> Vec<u64> {
    let first = if seg_lo.is_multiple_of(2) {
        seg_lo + 1
    } else {
        seg_lo
    };
    if first > seg_hi {
        return Vec::new();
    }
    let n_odds = ((seg_hi - first) / 2 + 1) as usize;
    let mut composite = vec![false; n_odds];
    for &p in base.iter().skip_while(|&&p| p == 2) {
        if p.saturating_mul(p) > seg_hi {
            break;
        }
        let mut start = p * p;
        if start < first {
            let mut m = first.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            start = m;
        }
        if start > seg_hi {
            continue;
        }
        // Consecutive odd multiples of p differ by 2p, i.e. index stride p.
        let mut idx = ((start - first) / 2) as usize;
        while idx < n_odds {
            composite[idx] = true;
            idx += p as usize;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|&(_, &marked)| !marked)
        .map(|(i, _)| first + 2 * i as u64)
        .collect()
}

/// Split `[lo, hi]` (with `lo >= 3`) into segments of `segment_len` integers.
fn segments(lo: u64, hi: u64, segment_len: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut s = lo;
    while s <= hi {
        let e = s.saturating_add(segment_len - 1).min(hi);
        out.push((s, e));
        s = e + 1;
        if s == 0 {
            break;
        }
    }
    out
}

/// All primes in `[lo, hi]`, ascending. `lo` below 2 is clamped to 2.
pub fn sieve_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    sieve_range_with(lo, hi, DEFAULT_SEGMENT_LEN)
}

/// As [`sieve_range`], with an explicit segment length.
pub fn sieve_range_with(lo: u64, hi: u64, segment_len: u64) -> Result<Vec<u64>> {
    check_range(lo, hi)?;
    if segment_len < 64 {
        return Err(Error::usage("segment_len must be at least 64"));
    }
    let mut primes = Vec::new();
    if lo <= 2 && hi >= 2 {
        primes.push(2);
    }
    let lo = lo.max(3);
    if lo > hi {
        return Ok(primes);
    }
    let base = small_sieve(hi.isqrt());
    let segs = segments(lo, hi, segment_len);
    let parts: Vec<Vec<u64>> = segs
        .par_iter()
        .map(|&(s, e)| sieve_segment_odds(s, e, &base))
        .collect();
    for part in parts {
        primes.extend(part);
    }
    Ok(primes)
}

/// Count primes `p` in `[lo, hi]` with `pred(p)`, without materializing them.
pub fn count_where(lo: u64, hi: u64, pred: impl Fn(u64) -> bool + Sync) -> Result<u64> {
    check_range(lo, hi)?;
    let mut count = 0u64;
    if lo <= 2 && hi >= 2 && pred(2) {
        count += 1;
    }
    let lo = lo.max(3);
    if lo > hi {
        return Ok(count);
    }
    let base = small_sieve(hi.isqrt());
    let segs = segments(lo, hi, DEFAULT_SEGMENT_LEN);
    count += segs
        .par_iter()
        .map(|&(s, e)| {
            sieve_segment_odds(s, e, &base)
                .into_iter()
                .filter(|&p| pred(p))
                .count() as u64
        })
        .sum::<u64>();
    Ok(count)
}

/// Count all primes in `[lo, hi]`.
pub fn count_in_range(lo: u64, hi: u64) -> Result<u64> {
    count_where(lo, hi, |_| true)
}

/// Visit primes of `[lo, hi]` in ascending order until the callback breaks.
fn visit_primes(lo: u64, hi: u64, mut f: impl FnMut(u64) -> ControlFlow<()>) -> Result<()> {
    check_range(lo, hi)?;
    if lo <= 2 && hi >= 2 {
        if let ControlFlow::Break(()) = f(2) {
            return Ok(());
        }
    }
    let lo = lo.max(3);
    if lo > hi {
        return Ok(());
    }
    let base = small_sieve(hi.isqrt());
    for (s, e) in segments(lo, hi, DEFAULT_SEGMENT_LEN) {
        for p in sieve_segment_odds(s, e, &base) {
            if let ControlFlow::Break(()) = f(p) {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// The first `k` primes in `[lo, hi]`, fewer if the range runs out.
pub fn first_in_range(lo: u64, hi: u64, k: usize) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(k);
    visit_primes(lo, hi, |p| {
        out.push(p);
        if out.len() >= k {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

/// The largest prime in `[lo, hi]`, scanning segments from the top.
pub fn last_in_range(lo: u64, hi: u64) -> Result<Option<u64>> {
    check_range(lo, hi)?;
    let lo3 = lo.max(3);
    if lo3 <= hi {
        let base = small_sieve(hi.isqrt());
        for (s, e) in segments(lo3, hi, DEFAULT_SEGMENT_LEN).into_iter().rev() {
            if let Some(&p) = sieve_segment_odds(s, e, &base).last() {
                return Ok(Some(p));
            }
        }
    }
    Ok((lo <= 2 && hi >= 2).then_some(2))
}

/// Deterministic Miller-Rabin for `u64`. The fixed base set is a proven
/// witness set for every modulus below 3.3 * 10^24.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Euler's totient by trial division.
pub fn euler_phi(mut q: u64) -> u64 {
    let mut phi = 1u64;
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            let mut pk = 1;
            while q.is_multiple_of(d) {
                q /= d;
                pk *= d;
            }
            phi *= pk - pk / d;
        }
        d += 1;
    }
    if q > 1 {
        phi *= q - 1;
    }
    phi
}

/// A reduced residue class `a mod q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Progression {
    q: u64,
    a: u64,
}

impl Progression {
    pub fn new(q: u64, a: u64) -> Result<Self> {
        if q == 0 || a == 0 || a > q || num_integer::gcd(a, q) != 1 {
            return Err(Error::InvalidProgression { q, a });
        }
        Ok(Progression { q, a })
    }

    /// `q = a = 1`: every prime.
    pub fn all_primes() -> Self {
        Progression { q: 1, a: 1 }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn phi(&self) -> u64 {
        euler_phi(self.q)
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        p % self.q == self.a % self.q
    }
}

impl std::fmt::Display for Progression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}", self.a, self.q)
    }
}

/// An ascending, 1-indexed enumeration of a set of primes inside one
/// progression. `limit` is the largest x up to which the underlying set is
/// fully enumerated; indices past `len()` are "not yet sieved", not absent.
#[derive(Debug, Clone)]
pub struct PrimeSequence {
    progression: Progression,
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeSequence {
    /// Wrap an already sieved, strictly increasing list. Membership in the
    /// progression and ordering are validated; primality is the caller's
    /// contract (use [`PrimeSequence::from_file`] for untrusted input).
    pub fn from_parts(progression: Progression, primes: Vec<u64>, limit: u64) -> Result<Self> {
        let mut prev = 0u64;
        for &p in &primes {
            if p <= prev {
                return Err(Error::usage(format!(
                    "sequence not strictly increasing at {p}"
                )));
            }
            if !progression.contains(p) {
                return Err(Error::usage(format!(
                    "{p} is not congruent to {progression}"
                )));
            }
            if p > limit {
                return Err(Error::usage(format!(
                    "{p} exceeds the stated limit {limit}"
                )));
            }
            prev = p;
        }
        Ok(PrimeSequence {
            progression,
            primes,
            limit,
        })
    }

    /// Load a subset from a newline-delimited decimal integer file. Every
    /// entry must be prime, strictly increasing, and in the progression.
    /// The limit is the last listed element.
    pub fn from_file(path: &Path, progression: Progression) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut primes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: u64 = line
                .parse()
                .map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
            if !is_prime_u64(p) {
                return Err(Error::Format(format!("line {}: {p} is not prime", i + 1)));
            }
            primes.push(p);
        }
        let limit = primes.last().copied().unwrap_or(2);
        Self::from_parts(progression, primes, limit)
    }

    pub fn progression(&self) -> Progression {
        self.progression
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// The n-th smallest member, 1-indexed.
    pub fn nth(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::IndexOutOfRange {
                n,
                len: self.primes.len(),
                limit: self.limit,
                detail: "indices are 1-based",
            });
        }
        self.primes
            .get(n - 1)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                n,
                len: self.primes.len(),
                limit: self.limit,
                detail: "not yet sieved: the n-th member lies beyond the limit",
            })
    }

    /// Number of members not exceeding `x`.
    pub fn count_leq(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }
}

/// All primes `p <= x` with `p` in the progression.
pub fn primes_in_progression(prog: Progression, x: u64) -> Result<PrimeSequence> {
    if x < 2 {
        return Err(Error::usage(format!("x={x} must be at least 2")));
    }
    let mut primes = sieve_range(2, x)?;
    if prog.q() > 1 {
        primes.retain(|&p| prog.contains(p));
    }
    PrimeSequence::from_parts(prog, primes, x)
}

/// pi(x; q, a): the number of primes `p <= x` congruent to `a mod q`.
pub fn pi_qa(x: u64, prog: Progression) -> Result<u64> {
    if x < 2 {
        return Err(Error::usage(format!("x={x} must be at least 2")));
    }
    count_where(2, x, |p| prog.contains(p))
}

/// Grow a progression sequence until it holds at least `n` members.
/// The limit doubles from a prime-counting estimate, so the result depends
/// only on `n`, never on worker count.
pub fn progression_with_len(prog: Progression, n: usize) -> Result<PrimeSequence> {
    if n == 0 {
        return primes_in_progression(prog, 2);
    }
    let nf = n as f64 * prog.phi() as f64;
    let guess = nf * (nf.max(6.0).ln() + nf.max(6.0).ln().ln().max(0.0) + 0.6);
    let mut x = (guess as u64).max(100);
    loop {
        let seq = primes_in_progression(prog, x)?;
        if seq.len() >= n {
            return Ok(seq);
        }
        x = x
            .checked_mul(2)
            .ok_or_else(|| Error::Resource(format!("cannot reach {n} primes below 2^63")))?;
    }
}

// ---------------------------------------------------------------------------
// Binary range cache: magic, version, lo, hi, count, then little-endian u64
// primes. Lets repeated experiment runs skip the sieve for a fixed range.
// ---------------------------------------------------------------------------

const CACHE_MAGIC: &[u8; 8] = b"PCPRIME1";

fn cache_file(dir: &Path, lo: u64, hi: u64) -> PathBuf {
    dir.join(format!("primes_{lo}_{hi}.seg"))
}

/// Serialize a sieved range. Writes to a sibling temp file first so an
/// interrupted run never leaves a torn cache behind.
pub fn write_cache(path: &Path, lo: u64, hi: u64, primes: &[u64]) -> Result<()> {
    let tmp = path.with_extension("seg.tmp");
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        f.write_all(CACHE_MAGIC)?;
        f.write_all(&lo.to_le_bytes())?;
        f.write_all(&hi.to_le_bytes())?;
        f.write_all(&(primes.len() as u64).to_le_bytes())?;
        for &p in primes {
            f.write_all(&p.to_le_bytes())?;
        }
        f.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a cached range back, validating the header.
pub fn read_cache(path: &Path) -> Result<(u64, u64, Vec<u64>)> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Format(format!(
            "{}: not a prime cache file",
            path.display()
        )));
    }
    let mut word = [0u8; 8];
    let mut next = |f: &mut dyn Read| -> Result<u64> {
        f.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let lo = next(&mut f)?;
    let hi = next(&mut f)?;
    let count = next(&mut f)?;
    let mut primes = Vec::with_capacity(count as usize);
    let mut prev = 0u64;
    for _ in 0..count {
        let p = next(&mut f)?;
        if p <= prev || p < lo || p > hi {
            return Err(Error::Format(format!(
                "{}: corrupt cache entry {p}",
                path.display()
            )));
        }
        primes.push(p);
        prev = p;
    }
    Ok((lo, hi, primes))
}

/// Sieve `[lo, hi]`, consulting and populating `dir` when given.
pub fn sieve_range_cached(lo: u64, hi: u64, dir: Option<&Path>) -> Result<Vec<u64>> {
    let Some(dir) = dir else {
        return sieve_range(lo, hi);
    };
    let path = cache_file(dir, lo, hi);
    if path.exists() {
        let (clo, chi, primes) = read_cache(&path)?;
        if clo == lo && chi == hi {
            return Ok(primes);
        }
        return Err(Error::Format(format!(
            "{}: header range [{clo}, {chi}] does not match requested [{lo}, {hi}]",
            path.display()
        )));
    }
    let primes = sieve_range(lo, hi)?;
    std::fs::create_dir_all(dir)?;
    write_cache(&path, lo, hi, &primes)?;
    Ok(primes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges() {
        assert_eq!(sieve_range(2, 10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_range(24, 28).unwrap(), Vec::<u64>::new());
        assert_eq!(sieve_range(2, 2).unwrap(), vec![2]);
        assert_eq!(sieve_range(0, 1).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn inverted_range_is_usage_error() {
        assert!(matches!(sieve_range(10, 2), Err(Error::Usage(_))));
    }

    #[test]
    fn miller_rabin_against_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n={n}");
        }
        // Carmichael numbers.
        for n in [561u64, 1105, 1729, 2465, 41041, 825265] {
            assert!(!is_prime_u64(n), "{n} is a Carmichael number");
        }
    }

    #[test]
    fn phi_small_values() {
        for (q, phi) in [(1, 1), (2, 1), (4, 2), (6, 2), (12, 4), (97, 96), (100, 40)] {
            assert_eq!(euler_phi(q), phi, "phi({q})");
        }
    }

    #[test]
    fn progression_rejects_non_coprime() {
        assert!(Progression::new(4, 2).is_err());
        assert!(Progression::new(4, 0).is_err());
        assert!(Progression::new(4, 5).is_err());
        assert!(Progression::new(4, 3).is_ok());
    }

    #[test]
    fn nth_distinguishes_zero_from_beyond_limit() {
        let seq = primes_in_progression(Progression::all_primes(), 10).unwrap();
        assert_eq!(seq.nth(4).unwrap(), 7);
        let e0 = seq.nth(0).unwrap_err().to_string();
        assert!(e0.contains("1-based"), "{e0}");
        let e5 = seq.nth(5).unwrap_err().to_string();
        assert!(e5.contains("not yet sieved"), "{e5}");
    }

    #[test]
    fn first_and_last_in_range() {
        assert_eq!(first_in_range(10, 40, 3).unwrap(), vec![11, 13, 17]);
        assert_eq!(last_in_range(10, 40).unwrap(), Some(37));
        assert_eq!(last_in_range(24, 28).unwrap(), None);
        assert_eq!(last_in_range(2, 2).unwrap(), Some(2));
    }
}
