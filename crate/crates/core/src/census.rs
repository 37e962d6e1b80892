//! Exact censuses of prime triples that nearly form an arithmetic
//! progression, and the derived index sets used to detect oscillation.
//!
//! The central count runs over ordered triples p < p' < p'' of primes in one
//! progression with 5 <= p <= x, p'' <= p + qH, and |p'' - 2p' + p| strictly
//! below alpha (p'' - p). For alpha <= 1 the middle prime is forced strictly
//! between the outer two, so the enumeration slides a window of width qH
//! across the sieved progression. Counting is exact; no sieve upper bound is
//! involved.

// Negated range checks are deliberate: they reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DenseSubset;
use crate::error::{Error, Result};
use crate::primes::{primes_in_progression, Progression};

/// Parameters of a near-progression census.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusQuery {
    pub alpha: f64,
    pub prog: Progression,
    /// Upper limit for the smallest prime of each triple.
    pub x: u64,
    /// Window length in units of q: p'' may reach p + qH.
    pub h: u64,
}

impl CensusQuery {
    pub fn new(alpha: f64, prog: Progression, x: u64, h: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::usage(format!("alpha={alpha} outside (0, 1]")));
        }
        if !(1 <= h && h <= x) {
            return Err(Error::usage(format!("need 1 <= H <= x, got H={h}, x={x}")));
        }
        Ok(CensusQuery { alpha, prog, x, h })
    }

    fn window(&self) -> u64 {
        self.prog.q() * self.h
    }
}

/// Census outcome: the exact count and an optional capped triple sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusCount {
    pub count: u64,
    /// The first `cap` qualifying triples in ascending order of (p, p'', p').
    pub triples: Vec<[u64; 3]>,
}

/// Count qualifying triples exactly. `dump_cap` limits how many triples are
/// materialized; the count itself is always complete.
pub fn count_near_progressions(query: &CensusQuery, dump_cap: usize) -> Result<CensusCount> {
    let hi = query
        .x
        .checked_add(query.window())
        .ok_or_else(|| Error::usage("x + qH overflows"))?;
    let seq = primes_in_progression(query.prog, hi)?;
    let ps = seq.as_slice();
    let alpha = query.alpha;
    let window = query.window();
    // Disjoint blocks of starting indices, fixed size so the decomposition
    // never depends on the worker count.
    let blocks: Vec<(usize, usize)> = (0..ps.len())
        .step_by(4096)
        .map(|s| (s, (s + 4096).min(ps.len())))
        .collect();
    let per_block: Vec<(u64, Vec<[u64; 3]>)> = blocks
        .par_iter()
        .map(|&(start, end)| {
            let mut count = 0u64;
            let mut sample = Vec::new();
            for i in start..end {
                let p = ps[i];
                if p < 5 || p > query.x {
                    continue;
                }
                let top = p + window;
                for k in i + 1..ps.len() {
                    let p2 = ps[k];
                    if p2 > top {
                        break;
                    }
                    let gap = (p2 - p) as f64;
                    for &p1 in &ps[i + 1..k] {
                        let delta = (p2 as i64 - 2 * p1 as i64 + p as i64).unsigned_abs();
                        if (delta as f64) < alpha * gap {
                            count += 1;
                            if sample.len() < dump_cap {
                                sample.push([p, p1, p2]);
                            }
                        }
                    }
                }
            }
            (count, sample)
        })
        .collect();
    let mut count = 0u64;
    let mut triples = Vec::new();
    for (c, sample) in per_block {
        count += c;
        for t in sample {
            if triples.len() >= dump_cap {
                break;
            }
            triples.push(t);
        }
    }
    Ok(CensusCount { count, triples })
}

/// The census count next to the reference magnitude
/// `25 alpha H^2 x / (phi(q) (log x)^3)`. The reference deliberately omits
/// the unspecified secondary term of order H^(1+eps), so the ratio is a
/// one-sided diagnostic, meaningful when the quadratic term dominates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusRatio {
    pub count: u64,
    pub main_bound: f64,
    pub ratio: f64,
}

/// The quadratic reference 25 alpha H^2 x / (phi(q) (log x)^3) on its own.
pub fn census_reference_bound(query: &CensusQuery) -> Result<f64> {
    if query.x < 3 {
        return Err(Error::usage(format!("x={} needs log x > 1", query.x)));
    }
    let xf = query.x as f64;
    let hf = query.h as f64;
    Ok(25.0 * query.alpha * hf * hf * xf / (query.prog.phi() as f64 * xf.ln().powi(3)))
}

pub fn census_ratio(query: &CensusQuery) -> Result<CensusRatio> {
    let main_bound = census_reference_bound(query)?;
    let count = count_near_progressions(query, 0)?.count;
    Ok(CensusRatio {
        count,
        main_bound,
        ratio: count as f64 / main_bound,
    })
}

/// The constants C = 2 / delta_{2N} and B = 1e-5 / C^2, with the two gap
/// thresholds J0 = B phi(q) log N and J1 = 33 C phi(q) log N they induce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationParams {
    pub n: usize,
    pub c: f64,
    pub b: f64,
    pub q: u64,
    pub phi_q: u64,
    pub j0: f64,
    pub j1: f64,
}

impl OscillationParams {
    pub fn derive(subset: &DenseSubset, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::usage(format!("N={n} must be at least 2")));
        }
        let delta_2n = subset.delta_n(2 * n)?;
        let c = 2.0 / delta_2n;
        let b = 1e-5 / (c * c);
        debug_assert!(c >= 2.0 && b <= 2.5e-6);
        let prog = subset.subset().progression();
        let phi_q = prog.phi();
        let log_n = (n as f64).ln();
        Ok(OscillationParams {
            n,
            c,
            b,
            q: prog.q(),
            phi_q,
            j0: b * phi_q as f64 * log_n,
            j1: 33.0 * c * phi_q as f64 * log_n,
        })
    }
}

/// Indices n in (N, 2N-2] whose triple has moderate total gap yet a second
/// difference that is not negligible: p_{n+2} - p_n <= J1 and |Delta_n| >= J0.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationSet {
    pub params: OscillationParams,
    pub members: Vec<usize>,
    /// Whether the set reaches the guaranteed N/2 elements.
    pub at_least_half: bool,
}

pub fn oscillation_set(subset: &DenseSubset, n: usize) -> Result<OscillationSet> {
    let params = OscillationParams::derive(subset, n)?;
    let primes = subset.subset().as_slice();
    if 2 * n > primes.len() {
        return Err(Error::usage(format!(
            "need 2N <= {} members, got N = {n}",
            primes.len()
        )));
    }
    let mut members = Vec::new();
    for m in n + 1..=2 * n - 2 {
        let p = primes[m - 1];
        let p2 = primes[m + 1];
        let gap = (p2 - p) as f64;
        let delta = (p2 as i64 - 2 * primes[m] as i64 + p as i64).unsigned_abs() as f64;
        if gap <= params.j1 && delta >= params.j0 {
            members.push(m);
        }
    }
    let at_least_half = members.len() >= n.div_ceil(2);
    Ok(OscillationSet {
        params,
        members,
        at_least_half,
    })
}

/// Sizes of the three exception classes partitioning the complement of the
/// oscillation set inside (N, 2N-2]:
/// wide gap (> J1), short gap (<= J0), and mid gap with |Delta| < J0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionPartition {
    pub params: OscillationParams,
    pub wide_gap: usize,
    pub short_gap: usize,
    pub flat_mid_gap: usize,
    /// N - 2 minus the three class sizes; every remaining index belongs to
    /// the oscillation set.
    pub remainder: usize,
    /// Telescoping bound (p_{2N} + p_{2N-1}) / (33 C phi(q) log N) on the
    /// wide-gap class size.
    pub wide_gap_bound: f64,
}

pub fn exception_partition(subset: &DenseSubset, n: usize) -> Result<ExceptionPartition> {
    let params = OscillationParams::derive(subset, n)?;
    let primes = subset.subset().as_slice();
    if 2 * n > primes.len() {
        return Err(Error::usage(format!(
            "need 2N <= {} members, got N = {n}",
            primes.len()
        )));
    }
    let mut wide_gap = 0usize;
    let mut short_gap = 0usize;
    let mut flat_mid_gap = 0usize;
    for m in n + 1..=2 * n - 2 {
        let p = primes[m - 1];
        let p2 = primes[m + 1];
        let gap = (p2 - p) as f64;
        let delta = (p2 as i64 - 2 * primes[m] as i64 + p as i64).unsigned_abs() as f64;
        if gap > params.j1 {
            wide_gap += 1;
        } else if gap <= params.j0 {
            short_gap += 1;
        } else if delta < params.j0 {
            flat_mid_gap += 1;
        }
    }
    let total = n - 2;
    let wide_gap_bound = (primes[2 * n - 1] as f64 + primes[2 * n - 2] as f64) / params.j1;
    Ok(ExceptionPartition {
        params,
        wide_gap,
        short_gap,
        flat_mid_gap,
        remainder: total - wide_gap - short_gap - flat_mid_gap,
        wide_gap_bound,
    })
}
