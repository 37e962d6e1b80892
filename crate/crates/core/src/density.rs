//! Density profiles, delta-density verification, index growth bounds, and
//! the scattered sequence construction.
//!
//! A density profile is the decreasing function delta(x) that a prime subset
//! is measured against: the subset is delta-dense (relative to x0 and its
//! progression) when `#{p in P : p <= x} >= delta(x) * pi(x; q, a)` holds for
//! every x >= x0. Both sides of that inequality are step functions jumping
//! only at primes of the parent progression, so the check samples exactly
//! those points.

// Negated comparisons in the validators are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{
    self, count_in_range, first_in_range, last_in_range, PrimeSequence, Progression,
    MAX_SIEVE_LIMIT,
};

/// Closed family of profile shapes. Anything else is supplied as a step
/// table, which keeps experiment configs serializable and reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileKind {
    /// delta(x) = delta0. The plain "dense" case; the 1/log x floor demanded
    /// of decaying profiles does not apply here.
    Constant { delta0: f64 },
    /// delta(x) = 1/log x, the slowest decay the definition admits.
    ReciprocalLog,
    /// delta(x) = c * (log x)^(-beta) with 0 <= beta <= 1.
    PowerLog { c: f64, beta: f64 },
    /// Step interpolation through (x, delta) breakpoints: delta(x) is the
    /// value at the largest breakpoint <= x.
    Table { points: Vec<(f64, f64)> },
}

/// A density profile together with the threshold x0 from which the density
/// inequality is required to hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub kind: ProfileKind,
    pub x0: f64,
}

impl DensityProfile {
    pub fn new(kind: ProfileKind, x0: f64) -> Result<Self> {
        let profile = DensityProfile { kind, x0 };
        profile.validate()?;
        Ok(profile)
    }

    pub fn constant(delta0: f64, x0: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { delta0 }, x0)
    }

    pub fn reciprocal_log(x0: f64) -> Result<Self> {
        Self::new(ProfileKind::ReciprocalLog, x0)
    }

    pub fn power_log(c: f64, beta: f64, x0: f64) -> Result<Self> {
        Self::new(ProfileKind::PowerLog { c, beta }, x0)
    }

    /// Re-run the construction checks, e.g. after deserializing a config.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !(self.x0 >= 3.0) {
            return bad(format!("x0={} must be at least 3", self.x0));
        }
        match &self.kind {
            ProfileKind::Constant { delta0 } => {
                if !(*delta0 > 0.0 && *delta0 <= 1.0) {
                    return bad(format!("constant delta0={delta0} outside (0, 1]"));
                }
            }
            ProfileKind::ReciprocalLog => {}
            ProfileKind::PowerLog { c, beta } => {
                if !(*beta >= 0.0 && *beta <= 1.0) {
                    return bad(format!("beta={beta} outside [0, 1]"));
                }
                let ln3 = 3f64.ln();
                // delta(3) <= 1 and the 1/log x floor, whose worst case over
                // [3, oo) sits at x = 3 for beta <= 1.
                if !(*c * ln3.powf(-beta) <= 1.0) {
                    return bad(format!("c={c}, beta={beta}: delta(3) exceeds 1"));
                }
                if !(*c >= ln3.powf(beta - 1.0)) {
                    return bad(format!("c={c}, beta={beta}: delta drops below 1/log x"));
                }
            }
            ProfileKind::Table { points } => {
                if points.is_empty() {
                    return bad("table profile needs at least one breakpoint".into());
                }
                let mut prev: Option<(f64, f64)> = None;
                for &(x, d) in points {
                    if !(x >= 3.0) {
                        return bad(format!("table breakpoint x={x} below 3"));
                    }
                    if !(d > 0.0 && d <= 1.0) {
                        return bad(format!("table value {d} outside (0, 1]"));
                    }
                    if d * x.ln() < 1.0 {
                        return bad(format!("table value {d} at x={x} below 1/log x"));
                    }
                    if let Some((px, pd)) = prev {
                        if x <= px {
                            return bad(format!("table x values must increase: {px} then {x}"));
                        }
                        if d > pd {
                            return bad(format!("table values must not increase: {pd} then {d}"));
                        }
                    }
                    prev = Some((x, d));
                }
            }
        }
        Ok(())
    }

    /// delta(x) for x >= 3.
    pub fn delta_at(&self, x: f64) -> Result<f64> {
        if !(x >= 3.0) {
            return Err(Error::Domain(format!("delta(x) undefined for x={x} < 3")));
        }
        Ok(self.delta_unchecked(x))
    }

    fn delta_unchecked(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { delta0 } => *delta0,
            ProfileKind::ReciprocalLog => 1.0 / x.ln(),
            ProfileKind::PowerLog { c, beta } => c * x.ln().powf(-beta),
            ProfileKind::Table { points } => {
                let mut value = points[0].1;
                for &(bx, bd) in points {
                    if bx <= x {
                        value = bd;
                    } else {
                        break;
                    }
                }
                value
            }
        }
    }

    /// delta(max(x, 3)): the monotone extension used where an index formula
    /// can produce an argument below the profile domain (only p_1 = 2 does).
    pub fn delta_clamped(&self, x: f64) -> f64 {
        self.delta_unchecked(x.max(3.0))
    }

    /// Whether delta(x)^2 * log x tends to infinity, the hypothesis gating
    /// every lower-bound reference value. `None` means not established
    /// (table profiles).
    pub fn squared_log_diverges(&self) -> Option<bool> {
        match &self.kind {
            ProfileKind::Constant { .. } => Some(true),
            ProfileKind::ReciprocalLog => Some(false),
            ProfileKind::PowerLog { beta, .. } => Some(*beta < 0.5),
            ProfileKind::Table { .. } => None,
        }
    }
}

/// A subset of a progression's primes paired with the profile it is measured
/// against. The parent must be fully sieved at least as far as the subset.
#[derive(Debug, Clone)]
pub struct DenseSubset {
    subset: PrimeSequence,
    parent: PrimeSequence,
    profile: DensityProfile,
}

/// One failure of the density inequality at a sample point x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityViolation {
    pub x: u64,
    pub have: u64,
    pub required: f64,
    pub delta: f64,
}

/// One failure of the index growth bounds at index n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthViolation {
    pub n: usize,
    pub p_n: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Outcome of checking `(3/4) phi(q) n log n <= p_n <= 2 phi(q) n log n / delta_n`
/// over an index range. The bounds only take hold from some index onward, so
/// alongside the violations the report carries the smallest index from which
/// each side holds through the end of the range.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthBoundsReport {
    pub n_min: usize,
    pub n_max: usize,
    pub violations: Vec<GrowthViolation>,
    pub lower_holds_from: Option<usize>,
    pub upper_holds_from: Option<usize>,
}

impl DenseSubset {
    pub fn new(
        subset: PrimeSequence,
        parent: PrimeSequence,
        profile: DensityProfile,
    ) -> Result<Self> {
        profile.validate()?;
        if subset.progression() != parent.progression() {
            return Err(Error::usage(format!(
                "subset progression {} differs from parent {}",
                subset.progression(),
                parent.progression()
            )));
        }
        if subset.limit() > parent.limit() {
            return Err(Error::usage(format!(
                "subset limit {} exceeds parent limit {}",
                subset.limit(),
                parent.limit()
            )));
        }
        // Merge walk: every subset member must appear among the parent primes.
        let mut it = parent.as_slice().iter().copied().peekable();
        for &s in subset.as_slice() {
            loop {
                match it.peek() {
                    Some(&p) if p < s => {
                        it.next();
                    }
                    Some(&p) if p == s => break,
                    _ => {
                        return Err(Error::usage(format!(
                            "subset member {s} missing from the parent sequence"
                        )))
                    }
                }
            }
        }
        Ok(DenseSubset {
            subset,
            parent,
            profile,
        })
    }

    /// The progression viewed as a subset of itself (delta = 1 territory).
    pub fn whole(parent: PrimeSequence, profile: DensityProfile) -> Result<Self> {
        Self::new(parent.clone(), parent, profile)
    }

    pub fn subset(&self) -> &PrimeSequence {
        &self.subset
    }

    pub fn parent(&self) -> &PrimeSequence {
        &self.parent
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    /// delta_N = delta(p_N), with p_N taken from the subset enumeration.
    pub fn delta_n(&self, n: usize) -> Result<f64> {
        let p = self.subset.nth(n)?;
        self.profile.delta_at(p as f64)
    }

    /// Every parent prime x in [x0, x_max] where the subset count drops below
    /// delta(x) * pi(x; q, a). Empty means delta-dense up to x_max.
    pub fn check_delta_dense(&self, x_max: u64) -> Result<Vec<DensityViolation>> {
        if x_max > self.parent.limit() {
            return Err(Error::usage(format!(
                "x_max={x_max} exceeds parent limit {}",
                self.parent.limit()
            )));
        }
        let mut violations = Vec::new();
        let members = self.subset.as_slice();
        // Counts step only at parent primes and the requirement decreases
        // between steps, so parent primes dominate each segment they open.
        // The one exception is a threshold x0 falling strictly inside a
        // segment: its partial segment is worst at ceil(x0) itself.
        let x_start = self.profile.x0.ceil() as u64;
        if x_start <= x_max && !self.parent.as_slice().binary_search(&x_start).is_ok() {
            let delta = self.profile.delta_at(x_start as f64)?;
            let have = self.subset.count_leq(x_start);
            let required = delta * self.parent.count_leq(x_start) as f64;
            if (have as f64) < required {
                violations.push(DensityViolation {
                    x: x_start,
                    have: have as u64,
                    required,
                    delta,
                });
            }
        }
        let mut have = 0usize;
        for (i, &x) in self.parent.as_slice().iter().enumerate() {
            if x > x_max {
                break;
            }
            while have < members.len() && members[have] <= x {
                have += 1;
            }
            if (x as f64) < self.profile.x0 {
                continue;
            }
            let delta = self.profile.delta_at(x as f64)?;
            let required = delta * (i + 1) as f64;
            if (have as f64) < required {
                violations.push(DensityViolation {
                    x,
                    have: have as u64,
                    required,
                    delta,
                });
            }
        }
        violations.sort_by_key(|v| v.x);
        Ok(violations)
    }

    /// Check the two-sided growth bound on p_n over `n_min..=n_max`.
    pub fn growth_bounds_check(&self, n_min: usize, n_max: usize) -> Result<GrowthBoundsReport> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::usage(format!("bad index range [{n_min}, {n_max}]")));
        }
        if n_max > self.subset.len() {
            return Err(Error::IndexOutOfRange {
                n: n_max,
                len: self.subset.len(),
                limit: self.subset.limit(),
                detail: "not yet sieved: the n-th member lies beyond the limit",
            });
        }
        let phi = self.subset.progression().phi() as f64;
        let mut violations = Vec::new();
        let mut lower_ok = vec![false; n_max - n_min + 1];
        let mut upper_ok = vec![false; n_max - n_min + 1];
        for n in n_min..=n_max {
            let p = self.subset.nth(n)? as f64;
            let nl = (n as f64) * (n as f64).ln();
            let lower = 0.75 * phi * nl;
            let delta = self.profile.delta_clamped(p);
            let upper = 2.0 * phi * nl / delta;
            let lo_ok = lower <= p;
            let up_ok = p <= upper;
            lower_ok[n - n_min] = lo_ok;
            upper_ok[n - n_min] = up_ok;
            if !(lo_ok && up_ok) {
                violations.push(GrowthViolation {
                    n,
                    p_n: p as u64,
                    lower,
                    upper,
                });
            }
        }
        let holds_from = |ok: &[bool]| -> Option<usize> {
            let mut from = None;
            for (i, &v) in ok.iter().enumerate().rev() {
                if v {
                    from = Some(n_min + i);
                } else {
                    break;
                }
            }
            from
        };
        Ok(GrowthBoundsReport {
            n_min,
            n_max,
            violations,
            lower_holds_from: holds_from(&lower_ok),
            upper_holds_from: holds_from(&upper_ok),
        })
    }

    /// Whether `delta_N >= delta(4 phi(q) N (log N)^2)` holds at N.
    pub fn density_floor_check(&self, n: usize) -> Result<bool> {
        if n < 3 {
            return Err(Error::usage(format!("N={n} must be at least 3")));
        }
        let lhs = self.delta_n(n)?;
        let phi = self.subset.progression().phi() as f64;
        let nf = n as f64;
        let arg = 4.0 * phi * nf * nf.ln().powi(2);
        Ok(lhs >= self.profile.delta_at(arg)?)
    }

    /// Violations of the preliminary bounds `p_n <= n^2` and
    /// `1/delta_n <= 2 log n` over `n_min..=n_max`. Both settle for large n;
    /// the report carries the smallest index from which the pair holds
    /// through the end of the range.
    pub fn crude_bounds_check(&self, n_min: usize, n_max: usize) -> Result<CrudeBoundsReport> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::usage(format!("bad index range [{n_min}, {n_max}]")));
        }
        if n_max > self.subset.len() {
            return Err(Error::IndexOutOfRange {
                n: n_max,
                len: self.subset.len(),
                limit: self.subset.limit(),
                detail: "not yet sieved: the n-th member lies beyond the limit",
            });
        }
        let mut violations = Vec::new();
        let mut ok = vec![false; n_max - n_min + 1];
        for n in n_min..=n_max {
            let p = self.subset.nth(n)?;
            let delta_inv = 1.0 / self.profile.delta_clamped(p as f64);
            let two_log_n = 2.0 * (n as f64).ln();
            let square_ok = (n as u64).checked_mul(n as u64).is_some_and(|sq| p <= sq);
            let good = square_ok && delta_inv <= two_log_n;
            ok[n - n_min] = good;
            if !good {
                violations.push(CrudeViolation {
                    n,
                    p_n: p,
                    delta_inv,
                    two_log_n,
                });
            }
        }
        let mut holds_from = None;
        for (i, &v) in ok.iter().enumerate().rev() {
            if v {
                holds_from = Some(n_min + i);
            } else {
                break;
            }
        }
        Ok(CrudeBoundsReport {
            n_min,
            n_max,
            violations,
            holds_from,
        })
    }
}

/// One failure of the preliminary bounds at index n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrudeViolation {
    pub n: usize,
    pub p_n: u64,
    pub delta_inv: f64,
    pub two_log_n: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrudeBoundsReport {
    pub n_min: usize,
    pub n_max: usize,
    pub violations: Vec<CrudeViolation>,
    pub holds_from: Option<usize>,
}

// ---------------------------------------------------------------------------
// Scattered sequence: thresholds A_1 = 10, A_{l+1} = 2 A_l log(4 A_l), with
// natural logarithm; interval I_l = [A_l, 4 A_l]. An interval contributes all
// of its primes when their number is even, otherwise all but the smallest, so
// each interval contributes an even count. Primes outside every interval are
// excluded.
// ---------------------------------------------------------------------------

/// First threshold of the recursion.
pub const SCATTERED_FIRST_TERM: f64 = 10.0;

/// Cap on the materialized construction; level metadata past this point can
/// still be computed via [`scattered_levels`], which only streams.
pub const SCATTERED_MATERIALIZE_LIMIT: u64 = 200_000_000;

/// Per-interval bookkeeping of the construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteredLevel {
    pub l: usize,
    /// The real-valued threshold A_l.
    pub a: f64,
    /// ceil(A_l): smallest integer that can lie in the interval.
    pub lo: u64,
    /// floor(4 A_l): largest integer that can lie in the interval.
    pub hi: u64,
    /// Number of primes in [lo, hi].
    pub prime_count: u64,
    /// Number kept (equals prime_count rounded down to even).
    pub kept_count: u64,
    /// The smallest prime, when it was dropped to force an even count.
    pub dropped: Option<u64>,
    /// First two kept primes of the interval.
    pub first_kept: Option<(u64, u64)>,
    /// Largest kept prime of the interval.
    pub last_kept: Option<u64>,
}

/// Statistics at the block boundary after level l: with 2N members through
/// I_l, the second difference at index 2N spans the gap to I_{l+1} and its
/// single term |Delta_{2N}| / q_{2N} is of the order log N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteredBoundary {
    pub l: usize,
    /// N, half the number of members through I_l.
    pub n: u64,
    pub q_2n: u64,
    pub q_2n_plus_1: u64,
    pub q_2n_plus_2: u64,
    pub delta_2n: i128,
    /// |Delta_{2N}| / q_{2N}.
    pub ratio: f64,
    pub quarter_log_n: f64,
    pub third_log_n: f64,
}

/// The materialized construction together with its level metadata.
#[derive(Debug, Clone)]
pub struct Scattered {
    pub sequence: PrimeSequence,
    pub levels: Vec<ScatteredLevel>,
}

/// Thresholds A_1 ..= A_{l_max}.
pub fn scattered_thresholds(l_max: usize) -> Result<Vec<f64>> {
    if l_max == 0 {
        return Err(Error::usage("l_max must be at least 1"));
    }
    let mut a = vec![SCATTERED_FIRST_TERM];
    for _ in 1..l_max {
        let prev = *a.last().unwrap();
        a.push(2.0 * prev * (4.0 * prev).ln());
    }
    Ok(a)
}

/// Level metadata through `l_max`, computed by streaming counts only.
pub fn scattered_levels(l_max: usize) -> Result<Vec<ScatteredLevel>> {
    let thresholds = scattered_thresholds(l_max)?;
    let last = *thresholds.last().unwrap();
    if 4.0 * last > MAX_SIEVE_LIMIT as f64 {
        return Err(Error::Resource(format!(
            "4 A_{l_max} = {:.3e} exceeds the sieve capacity",
            4.0 * last
        )));
    }
    // Disjointness 4 A_l < A_{l+1} is forced by 2 log(4 A_l) > 4 for A_l >= 10;
    // assert it numerically anyway.
    for (i, w) in thresholds.windows(2).enumerate() {
        if !(4.0 * w[0] < w[1]) {
            return Err(Error::Numerics(format!(
                "intervals overlap at level {}: 4 A_l = {} vs A_(l+1) = {}",
                i + 1,
                4.0 * w[0],
                w[1]
            )));
        }
    }
    thresholds
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let lo = a.ceil() as u64;
            let hi = (4.0 * a).floor() as u64;
            let prime_count = count_in_range(lo, hi)?;
            let kept_count = prime_count & !1;
            let head = first_in_range(lo, hi, 3)?;
            let dropped = (prime_count % 2 == 1).then(|| head[0]);
            let skip = usize::from(dropped.is_some());
            let first_kept = (head.len() >= skip + 2).then(|| (head[skip], head[skip + 1]));
            let last_kept = if kept_count == 0 {
                None
            } else {
                last_in_range(lo, hi)?
            };
            Ok(ScatteredLevel {
                l: i + 1,
                a,
                lo,
                hi,
                prime_count,
                kept_count,
                dropped,
                first_kept,
                last_kept,
            })
        })
        .collect()
}

/// Build the construction through `l_max` as a concrete sequence.
pub fn scattered_sequence(l_max: usize) -> Result<Scattered> {
    let top_hi = (4.0 * *scattered_thresholds(l_max)?.last().unwrap()).floor();
    if top_hi > SCATTERED_MATERIALIZE_LIMIT as f64 {
        return Err(Error::Resource(format!(
            "materializing through 4 A_{l_max} = {top_hi:.0} exceeds the cap {}",
            SCATTERED_MATERIALIZE_LIMIT
        )));
    }
    let levels = scattered_levels(l_max)?;
    let top = levels.last().unwrap();
    let mut members = Vec::new();
    for level in &levels {
        let primes = primes::sieve_range(level.lo, level.hi)?;
        debug_assert_eq!(primes.len() as u64, level.prime_count);
        let skip = usize::from(level.dropped.is_some());
        members.extend_from_slice(&primes[skip..]);
    }
    let sequence = PrimeSequence::from_parts(Progression::all_primes(), members, top.hi)?;
    Ok(Scattered { sequence, levels })
}

/// Boundary statistics after level `l`; `levels` must extend through `l + 1`.
pub fn scattered_boundary(levels: &[ScatteredLevel], l: usize) -> Result<ScatteredBoundary> {
    if l == 0 || l + 1 > levels.len() {
        return Err(Error::usage(format!(
            "boundary after level {l} needs levels through {} (have {})",
            l + 1,
            levels.len()
        )));
    }
    let index_2n: u64 = levels[..l].iter().map(|lv| lv.kept_count).sum();
    if !index_2n.is_multiple_of(2) || index_2n == 0 {
        return Err(Error::Numerics(format!(
            "cumulative count {index_2n} through level {l} is not even and positive"
        )));
    }
    let q_2n = levels[l - 1]
        .last_kept
        .ok_or_else(|| Error::Numerics(format!("level {l} kept no primes")))?;
    let (q1, q2) = levels[l]
        .first_kept
        .ok_or_else(|| Error::Numerics(format!("level {} kept fewer than two primes", l + 1)))?;
    let delta = q2 as i128 - 2 * q1 as i128 + q_2n as i128;
    let n = index_2n / 2;
    let log_n = (n as f64).ln();
    Ok(ScatteredBoundary {
        l,
        n,
        q_2n,
        q_2n_plus_1: q1,
        q_2n_plus_2: q2,
        delta_2n: delta,
        ratio: delta.unsigned_abs() as f64 / q_2n as f64,
        quarter_log_n: log_n / 4.0,
        third_log_n: log_n / 3.0,
    })
}
