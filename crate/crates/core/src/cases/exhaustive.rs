//! Bounded exhaustive check: every feasible filtration profile whose
//! `h⁰(A)h¹(A)` exceeds `g` comes with a 2-partition `I | Iᶜ` of the
//! decomposition satisfying `χ(Σ_I D)·χ(Σ_{Iᶜ} D) > g`.
//!
//! Whether a partition certificate exists depends only on the `εᵢ` and the
//! products `xᵢⱼ`, and `g = Σεᵢ + Σ_{i<j} xᵢⱼ + 1` depends on the products
//! only through their sum `t`. The filtration side therefore reduces to a
//! histogram of `h⁰h¹` per `ε`-vector, the decomposition side to counts of
//! 2-connected product matrices per `t`, and only those `(ε, t)` classes
//! that a row-sum bound cannot settle are enumerated matrix by matrix.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::filtration::{profile_feasible, FiltrationEntry, FiltrationProfile};
use crate::bn::{partition_certificate, CertificateSketch, DecompositionProfile};
use crate::error::{Error, Result};

/// Counterexample lists are truncated to this many entries; the full
/// count is always reported.
pub const MAX_STORED_COUNTEREXAMPLES: usize = 100;

/// Bounds of the enumeration. Every range is inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseBox {
    pub r_max: i64,
    pub s_min: i64,
    pub s_max: i64,
    pub eps_max: i64,
    pub x_min: i64,
    pub x_max: i64,
}

impl CaseBox {
    pub fn default_for(n: usize) -> Result<CaseBox> {
        match n {
            2 => Ok(CaseBox { r_max: 12, s_min: -12, s_max: 12, eps_max: 12, x_min: -12, x_max: 40 }),
            3 | 4 => Ok(CaseBox { r_max: 8, s_min: -8, s_max: 8, eps_max: 8, x_min: -8, x_max: 24 }),
            _ => Err(Error::InvalidArgument(format!("exhaustive checks cover n = 2, 3, 4, not {n}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidBox(what.to_string()));
        if !(1..=64).contains(&self.r_max) {
            return bad("r_max must lie in 1..=64");
        }
        if self.s_min > self.s_max || self.s_min < -64 || self.s_max > 64 {
            return bad("need -64 <= s_min <= s_max <= 64");
        }
        if !(0..=64).contains(&self.eps_max) {
            return bad("eps_max must lie in 0..=64");
        }
        if self.x_min > self.x_max || self.x_min < -512 || self.x_max > 512 {
            return bad("need -512 <= x_min <= x_max <= 512");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Restrict to numerically 2-connected decompositions (the geometric
    /// situation). Turning this off is useful for testing the checker.
    pub enforce_two_connected: bool,
    /// Close `(ε, t)` classes with the single-part row-sum bound. With
    /// this off every matrix is examined explicitly, which is slow but
    /// checks the bound itself.
    pub use_row_bound: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { enforce_two_connected: true, use_row_bound: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// The first feasible filtration (lexicographically) with `h⁰h¹ > g`.
    pub filtration: FiltrationProfile,
    pub decomposition: DecompositionProfile,
    pub h0_h1: i64,
    pub genus: i64,
    /// How many feasible filtrations with these `εᵢ` exceed `g`.
    pub matching_filtrations: u64,
}

/// An auxiliary inequality checked over a sub-box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub instances: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CrossCheck {
    fn new(name: &str) -> Self {
        CrossCheck { name: name.into(), instances: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn merge(mut self, other: CrossCheck) -> CrossCheck {
        self.instances += other.instances;
        self.failures += other.failures;
        self.first_failure = self.first_failure.or(other.first_failure);
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn as_decimal<S: Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxReport {
    pub n: usize,
    pub bounds: CaseBox,
    pub two_connected_enforced: bool,
    /// Pairs (filtration, decomposition) in the box with `h⁰h¹ > g`.
    /// Serialized as a decimal string since it may exceed 2⁶⁴.
    #[serde(serialize_with = "as_decimal")]
    pub instances_checked: u128,
    pub feasible_filtrations: u64,
    /// Product matrices in the box (2-connected ones when enforced).
    pub decompositions: u64,
    /// `(ε, t)` classes closed by the single-part row-sum bound.
    pub classes_settled_by_row_bound: u64,
    /// Product matrices examined one by one.
    pub matrices_checked_explicitly: u64,
    pub counterexample_count: u64,
    pub counterexamples: Vec<Counterexample>,
    pub cross_checks: Vec<CrossCheck>,
    pub elapsed_ms: u64,
}

impl BoxReport {
    pub fn passed(&self) -> bool {
        self.counterexample_count == 0 && self.cross_checks.iter().all(CrossCheck::passed)
    }

    /// Recomputes every stored counterexample from scratch.
    pub fn reverify_counterexamples(&self) -> Result<()> {
        let options = CheckOptions { enforce_two_connected: self.two_connected_enforced, ..CheckOptions::default() };
        for c in &self.counterexamples {
            if !within_box(&self.bounds, &c.filtration, &c.decomposition) {
                return Err(Error::Precondition("counterexample lies outside the box".into()));
            }
            match check_instance_with(&c.filtration, &c.decomposition, options)? {
                InstanceOutcome::Counterexample { h0_h1, genus } if h0_h1 == c.h0_h1 && genus == c.genus => {}
                other => {
                    return Err(Error::Precondition(format!("stored counterexample does not recompute: {other:?}")))
                }
            }
        }
        if self.counterexamples.len() as u64 > self.counterexample_count {
            return Err(Error::Precondition("more counterexamples stored than counted".into()));
        }
        Ok(())
    }
}

fn within_box(b: &CaseBox, fp: &FiltrationProfile, dp: &DecompositionProfile) -> bool {
    let fp_ok = fp
        .entries()
        .iter()
        .all(|e| e.r <= b.r_max && (b.s_min..=b.s_max).contains(&e.s) && e.eps <= b.eps_max);
    let n = dp.n();
    let x_ok = (0..n).all(|i| (i + 1..n).all(|j| (b.x_min..=b.x_max).contains(&dp.product(i, j))));
    fp_ok && x_ok
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InstanceOutcome {
    NotApplicable { reason: String },
    Certified { certificate: CertificateSketch },
    Counterexample { h0_h1: i64, genus: i64 },
}

/// Checks one (filtration, decomposition) pair directly.
pub fn check_instance(fp: &FiltrationProfile, dp: &DecompositionProfile) -> Result<InstanceOutcome> {
    check_instance_with(fp, dp, CheckOptions::default())
}

pub fn check_instance_with(fp: &FiltrationProfile, dp: &DecompositionProfile, options: CheckOptions) -> Result<InstanceOutcome> {
    if fp.n() != dp.n() {
        return Err(Error::DimensionMismatch { expected: fp.n(), found: dp.n() });
    }
    let na = |reason: &str| Ok(InstanceOutcome::NotApplicable { reason: reason.into() });
    if fp.entries().iter().zip(dp.squares()).any(|(e, &sq)| sq != 2 * e.eps) {
        return na("squares are not 2·eps");
    }
    if !profile_feasible(fp) {
        return na("filtration profile is not feasible");
    }
    if options.enforce_two_connected && !dp.is_two_connected() {
        return na("decomposition is not numerically 2-connected");
    }
    let (h0_h1, genus) = (fp.h0_h1(), dp.genus());
    if h0_h1 <= genus {
        return na("h0(A)h1(A) <= g");
    }
    Ok(match partition_certificate(dp) {
        Some(certificate) => InstanceOutcome::Certified { certificate },
        None => InstanceOutcome::Counterexample { h0_h1, genus },
    })
}

/// Pairs, cuts and the pair/cut incidence for `n` parts.
struct Shape {
    pairs: Vec<(usize, usize)>,
    /// Subsets containing part 0, as bitmasks; each 2-partition once.
    cuts: Vec<u32>,
    crossing: Vec<Vec<bool>>,
    /// `later[k][c]`: pairs after position `k` crossing cut `c`.
    later: Vec<Vec<i64>>,
}

impl Shape {
    fn new(n: usize) -> Shape {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let cuts: Vec<u32> = (0..1u32 << (n - 1)).map(|m| 1 | (m << 1)).filter(|&m| m != (1 << n) - 1).collect();
        let crossing: Vec<Vec<bool>> = pairs
            .iter()
            .map(|&(i, j)| cuts.iter().map(|&c| ((c >> i) & 1) != ((c >> j) & 1)).collect())
            .collect();
        let later = (0..pairs.len())
            .map(|k| (0..cuts.len()).map(|c| crossing[k + 1..].iter().filter(|row| row[c]).count() as i64).collect())
            .collect();
        Shape { pairs, cuts, crossing, later }
    }

    fn m(&self) -> usize {
        self.pairs.len()
    }
}

/// `counts[t - t_min]` = number of product matrices in the box with
/// `Σ x = t` (2-connected ones when `min_cut` is set).
fn count_by_sum(shape: &Shape, b: &CaseBox, min_cut: Option<i64>) -> (i64, Vec<u64>) {
    let m = shape.m() as i64;
    let t_min = m * b.x_min;
    let len = (m * (b.x_max - b.x_min) + 2) as usize;
    let diff = (b.x_min..=b.x_max)
        .into_par_iter()
        .map(|x0| {
            let mut diff = vec![0i64; len];
            let mut cuts = vec![0i64; shape.cuts.len()];
            if shape.m() == 1 {
                count_leaf(shape, b, min_cut, 0, 0, &cuts, t_min, &mut diff, Some(x0));
            } else {
                apply(shape, 0, x0, &mut cuts);
                if !cut_hopeless(shape, b, min_cut, 0, &cuts) {
                    count_rec(shape, b, min_cut, 1, x0, &mut cuts, t_min, &mut diff);
                }
            }
            diff
        })
        .reduce(
            || vec![0i64; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut counts = Vec::with_capacity(len - 1);
    let mut run = 0i64;
    for d in &diff[..len - 1] {
        run += d;
        counts.push(run as u64);
    }
    (t_min, counts)
}

fn apply(shape: &Shape, k: usize, x: i64, cuts: &mut [i64]) {
    for (c, v) in cuts.iter_mut().enumerate() {
        if shape.crossing[k][c] {
            *v += x;
        }
    }
}

/// After fixing pairs `0..=k`, some cut can no longer reach `min_cut`.
fn cut_hopeless(shape: &Shape, b: &CaseBox, min_cut: Option<i64>, k: usize, cuts: &[i64]) -> bool {
    let Some(min_cut) = min_cut else { return false };
    cuts.iter().enumerate().any(|(c, &v)| v + shape.later[k][c] * b.x_max < min_cut)
}

#[allow(clippy::too_many_arguments)]
fn count_rec(shape: &Shape, b: &CaseBox, min_cut: Option<i64>, k: usize, partial: i64, cuts: &mut [i64], t_min: i64, diff: &mut [i64]) {
    if k + 1 == shape.m() {
        count_leaf(shape, b, min_cut, k, partial, cuts, t_min, diff, None);
        return;
    }
    for x in b.x_min..=b.x_max {
        apply(shape, k, x, cuts);
        if !cut_hopeless(shape, b, min_cut, k, cuts) {
            count_rec(shape, b, min_cut, k + 1, partial + x, cuts, t_min, diff);
        }
        apply(shape, k, -x, cuts);
    }
}

/// The last pair: the admissible values form an interval, recorded in the
/// difference array in O(1). `only` pins the value (used when there is a
/// single pair).
#[allow(clippy::too_many_arguments)]
fn count_leaf(shape: &Shape, b: &CaseBox, min_cut: Option<i64>, k: usize, partial: i64, cuts: &[i64], t_min: i64, diff: &mut [i64], only: Option<i64>) {
    let (mut lo, hi) = only.map_or((b.x_min, b.x_max), |x| (x, x));
    if let Some(min_cut) = min_cut {
        for (c, &v) in cuts.iter().enumerate() {
            if shape.crossing[k][c] {
                lo = lo.max(min_cut - v);
            } else if v < min_cut {
                return;
            }
        }
    }
    if lo > hi {
        return;
    }
    diff[(partial + lo - t_min) as usize] += 1;
    diff[(partial + hi + 1 - t_min) as usize] -= 1;
}

/// All product vectors (in pair order) in the box with sum `t`.
fn for_each_with_sum(shape: &Shape, b: &CaseBox, t: i64, visit: &mut dyn FnMut(&[i64])) {
    let mut xs = vec![0i64; shape.m()];
    fine_rec(shape, b, 0, t, &mut xs, visit);
}

fn fine_rec(shape: &Shape, b: &CaseBox, k: usize, rest: i64, xs: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
    let remaining = (shape.m() - k - 1) as i64;
    if remaining == 0 {
        if (b.x_min..=b.x_max).contains(&rest) {
            xs[k] = rest;
            visit(xs);
        }
        return;
    }
    let lo = b.x_min.max(rest - remaining * b.x_max);
    let hi = b.x_max.min(rest - remaining * b.x_min);
    for x in lo..=hi {
        xs[k] = x;
        fine_rec(shape, b, k + 1, rest - x, xs, visit);
    }
}

enum Leaf {
    Excluded,
    Certified,
    Fails,
}

/// Partition certificates for `εᵢ` and products `xs`, straight from the
/// definitions: `χ(Σ_I D) = Σ_I εᵢ + Σ_{i<j∈I} xᵢⱼ + 2`.
fn evaluate(shape: &Shape, eps: &[i64], xs: &[i64], min_cut: Option<i64>) -> Leaf {
    let e_total: i64 = eps.iter().sum();
    let t: i64 = xs.iter().sum();
    let g = e_total + t + 1;
    let mut certified = false;
    for &mask in &shape.cuts {
        let inside = |i: usize| (mask >> i) & 1 == 1;
        let (mut chi_in, mut chi_out, mut cut) = (2, 2, 0);
        for (i, e) in eps.iter().enumerate() {
            if inside(i) {
                chi_in += e;
            } else {
                chi_out += e;
            }
        }
        for (k, &(i, j)) in shape.pairs.iter().enumerate() {
            match (inside(i), inside(j)) {
                (true, true) => chi_in += xs[k],
                (false, false) => chi_out += xs[k],
                _ => cut += xs[k],
            }
        }
        if min_cut.is_some_and(|mc| cut < mc) {
            return Leaf::Excluded;
        }
        certified |= chi_in.max(0) * chi_out.max(0) > g;
    }
    if certified {
        Leaf::Certified
    } else {
        Leaf::Fails
    }
}

/// Rank vectors satisfying `rᵢ <= rᵢ₊₁ + … + rₙ`, lexicographic.
fn rank_vectors(n: usize, r_max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut r = vec![1i64; n];
    loop {
        let ok = (0..n.saturating_sub(1)).all(|i| r[i] <= r[i + 1..].iter().sum());
        if ok {
            out.push(r.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if r[k] < r_max {
                r[k] += 1;
                break;
            }
            r[k] = 1;
        }
    }
}

/// The admissible `sᵢ` for rank `r` and `ε`: `s_min <= s <= (ε + 1)/r`,
/// plus `s >= 1` for the last piece.
fn s_interval(b: &CaseBox, r: i64, eps: i64, last: bool) -> (i64, i64) {
    let lo = if last { b.s_min.max(1) } else { b.s_min };
    let hi = b.s_max.min((eps + 1).div_euclid(r));
    (lo, hi)
}

/// Histogram of `h⁰h¹` over feasible filtrations with the given `εᵢ`.
struct ProductHistogram {
    p_min: i64,
    #[cfg_attr(not(test), allow(dead_code))]
    counts: Vec<u64>,
    /// `tail[k]` = filtrations with product `> p_min + k - 1`, so that
    /// `#{P > g} = tail[g + 1 - p_min]`.
    tail: Vec<u64>,
    total: u64,
}

impl ProductHistogram {
    fn build(ranks: &[Vec<i64>], b: &CaseBox, eps: &[i64]) -> ProductHistogram {
        let n = eps.len() as i64;
        let corners = [n * b.r_max * n * b.s_min, n * b.r_max * n * b.s_max, n * n * b.s_min, n * n * b.s_max];
        let p_min = *corners.iter().min().expect("nonempty");
        let p_max = *corners.iter().max().expect("nonempty");
        let mut counts = vec![0u64; (p_max - p_min + 1) as usize];
        let mut dist: Vec<u64> = Vec::new();
        let mut next: Vec<u64> = Vec::new();
        'ranks: for r in ranks {
            dist.clear();
            dist.push(1);
            let mut s_lo = 0;
            for (i, (&ri, &ei)) in r.iter().zip(eps).enumerate() {
                let (lo, hi) = s_interval(b, ri, ei, i + 1 == eps.len());
                if lo > hi {
                    continue 'ranks;
                }
                s_lo += lo;
                let w = (hi - lo) as usize;
                // convolve with the uniform distribution on 0..=w
                next.clear();
                next.resize(dist.len() + w, 0);
                let mut window = 0u64;
                for k in 0..next.len() {
                    if k < dist.len() {
                        window += dist[k];
                    }
                    if k > w {
                        window -= dist[k - w - 1];
                    }
                    next[k] = window;
                }
                std::mem::swap(&mut dist, &mut next);
            }
            let big_r: i64 = r.iter().sum();
            for (k, &c) in dist.iter().enumerate() {
                let p = big_r * (s_lo + k as i64);
                counts[(p - p_min) as usize] += c;
            }
        }
        let mut tail = vec![0u64; counts.len() + 1];
        for k in (0..counts.len()).rev() {
            tail[k] = tail[k + 1] + counts[k];
        }
        let total = tail[0];
        ProductHistogram { p_min, counts, tail, total }
    }

    /// Feasible filtrations with `h⁰h¹ > g`.
    fn above(&self, g: i64) -> u64 {
        let k = g + 1 - self.p_min;
        if k <= 0 {
            self.total
        } else if k as usize >= self.tail.len() {
            0
        } else {
            self.tail[k as usize]
        }
    }

    #[cfg(test)]
    fn count_at(&self, p: i64) -> u64 {
        let k = p - self.p_min;
        if k < 0 || k as usize >= self.counts.len() {
            0
        } else {
            self.counts[k as usize]
        }
    }
}

/// The first feasible filtration (ranks, then `s`, lexicographically) with
/// the given `εᵢ` and `h⁰h¹ > g`.
fn filtration_witness(ranks: &[Vec<i64>], b: &CaseBox, eps: &[i64], g: i64) -> Option<FiltrationProfile> {
    let n = eps.len();
    for r in ranks {
        let bounds: Vec<(i64, i64)> = (0..n).map(|i| s_interval(b, r[i], eps[i], i + 1 == n)).collect();
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            continue;
        }
        let big_r: i64 = r.iter().sum();
        let mut s: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        'odometer: loop {
            if big_r * s.iter().sum::<i64>() > g {
                let entries = (0..n).map(|i| FiltrationEntry { r: r[i], s: s[i], eps: eps[i] }).collect();
                return FiltrationProfile::new(entries).ok();
            }
            for k in (0..n).rev() {
                if s[k] < bounds[k].1 {
                    s[k] += 1;
                    continue 'odometer;
                }
                s[k] = bounds[k].0;
            }
            break;
        }
    }
    None
}

#[derive(Default)]
struct EpsSummary {
    feasible: u64,
    instances: u128,
    settled: u64,
    explicit: u64,
    counterexamples: Vec<Counterexample>,
    counterexample_count: u64,
}

struct Context<'a> {
    shape: &'a Shape,
    bounds: &'a CaseBox,
    ranks: &'a [Vec<i64>],
    t_min: i64,
    sums: &'a [u64],
    min_cut: Option<i64>,
    use_row_bound: bool,
}

impl Context<'_> {
    fn check_eps(&self, eps: &[i64]) -> EpsSummary {
        let n = eps.len() as i64;
        let hist = ProductHistogram::build(self.ranks, self.bounds, eps);
        let e_total: i64 = eps.iter().sum();
        let mut out = EpsSummary { feasible: hist.total, ..EpsSummary::default() };
        let row_floor = match self.min_cut {
            Some(mc) => mc.max((n - 1) * self.bounds.x_min),
            None => (n - 1) * self.bounds.x_min,
        };
        let row_cap = (n - 1) * self.bounds.x_max;
        for (k, &count) in self.sums.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let t = self.t_min + k as i64;
            let g = e_total + t + 1;
            let above = hist.above(g);
            if above == 0 {
                continue;
            }
            out.instances += u128::from(count) * u128::from(above);
            // Every product is a product of nonnegative factors.
            if self.use_row_bound && g < 0 {
                out.settled += 1;
                continue;
            }
            // The split {i} | rest fails iff the row sum yᵢ reaches
            // g + 1 - εᵢ - ⌊g/(εᵢ + 2)⌋; all of them failing needs
            // Σ yᵢ = 2t to cover the sum of those thresholds.
            let need: Vec<i64> = eps.iter().map(|&e| (g + 1 - e - g / (e + 2)).max(row_floor)).collect();
            if self.use_row_bound && (need.iter().any(|&v| v > row_cap) || need.iter().sum::<i64>() > 2 * t) {
                out.settled += 1;
                continue;
            }
            for_each_with_sum(self.shape, self.bounds, t, &mut |xs| match evaluate(self.shape, eps, xs, self.min_cut) {
                Leaf::Excluded => {}
                Leaf::Certified => out.explicit += 1,
                Leaf::Fails => {
                    out.explicit += 1;
                    out.counterexample_count += 1;
                    if out.counterexamples.len() < MAX_STORED_COUNTEREXAMPLES {
                        if let Some(c) = self.counterexample(eps, xs, g, above) {
                            out.counterexamples.push(c);
                        }
                    }
                }
            });
        }
        out
    }

    fn counterexample(&self, eps: &[i64], xs: &[i64], g: i64, above: u64) -> Option<Counterexample> {
        let filtration = filtration_witness(self.ranks, self.bounds, eps, g)?;
        let decomposition = DecompositionProfile::from_upper(eps.iter().map(|e| 2 * e).collect(), xs).ok()?;
        debug_assert_eq!(decomposition.genus(), g);
        Some(Counterexample { h0_h1: filtration.h0_h1(), filtration, decomposition, genus: g, matching_filtrations: above })
    }
}

/// All `ε`-vectors in `0..=eps_max`, lexicographic.
fn eps_vectors(n: usize, eps_max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut e = vec![0i64; n];
    loop {
        out.push(e.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if e[k] < eps_max {
                e[k] += 1;
                break;
            }
            e[k] = 0;
        }
    }
}

pub fn exhaustive_case_check(n: usize, bounds: &CaseBox) -> Result<BoxReport> {
    exhaustive_case_check_with(n, bounds, CheckOptions::default())
}

pub fn exhaustive_case_check_with(n: usize, bounds: &CaseBox, options: CheckOptions) -> Result<BoxReport> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("exhaustive checks cover n = 2, 3, 4, not {n}")));
    }
    bounds.validate()?;
    let start = Instant::now();
    let min_cut = options.enforce_two_connected.then_some(2);
    let shape = Shape::new(n);
    let (t_min, sums) = count_by_sum(&shape, bounds, min_cut);
    let ranks = rank_vectors(n, bounds.r_max);
    let ctx = Context { shape: &shape, bounds, ranks: &ranks, t_min, sums: &sums, min_cut, use_row_bound: options.use_row_bound };
    let summaries: Vec<EpsSummary> = eps_vectors(n, bounds.eps_max).par_iter().map(|eps| ctx.check_eps(eps)).collect();

    let mut report = BoxReport {
        n,
        bounds: *bounds,
        two_connected_enforced: options.enforce_two_connected,
        instances_checked: 0,
        feasible_filtrations: 0,
        decompositions: sums.iter().sum(),
        classes_settled_by_row_bound: 0,
        matrices_checked_explicitly: 0,
        counterexample_count: 0,
        counterexamples: Vec::new(),
        cross_checks: Vec::new(),
        elapsed_ms: 0,
    };
    for s in summaries {
        report.instances_checked += s.instances;
        report.feasible_filtrations += s.feasible;
        report.classes_settled_by_row_bound += s.settled;
        report.matrices_checked_explicitly += s.explicit;
        report.counterexample_count += s.counterexample_count;
        let room = MAX_STORED_COUNTEREXAMPLES - report.counterexamples.len();
        report.counterexamples.extend(s.counterexamples.into_iter().take(room));
    }
    report.cross_checks = match n {
        2 => vec![n2_expansion_inequality(bounds), n2_chain_bound(bounds)],
        3 => vec![n3_exceptional_chain(bounds)],
        _ => n4_isotropic_bounds(bounds, &shape, min_cut),
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// `(r₁ + r₂)(s₁ + s₂) <= (r₁s₁ + 1)(r₂s₂ + 1)` for `rᵢ, sᵢ >= 1`.
pub fn n2_expansion_inequality(b: &CaseBox) -> CrossCheck {
    let mut check = CrossCheck::new("(r1+r2)(s1+s2) <= (r1 s1+1)(r2 s2+1) for s1, s2 >= 1");
    for r1 in 1..=b.r_max {
        for r2 in 1..=b.r_max {
            for s1 in 1..=b.s_max {
                for s2 in 1..=b.s_max {
                    let ok = (r1 + r2) * (s1 + s2) <= (r1 * s1 + 1) * (r2 * s2 + 1);
                    check.record(ok, || format!("r = ({r1}, {r2}), s = ({s1}, {s2})"));
                }
            }
        }
    }
    check
}

/// `h⁰h¹ <= (ε₁ + 2)(ε₂ + 2)` for feasible two-piece filtrations with
/// `s₁, s₂ >= 1`.
pub fn n2_chain_bound(b: &CaseBox) -> CrossCheck {
    let mut check = CrossCheck::new("h0 h1 <= (eps1+2)(eps2+2) for feasible n=2 profiles with s1, s2 >= 1");
    let s_lo = b.s_min.max(1);
    for e1 in 0..=b.eps_max {
        for e2 in 0..=b.eps_max {
            for r1 in 1..=b.r_max {
                for r2 in 1..=b.r_max {
                    for s1 in s_lo..=b.s_max {
                        for s2 in s_lo..=b.s_max {
                            let Ok(fp) = FiltrationProfile::from_triples(&[(r1, s1, e1), (r2, s2, e2)]) else {
                                continue;
                            };
                            if !profile_feasible(&fp) {
                                continue;
                            }
                            check.record(fp.h0_h1() <= (e1 + 2) * (e2 + 2), || format!("{fp:?}"));
                        }
                    }
                }
            }
        }
    }
    check
}

/// For the exceptional three-part square patterns `(2ε₁, 2ε₂, 0)` with
/// `ε₂ ∈ {0, 1}` (and `ε₁ <= 3` when `ε₂ = 1`): whenever neither grouping
/// condition holds under any numbering, `χ(D₁)χ(D₂ + D₃) >= c₁(ε₁, ε₂)`.
pub fn n3_exceptional_chain(b: &CaseBox) -> CrossCheck {
    use crate::bn::no_negative_intersections_any_order;
    use crate::cases::triples::c1;
    let mut check = CrossCheck::new("chi(D1) chi(D2+D3) >= c1(eps1, eps2) when both grouping conditions fail");
    let patterns = (0..=b.eps_max).flat_map(|e1| {
        [(e1, 0), (e1, 1)].into_iter().filter(move |&(e1, e2)| e2 == 0 || (1..=3).contains(&e1))
    });
    for (e1, e2) in patterns {
        for x12 in b.x_min..=b.x_max {
            for x13 in b.x_min..=b.x_max {
                for x23 in b.x_min..=b.x_max {
                    let Ok(p) = DecompositionProfile::from_upper(vec![2 * e1, 2 * e2, 0], &[x12, x13, x23]) else {
                        continue;
                    };
                    if !p.is_two_connected() || !matches!(no_negative_intersections_any_order(&p), Ok(None)) {
                        continue;
                    }
                    let lhs = p.chi(&[0]) * p.chi(&[1, 2]);
                    check.record(lhs >= c1(e1, e2), || format!("{p:?}"));
                }
            }
        }
    }
    check
}

/// Four isotropic pieces: `h¹ <= 4`; `h¹ = 4` forces `h⁰h¹ = 4·4 = 16`;
/// `h¹ <= 3` gives `h⁰ <= 8` and `h⁰h¹ <= 8·3 = 24`. Also every violating
/// instance with `r = s = (1, 1, 1, 1)` has a partition certificate.
fn n4_isotropic_bounds(b: &CaseBox, shape: &Shape, min_cut: Option<i64>) -> Vec<CrossCheck> {
    let mut h1 = CrossCheck::new("eps = 0: h1 <= 4");
    let mut sixteen = CrossCheck::new("eps = 0, h1 = 4: h0 h1 = 4*4 = 16");
    let mut twenty_four = CrossCheck::new("eps = 0, h1 <= 3: h0 <= 8 and h0 h1 <= 8*3 = 24");
    let eps = [0i64; 4];
    for r in rank_vectors(4, b.r_max) {
        let bounds: Vec<(i64, i64)> = (0..4).map(|i| s_interval(b, r[i], 0, i == 3)).collect();
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            continue;
        }
        for s0 in bounds[0].0..=bounds[0].1 {
            for s1 in bounds[1].0..=bounds[1].1 {
                for s2 in bounds[2].0..=bounds[2].1 {
                    for s3 in bounds[3].0..=bounds[3].1 {
                        let s = [s0, s1, s2, s3];
                        let (h0, h1v): (i64, i64) = (r.iter().sum(), s.iter().sum());
                        let describe = || format!("r = {r:?}, s = {s:?}");
                        h1.record(h1v <= 4, describe);
                        if h1v == 4 {
                            sixteen.record(h0 * h1v == 16, describe);
                        } else {
                            twenty_four.record(h0 <= 8 && h0 * h1v <= 24, describe);
                        }
                    }
                }
            }
        }
    }
    let unit = b.s_min <= 1 && b.s_max >= 1;
    let mut certified = CrossCheck::new("eps = 0, r = s = (1,1,1,1): every instance with 16 > g has a partition certificate");
    if unit {
        // g = t + 1 < 16
        let t_hi = 14.min(6 * b.x_max);
        certified = (6 * b.x_min..=t_hi)
            .into_par_iter()
            .map(|t| {
                let mut part = CrossCheck::new(&certified.name);
                for_each_with_sum(shape, b, t, &mut |xs| match evaluate(shape, &eps, xs, min_cut) {
                    Leaf::Excluded => {}
                    Leaf::Certified => part.record(true, String::new),
                    Leaf::Fails => part.record(false, || format!("x = {xs:?}")),
                });
                part
            })
            .reduce(|| CrossCheck::new(&certified.name), CrossCheck::merge);
    }
    vec![h1, sixteen, twenty_four, certified]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_cuts() {
        let s = Shape::new(4);
        assert_eq!(s.cuts.len(), 7);
        assert_eq!(s.m(), 6);
        assert_eq!(Shape::new(2).cuts, vec![1]);
    }

    #[test]
    fn sum_counts_match_direct_enumeration() {
        let b = CaseBox { r_max: 2, s_min: -2, s_max: 2, eps_max: 1, x_min: -2, x_max: 4 };
        for n in 2..=4 {
            let shape = Shape::new(n);
            for min_cut in [Some(2), None] {
                let (t_min, counts) = count_by_sum(&shape, &b, min_cut);
                for (k, &c) in counts.iter().enumerate() {
                    let t = t_min + k as i64;
                    let mut direct = 0u64;
                    for_each_with_sum(&shape, &b, t, &mut |xs| {
                        if !matches!(evaluate(&shape, &[0; 4][..n], xs, min_cut), Leaf::Excluded) {
                            direct += 1;
                        }
                    });
                    assert_eq!(c, direct, "n = {n}, t = {t}, min_cut = {min_cut:?}");
                }
            }
        }
    }

    #[test]
    fn histogram_matches_direct_enumeration() {
        let b = CaseBox { r_max: 3, s_min: -3, s_max: 3, eps_max: 2, x_min: 0, x_max: 0 };
        for eps in [vec![0, 0], vec![2, 1], vec![1, 0, 2]] {
            let n = eps.len();
            let ranks = rank_vectors(n, b.r_max);
            let hist = ProductHistogram::build(&ranks, &b, &eps);
            let mut direct = std::collections::BTreeMap::new();
            let mut total = 0;
            let mut rs = vec![1i64; n];
            let mut ss = vec![b.s_min; n];
            // full odometer over r and s
            loop {
                let entries: Vec<_> = (0..n).map(|i| (rs[i], ss[i], eps[i])).collect();
                let fp = FiltrationProfile::from_triples(&entries).unwrap();
                if profile_feasible(&fp) {
                    *direct.entry(fp.h0_h1()).or_insert(0u64) += 1;
                    total += 1;
                }
                let mut k = 2 * n;
                let done = loop {
                    if k == 0 {
                        break true;
                    }
                    k -= 1;
                    let (v, lo, hi) = if k < n { (&mut rs[k], 1, b.r_max) } else { (&mut ss[k - n], b.s_min, b.s_max) };
                    if *v < hi {
                        *v += 1;
                        break false;
                    }
                    *v = lo;
                };
                if done {
                    break;
                }
            }
            assert_eq!(hist.total, total);
            for (&p, &c) in &direct {
                assert_eq!(hist.count_at(p), c, "eps {eps:?}, p = {p}");
            }
            let above_zero: u64 = direct.iter().filter(|(&p, _)| p > 0).map(|(_, c)| c).sum();
            assert_eq!(hist.above(0), above_zero);
        }
    }

    #[test]
    fn witness_is_feasible_and_large() {
        let b = CaseBox::default_for(3).unwrap();
        let ranks = rank_vectors(3, b.r_max);
        let w = filtration_witness(&ranks, &b, &[2, 1, 0], 5).unwrap();
        assert!(profile_feasible(&w));
        assert!(w.h0_h1() > 5);
        assert_eq!(filtration_witness(&ranks, &b, &[0, 0, 0], 1_000), None);
    }

    #[test]
    fn single_instance() {
        let fp = FiltrationProfile::from_triples(&[(1, 1, 0), (1, 1, 0)]).unwrap();
        let dp = DecompositionProfile::from_upper(vec![0, 0], &[2]).unwrap();
        let InstanceOutcome::Certified { certificate } = check_instance(&fp, &dp).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!((certificate.bound_product(), certificate.genus), (4, 3));
        let dp = DecompositionProfile::from_upper(vec![0, 0], &[3]).unwrap();
        assert!(matches!(check_instance(&fp, &dp).unwrap(), InstanceOutcome::NotApplicable { .. }));
    }

    #[test]
    fn rejects_bad_boxes() {
        let mut b = CaseBox::default_for(2).unwrap();
        b.s_min = 5;
        b.s_max = 4;
        assert!(matches!(exhaustive_case_check(2, &b), Err(Error::InvalidBox(_))));
        assert!(exhaustive_case_check(5, &CaseBox::default_for(3).unwrap()).is_err());
        assert!(CaseBox::default_for(7).is_err());
    }

    #[test]
    fn small_boxes_have_no_counterexamples() {
        let b = CaseBox { r_max: 3, s_min: -3, s_max: 3, eps_max: 2, x_min: -3, x_max: 6 };
        for n in 2..=4 {
            let report = exhaustive_case_check(n, &b).unwrap();
            assert_eq!(report.counterexample_count, 0, "n = {n}");
            assert!(report.instances_checked > 0);
            report.reverify_counterexamples().unwrap();
        }
    }
}
