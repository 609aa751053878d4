//! Small divisors and exhaustive certification of the non-resonance bounds.
//!
//! A fourth-order divisor is `Δ = (σ_1+σ_1')ω_i + (σ_2+σ_2')ω_j`, a sixth-order
//! one adds `(σ_3+σ_3')ω_k`. Each index slot carries a [`SignPair`].
//!
//! Sweeps enumerate canonical sign classes instead of raw sign tuples:
//! up to a global sign flip every divisor equals one of
//!
//! | order | class | value |
//! |-------|-------|-------|
//! | 4 | 1 | `2ω_i` |
//! | 4 | 2 | `2(ω_i - ω_j)`, `i > j` |
//! | 4 | 3 | `2(ω_i + ω_j)`, `i >= j` |
//! | 6 | 1 | `2(ω_i + ω_j + ω_k)`, `i <= j <= k` |
//! | 6 | 2 | `2(ω_i - ω_j + ω_k)`, `i < j < k` |
//! | 6 | 3 | `2(ω_i + ω_j - ω_k)`, `i <= j < k` |
//! | 6 | 4 | `2(ω_i - ω_j - ω_k)`, `i < j <= k` |
//! | 6 | 5 | `2(ω_i + ω_j)`, `i <= j` |
//! | 6 | 6 | `2(ω_i - ω_j)`, `i < j` |
//! | 6 | 7 | `2ω_i` |
//!
//! The raw enumerators ([`certify_prop_4th_raw`], [`certify_prop_6th_raw`])
//! exist to cross-check the reduction on small ranges.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{frequencies, mu_unchecked};

/// Relative slack applied to certified lower bounds.
pub const TOL_CERT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[must_use]
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[must_use]
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The two signs `(σ, σ')` attached to one index slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignPair(pub Sign, pub Sign);

impl SignPair {
    pub const PP: SignPair = SignPair(Sign::Plus, Sign::Plus);
    pub const PM: SignPair = SignPair(Sign::Plus, Sign::Minus);
    pub const MP: SignPair = SignPair(Sign::Minus, Sign::Plus);
    pub const MM: SignPair = SignPair(Sign::Minus, Sign::Minus);
    pub const ALL: [SignPair; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    /// `σ + σ'` in `{-2, 0, 2}`.
    #[must_use]
    pub fn sum(self) -> i64 {
        self.0.value() + self.1.value()
    }

    #[must_use]
    pub fn is_balanced(self) -> bool {
        self.0 != self.1
    }

    #[must_use]
    pub fn flip(self) -> Self {
        SignPair(self.0.flip(), self.1.flip())
    }

    /// A representative pair with the given sum.
    #[must_use]
    pub fn with_sum(s: i64) -> Self {
        match s {
            2 => Self::PP,
            0 => Self::PM,
            -2 => Self::MM,
            _ => panic!("sign pair sum must be -2, 0 or 2"),
        }
    }
}

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

fn omega(j: usize, m: f64) -> f64 {
    let jf = j as f64;
    (jf.powi(4) + m * jf * jf).sqrt()
}

/// Fourth-order divisor.
#[must_use]
pub fn delta4(i: usize, j: usize, slot_i: SignPair, slot_j: SignPair, m: f64) -> f64 {
    slot_i.sum() as f64 * omega(i, m) + slot_j.sum() as f64 * omega(j, m)
}

/// Sixth-order divisor.
#[must_use]
pub fn delta6(i: usize, j: usize, k: usize, signs: [SignPair; 3], m: f64) -> f64 {
    signs[0].sum() as f64 * omega(i, m)
        + signs[1].sum() as f64 * omega(j, m)
        + signs[2].sum() as f64 * omega(k, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership4 {
    /// Integrable (resonant) set.
    I,
    /// Complement: removable by the fourth-order generating function.
    Ic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership6 {
    /// Vanishing divisor.
    Upsilon,
    /// Non-vanishing divisor.
    UpsilonC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResonanceClass4 {
    pub i: usize,
    pub j: usize,
    pub signs: [SignPair; 2],
    pub member_of: Membership4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResonanceClass6 {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub signs: [SignPair; 3],
    pub member_of: Membership6,
}

#[must_use]
pub fn classify4(i: usize, j: usize, slot_i: SignPair, slot_j: SignPair) -> ResonanceClass4 {
    let resonant = if i != j {
        slot_i.is_balanced() && slot_j.is_balanced()
    } else {
        slot_i.sum() + slot_j.sum() == 0
    };
    ResonanceClass4 {
        i,
        j,
        signs: [slot_i, slot_j],
        member_of: if resonant { Membership4::I } else { Membership4::Ic },
    }
}

/// Decides `Σ c_ℓ ω_ℓ = 0` without floating point.
///
/// `combination` lists integer coefficients per index (repeated indices are
/// merged). The divisor vanishes identically when every merged coefficient is
/// zero; at `m = 0`, where `ω_ℓ = ℓ²`, it also vanishes when `Σ c_ℓ ℓ² = 0`.
/// For `-1/2 <= m <= 1`, `m != 0`, no other cancellation occurs up to sixth
/// order, which is what the sixth-order sweep certifies.
#[must_use]
pub fn structurally_resonant(combination: &[(usize, i64)], m: f64) -> bool {
    let mut merged: Vec<(usize, i64)> = Vec::with_capacity(combination.len());
    for &(idx, c) in combination {
        match merged.iter_mut().find(|(l, _)| *l == idx) {
            Some(entry) => entry.1 += c,
            None => merged.push((idx, c)),
        }
    }
    if merged.iter().all(|&(_, c)| c == 0) {
        return true;
    }
    if m == 0.0 {
        let s: i128 = merged.iter().map(|&(l, c)| c as i128 * (l as i128) * (l as i128)).sum();
        return s == 0;
    }
    false
}

#[must_use]
pub fn classify6(i: usize, j: usize, k: usize, signs: [SignPair; 3], m: f64) -> ResonanceClass6 {
    let comb = [(i, signs[0].sum()), (j, signs[1].sum()), (k, signs[2].sum())];
    ResonanceClass6 {
        i,
        j,
        k,
        signs,
        member_of: if structurally_resonant(&comb, m) {
            Membership6::Upsilon
        } else {
            Membership6::UpsilonC
        },
    }
}

/// Minimum of one canonical class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMinimum {
    pub class: u8,
    pub indices: Vec<usize>,
    pub delta: f64,
}

/// Outward-rounded recomputation of the minimising divisor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigorousCheck {
    /// Lower bound on `|Δ|` at the minimiser.
    pub delta_lower: f64,
    /// Upper bound on the claimed constant.
    pub bound_upper: f64,
    /// The enclosures overlap within `TOL_CERT`: the bound is attained.
    pub sharp: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report4 {
    pub m: f64,
    pub i_max: usize,
    /// The claimed lower bound `μ(m)`.
    pub bound: f64,
    pub min_abs_delta: f64,
    pub argmin: ResonanceClass4,
    pub ratio_to_bound: f64,
    pub pass: bool,
    /// Minimum over cases whose largest index lies in the top tenth of the range.
    pub top_decade_min: f64,
    pub per_class: Vec<ClassMinimum>,
    pub rigorous: RigorousCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report6 {
    pub m: f64,
    pub i_max: usize,
    /// The claimed lower bound `(7/8)|m|`.
    pub bound: f64,
    pub min_abs_delta: f64,
    pub argmin: ResonanceClass6,
    pub ratio_to_bound: f64,
    pub pass: bool,
    pub top_decade_min: f64,
    pub per_class: Vec<ClassMinimum>,
    pub rigorous: RigorousCheck,
}

/// Running minimum with lexicographic tie-break on the index tuple.
#[derive(Debug, Clone, Copy)]
struct Best {
    abs: f64,
    key: [usize; 3],
    class: u8,
    delta: f64,
}

impl Best {
    const NONE: Best = Best { abs: f64::INFINITY, key: [usize::MAX; 3], class: 0, delta: f64::NAN };

    fn better(self, other: Best) -> Best {
        let ord = self
            .abs
            .partial_cmp(&other.abs)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(self.key.cmp(&other.key))
            .then(self.class.cmp(&other.class));
        if ord.is_le() {
            self
        } else {
            other
        }
    }

    fn offer(&mut self, delta: f64, key: [usize; 3], class: u8) {
        let cand = Best { abs: delta.abs(), key, class, delta };
        *self = self.better(cand);
    }
}

#[derive(Debug, Clone, Copy)]
struct Sweep<const C: usize> {
    overall: Best,
    top: Best,
    classes: [Best; C],
}

impl<const C: usize> Sweep<C> {
    fn new() -> Self {
        Self { overall: Best::NONE, top: Best::NONE, classes: [Best::NONE; C] }
    }

    fn merge(mut self, other: Self) -> Self {
        self.overall = self.overall.better(other.overall);
        self.top = self.top.better(other.top);
        for c in 0..C {
            self.classes[c] = self.classes[c].better(other.classes[c]);
        }
        self
    }

    fn offer(&mut self, delta: f64, key: [usize; 3], class: u8, in_top: bool) {
        self.overall.offer(delta, key, class);
        if in_top {
            self.top.offer(delta, key, class);
        }
        self.classes[class as usize - 1].offer(delta, key, class);
    }
}

fn top_start(i_max: usize) -> usize {
    i_max - i_max / 10
}

const PATTERNS4: [(i64, i64, u8); 4] = [(2, 0, 1), (0, 2, 1), (2, -2, 2), (2, 2, 3)];

fn class4_signs(si: i64, sj: i64) -> [SignPair; 2] {
    [SignPair::with_sum(si), SignPair::with_sum(sj)]
}

/// Exhaustive check of `|Δ| >= μ(m)` over the fourth-order complement set.
pub fn certify_prop_4th(i_max: usize, m: f64) -> Result<Report4> {
    if !(m >= -0.5) {
        return Err(Error::Hypothesis(format!("fourth-order bound requires m >= -1/2, got {m}")));
    }
    if i_max < 2 {
        return Err(Error::Domain(format!("i_max = {i_max} must be at least 2")));
    }
    let om = frequencies(i_max, m);
    let top = top_start(i_max);
    let sweep = (1..=i_max)
        .into_par_iter()
        .map(|i| {
            let mut sw = Sweep::<3>::new();
            for j in 1..=i_max {
                let in_top = i.max(j) > top;
                for &(si, sj, class) in &PATTERNS4 {
                    if i == j && si + sj == 0 {
                        continue;
                    }
                    // class 2 and 3 are listed with i >= j; the mirrored pairs are duplicates
                    if class >= 2 && i < j {
                        continue;
                    }
                    let d = si as f64 * om[i - 1] + sj as f64 * om[j - 1];
                    sw.offer(d, [i, j, 0], class, in_top);
                }
            }
            sw
        })
        .reduce(Sweep::new, Sweep::merge);

    let best = sweep.overall;
    let pattern = PATTERNS4
        .iter()
        .find(|&&(si, sj, c)| {
            c == best.class
                && (si as f64 * om[best.key[0] - 1] + sj as f64 * om[best.key[1] - 1] - best.delta).abs() == 0.0
        })
        .copied()
        .unwrap_or((2, 0, 1));
    let signs = class4_signs(pattern.0, pattern.1);
    let argmin = classify4(best.key[0], best.key[1], signs[0], signs[1]);
    let bound = mu_unchecked(m);
    let rigorous = rigorous_check(
        &[(best.key[0], pattern.0), (best.key[1], pattern.1)],
        m,
        &mu_interval(m),
    );
    Ok(Report4 {
        m,
        i_max,
        bound,
        min_abs_delta: best.abs,
        argmin,
        ratio_to_bound: best.abs / bound,
        pass: best.abs >= bound * (1.0 - TOL_CERT),
        top_decade_min: sweep.top.abs,
        per_class: class_minima(&sweep.classes),
        rigorous,
    })
}

/// Raw enumeration over all sixteen sign tuples; for cross-checking only.
pub fn certify_prop_4th_raw(i_max: usize, m: f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 1..=i_max {
        for j in 1..=i_max {
            for a in SignPair::ALL {
                for b in SignPair::ALL {
                    if classify4(i, j, a, b).member_of == Membership4::Ic {
                        best = best.min(delta4(i, j, a, b, m).abs());
                    }
                }
            }
        }
    }
    best
}

fn class_minima<const C: usize>(classes: &[Best; C]) -> Vec<ClassMinimum> {
    classes
        .iter()
        .filter(|b| b.abs.is_finite())
        .map(|b| ClassMinimum {
            class: b.class,
            indices: b.key.iter().copied().filter(|&x| x != 0).collect(),
            delta: b.delta,
        })
        .collect()
}

/// Slot sums and index layout of the seven sixth-order classes.
fn class6_layout(class: u8, i: usize, j: usize, k: usize) -> ([usize; 3], [i64; 3]) {
    match class {
        1 => ([i, j, k], [2, 2, 2]),
        2 => ([i, j, k], [2, -2, 2]),
        3 => ([i, j, k], [2, 2, -2]),
        4 => ([i, j, k], [2, -2, -2]),
        // the balanced third slot does not affect the divisor
        5 => ([i, j, j], [2, 2, 0]),
        6 => ([i, j, j], [2, -2, 0]),
        _ => ([i, i, i], [2, 0, 0]),
    }
}

fn pythagorean(i: usize, j: usize, k: usize) -> bool {
    i * i + j * j == k * k
}

fn sweep6(i_max: usize, m: f64) -> Sweep<7> {
    let om = frequencies(i_max, m);
    let top = top_start(i_max);
    let at_zero = m == 0.0;
    (1..=i_max)
        .into_par_iter()
        .map(|i| {
            let mut sw = Sweep::<7>::new();
            let wi = om[i - 1];
            sw.offer(2.0 * wi, [i, 0, 0], 7, i > top);
            for j in i..=i_max {
                let wj = om[j - 1];
                sw.offer(2.0 * (wi + wj), [i, j, 0], 5, j > top);
                if j > i {
                    sw.offer(2.0 * (wi - wj), [i, j, 0], 6, j > top);
                }
                for k in j..=i_max {
                    let wk = om[k - 1];
                    let in_top = k > top;
                    sw.offer(2.0 * (wi + wj + wk), [i, j, k], 1, in_top);
                    if i < j && j < k {
                        sw.offer(2.0 * (wi - wj + wk), [i, j, k], 2, in_top);
                    }
                    if j < k && !(at_zero && pythagorean(i, j, k)) {
                        sw.offer(2.0 * (wi + wj - wk), [i, j, k], 3, in_top);
                    }
                    if i < j {
                        sw.offer(2.0 * (wi - wj - wk), [i, j, k], 4, in_top);
                    }
                }
            }
            sw
        })
        .reduce(Sweep::new, Sweep::merge)
}

fn check_sixth_order_m(m: f64) -> Result<()> {
    if m == 0.0 {
        return Err(Error::Hypothesis(
            "sixth-order bound requires m != 0 (Pythagorean-triple resonances)".into(),
        ));
    }
    if !(-0.5..=1.0).contains(&m) {
        return Err(Error::Hypothesis(format!("sixth-order bound requires -1/2 <= m <= 1, got {m}")));
    }
    Ok(())
}

/// Exhaustive check of `|Δ| >= (7/8)|m|` over the sixth-order complement set.
pub fn certify_prop_6th(i_max: usize, m: f64) -> Result<Report6> {
    check_sixth_order_m(m)?;
    if i_max < 1 {
        return Err(Error::Domain("i_max must be positive".into()));
    }
    let sweep = sweep6(i_max, m);
    let best = sweep.overall;
    let (idx, sums) = class6_layout(best.class, best.key[0], best.key[1], best.key[2]);
    let signs = [SignPair::with_sum(sums[0]), SignPair::with_sum(sums[1]), SignPair::with_sum(sums[2])];
    let argmin = classify6(idx[0], idx[1], idx[2], signs, m);
    let bound = 0.875 * m.abs();
    let comb = [(idx[0], sums[0]), (idx[1], sums[1]), (idx[2], sums[2])];
    let rigorous = rigorous_check(&comb, m, &Interval::point(m.abs()).mul(Interval::point(0.875)));
    Ok(Report6 {
        m,
        i_max,
        bound,
        min_abs_delta: best.abs,
        argmin,
        ratio_to_bound: best.abs / bound,
        pass: best.abs >= bound * (1.0 - TOL_CERT),
        top_decade_min: sweep.top.abs,
        per_class: class_minima(&sweep.classes),
        rigorous,
    })
}

/// Raw enumeration over ordered index triples and all 64 sign tuples.
pub fn certify_prop_6th_raw(i_max: usize, m: f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 1..=i_max {
        for j in 1..=i_max {
            for k in 1..=i_max {
                for a in SignPair::ALL {
                    for b in SignPair::ALL {
                        for c in SignPair::ALL {
                            let s = [a, b, c];
                            if classify6(i, j, k, s, m).member_of == Membership6::UpsilonC {
                                best = best.min(delta6(i, j, k, s, m).abs());
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

/// Canonical sixth-order patterns that vanish structurally, as sorted index
/// triples `(i, j, k)` with divisor `2(ω_i + ω_j - ω_k)`.
#[must_use]
pub fn resonant_triples_6th(i_max: usize, m: f64) -> Vec<(usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize)> = (1..=i_max)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut local = Vec::new();
            for j in i..=i_max {
                for k in j..=i_max {
                    for class in 1..=4u8 {
                        let (idx, sums) = class6_layout(class, i, j, k);
                        let admissible = match class {
                            2 => i < j && j < k,
                            3 => j < k,
                            4 => i < j,
                            _ => true,
                        };
                        if admissible
                            && structurally_resonant(
                                &[(idx[0], sums[0]), (idx[1], sums[1]), (idx[2], sums[2])],
                                m,
                            )
                        {
                            local.push((i, j, k));
                        }
                    }
                }
            }
            local
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Outward rounding.

/// Closed interval with directed-rounding arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s.mul_add(s, -x) > 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s.mul_add(s, -x) < 0.0 {
        s.next_up()
    } else {
        s
    }
}

impl Interval {
    #[must_use]
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[must_use]
    pub fn add(self, o: Self) -> Self {
        Self { lo: add_down(self.lo, o.lo), hi: add_up(self.hi, o.hi) }
    }

    #[must_use]
    pub fn mul(self, o: Self) -> Self {
        let cands_lo = [
            mul_down(self.lo, o.lo),
            mul_down(self.lo, o.hi),
            mul_down(self.hi, o.lo),
            mul_down(self.hi, o.hi),
        ];
        let cands_hi = [
            mul_up(self.lo, o.lo),
            mul_up(self.lo, o.hi),
            mul_up(self.hi, o.lo),
            mul_up(self.hi, o.hi),
        ];
        Self {
            lo: cands_lo.iter().copied().fold(f64::INFINITY, f64::min),
            hi: cands_hi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Square root of a non-negative interval.
    #[must_use]
    pub fn sqrt(self) -> Self {
        Self { lo: sqrt_down(self.lo.max(0.0)), hi: sqrt_up(self.hi) }
    }

    /// Lower bound of `|x|` over the interval.
    #[must_use]
    pub fn abs_lower(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    #[must_use]
    pub fn min(self, o: Self) -> Self {
        Self { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }
}

/// Enclosure of `ω_j`.
#[must_use]
pub fn omega_interval(j: usize, m: f64) -> Interval {
    let j2 = Interval::point((j * j) as f64);
    j2.mul(j2).add(Interval::point(m).mul(j2)).sqrt()
}

fn mu_interval(m: f64) -> Interval {
    let a = Interval::point(1.0).add(Interval::point(m)).sqrt().mul(Interval::point(2.0));
    let b = Interval::point(4.0).add(Interval::point(m)).sqrt().mul(Interval::point(1.5));
    a.min(b)
}

fn rigorous_check(comb: &[(usize, i64)], m: f64, bound: &Interval) -> RigorousCheck {
    let delta = comb.iter().fold(Interval::point(0.0), |acc, &(j, c)| {
        acc.add(omega_interval(j, m).mul(Interval::point(c as f64)))
    });
    let delta_lower = delta.abs_lower();
    let strict = delta_lower >= bound.hi;
    let delta_upper = delta.lo.abs().max(delta.hi.abs());
    let sharp = !strict && delta_upper >= bound.lo && (delta_lower - bound.hi).abs() <= TOL_CERT * bound.hi;
    RigorousCheck { delta_lower, bound_upper: bound.hi, sharp, pass: strict || sharp }
}
