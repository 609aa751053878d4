//! Sparse polynomials in `(z, z̄)` whose monomials are products of index pairs
//! `z_ℓ^σ z_ℓ^σ'`, with Poisson brackets and certified majorant-norm bounds.
//!
//! A monomial is stored by its exponents: for each index `ℓ` the powers `a_ℓ`
//! of `z_ℓ` and `b_ℓ` of `z̄_ℓ`, with `a_ℓ + b_ℓ` even. The pair list is
//! recovered canonically as `min(a, b)` mixed pairs `+-` followed by `++` or
//! `--` pairs.
//!
//! The bracket is `{F, G} = i Σ_j (∂_{z_j} F ∂_{z̄_j} G - ∂_{z̄_j} F ∂_{z_j} G)`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::BeamHamiltonian;
use crate::resonance::{structurally_resonant, Sign, SignPair};
use crate::spectrum::WeightSequence;

/// Exponents of one index inside a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Factor {
    pub index: u32,
    pub z: u8,
    pub zbar: u8,
}

impl Factor {
    fn pairs(self) -> u32 {
        (u32::from(self.z) + u32::from(self.zbar)) / 2
    }
}

/// Canonical paired monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct PairedMonomial {
    factors: Vec<Factor>,
}

impl PairedMonomial {
    /// Builds the monomial `Π z_ℓ^σ z_ℓ^σ'` from index slots.
    #[must_use]
    pub fn from_pairs(pairs: &[(usize, SignPair)]) -> Self {
        let mut map: BTreeMap<u32, (u8, u8)> = BTreeMap::new();
        for &(idx, sp) in pairs {
            let e = map.entry(idx as u32).or_default();
            for s in [sp.0, sp.1] {
                match s {
                    Sign::Plus => e.0 += 1,
                    Sign::Minus => e.1 += 1,
                }
            }
        }
        Self { factors: map.into_iter().map(|(index, (z, zbar))| Factor { index, z, zbar }).collect() }
    }

    /// Builds a monomial from `(index, power of z, power of z̄)` triples.
    pub fn from_exponents(exps: &[(usize, u8, u8)]) -> Result<Self> {
        let mut map: BTreeMap<u32, (u8, u8)> = BTreeMap::new();
        for &(idx, a, b) in exps {
            if idx == 0 {
                return Err(Error::Domain("mode indices start at 1".into()));
            }
            let e = map.entry(idx as u32).or_default();
            e.0 += a;
            e.1 += b;
        }
        let factors: Vec<Factor> = map
            .into_iter()
            .filter(|(_, (a, b))| a + b > 0)
            .map(|(index, (z, zbar))| Factor { index, z, zbar })
            .collect();
        if let Some(f) = factors.iter().find(|f| (f.z + f.zbar) % 2 != 0) {
            return Err(Error::Domain(format!("index {} appears an odd number of times", f.index)));
        }
        Ok(Self { factors })
    }

    #[must_use]
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    #[must_use]
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| usize::from(f.z) + usize::from(f.zbar)).sum()
    }

    #[must_use]
    pub fn max_index(&self) -> usize {
        self.factors.last().map_or(0, |f| f.index as usize)
    }

    /// True when every index has matching powers of `z` and `z̄`.
    #[must_use]
    pub fn is_paired(&self) -> bool {
        self.factors.iter().all(|f| (f.z + f.zbar) % 2 == 0)
    }

    /// Canonical pair decomposition.
    #[must_use]
    pub fn pairs(&self) -> Vec<(usize, SignPair)> {
        let mut out = Vec::new();
        for f in &self.factors {
            let idx = f.index as usize;
            let mixed = f.z.min(f.zbar);
            for _ in 0..mixed {
                out.push((idx, SignPair::PM));
            }
            let extra = if f.z > f.zbar { SignPair::PP } else { SignPair::MM };
            for _ in 0..(f.z.max(f.zbar) - mixed) / 2 {
                out.push((idx, extra));
            }
        }
        out
    }

    /// Integer coefficients `a_ℓ - b_ℓ` of the divisor `Σ (a_ℓ - b_ℓ) ω_ℓ`.
    #[must_use]
    pub fn combination(&self) -> Vec<(usize, i64)> {
        self.factors
            .iter()
            .map(|f| (f.index as usize, i64::from(f.z) - i64::from(f.zbar)))
            .collect()
    }

    /// `{M, Λ} = i Δ M` with `Δ = Σ (a_ℓ - b_ℓ) ω_ℓ`.
    #[must_use]
    pub fn divisor(&self, omega: &[f64]) -> f64 {
        self.factors
            .iter()
            .map(|f| (f64::from(f.z) - f64::from(f.zbar)) * omega[f.index as usize - 1])
            .sum()
    }

    /// Depends on actions only.
    #[must_use]
    pub fn is_action_monomial(&self) -> bool {
        self.factors.iter().all(|f| f.z == f.zbar)
    }

    #[must_use]
    pub fn conjugate(&self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| Factor { index: f.index, z: f.zbar, zbar: f.z })
                .collect(),
        }
    }

    fn product(&self, other: &Self) -> Self {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].index < b[j].index) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].index < a[i].index {
                out.push(b[j]);
                j += 1;
            } else {
                out.push(Factor { index: a[i].index, z: a[i].z + b[j].z, zbar: a[i].zbar + b[j].zbar });
                i += 1;
                j += 1;
            }
        }
        Self { factors: out }
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for f in &self.factors {
            let c = z[f.index as usize - 1];
            v *= c.powu(u32::from(f.z)) * c.conj().powu(u32::from(f.zbar));
        }
        v
    }
}

impl fmt::Display for PairedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|(i, s)| format!("{i}:{s}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Sparse polynomial over paired monomials with complex coefficients.
///
/// Real-valued polynomials satisfy `c(β, α) = conj c(α, β)`; see
/// [`PairedPolynomial::reality_defect`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairedPolynomial {
    terms: BTreeMap<PairedMonomial, Complex64>,
}

impl PairedPolynomial {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn from_terms(terms: impl IntoIterator<Item = (PairedMonomial, Complex64)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c · m`, dropping the entry if it cancels exactly.
    pub fn add_term(&mut self, m: PairedMonomial, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::default() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PairedMonomial, &Complex64)> {
        self.terms.iter()
    }

    #[must_use]
    pub fn coeff(&self, m: &PairedMonomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn coeff_mut(&mut self, m: &PairedMonomial) -> Option<&mut Complex64> {
        self.terms.get_mut(m)
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degrees present, ascending.
    #[must_use]
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(PairedMonomial::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    #[must_use]
    pub fn max_index(&self) -> usize {
        self.terms.keys().map(PairedMonomial::max_index).max().unwrap_or(0)
    }

    #[must_use]
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[must_use]
    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    #[must_use]
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    #[must_use]
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.product(m2), c1 * c2);
            }
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    #[must_use]
    pub fn filter(&self, mut keep: impl FnMut(&PairedMonomial, &Complex64) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// True when every monomial is paired.
    #[must_use]
    pub fn is_paired(&self) -> bool {
        self.terms.keys().all(PairedMonomial::is_paired)
    }

    /// `max |c(α,β) - conj c(β,α)|`; zero for real-valued polynomials.
    #[must_use]
    pub fn reality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (c - self.coeff(&m.conjugate()).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Reality check relative to the largest coefficient.
    #[must_use]
    pub fn is_real(&self, rel_tol: f64) -> bool {
        self.reality_defect() <= rel_tol * self.max_abs_coeff()
    }

    /// Value at `z`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        let n = self.max_index();
        if n > z.len() {
            return Err(Error::IndexOutOfRange { index: n, n: z.len() });
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(z)).sum())
    }

    /// Real part of the value, for real-valued polynomials.
    pub fn evaluate_real(&self, z: &[Complex64]) -> Result<f64> {
        Ok(self.evaluate(z)?.re)
    }

    /// `∂P/∂z̄_h` for every `h = 1..=z.len()`.
    pub fn grad_conj(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.max_index();
        if n > z.len() {
            return Err(Error::IndexOutOfRange { index: n, n: z.len() });
        }
        let mut out = vec![Complex64::default(); z.len()];
        let mut vals: Vec<Complex64> = Vec::with_capacity(8);
        for (m, c) in &self.terms {
            vals.clear();
            for f in &m.factors {
                let x = z[f.index as usize - 1];
                vals.push(x.powu(u32::from(f.z)) * x.conj().powu(u32::from(f.zbar)));
            }
            for (t, f) in m.factors.iter().enumerate() {
                if f.zbar == 0 {
                    continue;
                }
                let x = z[f.index as usize - 1];
                let mut v = c * f64::from(f.zbar) * x.powu(u32::from(f.z)) * x.conj().powu(u32::from(f.zbar) - 1);
                for (s, val) in vals.iter().enumerate() {
                    if s != t {
                        v *= val;
                    }
                }
                out[f.index as usize - 1] += v;
            }
        }
        Ok(out)
    }

    /// Hamiltonian vector field `-i ∂P/∂z̄`.
    pub fn vector_field(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self
            .grad_conj(z)?
            .into_iter()
            .map(|g| Complex64::new(0.0, -1.0) * g)
            .collect())
    }

    /// Drops monomials of degree above `d_max`.
    #[must_use]
    pub fn truncate_degree(&self, d_max: usize) -> Self {
        self.filter(|m, _| m.degree() <= d_max)
    }

    /// Homogeneous part of degree `d`.
    #[must_use]
    pub fn homogeneous_part(&self, d: usize) -> Self {
        self.filter(|m, _| m.degree() == d)
    }

    fn require_degree(&self, d: usize) -> Result<()> {
        match self.terms.keys().find(|m| m.degree() != d) {
            Some(m) => Err(Error::WrongDegree { expected: d, found: m.degree() }),
            None => Ok(()),
        }
    }

    /// Action-only part of a quartic polynomial.
    pub fn project_integrable4(&self) -> Result<Self> {
        self.require_degree(4)?;
        Ok(self.filter(|m, _| m.is_action_monomial()))
    }

    /// Part of a sextic polynomial with structurally vanishing divisor.
    pub fn project_integrable6(&self, m: f64) -> Result<Self> {
        self.require_degree(6)?;
        Ok(self.filter(|mono, _| structurally_resonant(&mono.combination(), m)))
    }

    /// One line per monomial: `coeff  idx:σσ' idx:σσ' ...`, canonical order.
    #[must_use]
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let _ = writeln!(s, "{:+.16e}{:+.16e}i  {}", c.re, c.im, m);
        }
        s
    }

    /// `Σ ω_j z_j z̄_j`.
    #[must_use]
    pub fn quadratic(omega: &[f64]) -> Self {
        Self::from_terms(omega.iter().enumerate().map(|(i, &w)| {
            (PairedMonomial::from_pairs(&[(i + 1, SignPair::PM)]), Complex64::new(w, 0.0))
        }))
    }

    /// The quartic part `G` of the truncated beam Hamiltonian.
    #[must_use]
    pub fn beam_quartic(h: &BeamHamiltonian) -> Self {
        // L = Σ a_j (z_j + z̄_j)²; G = L² / 32π
        let mut l = Self::zero();
        for (i, &a) in h.stretch.iter().enumerate() {
            let j = i + 1;
            l.add_term(PairedMonomial::from_pairs(&[(j, SignPair::PP)]), Complex64::new(a, 0.0));
            l.add_term(PairedMonomial::from_pairs(&[(j, SignPair::PM)]), Complex64::new(2.0 * a, 0.0));
            l.add_term(PairedMonomial::from_pairs(&[(j, SignPair::MM)]), Complex64::new(a, 0.0));
        }
        l.mul(&l).scale(Complex64::new(1.0 / (32.0 * std::f64::consts::PI), 0.0))
    }
}

impl fmt::Display for PairedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.debug_dump())
    }
}

/// Contributions of one pair of terms to `{F, G}`.
fn bracket_terms(
    m1: &PairedMonomial,
    c1: Complex64,
    m2: &PairedMonomial,
    c2: Complex64,
    out: &mut Vec<(PairedMonomial, Complex64)>,
) {
    let (a, b) = (&m1.factors, &m2.factors);
    let (mut i, mut j) = (0, 0);
    let mut product: Option<PairedMonomial> = None;
    let ic = Complex64::new(0.0, 1.0) * c1 * c2;
    while i < a.len() && j < b.len() {
        match a[i].index.cmp(&b[j].index) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                // ∂_z F ∂_z̄ G - ∂_z̄ F ∂_z G share the monomial F G / (z_j z̄_j)
                let k = i64::from(a[i].z) * i64::from(b[j].zbar) - i64::from(a[i].zbar) * i64::from(b[j].z);
                if k != 0 {
                    let prod = product.get_or_insert_with(|| m1.product(m2));
                    let idx = a[i].index;
                    let mut factors = prod.factors.clone();
                    let pos = factors.iter().position(|f| f.index == idx).expect("shared index");
                    factors[pos].z -= 1;
                    factors[pos].zbar -= 1;
                    if factors[pos].z == 0 && factors[pos].zbar == 0 {
                        factors.remove(pos);
                    }
                    out.push((PairedMonomial { factors }, ic * k as f64));
                }
                i += 1;
                j += 1;
            }
        }
    }
}

/// Poisson bracket `{F, G}`.
///
/// Term pairs are processed in parallel, contributions are summed in the
/// sequential order of `(F term, G term)`, so results are bitwise reproducible.
#[must_use]
pub fn bracket(f: &PairedPolynomial, g: &PairedPolynomial) -> PairedPolynomial {
    let f_terms: Vec<(&PairedMonomial, &Complex64)> = f.terms.iter().collect();
    let chunks: Vec<Vec<(PairedMonomial, Complex64)>> = f_terms
        .par_iter()
        .map(|(m1, c1)| {
            let mut local = Vec::new();
            for (m2, c2) in &g.terms {
                bracket_terms(m1, **c1, m2, *c2, &mut local);
            }
            local
        })
        .collect();
    let mut acc: BTreeMap<PairedMonomial, Complex64> = BTreeMap::new();
    for chunk in chunks {
        for (m, c) in chunk {
            *acc.entry(m).or_default() += c;
        }
    }
    acc.retain(|_, c| *c != Complex64::default());
    PairedPolynomial { terms: acc }
}

/// Certified upper bound on the majorant norm `|P|_{r,w}`.
///
/// With `y_j = w_j |z_j|` and `v_j = y_j²`, each component of the majorant
/// field satisfies `w_h |X_h| <= y_h Q_h(v)`, where `Q_h` has non-negative
/// coefficients and degree `d/2 - 1` in `v`. Since `Σ v_j <= r²` on the ball,
/// `|X|_w <= r max_h sup Q_h`, and the supremum of a non-negative homogeneous
/// polynomial over the simplex is at most `max_α q_α α!/|α|!` times
/// `r^{2|α|}`. Homogeneous parts are bounded separately and summed.
///
/// # Panics
/// If `w` is shorter than the largest index of `p`.
#[must_use]
pub fn norm_upper_bound(p: &PairedPolynomial, r: f64, w: &WeightSequence) -> f64 {
    assert!(p.max_index() <= w.len(), "weights shorter than polynomial support");
    let mut per_degree: BTreeMap<usize, HashMap<(u32, Vec<(u32, u32)>), f64>> = BTreeMap::new();
    for (m, c) in &p.terms {
        let d = m.degree();
        if d < 2 {
            continue;
        }
        let base: f64 = m
            .factors
            .iter()
            .map(|f| w.values[f.index as usize - 1].powi(-2 * f.pairs() as i32))
            .product();
        let table = per_degree.entry(d).or_default();
        for f in &m.factors {
            if f.zbar == 0 {
                continue;
            }
            let wh = w.values[f.index as usize - 1];
            let q = c.norm() * f64::from(f.zbar) * wh * wh * base;
            let alpha: Vec<(u32, u32)> = m
                .factors
                .iter()
                .map(|g| (g.index, if g.index == f.index { g.pairs() - 1 } else { g.pairs() }))
                .filter(|&(_, e)| e > 0)
                .collect();
            *table.entry((f.index, alpha)).or_default() += q;
        }
    }
    let mut total = 0.0;
    for (d, table) in per_degree {
        let n1 = (d / 2 - 1) as u32;
        let best = table
            .iter()
            .map(|((_, alpha), q)| {
                let ratio: f64 = alpha.iter().map(|&(_, e)| factorial(e)).product::<f64>() / factorial(n1);
                q * ratio
            })
            .fold(0.0, f64::max);
        total += best * r.powi(d as i32 - 2);
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}
