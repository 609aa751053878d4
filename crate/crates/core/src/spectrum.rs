//! Frequencies, eigenfunctions, weights and norms.
//!
//! Mode indices are 1-based in every public signature; arrays store mode `j`
//! at position `j - 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Model parameters shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Dimensionless axial force.
    pub m: f64,
    /// Galerkin truncation (number of retained modes).
    pub n_trunc: usize,
    /// Sobolev index of the high-mode weights.
    pub s: f64,
    /// Crossover index of the `H^s_N` weights.
    pub n_weight: usize,
}

impl ModelParams {
    pub fn new(m: f64, n_trunc: usize, s: f64, n_weight: usize) -> Result<Self> {
        if !(m > -1.0) || !m.is_finite() {
            return Err(Error::Domain(format!("m = {m} must exceed -1")));
        }
        if n_trunc == 0 {
            return Err(Error::Domain("truncation must keep at least one mode".into()));
        }
        if n_weight == 0 || n_weight > n_trunc {
            return Err(Error::Domain(format!(
                "weight crossover {n_weight} must lie in 1..={n_trunc}"
            )));
        }
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("Sobolev index s = {s} must be >= 0")));
        }
        Ok(Self { m, n_trunc, s, n_weight })
    }

    /// Parameters with `N_weight = N_trunc` and `s = 1`.
    pub fn with_truncation(m: f64, n_trunc: usize) -> Result<Self> {
        Self::new(m, n_trunc, 1.0, n_trunc)
    }

    /// Frequencies `ω_1 ..= ω_N`.
    #[must_use]
    pub fn frequencies(&self) -> Vec<f64> {
        frequencies(self.n_trunc, self.m)
    }

    #[must_use]
    pub fn mu(&self) -> f64 {
        mu_unchecked(self.m)
    }
}

/// `ω_j = sqrt(j⁴ + m j²)`.
pub fn frequency(j: usize, m: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("mode indices start at 1".into()));
    }
    let jf = j as f64;
    let rad = jf.powi(4) + m * jf * jf;
    if !(rad > 0.0) {
        return Err(Error::Domain(format!("j^4 + m j^2 = {rad} <= 0 at j = {j}, m = {m}")));
    }
    Ok(rad.sqrt())
}

/// Frequencies of modes `1..=n`. Assumes `m > -1`.
#[must_use]
pub fn frequencies(n: usize, m: f64) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let jf = j as f64;
            (jf.powi(4) + m * jf * jf).sqrt()
        })
        .collect()
}

/// Lower bound of the fourth-order small divisors, `min{2 sqrt(1+m), 1.5 sqrt(4+m)}`.
pub fn mu(m: f64) -> Result<f64> {
    if !(m >= -1.0) {
        return Err(Error::Domain(format!("mu undefined for m = {m} < -1")));
    }
    Ok(mu_unchecked(m))
}

pub(crate) fn mu_unchecked(m: f64) -> f64 {
    (2.0 * (1.0 + m).sqrt()).min(1.5 * (4.0 + m).sqrt())
}

/// `sup_j j²/ω_j`: 1 for `m >= 0`, `(1+m)^(-1/2)` for `-1/2 <= m < 0`.
pub fn frak_c(m: f64) -> Result<f64> {
    if !(m >= -0.5) {
        return Err(Error::Domain(format!("c(m) requires m >= -1/2, got {m}")));
    }
    Ok(frak_c_unchecked(m))
}

pub(crate) fn frak_c_unchecked(m: f64) -> f64 {
    if m >= 0.0 {
        1.0
    } else {
        1.0 / (1.0 + m).sqrt()
    }
}

/// Eigenfunction `φ_j(x) = sqrt(2/π) sin(jx)`.
#[must_use]
pub fn phi(j: usize, x: f64) -> f64 {
    (2.0 / PI).sqrt() * (j as f64 * x).sin()
}

/// Value of `Σ u_j φ_j(x)`.
#[must_use]
pub fn field_value(u: &[f64], x: f64) -> f64 {
    u.iter().enumerate().map(|(i, &c)| c * phi(i + 1, x)).sum()
}

/// Maximum of `|Σ u_j φ_j|` over `points + 1` equispaced nodes of `[0, π]`.
#[must_use]
pub fn grid_sup(u: &[f64], points: usize) -> f64 {
    (0..=points)
        .map(|k| field_value(u, PI * k as f64 / points as f64).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    W0,
    WsN { s: f64, n: usize },
    Custom,
}

/// Positive weights `w_1 ..= w_N` defining `|z|_w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSequence {
    pub values: Vec<f64>,
    pub kind: WeightKind,
}

impl WeightSequence {
    /// `w⁰_j = j / sqrt(ω_j)`.
    #[must_use]
    pub fn w0(n_trunc: usize, m: f64) -> Self {
        let values = frequencies(n_trunc, m)
            .iter()
            .enumerate()
            .map(|(i, om)| (i + 1) as f64 / om.sqrt())
            .collect();
        Self { values, kind: WeightKind::W0 }
    }

    /// `j ω_j^{-1/2}` up to `n_weight`, `j^{s+2} ω_j^{-1/2}` beyond.
    #[must_use]
    pub fn wsn(params: &ModelParams) -> Self {
        let values = frequencies(params.n_trunc, params.m)
            .iter()
            .enumerate()
            .map(|(i, om)| {
                let j = (i + 1) as f64;
                if i < params.n_weight {
                    j / om.sqrt()
                } else {
                    j.powf(params.s + 2.0) / om.sqrt()
                }
            })
            .collect();
        Self { values, kind: WeightKind::WsN { s: params.s, n: params.n_weight } }
    }

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain("weights must be finite and strictly positive".into()));
        }
        Ok(Self { values, kind: WeightKind::Custom })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sup_j w⁰_j / w_j`; multiplying a radius by it gives `γ_r`.
    #[must_use]
    pub fn gamma_factor(&self, m: f64) -> f64 {
        let w0 = Self::w0(self.values.len(), m);
        w0.values
            .iter()
            .zip(&self.values)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max)
    }
}

/// `|z|_w = sqrt(Σ w_j² |z_j|²)`.
///
/// # Panics
/// If `w` is shorter than `z`.
#[must_use]
pub fn weighted_norm(z: &[Complex64], w: &WeightSequence) -> f64 {
    assert!(w.len() >= z.len(), "weight sequence shorter than state");
    z.iter()
        .zip(&w.values)
        .map(|(zj, wj)| wj * wj * zj.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The four norms of a field given by its sine coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevNorms {
    /// `|u|_1`.
    pub h1: f64,
    /// `|u|_{H^s_N}`.
    pub hs_n: f64,
    /// `|u|_{H̃^{-1}}`.
    pub tilde_hm1: f64,
    /// `|u|_{H̃^s_N}`.
    pub tilde_hs_n: f64,
}

pub fn sobolev_norms(u: &[f64], s: f64, n: usize, m: f64) -> Result<SobolevNorms> {
    let (mut h1, mut hs, mut thm1, mut ths) = (0.0, 0.0, 0.0, 0.0);
    for (i, &c) in u.iter().enumerate() {
        let j = i + 1;
        let jf = j as f64;
        let om = frequency(j, m)?;
        let c2 = c * c;
        h1 += jf * jf * c2;
        let low = jf * jf / (om * om) * c2;
        thm1 += low;
        if j <= n {
            hs += jf * jf * c2;
            ths += low;
        } else {
            hs += jf.powf(2.0 * s) * c2;
            ths += jf.powf(2.0 * s + 4.0) / (om * om) * c2;
        }
    }
    Ok(SobolevNorms {
        h1: h1.sqrt(),
        hs_n: hs.sqrt(),
        tilde_hm1: thm1.sqrt(),
        tilde_hs_n: ths.sqrt(),
    })
}

/// `|u|_s = sqrt(Σ j^{2s} u_j²)`.
#[must_use]
pub fn sobolev_norm(u: &[f64], s: f64) -> f64 {
    u.iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as f64).powf(2.0 * s) * c * c)
        .sum::<f64>()
        .sqrt()
}

/// Smallest `N` with `|u|_{H^s_N} <= (1 + δ)|u|_1`.
///
/// The coefficients are taken as the complete (finitely supported) sequence.
/// Fails when `|u|_s` is not finite, which is how an unresolved tail shows up.
pub fn choose_truncation(u: &[f64], s: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s = {s} must be >= 0")));
    }
    let high: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as f64).powf(2.0 * s) * c * c)
        .collect();
    let total_high: f64 = high.iter().sum();
    if !total_high.is_finite() {
        return Err(Error::InsufficientTailDecay(format!(
            "|u|_s is not finite for s = {s}"
        )));
    }
    let low: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as f64).powi(2) * c * c)
        .collect();
    let h1_sq: f64 = low.iter().sum();
    let target = ((1.0 + delta) * h1_sq.sqrt()).powi(2);
    // Suffix sums of the high-mode part, so each N costs O(1).
    let mut suffix = vec![0.0; u.len() + 1];
    for i in (0..u.len()).rev() {
        suffix[i] = suffix[i + 1] + high[i];
    }
    let mut prefix = 0.0;
    for n in 1..=u.len().max(1) {
        if n <= u.len() {
            prefix += low[n - 1];
        }
        let val = prefix + suffix[n.min(u.len())];
        if val <= target {
            return Ok(n);
        }
    }
    Ok(u.len().max(1))
}

/// `sqrt(π/3) |u|_1`, a certified bound on `max_x |u(x)|`.
#[must_use]
pub fn sup_norm_bound(u: &[f64]) -> f64 {
    (PI / 3.0).sqrt() * sobolev_norm(u, 1.0)
}

/// Upper bound on `c_s = sqrt((2/π) Σ j^{-2s})` for `s > 1/2`: partial sum to
/// `terms` plus the integral tail `terms^{1-2s}/(2s-1)`.
pub fn embedding_constant(s: f64, terms: usize) -> Result<f64> {
    if !(s > 0.5) {
        return Err(Error::Domain(format!("c_s diverges for s = {s} <= 1/2")));
    }
    let terms = terms.max(1);
    let partial: f64 = (1..=terms).map(|j| (j as f64).powf(-2.0 * s)).sum();
    let tail = (terms as f64).powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
    Ok((2.0 / PI * (partial + tail)).sqrt())
}
