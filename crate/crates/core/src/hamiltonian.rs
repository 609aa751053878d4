//! The truncated beam Hamiltonian `H = Λ + G` in complex coordinates.
//!
//! `z_j = (q_j + i p_j)/sqrt(2)` with `q_j = sqrt(ω_j) u_j`, `p_j = v_j / sqrt(ω_j)`,
//! `Λ = Σ ω_j |z_j|²` and `G = (1/32π) (Σ (j²/ω_j)(z_j + z̄_j)²)²`.
//!
//! Time evolution is `ż_h = -i ∂H/∂z̄_h`, which is Hamilton's equations
//! `q̇ = ∂_p H`, `ṗ = -∂_q H` written in `z`. With this sign the Lie series
//! `F∘Φ_S^t = Σ t^n/n! {S, ·}^n F` holds for the bracket of [`crate::poisson`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{frequencies, WeightSequence};

/// Complex mode amplitudes; entry `j - 1` holds `z_j`.
pub type ModeState = Vec<Complex64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// Sine coefficients of displacement and velocity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[must_use]
pub fn real_from_mode(z: &[Complex64]) -> RealState {
    let s = std::f64::consts::SQRT_2;
    RealState { q: z.iter().map(|c| s * c.re).collect(), p: z.iter().map(|c| s * c.im).collect() }
}

#[must_use]
pub fn mode_from_real(x: &RealState) -> ModeState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    x.q.iter().zip(&x.p).map(|(&q, &p)| Complex64::new(s * q, s * p)).collect()
}

pub fn real_from_fields(f: &FieldPair, m: f64) -> Result<RealState> {
    if f.u.len() != f.v.len() {
        return Err(Error::DimensionMismatch { expected: f.u.len(), found: f.v.len() });
    }
    let om = checked_frequencies(f.u.len(), m)?;
    Ok(RealState {
        q: f.u.iter().zip(&om).map(|(u, w)| w.sqrt() * u).collect(),
        p: f.v.iter().zip(&om).map(|(v, w)| v / w.sqrt()).collect(),
    })
}

pub fn fields_from_real(x: &RealState, m: f64) -> Result<FieldPair> {
    let om = checked_frequencies(x.q.len(), m)?;
    Ok(FieldPair {
        u: x.q.iter().zip(&om).map(|(q, w)| q / w.sqrt()).collect(),
        v: x.p.iter().zip(&om).map(|(p, w)| p * w.sqrt()).collect(),
    })
}

pub fn mode_from_fields(f: &FieldPair, m: f64) -> Result<ModeState> {
    Ok(mode_from_real(&real_from_fields(f, m)?))
}

pub fn fields_from_mode(z: &[Complex64], m: f64) -> Result<FieldPair> {
    fields_from_real(&real_from_mode(z), m)
}

/// Displacement coefficients `u_j = sqrt(2) Re z_j / sqrt(ω_j)` only.
#[must_use]
pub fn displacement(z: &[Complex64], omega: &[f64]) -> Vec<f64> {
    z.iter()
        .zip(omega)
        .map(|(c, w)| std::f64::consts::SQRT_2 * c.re / w.sqrt())
        .collect()
}

fn checked_frequencies(n: usize, m: f64) -> Result<Vec<f64>> {
    if !(m > -1.0) {
        return Err(Error::Domain(format!("m = {m} must exceed -1")));
    }
    Ok(frequencies(n, m))
}

/// `G_ij = (1/32π) i² j² / (ω_i ω_j)`.
#[must_use]
pub fn g_coeff(i: usize, j: usize, m: f64) -> f64 {
    let (a, b) = (stretch_weight(i, m), stretch_weight(j, m));
    a * b / (32.0 * PI)
}

/// Coefficients of the integrable part `Ḡ = Σ_{i,j} A_ij |z_i|² |z_j|²`.
#[must_use]
pub fn a_coeff(i: usize, j: usize, m: f64) -> f64 {
    let (a, b) = (stretch_weight(i, m), stretch_weight(j, m));
    if i == j {
        3.0 * a * a / (16.0 * PI)
    } else {
        a * b / (8.0 * PI)
    }
}

/// `j² / ω_j`.
#[must_use]
pub fn stretch_weight(j: usize, m: f64) -> f64 {
    let jf = j as f64;
    jf * jf / (jf.powi(4) + m * jf * jf).sqrt()
}

/// Precomputed tables for one `(N, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamHamiltonian {
    pub m: f64,
    pub omega: Vec<f64>,
    /// `j²/ω_j`.
    pub stretch: Vec<f64>,
    /// Switches the quartic part off (free linear beam) when false.
    pub nonlinear: bool,
}

impl BeamHamiltonian {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        let omega = checked_frequencies(n, m)?;
        let stretch = omega.iter().enumerate().map(|(i, w)| ((i + 1) as f64).powi(2) / w).collect();
        Ok(Self { m, omega, stretch, nonlinear: true })
    }

    #[must_use]
    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// `Σ (j²/ω_j)(z_j + z̄_j)²`, shared by `G` and its gradient.
    #[must_use]
    pub fn stretching_sum(&self, z: &[Complex64]) -> f64 {
        z.iter().zip(&self.stretch).map(|(c, a)| 4.0 * a * c.re * c.re).sum()
    }

    #[must_use]
    pub fn lambda(&self, z: &[Complex64]) -> f64 {
        z.iter().zip(&self.omega).map(|(c, w)| w * c.norm_sqr()).sum()
    }

    #[must_use]
    pub fn quartic(&self, z: &[Complex64]) -> f64 {
        if !self.nonlinear {
            return 0.0;
        }
        let q = self.stretching_sum(z);
        q * q / (32.0 * PI)
    }

    #[must_use]
    pub fn energy(&self, z: &[Complex64]) -> f64 {
        self.lambda(z) + self.quartic(z)
    }

    /// Writes `-i ∂G/∂z̄` into `out`, which is purely imaginary.
    pub fn nonlinear_field_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        if !self.nonlinear {
            out.iter_mut().for_each(|o| *o = Complex64::default());
            return;
        }
        let q = self.stretching_sum(z);
        for ((o, c), a) in out.iter_mut().zip(z).zip(&self.stretch) {
            // (a/8π)(z + z̄) Q with z + z̄ = 2 Re z
            *o = Complex64::new(0.0, -a * 2.0 * c.re * q / (8.0 * PI));
        }
    }

    /// `ż = -i ∂H/∂z̄`.
    #[must_use]
    pub fn vector_field(&self, z: &[Complex64]) -> ModeState {
        let mut out = vec![Complex64::default(); z.len()];
        self.nonlinear_field_into(z, &mut out);
        for ((o, c), w) in out.iter_mut().zip(z).zip(&self.omega) {
            *o += Complex64::new(0.0, -w) * c;
        }
        out
    }
}

/// `Λ(z) + G(z)`.
pub fn eval_h(z: &[Complex64], m: f64) -> Result<f64> {
    Ok(BeamHamiltonian::new(z.len(), m)?.energy(z))
}

/// `-i ∂H/∂z̄` at `z`.
pub fn vector_field(z: &[Complex64], m: f64) -> Result<ModeState> {
    Ok(BeamHamiltonian::new(z.len(), m)?.vector_field(z))
}

/// `∫ (v²/2 + u_xx²/2 + (m/2) u_x²) dx + (π/2)((1/2π)∫ u_x² dx)²` by Parseval.
pub fn energy_of_fields(u: &[f64], v: &[f64], m: f64) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let mut kinetic = 0.0;
    let mut bending = 0.0;
    let mut ux2 = 0.0;
    for (i, (uj, vj)) in u.iter().zip(v).enumerate() {
        let j2 = ((i + 1) as f64).powi(2);
        kinetic += vj * vj;
        bending += (j2 * j2 + m * j2) * uj * uj;
        ux2 += j2 * uj * uj;
    }
    let stretch = ux2 / (2.0 * PI);
    Ok(0.5 * kinetic + 0.5 * bending + 0.5 * PI * stretch * stretch)
}

/// Random state on the sphere `|z|_w = radius`, supported on the first
/// `active` modes.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    w: &WeightSequence,
    active: usize,
    radius: f64,
) -> ModeState {
    let n = w.len();
    let mut z: ModeState = (0..n)
        .map(|j| {
            if j < active {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / w.values[j]
            } else {
                Complex64::default()
            }
        })
        .collect();
    let norm = crate::spectrum::weighted_norm(&z, w);
    if norm > 0.0 {
        z.iter_mut().for_each(|c| *c *= radius / norm);
    }
    z
}
