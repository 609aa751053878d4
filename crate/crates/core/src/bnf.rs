//! Fourth- and sixth-order Birkhoff normal forms of the truncated beam
//! Hamiltonian `Λ + G`, their homological residuals and the explicit
//! stability constants.
//!
//! With the Lie-series convention `F ∘ Φ_S^1 = Σ {S, ·}ⁿ F / n!`:
//!
//! * `S4 = Σ i G_M / Δ_M` over non-action quartic monomials, so that
//!   `G + {S4, Λ} = Ḡ`;
//! * the sextic part of `(Λ + G) ∘ Φ_{S4}^1` is `R6 = ½ {S4, Ḡ + G}`;
//! * `S6 = Σ i R6_M / Δ_M` over non-resonant sextic monomials, so that
//!   `R6 + {S6, Λ} = R̄`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::BeamHamiltonian;
use crate::poisson::{bracket, norm_upper_bound, PairedMonomial, PairedPolynomial};
use crate::resonance::structurally_resonant;
use crate::spectrum::{frak_c_unchecked, mu_unchecked, ModelParams, WeightSequence};

/// Relative slack on the divisor guards.
const GUARD_SLACK: f64 = 1e-9;

/// `(5/6 - 1/(80e))`, the ratio between the data size and the working radius.
#[must_use]
pub fn radius_ratio() -> f64 {
    5.0 / 6.0 - 1.0 / (80.0 * E)
}

/// `c_* = (11/10)² (5/6 - 1/(80e))⁻²`.
#[must_use]
pub fn c_star() -> f64 {
    1.21 / radius_ratio().powi(2)
}

/// `c_† = 44e/π`.
#[must_use]
pub fn c_dagger() -> f64 {
    44.0 * E / PI
}

/// `ε₀ = 0.08 √μ`.
#[must_use]
pub fn eps0(m: f64) -> f64 {
    0.08 * mu_unchecked(m).sqrt()
}

/// `ε₁ = min{ε₀, (|m| μ / (3222 𝔠²))^{1/4}}`.
#[must_use]
pub fn eps1(m: f64) -> f64 {
    let c = frak_c_unchecked(m);
    eps0(m).min((m.abs() * mu_unchecked(m) / (3222.0 * c * c)).powf(0.25))
}

/// `T₀ = 0.948 (1 - c_† c_* ε²/μ) / (c_† c_*²)`.
#[must_use]
pub fn t0(eps: f64, m: f64) -> f64 {
    let (cs, cd) = (c_star(), c_dagger());
    0.948 * (1.0 - cd * cs * eps * eps / mu_unchecked(m)) / (cd * cs * cs)
}

/// `T₁ = |m| μ / (6595 𝔠³ (1 + 30 𝔠 ε²/(|m| μ) + 90 𝔠 ε²/μ))`.
#[must_use]
pub fn t1(eps: f64, m: f64) -> f64 {
    let (mu, c) = (mu_unchecked(m), frak_c_unchecked(m));
    let e2 = eps * eps;
    m.abs() * mu / (6595.0 * c.powi(3) * (1.0 + 30.0 * c * e2 / (m.abs() * mu) + 90.0 * c * e2 / mu))
}

/// Largest `γ_r` allowed by the fourth-order threshold.
#[must_use]
pub fn gamma_threshold(m: f64) -> f64 {
    5.0 / 11.0 * (PI * mu_unchecked(m) / (22.0 * E * frak_c_unchecked(m))).sqrt()
}

/// `η_r = (44e𝔠/(πμ)) (11γ/10)²`.
#[must_use]
pub fn eta(gamma: f64, m: f64) -> f64 {
    44.0 * E * frak_c_unchecked(m) / (PI * mu_unchecked(m)) * (1.1 * gamma).powi(2)
}

/// `C_r = (3𝔠/(2πe)) η/(1-η) (11γ/10)²`; infinite once `η ≥ 1`.
#[must_use]
pub fn c_r(gamma: f64, m: f64) -> f64 {
    let e = eta(gamma, m);
    if e >= 1.0 {
        return f64::INFINITY;
    }
    3.0 * frak_c_unchecked(m) / (2.0 * PI * E) * e / (1.0 - e) * (1.1 * gamma).powi(2)
}

/// Bound `16𝔠 γ⁶ / (3 e² π³ μ²)` on the degree ≥ 8 part of the fourth-order remainder.
#[must_use]
pub fn r_ge8_bound(gamma: f64, m: f64) -> f64 {
    16.0 * frak_c_unchecked(m) * gamma.powi(6) / (3.0 * E * E * PI.powi(3) * mu_unchecked(m).powi(2))
}

fn sixth_order_range(m: f64) -> Result<()> {
    if m == 0.0 {
        return Err(Error::Hypothesis(
            "sixth-order resonances present at m = 0 (Pythagorean triples)".into(),
        ));
    }
    if !(-0.5..=1.0).contains(&m) {
        return Err(Error::Hypothesis(format!("sixth order needs -1/2 <= m <= 1, got {m}")));
    }
    Ok(())
}

/// Every constant attached to a working radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BnfConstants {
    pub m: f64,
    pub mu: f64,
    pub frak_c: f64,
    pub r: f64,
    pub gamma: f64,
    /// Size of the data matching `r`: `(5/6 - 1/(80e)) r`.
    pub eps: f64,
    pub eta: f64,
    pub c_r: f64,
    pub r_ge8_bound: f64,
    pub gamma_max: f64,
    pub threshold4_ok: bool,
    /// Sixth-order constants with `r` playing the role of `11𝚛/10`.
    pub eta_tilde: Option<f64>,
    pub c_tilde: Option<f64>,
    pub threshold6_ok: bool,
    pub eps0: f64,
    pub eps1: f64,
    pub t0: f64,
    pub t1: Option<f64>,
    pub c_star: f64,
    pub c_dagger: f64,
    /// Horizon `1/(6 C_r)` in normal-form coordinates.
    pub horizon4: f64,
    /// Horizon `1/(6 C̃)`.
    pub horizon6: Option<f64>,
}

/// Constant bundle at radius `r`, with `γ_r = r sup_j w⁰_j / w_j` for `w^s_N`.
///
/// Threshold violations are reported through the `threshold*_ok` flags.
pub fn constants(params: &ModelParams, r: f64) -> Result<BnfConstants> {
    let m = params.m;
    if m < -0.5 {
        return Err(Error::Hypothesis(format!("normal forms need m >= -1/2, got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius r = {r} must be positive")));
    }
    let (mu, c) = (mu_unchecked(m), frak_c_unchecked(m));
    let gamma = r * WeightSequence::wsn(params).gamma_factor(m);
    let eta_r = eta(gamma, m);
    let cr = c_r(gamma, m);
    let ge8 = r_ge8_bound(gamma, m);
    let gamma_max = gamma_threshold(m);
    let threshold4_ok = gamma > 0.0 && gamma <= gamma_max * (1.0 + GUARD_SLACK);
    let eps = radius_ratio() * r;
    let sixth = sixth_order_range(m).is_ok();
    let (eta_tilde, c_tilde) = if sixth {
        let et = 352.0 * E * cr / (7.0 * m.abs());
        let ct = et * et / (44.0 * E * E)
            + 2.0 / E * et * (c / PI * gamma * gamma + cr)
            + ge8 * (1.0 + 2.0 * et / E);
        (Some(et), Some(ct))
    } else {
        (None, None)
    };
    let threshold6_ok = threshold4_ok && eta_tilde.is_some_and(|e| e <= 0.5);
    Ok(BnfConstants {
        m,
        mu,
        frak_c: c,
        r,
        gamma,
        eps,
        eta: eta_r,
        c_r: cr,
        r_ge8_bound: ge8,
        gamma_max,
        threshold4_ok,
        eta_tilde,
        c_tilde,
        threshold6_ok,
        eps0: eps0(m),
        eps1: eps1(m),
        t0: t0(eps, m),
        t1: sixth.then(|| t1(eps, m)),
        c_star: c_star(),
        c_dagger: c_dagger(),
        horizon4: 1.0 / (6.0 * cr),
        horizon6: c_tilde.map(|ct| 1.0 / (6.0 * ct)),
    })
}

/// Stability horizons for data of size `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub eps: f64,
    /// `T₀ μ ε⁻⁴` when `ε ≤ ε₀`.
    pub horizon_4th: Option<f64>,
    /// `T₁ ε⁻⁶` when additionally `m ≠ 0`, `m ∈ [-1/2, 1]` and `ε ≤ ε₁`.
    pub horizon_6th: Option<f64>,
    /// `2ε`: bound on `sup_x |u|` over the fourth-order horizon.
    pub sup_bound: f64,
    /// `2.1ε`: the same over the sixth-order horizon.
    pub sup_bound_6th: f64,
    /// Whether the radius `ε / (5/6 - 1/(80e))` also meets the `γ_r`
    /// threshold. It can fail for `m < 0` close to `ε₀`.
    pub threshold_consistent: bool,
}

pub fn stability_certificate(eps: f64, params: &ModelParams) -> Result<StabilityCertificate> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("ε = {eps} must be positive")));
    }
    let m = params.m;
    let applicable = m >= -0.5;
    let horizon_4th = (applicable && eps <= eps0(m)).then(|| t0(eps, m) * mu_unchecked(m) * eps.powi(-4));
    let horizon_6th = (horizon_4th.is_some() && sixth_order_range(m).is_ok() && eps <= eps1(m))
        .then(|| t1(eps, m) * eps.powi(-6));
    let threshold_consistent = applicable
        && constants(params, eps / radius_ratio()).is_ok_and(|c| c.threshold4_ok);
    Ok(StabilityCertificate {
        eps,
        horizon_4th,
        horizon_6th,
        sup_bound: 2.0 * eps,
        sup_bound_6th: 2.1 * eps,
        threshold_consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Fourth,
    Sixth,
}

/// Generator `S` of a normal-form step.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction {
    pub poly: PairedPolynomial,
    pub order: Order,
    pub m: f64,
    pub n_trunc: usize,
}

impl GeneratingFunction {
    /// Vector field `-i ∂S/∂z̄`.
    pub fn vector_field(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.poly.vector_field(z)
    }
}

fn check_fourth(params: &ModelParams) -> Result<BeamHamiltonian> {
    if params.m < -0.5 {
        return Err(Error::Hypothesis(format!("normal forms need m >= -1/2, got {}", params.m)));
    }
    BeamHamiltonian::new(params.n_trunc, params.m)
}

/// Divides every non-integrable coefficient by `-iΔ`, guarding the divisor.
fn solve_homological(
    p: &PairedPolynomial,
    omega: &[f64],
    lower: f64,
    mut integrable: impl FnMut(&PairedMonomial) -> bool,
) -> Result<PairedPolynomial> {
    let mut terms = Vec::new();
    for (mono, c) in p.terms() {
        if integrable(mono) {
            continue;
        }
        let delta = mono.divisor(omega);
        if delta.abs() < lower * (1.0 - GUARD_SLACK) {
            return Err(Error::SmallDivisor { delta, bound: lower, monomial: mono.to_string() });
        }
        terms.push((mono.clone(), Complex64::new(0.0, 1.0) * c / delta));
    }
    Ok(PairedPolynomial::from_terms(terms))
}

/// Quartic generator solving `G + {S, Λ} = Ḡ`.
pub fn build_s4(params: &ModelParams) -> Result<GeneratingFunction> {
    let h = check_fourth(params)?;
    let g = PairedPolynomial::beam_quartic(&h);
    let poly = solve_homological(&g, &h.omega, mu_unchecked(params.m), PairedMonomial::is_action_monomial)?;
    Ok(GeneratingFunction { poly, order: Order::Fourth, m: params.m, n_trunc: params.n_trunc })
}

/// `max |coeff(G + {S, Λ} - Ḡ)|`.
pub fn homological_residual4(s: &GeneratingFunction, params: &ModelParams) -> Result<f64> {
    let h = check_fourth(params)?;
    let g = PairedPolynomial::beam_quartic(&h);
    let gbar = g.project_integrable4()?;
    let lam = PairedPolynomial::quadratic(&h.omega);
    Ok(g.add(&bracket(&s.poly, &lam)).sub(&gbar).max_abs_coeff())
}

/// Sextic part `½ {S, Ḡ + G}` of the transformed Hamiltonian.
pub fn r6_from_s4(s: &GeneratingFunction, params: &ModelParams) -> Result<PairedPolynomial> {
    let h = check_fourth(params)?;
    let g = PairedPolynomial::beam_quartic(&h);
    let gbar = g.project_integrable4()?;
    Ok(bracket(&s.poly, &gbar.add(&g)).scale(Complex64::new(0.5, 0.0)))
}

/// Sextic generator solving `R6 + {S6, Λ} = R̄`, returned with `R̄`.
pub fn build_s6(r6: &PairedPolynomial, params: &ModelParams) -> Result<(GeneratingFunction, PairedPolynomial)> {
    let m = params.m;
    sixth_order_range(m)?;
    let omega = params.frequencies();
    let rbar = r6.project_integrable6(m)?;
    let poly = solve_homological(r6, &omega, 0.875 * m.abs(), |mono| {
        structurally_resonant(&mono.combination(), m)
    })?;
    Ok((GeneratingFunction { poly, order: Order::Sixth, m, n_trunc: params.n_trunc }, rbar))
}

/// `max |coeff(R6 + {S6, Λ} - R̄)|`.
pub fn homological_residual6(s6: &GeneratingFunction, r6: &PairedPolynomial, params: &ModelParams) -> Result<f64> {
    sixth_order_range(params.m)?;
    let rbar = r6.project_integrable6(params.m)?;
    let lam = PairedPolynomial::quadratic(&params.frequencies());
    Ok(r6.add(&bracket(&s6.poly, &lam)).sub(&rbar).max_abs_coeff())
}

/// `A_ij` with `Ḡ = Σ_{i,j} A_ij |z_i|²|z_j|²` over ordered pairs, `i ≤ j` listed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionCoeff2 {
    pub i: usize,
    pub j: usize,
    pub a: f64,
}

/// `A_ijk` over ordered triples, `i ≤ j ≤ k` listed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionCoeff3 {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub a: f64,
}

/// Expands an action monomial into its sorted index list, one entry per `|z_ℓ|²`.
fn action_indices(mono: &PairedMonomial) -> Vec<usize> {
    mono.factors()
        .iter()
        .flat_map(|f| std::iter::repeat_n(f.index as usize, usize::from(f.z)))
        .collect()
}

/// Number of distinct orderings of a sorted index list.
fn orderings(idx: &[usize]) -> f64 {
    let n: f64 = (1..=idx.len()).map(|k| k as f64).product();
    let mut denom = 1.0;
    let mut run = 1;
    for w in idx.windows(2) {
        if w[0] == w[1] {
            run += 1;
            denom *= f64::from(run);
        } else {
            run = 1;
        }
    }
    n / denom
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderBounds {
    /// `C_r` bound on the whole fourth-order remainder.
    pub c_r: f64,
    pub r_ge8: f64,
    /// Certified majorant bound of the computed `R6`.
    pub r6_computed: f64,
    pub s4_computed: f64,
    pub s6_computed: Option<f64>,
    /// `C̃` bound on the sixth-order remainder.
    pub c_tilde: Option<f64>,
}

/// `Λ + Ḡ (+ R̄)` with remainder bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormHamiltonian {
    pub m: f64,
    pub n_trunc: usize,
    pub r: f64,
    pub omega: Vec<f64>,
    pub a2: Vec<ActionCoeff2>,
    pub a3: Option<Vec<ActionCoeff3>>,
    pub bounds: RemainderBounds,
    pub residual4: f64,
    pub residual6: Option<f64>,
    #[serde(skip)]
    pub gbar: PairedPolynomial,
    #[serde(skip)]
    pub rbar: Option<PairedPolynomial>,
}

/// Runs the construction at radius `r`; the sixth-order step only when `order` asks for it.
pub fn normal_form(params: &ModelParams, r: f64, order: Order) -> Result<NormalFormHamiltonian> {
    let consts = constants(params, r)?;
    let h = check_fourth(params)?;
    let w = WeightSequence::wsn(params);
    let s4 = build_s4(params)?;
    let residual4 = homological_residual4(&s4, params)?;
    let gbar = PairedPolynomial::beam_quartic(&h).project_integrable4()?;
    let r6 = r6_from_s4(&s4, params)?;
    let a2 = gbar
        .terms()
        .map(|(mono, c)| {
            let idx = action_indices(mono);
            ActionCoeff2 { i: idx[0], j: idx[1], a: c.re / orderings(&idx) }
        })
        .collect();
    let mut nf = NormalFormHamiltonian {
        m: params.m,
        n_trunc: params.n_trunc,
        r,
        omega: h.omega.clone(),
        a2,
        a3: None,
        bounds: RemainderBounds {
            c_r: consts.c_r,
            r_ge8: consts.r_ge8_bound,
            r6_computed: norm_upper_bound(&r6, r, &w),
            s4_computed: norm_upper_bound(&s4.poly, r, &w),
            s6_computed: None,
            c_tilde: None,
        },
        residual4,
        residual6: None,
        gbar,
        rbar: None,
    };
    if order == Order::Sixth {
        let (s6, rbar) = build_s6(&r6, params)?;
        nf.residual6 = Some(homological_residual6(&s6, &r6, params)?);
        nf.bounds.s6_computed = Some(norm_upper_bound(&s6.poly, r, &w));
        nf.bounds.c_tilde = consts.c_tilde;
        nf.a3 = Some(
            rbar.terms()
                .filter(|(mono, _)| mono.is_action_monomial())
                .map(|(mono, c)| {
                    let idx = action_indices(mono);
                    ActionCoeff3 { i: idx[0], j: idx[1], k: idx[2], a: c.re / orderings(&idx) }
                })
                .collect(),
        );
        nf.rbar = Some(rbar);
    }
    Ok(nf)
}

/// Pretty JSON with shortest round-trip floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Domain(format!("serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::a_coeff;
    use crate::resonance::SignPair;
    use approx::assert_relative_eq;

    fn params(m: f64, n: usize) -> ModelParams {
        ModelParams::with_truncation(m, n).unwrap()
    }

    #[test]
    fn s4_coefficient_example() {
        let s = build_s4(&params(0.0, 4)).unwrap();
        let mono = PairedMonomial::from_pairs(&[(1, SignPair::PP), (1, SignPair::PP)]);
        let c = s.poly.coeff(&mono);
        assert_relative_eq!(c.im, 1.0 / (128.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(1.0 / (128.0 * PI), 0.002_486_80, epsilon = 1e-8);
        assert!(s.poly.terms().all(|(m, _)| !m.is_action_monomial()));
        assert!(s.poly.is_real(1e-15));
    }

    #[test]
    fn homological_residuals_are_rounding() {
        for &m in &[0.0, 1.0, -0.5] {
            let p = params(m, 12);
            let s = build_s4(&p).unwrap();
            let gmax = PairedPolynomial::beam_quartic(&BeamHamiltonian::new(12, m).unwrap()).max_abs_coeff();
            assert!(homological_residual4(&s, &p).unwrap() <= 1e-12 * gmax);
        }
    }

    #[test]
    fn residual_detects_corruption() {
        let p = params(0.5, 6);
        let mut s = build_s4(&p).unwrap();
        let key = s.poly.terms().next().unwrap().0.clone();
        *s.poly.coeff_mut(&key).unwrap() += 1e-3;
        assert!(homological_residual4(&s, &p).unwrap() >= 1e-3 * p.mu() * (1.0 - 1e-6));
    }

    #[test]
    fn r6_vanishes_for_free_beam_and_is_sextic() {
        let p = params(1.0, 5);
        let s = build_s4(&p).unwrap();
        let r6 = r6_from_s4(&s, &p).unwrap();
        assert_eq!(r6.degrees(), vec![6]);
        assert!(r6.is_paired());
        assert!(r6.is_real(1e-12));
        let free = GeneratingFunction { poly: PairedPolynomial::zero(), ..s };
        assert!(r6_from_s4(&free, &p).unwrap().is_empty());
    }

    #[test]
    fn sixth_order_rejections() {
        let r6 = PairedPolynomial::zero();
        assert!(matches!(build_s6(&r6, &params(0.0, 4)), Err(Error::Hypothesis(_))));
        assert!(matches!(build_s6(&r6, &params(1.5, 4)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn sixth_order_residual() {
        let p = params(1.0, 8);
        let s = build_s4(&p).unwrap();
        let r6 = r6_from_s4(&s, &p).unwrap();
        let (s6, rbar) = build_s6(&r6, &p).unwrap();
        assert!(homological_residual6(&s6, &r6, &p).unwrap() <= 1e-12 * r6.max_abs_coeff());
        assert!(rbar.terms().all(|(m, _)| m.is_action_monomial()));
        assert!(s6.poly.terms().all(|(m, _)| !m.is_action_monomial()));
    }

    #[test]
    fn constants_examples() {
        let c = constants(&params(1.0, 8), 0.1).unwrap();
        assert_relative_eq!(c.eps0, 0.08 * (2.0 * 2f64.sqrt()).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c.eps0, 0.134_55, epsilon = 1e-5);
        assert_eq!(c.eps1, c.eps0);
        assert!(t1(c.eps0, 1.0) >= 1.9e-4);
        assert_relative_eq!(t0(0.0, 0.0), 0.948 / (c_dagger() * c_star().powi(2)), max_relative = 1e-15);
        assert_relative_eq!(t0(0.0, 0.0), 0.008_02, epsilon = 1e-5);
        assert!(c_dagger() * c_star() <= 68.0);
        assert_relative_eq!(c_star(), 1.761_79, epsilon = 1e-5);
        assert_relative_eq!(c_dagger(), 38.0713, epsilon = 1e-4);
    }

    #[test]
    fn eta_half_at_threshold() {
        for &m in &[-0.5, 0.0, 1.0, 3.0] {
            let g = gamma_threshold(m);
            assert_relative_eq!(eta(g, m), 0.5, max_relative = 1e-12);
            assert!(eta(0.99 * g, m) < 0.5);
            let p = params(m, 4);
            assert!(constants(&p, g).unwrap().threshold4_ok);
            assert!(!constants(&p, 1.01 * g).unwrap().threshold4_ok);
        }
    }

    #[test]
    fn a2_table_matches_closed_form() {
        let nf = normal_form(&params(0.3, 5), 0.05, Order::Fourth).unwrap();
        assert_eq!(nf.a2.len(), 15);
        for a in &nf.a2 {
            assert_relative_eq!(a.a, a_coeff(a.i, a.j, 0.3), max_relative = 1e-14);
        }
    }

    #[test]
    fn certificate_examples() {
        let c = stability_certificate(0.13, &params(1.0, 4)).unwrap();
        assert!(c.horizon_4th.is_some() && c.horizon_6th.is_some());
        let c = stability_certificate(0.05, &params(0.0, 4)).unwrap();
        assert!(c.horizon_4th.is_some() && c.horizon_6th.is_none());
        let c = stability_certificate(2.0 * eps0(0.5), &params(0.5, 4)).unwrap();
        assert!(c.horizon_4th.is_none() && c.horizon_6th.is_none());
    }

    #[test]
    fn orderings_count() {
        assert_eq!(orderings(&[1, 2, 3]), 6.0);
        assert_eq!(orderings(&[1, 1, 3]), 3.0);
        assert_eq!(orderings(&[2, 2, 2]), 1.0);
        assert_eq!(orderings(&[1, 2]), 2.0);
    }
}
