//! Long-time integration of the truncated beam, time-one flows of normal-form
//! generators and the observables used to test the stability estimates.

use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::Serialize;

use crate::bnf::{eps0, eps1, t0, t1, GeneratingFunction};
use crate::error::{Error, Result};
use crate::hamiltonian::{displacement, mode_from_fields, BeamHamiltonian, FieldPair, ModeState};
use crate::spectrum::{grid_sup, mu_unchecked, sobolev_norms, weighted_norm, ModelParams, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Symplectic implicit midpoint rule (default).
    ImplicitMidpoint,
    /// Exact rotation / exact quartic kick, second order.
    Strang,
    /// Triple-jump composition of `Strang`, fourth order.
    Splitting4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub fixedpoint_tol: f64,
    pub max_fixedpoint_iters: usize,
    /// Signed final time; negative values integrate backwards.
    pub t_end: f64,
    /// Keep every `stride`-th step in a [`Trajectory`].
    pub stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::ImplicitMidpoint,
            fixedpoint_tol: 1e-13,
            max_fixedpoint_iters: 50,
            t_end: 1.0,
            stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Domain(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.fixedpoint_tol >= 1e-14) {
            return Err(Error::Domain(format!("fixed-point tolerance {} below 1e-14", self.fixedpoint_tol)));
        }
        if self.max_fixedpoint_iters == 0 || self.stride == 0 {
            return Err(Error::Domain("iteration cap and stride must be positive".into()));
        }
        if !self.t_end.is_finite() {
            return Err(Error::Domain("t_end must be finite".into()));
        }
        Ok(())
    }

    #[must_use]
    pub fn steps(&self) -> usize {
        (self.t_end.abs() / self.dt).round() as usize
    }

    /// Signed step.
    #[must_use]
    pub fn h(&self) -> f64 {
        if self.t_end < 0.0 {
            -self.dt
        } else {
            self.dt
        }
    }

    /// Warning text when `dt · max ω` exceeds one.
    #[must_use]
    pub fn resolution_warning(&self, omega_max: f64) -> Option<String> {
        (self.dt * omega_max > 1.0).then(|| {
            format!("dt * max omega = {:.3} > 1: fastest mode under-resolved", self.dt * omega_max)
        })
    }
}

/// One-step integrator bound to a Hamiltonian, with scratch buffers.
pub struct Stepper<'a> {
    ham: &'a BeamHamiltonian,
    scheme: Scheme,
    tol: f64,
    max_iters: usize,
    y: Vec<Complex64>,
    f: Vec<Complex64>,
    /// Largest iteration count seen.
    pub max_iters_used: usize,
}

impl<'a> Stepper<'a> {
    #[must_use]
    pub fn new(ham: &'a BeamHamiltonian, cfg: &IntegratorConfig) -> Self {
        let n = ham.len();
        Self {
            ham,
            scheme: cfg.scheme,
            tol: cfg.fixedpoint_tol,
            max_iters: cfg.max_fixedpoint_iters,
            y: vec![Complex64::default(); n],
            f: vec![Complex64::default(); n],
            max_iters_used: 0,
        }
    }

    /// Advances `z` by `h`; `step` only labels errors.
    pub fn step(&mut self, z: &mut [Complex64], h: f64, step: usize) -> Result<()> {
        match self.scheme {
            Scheme::ImplicitMidpoint => self.midpoint(z, h, step),
            Scheme::Strang => {
                self.strang(z, h);
                Ok(())
            }
            Scheme::Splitting4 => {
                let c = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - c);
                let w0 = -c / (2.0 - c);
                self.strang(z, w1 * h);
                self.strang(z, w0 * h);
                self.strang(z, w1 * h);
                Ok(())
            }
        }
    }

    /// Midpoint `y = (z + z')/2` solves `y (1 + i h ω/2) = z + (h/2) N(y)`;
    /// the rotation is inverted exactly, only the quartic part is iterated.
    fn midpoint(&mut self, z: &mut [Complex64], h: f64, step: usize) -> Result<()> {
        let om = &self.ham.omega;
        for (k, y) in self.y.iter_mut().enumerate() {
            *y = z[k] / Complex64::new(1.0, 0.5 * h * om[k]);
        }
        if self.ham.nonlinear {
            let mut converged = false;
            let mut last = 0.0;
            for it in 1..=self.max_iters {
                self.ham.nonlinear_field_into(&self.y, &mut self.f);
                let (mut diff, mut size) = (0.0f64, 0.0f64);
                for k in 0..z.len() {
                    let y = (z[k] + 0.5 * h * self.f[k]) / Complex64::new(1.0, 0.5 * h * om[k]);
                    diff = diff.max((y - self.y[k]).norm());
                    size = size.max(y.norm());
                    self.y[k] = y;
                }
                last = diff;
                if diff <= self.tol * size {
                    self.max_iters_used = self.max_iters_used.max(it);
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::FixedPointDiverged { step, iters: self.max_iters, increment: last });
            }
        }
        for (zk, yk) in z.iter_mut().zip(&self.y) {
            *zk = 2.0 * yk - *zk;
        }
        Ok(())
    }

    fn rotate(&self, z: &mut [Complex64], h: f64) {
        for (zk, w) in z.iter_mut().zip(&self.ham.omega) {
            *zk *= Complex64::from_polar(1.0, -w * h);
        }
    }

    /// The quartic field only moves `Im z` and depends only on `Re z`, so
    /// one Euler step is its exact flow.
    fn strang(&mut self, z: &mut [Complex64], h: f64) {
        self.rotate(z, 0.5 * h);
        if self.ham.nonlinear {
            self.ham.nonlinear_field_into(z, &mut self.f);
            for (zk, fk) in z.iter_mut().zip(&self.f) {
                *zk += h * fk;
            }
        }
        self.rotate(z, 0.5 * h);
    }
}

/// Runs `cfg.steps()` steps, calling `observe(step, t, z)` after each one
/// (and once with step 0 before the first). Returns the final state.
pub fn run<F>(ham: &BeamHamiltonian, z0: &[Complex64], cfg: &IntegratorConfig, mut observe: F) -> Result<ModeState>
where
    F: FnMut(usize, f64, &[Complex64]) -> ControlFlow<()>,
{
    cfg.validate()?;
    if z0.len() != ham.len() {
        return Err(Error::DimensionMismatch { expected: ham.len(), found: z0.len() });
    }
    let mut z = z0.to_vec();
    let mut stepper = Stepper::new(ham, cfg);
    let h = cfg.h();
    if observe(0, 0.0, &z).is_break() {
        return Ok(z);
    }
    for k in 1..=cfg.steps() {
        stepper.step(&mut z, h, k)?;
        if observe(k, k as f64 * h, &z).is_break() {
            break;
        }
    }
    Ok(z)
}

/// Sampled solution with observable channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModeState>,
    pub energy: Vec<f64>,
    /// `|z|_w`.
    pub w_norm: Vec<f64>,
    /// `sqrt(π/3) |u|_1 ≥ max_x |u|`.
    pub sup_bound: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Trajectory {
    #[must_use]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `I_j = |z_j|²` at sample `k`.
    #[must_use]
    pub fn actions(&self, k: usize) -> Vec<f64> {
        self.states[k].iter().map(|z| z.norm_sqr()).collect()
    }

    #[must_use]
    pub fn final_state(&self) -> Option<&ModeState> {
        self.states.last()
    }

    /// Largest `|E(t) - E(0)| / |E(0)|`.
    #[must_use]
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.energy.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }

    /// CSV with header `t,energy,sum_actions,w_norm,sup_bound,I_1..I_k`.
    #[must_use]
    pub fn to_csv(&self, k_actions: usize) -> String {
        let k = k_actions.min(self.weights.len());
        let mut s = String::from("t,energy,sum_actions,w_norm,sup_bound");
        for j in 1..=k {
            s.push_str(&format!(",I_{j}"));
        }
        s.push('\n');
        for i in 0..self.len() {
            let act = self.actions(i);
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i],
                self.energy[i],
                act.iter().sum::<f64>(),
                self.w_norm[i],
                self.sup_bound[i]
            ));
            for a in &act[..k] {
                s.push_str(&format!(",{a:.16e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// `sqrt(π/3) |u|_1` straight from the mode state.
fn sup_bound_of(z: &[Complex64], omega: &[f64]) -> f64 {
    let h1: f64 = z
        .iter()
        .zip(omega)
        .enumerate()
        .map(|(i, (c, w))| {
            let j = (i + 1) as f64;
            2.0 * j * j * c.re * c.re / w
        })
        .sum();
    (std::f64::consts::PI / 3.0 * h1).sqrt()
}

/// Integrates with an explicit Hamiltonian, sampling every `cfg.stride` steps
/// and at the final step.
pub fn integrate_with(
    ham: &BeamHamiltonian,
    z0: &[Complex64],
    w: &WeightSequence,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        w_norm: Vec::new(),
        sup_bound: Vec::new(),
        weights: w.values.clone(),
    };
    let last = cfg.steps();
    run(ham, z0, cfg, |k, t, z| {
        if k % cfg.stride == 0 || k == last {
            traj.times.push(t);
            traj.states.push(z.to_vec());
            traj.energy.push(ham.energy(z));
            traj.w_norm.push(weighted_norm(z, w));
            traj.sup_bound.push(sup_bound_of(z, &ham.omega));
        }
        ControlFlow::Continue(())
    })?;
    Ok(traj)
}

/// Integrates the full truncated Hamiltonian `Λ + G`.
pub fn integrate(z0: &[Complex64], params: &ModelParams, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let ham = BeamHamiltonian::new(params.n_trunc, params.m)?;
    integrate_with(&ham, z0, &WeightSequence::wsn(params), cfg)
}

/// Settings of the auxiliary flow of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowConfig {
    pub substeps: usize,
    pub fixedpoint_tol: f64,
    pub max_fixedpoint_iters: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { substeps: 100, fixedpoint_tol: 1e-14, max_fixedpoint_iters: 50 }
    }
}

/// Time-`direction` flow of the generator (`direction = ±1`), by implicit
/// midpoint substeps.
pub fn flow_generating(
    z0: &[Complex64],
    s: &GeneratingFunction,
    direction: f64,
    cfg: &FlowConfig,
) -> Result<ModeState> {
    if z0.len() < s.poly.max_index() {
        return Err(Error::DimensionMismatch { expected: s.poly.max_index(), found: z0.len() });
    }
    if cfg.substeps == 0 {
        return Err(Error::Domain("flow needs at least one substep".into()));
    }
    let h = direction / cfg.substeps as f64;
    let mut z = z0.to_vec();
    let mut y = z.clone();
    for step in 1..=cfg.substeps {
        y.copy_from_slice(&z);
        let mut converged = false;
        let mut last = 0.0;
        for _ in 0..cfg.max_fixedpoint_iters {
            let f = s.vector_field(&y)?;
            let (mut diff, mut size) = (0.0f64, 0.0f64);
            for k in 0..z.len() {
                let next = z[k] + 0.5 * h * f[k];
                diff = diff.max((next - y[k]).norm());
                size = size.max(next.norm());
                y[k] = next;
            }
            last = diff;
            if diff <= cfg.fixedpoint_tol * size {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::FixedPointDiverged { step, iters: cfg.max_fixedpoint_iters, increment: last });
        }
        for (zk, yk) in z.iter_mut().zip(&y) {
            *zk = 2.0 * yk - *zk;
        }
    }
    Ok(z)
}

/// `|Φ(z) - z|_w`.
#[must_use]
pub fn displacement_norm(z: &[Complex64], image: &[Complex64], w: &WeightSequence) -> f64 {
    let d: Vec<Complex64> = image.iter().zip(z).map(|(a, b)| a - b).collect();
    weighted_norm(&d, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    /// `max_t Σ_j w_j² |I_j(t) - I_j(0)|`.
    pub weighted_action: f64,
    /// `max_t ||z(t)|_w - |z(0)|_w|`.
    pub norm: f64,
}

fn drift_of(states: &[ModeState], w: &[f64]) -> DriftReport {
    let Some(first) = states.first() else {
        return DriftReport { weighted_action: 0.0, norm: 0.0 };
    };
    let i0: Vec<f64> = first.iter().map(|c| c.norm_sqr()).collect();
    let n0: f64 = i0.iter().zip(w).map(|(i, w)| w * w * i).sum::<f64>().sqrt();
    let mut rep = DriftReport { weighted_action: 0.0, norm: 0.0 };
    for z in states {
        let mut da = 0.0;
        let mut n2 = 0.0;
        for ((c, a0), wj) in z.iter().zip(&i0).zip(w) {
            let a = c.norm_sqr();
            da += wj * wj * (a - a0).abs();
            n2 += wj * wj * a;
        }
        rep.weighted_action = rep.weighted_action.max(da);
        rep.norm = rep.norm.max((n2.sqrt() - n0).abs());
    }
    rep
}

#[must_use]
pub fn action_drift(traj: &Trajectory) -> DriftReport {
    drift_of(&traj.states, &traj.weights)
}

/// Drift of the actions of `Φ_S^{-1}(z(t))`, i.e. measured in normal-form coordinates.
pub fn action_drift_normal_form(traj: &Trajectory, s: &GeneratingFunction, cfg: &FlowConfig) -> Result<DriftReport> {
    let mapped = traj
        .states
        .iter()
        .map(|z| flow_generating(z, s, -1.0, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(drift_of(&mapped, &traj.weights))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// Fourth-order horizon `T₀ μ ε⁻⁴`, bounds `2ε` and `1.9ε`.
    Fourth,
    /// Sixth-order horizon `T₁ ε⁻⁶`, bounds `2.1ε` and `2ε`.
    Sixth,
}

/// Outcome of a simulated stability check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub estimate: Estimate,
    pub m: f64,
    pub n_trunc: usize,
    pub eps: f64,
    pub eps_threshold: f64,
    pub hypotheses_met: bool,
    pub message: String,
    pub horizon: Option<f64>,
    pub dt: f64,
    pub steps_run: usize,
    pub t_checked: f64,
    /// `t_checked / horizon`.
    pub certified_fraction: f64,
    /// `max_t sqrt(π/3)|u|_1 / (sup bound)`, checked every step.
    pub max_sup_ratio: f64,
    /// `max max_x |u| / (sup bound)` on a grid, at sampled steps.
    pub max_grid_sup_ratio: f64,
    /// `max_t |u|_{H^{s+2}_N} / (Sobolev bound)`, checked every step.
    pub max_sobolev_ratio: f64,
    pub relative_energy_drift: f64,
    pub pass: bool,
}

fn data_size(u0: &[f64], v0: &[f64], m: f64) -> Result<f64> {
    let nu = sobolev_norms(u0, 1.0, u0.len().max(1), m)?;
    let nv = sobolev_norms(v0, 1.0, v0.len().max(1), m)?;
    Ok(nu.h1.max(nv.tilde_hm1))
}

/// Simulates the estimate for data `(u0, v0)` up to the horizon or
/// `budget_steps`, whichever comes first. Hypothesis failures are reported.
pub fn verify_stability(
    estimate: Estimate,
    u0: &[f64],
    v0: &[f64],
    params: &ModelParams,
    budget_steps: usize,
    cfg: &IntegratorConfig,
) -> Result<StabilityReport> {
    cfg.validate()?;
    let m = params.m;
    let eps = data_size(u0, v0, m)?;
    let sixth_ok = m != 0.0 && (-0.5..=1.0).contains(&m);
    let (threshold, sup_factor, sob_factor) = match estimate {
        Estimate::Fourth => (eps0(m), 2.0, 1.9),
        Estimate::Sixth => (if sixth_ok { eps1(m).min(eps0(m)) } else { 0.0 }, 2.1, 2.0),
    };
    let mut report = StabilityReport {
        estimate,
        m,
        n_trunc: params.n_trunc,
        eps,
        eps_threshold: threshold,
        hypotheses_met: false,
        message: String::new(),
        horizon: None,
        dt: cfg.dt,
        steps_run: 0,
        t_checked: 0.0,
        certified_fraction: 0.0,
        max_sup_ratio: 0.0,
        max_grid_sup_ratio: 0.0,
        max_sobolev_ratio: 0.0,
        relative_energy_drift: 0.0,
        pass: false,
    };
    let hyp_problem = if m < -0.5 {
        Some(format!("m = {m} below -1/2"))
    } else if estimate == Estimate::Sixth && !sixth_ok {
        Some(format!("sixth-order estimate needs m != 0 in [-1/2, 1], got {m}"))
    } else if !(eps > 0.0) {
        Some("initial data vanish".to_string())
    } else if eps > threshold {
        Some(format!("eps = {eps:.6e} exceeds threshold {threshold:.6e}"))
    } else {
        None
    };
    if let Some(msg) = hyp_problem {
        report.message = format!("hypotheses not met: {msg}");
        return Ok(report);
    }
    report.hypotheses_met = true;
    let horizon = match estimate {
        Estimate::Fourth => t0(eps, m) * mu_unchecked(m) * eps.powi(-4),
        Estimate::Sixth => t1(eps, m) * eps.powi(-6),
    };
    report.horizon = Some(horizon);

    let n = params.n_trunc;
    let take = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| v.get(i).copied().unwrap_or(0.0)).collect() };
    let fields = FieldPair { u: take(u0), v: take(v0) };
    let z0 = mode_from_fields(&fields, m)?;
    let ham = BeamHamiltonian::new(n, m)?;

    let needed = (horizon / cfg.dt).ceil() as usize;
    let steps = needed.min(budget_steps);
    let run_cfg = IntegratorConfig { t_end: steps as f64 * cfg.dt, ..*cfg };

    // |u|_1² and |u|²_{H^{s+2}_N} as quadratic forms in Re z.
    let h1w: Vec<f64> = (1..=n).map(|j| 2.0 * (j * j) as f64 / ham.omega[j - 1]).collect();
    let sobw: Vec<f64> = (1..=n)
        .map(|j| {
            let jf = j as f64;
            let wt = if j <= params.n_weight { jf * jf } else { jf.powf(2.0 * (params.s + 2.0)) };
            2.0 * wt / ham.omega[j - 1]
        })
        .collect();
    let sup_lim = sup_factor * eps;
    let sob_lim = sob_factor * eps;
    let e0 = ham.energy(&z0);
    let grid_every = cfg.stride.max(1);
    let (mut max_sup, mut max_grid, mut max_sob, mut max_de) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut last_step = 0;
    run(&ham, &z0, &run_cfg, |k, _, z| {
        let (mut a, mut b) = (0.0, 0.0);
        for ((c, p), q) in z.iter().zip(&h1w).zip(&sobw) {
            let r2 = c.re * c.re;
            a += p * r2;
            b += q * r2;
        }
        max_sup = max_sup.max((std::f64::consts::PI / 3.0 * a).sqrt() / sup_lim);
        max_sob = max_sob.max(b.sqrt() / sob_lim);
        if k % grid_every == 0 {
            let u = displacement(z, &ham.omega);
            max_grid = max_grid.max(grid_sup(&u, 257) / sup_lim);
            max_de = max_de.max((ham.energy(z) - e0).abs() / e0.abs());
        }
        last_step = k;
        ControlFlow::Continue(())
    })?;
    report.steps_run = last_step;
    report.t_checked = last_step as f64 * cfg.dt;
    report.certified_fraction = (report.t_checked / horizon).min(1.0);
    report.max_sup_ratio = max_sup;
    report.max_grid_sup_ratio = max_grid;
    report.max_sobolev_ratio = max_sob;
    report.relative_energy_drift = max_de;
    report.pass = max_sup <= 1.0 && max_sob <= 1.0;
    report.message = if report.certified_fraction >= 1.0 {
        "full horizon integrated".to_string()
    } else {
        format!("budget reached: {:.3e} of the horizon checked", report.certified_fraction)
    };
    Ok(report)
}

/// Fourth-order estimate: `sup|u| ≤ 2ε` for `|t| ≤ T₀ μ ε⁻⁴`.
pub fn verify_fourth_order(
    u0: &[f64],
    v0: &[f64],
    params: &ModelParams,
    budget_steps: usize,
    cfg: &IntegratorConfig,
) -> Result<StabilityReport> {
    verify_stability(Estimate::Fourth, u0, v0, params, budget_steps, cfg)
}

/// Sixth-order estimate: `sup|u| ≤ 2.1ε` for `|t| ≤ T₁ ε⁻⁶`.
pub fn verify_sixth_order(
    u0: &[f64],
    v0: &[f64],
    params: &ModelParams,
    budget_steps: usize,
    cfg: &IntegratorConfig,
) -> Result<StabilityReport> {
    verify_stability(Estimate::Sixth, u0, v0, params, budget_steps, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnf::build_s4;
    use crate::hamiltonian::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_mode(n: usize, q1: f64) -> ModeState {
        let mut z = vec![Complex64::default(); n];
        z[0] = Complex64::new(q1 / 2f64.sqrt(), 0.0);
        z
    }

    #[test]
    fn linear_flow_is_rotation() {
        let ham = BeamHamiltonian::new(6, 0.5).unwrap().linear();
        let w = WeightSequence::w0(6, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z0 = random_state(&mut rng, &w, 6, 0.1);
        for scheme in [Scheme::ImplicitMidpoint, Scheme::Strang, Scheme::Splitting4] {
            let cfg = IntegratorConfig { dt: 1e-3, t_end: 1.0, stride: 100, scheme, ..Default::default() };
            let traj = integrate_with(&ham, &z0, &w, &cfg).unwrap();
            let zt = traj.final_state().unwrap();
            for (k, (a, b)) in zt.iter().zip(&z0).enumerate() {
                // the midpoint rule rotates by the Cayley factor of -iωh
                let hw = 1e-3 * ham.omega[k];
                let factor = match scheme {
                    Scheme::ImplicitMidpoint => {
                        (Complex64::new(1.0, -0.5 * hw) / Complex64::new(1.0, 0.5 * hw)).powu(1000)
                    }
                    _ => Complex64::from_polar(1.0, -ham.omega[k]),
                };
                assert!((a - b * factor).norm() < 1e-12, "{scheme:?}");
                assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
            }
            assert!(action_drift(&traj).weighted_action < 1e-12);
        }
    }

    #[test]
    fn single_mode_stays_single_mode() {
        let params = ModelParams::with_truncation(0.0, 4).unwrap();
        let dt = 1e-3 / 16.0;
        let cfg = IntegratorConfig { dt, t_end: 1e5 * dt, stride: 1000, ..Default::default() };
        let traj = integrate(&single_mode(4, 0.2), &params, &cfg).unwrap();
        for z in &traj.states {
            assert!(z[1..].iter().all(|c| *c == Complex64::default()));
        }
        assert!(traj.relative_energy_drift() < 1e-10);
    }

    #[test]
    fn schemes_agree() {
        let params = ModelParams::with_truncation(1.0, 5).unwrap();
        let w = WeightSequence::wsn(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z0 = random_state(&mut rng, &w, 5, 0.1);
        let mut finals = Vec::new();
        for scheme in [Scheme::ImplicitMidpoint, Scheme::Strang, Scheme::Splitting4] {
            let cfg = IntegratorConfig { dt: 1e-4, t_end: 0.5, stride: 5000, scheme, ..Default::default() };
            finals.push(integrate(&z0, &params, &cfg).unwrap().final_state().unwrap().clone());
        }
        for f in &finals[1..] {
            let d: f64 = f.iter().zip(&finals[0]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn time_reversal() {
        let params = ModelParams::with_truncation(0.0, 8).unwrap();
        let w = WeightSequence::wsn(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z0 = random_state(&mut rng, &w, 8, 0.05);
        let fwd = IntegratorConfig { dt: 1e-3, t_end: 2.0, stride: 2000, ..Default::default() };
        let z1 = integrate(&z0, &params, &fwd).unwrap().final_state().unwrap().clone();
        let back = IntegratorConfig { t_end: -2.0, ..fwd };
        let z2 = integrate(&z1, &params, &back).unwrap().final_state().unwrap().clone();
        let d: f64 = z2.iter().zip(&z0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(d < 10.0 * 1e-13 * 2000.0, "{d}");
    }

    #[test]
    fn generator_flow_basics() {
        let params = ModelParams::with_truncation(1.0, 6).unwrap();
        let s = build_s4(&params).unwrap();
        let zero = vec![Complex64::default(); 6];
        assert_eq!(flow_generating(&zero, &s, 1.0, &FlowConfig::default()).unwrap(), zero);
        let w = WeightSequence::wsn(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z0 = random_state(&mut rng, &w, 6, 0.05);
        let z1 = flow_generating(&z0, &s, 1.0, &FlowConfig::default()).unwrap();
        let z2 = flow_generating(&z1, &s, -1.0, &FlowConfig::default()).unwrap();
        let d: f64 = z2.iter().zip(&z0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(d < 1e-13);
        assert!(displacement_norm(&z0, &z1, &w) > 0.0);
    }

    #[test]
    fn hypotheses_reported() {
        let params = ModelParams::with_truncation(0.0, 4).unwrap();
        let u0 = vec![1.0, 0.0, 0.0, 0.0];
        let rep = verify_fourth_order(&u0, &[0.0; 4], &params, 10, &IntegratorConfig::default()).unwrap();
        assert!(!rep.hypotheses_met && !rep.pass);
        assert!(rep.message.starts_with("hypotheses not met"));
        let rep = verify_sixth_order(&[0.01], &[0.0], &params, 10, &IntegratorConfig::default()).unwrap();
        assert!(!rep.hypotheses_met);
    }

    #[test]
    fn csv_header() {
        let params = ModelParams::with_truncation(0.0, 3).unwrap();
        let cfg = IntegratorConfig { dt: 0.1, t_end: 0.2, ..Default::default() };
        let traj = integrate(&single_mode(3, 0.1), &params, &cfg).unwrap();
        let csv = traj.to_csv(2);
        assert!(csv.starts_with("t,energy,sum_actions,w_norm,sup_bound,I_1,I_2\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
