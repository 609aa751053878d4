//! Acceptance run: one line per criterion at the pinned tolerances.
//!
//! Runs without the libtest harness so the report is always printed. Exits
//! non-zero if a criterion fails for a reason other than the known,
//! classified discrepancies in the reference table.

use std::collections::BTreeSet;
use std::f64::consts::{E, PI};
use std::ops::ControlFlow;
use std::process::ExitCode;
use std::time::Instant;

use beam_nf::bnf::{
    build_s4, build_s6, eps0, eps1, gamma_threshold, homological_residual4, homological_residual6, r6_from_s4, t0, t1,
};
use beam_nf::dynamics::{
    action_drift, action_drift_normal_form, displacement_norm, flow_generating, integrate, run, verify_fourth_order,
    verify_sixth_order, FlowConfig, IntegratorConfig,
};
use beam_nf::hamiltonian::{mode_from_fields, random_state, BeamHamiltonian, FieldPair};
use beam_nf::physical::{
    reference_rows, stability_table, initial_data_from_profile, sag_coefficients, sag_h1, InitialProfile,
    Mismatch, PhysicalBeam, ProfileShape, Section,
};
use beam_nf::poisson::PairedPolynomial;
use beam_nf::resonance::{certify_prop_4th, certify_prop_6th, resonant_triples_6th};
use beam_nf::spectrum::{mu, sobolev_norm, ModelParams, WeightSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure explained by documented, classified discrepancies.
    documented: bool,
}

fn report(n: u8, title: &str, started: Instant, o: &Outcome) {
    let status = if o.pass { "PASS" } else { "FAIL" };
    let note = if !o.pass && o.documented { " (documented discrepancy)" } else { "" };
    println!(
        "criterion {n} [{title}]: {status}{note} in {:.1}s; {}",
        started.elapsed().as_secs_f64(),
        o.detail
    );
}

fn ok(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, documented: false }
}

fn criterion1() -> Outcome {
    let e0 = eps0(1.0);
    let t0_lim = t0(1e-9, 0.0);
    let t1_val = t1(eps1(1.0), 1.0);
    let pass = (e0 - 0.13455).abs() <= 1e-5 && (0.0080..=0.0081).contains(&t0_lim) && t1_val >= 1.9e-4;
    ok(pass, format!("eps0(m=1) = {e0:.6}, T0(eps->0) = {t0_lim:.6}, T1(m=1, eps1) = {t1_val:.4e}"))
}

/// All triples `a < b < c <= n` with `a² + b² = c²`, from Euclid's parametrization.
fn pythagorean_triples(n: usize) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    let mut p = 2;
    while p * p < n {
        for q in 1..p {
            if (p - q) % 2 == 1 && gcd(p, q) == 1 {
                let (a, b, c) = (p * p - q * q, 2 * p * q, p * p + q * q);
                let mut k = 1;
                while k * c <= n {
                    out.insert((k * a.min(b), k * a.max(b), k * c));
                    k += 1;
                }
            }
        }
        p += 1;
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion2() -> beam_nf::Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [-0.5, -0.25, 0.0, 0.5, 1.0, 2.0] {
        let r = certify_prop_4th(2000, m)?;
        pass &= r.min_abs_delta >= mu(m)? && r.rigorous.pass;
        parts.push(format!("4th m={m}: min {:.6} / mu {:.6}", r.min_abs_delta, mu(m)?));
    }
    for m in [-0.5, -0.25, 0.5, 1.0] {
        let r = certify_prop_6th(300, m)?;
        pass &= r.min_abs_delta >= 0.875 * m.abs() && r.rigorous.pass;
        parts.push(format!("6th m={m}: min {:.6} (ratio {:.4})", r.min_abs_delta, r.ratio_to_bound));
    }
    let flagged: BTreeSet<_> = resonant_triples_6th(300, 0.0).into_iter().collect();
    let oracle = pythagorean_triples(300);
    let same = flagged == oracle;
    pass &= same;
    parts.push(format!("m=0 flags {} patterns, Euclid oracle {}, identical {same}", flagged.len(), oracle.len()));
    Ok(ok(pass, parts.join("; ")))
}

fn criterion3() -> beam_nf::Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [-0.5, 0.5, 1.0] {
        let p = ModelParams::with_truncation(m, 12)?;
        let s4 = build_s4(&p)?;
        let gmax = PairedPolynomial::beam_quartic(&BeamHamiltonian::new(12, m)?).max_abs_coeff();
        let res4 = homological_residual4(&s4, &p)? / gmax;
        let r6 = r6_from_s4(&s4, &p)?;
        let (s6, _) = build_s6(&r6, &p)?;
        let res6 = homological_residual6(&s6, &r6, &p)? / r6.max_abs_coeff();
        pass &= res4 <= 1e-12 && res6 <= 1e-12;
        parts.push(format!("m={m}: {res4:.2e} / {res6:.2e}"));
    }
    Ok(ok(pass, format!("relative residuals 4th / 6th at N=12: {}", parts.join(", "))))
}

fn criterion4() -> beam_nf::Result<Outcome> {
    let p = ModelParams::with_truncation(1.0, 8)?;
    let h = BeamHamiltonian::new(8, 1.0)?;
    let w = WeightSequence::wsn(&p);
    let s4 = build_s4(&p)?;
    let r6 = r6_from_s4(&s4, &p)?;
    let gbar = PairedPolynomial::beam_quartic(&h).project_integrable4()?;
    let residual = |a: f64| -> beam_nf::Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut total = 0.0;
        for _ in 0..20 {
            let z = random_state(&mut rng, &w, 6, a);
            let z1 = flow_generating(&z, &s4, 1.0, &FlowConfig::default())?;
            let v = h.energy(&z1) - h.lambda(&z) - gbar.evaluate_real(&z)? - r6.evaluate_real(&z)?;
            total += v.abs();
        }
        Ok(total)
    };
    let (big, small) = (residual(0.1)?, residual(0.05)?);
    let ratio = big / small;
    Ok(ok(
        (200.0..=300.0).contains(&ratio),
        format!("m=1, N=8, 20 states on 6 modes, |z|_w = 0.1 -> 0.05: residual {big:.3e} -> {small:.3e}, ratio {ratio:.2} (2^8 = 256)"),
    ))
}

fn criterion5() -> beam_nf::Result<Outcome> {
    let rows = stability_table(&reference_rows(), 1e-4, 1e-2)?;
    let p1 = sag_h1();
    let beam = PhysicalBeam {
        young: 200e9,
        density: 7500.0,
        length: 2.0,
        section: Section::Square { side: 0.02 },
        force: 0.0,
    };
    let data = initial_data_from_profile(&InitialProfile { delta: 1e-4, shape: ProfileShape::Sag }, &beam, 1)?;
    let ratio = data.eps / 1e-4;
    let profile_ok = (p1 - 1.2583).abs() <= 1e-3 && (ratio - 436.0).abs() <= 1.0;
    let mut entries = 0;
    let mut matched = 0;
    let mut misses = Vec::new();
    let mut unknown = false;
    let names = ["P", "nu", "T"];
    for r in &rows {
        for (k, c) in r.checks.iter().flatten().enumerate() {
            entries += 1;
            if c.within_5pct {
                matched += 1;
            } else {
                misses.push(format!(
                    "{} L={} m={} {}: {:.4e} vs printed {} {:?}",
                    r.material, r.length, r.m, names[k], c.computed, c.printed, c.mismatch
                ));
                // the known set: m = 1 times a factor two off, rubber P in other units
                let known = (k == 2 && r.m == 1.0 && c.mismatch == [Mismatch::FactorTwo])
                    || (k == 0 && r.material == "Rubber" && c.mismatch.contains(&Mismatch::Units));
                unknown |= !known;
            }
        }
    }
    let pass = profile_ok && misses.is_empty();
    let detail = format!(
        "|p|_1 = {p1:.5}, eps/delta = {ratio:.2}; {matched}/{entries} entries within 5%; outside: {}",
        if misses.is_empty() { "none".to_string() } else { misses.join(" | ") }
    );
    Ok(Outcome { pass, detail, documented: profile_ok && !unknown })
}

fn criterion6() -> beam_nf::Result<Outcome> {
    let p = ModelParams::with_truncation(0.0, 16)?;
    let coeffs = sag_coefficients(16);
    let scale = 0.05 / sobolev_norm(&coeffs, 1.0);
    let u: Vec<f64> = coeffs.iter().map(|c| c * scale).collect();
    let z0 = mode_from_fields(&FieldPair { u, v: vec![0.0; 16] }, 0.0)?;
    let cfg = IntegratorConfig { dt: 1e-3, t_end: 100.0, stride: 100, ..Default::default() };
    let fwd = integrate(&z0, &p, &cfg)?;
    let drift = fwd.relative_energy_drift();
    // the profile is odd-mode only; even modes must stay exactly zero
    let support = fwd
        .states
        .iter()
        .all(|z| z.iter().enumerate().all(|(i, c)| (z0[i] != Default::default()) || c.norm() == 0.0));
    let zt = fwd.final_state().expect("non-empty trajectory").clone();
    let back = integrate(&zt, &p, &IntegratorConfig { t_end: -100.0, ..cfg })?;
    let round_trip = back
        .final_state()
        .expect("non-empty trajectory")
        .iter()
        .zip(&z0)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ok(
        drift <= 1e-8 && support && round_trip <= 1e-9,
        format!("m=0, N=16, eps=0.05, dt=1e-3, 1e5 steps: energy drift {drift:.2e}, support invariant {support}, round trip {round_trip:.2e}"),
    ))
}

fn profile_data(eps: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let c = sag_coefficients(n);
    let s = eps / sag_h1();
    (c.iter().map(|x| x * s).collect(), vec![0.0; n])
}

fn criterion7() -> beam_nf::Result<Outcome> {
    let n = 16;
    let cfg = IntegratorConfig { dt: 1e-3, stride: 1000, ..Default::default() };
    let p0 = ModelParams::with_truncation(0.0, n)?;
    let (u0, v0) = profile_data(0.1, n);
    let full = verify_fourth_order(&u0, &v0, &p0, usize::MAX, &cfg)?;

    // continue the same data to 1.6e4 time units
    let ham = BeamHamiltonian::new(n, 0.0)?;
    let z0 = mode_from_fields(&FieldPair { u: u0.clone(), v: v0.clone() }, 0.0)?;
    let weights: Vec<f64> = (1..=n).map(|j| 2.0 * (j * j) as f64 / ham.omega[j - 1]).collect();
    let mut ext_max = 0.0f64;
    run(&ham, &z0, &IntegratorConfig { t_end: 1.6e4, ..cfg }, |_, _, z| {
        let h1: f64 = z.iter().zip(&weights).map(|(c, w)| w * c.re * c.re).sum();
        ext_max = ext_max.max((PI / 3.0 * h1).sqrt() / (2.0 * 0.1));
        ControlFlow::Continue(())
    })?;

    let beam = PhysicalBeam {
        young: 200e9,
        density: 7500.0,
        length: 2.0,
        section: Section::Square { side: 0.02 },
        force: 0.0,
    };
    let data = initial_data_from_profile(&InitialProfile { delta: 1e-4, shape: ProfileShape::Sag }, &beam, n)?;
    let p1 = ModelParams::with_truncation(1.0, n)?;
    let partial = verify_sixth_order(&data.u0, &data.v0, &p1, 10_000_000, &cfg)?;
    let phys0 = verify_fourth_order(&data.u0, &data.v0, &p0, 10_000_000, &cfg)?;

    let pass = full.pass && full.certified_fraction >= 1.0 && ext_max <= 1.0 && partial.pass && phys0.pass;
    Ok(ok(
        pass,
        format!(
            "eps=0.1, m=0: horizon {:.1} integrated in full ({} steps), max sup|u|/(2eps) {:.4}, max |u|_H/(1.9eps) {:.4}; \
             extended to 1.6e4 units: max ratio {:.4}; eps={:.4}, m=1, sixth order: horizon {:.3e}, {} steps cover fraction {:.3}, max ratio {:.4} (partial check); \
             same data, m=0: horizon {:.1}, fraction {:.3}, max ratio {:.4}",
            full.horizon.unwrap_or(f64::NAN),
            full.steps_run,
            full.max_sup_ratio,
            full.max_sobolev_ratio,
            ext_max,
            partial.eps,
            partial.horizon.unwrap_or(f64::NAN),
            partial.steps_run,
            partial.certified_fraction,
            partial.max_sup_ratio,
            phys0.horizon.unwrap_or(f64::NAN),
            phys0.certified_fraction,
            phys0.max_sup_ratio,
        ),
    ))
}

fn criterion8() -> beam_nf::Result<Outcome> {
    let p = ModelParams::with_truncation(1.0, 8)?;
    let w = WeightSequence::wsn(&p);
    let s4 = build_s4(&p)?;
    let mut raw = Vec::new();
    let mut nf = Vec::new();
    for eps in [0.08, 0.04] {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let z0 = random_state(&mut rng, &w, 4, eps);
        let cfg = IntegratorConfig { dt: 1e-3, t_end: 1e3, stride: 500, ..Default::default() };
        let traj = integrate(&z0, &p, &cfg)?;
        raw.push(action_drift(&traj).weighted_action);
        nf.push(action_drift_normal_form(&traj, &s4, &FlowConfig::default())?.weighted_action);
    }
    let (rr, rn) = (raw[0] / raw[1], nf[0] / nf[1]);
    Ok(ok(
        (10.0..=24.0).contains(&rr) && (40.0..=100.0).contains(&rn),
        format!(
            "m=1, N=8, horizon 1e3, eps 0.08 -> 0.04: raw drift {:.3e} -> {:.3e} (ratio {rr:.2}), normal-form drift {:.3e} -> {:.3e} (ratio {rn:.2})",
            raw[0], raw[1], nf[0], nf[1]
        ),
    ))
}

fn criterion9() -> beam_nf::Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [-0.5, 0.0, 1.0] {
        let p = ModelParams::with_truncation(m, 8)?;
        let w = WeightSequence::wsn(&p);
        let s4 = build_s4(&p)?;
        let r = gamma_threshold(m);
        let bound = r / (80.0 * E);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut disp, mut inv) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let z = random_state(&mut rng, &w, 8, r);
            let z1 = flow_generating(&z, &s4, 1.0, &FlowConfig::default())?;
            let z2 = flow_generating(&z1, &s4, -1.0, &FlowConfig::default())?;
            disp = disp.max(displacement_norm(&z, &z1, &w));
            inv = inv.max(displacement_norm(&z, &z2, &w));
        }
        pass &= disp <= bound && inv <= 1e-10;
        parts.push(format!("m={m}: r={r:.5}, displacement {disp:.3e} <= {bound:.3e}, inverse error {inv:.1e}"));
    }
    Ok(ok(pass, parts.join("; ")))
}

fn main() -> ExitCode {
    type Check = fn() -> beam_nf::Result<Outcome>;
    let checks: [(u8, &str, Check); 9] = [
        (1, "constants", || Ok(criterion1())),
        (2, "resonance certification", criterion2),
        (3, "homological residuals", criterion3),
        (4, "remainder order", criterion4),
        (5, "reference table", criterion5),
        (6, "simulation conservation", criterion6),
        (7, "stability desk check", criterion7),
        (8, "drift scaling", criterion8),
        (9, "flow contract", criterion9),
    ];
    let mut unexpected = 0;
    for (n, title, f) in checks {
        let started = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}"), documented: false });
        report(n, title, started, &outcome);
        if !outcome.pass && !outcome.documented {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
