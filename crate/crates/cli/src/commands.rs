use std::str::FromStr;

use beam_nf::bnf::{self, gamma_threshold, normal_form, stability_certificate, Order};
use beam_nf::dynamics::{
    action_drift, action_drift_normal_form, integrate_with, verify_stability, Estimate, FlowConfig, IntegratorConfig,
    Scheme,
};
use beam_nf::hamiltonian::{fields_from_mode, random_state, BeamHamiltonian, FieldPair};
use beam_nf::physical::{table_csv, reference_rows, stability_table, table_text, sag_coefficients, TableRow, PrintedRow};
use beam_nf::resonance::{certify_prop_4th, certify_prop_6th};
use beam_nf::spectrum::{frak_c, frequency, mu, sobolev_norm, ModelParams, WeightSequence};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::Section;
use crate::output::{csv_f64, key_values, key_values_csv, sig6, table};
use crate::{CliError, Format, Globals, Outcome, UsageError};

const SECTIONS: [&str; 6] = ["freq", "resonances", "bnf", "simulate", "verify", "fig1"];
const ROW_PREFIX: &str = "row.";

fn section(g: &Globals, name: &str) -> Result<Section, CliError> {
    match &g.config {
        Some(c) => {
            c.check_sections(&SECTIONS, Some(ROW_PREFIX))?;
            Ok(c.section(name))
        }
        None => Ok(crate::config::ConfigFile::default().section(name)),
    }
}

fn json_text<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = bnf::to_json(v)?;
    s.push('\n');
    Ok(s)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), sig6)
}

fn opt_csv(x: Option<f64>) -> String {
    x.map_or_else(String::new, csv_f64)
}

#[derive(Debug, Clone, Copy)]
pub struct SchemeArg(Scheme);

impl FromStr for SchemeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "midpoint" => Ok(Self(Scheme::ImplicitMidpoint)),
            "strang" => Ok(Self(Scheme::Strang)),
            "splitting4" => Ok(Self(Scheme::Splitting4)),
            _ => Err(format!("unknown scheme `{s}` (midpoint, strang, splitting4)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// The reference shape, scaled to the requested size.
    Sag,
    /// Random state on a few modes, drawn from `--seed`.
    Random,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sag" => Ok(Self::Sag),
            "random" => Ok(Self::Random),
            _ => Err(format!("unknown profile `{s}` (sag, random)")),
        }
    }
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    j_max: Option<usize>,
}

pub fn freq(a: FreqArgs, g: &Globals) -> Result<Outcome, CliError> {
    let mut s = section(g, "freq")?;
    let m = s.take_or("m", a.m, 0.0)?;
    let j_max = s.take_or("j_max", a.j_max, 10)?;
    s.finish()?;
    if j_max == 0 {
        return Err(UsageError("j_max must be positive".into()).into());
    }
    let omega = (1..=j_max).map(|j| frequency(j, m)).collect::<beam_nf::Result<Vec<_>>>()?;
    let mu = mu(m)?;
    let c = frak_c(m).ok();
    let text = match g.format {
        Format::Json => json_text(&json!({ "m": m, "mu": mu, "frak_c": c, "omega": omega }))?,
        Format::Csv => {
            let mut t = String::from("j,omega,mu,frak_c\n");
            for (j, w) in omega.iter().enumerate() {
                t.push_str(&format!("{},{},{},{}\n", j + 1, csv_f64(*w), csv_f64(mu), opt_csv(c)));
            }
            t
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = omega.iter().enumerate().map(|(j, w)| vec![(j + 1).to_string(), sig6(*w)]).collect();
            format!("m = {}\nmu = {}\nc = {}\n{}", sig6(m), sig6(mu), opt(c), table(&["j", "omega_j"], &rows))
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    /// 4 or 6.
    #[arg(long)]
    order: Option<u8>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    i_max: Option<usize>,
}

pub fn resonances(a: ResonanceArgs, g: &Globals) -> Result<Outcome, CliError> {
    let mut s = section(g, "resonances")?;
    let order = s.take_or("order", a.order, 4)?;
    let m = s.take_or("m", a.m, 0.0)?;
    let i_max = s.take_or("i_max", a.i_max, 2000)?;
    s.finish()?;
    let (json, summary, classes, pass) = match order {
        4 => {
            let r = certify_prop_4th(i_max, m)?;
            let classes: Vec<_> = r.per_class.iter().map(|c| (c.class, c.indices.clone(), c.delta)).collect();
            (json_text(&r)?, (r.bound, r.min_abs_delta, r.ratio_to_bound, r.top_decade_min, r.rigorous), classes, r.pass)
        }
        6 => {
            let r = certify_prop_6th(i_max, m)?;
            let classes: Vec<_> = r.per_class.iter().map(|c| (c.class, c.indices.clone(), c.delta)).collect();
            (json_text(&r)?, (r.bound, r.min_abs_delta, r.ratio_to_bound, r.top_decade_min, r.rigorous), classes, r.pass)
        }
        _ => return Err(UsageError(format!("order must be 4 or 6, got {order}")).into()),
    };
    let (bound, min, ratio, top, rig) = summary;
    let indices = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let text = match g.format {
        Format::Json => json,
        Format::Csv => {
            let mut t = String::from("class,indices,min_abs_delta\n");
            for (c, idx, d) in &classes {
                t.push_str(&format!("{c},{},{}\n", indices(idx), csv_f64(*d)));
            }
            t
        }
        Format::Table => {
            let head = key_values(&[
                ("order", order.to_string()),
                ("m", sig6(m)),
                ("i_max", i_max.to_string()),
                ("bound", sig6(bound)),
                ("min |delta|", sig6(min)),
                ("ratio", sig6(ratio)),
                ("top-decade min", sig6(top)),
                ("interval recheck", format!("{} (sharp {})", rig.pass, rig.sharp)),
                ("pass", pass.to_string()),
            ]);
            let rows: Vec<Vec<String>> =
                classes.iter().map(|(c, idx, d)| vec![c.to_string(), indices(idx), sig6(*d)]).collect();
            format!("{head}{}", table(&["class", "argmin", "min |delta|"], &rows))
        }
    };
    let failure = (!pass).then(|| CliError::Hypothesis(format!("certification failed: minimum {min:e} below bound {bound:e}")));
    Ok(Outcome { text, failure })
}

#[derive(Debug, Args)]
pub struct BnfArgs {
    #[arg(long)]
    m: Option<f64>,
    /// Truncation of the symbolic stage.
    #[arg(long)]
    n: Option<usize>,
    /// Working radius; defaults to the largest one covered by both estimates.
    #[arg(long)]
    r: Option<f64>,
    /// 4 or 6.
    #[arg(long)]
    order: Option<u8>,
}

pub fn bnf(a: BnfArgs, g: &Globals) -> Result<Outcome, CliError> {
    let mut s = section(g, "bnf")?;
    let m = s.take_or("m", a.m, 1.0)?;
    let n = s.take_or("n", a.n, 12)?;
    let r = s.take("r", a.r)?;
    let order = s.take_or("order", a.order, 4)?;
    s.finish()?;
    let order = match order {
        4 => Order::Fourth,
        6 => Order::Sixth,
        _ => return Err(UsageError(format!("order must be 4 or 6, got {order}")).into()),
    };
    let params = ModelParams::with_truncation(m, n)?;
    // largest radius meeting both the threshold and the data-size limit
    let r = r.unwrap_or_else(|| gamma_threshold(m).min(bnf::eps0(m) / bnf::radius_ratio()));
    if !(r > 0.0) {
        return Err(UsageError(format!("radius r = {r} must be positive")).into());
    }
    let consts = bnf::constants(&params, r)?;
    let cert = stability_certificate(consts.eps, &params)?;
    let nf = normal_form(&params, r, order)?;
    let rows: Vec<(&str, Option<f64>)> = vec![
        ("m", Some(m)),
        ("mu", Some(consts.mu)),
        ("frak_c", Some(consts.frak_c)),
        ("r", Some(r)),
        ("gamma", Some(consts.gamma)),
        ("gamma_max", Some(consts.gamma_max)),
        ("eps", Some(consts.eps)),
        ("eps0", Some(consts.eps0)),
        ("eps1", Some(consts.eps1)),
        ("t0", Some(consts.t0)),
        ("t1", consts.t1),
        ("eta", Some(consts.eta)),
        ("c_r", Some(consts.c_r)),
        ("r_ge8_bound", Some(consts.r_ge8_bound)),
        ("eta_tilde", consts.eta_tilde),
        ("c_tilde", consts.c_tilde),
        ("horizon4", Some(consts.horizon4)),
        ("horizon6", consts.horizon6),
        ("stability_horizon_4th", cert.horizon_4th),
        ("stability_horizon_6th", cert.horizon_6th),
        ("s4_norm_bound", Some(nf.bounds.s4_computed)),
        ("r6_norm_bound", Some(nf.bounds.r6_computed)),
        ("s6_norm_bound", nf.bounds.s6_computed),
        ("residual4", Some(nf.residual4)),
        ("residual6", nf.residual6),
    ];
    let flags = [
        ("threshold4_ok", consts.threshold4_ok),
        ("threshold6_ok", consts.threshold6_ok),
        ("threshold_consistent", cert.threshold_consistent),
    ];
    let text = match g.format {
        Format::Json => json_text(&json!({ "constants": consts, "certificate": cert, "normal_form": nf }))?,
        Format::Csv => {
            let mut kv: Vec<(&str, String)> = rows.iter().map(|(k, v)| (*k, opt_csv(*v))).collect();
            kv.extend(flags.iter().map(|(k, b)| (*k, b.to_string())));
            key_values_csv(&kv)
        }
        Format::Table => {
            let mut kv: Vec<(&str, String)> = rows.iter().map(|(k, v)| (*k, opt(*v))).collect();
            kv.extend(flags.iter().map(|(k, b)| (*k, b.to_string())));
            key_values(&kv)
        }
    };
    Ok(Outcome::ok(text))
}

/// Initial coefficients of size `eps`: `|u0|_1` for the reference profile,
/// `|z|_w` for random states.
fn initial_fields(profile: Profile, eps: f64, active: usize, params: &ModelParams, seed: u64) -> Result<FieldPair, CliError> {
    if !(eps > 0.0) {
        return Err(UsageError(format!("eps = {eps} must be positive")).into());
    }
    let n = params.n_trunc;
    Ok(match profile {
        Profile::Sag => {
            let c = sag_coefficients(n);
            let k = eps / sobolev_norm(&c, 1.0);
            FieldPair { u: c.iter().map(|x| k * x).collect(), v: vec![0.0; n] }
        }
        Profile::Random => {
            if active == 0 || active > n {
                return Err(UsageError(format!("active = {active} must lie in 1..={n}")).into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = random_state(&mut rng, &WeightSequence::wsn(params), active, eps);
            fields_from_mode(&z, params.m)?
        }
    })
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    m: Option<f64>,
    /// Number of modes.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time; negative runs backwards.
    #[arg(long)]
    t_end: Option<f64>,
    /// midpoint, strang or splitting4.
    #[arg(long)]
    scheme: Option<SchemeArg>,
    /// Keep every stride-th step.
    #[arg(long)]
    stride: Option<usize>,
    /// sag or random.
    #[arg(long)]
    profile: Option<Profile>,
    /// Size of the initial data.
    #[arg(long)]
    eps: Option<f64>,
    /// Modes excited by a random profile.
    #[arg(long)]
    active: Option<usize>,
    /// Drop the stretching term.
    #[arg(long)]
    linear: Option<bool>,
    /// Also report the action drift in normal-form coordinates.
    #[arg(long)]
    normal_form: Option<bool>,
    /// Number of action columns in the CSV.
    #[arg(long)]
    actions: Option<usize>,
}

#[derive(Serialize)]
struct SimulateSummary {
    m: f64,
    n: usize,
    linear: bool,
    eps: f64,
    config: IntegratorConfig,
    steps: usize,
    samples: usize,
    relative_energy_drift: f64,
    weighted_action_drift: f64,
    norm_drift: f64,
    normal_form_action_drift: Option<f64>,
    resolution_warning: Option<String>,
}

pub fn simulate(a: SimulateArgs, g: &Globals) -> Result<Outcome, CliError> {
    let mut s = section(g, "simulate")?;
    let m = s.take_or("m", a.m, 0.0)?;
    let n = s.take_or("n", a.n, 16)?;
    let dt = s.take_or("dt", a.dt, 1e-3)?;
    let t_end = s.take_or("t_end", a.t_end, 10.0)?;
    let scheme = s.take_or("scheme", a.scheme, SchemeArg(Scheme::ImplicitMidpoint))?.0;
    let stride = s.take_or("stride", a.stride, 100)?;
    let profile = s.take_or("profile", a.profile, Profile::Sag)?;
    let eps = s.take_or("eps", a.eps, 0.05)?;
    let active = s.take_or("active", a.active, 4.min(n))?;
    let linear = s.take_or("linear", a.linear, false)?;
    let with_nf = s.take_or("normal_form", a.normal_form, false)?;
    let actions = s.take_or("actions", a.actions, n)?;
    s.finish()?;

    let params = ModelParams::with_truncation(m, n)?;
    let cfg = IntegratorConfig { dt, scheme, t_end, stride, ..Default::default() };
    cfg.validate()?;
    let fields = initial_fields(profile, eps, active, &params, g.seed)?;
    let z0 = beam_nf::hamiltonian::mode_from_fields(&fields, m)?;
    let mut ham = BeamHamiltonian::new(n, m)?;
    if linear {
        ham = ham.linear();
    }
    let traj = integrate_with(&ham, &z0, &WeightSequence::wsn(&params), &cfg)?;
    let text = match g.format {
        Format::Csv => traj.to_csv(actions),
        Format::Json | Format::Table => {
            let drift = action_drift(&traj);
            let nf_drift = if with_nf {
                let s4 = bnf::build_s4(&params)?;
                Some(action_drift_normal_form(&traj, &s4, &FlowConfig::default())?.weighted_action)
            } else {
                None
            };
            let summary = SimulateSummary {
                m,
                n,
                linear,
                eps,
                config: cfg,
                steps: cfg.steps(),
                samples: traj.len(),
                relative_energy_drift: traj.relative_energy_drift(),
                weighted_action_drift: drift.weighted_action,
                norm_drift: drift.norm,
                normal_form_action_drift: nf_drift,
                resolution_warning: cfg.resolution_warning(ham.omega.iter().copied().fold(0.0, f64::max)),
            };
            if g.format == Format::Json {
                json_text(&summary)?
            } else {
                key_values(&[
                    ("m", sig6(m)),
                    ("modes", n.to_string()),
                    ("linear", linear.to_string()),
                    ("eps", sig6(eps)),
                    ("dt", sig6(dt)),
                    ("t_end", sig6(t_end)),
                    ("steps", summary.steps.to_string()),
                    ("relative energy drift", sig6(summary.relative_energy_drift)),
                    ("weighted action drift", sig6(summary.weighted_action_drift)),
                    ("norm drift", sig6(summary.norm_drift)),
                    ("normal-form action drift", opt(nf_drift)),
                ])
            }
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// 4 or 6.
    #[arg(long)]
    estimate: Option<u8>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// sag or random.
    #[arg(long)]
    profile: Option<Profile>,
    #[arg(long)]
    active: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    scheme: Option<SchemeArg>,
    /// Step budget; the run stops at the horizon or here.
    #[arg(long)]
    budget: Option<usize>,
}

pub fn verify(a: VerifyArgs, g: &Globals) -> Result<Outcome, CliError> {
    let mut s = section(g, "verify")?;
    let estimate = s.take_or("estimate", a.estimate, 4)?;
    let m = s.take_or("m", a.m, 0.0)?;
    let n = s.take_or("n", a.n, 16)?;
    let eps = s.take_or("eps", a.eps, 0.1)?;
    let profile = s.take_or("profile", a.profile, Profile::Sag)?;
    let active = s.take_or("active", a.active, 4.min(n))?;
    let dt = s.take_or("dt", a.dt, 1e-3)?;
    let scheme = s.take_or("scheme", a.scheme, SchemeArg(Scheme::ImplicitMidpoint))?.0;
    let budget = s.take_or("budget", a.budget, 1_000_000)?;
    s.finish()?;
    let estimate = match estimate {
        4 => Estimate::Fourth,
        6 => Estimate::Sixth,
        _ => return Err(UsageError(format!("estimate must be 4 or 6, got {estimate}")).into()),
    };
    let params = ModelParams::with_truncation(m, n)?;
    let fields = initial_fields(profile, eps, active, &params, g.seed)?;
    let cfg = IntegratorConfig { dt, scheme, stride: 1000, ..Default::default() };
    let r = verify_stability(estimate, &fields.u, &fields.v, &params, budget, &cfg)?;
    let text = match g.format {
        Format::Json => json_text(&r)?,
        Format::Csv => key_values_csv(&[
            ("m", csv_f64(r.m)),
            ("n", r.n_trunc.to_string()),
            ("eps", csv_f64(r.eps)),
            ("eps_threshold", csv_f64(r.eps_threshold)),
            ("hypotheses_met", r.hypotheses_met.to_string()),
            ("horizon", opt_csv(r.horizon)),
            ("steps_run", r.steps_run.to_string()),
            ("t_checked", csv_f64(r.t_checked)),
            ("certified_fraction", csv_f64(r.certified_fraction)),
            ("max_sup_ratio", csv_f64(r.max_sup_ratio)),
            ("max_grid_sup_ratio", csv_f64(r.max_grid_sup_ratio)),
            ("max_sobolev_ratio", csv_f64(r.max_sobolev_ratio)),
            ("relative_energy_drift", csv_f64(r.relative_energy_drift)),
            ("pass", r.pass.to_string()),
        ]),
        Format::Table => key_values(&[
            ("m", sig6(r.m)),
            ("modes", r.n_trunc.to_string()),
            ("eps", sig6(r.eps)),
            ("eps threshold", sig6(r.eps_threshold)),
            ("hypotheses met", r.hypotheses_met.to_string()),
            ("horizon", opt(r.horizon)),
            ("steps run", r.steps_run.to_string()),
            ("certified fraction", sig6(r.certified_fraction)),
            ("max sup ratio", sig6(r.max_sup_ratio)),
            ("max grid sup ratio", sig6(r.max_grid_sup_ratio)),
            ("max Sobolev ratio", sig6(r.max_sobolev_ratio)),
            ("relative energy drift", sig6(r.relative_energy_drift)),
            ("pass", r.pass.to_string()),
            ("message", r.message.clone()),
        ]),
    };
    let failure = if !r.hypotheses_met {
        Some(CliError::Hypothesis(r.message.clone()))
    } else if !r.pass {
        Some(CliError::Numerical(format!("bound exceeded: {}", r.message)))
    } else {
        None
    };
    Ok(Outcome { text, failure })
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Relative amplitude of the initial deflection.
    #[arg(long)]
    delta: Option<f64>,
    /// Thickness over length of the square section.
    #[arg(long)]
    h_over_l: Option<f64>,
    /// Include the ten reference rows.
    #[arg(long)]
    defaults: Option<bool>,
}

fn config_row(mut s: Section) -> Result<TableRow, CliError> {
    let material = s.require("material")?;
    let young_gpa = s.require("young_gpa")?;
    let density = s.require("density")?;
    let length = s.require("length")?;
    let m = s.require("m")?;
    let p: Option<String> = s.take("printed_p_kn", None)?;
    let nu: Option<String> = s.take("printed_nu", None)?;
    let t: Option<String> = s.take("printed_t", None)?;
    s.finish()?;
    let printed = match (p, nu, t) {
        (Some(p_kn), Some(nu), Some(t)) => Some(PrintedRow { p_kn, nu, t }),
        (None, None, None) => None,
        _ => return Err(UsageError("printed_p_kn, printed_nu and printed_t go together".into()).into()),
    };
    Ok(TableRow { material, young_gpa, density, length, m, printed })
}

pub fn fig1(a: Fig1Args, g: &Globals) -> Result<Outcome, CliError> {
    if g.config.as_ref().is_some_and(crate::config::ConfigFile::is_empty) {
        return Err(UsageError("config file is empty".into()).into());
    }
    let mut s = section(g, "fig1")?;
    let delta = s.take_or("delta", a.delta, 1e-4)?;
    let h_over_l = s.take_or("h_over_l", a.h_over_l, 1e-2)?;
    let defaults = s.take_or("defaults", a.defaults, g.config.is_none())?;
    s.finish()?;
    let mut rows = if defaults { reference_rows() } else { Vec::new() };
    if let Some(c) = &g.config {
        for name in c.sections_with_prefix(ROW_PREFIX) {
            rows.push(config_row(c.section(name))?);
        }
    }
    if rows.is_empty() {
        return Err(UsageError("no table rows: set `defaults = true` or add [row.NAME] sections".into()).into());
    }
    if !(delta > 0.0) || !(h_over_l > 0.0) {
        return Err(UsageError("delta and h_over_l must be positive".into()).into());
    }
    let results = stability_table(&rows, delta, h_over_l)?;
    let text = match g.format {
        Format::Csv => table_csv(&results),
        Format::Json => json_text(&results)?,
        Format::Table => {
            let (checked, within) = results
                .iter()
                .filter_map(|r| r.checks.as_ref())
                .flatten()
                .fold((0, 0), |(n, k), c| (n + 1, k + usize::from(c.within_5pct)));
            let mut t = table_text(&results);
            if checked > 0 {
                t.push_str(&format!("{within}/{checked} printed entries reproduced within 5%; printed value in brackets otherwise\n"));
            }
            t
        }
    };
    Ok(Outcome::ok(text))
}
