//! Physical units: nondimensionalization of a hinged beam, the quartic
//! initial profile and the stability-time table for common materials.
//!
//! With cross section `A`, moment `I`, Young modulus `E`, density `ϱ`,
//! length `L` and axial force `P`:
//!
//! ```text
//! ν² = π⁴ E I / (L⁴ ϱ A),   m = L² P / (π² E I),   t = ν τ,
//! u(t, x) = sqrt(A/I) w(t/ν, L x / π).
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bnf::{t0, t1};
use crate::error::{Error, Result};
use crate::spectrum::{mu_unchecked, sobolev_norm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    /// Square of side `h`: `A = h²`, `I = h⁴/12`.
    Square { side: f64 },
    General { area: f64, inertia: f64 },
}

/// SI units throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalBeam {
    pub young: f64,
    pub density: f64,
    pub length: f64,
    pub section: Section,
    pub force: f64,
}

impl PhysicalBeam {
    pub fn validate(&self) -> Result<()> {
        let (a, i) = (self.area(), self.inertia());
        for (name, v) in [("E", self.young), ("density", self.density), ("L", self.length), ("A", a), ("I", i)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        if !self.force.is_finite() {
            return Err(Error::Domain("axial force must be finite".into()));
        }
        Ok(())
    }

    #[must_use]
    pub fn area(&self) -> f64 {
        match self.section {
            Section::Square { side } => side * side,
            Section::General { area, .. } => area,
        }
    }

    #[must_use]
    pub fn inertia(&self) -> f64 {
        match self.section {
            Section::Square { side } => side.powi(4) / 12.0,
            Section::General { inertia, .. } => inertia,
        }
    }

    /// Scale `sqrt(A/I)` between physical and dimensionless displacement.
    #[must_use]
    pub fn displacement_scale(&self) -> f64 {
        (self.area() / self.inertia()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dimensionless {
    pub m: f64,
    /// Time scale `ν` in s⁻¹.
    pub nu: f64,
}

pub fn nondimensionalize(beam: &PhysicalBeam) -> Result<Dimensionless> {
    beam.validate()?;
    let (e, i, l) = (beam.young, beam.inertia(), beam.length);
    let m = l * l * beam.force / (PI * PI * e * i);
    if m <= -1.0 {
        return Err(Error::Buckling(m));
    }
    let nu = (PI.powi(4) * e * i / (l.powi(4) * beam.density * beam.area())).sqrt();
    Ok(Dimensionless { m, nu })
}

/// Axial force `P = m π² E I / L²` giving the dimensionless `m`; `beam.force` is ignored.
#[must_use]
pub fn force_for_m(beam: &PhysicalBeam, m: f64) -> f64 {
    m * PI * PI * beam.young * beam.inertia() / (beam.length * beam.length)
}

/// Seconds for a dimensionless time.
#[must_use]
pub fn seconds(t: f64, nu: f64) -> f64 {
    t / nu
}

/// Dimensionless time for a duration in seconds.
#[must_use]
pub fn dimensionless_time(tau: f64, nu: f64) -> f64 {
    tau * nu
}

// p(x) = c4 (x - π/2)⁴ + c2 (x - π/2)² - 1
const P_C4: f64 = -16.0 / (5.0 * PI * PI * PI * PI);
const P_C2: f64 = 24.0 / (5.0 * PI * PI);

/// Quartic profile even about `π/2`, hinged at both ends, `min p = p(π/2) = -1`.
#[must_use]
pub fn sag_profile(x: f64) -> f64 {
    let y = x - PI / 2.0;
    P_C4 * y.powi(4) + P_C2 * y * y - 1.0
}

/// Coefficient of `φ_j` in the profile. Since `p`, `p''` vanish at both
/// ends, four integrations by parts leave `∫ p sin(jx) = p⁗ (1 - (-1)^j) / j⁵`.
#[must_use]
pub fn sag_coefficient(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        return 0.0;
    }
    let p4 = 24.0 * P_C4;
    (2.0 / PI).sqrt() * p4 * 2.0 / (j as f64).powi(5)
}

#[must_use]
pub fn sag_coefficients(n: usize) -> Vec<f64> {
    (1..=n).map(sag_coefficient).collect()
}

/// `|p|_1 = (∫ p'²)^{1/2}` in closed form.
#[must_use]
pub fn sag_h1() -> f64 {
    let a = -64.0 / (5.0 * PI.powi(4));
    let b = 48.0 / (5.0 * PI * PI);
    let h = PI / 2.0;
    (2.0 * (a * a * h.powi(7) / 7.0 + 2.0 * a * b * h.powi(5) / 5.0 + b * b * h.powi(3) / 3.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    Sag,
    /// Coefficients on `φ_j` of a profile with maximum modulus one.
    Custom(Vec<f64>),
}

/// Initial displacement `w_0(ξ) = δ L p(π ξ / L)`, at rest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialProfile {
    pub delta: f64,
    pub shape: ProfileShape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialData {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// `|u0|_1` of the untruncated profile.
    pub eps: f64,
    /// `sqrt(A/I) δ L`, the factor in front of the profile.
    pub amplitude: f64,
}

/// Dimensionless data `u0 = sqrt(A/I) δ L p`, `v0 = 0`, truncated to `n_modes`.
pub fn initial_data_from_profile(profile: &InitialProfile, beam: &PhysicalBeam, n_modes: usize) -> Result<InitialData> {
    beam.validate()?;
    if !(profile.delta > 0.0) || !profile.delta.is_finite() {
        return Err(Error::Domain(format!("δ = {} must be positive", profile.delta)));
    }
    let amplitude = beam.displacement_scale() * profile.delta * beam.length;
    let (coeffs, norm) = match &profile.shape {
        ProfileShape::Sag => (sag_coefficients(n_modes), sag_h1()),
        ProfileShape::Custom(c) => {
            let c: Vec<f64> = (0..n_modes).map(|i| c.get(i).copied().unwrap_or(0.0)).collect();
            let norm = sobolev_norm(&c, 1.0);
            (c, norm)
        }
    };
    Ok(InitialData {
        u0: coeffs.iter().map(|c| amplitude * c).collect(),
        v0: vec![0.0; n_modes],
        eps: amplitude * norm,
        amplitude,
    })
}

/// Dimensionless stability time for data of size `ε`: `T₁ ε⁻⁶` when the
/// sixth-order estimate applies, `T₀ μ ε⁻⁴` otherwise.
#[must_use]
pub fn stability_time(eps: f64, m: f64) -> (f64, f64) {
    if m != 0.0 && (-0.5..=1.0).contains(&m) {
        let c = t1(eps, m);
        (c, c * eps.powi(-6))
    } else {
        let c = t0(eps, m);
        (c, c * mu_unchecked(m) * eps.powi(-4))
    }
}

/// Printed entries of one table row (`P` in kN as printed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedRow {
    pub p_kn: String,
    pub nu: String,
    pub t: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub material: String,
    /// GPa.
    pub young_gpa: f64,
    pub density: f64,
    pub length: f64,
    pub m: f64,
    pub printed: Option<PrintedRow>,
}

fn row(material: &str, young_gpa: f64, density: f64, length: f64, m: f64, p: &str, nu: &str, t: &str) -> TableRow {
    TableRow {
        material: material.to_string(),
        young_gpa,
        density,
        length,
        m,
        printed: Some(PrintedRow { p_kn: p.into(), nu: nu.into(), t: t.into() }),
    }
}

/// The ten reference rows with their printed values.
#[must_use]
pub fn reference_rows() -> Vec<TableRow> {
    vec![
        row("Steel", 200.0, 7500.0, 2.0, 0.0, "0", "74", "56"),
        row("Steel", 200.0, 7500.0, 2.0, 1.0, "6.6", "74", "1556"),
        row("Steel", 200.0, 7500.0, 2.0, -0.5, "-3.3", "74", "58"),
        row("Al 7075", 70.0, 2810.0, 2.0, 0.0, "0", "71", "59"),
        row("Al 7075", 70.0, 2810.0, 2.0, 1.0, "2.3", "71", "1621"),
        row("Al 7075", 70.0, 2810.0, 2.0, -0.5, "-1.15", "71", "60"),
        row("Al 7075", 70.0, 2810.0, 1.0, 1.0, "0.56", "142", "811"),
        row("Rubber", 0.004, 1000.0, 0.1, 0.0, "0", "18", "232"),
        row("Rubber", 0.004, 1000.0, 0.1, 1.0, "3e-4", "18", "6396"),
        row("Rubber", 0.004, 1000.0, 0.1, -0.5, "1.5e-4", "18", "238"),
    ]
}

/// Why a recomputed entry differs from the printed one by more than 5%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mismatch {
    /// Printed with the opposite sign.
    Sign,
    /// Off by a factor 1000 (printed in other units).
    Units,
    /// Off by a factor close to two.
    FactorTwo,
    /// Agrees to within the printed precision only.
    Rounding,
    /// None of the above explains the difference.
    Unexplained,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryCheck {
    pub computed: f64,
    pub printed: f64,
    /// `|computed - printed| / |printed|` (zero when both vanish).
    pub rel_dev: f64,
    pub within_5pct: bool,
    /// Empty when within 5%.
    pub mismatch: Vec<Mismatch>,
}

/// Half a unit in the last printed digit.
fn printed_resolution(s: &str) -> f64 {
    let s = s.trim().trim_start_matches('-');
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (s, 0),
    };
    let decimals = mant.split_once('.').map_or(0, |(_, d)| d.len() as i32);
    0.5 * 10f64.powi(exp - decimals)
}

fn check_entry(computed: f64, printed_str: &str) -> Result<EntryCheck> {
    let printed: f64 = printed_str
        .trim()
        .parse()
        .map_err(|_| Error::Domain(format!("cannot parse printed value {printed_str:?}")))?;
    let rel_dev = if printed == 0.0 {
        if computed.abs() < 1e-12 { 0.0 } else { f64::INFINITY }
    } else {
        (computed - printed).abs() / printed.abs()
    };
    let within_5pct = rel_dev <= 0.05;
    let mut mismatch = Vec::new();
    if !within_5pct && printed != 0.0 {
        let mut c = computed;
        if c.signum() != printed.signum() {
            mismatch.push(Mismatch::Sign);
            c = -c;
        }
        let ratio = printed / c;
        for f in [1e3, 1e-3] {
            if (ratio / f - 1.0).abs() < 0.5 {
                mismatch.push(Mismatch::Units);
                c *= f;
            }
        }
        let ratio = printed / c;
        for f in [2.0, 0.5] {
            if (ratio / f - 1.0).abs() <= 0.05 {
                mismatch.push(Mismatch::FactorTwo);
                c *= f;
            }
        }
        let dev = (c - printed).abs();
        if dev > 0.05 * printed.abs() {
            if dev <= printed_resolution(printed_str) * (1.0 + 1e-12) {
                mismatch.push(Mismatch::Rounding);
            } else {
                mismatch.push(Mismatch::Unexplained);
            }
        }
    }
    Ok(EntryCheck { computed, printed, rel_dev, within_5pct, mismatch })
}

/// One recomputed row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableResult {
    pub material: String,
    pub young_gpa: f64,
    pub density: f64,
    pub length: f64,
    pub m: f64,
    pub p_kn: f64,
    pub nu: f64,
    pub eps: f64,
    /// `T₀` or `T₁` used for the row.
    pub time_constant: f64,
    pub t_seconds: f64,
    pub checks: Option<[EntryCheck; 3]>,
}

impl TableResult {
    /// True when every printed entry is reproduced within 5%.
    #[must_use]
    pub fn matches(&self) -> bool {
        self.checks.as_ref().is_none_or(|c| c.iter().all(|e| e.within_5pct))
    }
}

/// Recomputes rows for square sections with side `h_over_l · L`.
pub fn stability_table(rows: &[TableRow], delta: f64, h_over_l: f64) -> Result<Vec<TableResult>> {
    rows.iter()
        .map(|r| {
            let mut beam = PhysicalBeam {
                young: r.young_gpa * 1e9,
                density: r.density,
                length: r.length,
                section: Section::Square { side: h_over_l * r.length },
                force: 0.0,
            };
            beam.force = force_for_m(&beam, r.m);
            let d = nondimensionalize(&beam)?;
            let data = initial_data_from_profile(&InitialProfile { delta, shape: ProfileShape::Sag }, &beam, 1)?;
            // the nominal m picks the estimate; the round trip through P can
            // land a rounding error outside [-1/2, 1]
            let (time_constant, t) = stability_time(data.eps, r.m);
            let t_seconds = seconds(t, d.nu);
            let p_kn = beam.force / 1e3;
            let checks = match &r.printed {
                Some(p) => Some([
                    check_entry(p_kn, &p.p_kn)?,
                    check_entry(d.nu, &p.nu)?,
                    check_entry(t_seconds, &p.t)?,
                ]),
                None => None,
            };
            Ok(TableResult {
                material: r.material.clone(),
                young_gpa: r.young_gpa,
                density: r.density,
                length: r.length,
                m: r.m,
                p_kn,
                nu: d.nu,
                eps: data.eps,
                time_constant,
                t_seconds,
                checks,
            })
        })
        .collect()
}

/// CSV with columns `material,E_GPa,density,L,m,P_kN,nu,T_s`.
#[must_use]
pub fn table_csv(results: &[TableResult]) -> String {
    let mut s = String::from("material,E_GPa,density,L,m,P_kN,nu,T_s\n");
    for r in results {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e}",
            r.material, r.young_gpa, r.density, r.length, r.m, r.p_kn, r.nu, r.t_seconds
        );
    }
    s
}

/// Six significant digits, fixed notation for moderate magnitudes.
#[must_use]
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

/// Aligned text table mirroring the printed layout, with the printed value
/// in brackets wherever it differs by more than 5%.
#[must_use]
pub fn table_text(results: &[TableResult]) -> String {
    let mut s = format!(
        "{:<10} {:>8} {:>8} {:>5} {:>5} {:>24} {:>14} {:>20}\n",
        "Material", "E[GPa]", "rho", "L[m]", "m", "P[kN]", "nu[1/s]", "T[s]"
    );
    for r in results {
        let flag = |i: usize, v: String| -> String {
            match &r.checks {
                Some(c) if !c[i].within_5pct => format!("{v} [{}]", c[i].printed),
                _ => v,
            }
        };
        let _ = writeln!(
            s,
            "{:<10} {:>8} {:>8} {:>5} {:>5} {:>24} {:>14} {:>20}",
            r.material,
            r.young_gpa,
            r.density,
            r.length,
            r.m,
            flag(0, sig6(r.p_kn)),
            flag(1, sig6(r.nu)),
            flag(2, sig6(r.t_seconds)),
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn steel(l: f64) -> PhysicalBeam {
        PhysicalBeam {
            young: 200e9,
            density: 7500.0,
            length: l,
            section: Section::Square { side: l / 100.0 },
            force: 6.6e3,
        }
    }

    #[test]
    fn steel_row() {
        let d = nondimensionalize(&steel(2.0)).unwrap();
        assert_relative_eq!(d.m, 1.0, epsilon = 0.01);
        assert_relative_eq!(d.nu, 74.0, epsilon = 0.5);
        assert_relative_eq!(force_for_m(&steel(2.0), 1.0), 6580.0, epsilon = 5.0);
    }

    #[test]
    fn zero_force_gives_zero_m() {
        let b = PhysicalBeam { force: 0.0, ..steel(3.0) };
        assert_eq!(nondimensionalize(&b).unwrap().m, 0.0);
        assert_eq!(force_for_m(&b, 0.0), 0.0);
    }

    #[test]
    fn buckling_rejected() {
        let mut b = steel(2.0);
        b.force = force_for_m(&b, -1.2);
        assert!(matches!(nondimensionalize(&b), Err(Error::Buckling(_))));
    }

    #[test]
    fn profile_shape() {
        assert!(sag_profile(0.0).abs() < 1e-15);
        assert!(sag_profile(PI).abs() < 1e-14);
        assert_eq!(sag_profile(PI / 2.0), -1.0);
        assert_relative_eq!(sag_h1(), 1.2583, epsilon = 1e-4);
        let partial = sobolev_norm(&sag_coefficients(2001), 1.0);
        assert!((partial - sag_h1()).abs() < 1e-6);
        let x = 0.7;
        let series: f64 = crate::spectrum::field_value(&sag_coefficients(401), x);
        assert!((series - sag_profile(x)).abs() < 1e-9);
    }

    #[test]
    fn initial_data_scale() {
        let data = initial_data_from_profile(
            &InitialProfile { delta: 1e-4, shape: ProfileShape::Sag },
            &steel(2.0),
            16,
        )
        .unwrap();
        assert_relative_eq!(data.amplitude, 200.0 * 3f64.sqrt() * 1e-4, max_relative = 1e-12);
        assert_relative_eq!(data.eps / 1e-4, 436.0, epsilon = 1.0);
        assert!(data.v0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!(printed_resolution("1556"), 0.5);
        assert_relative_eq!(printed_resolution("3e-4"), 0.5e-4);
        assert_relative_eq!(printed_resolution("-1.15"), 0.005);
    }

    #[test]
    fn classification() {
        let c = check_entry(3.29e-7, "3e-4").unwrap();
        assert_eq!(c.mismatch, vec![Mismatch::Units, Mismatch::Rounding]);
        let c = check_entry(786.0, "1556").unwrap();
        assert_eq!(c.mismatch, vec![Mismatch::FactorTwo]);
        let c = check_entry(-1.645e-7, "1.5e-4").unwrap();
        assert_eq!(c.mismatch, vec![Mismatch::Sign, Mismatch::Units, Mismatch::Unexplained]);
        assert!(check_entry(0.0, "0").unwrap().within_5pct);
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(std::f64::consts::SQRT_2), "1.41421");
        assert_eq!(sig6(1_556.123_456), "1556.12");
        assert_eq!(sig6(-0.001_234_567), "-0.00123457");
        assert_eq!(sig6(3.289_9e-7), "3.28990e-7");
        assert_eq!(sig6(1.0e7), "1.00000e7");
    }
}
