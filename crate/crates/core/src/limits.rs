//! Standard, vacuum-pressure and gravitational limit spectra.
//!
//! Spectra follow C(t) = ∫ dω/2π C[ω] e^{−iωt}. The vacuum spectra are
//! one-sided (they carry θ(ω)) and vanish for ω < 0. Values are in
//! m²·s for SI constants, or in Planck units for natural constants.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{self, TrackingMode};
use crate::units::{compton_wavelength, PhysicalConstants};

/// Which noise mechanism a spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "SQL")]
    Sql,
    #[serde(rename = "VQL")]
    Vql,
    #[serde(rename = "GQL")]
    Gql,
    #[serde(rename = "ForceFF")]
    ForceFF,
    Background,
    Total,
    Estimate,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Sql => "SQL",
            Source::Vql => "VQL",
            Source::Gql => "GQL",
            Source::ForceFF => "ForceFF",
            Source::Background => "Background",
            Source::Total => "Total",
            Source::Estimate => "Estimate",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Mirror response Φ: a constant, or a table interpolated linearly in ω
/// and held flat beyond its ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MirrorResponse {
    Constant(f64),
    Tabulated { omegas: Vec<f64>, values: Vec<f64> },
}

impl Default for MirrorResponse {
    fn default() -> Self {
        MirrorResponse::Constant(1.0)
    }
}

impl MirrorResponse {
    pub fn validate(&self) -> Result<()> {
        match self {
            MirrorResponse::Constant(phi) => check_positive("Φ", *phi),
            MirrorResponse::Tabulated { omegas, values } => {
                if omegas.is_empty() || omegas.len() != values.len() {
                    return Err(Error::Config("Φ table needs matching, non-empty columns".into()));
                }
                check_increasing(omegas)?;
                values.iter().try_for_each(|&v| check_positive("Φ", v))
            }
        }
    }

    pub fn at(&self, omega: f64) -> f64 {
        match self {
            MirrorResponse::Constant(phi) => *phi,
            MirrorResponse::Tabulated { omegas, values } => interpolate(omegas, values, omega, true),
        }
    }
}

/// Linear interpolation; outside the table either clamp to the end value
/// or return zero.
pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64, clamp: bool) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    if x <= xs[0] {
        return if clamp || x == xs[0] { ys[0] } else { 0.0 };
    }
    if x >= xs[n - 1] {
        return if clamp || x == xs[n - 1] { ys[n - 1] } else { 0.0 };
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let f = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + f * (ys[i + 1] - ys[i])
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive, got {v}")))
    }
}

fn check_increasing(xs: &[f64]) -> Result<()> {
    if xs.windows(2).all(|w| w[0] < w[1]) && xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(domain("frequency grid must be finite and strictly increasing"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub omega_center: f64,
    pub delta_omega: f64,
}

/// End-point mass, arm propagation time, mirror response, readout mode
/// and detection band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub mass: f64,
    pub tau: f64,
    pub phi: MirrorResponse,
    pub mode: TrackingMode,
    pub bandwidth: Bandwidth,
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("mass", self.mass)?;
        check_positive("tau", self.tau)?;
        check_positive("delta_omega", self.bandwidth.delta_omega)?;
        self.phi.validate()
    }
}

/// Whether the gravitational limit uses the exact kernel b[ωτ] or its
/// large-x constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelView {
    #[default]
    Instantaneous,
    Envelope,
}

/// A one-sided spectrum tabulated on increasing positive frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    omegas: Vec<f64>,
    values: Vec<f64>,
    label: Source,
}

impl SpectrumGrid {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>, label: Source) -> Result<Self> {
        if omegas.len() != values.len() {
            return Err(Error::Argument("omega and value columns differ in length".into()));
        }
        check_increasing(&omegas)?;
        if omegas.first().is_some_and(|&w| w <= 0.0) {
            return Err(domain("spectrum grid is one-sided: frequencies must be positive"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("spectral densities must be finite and non-negative"));
        }
        Ok(SpectrumGrid { omegas, values, label })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Source {
        self.label
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Linear interpolation inside the grid, zero outside it.
    pub fn at(&self, omega: f64) -> f64 {
        interpolate(&self.omegas, &self.values, omega, false)
    }
}

/// C_qq^SQL[ω] ≈ ħ/(mω²) for nearly free end points.
pub fn sql_spectrum(mass: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    check_positive("mass", mass)?;
    if omega == 0.0 {
        return Err(Error::Singularity("SQL spectrum diverges at ω = 0".into()));
    }
    Ok(k.hbar / (mass * omega * omega))
}

/// (Δq²)^SQL ≈ (ħ/m)·Δω/(2πω²), i.e. the time form with T = Δω/(2πω²).
pub fn sql_variance(mass: f64, omega: f64, delta_omega: f64, k: &PhysicalConstants) -> Result<f64> {
    check_positive("ω", omega.abs())?;
    check_positive("Δω", delta_omega)?;
    sql_variance_time(mass, detection_time(omega, delta_omega), k)
}

/// Detection time T = Δω/(2πω²) equivalent to a band Δω around ω.
pub fn detection_time(omega: f64, delta_omega: f64) -> f64 {
    delta_omega / (2.0 * PI * omega * omega)
}

/// (Δq²)^SQL ≈ ħT/m.
pub fn sql_variance_time(mass: f64, time: f64, k: &PhysicalConstants) -> Result<f64> {
    check_positive("mass", mass)?;
    check_positive("T", time)?;
    Ok(k.hbar / mass * time)
}

/// Radiation-pressure force spectrum of vacuum fields,
/// C_FF[ω] = (ħ²/3πc²)·ω³·θ(ω)·Φ.
pub fn vacuum_force_spectrum(phi: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    check_positive("Φ", phi)?;
    if omega <= 0.0 {
        return Ok(0.0);
    }
    Ok(k.hbar * k.hbar / (3.0 * PI * k.c * k.c) * omega.powi(3) * phi)
}

/// C_qq^VQL[ω] = (Φ/3π)·λ_C²·θ(ω)/ω. Identical to C_FF/(m²ω⁴).
pub fn vql_spectrum(mass: f64, phi: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    let lambda = compton_wavelength(mass, k)?;
    check_positive("Φ", phi)?;
    if omega == 0.0 {
        return Err(Error::Singularity("VQL spectrum diverges at ω = 0".into()));
    }
    if omega < 0.0 {
        return Ok(0.0);
    }
    Ok(phi / (3.0 * PI) * lambda * lambda / omega)
}

/// C_qq^GQL[ω] = l_P²·θ(ω)·b[ωτ]/ω. Returns 0 at ω = 0, the limit.
pub fn gql_spectrum(mode: TrackingMode, tau: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    gql_spectrum_with(mode, tau, omega, k, KernelView::Instantaneous)
}

pub fn gql_spectrum_with(
    mode: TrackingMode,
    tau: f64,
    omega: f64,
    k: &PhysicalConstants,
    view: KernelView,
) -> Result<f64> {
    check_positive("tau", tau)?;
    if omega.is_nan() {
        return Err(domain("ω is NaN"));
    }
    if omega <= 0.0 {
        return Ok(0.0);
    }
    let lp = k.planck()?.length_p;
    let b = match view {
        KernelView::Instantaneous => kernels::b_closed(mode, omega * tau)?,
        KernelView::Envelope => kernels::b_high_freq(mode),
    };
    Ok(lp * lp * b / omega)
}

/// Mass at which the vacuum-pressure and gravitational limits coincide:
/// m* = m_P·√(Φ/(3π·b)).
pub fn crossover_mass(phi: f64, b_value: f64, k: &PhysicalConstants) -> Result<f64> {
    check_positive("Φ", phi)?;
    check_positive("b", b_value)?;
    Ok(k.planck()?.mass_p * (phi / (3.0 * PI * b_value)).sqrt())
}

/// One frequency row of a [`NoiseBudget`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub omega: f64,
    pub sql: f64,
    pub vql: f64,
    pub gql: f64,
    /// Largest of the three spectra.
    pub dominant: Source,
    /// Larger of the two fundamental (VQL, GQL) spectra.
    pub fundamental: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub rows: Vec<BudgetRow>,
}

impl NoiseBudget {
    /// Spectrum of one source as a grid.
    pub fn grid(&self, source: Source) -> Result<SpectrumGrid> {
        let pick = |r: &BudgetRow| match source {
            Source::Sql => Ok(r.sql),
            Source::Vql => Ok(r.vql),
            Source::Gql => Ok(r.gql),
            Source::Total => Ok(r.sql + r.vql + r.gql),
            other => Err(Error::Argument(format!("budget has no {other} column"))),
        };
        let values = self.rows.iter().map(pick).collect::<Result<Vec<_>>>()?;
        SpectrumGrid::new(self.rows.iter().map(|r| r.omega).collect(), values, source)
    }
}

/// SQL, VQL and GQL side by side on a positive frequency grid.
pub fn noise_budget(
    config: &MeasurementConfig,
    omegas: &[f64],
    k: &PhysicalConstants,
    view: KernelView,
) -> Result<NoiseBudget> {
    config.validate()?;
    check_increasing(omegas)?;
    if omegas.first().is_some_and(|&w| w <= 0.0) {
        return Err(domain("budget frequencies must be positive"));
    }
    let rows = omegas
        .iter()
        .map(|&omega| {
            let sql = sql_spectrum(config.mass, omega, k)?;
            let vql = vql_spectrum(config.mass, config.phi.at(omega), omega, k)?;
            let gql = gql_spectrum_with(config.mode, config.tau, omega, k, view)?;
            let fundamental = if gql >= vql { Source::Gql } else { Source::Vql };
            let dominant = if sql >= vql.max(gql) { Source::Sql } else { fundamental };
            Ok(BudgetRow { omega, sql, vql, gql, dominant, fundamental })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseBudget { rows })
}

/// Response of the path to an arbitrary isotropic background: the vacuum
/// weight l_P²θ(ω)/ω is replaced by `background(ω)`, the kernel b[ωτ] kept.
pub fn apply_isotropic_background<F>(
    background: F,
    mode: TrackingMode,
    tau: f64,
    omegas: &[f64],
) -> Result<SpectrumGrid>
where
    F: Fn(f64) -> f64,
{
    check_positive("tau", tau)?;
    let values = omegas
        .iter()
        .map(|&w| {
            let s = background(w);
            if !(s >= 0.0) {
                return Err(domain(format!("background spectrum negative at ω = {w}: {s}")));
            }
            Ok(s * kernels::b_closed(mode, w * tau)?)
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumGrid::new(omegas.to_vec(), values, Source::Background)
}
