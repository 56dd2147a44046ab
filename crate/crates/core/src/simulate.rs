//! Gaussian sample paths for a target spectrum, and Welch estimation.
//!
//! The vacuum spectra are one-sided (θ(ω)); no real classical process has
//! such a spectrum. Sample paths therefore realize the symmetrized density
//! S(ω) = (C[ω] + C[−ω])/2, half of a one-sided vacuum spectrum at ω > 0.
//! The antisymmetric (commutator) part lives in [`crate::timedomain`].
//!
//! Convention: var(q) = ∫ dω/2π S(ω) over both signs of ω.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::kernels::TrackingMode;
use crate::limits::{self, Source, SpectrumGrid};
use crate::units::PhysicalConstants;

/// Spectrum to realize.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Gql { mode: TrackingMode, tau: f64, constants: PhysicalConstants },
    Vql { mass: f64, phi: f64, constants: PhysicalConstants },
    Sql { mass: f64, constants: PhysicalConstants },
    /// One-sided spectrum, zero outside its grid.
    Grid(SpectrumGrid),
}

impl Target {
    pub fn source(&self) -> Source {
        match self {
            Target::Gql { .. } => Source::Gql,
            Target::Vql { .. } => Source::Vql,
            Target::Sql { .. } => Source::Sql,
            Target::Grid(g) => g.label(),
        }
    }

    /// C[ω] with the source's own sign convention.
    pub fn spectrum(&self, omega: f64) -> Result<f64> {
        match self {
            Target::Gql { mode, tau, constants } => limits::gql_spectrum(*mode, *tau, omega, constants),
            Target::Vql { mass, phi, constants } => {
                if omega == 0.0 {
                    Ok(0.0)
                } else {
                    limits::vql_spectrum(*mass, *phi, omega, constants)
                }
            }
            Target::Sql { mass, constants } => limits::sql_spectrum(*mass, omega, constants),
            Target::Grid(g) => Ok(if omega > 0.0 { g.at(omega) } else { 0.0 }),
        }
    }

    /// (C[ω] + C[−ω])/2.
    pub fn symmetrized(&self, omega: f64) -> Result<f64> {
        Ok(0.5 * (self.spectrum(omega)? + self.spectrum(-omega)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub target: Target,
    pub n_samples: usize,
    pub dt: f64,
    pub seed: u64,
    /// Bins below this angular frequency are left empty.
    pub omega_min: f64,
}

impl SynthesisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || !self.n_samples.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_samples must be a power of two ≥ 2, got {}",
                self.n_samples
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.omega_min.is_finite() && self.omega_min > 0.0) {
            return Err(Error::Config(format!("omega_min must be positive, got {}", self.omega_min)));
        }
        if self.dt * self.n_samples as f64 * self.omega_min < 2.0 * PI {
            return Err(Error::Config(format!(
                "omega_min = {} is below the frequency resolution 2π/(n·dt) = {}",
                self.omega_min,
                2.0 * PI / (self.dt * self.n_samples as f64)
            )));
        }
        Ok(())
    }

    /// Angular frequency of FFT bin k.
    pub fn bin_omega(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / (self.n_samples as f64 * self.dt)
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.dt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<f64>,
    pub dt: f64,
    pub seed: u64,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn variance(&self) -> f64 {
        variance(&self.samples)
    }
}

pub(crate) fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Frequency-domain synthesis: independent complex Gaussian amplitudes
/// with Hermitian symmetry, E|X_k|² = S(ω_k)/(n·dt), then an inverse DFT.
/// The same seed always yields the same series.
pub fn synthesize(spec: &SynthesisSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let n = spec.n_samples;
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let bin_power = 1.0 / (n as f64 * spec.dt);

    for k in 1..=half {
        // draw for every bin so the stream does not depend on the cutoff
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        let omega = spec.bin_omega(k);
        if omega < spec.omega_min {
            continue;
        }
        let s = spec.target.symmetrized(omega)?;
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::Domain(format!("target density {s} at ω = {omega}")));
        }
        let var = s * bin_power;
        if k == half {
            spectrum[k] = Complex64::new(var.sqrt() * a, 0.0);
        } else {
            let amp = Complex64::new(a, b) * (0.5 * var).sqrt();
            spectrum[k] = amp;
            spectrum[n - k] = amp.conj();
        }
    }

    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    Ok(TimeSeries { samples: spectrum.iter().map(|z| z.re).collect(), dt: spec.dt, seed: spec.seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    /// Periodic window of length n.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / n as f64).cos())
                .collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(Window::Hann),
            "rectangular" | "rect" | "boxcar" => Ok(Window::Rectangular),
            other => Err(Error::Argument(format!("unknown window {other:?}"))),
        }
    }
}

/// Averaged periodogram plus what is needed to judge it.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Estimate of the symmetrized density at ω_k = 2πk/(L·dt), k ≥ 1.
    pub grid: SpectrumGrid,
    pub segments: usize,
    /// Equivalent chi-squared degrees of freedom per bin.
    pub dof: f64,
}

impl PsdEstimate {
    /// Multiplicative band [lo, hi] around the true density that holds the
    /// estimate with the probability of a ±`sigmas` Gaussian interval.
    pub fn band(&self, sigmas: f64) -> (f64, f64) {
        chi_squared_band(self.dof, sigmas)
    }
}

/// Quantiles of χ²_ν/ν at the Gaussian ±σ tail probabilities.
pub fn chi_squared_band(dof: f64, sigmas: f64) -> (f64, f64) {
    let tail = Normal::standard().cdf(-sigmas);
    let chi = ChiSquared::new(dof).expect("positive degrees of freedom");
    (chi.inverse_cdf(tail) / dof, chi.inverse_cdf(1.0 - tail) / dof)
}

fn segment_step(segment_length: usize, overlap: f64) -> usize {
    let shared = (overlap * segment_length as f64).round() as usize;
    (segment_length - shared.min(segment_length - 1)).max(1)
}

/// Welch estimate: Hann (or rectangular) windowed segments of
/// `segment_length` samples, overlapping by the fraction `overlap`,
/// normalized as dt/Σw²·|DFT|² so a white density is recovered unbiased.
pub fn estimate_psd(
    series: &TimeSeries,
    segment_length: usize,
    overlap: f64,
    window: Window,
) -> Result<PsdEstimate> {
    let n = series.len();
    if segment_length < 2 || !segment_length.is_power_of_two() || segment_length > n {
        return Err(Error::Argument(format!(
            "segment length must be a power of two in [2, {n}], got {segment_length}"
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Argument(format!("overlap must lie in [0, 1), got {overlap}")));
    }
    let step = segment_step(segment_length, overlap);
    let segments = (n - segment_length) / step + 1;
    let w = window.coefficients(segment_length);
    let w_power: f64 = w.iter().map(|v| v * v).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment_length);
    let bins = segment_length / 2;

    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_length];
    for s in 0..segments {
        let chunk = &series.samples[s * step..s * step + segment_length];
        for ((z, x), wj) in buf.iter_mut().zip(chunk).zip(&w) {
            *z = Complex64::new(x * wj, 0.0);
        }
        fft.process(&mut buf);
        for (a, z) in acc.iter_mut().zip(&buf[1..=bins]) {
            *a += z.norm_sqr();
        }
    }
    let scale = series.dt / (w_power * segments as f64);
    let omegas = (1..=bins)
        .map(|k| 2.0 * PI * k as f64 / (segment_length as f64 * series.dt))
        .collect();
    let values = acc.iter().map(|a| a * scale).collect();
    Ok(PsdEstimate {
        grid: SpectrumGrid::new(omegas, values, Source::Estimate)?,
        segments,
        dof: welch_dof(segments, step, &w),
    })
}

/// ν = 2K / (1 + 2 Σ_{m=1}^{K−1} (1 − m/K) ρ_m), with ρ_m the squared
/// normalized window overlap at a lag of m segment steps.
pub fn welch_dof(segments: usize, step: usize, window: &[f64]) -> f64 {
    let power: f64 = window.iter().map(|v| v * v).sum();
    let k = segments as f64;
    let mut corr = 0.0;
    for m in 1..segments {
        let lag = m * step;
        if lag >= window.len() {
            break;
        }
        let overlap: f64 = window[..window.len() - lag].iter().zip(&window[lag..]).map(|(a, b)| a * b).sum();
        corr += (1.0 - m as f64 / k) * (overlap / power).powi(2);
    }
    2.0 * k / (1.0 + 2.0 * corr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn white(s0: f64, nyquist: f64) -> Target {
        Target::Grid(SpectrumGrid::new(vec![1e-9, 2.0 * nyquist], vec![2.0 * s0, 2.0 * s0], Source::Background).unwrap())
    }

    fn spec(target: Target, n: usize, dt: f64, seed: u64, omega_min: f64) -> SynthesisSpec {
        SynthesisSpec { target, n_samples: n, dt, seed, omega_min }
    }

    #[test]
    fn same_seed_same_series() {
        let s = spec(white(1.0, 10.0), 4096, 0.1, 42, 0.1);
        let a = synthesize(&s).unwrap();
        let b = synthesize(&s).unwrap();
        assert_eq!(a.samples, b.samples);
        assert!(a.samples.iter().zip(&b.samples).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn zero_target_gives_zero_series() {
        let zero = Target::Grid(SpectrumGrid::new(vec![1.0], vec![0.0], Source::Background).unwrap());
        let ts = synthesize(&spec(zero, 1024, 0.01, 1, 10.0)).unwrap();
        assert!(ts.samples.iter().all(|&x| x == 0.0));
        let est = estimate_psd(&ts, 256, 0.5, Window::Hann).unwrap();
        assert!(est.grid.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn config_validation() {
        let ok = spec(white(1.0, 10.0), 1024, 0.1, 0, 0.1);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.n_samples = 1000;
        assert!(matches!(synthesize(&bad), Err(Error::Config(_))));
        let mut bad = ok.clone();
        bad.omega_min = 0.01; // below 2π/(1024·0.1) ≈ 0.061
        assert!(matches!(synthesize(&bad), Err(Error::Config(_))));
        let mut bad = ok;
        bad.dt = 0.0;
        assert!(synthesize(&bad).is_err());
    }

    #[test]
    fn white_variance_matches_parseval() {
        let (s0, dt, n, omega_min) = (3.0, 0.01, 1 << 16, 2.0);
        let s = spec(white(s0, PI / dt), n, dt, 9, omega_min);
        let ts = synthesize(&s).unwrap();
        // per-bin variances of the Hermitian pairs: 2|X_k|² ~ v·χ²₂/2·2
        let v = s0 / (n as f64 * dt);
        let k_min = (1..=n / 2).find(|&k| s.bin_omega(k) >= omega_min).unwrap();
        let pairs = (n / 2 - k_min) as f64;
        let mean = 2.0 * v * pairs + v;
        let se = (4.0 * v * v * pairs + 2.0 * v * v).sqrt();
        let expected = s0 * (PI / dt - omega_min) / PI;
        assert!(((mean - expected) / expected).abs() < 1e-3);
        let sample_var = ts.samples.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((sample_var - mean).abs() < 3.0 * se, "{sample_var} vs {mean} ± {se}");
    }

    #[test]
    fn white_estimate_is_flat() {
        let (s0, dt) = (0.5, 1e-3);
        let ts = synthesize(&spec(white(s0, PI / dt), 1 << 18, dt, 5, 2.0 * PI / (256.0 * dt) * 0.5)).unwrap();
        let est = estimate_psd(&ts, 1024, 0.5, Window::Hann).unwrap();
        let (lo, hi) = est.band(3.0);
        let inside = est.grid.values()[8..511]
            .iter()
            .filter(|&&v| v >= lo * s0 && v <= hi * s0)
            .count();
        assert!(inside as f64 >= 0.99 * 503.0, "{inside}/503, dof {}", est.dof);
        let mean: f64 = est.grid.values()[8..511].iter().sum::<f64>() / 503.0;
        assert!((mean / s0 - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn gql_round_trip() {
        let k = PhysicalConstants::NATURAL;
        let target = Target::Gql { mode: TrackingMode::TwoWay, tau: 1.0, constants: k };
        let s = spec(target.clone(), 1 << 20, 0.1, 2024, 0.05);
        let ts = synthesize(&s).unwrap();
        let est = estimate_psd(&ts, 4096, 0.5, Window::Hann).unwrap();
        let (lo, hi) = est.band(3.0);
        let mut ratios = Vec::new();
        let mut inside = 0;
        for (&w, &v) in est.grid.omegas().iter().zip(est.grid.values()) {
            if w < s.omega_min {
                continue;
            }
            // l_P² b(ωτ)/(2ω), oracle from the angular average
            let t = crate::kernels::b_angular_oracle(TrackingMode::TwoWay, w, 1e-13).unwrap() / (2.0 * w);
            if v >= lo * t && v <= hi * t {
                inside += 1;
            }
            ratios.push(v / t);
        }
        let frac = inside as f64 / ratios.len() as f64;
        assert!(frac >= 0.8, "{frac}");
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        assert!((0.9..=1.1).contains(&median), "{median}");
    }

    #[test]
    fn different_seeds_are_uncorrelated() {
        let a = synthesize(&spec(white(1.0, 10.0), 1 << 14, 0.1, 1, 0.1)).unwrap();
        let b = synthesize(&spec(white(1.0, 10.0), 1 << 14, 0.1, 2, 0.1)).unwrap();
        let n = a.len() as f64;
        let (ma, mb) = (a.samples.iter().sum::<f64>() / n, b.samples.iter().sum::<f64>() / n);
        let cov: f64 = a.samples.iter().zip(&b.samples).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let rho = cov / (a.variance() * b.variance()).sqrt();
        assert!(rho.abs() < 0.05, "{rho}");
    }

    #[test]
    fn halves_pass_variance_ratio_test() {
        // F(n/2−1, n/2−1) two-sided 99.73% bounds; white samples are independent
        use statrs::distribution::FisherSnedecor;
        let dt = 0.01;
        let ts = synthesize(&spec(white(2.0, PI / dt), 1 << 14, dt, 77, 2.0 * PI / (dt * 1024.0))).unwrap();
        let (first, second) = ts.samples.split_at(ts.len() / 2);
        let ratio = variance(first) / variance(second);
        let d = (ts.len() / 2 - 1) as f64;
        let f = FisherSnedecor::new(d, d).unwrap();
        let tail = Normal::standard().cdf(-3.0);
        assert!(ratio > f.inverse_cdf(tail) && ratio < f.inverse_cdf(1.0 - tail), "{ratio}");
    }

    #[test]
    fn dof_limits() {
        let w = Window::Hann.coefficients(256);
        assert_eq!(welch_dof(10, 256, &w), 20.0);
        let half = welch_dof(10, 128, &w);
        assert!(half > 10.0 && half < 20.0);
        // rectangular windows at 50% overlap: ρ = 1/4
        let r = Window::Rectangular.coefficients(256);
        let expected = 2.0 * 10.0 / (1.0 + 2.0 * 0.9 * 0.25);
        assert!((welch_dof(10, 128, &r) - expected).abs() < 1e-12);
    }

    #[test]
    fn chi_squared_band_is_asymmetric() {
        let (lo, hi) = chi_squared_band(10.0, 3.0);
        assert!(lo > 0.0 && lo < 1.0 && hi > 1.0);
        assert!(hi - 1.0 > 1.0 - lo);
        let (lo, hi) = chi_squared_band(1e6, 3.0);
        assert!((1.0 - lo - 3.0 * (2e-6f64).sqrt()).abs() < 1e-4);
        assert!((hi - 1.0 - 3.0 * (2e-6f64).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn estimator_argument_checks() {
        let ts = TimeSeries { samples: vec![0.0; 64], dt: 1.0, seed: 0 };
        assert!(estimate_psd(&ts, 100, 0.5, Window::Hann).is_err());
        assert!(estimate_psd(&ts, 128, 0.5, Window::Hann).is_err());
        assert!(estimate_psd(&ts, 32, 1.0, Window::Hann).is_err());
        assert_eq!(estimate_psd(&ts, 32, 0.5, Window::Hann).unwrap().segments, 3);
    }

    #[test]
    fn symmetrized_vacuum_target_is_half() {
        let k = PhysicalConstants::NATURAL;
        let t = Target::Gql { mode: TrackingMode::TwoWay, tau: 1.0, constants: k };
        let c = limits::gql_spectrum(TrackingMode::TwoWay, 1.0, 2.0, &k).unwrap();
        assert_eq!(t.symmetrized(2.0).unwrap(), 0.5 * c);
        assert_eq!(t.symmetrized(-2.0).unwrap(), 0.5 * c);
        let sql = Target::Sql { mass: 2.0, constants: k };
        assert_eq!(sql.symmetrized(2.0).unwrap(), 1.0 / 8.0);
    }
}
