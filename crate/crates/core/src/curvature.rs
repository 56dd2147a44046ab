//! Geodesic-distance noise from first principles.
//!
//! Starting from the light-cone curvature correlation of the linearized
//! vacuum field, the spectrum of the geodesic deviation along the probe's
//! path is assembled mode by mode:
//!
//! 1. the on-shell constraint δ(k²)θ(k₀) fixes |k| = ω and leaves the
//!    measure (ω/2)·dΩ;
//! 2. each light leg contributes a phase integral over its affine
//!    parameter, done in closed form;
//! 3. the double time integration of the tidal acceleration divides the
//!    acceleration spectrum by ω⁴;
//! 4. the remaining integral over wavevector directions is done by nested
//!    adaptive quadrature over the full sphere.
//!
//! Natural units throughout (c = 1, l_P = 1): the returned spectrum is the
//! coefficient of l_P², with ω and τ in matching time units.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::kernels::TrackingMode;
use crate::quadrature;

/// Minkowski metric with signature (+, −, −, −).
pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Relative tolerance of the null-vector test |k·k| ≤ tol·k₀².
pub const LIGHTLIKE_TOL: f64 = 1e-12;

/// Prefactor of the curvature correlation spectrum, in units of l_P².
pub const CURVATURE_SPECTRUM_NORM: f64 = 16.0 * PI * PI;

/// Subdivision budget for each level of the sphere quadrature.
pub const SPHERE_MAX_SUBDIVISIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A four-vector with index 0 the time component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub components: [f64; 4],
    pub variance: Variance,
}

impl FourVector {
    pub fn contravariant(components: [f64; 4]) -> Self {
        FourVector { components, variance: Variance::Contravariant }
    }

    pub fn covariant(components: [f64; 4]) -> Self {
        FourVector { components, variance: Variance::Covariant }
    }

    /// Null vector (ω, ω·n̂) for a spatial direction n (normalized here).
    pub fn null(omega: f64, direction: [f64; 3]) -> Result<Self> {
        let n = unit(direction)?;
        Ok(Self::contravariant([omega, omega * n[0], omega * n[1], omega * n[2]]))
    }

    fn flipped(self) -> [f64; 4] {
        let c = self.components;
        [c[0] * ETA[0], c[1] * ETA[1], c[2] * ETA[2], c[3] * ETA[3]]
    }

    /// Lower components: covariant form.
    pub fn lower(self) -> Self {
        match self.variance {
            Variance::Covariant => self,
            Variance::Contravariant => Self::covariant(self.flipped()),
        }
    }

    /// Upper components: contravariant form.
    pub fn raise(self) -> Self {
        match self.variance {
            Variance::Contravariant => self,
            Variance::Covariant => Self::contravariant(self.flipped()),
        }
    }

    pub fn time(&self) -> f64 {
        self.components[0]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        let a = self.raise().components;
        let b = other.lower().components;
        a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn is_lightlike(&self) -> bool {
        self.norm_sq().abs() <= LIGHTLIKE_TOL * self.time() * self.time()
    }

    pub fn scaled(self, f: f64) -> Self {
        let c = self.components;
        FourVector { components: [f * c[0], f * c[1], f * c[2], f * c[3]], variance: self.variance }
    }
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(domain(format!("direction {v:?} cannot be normalized")));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// 𝓡_{μνρσ}(k) for one null mode, all indices down.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannKernel {
    pub entries: [[[[f64; 4]; 4]; 4]; 4],
}

impl RiemannKernel {
    pub fn get(&self, mu: usize, nu: usize, rho: usize, sigma: usize) -> f64 {
        self.entries[mu][nu][rho][sigma]
    }

    /// R_{0a0b} u^a u^b for a contravariant u.
    pub fn tidal(&self, u: &FourVector) -> f64 {
        let u = u.raise().components;
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += self.entries[0][a][0][b] * u[a] * u[b];
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// 𝓡_{μνρσ} = ½(k_μk_ρη_νσ + k_νk_ση_μρ − k_νk_ρη_μσ − k_μk_ση_νρ).
pub fn riemann_mode_kernel(k: &FourVector) -> Result<RiemannKernel> {
    if !(k.time() > 0.0) {
        return Err(domain(format!("wavevector needs positive frequency, got k₀ = {}", k.time())));
    }
    if !k.is_lightlike() {
        return Err(domain(format!("wavevector is not lightlike: k·k = {}", k.norm_sq())));
    }
    let kl = k.lower().components;
    let eta = |a: usize, b: usize| if a == b { ETA[a] } else { 0.0 };
    let mut entries = [[[[0.0; 4]; 4]; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            for rho in 0..4 {
                for sigma in 0..4 {
                    entries[mu][nu][rho][sigma] = 0.5
                        * (kl[mu] * kl[rho] * eta(nu, sigma) + kl[nu] * kl[sigma] * eta(mu, rho)
                            - kl[nu] * kl[rho] * eta(mu, sigma)
                            - kl[mu] * kl[sigma] * eta(nu, rho));
                }
            }
        }
    }
    Ok(RiemannKernel { entries })
}

fn check_probe(u: &FourVector) -> Result<()> {
    let u = u.raise();
    if (u.time() - 1.0).abs() > LIGHTLIKE_TOL || !u.is_lightlike() {
        return Err(domain(format!("probe direction must be null with u⁰ = 1, got {:?}", u.components)));
    }
    Ok(())
}

/// Correlation weight between R_{0μ0ν}u^μu^ν and R_{0μ′0ν′}v^μ′v^ν′ for
/// one null mode: the bracketed combination of the correlation tensor with
/// the time indices fixed and the remaining four contracted against u, v.
pub fn curvature_cross_weight(k: &FourVector, u: &FourVector, v: &FourVector) -> Result<f64> {
    check_probe(u)?;
    check_probe(v)?;
    let r = riemann_mode_kernel(k)?;
    Ok(cross_weight_with(&r, u, v))
}

fn cross_weight_with(r: &RiemannKernel, u: &FourVector, v: &FourVector) -> f64 {
    let u = u.raise().components;
    let v = v.raise().components;
    let e = &r.entries;
    let mut total = 0.0;
    // unprimed (ν, σ) ↔ u, primed (ν′, σ′) ↔ v
    for a in 0..4 {
        for b in 0..4 {
            let uu = u[a] * u[b];
            if uu == 0.0 {
                continue;
            }
            for ap in 0..4 {
                for bp in 0..4 {
                    let braces = e[0][a][0][ap] * e[0][b][0][bp] + e[0][a][0][bp] * e[0][b][0][ap]
                        - e[0][a][0][b] * e[0][ap][0][bp];
                    total += uu * v[ap] * v[bp] * braces;
                }
            }
        }
    }
    total
}

/// Autocorrelation weight of the tidal component along u.
pub fn curvature_corr_weight(k: &FourVector, u: &FourVector) -> Result<f64> {
    curvature_cross_weight(k, u, u)
}

/// The measured light path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub mode: TrackingMode,
    /// Outgoing propagation direction, contravariant, u⁰ = 1.
    pub u: FourVector,
    /// One-way propagation time.
    pub tau: f64,
    /// `None` integrates each leg's phase in closed form; `Some(n)` uses a
    /// composite Simpson rule with n panels along the affine parameter.
    pub sigma_panels: Option<usize>,
}

impl PathSpec {
    pub fn new(mode: TrackingMode, direction: [f64; 3], tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain(format!("propagation time must be positive, got {tau}")));
        }
        let n = unit(direction)?;
        Ok(PathSpec {
            mode,
            u: FourVector::contravariant([1.0, n[0], n[1], n[2]]),
            tau,
            sigma_panels: None,
        })
    }

    pub fn with_sigma_panels(mut self, panels: usize) -> Result<Self> {
        if panels == 0 || !panels.is_multiple_of(2) {
            return Err(Error::Argument(format!("Simpson needs an even panel count, got {panels}")));
        }
        self.sigma_panels = Some(panels);
        Ok(self)
    }

    pub fn direction(&self) -> [f64; 3] {
        let c = self.u.raise().components;
        [c[1], c[2], c[3]]
    }

    /// Light legs as (direction u, end event relative to the receiver
    /// event, weight in the distance estimate).
    fn legs(&self) -> Vec<Leg> {
        let n = self.direction();
        let out = FourVector::contravariant([1.0, n[0], n[1], n[2]]);
        match self.mode {
            TrackingMode::OneWay => vec![Leg { u: out, end: [0.0; 4], weight: 1.0 }],
            TrackingMode::TwoWay => {
                let back = FourVector::contravariant([1.0, -n[0], -n[1], -n[2]]);
                let tau = self.tau;
                vec![
                    // returning leg, arriving at the receiver
                    Leg { u: back, end: [0.0; 4], weight: 0.5 },
                    // outgoing leg, arriving at the far end point
                    Leg { u: out, end: [-tau, tau * n[0], tau * n[1], tau * n[2]], weight: 0.5 },
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Leg {
    u: FourVector,
    end: [f64; 4],
    weight: f64,
}

/// ∫₀^L e^{i·rate·σ} dσ = L·e^{i·rate·L/2}·sinc(rate·L/2).
fn phase_integral(rate: f64, length: f64) -> Complex64 {
    let half = 0.5 * rate * length;
    let sinc = if half.abs() < 1e-4 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    Complex64::from_polar(length * sinc, half)
}

fn phase_integral_simpson(rate: f64, length: f64, panels: usize) -> Complex64 {
    let h = length / panels as f64;
    let f = |i: usize| Complex64::from_polar(1.0, rate * h * i as f64);
    let mut acc = f(0) + f(panels);
    for i in 1..panels {
        acc += f(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Squared mode amplitude of the distance acceleration for null k.
fn mode_power(path: &PathSpec, k: &FourVector) -> Result<f64> {
    let r = riemann_mode_kernel(k)?;
    let legs = path.legs();
    let phases: Vec<Complex64> = legs
        .iter()
        .map(|leg| {
            // points x_end − uσ: e^{−ik·x} = e^{−ik·x_end} e^{+i(k·u)σ}
            let end = FourVector::contravariant(leg.end);
            let rate = k.dot(&leg.u);
            let along = match path.sigma_panels {
                None => phase_integral(rate, path.tau),
                Some(n) => phase_integral_simpson(rate, path.tau, n),
            };
            Complex64::from_polar(1.0, -k.dot(&end)) * along
        })
        .collect();
    let mut power = 0.0;
    for (i, a) in legs.iter().enumerate() {
        for (j, b) in legs.iter().enumerate() {
            let w = cross_weight_with(&r, &a.u, &b.u);
            power += a.weight * b.weight * w * (phases[i] * phases[j].conj()).re;
        }
    }
    Ok(power)
}

/// Spectrum prefactor turning ∫dΩ (mode power) into C_qq[ω]:
/// curvature norm × (2π)⁻³ × light-cone measure ω/2 × ω⁻⁴.
fn spectrum_prefactor(omega: f64) -> f64 {
    let fourier_measure = (2.0 * PI).powi(-3);
    let light_cone = 0.5 * omega;
    CURVATURE_SPECTRUM_NORM * fourier_measure * light_cone / omega.powi(4)
}

/// C_qq[ω] (coefficient of l_P²) for the given path, from the curvature
/// correlation, integrated over the full sphere of wavevector directions.
pub fn response_first_principles(path: &PathSpec, omega: f64, abs_tol: f64) -> Result<f64> {
    check_inputs(path, omega, abs_tol)?;
    let pref = spectrum_prefactor(omega);
    let outer_tol = abs_tol / pref;
    let inner_tol = outer_tol / (20.0 * PI);
    let mut failure = None;

    let outer = |mu: f64| -> f64 {
        let st = (1.0 - mu * mu).max(0.0).sqrt();
        let inner = quadrature::integrate(
            |phi: f64| {
                let dir = [st * phi.cos(), st * phi.sin(), mu];
                match FourVector::null(omega, dir).and_then(|k| mode_power(path, &k)) {
                    Ok(p) => p,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            2.0 * PI,
            inner_tol,
            SPHERE_MAX_SUBDIVISIONS,
        );
        match inner {
            Ok(r) => r.value,
            Err(e) => {
                let est = match &e {
                    Error::Numerical { estimate, .. } => *estimate,
                    _ => 0.0,
                };
                failure.get_or_insert(e);
                est
            }
        }
    };
    let result = quadrature::integrate(outer, -1.0, 1.0, outer_tol, SPHERE_MAX_SUBDIVISIONS);
    finish(result, failure, pref)
}

/// Same spectrum with the direction integral reduced to one dimension:
/// wavevectors at cosine γ to the path, azimuth fixed, times 2π.
pub fn response_gamma_quadrature(path: &PathSpec, omega: f64, abs_tol: f64) -> Result<f64> {
    check_inputs(path, omega, abs_tol)?;
    let pref = spectrum_prefactor(omega);
    let n = path.direction();
    let perp = perpendicular(n);
    let mut failure = None;
    let integrand = |gamma: f64| {
        let st = (1.0 - gamma * gamma).max(0.0).sqrt();
        let dir = [0, 1, 2].map(|i| gamma * n[i] + st * perp[i]);
        match FourVector::null(omega, dir).and_then(|k| mode_power(path, &k)) {
            Ok(p) => 2.0 * PI * p,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let result = quadrature::integrate(integrand, -1.0, 1.0, abs_tol / pref, SPHERE_MAX_SUBDIVISIONS);
    finish(result, failure, pref)
}

fn finish(
    result: Result<quadrature::Integral>,
    failure: Option<Error>,
    pref: f64,
) -> Result<f64> {
    match (result, failure) {
        (_, Some(Error::Numerical { message, estimate, error_estimate })) => Err(Error::Numerical {
            message: format!("inner sphere quadrature: {message}"),
            estimate: estimate * pref,
            error_estimate: error_estimate * pref,
        }),
        (_, Some(e)) => Err(e),
        (Ok(r), None) => Ok(pref * r.value),
        (Err(Error::Numerical { message, estimate, error_estimate }), None) => Err(Error::Numerical {
            message,
            estimate: estimate * pref,
            error_estimate: error_estimate * pref,
        }),
        (Err(e), None) => Err(e),
    }
}

fn check_inputs(path: &PathSpec, omega: f64, abs_tol: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(domain(format!("ω must be positive, got {omega}")));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Argument(format!("abs_tol must be positive, got {abs_tol}")));
    }
    check_probe(&path.u)
}

fn perpendicular(n: [f64; 3]) -> [f64; 3] {
    // cross with the least-aligned axis
    let axis = if n[0].abs() < 0.5 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = [
        n[1] * axis[2] - n[2] * axis[1],
        n[2] * axis[0] - n[0] * axis[2],
        n[0] * axis[1] - n[1] * axis[0],
    ];
    unit(c).expect("axis chosen non-parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::b_closed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use TrackingMode::{OneWay, TwoWay};

    fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
        loop {
            let v = [0, 1, 2].map(|_| rng.random_range(-1.0..1.0));
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 > 1e-3 && n2 <= 1.0 {
                return v;
            }
        }
    }

    #[test]
    fn metric_operations() {
        let k = FourVector::contravariant([1.0, 0.0, 0.0, 1.0]);
        assert_eq!(k.lower().components, [1.0, 0.0, 0.0, -1.0]);
        assert_eq!(k.lower().raise(), k);
        assert!(k.is_lightlike());
        let t = FourVector::contravariant([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.norm_sq(), 1.0);
        assert!(!t.is_lightlike());
        assert_eq!(k.dot(&t), 1.0);
    }

    #[test]
    fn kernel_entry_for_z_mode() {
        let r = riemann_mode_kernel(&FourVector::contravariant([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.get(0, 1, 0, 1), -0.5);
        // covariant input gives the same tensor
        let r2 = riemann_mode_kernel(&FourVector::covariant([1.0, 0.0, 0.0, -1.0])).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn kernel_rejects_bad_wavevectors() {
        assert!(riemann_mode_kernel(&FourVector::contravariant([1.0, 0.0, 0.0, 0.9])).is_err());
        assert!(riemann_mode_kernel(&FourVector::contravariant([-1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn tidal_component_closed_form() {
        // R_{0a0b}u^a u^b = −½ k₀² (1 − γ²), γ the cosine between k and the path
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = rng.random_range(0.1..5.0);
            let kd = unit(random_direction(&mut rng)).unwrap();
            let nd = unit(random_direction(&mut rng)).unwrap();
            let k = FourVector::null(w, kd).unwrap();
            let u = FourVector::contravariant([1.0, nd[0], nd[1], nd[2]]);
            let gamma: f64 = (0..3).map(|i| kd[i] * nd[i]).sum();
            let s = riemann_mode_kernel(&k).unwrap().tidal(&u);
            let expected = -0.5 * w * w * (1.0 - gamma * gamma);
            assert!((s - expected).abs() < 1e-12 * w * w);
            let weight = curvature_corr_weight(&k, &u).unwrap();
            assert!((weight - s * s).abs() < 1e-11 * w.powi(4));
        }
    }

    #[test]
    fn weight_vanishes_along_the_path() {
        let k = FourVector::null(2.0, [0.0, 1.0, 0.0]).unwrap();
        let u = FourVector::contravariant([1.0, 0.0, 1.0, 0.0]);
        assert!(curvature_corr_weight(&k, &u).unwrap().abs() < 1e-24);
    }

    #[test]
    fn weight_is_quartic_and_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = FourVector::null(rng.random_range(0.01..10.0), random_direction(&mut rng)).unwrap();
            let nd = unit(random_direction(&mut rng)).unwrap();
            let u = FourVector::contravariant([1.0, nd[0], nd[1], nd[2]]);
            let w1 = curvature_corr_weight(&k, &u).unwrap();
            let w2 = curvature_corr_weight(&k.scaled(2.0), &u).unwrap();
            assert!(w1 >= 0.0);
            assert!((w2 - 16.0 * w1).abs() <= 1e-12 * w2.abs().max(1e-300));
        }
    }

    #[test]
    fn weight_rejects_non_normalized_probe() {
        let k = FourVector::null(1.0, [0.0, 0.0, 1.0]).unwrap();
        let u = FourVector::contravariant([2.0, 0.0, 2.0, 0.0]);
        assert!(curvature_corr_weight(&k, &u).is_err());
    }

    #[test]
    fn phase_integral_against_simpson() {
        for rate in [0.0, 1e-6, 0.3, 2.0, -7.0] {
            let a = phase_integral(rate, 1.7);
            let b = phase_integral_simpson(rate, 1.7, 2000);
            assert!((a - b).norm() < 1e-10, "{rate}: {a} {b}");
        }
    }

    #[test]
    fn first_principles_low_order_cases() {
        let tau = 1.0;
        for (mode, w) in [(OneWay, 1.0), (TwoWay, 3.0)] {
            let path = PathSpec::new(mode, [0.0, 0.0, 1.0], tau).unwrap();
            let oracle = b_closed(mode, w * tau).unwrap() / w;
            let got = response_first_principles(&path, w, 1e-9 * oracle).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-6, "{mode}: {got} vs {oracle}");
        }
    }

    #[test]
    fn first_principles_vanishes_at_low_frequency() {
        let path = PathSpec::new(OneWay, [1.0, 1.0, 0.0], 1.0).unwrap();
        let mut last = f64::INFINITY;
        for w in [1e-1, 1e-2, 1e-3] {
            let v = response_first_principles(&path, w, 1e-9 * w).unwrap();
            assert!(v < last);
            assert!((v / (8.0 / 15.0 * w) - 1.0).abs() < 1e-2, "{w}: {v}");
            last = v;
        }
    }

    #[test]
    fn numeric_sigma_integration_agrees() {
        let path = PathSpec::new(TwoWay, [0.3, -0.2, 0.9], 1.0).unwrap().with_sigma_panels(64).unwrap();
        let w = 2.0;
        let oracle = b_closed(TwoWay, w).unwrap() / w;
        let got = response_gamma_quadrature(&path, w, 1e-10).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-6);
        assert!(PathSpec::new(OneWay, [0.0, 0.0, 1.0], 1.0).unwrap().with_sigma_panels(3).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(PathSpec::new(OneWay, [0.0; 3], 1.0).is_err());
        assert!(PathSpec::new(OneWay, [0.0, 0.0, 1.0], 0.0).is_err());
        let path = PathSpec::new(OneWay, [0.0, 0.0, 1.0], 1.0).unwrap();
        assert!(response_first_principles(&path, 0.0, 1e-6).is_err());
        assert!(response_first_principles(&path, 1.0, 0.0).is_err());
    }
}
