//! Dimensionless response kernels b⁽¹⁾[x] and b⁽²⁾[x], x = ωτ.
//!
//! The closed forms cancel catastrophically near x = 0 (terms of order
//! 4/x² combine into something of order x²), so [`b_closed`] switches to
//! the Taylor series below [`SERIES_SWITCH`]. [`b_angular_oracle`] is an
//! independent route: it averages the squared phase response over the
//! propagation-direction cosine by adaptive quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_SUBDIVISIONS};

/// Below this |x| the closed form is replaced by its Taylor series.
pub const SERIES_SWITCH: f64 = 0.5;

/// Largest |x| accepted by [`b_series`].
pub const SERIES_MAX_X: f64 = 4.0;

/// Number of series terms used on the small-x branch of [`b_closed`].
pub const SWITCH_TERMS: usize = 12;

/// Angular average ⟨(1 − γ²)²⟩ = 8/15 fixing the low-frequency law.
pub const LOW_FREQ_COEFFICIENT: f64 = 8.0 / 15.0;

/// How the distance between the end points is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrackingMode {
    /// A single light passage from emitter to receiver.
    OneWay,
    /// Half of a round-trip time.
    TwoWay,
}

impl TrackingMode {
    pub const ALL: [TrackingMode; 2] = [TrackingMode::OneWay, TrackingMode::TwoWay];

    pub fn as_str(self) -> &'static str {
        match self {
            TrackingMode::OneWay => "one-way",
            TrackingMode::TwoWay => "two-way",
        }
    }
}

impl fmt::Display for TrackingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrackingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-way" | "oneway" | "1" => Ok(TrackingMode::OneWay),
            "two-way" | "twoway" | "2" => Ok(TrackingMode::TwoWay),
            other => Err(Error::Argument(format!("unknown tracking mode {other:?}"))),
        }
    }
}

/// Evaluation route for a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Closed form with the small-x series branch.
    ClosedForm,
    /// Taylor series truncated after the given number of terms (≥ 2).
    Series(usize),
    /// Angular-average quadrature to the given absolute tolerance.
    QuadratureOracle(f64),
}

/// A tracking mode paired with an evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseKernel {
    mode: TrackingMode,
    strategy: Strategy,
}

impl ResponseKernel {
    pub fn new(mode: TrackingMode, strategy: Strategy) -> Result<Self> {
        match strategy {
            Strategy::Series(n) if n < 2 => {
                Err(Error::Argument(format!("series order must be at least 2, got {n}")))
            }
            Strategy::QuadratureOracle(tol) if !(tol > 0.0) => {
                Err(Error::Argument(format!("oracle tolerance must be positive, got {tol}")))
            }
            _ => Ok(ResponseKernel { mode, strategy }),
        }
    }

    pub fn closed_form(mode: TrackingMode) -> Self {
        ResponseKernel { mode, strategy: Strategy::ClosedForm }
    }

    pub fn mode(&self) -> TrackingMode {
        self.mode
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.strategy {
            Strategy::ClosedForm => b_closed(self.mode, x),
            Strategy::Series(n) => b_series(self.mode, x, n),
            Strategy::QuadratureOracle(tol) => b_angular_oracle(self.mode, x, tol),
        }
    }

    pub fn high_freq(&self) -> f64 {
        b_high_freq(self.mode)
    }
}

fn check_x(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("x = ωτ is NaN"));
    }
    if x.is_infinite() {
        return Err(domain("x = ωτ is infinite; use b_high_freq for the limit"));
    }
    Ok(x.abs())
}

/// b[x] from the closed form, using the series branch for |x| < 0.5.
///
/// The two-way kernel keeps its persistent −cos(2x)/3 oscillation; the
/// large-x constant is available separately from [`b_high_freq`].
pub fn b_closed(mode: TrackingMode, x: f64) -> Result<f64> {
    let x = check_x(x)?;
    if x < SERIES_SWITCH {
        return b_series(mode, x, SWITCH_TERMS);
    }
    Ok(closed_formula(mode, x))
}

/// The bare closed form without the small-x branch. Loses precision
/// below x ≈ 0.5 and is singular at 0.
pub fn b_closed_formula(mode: TrackingMode, x: f64) -> Result<f64> {
    let x = check_x(x)?;
    if x == 0.0 {
        return Err(Error::Singularity("closed form evaluated at x = 0".into()));
    }
    Ok(closed_formula(mode, x))
}

fn closed_formula(mode: TrackingMode, x: f64) -> f64 {
    let (s2, c2) = (2.0 * x).sin_cos();
    let x2 = x * x;
    match mode {
        TrackingMode::OneWay => 8.0 / 3.0 - 4.0 / x2 + 2.0 * s2 / (x2 * x),
        TrackingMode::TwoWay => 1.0 - c2 / 3.0 - (3.0 + c2) / x2 + 2.0 * s2 / (x2 * x),
    }
}

/// Taylor series Σ_{m=1}^{n_terms} c_m x^{2m} of the closed form.
///
/// With A = (2m+1)(2m+2)(2m+3), c_m = (−1)^m 4^m/(2m)! · r_m where
/// r_m = −16/A (one-way) or (24m − 12 − A)/(3A) (two-way). Both start with
/// (8/15)x²; the one-way x⁴ coefficient is −16/315.
pub fn b_series(mode: TrackingMode, x: f64, n_terms: usize) -> Result<f64> {
    if n_terms < 2 {
        return Err(Error::Argument(format!("n_terms must be at least 2, got {n_terms}")));
    }
    let x = check_x(x)?;
    if x > SERIES_MAX_X {
        return Err(domain(format!("|x| = {x} exceeds series bound {SERIES_MAX_X}")));
    }
    let x2 = x * x;
    // term = (−1)^m 4^m x^{2m} / (2m)!
    let mut term = -2.0 * x2;
    let mut terms = Vec::with_capacity(n_terms);
    for m in 1..=n_terms {
        terms.push(term * series_ratio(mode, m));
        let k = (2 * m) as f64;
        term *= -4.0 * x2 / ((k + 1.0) * (k + 2.0));
    }
    // smallest terms first
    Ok(terms.iter().rev().sum())
}

fn series_ratio(mode: TrackingMode, m: usize) -> f64 {
    let m = m as f64;
    let a = (2.0 * m + 1.0) * (2.0 * m + 2.0) * (2.0 * m + 3.0);
    match mode {
        TrackingMode::OneWay => -16.0 / a,
        TrackingMode::TwoWay => (24.0 * m - 12.0 - a) / (3.0 * a),
    }
}

/// Integrand of the angular average at direction cosine γ.
pub fn angular_integrand(mode: TrackingMode, x: f64, gamma: f64) -> f64 {
    match mode {
        TrackingMode::OneWay => {
            // |e^{ix} − e^{iγx}|² = 4 sin²((1−γ)x/2)
            let s = (0.5 * (1.0 - gamma) * x).sin();
            (1.0 + gamma).powi(2) * 4.0 * s * s
        }
        TrackingMode::TwoWay => {
            let e = |phase: f64| Complex64::from_polar(1.0, phase);
            let eg = e(gamma * x);
            let z = (1.0 + gamma) * (e(x) - eg) - (1.0 - gamma) * (e(-x) - eg);
            0.25 * z.norm_sqr()
        }
    }
}

/// b[x] as the uniform average over γ ∈ [−1, 1] of the phase response,
/// computed by adaptive Gauss–Kronrod quadrature to `abs_tol`.
pub fn b_angular_oracle(mode: TrackingMode, x: f64, abs_tol: f64) -> Result<f64> {
    b_angular_oracle_with(mode, x, abs_tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn b_angular_oracle_with(
    mode: TrackingMode,
    x: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<f64> {
    if !(abs_tol > 0.0) {
        return Err(Error::Argument(format!("abs_tol must be positive, got {abs_tol}")));
    }
    let x = check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let integral = quadrature::integrate(
        |g| angular_integrand(mode, x, g),
        -1.0,
        1.0,
        2.0 * abs_tol,
        max_subdivisions,
    )
    .map_err(|e| match e {
        Error::Numerical { message, estimate, error_estimate } => Error::Numerical {
            message,
            estimate: 0.5 * estimate,
            error_estimate: 0.5 * error_estimate,
        },
        other => other,
    })?;
    Ok(0.5 * integral.value)
}

/// Large-x value of b: 8/3 (one-way), 1 (two-way).
///
/// For the two-way kernel this is the average over one oscillation period
/// of the −cos(2x)/3 term, which never dies out.
pub fn b_high_freq(mode: TrackingMode) -> f64 {
    match mode {
        TrackingMode::OneWay => 8.0 / 3.0,
        TrackingMode::TwoWay => 1.0,
    }
}

/// Mean of b_closed over one period [x_start, x_start + π] of its
/// oscillating part.
pub fn b_period_average(mode: TrackingMode, x_start: f64) -> Result<f64> {
    let x0 = check_x(x_start)?;
    let r = quadrature::integrate(
        |x| b_closed(mode, x).unwrap_or(f64::NAN),
        x0,
        x0 + PI,
        1e-13,
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(r.value / PI)
}

/// Log- or linearly spaced grid with `points` entries.
pub fn grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::Argument("grid needs at least one point".into()));
    }
    if !(min.is_finite() && max.is_finite()) || max < min {
        return Err(Error::Argument(format!("invalid grid range [{min}, {max}]")));
    }
    if log && min <= 0.0 {
        return Err(Error::Argument("log grid needs a positive lower bound".into()));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if log {
                (min.ln() + (max.ln() - min.ln()) * step(i)).exp()
            } else {
                min + (max - min) * step(i)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, One, ToPrimitive, Zero};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    use TrackingMode::{OneWay, TwoWay};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// sin and cos of a rational argument by exact Taylor summation.
    fn exact_sin_cos(z: &BigRational, terms: usize) -> (BigRational, BigRational) {
        let mut sin = BigRational::zero();
        let mut cos = BigRational::zero();
        let mut power = BigRational::one(); // z^k / k!
        for k in 0..2 * terms {
            let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
            let t = &power * BigRational::from_integer(BigInt::from(sign));
            if k % 2 == 0 {
                cos += t;
            } else {
                sin += t;
            }
            power = power * z / BigRational::from_integer(BigInt::from(k as i64 + 1));
        }
        (sin, cos)
    }

    /// The closed form in exact rational arithmetic.
    fn exact_closed(mode: TrackingMode, x: &BigRational) -> f64 {
        let two_x = x * rat(2, 1);
        let (s2, c2) = exact_sin_cos(&two_x, 120);
        let x2 = x * x;
        let x3 = &x2 * x;
        let v = match mode {
            OneWay => rat(8, 3) - rat(4, 1) / &x2 + rat(2, 1) * &s2 / &x3,
            TwoWay => {
                rat(1, 1) - &c2 / rat(3, 1) - (rat(3, 1) + &c2) / &x2 + rat(2, 1) * &s2 / &x3
            }
        };
        v.to_f64().unwrap()
    }

    #[test]
    fn closed_form_at_pi() {
        let pi2 = PI * PI;
        assert!((b_closed(OneWay, PI).unwrap() - (8.0 / 3.0 - 4.0 / pi2)).abs() < 1e-14);
        assert!((b_closed(TwoWay, PI).unwrap() - (2.0 / 3.0 - 4.0 / pi2)).abs() < 1e-14);
        assert!((b_closed(OneWay, PI).unwrap() - 2.26139).abs() < 1e-5);
        assert!((b_closed(TwoWay, PI).unwrap() - 0.26139).abs() < 1e-5);
    }

    #[test]
    fn small_x_matches_low_frequency_law() {
        for mode in TrackingMode::ALL {
            let b = b_closed(mode, 1e-3).unwrap();
            assert!((b / 1e-6 - LOW_FREQ_COEFFICIENT).abs() < 1e-6, "{mode}: {b}");
        }
    }

    #[test]
    fn one_way_series_quartic_coefficient() {
        // (b − (8/15)x²)/x⁴ → −16/315
        let x: f64 = 1e-2;
        let b = b_series(OneWay, x, 6).unwrap();
        let c4 = (b - LOW_FREQ_COEFFICIENT * x * x) / x.powi(4);
        assert!((c4 + 16.0 / 315.0).abs() < 1e-6, "{c4}");
    }

    #[test]
    fn series_against_exact_closed_form() {
        let x = rat(1, 10);
        // the two-way x^10 term is ~1e-14, so it needs one more term for 1e-12
        for (mode, n) in [(OneWay, 4), (TwoWay, 5)] {
            let exact = exact_closed(mode, &x);
            let s = b_series(mode, 0.1, n).unwrap();
            assert!(((s - exact) / exact).abs() < 1e-12, "{mode}: {s} vs {exact}");
        }
        // two-way at x = 0.1: (8/15)x² to within the x⁴ correction
        let s = b_series(TwoWay, 0.1, 4).unwrap();
        assert!((s - LOW_FREQ_COEFFICIENT * 0.01).abs() < 1e-4);
    }

    #[test]
    fn closed_branch_against_exact_values() {
        for (n, d) in [(1, 1000), (1, 3), (1, 2), (7, 10), (3, 1), (25, 2)] {
            let xr = rat(n, d);
            let x = n as f64 / d as f64;
            for mode in TrackingMode::ALL {
                let exact = exact_closed(mode, &xr);
                let got = b_closed(mode, x).unwrap();
                assert!(((got - exact) / exact).abs() < 1e-13, "{mode} x={x}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn series_edge_cases() {
        assert_eq!(b_series(OneWay, 0.0, 3).unwrap(), 0.0);
        assert!(matches!(b_series(OneWay, 0.1, 1), Err(Error::Argument(_))));
        assert!(matches!(b_series(OneWay, 5.0, 10), Err(Error::Domain(_))));
        assert!(matches!(b_closed(OneWay, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(b_closed_formula(TwoWay, 0.0), Err(Error::Singularity(_))));
        assert_eq!(b_closed(TwoWay, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn branch_continuity_at_switch() {
        for mode in TrackingMode::ALL {
            let series = b_series(mode, SERIES_SWITCH, SWITCH_TERMS).unwrap();
            let closed = b_closed_formula(mode, SERIES_SWITCH).unwrap();
            assert!(((series - closed) / closed).abs() < 1e-12, "{mode}");
            let below = b_closed(mode, SERIES_SWITCH * (1.0 - 1e-15)).unwrap();
            assert!(((below - closed) / closed).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        for mode in TrackingMode::ALL {
            for x in [0.01, 0.3, 1.0, 4.0, 17.0, 100.0] {
                let o = b_angular_oracle(mode, x, 1e-12).unwrap();
                let c = b_closed(mode, x).unwrap();
                assert!((o - c).abs() <= 1e-10, "{mode} x={x}: {o} vs {c}");
            }
            assert_eq!(b_angular_oracle(mode, 0.0, 1e-12).unwrap(), 0.0);
        }
    }

    #[test]
    fn oracle_failure_carries_estimate() {
        match b_angular_oracle_with(OneWay, 300.0, 1e-14, 2) {
            Err(Error::Numerical { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected numerical failure, got {other:?}"),
        }
        assert!(b_angular_oracle(OneWay, 1.0, -1.0).is_err());
    }

    #[test]
    fn high_frequency_limits() {
        assert_eq!(b_high_freq(OneWay), 8.0 / 3.0);
        assert_eq!(b_high_freq(TwoWay), 1.0);
        let avg = b_period_average(TwoWay, 1000.0).unwrap();
        assert!((avg - 1.0).abs() < 1e-2, "{avg}");
        let avg = b_period_average(OneWay, 1000.0).unwrap();
        assert!((avg - 8.0 / 3.0).abs() < 1e-2, "{avg}");
    }

    #[test]
    fn kernel_strategies_agree() {
        for mode in TrackingMode::ALL {
            let c = ResponseKernel::closed_form(mode).eval(0.3).unwrap();
            let s = ResponseKernel::new(mode, Strategy::Series(10)).unwrap().eval(0.3).unwrap();
            let q = ResponseKernel::new(mode, Strategy::QuadratureOracle(1e-13))
                .unwrap()
                .eval(0.3)
                .unwrap();
            assert!((c - s).abs() < 1e-15 && (c - q).abs() < 1e-12);
        }
        assert!(ResponseKernel::new(OneWay, Strategy::Series(1)).is_err());
        assert!(ResponseKernel::new(OneWay, Strategy::QuadratureOracle(0.0)).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("one-way".parse::<TrackingMode>().unwrap(), OneWay);
        assert_eq!("two-way".parse::<TrackingMode>().unwrap(), TwoWay);
        assert!("three-way".parse::<TrackingMode>().is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = grid(1e-2, 1e2, 50, true).unwrap();
        assert_eq!(g.len(), 50);
        assert!((g[0] - 1e-2).abs() < 1e-16 && (g[49] - 1e2).abs() < 1e-12);
        assert!(grid(0.0, 1.0, 5, true).is_err());
    }

    proptest! {
        #[test]
        fn even_in_x(x in 0.0f64..200.0) {
            for mode in TrackingMode::ALL {
                prop_assert_eq!(b_closed(mode, x).unwrap(), b_closed(mode, -x).unwrap());
            }
        }

        #[test]
        fn non_negative(x in 0.0f64..500.0) {
            for mode in TrackingMode::ALL {
                prop_assert!(b_closed(mode, x).unwrap() >= 0.0);
            }
        }
    }
}
