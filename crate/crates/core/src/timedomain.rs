//! Commutator functions b(t) and B(t) = ∫₀ᵗ b as generalized functions.
//!
//! A [`GeneralizedTimeFunction`] is a finite set of Dirac impulses plus a
//! piecewise polynomial regular part. Segments are stored as polynomials in
//! |t| on t ≥ 0 and continued to t < 0 by the parity tag, so evenness or
//! oddness holds by construction. At a jump the function takes the mean of
//! its one-sided limits; in particular an odd function is 0 at t = 0.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::kernels::{self, TrackingMode};

/// Relative tolerance used when checking impulse symmetry.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub location: f64,
    pub weight: f64,
}

/// Polynomial Σ coeffs[k]·s^k on lo ≤ s ≤ hi, with s = |t|.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        Segment { lo, hi, coeffs }
    }

    pub fn eval(&self, s: f64) -> f64 {
        poly_eval(&self.coeffs, s)
    }

    pub fn derivative(&self) -> Segment {
        Segment::new(self.lo, self.hi, poly_derivative(&self.coeffs))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

pub fn poly_eval(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

pub fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

/// Antiderivative vanishing at s = 0.
pub fn poly_antiderivative(coeffs: &[f64]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64))
        .collect()
}

/// Dirac impulses plus a piecewise polynomial, with definite parity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedTimeFunction {
    impulses: Vec<Impulse>,
    segments: Vec<Segment>,
    parity: Parity,
}

impl GeneralizedTimeFunction {
    /// Validates the segment layout and the impulse symmetry demanded by
    /// the parity. Impulses are given at their true (signed) locations.
    pub fn new(mut impulses: Vec<Impulse>, segments: Vec<Segment>, parity: Parity) -> Result<Self> {
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.lo >= 0.0 && seg.lo < seg.hi) || seg.lo.is_nan() || seg.hi.is_nan() {
                return Err(domain(format!("segment {i} has invalid interval [{}, {}]", seg.lo, seg.hi)));
            }
            if i > 0 && seg.lo < segments[i - 1].hi {
                return Err(domain(format!("segment {i} overlaps or is out of order")));
            }
        }
        if impulses.iter().any(|p| !p.location.is_finite() || !p.weight.is_finite()) {
            return Err(domain("impulse with non-finite location or weight"));
        }
        impulses.sort_by(|a, b| a.location.total_cmp(&b.location));
        let scale = impulses.iter().map(|p| p.weight.abs()).fold(0.0, f64::max);
        for p in impulses.iter().filter(|p| p.location > 0.0) {
            let mirror = impulses
                .iter()
                .find(|q| (q.location + p.location).abs() <= SYMMETRY_TOL * p.location)
                .ok_or_else(|| domain(format!("impulse at {} has no mirror image", p.location)))?;
            if (mirror.weight - parity.sign() * p.weight).abs() > SYMMETRY_TOL * scale {
                return Err(domain(format!("impulse weights at ±{} break {parity:?} parity", p.location)));
            }
        }
        let negatives = impulses.iter().filter(|p| p.location < 0.0).count();
        let positives = impulses.iter().filter(|p| p.location > 0.0).count();
        if negatives != positives {
            return Err(domain("impulse set is not symmetric about t = 0"));
        }
        if parity == Parity::Odd && impulses.iter().any(|p| p.location == 0.0) {
            return Err(domain("odd function cannot carry an impulse at t = 0"));
        }
        Ok(GeneralizedTimeFunction { impulses, segments, parity })
    }

    pub fn zero(parity: Parity) -> Self {
        GeneralizedTimeFunction { impulses: Vec::new(), segments: Vec::new(), parity }
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Largest |t| at which the function is non-zero.
    pub fn support(&self) -> f64 {
        let seg = self.segments.last().map_or(0.0, |s| s.hi);
        let imp = self.impulses.iter().map(|p| p.location.abs()).fold(0.0, f64::max);
        seg.max(imp)
    }

    /// Regular part at s = |t| ≥ 0 approached from above or from below.
    fn eval_abs(&self, s: f64, from_above: bool) -> f64 {
        self.segments
            .iter()
            .find(|seg| {
                if from_above {
                    seg.lo <= s && s < seg.hi
                } else {
                    seg.lo < s && s <= seg.hi
                }
            })
            .map_or(0.0, |seg| seg.eval(s))
    }

    /// lim_{t'→t⁺} of the regular part.
    pub fn right_limit(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.eval_abs(t, true)
        } else {
            self.parity.sign() * self.eval_abs(-t, false)
        }
    }

    /// lim_{t'→t⁻} of the regular part.
    pub fn left_limit(&self, t: f64) -> f64 {
        if t > 0.0 {
            self.eval_abs(t, false)
        } else {
            self.parity.sign() * self.eval_abs(-t, true)
        }
    }

    /// Regular part at t; mean of the one-sided limits at a jump.
    pub fn regular(&self, t: f64) -> f64 {
        0.5 * (self.left_limit(t) + self.right_limit(t))
    }

    /// Segments of the derivative of the regular part (impulses dropped).
    pub fn regular_derivative(&self) -> Vec<Segment> {
        self.segments.iter().map(Segment::derivative).collect()
    }
}

/// b(t) for the given tracking mode and one-way propagation time τ.
///
/// One-way: (8/3)δ(t) − (2τ−|t|)²/(2τ³)·θ(2τ−|t|).
/// Two-way: δ(t) − (δ(t−2τ)+δ(t+2τ))/6 + (|t|−τ)(2τ−|t|)/(2τ³)·θ(2τ−|t|).
pub fn b_time(mode: TrackingMode, tau: f64) -> Result<GeneralizedTimeFunction> {
    check_tau(tau)?;
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let (impulses, coeffs) = match mode {
        TrackingMode::OneWay => (
            vec![Impulse { location: 0.0, weight: 8.0 / 3.0 }],
            vec![-2.0 / tau, 2.0 / t2, -0.5 / t3],
        ),
        TrackingMode::TwoWay => (
            vec![
                Impulse { location: -2.0 * tau, weight: -1.0 / 6.0 },
                Impulse { location: 0.0, weight: 1.0 },
                Impulse { location: 2.0 * tau, weight: -1.0 / 6.0 },
            ],
            vec![-1.0 / tau, 1.5 / t2, -0.5 / t3],
        ),
    };
    GeneralizedTimeFunction::new(impulses, vec![Segment::new(0.0, 2.0 * tau, coeffs)], Parity::Even)
}

/// B(t) = ∫₀ᵗ b, in closed form.
///
/// One-way: ε(t)(2τ−|t|)³/(6τ³)·θ(2τ−|t|).
/// Two-way: ε(t)(−2|t|³ + 9|t|²τ − 12|t|τ² + 6τ³)/(12τ³)·θ(2τ−|t|).
#[allow(non_snake_case)]
pub fn B_time(mode: TrackingMode, tau: f64) -> Result<GeneralizedTimeFunction> {
    check_tau(tau)?;
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let coeffs = match mode {
        TrackingMode::OneWay => vec![4.0 / 3.0, -2.0 / tau, 1.0 / t2, -1.0 / (6.0 * t3)],
        TrackingMode::TwoWay => vec![0.5, -1.0 / tau, 0.75 / t2, -1.0 / (6.0 * t3)],
    };
    GeneralizedTimeFunction::new(Vec::new(), vec![Segment::new(0.0, 2.0 * tau, coeffs)], Parity::Odd)
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("propagation time must be positive, got {tau}")))
    }
}

/// ∫₀ᵗ f(t') dt' as a generalized function of opposite parity.
///
/// An impulse sitting at t = 0 contributes half its weight on each side,
/// so the integral of an even function is exactly odd. Impulses at
/// interior points turn into jumps between segments.
#[allow(non_snake_case)]
pub fn integrate_b_to_B(b: &GeneralizedTimeFunction) -> GeneralizedTimeFunction {
    let parity = match b.parity {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
    };

    let mut breaks: Vec<f64> = std::iter::once(0.0)
        .chain(b.segments.iter().flat_map(|s| [s.lo, s.hi]))
        .chain(b.impulses.iter().map(|p| p.location).filter(|&a| a > 0.0))
        .filter(|s| s.is_finite())
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let weight_at = |s: f64| -> f64 {
        b.impulses.iter().filter(|p| p.location == s).map(|p| p.weight).sum()
    };

    let mut constant = 0.5 * weight_at(0.0);
    let mut magnitude = constant.abs();
    let mut segments = Vec::new();
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let mid = 0.5 * (lo + hi);
        let piece = b.segments.iter().find(|s| s.lo <= mid && mid < s.hi);
        let mut coeffs = piece.map_or_else(|| vec![0.0], |s| poly_antiderivative(&s.coeffs));
        let offset = constant - poly_eval(&coeffs, lo);
        coeffs[0] += offset;
        let end = poly_eval(&coeffs, hi);
        magnitude += piece.map_or(0.0, |_| (end - constant).abs());
        let seg = Segment::new(lo, hi, coeffs);
        if !seg.is_zero() {
            segments.push(seg);
        }
        let w = weight_at(hi);
        magnitude += w.abs();
        constant = end + w;
    }

    let last = breaks.last().copied().unwrap_or(0.0);
    // Anything at rounding level is an exact cancellation.
    if constant.abs() > 64.0 * f64::EPSILON * magnitude.max(f64::MIN_POSITIVE) {
        segments.push(Segment::new(last, f64::INFINITY, vec![constant]));
    }

    GeneralizedTimeFunction { impulses: Vec::new(), segments, parity }
}

/// ∫ f(t) e^{iωt} dt, the forward transform matching the
/// C(t) = ∫ dω/2π C[ω] e^{−iωt} convention.
///
/// Impulses contribute weight·e^{iω·location}; polynomial pieces are
/// integrated exactly. Fails if the regular part has unbounded support.
pub fn gtf_fourier(f: &GeneralizedTimeFunction, omega: f64) -> Result<Complex64> {
    if !omega.is_finite() {
        return Err(domain(format!("frequency must be finite, got {omega}")));
    }
    let mut total: Complex64 = f
        .impulses
        .iter()
        .map(|p| p.weight * Complex64::from_polar(1.0, omega * p.location))
        .sum();
    for seg in &f.segments {
        if !seg.hi.is_finite() {
            return Err(domain("regular part has unbounded support; transform is not a function"));
        }
        let half = poly_exp_integral(&seg.coeffs, seg.lo, seg.hi, omega);
        total += match f.parity {
            Parity::Even => Complex64::new(2.0 * half.re, 0.0),
            Parity::Odd => Complex64::new(0.0, 2.0 * half.im),
        };
    }
    Ok(total)
}

/// ∫_lo^hi p(s) e^{iωs} ds.
fn poly_exp_integral(coeffs: &[f64], lo: f64, hi: f64, omega: f64) -> Complex64 {
    let reach = omega.abs() * lo.abs().max(hi.abs());
    if reach < 1.0 {
        return poly_exp_series(coeffs, lo, hi, omega);
    }
    // Repeated integration by parts:
    // ∫ p e^{iωs} = e^{iωs} Σ_j (−1)^j p^{(j)}(s) / (iω)^{j+1}
    let i_omega = Complex64::new(0.0, omega);
    let primitive = |s: f64| {
        let mut deriv = coeffs.to_vec();
        let mut denom = i_omega;
        let mut sign = 1.0;
        let mut acc = Complex64::new(0.0, 0.0);
        while !deriv.is_empty() {
            acc += sign * poly_eval(&deriv, s) / denom;
            deriv = poly_derivative(&deriv);
            denom *= i_omega;
            sign = -sign;
        }
        Complex64::from_polar(1.0, omega * s) * acc
    };
    primitive(hi) - primitive(lo)
}

/// Power series of e^{iωs}, used where ω·s is small and the
/// integration-by-parts sum would cancel.
fn poly_exp_series(coeffs: &[f64], lo: f64, hi: f64, omega: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut factor = Complex64::new(1.0, 0.0); // (iω)^n / n!
    for n in 0..200 {
        let mut moment = 0.0;
        for (k, &c) in coeffs.iter().enumerate() {
            let p = (k + n + 1) as i32;
            moment += c * (hi.powi(p) - lo.powi(p)) / p as f64;
        }
        let term = factor * moment;
        total += term;
        if n > 2 && term.norm() <= 1e-18 * total.norm().max(f64::MIN_POSITIVE) {
            break;
        }
        factor *= Complex64::new(0.0, omega) / (n + 1) as f64;
    }
    total
}

/// The sign attached to the imaginary unit in a commutator prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImaginarySign {
    Plus,
    Minus,
}

/// A commutator written as (±i)·magnitude·shape(t).
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorResult {
    pub magnitude: f64,
    pub sign: ImaginarySign,
    pub shape: GeneralizedTimeFunction,
}

impl CommutatorResult {
    /// Regular part of the commutator at t (a purely imaginary number).
    pub fn regular(&self, t: f64) -> Complex64 {
        let s = match self.sign {
            ImaginarySign::Plus => 1.0,
            ImaginarySign::Minus => -1.0,
        };
        Complex64::new(0.0, s * self.magnitude * self.shape.regular(t))
    }
}

/// [q(t), q(0)] = −i l_P² B(t).
pub fn position_commutator(mode: TrackingMode, tau: f64, planck_length: f64) -> Result<CommutatorResult> {
    Ok(CommutatorResult {
        magnitude: planck_length * planck_length,
        sign: ImaginarySign::Minus,
        shape: B_time(mode, tau)?,
    })
}

/// [q′(t), q(0)] = −i l_P² b(t).
pub fn velocity_commutator(mode: TrackingMode, tau: f64, planck_length: f64) -> Result<CommutatorResult> {
    Ok(CommutatorResult {
        magnitude: planck_length * planck_length,
        sign: ImaginarySign::Minus,
        shape: b_time(mode, tau)?,
    })
}

/// max over the grid of |(C[ω] − C[−ω]) − l_P² b[ωτ]/ω|.
pub fn commutator_spectrum_check<F>(
    spectrum: F,
    mode: TrackingMode,
    tau: f64,
    planck_length: f64,
    omegas: &[f64],
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_tau(tau)?;
    let lp2 = planck_length * planck_length;
    omegas.iter().try_fold(0.0f64, |worst, &w| {
        if w == 0.0 {
            return Err(Error::Singularity("commutator spectrum at ω = 0".into()));
        }
        let expected = lp2 * kernels::b_closed(mode, w * tau)? / w;
        let got = spectrum(w) - spectrum(-w);
        Ok(worst.max((got - expected).abs()))
    })
}
