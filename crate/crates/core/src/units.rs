//! Physical constants, Planck units and the SI / natural unit switch.
//!
//! Nothing in the computation paths hard-codes a constant: every routine
//! that needs ħ, c or G receives a [`PhysicalConstants`] value. Spectral
//! kernels work in natural units and the SI factors are applied at the
//! API boundary.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The three constants that fix every derived scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Newton's constant, m³ kg⁻¹ s⁻².
    #[serde(rename = "G")]
    pub g: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
        g: 6.674_30e-11,
    };

    /// ħ = c = G = 1.
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        hbar: 1.0,
        c: 1.0,
        g: 1.0,
    };

    pub fn new(hbar: f64, c: f64, g: f64) -> Result<Self> {
        let k = PhysicalConstants { hbar, c, g };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("c", self.c), ("G", self.g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn for_system(system: UnitSystem) -> Self {
        match system {
            UnitSystem::Si => Self::CODATA_2018,
            UnitSystem::Natural => Self::NATURAL,
        }
    }

    pub fn planck(&self) -> Result<PlanckUnits> {
        derive_planck_units(self)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Planck mass, length, time and angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanckUnits {
    pub mass_p: f64,
    pub length_p: f64,
    pub time_p: f64,
    pub freq_p: f64,
}

/// Which unit system a quantity is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitSystem {
    #[serde(rename = "SI")]
    Si,
    #[serde(rename = "natural")]
    Natural,
}

impl UnitSystem {
    pub fn label(self) -> &'static str {
        match self {
            UnitSystem::Si => "SI",
            UnitSystem::Natural => "natural",
        }
    }
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Physical dimension of a quantity, as powers of mass, length and time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimension {
    pub mass: i32,
    pub length: i32,
    pub time: i32,
}

impl Dimension {
    pub const MASS: Dimension = Dimension::new(1, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1);
    pub const ANGULAR_FREQUENCY: Dimension = Dimension::new(0, 0, -1);
    /// m²·s, the dimension of a length noise spectrum.
    pub const LENGTH_SPECTRUM: Dimension = Dimension::new(0, 2, 1);

    pub const fn new(mass: i32, length: i32, time: i32) -> Self {
        Dimension { mass, length, time }
    }
}

/// Planck-unit scale of a dimension: the SI value of one natural unit.
pub fn planck_scale(dim: Dimension, planck: &PlanckUnits) -> f64 {
    planck.mass_p.powi(dim.mass) * planck.length_p.powi(dim.length) * planck.time_p.powi(dim.time)
}

/// Express an SI quantity in Planck units (ħ = c = G = 1).
pub fn si_to_natural(value: f64, dim: Dimension, planck: &PlanckUnits) -> f64 {
    value / planck_scale(dim, planck)
}

/// Inverse of [`si_to_natural`].
pub fn natural_to_si(value: f64, dim: Dimension, planck: &PlanckUnits) -> f64 {
    value * planck_scale(dim, planck)
}

/// m_P = √(ħc/G), l_P = √(ħG/c³), t_P = l_P/c, ω_P = 1/t_P.
pub fn derive_planck_units(constants: &PhysicalConstants) -> Result<PlanckUnits> {
    constants.validate()?;
    let PhysicalConstants { hbar, c, g } = *constants;
    let mass_p = (hbar * c / g).sqrt();
    let length_p = (hbar * g / (c * c * c)).sqrt();
    let time_p = length_p / c;
    Ok(PlanckUnits {
        mass_p,
        length_p,
        time_p,
        freq_p: 1.0 / time_p,
    })
}

/// Reduced Compton wavelength λ_C = ħ/(mc).
pub fn compton_wavelength(mass: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(domain(format!("mass must be positive, got {mass}")));
    }
    constants.validate()?;
    Ok(constants.hbar / (mass * constants.c))
}
