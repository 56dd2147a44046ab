//! Planck scales for CODATA constants and a round trip through natural units.

use quantum_limits::units::{
    compton_wavelength, derive_planck_units, natural_to_si, si_to_natural, Dimension, PhysicalConstants,
};

fn main() -> quantum_limits::Result<()> {
    let k = PhysicalConstants::CODATA_2018;
    let p = derive_planck_units(&k)?;
    println!("m_P = {:.6e} kg", p.mass_p);
    println!("l_P = {:.6e} m", p.length_p);
    println!("t_P = {:.6e} s", p.time_p);
    println!("w_P = {:.6e} rad/s", p.freq_p);

    // a 40 kg test mass
    let m = 40.0;
    let lambda = compton_wavelength(m, &k)?;
    println!("Compton wavelength of {m} kg: {lambda:.3e} m ({:.3e} l_P)", lambda / p.length_p);

    let arm = 4.0e3;
    let n = si_to_natural(arm, Dimension::LENGTH, &p);
    println!("4 km = {n:.4e} l_P -> back to {:.1} m", natural_to_si(n, Dimension::LENGTH, &p));
    Ok(())
}
