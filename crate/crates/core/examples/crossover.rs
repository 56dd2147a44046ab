//! Crossover mass m* = m_P·sqrt(Φ/(3πb)) over a range of Φ and b.

use quantum_limits::limits::crossover_mass;
use quantum_limits::units::PhysicalConstants;

fn main() -> quantum_limits::Result<()> {
    let k = PhysicalConstants::CODATA_2018;
    let mp = k.planck()?.mass_p;
    println!("{:>6} {:>6} {:>12} {:>10}", "phi", "b", "m* (kg)", "m*/m_P");
    for phi in [0.1, 1.0, 10.0] {
        for b in [0.1, 1.0, 8.0 / 3.0, 10.0] {
            let m = crossover_mass(phi, b, &k)?;
            println!("{phi:>6} {b:>6.3} {m:>12.4e} {:>10.4}", m / mp);
        }
    }
    Ok(())
}
