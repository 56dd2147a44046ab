//! Synthesize a two-way GQL noise path in natural units, estimate its
//! spectrum and count the bins inside the 3σ band.

use quantum_limits::kernels::TrackingMode;
use quantum_limits::simulate::{estimate_psd, synthesize, SynthesisSpec, Target, Window};
use quantum_limits::units::PhysicalConstants;

fn main() -> quantum_limits::Result<()> {
    let spec = SynthesisSpec {
        target: Target::Gql { mode: TrackingMode::TwoWay, tau: 1.0, constants: PhysicalConstants::NATURAL },
        n_samples: 1 << 20,
        dt: 0.1,
        seed: 1,
        omega_min: 0.05,
    };
    let series = synthesize(&spec)?;
    println!("{} samples, variance {:.5}", series.len(), series.variance());

    let est = estimate_psd(&series, 4096, 0.5, Window::Hann)?;
    let (lo, hi) = est.band(3.0);
    println!("{} segments, {:.1} dof, band [{lo:.3}, {hi:.3}]", est.segments, est.dof);
    let mut inside = 0;
    let mut total = 0;
    for (i, (&w, &v)) in est.grid.omegas().iter().zip(est.grid.values()).enumerate() {
        if w < spec.omega_min {
            continue;
        }
        let t = spec.target.symmetrized(w)?;
        total += 1;
        if v >= lo * t && v <= hi * t {
            inside += 1;
        }
        if i % 256 == 0 {
            println!("  w = {w:7.3}: estimate {v:.4e} target {t:.4e}");
        }
    }
    println!("{inside}/{total} bins inside the 3σ band");
    Ok(())
}
