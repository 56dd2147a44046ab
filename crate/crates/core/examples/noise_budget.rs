//! SQL, VQL and GQL side by side for a light and a heavy end mass.

use quantum_limits::kernels::{self, TrackingMode};
use quantum_limits::limits::{noise_budget, Bandwidth, KernelView, MeasurementConfig, MirrorResponse};
use quantum_limits::units::PhysicalConstants;

fn main() -> quantum_limits::Result<()> {
    let k = PhysicalConstants::CODATA_2018;
    let omegas = kernels::grid(1e2, 1e6, 5, true)?;
    for mass in [1e-9, 1e-6, 40.0] {
        let cfg = MeasurementConfig {
            mass,
            tau: 1.334e-5,
            phi: MirrorResponse::Constant(1.0),
            mode: TrackingMode::TwoWay,
            bandwidth: Bandwidth { omega_center: 1e3, delta_omega: 1e2 },
        };
        println!("m = {mass:e} kg");
        for view in [KernelView::Instantaneous, KernelView::Envelope] {
            let budget = noise_budget(&cfg, &omegas, &k, view)?;
            for r in &budget.rows {
                println!(
                    "  {view:?} w = {:9.3e}: SQL {:9.3e} VQL {:9.3e} GQL {:9.3e} -> {} ({} of the fundamental two)",
                    r.omega, r.sql, r.vql, r.gql, r.dominant, r.fundamental
                );
            }
        }
    }
    Ok(())
}
