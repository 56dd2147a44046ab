//! Time-domain kernels and the position commutator they define.

use quantum_limits::kernels::{self, TrackingMode};
use quantum_limits::timedomain::{b_time, gtf_fourier, integrate_b_to_B, position_commutator, B_time};

fn main() -> quantum_limits::Result<()> {
    let tau = 1.0;
    for mode in TrackingMode::ALL {
        let b = b_time(mode, tau)?;
        println!("{mode}: impulses {:?}", b.impulses());
        let big = B_time(mode, tau)?;
        let derived = integrate_b_to_B(&b);
        for t in [0.0, 0.5, 1.0, 1.999, 2.0, 3.0] {
            println!("  B({t:5.3}) = {:+.6}  (integrated {:+.6})", big.regular(t), derived.regular(t));
        }
        for w in [0.5, 5.0] {
            let ft = gtf_fourier(&b, w)?;
            println!("  FT b at w = {w}: {:.12} vs closed {:.12}", ft.re, kernels::b_closed(mode, w * tau)?);
        }
        let c = position_commutator(mode, tau, 1.0)?;
        println!("  [q(t), q(0)] at t = 0.5: {}", c.regular(0.5));
    }
    Ok(())
}
