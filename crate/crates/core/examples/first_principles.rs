//! Length noise from curvature fluctuations, integrated over all wavevector
//! directions, against l_P² b(ωτ)/ω.

use std::time::Instant;

use quantum_limits::curvature::{riemann_mode_kernel, response_first_principles, FourVector, PathSpec};
use quantum_limits::kernels::{self, TrackingMode};

fn main() -> quantum_limits::Result<()> {
    let k = FourVector::null(1.0, [0.0, 0.0, 1.0])?;
    println!("R_0101 for k along z: {}", riemann_mode_kernel(&k)?.get(0, 1, 0, 1));

    let tau = 1.0;
    let start = Instant::now();
    for mode in TrackingMode::ALL {
        let path = PathSpec::new(mode, [1.0, 2.0, 2.0], tau)?;
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let oracle = kernels::b_closed(mode, x)? / x;
            let got = response_first_principles(&path, x / tau, 1e-10 * oracle)?;
            println!("{mode} wτ = {x:4}: {got:.12e}  ratio {:.12}", got / oracle);
        }
    }
    println!("{:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}
