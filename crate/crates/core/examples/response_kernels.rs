//! The response kernels b(x): closed form, series, quadrature, limits.

use quantum_limits::kernels::{self, ResponseKernel, Strategy, TrackingMode};

fn main() -> quantum_limits::Result<()> {
    println!("{:>8} {:>14} {:>14} {:>10}", "x", "b1", "b2", "|b1-quad|");
    for x in kernels::grid(0.01, 100.0, 9, true)? {
        let b1 = kernels::b_closed(TrackingMode::OneWay, x)?;
        let b2 = kernels::b_closed(TrackingMode::TwoWay, x)?;
        let q = kernels::b_angular_oracle(TrackingMode::OneWay, x, 1e-13)?;
        println!("{x:>8.3} {b1:>14.8e} {b2:>14.8e} {:>10.1e}", (b1 - q).abs());
    }

    let series = ResponseKernel::new(TrackingMode::OneWay, Strategy::Series(8))?;
    println!("\nseries at x = 0.3: {:.15}", series.eval(0.3)?);
    println!("closed at x = 0.3: {:.15}", kernels::b_closed(TrackingMode::OneWay, 0.3)?);
    println!("b/x² at 1e-3 -> {:.9} (8/15 = {:.9})", kernels::b_closed(TrackingMode::TwoWay, 1e-3)? / 1e-6, 8.0 / 15.0);

    for mode in TrackingMode::ALL {
        println!(
            "{mode}: period average at x = 1000 is {:.5}, high-frequency value {:.5}",
            kernels::b_period_average(mode, 1e3)?,
            kernels::b_high_freq(mode)
        );
    }
    Ok(())
}
