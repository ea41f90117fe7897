//! Dipolar coupling, gradient ESR shifts and transport time from geometry.

use peapod::commands::{physical_estimates, PhysicalEstimates};
use peapod::RunConfig;

pub fn run() -> peapod::Result<PhysicalEstimates> {
    let est = physical_estimates(&RunConfig::default())?;
    println!("J0 = {:.3} MHz, J = {:.3} MHz", est.dipolar.j0_mhz, est.dipolar.j_mhz);
    println!("{}", est.coupling_note);
    println!("ESR shift +-1/2: {:.3} MHz, +-3/2: {:.3} MHz", est.esr_shift_half_mhz, est.esr_shift_three_half_mhz);
    println!("transport over 1 um: {:.1e} us", est.transport_time_us);
    Ok(est)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
