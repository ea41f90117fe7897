//! GHZ states on chains of up to eight caged spins.

use peapod::protocol::{run_ghz, HadamardConvention, MAX_GHZ_STATIC};

pub fn run() -> peapod::Result<Vec<f64>> {
    let mut fidelities = Vec::new();
    for n in 1..=MAX_GHZ_STATIC {
        for pe in [0, 1] {
            let r = run_ghz(n, Some(pe), 0, HadamardConvention::Standard)?;
            println!("n={n} P_e={pe}: {} fidelity {:.12}", r.record.outcome_label, r.fidelity);
            fidelities.push(r.fidelity);
        }
    }
    Ok(fidelities)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
