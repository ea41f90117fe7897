//! Resonant flip pulse on the caged spin against the ideal conditional flip.

use peapod::pulse_engine::{conditional_flip_pulse, ideal_cnot, rwa_propagator, subspace_process_fidelity, ProcessFidelity};
use peapod::spin_algebra::{build_hamiltonian, RegisterLayout};
use peapod::RunConfig;

pub fn run() -> peapod::Result<Vec<(f64, ProcessFidelity)>> {
    let w = RunConfig::default().pair_layout()?.omegas();
    let layout = RegisterLayout::pair(w[0], w[1], 50.0);
    let h0 = build_hamiltonian(&layout)?;
    let ideal = ideal_cnot(&layout, "A", "A'", 0)?;
    let mut out = Vec::new();
    for rabi in [0.1, 1.0, 5.0, 25.0] {
        let pulse = conditional_flip_pulse(&h0, "A", "A'", 0, rabi)?;
        let f = subspace_process_fidelity(&rwa_propagator(&h0, &pulse)?, &ideal, &[0, 3, 4, 7]);
        println!("rabi {rabi:>5} rad/us, t = {:.4} us: fidelity {:.9}, leakage {:.2e}", pulse.duration_us, f.phase_corrected, f.leakage);
        out.push((rabi, f));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
