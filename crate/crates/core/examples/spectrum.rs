//! Energy levels and transition table of one mobile/caged pair in the
//! default field gradient.

use peapod::spin_algebra::{basis_label, build_hamiltonian, transition_table};
use peapod::RunConfig;

pub fn run() -> peapod::Result<Vec<f64>> {
    let layout = RunConfig::default().pair_layout()?;
    let h = build_hamiltonian(&layout)?;
    let energies = h.diagonal().expect("secular Hamiltonian is diagonal").to_vec();
    for (i, e) in energies.iter().enumerate() {
        println!("{:>2} {:<12} {e:>14.4} MHz", i, basis_label(&layout.sites, i)?);
    }
    for t in transition_table(&h)? {
        println!(
            "{:<3} {}  {} -> {}  {:>12.4} MHz  x{}",
            t.site_label,
            t.control_label(),
            t.m_lower,
            t.m_upper,
            t.frequency_mhz,
            t.degeneracy
        );
    }
    Ok(energies)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
