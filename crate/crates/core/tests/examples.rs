#[path = "../examples/spectrum.rs"]
mod spectrum;
#[path = "../examples/physical_estimates.rs"]
mod physical_estimates;
#[path = "../examples/conditional_gate.rs"]
mod conditional_gate;
#[path = "../examples/selectivity.rs"]
mod selectivity;
#[path = "../examples/bell_protocol.rs"]
mod bell_protocol;
#[path = "../examples/ghz_chain.rs"]
mod ghz_chain;
#[path = "../examples/fidelity_surface.rs"]
mod fidelity_surface;
#[path = "../examples/time_budget.rs"]
mod time_budget;

#[test]
fn spectrum_example() {
    assert_eq!(spectrum::run().unwrap().len(), 8);
}

#[test]
fn physical_estimates_example() {
    let e = physical_estimates::run().unwrap();
    assert!(e.dipolar.j0_mhz > 25.0 && e.dipolar.j0_mhz < 100.0);
}

#[test]
fn conditional_gate_example() {
    let f = conditional_gate::run().unwrap();
    assert!(f[0].1.phase_corrected > 1.0 - 1e-6);
    assert!(f.windows(2).all(|w| w[1].1.phase_corrected <= w[0].1.phase_corrected + 1e-12));
}

#[test]
fn selectivity_example() {
    let s = selectivity::run().unwrap();
    assert!((1.8..=2.2).contains(&s));
}

#[test]
fn bell_protocol_example() {
    let t = bell_protocol::run().unwrap();
    assert!(t[..4].iter().all(|t| (t.fidelity - 1.0).abs() < 1e-12));
    assert!(t[4].fidelity < 1.0);
}

#[test]
fn ghz_chain_example() {
    assert!(ghz_chain::run().unwrap().iter().all(|f| (f - 1.0).abs() < 1e-10));
}

#[test]
fn fidelity_surface_example() {
    assert_eq!(fidelity_surface::run().unwrap().len(), 2500);
}

#[test]
fn time_budget_example() {
    let (a, b) = time_budget::run().unwrap();
    assert!(a.pass && !b.pass);
}
