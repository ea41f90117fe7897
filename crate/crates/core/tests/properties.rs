use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use peapod::decoherence::{bell_fidelity_closed_form, evolve_decay, BellFamily, DecayChannel};
use peapod::protocol::{ghz::ghz_target, run_ghz, HadamardConvention};
use peapod::pulse_engine::{rwa_propagator, PulseSpec};
use peapod::spin_algebra::{build_hamiltonian, spectrum, RegisterLayout};
use peapod::{NormTag, RegisterState};
use proptest::prelude::*;

/// Listed eigenenergies of the mobile/caged pair in basis order.
fn closed_form(w1: f64, w2: f64, j: f64) -> [f64; 8] {
    [
        2.0 * w1 + 3.0 * w2 + 1.5 * j,
        2.0 * w1 + w2 + 0.5 * j,
        2.0 * w1 - w2 - 0.5 * j,
        2.0 * w1 - 3.0 * w2 - 1.5 * j,
        -2.0 * w1 + 3.0 * w2 - 1.5 * j,
        -2.0 * w1 + w2 - 0.5 * j,
        -2.0 * w1 - w2 + 0.5 * j,
        -2.0 * w1 - 3.0 * w2 + 1.5 * j,
    ]
}

proptest! {
    #[test]
    fn pair_diagonal_matches_listed_energies(w1 in -5e3f64..5e3, w2 in -5e3f64..5e3, j in -500.0f64..500.0) {
        let h = build_hamiltonian(&RegisterLayout::pair(w1, w2, j)).unwrap();
        let d = h.diagonal().unwrap();
        for (a, b) in d.iter().zip(closed_form(w1, w2, j)) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        prop_assert!(h.hermitian_deviation() == 0.0);
        let tr: f64 = closed_form(w1, w2, j).iter().sum();
        prop_assert!((h.trace().re - tr).abs() <= 1e-9 * (w1.abs() + w2.abs() + j.abs() + 1.0));
        let mut sorted = closed_form(w1, w2, j).to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in spectrum(&h).unwrap().iter().zip(&sorted) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn rwa_propagator_is_unitary(rabi in 0.5f64..60.0, det in -200.0f64..200.0, phase in 0.0f64..(2.0 * PI), t in 0.0f64..0.5) {
        let h0 = build_hamiltonian(&RegisterLayout::pair(1000.0, 2000.0, 50.0)).unwrap();
        let pulse = PulseSpec { target: "A'".into(), carrier_mhz: 4050.0 + det, rabi, phase, duration_us: t };
        let u = rwa_propagator(&h0, &pulse).unwrap();
        prop_assert!(u.unitarity_deviation() < 1e-9);
    }

    #[test]
    fn decay_never_gains_norm(theta in 0.0f64..100.0, gamma in 0.0f64..10.0, t1 in 0.0f64..2.0, dt in 0.0f64..2.0, x in 0.0f64..1.0) {
        let amps = nalgebra::DVector::from_vec(vec![C64::new(x.sqrt(), 0.0), C64::new((1.0 - x).sqrt(), 0.0)]);
        let s = RegisterState::from_amplitudes(vec![2], amps, NormTag::Unit).unwrap();
        let ch = DecayChannel { theta, gamma1: gamma };
        let a = evolve_decay(&s, &ch, t1).unwrap();
        let b = evolve_decay(&s, &ch, t1 + dt).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-15);
        prop_assert!(b.norm() <= a.norm() + 1e-15);
        prop_assert!(b.check_norm().is_ok());
    }

    #[test]
    fn fidelity_surface_symmetric_and_bounded(k1 in 0.5f64..200.0, k2 in 0.5f64..200.0) {
        for fam in [BellFamily::Psi, BellFamily::Phi] {
            let f = bell_fidelity_closed_form(k1, k2, fam);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&f));
            prop_assert!((f - bell_fidelity_closed_form(k2, k1, fam)).abs() < 1e-15);
        }
        prop_assert!(bell_fidelity_closed_form(k1, k2, BellFamily::Phi) >= bell_fidelity_closed_form(k1, k2, BellFamily::Psi) - 1e-15);
    }

    #[test]
    fn ghz_outcomes_orthogonal(n in 1usize..=6, seed in any::<u64>()) {
        let r = run_ghz(n, None, seed, HadamardConvention::Standard).unwrap();
        let plus = r.record.pe == Some(0);
        prop_assert!((r.static_state.fidelity(&ghz_target(n, plus).unwrap()).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(r.static_state.fidelity(&ghz_target(n, !plus).unwrap()).unwrap() < 1e-10);
    }
}
