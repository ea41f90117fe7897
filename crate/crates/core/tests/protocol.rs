use peapod::protocol::{analyzer_measure, entangled_pairs_state, run_bell_protocol, BellLabel};
use peapod::RunConfig;

#[test]
fn seeded_histogram_is_uniform() {
    let s = entangled_pairs_state();
    let mut counts = [0usize; 4];
    let n = 10_000;
    for seed in 0..n as u64 {
        let r = analyzer_measure(&s, None, seed).unwrap();
        counts[BellLabel::ALL.iter().position(|&l| l == r.label).unwrap()] += 1;
    }
    // 3 sigma of a multinomial cell with p = 1/4
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        assert!((c as f64 - 0.25 * n as f64).abs() <= 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn ideal_forced_phi_plus_is_exact() {
    let t = run_bell_protocol(&RunConfig::default(), 0, Some(BellLabel::PhiPlus)).unwrap();
    assert_eq!(t.record.outcome_label, "Φ+");
    assert_eq!((t.record.p1, t.record.p2), (Some(1), Some(1)));
    assert!((t.fidelity - 1.0).abs() < 1e-12);
    assert!((t.conditional_fidelity - 1.0).abs() < 1e-12);
}

#[test]
fn decayed_psi_branch_matches_closed_form() {
    let mut cfg = RunConfig::default();
    cfg.decay.enabled = true;
    let t = run_bell_protocol(&cfg, 0, Some(BellLabel::PsiPlus)).unwrap();
    assert!((t.fidelity - 0.907_452_507_985_495_1).abs() < 1e-6, "{}", t.fidelity);
    let t = run_bell_protocol(&cfg, 0, Some(BellLabel::PhiMinus)).unwrap();
    assert!((t.fidelity - 1.0).abs() < 1e-12);
    assert!(t.stages.iter().any(|s| s.name == "gate_decay" && s.norm < 1.0));
}

#[test]
fn pulsed_protocol_stays_close_to_ideal() {
    let mut cfg = RunConfig::default();
    cfg.protocol.pulsed_gates = true;
    let t = run_bell_protocol(&cfg, 3, None).unwrap();
    let gates = t.stages.iter().find(|s| s.name == "gates").unwrap();
    // rabi 25 against a 2J = 100 MHz detuning leaves percent-level leakage
    assert!(gates.fidelity.unwrap() > 0.95, "{:?}", gates);
    assert!(t.fidelity > 0.95);
}

#[test]
fn traces_repeat_byte_for_byte() {
    let mut cfg = RunConfig::default();
    cfg.decay.enabled = true;
    let a = serde_json::to_string(&run_bell_protocol(&cfg, 11, None).unwrap()).unwrap();
    let b = serde_json::to_string(&run_bell_protocol(&cfg, 11, None).unwrap()).unwrap();
    assert_eq!(a, b);
}
