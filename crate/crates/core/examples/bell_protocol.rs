//! Two-pair Bell protocol with and without mobile-spin decay.

use peapod::protocol::{run_bell_protocol, BellLabel, BellTrace};
use peapod::RunConfig;

pub fn run() -> peapod::Result<Vec<BellTrace>> {
    let mut cfg = RunConfig::default();
    let mut traces = Vec::new();
    for label in BellLabel::ALL {
        let t = run_bell_protocol(&cfg, 0, Some(label))?;
        let (p1, p2) = label.bits();
        println!("P1={p1} P2={p2}: {} with probability {:.3}, fidelity {:.6}", t.record.outcome_label, t.record.probability, t.fidelity);
        traces.push(t);
    }
    cfg.decay.enabled = true;
    let t = run_bell_protocol(&cfg, 0, Some(BellLabel::PsiPlus))?;
    println!("with K1 = K2 = 10, {}: fidelity {:.6}", t.record.outcome_label, t.fidelity);
    traces.push(t);
    Ok(traces)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
