//! Protocol duration against T1 and T2.

use peapod::protocol::{time_budget, BudgetReport, ProtocolTimeline};
use peapod::RunConfig;

pub fn run() -> peapod::Result<(BudgetReport, BudgetReport)> {
    let cfg = RunConfig::default();
    let default = time_budget(&cfg.timeline())?;
    println!(
        "default: {:.4} us, weighted {:.4} us, {:.2}% of the tightest budget: {}",
        default.total_us,
        default.weighted_total_us,
        100.0 * default.weighted_ratio,
        if default.pass { "pass" } else { "fail" }
    );
    let long = time_budget(&ProtocolTimeline::standard(cfg.gate_time(), 100, 0.0, 30.0, 20.0, 4.0))?;
    println!("100 gates: {:.2}% raw: {}", 100.0 * long.raw_ratio, if long.pass { "pass" } else { "fail" });
    Ok((default, long))
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
