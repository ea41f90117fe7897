//! Unwanted flip of the caged spin on the non-trigger branch.

use peapod::pulse_engine::{low_drive_slope, selectivity_scan};

pub fn run() -> peapod::Result<f64> {
    let rabis = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0];
    let points = selectivity_scan(50.0, &rabis)?;
    for p in &points {
        println!("rabi {:>5}: peak {:.3e}, end of pulse {:.3e}", p.rabi, p.peak_leakage, p.final_leakage);
    }
    let slope = low_drive_slope(&points).expect("two points");
    println!("log-log slope at weak drive: {slope:.4}");
    Ok(slope)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
