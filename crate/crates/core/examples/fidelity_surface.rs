//! Bell fidelity against the two mobile-spin decay ratios K1, K2.

use peapod::decoherence::{fidelity_surface, write_surface_csv, SurfacePoint};

pub fn run() -> peapod::Result<Vec<SurfacePoint>> {
    let points = fidelity_surface(1.0, 50.0, 50)?;
    for p in points.iter().filter(|p| p.k1 == p.k2).step_by(7) {
        println!("K = {:>5.2}: F_psi {:.6}, F_phi {:.6}", p.k1, p.f_psi, p.f_phi);
    }
    let mut csv = Vec::new();
    write_surface_csv(&points, &mut csv)?;
    println!("{} bytes of CSV", csv.len());
    Ok(points)
}

#[allow(dead_code)]
fn main() -> peapod::Result<()> {
    run().map(|_| ())
}
