//! Physical estimates derived from geometry and field: the secular dipolar
//! coupling, gradient-induced ESR shifts and ballistic transport time.
//!
//! All CODATA values live in [`PhysicalConstants::default`]; nothing else in
//! the crate hard-codes a physical constant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24; // J/T
const HBAR: f64 = 1.054_571_817e-34; // J s
const MU0_OVER_4PI: f64 = 1.0e-7; // T m / A
const G_FACTOR: f64 = 2.0023;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalConstants {
    pub g_factor: f64,
    /// J/T
    pub bohr_magneton: f64,
    /// J s
    pub hbar: f64,
    /// rad s^-1 T^-1; kept consistent with `g_factor * bohr_magneton / hbar`.
    pub gyromagnetic_ratio: f64,
    /// T m / A
    pub vacuum_permeability_over_4pi: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::with_g_factor(G_FACTOR)
    }
}

impl PhysicalConstants {
    pub fn with_g_factor(g_factor: f64) -> Self {
        Self {
            g_factor,
            bohr_magneton: BOHR_MAGNETON,
            hbar: HBAR,
            gyromagnetic_ratio: g_factor * BOHR_MAGNETON / HBAR,
            vacuum_permeability_over_4pi: MU0_OVER_4PI,
        }
    }

    /// Planck constant h = 2 pi hbar.
    pub fn planck(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    /// Zeeman frequency g mu_B B / h in MHz for a field in tesla.
    pub fn zeeman_mhz(&self, field_t: f64) -> f64 {
        self.g_factor * self.bohr_magneton * field_t / self.planck() * 1e-6
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g_factor", self.g_factor),
            ("bohr_magneton", self.bohr_magneton),
            ("hbar", self.hbar),
            ("gyromagnetic_ratio", self.gyromagnetic_ratio),
            ("vacuum_permeability_over_4pi", self.vacuum_permeability_over_4pi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid("constants", format!("{name} must be positive and finite, got {v}")));
            }
        }
        let implied = self.g_factor * self.bohr_magneton / self.hbar;
        if ((self.gyromagnetic_ratio - implied) / implied).abs() > 1e-6 {
            return Err(invalid(
                "constants.gyromagnetic_ratio",
                format!("{} disagrees with g*mu_B/hbar = {implied}", self.gyromagnetic_ratio),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Inter-spin distance in nm.
    pub r_nm: f64,
    /// Angle between the inter-spin vector and the field, radians.
    pub phi_rad: f64,
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_nm.is_finite() && self.r_nm > 0.0) {
            return Err(invalid("geometry.r_nm", "distance must be positive (dipolar coupling diverges at r = 0)"));
        }
        if !(0.0..=PI).contains(&self.phi_rad) {
            return Err(invalid("geometry.phi_rad", format!("{} is outside [0, pi]", self.phi_rad)));
        }
        Ok(())
    }
}

/// Secular dipolar coupling. Both the prefactor and the angular-dressed value
/// are returned since either may be quoted as "the" coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipolarCoupling {
    /// (mu0/4pi) hbar gamma^2 / r^3 as an ordinary frequency, MHz. Always positive.
    pub j0_mhz: f64,
    /// `j0 * (1 - 3 cos^2 phi)`, MHz.
    pub j_mhz: f64,
}

pub fn dipolar_j(geom: &Geometry, consts: &PhysicalConstants) -> Result<DipolarCoupling> {
    geom.validate()?;
    let r = geom.r_nm * 1e-9;
    // rad/s
    let j0_angular = consts.vacuum_permeability_over_4pi * consts.hbar * consts.gyromagnetic_ratio.powi(2) / r.powi(3);
    let j0_mhz = j0_angular / (2.0 * PI) * 1e-6;
    let c = geom.phi_rad.cos();
    Ok(DipolarCoupling {
        j0_mhz,
        j_mhz: j0_mhz * (1.0 - 3.0 * c * c),
    })
}

/// ESR frequency difference between two spins separated by `delta_z_nm`
/// along a field gradient, for the transition between `m_low` and `m_high`.
pub fn esr_shift(
    gradient_t_per_m: f64,
    delta_z_nm: f64,
    (m_low, m_high): (f64, f64),
    consts: &PhysicalConstants,
) -> Result<f64> {
    if !(delta_z_nm.is_finite() && delta_z_nm > 0.0) {
        return Err(invalid("delta_z_nm", format!("must be positive, got {delta_z_nm}")));
    }
    if !gradient_t_per_m.is_finite() {
        return Err(invalid("gradient_t_per_m", "must be finite"));
    }
    let delta_m = m_high - m_low;
    Ok(consts.zeeman_mhz(gradient_t_per_m * delta_z_nm * 1e-9) * delta_m)
}

/// Ballistic transport time in microseconds.
pub fn transport_time(length_um: f64, fermi_velocity_m_per_s: f64) -> Result<f64> {
    if !(length_um > 0.0) {
        return Err(invalid("length_um", format!("must be positive, got {length_um}")));
    }
    if !(fermi_velocity_m_per_s > 0.0) {
        return Err(invalid("fermi_velocity", format!("must be positive, got {fermi_velocity_m_per_s}")));
    }
    // um / (m/s) = 1e-6 s = 1 us
    Ok(length_um / fermi_velocity_m_per_s)
}
