//! No-jump relaxation of the mobile spins and its effect on the heralded
//! Bell states.
//!
//! Rates here are angular: `theta` and `rabi` in rad/us, `gamma1` in 1/us.
//! A mobile spin evolves under `H_D = theta sigma_z - i (gamma1 / 2) sigma+ sigma-`
//! where `sigma+ sigma-` projects onto `|up> = |-1/2>`. Evolution is not
//! renormalized; states are rescaled only when measured.
//!
//! Both mobile spins stay in superposition through the two sequential
//! conditional gates, so each one is exposed for `2 t_g`. With
//! `t_g = pi / rabi` that gives the surviving amplitude
//! `alpha = exp(-gamma1 t_g) = exp(-pi / K)`, `K = rabi / gamma1`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::protocol::{self, analyzer, BellLabel, MOBILE_UP};
use crate::state::{site_stride, NormTag, RegisterState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayModel {
    /// Level splitting plus coupling shift, rad/us.
    pub theta: f64,
    /// Relaxation rate of mobile spin A, 1/us.
    pub gamma1_a: f64,
    /// Relaxation rate of mobile spin B, 1/us.
    pub gamma1_b: f64,
    /// Rabi rate of the gate pulses, rad/us.
    pub rabi: f64,
}

impl DecayModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("decay.theta", self.theta),
            ("decay.gamma1_a", self.gamma1_a),
            ("decay.gamma1_b", self.gamma1_b),
            ("decay.rabi", self.rabi),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be a non-negative finite rate, got {v}")));
            }
        }
        Ok(())
    }

    /// Builds a model from the dimensionless ratios `K = rabi / gamma1`.
    /// `K = inf` means no decay.
    pub fn from_ratios(rabi: f64, theta: f64, k1: f64, k2: f64) -> Self {
        Self {
            theta,
            gamma1_a: rabi / k1,
            gamma1_b: rabi / k2,
            rabi,
        }
    }

    pub fn channel_a(&self) -> DecayChannel {
        DecayChannel {
            theta: self.theta,
            gamma1: self.gamma1_a,
        }
    }

    pub fn channel_b(&self) -> DecayChannel {
        DecayChannel {
            theta: self.theta,
            gamma1: self.gamma1_b,
        }
    }

    pub fn k1(&self) -> f64 {
        self.rabi / self.gamma1_a
    }

    pub fn k2(&self) -> f64 {
        self.rabi / self.gamma1_b
    }
}

/// Effective decay of a single mobile spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayChannel {
    pub theta: f64,
    pub gamma1: f64,
}

impl DecayChannel {
    /// `(up, down)` amplitude multipliers after time `t`.
    pub fn factors(&self, t: f64) -> (C64, C64) {
        let up = C64::from_polar((-0.5 * self.gamma1 * t).exp(), -self.theta * t);
        let down = C64::from_polar(1.0, self.theta * t);
        (up, down)
    }
}

/// No-jump evolution of one mobile spin for time `t` (us).
pub fn evolve_decay(state: &RegisterState, channel: &DecayChannel, t: f64) -> Result<RegisterState> {
    if state.dims() != [2] {
        return Err(Error::RegisterShape(format!(
            "expected a single two-level state, got dims {:?}",
            state.dims()
        )));
    }
    let mut out = state.clone();
    apply_decay_on_site(&mut out, 0, channel, t)?;
    Ok(out)
}

/// No-jump evolution of the mobile spin at `site` inside a larger register.
pub fn apply_decay_on_site(state: &mut RegisterState, site: usize, channel: &DecayChannel, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("evolution time must be non-negative, got {t}")));
    }
    let (stride, d) = site_stride(state.dims(), site)?;
    if d != 2 {
        return Err(Error::RegisterShape(format!("site {site} has {d} levels, decay acts on a two-level spin")));
    }
    let (up, down) = channel.factors(t);
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        *a *= if (i / stride) % 2 == MOBILE_UP { up } else { down };
    }
    if channel.gamma1 > 0.0 && t > 0.0 {
        state.set_norm_tag(NormTag::Unnormalized);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatingTime {
    /// `pi / rabi`, us.
    pub t_g: f64,
    /// `theta / (2 rabi)`.
    pub k: f64,
    /// `theta t_g mod 2 pi`, folded into `[0, 2 pi)`.
    pub residual_phase: f64,
    pub warning: Option<String>,
}

/// Gate time at which the `theta` dephasing of a mobile spin cancels.
pub fn gating_time(model: &DecayModel) -> Result<GatingTime> {
    if !(model.rabi > 0.0) {
        return Err(invalid("rabi", "gating time needs a positive Rabi rate"));
    }
    if !(model.theta > 0.0) {
        return Err(invalid("theta", "gating time needs a positive splitting"));
    }
    let k = model.theta / (2.0 * model.rabi);
    let t_g = 2.0 * k * PI / model.theta;
    let residual = (model.theta * t_g).rem_euclid(2.0 * PI);
    let warning = if (k - k.round()).abs() > 1e-9 {
        Some(format!(
            "k = {k} is not an integer; a residual phase of {residual:.6} rad survives the gate"
        ))
    } else {
        None
    };
    Ok(GatingTime {
        t_g,
        k,
        residual_phase: residual,
        warning,
    })
}

/// Relative phase `arg(up) - arg(down)` of a mobile spin after time `t`, in `(-pi, pi]`.
pub fn relative_phase(channel: &DecayChannel, t: f64) -> f64 {
    let (up, down) = channel.factors(t);
    (up * down.conj()).arg()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellFamily {
    /// `|Psi+->` of the caged pair.
    Psi,
    /// `|Phi+->` of the caged pair.
    Phi,
}

impl BellFamily {
    fn representative(self) -> BellLabel {
        match self {
            BellFamily::Psi => BellLabel::PsiPlus,
            BellFamily::Phi => BellLabel::PhiPlus,
        }
    }
}

fn alpha(k: f64) -> f64 {
    (-PI / k).exp()
}

/// Closed-form Bell fidelity at `t_g` for `K1 = rabi / gamma1_a`, `K2 = rabi / gamma1_b`.
pub fn bell_fidelity_closed_form(k1: f64, k2: f64, family: BellFamily) -> f64 {
    let (a, b) = (alpha(k1), alpha(k2));
    let num = match family {
        BellFamily::Psi => a + b,
        BellFamily::Phi => 1.0 + a * b,
    };
    num * num / ((1.0 + a * a) * (1.0 + b * b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub k1: f64,
    pub k2: f64,
    pub f_psi: f64,
    pub f_phi: f64,
}

/// Evenly spaced values from `lo` to `hi`, inclusive.
pub fn grid_axis(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    match resolution {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Closed-form fidelities over a `resolution x resolution` grid of `K1, K2`
/// in `[k_min, k_max]`, rows ordered by `K1` then `K2`.
pub fn fidelity_surface(k_min: f64, k_max: f64, resolution: usize) -> Result<Vec<SurfacePoint>> {
    if !(k_min > 0.0 && k_max >= k_min) {
        return Err(invalid("fidelity_map.k_range", format!("need 0 < k_min <= k_max, got [{k_min}, {k_max}]")));
    }
    if resolution == 0 {
        return Err(invalid("fidelity_map.resolution", "must be at least 1"));
    }
    let axis = grid_axis(k_min, k_max, resolution);
    let cells: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    Ok(cells
        .par_iter()
        .map(|&(k1, k2)| SurfacePoint {
            k1,
            k2,
            f_psi: bell_fidelity_closed_form(k1, k2, BellFamily::Psi),
            f_phi: bell_fidelity_closed_form(k1, k2, BellFamily::Phi),
        })
        .collect())
}

pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["K1", "K2", "F_psi", "F_phi"])?;
    for p in points {
        w.write_record([
            crate::fmt_sig12(p.k1),
            crate::fmt_sig12(p.k2),
            crate::fmt_sig12(p.f_psi),
            crate::fmt_sig12(p.f_phi),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Bell fidelity obtained by simulating the register: ideal conditional
/// gates, no-jump decay of both mobile spins over the gate window, then the
/// ideal analyzer projection.
pub fn fidelity_via_simulation(model: &DecayModel, family: BellFamily) -> Result<f64> {
    model.validate()?;
    let t_g = PI / model.rabi;
    let mut ideal = protocol::prepare_pairs();
    protocol::apply_ideal_gates(&mut ideal)?;
    let mut decayed = ideal.clone();
    decay_window(&mut decayed, model, 2.0 * t_g)?;
    analyzer::heralded_fidelity(&decayed, &ideal, family.representative())
}

/// Decay of both mobile spins of an `A, A', B, B'` register for `t` us.
pub fn decay_window(state: &mut RegisterState, model: &DecayModel, t: f64) -> Result<()> {
    apply_decay_on_site(state, protocol::SITE_A, &model.channel_a(), t)?;
    apply_decay_on_site(state, protocol::SITE_B, &model.channel_b(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plus() -> RegisterState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        RegisterState::from_amplitudes(
            vec![2],
            nalgebra::DVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]),
            NormTag::Unit,
        )
        .unwrap()
    }

    #[test]
    fn printed_time_evolution() {
        // up amplitude: (cos - i sin)(theta t) e^{-gamma t / 2}; down: (cos + i sin)(theta t)
        let ch = DecayChannel { theta: 3.1, gamma1: 0.7 };
        let t = 0.37;
        let out = evolve_decay(&plus(), &ch, t).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let up = C64::new((3.1 * t).cos(), -(3.1 * t).sin()) * (-0.35 * t).exp() * h;
        let down = C64::new((3.1 * t).cos(), (3.1 * t).sin()) * h;
        assert!((out.amplitudes()[MOBILE_UP] - up).norm() < 1e-15);
        assert!((out.amplitudes()[1 - MOBILE_UP] - down).norm() < 1e-15);
        assert_eq!(out.norm_tag(), NormTag::Unnormalized);
    }

    #[test]
    fn full_period_without_decay_returns() {
        let ch = DecayChannel { theta: 2.0, gamma1: 0.0 };
        let out = evolve_decay(&plus(), &ch, PI).unwrap();
        for (a, b) in out.amplitudes().iter().zip(plus().amplitudes().iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn amplitude_halves() {
        let ch = DecayChannel { theta: 0.0, gamma1: 1.3 };
        let out = evolve_decay(&plus(), &ch, 2.0 * 2f64.ln() / 1.3).unwrap();
        assert_relative_eq!(out.amplitudes()[MOBILE_UP].norm(), 0.5 * std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn negative_time_and_shape_rejected() {
        let ch = DecayChannel { theta: 1.0, gamma1: 1.0 };
        assert!(evolve_decay(&plus(), &ch, -1.0).is_err());
        let four = RegisterState::basis(vec![4], &[0]).unwrap();
        assert!(evolve_decay(&four, &ch, 1.0).is_err());
    }

    #[test]
    fn gating_time_values() {
        let g = gating_time(&DecayModel { theta: 50.0, gamma1_a: 0.0, gamma1_b: 0.0, rabi: 25.0 }).unwrap();
        assert_relative_eq!(g.t_g, PI / 25.0, epsilon = 1e-15);
        assert_relative_eq!(g.k, 1.0, epsilon = 1e-15);
        assert!(g.warning.is_none());
        assert!(g.residual_phase < 1e-12 || (2.0 * PI - g.residual_phase) < 1e-12);

        let g = gating_time(&DecayModel { theta: 75.0, gamma1_a: 0.0, gamma1_b: 0.0, rabi: 25.0 }).unwrap();
        assert_relative_eq!(g.k, 1.5, epsilon = 1e-15);
        assert!(g.warning.is_some());
        assert_relative_eq!(g.residual_phase, PI, epsilon = 1e-12);

        assert!(gating_time(&DecayModel { theta: 1.0, gamma1_a: 0.0, gamma1_b: 0.0, rabi: 0.0 }).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(bell_fidelity_closed_form(7.0, 7.0, BellFamily::Phi), 1.0);
        let a = (-PI / 10.0).exp();
        assert_relative_eq!(a, 0.730_402_691_048_645_6, epsilon = 1e-15);
        // frozen from an independent evaluation of 4 a^2 / (1 + a^2)^2
        assert_relative_eq!(bell_fidelity_closed_form(10.0, 10.0, BellFamily::Psi), 0.907_452_507_985_495_1, epsilon = 1e-14);
        let inf = f64::INFINITY;
        assert_eq!(bell_fidelity_closed_form(inf, inf, BellFamily::Psi), 1.0);
        assert_eq!(bell_fidelity_closed_form(inf, inf, BellFamily::Phi), 1.0);
    }

    #[test]
    fn surface_properties() {
        let s = fidelity_surface(1.0, 50.0, 50).unwrap();
        assert_eq!(s.len(), 2500);
        for p in &s {
            assert!((0.0..=1.0).contains(&p.f_psi) && (0.0..=1.0).contains(&p.f_phi));
            assert!(p.f_phi >= p.f_psi - 1e-15);
            if p.k1 == p.k2 {
                assert_eq!(p.f_phi, 1.0);
            }
        }
        let diag: Vec<f64> = s.iter().filter(|p| p.k1 == p.k2).map(|p| p.f_psi).collect();
        assert!(diag.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn surface_rejects_empty_range() {
        assert!(fidelity_surface(0.0, 1.0, 3).is_err());
        assert!(fidelity_surface(2.0, 1.0, 3).is_err());
        assert!(fidelity_surface(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn simulation_reproduces_closed_form() {
        for (k1, k2) in [(10.0, 10.0), (5.0, 50.0), (1.0, 3.0)] {
            let m = DecayModel::from_ratios(25.0, 50.0, k1, k2);
            for fam in [BellFamily::Psi, BellFamily::Phi] {
                let sim = fidelity_via_simulation(&m, fam).unwrap();
                assert_relative_eq!(sim, bell_fidelity_closed_form(k1, k2, fam), epsilon = 1e-12);
            }
        }
        let none = DecayModel { theta: 50.0, gamma1_a: 0.0, gamma1_b: 0.0, rabi: 25.0 };
        assert_relative_eq!(fidelity_via_simulation(&none, BellFamily::Psi).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dephasing_cancels_at_gate_time() {
        let m = DecayModel { theta: 100.0, gamma1_a: 0.3, gamma1_b: 0.3, rabi: 25.0 };
        let g = gating_time(&m).unwrap();
        assert!(relative_phase(&m.channel_a(), g.t_g).abs() < 1e-9);
    }
}
