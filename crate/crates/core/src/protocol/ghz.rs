//! One mobile spin flipping a chain of caged spins, followed by a Hadamard
//! and a z-basis readout of the mobile spin.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::analyzer::{MeasurementRecord, ZERO_PROBABILITY};
use super::{prepare_initial, STATIC_DOWN, STATIC_UP, TRIGGER_LEVEL};
use crate::error::{invalid, Error, Result};
use crate::pulse_engine::ConditionalFlip;
use crate::state::{NormTag, RegisterState};

pub const MAX_GHZ_STATIC: usize = 8;

/// Two outcome branches count as the same GHZ sign within this margin.
const SIGN_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HadamardConvention {
    /// `(sigma_x + sigma_z) / sqrt 2`.
    #[default]
    Standard,
    /// `(sigma_x + sigma_y) / sqrt 2`.
    XPlusY,
}

impl HadamardConvention {
    /// Matrix in the `(|+1/2>, |-1/2>)` level order.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            HadamardConvention::Standard => [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]],
            HadamardConvention::XPlusY => [[C64::new(0.0, 0.0), C64::new(h, -h)], [C64::new(h, h), C64::new(0.0, 0.0)]],
        }
    }
}

/// `(|down...down> + sign |up...up>) / sqrt 2` on `n` caged spins.
pub fn ghz_target(n: usize, plus: bool) -> Result<RegisterState> {
    let dims = vec![4; n];
    let mut s = RegisterState::basis(dims.clone(), &vec![STATIC_DOWN; n])?;
    let up = crate::state::basis_index(&dims, &vec![STATIC_UP; n])?;
    let a = s.amplitudes_mut();
    a.scale_mut(FRAC_1_SQRT_2);
    a[up] = C64::new(if plus { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 }, 0.0);
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzBranch {
    /// Mobile level read out: 0 reflected (down), 1 transmitted (up).
    pub mobile_level: usize,
    pub probability: f64,
    pub fidelity_plus: f64,
    pub fidelity_minus: f64,
    /// Charge-detector bit assigned to this branch.
    pub pe: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhzRun {
    pub record: MeasurementRecord,
    pub branches: Vec<GhzBranch>,
    pub mobile_level: usize,
    /// Renormalized caged register.
    pub static_state: RegisterState,
    /// Fidelity against the GHZ state named by the record.
    pub fidelity: f64,
}

fn static_branch(state: &RegisterState, level: usize) -> Result<RegisterState> {
    let stride = state.dim() / 2;
    let amps = DVector::from_iterator(stride, state.amplitudes().iter().skip(level * stride).take(stride).copied());
    RegisterState::from_amplitudes(state.dims()[1..].to_vec(), amps, NormTag::Unnormalized)
}

/// Runs the chain on `n` caged spins. `forced_pe` selects the outcome;
/// otherwise it is drawn from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn run_ghz(n: usize, forced_pe: Option<u8>, seed: u64, convention: HadamardConvention) -> Result<GhzRun> {
    if !(1..=MAX_GHZ_STATIC).contains(&n) {
        return Err(invalid("n", format!("caged spin count must be in 1..={MAX_GHZ_STATIC}, got {n}")));
    }
    if let Some(pe) = forced_pe {
        if pe > 1 {
            return Err(invalid("force_pe", format!("must be 0 or 1, got {pe}")));
        }
    }
    let mut state = prepare_initial(n)?;
    let dims = state.dims().to_vec();
    for target in 1..=n {
        ConditionalFlip::new(dims.clone(), 0, target, TRIGGER_LEVEL)?.apply(&mut state)?;
    }
    let h = convention.matrix();
    let half = state.dim() / 2;
    let amps = state.amplitudes_mut();
    for i in 0..half {
        let (x0, x1) = (amps[i], amps[i + half]);
        amps[i] = h[0][0] * x0 + h[0][1] * x1;
        amps[i + half] = h[1][0] * x0 + h[1][1] * x1;
    }
    state.check_norm()?;

    let plus = ghz_target(n, true)?;
    let minus = ghz_target(n, false)?;
    let mut branches = Vec::with_capacity(2);
    let mut normalized = Vec::with_capacity(2);
    for level in 0..2 {
        let b = static_branch(&state, level)?;
        let p = b.norm_sqr();
        let (fp, fm, s) = if p > ZERO_PROBABILITY {
            let s = b.normalized()?;
            (s.fidelity(&plus)?, s.fidelity(&minus)?, Some(s))
        } else {
            (0.0, 0.0, None)
        };
        // sign read from the branch; undecided branches fall back to the level
        let pe = if fp > fm + SIGN_TIE {
            0
        } else if fm > fp + SIGN_TIE {
            1
        } else {
            level as u8
        };
        branches.push(GhzBranch {
            mobile_level: level,
            probability: p,
            fidelity_plus: fp,
            fidelity_minus: fm,
            pe,
        });
        normalized.push(s);
    }

    let level = match forced_pe {
        Some(pe) => branches
            .iter()
            .find(|b| b.pe == pe && b.probability > ZERO_PROBABILITY)
            .map(|b| b.mobile_level)
            .ok_or(Error::ZeroProbabilityOutcome {
                outcome: format!("P_e = {pe}"),
                probability: 0.0,
            })?,
        None => {
            let u: f64 = ChaCha8Rng::seed_from_u64(seed).random();
            if u < branches[0].probability && branches[0].probability > ZERO_PROBABILITY {
                0
            } else {
                1
            }
        }
    };
    let chosen = &branches[level];
    let static_state = normalized[level].clone().ok_or(Error::ZeroProbabilityOutcome {
        outcome: format!("mobile level {level}"),
        probability: chosen.probability,
    })?;
    let (label, fidelity) = if chosen.pe == 0 { ("GHZ+", chosen.fidelity_plus) } else { ("GHZ-", chosen.fidelity_minus) };
    Ok(GhzRun {
        record: MeasurementRecord {
            p1: None,
            p2: None,
            pe: Some(chosen.pe),
            outcome_label: label.into(),
            probability: chosen.probability,
            forced: forced_pe.is_some(),
        },
        branches: branches.clone(),
        mobile_level: level,
        static_state,
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_spin_plus_branch() {
        let r = run_ghz(2, Some(0), 0, HadamardConvention::Standard).unwrap();
        assert_eq!(r.record.outcome_label, "GHZ+");
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        let a = r.static_state.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-12 && (a[15].re - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn all_sizes_both_signs() {
        for n in 1..=MAX_GHZ_STATIC {
            let p = run_ghz(n, Some(0), 0, HadamardConvention::Standard).unwrap();
            let m = run_ghz(n, Some(1), 0, HadamardConvention::Standard).unwrap();
            assert!((p.fidelity - 1.0).abs() < 1e-10 && (m.fidelity - 1.0).abs() < 1e-10);
            assert!((p.record.probability - 0.5).abs() < 1e-12);
            assert!(p.static_state.inner(&m.static_state).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn xy_hadamard_loses_sign() {
        let r = run_ghz(3, Some(0), 0, HadamardConvention::XPlusY).unwrap();
        assert!((r.branches[0].fidelity_plus - 0.5).abs() < 1e-12);
        assert!((r.branches[0].fidelity_minus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn range_checked() {
        assert!(run_ghz(0, None, 0, HadamardConvention::Standard).is_err());
        assert!(run_ghz(9, None, 0, HadamardConvention::Standard).is_err());
        assert!(run_ghz(2, Some(2), 0, HadamardConvention::Standard).is_err());
    }

    #[test]
    fn seeded_outcomes_repeat() {
        for seed in 0..10 {
            let a = run_ghz(4, None, seed, HadamardConvention::Standard).unwrap();
            let b = run_ghz(4, None, seed, HadamardConvention::Standard).unwrap();
            assert_eq!(a.record, b.record);
        }
    }
}
