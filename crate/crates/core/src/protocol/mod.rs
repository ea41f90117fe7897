//! End-to-end entanglement protocols on mobile/caged spin pairs.
//!
//! Level conventions used throughout: a mobile spin has `|down> = |+1/2>`
//! at level 0 and `|up> = |-1/2>` at level 1; a caged spin has
//! `|down> = |+3/2>` at level 0 and `|up> = |-3/2>` at level 3. The
//! conditional flip fires when the mobile spin is `|down>`.

pub mod analyzer;
pub mod budget;
pub mod ghz;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::decoherence::{self, DecayModel};
use crate::error::{invalid, Error, Result};
use crate::pulse_engine::{conditional_flip_pulse, propagate_rwa, ConditionalFlip};
use crate::spin_algebra::{build_hamiltonian, RegisterLayout};
use crate::state::{NormTag, RegisterState, StateRecord};

pub use analyzer::{analyzer_measure, AnalyzerResult, MeasurementRecord};
pub use budget::{time_budget, BudgetReport, ProtocolTimeline, TimelineEvent};
pub use ghz::{run_ghz, GhzRun, HadamardConvention, MAX_GHZ_STATIC};

pub const MOBILE_DOWN: usize = 0;
pub const MOBILE_UP: usize = 1;
pub const STATIC_DOWN: usize = 0;
pub const STATIC_UP: usize = 3;
/// Mobile level on which the conditional flip acts.
pub const TRIGGER_LEVEL: usize = MOBILE_DOWN;

pub const SITE_A: usize = 0;
pub const SITE_A_PRIME: usize = 1;
pub const SITE_B: usize = 2;
pub const SITE_B_PRIME: usize = 3;
pub const PAIRS_DIMS: [usize; 4] = [2, 4, 2, 4];

/// The four Bell states, labelled the same way for mobile and caged pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "Ψ+")]
    PsiPlus,
    #[serde(rename = "Ψ-")]
    PsiMinus,
    #[serde(rename = "Φ+")]
    PhiPlus,
    #[serde(rename = "Φ-")]
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PsiPlus, BellLabel::PsiMinus, BellLabel::PhiPlus, BellLabel::PhiMinus];

    /// Encoder bits `(P1, P2)`: `P1 = 0` for Psi, `P2 = 1` for the `+` sign.
    pub fn bits(self) -> (u8, u8) {
        match self {
            BellLabel::PsiPlus => (0, 1),
            BellLabel::PsiMinus => (0, 0),
            BellLabel::PhiPlus => (1, 1),
            BellLabel::PhiMinus => (1, 0),
        }
    }

    pub fn from_bits(p1: u8, p2: u8) -> Result<Self> {
        match (p1, p2) {
            (0, 1) => Ok(BellLabel::PsiPlus),
            (0, 0) => Ok(BellLabel::PsiMinus),
            (1, 1) => Ok(BellLabel::PhiPlus),
            (1, 0) => Ok(BellLabel::PhiMinus),
            _ => Err(invalid("outcome", format!("encoder bits must be 0 or 1, got ({p1}, {p2})"))),
        }
    }

    /// `(first, second, sign)`: the state is `(|first> + sign |second>) / sqrt 2`
    /// with `first`/`second` given as `(is_up, is_up)` pairs.
    fn terms(self) -> ((bool, bool), (bool, bool), f64) {
        match self {
            BellLabel::PsiPlus => ((true, false), (false, true), 1.0),
            BellLabel::PsiMinus => ((true, false), (false, true), -1.0),
            BellLabel::PhiPlus => ((true, true), (false, false), 1.0),
            BellLabel::PhiMinus => ((true, true), (false, false), -1.0),
        }
    }

    /// Amplitudes of the mobile pair `A, B` in the Bell basis, indexed `[a][b]`.
    pub fn mobile_amplitudes(self) -> [[f64; 2]; 2] {
        let lvl = |up: bool| if up { MOBILE_UP } else { MOBILE_DOWN };
        let ((a1, b1), (a2, b2), sign) = self.terms();
        let mut m = [[0.0; 2]; 2];
        m[lvl(a1)][lvl(b1)] += FRAC_1_SQRT_2;
        m[lvl(a2)][lvl(b2)] += sign * FRAC_1_SQRT_2;
        m
    }

    /// Caged pair heralded by this mobile outcome: up and down are exchanged
    /// by the gates, so `up` on a mobile spin pairs with `down` on its cage.
    pub fn static_target(self) -> RegisterState {
        let lvl = |up: bool| if up { STATIC_DOWN } else { STATIC_UP };
        let ((a1, b1), (a2, b2), sign) = self.terms();
        let mut amps = DVector::zeros(16);
        amps[lvl(a1) * 4 + lvl(b1)] += C64::new(FRAC_1_SQRT_2, 0.0);
        amps[lvl(a2) * 4 + lvl(b2)] += C64::new(sign * FRAC_1_SQRT_2, 0.0);
        RegisterState::from_amplitudes(vec![4, 4], amps, NormTag::Unit).expect("fixed shape")
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PsiPlus => "Ψ+",
            BellLabel::PsiMinus => "Ψ-",
            BellLabel::PhiPlus => "Φ+",
            BellLabel::PhiMinus => "Φ-",
        })
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "psi+" | "ψ+" => Ok(BellLabel::PsiPlus),
            "psi-" | "ψ-" => Ok(BellLabel::PsiMinus),
            "phi+" | "φ+" => Ok(BellLabel::PhiPlus),
            "phi-" | "φ-" => Ok(BellLabel::PhiMinus),
            _ => Err(Error::Config(format!("unknown Bell outcome `{s}` (expected psi+, psi-, phi+ or phi-)"))),
        }
    }
}

fn equal_superposition() -> RegisterState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    RegisterState::from_amplitudes(vec![2], DVector::from_vec(vec![h, h]), NormTag::Unit).expect("fixed shape")
}

/// Mobile spin in `(|up> + |down>) / sqrt 2` followed by `n_static` caged
/// spins in `|down>`.
pub fn prepare_initial(n_static: usize) -> Result<RegisterState> {
    if n_static == 0 {
        return Err(invalid("n_static", "at least one caged spin is required"));
    }
    let down = RegisterState::basis(vec![4], &[STATIC_DOWN])?;
    let mut factors = vec![equal_superposition()];
    factors.extend(std::iter::repeat_n(down, n_static));
    let refs: Vec<&RegisterState> = factors.iter().collect();
    RegisterState::product(&refs)
}

/// Two independent initial pairs ordered `A, A', B, B'`.
pub fn prepare_pairs() -> RegisterState {
    let pair = prepare_initial(1).expect("one caged spin");
    RegisterState::product(&[&pair, &pair]).expect("fixed shape")
}

/// The product of the two pair states after both conditional flips:
/// `(|up, down'> + |down, up'>)_A (|up, down'> + |down, up'>)_B / 2`.
pub fn entangled_pairs_state() -> RegisterState {
    let mut amps = DVector::zeros(64);
    for (a, a_s) in [(MOBILE_UP, STATIC_DOWN), (MOBILE_DOWN, STATIC_UP)] {
        for (b, b_s) in [(MOBILE_UP, STATIC_DOWN), (MOBILE_DOWN, STATIC_UP)] {
            amps[((a * 4 + a_s) * 2 + b) * 4 + b_s] = C64::new(0.5, 0.0);
        }
    }
    RegisterState::from_amplitudes(PAIRS_DIMS.to_vec(), amps, NormTag::Unit).expect("fixed shape")
}

fn check_pairs_shape(state: &RegisterState) -> Result<()> {
    if state.dims() != PAIRS_DIMS {
        return Err(Error::RegisterShape(format!(
            "expected an A, A', B, B' register with dims {:?}, got {:?}",
            PAIRS_DIMS,
            state.dims()
        )));
    }
    Ok(())
}

/// Ideal `CNOT_AA'` then `CNOT_BB'`, in place.
pub fn apply_ideal_gates(state: &mut RegisterState) -> Result<()> {
    check_pairs_shape(state)?;
    for (c, t) in [(SITE_A, SITE_A_PRIME), (SITE_B, SITE_B_PRIME)] {
        ConditionalFlip::new(PAIRS_DIMS.to_vec(), c, t, TRIGGER_LEVEL)?.apply(state)?;
    }
    Ok(())
}

/// How the conditional flips are realized.
#[derive(Debug, Clone, PartialEq)]
pub enum GateMode {
    Ideal,
    /// Rotating-wave simulation of two resonant flip pulses on `layout`,
    /// which must be an `A, A', B, B'` register.
    Pulsed { layout: RegisterLayout, rabi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entangled {
    pub state: RegisterState,
    /// `|<target|state>|^2` against the ideal gated state.
    pub fidelity: f64,
}

pub fn entangle_pair(state: &RegisterState, mode: &GateMode) -> Result<Entangled> {
    check_pairs_shape(state)?;
    let out = match mode {
        GateMode::Ideal => {
            let mut s = state.clone();
            apply_ideal_gates(&mut s)?;
            s
        }
        GateMode::Pulsed { layout, rabi } => {
            if layout.dims()? != PAIRS_DIMS {
                return Err(Error::RegisterShape("pulsed gates need an A, A', B, B' layout".into()));
            }
            let h0 = build_hamiltonian(layout)?;
            let labels: Vec<&str> = layout.sites.iter().map(|s| s.label.as_str()).collect();
            let mut s = state.clone();
            for (c, t) in [(SITE_A, SITE_A_PRIME), (SITE_B, SITE_B_PRIME)] {
                let pulse = conditional_flip_pulse(&h0, labels[c], labels[t], TRIGGER_LEVEL, *rabi)?;
                s = propagate_rwa(&s, &h0, &pulse)?;
            }
            s
        }
    };
    out.check_norm()?;
    let fidelity = out.fidelity(&entangled_pairs_state())?;
    Ok(Entangled { state: out, fidelity })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub duration_us: f64,
    pub norm: f64,
    /// Fidelity against the ideal state at this stage, where one is defined.
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellTrace {
    pub seed: u64,
    pub gate_mode: String,
    pub decay: Option<DecayModel>,
    pub stages: Vec<StageRecord>,
    /// Branch probabilities in `Ψ+, Ψ-, Φ+, Φ-` order.
    pub branch_probabilities: Vec<(BellLabel, f64)>,
    pub record: MeasurementRecord,
    pub target: BellLabel,
    pub final_static_state: StateRecord,
    /// `|<Bell x target|psi>|^2` over the ideal herald probability, with the
    /// register renormalized at measurement.
    pub fidelity: f64,
    /// Fidelity of the renormalized heralded caged pair against its target.
    pub conditional_fidelity: f64,
    pub timing: BudgetReport,
}

/// Prepare, gate, optionally decay, transport and analyze one run.
pub fn run_bell_protocol(config: &RunConfig, seed: u64, forced: Option<BellLabel>) -> Result<BellTrace> {
    config.validate()?;
    let t_g = config.gate_time();
    let transport_us = config.transport_time()?;
    let mut stages = Vec::new();

    let initial = prepare_pairs();
    stages.push(StageRecord {
        name: "initial".into(),
        duration_us: 0.0,
        norm: initial.norm(),
        fidelity: Some(1.0),
    });

    let (mode, mode_name) = if config.protocol.pulsed_gates {
        (
            GateMode::Pulsed {
                layout: config.two_pairs_layout()?,
                rabi: config.pulse.rabi,
            },
            "pulsed",
        )
    } else {
        (GateMode::Ideal, "ideal")
    };
    let gated = entangle_pair(&initial, &mode)?;
    stages.push(StageRecord {
        name: "gates".into(),
        duration_us: 2.0 * t_g,
        norm: gated.state.norm(),
        fidelity: Some(gated.fidelity),
    });
    let reference = gated.state.clone();
    let mut state = gated.state;

    let decay = config.decay_model();
    if let Some(model) = &decay {
        decoherence::decay_window(&mut state, model, 2.0 * t_g)?;
        state.check_norm()?;
        stages.push(StageRecord {
            name: "gate_decay".into(),
            duration_us: 2.0 * t_g,
            norm: state.norm(),
            fidelity: Some(state.fidelity(&reference)?),
        });
    }

    if let (Some(model), true) = (&decay, config.decay.during_transport) {
        decoherence::decay_window(&mut state, model, transport_us)?;
    }
    stages.push(StageRecord {
        name: "transport".into(),
        duration_us: transport_us,
        norm: state.norm(),
        fidelity: Some(state.fidelity(&reference)?),
    });

    let result = analyzer_measure(&state, forced, seed)?;
    let label = result.label;
    stages.push(StageRecord {
        name: "analyzer".into(),
        duration_us: 0.0,
        norm: result.collapsed.norm(),
        fidelity: None,
    });
    let target = label.static_target();
    let fidelity = analyzer::heralded_fidelity(&state, &entangled_pairs_state(), label)?;
    let conditional_fidelity = result.static_pair.fidelity(&target)?;
    let timing = time_budget(&config.timeline())?;

    Ok(BellTrace {
        seed,
        gate_mode: mode_name.into(),
        decay,
        stages,
        branch_probabilities: result.probabilities.clone(),
        record: result.record,
        target: label,
        final_static_state: result.static_pair.to_record(),
        fidelity,
        conditional_fidelity,
        timing,
    })
}
