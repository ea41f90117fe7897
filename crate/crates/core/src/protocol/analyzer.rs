//! Projective Bell-basis measurement of the mobile pair `A, B`.
//!
//! Sampling draws a single uniform variate from `ChaCha8Rng::seed_from_u64(seed)`
//! and walks the branches in `Ψ+, Ψ-, Φ+, Φ-` order.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_pairs_shape, BellLabel, PAIRS_DIMS};
use crate::error::{Error, Result};
use crate::state::{NormTag, RegisterState};

/// Branches below this probability cannot be forced.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p1: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p2: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pe: Option<u8>,
    pub outcome_label: String,
    pub probability: f64,
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzerResult {
    pub record: MeasurementRecord,
    pub label: BellLabel,
    /// Post-measurement register, `|Bell>_AB` times the heralded caged pair.
    pub collapsed: RegisterState,
    /// Renormalized caged pair `A', B'`.
    pub static_pair: RegisterState,
    pub probabilities: Vec<(BellLabel, f64)>,
}

/// Unnormalized caged-pair amplitude `(<Bell|_AB x 1) |psi>`.
pub fn branch(state: &RegisterState, label: BellLabel) -> Result<RegisterState> {
    check_pairs_shape(state)?;
    let bell = label.mobile_amplitudes();
    let amps = state.amplitudes();
    let mut out = DVector::zeros(16);
    for a in 0..2 {
        for b in 0..2 {
            let c = bell[a][b];
            if c == 0.0 {
                continue;
            }
            for sa in 0..4 {
                for sb in 0..4 {
                    out[sa * 4 + sb] += c * amps[((a * 4 + sa) * 2 + b) * 4 + sb];
                }
            }
        }
    }
    RegisterState::from_amplitudes(vec![4, 4], out, NormTag::Unnormalized)
}

/// Branch probabilities for the normalized input, `Ψ+, Ψ-, Φ+, Φ-` order.
pub fn branch_probabilities(state: &RegisterState) -> Result<Vec<(BellLabel, f64)>> {
    let total = state.norm_sqr();
    if total == 0.0 {
        return Err(Error::Invariant("cannot measure the zero state".into()));
    }
    BellLabel::ALL
        .iter()
        .map(|&l| Ok((l, branch(state, l)?.norm_sqr() / total)))
        .collect()
}

fn sample(probabilities: &[(BellLabel, f64)], seed: u64) -> BellLabel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    let total: f64 = probabilities.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for &(l, p) in probabilities {
        acc += p / total;
        if u < acc && p > ZERO_PROBABILITY {
            return l;
        }
    }
    probabilities
        .iter()
        .rev()
        .find(|p| p.1 > ZERO_PROBABILITY)
        .map(|p| p.0)
        .expect("at least one branch has weight")
}

/// Measures the mobile pair. A forced outcome must have nonzero probability.
pub fn analyzer_measure(state: &RegisterState, forced: Option<BellLabel>, seed: u64) -> Result<AnalyzerResult> {
    let probabilities = branch_probabilities(state)?;
    let label = match forced {
        Some(l) => {
            let p = probabilities.iter().find(|x| x.0 == l).map(|x| x.1).unwrap_or(0.0);
            if p < ZERO_PROBABILITY {
                return Err(Error::ZeroProbabilityOutcome {
                    outcome: l.to_string(),
                    probability: p,
                });
            }
            l
        }
        None => sample(&probabilities, seed),
    };
    let probability = probabilities.iter().find(|x| x.0 == label).map(|x| x.1).unwrap_or(0.0);
    let static_pair = branch(state, label)?.normalized()?;
    let collapsed = embed(label, &static_pair)?;
    let (p1, p2) = label.bits();
    Ok(AnalyzerResult {
        record: MeasurementRecord {
            p1: Some(p1),
            p2: Some(p2),
            pe: None,
            outcome_label: label.to_string(),
            probability,
            forced: forced.is_some(),
        },
        label,
        collapsed,
        static_pair,
        probabilities,
    })
}

/// `|Bell>_AB x |pair>_A'B'` in `A, A', B, B'` order.
fn embed(label: BellLabel, pair: &RegisterState) -> Result<RegisterState> {
    let bell = label.mobile_amplitudes();
    let p = pair.amplitudes();
    let mut out = DVector::zeros(64);
    for a in 0..2 {
        for b in 0..2 {
            for sa in 0..4 {
                for sb in 0..4 {
                    out[((a * 4 + sa) * 2 + b) * 4 + sb] = bell[a][b] * p[sa * 4 + sb];
                }
            }
        }
    }
    RegisterState::from_amplitudes(PAIRS_DIMS.to_vec(), out, NormTag::Unit)
}

/// `|<Bell x target|psi_n>|^2 / P_ideal(label)`, where `psi_n` is `state`
/// renormalized and `P_ideal` is the branch probability of `ideal`.
pub fn heralded_fidelity(state: &RegisterState, ideal: &RegisterState, label: BellLabel) -> Result<f64> {
    let p_ideal = branch(ideal, label)?.norm_sqr() / ideal.norm_sqr();
    if p_ideal < ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: label.to_string(),
            probability: p_ideal,
        });
    }
    let overlap: C64 = label.static_target().inner(&branch(state, label)?)?;
    Ok(overlap.norm_sqr() / state.norm_sqr() / p_ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::entangled_pairs_state;
    use proptest::prelude::*;

    #[test]
    fn table_rows() {
        let s = entangled_pairs_state();
        for l in BellLabel::ALL {
            let r = analyzer_measure(&s, Some(l), 0).unwrap();
            assert!((r.record.probability - 0.25).abs() < 1e-12);
            assert!(r.static_pair.fidelity(&l.static_target()).unwrap() >= 1.0 - 1e-12);
        }
        let r = analyzer_measure(&s, Some(BellLabel::PhiPlus), 0).unwrap();
        assert_eq!((r.record.p1, r.record.p2), (Some(1), Some(1)));
        // (|down down> + |up up>) / sqrt 2 on the caged pair
        let a = r.static_pair.amplitudes();
        assert!((a[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((a[15].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_outcome_is_certain() {
        let pair = RegisterState::basis(vec![4, 4], &[0, 3]).unwrap();
        let s = embed(BellLabel::PsiPlus, &pair).unwrap();
        for seed in 0..20 {
            let r = analyzer_measure(&s, None, seed).unwrap();
            assert_eq!(r.label, BellLabel::PsiPlus);
            assert!((r.record.probability - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            analyzer_measure(&s, Some(BellLabel::PhiMinus), 0),
            Err(Error::ZeroProbabilityOutcome { .. })
        ));
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let s = entangled_pairs_state();
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(analyzer_measure(&s, None, seed).unwrap(), analyzer_measure(&s, None, seed).unwrap());
        }
    }

    fn arb_state() -> impl Strategy<Value = RegisterState> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)
            .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
            .prop_map(|v| {
                let amps = DVector::from_iterator(64, v.into_iter().map(|(a, b)| C64::new(a, b)));
                RegisterState::from_amplitudes(PAIRS_DIMS.to_vec(), amps, NormTag::Unnormalized)
                    .unwrap()
                    .normalized()
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn outcome_probabilities_complete(s in arb_state()) {
            let total: f64 = branch_probabilities(&s).unwrap().iter().map(|p| p.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
        }

        #[test]
        fn collapse_is_idempotent(s in arb_state(), seed in any::<u64>()) {
            let first = analyzer_measure(&s, None, seed).unwrap();
            let again = analyzer_measure(&first.collapsed, Some(first.label), seed).unwrap();
            prop_assert!((again.record.probability - 1.0).abs() < 1e-10);
            for (a, b) in again.collapsed.amplitudes().iter().zip(first.collapsed.amplitudes().iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
