//! File-driven run configuration. Every field has a default, so `{}` is a
//! valid document; unknown fields are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decoherence::DecayModel;
use crate::error::{Error, Result};
use crate::physical_params::{dipolar_j, transport_time, Geometry, PhysicalConstants};
use crate::protocol::{HadamardConvention, ProtocolTimeline, MAX_GHZ_STATIC};
use crate::spin_algebra::{Coupling, FieldProfile, RegisterLayout, SpinSite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    pub constants: PhysicalConstants,
    pub field: FieldConfig,
    pub coupling: CouplingConfig,
    pub pulse: PulseConfig,
    pub decay: DecayConfig,
    pub protocol: ProtocolConfig,
    pub selectivity: SelectivityConfig,
    pub budget: BudgetConfig,
    pub fidelity_map: FidelityMapConfig,
    pub seed: u64,
    /// Overridden by `--out` and by the `PEAPOD_OUT_DIR` environment variable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn default_geometry() -> Geometry {
    Geometry { r_nm: 1.14, phi_rad: 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub b_reference_t: f64,
    pub gradient_t_per_m: f64,
    pub mobile_z_nm: f64,
    pub static_z_nm: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            b_reference_t: 0.35,
            gradient_t_per_m: 4e5,
            mobile_z_nm: 0.0,
            static_z_nm: 1.14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    /// Coupling in MHz; `null` derives it from the geometry.
    pub j_mhz: Option<f64>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self { j_mhz: Some(50.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    /// rad/us.
    pub rabi: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { rabi: 25.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub enabled: bool,
    /// rad/us.
    pub theta: f64,
    /// `rabi / gamma1` for mobile spin A.
    pub k1: f64,
    /// `rabi / gamma1` for mobile spin B.
    pub k2: f64,
    pub during_transport: bool,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            theta: 50.0,
            k1: 10.0,
            k2: 10.0,
            during_transport: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Simulate the conditional flips with resonant pulses instead of ideal gates.
    pub pulsed_gates: bool,
    pub hadamard: HadamardConvention,
    pub ghz_n: usize,
    pub transport_length_um: f64,
    pub fermi_velocity_m_per_s: f64,
    /// Extra idle time with the mobile spins exposed, us.
    pub extra_idle_us: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            pulsed_gates: false,
            hadamard: HadamardConvention::Standard,
            ghz_n: 2,
            transport_length_um: 1.0,
            fermi_velocity_m_per_s: 1e6,
            extra_idle_us: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectivityConfig {
    /// Rabi rates to scan, rad/us.
    pub rabis: Vec<f64>,
    pub lab_check: LabCheckConfig,
}

impl Default for SelectivityConfig {
    fn default() -> Self {
        Self {
            rabis: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0],
            lab_check: LabCheckConfig::default(),
        }
    }
}

/// Rotating-wave versus lab-frame comparison on a reduced-frequency pair,
/// so the lab integration stays short. The counter-rotating phase scales as
/// `rabi / (8 carrier)`, so `rabi` must stay well below the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabCheckConfig {
    pub enabled: bool,
    pub omega_mobile_mhz: f64,
    pub omega_static_mhz: f64,
    pub j_mhz: f64,
    pub rabi: f64,
    pub step_us: f64,
}

impl Default for LabCheckConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            omega_mobile_mhz: 300.0,
            omega_static_mhz: 500.0,
            j_mhz: 20.0,
            rabi: 0.5,
            step_us: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub t1_us: f64,
    pub t2_us: f64,
    pub mobile_decoherence_factor: f64,
    pub gates: usize,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            t1_us: 30.0,
            t2_us: 20.0,
            mobile_decoherence_factor: 4.0,
            gates: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelityMapConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub resolution: usize,
    /// Grid used by `--check`.
    pub check_resolution: usize,
}

impl Default for FidelityMapConfig {
    fn default() -> Self {
        Self {
            k_min: 1.0,
            k_max: 50.0,
            resolution: 50,
            check_resolution: 20,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: default_geometry(),
            constants: PhysicalConstants::default(),
            field: FieldConfig::default(),
            coupling: CouplingConfig::default(),
            pulse: PulseConfig::default(),
            decay: DecayConfig::default(),
            protocol: ProtocolConfig::default(),
            selectivity: SelectivityConfig::default(),
            budget: BudgetConfig::default(),
            fidelity_map: FidelityMapConfig::default(),
            seed: 0,
            output_dir: None,
        }
    }
}

fn bad(field: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {reason}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format_args!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format_args!("must be finite, got {v}")))
    }
}

impl RunConfig {
    /// Parses a JSON document; errors name the offending field path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Config(inner.to_string())
            } else {
                Error::Config(format!("{path}: {inner}"))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        positive("geometry.r_nm", self.geometry.r_nm)?;
        if !(0.0..=PI).contains(&self.geometry.phi_rad) {
            return Err(bad("geometry.phi_rad", format_args!("must lie in [0, pi], got {}", self.geometry.phi_rad)));
        }
        self.constants.validate().map_err(|e| bad("constants", e))?;
        positive("field.b_reference_t", self.field.b_reference_t)?;
        finite("field.gradient_t_per_m", self.field.gradient_t_per_m)?;
        finite("field.mobile_z_nm", self.field.mobile_z_nm)?;
        finite("field.static_z_nm", self.field.static_z_nm)?;
        if let Some(j) = self.coupling.j_mhz {
            finite("coupling.j_mhz", j)?;
        }
        positive("pulse.rabi", self.pulse.rabi)?;
        if !(self.decay.theta >= 0.0 && self.decay.theta.is_finite()) {
            return Err(bad("decay.theta", format_args!("must be non-negative and finite, got {}", self.decay.theta)));
        }
        for (name, k) in [("decay.k1", self.decay.k1), ("decay.k2", self.decay.k2)] {
            if !(k > 0.0) {
                return Err(bad(name, format_args!("must be positive, got {k}")));
            }
        }
        if !(1..=MAX_GHZ_STATIC).contains(&self.protocol.ghz_n) {
            return Err(bad("protocol.ghz_n", format_args!("must be in 1..={MAX_GHZ_STATIC}, got {}", self.protocol.ghz_n)));
        }
        positive("protocol.transport_length_um", self.protocol.transport_length_um)?;
        positive("protocol.fermi_velocity_m_per_s", self.protocol.fermi_velocity_m_per_s)?;
        if !(self.protocol.extra_idle_us >= 0.0 && self.protocol.extra_idle_us.is_finite()) {
            return Err(bad("protocol.extra_idle_us", format_args!("must be non-negative, got {}", self.protocol.extra_idle_us)));
        }
        if self.selectivity.rabis.len() < 2 {
            return Err(bad("selectivity.rabis", "need at least two Rabi rates for a slope"));
        }
        for &r in &self.selectivity.rabis {
            positive("selectivity.rabis", r)?;
        }
        let lab = &self.selectivity.lab_check;
        positive("selectivity.lab_check.omega_mobile_mhz", lab.omega_mobile_mhz)?;
        positive("selectivity.lab_check.omega_static_mhz", lab.omega_static_mhz)?;
        finite("selectivity.lab_check.j_mhz", lab.j_mhz)?;
        positive("selectivity.lab_check.rabi", lab.rabi)?;
        positive("selectivity.lab_check.step_us", lab.step_us)?;
        positive("budget.t1_us", self.budget.t1_us)?;
        positive("budget.t2_us", self.budget.t2_us)?;
        if !(self.budget.mobile_decoherence_factor >= 1.0) {
            return Err(bad(
                "budget.mobile_decoherence_factor",
                format_args!("must be at least 1, got {}", self.budget.mobile_decoherence_factor),
            ));
        }
        positive("fidelity_map.k_min", self.fidelity_map.k_min)?;
        positive("fidelity_map.k_max", self.fidelity_map.k_max)?;
        if self.fidelity_map.k_max < self.fidelity_map.k_min {
            return Err(bad("fidelity_map.k_max", "must not be below k_min"));
        }
        if self.fidelity_map.resolution == 0 {
            return Err(bad("fidelity_map.resolution", "must be at least 1"));
        }
        if self.fidelity_map.check_resolution == 0 {
            return Err(bad("fidelity_map.check_resolution", "must be at least 1"));
        }
        Ok(())
    }

    /// `pi / rabi`, us.
    pub fn gate_time(&self) -> f64 {
        PI / self.pulse.rabi
    }

    pub fn transport_time(&self) -> Result<f64> {
        transport_time(self.protocol.transport_length_um, self.protocol.fermi_velocity_m_per_s)
    }

    /// Configured coupling, or the dipolar value of the geometry when unset.
    pub fn coupling_mhz(&self) -> Result<f64> {
        match self.coupling.j_mhz {
            Some(j) => Ok(j),
            None => Ok(dipolar_j(&self.geometry, &self.constants)?.j_mhz),
        }
    }

    /// Mobile spin `A` and caged spin `A'` in the field gradient.
    pub fn pair_layout(&self) -> Result<RegisterLayout> {
        Ok(RegisterLayout {
            sites: vec![
                SpinSite::mobile("A", self.field.mobile_z_nm),
                SpinSite::caged("A'", self.field.static_z_nm),
            ],
            field: FieldProfile::Gradient {
                b_reference_t: self.field.b_reference_t,
                gradient_t_per_m: self.field.gradient_t_per_m,
            },
            couplings: vec![Coupling {
                site_a: 0,
                site_b: 1,
                j_mhz: self.coupling_mhz()?,
            }],
            constants: self.constants,
        })
    }

    /// Two copies of the pair, `A, A', B, B'`, with the pair's Zeeman frequencies.
    pub fn two_pairs_layout(&self) -> Result<RegisterLayout> {
        let w = self.pair_layout()?.omegas();
        let mut layout = RegisterLayout::two_pairs(w[0], w[1], self.coupling_mhz()?);
        layout.constants = self.constants;
        Ok(layout)
    }

    pub fn decay_model(&self) -> Option<DecayModel> {
        self.decay
            .enabled
            .then(|| DecayModel::from_ratios(self.pulse.rabi, self.decay.theta, self.decay.k1, self.decay.k2))
    }

    pub fn timeline(&self) -> ProtocolTimeline {
        let transport = self.transport_time().unwrap_or(0.0);
        let mut t = ProtocolTimeline::standard(
            self.gate_time(),
            self.budget.gates,
            transport,
            self.budget.t1_us,
            self.budget.t2_us,
            self.budget.mobile_decoherence_factor,
        );
        if self.protocol.extra_idle_us > 0.0 {
            t.events.push(crate::protocol::TimelineEvent {
                name: "idle".into(),
                duration_us: self.protocol.extra_idle_us,
                mobile_exposed: true,
            });
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json_str("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::from_json_str(r#"{"pulse": {"rabi": "fast"}}"#).unwrap_err().to_string();
        assert!(e.contains("pulse.rabi"), "{e}");
        let e = RunConfig::from_json_str(r#"{"pulse": {"rabi": -1}}"#).unwrap_err().to_string();
        assert!(e.contains("pulse.rabi"), "{e}");
        let e = RunConfig::from_json_str(r#"{"decay": {"kk": 1}}"#).unwrap_err().to_string();
        assert!(e.contains("decay") && e.contains("kk"), "{e}");
        let e = RunConfig::from_json_str(r#"{"geometry": {"r_nm": 0, "phi_rad": 0}}"#).unwrap_err().to_string();
        assert!(e.contains("geometry.r_nm"), "{e}");
        assert!(RunConfig::from_json_str("{not json").is_err());
    }

    #[test]
    fn null_coupling_uses_dipolar_value() {
        let cfg = RunConfig::from_json_str(r#"{"coupling": {"j_mhz": null}}"#).unwrap();
        let j = cfg.coupling_mhz().unwrap();
        assert!((j + 70.251_052).abs() < 1e-4, "{j}");
    }

    #[test]
    fn gradient_layout_separates_zeeman_frequencies() {
        let w = RunConfig::default().pair_layout().unwrap().omegas();
        // 2 (w_static - w_mobile) is the spin-1/2 ESR shift across the pair
        assert!((2.0 * (w[1] - w[0]) - 12.779_254_6).abs() < 1e-5);
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            0.5f64..5.0,
            0.0f64..3.0,
            prop::option::of(-100.0f64..100.0),
            1.0f64..100.0,
            any::<bool>(),
            1usize..=8,
            any::<u64>(),
        )
            .prop_map(|(r, phi, j, rabi, decay, n, seed)| {
                let mut c = RunConfig::default();
                c.geometry.r_nm = r;
                c.geometry.phi_rad = phi;
                c.coupling.j_mhz = j;
                c.pulse.rabi = rabi;
                c.decay.enabled = decay;
                c.protocol.ghz_n = n;
                c.seed = seed;
                c
            })
    }

    proptest! {
        #[test]
        fn parse_serialize_parse(c in arb_config()) {
            let text = c.to_json_pretty().unwrap();
            let back = RunConfig::from_json_str(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(RunConfig::from_json_str(&back.to_json_pretty().unwrap()).unwrap(), back);
        }
    }
}
