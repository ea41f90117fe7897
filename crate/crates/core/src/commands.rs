//! One function per CLI subcommand. Each writes its artifacts plus a
//! `manifest.json` into the output directory and returns a short summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::decoherence::{
    bell_fidelity_closed_form, fidelity_surface, fidelity_via_simulation, gating_time, write_surface_csv, BellFamily,
    DecayModel, GatingTime,
};
use crate::error::{Error, Result};
use crate::fmt_sig12;
use crate::physical_params::{dipolar_j, esr_shift, DipolarCoupling};
use crate::protocol::{self, BellLabel, BudgetReport};
use crate::pulse_engine::{
    conditional_flip_pulse, low_drive_slope, propagate_lab_with_stats, propagate_rwa, selectivity_scan,
    SelectivityPoint,
};
use crate::spin_algebra::{basis_label, build_hamiltonian, transition_table, RegisterLayout};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub artifacts: Vec<Artifact>,
}

/// Files written by a command and a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<(String, Vec<u8>)>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir, written: Vec::new() })
    }

    fn bytes(&mut self, name: &str, data: Vec<u8>) -> Result<()> {
        fs::write(self.dir.join(name), &data)?;
        self.written.push((name.to_string(), data));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut data = serde_json::to_vec_pretty(value)?;
        data.push(b'\n');
        self.bytes(name, data)
    }

    fn finish(mut self, command: &str, config: &RunConfig, summary: String) -> Result<CommandOutput> {
        let manifest = Manifest {
            command: command.to_string(),
            config_sha256: config_hash(config)?,
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            artifacts: self
                .written
                .iter()
                .map(|(name, data)| Artifact {
                    name: name.clone(),
                    sha256: hex::encode(Sha256::digest(data)),
                })
                .collect(),
        };
        self.json("manifest.json", &manifest)?;
        Ok(CommandOutput {
            artifacts: self.written.iter().map(|(n, _)| self.dir.join(n)).collect(),
            summary,
        })
    }
}

/// SHA-256 of the canonical JSON of the effective config, output path excluded.
pub fn config_hash(config: &RunConfig) -> Result<String> {
    let mut c = config.clone();
    c.output_dir = None;
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(&c)?)))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn spectrum_rows(layout: &RegisterLayout) -> Result<Vec<Vec<String>>> {
    let h = build_hamiltonian(layout)?;
    let e = h.diagonal().ok_or(Error::NotDiagonal)?;
    e.iter()
        .enumerate()
        .map(|(i, &en)| Ok(vec![i.to_string(), basis_label(&layout.sites, i)?, fmt_sig12(en)]))
        .collect()
}

fn transition_rows(layout: &RegisterLayout) -> Result<Vec<Vec<String>>> {
    let h = build_hamiltonian(layout)?;
    Ok(transition_table(&h)?
        .into_iter()
        .map(|t| {
            vec![
                t.site_label.clone(),
                t.control_label(),
                t.m_upper.to_string(),
                t.m_lower.to_string(),
                fmt_sig12(t.frequency_mhz),
                t.degeneracy.to_string(),
            ]
        })
        .collect())
}

const TRANSITION_HEADER: [&str; 6] = ["site", "control", "m_upper", "m_lower", "frequency_MHz", "degeneracy"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalEstimates {
    pub dipolar: DipolarCoupling,
    /// Coupling used in the Hamiltonian, MHz.
    pub j_used_mhz: f64,
    pub coupling_note: String,
    pub esr_shift_half_mhz: f64,
    pub esr_shift_three_half_mhz: f64,
    pub omega_mobile_mhz: f64,
    pub omega_static_mhz: f64,
    pub transport_time_us: f64,
    pub gating: Option<GatingTime>,
}

pub fn physical_estimates(config: &RunConfig) -> Result<PhysicalEstimates> {
    let dipolar = dipolar_j(&config.geometry, &config.constants)?;
    let dz = (config.field.static_z_nm - config.field.mobile_z_nm).abs();
    let w = config.pair_layout()?.omegas();
    let model = DecayModel::from_ratios(config.pulse.rabi, config.decay.theta, config.decay.k1, config.decay.k2);
    Ok(PhysicalEstimates {
        dipolar,
        j_used_mhz: config.coupling_mhz()?,
        coupling_note: format!(
            "prefactor J0 = {:.4} MHz, angular-dressed J0 (1 - 3 cos^2 phi) = {:.4} MHz; \
             either may be quoted as the coupling",
            dipolar.j0_mhz, dipolar.j_mhz
        ),
        esr_shift_half_mhz: esr_shift(config.field.gradient_t_per_m, dz, (-0.5, 0.5), &config.constants)?,
        esr_shift_three_half_mhz: esr_shift(config.field.gradient_t_per_m, dz, (-1.5, 1.5), &config.constants)?,
        omega_mobile_mhz: w[0],
        omega_static_mhz: w[1],
        transport_time_us: config.transport_time()?,
        gating: gating_time(&model).ok(),
    })
}

pub fn cmd_spectrum(config: &RunConfig, out: &Path) -> Result<CommandOutput> {
    let layout = config.pair_layout()?;
    let mut w = Writer::new(out)?;
    let rows = spectrum_rows(&layout)?;
    let n = rows.len();
    w.bytes("spectrum.csv", csv_bytes(&["index", "basis_label", "energy_MHz"], rows)?)?;
    w.bytes("transitions.csv", csv_bytes(&TRANSITION_HEADER, transition_rows(&layout)?)?)?;
    let est = physical_estimates(config)?;
    w.json("physical_estimates.json", &est)?;
    w.finish("spectrum", config, format!("{n} levels written; {}", est.coupling_note))
}

pub fn cmd_transitions(config: &RunConfig, out: &Path) -> Result<CommandOutput> {
    let layout = config.pair_layout()?;
    let mut w = Writer::new(out)?;
    let rows = transition_rows(&layout)?;
    let n = rows.len();
    w.bytes("transitions.csv", csv_bytes(&TRANSITION_HEADER, rows)?)?;
    w.finish("transitions", config, format!("{n} transitions written"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabCheck {
    pub rabi: f64,
    pub carrier_mhz: f64,
    pub steps: usize,
    pub max_amplitude_deviation: f64,
    pub infidelity: f64,
}

/// Rotating-wave versus lab-frame flip of `(|up> + |down>)|down'> / sqrt 2`.
pub fn rwa_lab_check(layout: &RegisterLayout, rabi: f64, step_us: f64) -> Result<LabCheck> {
    let h0 = build_hamiltonian(layout)?;
    let c = &layout.sites[0].label;
    let t = &layout.sites[1].label;
    let pulse = conditional_flip_pulse(&h0, c, t, protocol::TRIGGER_LEVEL, rabi)?;
    let psi = protocol::prepare_initial(1)?;
    let rwa = propagate_rwa(&psi, &h0, &pulse)?;
    let (lab, stats) = propagate_lab_with_stats(&psi, &h0, &pulse, step_us)?;
    let dev = rwa
        .amplitudes()
        .iter()
        .zip(lab.amplitudes().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(LabCheck {
        rabi,
        carrier_mhz: pulse.carrier_mhz,
        steps: stats.steps,
        max_amplitude_deviation: dev,
        infidelity: 1.0 - rwa.fidelity(&lab)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectivityReport {
    pub j_mhz: f64,
    pub points: Vec<SelectivityPoint>,
    pub low_drive_slope: Option<f64>,
    pub lab_check: Option<LabCheck>,
}

pub fn selectivity_report(config: &RunConfig) -> Result<SelectivityReport> {
    let j = config.coupling_mhz()?.abs();
    let points = selectivity_scan(j, &config.selectivity.rabis)?;
    let lc = &config.selectivity.lab_check;
    let lab_check = if lc.enabled {
        let layout = RegisterLayout::pair(lc.omega_mobile_mhz, lc.omega_static_mhz, lc.j_mhz);
        Some(rwa_lab_check(&layout, lc.rabi, lc.step_us)?)
    } else {
        None
    };
    Ok(SelectivityReport {
        j_mhz: j,
        low_drive_slope: low_drive_slope(&points),
        points,
        lab_check,
    })
}

pub fn cmd_selectivity(config: &RunConfig, out: &Path) -> Result<CommandOutput> {
    let report = selectivity_report(config)?;
    let mut w = Writer::new(out)?;
    let rows = report
        .points
        .iter()
        .map(|p| vec![fmt_sig12(p.rabi), fmt_sig12(p.final_leakage), fmt_sig12(p.peak_leakage)]);
    w.bytes("selectivity.csv", csv_bytes(&["rabi", "final_leakage", "peak_leakage"], rows)?)?;
    w.json("selectivity.json", &report)?;
    let slope = report.low_drive_slope.map_or("n/a".into(), |s| format!("{s:.4}"));
    w.finish("selectivity", config, format!("low-drive slope {slope}"))
}

pub fn cmd_bell(config: &RunConfig, forced: Option<BellLabel>, out: &Path) -> Result<CommandOutput> {
    let trace = protocol::run_bell_protocol(config, config.seed, forced)?;
    let mut w = Writer::new(out)?;
    w.json("bell_trace.json", &trace)?;
    let summary = format!(
        "outcome {} (P1={}, P2={}), fidelity {:.10}",
        trace.record.outcome_label,
        trace.record.p1.unwrap_or(0),
        trace.record.p2.unwrap_or(0),
        trace.fidelity
    );
    w.finish("bell", config, summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzReport {
    pub n: usize,
    pub hadamard: protocol::HadamardConvention,
    pub record: protocol::MeasurementRecord,
    pub branches: Vec<protocol::ghz::GhzBranch>,
    pub mobile_level: usize,
    pub fidelity: f64,
    pub static_state: crate::state::StateRecord,
}

pub fn cmd_ghz(config: &RunConfig, n: Option<usize>, forced_pe: Option<u8>, out: &Path) -> Result<CommandOutput> {
    let n = n.unwrap_or(config.protocol.ghz_n);
    let run = protocol::run_ghz(n, forced_pe, config.seed, config.protocol.hadamard)?;
    let report = GhzReport {
        n,
        hadamard: config.protocol.hadamard,
        record: run.record.clone(),
        branches: run.branches,
        mobile_level: run.mobile_level,
        fidelity: run.fidelity,
        static_state: run.static_state.to_record(),
    };
    let mut w = Writer::new(out)?;
    w.json("ghz.json", &report)?;
    let summary = format!("n={n}: {} (P_e={}), fidelity {:.10}", report.record.outcome_label, report.record.pe.unwrap_or(0), report.fidelity);
    w.finish("ghz", config, summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityCheck {
    pub resolution: usize,
    pub points: usize,
    pub max_deviation: f64,
}

/// Largest closed-form versus simulated deviation on a `resolution^2` grid.
pub fn fidelity_check(config: &RunConfig, resolution: usize) -> Result<FidelityCheck> {
    let fm = &config.fidelity_map;
    let grid = fidelity_surface(fm.k_min, fm.k_max, resolution)?;
    let mut max_dev: f64 = 0.0;
    for p in &grid {
        let model = DecayModel::from_ratios(config.pulse.rabi, config.decay.theta, p.k1, p.k2);
        for fam in [BellFamily::Psi, BellFamily::Phi] {
            let sim = fidelity_via_simulation(&model, fam)?;
            max_dev = max_dev.max((sim - bell_fidelity_closed_form(p.k1, p.k2, fam)).abs());
        }
    }
    Ok(FidelityCheck {
        resolution,
        points: grid.len(),
        max_deviation: max_dev,
    })
}

pub fn cmd_fidelity_map(config: &RunConfig, check: bool, out: &Path) -> Result<CommandOutput> {
    let fm = &config.fidelity_map;
    let points = fidelity_surface(fm.k_min, fm.k_max, fm.resolution)?;
    let mut data = Vec::new();
    write_surface_csv(&points, &mut data)?;
    let mut w = Writer::new(out)?;
    w.bytes("fidelity_map.csv", data)?;
    let mut summary = format!("{} grid points written", points.len());
    if check {
        let c = fidelity_check(config, fm.check_resolution)?;
        summary.push_str(&format!("; max closed-form/simulation deviation {:.3e}", c.max_deviation));
        w.json("fidelity_check.json", &c)?;
    }
    w.finish("fidelity-map", config, summary)
}

pub fn cmd_budget(config: &RunConfig, out: &Path) -> Result<CommandOutput> {
    #[derive(Serialize)]
    struct Budget {
        timeline: protocol::ProtocolTimeline,
        report: BudgetReport,
    }
    let timeline = config.timeline();
    let report = protocol::time_budget(&timeline)?;
    let summary = format!(
        "{}: weighted {:.4} us = {:.2}% of the tightest budget (raw {:.2}%)",
        if report.pass { "pass" } else { "fail" },
        report.weighted_total_us,
        100.0 * report.weighted_ratio,
        100.0 * report.raw_ratio
    );
    let mut w = Writer::new(out)?;
    w.json("budget.json", &Budget { timeline, report })?;
    w.finish("budget", config, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_csv_has_eight_rows() {
        let dir = tempfile::tempdir().unwrap();
        cmd_spectrum(&RunConfig::default(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,basis_label,energy_MHz");
        assert_eq!(lines.len(), 9);
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn manifest_hashes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        cmd_budget(&RunConfig::default(), dir.path()).unwrap();
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        let data = fs::read(dir.path().join("budget.json")).unwrap();
        assert_eq!(m["artifacts"][0]["sha256"], hex::encode(Sha256::digest(&data)));
    }

    #[test]
    fn config_hash_ignores_output_dir() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        b.seed = 7;
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }
}
