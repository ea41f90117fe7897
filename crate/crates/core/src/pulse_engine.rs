//! ESR drive pulses on a register: the ideal conditional flip, rotating-wave
//! and lab-frame propagation, and frequency selectivity of a conditional gate.
//!
//! Units: level energies and carriers are ordinary frequencies (MHz) and
//! enter phases as `2 pi f t`. The Rabi rate is angular (rad/us): a resonant
//! pulse of duration `t` rotates the target by `rabi * t`, so a full flip
//! takes `pi / rabi`.
//!
//! Every propagator here returns states in the interaction frame of the
//! diagonal `h0`: with the drive off, a state is left exactly unchanged.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spin_algebra::{HamiltonianMatrix, RegisterLayout, SpinSite, DENSE_DIM_CAP};
use crate::state::{basis_levels, site_stride, total_dim, RegisterState};

/// Unitarity tolerance for every propagator built here.
pub const UNITARITY_TOL: f64 = 1e-9;
/// Upper bound on `2 pi |H| step` for the lab-frame integrator.
pub const LAB_STEP_BOUND: f64 = 0.05;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    /// Label of the driven site.
    pub target: String,
    /// Carrier frequency, MHz.
    pub carrier_mhz: f64,
    /// Rabi rate, rad/us.
    pub rabi: f64,
    /// Drive phase, rad. `pi/2` rotates about y.
    pub phase: f64,
    pub duration_us: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_mhz > 0.0 && self.carrier_mhz.is_finite()) {
            return Err(invalid("pulse.carrier_mhz", format!("must be positive, got {}", self.carrier_mhz)));
        }
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(invalid("pulse.rabi", format!("must be non-negative, got {}", self.rabi)));
        }
        if !(self.duration_us >= 0.0 && self.duration_us.is_finite()) {
            return Err(invalid("pulse.duration_us", format!("must be non-negative, got {}", self.duration_us)));
        }
        if !self.phase.is_finite() {
            return Err(invalid("pulse.phase", "must be finite"));
        }
        Ok(())
    }

    pub fn rotation_angle(&self) -> f64 {
        self.rabi * self.duration_us
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub dims: Vec<usize>,
    pub entries: DMatrix<C64>,
}

impl Propagator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |U^dagger U - 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        let g = self.entries.adjoint() * &self.entries - DMatrix::<C64>::identity(n, n);
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn check_unitary(&self) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::Invariant(format!("propagator unitarity deviation {dev:e}")));
        }
        Ok(())
    }

    pub fn apply(&self, state: &RegisterState) -> Result<RegisterState> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::RegisterShape(format!(
                "propagator dims {:?} vs state dims {:?}",
                self.dims,
                state.dims()
            )));
        }
        RegisterState::from_amplitudes(self.dims.clone(), &self.entries * state.amplitudes(), state.norm_tag())
    }

    /// Restriction to the listed basis indices.
    pub fn restrict(&self, subspace: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(subspace.len(), subspace.len(), |i, j| self.entries[(subspace[i], subspace[j])])
    }
}

/// Exchange of the outermost levels `|+s>` and `|-s>` of a target site,
/// conditioned on the control site occupying `control_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalFlip {
    dims: Vec<usize>,
    control: usize,
    target: usize,
    control_level: usize,
}

impl ConditionalFlip {
    pub fn new(dims: Vec<usize>, control: usize, target: usize, control_level: usize) -> Result<Self> {
        site_stride(&dims, control)?;
        site_stride(&dims, target)?;
        if control == target {
            return Err(invalid("target", "control and target must differ"));
        }
        if dims[control] != 2 {
            return Err(invalid("control", format!("control must be a two-level site, has {} levels", dims[control])));
        }
        if dims[target] != 4 {
            return Err(invalid("target", format!("target must be a spin-3/2 site, has {} levels", dims[target])));
        }
        if control_level >= dims[control] {
            return Err(invalid(
                "control_level",
                format!("level {control_level} outside the control's {} levels", dims[control]),
            ));
        }
        Ok(Self {
            dims,
            control,
            target,
            control_level,
        })
    }

    /// In-place application; O(dim) with no matrix materialized.
    pub fn apply(&self, state: &mut RegisterState) -> Result<()> {
        if state.dims() != self.dims.as_slice() {
            return Err(Error::RegisterShape(format!(
                "gate dims {:?} vs state dims {:?}",
                self.dims,
                state.dims()
            )));
        }
        let (c_stride, _) = site_stride(&self.dims, self.control)?;
        let (t_stride, t_dim) = site_stride(&self.dims, self.target)?;
        let top = 0;
        let bottom = t_dim - 1;
        let amps = state.amplitudes_mut();
        for i in 0..amps.len() {
            if (i / c_stride) % 2 != self.control_level || (i / t_stride) % t_dim != top {
                continue;
            }
            let j = i + bottom * t_stride;
            amps.swap_rows(i, j);
        }
        Ok(())
    }

    pub fn propagator(&self) -> Result<Propagator> {
        let dim = total_dim(&self.dims)?;
        if dim > DENSE_DIM_CAP {
            return Err(Error::DimensionOverflow { dim, cap: DENSE_DIM_CAP });
        }
        let mut entries = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = RegisterState::basis(self.dims.clone(), &basis_levels(&self.dims, col))?;
            self.apply(&mut s)?;
            entries.set_column(col, s.amplitudes());
        }
        Ok(Propagator {
            dims: self.dims.clone(),
            entries,
        })
    }
}

/// Ideal conditional flip as a dense real permutation.
pub fn ideal_cnot(layout: &RegisterLayout, control: &str, target: &str, control_level: usize) -> Result<Propagator> {
    let dims = layout.dims()?;
    ConditionalFlip::new(dims, layout.site_index(control)?, layout.site_index(target)?, control_level)?.propagator()
}

/// Standard raising operator for spin `two_s / 2` in level order (`+s` first).
pub fn raising_operator(two_s: u32) -> DMatrix<f64> {
    let d = two_s as usize + 1;
    let s = f64::from(two_s) / 2.0;
    DMatrix::from_fn(d, d, |row, col| {
        if col == row + 1 {
            // |m-1> -> |m>, m = s - row
            let m = s - row as f64;
            (s * (s + 1.0) - m * (m - 1.0)).sqrt()
        } else {
            0.0
        }
    })
}

/// Embeds a single-site operator into the register (identity elsewhere),
/// returned as sparse `(row, col, value)` triplets.
fn embed_sparse(dims: &[usize], site: usize, op: &DMatrix<C64>) -> Result<Vec<(usize, usize, C64)>> {
    let (stride, d) = site_stride(dims, site)?;
    let dim = total_dim(dims)?;
    let mut out = Vec::new();
    for col in 0..dim {
        let l = (col / stride) % d;
        let base = col - l * stride;
        for r in 0..d {
            let v = op[(r, l)];
            if v != C64::new(0.0, 0.0) {
                out.push((base + r * stride, col, v));
            }
        }
    }
    Ok(out)
}

struct DriveContext {
    dims: Vec<usize>,
    energies: Vec<f64>,
    target: usize,
    target_m: Vec<f64>,
    raising: DMatrix<C64>,
}

impl DriveContext {
    fn new(h0: &HamiltonianMatrix, pulse: &PulseSpec) -> Result<Self> {
        pulse.validate()?;
        let energies = h0.diagonal().ok_or(Error::NotDiagonal)?.to_vec();
        let target = h0
            .sites
            .iter()
            .position(|s| s.label == pulse.target)
            .ok_or_else(|| Error::UnknownSite(pulse.target.clone()))?;
        let site: &SpinSite = &h0.sites[target];
        let two_s = site.two_s()?;
        let target_m = site.m_values()?.iter().map(|m| m.value()).collect();
        Ok(Self {
            dims: h0.dims.clone(),
            energies,
            target,
            target_m,
            raising: raising_operator(two_s).map(|x| C64::new(x, 0.0)),
        })
    }

    fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `m` of the target site for each basis index.
    fn m_of_index(&self) -> Result<Vec<f64>> {
        let (stride, d) = site_stride(&self.dims, self.target)?;
        Ok((0..self.dim()).map(|i| self.target_m[(i / stride) % d]).collect())
    }

    /// Time-independent generator (rad/us) in the frame rotating at the carrier.
    fn rotating_generator(&self, pulse: &PulseSpec) -> Result<(DMatrix<C64>, Vec<f64>)> {
        let n = self.dim();
        let m = self.m_of_index()?;
        let detuned: Vec<f64> = (0..n)
            .map(|i| 2.0 * PI * (self.energies[i] - pulse.carrier_mhz * m[i]))
            .collect();
        let mut h = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(detuned[i], 0.0) } else { C64::new(0.0, 0.0) });
        let coupling = self.raising.map(|x| x * (-I * pulse.phase).exp() * (pulse.rabi / 2.0));
        for (r, c, v) in embed_sparse(&self.dims, self.target, &coupling)? {
            h[(r, c)] += v;
            h[(c, r)] += v.conj();
        }
        Ok((h, detuned))
    }
}

fn eig_evolution(generator: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(generator.clone());
    let phases = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| (-I * l * t).exp()));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Rotating-wave propagator for one pulse, in the interaction frame of `h0`.
pub fn rwa_propagator(h0: &HamiltonianMatrix, pulse: &PulseSpec) -> Result<Propagator> {
    let ctx = DriveContext::new(h0, pulse)?;
    if ctx.dim() > DENSE_DIM_CAP {
        return Err(Error::DimensionOverflow {
            dim: ctx.dim(),
            cap: DENSE_DIM_CAP,
        });
    }
    let (generator, detuned) = ctx.rotating_generator(pulse)?;
    let t = pulse.duration_us;
    let rotating = eig_evolution(&generator, t);
    // back from the carrier frame to the h0 frame: exp(+i D t)
    let frame = DVector::from_iterator(detuned.len(), detuned.iter().map(|&d| (I * d * t).exp()));
    let entries = DMatrix::from_diagonal(&frame) * rotating;
    let u = Propagator {
        dims: ctx.dims,
        entries,
    };
    u.check_unitary()?;
    Ok(u)
}

pub fn propagate_rwa(state: &RegisterState, h0: &HamiltonianMatrix, pulse: &PulseSpec) -> Result<RegisterState> {
    rwa_propagator(h0, pulse)?.apply(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabStats {
    pub steps: usize,
    pub step_us: f64,
    /// Largest per-step norm correction removed by renormalization.
    pub max_step_drift: f64,
}

/// Lab-frame propagation with the full `rabi * cos(2 pi f t + phase) (S+ + S-)`
/// drive, counter-rotating terms included.
pub fn propagate_lab(state: &RegisterState, h0: &HamiltonianMatrix, pulse: &PulseSpec, step_us: f64) -> Result<RegisterState> {
    propagate_lab_with_stats(state, h0, pulse, step_us).map(|(s, _)| s)
}

/// Fixed-step RK4 in the interaction picture of `h0`; the time dependence of
/// the rotated drive is integrated exactly as written, nothing is dropped.
pub fn propagate_lab_with_stats(
    state: &RegisterState,
    h0: &HamiltonianMatrix,
    pulse: &PulseSpec,
    step_us: f64,
) -> Result<(RegisterState, LabStats)> {
    let ctx = DriveContext::new(h0, pulse)?;
    if state.dims() != ctx.dims.as_slice() {
        return Err(Error::RegisterShape(format!(
            "state dims {:?} vs Hamiltonian dims {:?}",
            state.dims(),
            ctx.dims
        )));
    }
    if !(step_us > 0.0) {
        return Err(invalid("step", format!("must be positive, got {step_us}")));
    }
    let e_max = ctx.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e_min = ctx.energies.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = ctx.raising.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norm_mhz = (e_max - e_min) + pulse.carrier_mhz + pulse.rabi * x_max / (2.0 * PI);
    let product = 2.0 * PI * norm_mhz * step_us;
    if product >= LAB_STEP_BOUND {
        return Err(Error::StepTooLarge {
            step: step_us,
            product,
            bound: LAB_STEP_BOUND,
        });
    }

    // X = S+ + S-, rotated into the h0 frame: X_kl exp(i w_kl t)
    let mut terms = Vec::new();
    for (r, c, v) in embed_sparse(&ctx.dims, ctx.target, &ctx.raising)? {
        let w = 2.0 * PI * (ctx.energies[r] - ctx.energies[c]);
        terms.push((r, c, v, w));
        terms.push((c, r, v.conj(), -w));
    }
    let omega_c = 2.0 * PI * pulse.carrier_mhz;
    let rhs = |t: f64, psi: &[C64], out: &mut [C64]| {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        let drive = pulse.rabi * (omega_c * t + pulse.phase).cos();
        if drive == 0.0 {
            return;
        }
        for &(r, c, v, w) in &terms {
            out[r] += -I * drive * v * C64::from_polar(1.0, w * t) * psi[c];
        }
    };

    let steps = if pulse.duration_us == 0.0 {
        0
    } else {
        // tolerate float noise in an exact multiple
        let ratio = pulse.duration_us / step_us;
        if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        }
    };
    let h = if steps == 0 { 0.0 } else { pulse.duration_us / steps as f64 };
    let n = ctx.dim();
    let mut psi: Vec<C64> = state.amplitudes().iter().copied().collect();
    let target_norm = state.norm();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]);
    let mut max_drift: f64 = 0.0;
    for step in 0..steps {
        let t = step as f64 * h;
        rhs(t, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + h * k3[i];
        }
        rhs(t + h, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            max_drift = max_drift.max((norm / target_norm - 1.0).abs());
            let scale = target_norm / norm;
            psi.iter_mut().for_each(|a| *a *= scale);
        }
    }
    let out = RegisterState::from_amplitudes(ctx.dims.clone(), DVector::from_vec(psi), state.norm_tag())?;
    Ok((
        out,
        LabStats {
            steps,
            step_us: h,
            max_step_drift: max_drift,
        },
    ))
}

/// Converts an `h0`-frame state at time `t` to the lab frame: `exp(-i 2 pi h0 t)`.
pub fn to_lab_frame(state: &RegisterState, h0: &HamiltonianMatrix, t_us: f64) -> Result<RegisterState> {
    let e = h0.diagonal().ok_or(Error::NotDiagonal)?;
    let mut out = state.clone();
    for (a, &en) in out.amplitudes_mut().iter_mut().zip(e) {
        *a *= C64::from_polar(1.0, -2.0 * PI * en * t_us);
    }
    Ok(out)
}

/// Carrier resonant with the target's `|+s> <-> |+s - 1>` transition when
/// every other site sits in `levels` (target entry ignored).
pub fn resonant_carrier(h0: &HamiltonianMatrix, target: usize, levels: &[usize]) -> Result<f64> {
    let e = h0.diagonal().ok_or(Error::NotDiagonal)?;
    let mut upper = levels.to_vec();
    upper[target] = 0;
    let mut lower = levels.to_vec();
    lower[target] = 1;
    let i = crate::state::basis_index(&h0.dims, &upper)?;
    let j = crate::state::basis_index(&h0.dims, &lower)?;
    Ok(e[i] - e[j])
}

/// Full-flip pulse on `target` resonant with the ladder conditioned on
/// `control` in `control_level`. Phase `pi/2` (y rotation) makes the flip a
/// real map: `|+3/2> -> |-3/2>`, `|-3/2> -> -|+3/2>`.
pub fn conditional_flip_pulse(
    h0: &HamiltonianMatrix,
    control: &str,
    target: &str,
    control_level: usize,
    rabi: f64,
) -> Result<PulseSpec> {
    if !(rabi > 0.0) {
        return Err(invalid("rabi", format!("must be positive, got {rabi}")));
    }
    let find = |label: &str| {
        h0.sites
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSite(label.to_string()))
    };
    let (c, t) = (find(control)?, find(target)?);
    if control_level >= h0.dims[c] {
        return Err(invalid("control_level", format!("level {control_level} outside the control's {} levels", h0.dims[c])));
    }
    let mut levels = vec![0; h0.dims.len()];
    levels[c] = control_level;
    Ok(PulseSpec {
        target: target.to_string(),
        carrier_mhz: resonant_carrier(h0, t, &levels)?,
        rabi,
        phase: PI / 2.0,
        duration_us: PI / rabi,
    })
}

/// Process fidelities of a simulated gate on a subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessFidelity {
    /// `|Tr(U_ideal^dagger U)|^2 / d^2`.
    pub raw: f64,
    /// Same, maximized over a diagonal phase on the output levels.
    pub phase_corrected: f64,
    /// Worst-case population leaving the subspace from a subspace input.
    pub leakage: f64,
}

pub fn subspace_process_fidelity(simulated: &Propagator, ideal: &Propagator, subspace: &[usize]) -> ProcessFidelity {
    let d = subspace.len() as f64;
    let u = simulated.restrict(subspace);
    let v = ideal.restrict(subspace);
    let raw = (v.adjoint() * &u).trace().norm_sqr() / (d * d);
    let m = &u * v.adjoint();
    let corrected = (0..subspace.len()).map(|k| m[(k, k)].norm()).sum::<f64>().powi(2) / (d * d);
    let leakage = (0..subspace.len())
        .map(|j| 1.0 - (0..subspace.len()).map(|i| u[(i, j)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    ProcessFidelity {
        raw,
        phase_corrected: corrected,
        leakage,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectivityPoint {
    pub rabi: f64,
    /// Population that left the initial level at the end of the flip pulse.
    pub final_leakage: f64,
    /// Largest population away from the initial level at any time during the pulse.
    pub peak_leakage: f64,
}

/// Static-site-only Hamiltonian of the non-trigger branch of a
/// mobile/caged pair (mobile in `|-1/2>`); exact block of the pair problem.
fn non_trigger_block(j_mhz: f64) -> Result<(HamiltonianMatrix, f64)> {
    let pair = crate::spin_algebra::build_hamiltonian(&SELECTIVITY_LAYOUT.with_j(j_mhz))?;
    let e = pair.diagonal().ok_or(Error::NotDiagonal)?;
    let carrier = resonant_carrier(&pair, 1, &[0, 0])?;
    let block = HamiltonianMatrix {
        sites: vec![pair.sites[1].clone()],
        dims: vec![4],
        repr: crate::spin_algebra::Repr::Diagonal(e[4..8].to_vec()),
        kind: pair.kind,
    };
    Ok((block, carrier))
}

struct SelectivityLayout {
    omega_mobile: f64,
    omega_static: f64,
}

impl SelectivityLayout {
    fn with_j(&self, j: f64) -> RegisterLayout {
        RegisterLayout::pair(self.omega_mobile, self.omega_static, j)
    }
}

// Rotating-frame results depend only on detunings, not on the absolute splittings.
const SELECTIVITY_LAYOUT: SelectivityLayout = SelectivityLayout {
    omega_mobile: 1000.0,
    omega_static: 2000.0,
};

/// Unwanted flip of the caged spin when the conditional flip pulse (tuned to
/// the trigger ladder) hits the non-trigger branch, detuned by `2J`.
pub fn selectivity_scan(j_mhz: f64, rabi_values: &[f64]) -> Result<Vec<SelectivityPoint>> {
    if !(j_mhz > 0.0) {
        return Err(invalid("j", format!("must be positive, got {j_mhz}")));
    }
    if let Some(bad) = rabi_values.iter().find(|r| !(**r > 0.0)) {
        return Err(invalid("rabi_values", format!("must be positive, got {bad}")));
    }
    let (block, carrier) = non_trigger_block(j_mhz)?;
    rabi_values
        .par_iter()
        .map(|&rabi| selectivity_point(&block, carrier, rabi))
        .collect()
}

fn selectivity_point(block: &HamiltonianMatrix, carrier: f64, rabi: f64) -> Result<SelectivityPoint> {
    let pulse = PulseSpec {
        target: block.sites[0].label.clone(),
        carrier_mhz: carrier,
        rabi,
        phase: PI / 2.0,
        duration_us: PI / rabi,
    };
    let ctx = DriveContext::new(block, &pulse)?;
    let (generator, _) = ctx.rotating_generator(&pulse)?;
    let eig = SymmetricEigen::new(generator);
    // initial level |+3/2>: <0|psi(t)> = sum_n |V_0n|^2 exp(-i l_n t)
    let weights: Vec<f64> = (0..4).map(|n| eig.eigenvectors[(0, n)].norm_sqr()).collect();
    let lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let stay = |t: f64| {
        weights
            .iter()
            .zip(&lambdas)
            .map(|(w, l)| *w * C64::from_polar(1.0, -l * t))
            .sum::<C64>()
            .norm_sqr()
    };
    let spread = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max) - lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let t_end = pulse.duration_us;
    let samples = ((spread * t_end / (2.0 * PI)) * 64.0).ceil().clamp(256.0, 4.0e6) as usize;
    let peak = (0..=samples)
        .map(|k| 1.0 - stay(t_end * k as f64 / samples as f64))
        .fold(0.0, f64::max);
    Ok(SelectivityPoint {
        rabi,
        final_leakage: (1.0 - stay(t_end)).max(0.0),
        peak_leakage: peak.max(0.0),
    })
}

/// Slope of `log(peak_leakage)` against `log(rabi)` between the two smallest Rabi rates.
pub fn low_drive_slope(points: &[SelectivityPoint]) -> Option<f64> {
    let mut sorted: Vec<_> = points.to_vec();
    sorted.sort_by(|a, b| a.rabi.total_cmp(&b.rabi));
    let (a, b) = (sorted.first()?, sorted.get(1)?);
    Some((b.peak_leakage.ln() - a.peak_leakage.ln()) / (b.rabi.ln() - a.rabi.ln()))
}

/// Projects onto the given basis indices and reports the outside population.
pub fn leakage_outside(state: &RegisterState, subspace: &[usize]) -> f64 {
    let inside: f64 = subspace.iter().map(|&i| state.amplitudes()[i].norm_sqr()).sum();
    (state.norm_sqr() - inside).max(0.0)
}
