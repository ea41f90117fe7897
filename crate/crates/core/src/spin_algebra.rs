//! Spin operators, the Ising-coupled Zeeman Hamiltonian of a heterogeneous
//! register, its spectrum, and the conditional transition ladder.
//!
//! Frequencies are ordinary frequencies in MHz. The Zeeman term of site `i`
//! is `g mu_B B_i S_z^i` with `S_z` scaled by the site's `convention_scale`,
//! so a mobile spin-1/2 (scale 2) has `S_z = diag(+1, -1)` and a spin-3/2
//! (scale 1) has `S_z = diag(3/2, 1/2, -1/2, -3/2)`. With
//! `omega_i = g mu_B B_i / 2` the two-site spectrum is
//! `+-2 omega_1 + 2 m' omega_2 +- J m'`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physical_params::PhysicalConstants;
use crate::state::{basis_levels, total_dim};

/// Default cap on the product dimension of a register.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;
/// Largest dimension for which dense matrices are materialized.
pub const DENSE_DIM_CAP: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 > 0 { "+" } else { "" };
        if self.0 % 2 == 0 {
            write!(f, "{sign}{}", self.0 / 2)
        } else {
            write!(f, "{sign}{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSite {
    pub label: String,
    pub spin_s: f64,
    /// Position along the tube axis, nm.
    pub position_z_nm: f64,
    /// Multiplier applied to the standard `S_z` spectrum.
    pub convention_scale: f64,
}

impl SpinSite {
    /// Auxiliary conduction electron: spin-1/2 with `S_z = diag(+1, -1)`.
    pub fn mobile(label: impl Into<String>, position_z_nm: f64) -> Self {
        Self {
            label: label.into(),
            spin_s: 0.5,
            position_z_nm,
            convention_scale: 2.0,
        }
    }

    /// Caged spin-3/2 with the standard `S_z`.
    pub fn caged(label: impl Into<String>, position_z_nm: f64) -> Self {
        Self {
            label: label.into(),
            spin_s: 1.5,
            position_z_nm,
            convention_scale: 1.0,
        }
    }

    /// Twice the spin quantum number, validated against the supported set.
    pub fn two_s(&self) -> Result<u32> {
        if self.spin_s == 0.5 {
            Ok(1)
        } else if self.spin_s == 1.5 {
            Ok(3)
        } else {
            Err(Error::UnsupportedSpin {
                label: self.label.clone(),
                spin: self.spin_s,
            })
        }
    }

    /// Local dimension `2s + 1`.
    pub fn dim(&self) -> Result<usize> {
        Ok(self.two_s()? as usize + 1)
    }

    /// Magnetic quantum numbers in level order (`+s` first).
    pub fn m_values(&self) -> Result<Vec<HalfInt>> {
        let two_s = self.two_s()? as i32;
        Ok((0..=two_s).map(|k| HalfInt(two_s - 2 * k)).collect())
    }

    /// Convention-scaled `S_z` eigenvalues in level order.
    pub fn sz_diagonal(&self) -> Result<Vec<f64>> {
        Ok(self
            .m_values()?
            .into_iter()
            .map(|m| self.convention_scale * m.value())
            .collect())
    }
}

/// Convention-scaled `S_z` of a single site.
pub fn make_sz(site: &SpinSite) -> Result<DMatrix<f64>> {
    let diag = site.sz_diagonal()?;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

/// How each site's Zeeman frequency is determined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldProfile {
    /// `B(z) = b_reference + gradient * z`, with `z` the site position.
    Gradient { b_reference_t: f64, gradient_t_per_m: f64 },
    /// Explicit `omega_i = g mu_B B_i / 2` per site, MHz.
    Omegas(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub site_a: usize,
    pub site_b: usize,
    pub j_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub sites: Vec<SpinSite>,
    pub field: FieldProfile,
    pub couplings: Vec<Coupling>,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl RegisterLayout {
    /// Mobile spin followed by one caged spin, with explicit omegas.
    pub fn pair(omega_mobile: f64, omega_static: f64, j_mhz: f64) -> Self {
        Self {
            sites: vec![SpinSite::mobile("A", 0.0), SpinSite::caged("A'", 0.0)],
            field: FieldProfile::Omegas(vec![omega_mobile, omega_static]),
            couplings: vec![Coupling { site_a: 0, site_b: 1, j_mhz }],
            constants: PhysicalConstants::default(),
        }
    }

    /// Two independent mobile/caged pairs ordered `A, A', B, B'`.
    pub fn two_pairs(omega_mobile: f64, omega_static: f64, j_mhz: f64) -> Self {
        Self {
            sites: vec![
                SpinSite::mobile("A", 0.0),
                SpinSite::caged("A'", 0.0),
                SpinSite::mobile("B", 0.0),
                SpinSite::caged("B'", 0.0),
            ],
            field: FieldProfile::Omegas(vec![omega_mobile, omega_static, omega_mobile, omega_static]),
            couplings: vec![
                Coupling { site_a: 0, site_b: 1, j_mhz },
                Coupling { site_a: 2, site_b: 3, j_mhz },
            ],
            constants: PhysicalConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Layout("register has no sites".into()));
        }
        for s in &self.sites {
            s.two_s()?;
        }
        if let FieldProfile::Omegas(w) = &self.field {
            if w.len() != self.sites.len() {
                return Err(Error::Layout(format!(
                    "{} omegas given for {} sites",
                    w.len(),
                    self.sites.len()
                )));
            }
        }
        for c in &self.couplings {
            if c.site_a == c.site_b {
                return Err(Error::Layout(format!("coupling references site {} twice", c.site_a)));
            }
            if c.site_a >= self.sites.len() || c.site_b >= self.sites.len() {
                return Err(Error::Layout(format!(
                    "coupling ({}, {}) references a missing site",
                    c.site_a, c.site_b
                )));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Result<Vec<usize>> {
        self.sites.iter().map(SpinSite::dim).collect()
    }

    pub fn site_index(&self, label: &str) -> Result<usize> {
        self.sites
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSite(label.to_string()))
    }

    /// `omega_i = g mu_B B_i / 2` per site, MHz.
    pub fn omegas(&self) -> Vec<f64> {
        match &self.field {
            FieldProfile::Omegas(w) => w.clone(),
            FieldProfile::Gradient {
                b_reference_t,
                gradient_t_per_m,
            } => self
                .sites
                .iter()
                .map(|s| {
                    let b = b_reference_t + gradient_t_per_m * s.position_z_nm * 1e-9;
                    0.5 * self.constants.zeeman_mhz(b)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    /// Real diagonal in the product basis.
    Diagonal(Vec<f64>),
    Dense(DMatrix<C64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Hermitian,
    /// Explicitly tagged for effective decay generators.
    NonHermitian,
}

/// Hamiltonian in MHz over a register. `sites` is empty for generic matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub sites: Vec<SpinSite>,
    pub dims: Vec<usize>,
    pub repr: Repr,
    pub kind: OperatorKind,
}

impl HamiltonianMatrix {
    /// Wraps a dense matrix with no site metadata.
    pub fn dense(entries: DMatrix<C64>, kind: OperatorKind) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::RegisterShape(format!(
                "{}x{} matrix is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let h = Self {
            sites: Vec::new(),
            dims: vec![entries.nrows()],
            repr: Repr::Dense(entries),
            kind,
        };
        if kind == OperatorKind::Hermitian {
            h.check_hermitian()?;
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(d) => d.len(),
            Repr::Dense(m) => m.nrows(),
        }
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d),
            Repr::Dense(_) => None,
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        match &self.repr {
            Repr::Dense(m) => Ok(m.clone()),
            Repr::Diagonal(d) => {
                if d.len() > DENSE_DIM_CAP {
                    return Err(Error::DimensionOverflow {
                        dim: d.len(),
                        cap: DENSE_DIM_CAP,
                    });
                }
                Ok(DMatrix::from_fn(d.len(), d.len(), |i, j| {
                    if i == j {
                        C64::new(d[i], 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }))
            }
        }
    }

    pub fn trace(&self) -> C64 {
        match &self.repr {
            Repr::Diagonal(d) => C64::new(d.iter().sum(), 0.0),
            Repr::Dense(m) => m.trace(),
        }
    }

    /// Largest `|H_ij - conj(H_ji)|` relative to the largest entry.
    pub fn hermitian_deviation(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(_) => 0.0,
            Repr::Dense(m) => {
                let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
                let mut dev: f64 = 0.0;
                for i in 0..m.nrows() {
                    for j in 0..=i {
                        dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
                dev / scale
            }
        }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Row-major `[re, im]` pairs for debugging dumps.
    pub fn to_json(&self) -> Result<MatrixJson> {
        let m = self.to_dense()?;
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Ok(MatrixJson { rows: n, cols: n, data })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

/// Assembles the diagonal Zeeman + Ising Hamiltonian of `layout`.
pub fn build_hamiltonian(layout: &RegisterLayout) -> Result<HamiltonianMatrix> {
    build_hamiltonian_capped(layout, DEFAULT_DIM_CAP)
}

pub fn build_hamiltonian_capped(layout: &RegisterLayout, cap: usize) -> Result<HamiltonianMatrix> {
    layout.validate()?;
    let dims = layout.dims()?;
    let dim = total_dim(&dims)?;
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let sz: Vec<Vec<f64>> = layout.sites.iter().map(SpinSite::sz_diagonal).collect::<Result<_>>()?;
    // g mu_B B_i = 2 omega_i
    let zeeman: Vec<f64> = layout.omegas().iter().map(|w| 2.0 * w).collect();

    let diag = (0..dim)
        .map(|index| {
            let levels = basis_levels(&dims, index);
            let single: f64 = levels
                .iter()
                .enumerate()
                .map(|(i, &l)| zeeman[i] * sz[i][l])
                .sum();
            let coupled: f64 = layout
                .couplings
                .iter()
                .map(|c| c.j_mhz * sz[c.site_a][levels[c.site_a]] * sz[c.site_b][levels[c.site_b]])
                .sum();
            single + coupled
        })
        .collect();

    Ok(HamiltonianMatrix {
        sites: layout.sites.clone(),
        dims,
        repr: Repr::Diagonal(diag),
        kind: OperatorKind::Hermitian,
    })
}

/// Eigenvalues in descending order.
pub fn spectrum(h: &HamiltonianMatrix) -> Result<Vec<f64>> {
    if h.kind == OperatorKind::NonHermitian {
        return Err(Error::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    let mut values = match &h.repr {
        Repr::Diagonal(d) => d.clone(),
        Repr::Dense(m) => {
            h.check_hermitian()?;
            SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
        }
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Ket label such as `|+1/2,+3/2>` for a basis index.
pub fn basis_label(sites: &[SpinSite], index: usize) -> Result<String> {
    let dims: Vec<usize> = sites.iter().map(SpinSite::dim).collect::<Result<_>>()?;
    let levels = basis_levels(&dims, index);
    let parts: Vec<String> = sites
        .iter()
        .zip(&levels)
        .map(|(s, &l)| s.m_values().map(|m| m[l].to_string()))
        .collect::<Result<_>>()?;
    Ok(format!("|{}>", parts.join(",")))
}

/// One adjacent-level (`m - 1 -> m`) transition of one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub site: usize,
    pub site_label: String,
    /// `(label, m)` of every other site.
    pub control: Vec<(String, HalfInt)>,
    pub m_upper: HalfInt,
    pub m_lower: HalfInt,
    /// `E(m_upper) - E(m_lower)`, MHz.
    pub frequency_mhz: f64,
    /// Number of transitions of the same site (any control state) sharing this frequency.
    pub degeneracy: usize,
}

impl Transition {
    pub fn control_label(&self) -> String {
        self.control
            .iter()
            .map(|(l, m)| format!("{l}={m}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Every adjacent-level transition of every site, grouped by the state of the
/// remaining sites.
pub fn transition_table(h: &HamiltonianMatrix) -> Result<Vec<Transition>> {
    let energies = h.diagonal().ok_or(Error::NotDiagonal)?;
    if h.sites.is_empty() {
        return Err(Error::Layout("transition table needs site metadata".into()));
    }
    let dims = &h.dims;
    let m_values: Vec<Vec<HalfInt>> = h.sites.iter().map(SpinSite::m_values).collect::<Result<_>>()?;
    let mut table = Vec::new();

    for (site, site_info) in h.sites.iter().enumerate() {
        let start = table.len();
        for index in 0..energies.len() {
            let levels = basis_levels(dims, index);
            // visit each transition once, from its upper level
            if levels[site] + 1 >= dims[site] {
                continue;
            }
            let mut lower_levels = levels.clone();
            lower_levels[site] += 1;
            let lower = crate::state::basis_index(dims, &lower_levels)?;
            let control = h
                .sites
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != site)
                .map(|(i, s)| (s.label.clone(), m_values[i][levels[i]]))
                .collect();
            table.push(Transition {
                site,
                site_label: site_info.label.clone(),
                control,
                m_upper: m_values[site][levels[site]],
                m_lower: m_values[site][levels[site] + 1],
                frequency_mhz: energies[index] - energies[lower],
                degeneracy: 0,
            });
        }
        let freqs: Vec<f64> = table[start..].iter().map(|t| t.frequency_mhz).collect();
        for t in &mut table[start..] {
            let tol = 1e-9 * t.frequency_mhz.abs().max(1.0);
            t.degeneracy = freqs.iter().filter(|&&f| (f - t.frequency_mhz).abs() <= tol).count();
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sz_conventions() {
        let m = make_sz(&SpinSite::mobile("A", 0.0)).unwrap();
        assert_eq!(m.diagonal().as_slice(), &[1.0, -1.0]);
        let s = make_sz(&SpinSite::caged("A'", 0.0)).unwrap();
        assert_eq!(s.diagonal().as_slice(), &[1.5, 0.5, -0.5, -1.5]);
        let mut plain = SpinSite::mobile("e", 0.0);
        plain.convention_scale = 1.0;
        assert_eq!(make_sz(&plain).unwrap().diagonal().as_slice(), &[0.5, -0.5]);
    }

    #[test]
    fn unsupported_spin_named_in_error() {
        let mut s = SpinSite::caged("X", 0.0);
        s.spin_s = 1.0;
        let err = make_sz(&s).unwrap_err().to_string();
        assert!(err.contains('1') && err.contains("`X`"), "{err}");
    }

    #[test]
    fn hand_substituted_spectrum() {
        let h = build_hamiltonian(&RegisterLayout::pair(1.0, 2.0, 0.5)).unwrap();
        let expected = [8.75, 4.25, -0.25, -4.75, 3.25, -0.25, -3.75, -7.25];
        for (e, x) in h.diagonal().unwrap().iter().zip(expected) {
            assert_relative_eq!(*e, x, epsilon = 1e-12);
        }
        let sorted = spectrum(&h).unwrap();
        let expected_sorted = [8.75, 4.25, 3.25, -0.25, -0.25, -3.75, -4.75, -7.25];
        for (e, x) in sorted.iter().zip(expected_sorted) {
            assert_relative_eq!(*e, x, epsilon = 1e-12);
        }
        assert!(h.trace().norm() < 1e-12);
    }

    #[test]
    fn decoupled_limit_is_two_ladders() {
        let h = build_hamiltonian(&RegisterLayout::pair(1.0, 2.0, 0.0)).unwrap();
        let d = h.diagonal().unwrap();
        for (k, m) in [1.5, 0.5, -0.5, -1.5].iter().enumerate() {
            assert_relative_eq!(d[k], 2.0 + 4.0 * m, epsilon = 1e-12);
            assert_relative_eq!(d[4 + k], -2.0 + 4.0 * m, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_site_has_no_identity_factors() {
        let layout = RegisterLayout {
            sites: vec![SpinSite::caged("S", 0.0)],
            field: FieldProfile::Omegas(vec![3.0]),
            couplings: vec![],
            constants: PhysicalConstants::default(),
        };
        let h = build_hamiltonian(&layout).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.diagonal().unwrap(), &[9.0, 3.0, -3.0, -9.0]);
    }

    #[test]
    fn zero_and_dense_spectra() {
        let zero = HamiltonianMatrix::dense(DMatrix::zeros(5, 5), OperatorKind::Hermitian).unwrap();
        assert!(spectrum(&zero).unwrap().iter().all(|&e| e == 0.0));

        // sigma_y has eigenvalues +-1
        let i = C64::new(0.0, 1.0);
        let sy = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
        let ev = spectrum(&HamiltonianMatrix::dense(sy, OperatorKind::Hermitian).unwrap()).unwrap();
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(
            HamiltonianMatrix::dense(m.clone(), OperatorKind::Hermitian),
            Err(Error::NotHermitian { .. })
        ));
        let tagged = HamiltonianMatrix::dense(m, OperatorKind::NonHermitian).unwrap();
        assert!(spectrum(&tagged).is_err());
    }

    #[test]
    fn dimension_cap() {
        let layout = RegisterLayout {
            sites: (0..6).map(|k| SpinSite::caged(format!("S{k}"), 0.0)).collect(),
            field: FieldProfile::Omegas(vec![1.0; 6]),
            couplings: vec![],
            constants: PhysicalConstants::default(),
        };
        assert!(matches!(
            build_hamiltonian_capped(&layout, 1000),
            Err(Error::DimensionOverflow { dim: 4096, cap: 1000 })
        ));
    }

    #[test]
    fn bad_couplings_rejected() {
        let mut layout = RegisterLayout::pair(1.0, 2.0, 0.5);
        layout.couplings[0].site_b = 0;
        assert!(build_hamiltonian(&layout).is_err());
        layout.couplings[0].site_b = 7;
        assert!(build_hamiltonian(&layout).is_err());
    }

    #[test]
    fn static_ladder_conditional_spacing() {
        let h = build_hamiltonian(&RegisterLayout::pair(1.0, 2.0, 0.5)).unwrap();
        let table = transition_table(&h).unwrap();
        let statics: Vec<_> = table.iter().filter(|t| t.site == 1).collect();
        assert_eq!(statics.len(), 6);
        for t in &statics {
            let expected = if t.control[0].1 == HalfInt(1) { 4.5 } else { 3.5 };
            assert_relative_eq!(t.frequency_mhz, expected, epsilon = 1e-12);
            assert_eq!(t.degeneracy, 3);
        }
        // mobile transitions: 4 omega_1 + 2 J m'
        for t in table.iter().filter(|t| t.site == 0) {
            assert_relative_eq!(t.frequency_mhz, 4.0 + 2.0 * 0.5 * t.control[0].1.value(), epsilon = 1e-12);
        }
    }

    #[test]
    fn decoupled_ladders_merge() {
        let h = build_hamiltonian(&RegisterLayout::pair(1.0, 2.0, 0.0)).unwrap();
        for t in transition_table(&h).unwrap().iter().filter(|t| t.site == 1) {
            assert_relative_eq!(t.frequency_mhz, 4.0, epsilon = 1e-12);
            assert_eq!(t.degeneracy, 6);
        }
    }

    #[test]
    fn labels() {
        let sites = [SpinSite::mobile("A", 0.0), SpinSite::caged("A'", 0.0)];
        assert_eq!(basis_label(&sites, 0).unwrap(), "|+1/2,+3/2>");
        assert_eq!(basis_label(&sites, 7).unwrap(), "|-1/2,-3/2>");
        assert_eq!(HalfInt(-2).to_string(), "-1");
        assert_eq!(HalfInt(0).to_string(), "0");
    }

    #[test]
    fn gradient_profile_omegas() {
        let layout = RegisterLayout {
            sites: vec![SpinSite::mobile("A", 0.0), SpinSite::caged("A'", 1.14)],
            field: FieldProfile::Gradient {
                b_reference_t: 0.35,
                gradient_t_per_m: 4e5,
            },
            couplings: vec![],
            constants: PhysicalConstants::default(),
        };
        let w = layout.omegas();
        let c = PhysicalConstants::default();
        assert_relative_eq!(2.0 * (w[1] - w[0]), c.zeeman_mhz(4e5 * 1.14e-9), max_relative = 1e-9);
    }

    #[test]
    fn json_dump_is_row_major() {
        let h = build_hamiltonian(&RegisterLayout::pair(1.0, 2.0, 0.5)).unwrap();
        let j = h.to_json().unwrap();
        assert_eq!((j.rows, j.cols, j.data.len()), (8, 8, 64));
        assert_eq!(j.data[0], [8.75, 0.0]);
        assert_eq!(j.data[9], [4.25, 0.0]);
        assert_eq!(j.data[1], [0.0, 0.0]);
    }
}
