//! Pure states over a tensor-product register.
//!
//! The basis index enumerates the last site's levels fastest. Level 0 of every
//! site is its highest magnetic quantum number `m = +s`.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for the unit-norm check.
pub const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTag {
    /// Produced by unitary dynamics or explicit renormalization.
    Unit,
    /// Produced by no-jump (non-Hermitian) evolution; norm is at most 1.
    Unnormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
    norm_tag: NormTag,
}

impl RegisterState {
    /// Wraps an amplitude vector. The dimension must equal the product of `dims`.
    pub fn from_amplitudes(dims: Vec<usize>, amplitudes: DVector<C64>, norm_tag: NormTag) -> Result<Self> {
        let dim = total_dim(&dims)?;
        if amplitudes.len() != dim {
            return Err(Error::RegisterShape(format!(
                "{} amplitudes for dims {:?} (expected {dim})",
                amplitudes.len(),
                dims
            )));
        }
        Ok(Self {
            dims,
            amplitudes,
            norm_tag,
        })
    }

    /// Unit-norm computational basis state with the given level index per site.
    pub fn basis(dims: Vec<usize>, levels: &[usize]) -> Result<Self> {
        let index = basis_index(&dims, levels)?;
        let mut amps = DVector::zeros(total_dim(&dims)?);
        amps[index] = C64::new(1.0, 0.0);
        Self::from_amplitudes(dims, amps, NormTag::Unit)
    }

    /// Tensor product of single-site states, in order.
    pub fn product(factors: &[&RegisterState]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut amps = DVector::from_element(1, C64::new(1.0, 0.0));
        let mut tag = NormTag::Unit;
        for f in factors {
            dims.extend_from_slice(&f.dims);
            amps = amps.kronecker(&f.amplitudes);
            if f.norm_tag == NormTag::Unnormalized {
                tag = NormTag::Unnormalized;
            }
        }
        Self::from_amplitudes(dims, amps, tag)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, levels: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[basis_index(&self.dims, levels)?])
    }

    pub fn norm_tag(&self) -> NormTag {
        self.norm_tag
    }

    pub fn set_norm_tag(&mut self, tag: NormTag) {
        self.norm_tag = tag;
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Invariant("cannot normalize the zero state".into()));
        }
        self.amplitudes.unscale_mut(n);
        self.norm_tag = NormTag::Unit;
        Ok(n)
    }

    pub fn normalized(&self) -> Result<Self> {
        let mut s = self.clone();
        s.normalize()?;
        Ok(s)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &RegisterState) -> Result<C64> {
        self.check_same_shape(other)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<a|b>|^2 / (|a|^2 |b|^2)`; global phases drop out.
    pub fn fidelity(&self, other: &RegisterState) -> Result<f64> {
        let overlap = self.inner(other)?.norm_sqr();
        Ok(overlap / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Probability of each level of `site`, for a unit-norm state.
    pub fn site_populations(&self, site: usize) -> Result<Vec<f64>> {
        let (stride, d) = self.site_stride(site)?;
        let mut pops = vec![0.0; d];
        for (i, a) in self.amplitudes.iter().enumerate() {
            pops[(i / stride) % d] += a.norm_sqr();
        }
        Ok(pops)
    }

    /// `(stride, local_dim)` for indexing `site` in the flat amplitude vector.
    pub fn site_stride(&self, site: usize) -> Result<(usize, usize)> {
        site_stride(&self.dims, site)
    }

    /// Checks the unit-norm or no-gain invariant carried by the tag.
    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm();
        match self.norm_tag {
            NormTag::Unit if (n - 1.0).abs() >= UNIT_NORM_TOL => Err(Error::Invariant(format!(
                "unit-norm state has norm {n:.15}"
            ))),
            NormTag::Unnormalized if n > 1.0 + UNIT_NORM_TOL => Err(Error::Invariant(format!(
                "decayed state gained norm: {n:.15}"
            ))),
            _ => Ok(()),
        }
    }

    fn check_same_shape(&self, other: &RegisterState) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::RegisterShape(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    /// Serializable snapshot: `[re, im]` pairs in basis order.
    pub fn to_record(&self) -> StateRecord {
        StateRecord {
            dims: self.dims.clone(),
            norm_tag: self.norm_tag,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub dims: Vec<usize>,
    pub norm_tag: NormTag,
    pub amplitudes: Vec<[f64; 2]>,
}

pub(crate) fn total_dim(dims: &[usize]) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::RegisterShape("zero-dimensional site".into()));
        }
        total = total
            .checked_mul(d)
            .ok_or(Error::DimensionOverflow { dim: usize::MAX, cap: usize::MAX })?;
    }
    Ok(total)
}

pub(crate) fn site_stride(dims: &[usize], site: usize) -> Result<(usize, usize)> {
    if site >= dims.len() {
        return Err(Error::RegisterShape(format!(
            "site index {site} out of range for {} sites",
            dims.len()
        )));
    }
    let stride = dims[site + 1..].iter().product();
    Ok((stride, dims[site]))
}

pub fn basis_index(dims: &[usize], levels: &[usize]) -> Result<usize> {
    if levels.len() != dims.len() {
        return Err(Error::RegisterShape(format!(
            "{} levels given for {} sites",
            levels.len(),
            dims.len()
        )));
    }
    let mut index = 0;
    for (&level, &d) in levels.iter().zip(dims) {
        if level >= d {
            return Err(Error::RegisterShape(format!("level {level} out of range for dimension {d}")));
        }
        index = index * d + level;
    }
    Ok(index)
}

/// Inverse of [`basis_index`].
pub fn basis_levels(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut levels = vec![0; dims.len()];
    for (slot, &d) in levels.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    levels
}
