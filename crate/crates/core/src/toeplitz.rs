//! Lower-triangular Toeplitz factors `L` with `L·L = M_f`, and the
//! block-diagonal factor used for sliding windows.

use rayon::prelude::*;

use crate::decay::DecayFunction;
use crate::error::{Error, Result};
use crate::numeric::sum_of_squares;
use crate::series::{sqrt_series_for, SqrtSeries};

/// Dense reconstructions allocate `T²` values; refuse beyond this.
pub const MAX_DENSE_HORIZON: usize = 8192;

/// Lower-triangular Toeplitz matrix given by its first column `r(1), …, r(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzFactor {
    first_column: Vec<f64>,
    column_norm_sq: f64,
}

impl ToeplitzFactor {
    pub fn from_series(series: SqrtSeries) -> Self {
        Self::from_first_column(series.into_coeffs())
    }

    /// Any lower-triangular Toeplitz operator; callers that need `L·L = M_f`
    /// should go through [`build_factor`].
    pub fn from_first_column(first_column: Vec<f64>) -> Self {
        let column_norm_sq = sum_of_squares(&first_column);
        Self {
            first_column,
            column_norm_sq,
        }
    }

    pub fn first_column(&self) -> &[f64] {
        &self.first_column
    }

    pub fn horizon(&self) -> usize {
        self.first_column.len()
    }

    /// `‖L‖_{1→2} = √(Σ r(i)²)`.
    pub fn column_norm(&self) -> f64 {
        self.column_norm_sq.sqrt()
    }

    pub fn column_norm_sq(&self) -> f64 {
        self.column_norm_sq
    }

    /// `Σ_{i ≤ t} r(i)²` for every `t`, i.e. the diagonal of `L Lᵀ`.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.first_column
            .iter()
            .map(|r| {
                acc += r * r;
                acc
            })
            .collect()
    }

    /// Entry `t` (0-based) of `L·v`, reading only `v[..=t]`.
    pub fn row_dot(&self, t: usize, v: &[f64]) -> f64 {
        let r = &self.first_column;
        (0..=t).map(|i| r[t - i] * v[i]).sum()
    }

    /// `L·x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.horizon() {
            return Err(Error::Dimension {
                expected: self.horizon(),
                actual: x.len(),
            });
        }
        Ok((0..x.len()).map(|t| self.row_dot(t, x)).collect())
    }

    /// Dense `L` (row-major).
    pub fn dense(&self) -> Vec<f64> {
        let n = self.horizon();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                m[i * n + j] = self.first_column[i - j];
            }
        }
        m
    }
}

/// `L` with first column `r(i) = a_{i−1}` from the square-root series of `f`.
pub fn build_factor(f: &DecayFunction, horizon: usize) -> Result<ToeplitzFactor> {
    Ok(ToeplitzFactor::from_series(sqrt_series_for(f, horizon)?))
}

/// Dense `L·L`, formed by a plain triangular matrix product (no use of the
/// Toeplitz structure).
pub fn reconstruct_mf(factor: &ToeplitzFactor) -> Result<Vec<f64>> {
    let n = factor.horizon();
    if n > MAX_DENSE_HORIZON {
        return Err(Error::Range {
            what: "dense reconstruction horizon",
            value: n,
            max: MAX_DENSE_HORIZON,
        });
    }
    let l = factor.dense();
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        for j in 0..=i {
            row[j] = (j..=i).map(|k| l[i * n + k] * l[k * n + j]).sum();
        }
    });
    Ok(out)
}

/// Block-diagonal factor `diag(L₁, …, L₁, L₁[..a, ..a])` where `L₁·L₁` is the
/// all-ones lower triangle of size `w` and `a = T mod w`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFactor {
    window: usize,
    horizon: usize,
    base: ToeplitzFactor,
}

impl BlockFactor {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn base_factor(&self) -> &ToeplitzFactor {
        &self.base
    }

    pub fn block_count(&self) -> usize {
        self.horizon.div_ceil(self.window)
    }

    pub fn tail_size(&self) -> usize {
        self.horizon % self.window
    }

    /// Block sizes in order; the last is the tail when `T mod w ≠ 0`.
    pub fn block_sizes(&self) -> Vec<usize> {
        let full = self.horizon / self.window;
        let mut sizes = vec![self.window; full];
        if self.tail_size() > 0 {
            sizes.push(self.tail_size());
        }
        sizes
    }

    /// `(block start, offset within block)` for 0-based time `t`.
    pub fn locate(&self, t: usize) -> (usize, usize) {
        let offset = t % self.window;
        (t - offset, offset)
    }

    /// Entry `t` of `L′·v`, reading only the block containing `t`.
    pub fn row_dot(&self, t: usize, v: &[f64]) -> f64 {
        let (start, offset) = self.locate(t);
        self.base.row_dot(offset, &v[start..=t])
    }

    /// `L′·x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.horizon {
            return Err(Error::Dimension {
                expected: self.horizon,
                actual: x.len(),
            });
        }
        Ok((0..x.len()).map(|t| self.row_dot(t, x)).collect())
    }
}

pub fn build_block_factor(window: usize, horizon: usize) -> Result<BlockFactor> {
    if window == 0 {
        return Err(Error::Domain("window size must be at least 1".into()));
    }
    if horizon == 0 {
        return Err(Error::EmptyInput);
    }
    if window > horizon {
        return Err(Error::Domain(format!(
            "window {window} exceeds horizon {horizon}"
        )));
    }
    Ok(BlockFactor {
        window,
        horizon,
        base: build_factor(&DecayFunction::Constant, window)?,
    })
}
