//! Image grid and its column-stacked vector form.
//!
//! An [`ImageGrid`] is an `M x N` real intensity field on a uniform grid
//! with spatial step `h`. Pixel `(i, j)` means row `i`, column `j`,
//! zero-based. All boundary handling in this crate is homogeneous
//! Neumann, realized by replicating the nearest interior value into a
//! one-cell ghost band.
//!
//! [`FlatVector`] is the column-stacked ("vec") form used by the explicit
//! matrix representations: column 0 top to bottom, then column 1, and so
//! on. Flat index `p = j * M + i`.

use ndarray::Array2;

use crate::error::{Error, Result};

/// `M x N` intensity field with uniform spatial step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    values: Array2<f64>,
    h: f64,
}

impl ImageGrid {
    /// Builds a grid, validating shape (`M, N >= 2`), `h > 0` and that all
    /// entries are finite.
    pub fn new(values: Array2<f64>, h: f64) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 2x2, got {rows}x{cols}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spatial step h must be positive and finite, got {h}"
            )));
        }
        if let Some(((i, j), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                op: "grid construction",
                i,
                j,
            });
        }
        Ok(Self { values, h })
    }

    /// Builds a grid from a function of `(row, col)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        h: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        Self::new(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)), h)
    }

    /// Constant-valued grid.
    pub fn constant(rows: usize, cols: usize, h: f64, value: f64) -> Result<Self> {
        Self::from_fn(rows, cols, h, |_, _| value)
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_parts_unchecked(values: Array2<f64>, h: f64) -> Self {
        Self { values, h }
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same values on a different spatial step.
    pub fn with_h(self, h: f64) -> Result<Self> {
        Self::new(self.values, h)
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Row-major contiguous view of the values.
    pub fn as_slice(&self) -> &[f64] {
        self.values
            .as_slice()
            .expect("owned Array2 is standard layout")
    }

    /// Mutable access for the integrator; not part of the public contract.
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        self.values
            .as_slice_mut()
            .expect("owned Array2 is standard layout")
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Samples the grid under the Neumann boundary condition with one ghost
    /// cell on each side: indices in `[-1, M] x [-1, N]`, where the ghost
    /// cells replicate the nearest interior value (zero normal derivative).
    ///
    /// Indices outside the ghost band are rejected.
    pub fn neumann_sample(&self, i: isize, j: isize) -> Result<f64> {
        let (m, n) = (self.rows() as isize, self.cols() as isize);
        if i < -1 || i > m || j < -1 || j > n {
            return Err(Error::IndexOutOfBounds {
                i,
                j,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(self.at(i, j))
    }

    /// Clamped sample used by the stencils; no band check.
    #[inline]
    pub(crate) fn at(&self, i: isize, j: isize) -> f64 {
        let i = i.clamp(0, self.rows() as isize - 1) as usize;
        let j = j.clamp(0, self.cols() as isize - 1) as usize;
        self.values[(i, j)]
    }

    /// Column-stacks the grid into its flat vector form.
    pub fn vec(&self) -> FlatVector {
        let (m, n) = self.values.dim();
        let mut data = Vec::with_capacity(m * n);
        for j in 0..n {
            for i in 0..m {
                data.push(self.values[(i, j)]);
            }
        }
        FlatVector {
            data,
            rows: m,
            h: self.h,
        }
    }
}

/// Column-stacked image vector; inverse of [`ImageGrid::vec`].
///
/// The ordering is fixed: entry `p` holds pixel `(p mod M, p div M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatVector {
    data: Vec<f64>,
    rows: usize,
    h: f64,
}

impl FlatVector {
    /// Wraps raw column-stacked data with the row count `rows` of the grid
    /// it came from and its spatial step.
    pub fn from_raw(data: Vec<f64>, rows: usize, h: f64) -> Self {
        Self { data, rows, h }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Reshapes back to an `rows x cols` grid. Fails if `rows * cols`
    /// differs from the vector length.
    pub fn array(&self, rows: usize, cols: usize) -> Result<ImageGrid> {
        if rows * cols != self.data.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} elements for {rows}x{cols}", rows * cols),
                got: format!("{}", self.data.len()),
            });
        }
        let values = Array2::from_shape_fn((rows, cols), |(i, j)| self.data[j * rows + i]);
        ImageGrid::new(values, self.h)
    }
}
