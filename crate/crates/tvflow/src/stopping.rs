//! Fourier-domain stopping statistic.
//!
//! Noise sits in the high frequencies, which under the unnormalized 2-D
//! DFT layout (DC at index (0,0), as produced by stacked 1-D transforms)
//! occupy the central block of the magnitude matrix. For a band parameter
//! `rho` in (0, 0.5) the block is, in 1-based inclusive indices,
//! `[floor(rho M), M - floor(rho M)] x [floor(rho N), N - floor(rho N)]`.
//!
//! The relative denoising efficiency (RDE) is the ratio of the summed
//! magnitudes over that block to the global maximum magnitude. It is
//! invariant under rescaling of the image, and an evolution is stopped
//! once it drops below a tolerance.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// High-frequency band fraction `rho` and stopping tolerance `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingConfig {
    pub rho: f64,
    pub tol: f64,
}

impl StoppingConfig {
    pub fn new(rho: f64, tol: f64) -> Result<Self> {
        let cfg = Self { rho, tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "band fraction rho must lie in (0, 0.5), got {}",
                self.rho
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stopping tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Inclusive 0-based index range of the high-frequency band along one axis.
fn band(rho: f64, len: usize) -> Result<(usize, usize)> {
    let k = (rho * len as f64).floor() as usize;
    if k < 1 {
        return Err(Error::InvalidParameter(format!(
            "high-frequency band is empty: floor(rho * {len}) = 0; \
             use a larger image or larger rho"
        )));
    }
    Ok((k - 1, len - k - 1))
}

/// Reusable 2-D DFT plan for one grid shape.
///
/// Keeps the FFT plans and scratch buffers alive so per-iteration stopping
/// checks do not re-plan. The transform is the unnormalized forward DFT:
/// the (0,0) coefficient equals the sum of the image.
pub struct Dft2 {
    rows: usize,
    cols: usize,
    fft_len_rows: Arc<dyn Fft<f64>>,
    fft_len_cols: Arc<dyn Fft<f64>>,
    work: Vec<Complex64>,
    work_t: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Dft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let fft_len_rows = planner.plan_fft_forward(rows);
        let fft_len_cols = planner.plan_fft_forward(cols);
        let scratch_len = fft_len_rows
            .get_inplace_scratch_len()
            .max(fft_len_cols.get_inplace_scratch_len());
        Self {
            rows,
            cols,
            fft_len_rows,
            fft_len_cols,
            work: vec![Complex64::default(); rows * cols],
            work_t: vec![Complex64::default(); rows * cols],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// Writes `|F(u)|` into `out` (row-frequency by column-frequency).
    pub fn magnitudes_into(&mut self, u: &ImageGrid, out: &mut Array2<f64>) {
        let (m, n) = (self.rows, self.cols);
        assert_eq!((u.rows(), u.cols()), (m, n), "grid shape mismatch");
        let uv = u.as_slice();

        // transform along columns: transpose so each column is contiguous
        for i in 0..m {
            for j in 0..n {
                self.work_t[j * m + i] = Complex64::new(uv[i * n + j], 0.0);
            }
        }
        for chunk in self.work_t.chunks_exact_mut(m) {
            self.fft_len_rows
                .process_with_scratch(chunk, &mut self.scratch);
        }
        // transpose back and transform along rows
        for j in 0..n {
            for i in 0..m {
                self.work[i * n + j] = self.work_t[j * m + i];
            }
        }
        for chunk in self.work.chunks_exact_mut(n) {
            self.fft_len_cols
                .process_with_scratch(chunk, &mut self.scratch);
        }

        let ov = out.as_slice_mut().expect("standard layout");
        for (o, w) in ov.iter_mut().zip(&self.work) {
            *o = w.norm();
        }
    }

    /// RDE of `u`: high-frequency energy over global max magnitude.
    /// An identically zero image yields 0 by convention.
    pub fn rde(&mut self, u: &ImageGrid, cfg: &StoppingConfig) -> Result<f64> {
        let mut mags = Array2::zeros((self.rows, self.cols));
        self.magnitudes_into(u, &mut mags);
        rde_from_magnitudes(&mags, cfg)
    }
}

/// Magnitudes of the unnormalized forward 2-D DFT of `u`.
pub fn dft2_magnitudes(u: &ImageGrid) -> Array2<f64> {
    let mut out = Array2::zeros((u.rows(), u.cols()));
    Dft2::new(u.rows(), u.cols()).magnitudes_into(u, &mut out);
    out
}

/// Sum of DFT magnitudes over the high-frequency block.
pub fn high_freq_energy(u: &ImageGrid, cfg: &StoppingConfig) -> Result<f64> {
    cfg.validate()?;
    let mags = dft2_magnitudes(u);
    energy_from_magnitudes(&mags, cfg)
}

fn energy_from_magnitudes(mags: &Array2<f64>, cfg: &StoppingConfig) -> Result<f64> {
    let (m, n) = mags.dim();
    let (r0, r1) = band(cfg.rho, m)?;
    let (c0, c1) = band(cfg.rho, n)?;
    let mut sum = 0.0;
    for i in r0..=r1 {
        for j in c0..=c1 {
            sum += mags[(i, j)];
        }
    }
    Ok(sum)
}

pub(crate) fn rde_from_magnitudes(mags: &Array2<f64>, cfg: &StoppingConfig) -> Result<f64> {
    cfg.validate()?;
    let energy = energy_from_magnitudes(mags, cfg)?;
    let max = mags.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok(energy / max)
}

/// Relative denoising efficiency of `u`.
pub fn rde(u: &ImageGrid, cfg: &StoppingConfig) -> Result<f64> {
    cfg.validate()?;
    let mags = dft2_magnitudes(u);
    rde_from_magnitudes(&mags, cfg)
}
