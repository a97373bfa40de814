//! Synthetic degradation: additive Gaussian noise and row jitter.
//!
//! Both degradations are deterministic given a 64-bit seed. The generator
//! is pinned to ChaCha8 so outputs are bit-identical across runs and
//! platforms; jitter derives one generator per row from `(seed, row)`
//! through a splitmix64 mix, so rows are independent of each other and of
//! the noise stream.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Degradation parameters: noise level, jitter amplitude, seed.
///
/// Both zero means the identity degradation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationSpec {
    /// Standard deviation of the additive Gaussian noise, intensity units.
    pub noise_sigma: f64,
    /// Maximum absolute horizontal shift per row, pixels.
    pub jitter_amplitude: u32,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(
        seed ^ (row as u64).wrapping_mul(0xA24BAED4963EE407),
    ))
}

/// Adds i.i.d. `N(0, sigma^2)` noise, sampled row-major from a ChaCha8
/// stream seeded with `seed`. Values are not clamped; clamping happens
/// only at image export.
pub fn add_gaussian_noise(u: &ImageGrid, sigma: f64, seed: u64) -> Result<ImageGrid> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(u.clone());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParameter(format!("bad noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = u.clone();
    for v in out.as_mut_slice() {
        *v += normal.sample(&mut rng);
    }
    Ok(out)
}

/// Displaces one row horizontally by `shift` pixels with edge replication:
/// `out[j] = row[clamp(j - shift)]`, so a positive shift moves content to
/// the right and replicates the first pixel.
pub(crate) fn shift_row(row: &[f64], shift: i64, out: &mut [f64]) {
    let n = row.len() as i64;
    for (j, o) in out.iter_mut().enumerate() {
        let src = (j as i64 - shift).clamp(0, n - 1) as usize;
        *o = row[src];
    }
}

/// Applies an independent uniform integer shift in `[-amplitude, amplitude]`
/// to every row, with edge replication for exposed pixels.
pub fn jitter_rows(u: &ImageGrid, amplitude: u32, seed: u64) -> Result<ImageGrid> {
    if amplitude as usize >= u.cols() {
        return Err(Error::InvalidParameter(format!(
            "jitter amplitude {amplitude} must be smaller than the column count {}",
            u.cols()
        )));
    }
    if amplitude == 0 {
        return Ok(u.clone());
    }
    let (m, n) = (u.rows(), u.cols());
    let mut out = u.clone();
    let src = u.as_slice().to_vec();
    let dst = out.as_mut_slice();
    let j = amplitude as i64;
    for i in 0..m {
        let shift = row_rng(seed, i).random_range(-j..=j);
        shift_row(
            &src[i * n..(i + 1) * n],
            shift,
            &mut dst[i * n..(i + 1) * n],
        );
    }
    Ok(out)
}

/// Full degradation: jitter first, then additive noise (matching how the
/// combined restoration experiment is set up).
pub fn degrade(u: &ImageGrid, spec: &DegradationSpec) -> Result<ImageGrid> {
    spec.validate()?;
    let jittered = jitter_rows(u, spec.jitter_amplitude, spec.seed)?;
    add_gaussian_noise(&jittered, spec.noise_sigma, spec.seed)
}
