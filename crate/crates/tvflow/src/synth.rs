//! Built-in synthetic test images.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Scaled indicator of a centered square: 255 inside a `side x side`
/// square centered in a `size x size` image, 0 outside.
pub fn square_indicator(size: usize, side: usize, h: f64) -> Result<ImageGrid> {
    if side == 0 || side > size {
        return Err(Error::InvalidParameter(format!(
            "square side {side} must lie in [1, {size}]"
        )));
    }
    let start = (size - side) / 2;
    let end = start + side;
    ImageGrid::from_fn(size, size, h, |i, j| {
        if (start..end).contains(&i) && (start..end).contains(&j) {
            255.0
        } else {
            0.0
        }
    })
}

/// Smooth deterministic phantom on the [0, 255] scale: a handful of
/// Gaussian bumps over a tilted background. Its rms intensity is around
/// 135, so sigma-20 noise amounts to roughly 15% relative error.
pub fn smooth_phantom(rows: usize, cols: usize, h: f64) -> Result<ImageGrid> {
    let bump = |x: f64, y: f64, cx: f64, cy: f64, w: f64| {
        (-((x - cx).powi(2) + (y - cy).powi(2)) / w).exp()
    };
    ImageGrid::from_fn(rows, cols, h, |i, j| {
        let x = i as f64 / (rows - 1) as f64;
        let y = j as f64 / (cols - 1) as f64;
        110.0
            + 25.0 * (x - 0.5)
            + 60.0 * bump(x, y, 0.35, 0.40, 0.050)
            + 70.0 * bump(x, y, 0.70, 0.65, 0.030)
            - 40.0 * bump(x, y, 0.25, 0.75, 0.040)
    })
}

/// Seeded random field smoothed by repeated 3x3 box blurs (replicated
/// edges), rescaled to span roughly [0, 255]. Useful as a generic smooth
/// test image with reproducible randomness.
pub fn smooth_random(
    rows: usize,
    cols: usize,
    h: f64,
    seed: u64,
    blur_passes: usize,
) -> Result<ImageGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = Array2::from_shape_fn((rows, cols), |_| rng.random_range(0.0..1.0));
    let mut next = field.clone();
    for _ in 0..blur_passes {
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0.0;
                for di in -1..=1_isize {
                    for dj in -1..=1_isize {
                        let ii = (i as isize + di).clamp(0, rows as isize - 1) as usize;
                        let jj = (j as isize + dj).clamp(0, cols as isize - 1) as usize;
                        acc += field[(ii, jj)];
                    }
                }
                next[(i, j)] = acc / 9.0;
            }
        }
        std::mem::swap(&mut field, &mut next);
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &field {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    field.mapv_inplace(|v| 255.0 * (v - lo) / span);
    ImageGrid::new(field, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_geometry() {
        let u = square_indicator(205, 160, 1.0 / 205.0).unwrap();
        // the probe pixel used by the indicator experiment sits inside
        assert_eq!(u.get(105, 99), 255.0);
        assert_eq!(u.get(0, 0), 0.0);
        let area: f64 = u.as_slice().iter().filter(|&&v| v > 127.5).count() as f64;
        assert_eq!(area, 160.0 * 160.0);
    }

    #[test]
    fn square_rejects_bad_side() {
        assert!(square_indicator(10, 0, 0.1).is_err());
        assert!(square_indicator(10, 11, 0.1).is_err());
    }

    #[test]
    fn smooth_random_is_deterministic_and_in_range() {
        let a = smooth_random(16, 16, 1.0 / 16.0, 3, 4).unwrap();
        let b = smooth_random(16, 16, 1.0 / 16.0, 3, 4).unwrap();
        assert_eq!(a, b);
        for &v in a.as_slice() {
            assert!((0.0..=255.0).contains(&v));
        }
        let c = smooth_random(16, 16, 1.0 / 16.0, 4, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn phantom_is_smooth_and_in_range() {
        let u = smooth_phantom(64, 64, 1.0 / 64.0).unwrap();
        for &v in u.as_slice() {
            assert!((0.0..=255.0).contains(&v), "value {v} out of range");
        }
        // neighboring pixels change slowly
        for i in 0..63 {
            for j in 0..63 {
                assert!((u.get(i + 1, j) - u.get(i, j)).abs() < 8.0);
                assert!((u.get(i, j + 1) - u.get(i, j)).abs() < 8.0);
            }
        }
        let rms = (u.as_slice().iter().map(|v| v * v).sum::<f64>() / 4096.0).sqrt();
        assert!((110.0..=165.0).contains(&rms), "rms {rms}");
    }
}
