//! The nonlinear spatial operator shared by both flows.
//!
//! Both flow families evolve under `b(u) * div( c(u) grad u )` where
//!
//! * `c(u) = 1 / (eps + |grad u|)` is the regularized inverse gradient
//!   magnitude, evaluated with forward differences,
//! * `b(u) = |grad u|^q` is the mobility, evaluated with central
//!   differences; `q = 0` gives the constant-mobility TV flow, `q = 1`
//!   the level-set mean-curvature flow.
//!
//! The divergence is the five-point stencil
//!
//! ```text
//! (1/h^2) [ c(i-1,j) u(i-1,j) + c(i,j-1) u(i,j-1)
//!           - (2 c(i,j) + c(i-1,j) + c(i,j-1)) u(i,j)
//!           + c(i,j) u(i,j+1) + c(i,j) u(i+1,j) ]
//! ```
//!
//! with Neumann ghost cells replicating edge values, so boundary fluxes
//! vanish. Everything here is matrix-free; the explicit sparse assembly
//! living in [`crate::spectral`] is the oracle these kernels are tested
//! against.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Regularized inverse-gradient coefficient field `c(i,j) = 1/(eps + |grad u|)`.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    values: Array2<f64>,
    eps: f64,
}

impl CoefficientField {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }
}

/// Mobility field `b(i,j) = |grad u|^q` (central differences).
#[derive(Debug, Clone)]
pub struct MobilityField {
    values: Array2<f64>,
    exponent: f64,
}

impl MobilityField {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "regularization eps must be positive and finite, got {eps}"
        )));
    }
    Ok(())
}

fn check_exponent(q: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&q) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mobility exponent q must lie in [0, 2], got {q}"
        )));
    }
    Ok(())
}

/// Fills `c` with the coefficient field of `u`. `c` must be `M x N`.
pub(crate) fn fill_coefficients(u: &ImageGrid, eps: f64, c: &mut Array2<f64>) {
    let (m, n) = (u.rows(), u.cols());
    let inv_h = 1.0 / u.h();
    let uv = u.as_slice();
    let cv = c.as_slice_mut().expect("standard layout");
    for i in 0..m {
        for j in 0..n {
            let p = i * n + j;
            let center = uv[p];
            let d_down = if i + 1 < m { uv[p + n] - center } else { 0.0 };
            let d_right = if j + 1 < n { uv[p + 1] - center } else { 0.0 };
            let mag = inv_h * (d_down * d_down + d_right * d_right).sqrt();
            cv[p] = 1.0 / (eps + mag);
        }
    }
}

/// Fills `b` with the mobility field `|grad u|^q`; `q > 0` assumed
/// (`q = 0` callers use a constant field instead).
pub(crate) fn fill_mobility(u: &ImageGrid, q: f64, b: &mut Array2<f64>) {
    let (m, n) = (u.rows(), u.cols());
    let inv_2h = 1.0 / (2.0 * u.h());
    let uv = u.as_slice();
    let bv = b.as_slice_mut().expect("standard layout");
    for i in 0..m {
        for j in 0..n {
            let p = i * n + j;
            let up = uv[i.saturating_sub(1) * n + j];
            let down = uv[(i + 1).min(m - 1) * n + j];
            let left = uv[i * n + j.saturating_sub(1)];
            let right = uv[i * n + (j + 1).min(n - 1)];
            let dv = down - up;
            let dh = right - left;
            let mag = inv_2h * (dv * dv + dh * dh).sqrt();
            bv[p] = if q == 1.0 {
                mag
            } else if q == 2.0 {
                mag * mag
            } else {
                mag.powf(q)
            };
        }
    }
}

/// Applies the five-point divergence stencil scaled by the mobility:
/// `out = b .* div(c grad u)`. `b = None` means constant mobility 1.
pub(crate) fn stencil_apply(
    u: &ImageGrid,
    c: &Array2<f64>,
    b: Option<&Array2<f64>>,
    out: &mut Array2<f64>,
) -> Result<()> {
    let (m, n) = (u.rows(), u.cols());
    let inv_h2 = 1.0 / (u.h() * u.h());
    let uv = u.as_slice();
    let cv = c.as_slice().expect("standard layout");
    let bv = b.map(|b| b.as_slice().expect("standard layout"));
    let ov = out.as_slice_mut().expect("standard layout");
    for i in 0..m {
        for j in 0..n {
            let p = i * n + j;
            let center = uv[p];
            let mut acc = 0.0;
            if i > 0 {
                acc += cv[p - n] * (uv[p - n] - center);
            }
            if j > 0 {
                acc += cv[p - 1] * (uv[p - 1] - center);
            }
            if i + 1 < m {
                acc += cv[p] * (uv[p + n] - center);
            }
            if j + 1 < n {
                acc += cv[p] * (uv[p + 1] - center);
            }
            let val = match bv {
                Some(bv) => bv[p] * inv_h2 * acc,
                None => inv_h2 * acc,
            };
            if !val.is_finite() {
                return Err(Error::NonFinite {
                    op: "divergence stencil",
                    i,
                    j,
                });
            }
            ov[p] = val;
        }
    }
    Ok(())
}

/// The coefficient field `c(i,j) = 1/(eps + (1/h) sqrt(dx^2 + dy^2))` with
/// forward differences and Neumann ghosts.
pub fn coefficients(u: &ImageGrid, eps: f64) -> Result<CoefficientField> {
    check_eps(eps)?;
    let mut values = Array2::zeros((u.rows(), u.cols()));
    fill_coefficients(u, eps, &mut values);
    Ok(CoefficientField { values, eps })
}

/// The mobility field `b = |grad u|^q` with central differences and
/// Neumann ghosts. `q = 0` returns the all-ones field exactly.
pub fn mobility(u: &ImageGrid, q: f64) -> Result<MobilityField> {
    check_exponent(q)?;
    let mut values = Array2::zeros((u.rows(), u.cols()));
    if q == 0.0 {
        values.fill(1.0);
    } else {
        fill_mobility(u, q, &mut values);
    }
    Ok(MobilityField {
        values,
        exponent: q,
    })
}

/// Matrix-free application of the flow operator: `b(u) .* div(c(u) grad u)`.
pub fn apply(u: &ImageGrid, eps: f64, q: f64) -> Result<ImageGrid> {
    check_eps(eps)?;
    check_exponent(q)?;
    let (m, n) = (u.rows(), u.cols());
    let mut c = Array2::zeros((m, n));
    fill_coefficients(u, eps, &mut c);
    let mut out = Array2::zeros((m, n));
    if q == 0.0 {
        stencil_apply(u, &c, None, &mut out)?;
    } else {
        let mut b = Array2::zeros((m, n));
        fill_mobility(u, q, &mut b);
        stencil_apply(u, &c, Some(&b), &mut out)?;
    }
    Ok(ImageGrid::from_parts_unchecked(out, u.h()))
}

/// Gershgorin row-sum bound on the largest eigenvalue of the negated
/// operator, computed from the stencil entries directly.
///
/// For each pixel the absolute diagonal of the negated divergence matrix
/// equals its off-diagonal row sum (fluxes balance), so the row bound is
/// twice the folded diagonal. The result is scaled by the largest mobility
/// value, making it an upper bound on the spectrum that drives the
/// safeguarded step-size rule. A constant image under `q > 0` has zero
/// mobility everywhere and yields 0.
pub fn gershgorin_bound(u: &ImageGrid, eps: f64, q: f64) -> Result<f64> {
    check_eps(eps)?;
    check_exponent(q)?;
    let (m, n) = (u.rows(), u.cols());
    let mut c = Array2::zeros((m, n));
    fill_coefficients(u, eps, &mut c);
    let b_max = if q == 0.0 { 1.0 } else { mobility(u, q)?.max() };
    Ok(b_max * gershgorin_of_neg_divergence(&c, u.h()))
}

/// Max over rows of `|diag| + sum |offdiag|` for the negated divergence
/// matrix built from the coefficient field `c`.
pub(crate) fn gershgorin_of_neg_divergence(c: &Array2<f64>, h: f64) -> f64 {
    let (m, n) = c.dim();
    let inv_h2 = 1.0 / (h * h);
    let cv = c.as_slice().expect("standard layout");
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..n {
            let p = i * n + j;
            let mut d = 0.0;
            if i > 0 {
                d += cv[p - n];
            }
            if j > 0 {
                d += cv[p - 1];
            }
            if i + 1 < m {
                d += cv[p];
            }
            if j + 1 < n {
                d += cv[p];
            }
            worst = worst.max(2.0 * d * inv_h2);
        }
    }
    worst
}

/// Discrete total variation: `h * sum sqrt(dx^2 + dy^2)` over forward
/// differences with Neumann ghosts, consistent with the gradient magnitude
/// inside the coefficient field.
pub fn tv_energy(u: &ImageGrid) -> f64 {
    let (m, n) = (u.rows(), u.cols());
    let uv = u.as_slice();
    let mut sum = 0.0;
    for i in 0..m {
        for j in 0..n {
            let p = i * n + j;
            let center = uv[p];
            let d_down = if i + 1 < m { uv[p + n] - center } else { 0.0 };
            let d_right = if j + 1 < n { uv[p + 1] - center } else { 0.0 };
            sum += (d_down * d_down + d_right * d_right).sqrt();
        }
    }
    u.h() * sum
}
