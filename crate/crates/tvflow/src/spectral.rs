//! Explicit assembly of the discrete operators and spectral verification.
//!
//! The matrix form of the divergence stencil under column stacking is the
//! block-tridiagonal `G` (diagonal blocks tridiagonal in the row index,
//! couplings between adjacent columns diagonal); the mobility enters as a
//! diagonal scaling `F = B G`. One integrator step is the linear map
//!
//! ```text
//!     [ u ]        [ I + dt^2 F    dt (1 - dt eta) I ] [ u ]
//!     [ v ]   <-   [ dt F          (1 - dt eta) I    ] [ v ]
//! ```
//!
//! written `z <- A z`. `G` is symmetric, weakly diagonally dominant with
//! non-positive diagonal, so its spectrum is non-positive; under the
//! safeguarded step rule every eigenvalue of `A` has modulus at most 1,
//! with complex (underdamped) modes sitting exactly on the circle of
//! radius `sqrt(1 - eta dt)`. [`verify_spectrum`] recomputes all of this
//! with dense eigensolves; these assemblies double as the oracle for the
//! matrix-free kernels in [`crate::operators`].

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowConfig;
use crate::grid::ImageGrid;
use crate::operators;

/// Largest `M * N` accepted by [`verify_spectrum`]'s dense eigensolves.
pub const DENSE_BUDGET: usize = 400;

/// Which operator a [`SparseOperator`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    /// Divergence stencil matrix (symmetric, non-positive spectrum).
    G,
    /// Mobility-scaled operator `B G`.
    F,
    /// Iteration matrix of one symplectic step (dimension `2 M N`).
    A,
}

/// Triplet-form sparse matrix. Duplicate entries add.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub dim: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub tag: OperatorTag,
}

impl SparseOperator {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.triplets {
            dense[(r, c)] += v;
        }
        dense
    }

    /// Matrix-vector product straight off the triplets.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "vector length mismatch");
        let mut y = vec![0.0; self.dim];
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
        }
        y
    }

    /// Exact structural symmetry: for every entry `(r, c, v)` there is a
    /// matching `(c, r, v)` with the identical value.
    pub fn is_symmetric(&self) -> bool {
        let mut sorted: Vec<(usize, usize, f64)> = self.triplets.clone();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut transposed: Vec<(usize, usize, f64)> =
            self.triplets.iter().map(|&(r, c, v)| (c, r, v)).collect();
        transposed.sort_by_key(|t| (t.0, t.1));
        sorted == transposed
    }
}

/// Assembles the divergence stencil matrix of `u` with the boundary rows
/// folded for the replicated-ghost (zero-flux) boundary, so that
/// `G vec(u)` equals the matrix-free stencil for every image.
pub fn assemble_g(u: &ImageGrid, eps: f64) -> Result<SparseOperator> {
    let c = operators::coefficients(u, eps)?;
    let (m, n) = (u.rows(), u.cols());
    let inv_h2 = 1.0 / (u.h() * u.h());
    let mut triplets = Vec::with_capacity(5 * m * n);
    for j in 0..n {
        for i in 0..m {
            let p = j * m + i;
            let mut diag = 0.0;
            let push = |q: usize, v: f64, triplets: &mut Vec<(usize, usize, f64)>| {
                triplets.push((p, q, v * inv_h2));
            };
            if i > 0 {
                let v = c.get(i - 1, j);
                push(p - 1, v, &mut triplets);
                diag += v;
            }
            if j > 0 {
                let v = c.get(i, j - 1);
                push(p - m, v, &mut triplets);
                diag += v;
            }
            if i + 1 < m {
                let v = c.get(i, j);
                push(p + 1, v, &mut triplets);
                diag += v;
            }
            if j + 1 < n {
                let v = c.get(i, j);
                push(p + m, v, &mut triplets);
                diag += v;
            }
            triplets.push((p, p, -diag * inv_h2));
        }
    }
    Ok(SparseOperator {
        dim: m * n,
        triplets,
        tag: OperatorTag::G,
    })
}

/// Assembles `F = B G` where `B` is the diagonal mobility.
pub fn assemble_f(u: &ImageGrid, eps: f64, q: f64) -> Result<SparseOperator> {
    let g = assemble_g(u, eps)?;
    if q == 0.0 {
        return Ok(SparseOperator {
            tag: OperatorTag::F,
            ..g
        });
    }
    let b = operators::mobility(u, q)?;
    let m = u.rows();
    let triplets = g
        .triplets
        .into_iter()
        .map(|(r, c, v)| {
            let (i, j) = (r % m, r / m);
            (r, c, b.get(i, j) * v)
        })
        .collect();
    Ok(SparseOperator {
        dim: g.dim,
        triplets,
        tag: OperatorTag::F,
    })
}

/// Assembles the `2 M N` iteration matrix of one step of size `dt` on the
/// stacked state `(u; v)`.
pub fn assemble_a(u: &ImageGrid, cfg: &FlowConfig, dt: f64) -> Result<SparseOperator> {
    cfg.validate()?;
    let f = assemble_f(u, cfg.eps, cfg.kind.exponent())?;
    let nn = f.dim;
    let eta = cfg.eta_effective(dt);
    let damp = 1.0 - dt * eta;
    let mut triplets = Vec::with_capacity(2 * f.triplets.len() + 2 * nn);
    for &(r, c, v) in &f.triplets {
        triplets.push((r, c, dt * dt * v)); // upper-left dt^2 F part
        triplets.push((nn + r, c, dt * v)); // lower-left dt F
    }
    for p in 0..nn {
        triplets.push((p, p, 1.0)); // upper-left identity part
        triplets.push((p, nn + p, dt * damp)); // upper-right
        triplets.push((nn + p, nn + p, damp)); // lower-right
    }
    Ok(SparseOperator {
        dim: 2 * nn,
        triplets,
        tag: OperatorTag::A,
    })
}

/// Counts of eigenmodes per damping regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RegimeCounts {
    pub overdamped: usize,
    pub underdamped: usize,
    pub critical: usize,
}

/// Damping regime of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingRegime {
    Overdamped,
    Underdamped,
    Critical,
}

/// Dense spectral verification summary.
///
/// Reporting only; the assertions live in the test suites.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Largest eigenvalue of the negated divergence matrix.
    #[serde(rename = "lambda_max_negG")]
    pub lambda_max_neg_g: f64,
    /// Gershgorin row bound on that eigenvalue (no mobility scaling).
    pub gershgorin_bound: f64,
    /// Largest eigenvalue modulus of the iteration matrix.
    pub max_mu_abs: f64,
    pub regime_counts: RegimeCounts,
    /// Moduli of all iteration-matrix eigenvalues (not serialized).
    #[serde(skip)]
    pub mu_magnitudes: Vec<f64>,
    /// Regime of each mode of the mobility-symmetrized operator.
    #[serde(skip)]
    pub regimes: Vec<DampingRegime>,
}

/// Closed-form eigenvalue pair of the 2x2 block the iteration matrix
/// reduces to on an eigenvector of the operator with `-F`-eigenvalue `nu`:
///
/// ```text
///     mu = 1 - dt/2 [ (dt nu + eta) +- sqrt((dt nu + eta)^2 - 4 nu) ]
/// ```
pub fn closed_form_mu(nu: f64, eta: f64, dt: f64) -> [Complex<f64>; 2] {
    let s = dt * nu + eta;
    let disc = s * s - 4.0 * nu;
    if disc >= 0.0 {
        let root = disc.sqrt();
        [
            Complex::new(1.0 - 0.5 * dt * (s + root), 0.0),
            Complex::new(1.0 - 0.5 * dt * (s - root), 0.0),
        ]
    } else {
        let root = (-disc).sqrt();
        let re = 1.0 - 0.5 * dt * s;
        [
            Complex::new(re, -0.5 * dt * root),
            Complex::new(re, 0.5 * dt * root),
        ]
    }
}

fn classify(nu: f64, eta: f64, dt: f64) -> DampingRegime {
    let s = dt * nu + eta;
    let disc = s * s - 4.0 * nu;
    let scale = (s * s).max(4.0 * nu.abs()).max(1e-300);
    if disc.abs() <= 1e-12 * scale {
        DampingRegime::Critical
    } else if disc > 0.0 {
        DampingRegime::Overdamped
    } else {
        DampingRegime::Underdamped
    }
}

/// Runs dense eigensolves on the assembled operators and reports the
/// spectral quantities the step-size rule relies on.
///
/// Grids with more than [`DENSE_BUDGET`] unknowns are rejected.
pub fn verify_spectrum(u: &ImageGrid, cfg: &FlowConfig, dt: f64) -> Result<SpectralReport> {
    cfg.validate()?;
    let nn = u.rows() * u.cols();
    if nn > DENSE_BUDGET {
        return Err(Error::SpectralBudget {
            limit: DENSE_BUDGET,
            got: nn,
        });
    }

    let g = assemble_g(u, cfg.eps)?;
    let neg_g = -g.to_dense();
    let lambda_max_neg_g = neg_g
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let c = operators::coefficients(u, cfg.eps)?;
    let gershgorin_bound = operators::gershgorin_of_neg_divergence(c.values(), u.h());

    let a = assemble_a(u, cfg, dt)?;
    let mu: Vec<f64> = a
        .to_dense()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    let max_mu_abs = mu.iter().cloned().fold(0.0, f64::max);

    // Mode regimes from the symmetrized operator sqrt(B) G sqrt(B), whose
    // spectrum matches B G away from the mobility kernel.
    let q = cfg.kind.exponent();
    let b = operators::mobility(u, q)?;
    let m = u.rows();
    let mut sym: DMatrix<f64> = DMatrix::zeros(nn, nn);
    for &(r, cidx, v) in &g.triplets {
        let br = b.get(r % m, r / m).sqrt();
        let bc = b.get(cidx % m, cidx / m).sqrt();
        sym[(r, cidx)] += -br * v * bc;
    }
    let eta = cfg.eta_effective(dt);
    let regimes: Vec<DampingRegime> = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&nu| classify(nu, eta, dt))
        .collect();
    let mut counts = RegimeCounts::default();
    for r in &regimes {
        match r {
            DampingRegime::Overdamped => counts.overdamped += 1,
            DampingRegime::Underdamped => counts.underdamped += 1,
            DampingRegime::Critical => counts.critical += 1,
        }
    }

    Ok(SpectralReport {
        lambda_max_neg_g,
        gershgorin_bound,
        max_mu_abs,
        regime_counts: counts,
        mu_magnitudes: mu,
        regimes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{self, DtPolicy, FlowKind, FlowState, Order};
    use crate::operators::apply;

    fn rng_grid(m: usize, n: usize, h: f64, seed: u64) -> ImageGrid {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        ImageGrid::from_fn(m, n, h, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 255.0
        })
        .unwrap()
    }

    fn cfg(kind: FlowKind, eta: f64, eps: f64, dt: f64) -> FlowConfig {
        FlowConfig {
            kind,
            order: Order::Second,
            eta,
            eps,
            dt_policy: DtPolicy::Fixed(dt),
            max_iters: 1,
            stop: None,
            record_stride: 1,
        }
    }

    #[test]
    fn hand_assembled_2x2_constant() {
        // All coefficients are 1 (eps = 1, flat image, h = 1); the folded
        // matrix is the graph Laplacian of a 2x2 grid, negated.
        let u = ImageGrid::constant(2, 2, 1.0, 5.0).unwrap();
        let g = assemble_g(&u, 1.0).unwrap().to_dense();
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[
                -2.0, 1.0, 1.0, 0.0, //
                1.0, -2.0, 0.0, 1.0, //
                1.0, 0.0, -2.0, 1.0, //
                0.0, 1.0, 1.0, -2.0,
            ],
        );
        assert_eq!(g, want);
    }

    #[test]
    fn assembled_g_is_symmetric_with_zero_row_sums() {
        let u = rng_grid(6, 6, 0.25, 42);
        let g = assemble_g(&u, 0.1).unwrap();
        assert!(g.is_symmetric());
        let dense = g.to_dense();
        for r in 0..g.dim {
            let row_sum: f64 = (0..g.dim).map(|c| dense[(r, c)]).sum();
            let row_abs: f64 = (0..g.dim).map(|c| dense[(r, c)].abs()).sum();
            assert!(row_sum.abs() <= 1e-12 * row_abs.max(1.0));
            assert!(dense[(r, r)] <= 0.0);
        }
    }

    #[test]
    fn g_matvec_matches_matrix_free_stencil() {
        for (m, n, seed) in [(5, 5, 1), (4, 7, 2), (8, 3, 3)] {
            let u = rng_grid(m, n, 1.0 / m as f64, seed);
            for eps in [1.0, 0.1, 0.01] {
                let g = assemble_g(&u, eps).unwrap();
                let y = g.apply(u.vec().as_slice());
                let direct = apply(&u, eps, 0.0).unwrap();
                let direct_vec = direct.vec();
                let scale = direct_vec
                    .as_slice()
                    .iter()
                    .fold(0.0_f64, |a, &x| a.max(x.abs()));
                for (a, b) in y.iter().zip(direct_vec.as_slice()) {
                    assert!((a - b).abs() <= 1e-12 * scale.max(1.0), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn f_matvec_matches_matrix_free_stencil_q1() {
        let u = rng_grid(6, 5, 0.2, 9);
        for eps in [1.0, 0.1] {
            let f = assemble_f(&u, eps, 1.0).unwrap();
            let y = f.apply(u.vec().as_slice());
            let direct = apply(&u, eps, 1.0).unwrap().vec();
            let scale = direct
                .as_slice()
                .iter()
                .fold(0.0_f64, |a, &x| a.max(x.abs()));
            for (a, b) in y.iter().zip(direct.as_slice()) {
                assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn gershgorin_dominates_dense_spectrum() {
        for seed in [4, 5, 6] {
            let u = rng_grid(6, 6, 0.5, seed);
            for eps in [1.0, 0.5] {
                let report =
                    verify_spectrum(&u, &cfg(FlowKind::Tvf, 1.0, eps, 0.01), 0.01).unwrap();
                assert!(report.gershgorin_bound >= report.lambda_max_neg_g - 1e-9);
            }
        }
    }

    #[test]
    fn scaled_gershgorin_dominates_symmetrized_spectrum() {
        // the step rule's bound b_max * gersh(-G) must dominate the
        // spectrum of sqrt(B) (-G) sqrt(B), which carries the eigenvalues
        // of -F = -BG
        for (seed, q) in [(31, 0.0), (32, 1.0), (33, 1.0)] {
            let u = rng_grid(6, 6, 0.25, seed);
            for eps in [1.0, 0.5, 0.1] {
                let bound = crate::operators::gershgorin_bound(&u, eps, q).unwrap();
                let g = assemble_g(&u, eps).unwrap();
                let b = crate::operators::mobility(&u, q).unwrap();
                let mut sym: DMatrix<f64> = DMatrix::zeros(g.dim, g.dim);
                for &(r, c, v) in &g.triplets {
                    let br = b.get(r % 6, r / 6).sqrt();
                    let bc = b.get(c % 6, c / 6).sqrt();
                    sym[(r, c)] += -br * v * bc;
                }
                let top = sym
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    bound >= top - 1e-9,
                    "bound {bound} < top eigenvalue {top} (q = {q}, eps = {eps})"
                );
            }
        }
    }

    #[test]
    fn overdamped_modes_stay_strictly_inside_the_unit_interval() {
        let u = rng_grid(6, 5, 0.2, 41);
        for eta in [0.5, 2.0, 8.0] {
            let eps = 0.5;
            let bound = crate::operators::gershgorin_bound(&u, eps, 0.0).unwrap();
            let dt = (1.0_f64 / eta).min(1.0 / bound.sqrt());
            let lambdas = (-assemble_g(&u, eps).unwrap().to_dense())
                .symmetric_eigen()
                .eigenvalues;
            // the kernel mode nu = 0 pins mu = 1 exactly (the constant
            // image is a fixed point); strict interior containment is a
            // statement about the genuinely damped modes
            let mut overdamped = 0;
            for &nu in lambdas.iter().filter(|&&nu| nu > 1e-6) {
                let s = dt * nu + eta;
                if s * s > 4.0 * nu {
                    overdamped += 1;
                    for mu in closed_form_mu(nu, eta, dt) {
                        assert!(mu.im == 0.0);
                        assert!(
                            mu.re > -1.0 && mu.re < 1.0,
                            "overdamped mode {} escaped (-1, 1) at eta {eta}",
                            mu.re
                        );
                    }
                }
            }
            assert!(overdamped > 0, "no overdamped modes at eta {eta}");
        }
    }

    #[test]
    fn neg_g_spectrum_is_nonnegative() {
        let u = rng_grid(7, 5, 0.3, 10);
        let report = verify_spectrum(&u, &cfg(FlowKind::Tvf, 1.0, 0.1, 0.001), 0.001).unwrap();
        assert!(report.lambda_max_neg_g >= -1e-10);
        let g = assemble_g(&u, 0.1).unwrap();
        let max_eig_g = g
            .to_dense()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_eig_g <= 1e-10, "max eig of G = {max_eig_g}");
    }

    #[test]
    fn iteration_matrix_reproduces_one_step() {
        let u = rng_grid(4, 4, 0.25, 77);
        for kind in [FlowKind::Tvf, FlowKind::Lsmcf] {
            let c = cfg(kind, 2.0, 0.1, 0.01);
            let a = assemble_a(&u, &c, 0.01).unwrap();

            let state = FlowState::initial(u.clone());
            let next = flow::step(&state, &c).unwrap();

            let mut z = u.vec().as_slice().to_vec();
            z.resize(32, 0.0);
            let z_next = a.apply(&z);

            let u_next = next.u.vec();
            let v_next = next.v.vec();
            let scale = z_next.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
            for p in 0..16 {
                assert!((z_next[p] - u_next.as_slice()[p]).abs() <= 1e-12 * scale);
                assert!((z_next[16 + p] - v_next.as_slice()[p]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn flat_image_mcf_iteration_matrix_is_block_triangular() {
        // F = 0, so the spectrum is {1, 1 - eta dt}, each with the grid's
        // multiplicity; this is the closed form at nu = 0.
        let u = ImageGrid::constant(3, 3, 1.0, 7.0).unwrap();
        let (eta, dt) = (2.0, 0.1);
        let c = cfg(FlowKind::Lsmcf, eta, 1.0, dt);
        let a = assemble_a(&u, &c, dt).unwrap();
        let eigs = a.to_dense().complex_eigenvalues();
        let mut ones = 0;
        let mut damped = 0;
        for z in eigs.iter() {
            assert!(z.im.abs() < 1e-12);
            if (z.re - 1.0).abs() < 1e-10 {
                ones += 1;
            } else if (z.re - (1.0 - eta * dt)).abs() < 1e-10 {
                damped += 1;
            } else {
                panic!("unexpected eigenvalue {z}");
            }
        }
        assert_eq!((ones, damped), (9, 9));
        let [mu_minus, mu_plus] = closed_form_mu(0.0, eta, dt);
        assert_eq!(mu_plus.re, 1.0);
        assert!((mu_minus.re - (1.0 - eta * dt)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_dense_spectrum_for_constant_mobility() {
        let u = rng_grid(3, 4, 0.5, 15);
        let (eta, eps) = (1.5, 0.5);
        let c = cfg(FlowKind::Tvf, eta, eps, 0.0);
        let bound = crate::operators::gershgorin_bound(&u, eps, 0.0).unwrap();
        let dt = (1.0_f64 / eta).min(1.0 / bound.sqrt());
        let c = FlowConfig {
            dt_policy: DtPolicy::Fixed(dt),
            ..c
        };

        let lambdas = (-assemble_g(&u, eps).unwrap().to_dense())
            .symmetric_eigen()
            .eigenvalues;
        let mut expected: Vec<(f64, f64)> = lambdas
            .iter()
            .flat_map(|&l| closed_form_mu(l, eta, dt).map(|z| (z.re, z.im)))
            .collect();
        let mut got: Vec<(f64, f64)> = assemble_a(&u, &c, dt)
            .unwrap()
            .to_dense()
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect();
        let key = |p: &(f64, f64)| (p.0, p.1);
        expected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (e, g) in expected.iter().zip(&got) {
            assert!(
                (e.0 - g.0).abs() <= 1e-9 && (e.1 - g.1).abs() <= 1e-9,
                "{e:?} vs {g:?}"
            );
        }
    }

    #[test]
    fn safeguarded_step_gives_contractive_iteration_matrix() {
        for (seed, q, eps) in [(1, 0.0, 1.0), (2, 1.0, 0.1), (3, 1.0, 0.01), (4, 0.0, 0.01)] {
            let u = rng_grid(5, 5, 0.2, seed);
            let kind = if q == 0.0 {
                FlowKind::Tvf
            } else {
                FlowKind::Lsmcf
            };
            let eta = 1.0;
            let mut c = cfg(kind, eta, eps, 0.1);
            c.dt_policy = DtPolicy::Safeguarded(10.0);
            let dt = flow::choose_dt(&FlowState::initial(u.clone()), &c).unwrap();
            let report = verify_spectrum(&u, &c, dt).unwrap();
            assert!(
                report.max_mu_abs <= 1.0 + 1e-10,
                "spectral radius {} at dt {}",
                report.max_mu_abs,
                dt
            );
        }
    }

    #[test]
    fn underdamped_modes_sit_on_the_damping_circle() {
        let u = rng_grid(5, 4, 0.25, 23);
        let (eta, eps) = (0.5, 1.0);
        let bound = crate::operators::gershgorin_bound(&u, eps, 0.0).unwrap();
        let dt = (1.0_f64 / eta).min(1.0 / bound.sqrt());
        let c = cfg(FlowKind::Tvf, eta, eps, dt);
        let report = verify_spectrum(&u, &c, dt).unwrap();
        assert!(report.regime_counts.underdamped > 0, "vacuous test setup");
        let radius = (1.0 - eta * dt).sqrt();
        let complex_mus: Vec<f64> = assemble_a(&u, &c, dt)
            .unwrap()
            .to_dense()
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() > 1e-9)
            .map(|z| z.norm())
            .collect();
        assert!(!complex_mus.is_empty());
        for mu in complex_mus {
            assert!((mu - radius).abs() <= 1e-10, "{mu} vs {radius}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let u = ImageGrid::constant(21, 21, 1.0, 0.0).unwrap();
        let c = cfg(FlowKind::Tvf, 1.0, 1.0, 0.01);
        match verify_spectrum(&u, &c, 0.01) {
            Err(Error::SpectralBudget { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn report_serializes_with_stable_field_names() {
        let u = rng_grid(4, 4, 0.25, 6);
        let c = cfg(FlowKind::Tvf, 1.0, 0.5, 0.01);
        let report = verify_spectrum(&u, &c, 0.01).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "lambda_max_negG",
            "gershgorin_bound",
            "max_mu_abs",
            "regime_counts",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
