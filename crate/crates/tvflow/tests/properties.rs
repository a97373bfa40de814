//! Property tests for the structural invariants.

use ndarray::Array2;
use proptest::prelude::*;

use tvflow::degrade;
use tvflow::grid::ImageGrid;
use tvflow::operators;
use tvflow::spectral;
use tvflow::stopping::{self, StoppingConfig};

/// Strategy: a grid with shape in `rows x cols` ranges and values in
/// [-255, 255].
fn grid_strategy(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = ImageGrid> {
    (rows, cols)
        .prop_flat_map(|(m, n)| {
            prop::collection::vec(-255.0..255.0_f64, m * n).prop_map(move |vals| (m, n, vals))
        })
        .prop_map(|(m, n, vals)| {
            let values = Array2::from_shape_vec((m, n), vals).unwrap();
            ImageGrid::new(values, 1.0 / m.max(n) as f64).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vec_array_round_trips(u in grid_strategy(2..=6, 2..=6)) {
        let v = u.vec();
        let back = v.array(u.rows(), u.cols()).unwrap();
        prop_assert_eq!(&back, &u);
        // and the other direction
        let forward = back.vec();
        prop_assert_eq!(forward.as_slice(), v.as_slice());
    }

    #[test]
    fn vec_is_linear(
        u in grid_strategy(3..=5, 3..=5),
        a in -3.0..3.0_f64,
        b in -3.0..3.0_f64,
    ) {
        let w = ImageGrid::from_fn(u.rows(), u.cols(), u.h(), |i, j| {
            (i as f64 - 1.5) * (j as f64 + 0.5)
        }).unwrap();
        let combo = ImageGrid::from_fn(u.rows(), u.cols(), u.h(), |i, j| {
            a * u.get(i, j) + b * w.get(i, j)
        }).unwrap();
        for (p, &x) in combo.vec().as_slice().iter().enumerate() {
            let want = a * u.vec().as_slice()[p] + b * w.vec().as_slice()[p];
            prop_assert_eq!(x, want);
        }
    }

    #[test]
    fn neumann_sample_clamps(u in grid_strategy(2..=5, 2..=5), i in -1..=5_isize, j in -1..=5_isize) {
        let m = u.rows() as isize;
        let n = u.cols() as isize;
        prop_assume!(i <= m && j <= n);
        let got = u.neumann_sample(i, j).unwrap();
        let want = u.get(
            i.clamp(0, m - 1) as usize,
            j.clamp(0, n - 1) as usize,
        );
        prop_assert_eq!(got, want);
    }

    #[test]
    fn coefficients_stay_in_bounds(u in grid_strategy(2..=8, 2..=8), eps_idx in 0..3usize) {
        let eps = [1.0, 0.1, 0.01][eps_idx];
        let c = operators::coefficients(&u, eps).unwrap();
        for &v in c.values() {
            prop_assert!(v > 0.0 && v <= 1.0 / eps);
        }
    }

    #[test]
    fn stencil_matches_assembly(
        u in grid_strategy(2..=7, 2..=7),
        eps_idx in 0..3usize,
        q_idx in 0..2usize,
    ) {
        let eps = [1.0, 0.1, 0.01][eps_idx];
        let q = [0.0, 1.0][q_idx];
        let f = spectral::assemble_f(&u, eps, q).unwrap();
        let via_matrix = f.apply(u.vec().as_slice());
        let direct = operators::apply(&u, eps, q).unwrap().vec();
        let scale = direct.as_slice().iter().fold(1.0_f64, |a, &x| a.max(x.abs()));
        for (a, b) in via_matrix.iter().zip(direct.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn constant_mobility_flux_sums_to_zero(u in grid_strategy(3..=8, 3..=8)) {
        let f = operators::apply(&u, 0.1, 0.0).unwrap();
        let total: f64 = f.values().iter().sum();
        let l1: f64 = f.values().iter().map(|v| v.abs()).sum();
        prop_assert!(total.abs() <= 1e-9 * l1.max(1e-300));
    }

    #[test]
    fn tv_energy_is_positively_homogeneous(u in grid_strategy(3..=6, 3..=6), a in -5.0..5.0_f64) {
        let scaled = ImageGrid::from_fn(u.rows(), u.cols(), u.h(), |i, j| a * u.get(i, j)).unwrap();
        let lhs = operators::tv_energy(&scaled);
        let rhs = a.abs() * operators::tv_energy(&u);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn rde_is_invariant_under_scaling(
        u in grid_strategy(6..=12, 6..=12),
        a in prop::sample::select(vec![-10.0, -0.5, 0.25, 3.0, 100.0]),
    ) {
        let cfg = StoppingConfig { rho: 0.2, tol: 1.0 };
        let scaled = ImageGrid::from_fn(u.rows(), u.cols(), u.h(), |i, j| a * u.get(i, j)).unwrap();
        let x = stopping::rde(&u, &cfg).unwrap();
        let y = stopping::rde(&scaled, &cfg).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.max(y).max(1e-300));
    }

    #[test]
    fn jitter_rows_are_shifted_copies(
        u in grid_strategy(3..=8, 6..=12),
        amp in 1..4u32,
        seed in 0..1000u64,
    ) {
        let out = degrade::jitter_rows(&u, amp, seed).unwrap();
        let n = u.cols();
        for i in 0..u.rows() {
            // some shift in [-amp, amp] explains the whole row
            let explains = |s: i64| {
                (0..n).all(|j| {
                    let src = (j as i64 - s).clamp(0, n as i64 - 1) as usize;
                    out.get(i, j) == u.get(i, src)
                })
            };
            let found = (-(amp as i64)..=amp as i64).any(explains);
            prop_assert!(found, "row {} is not a clamped shift", i);
        }
    }
}
