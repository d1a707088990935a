//! dG and spline translation against brute-force oracles.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vlasov::basis::CellBasis;
use vlasov::dg::{self, advect_row, build_shift};
use vlasov::grid::{Axis, DistributionField, PhaseSpaceGrid};
use vlasov::spline::{self, advect_row_spline, bspline_kernel, build_spline};

fn lagrange_eval(nodes: &[f64], values: &[f64], xi: f64) -> f64 {
    let mut acc = 0.0;
    for (i, (xi_i, v)) in nodes.iter().zip(values).enumerate() {
        let mut l = 1.0;
        for (j, xj) in nodes.iter().enumerate() {
            if i != j {
                l *= (xi - xj) / (xi_i - xj);
            }
        }
        acc += l * v;
    }
    acc
}

fn legendre_orthonormal(j: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    let p = match j {
        0 => 1.0,
        1 => x,
        _ => {
            for k in 2..=j {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    };
    ((2 * j + 1) as f64 / 2.0).sqrt() * p
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Reconstruct the cellwise polynomial, translate it by `delta`, and project
/// back cell by cell, splitting each integral at the source-cell break.
fn dg_oracle(row: &[f64], basis: &CellBasis, h: f64, delta: f64) -> Vec<f64> {
    let n = basis.len();
    let cells = row.len() / n;
    let length = cells as f64 * h;
    let source = |x: f64| {
        let y = (x - delta).rem_euclid(length);
        let c = ((y / h).floor() as usize).min(cells - 1);
        let xi = 2.0 * (y - c as f64 * h) / h - 1.0;
        lagrange_eval(basis.nodes(), &row[c * n..(c + 1) * n], xi)
    };
    let mut out = vec![0.0; row.len()];
    for c in 0..cells {
        let left = c as f64 * h;
        let x_of = |xi: f64| left + 0.5 * (xi + 1.0) * h;
        // where the translated source changes cell, in reference coordinates
        let phase = (left - delta).rem_euclid(h) / h;
        let br = if phase == 0.0 { 1.0 } else { 1.0 - 2.0 * phase };
        let coeffs: Vec<f64> = (0..n)
            .map(|j| {
                let g = |xi: f64| source(x_of(xi)) * legendre_orthonormal(j, xi);
                // stay a hair inside each piece so `source` picks the right cell
                let eps = 1e-13;
                simpson(&g, -1.0, br - eps, 2000) + simpson(&g, br + eps, 1.0, 2000)
            })
            .collect();
        for (m, xi) in basis.nodes().iter().enumerate() {
            out[c * n + m] = (0..n).map(|j| coeffs[j] * legendre_orthonormal(j, *xi)).sum();
        }
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn dg_row_matches_reconstruct_translate_project() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let basis = CellBasis::new(2).unwrap();
    let h = 0.7;
    let row: Vec<f64> = (0..10 * 3).map(|_| rng.random_range(-1.0..1.0)).collect();
    for delta in [0.37 * h, -0.37 * h, 2.81 * h, -5.5 * h] {
        let got = advect_row(&row, &build_shift(delta, h, &basis)).unwrap();
        let oracle = dg_oracle(&row, &basis, h, delta);
        assert!(max_diff(&got, &oracle) < 1e-11, "delta {delta}: {:e}", max_diff(&got, &oracle));
    }
}

#[test]
fn whole_cell_shift_is_a_bitwise_permutation() {
    let basis = CellBasis::new(3).unwrap();
    let row: Vec<f64> = (0..24).map(|i| (i as f64 * 0.7).sin()).collect();
    let got = advect_row(&row, &build_shift(-2.0 * 0.5, 0.5, &basis)).unwrap();
    for c in 0..6 {
        assert_eq!(&got[c * 4..c * 4 + 4], &row[((c + 2) % 6) * 4..((c + 2) % 6) * 4 + 4]);
    }
}

fn dg_grid(cells: usize, degree: usize) -> Arc<PhaseSpaceGrid> {
    Arc::new(PhaseSpaceGrid::dg(Axis::new(0.0, 4.0, cells), Axis::new(-3.0, 3.0, cells), degree, degree).unwrap())
}

fn rough(grid: &Arc<PhaseSpaceGrid>, seed: u64) -> DistributionField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.dofs_x() * grid.dofs_v()).map(|_| rng.random_range(0.0..1.0)).collect();
    DistributionField::from_values(grid.clone(), values).unwrap()
}

#[test]
fn dg_advect_x_matches_rowwise_oracle() {
    let grid = dg_grid(8, 1);
    let f = rough(&grid, 3);
    let tau = 0.1;
    let g = dg::advect_x(&f, tau).unwrap();
    let basis = grid.basis_x().unwrap();
    for (j, v) in grid.v_positions().iter().enumerate() {
        let oracle = dg_oracle(f.row(j), basis, grid.h_x(), tau * v);
        assert!(max_diff(g.row(j), &oracle) < 1e-11);
    }
    // τ = 0 leaves every row alone
    assert_eq!(dg::advect_x(&f, 0.0).unwrap(), f);
}

fn column(f: &DistributionField, i: usize) -> Vec<f64> {
    (0..f.n_rows()).map(|j| f.get(j, i)).collect()
}

#[test]
fn dg_advect_v_matches_columnwise_oracle() {
    let grid = dg_grid(8, 2);
    let f = rough(&grid, 5);
    let basis = grid.basis_v().unwrap();
    let tau = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e: Vec<f64> = (0..grid.dofs_x()).map(|_| rng.random_range(-3.0..3.0)).collect();
    let g = dg::advect_v(&f, &e, tau).unwrap();
    for (i, ei) in e.iter().enumerate() {
        let oracle = dg_oracle(&column(&f, i), basis, grid.h_v(), tau * ei);
        assert!(max_diff(&column(&g, i), &oracle) < 1e-11);
    }
    // E ≡ 0 is the identity, E ≡ c is the row stencil on every column
    assert_eq!(dg::advect_v(&f, &vec![0.0; e.len()], tau).unwrap(), f);
    let c = vec![1.3; e.len()];
    let g = dg::advect_v(&f, &c, tau).unwrap();
    let op = build_shift(tau * 1.3, grid.h_v(), basis);
    for i in 0..grid.dofs_x() {
        assert!(max_diff(&column(&g, i), &advect_row(&column(&f, i), &op).unwrap()) < 1e-15);
    }
}

/// Random values in the interior velocity cells, zero near the seam so that a
/// sub-cell shift never wraps mass around.
fn interior_column(basis: &CellBasis, cells: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = basis.len();
    (0..cells * n)
        .map(|k| {
            let c = k / n;
            if c < 2 || c + 2 >= cells {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect()
}

/// `Σ w v^p f` over one column with cell width `h` on `[v_min, …)`.
fn moment(col: &[f64], basis: &CellBasis, h: f64, v_min: f64, p: i32) -> f64 {
    let n = basis.len();
    col.iter()
        .enumerate()
        .map(|(k, f)| {
            let (c, m) = (k / n, k % n);
            let v = v_min + (c as f64 + 0.5 * (basis.nodes()[m] + 1.0)) * h;
            0.5 * h * basis.weights()[m] * v.powi(p) * f
        })
        .sum()
}

#[test]
fn velocity_moments_under_translation() {
    let (cells, h, v_min) = (12, 0.5, -3.0);
    let delta = 0.23 * h;
    for degree in 0..=3 {
        let basis = CellBasis::new(degree).unwrap();
        let col = interior_column(&basis, cells, 21 + degree as u64);
        let out = advect_row(&col, &build_shift(delta, h, &basis)).unwrap();
        let m = |c: &[f64], p| moment(c, &basis, h, v_min, p);
        let mass = m(&col, 0);
        assert!((m(&out, 0) - mass).abs() < 1e-13 * mass);
        // exact translation: ∫ v g = ∫ v f + δ ∫ f, ∫ v² g = ∫ v² f + 2δ ∫ v f + δ² ∫ f
        let current = m(&col, 1) + delta * mass;
        let kinetic = m(&col, 2) + 2.0 * delta * m(&col, 1) + delta * delta * mass;
        let current_err = (m(&out, 1) - current).abs() / mass;
        let kinetic_err = (m(&out, 2) - kinetic).abs() / mass;
        // Degree 0 keeps the current too: the projection error is the first
        // Legendre moment of the translated data in each cell, which for
        // piecewise constants is (f_{c−1} − f_c)·φ(β) and telescopes to zero.
        assert!(current_err < 1e-12, "degree {degree}: current {current_err:e}");
        if degree >= 2 {
            assert!(kinetic_err < 1e-12, "degree {degree}: kinetic {kinetic_err:e}");
        } else {
            assert!(kinetic_err > 1e-8, "degree {degree} should lose kinetic energy: {kinetic_err:e}");
        }
    }
}

/// The cyclic `(1, 4, 1) / 6` system, solved densely.
fn dense_coefficients(data: &[f64]) -> Vec<f64> {
    let n = data.len();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = (i as isize - j as isize).rem_euclid(n as isize);
        if d == 0 {
            4.0 / 6.0
        } else if d == 1 || d == n as isize - 1 {
            1.0 / 6.0
        } else {
            0.0
        }
    });
    let x = a.lu().solve(&DVector::from_column_slice(data)).unwrap();
    x.iter().copied().collect()
}

#[test]
fn spline_coefficients_of_a_kronecker_delta_match_dense_solve() {
    for n in [4, 5, 16, 33] {
        let mut data = vec![0.0; n];
        data[n / 3] = 1.0;
        let s = build_spline(&data, 0.1).unwrap();
        assert!(max_diff(s.coefficients(), &dense_coefficients(&data)) < 1e-12);
    }
}

#[test]
fn spline_evaluation_matches_naive_kernel_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 20;
    let h = 0.3;
    let length = n as f64 * h;
    let data: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = build_spline(&data, h).unwrap();
    for _ in 0..50 {
        let x = rng.random_range(-length..2.0 * length);
        let naive: f64 = (0..n)
            .flat_map(|k| [-2.0, -1.0, 0.0, 1.0, 2.0].map(move |p| (k, p)))
            .map(|(k, p)| s.coefficients()[k] * bspline_kernel((x - k as f64 * h - p * length) / h))
            .sum();
        assert!((s.eval(x) - naive).abs() < 1e-13);
    }
}

#[test]
fn spline_interpolation_is_fourth_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let length = 2.0 * std::f64::consts::PI;
    let points: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..length)).collect();
    let error = |n: usize| {
        let h = length / n as f64;
        let data: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let s = build_spline(&data, h).unwrap();
        points.iter().map(|x| (s.eval(*x) - x.sin()).abs()).fold(0.0, f64::max)
    };
    let (e64, e128) = (error(64), error(128));
    let h64 = length / 64.0;
    assert!(e64 <= h64.powi(4), "{e64:e}");
    let ratio = e64 / e128;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn spline_row_shift_matches_direct_evaluation() {
    let n = 32;
    let h = 0.25;
    let data: Vec<f64> = (0..n).map(|i| (-(i as f64 * h - 4.0).powi(2)).exp() + 0.1 * (i as f64).cos()).collect();
    let s = build_spline(&data, h).unwrap();
    let shifted = advect_row_spline(&data, 0.3 * h, h).unwrap();
    for (i, got) in shifted.iter().enumerate() {
        assert!((got - s.eval(i as f64 * h - 0.3 * h)).abs() < 1e-13);
    }
    let whole = advect_row_spline(&data, h, h).unwrap();
    for i in 0..n {
        assert!((whole[i] - data[(i + n - 1) % n]).abs() < 1e-13);
    }
    assert!(max_diff(&advect_row_spline(&data, 0.0, h).unwrap(), &data) == 0.0);
}

#[test]
fn spline_field_shifts_match_row_shifts() {
    let grid = Arc::new(PhaseSpaceGrid::spline(Axis::new(0.0, 4.0, 16), Axis::new(-3.0, 3.0, 12)).unwrap());
    let f = rough(&grid, 8);
    let tau = 0.17;
    let g = spline::advect_x_spline(&f, tau).unwrap();
    for (j, v) in grid.v_positions().iter().enumerate() {
        let row = advect_row_spline(f.row(j), tau * v, grid.h_x()).unwrap();
        assert!(max_diff(g.row(j), &row) < 1e-14);
    }
    let e: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
    let g = spline::advect_v_spline(&f, &e, tau).unwrap();
    for (i, ei) in e.iter().enumerate() {
        let col = advect_row_spline(&column(&f, i), tau * ei, grid.h_v()).unwrap();
        assert!(max_diff(&column(&g, i), &col) < 1e-14);
    }
}
