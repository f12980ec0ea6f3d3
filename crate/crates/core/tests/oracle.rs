#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::path::PathBuf;

use fracpade::fem::{assemble, build_rhs, deflate_mean};
use fracpade::mesh::{gen_sphere, tensor_grid};
use fracpade::oracle::{
    conv_rate, dense_fractional, l2_error_on_mesh, legendre_sum, sign_coefficient_jacobi_form,
    sign_legendre_coefficients, sphere_series_solution, sphere_series_weights, torus_angles, torus_fields, DENSE_LIMIT,
};
use fracpade::sparse::pcg;
use fracpade::{
    AssembledOperator, CgConfig, CoefficientField, CsrMatrix, OracleError, ProblemMode, RhsMethod,
    SpectralDecomposition, SurfaceMesh,
};
use proptest::prelude::*;

fn laplace(mesh: &SurfaceMesh<f64>, mode: ProblemMode) -> AssembledOperator<f64> {
    let c = CoefficientField::constant(mesh.num_vertices(), 1.0, 0.0).unwrap();
    assemble(mesh, &c, mode).unwrap()
}

fn unit_square(cells: usize) -> SurfaceMesh<f64> {
    let x: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
    tensor_grid(&x, &x, ProblemMode::Dirichlet).unwrap()
}

fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn m_dist(op: &AssembledOperator<f64>, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    op.m_norm(&d)
}

/// The two small pencils the dense checks run on, each with a mean-free input.
fn small_problems() -> Vec<(AssembledOperator<f64>, Vec<f64>)> {
    let sphere = laplace(&gen_sphere(1).unwrap(), ProblemMode::ZeroMean);
    let fs = deflate_mean(&sphere, &pseudo_random(sphere.n(), 3));
    let square = laplace(&unit_square(7), ProblemMode::Dirichlet);
    let fq = pseudo_random(square.n(), 5);
    vec![(sphere, fs), (square, fq)]
}

#[test]
fn diagonal_pencil_by_hand() {
    let op = AssembledOperator::from_matrices(
        CsrMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]),
        CsrMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 4.0), (2, 2, 9.0)]),
        ProblemMode::PositiveReaction,
    )
    .unwrap();
    let u: Vec<f64> = dense_fractional(&op, 0.5, &[1.0, 1.0, 1.0]).unwrap();
    for (a, b) in u.iter().zip([1.0, 0.5, 1.0 / 3.0]) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn eigenvectors_are_mass_orthonormal() {
    for (op, _) in small_problems() {
        let eig = SpectralDecomposition::new(&op).unwrap();
        assert!(eig.residual(&op) < 1e-10);
        let psi = eig.eigenvectors();
        let k = psi.ncols();
        for i in 0..k {
            let mi = op.mass().apply(psi.column(i).as_slice());
            for j in 0..k {
                let g: f64 = mi.iter().zip(psi.column(j).iter()).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-10, "({i},{j}) = {g}");
            }
        }
        assert!(eig.eigenvalues()[0] > 0.0);
        assert_eq!(eig.constant_removed(), op.mode() == ProblemMode::ZeroMean);
        assert_eq!(k, if eig.constant_removed() { op.n() - 1 } else { op.n() });
    }
}

#[test]
fn powers_compose() {
    for (op, f) in small_problems() {
        let eig = SpectralDecomposition::new(&op).unwrap();
        for (a1, a2) in [(0.3, 0.4), (0.05, 0.9), (0.5, 0.5)] {
            let two = eig.fractional(a1, &eig.fractional(a2, &f).unwrap()).unwrap();
            let one = eig.fractional(a1 + a2, &f).unwrap();
            assert!(m_dist(&op, &two, &one) <= 1e-8 * op.m_norm(&one));
        }
    }
}

#[test]
fn first_power_is_one_elliptic_solve() {
    for (op, f) in small_problems() {
        let u = dense_fractional(&op, 1.0, &f).unwrap();
        let rhs = op.mass().apply(&f);
        let mut x = vec![0.0; op.n()];
        pcg(
            op.stiffness(),
            &op.stiffness().diagonal(),
            &rhs,
            &mut x,
            &CgConfig::new(1e-14, op.n()),
        )
        .unwrap();
        if op.mode() == ProblemMode::ZeroMean {
            x = deflate_mean(&op, &x);
        }
        assert!(m_dist(&op, &u, &x) <= 1e-8 * op.m_norm(&x));
    }
}

#[test]
fn zeroth_power_is_the_identity() {
    for (op, f) in small_problems() {
        let u = dense_fractional(&op, 0.0, &f).unwrap();
        assert!(m_dist(&op, &u, &f) <= 1e-12 * op.m_norm(&f));
    }
    // the constant is outside the zero-mean space
    let op = laplace(&gen_sphere(1).unwrap(), ProblemMode::ZeroMean);
    let f = pseudo_random(op.n(), 9);
    let u = dense_fractional(&op, 0.0, &f).unwrap();
    assert!(m_dist(&op, &u, &deflate_mean(&op, &f)) <= 1e-12 * op.m_norm(&f));
}

#[test]
fn size_and_length_guards() {
    let op = laplace(&gen_sphere(4).unwrap(), ProblemMode::ZeroMean);
    assert!(op.n() > DENSE_LIMIT);
    assert!(matches!(
        SpectralDecomposition::new(&op),
        Err(OracleError::TooLarge { .. })
    ));
    let (small, f) = small_problems().remove(0);
    let eig = SpectralDecomposition::new(&small).unwrap();
    assert!(matches!(eig.fractional(0.5, &f[1..]), Err(OracleError::Length { .. })));
}

/// Simpson's rule for `∫_0^1 P_n(s) ds`, with `P_n` from the recurrence.
fn half_legendre_integral(n: usize) -> f64 {
    let k = 20_000;
    let p = |s: f64| {
        let (mut a, mut b) = (1.0, s);
        if n == 0 {
            return a;
        }
        for j in 1..n {
            let c = ((2 * j + 1) as f64 * s * b - j as f64 * a) / (j + 1) as f64;
            a = b;
            b = c;
        }
        b
    };
    let h = 1.0 / k as f64;
    (0..=k)
        .map(|i| {
            let w = if i == 0 || i == k {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * p(i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0
}

#[test]
fn sign_coefficients_three_ways() {
    let a = sign_legendre_coefficients(21);
    for n in 0..=21 {
        if n % 2 == 0 {
            assert_eq!(a[n], 0.0);
            continue;
        }
        let quad = (2 * n + 1) as f64 * half_legendre_integral(n);
        assert!((a[n] - quad).abs() < 1e-10, "n={n}: {} vs {quad}", a[n]);
        assert!((a[n] - sign_coefficient_jacobi_form(n)).abs() < 1e-13, "n={n}");
    }
    assert!((a[1] - 1.5).abs() < 1e-15);
}

#[test]
fn series_is_odd_and_vanishes_on_the_equator() {
    for &alpha in &[0.01, 0.5, 0.99] {
        assert_eq!(sphere_series_solution(alpha, 0.0, 2000).unwrap(), 0.0);
        for &x in &[0.1, 0.45, 0.8, 1.0] {
            let (p, m) = (
                sphere_series_solution(alpha, x, 500).unwrap(),
                sphere_series_solution(alpha, -x, 500).unwrap(),
            );
            assert!((p + m).abs() < 1e-13 * p.abs().max(1.0));
            assert!(p > 0.0);
        }
    }
    assert!(matches!(
        sphere_series_solution(0.5, 0.3, 10_001),
        Err(OracleError::TooManyTerms(_))
    ));
}

/// Partial sums `u_0, …, u_n` at `x`, with `P_k(x)` by its own recurrence.
fn partial_sums(alpha: f64, x: f64, n: usize) -> Vec<f64> {
    let w = sphere_series_weights(alpha, n).unwrap();
    let (mut prev, mut cur) = (1.0, x);
    let mut acc = w[0];
    let mut out = vec![acc];
    for k in 1..=n {
        acc += w[k] * cur;
        out.push(acc);
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    out
}

#[test]
fn series_partial_sums_are_cauchy() {
    // the tail oscillates, so the distance to u_{2N} is taken over the whole
    // block N..2N rather than at N alone
    for &alpha in &[0.01, 0.3, 0.5, 0.7, 0.99] {
        for &x in &[-0.95, -0.7, -0.25, 0.2, 0.55, 0.75, 0.9, 0.99] {
            let u = partial_sums(alpha, x, 8192);
            let mut prev = f64::INFINITY;
            let mut n = 32;
            while 2 * n <= 8192 {
                let d = u[n..=2 * n].iter().map(|v| (v - u[2 * n]).abs()).fold(0.0, f64::max);
                assert!(d < prev, "alpha={alpha} x={x} N={n}: {d:e} >= {prev:e}");
                prev = d;
                n *= 2;
            }
        }
    }
}

#[test]
fn series_fixture_matches() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/sphere_series.csv");
    let text = std::fs::read_to_string(path).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let v: Vec<&str> = line.split(',').collect();
        let (alpha, x3, degree, u): (f64, f64, usize, f64) = (
            v[0].parse().unwrap(),
            v[1].parse().unwrap(),
            v[2].parse().unwrap(),
            v[3].parse().unwrap(),
        );
        let ours = sphere_series_solution(alpha, x3, degree).unwrap();
        assert!(
            (ours - u).abs() <= 1e-12 * u.abs().max(1.0),
            "alpha={alpha} x3={x3}: {ours} vs {u}"
        );
        rows += 1;
    }
    assert_eq!(rows, 40);
}

#[test]
fn legendre_sum_small_cases() {
    // P_2(x) = (3x² - 1)/2
    for &x in &[-1.0, -0.3, 0.0, 0.6, 1.0] {
        assert!((legendre_sum(&[0.5, 2.0, 3.0], x) - (0.5 + 2.0 * x + 1.5 * (3.0 * x * x - 1.0))).abs() < 1e-14);
    }
    assert_eq!(legendre_sum(&[], 0.4), 0.0);
}

fn torus_point(r_major: f64, r_minor: f64, p1: f64, p2: f64) -> [f64; 3] {
    let rho = r_major + r_minor * p1.cos();
    [rho * p2.cos(), rho * p2.sin(), r_minor * p1.sin()]
}

/// Mean curvature from finite-difference fundamental forms of the parametrisation.
fn fd_mean_curvature(r_major: f64, r_minor: f64, p1: f64, p2: f64) -> f64 {
    let h = 1e-4;
    let x = |a: f64, b: f64| torus_point(r_major, r_minor, a, b);
    let comp = |a: [f64; 3], b: [f64; 3], c: f64| -> [f64; 3] { std::array::from_fn(|k| (a[k] - b[k]) / c) };
    let x0 = x(p1, p2);
    let xu = comp(x(p1 + h, p2), x(p1 - h, p2), 2.0 * h);
    let xv = comp(x(p1, p2 + h), x(p1, p2 - h), 2.0 * h);
    let xuu: [f64; 3] = std::array::from_fn(|k| (x(p1 + h, p2)[k] - 2.0 * x0[k] + x(p1 - h, p2)[k]) / (h * h));
    let xvv: [f64; 3] = std::array::from_fn(|k| (x(p1, p2 + h)[k] - 2.0 * x0[k] + x(p1, p2 - h)[k]) / (h * h));
    let xuv: [f64; 3] = std::array::from_fn(|k| {
        (x(p1 + h, p2 + h)[k] - x(p1 + h, p2 - h)[k] - x(p1 - h, p2 + h)[k] + x(p1 - h, p2 - h)[k]) / (4.0 * h * h)
    });
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let n = [
        xu[1] * xv[2] - xu[2] * xv[1],
        xu[2] * xv[0] - xu[0] * xv[2],
        xu[0] * xv[1] - xu[1] * xv[0],
    ];
    let nn = dot(n, n).sqrt();
    let n = n.map(|c| c / nn);
    let (e, f, g) = (dot(xu, xu), dot(xu, xv), dot(xv, xv));
    let (l, m, nc) = (dot(xuu, n), dot(xuv, n), dot(xvv, n));
    ((l * g - 2.0 * m * f + nc * e) / (2.0 * (e * g - f * f))).abs()
}

#[test]
fn torus_curvature_examples() {
    let top = torus_fields(0.5, 0.2, PI / 2.0, 0.0).unwrap();
    assert!((top.mean_curvature - 2.5).abs() < 1e-14);
    let outer = torus_fields(0.5, 0.2, 0.0, 0.0).unwrap();
    assert!((outer.mean_curvature - 0.9 / 0.28).abs() < 1e-14);
    assert_eq!(outer.source, outer.mean_curvature);
    assert!(matches!(torus_fields(0.2, 0.5, 0.0, 0.0), Err(OracleError::TorusRadii)));
    assert!(matches!(torus_fields(0.5, 0.0, 0.0, 0.0), Err(OracleError::TorusRadii)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_curvature_matches_finite_differences(p1 in -PI..PI, p2 in -PI..PI, r_minor in 0.05f64..0.45) {
        let h = torus_fields(0.5, r_minor, p1, p2).unwrap().mean_curvature;
        let fd = fd_mean_curvature(0.5, r_minor, p1, p2);
        prop_assert!((h.abs() - fd).abs() < 1e-5 * fd.max(1.0), "{} vs {}", h, fd);
    }

    #[test]
    fn torus_angles_invert_the_parametrisation(p1 in -3.1f64..3.1, p2 in -3.1f64..3.1) {
        let x = torus_point(0.5, 0.2, p1, p2);
        let (a, b) = torus_angles(0.5, &x);
        prop_assert!((a - p1).abs() < 1e-12 && (b - p2).abs() < 1e-12);
    }
}

#[test]
fn l2_error_of_the_zero_function() {
    let mut prev = 0.0;
    for level in 1..=4 {
        let mesh = gen_sphere::<f64>(level).unwrap();
        let op = laplace(&mesh, ProblemMode::ZeroMean);
        let e = l2_error_on_mesh(&mesh, &op, &vec![0.0; op.n()], |x| x[2].signum()).unwrap();
        assert!(e > prev && e < (4.0 * PI).sqrt());
        prev = e;
    }
    assert!((prev / (4.0 * PI).sqrt() - 1.0).abs() < 0.01, "{prev}");
}

#[test]
fn interpolation_error_is_second_order() {
    let u = |x: &[f64; 3]| x[2] * x[2] + x[0];
    let mut errs = Vec::new();
    for level in 2..=4 {
        let mesh = gen_sphere::<f64>(level).unwrap();
        let c = CoefficientField::constant(mesh.num_vertices(), 1.0, 1.0).unwrap();
        let op = assemble(&mesh, &c, ProblemMode::PositiveReaction).unwrap();
        let uh = build_rhs(&mesh, &op, u, RhsMethod::Interpolate, 1e-12).unwrap().values;
        errs.push((l2_error_on_mesh(&mesh, &op, &uh, u).unwrap(), op.n()));
    }
    for w in errs.windows(2) {
        let rate = conv_rate(w[0].0, w[0].1, w[1].0, w[1].1);
        assert!((rate - 2.0).abs() < 0.1, "{rate}");
    }
    let mesh = gen_sphere::<f64>(1).unwrap();
    let op = laplace(&mesh, ProblemMode::ZeroMean);
    assert!(matches!(
        l2_error_on_mesh(&mesh, &op, &[0.0], u),
        Err(OracleError::Length { .. })
    ));
}

#[test]
fn rate_from_two_pairs() {
    assert!((conv_rate(1.0, 100, 0.25, 400) - 2.0).abs() < 1e-14);
    assert!((conv_rate(0.8, 162, 0.4, 642) - 2f64.ln() / (642.0f64 / 162.0).sqrt().ln()).abs() < 1e-14);
}
