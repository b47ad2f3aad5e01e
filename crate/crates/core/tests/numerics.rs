use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use varqdyn::gaussian::{free_closed_form, free_field, two_form_full};
use varqdyn::numerics::linalg::{least_squares_with_kernel, solve_linear_with_kernel, SquareMatrix};
use varqdyn::numerics::ode::{integrate_implicit_midpoint, integrate_rk4, OdeProblem};
use varqdyn::numerics::quadrature::quadrature_trapezoid;
use varqdyn::{Error, GaussianParams};

#[test]
fn rk4_zero_field_is_constant() {
    let p = OdeProblem::new(0.0, vec![3.0], |_, _, out: &mut [f64]| out[0] = 0.0).unwrap();
    let tr = integrate_rk4(&p, 0.1, 1.0).unwrap();
    assert!(tr.states.iter().all(|s| s[0] == 3.0));
    assert_eq!(*tr.times.last().unwrap(), 1.0);
}

#[test]
fn rk4_exponential() {
    let p = OdeProblem::new(0.0, vec![1.0], |_, y: &[f64], out: &mut [f64]| out[0] = y[0]).unwrap();
    let tr = integrate_rk4(&p, 1e-3, 1.0).unwrap();
    assert_abs_diff_eq!(tr.last().unwrap().1[0], std::f64::consts::E, epsilon = 1e-10);
}

#[test]
fn rk4_rotation_with_shortened_last_step() {
    let p = OdeProblem::new(0.0, vec![1.0, 0.0], |_, y: &[f64], out: &mut [f64]| {
        out[0] = -y[1];
        out[1] = y[0];
    })
    .unwrap();
    let tr = integrate_rk4(&p, 1e-3, std::f64::consts::FRAC_PI_2).unwrap();
    let (t, y) = tr.last().unwrap();
    assert_eq!(t, std::f64::consts::FRAC_PI_2);
    assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-8);
    assert_abs_diff_eq!(y[1], 1.0, epsilon = 1e-8);
}

#[test]
fn rk4_fourth_order_convergence() {
    let err = |dt: f64| {
        let p = OdeProblem::new(0.0, vec![1.0], |_, y: &[f64], out: &mut [f64]| out[0] = y[0]).unwrap();
        (integrate_rk4(&p, dt, 1.0).unwrap().last().unwrap().1[0] - std::f64::consts::E).abs()
    };
    assert!(err(0.02) / err(0.01) >= 14.0);
}

#[test]
fn rk4_reports_non_finite_time() {
    let p = OdeProblem::new(0.0, vec![1.0], |t: f64, _: &[f64], out: &mut [f64]| {
        out[0] = if t > 0.25 { f64::NAN } else { 1.0 }
    })
    .unwrap();
    match integrate_rk4(&p, 0.1, 1.0) {
        Err(Error::NonFinite { time }) => assert!(time > 0.25 && time < 0.4),
        other => panic!("expected NonFinite, got {other:?}"),
    }
}

#[test]
fn midpoint_preserves_oscillator_energy() {
    let p = OdeProblem::new(0.0, vec![1.0, 0.3], |_, y: &[f64], out: &mut [f64]| {
        out[0] = y[1];
        out[1] = -y[0];
    })
    .unwrap();
    let tr = integrate_implicit_midpoint(&p, 0.1, 1000.0).unwrap();
    assert!(tr.len() >= 10_001);
    let e0 = 1.0f64 + 0.09;
    let drift = tr.states.iter().map(|s| (s[0] * s[0] + s[1] * s[1] - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-10, "drift {drift:e}");
}

#[test]
fn midpoint_zero_field() {
    let p = OdeProblem::new(0.0, vec![2.0, -1.0], |_, _, out: &mut [f64]| out.fill(0.0)).unwrap();
    let tr = integrate_implicit_midpoint(&p, 0.25, 1.0).unwrap();
    assert!(tr.states.iter().all(|s| s == &[2.0, -1.0]));
}

#[test]
fn midpoint_calogero_invariant_and_rk4_agreement() {
    let field = |_: f64, y: &[f64], out: &mut [f64]| {
        out[0] = y[1];
        out[1] = 1.0 / (4.0 * y[0].powi(3));
    };
    let y0 = vec![std::f64::consts::FRAC_1_SQRT_2, 0.0];
    let h2 = |y: &[f64]| y[1] * y[1] + 1.0 / (4.0 * y[0] * y[0]);
    let p = OdeProblem::new(0.0, y0.clone(), field).unwrap();
    let mid = integrate_implicit_midpoint(&p, 1e-4, 1.0).unwrap();
    let drift = mid.states.iter().map(|s| (h2(s) - h2(&y0)).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-9, "drift {drift:e}");
    let rk = integrate_rk4(&p, 1e-5, 1.0).unwrap();
    let (a, b) = (mid.last().unwrap().1, rk.last().unwrap().1);
    assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
}

#[test]
fn kernel_solve_identity() {
    let s = solve_linear_with_kernel(&SquareMatrix::identity(2), &[1.0, 2.0], 1e-10).unwrap();
    assert_eq!(s.solution, vec![1.0, 2.0]);
    assert!(s.kernel.is_empty());
}

#[test]
fn kernel_solve_rank_one() {
    let a = SquareMatrix::<f64>::new(2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let s = solve_linear_with_kernel(&a, &[1.0, 0.0], 1e-10).unwrap();
    assert_abs_diff_eq!(s.solution[0], 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(s.solution[1], 0.0, epsilon = 1e-15);
    assert_eq!(s.kernel.len(), 1);
    assert_abs_diff_eq!(s.kernel[0][1].abs(), 1.0, epsilon = 1e-15);
    assert!(matches!(solve_linear_with_kernel(&a, &[1.0, 1.0], 1e-10), Err(Error::InconsistentConstraint { .. })));
}

#[test]
fn kernel_of_full_gaussian_two_form() {
    let p = GaussianParams::new(
        num_complex::Complex64::new(0.7, -0.2),
        num_complex::Complex64::new(0.4, 0.3),
        num_complex::Complex64::new(0.1, 0.5),
    )
    .unwrap();
    let w = two_form_full(&p).unwrap();
    let x = [0.3, -0.1, 0.2, 0.5, 0.0, 0.0];
    let rhs = w.mul_vec(&x);
    let s = solve_linear_with_kernel(&w, &rhs, 1e-10).unwrap();
    assert_eq!(s.kernel.len(), 2);
    // Independent route: the kernel projector from nalgebra's SVD.
    let m = DMatrix::from_row_slice(6, 6, w.entries());
    let svd = m.svd(true, true);
    let vt = svd.v_t.unwrap();
    let mut proj_ref = DMatrix::<f64>::zeros(6, 6);
    for (k, sv) in svd.singular_values.iter().enumerate() {
        if *sv < 1e-10 * svd.singular_values.max() {
            let r = vt.row(k).transpose();
            proj_ref += &r * r.transpose();
        }
    }
    for (i, j) in [(4, 4), (5, 5)] {
        assert_abs_diff_eq!(proj_ref[(i, j)], 1.0, epsilon = 1e-12);
    }
    for v in &s.kernel {
        let weight = v[4] * v[4] + v[5] * v[5];
        let angle = (1.0 - weight).max(0.0).sqrt().asin();
        assert!(angle < 1e-10, "angle {angle:e}");
    }
}

#[test]
fn trapezoid_basic() {
    let ones: Vec<(f64, f64)> = (0..11).map(|k| (k as f64 / 10.0, 1.0)).collect();
    assert_eq!(quadrature_trapezoid(&ones).unwrap(), 1.0);
    let lin: Vec<(f64, f64)> = (0..101).map(|k| (k as f64 / 100.0, k as f64 / 100.0)).collect();
    assert_abs_diff_eq!(quadrature_trapezoid(&lin).unwrap(), 0.5, epsilon = 1e-12);
    assert!(matches!(quadrature_trapezoid(&[(0.0, 1.0)]), Err(Error::TooFewSamples { .. })));
    assert!(quadrature_trapezoid(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
}

#[test]
fn trapezoid_free_phase_against_ode() {
    let p0 = GaussianParams::from_real([0.5, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let samples: Vec<(f64, f64)> = (0..10_000)
        .map(|k| {
            let t = k as f64 / 9_999.0;
            let p = free_closed_form(&p0, t).unwrap();
            (t, p.a.im - p.b.re * p.b.im)
        })
        .collect();
    let quad = quadrature_trapezoid(&samples).unwrap();
    let ode = OdeProblem::new(0.0, p0.to_real().to_vec(), |_, y: &[f64], out: &mut [f64]| {
        let p = GaussianParams::from_real([y[0], y[1], y[2], y[3], y[4], y[5]]).unwrap();
        out.copy_from_slice(&free_field(&p).unwrap());
    })
    .unwrap();
    let tr = integrate_rk4(&ode, 1e-5, 1.0).unwrap();
    assert_abs_diff_eq!(quad, tr.last().unwrap().1[4], epsilon = 1e-6);
}

fn matrix_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-2.0..2.0f64, 16), prop::collection::vec(-1.0..1.0f64, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_solution_reproduces_consistent_rhs((entries, x) in matrix_strategy(), rank_cut in 0usize..3) {
        // Zero the last `rank_cut` columns to create a kernel.
        let mut e = entries.clone();
        for r in 0..4 {
            for c in (4 - rank_cut)..4 {
                e[r * 4 + c] = 0.0;
            }
        }
        let a = SquareMatrix::new(4, e).unwrap();
        let rhs = a.mul_vec(&x);
        let s = least_squares_with_kernel(&a, &rhs, 1e-10).unwrap();
        let scale = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        prop_assert!(s.residual <= 1e-9 * scale);
        prop_assert!(s.kernel.len() >= rank_cut);
        for (i, u) in s.kernel.iter().enumerate() {
            for (j, v) in s.kernel.iter().enumerate() {
                let d: f64 = u.iter().zip(v).map(|(p, q)| p * q).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((d - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn midpoint_preserves_quadratic_invariant(w in 0.2..3.0f64, q0 in -1.0..1.0f64, p0 in -1.0..1.0f64) {
        prop_assume!(q0.abs() + p0.abs() > 1e-3);
        // Q = diag(w², 1) with A = [[0, 1], [−w², 0]]: QA antisymmetric.
        let prob = OdeProblem::new(0.0, vec![q0, p0], move |_, y: &[f64], out: &mut [f64]| {
            out[0] = y[1];
            out[1] = -w * w * y[0];
        }).unwrap();
        let tr = integrate_implicit_midpoint(&prob, 0.05, 500.0).unwrap();
        let inv = |y: &[f64]| w * w * y[0] * y[0] + y[1] * y[1];
        let e0 = inv(&[q0, p0]);
        let drift = tr.states.iter().map(|s| (inv(s) - e0).abs()).fold(0.0, f64::max);
        prop_assert!(drift <= 1e-10 * e0);
    }
}
