use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varqdyn::coherent::spin::radcliffe_generator;
use varqdyn::gaussian::{anharmonic_field, free_field, harmonic_closed_form, harmonic_field, two_form};
use varqdyn::grid::{GridHamiltonian, GridWavefunction, SpatialGrid};
use varqdyn::lagrangian::*;
use varqdyn::{Error, GaussianParams, ModelParams, StateVector};

fn grid() -> SpatialGrid {
    SpatialGrid::new(-16.0, 16.0, 512).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng) -> [f64; 4] {
    [rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

fn gauss(x: &[f64]) -> GaussianParams {
    GaussianParams::from_real([x[0], x[1], x[2], x[3], 0.0, 0.0]).unwrap()
}

#[test]
fn radcliffe_one_form() {
    let opts = EngineOptions::default();
    for (th, ph) in [(0.4, 0.3), (1.2, 2.0), (2.5, 5.0)] {
        let t = cartan_one_form(&RadcliffeImmersion, &[th, ph], &opts).unwrap();
        assert_abs_diff_eq!(t[0], 0.0, epsilon = 1e-9);
        // θ_j = −Im⟨ψ, ∂_jψ⟩/N, opposite in sign to the textbook Berry one-form.
        assert_abs_diff_eq!(t[1], -(th / 2.0f64).sin().powi(2), epsilon = 1e-6);
    }
}

#[test]
fn real_immersion_has_zero_one_form() {
    let im = FnImmersion::new(2, "real", |x: &[f64]| {
        Ok(StateVector::finite(vec![
            Complex64::new(x[0].cos(), 0.0),
            Complex64::new(x[0].sin() * x[1], 0.0),
            Complex64::new(1.0, 0.0),
        ]))
    });
    let t = cartan_one_form(&im, &[0.3, 0.8], &EngineOptions::default()).unwrap();
    assert_eq!(t, vec![0.0, 0.0]);
    assert!(matches!(
        reduced_field(&im, &MatrixHamiltonian::new(DMatrix::identity(3, 3), "id").unwrap(), &[0.3, 0.8], &EngineOptions::default()),
        Err(Error::NoDynamics { .. })
    ));
}

#[test]
fn gaussian_one_form_matches_moments() {
    let im = GaussianImmersion::restricted(grid());
    for x in [[0.5, 0.0, 0.0, 0.0], [0.8, -0.3, 0.4, 0.2]] {
        let t = cartan_one_form(&im, &x, &EngineOptions::default()).unwrap();
        let mean = x[2] / (2.0 * x[0]);
        let second = mean * mean + 1.0 / (4.0 * x[0]);
        for (got, want) in t.iter().zip([0.0, second, 0.0, -mean]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-6);
        }
    }
}

#[test]
fn radcliffe_two_form() {
    for (th, ph) in [(0.4, 0.3), (1.2, 2.0), (2.5, 5.0)] {
        let w = lagrangian_two_form(&RadcliffeImmersion, &[th, ph], &EngineOptions::default()).unwrap();
        assert_abs_diff_eq!(w.matrix.get(0, 1), -0.5 * th.sin(), epsilon = 1e-5);
        assert_abs_diff_eq!(w.matrix.get(1, 0), 0.5 * th.sin(), epsilon = 1e-5);
    }
}

#[test]
fn gaussian_two_form_matches_closed_form() {
    let im = GaussianImmersion::restricted(grid());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x = random_point(&mut rng);
        let w = lagrangian_two_form(&im, &x, &EngineOptions::default()).unwrap();
        let reference = two_form(&gauss(&x)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(w.matrix.get(i, j), reference.get(i, j), epsilon = 1e-5);
            }
        }
        let norm = w.matrix.frobenius_norm();
        assert!(w.asymmetry <= 1e-4 * norm);
        assert!(w.matrix.antisymmetric_defect() <= 1e-8 * norm);
    }
}

#[test]
fn nested_difference_two_form_agrees() {
    let im = GaussianImmersion::restricted(grid());
    let x = [0.7, 0.2, -0.3, 0.5];
    let direct = lagrangian_two_form(&im, &x, &EngineOptions::default()).unwrap();
    let nested = lagrangian_two_form_nested(&im, &x, &EngineOptions::default(), 1e-4).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_abs_diff_eq!(direct.matrix.get(i, j), nested.matrix.get(i, j), epsilon = 1e-5);
        }
    }
}

#[test]
fn full_gaussian_kernel_is_gauge() {
    let im = GaussianImmersion::full(grid());
    let ham = GridHamiltonian::free(grid()).unwrap();
    let f = reduced_field(&im, &ham, &[0.7, -0.2, 0.4, 0.3, 0.1, 0.5], &EngineOptions::default()).unwrap();
    assert_eq!(f.geometry.kernel_basis.len(), 2);
    for v in &f.geometry.kernel_basis {
        let w = v[4] * v[4] + v[5] * v[5];
        assert!((1.0 - w).max(0.0).sqrt().asin() < 1e-6);
    }
}

#[test]
fn reduced_energy_values() {
    let g = grid();
    let im = GaussianImmersion::restricted(g);
    let free = GridHamiltonian::free(g).unwrap();
    assert_abs_diff_eq!(reduced_energy(&im, &free, &[0.5, 0.0, 0.0, 0.0]).unwrap(), 0.25, epsilon = 1e-10);
    let b = 1.7;
    let gen = radcliffe_generator(0.0, b).unwrap();
    for th in [0.3, 1.1, 2.8] {
        assert_abs_diff_eq!(reduced_energy(&RadcliffeImmersion, &gen, &[th, 0.4]).unwrap(), 0.5 * b * th.cos(), epsilon = 1e-8);
    }
}

#[test]
fn reduced_energy_is_scale_invariant() {
    let g = grid();
    let base = GaussianImmersion::restricted(g);
    let doubled = FnImmersion::new(4, "doubled", |x: &[f64]| Ok(base.evaluate(x)?.scaled(Complex64::new(2.0, 0.0))));
    let ham = GridHamiltonian::for_model(g, &ModelParams::new(1.0, 0.2).unwrap()).unwrap();
    let x = [0.6, 0.1, 0.3, -0.2];
    assert_eq!(reduced_energy(&base, &ham, &x).unwrap(), reduced_energy(&doubled, &ham, &x).unwrap());
}

#[test]
fn radcliffe_field_rotates_azimuth() {
    let b = 1.3;
    let gen = radcliffe_generator(0.4, b).unwrap();
    for (th, ph) in [(0.5, 0.1), (1.5, 3.0), (2.2, 6.0)] {
        let f = reduced_field(&RadcliffeImmersion, &gen, &[th, ph], &EngineOptions::default()).unwrap();
        assert_abs_diff_eq!(f.velocity[0], 0.0, epsilon = 1e-5);
        assert_abs_diff_eq!(f.velocity[1], b, epsilon = 1e-5);
        assert!(f.geometry.kernel_basis.is_empty());
    }
}

#[test]
fn gaussian_free_field_from_engine() {
    let g = grid();
    let im = GaussianImmersion::restricted(g);
    let ham = GridHamiltonian::free(g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let x = random_point(&mut rng);
        let f = reduced_field(&im, &ham, &x, &EngineOptions::default()).unwrap();
        let want = free_field(&gauss(&x)).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(f.velocity[k], want[k], epsilon = 1e-5);
        }
    }
}

#[test]
fn gaussian_anharmonic_field_from_engine() {
    let g = grid();
    let m = ModelParams::new(1.0, 0.1).unwrap();
    let im = GaussianImmersion::restricted(g);
    let ham = GridHamiltonian::for_model(g, &m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = random_point(&mut rng);
        let f = reduced_field(&im, &ham, &x, &EngineOptions::default()).unwrap();
        let want = anharmonic_field(&gauss(&x), &m).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(f.velocity[k], want[k], epsilon = 1e-4);
        }
    }
}

#[test]
fn immersion_failure_names_coordinate() {
    let im = FnImmersion::new(2, "edge", |x: &[f64]| {
        if x[1] > 1.0 {
            Err(Error::Domain("outside chart".into()))
        } else {
            Ok(StateVector::finite(vec![Complex64::from_polar(1.0, x[0] * x[1]), Complex64::new(x[1], 0.0)]))
        }
    });
    match cartan_one_form(&im, &[0.2, 1.0], &EngineOptions::default()) {
        Err(Error::Immersion { coordinate, .. }) => assert_eq!(coordinate, 1),
        other => panic!("expected immersion error, got {other:?}"),
    }
}

#[test]
fn two_form_is_closed() {
    let im = GaussianImmersion::restricted(grid());
    let x = [0.8, 0.1, 0.3, -0.4];
    let h = 1e-4;
    let w_at = |p: &[f64]| lagrangian_two_form(&im, p, &EngineOptions::default()).unwrap().matrix;
    let deriv = |i: usize, j: usize, k: usize| {
        let (mut up, mut dn) = (x, x);
        up[i] += h;
        dn[i] -= h;
        (w_at(&up).get(j, k) - w_at(&dn).get(j, k)) / (2.0 * h)
    };
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let d = deriv(i, j, k) + deriv(j, k, i) + deriv(k, i, j);
        assert!(d.abs() <= 1e-3, "({i},{j},{k}): {d:e}");
    }
}

#[test]
fn field_is_gauge_invariant() {
    let g = grid();
    let base = GaussianImmersion::restricted(g);
    let gauged = FnImmersion::new(4, "gauged", |x: &[f64]| {
        let s = Complex64::new(0.3 * x[0] - 0.2 * x[3], 0.7 * x[1] * x[2] + x[0]).exp();
        Ok(base.evaluate(x)?.scaled(s))
    });
    let ham = GridHamiltonian::for_model(g, &ModelParams::harmonic(1.2).unwrap()).unwrap();
    let x = [0.9, -0.3, 0.5, 0.1];
    let a = reduced_field(&base, &ham, &x, &EngineOptions::default()).unwrap();
    let b = reduced_field(&gauged, &ham, &x, &EngineOptions::default()).unwrap();
    for k in 0..4 {
        assert_abs_diff_eq!(a.velocity[k], b.velocity[k], epsilon = 1e-5);
    }
}

#[test]
fn grid_hamiltonian_is_hermitian() {
    let g = grid();
    let ham = GridHamiltonian::for_model(g, &ModelParams::new(0.7, 0.1).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let (c1, c2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let phi = GridWavefunction::from_fn(g, |x| Complex64::new(-(x - c1).powi(2), c1 * x).exp()).unwrap().to_state();
        let psi = GridWavefunction::from_fn(g, |x| Complex64::new(-0.5 * (x - c2).powi(2), -x).exp()).unwrap().to_state();
        let l = phi.inner(&ham.apply(&psi).unwrap());
        let r = psi.inner(&ham.apply(&phi).unwrap()).conj();
        assert!((l - r).norm() <= 1e-10 * l.norm().max(1.0));
    }
}

#[test]
fn non_hermitian_matrix_rejected() {
    let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
    assert!(MatrixHamiltonian::new(m, "bad").is_err());
}

#[test]
fn radcliffe_trajectory_keeps_radius() {
    let b = 0.9;
    let gen = radcliffe_generator(0.2, b).unwrap();
    let tr = integrate_reduced(&RadcliffeImmersion, &gen, &[1.1, 0.4], 1e-2, 2.0, &EngineOptions::default()).unwrap();
    for (t, p) in tr.times.iter().zip(&tr.points) {
        assert_abs_diff_eq!(p[0], 1.1, epsilon = 1e-8);
        assert_abs_diff_eq!(p[1], 0.4 + b * t, epsilon = 1e-6);
    }
    assert!(tr.energy_drift() < 1e-9);
}

#[test]
fn gaussian_trajectories_follow_restricted_flow() {
    let g = grid();
    let im = GaussianImmersion::restricted(g);
    let p0 = [0.5, 0.0, 0.3, 0.2];
    for w in [0.0, 1.0] {
        let m = ModelParams::harmonic(w).unwrap();
        let ham = GridHamiltonian::for_model(g, &m).unwrap();
        let tr = integrate_reduced(&im, &ham, &p0, 1e-2, 1.0, &EngineOptions::default()).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.points) {
            let want = harmonic_closed_form(&gauss(&p0), &m, *t).unwrap().ab();
            for k in 0..4 {
                assert_abs_diff_eq!(x[k], want[k], epsilon = 1e-5);
            }
        }
        assert!(tr.kernel_dims.iter().all(|&d| d == 0));
        let h = harmonic_field(&gauss(&p0), &m).unwrap();
        assert!(h.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn anharmonic_energy_conserved_along_engine_flow() {
    let g = grid();
    let m = ModelParams::new(1.0, 0.1).unwrap();
    let ham = GridHamiltonian::for_model(g, &m).unwrap();
    let im = GaussianImmersion::restricted(g);
    let opts = EngineOptions { stride: 100, ..EngineOptions::default() };
    let tr = integrate_reduced(&im, &ham, &[0.5, 0.0, 0.0, 0.0], 1e-4, 1.0, &opts).unwrap();
    assert!(tr.energy_drift() <= 1e-6, "drift {:e}", tr.energy_drift());
}
