use proptest::prelude::*;

use super::*;
use crate::geometry::{GeometryKind, Grid};
use crate::singular_ops::birkhoff_rott;

fn circle(n: usize) -> Contour {
    let g = Grid::new(n).unwrap();
    let x = g.nodes().iter().map(|a| a.cos()).collect();
    let y = g.nodes().iter().map(|a| a.sin()).collect();
    Contour::from_samples(g, GeometryKind::ClosedContour, x, y).unwrap()
}

fn wavy(n: usize, amp: f64, k: f64) -> Contour {
    let g = Grid::new(n).unwrap();
    let y = g.nodes().iter().map(|a| amp * (k * a).cos()).collect();
    Contour::from_samples(g, GeometryKind::HorizontallyPeriodic, vec![0.0; n], y).unwrap()
}

fn sample(z: &Contour, f: impl Fn(f64) -> f64) -> Vec<f64> {
    z.grid().nodes().into_iter().map(f).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn params(a_rho: f64, g: f64) -> Params {
    Params {
        a_rho,
        g,
        ..Params::default()
    }
}

#[test]
fn params_validation() {
    assert!(Params::default().validate().is_ok());
    assert!(params(1.5, 1.0).validate().is_err());
    assert!(params(0.0, 1.0).validate().is_err());
    let kh = Params {
        a_rho: 0.0,
        allow_kelvin_helmholtz: true,
        ..Params::default()
    };
    assert!(kh.validate().is_err(), "Kelvin-Helmholtz also needs epsilon > 0");
    assert!(Params { epsilon: 1e-3, ..kh }.validate().is_ok());
    assert!(params(1.0, -1.0).validate().is_ok());
    assert!(Params { rho2: 0.0, ..Params::default() }.validate().is_err());
    assert!(Params { solver_tol: 0.0, ..Params::default() }.validate().is_err());
}

#[test]
fn speed_examples() {
    let flat = wavy(32, 0.0, 1.0);
    let br = birkhoff_rott(&flat, &vec![0.7; 32]).unwrap();
    assert!(max_abs(&tangential_speed(&flat, &br)) < 1e-14);
    let (b, ap) = b_and_a_prime(&flat, &br);
    assert!(b.abs() < 1e-14 && ap.abs() < 1e-14);

    let c = circle(64);
    let br = birkhoff_rott(&c, &vec![1.3; 64]).unwrap();
    assert!(max_abs(&tangential_speed(&c, &br)) < 1e-12);
    let (b, ap) = b_and_a_prime(&c, &br);
    assert!(b.abs() < 1e-13 && ap.abs() < 1e-13);
}

#[test]
fn a_prime_is_twice_mean_stretch() {
    let z = wavy(64, 0.2, 2.0);
    let br = birkhoff_rott(&z, &sample(&z, |a| (3.0 * a).sin())).unwrap();
    let g = z.grid();
    let t = z.tangent();
    let dbr = VectorField::new(g.derivative(&br.x, 1), g.derivative(&br.y, 1));
    let (_, ap) = b_and_a_prime(&z, &br);
    assert!((ap - 2.0 * g.mean(&t.dot(&dbr))).abs() < 1e-14);
}

#[test]
fn speed_keeps_stretching_uniform() {
    // ∂z·∂z_t = B|∂z|² + c ∂z·∂²z, so uniform curves stay uniform.
    let z = wavy(64, 0.2, 1.0);
    let omega = sample(&z, |a| 0.3 * (2.0 * a).sin() + 0.1 * a.cos());
    let br = birkhoff_rott(&z, &omega).unwrap();
    let c = tangential_speed(&z, &br);
    let t = z.tangent();
    let z_t = br.add_scaled(&c, &t);
    let g = z.grid();
    let dzt = VectorField::new(g.derivative(&z_t.x, 1), g.derivative(&z_t.y, 1));
    let rate = t.dot(&dzt);
    let sq = t.dot(&t);
    let bend = t.dot(&z.derivative(2));
    let (b, _) = b_and_a_prime(&z, &br);
    for j in 0..64 {
        let expect = b * sq[j] + c[j] * bend[j];
        assert!((rate[j] - expect).abs() < 1e-12, "{j}: {} vs {expect}", rate[j]);
    }
}

#[test]
fn speed_formula_is_periodic() {
    let z = wavy(64, 0.3, 1.0);
    let br = birkhoff_rott(&z, &sample(&z, |a| (a.sin()).exp() - 1.266)).unwrap();
    let lo = tangential_speed_at(&z, &br, -PI);
    let hi = tangential_speed_at(&z, &br, PI);
    assert!((lo - hi).abs() < 1e-12, "{lo} {hi}");
    let c = tangential_speed(&z, &br);
    let mid = tangential_speed_at(&z, &br, z.grid().node(17));
    assert!((mid - c[17]).abs() < 1e-12);
    assert!(lo.abs() < 1e-12);
}

#[test]
fn phi_examples() {
    let flat = wavy(32, 0.0, 1.0);
    assert!(max_abs(&phi_from_state(&flat, &[0.0; 32], &[0.0; 32])) == 0.0);
    let omega = sample(&flat, |a| 2.0 * a.cos());
    let phi = phi_from_state(&flat, &omega, &[0.0; 32]);
    let expect = sample(&flat, f64::cos);
    assert!(phi.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-14));
    let c = circle(32);
    let phi = phi_from_state(&c, &[0.8; 32], &[0.0; 32]);
    assert!(phi.iter().all(|p| (p - 0.4).abs() < 1e-13));
}

#[test]
fn rhs_examples() {
    let flat = wavy(32, 0.0, 1.0);
    let zero = vec![0.0; 32];
    let zt = VectorField::zeros(32);
    for g in [0.0, 1.0, 9.8] {
        let r = omega_rhs(&flat, &zero, &zt, &zero, &zero, &params(1.0, g)).unwrap();
        assert!(max_abs(&r) == 0.0);
    }
    let curvy = wavy(32, 0.2, 1.0);
    let r = omega_rhs(&curvy, &zero, &zt, &zero, &zero, &params(1.0, 0.0)).unwrap();
    assert!(max_abs(&r) == 0.0);

    // Circle with constant sheet: evaluate at two resolutions.
    for n in [64, 128] {
        let c = circle(n);
        let st = SimState::new(0.0, c, ScalarField::constant(n, 1.0)).unwrap();
        let d = state_derivative(&st, &params(1.0, 0.0)).unwrap();
        let r = omega_rhs(&st.z, &st.omega, &d.z_t, &d.aux.c, &d.aux.phi, &params(1.0, 0.0)).unwrap();
        assert!(max_abs(&r) < 1e-10, "n={n}: {}", max_abs(&r));
    }
}

#[test]
fn flat_rest_is_equilibrium() {
    let z = wavy(64, 0.0, 1.0);
    let st = SimState::new(0.0, z, ScalarField::zeros(64)).unwrap();
    for a_rho in [1.0, 0.5] {
        let d = state_derivative(&st, &params(a_rho, 1.0)).unwrap();
        assert!(d.z_t.max_norm() == 0.0);
        assert!(d.omega_t.max_abs() == 0.0);
    }
}

#[test]
fn circle_moves_tangentially() {
    let st = SimState::new(0.0, circle(64), ScalarField::constant(64, 1.0)).unwrap();
    let d = state_derivative(&st, &params(1.0, 0.0)).unwrap();
    let normal = d.z_t.dot_perp(&st.z.tangent());
    assert!(normal.max_abs() < 1e-12);
    assert!(d.omega_t.max_abs() < 1e-11, "{}", d.omega_t.max_abs());
    assert!(d.aux.solver_residual <= 1e-12);
}

#[test]
fn transport_and_general_forms_agree_on_uniform_curves() {
    let cases = [
        (circle(64), sample(&circle(64), |a| 0.4 * (2.0 * a).cos() + 0.2 * a.sin() + 0.5)),
        (wavy(64, 0.0, 1.0), sample(&wavy(64, 0.0, 1.0), |a| 0.4 * (2.0 * a).cos() + 0.2 * a.sin())),
    ];
    for (z, omega) in cases {
        let st = SimState::new(0.0, z, ScalarField(omega)).unwrap();
        let p = params(1.0, 0.7);
        let d = state_derivative(&st, &p).unwrap();
        let kernels = BRKernelEval::new(&st.z).unwrap();
        let tangent = st.z.tangent();
        let frame = Frame {
            z: &st.z,
            omega: &st.omega,
            kernels: &kernels,
            tangent: &tangent,
            br: &d.aux.br,
            z_t: &d.z_t,
            c: &d.aux.c,
            phi: &d.aux.phi,
            a_prime: d.aux.a_prime,
        };
        let a = assemble_rhs(&frame, &p, true);
        let b = assemble_rhs(&frame, &p, false);
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-11 * max_abs(&a).max(1.0), "{diff}");
    }
}

#[test]
fn epsilon_damps_phi_modes() {
    // Linearize about the flat rest state: a small sheet with many modes.
    let n = 64;
    let z = wavy(n, 0.0, 1.0);
    let omega: Vec<f64> = sample(&z, |a| (1..=16).map(|k| 1e-6 * (k as f64 * a + 0.3).cos()).sum());
    let st = SimState::new(0.0, z.clone(), ScalarField(omega)).unwrap();
    let p0 = params(1.0, 1.0);
    let p1 = Params { epsilon: 1e-2, ..p0.clone() };
    let d0 = state_derivative(&st, &p0).unwrap();
    let d1 = state_derivative(&st, &p1).unwrap();
    let g = z.grid();
    let phi = g.forward(&d0.aux.phi);
    let extra: Vec<f64> = d1.omega_t.iter().zip(d0.omega_t.iter()).map(|(a, b)| a - b).collect();
    // On the flat line φ_t = ϖ_t/2 to leading order.
    let extra_hat = g.forward(&extra);
    for i in 0..n {
        let k = g.wavenumber(i).abs();
        if (2..=16).contains(&k) {
            let rate = (extra_hat[i] * phi[i].conj()).re;
            assert!(rate < 0.0, "k={k}: {rate}");
        }
    }
}

#[test]
fn general_a_rho_circle_is_steady() {
    for a_rho in [0.5, -0.3] {
        let st = SimState::new(0.0, circle(64), ScalarField::constant(64, 1.0)).unwrap();
        let d = state_derivative(&st, &params(a_rho, 0.0)).unwrap();
        assert!(d.omega_t.max_abs() < 1e-11, "{a_rho}: {}", d.omega_t.max_abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_velocity_is_birkhoff_rott(
        amp in 0.0..0.3f64,
        w1 in -1.0..1.0f64,
        w2 in -1.0..1.0f64,
        closed in proptest::bool::ANY,
    ) {
        let z = if closed {
            let g = Grid::new(64).unwrap();
            let x = g.nodes().iter().map(|a| (1.0 + amp * (2.0 * a).cos()) * a.cos()).collect();
            let y = g.nodes().iter().map(|a| (1.0 + amp * (2.0 * a).cos()) * a.sin()).collect();
            Contour::from_samples(g, GeometryKind::ClosedContour, x, y).unwrap()
        } else {
            wavy(64, amp, 1.0)
        };
        let omega = sample(&z, |a| w1 * a.sin() + w2 * (3.0 * a).cos());
        let st = SimState::new(0.0, z, ScalarField(omega)).unwrap();
        let d = state_derivative(&st, &params(0.5, 1.0)).unwrap();
        let t = st.z.tangent();
        let lhs = d.z_t.dot_perp(&t);
        let rhs = d.aux.br.dot_perp(&t);
        let scale = d.z_t.max_norm().max(1.0) * t.max_norm();
        for j in 0..64 {
            prop_assert!((lhs[j] - rhs[j]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn omega_t_stays_mean_free(
        amp in 0.0..0.25f64,
        w1 in -1.0..1.0f64,
        w2 in -1.0..1.0f64,
        a_rho in prop_oneof![Just(1.0), 0.2..0.9f64],
        g in 0.0..2.0f64,
    ) {
        // Transport form assumes uniform |∂z|, so curved states use the general form.
        let z = if a_rho == 1.0 { wavy(64, 0.0, 1.0) } else { wavy(64, amp, 1.0) };
        let omega = sample(&z, |a| w1 * a.sin() + w2 * (2.0 * a).cos());
        let st = SimState::new(0.0, z, ScalarField(omega)).unwrap();
        let d = state_derivative(&st, &params(a_rho, g)).unwrap();
        let m = st.z.grid().mean(&d.omega_t);
        prop_assert!(m.abs() <= 1e-10 * d.omega_t.max_abs().max(1e-300), "{} vs {}", m, d.omega_t.max_abs());
    }
}
