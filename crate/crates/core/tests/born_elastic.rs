use num_complex::Complex64;
use pathscatter::born::*;
use pathscatter::lattice::*;
use pathscatter::potentials::{CentralPotential, LatticePotential};
use pathscatter::quadrature::{GaussLegendre, Tolerance};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

const YUKAWA: CentralPotential<f64> = CentralPotential::Yukawa { v0: 1.0, alpha: 1.0 };

#[test]
fn yukawa_differential_examples() {
    let fwd = born_differential_cross_section(&YUKAWA, 1.0, 1.0, 0.0, &tol()).unwrap();
    assert!((fwd - 4.0).abs() < 1e-14);
    let back = born_differential_cross_section(&YUKAWA, 1.0, 1.0, PI, &tol()).unwrap();
    assert!((back - 0.16).abs() < 1e-14);
}

#[test]
fn closed_form_and_quadrature_routes_agree() {
    // dσ from the quadrature transform against the analytic Yukawa form
    for p in [0.5, 1.0, 2.0, 5.0] {
        for i in 0..=32 {
            let theta = PI * i as f64 / 32.0;
            let q = 2.0 * p * (theta / 2.0).sin();
            let v = YUKAWA.fourier_transform_quadrature(q, &tol()).unwrap().value;
            let quad = (v / (2.0 * PI)).powi(2);
            let exact = born_differential_cross_section(&YUKAWA, p, 1.0, theta, &tol()).unwrap();
            assert!((quad - exact).abs() <= 1e-8 * exact, "p={p} θ={theta}");
        }
    }
}

#[test]
fn yukawa_total_cross_section() {
    let s = born_total_cross_section(&YUKAWA, 1.0, 1.0, 64, &tol()).unwrap();
    assert!(
        (s.value - 16.0 * PI / 5.0).abs() <= 1e-8 * 16.0 * PI / 5.0,
        "{}",
        s.value
    );
    assert!(s.error <= 1e-10 * s.value);
    // independent oracle: closed-form integrand at high order
    let gl = GaussLegendre::new(400);
    let oracle = 2.0
        * PI
        * gl.integrate(
            |t: f64| {
                let q2 = 4.0 * (t / 2.0).sin().powi(2);
                (2.0 / (1.0 + q2)).powi(2) * t.sin()
            },
            0.0,
            PI,
        );
    assert!((s.value - oracle).abs() < 1e-10 * oracle);
}

#[test]
fn doubling_strength_quadruples_sigma() {
    let a = born_total_cross_section(&YUKAWA, 1.3, 1.0, 32, &tol()).unwrap().value;
    let b = born_total_cross_section(&YUKAWA.scaled(2.0), 1.3, 1.0, 32, &tol())
        .unwrap()
        .value;
    assert!((b - 4.0 * a).abs() <= 1e-13 * b);
}

#[test]
fn total_cross_section_needs_enough_nodes() {
    assert!(born_total_cross_section(&YUKAWA, 1.0, 1.0, 8, &tol()).is_err());
    assert!(born_total_cross_section(&YUKAWA, 0.0, 1.0, 32, &tol()).is_err());
}

#[test]
fn sigma_decreases_with_momentum() {
    let mut last = f64::INFINITY;
    for i in 0..=19 {
        let p = 0.5 + 0.5 * i as f64;
        let s = born_total_cross_section(&YUKAWA, p, 1.0, 32, &tol()).unwrap().value;
        assert!(s < last);
        last = s;
    }
}

#[test]
fn amplitude_is_real_including_forward() {
    let g = CentralPotential::Gaussian { v0: -0.4, width: 1.2 };
    for theta in [0.0, 0.3, 1.0, PI] {
        for pot in [YUKAWA, g] {
            let f = scattering_amplitude(&pot, 1.7, 1.0, theta, &tol()).unwrap();
            assert!(f.im.abs() <= 1e-12);
        }
    }
}

#[test]
fn rutherford_limit_of_screened_coulomb() {
    let (z, p, m) = (1.0, 1.0, 1.0);
    let theta = PI / 2.0;
    let q = 2.0 * p * (theta / 2.0f64).sin();
    let ruth = 4.0 * z * z * m * m / q.powi(4);
    let pot = CentralPotential::ScreenedCoulomb { z, screen: 1e-4 };
    let d = born_differential_cross_section(&pot, p, m, theta, &tol()).unwrap();
    assert!((d - ruth).abs() <= 1e-3 * ruth, "{d} vs {ruth}");
}

#[test]
fn far_field_scaling_and_forward_value() {
    let inc = PlaneWaveState::new([0.0, 0.0, 1.5], 1.0).unwrap();
    let opts = FarFieldOptions::default();
    let n = [0.0, (0.4f64).sin(), (0.4f64).cos()];
    let a = far_field_scattered_wave(&YUKAWA, &inc, 200.0, n, 0.0, &opts, &tol()).unwrap();
    let b = far_field_scattered_wave(&YUKAWA, &inc, 400.0, n, 0.0, &opts, &tol()).unwrap();
    assert!((a.norm() - 2.0 * b.norm()).abs() < 1e-15);
    let fwd = far_field_scattered_wave(&YUKAWA, &inc, 300.0, [0.0, 0.0, 1.0], 2.0, &opts, &tol()).unwrap();
    assert!((fwd.norm() * 300.0 - 4.0 * PI / (2.0 * PI)).abs() < 1e-13);
    let d = born_differential_cross_section(&YUKAWA, 1.5, 1.0, 0.4, &tol()).unwrap();
    assert!(((a * 200.0).norm_sqr() - d).abs() < 1e-13 * d);
    assert!(far_field_scattered_wave(&YUKAWA, &inc, 50.0, n, 0.0, &opts, &tol()).is_err());
    let soft = CentralPotential::SoftCoulomb { z: 1.0, soft: 1.0 };
    assert!(far_field_scattered_wave(&soft, &inc, 1e6, n, 0.0, &opts, &tol()).is_err());
}

#[test]
fn flux_of_plane_and_spherical_waves() {
    let (p, m) = (1.3, 2.0);
    let l = LatticeSpec::new(5.0, 5.0 + 16.0 * 1e-4, 17).unwrap();
    let plane = ComplexField1D::from_fn(l, |r: f64| Complex64::from_polar(1.0, p * r)).unwrap();
    for j in radial_flux(&plane, m).unwrap() {
        assert!((j - p / m).abs() < 1e-7);
    }
    let sph = ComplexField1D::from_fn(l, |r: f64| Complex64::from_polar(1.0 / r, p * r)).unwrap();
    for (k, j) in radial_flux(&sph, m).unwrap().into_iter().enumerate() {
        let r = l.x(k + 1);
        let exact = p / (m * r * r);
        assert!((j - exact).abs() <= 1e-6 * exact);
    }
}

/// Lattice route: a weak one-dimensional exponential well reflects a packet;
/// the reflected probability matches the first-order reflection coefficient
/// averaged over the packet's momentum distribution.
#[test]
fn lattice_reflection_matches_first_order_born() {
    // dx ≈ 0.065: the cusp of e^{-|x|} biases the sampled transform at
    // k = 2p by about (k dx)²/6, well below the tolerance here.
    let l = LatticeSpec::new(-50.0, 50.0, 1536).unwrap();
    let (x0, p0, sigma0) = (-20.0, 2.0, 3.0);
    let psi = ComplexField1D::gaussian_packet(l, x0, p0, sigma0).unwrap();
    let pot = LatticePotential::ExponentialWell { v0: 1e-3, alpha: 1.0 };
    let grid = TimeGrid::new(0.0, 20.0, 400).unwrap();
    let scat = scattered_component(&psi, &pot, &grid, 1.0, PropagatorOptions::default()).unwrap();
    let reflected = scat.probability_where(|x| x < -5.0);

    let sp = 1.0 / (2.0 * sigma0);
    let gl = GaussLegendre::new(200);
    let expect = gl.integrate(
        |p: f64| {
            let w = (-(p - p0).powi(2) / (2.0 * sp * sp)).exp() / (sp * (2.0 * PI).sqrt());
            w * born_reflection_1d(&pot, p, 1.0).unwrap()
        },
        p0 - 8.0 * sp,
        p0 + 8.0 * sp,
    );
    assert!((reflected - expect).abs() <= 0.02 * expect, "{reflected} vs {expect}");
}

proptest! {
    #[test]
    fn cross_section_depends_only_on_q(p in 0.3f64..5.0, theta in 0.05f64..3.0, p2 in 0.3f64..5.0) {
        let q = 2.0 * p * (theta / 2.0).sin();
        prop_assume!(q < 2.0 * p2);
        let theta2 = 2.0 * (q / (2.0 * p2)).asin();
        let g = CentralPotential::Gaussian { v0: 0.8, width: 0.7 };
        let a = born_differential_cross_section(&g, p, 1.0, theta, &tol()).unwrap();
        let b = born_differential_cross_section(&g, p2, 1.0, theta2, &tol()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn azimuth_is_irrelevant(theta in 0.0f64..PI, phi in 0.0f64..TAU) {
        let a = born_differential_cross_section_at(&YUKAWA, 1.0, 1.0, &ScatteringAngles::new(theta, phi).unwrap(), &tol()).unwrap();
        let b = born_differential_cross_section_at(&YUKAWA, 1.0, 1.0, &ScatteringAngles::new(theta, 0.0).unwrap(), &tol()).unwrap();
        prop_assert_eq!(a, b);
    }
}
