use num_complex::Complex64;
use pathscatter::influence::*;
use pathscatter::lattice::*;
use pathscatter::potentials::{CentralPotential, LatticePotential, PairPotentials};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NONE: LatticePotential<f64> = LatticePotential::Free;
const GAUSS: CentralPotential<f64> = CentralPotential::Gaussian { v0: 0.6, width: 0.8 };

fn pots(v_a: LatticePotential<f64>, v_b: LatticePotential<f64>, v_ab: LatticePotential<f64>) -> PairPotentials<f64> {
    PairPotentials { v_a, v_b, v_ab }
}

fn gauss_b() -> LatticePotential<f64> {
    LatticePotential::Central {
        potential: GAUSS,
        center: 0.0,
    }
}

fn ion_lattice() -> LatticeSpec<f64> {
    LatticeSpec::new(-4.0, 4.0, 128).unwrap()
}

fn grid() -> TimeGrid<f64> {
    TimeGrid::new(0.0, 0.8, 64).unwrap()
}

fn random_path(rng: &mut ChaCha8Rng, g: TimeGrid<f64>) -> FixedPath<f64> {
    let samples = (0..=g.slices).map(|_| rng.random_range(-2.0..2.0)).collect();
    FixedPath::new(g, samples).unwrap()
}

const ION_MASS: f64 = 4.0;

#[test]
fn uncoupled_k1_is_the_free_propagator() {
    let l = ion_lattice();
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = pots(NONE, NONE, NONE);
    let (ra, rb) = (l.x(60), l.x(66));
    let exact = free_propagator(rb, g.t_b, ra, g.t_a, ION_MASS, Dimension::D1).unwrap();
    for _ in 0..5 {
        let path = random_path(&mut rng, g);
        let r = influence_k1(&p, &path, ra, rb, &l, &g, ION_MASS, 1e-3).unwrap();
        assert!(r.effective_phase.norm() <= 1e-10);
        assert!(
            (r.amplitude - exact).norm() <= 1e-4 * exact.norm(),
            "{} vs {}",
            r.amplitude,
            exact
        );
    }
}

#[test]
fn constant_internuclear_potential_gives_linear_phase() {
    let l = ion_lattice();
    let c = 0.35;
    let p = pots(NONE, NONE, LatticePotential::Constant { value: c });
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in [0.4, 0.8, 1.6] {
        let g = TimeGrid::new(0.0, t, 64).unwrap();
        let path = random_path(&mut rng, g);
        let r = influence_k1(&p, &path, l.x(60), l.x(62), &l, &g, ION_MASS, 1e-3).unwrap();
        assert!((r.effective_phase - Complex64::new(c * t, 0.0)).norm() <= 1e-10);
        let expect = r.free_amplitude * Complex64::from_polar(1.0, -c * t);
        assert!((r.amplitude - expect).norm() <= 1e-12 * expect.norm());
    }
}

#[test]
fn large_constant_phase_is_unwrapped() {
    let l = ion_lattice();
    let c = 40.0;
    let g = grid();
    let p = pots(NONE, NONE, LatticePotential::Constant { value: c });
    let path = FixedPath::stationary(g, 0.0).unwrap();
    let r = influence_k1(&p, &path, 0.0, 0.1, &l, &g, ION_MASS, 1e-3).unwrap();
    assert!((r.effective_phase.re - c * 0.8).abs() < 1e-9);
}

#[test]
fn static_electron_path_matches_static_propagator() {
    let l = ion_lattice();
    let g = grid();
    let r0 = 0.7;
    let p = pots(NONE, gauss_b(), NONE);
    let path = FixedPath::stationary(g, r0).unwrap();
    let (ia, ib) = (50, 71);
    let r = influence_k1(&p, &path, l.x(ia), l.x(ib), &l, &g, ION_MASS, 1e-3).unwrap();
    let shifted = LatticePotential::Central {
        potential: GAUSS,
        center: r0,
    };
    let k = time_sliced_propagator(&shifted, &l, &g, ION_MASS, PropagatorOptions::default()).unwrap();
    let expect = k.point_kernel().get(ib, ia);
    assert!(
        (r.amplitude - expect).norm() <= 1e-10 * expect.norm(),
        "{} vs {expect}",
        r.amplitude
    );
}

#[test]
fn static_ion_path_matches_static_electron_propagator() {
    let l = LatticeSpec::new(-8.0, 8.0, 128).unwrap();
    let g = grid();
    let big_r0 = -1.2;
    let p = pots(NONE, gauss_b(), NONE);
    let path = FixedPath::stationary(g, big_r0).unwrap();
    let r = influence_k2(&p, &path, l.x(60), l.x(70), &l, &g, 1.0, 1e-3).unwrap();
    let shifted = LatticePotential::Central {
        potential: GAUSS,
        center: big_r0,
    };
    let k = time_sliced_propagator(&shifted, &l, &g, 1.0, PropagatorOptions::default()).unwrap();
    let expect = k.point_kernel().get(70, 60);
    assert!((r.amplitude - expect).norm() <= 1e-10 * expect.norm());
}

#[test]
fn uncoupled_k2_is_free() {
    let l = LatticeSpec::new(-8.0, 8.0, 128).unwrap();
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let path = random_path(&mut rng, g);
    let r = influence_k2(&pots(NONE, NONE, NONE), &path, l.x(64), l.x(64), &l, &g, 1.0, 1e-3).unwrap();
    assert!(r.effective_phase.norm() <= 1e-10);
}

#[test]
fn zero_coupling_phase_is_path_independent() {
    let l = ion_lattice();
    let g = grid();
    let p = pots(NONE, NONE, LatticePotential::ExponentialWell { v0: -0.8, alpha: 0.7 });
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let phases: Vec<Complex64> = (0..10)
        .map(|_| {
            let path = random_path(&mut rng, g);
            influence_k1(&p, &path, l.x(55), l.x(68), &l, &g, ION_MASS, 1e-3)
                .unwrap()
                .effective_phase
        })
        .collect();
    let spread = phases.iter().map(|a| (a - phases[0]).norm()).fold(0.0, f64::max);
    assert!(spread <= 1e-10);
}

#[test]
fn moving_path_matches_slice_dependent_matrix_product() {
    let l = ion_lattice();
    let g = grid();
    let p = pots(
        NONE,
        gauss_b(),
        LatticePotential::Harmonic {
            mass: ION_MASS,
            omega: 0.5,
        },
    );
    let path = FixedPath::from_fn(g, |t| 1.5 * (3.0 * t).cos()).unwrap();
    let (ia, ib) = (58, 67);
    let r = influence_k1(&p, &path, l.x(ia), l.x(ib), &l, &g, ION_MASS, 1e-3).unwrap();
    let k = time_dependent_propagator(
        |j| {
            let shift = path.samples[j];
            pathscatter::potentials::FnPotential(move |x: f64| {
                GAUSS.evaluate(x - shift) + 0.5 * ION_MASS * 0.25 * x * x
            })
        },
        &l,
        &g,
        ION_MASS,
        PropagatorOptions::default(),
    )
    .unwrap();
    let expect = k.point_kernel().get(ib, ia);
    assert!((r.amplitude - expect).norm() <= 1e-10 * expect.norm());
}

#[test]
fn phases_of_disjoint_windows_add() {
    // A wide well whose centre follows the ion: inside a window the ion sits
    // at the origin and the electron feels the well; outside it is parked far
    // away. The electron's band-limited source never reaches the well edge.
    let l = LatticeSpec::new(-5000.0, 5000.0, 512).unwrap();
    let g = TimeGrid::new(0.0, 20.0, 40).unwrap();
    let well = LatticePotential::Central {
        potential: CentralPotential::SquareWell {
            v0: 0.05,
            radius: 1000.0,
        },
        center: 0.0,
    };
    let p = pots(NONE, well, NONE);
    let inside = |windows: &[(usize, usize)]| {
        let s = (0..=g.slices)
            .map(|j| {
                if windows.iter().any(|&(a, b)| j >= a && j <= b) {
                    0.0
                } else {
                    3000.0
                }
            })
            .collect();
        FixedPath::new(g, s).unwrap()
    };
    let phase = |w: &[(usize, usize)]| {
        influence_k2(&p, &inside(w), 0.0, 0.0, &l, &g, 1.0, 1e-3)
            .unwrap()
            .effective_phase
    };
    let a = phase(&[(5, 10)]);
    let b = phase(&[(25, 31)]);
    let both = phase(&[(5, 10), (25, 31)]);
    assert!((both - (a + b)).norm() <= 1e-8, "{both} vs {}", a + b);
    // five full slices plus two half-weighted edge slices of a 0.05 well
    assert!((a.re - 0.05 * 3.0).abs() < 1e-6, "{a}");
}

#[test]
fn full_amplitude_factorizes_without_coupling() {
    let le = LatticeSpec::new(-6.0, 6.0, 128).unwrap();
    let li = ion_lattice();
    let g = grid();
    let v_a = LatticePotential::ExponentialWell { v0: -1.0, alpha: 1.0 };
    let v_ab = LatticePotential::Harmonic {
        mass: ION_MASS,
        omega: 0.8,
    };
    let (e, i) = ((le.x(60), le.x(70)), (li.x(61), li.x(66)));
    let full = reconstruct_full_amplitude(
        &pots(v_a, NONE, v_ab),
        e,
        i,
        &le,
        &li,
        &g,
        1.0,
        ION_MASS,
        PRODUCT_LATTICE_CAP,
    )
    .unwrap();
    let ke = point_amplitude(&v_a, e.0, e.1, &le, &g, 1.0).unwrap();
    let ki = point_amplitude(&v_ab, i.0, i.1, &li, &g, ION_MASS).unwrap();
    let prod = ke * ki;
    assert!((full.amplitude - prod).norm() <= 1e-10 * prod.norm());

    let free = reconstruct_full_amplitude(
        &pots(NONE, NONE, NONE),
        e,
        i,
        &le,
        &li,
        &g,
        1.0,
        ION_MASS,
        PRODUCT_LATTICE_CAP,
    )
    .unwrap();
    let k0 = point_amplitude(&NONE, e.0, e.1, &le, &g, 1.0).unwrap()
        * point_amplitude(&NONE, i.0, i.1, &li, &g, ION_MASS).unwrap();
    assert!((free.amplitude - k0).norm() <= 1e-10 * k0.norm());
}

#[test]
fn product_lattice_cap_is_enforced() {
    let l = LatticeSpec::new(-1.0, 1.0, 300).unwrap();
    let r = reconstruct_full_amplitude(
        &pots(NONE, NONE, NONE),
        (0.0, 0.0),
        (0.0, 0.0),
        &l,
        &l,
        &grid(),
        1.0,
        1.0,
        PRODUCT_LATTICE_CAP,
    );
    assert!(matches!(r, Err(pathscatter::Error::Domain(_))));
}

/// `∂K/∂δ` at `δ = 0` for `V_B = δ·g` against the first-order Duhamel
/// integral built from exact free lattice propagators at continuous τ.
#[test]
fn weak_coupling_derivative_matches_first_order() {
    let le = LatticeSpec::new(-6.0, 6.0, 48).unwrap();
    let li = LatticeSpec::new(-3.0, 3.0, 40).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 100).unwrap();
    let (m, big_m) = (1.0, 6.0);
    let (ea, eb, ia, ib) = (20usize, 27usize, 18usize, 21usize);
    let e = (le.x(ea), le.x(eb));
    let i = (li.x(ia), li.x(ib));
    let amp = |d: f64| {
        let v_b = LatticePotential::Central {
            potential: GAUSS.scaled(d),
            center: 0.0,
        };
        reconstruct_full_amplitude(
            &pots(NONE, v_b, NONE),
            e,
            i,
            &le,
            &li,
            &g,
            m,
            big_m,
            PRODUCT_LATTICE_CAP,
        )
        .unwrap()
        .amplitude
    };
    let delta = 1e-4;
    let numeric = (amp(delta) - amp(-delta)) / (2.0 * delta);

    let (be, bi) = (SineBasis::new(&le), SineBasis::new(&li));
    let (fe, fi) = (be.smoothing_filter(), bi.smoothing_filter());
    let column = |f: &CMatrix<f64>, idx: usize, scale: f64| -> Vec<Complex64> {
        (0..f.rows()).map(|r| f.get(r, idx) * scale).collect()
    };
    let free =
        |b: &SineBasis<f64>, t: f64, mass: f64| b.operator(|k| Complex64::from_polar(1.0, -t * k * k / (2.0 * mass)));
    let src_e = column(&fe, ea, 1.0 / le.dx());
    let src_i = column(&fi, ia, 1.0 / li.dx());
    let dst_e = column(&fe, eb, 1.0);
    let dst_i = column(&fi, ib, 1.0);
    let gl = pathscatter::quadrature::GaussLegendre::new(40);
    let mut acc = Complex64::new(0.0, 0.0);
    for (tau, w) in gl.mapped(0.0, g.duration()) {
        let pe = free(&be, tau, m).mul_vec(&src_e);
        let pi = free(&bi, tau, big_m).mul_vec(&src_i);
        let qe = free(&be, g.duration() - tau, m).mul_vec(&dst_e);
        let qi = free(&bi, g.duration() - tau, big_m).mul_vec(&dst_i);
        let mut s = Complex64::new(0.0, 0.0);
        for r in 0..le.points {
            for rr in 0..li.points {
                s += qe[r] * qi[rr] * GAUSS.evaluate(le.x(r) - li.x(rr)) * pe[r] * pi[rr];
            }
        }
        acc += s * w;
    }
    let oracle = acc * Complex64::new(0.0, -1.0);
    assert!(
        (numeric - oracle).norm() <= 0.02 * oracle.norm(),
        "{numeric} vs {oracle}"
    );
}
