use num_complex::Complex64 as C64;
use proptest::prelude::*;
use wpscat::packet_basis::Packet1D;
use wpscat::stationary_scatter::{reflection_transmission, DeltaPotential};
use wpscat::tdse_oracle::*;

#[test]
fn free_evolution_matches_closed_form() {
    let g = Grid1D::at_safety_limit(1024, -40.0, 40.0).unwrap();
    let p = Packet1D::new(2.0, 0.8, -6.0).unwrap();
    let s = evolve(&p, &Potential1D::Zero, &g, 8.0).unwrap();
    let worst = (0..g.n_points).map(|j| (s.psi[j] - free_packet(&p, s.t, g.x(j))).norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn closed_form_free_packet_is_normalised_and_moves() {
    let p = Packet1D::new(1.5, 0.6, 1.0).unwrap();
    let g = Grid1D::at_safety_limit(4096, -120.0, 120.0).unwrap();
    for t in [0.0, 3.0, 20.0] {
        let st = EvolvedState { psi: g.xs().iter().map(|&x| free_packet(&p, t, x)).collect(), ..EvolvedState::from_packet(&p, &g) };
        assert!((st.norm() - 1.0).abs() < 1e-12);
        assert!((st.mean_x() - (1.0 + 0.6 * t)).abs() < 1e-10);
    }
}

#[test]
fn norm_drift_per_1e4_steps() {
    let g = Grid1D::new(1024, -50.0, 50.0, 1e-3).unwrap();
    let p = Packet1D::new(4.0, 1.0, -5.0).unwrap();
    for pot in [
        Potential1D::Zero,
        Potential1D::Delta { g: 1.0, w: 0.3, x0: 0.0 },
        Potential1D::Gaussian { g: -0.7, sigma_v: 0.5, x_v: 1.0 },
        Potential1D::Harmonic { omega: 0.3 },
    ] {
        let s = evolve(&p, &pot, &g, 1e4 * g.dt).unwrap_or_else(|e| panic!("{pot:?}: {e}"));
        assert_eq!(s.steps, 10_000);
        assert!(s.norm_drift <= 1e-10, "{pot:?}: {}", s.norm_drift);
    }
}

#[test]
fn harmonic_coherent_state_follows_classical_orbit() {
    let g = Grid1D::at_safety_limit(1024, -20.0, 20.0).unwrap();
    // sigma = 1/omega is the coherent width
    let p = Packet1D::new(1.0, 0.0, 2.0).unwrap();
    let v = Potential1D::Harmonic { omega: 1.0 }.sample(&g).unwrap();
    let mut s = EvolvedState::from_packet(&p, &g);
    let n = 16;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        s = evolve_state(&s, &v, h).unwrap();
        worst = worst.max((s.mean_x() - 2.0 * (k as f64 * h).cos()).abs());
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn time_reversal() {
    let g = Grid1D::at_safety_limit(512, -30.0, 30.0).unwrap();
    let p = Packet1D::new(1.0, 1.2, -4.0).unwrap();
    let v = Potential1D::Gaussian { g: 0.8, sigma_v: 0.4, x_v: 0.0 }.sample(&g).unwrap();
    let s0 = EvolvedState::from_packet(&p, &g);
    let back = evolve_state(&evolve_state(&s0, &v, 6.0).unwrap(), &v, -6.0).unwrap();
    let worst = s0.psi.iter().zip(&back.psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
}

fn cheap_rt() -> RtConfig {
    // dx = 0.1: coarser than the default but k0 dx stays 0.1
    let grid = Grid1D::at_safety_limit(1 << 12, -204.8, 204.8).unwrap().with_edges(Edges::Absorbing { width: 20.0, strength: 20.0 });
    RtConfig { grid, x_start: -30.0, time_factor: 3.0, interior: 8.0, interior_tol: 1e-4 }
}

#[test]
fn free_packet_is_fully_transmitted() {
    let r = reflection_transmission_dynamic(1.0, 0.1, &Potential1D::Zero, 0.0, &cheap_rt()).unwrap();
    assert!((r.t_prob - 1.0).abs() <= 1e-6 && r.r_prob <= 1e-6);
}

#[test]
fn dynamic_reflection_tracks_closed_form() {
    let cfg = cheap_rt();
    for (g, k0) in [(1.0, 1.0), (0.5, 1.2)] {
        let r = reflection_transmission_dynamic(k0, 0.1, &Potential1D::Delta { g, w: 0.02 / k0, x0: 0.0 }, 0.0, &cfg).unwrap();
        let (rr, _) = reflection_transmission(DeltaPotential { g }, k0).unwrap();
        assert!((r.r_prob - rr.norm_sqr()).abs() < 0.03, "{g} {k0}: {} vs {}", r.r_prob, rr.norm_sqr());
        assert!((r.r_prob + r.t_prob - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn unseparated_packets_are_flagged() {
    let cfg = RtConfig { time_factor: 1.0, ..cheap_rt() };
    let r = reflection_transmission_dynamic(1.0, 0.1, &Potential1D::Delta { g: 1.0, w: 0.02, x0: 0.0 }, 0.0, &cfg);
    assert!(matches!(r, Err(TdseError::IncompleteSeparation(_))));
}

#[test]
fn bias_study_fits_both_small_parameters() {
    // dx = 0.05 so that both widths are resolved
    let grid = Grid1D::at_safety_limit(1 << 13, -204.8, 204.8).unwrap().with_edges(Edges::Absorbing { width: 20.0, strength: 20.0 });
    let cfg = RtConfig { grid, ..cheap_rt() };
    let st = rt_bias_study(1.0, 1.0, &[0.1, 0.14], &[0.05, 0.1], &cfg).unwrap();
    assert_eq!(st.runs.len(), 4);
    assert!((st.r0 - st.closed_form).abs() < 0.01, "{st:?}");
    // at g = k0 the finite width raises R (barrier height ~ g/w above E)
    assert!(st.c_w > 0.0 && st.c_dk > 0.0, "{st:?}");
}

fn pert_setup() -> (Packet1D, Packet1D, Grid1D) {
    (
        Packet1D::new(4.0, 1.0, -5.0).unwrap(),
        Packet1D::new(4.0, -1.0, -5.0).unwrap(),
        Grid1D::at_safety_limit(2048, -50.0, 50.0).unwrap(),
    )
}

#[test]
fn perturbative_table() {
    let (a, b, g) = pert_setup();
    let tab = perturbative_crosscheck(&a, &b, 0.5, 0.0, (0.0, 10.0), &[0.0, 1e-3, 2e-3, 4e-3], &g).unwrap();
    assert_eq!(tab.rows[0].overlap, tab.rows[0].zeroth);
    let r: Vec<C64> = tab.rows[1..].iter().map(|r| r.first_order_ratio).collect();
    for z in &r {
        assert!(((z - r[0]) / r[0]).norm() < 0.01);
        assert!(((z - tab.s1_unit) / tab.s1_unit).norm() < 0.01);
    }
    assert!((tab.residual_exponent - 2.0).abs() <= 0.1, "{}", tab.residual_exponent);
    assert!(!tab.fit_flagged);
}

#[test]
fn first_order_amplitude_against_time_sliced_sum() {
    // independent x quadrature on the grid at Gauss-Legendre times
    let (a, b, g) = pert_setup();
    let s1 = first_order_unit(&a, &b, 0.5, 0.0, 0.0, 10.0, 1e-12).unwrap();
    let nodes = wpscat::quadrature::gauss_legendre_nodes(60).unwrap();
    let mut acc = C64::new(0.0, 0.0);
    for &(u, w) in &nodes {
        let t = 5.0 + 5.0 * u;
        let mut inner = C64::new(0.0, 0.0);
        for x in g.xs() {
            inner += free_packet(&b, t - 10.0, x).conj() * (-x * x / 0.5).exp() * free_packet(&a, t, x);
        }
        acc += inner * g.dx() * w * 5.0;
    }
    let want = C64::new(0.0, -1.0) * acc;
    assert!(((s1 - want) / want).norm() < 1e-9, "{s1} vs {want}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_conserved(g in -2.0f64..2.0, p0 in -1.5f64..1.5, x0 in -5.0f64..5.0, sv in 0.2f64..2.0) {
        let grid = Grid1D::new(256, -40.0, 40.0, 2e-3).unwrap();
        let p = Packet1D::new(2.0, p0, x0).unwrap();
        let s = evolve(&p, &Potential1D::Gaussian { g, sigma_v: sv, x_v: 0.0 }, &grid, 2000.0 * grid.dt).unwrap();
        prop_assert!(s.norm_drift <= 1e-11);
    }
}
