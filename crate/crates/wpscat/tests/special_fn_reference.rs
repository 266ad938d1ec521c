use num_complex::Complex64 as C64;
use proptest::prelude::*;
use wpscat::special_fn::*;

// w(z) at 40 significant digits (mpmath, exp(-z^2) erfc(-iz)), rounded to 19.
const W_REF: &[(f64, f64, f64, f64)] = &[
    (1.0, 0.0, 0.3678794411714423216, 0.6071577058413937291),
    (0.5, 0.5, 0.5331567079121749138, 0.2304882313844584087),
    (2.0, 1.0, 0.1402395813662779437, 0.2222134401798991026),
    (-1.5, 2.5, 0.165135818023710137, -0.0892218000636118566),
    (3.9, 0.01, 0.0004158579218562948018, 0.1499911569592837743),
    (4.0, 4.0, 0.07157043342636532916, 0.0693745186137714607),
    (5.5, -0.3, -0.005878863539634250375, 0.1040287006705879451),
    (6.0, 0.0, 2.319522830243569388e-16, 0.09539620896911076602),
    (6.1, 0.2, 0.003160034729853838796, 0.0936785002490554066),
    (0.0, 6.3, 0.08846589935285219778, 0.0),
    (-7.0, 1.0, 0.01162996304313675808, -0.0797320559013756163),
    (8.0, 0.5, 0.004496705370059768754, 0.07080011061892225445),
    (10.0, 10.0, 0.02827946745423245666, 0.02813843327633689563),
    (-12.0, -0.5, -0.00197624367649480456, -0.04709755696226781033),
    (20.0, 3.0, 0.004153127198180632507, 0.02761958348458680483),
    (29.0, -1.0, -0.0006712542312460302969, 0.01944321227204418245),
    (0.3, -3.0, -3365.341009637014327, 14423.98722281236184),
    (-2.0, -2.0, -0.438952827129242876, -2.109896210330981409),
    (0.001, 0.001, 0.9988716223354112471, 0.001126380671599866453),
    (15.0, 0.0, 1.921947727823849068e-98, 0.03769678605913683326),
];

const ERF_REF: &[(f64, f64, f64, f64)] = &[
    (1.0, 0.0, 0.8427007929497148693, 0.0),
    (0.5, 0.5, 0.6426129148548205283, 0.4578813944351922158),
    (2.0, 1.0, 1.003606342725651751, -0.01125900602881502508),
    (-1.5, 2.5, -7.254688693477926345, 8.785967293370455461),
    (3.0, 3.0, 0.8678264975754511421, -0.01215218179031225651),
    (4.0, 4.0, 0.9785492330760819259, 0.09733969063083186535),
    (2.5, -1.0, 0.9993826851377998453, 0.0008469445433937926168),
    (7.5, 0.5, 1.0, 3.41070491924892701e-26),
    (0.2, 5.0, 7375176189.311357504, -3009574073.71799285),
    (-6.0, -2.0, -0.9999999999999992353, 8.16444869943385355e-16),
    (8.0, 0.0, 1.0, 0.0),
];

/// Near the first complex zero of erf: absolute error is what counts.
const ERF_NEAR_ZERO: (f64, f64, f64, f64) =
    (1.45061616, 1.880943, -9.869903906199302111e-9, -1.177920092434108457e-8);

/// Plain f64 Maclaurin series, 200 terms. Independent of the library code.
fn erf_series_oracle(z: C64) -> C64 {
    let mut term = z;
    let mut sum = C64::new(0.0, 0.0);
    for n in 0..200 {
        sum += term / (2 * n + 1) as f64;
        term *= -z * z / (n + 1) as f64;
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn faddeeva_matches_reference_values() {
    for &(x, y, re, im) in W_REF {
        let z = C64::new(x, y);
        let want = C64::new(re, im);
        let got = faddeeva(z).unwrap();
        let rel = (got - want).norm() / want.norm();
        assert!(rel < 1e-12, "w({z}) = {got}, want {want}, rel {rel:e}");
    }
}

#[test]
fn erf_matches_reference_values() {
    for &(x, y, re, im) in ERF_REF {
        let z = C64::new(x, y);
        let want = C64::new(re, im);
        let got = erf_complex(z).unwrap();
        let rel = (got - want).norm() / want.norm();
        assert!(rel < 1e-12, "erf({z}) = {got}, want {want}, rel {rel:e}");
    }
    let (x, y, re, im) = ERF_NEAR_ZERO;
    let got = erf_complex(C64::new(x, y)).unwrap();
    assert!((got - C64::new(re, im)).norm() < 1e-12);
}

#[test]
fn erf_matches_series_oracle_small_argument() {
    let v = erf_series_oracle(C64::new(1.0, 0.0));
    assert!((v.re - 0.8427007929497149).abs() < 1e-14);
    for i in 0..40 {
        let z = C64::from_polar(0.05 + 0.04 * i as f64, 0.37 * i as f64);
        let a = erf_complex(z).unwrap();
        let b = erf_series_oracle(z);
        assert!((a - b).norm() <= 1e-14 * b.norm().max(1.0), "z={z}");
    }
}

#[test]
fn asymptotic_spot_checks() {
    let z = C64::new(4.0, 4.0);
    let a = erf_asymptotic(z, 6).unwrap();
    let e = erf_complex(z).unwrap();
    assert!((a - e).norm() <= 1e-6);
    let big = erf_asymptotic(C64::new(12.0, 0.0), 3).unwrap();
    assert!((big.re - 1.0).abs() < 1e-15);
}

#[test]
fn selftest_grid_is_finite() {
    for i in -30..=30 {
        for j in -5..=5 {
            let z = C64::new(i as f64, j as f64);
            let w = faddeeva(z).unwrap();
            assert!(w.re.is_finite() && w.im.is_finite(), "z={z}");
        }
    }
}

proptest! {
    #[test]
    fn conjugate_symmetry(x in -8.0f64..8.0, y in -8.0f64..8.0) {
        let z = C64::new(x, y);
        if x.abs() > 1e-3 || y.abs() < 6.0 {
            let a = erf_complex(z.conj()).unwrap();
            let b = erf_complex(z).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
        }
    }

    #[test]
    fn erf_is_odd(x in -8.0f64..8.0, y in -6.0f64..6.0) {
        let z = C64::new(x, y);
        let a = erf_complex(-z).unwrap();
        let b = erf_complex(z).unwrap();
        prop_assert!((a + b).norm() <= 1e-13 * b.norm().max(1.0));
    }

    #[test]
    fn reflection_identity_on_strip(x in -4.0f64..4.0, y in -5.0f64..5.0) {
        // w(z) e^{z^2} + w(-z) e^{z^2} = 2, written as w(z) + w(-z) = 2 e^{-z^2}
        let z = C64::new(x, y);
        let lhs = faddeeva(z).unwrap() + faddeeva(-z).unwrap();
        let rhs = 2.0 * exp_shifted_neg_sq(z, C64::new(0.0, 0.0)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0), "z={} {} {}", z, lhs, rhs);
    }

    #[test]
    fn asymptotic_agrees_on_annulus(r in 3.0f64..8.0, th in -3.14159f64..3.14159) {
        let z = C64::from_polar(r, th);
        let n = 8usize.min((r * r) as usize);
        let a = erf_asymptotic(z, n).unwrap();
        let e = erf_complex(z).unwrap();
        let bound = erf_asymptotic_bound(z, n);
        prop_assume!(bound.is_finite());
        let tol = bound + 1e-12 * e.norm().max(1.0);
        prop_assert!((a - e).norm() <= tol, "z={} {} {} tol {}", z, a, e, tol);
    }
}
