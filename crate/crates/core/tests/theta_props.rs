use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rsos_core::ThetaContext;
use std::f64::consts::PI;

fn ctx(t: f64, l: f64) -> ThetaContext {
    ThetaContext::new(C64::new(0.0, t), l).unwrap()
}

#[test]
fn frozen_theta_value() {
    // 64-term series and 80-factor triple product, evaluated independently
    let c = ctx(0.8, 1.0);
    let v = c.theta(C64::new(0.25, 0.0));
    assert!((v - C64::new(0.749515511792173, 0.0)).norm() < 1e-12, "{v}");
}

#[test]
fn theta_prime0_matches_finite_difference() {
    let c = ctx(0.8, 1.0);
    let h = 1e-5;
    let fd = (c.theta(C64::new(h, 0.0)) - c.theta(C64::new(-h, 0.0))) / (2.0 * h);
    assert!((fd - c.theta_prime0()).norm() < 1e-8);
    assert!(c.theta_prime0().re > 0.0 && c.theta_prime0().im.abs() < 1e-14);
}

#[test]
fn bracket_is_normalized() {
    let c = ctx(0.9, 4.0);
    let h = 1e-6;
    assert!((c.bracket(C64::new(h, 0.0)) / h - 1.0).norm() < 1e-9);
}

#[test]
fn product_form_from_nome() {
    // independent triple product using only the nome
    let c = ctx(0.85, 5.0);
    let u = C64::new(0.4, 0.2);
    let p = c.nome();
    let z = (C64::i() * 2.0 * PI * u / 5.0).exp();
    let mut v = (PI * u / 5.0).sin() * (5.0 / PI);
    let mut pm = p;
    for _ in 0..60 {
        v *= (1.0 - pm * z) * (1.0 - pm / z) / ((1.0 - pm) * (1.0 - pm));
        pm *= p;
    }
    assert!((c.bracket(u) - v).norm() < 1e-12);
    assert!((c.bracket_series(u) - v).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_odd(x in -3.0..3.0f64, y in -0.5..0.5f64, t in 0.6..1.5f64, l in 2.0..9.0f64) {
        let c = ctx(t, l);
        let u = C64::new(x, y);
        prop_assert!((c.bracket(-u) + c.bracket(u)).norm() < 1e-11);
    }

    #[test]
    fn bracket_periods(x in -3.0..3.0f64, y in -0.5..0.5f64, t in 0.6..1.5f64, l in 2.0..9.0f64) {
        let c = ctx(t, l);
        let u = C64::new(x, y);
        let b = c.bracket(u);
        prop_assert!((c.bracket(u + l) + b).norm() < 1e-11);
        let m = c.quasi_period_factor(u);
        let s = c.bracket(u + c.tau() * l);
        prop_assert!((s - m * b).norm() < 1e-11 * (m * b).norm().max(1.0));
    }

    #[test]
    fn series_matches_product(x in -3.0..3.0f64, y in -0.5..0.5f64, t in 0.6..1.5f64, l in 2.0..9.0f64) {
        let c = ctx(t, l);
        let u = C64::new(x, y);
        prop_assert!((c.bracket(u) - c.bracket_series(u)).norm() < 1e-11);
    }
}

#[test]
fn ratio_under_long_period() {
    // [x+L tau-a]/[x+L tau-b] = e^{2 pi i (a-b)/L} [x-a]/[x-b]; the variant with [x+a]/[x+b] fails
    let c = ctx(0.9, 5.0);
    let lt = c.tau() * 5.0;
    let (mut good, mut bad) = (0.0f64, f64::INFINITY);
    for k in 0..20 {
        let x = C64::new(0.13 + 0.21 * k as f64, 0.07);
        let (a, b) = (C64::new(0.8 + 0.05 * k as f64, 0.0), C64::new(2.3, 0.0));
        let lhs = c.bracket(x + lt - a) / c.bracket(x + lt - b);
        let f = (C64::i() * 2.0 * PI * (a - b) / 5.0).exp();
        good =
            good.max((lhs - f * c.bracket(x - a) / c.bracket(x - b)).norm() / lhs.norm().max(1.0));
        bad = bad.min((lhs - f * c.bracket(x + a) / c.bracket(x + b)).norm() / lhs.norm().max(1.0));
    }
    assert!(good < 1e-11, "{good}");
    assert!(bad > 1e-3, "{bad}");
}
