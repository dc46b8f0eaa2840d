use num_complex::Complex64 as C64;
use rsos_core::boltzmann::{SqrtMode, Square, WeightContext};
use rsos_core::{Family, ModelType, Step, ThetaContext};

const TAU: C64 = C64::new(0.0, 0.9);

fn b2() -> (WeightContext, ThetaContext) {
    let mt = ModelType::new(Family::B, 2, 1).unwrap();
    let wc = WeightContext::new(mt, TAU, SqrtMode::PrincipalComplex).unwrap();
    (wc, ThetaContext::new(TAU, 4.0).unwrap())
}

fn sq(top: i8, right: i8, left: i8, bottom: i8) -> Square {
    Square {
        top: Step(top),
        right: Step(right),
        left: Step(left),
        bottom: Step(bottom),
    }
}

/// Straight transcription of the B_2 weights (L = 4, lambda = -3/2, h = [x], sigma = 1).
struct B2 {
    th: ThetaContext,
    a: [f64; 2],
}

impl B2 {
    fn br(&self, x: C64) -> C64 {
        self.th.bracket(x)
    }
    fn c(&self, i: i8) -> f64 {
        match i {
            0 => -0.5,
            i if i > 0 => self.a[i as usize - 1],
            i => -self.a[(-i) as usize - 1],
        }
    }
    fn g(&self, i: i8) -> C64 {
        if i == 0 {
            return C64::new(1.0, 0.0);
        }
        let ai = self.c(i);
        let r = C64::new(ai + 1.0, 0.0);
        let mut v = self.br(r) / self.br(C64::new(ai, 0.0));
        for j in [1i8, 2, -1, -2] {
            if j == i || j == -i {
                continue;
            }
            let d = ai - self.c(j);
            v *= self.br(C64::new(d + 1.0, 0.0)) / self.br(C64::new(d, 0.0));
        }
        v
    }
    fn case2(&self, i: i8, j: i8, u: C64) -> C64 {
        let d = self.c(i) - self.c(j);
        self.br(1.0.into()) * self.br(d - u) / (self.br(1.0 + u) * self.br(d.into()))
    }
    fn case3(&self, i: i8, j: i8, u: C64) -> C64 {
        let d = self.c(i) - self.c(j);
        let r = self.br((d + 1.0).into()) * self.br((d - 1.0).into()) / self.br(d.into()).powi(2);
        self.br(u) / self.br(1.0 + u) * r.sqrt()
    }
    fn case4(&self, i: i8, j: i8, u: C64) -> C64 {
        let l = -1.5;
        let s = self.c(i) + self.c(j) + 1.0;
        self.br(u) * self.br(1.0.into()) * self.br(s + l - u)
            / (self.br(l - u) * self.br(1.0 + u) * self.br(s.into()))
            * (self.g(i) * self.g(j)).sqrt()
    }
    fn case5(&self, i: i8, u: C64) -> C64 {
        let l = -1.5;
        let s = 2.0 * self.c(i) + 1.0;
        let one = self.br(1.0.into());
        one * self.br(s - u) / (self.br(1.0 + u) * self.br(s.into()))
            + one * self.br(u) * self.br(s + l - u)
                / (self.br(l - u) * self.br(1.0 + u) * self.br(s.into()))
                * self.g(i)
    }
    fn case6(&self, u: C64) -> C64 {
        let l = -1.5;
        let one = self.br(1.0.into());
        let mut sum = C64::new(0.0, 0.0);
        // each term carries G_{a,j}; without it the weights fail Yang-Baxter
        for j in [1i8, 2, -1, -2] {
            let x = self.c(j) + 0.5;
            sum += self.br((x + 2.0 * l).into()) / self.br(x.into()) * self.g(j);
        }
        self.br(l + u) * one * self.br(2.0 * l - u)
            / (self.br(l - u) * self.br(1.0 + u) * self.br((2.0 * l).into()))
            - self.br(u) * one / (self.br(1.0 + u) * self.br((2.0 * l).into())) * sum
    }
}

#[test]
fn generic_b2_values_match_transcription() {
    let (wc, th) = b2();
    // chosen so that no two G ratios in a product root are both negative
    let a = [2.9, 1.3];
    let t = B2 { th, a };
    let ac: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
    let u = C64::new(0.3, 0.0);
    let cases = [
        (sq(1, 2, 1, 2), t.case2(1, 2, u)),
        (sq(2, -1, 2, -1), t.case2(2, -1, u)),
        (sq(0, 1, 0, 1), t.case2(0, 1, u)),
        (sq(2, 1, 1, 2), t.case3(1, 2, u)),
        (sq(-1, 2, 2, -1), t.case3(2, -1, u)),
        (sq(2, -2, 1, -1), t.case4(1, 2, u)),
        (sq(0, 0, 1, -1), t.case4(1, 0, u)),
        (sq(-2, 2, 1, -1), t.case4(1, -2, u)),
        (sq(1, -1, 1, -1), t.case5(1, u)),
        (sq(-2, 2, -2, 2), t.case5(-2, u)),
        (sq(0, 0, 0, 0), t.case6(u)),
    ];
    for (s, want) in cases {
        let got = wc.face(&ac, &s, u).unwrap();
        assert!(
            (got - want).norm() < 1e-12 * want.norm().max(1.0),
            "{s:?}: {got} vs {want}"
        );
    }
}

#[test]
fn case_one_is_one() {
    let (wc, _) = b2();
    let a = [C64::new(1.37, 0.0), C64::new(0.41, 0.0)];
    for i in [1, 2, -1, -2] {
        for u in [C64::new(0.3, 0.0), C64::new(-1.7, 0.4)] {
            assert!((wc.face(&a, &sq(i, i, i, i), u).unwrap() - 1.0).norm() < 1e-14);
        }
    }
}

#[test]
fn case_six_at_zero_is_one() {
    let (wc, _) = b2();
    for a in [[1.5, 0.5], [2.0, 1.0], [1.37, 0.41]] {
        let a: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        let v = wc.face(&a, &sq(0, 0, 0, 0), C64::new(0.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-12, "{v}");
    }
}

#[test]
fn g_ratio_matches_quotient_and_is_real() {
    let mt = ModelType::new(Family::B, 2, 1).unwrap();
    let wc = WeightContext::new(mt, TAU, SqrtMode::StrictReal).unwrap();
    let a = [C64::new(1.5, 0.0), C64::new(0.5, 0.0)];
    let r = wc.g_ratio(&a, Step(1)).unwrap();
    assert!(r.re > 0.0 && r.im.abs() < 1e-14);
    let b = [C64::new(2.5, 0.0), C64::new(0.5, 0.0)];
    assert!((r - wc.g(&b) / wc.g(&a)).norm() < 1e-12);
    assert!((wc.g_ratio(&a, Step(0)).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn symplectic_parity_sign() {
    let mt = ModelType::new(Family::C, 2, 1).unwrap();
    let wc = WeightContext::new(mt, TAU, SqrtMode::StrictReal).unwrap();
    let a = [C64::new(2.0, 0.0), C64::new(1.0, 0.0)];
    let b = [C64::new(3.0, 0.0), C64::new(1.0, 0.0)];
    // G_{a+e1}/G_a carries sigma = -1 next to the bracket ratios
    let q = wc.g(&b) / wc.g(&a);
    assert!((q - wc.g_ratio(&a, Step(1)).unwrap()).norm() < 1e-12);
    assert!(q.re < 0.0);
}
