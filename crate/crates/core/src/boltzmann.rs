//! Face weights of the elliptic solid-on-solid models, the factors `G_a`,
//! and the scalar functions `rho`, `rho_2`, `rho'`.
//!
//! A face is described by its top-left corner `a` (complex coordinates, so
//! that unrestricted and perturbed corners are accepted) and the four steps
//! of its sides: `a -top-> b -right-> d`, `a -left-> c -bottom-> d`.

use crate::error::{Error, Result};
use crate::groupoid::{Cell, Family, Groupoid, HKind, ModelType, Step};
use crate::theta::ThetaContext;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

/// Branch policy for square roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SqrtMode {
    /// Radicands must be real and nonnegative; the nonnegative root is taken.
    StrictReal,
    /// Principal branch of the complex square root.
    PrincipalComplex,
}

impl std::str::FromStr for SqrtMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict_real" | "strict-real" => Ok(SqrtMode::StrictReal),
            "principal_complex" | "principal-complex" => Ok(SqrtMode::PrincipalComplex),
            other => Err(Error::NotApplicable(format!("unknown sqrt mode {other:?}"))),
        }
    }
}

/// Step labels of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Square {
    pub top: Step,
    pub right: Step,
    pub left: Step,
    pub bottom: Step,
}

impl From<&Cell> for Square {
    fn from(c: &Cell) -> Self {
        Square {
            top: c.top,
            right: c.right,
            left: c.left,
            bottom: c.bottom,
        }
    }
}

/// Weight pattern of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    AllEqual,
    Straight,
    Crossed,
    Reflected,
    SameReflected,
    AllZero,
    Vanishing,
}

pub fn classify(sq: &Square) -> Pattern {
    let (k, l, i, j) = (sq.top.0, sq.right.0, sq.left.0, sq.bottom.0);
    if i == j && j == k && k == l {
        return if i != 0 {
            Pattern::AllEqual
        } else {
            Pattern::AllZero
        };
    }
    if k == i && l == j && i != -j {
        return Pattern::Straight;
    }
    if k == j && l == i && i != -j {
        return Pattern::Crossed;
    }
    if j == -i && l == -k {
        return if k == i {
            Pattern::SameReflected
        } else {
            Pattern::Reflected
        };
    }
    Pattern::Vanishing
}

const CONTOUR_DIR: [f64; 8] = [1.0, 0.37, 0.21, 0.113, 0.07, 0.043, 0.029, 0.017];
const CONTOUR_RADIUS: f64 = 0.02;
const CONTOUR_POINTS: usize = 16;

#[derive(Debug, Clone)]
pub struct WeightContext {
    mt: ModelType,
    theta: ThetaContext,
    sqrt_mode: SqrtMode,
    zero_tol: f64,
    singular_tol: f64,
}

impl WeightContext {
    pub fn new(mt: ModelType, tau: C64, sqrt_mode: SqrtMode) -> Result<Self> {
        let theta = ThetaContext::new(tau, mt.scale() as f64)?;
        if sqrt_mode == SqrtMode::StrictReal && tau.re.abs() > 1e-15 {
            return Err(Error::NotApplicable(
                "strict_real square roots need a purely imaginary tau".into(),
            ));
        }
        Ok(WeightContext {
            mt,
            theta,
            sqrt_mode,
            zero_tol: 1e-12,
            singular_tol: 1e-9,
        })
    }

    pub fn model_type(&self) -> &ModelType {
        &self.mt
    }

    pub fn theta(&self) -> &ThetaContext {
        &self.theta
    }

    pub fn sqrt_mode(&self) -> SqrtMode {
        self.sqrt_mode
    }

    /// Same context with a different square-root convention.
    pub fn with_sqrt_mode(&self, sqrt_mode: SqrtMode) -> Self {
        WeightContext {
            sqrt_mode,
            ..self.clone()
        }
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn lambda(&self) -> f64 {
        self.mt.lambda()
    }

    pub fn br(&self, x: C64) -> C64 {
        self.theta.bracket(x)
    }

    fn brr(&self, x: f64) -> C64 {
        self.theta.bracket(C64::new(x, 0.0))
    }

    /// Signed coordinate `a_m`: `a_{-i} = -a_i`, `a_0 = -1/2`.
    pub fn coord(&self, a: &[C64], m: Step) -> C64 {
        match m.0 {
            0 => C64::new(-0.5, 0.0),
            i if i > 0 => a[i as usize - 1],
            i => -a[(-i) as usize - 1],
        }
    }

    fn h(&self, x: C64) -> C64 {
        match self.mt.h_kind() {
            HKind::One => C64::new(1.0, 0.0),
            HKind::Bracket => self.br(x),
            HKind::DoubleBracket => self.br(2.0 * x),
        }
    }

    /// Parity sign `eps(a)` (nontrivial only for C).
    fn parity_sign(&self, a: &[C64]) -> f64 {
        if self.mt.family != Family::C {
            return 1.0;
        }
        let s: f64 = a.iter().map(|x| x.re).sum();
        if (s.round() as i64).rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `G_a`.
    pub fn g(&self, a: &[C64]) -> C64 {
        let n = a.len();
        let mut v = C64::new(self.parity_sign(a), 0.0);
        for i in 0..n {
            if self.mt.family != Family::A {
                v *= self.h(a[i]);
            }
            for j in i + 1..n {
                v *= self.br(a[i] - a[j]);
                if self.mt.family != Family::A {
                    v *= self.br(a[i] + a[j]);
                }
            }
        }
        v
    }

    fn ratio_denominators(&self, a: &[C64], i: Step) -> Vec<C64> {
        let mut out = Vec::new();
        if i.0 == 0 {
            return out;
        }
        let ai = self.coord(a, i);
        if self.mt.h_kind() != HKind::One {
            out.push(self.h(ai));
        }
        for &j in self.mt.steps().iter() {
            if j.0 == 0 || j == i || j == -i {
                continue;
            }
            out.push(self.br(ai - self.coord(a, j)));
        }
        out
    }

    fn g_ratio_raw(&self, a: &[C64], i: Step) -> C64 {
        if i.0 == 0 {
            return C64::new(1.0, 0.0);
        }
        let ai = self.coord(a, i);
        let one = C64::new(1.0, 0.0);
        let mut v = self.mt.sigma_sign() * self.h(ai + one) / self.h(ai);
        for &j in self.mt.steps().iter() {
            if j.0 == 0 || j == i || j == -i {
                continue;
            }
            let d = ai - self.coord(a, j);
            v *= self.br(d + one) / self.br(d);
        }
        v
    }

    /// `G_{a,i} = G_{a+eps_i} / G_a` in closed form.
    pub fn g_ratio(&self, a: &[C64], i: Step) -> Result<C64> {
        if let Some(d) = self
            .ratio_denominators(a, i)
            .iter()
            .find(|d| d.norm() < self.zero_tol)
        {
            return Err(Error::DegenerateWeight(format!(
                "G ratio denominator {d} at step {}",
                i.0
            )));
        }
        Ok(self.g_ratio_raw(a, i))
    }

    /// Square root under the configured branch policy.
    pub fn root(&self, x: C64, context: &str) -> Result<C64> {
        match self.sqrt_mode {
            SqrtMode::PrincipalComplex => Ok(x.sqrt()),
            SqrtMode::StrictReal => {
                let tol = 1e-9 * x.norm().max(1.0);
                if x.im.abs() > tol || x.re < -self.zero_tol.max(tol) {
                    return Err(Error::NegativeRadicand {
                        value: x.re,
                        context: context.to_string(),
                    });
                }
                Ok(C64::new(x.re.max(0.0).sqrt(), 0.0))
            }
        }
    }

    /// Sign attached to a step in the symplectic case.
    pub fn step_sign(&self, s: Step) -> f64 {
        if self.mt.family == Family::C && s.0 < 0 {
            -1.0
        } else {
            1.0
        }
    }

    fn check_u(&self, u: C64, with_lambda: bool) -> Result<()> {
        let tol = self.zero_tol * self.theta.scale();
        if self.br(u + 1.0).norm() < tol {
            return Err(Error::PoleAtU(format!("{u} ([1+u] = 0)")));
        }
        if with_lambda && self.br(self.lambda() - u).norm() < tol {
            return Err(Error::PoleAtU(format!("{u} ([lambda-u] = 0)")));
        }
        Ok(())
    }

    fn singular_denominators(&self, a: &[C64], sq: &Square) -> Vec<C64> {
        match classify(sq) {
            Pattern::SameReflected => {
                let ai = self.coord(a, sq.left);
                let mut v = self.ratio_denominators(a, sq.left);
                v.push(self.br(2.0 * ai + 1.0));
                v
            }
            Pattern::AllZero => self
                .mt
                .steps()
                .iter()
                .filter(|j| j.0 != 0)
                .map(|&j| self.br(self.coord(a, j) + 0.5))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Face weight at corner `a` with spectral parameter `u`. Removable
    /// singularities at special corners are resolved by averaging over a
    /// small circle in the space of corners.
    pub fn face(&self, a: &[C64], sq: &Square, u: C64) -> Result<C64> {
        let sing = self
            .singular_denominators(a, sq)
            .iter()
            .any(|d| d.norm() < self.singular_tol);
        if !sing {
            return self.face_direct(a, sq, u);
        }
        let mut acc = C64::new(0.0, 0.0);
        let mut pert = a.to_vec();
        for t in 0..CONTOUR_POINTS {
            let ang = 2.0 * PI * (t as f64 + 0.5) / CONTOUR_POINTS as f64;
            let z = C64::from_polar(CONTOUR_RADIUS, ang);
            for (k, p) in pert.iter_mut().enumerate() {
                *p = a[k] + z * CONTOUR_DIR[k % CONTOUR_DIR.len()];
            }
            acc += self.face_direct(&pert, sq, u)?;
        }
        Ok(acc / CONTOUR_POINTS as f64)
    }

    /// Face weight without singularity handling.
    pub fn face_direct(&self, a: &[C64], sq: &Square, u: C64) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        let lam = self.lambda();
        let b1 = self.brr(1.0);
        let pat = classify(sq);
        if self.mt.family == Family::A
            && [sq.top, sq.right, sq.left, sq.bottom]
                .iter()
                .any(|s| s.0 <= 0)
        {
            return Ok(C64::new(0.0, 0.0));
        }
        match pat {
            Pattern::AllEqual => Ok(one),
            Pattern::Vanishing => Ok(C64::new(0.0, 0.0)),
            Pattern::Straight => {
                self.check_u(u, false)?;
                let x = self.coord(a, sq.left) - self.coord(a, sq.bottom);
                let den = self.br(x);
                if den.norm() < self.zero_tol {
                    return Err(Error::DegenerateWeight("[a_i - a_j] = 0".into()));
                }
                Ok(b1 * self.br(x - u) / (self.br(one + u) * den))
            }
            Pattern::Crossed => {
                self.check_u(u, false)?;
                let x = self.coord(a, sq.left) - self.coord(a, sq.bottom);
                let den = self.br(x);
                if den.norm() < self.zero_tol {
                    return Err(Error::DegenerateWeight("[a_i - a_j] = 0".into()));
                }
                let r = self.br(x + 1.0) * self.br(x - 1.0) / (den * den);
                Ok(self.br(u) / self.br(one + u) * self.root(r, "crossed face")?)
            }
            Pattern::Reflected => {
                self.check_u(u, true)?;
                let (i, k) = (sq.left, sq.top);
                let s = self.coord(a, i) + self.coord(a, k) + 1.0;
                let den = self.br(s);
                if den.norm() < self.zero_tol {
                    return Err(Error::DegenerateWeight("[a_i + a_k + 1] = 0".into()));
                }
                let sg = self.mt.sigma_sign();
                let gi = self.g_ratio(a, i)?;
                let gk = self.g_ratio(a, k)?;
                let pref = sg
                    * self.step_sign(i)
                    * self.step_sign(k)
                    * self.root(sg * gi, "G ratio")?
                    * self.root(sg * gk, "G ratio")?;
                Ok(self.br(u) * b1 * self.br(s + lam - u)
                    / (self.br(lam - u) * self.br(one + u) * den)
                    * pref)
            }
            Pattern::SameReflected => {
                self.check_u(u, true)?;
                let ai = self.coord(a, sq.left);
                let s = 2.0 * ai + 1.0;
                let den = self.br(s);
                let gi = self.g_ratio(a, sq.left)?;
                if den.norm() < self.zero_tol {
                    return Err(Error::DegenerateWeight("[2a_i + 1] = 0".into()));
                }
                let t1 = b1 * self.br(s - u) / (self.br(one + u) * den);
                let t2 = b1 * self.br(u) * self.br(s + lam - u)
                    / (self.br(lam - u) * self.br(one + u) * den)
                    * gi;
                Ok(t1 + t2)
            }
            Pattern::AllZero => {
                self.check_u(u, true)?;
                let l2 = self.brr(2.0 * lam);
                let mut tot = C64::new(0.0, 0.0);
                for &j in self.mt.steps().iter() {
                    if j.0 == 0 {
                        continue;
                    }
                    let x = self.coord(a, j) + 0.5;
                    let d = self.br(x);
                    if d.norm() < self.zero_tol {
                        return Err(Error::DegenerateWeight("[a_j + 1/2] = 0".into()));
                    }
                    tot += self.br(x + 2.0 * lam) / d * self.g_ratio(a, j)?;
                }
                Ok(self.br(lam + u) * b1 * self.br(2.0 * lam - u)
                    / (self.br(lam - u) * self.br(one + u) * l2)
                    - self.br(u) * b1 / (self.br(one + u) * l2) * tot)
            }
        }
    }

    /// Weight of a restricted cell.
    pub fn weight(&self, gr: &Groupoid, cell: &Cell, u: C64) -> Result<C64> {
        let a: Vec<C64> = gr
            .coords(cell.corner)
            .into_iter()
            .map(|x| C64::new(x, 0.0))
            .collect();
        self.face(&a, &Square::from(cell), u)
    }

    /// `rho(u) = [u-1][lambda+u] / ([u][1+lambda+u])`.
    pub fn rho(&self, u: C64) -> C64 {
        let l = self.lambda();
        self.br(u - 1.0) * self.br(u + l) / (self.br(u) * self.br(u + 1.0 + l))
    }

    /// `rho_2(u) = [lambda+u][lambda-u] / ([1+lambda+u][1+lambda-u])`.
    pub fn rho2(&self, u: C64) -> C64 {
        let l = self.lambda();
        self.br(u + l) * self.br(-u + l) / (self.br(u + 1.0 + l) * self.br(-u + 1.0 + l))
    }

    /// `(p, q)` with `-lambda / L = p / q` in lowest terms.
    pub fn lambda_ratio(&self) -> (i64, i64) {
        let num = -self.mt.lambda_twice();
        let den = 2 * self.mt.scale();
        let g = gcd(num.abs(), den);
        (num / g, den / g)
    }

    /// Square-root factorization `rho'` with `rho'(u) rho'(u+lambda) = +-rho(u)`.
    pub fn rho_prime(&self, u: C64) -> Result<C64> {
        if !matches!(self.mt.family, Family::C | Family::D) {
            return Err(Error::NotApplicable(
                "rho' is defined for types C and D".into(),
            ));
        }
        let (_, q) = self.lambda_ratio();
        if q % 2 == 0 {
            return Err(Error::NotApplicable(format!("denominator q = {q} is even")));
        }
        let l = self.lambda();
        let h = (q - 1) / 2;
        let mut v = C64::new(1.0, 0.0);
        for i in 0..=h {
            let i = i as f64;
            let num = self.br(u + 2.0 * i * l - 1.0) * self.br(u + (2.0 * i + 1.0) * l);
            let den = self.br(u + 2.0 * i * l) * self.br(u + (2.0 * i + 1.0) * l + 1.0);
            v *= (num / den).sqrt();
        }
        for j in 0..h {
            let j = j as f64;
            let num = self.br(u + (2.0 * j + 1.0) * l) * self.br(u + 2.0 * (j + 1.0) * l + 1.0);
            let den = self.br(u + (2.0 * j + 1.0) * l - 1.0) * self.br(u + 2.0 * (j + 1.0) * l);
            v *= (num / den).sqrt();
        }
        Ok(v)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{Groupoid, ModelType};

    fn ctx(f: Family, n: usize, l: u32) -> (Groupoid, WeightContext) {
        let mt = ModelType::new(f, n, l).unwrap();
        (
            Groupoid::new(mt),
            WeightContext::new(mt, C64::new(0.0, 0.9), SqrtMode::StrictReal).unwrap(),
        )
    }

    fn cvec(x: &[f64]) -> Vec<C64> {
        x.iter().map(|&v| C64::new(v, 0.0)).collect()
    }

    #[test]
    fn g_of_a1_is_bracket_one() {
        let (_, w) = ctx(Family::A, 2, 1);
        let g = w.g(&cvec(&[0.5, -0.5]));
        assert!((g - w.br(C64::new(1.0, 0.0))).norm() < 1e-14);
    }

    #[test]
    fn g_ratio_matches_quotient() {
        for (f, n, l) in [
            (Family::B, 2, 1),
            (Family::C, 2, 2),
            (Family::D, 3, 1),
            (Family::A, 3, 2),
        ] {
            let (gr, w) = ctx(f, n, l);
            let mt = *gr.model_type();
            for a in gr.object_ids() {
                for &i in &mt.steps() {
                    if i.0 == 0 {
                        continue;
                    }
                    let Some(b) = gr.step(a, i) else { continue };
                    let ca = cvec(&gr.coords(a));
                    let cb = cvec(&gr.coords(b));
                    let r = w.g_ratio(&ca, i).unwrap();
                    assert!((r - w.g(&cb) / w.g(&ca)).norm() < 1e-11, "{f:?} {i:?}");
                }
            }
        }
    }

    #[test]
    fn c_parity_flips() {
        let (_, w) = ctx(Family::C, 2, 1);
        assert_eq!(w.parity_sign(&cvec(&[2.0, 1.0])), -1.0);
        assert_eq!(w.parity_sign(&cvec(&[3.0, 1.0])), 1.0);
    }

    #[test]
    fn identity_at_zero() {
        let (gr, w) = ctx(Family::B, 2, 1);
        let z = C64::new(0.0, 0.0);
        for cell in gr.enumerate_cells(None) {
            let v = w.weight(&gr, &cell, z).unwrap();
            let diag = cell.top == cell.left && cell.right == cell.bottom;
            let want = if diag { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-11, "{cell:?} {v}");
        }
    }

    #[test]
    fn classify_patterns() {
        let s = |k, l, i, j| Square {
            top: Step(k),
            right: Step(l),
            left: Step(i),
            bottom: Step(j),
        };
        assert_eq!(classify(&s(1, 1, 1, 1)), Pattern::AllEqual);
        assert_eq!(classify(&s(0, 0, 0, 0)), Pattern::AllZero);
        assert_eq!(classify(&s(1, 2, 1, 2)), Pattern::Straight);
        assert_eq!(classify(&s(2, 1, 1, 2)), Pattern::Crossed);
        assert_eq!(classify(&s(2, -2, 1, -1)), Pattern::Reflected);
        assert_eq!(classify(&s(1, -1, 1, -1)), Pattern::SameReflected);
        assert_eq!(classify(&s(0, -1, 1, 0)), Pattern::Vanishing);
    }

    #[test]
    fn rho2_is_even() {
        let (_, w) = ctx(Family::A, 3, 1);
        let u = C64::new(0.71, 0.13);
        assert!((w.rho2(u) - w.rho2(-u)).norm() < 1e-12);
    }

    #[test]
    fn rho_prime_needs_odd_denominator() {
        let (_, w) = ctx(Family::C, 2, 1);
        assert!(matches!(
            w.rho_prime(C64::new(0.3, 0.1)),
            Err(Error::NotApplicable(_))
        ));
        let (_, w) = ctx(Family::D, 3, 1);
        assert_eq!(w.lambda_ratio(), (2, 5));
        assert!(w.rho_prime(C64::new(0.3, 0.1)).is_ok());
    }
}
