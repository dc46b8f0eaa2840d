//! Odd Jacobi theta function and the normalized bracket `[u]`.
//!
//! The bracket has simple zeros on `Z L + Z L tau`, derivative one at the
//! origin, `[u + L] = -[u]` and `[u + L tau] = -exp(-i pi tau - 2 pi i u / L) [u]`.
//! It is evaluated from the triple product; the series form is kept as an
//! independent cross-check.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Lower bound on `Im tau` used when none is given.
pub const DEFAULT_MIN_IM_TAU: f64 = 0.05;
/// Absolute truncation tolerance used when none is given.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThetaError {
    #[error("Im(tau) = {im} is below the convergence floor {floor}")]
    NonConvergent { im: f64, floor: f64 },
    #[error("invalid theta context: {0}")]
    InvalidContext(&'static str),
}

/// Immutable evaluation context for `theta` and `[u]`.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    tau: C64,
    scale: f64,
    trunc_tol: f64,
    min_im_tau: f64,
    nome: C64,
    theta_prime0: C64,
}

impl ThetaContext {
    pub fn new(tau: C64, scale: f64) -> Result<Self, ThetaError> {
        Self::with_tolerances(tau, scale, DEFAULT_TRUNC_TOL, DEFAULT_MIN_IM_TAU)
    }

    pub fn with_tolerances(
        tau: C64,
        scale: f64,
        trunc_tol: f64,
        min_im_tau: f64,
    ) -> Result<Self, ThetaError> {
        if min_im_tau.is_nan() || min_im_tau <= 0.0 {
            return Err(ThetaError::InvalidContext("min_im_tau must be positive"));
        }
        if tau.im < min_im_tau || !tau.im.is_finite() {
            return Err(ThetaError::NonConvergent {
                im: tau.im,
                floor: min_im_tau,
            });
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ThetaError::InvalidContext("scale L must be positive"));
        }
        if trunc_tol.is_nan() || trunc_tol <= 0.0 {
            return Err(ThetaError::InvalidContext("trunc_tol must be positive"));
        }
        let nome = (C64::i() * 2.0 * PI * tau).exp();
        let mut ctx = ThetaContext {
            tau,
            scale,
            trunc_tol,
            min_im_tau,
            nome,
            theta_prime0: C64::new(0.0, 0.0),
        };
        ctx.theta_prime0 = ctx.theta_prime0_series();
        Ok(ctx)
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    pub fn min_im_tau(&self) -> f64 {
        self.min_im_tau
    }

    /// Nome `p = exp(2 pi i tau)`.
    pub fn nome(&self) -> C64 {
        self.nome
    }

    /// `q = exp(i pi / L)`.
    pub fn q(&self) -> C64 {
        (C64::i() * PI / self.scale).exp()
    }

    /// Number of series terms `N` (|n| <= N) needed at a given `|Im x|`.
    fn series_cutoff(&self, im_x: f64) -> i64 {
        // term size exp(-pi t m^2 + 2 pi s m) with m = n + 1/2; want < tol/10
        let t = self.tau.im;
        let s = im_x.abs();
        let target = (10.0 / self.trunc_tol).ln();
        let disc = (2.0 * PI * s).powi(2) + 4.0 * PI * t * target;
        let m = (2.0 * PI * s + disc.sqrt()) / (2.0 * PI * t);
        m.ceil() as i64 + 1
    }

    /// The defining series
    /// `theta(x) = -sum_n exp(i pi (n+1/2)^2 tau + 2 pi i (n+1/2)(x+1/2))`.
    pub fn theta(&self, x: C64) -> C64 {
        let n_max = self.series_cutoff(x.im);
        let mut acc = C64::new(0.0, 0.0);
        for n in -n_max..=n_max {
            let m = n as f64 + 0.5;
            let e = C64::i() * PI * m * m * self.tau + C64::i() * 2.0 * PI * m * (x + 0.5);
            acc += e.exp();
        }
        -acc
    }

    fn theta_prime0_series(&self) -> C64 {
        let n_max = self.series_cutoff(0.0);
        let mut acc = C64::new(0.0, 0.0);
        for n in -n_max..=n_max {
            let m = n as f64 + 0.5;
            let e = C64::i() * PI * m * m * self.tau + C64::i() * PI * m;
            acc += C64::i() * 2.0 * PI * m * e.exp();
        }
        -acc
    }

    /// `theta'(0, tau)`, term-by-term derivative of the series.
    pub fn theta_prime0(&self) -> C64 {
        self.theta_prime0
    }

    /// `[u] = theta(u/L) / (theta'(0)/L)` via the series.
    pub fn bracket_series(&self, u: C64) -> C64 {
        self.theta(u / self.scale) * self.scale / self.theta_prime0
    }

    /// `[u]` via the triple product
    /// `(L/pi) sin(pi u/L) prod_m (1 - p^m z)(1 - p^m/z) / (1 - p^m)^2`, `z = exp(2 pi i u/L)`.
    pub fn bracket(&self, u: C64) -> C64 {
        let x = u / self.scale;
        let z = (C64::i() * 2.0 * PI * x).exp();
        let zi = z.inv();
        let growth = z.norm().max(zi.norm());
        let pabs = self.nome.norm();
        let mut v = (PI * x).sin() * (self.scale / PI);
        let mut pm = self.nome;
        let mut pm_abs = pabs;
        let cut = self.trunc_tol / 10.0;
        loop {
            if pm_abs * growth < cut && pm_abs < cut {
                break;
            }
            let d = C64::new(1.0, 0.0) - pm;
            v *= (C64::new(1.0, 0.0) - pm * z) * (C64::new(1.0, 0.0) - pm * zi) / (d * d);
            pm *= self.nome;
            pm_abs *= pabs;
        }
        v
    }

    /// Multiplier `m(u)` in `[u + L tau] = m(u) [u]`.
    pub fn quasi_period_factor(&self, u: C64) -> C64 {
        -(-C64::i() * PI * self.tau - C64::i() * 2.0 * PI * u / self.scale).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(t: f64, l: f64) -> ThetaContext {
        ThetaContext::new(C64::new(0.0, t), l).unwrap()
    }

    #[test]
    fn theta_vanishes_at_origin() {
        let c = ctx(0.9, 1.0);
        assert!(c.theta(C64::new(0.0, 0.0)).norm() < 1e-15);
        assert!(c.bracket(C64::new(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_is_odd() {
        let c = ctx(0.9, 1.0);
        let u = C64::new(0.31, 0.07);
        assert!((c.theta(-u) + c.theta(u)).norm() < 1e-13);
    }

    #[test]
    fn derivative_normalization() {
        let c = ctx(0.8, 5.0);
        let h = 1e-6;
        let v = c.bracket(C64::new(h, 0.0)) / h;
        assert!((v - 1.0).norm() < 1e-9);
        let e = c.bracket_series(C64::new(h, 0.0)) / h;
        assert!((e - 1.0).norm() < 1e-9);
    }

    #[test]
    fn theta_prime0_positive_for_imaginary_tau() {
        let c = ctx(0.8, 1.0);
        let t = c.theta_prime0();
        assert!(t.im.abs() < 1e-14 && t.re > 0.0);
        let h = 1e-5;
        let fd = (c.theta(C64::new(h, 0.0)) - c.theta(C64::new(-h, 0.0))) / (2.0 * h);
        assert!((fd - t).norm() < 1e-8);
    }

    #[test]
    fn product_matches_series() {
        let c = ctx(0.85, 5.0);
        let u = C64::new(0.4, 0.2);
        assert!((c.bracket(u) - c.bracket_series(u)).norm() < 1e-12);
    }

    #[test]
    fn shift_by_scale_flips_sign() {
        let c = ctx(0.8, 4.0);
        let u = C64::new(0.37, 0.0);
        assert!((c.bracket(u + 4.0) + c.bracket(u)).norm() < 1e-12);
    }

    #[test]
    fn shift_by_scaled_tau() {
        let c = ctx(0.7, 3.0);
        let u = C64::new(0.45, -0.1);
        let lt = c.tau() * 3.0;
        let lhs = c.bracket(u + lt);
        let rhs = c.quasi_period_factor(u) * c.bracket(u);
        assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
    }

    #[test]
    fn rejects_small_im_tau() {
        let e = ThetaContext::new(C64::new(0.0, 0.01), 3.0).unwrap_err();
        assert!(matches!(e, ThetaError::NonConvergent { .. }));
    }
}
