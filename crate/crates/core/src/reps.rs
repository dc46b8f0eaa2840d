//! Representations of the restricted quantum groups on graded path spaces.
//!
//! A representation `W` is described by its factor kinds and by `L_W(u)`,
//! the image of `T(u)`, an operator from `aux (x) W` to `W (x) aux` where the
//! auxiliary factor is `V`. Type A also carries `L*_W(u)`, the image of
//! `T*(u)`, with auxiliary factor `V*`. Central elements act by scalars:
//! `xi^+(u)` for orthogonal/symplectic types and `xi_2^+(u)` for type A.

use crate::error::{Error, Result};
use crate::graded::{paths, GradedOperator, Path, Residual};
use crate::groupoid::{Family, Groupoid, Kind, ObjId, Step};
use crate::rmatrix::{Model, RKind};
use crate::verify::{sampled, scalar_residual, CheckReport, SuiteConfig, Worst};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// `coeff * prod [u + shift]^exp`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarFn {
    pub coeff: C64,
    pub factors: Vec<(C64, i32)>,
}

impl ScalarFn {
    pub fn one() -> Self {
        ScalarFn {
            coeff: C64::new(1.0, 0.0),
            factors: vec![],
        }
    }

    pub fn bracket_ratio(num: C64, den: C64) -> Self {
        ScalarFn {
            coeff: C64::new(1.0, 0.0),
            factors: vec![(num, 1), (den, -1)],
        }
    }

    /// `rho(u + s)`.
    pub fn rho(lambda: f64, s: C64) -> Self {
        ScalarFn {
            coeff: C64::new(1.0, 0.0),
            factors: vec![
                (s - 1.0, 1),
                (s + lambda, 1),
                (s, -1),
                (s + 1.0 + lambda, -1),
            ],
        }
    }

    /// `rho_2(u + s)`, written with brackets of `u + const` only.
    pub fn rho2(lambda: f64, s: C64) -> Self {
        // [lambda - u - s] / [1 + lambda - u - s] = [u + s - lambda] / [u + s - lambda - 1]
        ScalarFn {
            coeff: C64::new(1.0, 0.0),
            factors: vec![
                (s + lambda, 1),
                (s - lambda, 1),
                (s + 1.0 + lambda, -1),
                (s - lambda - 1.0, -1),
            ],
        }
    }

    pub fn eval(&self, m: &Model, u: C64) -> Result<C64> {
        let mut v = self.coeff;
        for &(s, e) in &self.factors {
            let b = m.weights().br(u + s);
            if e < 0 && b.norm() < m.weights().zero_tol() {
                return Err(Error::ZeroScalar(format!("{}", u)));
            }
            v *= b.powi(e);
        }
        if v.norm() < m.weights().zero_tol() {
            return Err(Error::ZeroScalar(format!("{}", u)));
        }
        Ok(v)
    }

    pub fn mul(&self, other: &ScalarFn) -> ScalarFn {
        let mut factors = self.factors.clone();
        factors.extend(&other.factors);
        ScalarFn {
            coeff: self.coeff * other.coeff,
            factors,
        }
    }

    pub fn inv(&self) -> ScalarFn {
        ScalarFn {
            coeff: self.coeff.inv(),
            factors: self.factors.iter().map(|&(s, e)| (s, -e)).collect(),
        }
    }

    /// `u -> f(u + w)`.
    pub fn shift(&self, w: C64) -> ScalarFn {
        ScalarFn {
            coeff: self.coeff,
            factors: self.factors.iter().map(|&(s, e)| (s + w, e)).collect(),
        }
    }
}

/// Representations built from vector and scalar representations by tensor
/// products and duals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Rep {
    /// Vector representation with spectral parameter `z`.
    Vector {
        z: C64,
    },
    /// One-dimensional-per-object representation `C_f`.
    Scalar(ScalarFn),
    Tensor(Box<Rep>, Box<Rep>),
    /// Dual through the antipode.
    Dual(Box<Rep>),
}

impl Rep {
    pub fn vector(z: C64) -> Rep {
        Rep::Vector { z }
    }

    pub fn tensor(a: Rep, b: Rep) -> Rep {
        Rep::Tensor(Box::new(a), Box::new(b))
    }

    pub fn dual(a: Rep) -> Rep {
        Rep::Dual(Box::new(a))
    }

    /// Tensor product of vector representations at the given parameters.
    pub fn vectors(zs: &[C64]) -> Rep {
        let mut it = zs.iter().map(|&z| Rep::vector(z));
        let first = it.next().unwrap_or(Rep::Scalar(ScalarFn::one()));
        it.fold(first, Rep::tensor)
    }

    /// Factor kinds of the underlying graded space.
    pub fn kinds(&self, f: Family) -> Vec<Kind> {
        match self {
            Rep::Vector { .. } => vec![Kind::V],
            Rep::Scalar(_) => vec![],
            Rep::Tensor(a, b) => {
                let mut k = a.kinds(f);
                k.extend(b.kinds(f));
                k
            }
            Rep::Dual(a) => a.kinds(f).into_iter().rev().map(|k| k.dual(f)).collect(),
        }
    }

    /// Twist by the shift automorphism: `W(z)(w) = W(z + w)`.
    pub fn shifted(&self, w: C64) -> Rep {
        match self {
            Rep::Vector { z } => Rep::Vector { z: z + w },
            Rep::Scalar(f) => Rep::Scalar(f.shift(-w)),
            Rep::Tensor(a, b) => Rep::tensor(a.shifted(w), b.shifted(w)),
            Rep::Dual(a) => Rep::dual(a.shifted(w)),
        }
    }

    /// Image of the central element (`xi^+` or `xi_2^+`).
    pub fn central(&self, m: &Model, u: C64) -> Result<C64> {
        let a = m.model_type().family == Family::A;
        let l = m.lambda();
        Ok(match self {
            Rep::Vector { z } => {
                if a {
                    m.rho2(u - z)
                } else {
                    m.rho(u - z)
                }
            }
            Rep::Scalar(f) => {
                if a {
                    f.eval(m, u + l)? / f.eval(m, u - l)?
                } else {
                    f.eval(m, u)? * f.eval(m, u + l)?
                }
            }
            Rep::Tensor(x, y) => x.central(m, u)? * y.central(m, u)?,
            Rep::Dual(x) => x.central(m, u)?.inv(),
        })
    }

    /// Image of the inverse central element, computed independently.
    pub fn central_inverse(&self, m: &Model, u: C64) -> Result<C64> {
        let a = m.model_type().family == Family::A;
        let l = m.lambda();
        Ok(match self {
            Rep::Vector { z } => {
                let w = u - z;
                let lam = C64::new(l, 0.0);
                let br = |x: C64| m.weights().br(x);
                if a {
                    br(w + 1.0 + lam) * br(-w + 1.0 + lam) / (br(w + lam) * br(-w + lam))
                } else {
                    br(w) * br(w + 1.0 + lam) / (br(w - 1.0) * br(w + lam))
                }
            }
            Rep::Scalar(f) => {
                if a {
                    f.inv().eval(m, u + l)? * f.eval(m, u - l)?
                } else {
                    f.inv().eval(m, u)? * f.inv().eval(m, u + l)?
                }
            }
            Rep::Tensor(x, y) => x.central_inverse(m, u)? * y.central_inverse(m, u)?,
            Rep::Dual(x) => x.central(m, u)?,
        })
    }

    /// `L_W(u)`: `V (x) W -> W (x) V`.
    pub fn t(&self, m: &Model, u: C64) -> Result<GradedOperator> {
        let f = m.model_type().family;
        let gr = m.groupoid();
        match self {
            Rep::Vector { z } => m.r_vv(u - z),
            Rep::Scalar(sf) => Ok(GradedOperator::identity(gr, &[Kind::V]).scale(sf.eval(m, u)?)),
            Rep::Tensor(a, b) => {
                let mut kinds = vec![Kind::V];
                kinds.extend(a.kinds(f));
                kinds.extend(b.kinds(f));
                let (la, lb) = (a.t(m, u)?, b.t(m, u)?);
                GradedOperator::sequence(gr, &kinds, &[(&la, 0), (&lb, a.kinds(f).len())])
            }
            Rep::Dual(w) => {
                let l = m.lambda();
                let cc = m.caps();
                if f == Family::A {
                    let lw = w.tstar(m, u - l)?;
                    let pref = w.central(m, u - l)?.inv();
                    dual_action(m, &cc.omega, &cc.sigma, &lw, pref, Kind::V, &self.kinds(f))
                } else {
                    let lw = w.t(m, u - l)?;
                    let pref = w.central(m, u - l)?.inv();
                    dual_action(m, &cc.omega, &cc.sigma, &lw, pref, Kind::V, &self.kinds(f))
                }
            }
        }
    }

    /// `L*_W(u)`: `V* (x) W -> W (x) V*` (type A).
    pub fn tstar(&self, m: &Model, u: C64) -> Result<GradedOperator> {
        let f = m.model_type().family;
        if f != Family::A {
            return Err(Error::NotApplicable("T* exists for type A only".into()));
        }
        let gr = m.groupoid();
        let l = m.lambda();
        match self {
            Rep::Vector { z } => m.r(RKind::VStarV, u - z),
            Rep::Scalar(sf) => {
                Ok(GradedOperator::identity(gr, &[Kind::VStar]).scale(sf.eval(m, u - l)?.inv()))
            }
            Rep::Tensor(a, b) => {
                let mut kinds = vec![Kind::VStar];
                kinds.extend(a.kinds(f));
                kinds.extend(b.kinds(f));
                let (la, lb) = (a.tstar(m, u)?, b.tstar(m, u)?);
                GradedOperator::sequence(gr, &kinds, &[(&la, 0), (&lb, a.kinds(f).len())])
            }
            Rep::Dual(w) => {
                let (oms, sgs) = m.caps().star()?;
                let lw = w.t(m, u - l)?;
                dual_action(
                    m,
                    oms,
                    sgs,
                    &lw,
                    C64::new(1.0, 0.0),
                    Kind::VStar,
                    &self.kinds(f),
                )
            }
        }
    }
}

/// Action on a dual space. An input `(a; s, m*)` goes to `(a; n*, -t)` with
/// coefficient `pref * cap(a; s, -s) * cup(c; t, -t) * L[(c; t, n) -> (c; m, -s)]`,
/// where `n`, `m` are the inverse paths of `n*`, `m*` and `c` is the common end.
fn dual_action(
    m: &Model,
    cap: &GradedOperator,
    cup: &GradedOperator,
    lw: &GradedOperator,
    pref: C64,
    aux: Kind,
    dual_kinds: &[Kind],
) -> Result<GradedOperator> {
    let gr = m.groupoid();
    let mut in_kinds = vec![aux];
    in_kinds.extend(dual_kinds);
    let mut out_kinds = dual_kinds.to_vec();
    out_kinds.push(aux);
    let mut op = GradedOperator::new(in_kinds.clone(), out_kinds);
    // columns of lw grouped by their start
    let mut by_start: BTreeMap<ObjId, Vec<&Path>> = BTreeMap::new();
    for q in lw.entries.keys() {
        by_start.entry(q.start).or_default().push(q);
    }
    for p in paths(gr, &in_kinds) {
        let a = p.start;
        let s = p.steps[0];
        let c = p.end(gr).expect("basis path");
        let mut col = BTreeMap::new();
        let cap_v = cap.get(&Path::new(a, vec![s, -s]), &Path::empty(a));
        if cap_v != C64::new(0.0, 0.0) {
            let mstar = Path::new(gr.step(a, s).expect("basis path"), p.steps[1..].to_vec());
            let mm = mstar.inverse(gr).expect("basis path");
            let mut target = mm.steps.clone();
            target.push(-s);
            let target = Path::new(c, target);
            for q in by_start.get(&c).map(|v| v.as_slice()).unwrap_or(&[]) {
                if q.end(gr) != Some(a) {
                    continue;
                }
                let v = lw.get(q, &target);
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let t = q.steps[0];
                let cup_v = cup.get(&Path::empty(c), &Path::new(c, vec![t, -t]));
                let n = Path::new(gr.step(c, t).expect("basis path"), q.steps[1..].to_vec());
                let nstar = n.inverse(gr).expect("basis path");
                let mut out = nstar.steps;
                out.push(-t);
                *col.entry(Path::new(a, out)).or_insert(C64::new(0.0, 0.0)) +=
                    pref * cap_v * cup_v * v;
            }
        }
        op.entries.insert(p, col);
    }
    Ok(op)
}

// ------------------------------------------------------------------ checks

fn kinds_with(prefix: &[Kind], rest: &[Kind]) -> Vec<Kind> {
    let mut v = prefix.to_vec();
    v.extend(rest);
    v
}

/// Residual of every defining relation in the representation `w`.
pub fn relation_residual(m: &Model, w: &Rep, u1: C64, u2: C64) -> Result<Residual> {
    let f = m.model_type().family;
    let gr = m.groupoid();
    let k = w.kinds(f);
    let n = k.len();
    let l = m.lambda();
    let cc = m.caps();
    let (v, vs) = (Kind::V, Kind::VStar);
    let mut res = Residual::zero();
    let seq =
        |kinds: &[Kind], ops: &[(&GradedOperator, usize)]| GradedOperator::sequence(gr, kinds, ops);
    // central elements
    let z = (w.central(m, u1)? * w.central_inverse(m, u1)? - 1.0).norm();
    res.merge(Residual {
        value: z,
        witness: None,
    });
    // RTT
    let (t1, t2) = (w.t(m, u1)?, w.t(m, u2)?);
    let r12 = m.r_vv(u1 - u2)?;
    let kk = kinds_with(&[v, v], &k);
    let lhs = seq(&kk, &[(&t2, 1), (&t1, 0), (&r12, n)])?;
    let rhs = seq(&kk, &[(&r12, 0), (&t1, 1), (&t2, 0)])?;
    res.merge(lhs.residual(&rhs));
    let u = u1;
    let xi = w.central(m, u)?;
    let (tu, tl) = (w.t(m, u)?, w.t(m, u + l)?);
    if f == Family::A {
        let (oms, sgs) = cc.star()?;
        let (s1, s2) = (w.tstar(m, u1)?, w.tstar(m, u2)?);
        // (3)
        let rss = m.r(RKind::VStarVStar, u1 - u2)?;
        let kk = kinds_with(&[vs, vs], &k);
        let lhs = seq(&kk, &[(&s2, 1), (&s1, 0), (&rss, n)])?;
        let rhs = seq(&kk, &[(&rss, 0), (&s1, 1), (&s2, 0)])?;
        res.merge(lhs.residual(&rhs));
        // (4)
        let rsv = m.r(RKind::VStarV, u1 - u2)?;
        let kk = kinds_with(&[vs, v], &k);
        let lhs = seq(&kk, &[(&t2, 1), (&s1, 0), (&rsv, n)])?;
        let rhs = seq(&kk, &[(&rsv, 0), (&s1, 1), (&t2, 0)])?;
        res.merge(lhs.residual(&rhs));
        let (su, sl) = (w.tstar(m, u)?, w.tstar(m, u + l)?);
        // (5)
        let kk = kinds_with(&[v, vs], &k);
        let lhs = seq(&kk, &[(&su, 1), (&tl, 0), (&cc.omega, n)])?;
        res.merge(lhs.residual(&seq(&kk, &[(&cc.omega, 0)])?.scale(xi)));
        // (6)
        let kk = kinds_with(&[vs, v], &k);
        let lhs = seq(&kk, &[(&tu, 1), (&sl, 0), (oms, n)])?;
        res.merge(lhs.residual(&seq(&kk, &[(oms, 0)])?));
        // (7)
        let lhs = seq(&k, &[(&cc.sigma, 0), (&tl, 1), (&su, 0)])?;
        res.merge(lhs.residual(&seq(&k, &[(&cc.sigma, n)])?.scale(xi)));
        // (8)
        let lhs = seq(&k, &[(sgs, 0), (&sl, 1), (&tu, 0)])?;
        res.merge(lhs.residual(&seq(&k, &[(sgs, n)])?));
    } else {
        let kk = kinds_with(&[v, v], &k);
        let lhs = seq(&kk, &[(&tu, 1), (&tl, 0), (&cc.omega, n)])?;
        res.merge(lhs.residual(&seq(&kk, &[(&cc.omega, 0)])?.scale(xi)));
        let lhs = seq(&k, &[(&cc.sigma, 0), (&tl, 1), (&tu, 0)])?;
        res.merge(lhs.residual(&seq(&k, &[(&cc.sigma, n)])?.scale(xi)));
    }
    Ok(res)
}

/// Entrywise comparison of two representations on the same space.
pub fn action_residual(m: &Model, a: &Rep, b: &Rep, u: C64) -> Result<Residual> {
    let mut res = a.t(m, u)?.residual(&b.t(m, u)?);
    if m.model_type().family == Family::A {
        res.merge(a.tstar(m, u)?.residual(&b.tstar(m, u)?));
    }
    res.merge(Residual {
        value: (a.central(m, u)? - b.central(m, u)?).norm(),
        witness: None,
    });
    Ok(res)
}

/// Spectral parameters of the vector representations used by the checks.
pub const Z1: C64 = C64::new(0.23, 0.05);
pub const Z2: C64 = C64::new(-0.41, 0.11);

/// Test scalar functions, ratios of brackets.
pub fn test_fns() -> (ScalarFn, ScalarFn) {
    (
        ScalarFn::bracket_ratio(C64::new(0.3, 0.0), C64::new(-0.2, 0.07)),
        ScalarFn::bracket_ratio(C64::new(0.1, 0.05), C64::new(0.7, -0.02)),
    )
}

fn rep_check<F>(
    m: &Model,
    cfg: &SuiteConfig,
    name: &str,
    nargs: usize,
    tol: f64,
    f: F,
) -> CheckReport
where
    F: Fn(&[C64]) -> Result<Residual>,
{
    sampled(m, cfg, name, nargs, tol, f)
}

pub fn check_vector_relations(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let w = Rep::vector(Z1);
    rep_check(m, cfg, "rep_vector_relations", 2, cfg.tol, |a| {
        relation_residual(m, &w, a[0], a[1])
    })
}

pub fn check_scalar_relations(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let w = Rep::Scalar(test_fns().0);
    rep_check(m, cfg, "rep_scalar_relations", 2, cfg.tol, |a| {
        relation_residual(m, &w, a[0], a[1])
    })
}

pub fn check_tensor_relations(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let w = Rep::vectors(&[Z1, Z2]);
    rep_check(m, cfg, "rep_tensor_relations", 2, cfg.tol, |a| {
        relation_residual(m, &w, a[0], a[1])
    })
}

/// Relations in the dual of a vector representation (antipode images).
pub fn check_dual_relations(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let w = Rep::dual(Rep::vector(Z1));
    rep_check(m, cfg, "rep_dual_relations", 2, cfg.tol, |a| {
        relation_residual(m, &w, a[0], a[1])
    })
}

/// `C_f (x) C_g = C_{fg}`, counit and coassociativity.
pub fn check_coalgebra(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "rep_coalgebra", 1, cfg.tol, |a| {
        let u = a[0];
        let (f, g) = test_fns();
        let mut res = Residual::zero();
        let fg = Rep::tensor(Rep::Scalar(f.clone()), Rep::Scalar(g.clone()));
        res.merge(action_residual(m, &fg, &Rep::Scalar(f.mul(&g)), u)?);
        let v = Rep::vector(Z1);
        let one = Rep::Scalar(ScalarFn::one());
        res.merge(action_residual(
            m,
            &Rep::tensor(v.clone(), one.clone()),
            &v,
            u,
        )?);
        res.merge(action_residual(m, &Rep::tensor(one, v.clone()), &v, u)?);
        let w = Rep::vector(Z2);
        let x = Rep::vector(C64::new(0.6, -0.1));
        let left = Rep::tensor(Rep::tensor(v.clone(), w.clone()), x.clone());
        let right = Rep::tensor(v, Rep::tensor(w, x));
        res.merge(action_residual(m, &left, &right, u)?);
        Ok(res)
    })
}

/// `V(z)(w) = V(z + w)`: the shift twist evaluates `L_{V(z)}` at `u - w`.
pub fn check_shift(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "rep_shift", 2, cfg.tol * 1e-2, |a| {
        let (u, w) = (a[0], a[1] * 0.1);
        let v = Rep::vectors(&[Z1, Z2]);
        let mut res = v.shifted(w).t(m, u)?.residual(&v.t(m, u - w)?);
        if m.model_type().family == Family::A {
            res.merge(v.shifted(w).tstar(m, u)?.residual(&v.tstar(m, u - w)?));
        }
        Ok(res)
    })
}

/// Evaluation pairing `W* (x) W -> 1` is a morphism of representations.
pub fn pairing(m: &Model, w: &Rep) -> GradedOperator {
    let f = m.model_type().family;
    let gr = m.groupoid();
    let kw = w.kinds(f);
    let kd = Rep::dual(w.clone()).kinds(f);
    let mut kinds = kd.clone();
    kinds.extend(&kw);
    let mut op = GradedOperator::new(kinds.clone(), vec![]);
    let n = kd.len();
    for p in paths(gr, &kinds) {
        let first = Path::new(p.start, p.steps[..n].to_vec());
        let mid = first.end(gr).expect("basis path");
        let second = Path::new(mid, p.steps[n..].to_vec());
        let mut col = BTreeMap::new();
        if first.inverse(gr).as_ref() == Some(&second) {
            col.insert(Path::empty(p.start), C64::new(1.0, 0.0));
        }
        op.entries.insert(p, col);
    }
    op
}

pub fn check_dual_pairing(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "rep_dual_pairing", 1, cfg.tol, |a| {
        let u = a[0];
        let f = m.model_type().family;
        let gr = m.groupoid();
        let mut res = Residual::zero();
        for w in [Rep::vector(Z1), Rep::vectors(&[Z1, Z2])] {
            let ev = pairing(m, &w);
            let dw = Rep::tensor(Rep::dual(w.clone()), w.clone());
            let n = dw.kinds(f).len();
            let mut kinds = vec![Kind::V];
            kinds.extend(dw.kinds(f));
            let t = dw.t(m, u)?;
            let lhs = GradedOperator::sequence(gr, &kinds, &[(&t, 0), (&ev, 0)])?;
            let rhs = GradedOperator::sequence(gr, &kinds, &[(&ev, 1)])?;
            res.merge(lhs.residual(&rhs));
            let _ = n;
            if f == Family::A {
                let mut kinds = vec![Kind::VStar];
                kinds.extend(dw.kinds(f));
                let t = dw.tstar(m, u)?;
                let lhs = GradedOperator::sequence(gr, &kinds, &[(&t, 0), (&ev, 0)])?;
                let rhs = GradedOperator::sequence(gr, &kinds, &[(&ev, 1)])?;
                res.merge(lhs.residual(&rhs));
            }
        }
        Ok(res)
    })
}

/// Corners of an entry of `L_W`: top-left, top-right, bottom-left, bottom-right.
fn entry_corners(gr: &Groupoid, p: &Path, q: &Path) -> (ObjId, ObjId, ObjId, ObjId) {
    let a = p.start;
    let c = gr.step(a, p.steps[0]).expect("basis path");
    let d = p.end(gr).expect("basis path");
    let b = gr
        .walk(a, &q.steps[..q.steps.len() - 1])
        .expect("basis path");
    (a, b, c, d)
}

/// `xi_2^+` of a representation: `xi_2` itself for type A, `xi^-(u-lambda) xi^+(u)` otherwise.
pub fn xi2(m: &Model, w: &Rep, u: C64) -> Result<C64> {
    if m.model_type().family == Family::A {
        w.central(m, u)
    } else {
        Ok(w.central(m, u)? / w.central(m, u - m.lambda())?)
    }
}

/// `xi_2^+(u - lambda)` of `V(z)` as a closed-form scalar function.
pub fn double_dual_scalar(m: &Model, z: C64) -> ScalarFn {
    let l = m.lambda();
    if m.model_type().family == Family::A {
        ScalarFn::rho2(l, -z - l)
    } else {
        ScalarFn::rho(l, -z - l).mul(&ScalarFn::rho(l, -z - 2.0 * l).inv())
    }
}

/// `W(z)** = W(z + 2 lambda) (x) C_f`, compared entrywise after the `G` gauge.
pub fn check_p_dual_i(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "p_dual_i", 1, cfg.tol, |a| {
        let u = a[0];
        let gr = m.groupoid();
        let l = m.lambda();
        let w = Rep::vector(Z1);
        let dd = Rep::dual(Rep::dual(w.clone()));
        let rhs = Rep::tensor(
            w.shifted(C64::new(2.0 * l, 0.0)),
            Rep::Scalar(double_dual_scalar(m, Z1)),
        );
        let mut res = Residual::zero();
        let mut pairs = vec![(dd.t(m, u)?, rhs.t(m, u)?)];
        if m.model_type().family == Family::A {
            pairs.push((dd.tstar(m, u)?, rhs.tstar(m, u)?));
        }
        for (x, y) in pairs {
            let g = |o| m.g_of(o);
            let gauged = |op: &GradedOperator, left: bool| {
                let mut out = op.clone();
                for (p, col) in out.entries.iter_mut() {
                    for (q, v) in col.iter_mut() {
                        let (ca, cb, cc, cd) = entry_corners(gr, p, q);
                        *v *= if left { g(ca) / g(cb) } else { g(cc) / g(cd) };
                    }
                }
                out
            };
            res.merge(gauged(&x, true).residual(&gauged(&y, false)));
        }
        Ok(res)
    })
}

/// Orthogonal/symplectic: `V(z) = V(z - lambda)* (x) C_f` with `f(u) = rho(u - z)`,
/// the isomorphism being the diagonal map given by `omega`.
pub fn check_p_dual_ii(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "p_dual_ii", 1, cfg.tol, |a| {
        let u = a[0];
        let gr = m.groupoid();
        let l = m.lambda();
        let cc = m.caps();
        let v = Rep::vector(Z1);
        let w = Rep::tensor(
            Rep::dual(Rep::vector(Z1 - l)),
            Rep::Scalar(ScalarFn::rho(l, -Z1)),
        );
        let lv = v.t(m, u)?;
        let lw = w.t(m, u)?;
        let phi = |start: ObjId, s: Step| {
            cc.omega
                .get(&Path::new(start, vec![s, -s]), &Path::empty(start))
        };
        let mut res = Residual::zero();
        for (p, col) in &lv.entries {
            let c = gr.step(p.start, p.steps[0]).expect("basis path");
            for q in col
                .keys()
                .chain(lw.column(p).map(|c| c.keys()).into_iter().flatten())
            {
                let lhs = phi(q.start, q.steps[0]) * lv.get(p, q);
                let rhs = lw.get(p, q) * phi(c, p.steps[1]);
                let d = (lhs - rhs).norm();
                if d > res.value {
                    res = Residual {
                        value: d,
                        witness: Some((p.clone(), q.clone())),
                    };
                }
            }
        }
        // the cap-level form of the same statement
        let (r, rl) = (m.r_vv(u)?, m.r_vv(u + l)?);
        let kk = [Kind::V, Kind::V, Kind::V];
        let lhs = GradedOperator::sequence(gr, &kk, &[(&r, 0), (&rl, 1), (&cc.omega, 0)])?;
        let rhs = GradedOperator::sequence(gr, &kk, &[(&cc.omega, 1)])?.scale(m.rho(u));
        res.merge(lhs.residual(&rhs));
        Ok(res)
    })
}

/// `L_{W**}(u) = xi_2^+(u - lambda) G_b G_c / (G_d G_a) L_W(u - 2 lambda)`, and for type A
/// `L*_{W**}(u) = xi_2^-(u - 2 lambda) G_b G_c / (G_d G_a) L*_W(u - 2 lambda)`.
pub fn check_s_squared(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "s_squared", 1, cfg.tol, |a| {
        let u = a[0];
        let gr = m.groupoid();
        let l = m.lambda();
        let w = Rep::vector(Z1);
        let dd = Rep::dual(Rep::dual(w.clone()));
        let g = |o| m.g_of(o);
        let gauge = |op: &GradedOperator, c0: C64| {
            let mut out = op.clone();
            for (p, col) in out.entries.iter_mut() {
                for (q, v) in col.iter_mut() {
                    let (ca, cb, cc, cd) = entry_corners(gr, p, q);
                    *v *= c0 * g(cb) * g(cc) / (g(cd) * g(ca));
                }
            }
            out
        };
        let mut res = dd
            .t(m, u)?
            .residual(&gauge(&w.t(m, u - 2.0 * l)?, xi2(m, &w, u - l)?));
        if m.model_type().family == Family::A {
            let x = xi2(m, &w, u - 2.0 * l)?.inv();
            res.merge(
                dd.tstar(m, u)?
                    .residual(&gauge(&w.tstar(m, u - 2.0 * l)?, x)),
            );
        }
        Ok(res)
    })
}

/// Integral and half-integral sectors of the objects (types B and D).
pub fn split_pm(m: &Model) -> Result<(Vec<ObjId>, Vec<ObjId>)> {
    let mt = m.model_type();
    if !matches!(mt.family, Family::B | Family::D) {
        return Err(Error::NotApplicable(
            "the splitting exists for types B and D".into(),
        ));
    }
    let gr = m.groupoid();
    Ok(gr
        .object_ids()
        .partition(|&a| gr.weight(a).0[0].rem_euclid(2) == 0))
}

pub fn check_split_pm(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let gr = m.groupoid();
    rep_check(m, cfg, "split_pm", 1, cfg.tol, |a| {
        let (plus, minus) = split_pm(m)?;
        let sector = |x: ObjId| plus.contains(&x);
        let mut bad = 0usize;
        if plus.len() + minus.len() != gr.num_objects() || plus.is_empty() || minus.is_empty() {
            bad += 1;
        }
        // every carrier stays in its sector
        for f in gr.carrier_arrows() {
            let t = gr.step(f.source, f.step).expect("carrier");
            if sector(t) != sector(f.source) {
                bad += 1;
            }
        }
        let mut witness = None;
        let w = Rep::vectors(&[Z1, Z2]);
        let t = w.t(m, a[0])?;
        for (p, col) in &t.entries {
            for q in col.keys() {
                let mut verts = Vec::new();
                for path in [p, q] {
                    let mut x = path.start;
                    verts.push(x);
                    for &s in &path.steps {
                        x = gr.step(x, s).expect("basis path");
                        verts.push(x);
                    }
                }
                if verts.iter().any(|&x| sector(x) != sector(p.start)) {
                    bad += 1;
                    witness = Some((p.clone(), q.clone()));
                }
            }
        }
        Ok(Residual {
            value: bad as f64,
            witness,
        })
    })
}

/// Value `chi` of an auxiliary step: the coordinate `a_i` at its source.
/// For type A the coordinate at the end of the top path is lifted along the
/// path, i.e. `a_j` plus the number of top steps equal to `j`.
fn chi(m: &Model, a: ObjId, s: Step, lift: &[Step]) -> f64 {
    let gr = m.groupoid();
    let x = gr.coords(a);
    if m.model_type().family == Family::A {
        let k = s.0 as usize - 1;
        x[k] + lift.iter().filter(|&&t| t == s).count() as f64
    } else {
        let c: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        m.weights().coord(&c, s).re
    }
}

/// Shifts by `L` and `L tau` on tensor products of `r` vector representations.
pub fn quasi_periodicity_residual(m: &Model, r: usize, u: C64) -> Result<Residual> {
    let gr = m.groupoid();
    let zs: Vec<C64> = [Z1, Z2, C64::new(0.6, -0.1)][..r].to_vec();
    let w = Rep::vectors(&zs);
    let big_l = m.scale();
    let ltau = m.weights().theta().tau() * big_l;
    let q = (C64::i() * PI / big_l).exp();
    let t0 = w.t(m, u)?;
    let tl = w.t(m, u + big_l)?;
    let tt = w.t(m, u + ltau)?;
    let mut res = t0.residual(&tl);
    let a_type = m.model_type().family == Family::A;
    for (p, col) in &t0.entries {
        let a = p.start;
        let i = p.steps[0];
        let keys: Vec<&Path> = col
            .keys()
            .chain(tt.column(p).map(|c| c.keys()).into_iter().flatten())
            .collect();
        for q2 in keys {
            let top = &q2.steps[..q2.steps.len() - 1];
            let j = *q2.steps.last().unwrap();
            let b = gr.walk(a, top).expect("basis path");
            let (cl, cr) = if a_type {
                (chi(m, a, i, &[]), chi(m, a, j, top))
            } else {
                (chi(m, a, i, &[]), chi(m, b, j, &[]))
            };
            let fac = q.powf(2.0 * (r as f64 + cl - cr));
            let d = (tt.get(p, q2) - fac * t0.get(p, q2)).norm();
            if d > res.value {
                res = Residual {
                    value: d,
                    witness: Some((p.clone(), q2.clone())),
                };
            }
        }
    }
    if !a_type {
        let x0 = w.central(m, u)?;
        let x1 = w.central(m, u + ltau)?;
        let d = (x1 - q.powf(4.0 * r as f64) * x0).norm();
        let d2 = (w.central_inverse(m, u + ltau)?
            - q.powf(-4.0 * r as f64) * w.central_inverse(m, u)?)
        .norm();
        res.merge(Residual {
            value: d.max(d2),
            witness: None,
        });
    }
    Ok(res)
}

pub fn check_quasi_periodicity(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    rep_check(m, cfg, "quasi_periodicity", 1, cfg.tol * 10.0, |a| {
        let mut res = quasi_periodicity_residual(m, 1, a[0])?;
        res.merge(quasi_periodicity_residual(m, 2, a[0])?);
        Ok(res)
    })
}

/// `rho'(u) rho'(u + lambda) = +-rho(u)`; the realized signs are reported.
pub fn check_rho_prime(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let signs = std::cell::RefCell::new(Vec::new());
    let rep = sampled(m, cfg, "rho_prime", 1, cfg.tol * 10.0, |a| {
        let u = a[0];
        let wc = m.weights();
        let x = wc.rho_prime(u)? * wc.rho_prime(u + m.lambda())?;
        let y = m.rho(u);
        let (dp, dm) = ((x - y).norm(), (x + y).norm());
        signs.borrow_mut().push(if dp <= dm { '+' } else { '-' });
        Ok::<Worst, Error>(scalar_residual(dp.min(dm)))
    });
    let s: String = signs.borrow().iter().collect();
    let (_, q) = m.weights().lambda_ratio();
    rep.with_note(format!("q = {q}, signs {s}"))
}

/// Representation-level checks applicable to a model.
pub fn check_names(m: &crate::groupoid::ModelType) -> Vec<&'static str> {
    let mut v = vec![
        "rep_vector_relations",
        "rep_scalar_relations",
        "rep_tensor_relations",
        "rep_dual_relations",
        "rep_coalgebra",
        "rep_shift",
        "rep_dual_pairing",
        "p_dual_i",
    ];
    if m.family != Family::A {
        v.push("p_dual_ii");
    }
    v.push("s_squared");
    if matches!(m.family, Family::B | Family::D) {
        v.push("split_pm");
    }
    v.push("quasi_periodicity");
    if rho_prime_applicable(m) {
        v.push("rho_prime");
    }
    v
}

/// `rho'` needs type C or D with an odd denominator of `-lambda/L`.
pub fn rho_prime_applicable(m: &crate::groupoid::ModelType) -> bool {
    if !matches!(m.family, Family::C | Family::D) {
        return false;
    }
    let num = -m.lambda_twice();
    let den = 2 * m.scale();
    let g = gcd(num, den);
    (den / g) % 2 == 1
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

pub fn run_check(m: &Model, cfg: &SuiteConfig, name: &str) -> Result<CheckReport> {
    Ok(match name {
        "rep_vector_relations" => check_vector_relations(m, cfg),
        "rep_scalar_relations" => check_scalar_relations(m, cfg),
        "rep_tensor_relations" => check_tensor_relations(m, cfg),
        "rep_dual_relations" => check_dual_relations(m, cfg),
        "rep_coalgebra" => check_coalgebra(m, cfg),
        "rep_shift" => check_shift(m, cfg),
        "rep_dual_pairing" => check_dual_pairing(m, cfg),
        "p_dual_i" => check_p_dual_i(m, cfg),
        "p_dual_ii" => check_p_dual_ii(m, cfg),
        "s_squared" => check_s_squared(m, cfg),
        "split_pm" => check_split_pm(m, cfg),
        "quasi_periodicity" => check_quasi_periodicity(m, cfg),
        "rho_prime" => check_rho_prime(m, cfg),
        other => return Err(Error::NotApplicable(format!("unknown check {other:?}"))),
    })
}
