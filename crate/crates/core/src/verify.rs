//! Relation engine: every identity is evaluated as a max-abs residual over
//! seeded spectral samples and reported as a [`CheckReport`].

use crate::boltzmann::{SqrtMode, Square, WeightContext};
use crate::error::{Error, Result};
use crate::graded::{GradedOperator, Path, Residual, Rotation};
use crate::groupoid::{Family, Groupoid, Kind, ModelType, ObjId, Step, Weight};
use crate::rmatrix::{Model, PoleSet, RKind};
use crate::theta::ThetaContext;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Version tag of the JSON report format.
pub const SCHEMA: &str = "rsos-qgroup/1";

/// Default absolute tolerance on residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    /// Spectral arguments as `[re, im]` pairs.
    pub args: Vec<[f64; 2]>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub tolerance: f64,
    pub samples: Vec<SampleRecord>,
    pub max_residual: f64,
    pub pass: bool,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    fn finish(mut self) -> Self {
        let mut mx = 0.0f64;
        for s in &self.samples {
            if s.residual.is_nan() {
                mx = f64::NAN;
                break;
            }
            mx = mx.max(s.residual);
        }
        self.max_residual = mx;
        self.pass = self.error.is_none() && self.tolerance > 0.0 && mx <= self.tolerance;
        self
    }

    /// Report for a check that could not be evaluated.
    pub fn failed(check: &str, model: &str, tol: f64, err: &Error) -> Self {
        CheckReport {
            check: check.into(),
            model: model.into(),
            tolerance: tol,
            samples: vec![],
            max_residual: f64::NAN,
            pass: false,
            witness: None,
            note: None,
            error: Some(err.to_string()),
        }
        .finish()
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Settings shared by all checks of a run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub tau: C64,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub sqrt_mode: SqrtMode,
    /// Include the spot checks on unrestricted weights.
    pub unrestricted: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tau: C64::new(0.0, 0.9),
            tol: DEFAULT_TOL,
            samples: 20,
            seed: 0,
            sqrt_mode: SqrtMode::StrictReal,
            unrestricted: true,
        }
    }
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Seeded sampler of generic spectral parameters.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    poles: PoleSet,
    lambda: f64,
    guard: f64,
    re_max: f64,
}

impl Sampler {
    /// One stream per `(seed, check)` so reports do not depend on check order.
    pub fn new(model: &Model, seed: u64, check: &str) -> Self {
        let l = model.scale();
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed ^ fnv(check)),
            poles: model.poles(),
            lambda: model.lambda(),
            guard: 1e-3 * l,
            re_max: 0.9 * l,
        }
    }

    fn clear(&self, x: C64) -> bool {
        let l = self.lambda;
        [
            x,
            -x,
            x + l,
            C64::new(l, 0.0) - x,
            x - l,
            x - 2.0 * l,
            x + 2.0 * l,
        ]
        .iter()
        .all(|&y| self.poles.distance(y) >= self.guard)
    }

    fn raw(&mut self) -> C64 {
        C64::new(
            self.rng.gen_range(0.1..self.re_max),
            self.rng.gen_range(-0.4..0.4),
        )
    }

    /// `k` parameters such that they, their differences and their
    /// crossing-shifted images all stay clear of the poles.
    pub fn draw(&mut self, k: usize) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..k).map(|_| self.raw()).collect();
            let mut ok = v.iter().all(|&x| self.clear(x));
            for i in 0..k {
                for j in 0..i {
                    ok &= self.clear(v[i] - v[j]);
                }
            }
            if ok {
                return v;
            }
        }
    }
}

/// Residual value with an optional description of where it occurs.
pub trait Witnessed {
    fn value(&self) -> f64;
    fn describe(&self, gr: &Groupoid) -> Option<String>;
}

impl Witnessed for Residual {
    fn value(&self) -> f64 {
        self.value
    }
    fn describe(&self, gr: &Groupoid) -> Option<String> {
        self.witness
            .as_ref()
            .map(|(p, q)| format!("{} -> {}", p.label(gr), q.label(gr)))
    }
}

/// Largest residual of a face-level identity, labelled by its heights.
#[derive(Debug, Clone, Default)]
pub struct Worst {
    pub value: f64,
    pub label: Option<String>,
}

impl Worst {
    pub fn update(&mut self, d: f64, label: impl FnOnce() -> String) {
        if d > self.value || d.is_nan() {
            self.value = d;
            self.label = Some(label());
        }
    }
}

impl Witnessed for Worst {
    fn value(&self) -> f64 {
        self.value
    }
    fn describe(&self, _: &Groupoid) -> Option<String> {
        self.label.clone()
    }
}

/// Run a sampled check: `f` maps drawn parameters to a residual.
pub fn sampled<R, F>(
    model: &Model,
    cfg: &SuiteConfig,
    check: &str,
    nargs: usize,
    tol: f64,
    f: F,
) -> CheckReport
where
    R: Witnessed,
    F: Fn(&[C64]) -> Result<R>,
{
    let name = model.model_type().to_string();
    let mut sampler = Sampler::new(model, cfg.seed, check);
    let mut rep = CheckReport {
        check: check.into(),
        model: name,
        tolerance: tol,
        samples: Vec::with_capacity(cfg.samples),
        max_residual: 0.0,
        pass: false,
        witness: None,
        note: None,
        error: None,
    };
    let n = if nargs == 0 { 1 } else { cfg.samples.max(1) };
    let mut worst = -1.0;
    for _ in 0..n {
        let args = sampler.draw(nargs);
        match f(&args) {
            Ok(r) => {
                let v = r.value();
                if v > worst || v.is_nan() {
                    worst = v;
                    rep.witness = r.describe(model.groupoid());
                }
                rep.samples.push(SampleRecord {
                    args: args.iter().map(|z| [z.re, z.im]).collect(),
                    residual: v,
                });
            }
            Err(e) => {
                rep.error = Some(e.to_string());
                rep.samples.push(SampleRecord {
                    args: args.iter().map(|z| [z.re, z.im]).collect(),
                    residual: f64::NAN,
                });
                break;
            }
        }
    }
    rep.finish()
}

/// Residual from a scalar comparison, witness-free.
pub fn scalar_residual(x: f64) -> Worst {
    Worst {
        value: x,
        label: None,
    }
}

fn seq(m: &Model, kinds: &[Kind], ops: &[(&GradedOperator, usize)]) -> Result<GradedOperator> {
    GradedOperator::sequence(m.groupoid(), kinds, ops)
}

const V: Kind = Kind::V;
const VS: Kind = Kind::VStar;

// ---------------------------------------------------------------- theta

/// Oddness, both quasi-periods, series against product and `[u] ~ u` at 0.
pub fn theta_residual(th: &ThetaContext, u: C64) -> f64 {
    let l = th.scale();
    let b = th.bracket(u);
    let mut r = (th.bracket(-u) + b).norm();
    r = r.max((th.bracket(u + l) + b).norm());
    let m = th.quasi_period_factor(u);
    let shifted = th.bracket(u + th.tau() * l);
    r = r.max((shifted - m * b).norm() / (m * b).norm().max(1.0));
    r = r.max((th.bracket_series(u) - b).norm());
    let h = 1e-6;
    r.max((th.bracket(C64::new(h, 0.0)) / h - 1.0).norm())
}

pub fn check_theta(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let th = m.weights().theta();
    sampled(m, cfg, "theta", 1, cfg.tol * 1e-2, |a| {
        Ok::<Worst, Error>(scalar_residual(theta_residual(th, a[0])))
    })
}

// ---------------------------------------------------------------- R-level

pub fn check_identity_at_zero(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "identity_at_zero", 0, cfg.tol * 1e-2, |_| {
        let r = m.r_vv(C64::new(0.0, 0.0))?;
        Ok(r.residual(&GradedOperator::identity(m.groupoid(), &[V, V])))
    })
}

/// `R23(u1-u2) R12(u1) R23(u2) = R12(u2) R23(u1) R12(u1-u2)`.
pub fn ybe_residual(m: &Model, u1: C64, u2: C64) -> Result<Residual> {
    let (a, b, c) = (m.r_vv(u1)?, m.r_vv(u2)?, m.r_vv(u1 - u2)?);
    let lhs = seq(m, &[V, V, V], &[(&b, 1), (&a, 0), (&c, 1)])?;
    let rhs = seq(m, &[V, V, V], &[(&c, 0), (&a, 1), (&b, 0)])?;
    Ok(lhs.residual(&rhs))
}

pub fn check_ybe(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "ybe", 2, cfg.tol, |a| ybe_residual(m, a[0], a[1]))
}

pub fn check_inversion(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "inversion", 1, cfg.tol, |a| {
        let p = m.r_vv(a[0])?.compose(&m.r_vv(-a[0])?)?;
        Ok(p.residual(&GradedOperator::identity(m.groupoid(), &[V, V])))
    })
}

/// Zig-zag identities of the caps and cups.
pub fn check_zigzag(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "zigzag", 0, cfg.tol * 1e-2, |_| {
        let gr = m.groupoid();
        let cc = m.caps();
        let mut res = Residual::zero();
        if m.model_type().family == Family::A {
            let (oms, sgs) = cc.star()?;
            let idv = GradedOperator::identity(gr, &[V]);
            let ids = GradedOperator::identity(gr, &[VS]);
            res.merge(seq(m, &[V], &[(&cc.sigma, 1), (&cc.omega, 0)])?.residual(&idv));
            res.merge(seq(m, &[VS], &[(&cc.sigma, 0), (&cc.omega, 1)])?.residual(&ids));
            res.merge(seq(m, &[V], &[(sgs, 0), (oms, 1)])?.residual(&idv));
            res.merge(seq(m, &[VS], &[(sgs, 1), (oms, 0)])?.residual(&ids));
        } else {
            let idv = GradedOperator::identity(gr, &[V]);
            res.merge(seq(m, &[V], &[(&cc.sigma, 0), (&cc.omega, 1)])?.residual(&idv));
            res.merge(seq(m, &[V], &[(&cc.sigma, 1), (&cc.omega, 0)])?.residual(&idv));
        }
        Ok(res)
    })
}

/// Type A: `sigma*(a; i, -i) = G_{a+eps_i}/G_a * sigma(a+eps_i; -i, i)`.
pub fn check_sigma_star_relation(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "sigma_star_relation", 0, cfg.tol * 1e-2, |_| {
        let gr = m.groupoid();
        let (_, sgs) = m.caps().star()?;
        let mut res = Residual::zero();
        for (p, col) in &sgs.entries {
            for (q, &v) in col {
                let i = q.steps[0];
                let t = gr.step(p.start, i).expect("basis path");
                let src = Path::empty(t);
                let tgt = Path::new(t, vec![-i, i]);
                let w = m.caps().sigma.get(&src, &tgt) * m.g_of(t) / m.g_of(p.start);
                let d = (v - w).norm();
                if d > res.value {
                    res = Residual {
                        value: d,
                        witness: Some((p.clone(), q.clone())),
                    };
                }
            }
        }
        Ok(res)
    })
}

/// Orthogonal and symplectic crossing: both cap and cup forms.
pub fn check_crossing(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "crossing", 1, cfg.tol, |a| {
        let u = a[0];
        let cc = m.caps();
        let (r, rl) = (m.r_vv(u)?, m.r_vv(u + m.lambda())?);
        let rho = m.rho(u);
        let mut res = Residual::zero();
        let lhs = seq(m, &[V, V, V], &[(&r, 1), (&rl, 0), (&cc.omega, 1)])?;
        let rhs = seq(m, &[V, V, V], &[(&cc.omega, 0)])?.scale(rho);
        res.merge(lhs.residual(&rhs));
        let lhs = seq(m, &[V], &[(&cc.sigma, 0), (&rl, 1), (&r, 0)])?;
        let rhs = seq(m, &[V], &[(&cc.sigma, 1)])?.scale(rho);
        res.merge(lhs.residual(&rhs));
        Ok(res)
    })
}

/// Orthogonal and symplectic: the quarter rotation equals `rho(-u) R(u)`.
pub fn check_rotation_orthogonal(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "rotation_orthogonal", 1, cfg.tol, |a| {
        let u = a[0];
        let rot = m.rotated(Rotation::Orthogonal90, u)?;
        Ok(rot.residual(&m.r_vv(u)?.scale(m.rho(-u))))
    })
}

/// Type A: the four crossing identities with `rho_2`.
pub fn check_wttan(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "wttan", 1, cfg.tol, |a| {
        let u = a[0];
        let l = m.lambda();
        let cc = m.caps();
        let (oms, sgs) = cc.star()?;
        let (r, rl) = (m.r_vv(u)?, m.r_vv(u + l)?);
        let (rsv, rsvl) = (m.r(RKind::VStarV, u)?, m.r(RKind::VStarV, u + l)?);
        let r2 = m.rho2(u);
        let mut res = Residual::zero();
        let lhs = seq(m, &[V, VS, V], &[(&rsv, 1), (&rl, 0), (&cc.omega, 1)])?;
        res.merge(lhs.residual(&seq(m, &[V, VS, V], &[(&cc.omega, 0)])?.scale(r2)));
        let lhs = seq(m, &[VS, V, V], &[(&r, 1), (&rsvl, 0), (oms, 1)])?;
        res.merge(lhs.residual(&seq(m, &[VS, V, V], &[(oms, 0)])?));
        let lhs = seq(m, &[V], &[(&cc.sigma, 0), (&rl, 1), (&rsv, 0)])?;
        res.merge(lhs.residual(&seq(m, &[V], &[(&cc.sigma, 1)])?.scale(r2)));
        let lhs = seq(m, &[V], &[(sgs, 0), (&rsvl, 1), (&r, 0)])?;
        res.merge(lhs.residual(&seq(m, &[V], &[(sgs, 1)])?));
        Ok(res)
    })
}

/// Type A mixed Yang-Baxter equations.
pub fn check_mixed_ybe(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "mixed_ybe", 2, cfg.tol, |a| {
        let (u, v) = (a[0], a[1]);
        let rv = m.r_vv(v)?;
        let (su, sv, suv) = (
            m.r(RKind::VStarV, u)?,
            m.r(RKind::VStarV, v)?,
            m.r(RKind::VStarV, u - v)?,
        );
        let ss = m.r(RKind::VStarVStar, u - v)?;
        let mut res = Residual::zero();
        let lhs = seq(m, &[VS, V, V], &[(&rv, 1), (&su, 0), (&suv, 1)])?;
        let rhs = seq(m, &[VS, V, V], &[(&suv, 0), (&su, 1), (&rv, 0)])?;
        res.merge(lhs.residual(&rhs));
        let lhs = seq(m, &[VS, VS, V], &[(&sv, 1), (&su, 0), (&ss, 1)])?;
        let rhs = seq(m, &[VS, VS, V], &[(&ss, 0), (&su, 1), (&sv, 0)])?;
        res.merge(lhs.residual(&rhs));
        Ok(res)
    })
}

/// Type A: `R_{VV*}(-u) R_{V*V}(u) = rho_2(u)` in both orders.
pub fn check_rot_inversion(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "rot_inversion", 1, cfg.tol, |a| {
        let u = a[0];
        let gr = m.groupoid();
        let (sv, vs) = (m.r(RKind::VStarV, u)?, m.r(RKind::VVStar, -u)?);
        let r2 = m.rho2(u);
        let mut res = Residual::zero();
        res.merge(
            vs.compose(&sv)?
                .residual(&GradedOperator::identity(gr, &[VS, V]).scale(r2)),
        );
        res.merge(
            sv.compose(&vs)?
                .residual(&GradedOperator::identity(gr, &[V, VS]).scale(r2)),
        );
        Ok(res)
    })
}

/// Type A: cap/cup rotations agree with the explicit face formulas, and the
/// two half turns agree.
pub fn check_rotations(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "rotations", 1, cfg.tol, |a| {
        let u = a[0];
        let mut res = Residual::zero();
        for (rot, kind) in [
            (Rotation::Minus90, RKind::VStarV),
            (Rotation::Plus90, RKind::VVStar),
            (Rotation::By180, RKind::VStarVStar),
        ] {
            res.merge(m.rotated(rot, u)?.residual(&m.r(kind, u)?));
        }
        res.merge(
            m.rotated(Rotation::By180, u)?
                .residual(&m.rotated(Rotation::ByMinus180, u)?),
        );
        Ok(res)
    })
}

/// B and D: no entry joins the integral and half-integral sectors.
pub fn check_block_split(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    sampled(m, cfg, "block_split", 1, cfg.tol, |a| {
        let gr = m.groupoid();
        let r = m.r_vv(a[0])?;
        let mut bad = 0usize;
        let mut witness = None;
        let parity = |x: ObjId| gr.weight(x).0[0].rem_euclid(2);
        for (p, col) in &r.entries {
            for q in col.keys() {
                let mut verts = vec![p.start];
                let mut x = p.start;
                for path in [p, q] {
                    x = path.start;
                    for &s in &path.steps {
                        x = gr.step(x, s).expect("basis path");
                        verts.push(x);
                    }
                }
                let _ = x;
                if verts.iter().any(|&v| parity(v) != parity(p.start)) {
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

// ---------------------------------------------------------------- faces

/// Face weights addressed by their four corners.
pub struct Faces<'a> {
    m: &'a Model,
    steps: Vec<Step>,
    adj: Vec<Vec<ObjId>>,
}

impl<'a> Faces<'a> {
    fn new(m: &'a Model) -> Self {
        let gr = m.groupoid();
        let steps = step_set(m.model_type());
        let adj = gr
            .object_ids()
            .map(|a| {
                let mut v: Vec<ObjId> = steps.iter().filter_map(|&s| gr.step(a, s)).collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        Faces { m, steps, adj }
    }

    fn adj(&self, a: ObjId) -> &[ObjId] {
        &self.adj[a.0 as usize]
    }

    fn is_adj(&self, a: ObjId, b: ObjId) -> bool {
        self.adj(a).binary_search(&b).is_ok()
    }

    fn step(&self, a: ObjId, b: ObjId) -> Option<Step> {
        self.steps
            .iter()
            .copied()
            .find(|&s| self.m.groupoid().step(a, s) == Some(b))
    }

    /// `W(a, b; d, c | u)`: `a -> b` on top, `a -> d` on the left, `c` opposite `a`.
    fn w(&self, a: ObjId, b: ObjId, d: ObjId, c: ObjId, u: C64) -> Result<C64> {
        let (Some(k), Some(i), Some(l), Some(j)) = (
            self.step(a, b),
            self.step(a, d),
            self.step(b, c),
            self.step(d, c),
        ) else {
            return Ok(C64::new(0.0, 0.0));
        };
        self.m.face(a, k, l, i, j, u)
    }

    /// Signed root `xi * sqrt(sigma G_x / G_y)` for the edge `y -> x`.
    fn vp(&self, y: ObjId, x: ObjId) -> Result<C64> {
        let s = self
            .step(y, x)
            .ok_or_else(|| Error::NotApplicable("no edge".into()))?;
        let wc = self.m.weights();
        let sg = self.m.model_type().sigma_sign();
        Ok(wc.step_sign(s) * wc.root(sg * self.m.g_of(x) / self.m.g_of(y), "edge root")?)
    }

    fn objects(&self) -> Vec<ObjId> {
        self.m.groupoid().object_ids().collect()
    }
}

/// Steps of the vector representation used as face edges.
fn step_set(mt: &ModelType) -> Vec<Step> {
    mt.kind_steps(Kind::V)
}

/// Face-level check with a corner-tuple witness.
fn face_check<F>(m: &Model, cfg: &SuiteConfig, check: &str, nargs: usize, f: F) -> CheckReport
where
    F: Fn(&Faces, &[C64], &mut Worst) -> Result<()>,
{
    let faces = Faces::new(m);
    sampled(m, cfg, check, nargs, cfg.tol, |a| {
        let mut res = Worst::default();
        f(&faces, a, &mut res)?;
        Ok(res)
    })
}

fn label(m: &Model, xs: &[ObjId]) -> String {
    let den = m.model_type().denominator();
    let v: Vec<String> = xs
        .iter()
        .map(|&x| m.groupoid().weight(x).display(den))
        .collect();
    v.join(" ")
}

pub fn check_refsym(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "refsym", 1, |fc, a, res| {
        let u = a[0];
        for x in fc.objects() {
            for &b in fc.adj(x) {
                for &d in fc.adj(x) {
                    for &c in fc.adj(b) {
                        if !fc.is_adj(d, c) {
                            continue;
                        }
                        let r = (fc.w(x, b, d, c, u)? - fc.w(x, d, b, c, u)?).norm();
                        res.update(r, || label(m, &[x, b, d, c]));
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn check_invrel(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "invrel", 1, |fc, a, res| {
        let u = a[0];
        for b in fc.objects() {
            for &x in fc.adj(b) {
                for &d in fc.adj(b) {
                    for &c in fc.adj(x) {
                        if !fc.is_adj(d, c) {
                            continue;
                        }
                        let mut s = C64::new(0.0, 0.0);
                        for &g in fc.adj(b) {
                            if fc.is_adj(g, c) {
                                s += fc.w(b, g, d, c, u)? * fc.w(b, x, g, c, -u)?;
                            }
                        }
                        let want = if x == d { 1.0 } else { 0.0 };
                        res.update((s - want).norm(), || label(m, &[x, b, c, d]));
                    }
                }
            }
        }
        Ok(())
    })
}

/// Star-triangle relation on restricted heights.
pub fn star_triangle_residual(fc: &Faces, u: C64, v: C64, res: &mut Worst) -> Result<()> {
    let objs = fc.objects();
    for &a in &objs {
        for &b in fc.adj(a) {
            for &f in fc.adj(a) {
                for &c in fc.adj(b) {
                    for &e in fc.adj(f) {
                        for &d in fc.adj(c) {
                            if !fc.is_adj(e, d) {
                                continue;
                            }
                            let mut l = C64::new(0.0, 0.0);
                            let mut r = C64::new(0.0, 0.0);
                            for &g in &objs {
                                l += fc.w(f, g, e, d, v)?
                                    * fc.w(b, c, g, d, u - v)?
                                    * fc.w(a, b, f, g, u)?;
                                r += fc.w(a, b, g, c, v)?
                                    * fc.w(a, g, f, e, u - v)?
                                    * fc.w(g, c, e, d, u)?;
                            }
                            res.update((l - r).norm(), || label(fc.m, &[a, b, c, d, e, f]));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn check_star_triangle(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "star_triangle", 2, |fc, a, res| {
        star_triangle_residual(fc, a[0], a[1], res)
    })
}

/// Orthogonal/symplectic rotational symmetry of the faces.
pub fn check_rotrel(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "rotrel", 1, |fc, a, res| {
        let u = a[0];
        let lu = C64::new(m.lambda(), 0.0) - u;
        let inv = 1.0 / m.rho(-u);
        for b in fc.objects() {
            for &x in fc.adj(b) {
                for &g in fc.adj(b) {
                    for &c in fc.adj(x) {
                        if !fc.is_adj(g, c) {
                            continue;
                        }
                        let lhs = fc.w(b, x, g, c, u)?;
                        let rhs = inv * fc.vp(b, x)? / fc.vp(g, c)? * fc.w(x, c, b, g, lu)?;
                        res.update((lhs - rhs).norm(), || label(m, &[x, b, c, g]));
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn check_rel1(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "rel1", 1, |fc, a, res| {
        let u = a[0];
        let ul = u + m.lambda();
        let rho = m.rho(u);
        for x in fc.objects() {
            for &b in fc.adj(x) {
                for &c in fc.adj(x) {
                    for &d in fc.adj(b) {
                        if !fc.is_adj(d, c) {
                            continue;
                        }
                        let mut s = C64::new(0.0, 0.0);
                        for &g in fc.adj(b) {
                            if fc.is_adj(c, g) {
                                s += fc.vp(c, g)? * fc.w(x, c, b, g, ul)? * fc.w(b, g, d, c, u)?;
                            }
                        }
                        let want = if x == d {
                            fc.vp(x, b)? * rho
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        res.update((s - want).norm(), || label(m, &[x, b, c, d]));
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn check_rel2(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "rel2", 1, |fc, a, res| {
        let u = a[0];
        let ul = u + m.lambda();
        let rho = m.rho(u);
        for b in fc.objects() {
            for &d in fc.adj(b) {
                for &c in fc.adj(d) {
                    for &x in fc.adj(c) {
                        if !fc.is_adj(b, x) {
                            continue;
                        }
                        let mut s = C64::new(0.0, 0.0);
                        for &g in fc.adj(b) {
                            if fc.is_adj(g, c) {
                                s += fc.vp(b, g)? * fc.w(b, d, g, c, u)? * fc.w(g, c, b, x, ul)?;
                            }
                        }
                        let want = if x == d {
                            fc.vp(x, c)? * rho
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        res.update((s - want).norm(), || label(m, &[x, b, c, d]));
                    }
                }
            }
        }
        Ok(())
    })
}

fn an_gauge(fc: &Faces, a: ObjId, c: ObjId, g: ObjId, b: ObjId, d: ObjId) -> Result<C64> {
    let m = fc.m;
    let r = m.g_of(a) * m.g_of(c) * m.g_of(g) * m.g_of(g)
        / (m.g_of(b) * m.g_of(b) * m.g_of(d) * m.g_of(d));
    m.weights().root(r, "inversion gauge")
}

/// Type A additional inversion relation.
pub fn check_inv_an(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "invAn", 1, |fc, a, res| {
        let u = a[0];
        let l = m.lambda();
        let r2 = m.rho2(u);
        let objs = fc.objects();
        for &x in &objs {
            for &b in fc.adj(x) {
                for &d in fc.adj(x) {
                    for &c in &objs {
                        if !fc.is_adj(c, b) || !fc.is_adj(c, d) {
                            continue;
                        }
                        let mut s = C64::new(0.0, 0.0);
                        for &g in fc.adj(b) {
                            if fc.is_adj(d, g) {
                                s += an_gauge(fc, x, c, g, b, d)?
                                    * fc.w(x, b, d, g, C64::new(l, 0.0) - u)?
                                    * fc.w(c, d, b, g, u + l)?;
                            }
                        }
                        let want = if x == c { r2 } else { C64::new(0.0, 0.0) };
                        res.update((s - want).norm(), || label(m, &[x, b, c, d]));
                    }
                }
            }
        }
        Ok(())
    })
}

/// Type A inversion relation in the transposed arrangement.
pub fn check_inv_an2(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    face_check(m, cfg, "invAn2", 1, |fc, a, res| {
        let u = a[0];
        let l = m.lambda();
        let r2 = m.rho2(u);
        let objs = fc.objects();
        for &b in &objs {
            for &d in &objs {
                let gs: Vec<ObjId> = objs
                    .iter()
                    .copied()
                    .filter(|&g| fc.is_adj(g, b) && fc.is_adj(g, d))
                    .collect();
                if gs.is_empty() {
                    continue;
                }
                for &x in fc.adj(b) {
                    if !fc.is_adj(d, x) {
                        continue;
                    }
                    for &c in fc.adj(b) {
                        if !fc.is_adj(d, c) {
                            continue;
                        }
                        let mut s = C64::new(0.0, 0.0);
                        for &g in &gs {
                            s += an_gauge(fc, x, c, g, b, d)?
                                * fc.w(g, b, d, x, u + l)?
                                * fc.w(g, d, b, c, C64::new(l, 0.0) - u)?;
                        }
                        let want = if x == c { r2 } else { C64::new(0.0, 0.0) };
                        res.update((s - want).norm(), || label(m, &[x, b, c, d]));
                    }
                }
            }
        }
        Ok(())
    })
}

// ------------------------------------------------------- lattice neighbours

/// Step joining two lattice points. Restricted mode drops the `eps_0` loop at `a_n = 1/2`.
fn lattice_step(
    mt: &ModelType,
    steps: &[Step],
    x: &Weight,
    y: &Weight,
    unrestricted: bool,
) -> Option<Step> {
    let half = mt.denominator() / 2;
    steps.iter().copied().find(|&s| {
        if s.0 == 0 {
            x == y && (unrestricted || *x.0.last().unwrap() != half)
        } else {
            &x.add(&mt.step_vector(s)) == y
        }
    })
}

/// Terms of the left star-triangle sum whose internal height leaves the
/// restricted set (every face corner there stays restricted). Returns the largest aggregate of dropped terms per
/// boundary and the largest single dropped term.
pub fn dropped_terms(m: &Model, u: C64, v: C64) -> Result<(f64, f64)> {
    let gr = m.groupoid();
    let mt = *m.model_type();
    let steps = step_set(&mt);
    // off the alcove some G ratios are negative; continue them analytically
    let wc = &m.weights().with_sqrt_mode(SqrtMode::PrincipalComplex);
    let coords = |w: &Weight| -> Vec<C64> {
        w.coords(mt.denominator())
            .into_iter()
            .map(|x| C64::new(x, 0.0))
            .collect()
    };
    // weight of a face with a restricted corner and arbitrary other vertices
    let wf = |a: &Weight, b: &Weight, d: &Weight, c: &Weight, u: C64, unres: bool| -> Result<C64> {
        let st = |x: &Weight, y: &Weight| lattice_step(&mt, &steps, x, y, unres);
        let (Some(k), Some(i), Some(l), Some(j)) = (st(a, b), st(a, d), st(b, c), st(d, c)) else {
            return Ok(C64::new(0.0, 0.0));
        };
        wc.face(
            &coords(a),
            &Square {
                top: k,
                right: l,
                left: i,
                bottom: j,
            },
            u,
        )
    };
    let nb = |x: &Weight, unres: bool| -> Vec<Weight> {
        steps
            .iter()
            .filter_map(|&s| {
                let y = if s.0 == 0 {
                    x.clone()
                } else {
                    x.add(&mt.step_vector(s))
                };
                lattice_step(&mt, &steps, x, &y, unres).map(|_| y)
            })
            .collect()
    };
    let is_obj = |x: &Weight| gr.lookup(x).is_some();
    let restricted_nb =
        |x: &Weight| -> Vec<Weight> { nb(x, false).into_iter().filter(|y| is_obj(y)).collect() };
    let mut agg = 0.0f64;
    let mut single = 0.0f64;
    for a in gr.objects() {
        for b in restricted_nb(a) {
            for f in restricted_nb(a) {
                for c in restricted_nb(&b) {
                    for e in restricted_nb(&f) {
                        for d in restricted_nb(&c) {
                            if !restricted_nb(&e).contains(&d) {
                                continue;
                            }
                            let mut tl = C64::new(0.0, 0.0);
                            let fb: Vec<Weight> = nb(&f, true)
                                .into_iter()
                                .filter(|g| nb(&b, true).contains(g))
                                .collect();
                            for g in fb {
                                if !nb(&g, true).contains(&d) {
                                    continue;
                                }
                                let tu = wf(&f, &g, &e, &d, v, true)?
                                    * wf(&b, &c, &g, &d, u - v, true)?
                                    * wf(a, &b, &f, &g, u, true)?;
                                let trr = if is_obj(&g) {
                                    wf(&f, &g, &e, &d, v, false)?
                                        * wf(&b, &c, &g, &d, u - v, false)?
                                        * wf(a, &b, &f, &g, u, false)?
                                } else {
                                    C64::new(0.0, 0.0)
                                };
                                single = single.max((tu - trr).norm());
                                tl += tu - trr;
                            }
                            agg = agg.max(tl.norm());
                        }
                    }
                }
            }
        }
    }
    Ok((agg, single))
}

pub fn check_restricted_vanishing(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let single = std::cell::Cell::new(0.0f64);
    let rep = sampled(m, cfg, "restricted_vanishing", 2, cfg.tol, |a| {
        let (agg, s) = dropped_terms(m, a[0], a[1])?;
        single.set(single.get().max(s));
        Ok(scalar_residual(agg))
    });
    rep.with_note(format!("largest single dropped term {:.3e}", single.get()))
}

// ------------------------------------------------------ unrestricted model

/// Level used for the unrestricted spot checks: large enough that an open
/// set of real heights keeps every radicand positive.
pub fn unrestricted_level(f: Family) -> u32 {
    match f {
        Family::D => 30,
        _ => 20,
    }
}

/// Graded Yang-Baxter residual on the unrestricted lattice based at real heights `a`.
pub fn unrestricted_ybe(wc: &WeightContext, a: &[f64], u: C64, v: C64) -> Result<f64> {
    let mt = *wc.model_type();
    let steps = step_set(&mt);
    let den = mt.denominator() as f64;
    let pos = |st: &[Step]| -> Vec<C64> {
        let mut x: Vec<f64> = a.to_vec();
        for &s in st {
            for (xi, d) in x.iter_mut().zip(mt.step_vector(s)) {
                *xi += d as f64 / den;
            }
        }
        x.into_iter().map(|t| C64::new(t, 0.0)).collect()
    };
    let sum_vec = |st: &[Step]| -> Vec<i64> {
        let mut t = vec![0i64; mt.rank];
        for &s in st {
            for (ti, d) in t.iter_mut().zip(mt.step_vector(s)) {
                *ti += d;
            }
        }
        t
    };
    let apply =
        |vec: &BTreeMap<Vec<Step>, C64>, at: usize, uu: C64| -> Result<BTreeMap<Vec<Step>, C64>> {
            let mut out = BTreeMap::new();
            for (st, &c) in vec {
                let corner = pos(&st[..at]);
                let (i, j) = (st[at], st[at + 1]);
                let target = sum_vec(&[i, j]);
                for &k in &steps {
                    for &l in &steps {
                        if sum_vec(&[k, l]) != target {
                            continue;
                        }
                        let w = wc.face(
                            &corner,
                            &Square {
                                top: k,
                                right: l,
                                left: i,
                                bottom: j,
                            },
                            uu,
                        )?;
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut key = st.clone();
                        key[at] = k;
                        key[at + 1] = l;
                        *out.entry(key).or_insert(C64::new(0.0, 0.0)) += c * w;
                    }
                }
            }
            Ok(out)
        };
    let mut mx = 0.0f64;
    for &s1 in &steps {
        for &s2 in &steps {
            for &s3 in &steps {
                let x: BTreeMap<Vec<Step>, C64> = [(vec![s1, s2, s3], C64::new(1.0, 0.0))]
                    .into_iter()
                    .collect();
                let l = apply(&apply(&apply(&x, 1, v)?, 0, u)?, 1, u - v)?;
                let r = apply(&apply(&apply(&x, 0, u - v)?, 1, u)?, 0, v)?;
                for k in l.keys().chain(r.keys()) {
                    let d = l.get(k).copied().unwrap_or_default()
                        - r.get(k).copied().unwrap_or_default();
                    mx = mx.max(d.norm());
                }
            }
        }
    }
    Ok(mx)
}

/// Random real heights whose neighbourhood keeps all weights finite and real.
pub fn sample_unrestricted_heights(
    wc: &WeightContext,
    rng: &mut ChaCha8Rng,
    u: C64,
    v: C64,
) -> Result<Vec<f64>> {
    let mt = *wc.model_type();
    let l = mt.scale() as f64;
    let n = mt.rank;
    for _ in 0..10_000 {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..l / 2.0)).collect();
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        if mt.family == Family::A {
            let s: f64 = a.iter().sum::<f64>() / n as f64;
            a.iter_mut().for_each(|x| *x -= s);
        }
        if unrestricted_ybe(wc, &a, u, v).is_ok() {
            return Ok(a);
        }
    }
    Err(Error::DegenerateWeight(
        "no admissible unrestricted heights found".into(),
    ))
}

pub fn check_star_triangle_unrestricted(m: &Model, cfg: &SuiteConfig) -> CheckReport {
    let base = *m.model_type();
    let mt = match ModelType::new(base.family, base.rank, unrestricted_level(base.family)) {
        Ok(mt) => mt,
        Err(e) => {
            return CheckReport::failed(
                "star_triangle_unrestricted",
                &base.to_string(),
                cfg.tol,
                &e.into(),
            )
        }
    };
    let wc = match WeightContext::new(mt, cfg.tau, cfg.sqrt_mode) {
        Ok(w) => w,
        Err(e) => {
            return CheckReport::failed(
                "star_triangle_unrestricted",
                &base.to_string(),
                cfg.tol,
                &e,
            )
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv("star_triangle_unrestricted"));
    let spots = 5usize;
    let mut c = cfg.clone();
    c.samples = spots;
    let rng_cell = std::cell::RefCell::new(&mut rng);
    let heights = std::cell::RefCell::new(Vec::new());
    let rep = sampled(m, &c, "star_triangle_unrestricted", 2, cfg.tol, |a| {
        let h = sample_unrestricted_heights(&wc, &mut rng_cell.borrow_mut(), a[0], a[1])?;
        let r = unrestricted_ybe(&wc, &h, a[0], a[1])?;
        heights.borrow_mut().push(h);
        Ok(scalar_residual(r))
    });
    let hs: Vec<String> = heights
        .borrow()
        .iter()
        .map(|h| {
            format!(
                "({})",
                h.iter()
                    .map(|x| format!("{x:.4}"))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    rep.with_note(format!("level {} heights {}", mt.level, hs.join(" ")))
}

// ------------------------------------------------------------------ suite

/// All reports of a run, in a fixed order.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub model: String,
    pub config: SuiteConfig,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

/// Names of the checks applicable to a model type, in suite order.
pub fn check_names(mt: &ModelType) -> Vec<&'static str> {
    let f = mt.family;
    let mut v = vec!["theta", "identity_at_zero", "ybe", "inversion", "zigzag"];
    match f {
        Family::A => v.extend([
            "sigma_star_relation",
            "wttan",
            "mixed_ybe",
            "rot_inversion",
            "rotations",
            "invAn",
            "invAn2",
        ]),
        _ => v.extend(["crossing", "rotation_orthogonal", "rotrel", "rel1", "rel2"]),
    }
    if matches!(f, Family::B | Family::D) {
        v.push("block_split");
    }
    v.extend([
        "refsym",
        "invrel",
        "star_triangle",
        "restricted_vanishing",
        "star_triangle_unrestricted",
    ]);
    v.extend(crate::reps::check_names(mt));
    v
}

/// Run one named check.
pub fn run_check(m: &Model, cfg: &SuiteConfig, name: &str) -> Result<CheckReport> {
    let r = match name {
        "theta" => check_theta(m, cfg),
        "identity_at_zero" => check_identity_at_zero(m, cfg),
        "ybe" => check_ybe(m, cfg),
        "inversion" => check_inversion(m, cfg),
        "zigzag" => check_zigzag(m, cfg),
        "sigma_star_relation" => check_sigma_star_relation(m, cfg),
        "wttan" => check_wttan(m, cfg),
        "mixed_ybe" => check_mixed_ybe(m, cfg),
        "rot_inversion" => check_rot_inversion(m, cfg),
        "rotations" => check_rotations(m, cfg),
        "crossing" => check_crossing(m, cfg),
        "rotation_orthogonal" => check_rotation_orthogonal(m, cfg),
        "block_split" => check_block_split(m, cfg),
        "refsym" => check_refsym(m, cfg),
        "invrel" => check_invrel(m, cfg),
        "star_triangle" => check_star_triangle(m, cfg),
        "rotrel" => check_rotrel(m, cfg),
        "rel1" => check_rel1(m, cfg),
        "rel2" => check_rel2(m, cfg),
        "invAn" => check_inv_an(m, cfg),
        "invAn2" => check_inv_an2(m, cfg),
        "restricted_vanishing" => check_restricted_vanishing(m, cfg),
        "star_triangle_unrestricted" => check_star_triangle_unrestricted(m, cfg),
        other => return crate::reps::run_check(m, cfg, other),
    };
    Ok(r)
}

/// Run every applicable check.
pub fn run_suite(m: &Model, cfg: &SuiteConfig) -> SuiteReport {
    let checks: Vec<CheckReport> = check_names(m.model_type())
        .into_iter()
        .filter(|n| cfg.unrestricted || *n != "star_triangle_unrestricted")
        .map(|n| {
            run_check(m, cfg, n).unwrap_or_else(|e| {
                CheckReport::failed(n, &m.model_type().to_string(), cfg.tol, &e)
            })
        })
        .collect();
    SuiteReport {
        schema: SCHEMA,
        model: m.model_type().to_string(),
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

/// Convenience: build the model for a type and run the suite.
pub fn suite_for(mt: ModelType, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let m = Model::new(mt, cfg.tau, cfg.sqrt_mode)?;
    Ok(run_suite(&m, cfg))
}
