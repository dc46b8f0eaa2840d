//! R-matrices of the restricted models as graded operators on two-step paths.
//!
//! The basic operator acts on `V (x) V`: a path `(a; i, j)` (left then bottom
//! side of a face) goes to `sum (a; k, l)` (top then right side) weighted by
//! the face. For type A the three other orderings of `V` and `V*` are given
//! by explicit face formulas and coincide with the cap/cup rotations.

use crate::boltzmann::{SqrtMode, Square, WeightContext};
use crate::error::{Error, Result};
use crate::graded::{paths, rotate, CapsCups, GradedOperator, Path, Rotation};
use crate::groupoid::{Family, Groupoid, Kind, ModelType, ObjId, Step};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::str::FromStr;

/// Which pair of factors an R-matrix acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RKind {
    VV,
    /// `V* (x) V -> V (x) V*`
    VStarV,
    /// `V (x) V* -> V* (x) V`
    VVStar,
    VStarVStar,
}

impl RKind {
    pub fn in_kinds(self) -> [Kind; 2] {
        match self {
            RKind::VV => [Kind::V, Kind::V],
            RKind::VStarV => [Kind::VStar, Kind::V],
            RKind::VVStar => [Kind::V, Kind::VStar],
            RKind::VStarVStar => [Kind::VStar, Kind::VStar],
        }
    }

    pub fn out_kinds(self) -> [Kind; 2] {
        let [a, b] = self.in_kinds();
        [b, a]
    }

    pub fn all() -> [RKind; 4] {
        [RKind::VV, RKind::VStarV, RKind::VVStar, RKind::VStarVStar]
    }
}

impl FromStr for RKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "vv" => Ok(RKind::VV),
            "v*v" | "vstarv" => Ok(RKind::VStarV),
            "vv*" | "vvstar" => Ok(RKind::VVStar),
            "v*v*" | "vstarvstar" => Ok(RKind::VStarVStar),
            other => Err(Error::NotApplicable(format!(
                "unknown R-matrix kind {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for RKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RKind::VV => "VV",
            RKind::VStarV => "V*V",
            RKind::VVStar => "VV*",
            RKind::VStarVStar => "V*V*",
        })
    }
}

/// A restricted model at fixed `tau`: groupoid, weights, caps and cups.
#[derive(Debug, Clone)]
pub struct Model {
    gr: Groupoid,
    wc: WeightContext,
    cc: CapsCups,
    g: Vec<C64>,
}

impl Model {
    pub fn new(mt: ModelType, tau: C64, sqrt_mode: SqrtMode) -> Result<Self> {
        let gr = Groupoid::new(mt);
        let wc = WeightContext::new(mt, tau, sqrt_mode)?;
        let cc = CapsCups::new(&gr, &wc)?;
        let g = gr
            .object_ids()
            .map(|a| wc.g(&cvec(&gr.coords(a))))
            .collect();
        Ok(Model { gr, wc, cc, g })
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.gr
    }

    pub fn weights(&self) -> &WeightContext {
        &self.wc
    }

    pub fn caps(&self) -> &CapsCups {
        &self.cc
    }

    pub fn model_type(&self) -> &ModelType {
        self.gr.model_type()
    }

    pub fn lambda(&self) -> f64 {
        self.wc.lambda()
    }

    pub fn scale(&self) -> f64 {
        self.model_type().scale() as f64
    }

    /// `G_a` of an object.
    pub fn g_of(&self, a: ObjId) -> C64 {
        self.g[a.0 as usize]
    }

    pub fn corner(&self, a: ObjId) -> Vec<C64> {
        cvec(&self.gr.coords(a))
    }

    /// Face weight with corner `a`.
    pub fn face(
        &self,
        a: ObjId,
        top: Step,
        right: Step,
        left: Step,
        bottom: Step,
        u: C64,
    ) -> Result<C64> {
        self.wc.face(
            &self.corner(a),
            &Square {
                top,
                right,
                left,
                bottom,
            },
            u,
        )
    }

    fn pref(&self, a: ObjId, b: ObjId, c: ObjId, d: ObjId) -> Result<C64> {
        let r = self.g_of(b) * self.g_of(d) / (self.g_of(a) * self.g_of(c));
        self.wc.root(r, "rotation prefactor")
    }

    /// Concrete R-matrix of the given kind at `u`.
    pub fn r(&self, kind: RKind, u: C64) -> Result<GradedOperator> {
        if kind != RKind::VV && self.model_type().family != Family::A {
            return Err(Error::NotApplicable(format!(
                "{kind} R-matrix exists for type A only"
            )));
        }
        let gr = &self.gr;
        let mt = self.model_type();
        let vs = mt.kind_steps(Kind::V);
        let [k0, k1] = kind.in_kinds();
        let mut op = GradedOperator::new(vec![k0, k1], vec![k1, k0]);
        let lu = C64::new(self.lambda(), 0.0) - u;
        for p in paths(gr, &[k0, k1]) {
            let a = p.start;
            let c = p.end(gr).expect("basis path");
            let mut col = BTreeMap::new();
            for &k in &vs {
                for &l in &vs {
                    // output steps and the weight for this kind
                    let (s1, s2) = match kind {
                        RKind::VV => (k, l),
                        RKind::VStarV => (k, -l),
                        RKind::VVStar => (-k, l),
                        RKind::VStarVStar => (-k, -l),
                    };
                    let Some(b) = gr.step(a, s1) else { continue };
                    if gr.step(b, s2) != Some(c) {
                        continue;
                    }
                    let (x, y) = (p.steps[0], p.steps[1]);
                    let w = match kind {
                        RKind::VV => self.face(a, k, l, x, y, u)?,
                        RKind::VStarV => {
                            let (i, j) = (-x, y);
                            let d = gr.step(a, x).expect("basis path");
                            self.pref(a, b, c, d)? * self.face(d, i, k, j, l, lu)?
                        }
                        RKind::VVStar => {
                            let (i, j) = (x, -y);
                            let d = gr.step(a, i).expect("basis path");
                            self.pref(a, b, c, d)? * self.face(b, l, j, k, i, lu)?
                        }
                        RKind::VStarVStar => {
                            let (i, j) = (-x, -y);
                            self.face(c, j, i, l, k, u)?
                        }
                    };
                    if w != C64::new(0.0, 0.0) {
                        col.insert(Path::new(a, vec![s1, s2]), w);
                    }
                }
            }
            op.entries.insert(p, col);
        }
        Ok(op)
    }

    /// `R_{VV}(u)`.
    pub fn r_vv(&self, u: C64) -> Result<GradedOperator> {
        self.r(RKind::VV, u)
    }

    /// Cap/cup rotation of `R_{VV}`.
    pub fn rotated(&self, which: Rotation, u: C64) -> Result<GradedOperator> {
        let f = |w: C64| self.r_vv(w);
        rotate(&self.gr, &self.cc, which, self.lambda(), u, &f)
    }

    /// Scalar `rho(u)` of the inversion and crossing relations.
    pub fn rho(&self, u: C64) -> C64 {
        self.wc.rho(u)
    }

    pub fn rho2(&self, u: C64) -> C64 {
        self.wc.rho2(u)
    }

    /// Poles of the R-matrices and their rotations.
    pub fn poles(&self) -> PoleSet {
        let l = self.lambda();
        PoleSet::new(
            vec![-1.0, l, 0.0, -1.0 - l, 1.0 + l],
            self.scale(),
            self.wc.theta().tau(),
        )
    }
}

fn cvec(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// Base points of a pole set, repeated over the lattice `Z L + Z L tau`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSet {
    pub base: Vec<f64>,
    pub scale: f64,
    pub tau: C64,
}

impl PoleSet {
    pub fn new(base: Vec<f64>, scale: f64, tau: C64) -> Self {
        PoleSet { base, scale, tau }
    }

    /// Distance from `u` to the nearest pole.
    pub fn distance(&self, u: C64) -> f64 {
        let w1 = C64::new(self.scale, 0.0);
        let w2 = self.tau * self.scale;
        let mut best = f64::INFINITY;
        for &p in &self.base {
            let z = u - p;
            let y = z.im / w2.im;
            let x = (z.re - y * w2.re) / w1.re;
            let (x0, y0) = (x.round(), y.round());
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let m = x0 + dx as f64;
                    let n = y0 + dy as f64;
                    best = best.min((z - w1 * m - w2 * n).norm());
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(f: Family, n: usize, l: u32) -> Model {
        Model::new(
            ModelType::new(f, n, l).unwrap(),
            C64::new(0.0, 0.9),
            SqrtMode::StrictReal,
        )
        .unwrap()
    }

    #[test]
    fn identity_at_zero() {
        let m = model(Family::C, 2, 1);
        let r = m.r_vv(C64::new(0.0, 0.0)).unwrap();
        // R(0) is the swap of left/bottom into top/right, i.e. the identity on paths
        let id = GradedOperator::identity(m.groupoid(), &[Kind::V, Kind::V]);
        assert!(r.residual(&id).value < 1e-11);
    }

    #[test]
    fn concrete_rotations_are_graded() {
        let m = model(Family::A, 3, 2);
        let u = C64::new(0.37, 0.11);
        for k in RKind::all() {
            let r = m.r(k, u).unwrap();
            assert!(r.is_graded(m.groupoid()), "{k}");
            assert!(r.nnz() > 0);
        }
    }

    #[test]
    fn starred_kinds_need_type_a() {
        let m = model(Family::D, 3, 1);
        assert!(matches!(
            m.r(RKind::VStarV, C64::new(0.3, 0.0)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn pole_distance() {
        let m = model(Family::A, 2, 1);
        let ps = m.poles();
        assert!(ps.distance(C64::new(-1.0, 0.0)) < 1e-14);
        assert!(ps.distance(C64::new(-1.0 + m.scale(), 0.0)) < 1e-12);
        assert!(ps.distance(C64::new(0.0, 0.9 * m.scale())) < 1e-12);
        assert!(ps.distance(C64::new(0.5, 0.0)) > 0.4);
    }
}
