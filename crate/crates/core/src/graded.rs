//! Sparse operators between path spaces of the groupoid.
//!
//! Every weight space of `V`, `V*` and their tensor products is one
//! dimensional, so a basis vector is a path: a start object plus a sequence
//! of carrier steps. An operator maps each input path to a sparse combination
//! of output paths with the same endpoints.

use crate::boltzmann::WeightContext;
use crate::error::{Error, Result};
use crate::groupoid::{Family, Groupoid, Kind, ObjId, Step};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Basis vector of a tensor power: start object and step sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    pub start: ObjId,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn new(start: ObjId, steps: Vec<Step>) -> Self {
        Path { start, steps }
    }

    pub fn empty(start: ObjId) -> Self {
        Path {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, gr: &Groupoid) -> Option<ObjId> {
        gr.walk(self.start, &self.steps)
    }

    /// The inverse path, running backwards from the end.
    pub fn inverse(&self, gr: &Groupoid) -> Option<Path> {
        let end = self.end(gr)?;
        Some(Path {
            start: end,
            steps: self.steps.iter().rev().map(|&s| -s).collect(),
        })
    }

    pub fn label(&self, gr: &Groupoid) -> String {
        let den = gr.model_type().denominator();
        let st: Vec<String> = self.steps.iter().map(|s| s.0.to_string()).collect();
        format!("{}[{}]", gr.weight(self.start).display(den), st.join(","))
    }
}

/// Graded vector space: a tensor product of factors `V` / `V*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedSpace {
    pub kinds: Vec<Kind>,
}

impl GradedSpace {
    pub fn new(kinds: Vec<Kind>) -> Self {
        GradedSpace { kinds }
    }

    pub fn dual(&self, family: Family) -> Self {
        GradedSpace {
            kinds: self.kinds.iter().rev().map(|k| k.dual(family)).collect(),
        }
    }

    pub fn basis(&self, gr: &Groupoid) -> Vec<Path> {
        paths(gr, &self.kinds)
    }
}

/// All paths whose factors have the given kinds, in deterministic order.
pub fn paths(gr: &Groupoid, kinds: &[Kind]) -> Vec<Path> {
    let mt = *gr.model_type();
    let step_sets: Vec<Vec<Step>> = kinds.iter().map(|&k| mt.kind_steps(k)).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(kinds.len());
    fn rec(
        gr: &Groupoid,
        sets: &[Vec<Step>],
        start: ObjId,
        at: ObjId,
        cur: &mut Vec<Step>,
        out: &mut Vec<Path>,
    ) {
        if cur.len() == sets.len() {
            out.push(Path {
                start,
                steps: cur.clone(),
            });
            return;
        }
        for &s in &sets[cur.len()] {
            if let Some(next) = gr.step(at, s) {
                cur.push(s);
                rec(gr, sets, start, next, cur, out);
                cur.pop();
            }
        }
    }
    for a in gr.object_ids() {
        rec(gr, &step_sets, a, a, &mut cur, &mut out);
    }
    out
}

/// Sparse graded operator. Each stored column is indexed by an input path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedOperator {
    pub in_kinds: Vec<Kind>,
    pub out_kinds: Vec<Kind>,
    pub entries: BTreeMap<Path, BTreeMap<Path, C64>>,
}

/// Largest entrywise difference and where it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub witness: Option<(Path, Path)>,
}

impl Residual {
    pub fn zero() -> Self {
        Residual {
            value: 0.0,
            witness: None,
        }
    }

    pub fn merge(&mut self, other: Residual) {
        if other.value > self.value || other.value.is_nan() {
            *self = other;
        }
    }
}

impl GradedOperator {
    pub fn new(in_kinds: Vec<Kind>, out_kinds: Vec<Kind>) -> Self {
        GradedOperator {
            in_kinds,
            out_kinds,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(gr: &Groupoid, kinds: &[Kind]) -> Self {
        let mut op = GradedOperator::new(kinds.to_vec(), kinds.to_vec());
        for p in paths(gr, kinds) {
            op.insert(p.clone(), p, C64::new(1.0, 0.0));
        }
        op
    }

    pub fn insert(&mut self, input: Path, output: Path, v: C64) {
        *self
            .entries
            .entry(input)
            .or_default()
            .entry(output)
            .or_insert(C64::new(0.0, 0.0)) += v;
    }

    pub fn get(&self, input: &Path, output: &Path) -> C64 {
        self.entries
            .get(input)
            .and_then(|c| c.get(output))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn column(&self, input: &Path) -> Option<&BTreeMap<Path, C64>> {
        self.entries.get(input)
    }

    pub fn nnz(&self) -> usize {
        self.entries.values().map(|c| c.len()).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for col in out.entries.values_mut() {
            for v in col.values_mut() {
                *v *= c;
            }
        }
        out
    }

    /// `self o other` (apply `other` first).
    pub fn compose(&self, other: &GradedOperator) -> Result<GradedOperator> {
        if self.in_kinds != other.out_kinds {
            return Err(Error::ArityMismatch(format!(
                "compose: {:?} after {:?}",
                self.in_kinds, other.out_kinds
            )));
        }
        let mut out = GradedOperator::new(other.in_kinds.clone(), self.out_kinds.clone());
        for (p, col) in &other.entries {
            let mut acc: BTreeMap<Path, C64> = BTreeMap::new();
            for (q, &v) in col {
                if let Some(col2) = self.entries.get(q) {
                    for (r, &w) in col2 {
                        *acc.entry(r.clone()).or_insert(C64::new(0.0, 0.0)) += v * w;
                    }
                }
            }
            out.entries.insert(p.clone(), acc);
        }
        Ok(out)
    }

    /// Compose a chain, rightmost applied first.
    pub fn chain(ops: &[&GradedOperator]) -> Result<GradedOperator> {
        let (last, rest) = ops
            .split_last()
            .ok_or_else(|| Error::ArityMismatch("empty chain".into()))?;
        let mut acc = (*last).clone();
        for op in rest.iter().rev() {
            acc = op.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Apply `(op, leg)` pairs in order to the space with factors `kinds`,
    /// embedding each operator at its leg. The first pair acts first.
    pub fn sequence(
        gr: &Groupoid,
        kinds: &[Kind],
        ops: &[(&GradedOperator, usize)],
    ) -> Result<GradedOperator> {
        let mut acc = GradedOperator::identity(gr, kinds);
        for (op, pos) in ops {
            let e = op.embed(*pos, &acc.out_kinds, gr)?;
            acc = e.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Tensor product on concatenated paths.
    pub fn tensor(&self, other: &GradedOperator, gr: &Groupoid) -> Result<GradedOperator> {
        let mut in_kinds = self.in_kinds.clone();
        in_kinds.extend(&other.in_kinds);
        let mut out_kinds = self.out_kinds.clone();
        out_kinds.extend(&other.out_kinds);
        let mut out = GradedOperator::new(in_kinds.clone(), out_kinds);
        let m = self.in_kinds.len();
        for p in paths(gr, &in_kinds) {
            let first = Path::new(p.start, p.steps[..m].to_vec());
            let mid = first.end(gr).expect("basis path");
            let second = Path::new(mid, p.steps[m..].to_vec());
            let (Some(c1), Some(c2)) = (self.entries.get(&first), other.entries.get(&second))
            else {
                out.entries.insert(p, BTreeMap::new());
                continue;
            };
            let mut col = BTreeMap::new();
            for (q1, &v1) in c1 {
                for (q2, &v2) in c2 {
                    if q1.end(gr) != Some(q2.start) {
                        continue;
                    }
                    let mut steps = q1.steps.clone();
                    steps.extend(&q2.steps);
                    *col.entry(Path::new(p.start, steps))
                        .or_insert(C64::new(0.0, 0.0)) += v1 * v2;
                }
            }
            out.entries.insert(p, col);
        }
        Ok(out)
    }

    /// Act on the factors `pos..pos + arity` of a space with factors `kinds`,
    /// as the identity elsewhere.
    pub fn embed(&self, pos: usize, kinds: &[Kind], gr: &Groupoid) -> Result<GradedOperator> {
        let m = self.in_kinds.len();
        if pos + m > kinds.len() || kinds[pos..pos + m] != self.in_kinds[..] {
            return Err(Error::ArityMismatch(format!(
                "embed {:?} at {pos} into {:?}",
                self.in_kinds, kinds
            )));
        }
        let mut out_kinds = kinds[..pos].to_vec();
        out_kinds.extend(&self.out_kinds);
        out_kinds.extend(&kinds[pos + m..]);
        let mut out = GradedOperator::new(kinds.to_vec(), out_kinds);
        for p in paths(gr, kinds) {
            let b = gr.walk(p.start, &p.steps[..pos]).expect("basis path");
            let mid = Path::new(b, p.steps[pos..pos + m].to_vec());
            let mut col = BTreeMap::new();
            if let Some(c) = self.entries.get(&mid) {
                for (q, &v) in c {
                    let mut steps = p.steps[..pos].to_vec();
                    steps.extend(&q.steps);
                    steps.extend(&p.steps[pos + m..]);
                    *col.entry(Path::new(p.start, steps))
                        .or_insert(C64::new(0.0, 0.0)) += v;
                }
            }
            out.entries.insert(p, col);
        }
        Ok(out)
    }

    /// Largest entry difference over the union of supports, divided by
    /// `max(1, largest entry)` so that samples near poles are not penalized.
    pub fn residual(&self, other: &GradedOperator) -> Residual {
        let scale = self.max_abs().max(other.max_abs()).max(1.0);
        let mut res = self.abs_residual(other);
        res.value /= scale;
        res
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .flat_map(|c| c.values())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute entry difference over the union of supports.
    pub fn abs_residual(&self, other: &GradedOperator) -> Residual {
        let mut res = Residual::zero();
        let zero = BTreeMap::new();
        let keys: std::collections::BTreeSet<&Path> =
            self.entries.keys().chain(other.entries.keys()).collect();
        for p in keys {
            let a = self.entries.get(p).unwrap_or(&zero);
            let b = other.entries.get(p).unwrap_or(&zero);
            for q in a.keys().chain(b.keys()) {
                let d = (a.get(q).copied().unwrap_or_default()
                    - b.get(q).copied().unwrap_or_default())
                .norm();
                if d > res.value || d.is_nan() {
                    res = Residual {
                        value: d,
                        witness: Some((p.clone(), q.clone())),
                    };
                }
            }
        }
        res
    }

    /// Every stored entry joins paths with equal endpoints.
    pub fn is_graded(&self, gr: &Groupoid) -> bool {
        self.entries.iter().all(|(p, col)| {
            col.keys()
                .all(|q| q.start == p.start && q.end(gr) == p.end(gr) && p.end(gr).is_some())
        })
    }

    /// JSON-friendly entry list.
    pub fn to_entries(&self, gr: &Groupoid) -> Vec<OperatorEntry> {
        let mut out = Vec::new();
        for (p, col) in &self.entries {
            for (q, v) in col {
                out.push(OperatorEntry {
                    in_path: p.label(gr),
                    out_path: q.label(gr),
                    re: v.re,
                    im: v.im,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorEntry {
    #[serde(rename = "inPath")]
    pub in_path: String,
    #[serde(rename = "outPath")]
    pub out_path: String,
    pub re: f64,
    pub im: f64,
}

fn gc(gr: &Groupoid, wc: &WeightContext, a: ObjId) -> C64 {
    let c: Vec<C64> = gr.coords(a).into_iter().map(|x| C64::new(x, 0.0)).collect();
    wc.g(&c)
}

/// Cap `omega`. Orthogonal and symplectic types: `V (x) V -> 1` with
/// `omega(a; i, -i) = xi_i sqrt(sigma G_{a+eps_i} / G_a)`, the sign `xi_i` being
/// `sgn(i)` for C and 1 otherwise. Type A: `V (x) V* -> 1` with `sqrt(G_{a+eps_i}/G_a)`.
pub fn cap_omega(gr: &Groupoid, wc: &WeightContext) -> Result<GradedOperator> {
    let mt = *gr.model_type();
    let (k1, k2) = match mt.family {
        Family::A => (Kind::V, Kind::VStar),
        _ => (Kind::V, Kind::V),
    };
    let sg = if mt.family == Family::A {
        1.0
    } else {
        mt.sigma_sign()
    };
    let mut op = GradedOperator::new(vec![k1, k2], vec![]);
    for p in paths(gr, &[k1, k2]) {
        let (i, j) = (p.steps[0], p.steps[1]);
        let mut col = BTreeMap::new();
        if j == -i {
            let b = gr.step(p.start, i).expect("basis path");
            let r = sg * gc(gr, wc, b) / gc(gr, wc, p.start);
            col.insert(Path::empty(p.start), wc.step_sign(i) * wc.root(r, "omega")?);
        }
        op.entries.insert(p, col);
    }
    Ok(op)
}

/// Cup `sigma`: `1 -> V (x) V` (orthogonal/symplectic) or `1 -> V* (x) V` (type A),
/// `sigma(1_a) = sum_k xi_k sqrt(sigma G_{a-eps_k} / G_a) (a; -k, k)`.
pub fn cup_sigma(gr: &Groupoid, wc: &WeightContext) -> Result<GradedOperator> {
    let mt = *gr.model_type();
    let (k1, k2) = match mt.family {
        Family::A => (Kind::VStar, Kind::V),
        _ => (Kind::V, Kind::V),
    };
    let sg = if mt.family == Family::A {
        1.0
    } else {
        mt.sigma_sign()
    };
    let mut op = GradedOperator::new(vec![], vec![k1, k2]);
    for a in gr.object_ids() {
        let mut col = BTreeMap::new();
        for &k in &mt.kind_steps(Kind::V) {
            let mk = -k;
            let Some(b) = gr.step(a, mk) else { continue };
            if gr.step(b, k) != Some(a) {
                continue;
            }
            let r = sg * gc(gr, wc, b) / gc(gr, wc, a);
            col.insert(
                Path::new(a, vec![mk, k]),
                wc.step_sign(k) * wc.root(r, "sigma")?,
            );
        }
        op.entries.insert(Path::empty(a), col);
    }
    Ok(op)
}

/// Cap `omega*: V* (x) V -> 1` (type A), `omega*(a; -i, i) = sqrt(G_{a-eps_i}/G_a)`.
pub fn cap_omega_star(gr: &Groupoid, wc: &WeightContext) -> Result<GradedOperator> {
    require_a(gr)?;
    let mut op = GradedOperator::new(vec![Kind::VStar, Kind::V], vec![]);
    for p in paths(gr, &[Kind::VStar, Kind::V]) {
        let (i, j) = (p.steps[0], p.steps[1]);
        let mut col = BTreeMap::new();
        if j == -i {
            let b = gr.step(p.start, i).expect("basis path");
            let r = gc(gr, wc, b) / gc(gr, wc, p.start);
            col.insert(Path::empty(p.start), wc.root(r, "omega*")?);
        }
        op.entries.insert(p, col);
    }
    Ok(op)
}

/// Cup `sigma*: 1 -> V (x) V*` (type A), coefficient `sqrt(G_{a+eps_k}/G_a)` on `(a; k, -k)`.
pub fn cup_sigma_star(gr: &Groupoid, wc: &WeightContext) -> Result<GradedOperator> {
    require_a(gr)?;
    let mt = *gr.model_type();
    let mut op = GradedOperator::new(vec![], vec![Kind::V, Kind::VStar]);
    for a in gr.object_ids() {
        let mut col = BTreeMap::new();
        for &k in &mt.kind_steps(Kind::V) {
            let Some(b) = gr.step(a, k) else { continue };
            if gr.step(b, -k) != Some(a) {
                continue;
            }
            let r = gc(gr, wc, b) / gc(gr, wc, a);
            col.insert(Path::new(a, vec![k, -k]), wc.root(r, "sigma*")?);
        }
        op.entries.insert(Path::empty(a), col);
    }
    Ok(op)
}

fn require_a(gr: &Groupoid) -> Result<()> {
    if gr.model_type().family != Family::A {
        return Err(Error::NotApplicable(
            "starred cap/cup exist for type A only".into(),
        ));
    }
    Ok(())
}

/// Rotations of an R-matrix by caps and cups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rotation {
    /// `V* (x) V -> V (x) V*`: `omega*^{(12)} R^{(23)}(lambda-u) sigma*^{(34)}`.
    Minus90,
    /// `V (x) V* -> V* (x) V`: `omega^{(34)} R^{(23)}(lambda-u) sigma^{(01)}`.
    Plus90,
    /// `V* (x) V* -> V* (x) V*`: `Plus90` applied to `Plus90`.
    By180,
    /// `V* (x) V* -> V* (x) V*`: `Minus90` applied to `Minus90`.
    ByMinus180,
    /// Orthogonal/symplectic: `omega^{(34)} R^{(23)}(lambda-u) sigma^{(01)}` on `V (x) V`.
    Orthogonal90,
}

/// Caps and cups of a model, materialized once.
#[derive(Debug, Clone)]
pub struct CapsCups {
    pub omega: GradedOperator,
    pub sigma: GradedOperator,
    pub omega_star: Option<GradedOperator>,
    pub sigma_star: Option<GradedOperator>,
}

impl CapsCups {
    pub fn new(gr: &Groupoid, wc: &WeightContext) -> Result<Self> {
        let a = gr.model_type().family == Family::A;
        Ok(CapsCups {
            omega: cap_omega(gr, wc)?,
            sigma: cup_sigma(gr, wc)?,
            omega_star: if a {
                Some(cap_omega_star(gr, wc)?)
            } else {
                None
            },
            sigma_star: if a {
                Some(cup_sigma_star(gr, wc)?)
            } else {
                None
            },
        })
    }

    pub fn star(&self) -> Result<(&GradedOperator, &GradedOperator)> {
        match (&self.omega_star, &self.sigma_star) {
            (Some(o), Some(s)) => Ok((o, s)),
            _ => Err(Error::NotApplicable(
                "starred cap/cup exist for type A only".into(),
            )),
        }
    }
}

/// `cap^{(34)} X^{(23)} cup^{(01)}`: the cup is inserted on the left.
pub fn turn_left(
    gr: &Groupoid,
    cap: &GradedOperator,
    cup: &GradedOperator,
    x: &GradedOperator,
) -> Result<GradedOperator> {
    let kinds = [x.in_kinds[1], cap.in_kinds[1]];
    let s = cup.embed(0, &kinds, gr)?;
    let xx = x.embed(1, &s.out_kinds, gr)?;
    let o = cap.embed(2, &xx.out_kinds, gr)?;
    GradedOperator::chain(&[&o, &xx, &s])
}

/// `cap^{(12)} X^{(23)} cup^{(34)}`: the cup is inserted on the right.
pub fn turn_right(
    gr: &Groupoid,
    cap: &GradedOperator,
    cup: &GradedOperator,
    x: &GradedOperator,
) -> Result<GradedOperator> {
    let kinds = [cap.in_kinds[0], x.in_kinds[0]];
    let s = cup.embed(2, &kinds, gr)?;
    let xx = x.embed(1, &s.out_kinds, gr)?;
    let o = cap.embed(0, &xx.out_kinds, gr)?;
    GradedOperator::chain(&[&o, &xx, &s])
}

/// Rotate an R-matrix. `r_at` evaluates the `V (x) V` operator; each quarter
/// turn evaluates what it rotates at `lambda - u`.
pub fn rotate<F>(
    gr: &Groupoid,
    cc: &CapsCups,
    which: Rotation,
    lambda: f64,
    u: C64,
    r_at: &F,
) -> Result<GradedOperator>
where
    F: Fn(C64) -> Result<GradedOperator>,
{
    let v = C64::new(lambda, 0.0) - u;
    match which {
        Rotation::Minus90 => {
            let (oms, sgs) = cc.star()?;
            turn_right(gr, oms, sgs, &r_at(v)?)
        }
        Rotation::Plus90 => {
            cc.star()?;
            turn_left(gr, &cc.omega, &cc.sigma, &r_at(v)?)
        }
        Rotation::By180 => {
            let inner = rotate(gr, cc, Rotation::Plus90, lambda, v, r_at)?;
            turn_left(gr, &cc.omega, &cc.sigma, &inner)
        }
        Rotation::ByMinus180 => {
            let (oms, sgs) = cc.star()?;
            let inner = rotate(gr, cc, Rotation::Minus90, lambda, v, r_at)?;
            turn_right(gr, oms, sgs, &inner)
        }
        Rotation::Orthogonal90 => {
            if gr.model_type().family == Family::A {
                return Err(Error::NotApplicable(
                    "type A rotations change the factor kinds".into(),
                ));
            }
            turn_left(gr, &cc.omega, &cc.sigma, &r_at(v)?)
        }
    }
}
