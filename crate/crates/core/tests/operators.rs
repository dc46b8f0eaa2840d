use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsos_core::graded::paths;
use rsos_core::{Family, GradedOperator, Groupoid, Kind, ModelType, Path};

fn gr(f: Family, n: usize, l: u32) -> Groupoid {
    Groupoid::new(ModelType::new(f, n, l).unwrap())
}

/// Random graded operator, sparse with probability `fill`.
fn random_op(g: &Groupoid, kinds: &[Kind], seed: u64, fill: f64) -> GradedOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = paths(g, kinds);
    let mut op = GradedOperator::new(kinds.to_vec(), kinds.to_vec());
    for p in &basis {
        for q in &basis {
            if q.start == p.start && q.end(g) == p.end(g) && rng.gen_bool(fill) {
                op.insert(
                    p.clone(),
                    q.clone(),
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
    }
    op
}

/// Dense tensor product: sum over all splittings of input and output paths.
fn dense_tensor(
    g: &Groupoid,
    a: &GradedOperator,
    b: &GradedOperator,
    kinds: &[Kind],
) -> Vec<(Path, Path, C64)> {
    let m = a.in_kinds.len();
    let basis = paths(g, kinds);
    let mut out = Vec::new();
    for p in &basis {
        for q in &basis {
            let mut v = C64::new(0.0, 0.0);
            let (p1, q1) = (
                Path::new(p.start, p.steps[..m].to_vec()),
                Path::new(q.start, q.steps[..m].to_vec()),
            );
            let (pm, qm) = (p1.end(g).unwrap(), q1.end(g).unwrap());
            let p2 = Path::new(pm, p.steps[m..].to_vec());
            let q2 = Path::new(qm, q.steps[m..].to_vec());
            v += a.get(&p1, &q1) * b.get(&p2, &q2);
            out.push((p.clone(), q.clone(), v));
        }
    }
    out
}

#[test]
fn tensor_matches_dense_oracle() {
    let g = gr(Family::A, 2, 1);
    let kinds = [Kind::V, Kind::VStar, Kind::V];
    for seed in 0..8 {
        let a = random_op(&g, &kinds[..1], seed, 0.7);
        let b = random_op(&g, &kinds[1..], seed + 100, 0.7);
        let t = a.tensor(&b, &g).unwrap();
        for (p, q, v) in dense_tensor(&g, &a, &b, &kinds) {
            assert!((t.get(&p, &q) - v).norm() < 1e-14, "{p:?} {q:?}");
        }
    }
}

#[test]
fn identity_is_neutral() {
    let g = gr(Family::B, 2, 1);
    let kinds = [Kind::V, Kind::V];
    let a = random_op(&g, &kinds, 3, 0.5);
    let id = GradedOperator::identity(&g, &kinds);
    assert!(a.compose(&id).unwrap().residual(&a).value < 1e-15);
    assert!(id.compose(&a).unwrap().residual(&a).value < 1e-15);
}

#[test]
fn arity_mismatch_is_reported() {
    let g = gr(Family::A, 3, 1);
    let a = random_op(&g, &[Kind::V], 1, 1.0);
    let b = random_op(&g, &[Kind::V, Kind::V], 1, 1.0);
    assert!(a.compose(&b).is_err());
    assert!(a.embed(1, &[Kind::V], &g).is_err());
}

fn small_model() -> impl Strategy<Value = (Family, usize, u32)> {
    prop_oneof![
        Just((Family::A, 2, 2)),
        Just((Family::A, 3, 1)),
        Just((Family::B, 2, 1)),
        Just((Family::C, 2, 1)),
        Just((Family::D, 3, 1)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interchange_law((f, n, l) in small_model(), seed in 0u64..1000) {
        let g = gr(f, n, l);
        let (k1, k2) = ([Kind::V], [Kind::V, Kind::V]);
        let a = random_op(&g, &k1, seed, 0.6);
        let b = random_op(&g, &k2, seed + 1, 0.6);
        let c = random_op(&g, &k1, seed + 2, 0.6);
        let d = random_op(&g, &k2, seed + 3, 0.6);
        let lhs = a.tensor(&b, &g).unwrap().compose(&c.tensor(&d, &g).unwrap()).unwrap();
        let rhs = a.compose(&c).unwrap().tensor(&b.compose(&d).unwrap(), &g).unwrap();
        prop_assert!(lhs.residual(&rhs).value < 1e-13);
    }

    #[test]
    fn embed_is_tensor_with_identity((f, n, l) in small_model(), seed in 0u64..1000) {
        let g = gr(f, n, l);
        let kinds = [Kind::V, Kind::V, Kind::V];
        let a = random_op(&g, &kinds[..2], seed, 0.6);
        let id = GradedOperator::identity(&g, &[Kind::V]);
        let e0 = a.embed(0, &kinds, &g).unwrap();
        let e1 = a.embed(1, &kinds, &g).unwrap();
        prop_assert!(e0.residual(&a.tensor(&id, &g).unwrap()).value < 1e-15);
        prop_assert!(e1.residual(&id.tensor(&a, &g).unwrap()).value < 1e-15);
    }

    #[test]
    fn composition_is_associative((f, n, l) in small_model(), seed in 0u64..1000) {
        let g = gr(f, n, l);
        let k = [Kind::V, Kind::V];
        let (a, b, c) = (random_op(&g, &k, seed, 0.5), random_op(&g, &k, seed + 7, 0.5), random_op(&g, &k, seed + 9, 0.5));
        let x = a.compose(&b).unwrap().compose(&c).unwrap();
        let y = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(x.residual(&y).value < 1e-13);
        prop_assert!(x.is_graded(&g));
    }
}
