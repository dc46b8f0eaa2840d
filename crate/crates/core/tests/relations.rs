use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rsos_core::boltzmann::{classify, Pattern, Square};
use rsos_core::graded::Path;
use rsos_core::verify::{self, run_check, ybe_residual, SuiteConfig};
use rsos_core::{Family, GradedOperator, Kind, Model, ModelType, RKind, SqrtMode};

fn model(f: Family, n: usize, l: u32) -> Model {
    Model::new(
        ModelType::new(f, n, l).unwrap(),
        C64::new(0.0, 0.9),
        SqrtMode::StrictReal,
    )
    .unwrap()
}

const DESK: [(Family, usize, u32); 8] = [
    (Family::A, 2, 1),
    (Family::A, 2, 2),
    (Family::A, 2, 3),
    (Family::A, 3, 1),
    (Family::A, 3, 2),
    (Family::B, 2, 1),
    (Family::C, 2, 1),
    (Family::D, 3, 1),
];

fn passes(m: &Model, name: &str) {
    let r = run_check(m, &SuiteConfig::default(), name).unwrap();
    assert!(
        r.pass,
        "{} {}: {:e} {:?}",
        r.model, name, r.max_residual, r.error
    );
}

#[test]
fn r_at_zero_is_identity() {
    for (f, n, l) in DESK {
        let m = model(f, n, l);
        let id = GradedOperator::identity(m.groupoid(), &[Kind::V, Kind::V]);
        let r = m.r_vv(C64::new(0.0, 0.0)).unwrap();
        assert!(r.residual(&id).value < 1e-11, "{f}{n} level {l}");
    }
}

#[test]
fn reflected_entries_are_face_weights() {
    let mut seen = 0;
    for l in [1, 2] {
        let m = model(Family::B, 2, l);
        let gr = m.groupoid();
        let u = C64::new(0.41, 0.07);
        let r = m.r_vv(u).unwrap();
        for cell in gr.enumerate_cells(None) {
            if classify(&Square::from(&cell)) != Pattern::Reflected {
                continue;
            }
            seen += 1;
            let p = Path::new(cell.corner, vec![cell.left, cell.bottom]);
            let q = Path::new(cell.corner, vec![cell.top, cell.right]);
            let w = m.weights().weight(gr, &cell, u).unwrap();
            assert!((r.get(&p, &q) - w).norm() < 1e-14);
        }
    }
    assert!(seen > 0);
}

#[test]
fn ybe_and_inversion_on_desk_models() {
    for (f, n, l) in DESK {
        let m = model(f, n, l);
        passes(&m, "ybe");
        passes(&m, "inversion");
    }
}

#[test]
fn crossing_and_rotations() {
    for (f, n) in [(Family::B, 2), (Family::C, 2), (Family::D, 3)] {
        let m = model(f, n, 1);
        passes(&m, "crossing");
        passes(&m, "rotation_orthogonal");
        passes(&m, "zigzag");
    }
    for (n, l) in [(2, 2), (3, 1)] {
        let m = model(Family::A, n, l);
        for c in [
            "wttan",
            "mixed_ybe",
            "rot_inversion",
            "rotations",
            "sigma_star_relation",
            "zigzag",
        ] {
            passes(&m, c);
        }
    }
}

#[test]
fn appendix_identities() {
    passes(&model(Family::B, 2, 1), "refsym");
    let d3 = model(Family::D, 3, 1);
    passes(&d3, "rel1");
    passes(&d3, "rel2");
    passes(&d3, "rotrel");
    let a2 = model(Family::A, 3, 1);
    passes(&a2, "invAn");
    passes(&a2, "invAn2");
    for (f, n, l) in DESK {
        let m = model(f, n, l);
        passes(&m, "invrel");
        passes(&m, "star_triangle");
        passes(&m, "restricted_vanishing");
    }
}

#[test]
fn unrestricted_star_triangle() {
    for (f, n) in [
        (Family::A, 2),
        (Family::B, 2),
        (Family::C, 2),
        (Family::D, 3),
    ] {
        let m = model(f, n, 1);
        let cfg = SuiteConfig {
            samples: 4,
            ..SuiteConfig::default()
        };
        let r = run_check(&m, &cfg, "star_triangle_unrestricted").unwrap();
        assert!(r.pass, "{f}: {:?}", r.error);
        assert!(r.note.unwrap().contains("heights"));
    }
}

#[test]
fn orthogonal_blocks_split() {
    for (f, n) in [(Family::B, 2), (Family::D, 3)] {
        let r = run_check(&model(f, n, 1), &SuiteConfig::default(), "block_split").unwrap();
        assert!(r.pass && r.max_residual == 0.0);
    }
}

#[test]
fn starred_kinds_are_graded_and_distinct() {
    let m = model(Family::A, 2, 2);
    let u = C64::new(0.3, 0.1);
    for k in RKind::all() {
        let r = m.r(k, u).unwrap();
        assert!(r.is_graded(m.groupoid()));
        assert_eq!(r.in_kinds, k.in_kinds().to_vec());
    }
}

#[test]
fn a1_level_one_suite_passes() {
    let cfg = SuiteConfig {
        unrestricted: true,
        ..SuiteConfig::default()
    };
    let rep = verify::suite_for(ModelType::new(Family::A, 2, 1).unwrap(), &cfg).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.schema, verify::SCHEMA);
}

#[test]
fn reports_are_deterministic() {
    let mt = ModelType::new(Family::C, 2, 1).unwrap();
    let cfg = SuiteConfig {
        seed: 17,
        samples: 5,
        ..SuiteConfig::default()
    };
    let a = serde_json::to_string(&verify::suite_for(mt, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&verify::suite_for(mt, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = SuiteConfig { seed: 18, ..cfg };
    let c = serde_json::to_string(&verify::suite_for(mt, &other).unwrap()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn zero_tolerance_never_passes() {
    let m = model(Family::A, 2, 1);
    let cfg = SuiteConfig {
        tol: 0.0,
        ..SuiteConfig::default()
    };
    assert!(!run_check(&m, &cfg, "ybe").unwrap().pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ybe_holds_at_random_points(
        idx in 0usize..8,
        x1 in 0.05..0.95f64, y1 in -0.3..0.3f64,
        x2 in 0.05..0.95f64, y2 in -0.3..0.3f64,
    ) {
        let (f, n, l) = DESK[idx];
        let m = model(f, n, l);
        let big_l = m.scale();
        let (u1, u2) = (C64::new(x1 * big_l, y1), C64::new(x2 * big_l, y2));
        let ps = m.poles();
        prop_assume!([u1, u2, u1 - u2].iter().all(|&z| ps.distance(z) > 0.05));
        let r = ybe_residual(&m, u1, u2).unwrap();
        prop_assert!(r.value < 1e-9, "{}", r.value);
    }

    #[test]
    fn unitarity_at_random_points(idx in 0usize..8, x in 0.05..0.95f64, y in -0.3..0.3f64) {
        let (f, n, l) = DESK[idx];
        let m = model(f, n, l);
        let u = C64::new(x * m.scale(), y);
        prop_assume!(m.poles().distance(u) > 0.05 && m.poles().distance(-u) > 0.05);
        let id = GradedOperator::identity(m.groupoid(), &[Kind::V, Kind::V]);
        let p = m.r_vv(u).unwrap().compose(&m.r_vv(-u).unwrap()).unwrap();
        prop_assert!(p.residual(&id).value < 1e-9);
    }
}
