//! Acceptance criteria, one line per criterion.

use num_complex::Complex64 as C64;
use rsos_core::verify::{self, CheckReport, SuiteConfig, SuiteReport};
use rsos_core::{Family, Groupoid, Model, ModelType, SqrtMode, ThetaContext};
use std::process::ExitCode;
use std::time::{Duration, Instant};

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
const TAUS: [f64; 3] = [0.7, 0.9, 1.2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn config(tau: f64) -> SuiteConfig {
    SuiteConfig {
        tau: C64::new(0.0, tau),
        unrestricted: true,
        ..SuiteConfig::default()
    }
}

fn run_all() -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for tau in TAUS {
        for (f, n, l) in DESK {
            let mt = ModelType::new(f, n, l).expect("desk model");
            out.push(verify::suite_for(mt, &config(tau)).expect("model builds"));
        }
    }
    out
}

/// Aggregate the named checks over every report that contains them.
fn gather(reports: &[SuiteReport], names: &[&str], tol_cap: Option<f64>) -> Outcome {
    let hits: Vec<&CheckReport> = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| names.contains(&c.check.as_str()))
        .collect();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for c in &hits {
        worst = worst.max(c.max_residual);
        let cap_ok = tol_cap.is_none_or(|t| c.max_residual < t);
        if !c.pass || !cap_ok {
            failures.push(format!("{} {}", c.model, c.check));
        }
    }
    let pass = !hits.is_empty() && failures.is_empty();
    let mut detail = format!("{} runs, max residual {:.2e}", hits.len(), worst);
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for tau in TAUS {
        for (f, n, l) in DESK {
            let m = Model::new(
                ModelType::new(f, n, l).unwrap(),
                C64::new(0.0, tau),
                SqrtMode::StrictReal,
            )
            .unwrap();
            let r = verify::run_check(&m, &config(tau), "theta").unwrap();
            worst = worst.max(r.max_residual);
        }
    }
    let th = ThetaContext::new(C64::new(0.0, 0.8), 1.0).unwrap();
    let frozen = (th.theta(C64::new(0.25, 0.0)) - 0.749515511792173).norm();
    let dt = t.elapsed();
    Outcome {
        pass: worst < 1e-11 && frozen < 1e-12 && dt < Duration::from_secs(1),
        detail: format!("max residual {worst:.2e}, frozen value off by {frozen:.1e}, {dt:.2?}"),
    }
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for l in 0..=4 {
        let n = Groupoid::new(ModelType::new(Family::A, 2, l).unwrap()).num_objects();
        if n != l as usize + 1 {
            bad.push(format!("A_1 level {l}: {n}"));
        }
    }
    let mut counts = Vec::new();
    for (f, n, want) in [(Family::B, 2, 3), (Family::C, 2, 3), (Family::D, 3, 4)] {
        let got = Groupoid::new(ModelType::new(f, n, 1).unwrap()).num_objects();
        counts.push(format!("{f}_{n}: {got}"));
        if got != want {
            bad.push(format!("{f}_{n} level 1: {got} (want {want})"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "A_1 levels 0..4 ok; {}{}",
            counts.join(", "),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; wrong: {}", bad.join(", "))
            }
        ),
    }
}

fn criterion_11(reports: &[SuiteReport]) -> Outcome {
    let o = gather(reports, &["split_pm", "block_split"], None);
    let exact = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| c.check == "split_pm" || c.check == "block_split")
        .all(|c| c.max_residual == 0.0);
    Outcome {
        pass: o.pass && exact,
        detail: format!(
            "{}; cross-parity entries {}",
            o.detail,
            if exact { "none" } else { "present" }
        ),
    }
}

fn criterion_13() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (f, n) in [(Family::D, 3), (Family::C, 1)] {
        let m = Model::new(
            ModelType::new(f, n, 1).unwrap(),
            C64::new(0.0, 0.9),
            SqrtMode::StrictReal,
        )
        .unwrap();
        let r = verify::run_check(&m, &SuiteConfig::default(), "rho_prime").unwrap();
        pass &= r.pass && r.max_residual < 1e-8;
        notes.push(format!(
            "{}: {:.2e} ({})",
            r.model,
            r.max_residual,
            r.note.unwrap_or_default()
        ));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn main() -> ExitCode {
    let mut lines: Vec<(u32, &str, Outcome)> = Vec::new();
    lines.push((1, "theta layer", criterion_1()));
    lines.push((2, "groupoid counts", criterion_2()));

    let t = Instant::now();
    let reports = run_all();
    let elapsed = t.elapsed();

    lines.push((
        3,
        "R(0) = Id",
        gather(&reports, &["identity_at_zero"], Some(1e-11)),
    ));
    lines.push((4, "Yang-Baxter", gather(&reports, &["ybe"], Some(1e-9))));
    lines.push((5, "inversion", gather(&reports, &["inversion"], Some(1e-9))));
    lines.push((
        6,
        "crossing",
        gather(
            &reports,
            &["crossing", "rotation_orthogonal", "wttan"],
            Some(1e-9),
        ),
    ));
    lines.push((
        7,
        "mixed rotations",
        gather(&reports, &["mixed_ybe", "rot_inversion"], Some(1e-9)),
    ));
    lines.push((
        8,
        "face identities",
        gather(
            &reports,
            &[
                "refsym",
                "rotrel",
                "invrel",
                "invAn",
                "invAn2",
                "rel1",
                "rel2",
                "star_triangle",
                "star_triangle_unrestricted",
            ],
            Some(1e-9),
        ),
    ));
    lines.push((
        9,
        "representations",
        gather(
            &reports,
            &[
                "rep_vector_relations",
                "rep_scalar_relations",
                "rep_tensor_relations",
                "rep_dual_relations",
                "rep_coalgebra",
                "rep_shift",
                "rep_dual_pairing",
                "p_dual_i",
                "p_dual_ii",
            ],
            Some(1e-9),
        ),
    ));
    lines.push((
        10,
        "square of the antipode",
        gather(&reports, &["s_squared"], Some(1e-9)),
    ));
    lines.push((11, "B/D splitting", criterion_11(&reports)));
    lines.push((
        12,
        "quasi-periodicity",
        gather(&reports, &["quasi_periodicity"], Some(1e-8)),
    ));
    lines.push((13, "rho' factorization", criterion_13()));

    let again = run_all();
    let same = reports
        .iter()
        .zip(&again)
        .all(|(a, b)| serde_json::to_vec(a).unwrap() == serde_json::to_vec(b).unwrap());
    let all_pass = reports.iter().all(|r| r.pass);
    lines.push((
        14,
        "runtime and determinism",
        Outcome {
            pass: elapsed < Duration::from_secs(60) && same && all_pass,
            detail: format!(
                "{} suites in {:.2?}, reports {}, suites {}",
                reports.len(),
                elapsed,
                if same {
                    "byte-identical on rerun"
                } else {
                    "differ on rerun"
                },
                if all_pass {
                    "all pass"
                } else {
                    "not all passing"
                }
            ),
        },
    ));

    let mut ok = true;
    for (k, name, o) in &lines {
        ok &= o.pass;
        println!(
            "criterion {k:>2} {:<4} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
