use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use rsos_core::groupoid::Cell;
use rsos_core::reps::{relation_residual, Rep};
use rsos_core::verify::{self, sampled, CheckReport, SuiteConfig, SCHEMA};
use rsos_core::{Error, Family, Model, ModelType, ObjId, RKind, SqrtMode, Step};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "rsos",
    version,
    about = "Restricted elliptic face models of types A, B, C, D"
)]
struct Cli {
    #[command(flatten)]
    model: ModelArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Lie type: A, B, C or D.
    #[arg(long, global = true, default_value = "A")]
    family: Family,
    /// Rank n (type A uses n for A_{n-1}).
    #[arg(long, global = true, default_value_t = 2)]
    rank: usize,
    #[arg(long, global = true, default_value_t = 1)]
    level: u32,
    /// Imaginary part of the modulus tau.
    #[arg(long, global = true, default_value_t = 0.9)]
    tau_im: f64,
    #[arg(long, global = true, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    /// Spectral samples per check.
    #[arg(long, global = true, default_value_t = 20)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Include the spot checks on unrestricted weights.
    #[arg(long, global = true)]
    unrestricted: bool,
    /// strict_real or principal_complex.
    #[arg(long, global = true, default_value = "strict_real")]
    sqrt_mode: SqrtMode,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constants of the model and sizes of the groupoid.
    Info,
    /// Objects (restricted weights).
    Objects,
    /// Carrier arrows; with --all every arrow of the groupoid.
    Arrows {
        #[arg(long)]
        all: bool,
    },
    /// Admissible squares.
    Cells,
    /// Face weight of one square.
    Weight {
        /// Object id of the top-left corner.
        #[arg(long)]
        corner: u32,
        /// Steps `top,right,left,bottom`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        square: Vec<i8>,
        /// Spectral parameter, `x`, `x+yi` or `x,y`.
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        u: C64,
    },
    /// R-matrix as a list of entries.
    Rmatrix {
        /// Spectral parameter, `x`, `x+yi` or `x,y`.
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        u: C64,
        /// VV, V*V, VV* or V*V*.
        #[arg(long, default_value = "VV")]
        kind: String,
    },
    /// Run one named check, or `all` for the full suite.
    Check {
        #[arg(default_value = "all")]
        which: String,
        /// List the applicable check names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Defining relations in a tensor product of vector representations.
    Rep {
        /// Spectral parameters of the factors (repeatable).
        #[arg(long = "z", value_parser = parse_c64, allow_hyphen_values = true, required = true)]
        zs: Vec<C64>,
        /// Use the dual of the product.
        #[arg(long)]
        dual: bool,
    },
}

fn parse_c64(s: &str) -> Result<C64, String> {
    if let Some((a, b)) = s.split_once(',') {
        let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
        return Ok(C64::new(re, im));
    }
    s.trim().parse::<C64>().map_err(|e| e.to_string())
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    Invalid(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

struct Output {
    value: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(value: Value, text: String) -> Self {
        Output {
            value,
            text,
            code: 0,
        }
    }
}

/// 0 when every report passes, 3 when one stopped on a numeric error, 1 otherwise.
fn report_code<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> u8 {
    let mut code = 0;
    for r in reports {
        if r.error.is_some() {
            return 3;
        }
        if !r.pass {
            code = 1;
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.model.json;
    match run(&cli) {
        Ok(out) => {
            let body = if json { pretty(&out.value) } else { out.text };
            emit(&body);
            ExitCode::from(out.code)
        }
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Invalid(m) => (2, "invalid_input", m),
                Failure::Numeric(m) => (3, "numeric", m),
            };
            if json {
                let v = json!({ "schema": SCHEMA, "error": { "kind": kind, "message": msg } });
                emit(&pretty(&v));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Write to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn suite_config(a: &ModelArgs) -> Result<SuiteConfig, Failure> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::Invalid(format!(
            "tolerance must be positive, got {}",
            a.tol
        )));
    }
    Ok(SuiteConfig {
        tau: C64::new(0.0, a.tau_im),
        tol: a.tol,
        samples: a.samples,
        seed: a.seed,
        sqrt_mode: a.sqrt_mode,
        unrestricted: a.unrestricted,
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let a = &cli.model;
    let mt =
        ModelType::new(a.family, a.rank, a.level).map_err(|e| Failure::Invalid(e.to_string()))?;
    let cfg = suite_config(a)?;
    if let Command::Check { list: true, .. } = cli.cmd {
        let names = verify::check_names(&mt);
        return Ok(Output::ok(
            json!({ "schema": SCHEMA, "checks": names }),
            names.join("\n") + "\n",
        ));
    }
    // a modulus below the convergence floor is bad input, not a numeric failure
    let m = Model::new(mt, cfg.tau, cfg.sqrt_mode).map_err(|e| match e {
        Error::Theta(t) => Failure::Invalid(t.to_string()),
        e => e.into(),
    })?;
    let gr = m.groupoid();
    let den = mt.denominator();
    let model = mt.to_string();
    match &cli.cmd {
        Command::Info => {
            let cells = gr.enumerate_cells(None).len();
            let v = json!({
                "schema": SCHEMA,
                "model": model,
                "family": mt.family.to_string(),
                "rank": mt.rank,
                "level": mt.level,
                "dual_coxeter": mt.dual_coxeter(),
                "lambda": mt.lambda(),
                "L": mt.scale(),
                "sigma": mt.sigma_sign(),
                "h": format!("{:?}", mt.h_kind()),
                "objects": gr.num_objects(),
                "carrier_arrows": gr.carrier_arrows().len(),
                "arrows": gr.num_objects() * gr.num_objects(),
                "cells": cells,
                "poles": m.poles().base,
            });
            let text = format!(
                "model           {model}\ng               {}\nlambda          {}\nL               {}\nsigma           {}\nh               {:?}\nobjects         {}\ncarrier arrows  {}\narrows          {}\ncells           {}\n",
                mt.dual_coxeter(),
                mt.lambda(),
                mt.scale(),
                mt.sigma_sign(),
                mt.h_kind(),
                gr.num_objects(),
                gr.carrier_arrows().len(),
                gr.num_objects() * gr.num_objects(),
                cells
            );
            Ok(Output::ok(v, text))
        }
        Command::Objects => {
            let mut rows = Vec::new();
            let mut text = String::new();
            for id in gr.object_ids() {
                let w = gr.weight(id).display(den);
                text.push_str(&format!("{:>4}  {w}\n", id.0));
                rows.push(json!({ "id": id.0, "weight": w, "coords": gr.coords(id) }));
            }
            Ok(Output::ok(
                json!({ "schema": SCHEMA, "model": model, "objects": rows }),
                text,
            ))
        }
        Command::Arrows { all } => {
            let mut rows = Vec::new();
            let mut text = String::new();
            if *all {
                for f in gr.arrows_of_pi() {
                    text.push_str(&format!("{} -> {}\n", f.source.0, f.target.0));
                    rows.push(json!({ "source": f.source.0, "target": f.target.0 }));
                }
            } else {
                for f in gr.carrier_arrows() {
                    let t = gr.step(f.source, f.step).expect("carrier");
                    text.push_str(&format!("{} -[{}]-> {}\n", f.source.0, f.step, t.0));
                    rows.push(json!({ "source": f.source.0, "step": f.step.0, "target": t.0 }));
                }
            }
            Ok(Output::ok(
                json!({ "schema": SCHEMA, "model": model, "arrows": rows }),
                text,
            ))
        }
        Command::Cells => {
            let mut rows = Vec::new();
            let mut text = String::new();
            for c in gr.enumerate_cells(None) {
                text.push_str(&format!(
                    "corner {} top {} right {} left {} bottom {}\n",
                    c.corner.0, c.top, c.right, c.left, c.bottom
                ));
                rows.push(json!({
                    "corner": c.corner.0, "top": c.top.0, "right": c.right.0,
                    "left": c.left.0, "bottom": c.bottom.0,
                }));
            }
            Ok(Output::ok(
                json!({ "schema": SCHEMA, "model": model, "cells": rows }),
                text,
            ))
        }
        Command::Weight { corner, square, u } => {
            if *corner as usize >= gr.num_objects() {
                return Err(Failure::Invalid(format!("no object with id {corner}")));
            }
            let &[top, right, left, bottom] = square.as_slice() else {
                return Err(Failure::Invalid(format!(
                    "--square needs 4 steps, got {}",
                    square.len()
                )));
            };
            let [top, right, left, bottom] = [top, right, left, bottom].map(Step);
            let cell = Cell {
                corner: ObjId(*corner),
                left,
                bottom,
                top,
                right,
            };
            if gr.cell_corners(&cell).is_none() {
                return Err(Failure::Invalid(
                    "the square is not admissible at this corner".into(),
                ));
            }
            let w = m.face(cell.corner, top, right, left, bottom, *u)?;
            let v = json!({ "schema": SCHEMA, "model": model, "u": [u.re, u.im], "re": w.re, "im": w.im });
            Ok(Output::ok(v, format!("{} {}\n", w.re, w.im)))
        }
        Command::Rmatrix { u, kind } => {
            let k: RKind = kind.parse()?;
            let op = m.r(k, *u)?;
            let entries = op.to_entries(gr);
            let mut text = String::new();
            for e in &entries {
                text.push_str(&format!(
                    "{} -> {}  {} {}\n",
                    e.in_path, e.out_path, e.re, e.im
                ));
            }
            let v = json!({
                "schema": SCHEMA, "model": model, "kind": k.to_string(),
                "u": [u.re, u.im], "entries": entries,
            });
            Ok(Output::ok(v, text))
        }
        Command::Check { which, .. } => {
            let checks = if which == "all" {
                verify::run_suite(&m, &cfg).checks
            } else {
                vec![verify::run_check(&m, &cfg, which)?]
            };
            let pass = checks.iter().all(|c| c.pass);
            let code = report_code(&checks);
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format!(
                    "{:<28} {}  max {:.3e}  tol {:.1e}",
                    c.check,
                    if c.pass { "pass" } else { "FAIL" },
                    c.max_residual,
                    c.tolerance
                ));
                if let Some(e) = &c.error {
                    text.push_str(&format!("  error: {e}"));
                }
                if let Some(n) = &c.note {
                    text.push_str(&format!("  ({n})"));
                }
                text.push('\n');
            }
            let v = json!({ "schema": SCHEMA, "model": model, "config": cfg, "pass": pass, "checks": checks });
            Ok(Output {
                value: v,
                text,
                code,
            })
        }
        Command::Rep { zs, dual } => {
            let mut w = Rep::vectors(zs);
            if *dual {
                w = Rep::dual(w);
            }
            let rep = sampled(&m, &cfg, "rep_relations", 2, cfg.tol, |x| {
                relation_residual(&m, &w, x[0], x[1])
            });
            let text = format!(
                "{:<28} {}  max {:.3e}  tol {:.1e}\n",
                rep.check,
                if rep.pass { "pass" } else { "FAIL" },
                rep.max_residual,
                rep.tolerance
            );
            let code = report_code([&rep]);
            let v = json!({ "schema": SCHEMA, "model": model, "representation": w, "report": rep });
            Ok(Output {
                value: v,
                text,
                code,
            })
        }
    }
}
