use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sncsurf::birational::{fiber_multiplicities, is_valid_fiber};
use sncsurf::divisor::{
    bark, classify_boundary, discriminant, discriminant_graph, plumbing_homology, BarkKind,
};
use sncsurf::lattice::{run_program, BlowupProgram};
use sncsurf::report::Report;
use sncsurf::verify::{self, CaseTable, Scenario};
use sncsurf::{DualGraph, Error};

#[derive(Parser)]
#[command(
    name = "sncsurf",
    version,
    about = "Exact intersection calculus for snc divisors on rational surfaces"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discriminant d = det(-Q) of a graph or of a subset of its vertices.
    Det {
        graph: PathBuf,
        /// Comma-separated vertex ids.
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<String>>,
    },
    /// Bark coefficients and D# = D - Bk D.
    Bark { graph: PathBuf },
    /// Boundary type: negative definite, X, H, Y(a,b,c) or other.
    Classify { graph: PathBuf },
    /// Whether the graph is a degenerate fiber of a P1-ruling; exits 1 if not.
    FiberCheck { graph: PathBuf },
    /// Invariant factors of the cokernel of the intersection matrix (0 = free summand).
    Mumford { graph: PathBuf },
    /// Blow-up programs of the projective plane.
    Arr {
        #[command(subcommand)]
        cmd: ArrCmd,
    },
    /// Run the bundled checks: y244, y333, cases or all.
    Verify {
        which: String,
        /// Read fixtures from this directory instead of the bundled copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Graphviz rendering of a graph.
    Dot { graph: PathBuf },
}

#[derive(Subcommand)]
enum ArrCmd {
    /// Execute a program and print the curve classes.
    Run { file: PathBuf },
}

enum Failure {
    Input(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn read(p: &Path) -> Result<String, Error> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_graph(p: &Path) -> Result<DualGraph, Error> {
    DualGraph::parse(&read(p)?)
}

fn emit(json: bool, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value()).expect("serializable"));
    } else {
        print!("{}", text());
    }
}

fn run_verify(which: &str, fixtures: Option<&Path>) -> Result<Vec<Report>, Error> {
    let names: Vec<&str> = match which {
        "all" => verify::RUNS.to_vec(),
        w if verify::RUNS.contains(&w) => vec![w],
        w => {
            return Err(Error::Io(format!("unknown verification `{w}` (expected y244, y333, cases or all)")))
        }
    };
    names
        .into_iter()
        .map(|n| match fixtures {
            None => verify::run_named(n),
            Some(dir) => {
                let load = |f: &str| read(&dir.join(f));
                if n == "cases" {
                    Ok(CaseTable::parse(&load("cases.table")?)?.run())
                } else {
                    Ok(Scenario::parse(n, &load(&format!("{n}.expect"))?, load)?.run())
                }
            }
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Det { graph, support } => {
            let g = load_graph(&graph)?;
            let d = match &support {
                Some(s) => discriminant(&g, s)?,
                None => discriminant_graph(&g),
            };
            emit(json, || format!("{d}\n"), || json!({ "discriminant": d.to_string() }));
        }
        Cmd::Bark { graph } => {
            let g = load_graph(&graph)?;
            let bk = bark(&g, BarkKind::Auto)?;
            let rows: Vec<(String, String, String)> = g
                .ids()
                .iter()
                .map(|id| {
                    let c = bk.coefficient(id);
                    let sharp = sncsurf::linalg::rat(1) - &c;
                    (id.clone(), c.to_string(), sharp.to_string())
                })
                .collect();
            emit(
                json,
                || rows.iter().map(|(id, c, s)| format!("{id} bk={c} sharp={s}\n")).collect(),
                || {
                    let m: serde_json::Map<String, Value> = rows
                        .iter()
                        .map(|(id, c, s)| (id.clone(), json!({ "bark": c, "sharp": s })))
                        .collect();
                    Value::Object(m)
                },
            );
        }
        Cmd::Classify { graph } => {
            let t = classify_boundary(&load_graph(&graph)?)?;
            emit(json, || format!("{t}\n"), || json!({ "type": t.to_string() }));
        }
        Cmd::FiberCheck { graph } => {
            let g = load_graph(&graph)?;
            let check = is_valid_fiber(&g);
            let mu = fiber_multiplicities(&g).ok();
            let contractions: Vec<String> = check.trace.iter().map(|s| s.vertex.clone()).collect();
            emit(
                json,
                || match &mu {
                    Some(f) => format!("valid fiber: {f}\ncontract: {}\n", contractions.join(" ")),
                    None => "not a fiber\n".into(),
                },
                || {
                    let m = mu.as_ref().map(|f| {
                        f.graph
                            .ids()
                            .iter()
                            .zip(&f.multiplicities)
                            .map(|(i, m)| (i.clone(), json!(m.to_string())))
                            .collect::<serde_json::Map<_, _>>()
                    });
                    json!({ "valid": check.valid, "multiplicities": m, "contractions": contractions })
                },
            );
            if !check.valid {
                return Err(Failure::Checks);
            }
        }
        Cmd::Mumford { graph } => {
            let h = plumbing_homology(&load_graph(&graph)?)?;
            let factors: Vec<String> = h.invariant_factors().iter().map(ToString::to_string).collect();
            let text = if factors.is_empty() { "1".to_string() } else { factors.join(" ") };
            emit(
                json,
                || format!("{text}\n"),
                || json!({ "invariant_factors": factors, "group": h.to_string() }),
            );
        }
        Cmd::Arr { cmd: ArrCmd::Run { file } } => {
            let l = run_program(&BlowupProgram::parse(&read(&file)?)?)?;
            emit(
                json,
                || l.to_string(),
                || {
                    let curves: serde_json::Map<String, Value> = l
                        .names()
                        .iter()
                        .map(|n| {
                            let c = l.class(n).expect("named");
                            (n.clone(), json!({ "class": c, "self_intersection": l.pair(c, c) }))
                        })
                        .collect();
                    json!({ "rank": l.rank(), "curves": curves })
                },
            );
        }
        Cmd::Verify { which, fixtures } => {
            let reports = run_verify(&which, fixtures.as_deref())?;
            let ok = reports.iter().all(Report::all_pass);
            if json {
                let v: Vec<Value> =
                    reports.iter().map(|r| serde_json::from_str(&r.to_json()).expect("valid json")).collect();
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                for r in &reports {
                    print!("{r}");
                }
            }
            if !ok {
                return Err(Failure::Checks);
            }
        }
        Cmd::Dot { graph } => {
            let dot = load_graph(&graph)?.emit_dot();
            emit(json, || dot.clone(), || json!({ "dot": dot }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
