//! Command line front end. Every command prints one JSON object carrying a
//! `"schema"` tag; failures print `{"schema", "error", "message", …}` and
//! exit with [`Error::exit_code`].

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dynamics::{self, OrientedTwoRegular, TreeWindow};
use crate::error::{Error, Result};
use crate::graph::{io, PartialMatching};
use crate::group::{build_doubling, expand_window, square_set, GeneratingSet, WindowKind};
use crate::hall::{check_hall, check_hall_eps_n, ExpansionParams};
use crate::layers::{geometric_schedule, greedy_layering, Layering};
use crate::matcher::{layered_perfect_matching_with, MatchConfig};
use crate::paradox::{self, ParadoxicalDecomposition};
use crate::rational::{self, Rational};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Parser, Debug)]
#[command(name = "paradox", about = "Hall-type matchings, paradoxical decompositions and tree dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    F2,
    Sphere,
}

impl From<Kind> for WindowKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::F2 => WindowKind::F2,
            Kind::Sphere => WindowKind::Sphere,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Oracle {
    Classical,
    Matched,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hall's condition, or Hall_{ε,n} up to a size cap.
    HallCheck {
        graph: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Option<Rational>,
        #[arg(long, default_value_t = 1)]
        floor: usize,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// Greedy layering for the geometric schedule.
    Layers {
        graph: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, default_value_t = 2)]
        ratio: u64,
    },
    /// Layered perfect matching.
    Match {
        graph: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, default_value_t = 2)]
        ratio: u64,
        #[arg(long)]
        audit: bool,
        /// Largest set size for the hypothesis and audit checks; 0 checks
        /// plain Hall only.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        /// Size cap for the per-stage audits; defaults to `--cap`.
        #[arg(long)]
        audit_cap: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Externally supplied layering `{"layers": [[ids], …]}`.
        #[arg(long)]
        layers: Option<PathBuf>,
        /// Print DOT with the matching in bold instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Action window and its doubling graph.
    Window {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        margin: usize,
        /// Use S² instead of S for the doubling graph.
        #[arg(long)]
        square: bool,
        #[arg(long, default_value_t = 3)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Piece tables and certificate.
    Paradox {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = Oracle::Matched)]
        oracle: Oracle,
    },
    /// Re-check a decomposition produced elsewhere.
    Verify {
        #[arg(long)]
        pieces: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 4)]
        margin: usize,
    },
    /// Majority transfer of a G_n matching to the line.
    Transfer {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        gn_matching: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// 4-regular forest from a four-copy doubling matching.
    Forest {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        radius: usize,
        /// Write the deep part of the forest as `{"adj": [[…], …]}`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Free F₂ action generating a forest window.
    F2action {
        /// Forest written by `forest --out`; a synthetic tree is used when
        /// absent.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        stages: usize,
        #[arg(long, default_value_t = 128)]
        radius: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Window, doubling, matching, pieces and certificates in one run.
    Demo {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        radius: usize,
    },
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

/// Exit status and the text for standard output and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok((code, body)) => Outcome {
            code,
            stdout: render(body),
            stderr: String::new(),
        },
        Err(e) => {
            let mut body = json!({
                "schema": schema(name),
                "error": e.code(),
                "message": e.to_string(),
            });
            if let Error::HypothesisFailed { report: Some(r), .. } = &e {
                body["report"] = serde_json::to_value(r).expect("plain data");
            }
            Outcome {
                code: e.exit_code(),
                stdout: render(body),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn render(v: Value) -> String {
    match v {
        Value::String(s) => s,
        v => serde_json::to_string_pretty(&v).expect("json") + "\n",
    }
}

fn schema(name: &str) -> String {
    format!("paradox/{name}/{SCHEMA_VERSION}")
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::HallCheck { .. } => "hall-check",
        Command::Layers { .. } => "layers",
        Command::Match { .. } => "match",
        Command::Window { .. } => "window",
        Command::Paradox { .. } => "paradox",
        Command::Verify { .. } => "verify",
        Command::Transfer { .. } => "transfer",
        Command::Forest { .. } => "forest",
        Command::F2action { .. } => "f2action",
        Command::Demo { .. } => "demo",
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn tagged(name: &str, mut body: Value) -> Value {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), Value::String(schema(name)));
    if let Value::Object(m) = &mut body {
        out.append(m);
    }
    Value::Object(out)
}

/// Accepts `[[u, v], …]` or an object with a `"matching"` field of that
/// shape.
fn read_matching(path: &Path) -> Result<PartialMatching> {
    let v = read_json(path)?;
    let pairs = v.get("matching").cloned().unwrap_or(v);
    Ok(serde_json::from_value(pairs)?)
}

fn run(cmd: Command) -> Result<(i32, Value)> {
    let name = command_name(&cmd);
    let ok = |body: Value| Ok((0, tagged(name, body)));
    match cmd {
        Command::HallCheck { graph, epsilon, floor, cap } => {
            let g = io::from_json_str(&read(&graph)?)?;
            let report = match epsilon {
                None => check_hall(&g),
                Some(e) => check_hall_eps_n(&g, &ExpansionParams::new(e, floor)?, cap)?,
            };
            let code = if report.satisfied { 0 } else { 2 };
            Ok((code, tagged(name, json!({ "report": report }))))
        }
        Command::Layers { graph, epsilon, ratio } => {
            let g = io::from_json_str(&read(&graph)?)?;
            let schedule = geometric_schedule(epsilon, ratio)?;
            let l = greedy_layering(&g, &schedule);
            ok(json!({ "layers": l.layers, "f": l.f }))
        }
        Command::Match { graph, epsilon, ratio, audit, cap, audit_cap, seed, layers, dot } => {
            let g = io::from_json_str(&read(&graph)?)?;
            let schedule = geometric_schedule(epsilon.clone(), ratio)?;
            let layering = match layers {
                None => greedy_layering(&g, &schedule),
                Some(p) => {
                    let v = read_json(&p)?;
                    let layers: Vec<Vec<u64>> = serde_json::from_value(
                        v.get("layers").cloned().ok_or_else(|| Error::Parse("layers: missing field".into()))?,
                    )?;
                    let f = (0..layers.len()).map(|n| schedule.f(n)).collect();
                    Layering { layers, f }
                }
            };
            let cfg = MatchConfig {
                audit,
                cap,
                audit_cap: audit_cap.unwrap_or(cap),
                seed,
                ..MatchConfig::default()
            };
            let run = layered_perfect_matching_with(&g, &ExpansionParams::new(epsilon, 1)?, &schedule, &layering, &cfg)?;
            if dot {
                return Ok((0, Value::String(io::to_dot(&g, Some(&run.matching)))));
            }
            ok(serde_json::to_value(&run)?)
        }
        Command::Window { kind, radius, margin, square, copies, out } => {
            let s = GeneratingSet::standard();
            let w = expand_window(kind.into(), None, &s, radius, margin)?;
            let ds = if square { square_set(&s) } else { s.clone() };
            let g = build_doubling(&w, &ds, copies)?.to_bipartite();
            let mut body = json!({
                "kind": w.kind(),
                "radius": radius,
                "margin": margin,
                "generators": ds,
                "copies": copies,
                "vertex_id": "point * copies + copy",
                "points": w.points_json(),
            });
            match out {
                Some(path) => {
                    fs::write(&path, serde_json::to_string(&io::to_json_value(&g))?)?;
                    body["graph"] = json!(path.display().to_string());
                }
                None => body["graph"] = io::to_json_value(&g),
            }
            ok(body)
        }
        Command::Paradox { kind, radius, oracle } => {
            let (pd, w) = match oracle {
                Oracle::Matched => {
                    let (_, pd, w) = paradox::demo(kind.into(), radius)?;
                    (pd, w)
                }
                Oracle::Classical => {
                    let s = GeneratingSet::standard();
                    let w = expand_window(kind.into(), None, &s, radius, 2 * square_set(&s).max_len())?;
                    (paradox::classical_f2_decomposition(&w), w)
                }
            };
            let cert = paradox::verify_paradox(&pd, &w)?;
            let code = if cert.passed { 0 } else { 3 };
            Ok((
                code,
                tagged(
                    name,
                    json!({
                        "kind": w.kind(),
                        "radius": radius,
                        "margin": w.margin(),
                        "pieces": pd.to_json(&w),
                        "certificate": cert,
                    }),
                ),
            ))
        }
        Command::Verify { pieces, kind, radius, margin } => {
            let w = expand_window(kind.into(), None, &GeneratingSet::standard(), radius, margin)?;
            let v = read_json(&pieces)?;
            let v = v.get("pieces").cloned().unwrap_or(v);
            let pd = ParadoxicalDecomposition::from_json(&v, &w)?;
            let cert = paradox::verify_paradox(&pd, &w)?;
            let code = if cert.passed { 0 } else { 2 };
            Ok((code, tagged(name, json!({ "certificate": cert }))))
        }
        Command::Transfer { graph, gn_matching, n } => {
            let g = OrientedTwoRegular::from_graph(&io::from_json_str(&read(&graph)?)?)?;
            let m = read_matching(&gn_matching)?;
            let t = dynamics::transfer_matching(&g, &m, n)?;
            ok(serde_json::to_value(&t)?)
        }
        Command::Forest { kind, radius, out } => {
            let (report, forest) = dynamics::forest_demo(kind.into(), radius)?;
            if let Some(path) = &out {
                let tree = TreeWindow::from_forest(&forest)?;
                fs::write(path, serde_json::to_string(&tree)?)?;
            }
            let code = if report.passed { 0 } else { 3 };
            Ok((code, tagged(name, json!({ "report": report, "cycles": forest.cycles }))))
        }
        Command::F2action { from, stages, radius, seed } => {
            let tree = match from {
                Some(p) => {
                    let v = read_json(&p)?;
                    let adj: Vec<Vec<usize>> = serde_json::from_value(
                        v.get("adj").cloned().ok_or_else(|| Error::Parse("adj: missing field".into()))?,
                    )?;
                    TreeWindow::new(adj)?
                }
                None => dynamics::synthetic_tree(&mut ChaCha8Rng::seed_from_u64(seed), radius, 0.3, 8),
            };
            let a = dynamics::f2_action_from_forest(&tree, stages)?;
            let audit = dynamics::audit_action(&tree, &a, 6);
            let covered: BTreeSet<usize> = (0..tree.len()).filter(|&x| a.covered[x]).collect();
            let table = |s: usize| -> Vec<[usize; 2]> {
                covered.iter().filter_map(|&x| a.get(s, x).map(|y| [x, y])).collect()
            };
            let code = if audit.passed() { 0 } else { 3 };
            Ok((
                code,
                tagged(
                    name,
                    json!({
                        "points": tree.len(),
                        "covered": covered.len(),
                        "coverage": a.coverage,
                        "f1": table(2),
                        "f2": table(3),
                        "stages": a.stages,
                        "audit": audit,
                    }),
                ),
            ))
        }
        Command::Demo { kind, radius } => {
            let (report, _, _) = paradox::demo(kind.into(), radius)?;
            let code = if report.passed { 0 } else { 3 };
            Ok((code, tagged(name, serde_json::to_value(&report)?)))
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let out = dispatch(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
