//! Command-line surface: generate graphs, wire them into hosts, embed them
//! into model spaces, verify and measure the results, pull cuts back along
//! wirings, sweep families, and export scenes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input errors.

mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wirekit::bounds::{pullback_cut, profile_lower_bound, sep_sum_check};
use wirekit::construct::{diagonal_wiring_z2, kb_wiring, lamplighter_wiring, KB_DEFAULT_MAX_ATTEMPTS};
use wirekit::geometry::{
    complete_h2_slab_embedding, complete_slab_embedding, embedding_diameter, estimate_volume,
    horoproduct_embed, realize_grid_wiring, scale_embedding, slab_to_h2xr, slab_to_h3, svg,
    verify_thickness, CertStatus,
};
use wirekit::graphs::{random_regular, CutMode, Graph};
use wirekit::json as wjson;
use wirekit::wiring::verify_coarse_wiring;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "wirekit", version, about = "coarse wirings and thick embeddings of finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as JSON.
    Gen(GenArgs),
    /// Wire a graph into a host.
    Wire(WireArgs),
    /// Build an embedding scene.
    Embed(EmbedArgs),
    /// Re-verify an artifact; exits 1 on failure.
    Verify(VerifyArgs),
    /// Measure an artifact without judging it.
    Measure(MeasureArgs),
    /// Cut pullback and profile formulas.
    Bound(BoundArgs),
    /// Sweep a graph family through a construction and fit slopes.
    Sweep(sweep::SweepArgs),
    /// Export an embedding scene as SVG.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    RandomRegular,
    Complete,
    Path,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Degree for random regular graphs.
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WireKind {
    Lamplighter,
    Diagonal,
    Kb,
}

#[derive(Args)]
struct WireArgs {
    #[arg(value_enum)]
    kind: WireKind,
    /// Graph JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = KB_DEFAULT_MAX_ATTEMPTS)]
    max_attempts: usize,
    /// Wiring JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedKind {
    /// Complete graph in the unit slab (max metric).
    Slab,
    /// Slab pushed into hyperbolic 3-space.
    H3,
    /// Slab pushed into the line times the hyperbolic plane.
    H2xr,
    /// Complete graph in the hyperbolic plane times a unit interval.
    H2slab,
    /// Horospherical product push-forward of a Euclidean embedding.
    Horoproduct,
    /// Piecewise-linear realization of a grid wiring.
    Realize,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(value_enum)]
    kind: EmbedKind,
    /// Number of vertices for the complete-graph scenes.
    #[arg(long)]
    n: Option<usize>,
    /// Input JSON (embedding for horoproduct, wiring for realize).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Pre-scale a 1-thick input by sqrt(2) before the horospherical map.
    #[arg(long, default_value_t = true)]
    prescale: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiplicity bound for realize.
    #[arg(long)]
    k: Option<usize>,
    /// Degree bound for realize.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactKind {
    Wiring,
    Embedding,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    kind: ArtifactKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(value_enum)]
    kind: ArtifactKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    #[arg(long, default_value_t = 1.0)]
    net_spacing: f64,
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Pull a cut of the domain back through a wiring.
    Pullback {
        #[arg(long = "in")]
        input: PathBuf,
        /// Exact host-side cuts (errors above the solver cap).
        #[arg(long)]
        exact: bool,
    },
    /// Evaluate the closed-form profile lower bound.
    Profile {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: f64,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[command(subcommand)]
    command: BoundCommand,
}

#[derive(Args)]
struct ExportArgs {
    /// Embedding JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad JSON in {}: {e}", path.display()))
}

fn write_output(out: &Option<PathBuf>, value: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn stamped(command: &str, params: Value, payload: Value) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "command": command,
        "params": params,
        "result": payload,
    })
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(args) => {
            let g = match args.family {
                Family::RandomRegular => {
                    random_regular(args.n, args.d, args.seed).map_err(|e| e.to_string())?
                }
                Family::Complete => Graph::complete(args.n),
                Family::Path => Graph::path(args.n),
            };
            write_output(&args.out, &wjson::graph_to_value(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Wire(args) => {
            let g = wjson::graph_from_value(&read_json(&args.input)?).map_err(|e| e.to_string())?;
            let (wiring, extra) = match args.kind {
                WireKind::Lamplighter => (
                    lamplighter_wiring(&g).map_err(|e| e.to_string())?,
                    json!({}),
                ),
                WireKind::Diagonal => (
                    diagonal_wiring_z2(&g).map_err(|e| e.to_string())?,
                    json!({}),
                ),
                WireKind::Kb => {
                    let (w, params, stats) =
                        kb_wiring(&g, args.dim, args.seed, args.max_attempts)
                            .map_err(|e| e.to_string())?;
                    (
                        w,
                        json!({"kb_params": params, "kb_stats": stats}),
                    )
                }
            };
            let report = verify_coarse_wiring(&wiring).map_err(|e| e.to_string())?;
            if let Some(out) = &args.out {
                write_output(&Some(out.clone()), &wjson::wiring_to_value(&wiring))?;
            }
            let mut payload = json!({"report": report});
            if let Some(map) = payload.as_object_mut() {
                if let Some(extra_map) = extra.as_object() {
                    for (k, v) in extra_map {
                        map.insert(k.clone(), v.clone());
                    }
                }
            }
            let params = json!({"dim": args.dim, "seed": args.seed, "max_attempts": args.max_attempts});
            println!(
                "{}",
                serde_json::to_string_pretty(&stamped("wire", params, payload)).unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed(args) => {
            let need_n = || args.n.ok_or_else(|| "--n is required for this scene".to_string());
            let (embedding, extra) = match args.kind {
                EmbedKind::Slab => (
                    complete_slab_embedding(need_n()?).map_err(|e| e.to_string())?,
                    json!({}),
                ),
                EmbedKind::H3 => (
                    slab_to_h3(&complete_slab_embedding(need_n()?).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?,
                    json!({}),
                ),
                EmbedKind::H2xr => (
                    slab_to_h2xr(&complete_slab_embedding(need_n()?).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?,
                    json!({}),
                ),
                EmbedKind::H2slab => (
                    complete_h2_slab_embedding(need_n()?).map_err(|e| e.to_string())?,
                    json!({}),
                ),
                EmbedKind::Horoproduct => {
                    let input = args
                        .input
                        .as_ref()
                        .ok_or_else(|| "--in is required for horoproduct".to_string())?;
                    let e = wjson::embedding_from_value(&read_json(input)?)
                        .map_err(|e| e.to_string())?;
                    let e = if args.prescale {
                        scale_embedding(&e, 2f64.sqrt()).map_err(|e| e.to_string())?
                    } else {
                        e
                    };
                    (
                        horoproduct_embed(&e, args.q, args.r).map_err(|e| e.to_string())?,
                        json!({}),
                    )
                }
                EmbedKind::Realize => {
                    let input = args
                        .input
                        .as_ref()
                        .ok_or_else(|| "--in is required for realize".to_string())?;
                    let w = wjson::wiring_from_value(&read_json(input)?)
                        .map_err(|e| e.to_string())?;
                    let k = args.k.ok_or_else(|| "--k is required for realize".to_string())?;
                    let d = args.d.ok_or_else(|| "--d is required for realize".to_string())?;
                    let (e, report) =
                        realize_grid_wiring(&w, k, d, args.seed).map_err(|e| e.to_string())?;
                    (e, json!({"realization": report}))
                }
            };
            if let Some(out) = &args.out {
                write_output(&Some(out.clone()), &wjson::embedding_to_value(&embedding))?;
            }
            let params = json!({"n": args.n, "q": args.q, "r": args.r, "seed": args.seed});
            println!(
                "{}",
                serde_json::to_string_pretty(&stamped("embed", params, extra)).unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => match args.kind {
            ArtifactKind::Wiring => {
                let parsed = wjson::wiring_from_value(&read_json(&args.input)?);
                match parsed.and_then(|w| verify_coarse_wiring(&w)) {
                    Ok(report) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&stamped(
                                "verify wiring",
                                json!({}),
                                json!({"report": report, "ok": true})
                            ))
                            .unwrap()
                        );
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(e) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&stamped(
                                "verify wiring",
                                json!({}),
                                json!({"ok": false, "error": e.to_string()})
                            ))
                            .unwrap()
                        );
                        Ok(ExitCode::FAILURE)
                    }
                }
            }
            ArtifactKind::Embedding => {
                let e = wjson::embedding_from_value(&read_json(&args.input)?)
                    .map_err(|e| e.to_string())?;
                let cert = verify_thickness(&e, args.eps, args.tol).map_err(|e| e.to_string())?;
                let ok = cert.status == CertStatus::Pass;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&stamped(
                        "verify embedding",
                        json!({"eps": args.eps, "tol": args.tol}),
                        json!({"certificate": cert, "ok": ok})
                    ))
                    .unwrap()
                );
                Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
            }
        },
        Command::Measure(args) => match args.kind {
            ArtifactKind::Wiring => {
                let w = wjson::wiring_from_value(&read_json(&args.input)?)
                    .map_err(|e| e.to_string())?;
                let report = verify_coarse_wiring(&w).map_err(|e| e.to_string())?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&stamped(
                        "measure wiring",
                        json!({}),
                        json!({"report": report})
                    ))
                    .unwrap()
                );
                Ok(ExitCode::SUCCESS)
            }
            ArtifactKind::Embedding => {
                let e = wjson::embedding_from_value(&read_json(&args.input)?)
                    .map_err(|e| e.to_string())?;
                let (lo, hi) = embedding_diameter(&e, args.step).map_err(|e| e.to_string())?;
                let volume =
                    estimate_volume(&e, args.net_spacing, args.step).map_err(|e| e.to_string())?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&stamped(
                        "measure embedding",
                        json!({"step": args.step, "net_spacing": args.net_spacing}),
                        json!({"diameter_lower": lo, "diameter_upper": hi, "volume": volume})
                    ))
                    .unwrap()
                );
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Bound(args) => match args.command {
            BoundCommand::Pullback { input, exact } => {
                let w = wjson::wiring_from_value(&read_json(&input)?).map_err(|e| e.to_string())?;
                let mode = if exact { CutMode::Exact } else { CutMode::Heuristic };
                let trace = pullback_cut(&w, mode).map_err(|e| e.to_string())?;
                let sep = sep_sum_check(&w, &trace).ok();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&stamped(
                        "bound pullback",
                        json!({"exact": exact}),
                        json!({"trace": wjson::trace_to_value(&trace), "sep_sum": sep})
                    ))
                    .unwrap()
                );
                Ok(ExitCode::SUCCESS)
            }
            BoundCommand::Profile { r, s, p, q, n } => {
                let value = profile_lower_bound(r, s, p, q, n).map_err(|e| e.to_string())?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&stamped(
                        "bound profile",
                        json!({"r": r, "s": s, "p": p, "q": q, "n": n}),
                        json!({"value": value})
                    ))
                    .unwrap()
                );
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Sweep(args) => sweep::run(args),
        Command::Export(args) => {
            let e = wjson::embedding_from_value(&read_json(&args.input)?)
                .map_err(|e| e.to_string())?;
            let svg_text = svg::export_svg(&e).map_err(|e| e.to_string())?;
            std::fs::write(&args.out, svg_text)
                .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
