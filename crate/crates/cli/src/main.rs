use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use trapmark_core::ashcroft::{auto_window, strengthen_and_check, AshcroftError, WindowOutcome, AUTO_WINDOW};
use trapmark_core::caps::{Caps, CapsError};
use trapmark_core::diag::Diagnostic;
use trapmark_core::frontend::{format_formula, parse_model_in};
use trapmark_core::model::{validate_system, PropertySpec, SystemModel, WindowSpec};
use trapmark_core::petri::{enumerate_min_imts, instantiate_net, PetriError};
use trapmark_core::trapinv::{
    bad_automaton, build_invariant, check_safety, oracle, InvariantBundle, TrapInvError, Verdict, VerificationReport,
};
use trapmark_core::wss_compile::positive_formula_of;

#[derive(Parser, Debug)]
#[command(name = "trapmark", version, about = "Trap and Ashcroft invariants for parametric component-based systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check safety properties for every system size
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Compare the automaton invariant with the trap invariant of the size-n net
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Build the trap invariant automata
    Invariant {
        file: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Instantiate the size-n Petri net
    Net {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(clap::Args, Debug)]
struct CheckOpts {
    /// Property name, or `deadlock`; defaults to every declared property
    #[arg(long)]
    property: Option<String>,
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    /// Comma-separated window names, `auto` or `none`; defaults to the
    /// declared windows, used only when traps alone are inconclusive
    #[arg(long)]
    windows: Option<String>,
}

#[derive(clap::Args, Debug)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write Graphviz files for the automata or nets into DIR
    #[arg(long, value_name = "DIR")]
    export_dot: Option<PathBuf>,
    /// Print views, reach formulas and Ashcroft invariants of the windows
    #[arg(long)]
    explain: bool,
    /// Print the positive formula of the saturated invariant automaton
    #[arg(long)]
    emit_positive: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{} parse error(s)", .0.len())]
    Parse(Vec<Diagnostic>),
    #[error("{} validation error(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("TRAPMARK_CAPS: {0}")]
    Caps(#[from] CapsError),
    #[error("no property `{0}` in the model")]
    UnknownProperty(String),
    #[error("no window `{0}` in the model")]
    UnknownWindow(String),
    #[error("the adjacent-triple heuristic found no valid window")]
    NoAutoWindow,
    #[error("{0}")]
    TrapInv(#[from] TrapInvError),
    #[error("{0}")]
    Ashcroft(#[from] AshcroftError),
    #[error("{0}")]
    Petri(#[from] PetriError),
    #[error("{0}")]
    Compile(#[from] trapmark_core::wss_compile::CompileError),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let CliError::Parse(ds) | CliError::Invalid(ds) = &e {
                for d in ds {
                    eprintln!("{d}");
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let caps = Caps::from_env()?;
    match cli.command {
        Command::Check { file, opts, out } => check(&load(&file)?, &opts, &out, &caps),
        Command::Oracle { file, size, out } => run_oracle(&load(&file)?, size, &out, &caps),
        Command::Invariant { file, out } => invariant(&load(&file)?, &out, &caps),
        Command::Net { file, size, out } => net(&load(&file)?, size, &out, &caps),
    }
}

fn load(path: &Path) -> Result<SystemModel, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let model = parse_model_in(&text, path).map_err(CliError::Parse)?;
    let (errors, warnings): (Vec<_>, Vec<_>) = validate_system(&model).into_iter().partition(|d| d.is_error());
    for w in &warnings {
        eprintln!("{w}");
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    Ok(model)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
}

fn properties(model: &SystemModel, selector: Option<&str>) -> Result<Vec<PropertySpec>, CliError> {
    match selector {
        Some(name) => match model.property(name) {
            Some(p) => Ok(vec![p.clone()]),
            None if name == "deadlock" => Ok(vec![PropertySpec::deadlock()]),
            None => Err(CliError::UnknownProperty(name.to_string())),
        },
        None if model.properties.is_empty() => Ok(vec![PropertySpec::deadlock()]),
        None => Ok(model.properties.clone()),
    }
}

enum WindowChoice {
    Declared,
    None,
    Given(Vec<WindowSpec>),
}

fn windows(model: &SystemModel, selector: Option<&str>, caps: &Caps) -> Result<WindowChoice, CliError> {
    let Some(sel) = selector else {
        return Ok(WindowChoice::Declared);
    };
    match sel.trim() {
        "none" => Ok(WindowChoice::None),
        AUTO_WINDOW => match auto_window(model, caps)? {
            Some(w) => Ok(WindowChoice::Given(vec![w])),
            None => Err(CliError::NoAutoWindow),
        },
        list => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| model.window(name).cloned().ok_or_else(|| CliError::UnknownWindow(name.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(WindowChoice::Given),
    }
}

fn check(model: &SystemModel, opts: &CheckOpts, out: &OutputOpts, caps: &Caps) -> Result<u8, CliError> {
    let props = properties(model, opts.property.as_deref())?;
    let choice = windows(model, opts.windows.as_deref(), caps)?;
    let bundle = build_invariant(model, caps)?;
    emit_bundle(&bundle, out)?;

    let mut code = 0;
    for prop in &props {
        let (report, outcomes) = check_one(model, &bundle, prop, &choice, opts.min_size, caps)?;
        if let Some(dir) = &out.export_dot {
            let bad = bad_automaton(model, prop, opts.min_size, caps)?;
            write_file(dir, &format!("bad_{}.dot", prop.name), &bad.to_dot(&format!("bad_{}", prop.name)))?;
            for o in &outcomes {
                let name = format!("view_{}", o.view.window);
                write_file(dir, &format!("{name}.dot"), &o.reach.net.to_dot(&name))?;
            }
        }
        match out.format {
            Format::Text => println!("{report}"),
            Format::Json => println!("{}", serde_json::to_string(&report).expect("report serializes")),
        }
        if out.explain {
            explain(&outcomes, out.format);
        }
        if report.verdict == Verdict::Inconclusive {
            code = 2;
        }
    }
    Ok(code)
}

fn check_one(
    model: &SystemModel,
    bundle: &InvariantBundle,
    prop: &PropertySpec,
    choice: &WindowChoice,
    min_size: usize,
    caps: &Caps,
) -> Result<(VerificationReport, Vec<WindowOutcome>), CliError> {
    match choice {
        WindowChoice::None => Ok((check_safety(model, bundle, prop, min_size, caps)?, vec![])),
        WindowChoice::Given(ws) => Ok(strengthen_and_check(model, bundle, prop, ws, min_size, caps)?),
        WindowChoice::Declared => {
            let report = check_safety(model, bundle, prop, min_size, caps)?;
            if report.verdict == Verdict::Safe || model.windows.is_empty() {
                return Ok((report, vec![]));
            }
            Ok(strengthen_and_check(model, bundle, prop, &model.windows, min_size, caps)?)
        }
    }
}

fn explain(outcomes: &[WindowOutcome], format: Format) {
    for o in outcomes {
        let reach: Vec<String> = o.reach.disjuncts().iter().map(|d| d.join(" & ")).collect();
        match format {
            Format::Text => {
                println!("  window {}:", o.view.window);
                println!("    view: {}", o.view);
                println!("    reach: ({})", reach.join(") | ("));
                println!("    invariant: {}", format_formula(&o.invariant));
            }
            Format::Json => {
                let v = json!({
                    "window": o.view.window,
                    "view": o.view.to_string(),
                    "reach": reach,
                    "invariant": format_formula(&o.invariant),
                });
                println!("{v}");
            }
        }
    }
}

fn emit_bundle(bundle: &InvariantBundle, out: &OutputOpts) -> Result<(), CliError> {
    if let Some(dir) = &out.export_dot {
        write_file(dir, "a_phi.dot", &bundle.a_phi.to_dot("a_phi"))?;
        write_file(dir, "a_sat.dot", &bundle.a_sat.to_dot("a_sat"))?;
        write_file(dir, "a_tilde.dot", &bundle.a_tilde.to_dot("a_tilde"))?;
    }
    if out.emit_positive {
        let pos = format_formula(&positive_formula_of(&bundle.a_sat)?);
        match out.format {
            Format::Text => println!("positive: {pos}"),
            Format::Json => println!("{}", json!({ "positive": pos })),
        }
    }
    Ok(())
}

fn run_oracle(model: &SystemModel, n: usize, out: &OutputOpts, caps: &Caps) -> Result<u8, CliError> {
    let bundle = build_invariant(model, caps)?;
    let o = oracle(model, &bundle, n, caps)?;
    match out.format {
        Format::Text => {
            let verdict = if o.matches() { "match" } else { "MISMATCH" };
            println!("n = {}: {verdict} ({} automaton valuations, {} net valuations)", o.n, o.automaton, o.net);
            for (side, places) in &o.differences {
                println!("  only {side}: {}", places.join(" "));
            }
        }
        Format::Json => {
            let diffs: Vec<_> = o.differences.iter().map(|(side, m)| json!({ "side": side, "marking": m })).collect();
            let v = json!({
                "n": o.n,
                "matches": o.matches(),
                "automaton": o.automaton,
                "net": o.net,
                "differences": diffs,
            });
            println!("{v}");
        }
    }
    Ok(if o.matches() { 0 } else { 1 })
}

fn invariant(model: &SystemModel, out: &OutputOpts, caps: &Caps) -> Result<u8, CliError> {
    let bundle = build_invariant(model, caps)?;
    emit_bundle(&bundle, out)?;
    let size = |a: &trapmark_core::automata::TrackNfa| (a.num_states(), a.num_transitions());
    match out.format {
        Format::Text => {
            println!("tracks: {}", bundle.registry.names().join(" "));
            println!("phi: {}", format_formula(&bundle.phi));
            for (name, a) in [("a_phi", &bundle.a_phi), ("a_sat", &bundle.a_sat), ("a_tilde", &bundle.a_tilde)] {
                let (s, t) = size(a);
                println!("{name}: {s} states, {t} transitions");
            }
            println!("largest intermediate automaton: {} states", bundle.trace.max_states());
        }
        Format::Json => {
            let stats = |a| {
                let (s, t) = size(a);
                json!({ "states": s, "transitions": t })
            };
            let v = json!({
                "tracks": bundle.registry.names(),
                "phi": format_formula(&bundle.phi),
                "aPhi": stats(&bundle.a_phi),
                "aSat": stats(&bundle.a_sat),
                "aTilde": stats(&bundle.a_tilde),
                "maxIntermediateStates": bundle.trace.max_states(),
            });
            println!("{v}");
        }
    }
    Ok(0)
}

fn net(model: &SystemModel, n: usize, out: &OutputOpts, caps: &Caps) -> Result<u8, CliError> {
    let net = instantiate_net(model, n, caps)?;
    if let Some(dir) = &out.export_dot {
        let name = format!("net_{n}");
        write_file(dir, &format!("{name}.dot"), &net.to_dot(&name))?;
    }
    let traps: Vec<Vec<String>> = enumerate_min_imts(&net, caps.trap_places)?
        .iter()
        .map(|t| t.iter().map(|&p| net.place_name(p)).collect())
        .collect();
    let places: Vec<String> = (0..net.places.len()).map(|p| net.place_name(p)).collect();
    match out.format {
        Format::Text => {
            println!("places ({}): {}", places.len(), places.join(" "));
            println!("initial: {}", net.marking_names(&net.initial).join(" "));
            println!("transitions ({}):", net.transitions.len());
            for t in &net.transitions {
                let pre: Vec<String> = t.pre.iter().map(|&p| net.place_name(p)).collect();
                let post: Vec<String> = t.post.iter().map(|&p| net.place_name(p)).collect();
                println!("  {}: {} -> {}", t.label, pre.join(" "), post.join(" "));
            }
            println!("minimal initially marked traps ({}):", traps.len());
            for t in &traps {
                println!("  {{{}}}", t.join(", "));
            }
        }
        Format::Json => {
            let ts: Vec<_> = net
                .transitions
                .iter()
                .map(|t| {
                    let names = |ps: &[usize]| ps.iter().map(|&p| net.place_name(p)).collect::<Vec<_>>();
                    json!({ "label": t.label, "pre": names(&t.pre), "post": names(&t.post) })
                })
                .collect();
            let v = json!({
                "size": n,
                "places": places,
                "initial": net.marking_names(&net.initial),
                "transitions": ts,
                "minImts": traps,
            });
            println!("{v}");
        }
    }
    Ok(0)
}
