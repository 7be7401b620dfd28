//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use fockpart_core::classify::{classify_with, ClassifyConfig};
use fockpart_core::gallery::{gallery_state, parameter_names, standard_entries, ParamValue, Params};

use crate::eval::{evaluate, EvalConfig};
use crate::parser::parse;
use crate::report::{report_doc, to_json, to_table, ReportDoc};

#[derive(Debug, Parser)]
#[command(name = "fockpart", version, about = "Classify field and particle entanglement of Fock-space states")]
struct Args {
    #[command(subcommand)]
    command: Option<Command>,

    /// Classify a gallery state, or `all` for the standard list.
    #[arg(long, value_name = "NAME|all", global = true)]
    gallery: Option<String>,

    /// Gallery parameter, e.g. `lambda=0.5` (repeatable).
    #[arg(long = "param", value_name = "K=V", global = true)]
    params: Vec<String>,

    /// Particle-number cap; for gallery entries, their `nmax` parameter.
    #[arg(long, global = true)]
    nmax: Option<usize>,

    /// Relative rank tolerance.
    #[arg(long, default_value_t = 1e-8, global = true)]
    tol: f64,

    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Exit with status 1 if any verdict is indeterminate.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a state program (`.fp`) and classify each directive.
    Run { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&args) {
        Ok((text, indeterminate)) => {
            let written = match &args.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return 2;
            }
            if args.strict && indeterminate {
                let _ = writeln!(stderr, "indeterminate verdicts present (--strict)");
                return 1;
            }
            0
        }
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

enum Output {
    One(Box<ReportDoc>),
    Many(Vec<ReportDoc>),
}

fn execute(args: &Args) -> Result<(String, bool), String> {
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(format!("--tol must lie in (0, 1), got {}", args.tol));
    }
    let (output, indeterminate) = match (&args.command, &args.gallery) {
        (Some(_), Some(_)) => return Err("give either `run <file>` or `--gallery`, not both".into()),
        (None, None) => return Err("nothing to do: give `run <file>` or `--gallery <name|all>`".into()),
        (Some(Command::Run { file }), None) => {
            if !args.params.is_empty() {
                return Err("--param applies to --gallery only".into());
            }
            let text = std::fs::read_to_string(file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            let program = parse(&text).map_err(|e| format!("{}:{e}", file.display()))?;
            let cfg = EvalConfig { nmax: args.nmax.unwrap_or(8), tol: args.tol, seed: args.seed, ..EvalConfig::default() };
            let results = evaluate(&program, &cfg).map_err(|e| format!("{}: {e}", file.display()))?;
            let indeterminate = results.iter().any(|c| c.report.any_indeterminate());
            let docs = results.iter().map(|c| report_doc(&c.built.name, &c.report, c.built.gallery.as_ref())).collect();
            (Output::Many(docs), indeterminate)
        }
        (None, Some(name)) if name == "all" => {
            if !args.params.is_empty() {
                return Err("--param cannot be combined with --gallery all".into());
            }
            let entries = standard_entries();
            let docs = std::thread::scope(|scope| {
                let handles: Vec<_> = entries
                    .into_iter()
                    .map(|(name, params)| scope.spawn(move || classify_entry(name, params, args)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("classification thread")).collect::<Result<Vec<_>, _>>()
            })?;
            let indeterminate = docs.iter().any(|(_, i)| *i);
            (Output::Many(docs.into_iter().map(|(d, _)| d).collect()), indeterminate)
        }
        (None, Some(name)) => {
            let mut params = Params::new();
            for p in &args.params {
                let (k, v) = p.split_once('=').ok_or_else(|| format!("--param expects K=V, got `{p}`"))?;
                params.insert(k.trim().to_string(), ParamValue::parse(v));
            }
            let (doc, indeterminate) = classify_entry(name, params, args)?;
            (Output::One(Box::new(doc)), indeterminate)
        }
    };
    let text = match (args.format, output) {
        (Format::Json, Output::One(d)) => to_json(&*d),
        (Format::Json, Output::Many(ds)) => to_json(&ds),
        (Format::Table, Output::One(d)) => to_table(&[*d]),
        (Format::Table, Output::Many(ds)) => to_table(&ds),
    };
    Ok((text, indeterminate))
}

fn classify_entry(name: &str, mut params: Params, args: &Args) -> Result<(ReportDoc, bool), String> {
    let accepted = parameter_names(name).map_err(|e| e.to_string())?;
    if let Some(nmax) = args.nmax {
        if accepted.contains(&"nmax") {
            params.entry("nmax".into()).or_insert(ParamValue::Int(nmax as i64));
        }
    }
    let (state, spec) = gallery_state(name, &params).map_err(|e| e.to_string())?;
    let cfg = ClassifyConfig::default().with_tol(args.tol).with_seed(args.seed);
    let report = classify_with(&state, &cfg).map_err(|e| format!("{}: {e}", spec.label()))?;
    Ok((report_doc(&spec.label(), &report, Some(&spec)), report.any_indeterminate()))
}
