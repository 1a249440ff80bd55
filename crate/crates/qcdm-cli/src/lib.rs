//! `qcdm` — command-line front end for the conditional-density-matrix
//! calculus.
//!
//! Subcommands map one-to-one onto library operations: `validate`, `expect`,
//! `dispersion`, `reduce`, `condition`, `decompose`, and `demo swap`. States
//! and operators travel as QSM files (see [`qsm`]).
//!
//! Exit codes: 0 on success, 1 on domain errors (invalid state,
//! zero-probability selection, mismatched operands), 2 on usage, I/O, and
//! parse errors. Results go to stdout, diagnostics to stderr, and all output
//! is deterministic: the same argv and files produce identical bytes.

pub mod qsm;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qcdm_core::composite::partial_trace;
use qcdm_core::conditional::{condition, decompose_reduced, ConditionalError};
use qcdm_core::scenarios::entanglement_swap;
use qcdm_core::state::{dispersion, expectation, StateError};
use qcdm_core::{
    DensityMatrix, Effect, EffectFamily, Observable, SubsystemSelector, DEFAULT_TOL,
};

use qsm::QsmDocument;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const USAGE: &str = "\
usage: qcdm <command> [args]

commands:
  validate <state.qsm> [--tol T]
  expect <state.qsm> <obs.qsm> [--tol T]
  dispersion <state.qsm> <obs.qsm> [--tol T]
  reduce <state.qsm> --keep i,j,... [--tol T]
  condition <state.qsm> --effect <op.qsm> --on i,j,... [--tol T]
  decompose <state.qsm> --family <f1.qsm,f2.qsm,...> --on i,j,... [--tol T]
  demo swap [--tol T]

--tol defaults to 1e-9.
";

enum CliError {
    /// Bad argv: exit 2, with the usage text.
    Usage(String),
    /// Unreadable or malformed input file: exit 2.
    Input(String),
    /// The calculus rejected the inputs: exit 1.
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ConditionalError> for CliError {
    fn from(e: ConditionalError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<qcdm_core::composite::CompositeError> for CliError {
    fn from(e: qcdm_core::composite::CompositeError) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Execute one invocation; `args` excludes the program name.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(args) {
        Ok(output) => {
            stdout.write_all(output.as_bytes()).expect("write to stdout");
            EXIT_OK
        }
        Err(e) => {
            writeln!(stderr, "qcdm: {}", e.message()).expect("write to stderr");
            if matches!(e, CliError::Usage(_)) {
                stderr.write_all(USAGE.as_bytes()).expect("write to stderr");
            }
            e.exit_code()
        }
    }
}

fn dispatch(args: &[String]) -> Result<String, CliError> {
    let (command, rest) = args
        .split_first()
        .ok_or_else(|| CliError::Usage("missing command".into()))?;
    match command.as_str() {
        "validate" => cmd_validate(rest),
        "expect" => cmd_expect(rest),
        "dispersion" => cmd_dispersion(rest),
        "reduce" => cmd_reduce(rest),
        "condition" => cmd_condition(rest),
        "decompose" => cmd_decompose(rest),
        "demo" => cmd_demo(rest),
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    }
}

/// Positional arguments and recognized flags for one subcommand.
struct ParsedArgs {
    positionals: Vec<String>,
    tol: f64,
    keep: Option<String>,
    on: Option<String>,
    effect: Option<String>,
    family: Option<String>,
}

fn parse_args(args: &[String], flags: &[&str]) -> Result<ParsedArgs, CliError> {
    let mut parsed = ParsedArgs {
        positionals: Vec::new(),
        tol: DEFAULT_TOL,
        keep: None,
        on: None,
        effect: None,
        family: None,
    };
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if !flags.contains(&name) {
                return Err(CliError::Usage(format!("unknown flag '--{name}'")));
            }
            let value = iter
                .next()
                .ok_or_else(|| CliError::Usage(format!("flag '--{name}' expects a value")))?;
            match name {
                "tol" => {
                    parsed.tol = value.parse().map_err(|_| {
                        CliError::Usage(format!("bad tolerance '{value}'"))
                    })?;
                    if !(parsed.tol.is_finite() && parsed.tol >= 0.0) {
                        return Err(CliError::Usage(format!("bad tolerance '{value}'")));
                    }
                }
                "keep" => parsed.keep = Some(value.clone()),
                "on" => parsed.on = Some(value.clone()),
                "effect" => parsed.effect = Some(value.clone()),
                "family" => parsed.family = Some(value.clone()),
                _ => unreachable!("flag list is checked above"),
            }
        } else {
            parsed.positionals.push(arg.clone());
        }
    }
    Ok(parsed)
}

fn expect_positionals(parsed: &ParsedArgs, names: &[&str]) -> Result<(), CliError> {
    if parsed.positionals.len() != names.len() {
        return Err(CliError::Usage(format!(
            "expected {} positional argument(s): {}",
            names.len(),
            names.join(", ")
        )));
    }
    Ok(())
}

fn read_document(path: &str) -> Result<QsmDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read '{path}': {e}")))?;
    qsm::parse(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn load_state(path: &str, tol: f64) -> Result<DensityMatrix, CliError> {
    let doc = read_document(path)?;
    Ok(DensityMatrix::validate(doc.matrix, doc.dims, tol)?)
}

fn file_stem(path: &str) -> String {
    Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string())
}

fn parse_selector(text: &str, flag: &str) -> Result<SubsystemSelector, CliError> {
    let mut indices = Vec::new();
    for part in text.split(',') {
        let index: usize = part.trim().parse().map_err(|_| {
            CliError::Usage(format!("bad factor index '{part}' in '--{flag} {text}'"))
        })?;
        indices.push(index);
    }
    SubsystemSelector::new(indices).map_err(|e| CliError::Usage(e.to_string()))
}

fn state_document(state: &DensityMatrix) -> QsmDocument {
    QsmDocument {
        dims: state.dims().to_vec(),
        matrix: state.mat().clone(),
    }
}

fn format_probability(p: f64) -> String {
    qsm::format_significant(p, 12)
}

fn cmd_validate(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["tol"])?;
    expect_positionals(&parsed, &["state.qsm"])?;
    load_state(&parsed.positionals[0], parsed.tol)?;
    Ok("valid\n".into())
}

fn load_observable(path: &str, state: &DensityMatrix, tol: f64) -> Result<Observable, CliError> {
    let doc = read_document(path)?;
    if doc.matrix.dim() != state.dim() {
        return Err(StateError::DimensionMismatch {
            left: doc.matrix.dim(),
            right: state.dim(),
        }
        .into());
    }
    Ok(Observable::new(doc.matrix, tol)?)
}

fn cmd_expect(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["tol"])?;
    expect_positionals(&parsed, &["state.qsm", "obs.qsm"])?;
    let state = load_state(&parsed.positionals[0], parsed.tol)?;
    let obs = load_observable(&parsed.positionals[1], &state, parsed.tol)?;
    let value = expectation(&obs, &state, parsed.tol)?;
    Ok(format!("expectation = {}\n", qsm::format_significant(value, 17)))
}

fn cmd_dispersion(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["tol"])?;
    expect_positionals(&parsed, &["state.qsm", "obs.qsm"])?;
    let state = load_state(&parsed.positionals[0], parsed.tol)?;
    let obs = load_observable(&parsed.positionals[1], &state, parsed.tol)?;
    let value = dispersion(&obs, &state, parsed.tol)?;
    Ok(format!("dispersion = {}\n", qsm::format_significant(value, 17)))
}

fn cmd_reduce(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["keep", "tol"])?;
    expect_positionals(&parsed, &["state.qsm"])?;
    let keep_text = parsed
        .keep
        .as_deref()
        .ok_or_else(|| CliError::Usage("reduce requires --keep i,j,...".into()))?;
    let state = load_state(&parsed.positionals[0], parsed.tol)?;
    let keep = parse_selector(keep_text, "keep")?;
    let reduced = partial_trace(&state, &keep)?;
    Ok(qsm::emit(&state_document(&reduced)))
}

fn cmd_condition(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["effect", "on", "tol"])?;
    expect_positionals(&parsed, &["state.qsm"])?;
    let effect_path = parsed
        .effect
        .as_deref()
        .ok_or_else(|| CliError::Usage("condition requires --effect <op.qsm>".into()))?;
    let on_text = parsed
        .on
        .as_deref()
        .ok_or_else(|| CliError::Usage("condition requires --on i,j,...".into()))?;
    let state = load_state(&parsed.positionals[0], parsed.tol)?;
    let effect_doc = read_document(effect_path)?;
    let effect = Effect::new(effect_doc.matrix, file_stem(effect_path), parsed.tol)?;
    let on = parse_selector(on_text, "on")?;
    let outcome = condition(&state, &effect, &on, parsed.tol)?;
    let mut out = format!("p = {}\n", format_probability(outcome.probability));
    out.push_str(&qsm::emit(&state_document(&outcome.state)));
    Ok(out)
}

fn cmd_decompose(args: &[String]) -> Result<String, CliError> {
    let parsed = parse_args(args, &["family", "on", "tol"])?;
    expect_positionals(&parsed, &["state.qsm"])?;
    let family_text = parsed
        .family
        .as_deref()
        .ok_or_else(|| CliError::Usage("decompose requires --family <f1.qsm,f2.qsm,...>".into()))?;
    let on_text = parsed
        .on
        .as_deref()
        .ok_or_else(|| CliError::Usage("decompose requires --on i,j,...".into()))?;
    let state = load_state(&parsed.positionals[0], parsed.tol)?;
    let mut effects = Vec::new();
    for path in family_text.split(',') {
        let doc = read_document(path)?;
        effects.push(Effect::new(doc.matrix, file_stem(path), parsed.tol)?);
    }
    let family = EffectFamily::new(effects, parsed.tol)?;
    let on = parse_selector(on_text, "on")?;
    let branches = decompose_reduced(&state, &family, &on, parsed.tol)?;

    let mut out = String::new();
    for (i, branch) in branches.iter().enumerate() {
        writeln!(
            out,
            "branch {i}: {}: p = {}",
            branch.label,
            format_probability(branch.probability)
        )
        .expect("string write");
        match &branch.state {
            Some(state) => out.push_str(&qsm::emit(&state_document(state))),
            None => out.push_str("no conditional state (probability below threshold)\n"),
        }
    }
    Ok(out)
}

fn cmd_demo(args: &[String]) -> Result<String, CliError> {
    let (which, rest) = args
        .split_first()
        .ok_or_else(|| CliError::Usage("demo requires a scenario name (try 'swap')".into()))?;
    if which != "swap" {
        return Err(CliError::Usage(format!("unknown demo '{which}' (try 'swap')")));
    }
    let parsed = parse_args(rest, &["tol"])?;
    expect_positionals(&parsed, &[])?;
    let report = entanglement_swap(parsed.tol)?;

    let mut out = String::new();
    out.push_str("entanglement swap: |psi-> x |psi-> on factors 0-3\n");
    out.push_str("reduced state of outer pair {0,3}:\n");
    out.push_str(&qsm::emit(&state_document(&report.reduced_14)));
    writeln!(
        out,
        "selection of inner pair {{1,2}} by psi_minus: p = {}",
        format_probability(report.selection_probability)
    )
    .expect("string write");
    out.push_str("conditional state of outer pair {0,3}:\n");
    out.push_str(&qsm::emit(&state_document(&report.conditional_14)));
    writeln!(
        out,
        "fidelity with singlet = {}",
        format_probability(report.fidelity_with_singlet)
    )
    .expect("string write");
    Ok(out)
}
