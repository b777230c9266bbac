//! Command-line surface: document format, subcommands, reports and exit
//! codes. The binary in `src/bin/lqca.rs` only parses arguments and calls
//! [`run`].

pub mod document;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::affine::decide_closed;
use crate::automaton::{Automaton, Configuration, Interval};
use crate::border::border_vectors;
use crate::error::{LqcaError, Result};
use crate::evolution::{Evolution, Superposition, DEFAULT_ORACLE_LIMIT};
use crate::numerics::{Amplitude, Tolerance};
use crate::par::Execution;
use crate::transfer::{build_transfer_operators, word_row_norm};

pub use document::AutomatonDocument;
pub use report::{
    AutomatonSummary, BorderReport, ClosureReport, GramSummary, Labeled, RowNormReport,
    StepReport, StepTerm, Timing, Verdict, VerdictReport, ASSUMED_WELL_FORMED,
};

/// Largest number of source configurations `rownorm` enumerates for its
/// brute-force bound.
const ROWNORM_BUDGET: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "lqca", version, about = "Unitarity checker for linear quantum cellular automata")]
pub struct Cli {
    /// Relative membership tolerance; the zero and star thresholds scale with it.
    #[arg(long, global = true, env = "LQCA_TOLERANCE")]
    pub tolerance: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Widest window the brute-force oracle may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide unitarity.
    Check {
        path: PathBuf,
        /// Attach oracle evidence over the window [0, W-1].
        #[arg(long)]
        window: Option<usize>,
        /// Include per-stage wall-clock times.
        #[arg(long)]
        timings: bool,
    },
    /// Print the border vectors.
    Borders { path: PathBuf },
    /// Brute-force column Gram check over the window [0, W-1].
    Oracle {
        path: PathBuf,
        #[arg(long)]
        window: usize,
    },
    /// Squared norm of the row of a configuration given by its word.
    Rownorm {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Evolve a pure configuration.
    Step {
        path: PathBuf,
        /// Comma separated `index:state` pairs; empty means all quiescent.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        config: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub tolerance: Tolerance,
    pub oracle_limit: usize,
    pub execution: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tolerance: Tolerance::default(),
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            execution: Execution::default(),
        }
    }
}

/// What a command prints and how the process exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn load(path: &Path) -> Result<Automaton> {
    let (doc, source) = AutomatonDocument::read(path)?;
    doc.to_automaton(Some(&source), &path.display().to_string())
}

fn load_valid(path: &Path, tol: &Tolerance) -> Result<Automaton> {
    let a = load(path)?;
    let report = a.validate(tol);
    if report.is_valid() {
        Ok(a)
    } else {
        Err(LqcaError::Invalid(report))
    }
}

/// Simple, offset-normalized form the border and transfer stages run on.
fn simple_form(a: &Automaton) -> Automaton {
    a.expand_to_simple()
        .normalize_neighborhood()
        .expect("expanded neighborhoods are intervals")
}

fn summary(a: &Automaton) -> AutomatonSummary {
    AutomatonSummary {
        states: a.num_states(),
        r: a.r(),
        neighborhood: a.neighborhood().offsets().to_vec(),
        simple: a.neighborhood().is_simple(),
        expansion_factor: a.expansion_factor(),
    }
}

/// Labeled border vectors of a simple automaton with `r ≥ 2`.
pub fn border_report(simple: &Automaton, opts: &Options) -> Result<BorderReport> {
    let bv = border_vectors(simple, &opts.tolerance, opts.execution)?;
    let (t, len) = (simple.num_states(), simple.r() - 1);
    let alphabet = simple.alphabet();
    let label = |w: usize| alphabet.format_word(&crate::automaton::word_digits(w, len, t));
    let labeled = |v: &[crate::numerics::ExtNonnegReal]| {
        Labeled(v.iter().enumerate().map(|(w, x)| (label(w), *x)).collect())
    };
    let infinite = bv
        .infinite_components()
        .into_iter()
        .map(|(side, w)| {
            let name = match side {
                crate::border::Side::Left => "l",
                crate::border::Side::Right => "r",
            };
            format!("{name}[{}]", label(w))
        })
        .collect();
    Ok(BorderReport {
        l: labeled(&bv.l),
        r: labeled(&bv.r),
        inner: bv.inner(),
        infinite,
    })
}

pub fn gram_summary(a: &Automaton, width: usize, opts: &Options) -> Result<GramSummary> {
    let window = Interval::new(0, width as i64 - 1);
    let report = Evolution::new(a)
        .with_tolerance(opts.tolerance)
        .with_limit(opts.oracle_limit)
        .with_execution(opts.execution)
        .truncated_column_gram(window)?;
    let threshold = opts.tolerance.membership_rel;
    let alphabet = a.alphabet();
    Ok(GramSummary {
        window: [window.lo, window.hi],
        columns: report.columns,
        max_norm_deviation: report.max_norm_deviation,
        max_offdiag: report.max_offdiag,
        worst_pair: report
            .worst_pair
            .as_ref()
            .map(|(c, d)| [c.render(alphabet), d.render(alphabet)]),
        threshold,
        passed: report.passes(threshold),
    })
}

/// Largest `|⟨V e_x | V e_x′⟩ − [x = x′]|` of the local map of an `r = 1`
/// automaton.
fn local_isometry_deviation(a: &Automaton) -> f64 {
    let t = a.num_states();
    let mut worst: f64 = 0.0;
    for x in 0..t {
        for x2 in x..t {
            let ip: Amplitude = a
                .row(x)
                .iter()
                .zip(a.row(x2))
                .map(|(u, v)| u.conj() * v)
                .sum();
            let expected = if x == x2 { 1.0 } else { 0.0 };
            worst = worst.max((ip - expected).norm());
        }
    }
    worst
}

struct Clock {
    start: Instant,
    stages: Vec<Timing>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            stages: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.stages.push(Timing {
            stage,
            millis: (now - self.start).as_secs_f64() * 1e3,
        });
        self.start = now;
    }
}

/// The decision pipeline on an already parsed automaton.
pub fn check_automaton(a: &Automaton, opts: &Options, window: Option<usize>) -> VerdictReport {
    check_timed(a, opts, window, &mut Clock::new())
}

fn check_timed(a: &Automaton, opts: &Options, window: Option<usize>, clock: &mut Clock) -> VerdictReport {
    let tol = &opts.tolerance;
    let base = |verdict, reason: &str| {
        let mut report = VerdictReport::new(verdict, reason);
        report.automaton = Some(summary(a));
        report
    };

    let validation = a.validate(tol);
    clock.lap("validate");
    if !validation.is_valid() {
        let mut report = base(Verdict::InvalidInput, "the rule table failed validation");
        report.violations = validation.violations;
        return report;
    }

    let mut gram = None;
    if let Some(width) = window {
        match gram_summary(a, width, opts) {
            Ok(g) => gram = Some(g),
            Err(e) => return base(Verdict::InvalidInput, &e.to_string()),
        }
        clock.lap("oracle");
    }
    let attach = |mut report: VerdictReport| {
        if let Some(g) = &gram {
            report.well_formedness = format!(
                "well-formedness: oracle evidence over [{},{}] {}",
                g.window[0],
                g.window[1],
                if g.passed { "PASS" } else { "FAIL" }
            );
            report.gram = Some(g.clone());
        }
        report
    };
    if gram.as_ref().is_some_and(|g| !g.passed) {
        return attach(base(
            Verdict::NotWellFormed,
            "columns of the evolution operator are not orthonormal on the oracle window",
        ));
    }

    if a.num_states() == 1 {
        return attach(base(
            Verdict::Unitary,
            "single-state alphabet; the evolution operator is the identity on one configuration",
        ));
    }

    let simple = simple_form(a);
    clock.lap("expand");

    if simple.r() == 1 {
        let deviation = local_isometry_deviation(&simple);
        let (verdict, reason) = if deviation <= tol.membership_rel {
            (Verdict::Unitary, "single-cell neighborhood with a unitary local matrix")
        } else {
            (Verdict::NotWellFormed, "single-cell neighborhood whose local matrix is not unitary")
        };
        let mut report = base(verdict, reason);
        report.local_isometry_deviation = Some(deviation);
        return attach(report);
    }

    let borders = match border_report(&simple, opts) {
        Ok(b) => b,
        Err(e) => return base(Verdict::InvalidInput, &e.to_string()),
    };
    clock.lap("borders");
    let Some(inner) = borders.inner else {
        let mut report = base(Verdict::NotWellFormed, "a border vector component is infinite");
        report.border_vectors = Some(borders);
        return attach(report);
    };
    let l: Vec<f64> = borders.l.values().iter().map(|x| x.to_f64()).collect();
    let r: Vec<f64> = borders.r.values().iter().map(|x| x.to_f64()).collect();
    let scale = crate::transfer::inner(&l, &l).sqrt() * crate::transfer::inner(&r, &r).sqrt();
    if !tol.is_unit(inner, scale) {
        let mut report = base(Verdict::NotWellFormed, "<l|r> differs from 1");
        report.border_vectors = Some(borders);
        return attach(report);
    }

    let ops = build_transfer_operators(&simple).expect("simple automaton with r >= 2");
    let closure = decide_closed(&l, &r, &ops, tol).expect("dimensions agree by construction");
    clock.lap("closure");
    let mut report = if closure.closed {
        base(Verdict::Unitary, "every row of the evolution operator has unit norm")
    } else {
        let mut report = base(Verdict::NotUnitary, "a row of the evolution operator has norm below 1");
        report.witness_word = closure
            .witness_word
            .as_ref()
            .map(|w| simple.alphabet().format_word(w));
        report.witness_value = closure.witness_value;
        report
    };
    report.border_vectors = Some(borders);
    report.closure = Some(ClosureReport {
        closed: closure.closed,
        final_dimension: closure.final_dimension,
        iterations: closure.iterations,
    });
    attach(report)
}

/// `check` on a document path; parse and I/O failures become
/// `INVALID_INPUT` reports.
pub fn check_path(path: &Path, opts: &Options, window: Option<usize>, timings: bool) -> VerdictReport {
    let mut clock = Clock::new();
    let mut report = match load(path) {
        Ok(a) => {
            clock.lap("parse");
            check_timed(&a, opts, window, &mut clock)
        }
        Err(LqcaError::Invalid(validation)) => {
            let mut report = VerdictReport::new(Verdict::InvalidInput, "the document failed validation");
            report.violations = validation.violations;
            report
        }
        Err(e) => VerdictReport::new(Verdict::InvalidInput, e.to_string()),
    };
    if timings {
        report.timings = Some(clock.stages);
    }
    report
}

pub fn borders(path: &Path, opts: &Options) -> Result<BorderReport> {
    let a = load_valid(path, &opts.tolerance)?;
    border_report(&simple_form(&a), opts)
}

pub fn oracle(path: &Path, width: usize, opts: &Options) -> Result<GramSummary> {
    let a = load_valid(path, &opts.tolerance)?;
    gram_summary(&a, width, opts)
}

/// `⟨M_b l | r⟩` plus, when the enumeration fits, the brute-force lower
/// bound over a window centred on the predecessors of `b`.
pub fn rownorm(path: &Path, word: &str, opts: &Options) -> Result<RowNormReport> {
    let a = load_valid(path, &opts.tolerance)?;
    let b = a.alphabet().parse_word(word)?;
    let simple = simple_form(&a);
    if simple.r() < 2 {
        return Err(LqcaError::NeighborhoodTooSmall(simple.r()));
    }
    let borders = border_vectors(&simple, &opts.tolerance, opts.execution)?;
    let (l, r) = borders.finite().ok_or(LqcaError::InfiniteBorder)?;
    let ops = build_transfer_operators(&simple)?;
    let value = word_row_norm(&ops, &l, &r, &b)?;

    let t = a.num_states();
    let mut width = opts.oracle_limit;
    while width > 0 && t.checked_pow(width as u32).is_none_or(|c| c > ROWNORM_BUDGET) {
        width -= 1;
    }
    let n = a.neighborhood();
    let needed = Interval::new(n.first(), b.len() as i64 - 1 + n.last());
    let (mut lower_bound, mut window) = (None, None);
    if needed.len() <= width {
        let lo = needed.lo - ((width - needed.len()) / 2) as i64;
        let w = Interval::new(lo, lo + width as i64 - 1);
        let d = Configuration::from_word(0, &b);
        let bound = Evolution::new(&a)
            .with_tolerance(opts.tolerance)
            .with_limit(opts.oracle_limit)
            .with_execution(Execution::Sequential)
            .truncated_row_norm(&d, w)?;
        lower_bound = Some(bound);
        window = Some([w.lo, w.hi]);
    }
    Ok(RowNormReport {
        word: a.alphabet().format_word(&b),
        value,
        lower_bound,
        window,
    })
}

/// Parses `index:state,...`; the empty string is the quiescent configuration.
pub fn parse_configuration(a: &Automaton, spec: &str) -> Result<Configuration> {
    let mut cells = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (index, state) = part
            .split_once(':')
            .ok_or_else(|| LqcaError::ConfigurationSyntax(spec.to_string()))?;
        let index: i64 = index
            .trim()
            .parse()
            .map_err(|_| LqcaError::ConfigurationSyntax(spec.to_string()))?;
        cells.push((index, a.alphabet().index_of(state.trim())?));
    }
    Ok(Configuration::from_cells(cells))
}

pub fn step(path: &Path, config: &str, steps: usize, opts: &Options) -> Result<StepReport> {
    let a = load_valid(path, &opts.tolerance)?;
    let start = parse_configuration(&a, config)?;
    let evolution = Evolution::new(&a)
        .with_tolerance(opts.tolerance)
        .with_limit(usize::MAX)
        .with_execution(opts.execution);
    let mut u = Superposition::pure(start);
    for _ in 0..steps {
        u = evolution.step(&u)?;
    }
    let terms = u
        .by_magnitude()
        .into_iter()
        .map(|(c, amp)| StepTerm {
            configuration: c.render(a.alphabet()),
            re: amp.re,
            im: amp.im,
            magnitude: amp.norm(),
        })
        .collect();
    Ok(StepReport {
        steps,
        terms,
        norm: u.norm(),
    })
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
            s.push('\n');
            s
        }
        Format::Text => text(value),
    }
}

fn error_code(e: &LqcaError) -> i32 {
    match e {
        LqcaError::InfiniteBorder => Verdict::NotWellFormed.exit_code(),
        _ => Verdict::InvalidInput.exit_code(),
    }
}

fn failure(format: Format, e: &LqcaError) -> Outcome {
    let stderr = match format {
        Format::Json => format!("{}\n", serde_json::json!({ "error": e.to_string() })),
        Format::Text => format!("error: {e}\n"),
    };
    Outcome {
        stdout: String::new(),
        stderr,
        code: error_code(e),
    }
}

fn success<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String, code: i32) -> Outcome {
    Outcome {
        stdout: render(format, value, text),
        stderr: String::new(),
        code,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let tolerance = match cli.tolerance.map(Tolerance::from_membership).transpose() {
        Ok(t) => t.unwrap_or_default(),
        Err(e) => return failure(cli.format, &e),
    };
    let opts = Options {
        tolerance,
        oracle_limit: cli.oracle_limit,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    let format = cli.format;
    match &cli.command {
        Command::Check { path, window, timings } => {
            let report = check_path(path, &opts, *window, *timings);
            let code = report.exit_code();
            success(format, &report, VerdictReport::to_text, code)
        }
        Command::Borders { path } => match borders(path, &opts) {
            Ok(b) => success(format, &b, BorderReport::to_text, 0),
            Err(e) => failure(format, &e),
        },
        Command::Oracle { path, window } => match oracle(path, *window, &opts) {
            Ok(g) => {
                let code = if g.passed { 0 } else { Verdict::NotWellFormed.exit_code() };
                success(format, &g, GramSummary::to_text, code)
            }
            Err(e) => failure(format, &e),
        },
        Command::Rownorm { path, word } => match rownorm(path, word, &opts) {
            Ok(r) => success(format, &r, RowNormReport::to_text, 0),
            Err(e) => failure(format, &e),
        },
        Command::Step { path, config, steps } => match step(path, config, *steps, &opts) {
            Ok(s) => success(format, &s, StepReport::to_text, 0),
            Err(e) => failure(format, &e),
        },
    }
}
