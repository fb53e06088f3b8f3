//! `orc`: checks ORM populations against ORC rules and constraints.

mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orc_core::constraint::{check_at, Constraint};
use orc_core::descriptor::{parse_rules_file, Frontend};
use orc_core::io::{parse_constraints, parse_model, parse_population, LoadError};
use orc_core::path::{Bindings, TableEvaluator};
use orc_core::rule::RuleEngine;
use orc_core::validate::validate;
use orc_core::{FrequencyDomain, Model, PopulationSequence, World};

use report::{CheckReport, EvalReport, ValidateReport, Verdict};

#[derive(Parser)]
#[command(name = "orc", version, about = "Evaluate ORC rules and ORM constraints over populations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the population, then evaluate every rule and constraint.
    Check {
        #[command(flatten)]
        input: Input,
        /// Rules file: one rule per line.
        #[arg(short, long)]
        rules: Option<PathBuf>,
        /// Constraints file: a JSON list of constraint records.
        #[arg(short, long)]
        constraints: Option<PathBuf>,
    },
    /// Print the frequency table of a descriptor at one time point.
    Eval {
        #[command(flatten)]
        input: Input,
        /// The descriptor, e.g. "Person working for Department".
        expr: String,
    },
    /// Check the population axioms only.
    Validate {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args)]
struct Input {
    #[arg(short, long)]
    model: PathBuf,
    #[arg(short, long)]
    population: PathBuf,
    /// bool, nat, int, dist-bool, dist-nat or dist-int.
    #[arg(long, default_value = "nat", value_parser = parse_domain)]
    domain: FrequencyDomain,
    /// Evaluate at this snapshot time only.
    #[arg(long)]
    at: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_domain(s: &str) -> Result<FrequencyDomain, String> {
    s.parse().map_err(|_| {
        let known: Vec<String> = FrequencyDomain::ALL.iter().map(ToString::to_string).collect();
        format!("unknown domain `{s}` (expected one of {})", known.join(", "))
    })
}

/// An input problem: exit status 2.
#[derive(Debug)]
struct Diagnostic {
    file: Option<String>,
    line: Option<usize>,
    message: String,
}

impl Diagnostic {
    fn new(file: Option<&Path>, line: Option<usize>, message: impl fmt::Display) -> Self {
        Diagnostic {
            file: file.map(|f| f.display().to_string()),
            line,
            message: message.to_string(),
        }
    }

    fn load(file: &Path, e: LoadError) -> Self {
        let message = match &e {
            LoadError::Json { message, .. } => message.clone(),
            other => other.to_string(),
        };
        Diagnostic::new(Some(file), e.line(), message)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"error": {"file": self.file, "line": self.line, "message": self.message}})
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), Some(line)) => write!(f, "{file}:{line}: {}", self.message),
            (Some(file), None) => write!(f, "{file}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

fn read(path: &Path) -> Result<String, Diagnostic> {
    std::fs::read_to_string(path).map_err(|e| Diagnostic::new(Some(path), None, e))
}

struct Loaded {
    model: Model,
    seq: PopulationSequence,
}

fn load(input: &Input) -> Result<Loaded, Diagnostic> {
    let model = parse_model(&read(&input.model)?).map_err(|e| Diagnostic::load(&input.model, e))?;
    let seq = parse_population(&read(&input.population)?, &model).map_err(|e| Diagnostic::load(&input.population, e))?;
    Ok(Loaded { model, seq })
}

/// Snapshot indices selected by `--at`.
fn times(input: &Input, world: &World<'_>) -> Result<Option<Vec<usize>>, Diagnostic> {
    match input.at {
        None => Ok(None),
        Some(t) => world
            .index_of(t)
            .map(|i| Some(vec![i]))
            .map_err(|e| Diagnostic::new(Some(&input.population), None, e)),
    }
}

fn horizon_warning(what: &str, seq: &PopulationSequence) -> String {
    let last = seq.times().last().unwrap_or_default();
    format!("{what}: a next-time step ran past the last snapshot (t={last}) and was read as zero")
}

enum Output {
    Check(CheckReport),
    Eval(EvalReport),
    Validate(ValidateReport),
}

impl Output {
    fn passed(&self) -> bool {
        match self {
            Output::Check(r) => r.passed,
            Output::Eval(_) => true,
            Output::Validate(r) => r.passed,
        }
    }

    fn render(&self, format: Format) -> String {
        let json = |v: serde_json::Result<String>| v.expect("reports serialize") + "\n";
        match (self, format) {
            (Output::Check(r), Format::Text) => r.to_text(),
            (Output::Eval(r), Format::Text) => r.to_text(),
            (Output::Validate(r), Format::Text) => r.to_text(),
            (Output::Check(r), Format::Json) => json(serde_json::to_string_pretty(r)),
            (Output::Eval(r), Format::Json) => json(serde_json::to_string_pretty(r)),
            (Output::Validate(r), Format::Json) => json(serde_json::to_string_pretty(r)),
        }
    }
}

fn cmd_check(input: &Input, rules: Option<&Path>, constraints: Option<&Path>) -> Result<Output, Diagnostic> {
    let Loaded { model, seq } = load(input)?;
    let world = World::new(&model, &seq);
    let selected = times(input, &world)?;
    let rules_file = rules
        .map(|path| {
            parse_rules_file(&read(path)?, model.names())
                .map_err(|e| Diagnostic::new(Some(path), (e.line > 0).then_some(e.line), e.error))
        })
        .transpose()?;
    let cs: Vec<Constraint> = match constraints {
        Some(path) => parse_constraints(&read(path)?).map_err(|e| Diagnostic::load(path, e))?,
        None => Vec::new(),
    };

    let mut report = CheckReport::new(input.domain.to_string(), &validate(&model, &seq));
    let engine = RuleEngine::new(&world, input.domain);
    for entry in rules_file.iter().flat_map(|f| &f.rules) {
        let out = engine
            .evaluate(&entry.rule, selected.as_deref())
            .map_err(|e| Diagnostic::new(rules, Some(entry.line), e))?;
        if out.horizon {
            report.warnings.push(horizon_warning(&format!("rule `{}`", entry.name), &seq));
        }
        report.rules.push(Verdict::from_rule(&entry.name, entry.line, &entry.text, &out));
    }
    let checked = check_at(&model, &seq, &cs, input.domain, selected.as_deref()).map_err(|errors| {
        let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
        Diagnostic::new(constraints, None, lines.join("; "))
    })?;
    for (index, r) in checked.results.iter().enumerate() {
        if r.horizon {
            report.warnings.push(horizon_warning(&format!("constraint {index}"), &seq));
        }
        report.constraints.push(Verdict::from_constraint(index, r));
    }
    Ok(Output::Check(report.finish()))
}

fn cmd_eval(input: &Input, expr: &str) -> Result<Output, Diagnostic> {
    let Loaded { model, seq } = load(input)?;
    let world = World::new(&model, &seq);
    let index = times(input, &world)?.map_or(0, |t| t[0]);
    let frontend = Frontend::new(model.names()).map_err(|e| Diagnostic::new(Some(&input.model), None, e))?;
    let path = frontend.descriptor(expr).map_err(|e| Diagnostic::new(None, None, e))?;
    if let Some(v) = path.free_vars().into_iter().next() {
        return Err(Diagnostic::new(None, None, format!("descriptor uses unbound variable `{v}`")));
    }
    let fail = |e: orc_core::path::PathError| Diagnostic::new(None, None, e);
    let mut evaluator =
        TableEvaluator::new(&world, input.domain, &path.universe_spec(), index, path.has_temporal()).map_err(fail)?;
    let table = evaluator.table(&path, &Bindings::new()).map_err(fail)?;
    let mut warnings = Vec::new();
    if evaluator.horizon_hit() {
        warnings.push(horizon_warning("descriptor", &seq));
    }
    Ok(Output::Eval(EvalReport::new(
        input.domain.to_string(),
        world.time(index),
        path.to_string(),
        table.iter().collect(),
        warnings,
    )))
}

fn cmd_validate(input: &Input) -> Result<Output, Diagnostic> {
    let Loaded { model, seq } = load(input)?;
    Ok(Output::Validate(ValidateReport::new(&validate(&model, &seq))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (input, result) = match &cli.command {
        Command::Check {
            input,
            rules,
            constraints,
        } => (input, cmd_check(input, rules.as_deref(), constraints.as_deref())),
        Command::Eval { input, expr } => (input, cmd_eval(input, expr)),
        Command::Validate { input } => (input, cmd_validate(input)),
    };
    match result {
        Ok(out) => {
            print!("{}", out.render(input.format));
            if out.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(d) => {
            match input.format {
                Format::Text => eprintln!("error: {d}"),
                Format::Json => eprintln!("{}", d.to_json()),
            }
            ExitCode::from(2)
        }
    }
}
