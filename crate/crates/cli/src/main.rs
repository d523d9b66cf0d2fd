use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pdgen::annotations::{check_program, parse_annotated, AnnotatedProgram, Severity};
use pdgen::bench;
use pdgen::bta::{bta, Norm};
use pdgen::engine::{solve, EngineConfig};
use pdgen::fixtures;
use pdgen::lix::{specialise_with, LixConfig};
use pdgen::logen::{build_genex, run_genex_with, GenEx};
use pdgen::term::{canonical, parse_program, parse_term, render_term, Program, Term};

/// Offline partial deduction: specialise annotated programs directly or
/// through generating extensions, and derive annotations automatically.
#[derive(Parser)]
#[command(name = "pdgen", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Opts {
    /// Use sound unification.
    #[arg(long, global = true)]
    occurs_check: bool,
    /// Step budget for specialisation and execution.
    #[arg(long, global = true, default_value_t = pdgen::engine::DEFAULT_BUDGET)]
    budget: u64,
    /// Norm for the binding-time analysis: listlength or termsize.
    #[arg(long, global = true, default_value = "listlength")]
    norm: Norm,
    /// Treat errors found by `check` as fatal.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the result here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an annotated program.
    Check { file: PathBuf },
    /// Specialise an annotated program for one or more goals.
    Lix {
        file: PathBuf,
        #[arg(required = true)]
        goals: Vec<String>,
    },
    /// Compile an annotated program into a generating extension.
    Cogen { file: PathBuf },
    /// Run a generating extension for one or more goals.
    Genex {
        file: PathBuf,
        #[arg(required = true)]
        goals: Vec<String>,
    },
    /// Annotate a plain program for a goal.
    Bta { file: PathBuf, goal: String },
    /// Run a goal against a program and print its answers.
    Run { file: PathBuf, goal: String },
    /// Time the bundled fixtures and print a CSV table.
    Bench {
        /// Repetitions per measurement; the median is reported.
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Only this fixture.
        #[arg(long)]
        fixture: Option<String>,
        /// List length for the vanilla speedup check.
        #[arg(long, default_value_t = 1000)]
        length: usize,
    },
}

impl Opts {
    fn engine(&self) -> EngineConfig {
        EngineConfig {
            budget: self.budget,
            occurs_check: self.occurs_check,
        }
    }

    fn lix(&self) -> LixConfig {
        LixConfig {
            budget: self.budget,
            occurs_check: self.occurs_check,
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn goal(text: &str) -> Result<Term> {
    Ok(parse_term(text)
        .with_context(|| format!("goal `{text}`"))?
        .term)
}

fn annotated(path: &Path) -> Result<AnnotatedProgram> {
    parse_annotated(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// A plain program, or the stripped form of an annotated one.
fn plain(path: &Path) -> Result<Program> {
    let text = read(path)?;
    if text.contains("ann_clause(") {
        return Ok(parse_annotated(&text)
            .with_context(|| format!("in {}", path.display()))?
            .strip());
    }
    parse_program(&text).with_context(|| format!("in {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let o = &cli.opts;
    match &cli.cmd {
        Command::Check { file } => {
            let p = annotated(file)?;
            let findings = check_program(&p);
            let mut report = String::new();
            for f in &findings {
                report.push_str(&format!("{f}\n"));
            }
            let errors = findings
                .iter()
                .filter(|f| f.severity == Severity::Error)
                .count();
            report.push_str(&format!(
                "{}: {} clauses, {} errors, {} warnings\n",
                file.display(),
                p.clauses.len(),
                errors,
                findings.len() - errors
            ));
            o.emit(&report)?;
            if o.strict && errors > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Lix { file, goals } => {
            let p = annotated(file)?;
            let goals = goals.iter().map(|g| goal(g)).collect::<Result<Vec<_>>>()?;
            let r = specialise_with(&p, &goals, o.lix())?;
            o.emit(&r.render())?;
        }
        Command::Cogen { file } => {
            let g = build_genex(&annotated(file)?)?;
            o.emit(&g.render())?;
        }
        Command::Genex { file, goals } => {
            let g = GenEx::parse(&read(file)?).with_context(|| format!("in {}", file.display()))?;
            let goals = goals.iter().map(|g| goal(g)).collect::<Result<Vec<_>>>()?;
            let r = run_genex_with(&g, &goals, o.engine())?;
            o.emit(&r.residual.render())?;
        }
        Command::Bta { file, goal: g } => {
            let p = plain(file)?;
            let r = bta(&p, &goal(g)?, o.norm)?;
            eprintln!(
                "% {} round(s), callset {}, memoised: {}",
                r.rounds,
                r.callset.render(),
                r.annotation
                    .replaced_atoms()
                    .iter()
                    .map(render_term)
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            o.emit(&r.annotated_program().render())?;
        }
        Command::Run { file, goal: g } => {
            let p = plain(file)?;
            let q = goal(g)?;
            let mut sols = solve(&p, &q, o.engine());
            let mut out = String::new();
            let mut n = 0;
            for a in sols.by_ref() {
                out.push_str(&render_term(&canonical(&a?.goal)));
                out.push('\n');
                n += 1;
            }
            for line in sols.log() {
                eprintln!("{line}");
            }
            out.push_str(&format!("% {n} answer(s), {} steps\n", sols.steps()));
            o.emit(&out)?;
        }
        Command::Bench {
            reps,
            fixture,
            length,
        } => {
            let chosen: Vec<&fixtures::Fixture> = match fixture {
                Some(name) => match fixtures::by_name(name) {
                    Some(f) => vec![f],
                    None => bail!("no fixture named `{name}`"),
                },
                None => fixtures::ALL.iter().collect(),
            };
            let rows = chosen
                .into_iter()
                .map(|f| bench::bench_fixture(f, *reps, o.engine()))
                .collect::<Result<Vec<_>, _>>()?;
            o.emit(&bench::to_csv(&rows))?;
            let (speedup, s0, s1) = bench::vanilla_speedup(*length, *reps)?;
            eprintln!(
                "% vanilla, lists of length {length}: residual {speedup:.2}x faster ({s0} vs {s1} steps); lix/genex time ratio {:.3}",
                bench::lix_genex_ratio(&rows)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
