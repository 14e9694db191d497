use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use monadlab::equational::{self, free_classes, parse, rewrite, FreeClasses, Term};
use monadlab::monadicity::{diagnose_empty_state, verify_monadicity, VerifyOptions};
use monadlab::{enumerate_algebras, FinSet, Method, Morphism, StateMonadCtx, DEFAULT_CEILING};

#[derive(Parser, Debug)]
#[command(
    name = "monadlab",
    version,
    about = "Algebras of the state monad on finite sets"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Work ceiling for searches, rewriting and exhaustive checks.
    #[arg(
        long,
        global = true,
        env = "MONADLAB_CEILING",
        default_value_t = DEFAULT_CEILING,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    ceiling: u64,

    /// Worker threads for parallel search (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every algebra structure on a carrier.
    Algebras {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "x")]
        x: usize,
        #[arg(long, default_value_t = Method::Constrained)]
        method: Method,
        /// Also write one structure map per line, as JSON, to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the comparison functor on every carrier up to a size.
    Verify {
        #[arg(long = "s")]
        s: usize,
        #[arg(long = "max-x")]
        max_x: usize,
        /// Chosen element of S for the section checks (default: every element).
        #[arg(long)]
        s0: Option<usize>,
        #[arg(long, default_value_t = Method::Constrained)]
        method: Method,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Show what goes wrong when the state set is empty.
    Diagnose {
        #[arg(long = "max-x", default_value_t = 3)]
        max_x: usize,
    },
    /// Decide whether two terms denote the same computation.
    Equal {
        #[arg(long = "s")]
        s: usize,
        /// Number of variables in scope (default: enough for both terms).
        #[arg(long)]
        vars: Option<usize>,
        left: String,
        right: String,
    },
    /// Normalize a term with the oriented equations.
    Rewrite {
        #[arg(long = "s")]
        s: usize,
        term: String,
    },
    /// Count terms up to equality.
    Free {
        #[arg(long = "s")]
        s: usize,
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("output serializes") + "\n",
        Format::Text => text(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn nonempty(s: usize) -> anyhow::Result<FinSet> {
    if s == 0 {
        bail!(monadlab::Error::EmptyState);
    }
    Ok(FinSet::new(s))
}

fn parse_term(text: &str, s: usize) -> anyhow::Result<Term> {
    parse(text, s).with_context(|| format!("in `{text}`"))
}

#[derive(Serialize)]
struct AlgebrasOut<'a> {
    s_size: usize,
    x_size: usize,
    method: Method,
    count: usize,
    algebras: Vec<&'a Morphism>,
}

#[derive(Serialize)]
struct EqualOut {
    left: String,
    right: String,
    vars: usize,
    equal: bool,
    left_denotation: Vec<(usize, usize)>,
    right_denotation: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct RewriteOut {
    input: String,
    normal_form: String,
    steps: u64,
}

#[derive(Serialize)]
struct FreeOut {
    s_size: usize,
    vars: usize,
    depth: usize,
    classes: usize,
    predicted: usize,
    counts_by_depth: Vec<usize>,
    representatives: Vec<String>,
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let ceiling = cli.ceiling;
    match &cli.command {
        Command::Algebras { s, x, method, out } => {
            let ctx = StateMonadCtx::new(nonempty(*s)?);
            let algs = enumerate_algebras(&ctx, FinSet::new(*x), *method, ceiling)?;
            if let Some(path) = out {
                let mut w = BufWriter::new(
                    File::create(path).with_context(|| format!("creating {}", path.display()))?,
                );
                for a in &algs {
                    serde_json::to_writer(&mut w, a.structure())?;
                    writeln!(w)?;
                }
                w.flush()?;
            }
            let report = AlgebrasOut {
                s_size: *s,
                x_size: *x,
                method: *method,
                count: algs.len(),
                algebras: algs.iter().map(|a| a.structure()).collect(),
            };
            emit(cli.format, &report, || {
                let noun = if algs.len() == 1 {
                    "algebra"
                } else {
                    "algebras"
                };
                let mut text = format!("{} {noun}\n", algs.len());
                for a in &algs {
                    text.push_str(&format!("{:?}\n", a.structure().table()));
                }
                text
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            s,
            max_x,
            s0,
            method,
            seed,
        } => {
            if *s == 0 {
                bail!(
                    "{}; run `monadlab diagnose` to see what fails without it",
                    monadlab::Error::EmptyState
                );
            }
            let options = VerifyOptions {
                method: *method,
                ceiling,
                s0: *s0,
                seed: *seed,
            };
            let report = verify_monadicity(*s, *max_x, options)?;
            emit(cli.format, &report, || report.to_text());
            Ok(verdict(report.passed))
        }
        Command::Diagnose { max_x } => {
            let d = diagnose_empty_state(*max_x, ceiling)?;
            emit(cli.format, &d, || d.to_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Equal {
            s,
            vars,
            left,
            right,
        } => {
            let states = nonempty(*s)?;
            let a = parse_term(left, *s)?;
            let b = parse_term(right, *s)?;
            let vars = vars.unwrap_or(a.var_bound().max(b.var_bound()));
            let ctx = StateMonadCtx::new(states);
            let equal = equational::equal(&ctx, &a, &b, vars)?;
            let out = EqualOut {
                left: a.to_string(),
                right: b.to_string(),
                vars,
                equal,
                left_denotation: equational::denote_fn(*s, &a, vars)?,
                right_denotation: equational::denote_fn(*s, &b, vars)?,
            };
            emit(cli.format, &out, || {
                if equal {
                    "equal\n".to_string()
                } else {
                    format!(
                        "not equal\n{}: {:?}\n{}: {:?}\n",
                        out.left, out.left_denotation, out.right, out.right_denotation
                    )
                }
            });
            Ok(verdict(equal))
        }
        Command::Rewrite { s, term } => {
            nonempty(*s)?;
            let t = parse_term(term, *s)?;
            let r = rewrite(&t, *s, ceiling)?;
            let out = RewriteOut {
                input: t.to_string(),
                normal_form: r.term.to_string(),
                steps: r.steps,
            };
            emit(cli.format, &out, || format!("{}\n", out.normal_form));
            Ok(ExitCode::SUCCESS)
        }
        Command::Free { s, vars, depth } => {
            let ctx = StateMonadCtx::new(nonempty(*s)?);
            let fc: FreeClasses = free_classes(&ctx, *vars, *depth, ceiling)?;
            let out = FreeOut {
                s_size: *s,
                vars: *vars,
                depth: *depth,
                classes: fc.count(),
                predicted: FreeClasses::predicted(&ctx, *vars)?,
                counts_by_depth: fc.counts.clone(),
                representatives: fc
                    .representatives
                    .iter()
                    .map(|(_, t)| t.to_string())
                    .collect(),
            };
            emit(cli.format, &out, || {
                let mut text = format!("{} classes\n", out.classes);
                text.push_str(&format!(
                    "|T V| = {}, counts by depth {:?}\n",
                    out.predicted, out.counts_by_depth
                ));
                for r in &out.representatives {
                    text.push_str(&format!("{r}\n"));
                }
                text
            });
            Ok(ExitCode::SUCCESS)
        }
    }
}
