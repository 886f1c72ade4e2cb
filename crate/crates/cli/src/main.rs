use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use lambda_census::bounds::{asymptotic_constants, improved_bounds, BoundsContext, BoundsReport};
use lambda_census::oracle::{counts_to_json, oracle_counts};
use lambda_census::real::DEFAULT_DIGITS;
use lambda_census::reference::Comparison;
use lambda_census::report::{self, annotate_bounds, check_table1, singularity_checks, to_csv};
use lambda_census::series::{Family, SeriesEngine};
use lambda_census::singularity::singularity_report;
use lambda_census::{Error, Execution, SizeModel};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CHECK: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Counts of De Bruijn lambda terms and the asymptotic constants bounding them.
#[derive(Parser, Debug)]
#[command(name = "lambda-census", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// natural, lessnatural, binary or custom:a,b,c,d
    #[arg(long, global = true, default_value = "natural")]
    model: SizeModel,
    /// Working precision in decimal digits; every printed real carries this many.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    /// Output format. Defaults to csv for table1 and figure, json otherwise.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// An index bound: a number or `inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Level {
    Finite(usize),
    Inf,
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Level::Inf);
        }
        s.parse()
            .map(Level::Finite)
            .map_err(|_| format!("expected a non-negative integer or `inf`, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    /// all terms
    Linf,
    /// m-open terms
    L,
    /// terms that are not m-open
    K,
    /// m-open terms with indices at most h
    Lh,
    /// lower series for K with cut level h
    Kh,
    /// upper series for K with cut levels h and H
    Khh,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact coefficients of a generating function up to size N.
    Count {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value = "0")]
        m: Level,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long = "H")]
        big_h: Option<usize>,
        #[arg(long = "N")]
        n: usize,
    },
    /// Counts from exhaustive enumeration of terms.
    Oracle {
        #[arg(long, default_value = "0")]
        m: Level,
        #[arg(long = "N")]
        n: usize,
    },
    /// The dominant singularity and the expansion of the unbounded family at it.
    Rho,
    /// Upper and lower constants from the index-bounded families.
    Bounds {
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        h: usize,
        #[arg(long = "H")]
        big_h: usize,
    },
    /// Constants after lifting the bounds from level M down to level m.
    Improve {
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long = "M")]
        big_m: usize,
        #[arg(long)]
        h: usize,
        #[arg(long = "H")]
        big_h: usize,
    },
    /// Expansion constants of K_0^(h) and K_0^(h,h) for h = 1..15.
    Table1 {
        /// Compare with the published values; exit with status 2 on a mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Plot data: 1 for normalised counts against their bounds, 2 for the
    /// improved constants as M grows.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 15)]
        h: usize,
        #[arg(long = "H", default_value_t = 15)]
        big_h: usize,
        #[arg(long = "N", default_value_t = 150)]
        n: usize,
    },
}

/// Output of a command plus whether a reference check failed.
struct Outcome {
    text: String,
    check_failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome {
            text,
            check_failed: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.global, &outcome.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_VALIDATION);
            }
            if outcome.check_failed {
                ExitCode::from(EXIT_CHECK)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let numeric = e
                .downcast_ref::<Error>()
                .is_some_and(|e| !e.is_validation());
            ExitCode::from(if numeric {
                EXIT_NUMERIC
            } else {
                EXIT_VALIDATION
            })
        }
    }
}

fn emit(global: &Global, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &global.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execution(global: &Global) -> Execution {
    if global.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn context(global: &Global) -> Result<BoundsContext> {
    Ok(BoundsContext::new(global.model, global.digits)?)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    if !(5..=2000).contains(&g.digits) {
        bail!(Error::InvalidParameter(format!(
            "--digits must be in 5..=2000, got {}",
            g.digits
        )));
    }
    match &cli.command {
        Command::Count {
            family,
            m,
            h,
            big_h,
            n,
        } => cmd_count(g, *family, *m, *h, *big_h, *n),
        Command::Oracle { m, n } => cmd_oracle(g, *m, *n),
        Command::Rho => cmd_rho(g),
        Command::Bounds { m, h, big_h } => {
            let ctx = context(g)?;
            let report = asymptotic_constants(&ctx, *m, *h, *big_h)?;
            bounds_output(g, &ctx, report)
        }
        Command::Improve { m, big_m, h, big_h } => {
            let ctx = context(g)?;
            let report = improved_bounds(&ctx, *m, *big_m, *h, *big_h)?;
            bounds_output(g, &ctx, report)
        }
        Command::Table1 { check } => cmd_table1(g, *check),
        Command::Figure {
            which,
            m,
            h,
            big_h,
            n,
        } => cmd_figure(g, *which, *m, *h, *big_h, *n),
    }
}

fn need(value: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    match value {
        Some(v) => Ok(v),
        None => bail!(Error::InvalidParameter(format!(
            "family {family} needs {flag}"
        ))),
    }
}

fn cmd_count(
    g: &Global,
    family: Option<FamilyArg>,
    m: Level,
    h: Option<usize>,
    big_h: Option<usize>,
    n: usize,
) -> Result<Outcome> {
    let family = match (family, m) {
        (None, Level::Inf) | (Some(FamilyArg::Linf), _) => Family::Linf,
        (Some(FamilyArg::L) | None, Level::Finite(m)) => Family::L { m },
        (Some(FamilyArg::K), Level::Finite(m)) => Family::K { m },
        (Some(FamilyArg::Lh), Level::Finite(m)) => Family::Lh {
            m,
            h: need(h, "--h", "lh")?,
        },
        (Some(FamilyArg::Kh), Level::Finite(m)) => Family::Kh {
            m,
            h: need(h, "--h", "kh")?,
        },
        (Some(FamilyArg::Khh), Level::Finite(m)) => Family::KhH {
            m,
            h: need(h, "--h", "khh")?,
            big_h: need(big_h, "--H", "khh")?,
        },
        (Some(FamilyArg::L), Level::Inf) => Family::Linf,
        (Some(_), Level::Inf) => bail!(Error::InvalidParameter(
            "--m inf only applies to families linf and l".into()
        )),
    };
    if let Family::Lh { h, .. } | Family::Kh { h, .. } | Family::KhH { h, .. } = family {
        if h == 0 {
            bail!(Error::InvalidParameter("--h must be at least 1".into()));
        }
    }
    if let Family::KhH { h, big_h, .. } = family {
        if big_h < h {
            bail!(Error::InvalidParameter(format!(
                "need h <= H, got h = {h}, H = {big_h}"
            )));
        }
    }
    let series = SeriesEngine::with_execution(g.model, n, execution(g)).family(family);
    Ok(Outcome::ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => series.to_json(),
        Format::Csv => series.to_csv(),
    }))
}

fn cmd_oracle(g: &Global, m: Level, n: usize) -> Result<Outcome> {
    let bound = match m {
        Level::Finite(m) => Some(m),
        Level::Inf => None,
    };
    let counts = oracle_counts(&g.model, bound, n)?;
    Ok(Outcome::ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => counts_to_json(&counts),
        Format::Csv => {
            let mut w = String::from("n,count\n");
            for (n, c) in counts.iter().enumerate() {
                w.push_str(&format!("{n},{c}\n"));
            }
            w
        }
    }))
}

fn checks_json(checks: &[Comparison]) -> serde_json::Value {
    serde_json::to_value(checks).expect("comparisons serialise")
}

fn cmd_rho(g: &Global) -> Result<Outcome> {
    let report = singularity_report(&g.model, g.digits)?;
    let checks = singularity_checks(&report);
    Ok(Outcome::ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            v["reference_checks"] = checks_json(&checks);
            serde_json::to_string_pretty(&v)?
        }
        Format::Csv => to_csv(std::slice::from_ref(&report))?,
    }))
}

#[derive(Serialize)]
struct BoundsRow<'a> {
    model: &'a str,
    m: usize,
    h: usize,
    #[serde(rename = "H")]
    big_h: usize,
    #[serde(rename = "M")]
    big_m: Option<usize>,
    rho: &'a lambda_census::Real,
    c_lower: &'a lambda_census::Real,
    c_upper: &'a lambda_census::Real,
    lower_trivial: bool,
    agreement_digits: u32,
}

fn bounds_output(g: &Global, ctx: &BoundsContext, mut report: BoundsReport) -> Result<Outcome> {
    let checks = annotate_bounds(ctx, &mut report);
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            v["reference_checks"] = checks_json(&checks);
            serde_json::to_string_pretty(&v)?
        }
        Format::Csv => to_csv(&[BoundsRow {
            model: &report.model,
            m: report.m,
            h: report.h,
            big_h: report.big_h,
            big_m: report.big_m,
            rho: &report.rho,
            c_lower: &report.c_lower,
            c_upper: &report.c_upper,
            lower_trivial: report.lower_trivial,
            agreement_digits: report.agreement_digits,
        }])?,
    };
    Ok(Outcome::ok(text))
}

fn cmd_table1(g: &Global, check: bool) -> Result<Outcome> {
    let ctx = context(g)?;
    let levels: Vec<usize> = (1..=15).collect();
    let rows = report::table1(&ctx, &levels, execution(g))?;
    let verdict = if check {
        Some(check_table1(&g.model, &rows)?)
    } else {
        None
    };
    if let Some(v) = &verdict {
        eprintln!(
            "table1 check: {} of {} entries within {:e}; max deviation {} (h = {}, {})",
            v.comparisons - v.failures,
            v.comparisons,
            v.tolerance,
            v.max_deviation.to_sig_string(3),
            v.worst_h,
            v.worst_column
        );
    }
    let text = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows)?,
        Format::Json => serde_json::to_string_pretty(&json!({
            "model": g.model.to_string(),
            "rows": rows,
            "check": verdict,
        }))?,
    };
    Ok(Outcome {
        text,
        check_failed: verdict.is_some_and(|v| !v.passed),
    })
}

fn cmd_figure(
    g: &Global,
    which: u8,
    m: usize,
    h: usize,
    big_h: usize,
    n: usize,
) -> Result<Outcome> {
    let ctx = context(g)?;
    let format = g.format.unwrap_or(Format::Csv);
    let text = if which == 1 {
        if n < 150 {
            bail!(Error::InvalidParameter(format!(
                "figure 1 needs --N at least 150, got {n}"
            )));
        }
        let rows = report::figure1(&ctx, m, h, big_h, 10..=150, n, execution(g))?;
        match format {
            Format::Csv => to_csv(&rows)?,
            Format::Json => serde_json::to_string_pretty(&rows)?,
        }
    } else {
        let levels: Vec<usize> = (8..=13).collect();
        let rows = report::figure2(&ctx, m, &levels, execution(g))?;
        match format {
            Format::Csv => to_csv(&rows)?,
            Format::Json => serde_json::to_string_pretty(&rows)?,
        }
    };
    Ok(Outcome::ok(text))
}
