//! Command-line front end.
//!
//! JSON output has the shape
//! `{"command", "config", "results": [...], "witnesses": [...], "timings": {...}}`.
//! `results` holds one record per output row; `witnesses` holds the
//! counterexamples of failing checks; `timings` is empty unless `--timings`
//! is given, so identical invocations print identical bytes whether or not
//! the KL cache was warm.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage errors
//! (bad flags, words or unsupported types), 3 on internal faults.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use klcells::cells::CellSide;
use klcells::coxeter::{build_graph, CoxeterGroup, CoxeterType, GraphOptions, DEFAULT_CAPACITY};
use klcells::hecke::KlCache;
use klcells::verify::{self, Condition, Verdict, VerifyContext};
use klcells::Error;

use output::{Config, Format, Report};

/// Groups above this order need `--long-run`.
const LONG_RUN_ORDER: u64 = 2000;

#[derive(Parser, Debug)]
#[command(
    name = "klcells",
    version,
    about = "Kazhdan-Lusztig cells and Temperley-Lieb quotients of finite Coxeter groups"
)]
struct Cli {
    /// Family: A, B, D, E, F, H or I2.
    #[arg(long = "type", global = true, default_value = "A")]
    kind: String,
    /// Rank, or the bond order m for I2.
    #[arg(long, global = true, default_value_t = 3)]
    rank: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory of KL cache files.
    #[arg(long, global = true, env = "KLCELLS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Allow groups above 2000 elements (H4, B5, ...).
    #[arg(long, global = true)]
    long_run: bool,
    /// Maximum group order to enumerate.
    #[arg(long, global = true)]
    capacity: Option<u64>,
    /// Worker threads for library parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accept D3 (as the D-style graph on three nodes).
    #[arg(long, global = true)]
    allow_d3: bool,
    /// Include wall times in the output.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the elements with their lengths.
    Enumerate {
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// List or count the fully commutative elements.
    Fc {
        #[arg(long)]
        count: bool,
    },
    /// Print C'_w in the T~ basis.
    Kl { w: String },
    /// Print mu(x, w).
    Mu { x: String, w: String },
    /// List the cells of one side.
    Cells {
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// Print theta(T~_w) and theta(C'_w).
    Theta { w: String },
    /// Dump the canonical basis of the TL quotient.
    Canonical,
    /// Multiply two TL elements, each `t:<word>` or `b:<word>`.
    TlMult { u: String, v: String },
    /// Check the conditions relating W_c to the TL quotient and cells.
    Verify {
        /// i..viii or all.
        #[arg(long, default_value = "all")]
        condition: String,
    },
    /// Whether W_c is a union of two-sided cells, against the D4-subgraph test.
    CorollaryTable {
        /// Comma-separated types, e.g. A3,B4,I2(5),F4.
        #[arg(long, value_delimiter = ',')]
        types: Option<Vec<String>>,
    },
    /// Structure of the fully commutative cells, with intersection sizes.
    ReportBIntersections,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Left,
    Right,
    TwoSided,
}

impl From<SideArg> for CellSide {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => CellSide::Left,
            SideArg::Right => CellSide::Right,
            SideArg::TwoSided => CellSide::TwoSided,
        }
    }
}

/// Failure classes, mapped to exit codes.
enum Fail {
    Usage(String),
    Internal(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedType(_)
            | Error::Capacity { .. }
            | Error::InvalidWord(_)
            | Error::InvalidPoly(_)
            | Error::Parse(_) => Fail::Usage(e.to_string()),
            _ => Fail::Internal(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Fail>;

const DEFAULT_TABLE: &[&str] = &[
    "A2", "A3", "A4", "B2", "B3", "B4", "I2(3)", "I2(4)", "I2(5)", "I2(6)", "I2(7)", "I2(8)", "H3",
    "F4", "D4", "D5",
];

/// Parses `A3`, `I2(5)`, `I2_5`, `F4`.
fn parse_type_tag(tag: &str) -> Res<CoxeterType> {
    let bad = || Fail::Usage(format!("cannot parse type `{tag}`"));
    let t = tag.trim();
    if let Some(rest) = t.strip_prefix("I2") {
        let m = rest.trim_start_matches(['(', '_']).trim_end_matches(')');
        return Ok(CoxeterType::I2(m.parse().map_err(|_| bad())?));
    }
    let split = t.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
    let n: u32 = t[split..].parse().map_err(|_| bad())?;
    Ok(CoxeterType::from_tag(&t[..split], n)?)
}

struct Env<'a> {
    cli: &'a Cli,
    cache: Option<KlCache>,
}

impl Env<'_> {
    /// Validates a type and enumerates its group.
    fn group(&self, kind: CoxeterType) -> Res<Arc<CoxeterGroup>> {
        let graph = build_graph(
            kind,
            GraphOptions {
                allow_d3: self.cli.allow_d3,
            },
        )?;
        let capacity = self.cli.capacity.unwrap_or(DEFAULT_CAPACITY);
        let order = kind.order();
        if order > capacity {
            return Err(Error::Capacity { order, capacity }.into());
        }
        if order > LONG_RUN_ORDER && !self.cli.long_run {
            return Err(Fail::Usage(format!(
                "{kind} has {order} elements; pass --long-run"
            )));
        }
        Ok(Arc::new(CoxeterGroup::with_capacity(graph, capacity)?))
    }

    fn context(&self, group: Arc<CoxeterGroup>) -> Res<VerifyContext> {
        Ok(VerifyContext::new(group, self.cache.as_ref())?)
    }
}

fn run(cli: &Cli) -> Res<(Report, bool)> {
    let start = Instant::now();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::Internal(e.to_string()))?;
    }
    let env = Env {
        cli,
        cache: cli.cache_dir.as_ref().map(KlCache::new),
    };
    let kind = CoxeterType::from_tag(&cli.kind, cli.rank)?;
    let config = Config {
        kind: cli.kind.clone(),
        rank: cli.rank,
        format: cli.format,
        long_run: cli.long_run,
        capacity: cli.capacity,
        threads: cli.threads,
    };
    let mut report = Report::new(command_name(&cli.command), config);
    let outcome = match &cli.command {
        Command::CorollaryTable { types } => {
            let kinds: Vec<CoxeterType> = match types {
                Some(list) => list.iter().map(|t| parse_type_tag(t)).collect::<Res<_>>()?,
                None => {
                    let mut k: Vec<CoxeterType> = DEFAULT_TABLE
                        .iter()
                        .map(|t| parse_type_tag(t))
                        .collect::<Res<_>>()?;
                    if cli.long_run {
                        k.push(CoxeterType::H(4));
                    }
                    k
                }
            };
            // validate every type before computing anything
            for &k in &kinds {
                build_graph(
                    k,
                    GraphOptions {
                        allow_d3: cli.allow_d3,
                    },
                )?;
                if k.order() > LONG_RUN_ORDER && !cli.long_run {
                    return Err(Fail::Usage(format!(
                        "{k} has {} elements; pass --long-run",
                        k.order()
                    )));
                }
            }
            let mut rows = Vec::new();
            for &k in &kinds {
                let ctx = env.context(env.group(k)?)?;
                let t = Instant::now();
                let mut row = verify::corollary_row(&ctx);
                row.millis = None;
                report.time(&k.to_string(), t);
                rows.push(row);
            }
            output::corollary(&rows)
        }
        command => {
            let group = env.group(kind)?;
            // parse every word before any computation or cache write
            let words = command_words(command);
            let parsed = words
                .iter()
                .map(|t| group.parse(t))
                .collect::<Result<Vec<_>, _>>()?;
            let tl_args = match command {
                Command::TlMult { u, v } => Some((
                    output::parse_tl_arg(&group, u)?,
                    output::parse_tl_arg(&group, v)?,
                )),
                _ => None,
            };
            let condition: Option<Vec<Condition>> = match command {
                Command::Verify { condition } if condition == "all" => {
                    Some(Condition::ALL.to_vec())
                }
                Command::Verify { condition } => Some(vec![condition.parse()?]),
                _ => None,
            };
            if matches!(command, Command::ReportBIntersections)
                && !matches!(kind, CoxeterType::A(_) | CoxeterType::B(_))
            {
                return Err(Fail::Usage(format!(
                    "report-b-intersections needs type A or B, got {kind}"
                )));
            }
            match command {
                Command::Enumerate { max_length } => output::enumerate(&group, *max_length),
                Command::Fc { count } => output::fc(&group, *count),
                _ => {
                    let t = Instant::now();
                    let ctx = env.context(group.clone())?;
                    report.time("kl_table", t);
                    if let Some(load) = ctx.cache_load() {
                        report.note("cache", format!("{load:?}"));
                    }
                    let t = Instant::now();
                    let out = match command {
                        Command::Kl { .. } => output::kl(&ctx, parsed[0]),
                        Command::Mu { .. } => output::mu(&ctx, parsed[0], parsed[1]),
                        Command::Cells { side } => output::cells(&ctx, (*side).into()),
                        Command::Theta { .. } => output::theta(&ctx, parsed[0])?,
                        Command::Canonical => output::canonical(&ctx)?,
                        Command::TlMult { .. } => {
                            let (u, v) = tl_args.as_ref().expect("parsed above");
                            output::tl_mult(&ctx, u, v)?
                        }
                        Command::Verify { .. } => {
                            let conds = condition.expect("parsed above");
                            let verdicts: Vec<Verdict> = if conds.len() == Condition::ALL.len() {
                                verify::verify_equivalence(&ctx)?
                            } else {
                                vec![verify::check_condition(&ctx, conds[0])?]
                            };
                            for v in &verdicts {
                                if let Some(ms) = v.millis {
                                    report
                                        .note(&format!("condition_{}_ms", v.check), ms.to_string());
                                }
                            }
                            output::verdicts(
                                verdicts.into_iter().map(Verdict::without_timing).collect(),
                            )
                        }
                        Command::ReportBIntersections => output::intersections(&ctx)?,
                        _ => unreachable!("handled above"),
                    };
                    report.time("command", t);
                    out
                }
            }
        }
    };
    report.time("total", start);
    let failed = outcome.failed;
    report.absorb(outcome);
    Ok((report, failed))
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Enumerate { .. } => "enumerate",
        Command::Fc { .. } => "fc",
        Command::Kl { .. } => "kl",
        Command::Mu { .. } => "mu",
        Command::Cells { .. } => "cells",
        Command::Theta { .. } => "theta",
        Command::Canonical => "canonical",
        Command::TlMult { .. } => "tl-mult",
        Command::Verify { .. } => "verify",
        Command::CorollaryTable { .. } => "corollary-table",
        Command::ReportBIntersections => "report-b-intersections",
    }
}

fn command_words(command: &Command) -> Vec<String> {
    match command {
        Command::Kl { w } | Command::Theta { w } => vec![w.clone()],
        Command::Mu { x, w } => vec![x.clone(), w.clone()],
        _ => Vec::new(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((report, failed)) => {
            print!("{}", report.render(cli.format, cli.timings));
            ExitCode::from(if failed { 1 } else { 0 })
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
