//! `gqo`: build, verify and dualize generalized quadrangles, and run the
//! two-round partial ovoid construction.
//!
//! Exit codes: 0 success, 2 input error, 3 verification failure,
//! 4 algorithm failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use gq_ovoid::classical::{ClassicalError, Family};
use gq_ovoid::experiment::{self, ExperimentConfig, ExperimentGeometry};
use gq_ovoid::geometry::{GeometryError, PairCheck, SparsityMode, EXHAUSTIVE_TRIPLE_LIMIT};
use gq_ovoid::gqi::{self, GqiError};
use gq_ovoid::ovoid::{self, BasePoint, CompletionPath, OnFailure, OvoidError, RunParams, RunResult};
use gq_ovoid::{Execution, Quadrangle};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Algorithm(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Algorithm(_) => 4,
        }
    }
}

impl From<GqiError> for CliError {
    fn from(e: GqiError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ClassicalError> for CliError {
    fn from(e: ClassicalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "gqo", version, about = "Generalized quadrangles and maximal partial ovoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a classical quadrangle and write it as GQI.
    Build {
        /// q5minus, w, q4, h3 or h4
        family: String,
        q: u32,
        /// Output file; GQI goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a GQI file: axioms, perp identities and local sparsity.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = SparseMode::Auto)]
        sparse_mode: SparseMode,
        /// Triples drawn in sampled mode.
        #[arg(long, default_value_t = 100_000)]
        triples: u64,
        /// Pairs drawn by pair-level checks on large geometries.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, env = "GQO_SEED", default_value_t = 0)]
        seed: u64,
        /// Treat a failed local-sparsity verdict as a verification failure.
        #[arg(long)]
        require_sparse: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// One run of the two-round construction.
    Run(RunArgs),
    /// Seeded trials over several geometries, written as CSV.
    Experiment(ExperimentArgs),
    /// Write the point-line dual of a GQI file.
    Dualize { input: PathBuf, output: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SparseMode {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FailurePolicy {
    Fail,
    GreedyComplete,
}

impl From<FailurePolicy> for OnFailure {
    fn from(p: FailurePolicy) -> Self {
        match p {
            FailurePolicy::Fail => OnFailure::Fail,
            FailurePolicy::GreedyComplete => OnFailure::GreedyComplete,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// A family name followed by q, or a GQI file.
    target: String,
    q: Option<u32>,
    #[arg(long, env = "GQO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.1)]
    alpha: f64,
    /// Base point index, or `random`.
    #[arg(long, default_value = "random")]
    x: String,
    /// Per-point selection probability, replacing the computed one.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = FailurePolicy::GreedyComplete)]
    on_failure: FailurePolicy,
    #[arg(long, default_value_t = 3)]
    max_restarts: u32,
    /// Run on the dual; the result is a partial spread of the original.
    #[arg(long)]
    dual: bool,
    /// Print first-round statistics with their reference values.
    #[arg(long)]
    diagnostics: bool,
    #[arg(long, default_value_t = 10_000)]
    pair_samples: u64,
    /// Print phase timings to stderr.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Comma-separated `family:q` items or GQI paths.
    #[arg(long, value_delimiter = ',', required = true)]
    geometries: Vec<String>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, env = "GQO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.1)]
    alpha: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = FailurePolicy::GreedyComplete)]
    on_failure: FailurePolicy,
    #[arg(long, default_value_t = 3)]
    max_restarts: u32,
    /// Skip the random greedy baseline rows.
    #[arg(long)]
    no_greedy: bool,
    #[arg(long)]
    sequential: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn parse_family(name: &str) -> CliResult<Family> {
    Family::from_cli_name(name)
        .ok_or_else(|| CliError::Input(format!("unknown family `{name}` (expected q5minus, w, q4, h3 or h4)")))
}

fn load_target(target: &str, q: Option<u32>) -> CliResult<(Quadrangle, Option<(Family, u32)>)> {
    if let Some(family) = Family::from_cli_name(target) {
        let q = q.ok_or_else(|| CliError::Input(format!("family `{target}` needs q")))?;
        return Ok((family.build(q)?, Some((family, q))));
    }
    if q.is_some() {
        return Err(CliError::Input(format!("unknown family `{target}`")));
    }
    Ok((gqi::load(Path::new(target))?, None))
}

fn summary_line(gq: &Quadrangle) -> String {
    format!(
        "{}: s = {}, t = {}, P = {}, L = {}",
        gq.label(),
        gq.s(),
        gq.t(),
        gq.num_points(),
        gq.num_lines()
    )
}

fn axiom_section(gq: &Quadrangle, mode: PairCheck, report: &mut String) -> bool {
    let axioms = gq.verify_axioms(mode);
    let how = if mode.is_exhaustive_for(gq.num_points()) {
        "exhaustive"
    } else {
        "sampled"
    };
    writeln!(report, "axioms ({how}):").unwrap();
    for c in &axioms.checks {
        writeln!(report, "  {c}").unwrap();
    }
    axioms.all_passed()
}

fn cmd_build(family: &str, q: u32, out: Option<&Path>) -> CliResult {
    let gq = parse_family(family)?.build(q)?;
    let mut report = summary_line(&gq);
    report.push('\n');
    let ok = axiom_section(&gq, PairCheck::default(), &mut report);
    match out {
        Some(path) => {
            gqi::save(&gq, path)?;
            writeln!(report, "wrote {}", path.display()).unwrap();
            print!("{report}");
        }
        None => {
            gqi::write(&gq, io::stdout().lock())?;
            eprint!("{report}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} failed the axiom checks",
            gq.label()
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    path: &Path,
    sparse_mode: SparseMode,
    triples: u64,
    samples: u64,
    seed: u64,
    require_sparse: bool,
    sequential: bool,
) -> CliResult {
    let gq = gqi::load(path)?;
    let mut report = summary_line(&gq);
    report.push('\n');
    let pair_mode = PairCheck::Auto { samples, seed };
    let mut ok = axiom_section(&gq, pair_mode, &mut report);

    let perp = gq.check_perp_identities(pair_mode);
    writeln!(
        report,
        "perp identities:\n  {} |u^perp| = s(t+1) ({} points, {} deviations)",
        if perp.point_failures == 0 { "PASS" } else { "FAIL" },
        perp.points_checked,
        perp.point_failures
    )
    .unwrap();
    if let Some((u, k)) = perp.first_point_failure {
        writeln!(report, "    first deviation: point {u} has {k}").unwrap();
    }
    writeln!(
        report,
        "  {} |{{u,v}}^perp| = t+1 ({} non-collinear pairs, {} deviations)",
        if perp.pair_failures == 0 { "PASS" } else { "FAIL" },
        perp.pairs_checked,
        perp.pair_failures
    )
    .unwrap();
    if let Some((u, v, k)) = perp.first_pair_failure {
        writeln!(report, "    first deviation: pair ({u}, {v}) has {k}").unwrap();
    }
    ok &= perp.passed();

    let mode = match sparse_mode {
        SparseMode::Exhaustive => SparsityMode::Exhaustive,
        SparseMode::Sampled => SparsityMode::Sampled { triples, seed },
        SparseMode::Auto if gq.num_points() <= EXHAUSTIVE_TRIPLE_LIMIT => SparsityMode::Exhaustive,
        SparseMode::Auto => SparsityMode::Sampled { triples, seed },
    };
    let mut sparse_ok = true;
    match gq.locally_sparse_with(mode, execution(sequential)) {
        Ok(sp) => {
            let how = if sp.exhaustive {
                "exhaustive".to_string()
            } else {
                format!("sampled, seed {seed}")
            };
            writeln!(
                report,
                "locally sparse ({how}, {} triples): {} (max perp {}, bound s+1 = {})",
                sp.triples_checked, sp.verdict, sp.max_perp, sp.bound
            )
            .unwrap();
            if let Some(([a, b, c], k)) = sp.witness {
                writeln!(report, "  witness triple ({a}, {b}, {c}) with perp size {k}").unwrap();
            }
            sparse_ok = sp.verdict;
        }
        Err(e) => writeln!(report, "locally sparse: not checked ({e})").unwrap(),
    }
    print!("{report}");

    if !ok {
        return Err(CliError::Verification(format!(
            "{} failed verification",
            path.display()
        )));
    }
    if require_sparse && !sparse_ok {
        return Err(CliError::Verification(format!(
            "{} is not locally sparse",
            path.display()
        )));
    }
    Ok(())
}

fn join(points: &[usize]) -> String {
    points.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn run_report(gq: &Quadrangle, res: &RunResult, family: Option<(Family, u32)>, dual_of: Option<&Quadrangle>) -> String {
    let mut r = String::new();
    let pr = &res.probability;
    writeln!(r, "{}", summary_line(gq)).unwrap();
    writeln!(
        r,
        "p = {:.6}, ps = {:.6}{}",
        pr.p,
        pr.ps,
        if pr.clamped {
            format!(" (clamped from {:.6})", pr.ps_raw)
        } else {
            String::new()
        }
    )
    .unwrap();
    writeln!(r, "x = {}", res.x).unwrap();
    writeln!(r, "|S| = {}: {}", res.s_set.len(), join(&res.s_set)).unwrap();
    writeln!(r, "uncovered after first round: {}", res.uncovered_after_first_round).unwrap();
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    writeln!(r, "x* = {}, x+ = {}", opt(res.x_star), opt(res.x_plus)).unwrap();
    writeln!(r, "|T| = {}: {}", res.t_set.len(), join(&res.t_set)).unwrap();
    writeln!(r, "restarts used: {}", res.restarts_used).unwrap();
    writeln!(r, "completion: {}", res.completion_path).unwrap();
    let fin = &res.final_ovoid;
    writeln!(r, "final size: {} ({})", fin.len(), fin.status).unwrap();
    writeln!(r, "members: {}", join(&fin.members)).unwrap();
    writeln!(
        r,
        "counting lower bound: {}",
        ovoid::counting_lower_bound(gq.s() as u64, gq.t() as u64)
    )
    .unwrap();
    if let Some((Family::EllipticQ5, q)) = family {
        writeln!(
            r,
            "Ebert-Hirschfeld lower bound: {}",
            ovoid::ebert_hirschfeld_bound(q as u64)
        )
        .unwrap();
    }
    if let Some(orig) = dual_of {
        let kind = if fin.is_maximal() {
            "maximal partial spread"
        } else {
            "partial spread"
        };
        writeln!(r, "as a {kind} of {} ({} lines):", orig.label(), fin.len()).unwrap();
        for &l in &fin.members {
            writeln!(r, "  line {l}: {}", join(orig.line(l))).unwrap();
        }
    }
    r
}

fn cmd_run(args: &RunArgs) -> CliResult {
    let (orig, family) = load_target(&args.target, args.q)?;
    let (gq, dual_of) = if args.dual {
        let d = orig
            .dualize()
            .map_err(|e| CliError::Verification(format!("cannot dualize: {e}")))?;
        (d, Some(orig))
    } else {
        (orig, None)
    };
    let x = match args.x.as_str() {
        "random" => BasePoint::Random,
        s => BasePoint::Fixed(
            s.parse()
                .map_err(|_| CliError::Input(format!("--x expects a point index or `random`, got `{s}`")))?,
        ),
    };
    let params = RunParams {
        alpha: args.alpha,
        seed: args.seed,
        x,
        p_override: args.p,
        max_restarts: args.max_restarts,
        on_failure: args.on_failure.into(),
    };
    let (res, failed) = match ovoid::two_round(&gq, &params) {
        Ok(r) => (r, false),
        Err(OvoidError::RunFailed(r)) => (*r, true),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let family = if args.dual { None } else { family };
    let mut report = run_report(&gq, &res, family, dual_of.as_ref());
    if args.diagnostics {
        // statistics of the first round of the attempt that was kept
        let mut with_x = res.s_set.clone();
        with_x.push(res.x);
        let uncovered = gq
            .cover(&with_x)
            .map_err(|e| CliError::Input(e.to_string()))?
            .complement();
        let d = ovoid::diagnostics_properties(
            &gq,
            res.x,
            &res.s_set,
            &uncovered,
            args.alpha,
            args.pair_samples,
            args.seed,
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(report, "diagnostics (alpha = {}):", args.alpha).unwrap();
        for line in d.to_string().lines() {
            writeln!(report, "  {line}").unwrap();
        }
    }
    print!("{report}");
    if args.timings {
        let t = &res.timings;
        eprintln!(
            "timings: first round {:?}, second round {:?}, verification {:?}, completion {:?}, total {:?}",
            t.first_round,
            t.second_round,
            t.verification,
            t.completion,
            t.total()
        );
    }
    if failed || res.completion_path == CompletionPath::Failed {
        return Err(CliError::Algorithm(format!(
            "no maximal partial ovoid after {} attempts",
            res.restarts_used + 1
        )));
    }
    Ok(())
}

fn parse_geometry(item: &str) -> CliResult<ExperimentGeometry> {
    if let Some((name, q)) = item.split_once(':') {
        if let Some(family) = Family::from_cli_name(name) {
            let q: u32 = q.parse().map_err(|_| CliError::Input(format!("bad q in `{item}`")))?;
            return Ok(ExperimentGeometry::classical(family, q)?);
        }
    }
    let path = Path::new(item);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "`{item}` is neither family:q nor an existing GQI file"
        )));
    }
    Ok(ExperimentGeometry {
        quadrangle: gqi::load(path)?,
        q: None,
        family: None,
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult {
    if args.trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let geometries = args
        .geometries
        .iter()
        .map(|g| parse_geometry(g.trim()))
        .collect::<CliResult<Vec<_>>>()?;
    let cfg = ExperimentConfig {
        trials: args.trials,
        master_seed: args.seed,
        alpha: args.alpha,
        p_override: args.p,
        max_restarts: args.max_restarts,
        on_failure: args.on_failure.into(),
        include_greedy: !args.no_greedy,
        execution: execution(args.sequential),
    };
    let records = experiment::run_experiment(&geometries, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let summary = experiment::format_summary(&experiment::summarize(&records));
    match &args.out {
        Some(path) => {
            let written = fs::File::create(path).and_then(|f| experiment::write_csv(&records, io::BufWriter::new(f)));
            if let Err(e) = written {
                let _ = fs::remove_file(path);
                return Err(e.into());
            }
            println!("wrote {} rows to {}", records.len(), path.display());
            print!("{summary}");
        }
        None => {
            experiment::write_csv(&records, io::stdout().lock())?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_dualize(input: &Path, output: &Path) -> CliResult {
    let gq = gqi::load(input)?;
    let dual = gq.dualize().map_err(|e| match e {
        GeometryError::AxiomFailure(msg) => CliError::Verification(format!("axiom failure: {msg}")),
        other => CliError::Input(other.to_string()),
    })?;
    gqi::save(&dual, output)?;
    println!("{}", summary_line(&dual));
    println!("wrote {}", output.display());
    println!("ovoids of the dual are spreads of {}", gq.label());
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Build { family, q, out } => cmd_build(&family, q, out.as_deref()),
        Command::Verify {
            path,
            sparse_mode,
            triples,
            samples,
            seed,
            require_sparse,
            sequential,
        } => cmd_verify(&path, sparse_mode, triples, samples, seed, require_sparse, sequential),
        Command::Run(args) => cmd_run(&args),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::Dualize { input, output } => cmd_dualize(&input, &output),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
