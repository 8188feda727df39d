use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use tattoo::engine::{Mode, Policy};
use tattoo::optimizer::{SearchConfig, DEFAULT_MAX_EDGES};
use tattoo::report::{self, ComputeOptions, Ensemble, ReportError, Request, Source, Status, Suite};

#[derive(Parser)]
#[command(name = "tattoo", version, about = "Exact brush numbers, tattoo numbers and tattoo indices of small graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one quantity for one graph.
    Compute(ComputeArgs),
    /// Run a verification suite; exits non-zero if any row FAILs.
    Verify(VerifyArgs),
    /// One CSV row per instance of a family range or random ensemble.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Index policy for new primaries.
    #[arg(long, value_parser = parse_policy, default_value = "smallest")]
    policy: Policy,
    /// Refuse graphs with more edges than this.
    #[arg(long, env = "TATTOO_MAX_EDGES", default_value_t = DEFAULT_MAX_EDGES)]
    max_edges: usize,
    /// Abort a search after this many seconds.
    #[arg(long)]
    time_budget: Option<u64>,
    /// Sweep orientations on one thread.
    #[arg(long)]
    serial: bool,
    /// Leave timings out of the output so runs compare byte for byte.
    #[arg(long)]
    no_timing: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            policy: self.policy,
            max_edges: self.max_edges,
            time_budget: self.time_budget.map(Duration::from_secs),
            parallel: !self.serial,
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Edge-list file: one `u v` pair per line.
    #[arg(long, conflicts_with_all = ["family", "replay"])]
    input: Option<PathBuf>,
    /// Named family, e.g. `cycle:7`, `friendship:3,6`, `joost:4,7`, `genfriendship:3x2+4x1`.
    #[arg(long, conflicts_with = "replay")]
    family: Option<String>,
    /// Replay the witness of a JSON report and check its value.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// brush, fsg or blend; defaults to the mode of a cost quantity, else blend.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// br, btau, tau, labelsum, index, ratio or ratio-set.
    #[arg(long, value_parser = parse_request, default_value = "index")]
    quantity: Request,
    /// Restrict to one orientation, given as its bit-vector.
    #[arg(long)]
    orientation: Option<u64>,
    /// Print the full JSON report.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// paper-anchors, closed-forms or oracle.
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    /// Largest edge count in the oracle corpus (at most 6).
    #[arg(long, default_value_t = 5)]
    corpus_edges: usize,
    /// Print rows as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Family name: cycle, path, star, wheel, friendship or joost.
    #[arg(long, conflicts_with = "random", requires = "n")]
    family: Option<String>,
    /// Range of the first family parameter, `A..B` or `N`.
    #[arg(long)]
    n: Option<String>,
    /// Range of the second family parameter (friendship, joost).
    #[arg(long, default_value = "3")]
    k: String,
    /// Random ensemble `VERTICES,EDGES,COUNT`.
    #[arg(long)]
    random: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_mode, default_value = "blend")]
    mode: Mode,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown mode `{s}`"))
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    [Policy::Smallest, Policy::Fresh].into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown policy `{s}`"))
}

fn parse_request(s: &str) -> Result<Request, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn compute(args: ComputeArgs) -> Result<(), ReportError> {
    let config = args.search.config();
    if let Some(path) = &args.replay {
        let doc = report::read_report(path)?;
        let value = report::replay(&doc, &config)?;
        println!("replay ok: {} = {value}", doc.quantity);
        return Ok(());
    }
    let source = match (&args.input, &args.family) {
        (Some(path), _) => Source::file(path)?,
        (None, Some(spec)) => Source::family(spec)?,
        (None, None) => return Err(ReportError::Usage("give --input FILE or --family SPEC".into())),
    };
    let mode = match (args.mode, args.quantity) {
        (Some(m), _) => m,
        (None, Request::Quantity(q)) => q.cost_mode().unwrap_or(Mode::Blend),
        (None, Request::RatioSet) => Mode::Blend,
    };
    let opts = ComputeOptions {
        mode,
        request: args.quantity,
        config,
        orientation: args.orientation,
        timing: !args.search.no_timing,
    };
    let doc = report::compute(&source, &opts)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "{} {} ({} mode, {} policy) = {}",
            doc.graph.source,
            doc.quantity,
            doc.mode,
            doc.policy.name(),
            doc.value
        );
        println!("orientations searched: {}", doc.orientations_searched);
        if let Some(ms) = doc.elapsed_ms {
            println!("elapsed: {ms} ms");
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool, ReportError> {
    let rows = report::run_suite(args.suite, &args.search.config(), args.corpus_edges);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        for row in &rows {
            println!("{row}");
        }
        let count = |s: Status| rows.iter().filter(|r| r.status == s).count();
        println!(
            "{} checks: {} pass, {} fail, {} discrepancy",
            rows.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Discrepancy)
        );
    }
    Ok(rows.iter().all(|r| r.status != Status::Fail))
}

fn sweep(args: SweepArgs) -> Result<bool, ReportError> {
    let ensemble = match (&args.family, &args.random) {
        (Some(name), _) => Ensemble::Family {
            name: name.clone(),
            n: report::parse_range(args.n.as_deref().unwrap_or_default())?,
            k: report::parse_range(&args.k)?,
        },
        (None, Some(spec)) => {
            let parts: Vec<usize> = spec
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| ReportError::Usage(format!("--random takes VERTICES,EDGES,COUNT, got `{spec}`")))?;
            let [vertices, edges, count] = parts[..] else {
                return Err(ReportError::Usage(format!("--random takes VERTICES,EDGES,COUNT, got `{spec}`")));
            };
            Ensemble::Random { vertices, edges, count, seed: args.seed }
        }
        (None, None) => return Err(ReportError::Usage("give --family NAME --n RANGE or --random V,E,COUNT".into())),
    };
    let rows = report::sweep(&ensemble, args.mode, &args.search.config(), !args.search.no_timing)?;
    match &args.csv {
        Some(path) => {
            let file =
                File::create(path).map_err(|source| ReportError::Io { path: path.display().to_string(), source })?;
            report::write_csv(&rows, file)?;
        }
        None => report::write_csv(&rows, io::stdout().lock())?,
    }
    Ok(rows.is_empty() || rows.iter().any(|r| r.status == "ok"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(args).map(|()| true),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => sweep(args),
    };
    let _ = io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
