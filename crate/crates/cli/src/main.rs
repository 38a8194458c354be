//! `iwagraph`: Iwasawa invariants of voltage-graph towers from the command line.

mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use iwagraph::char_series::{char_poly_exact, char_series_truncated};
use iwagraph::complete_graph::{complete_density, Assignment};
use iwagraph::corpus::{pinned_examples, verify_example};
use iwagraph::invariants::mu_lambda;
use iwagraph::stats::{
    bouquet_enumerate, monte_carlo, two_vertex_enumerate, vary_t_density, Event, Resolution, StatReport, StatRow,
    VoltageSpace, DEFAULT_ENUMERATION_CAP,
};
use iwagraph::tower::{gauge_to_tree, is_admissible, kappa_sequence, max_level_within, resource_cap};
use iwagraph::two_vertex::TwoVertexShape;
use iwagraph::{Error, IwasawaInvariants, Multigraph, OddPrime, VoltageAssignment};

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceCap { .. } | Error::EnumerationCap { .. } => 3,
            Error::UncertifiedMu | Error::NotStabilized => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "iwagraph", version, about = "Iwasawa invariants of Z_l-towers of multigraphs")]
struct Cli {
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format; stats default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// mu, lambda and nu of one voltage assignment.
    Invariants(TowerArgs),
    /// Spanning-tree counts of the first levels of the tower.
    Tower(TowerArgs),
    /// Recompute the pinned worked examples.
    Verify,
    /// Distribution statistics over voltage spaces.
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Args)]
struct TowerArgs {
    /// Graph JSON, or - for stdin.
    #[arg(long)]
    graph: PathBuf,
    /// Voltage JSON, or - for stdin.
    #[arg(long)]
    voltage: PathBuf,
    /// Highest tower level to compute.
    #[arg(long, default_value_t = 4)]
    levels: u32,
    /// Series degree for non-exact voltages, and the printed prefix length.
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Accept a mu > 0 read from a truncated series once tree counts confirm it.
    #[arg(long)]
    cross_validate: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Enumerate,
    Mc,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
    mode: Mode,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residue depth K (classes mod l^K); for bouquet enumeration, the
    /// deepest level tried.
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Bouquets with t loops.
    Bouquet {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Two-vertex graphs with p loops at the first vertex, q at the second and
    /// r edges between them, e of which run first to second.
    TwoVertex {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        e: usize,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Density of (mu, lambda) along complete graphs K_u, 3 <= u <= max-u.
    Complete {
        #[arg(long)]
        ell: u64,
        #[arg(long, value_enum)]
        assignment: AssignmentArg,
        #[arg(long, default_value_t = 1)]
        a: i64,
        #[arg(long, default_value_t = 0)]
        mu: u32,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
        #[arg(long)]
        max_u: u64,
    },
    /// Share of bouquet voltages in [-x, x]^t, 2 <= t <= x^delta, with (mu, lambda) = (0, 1).
    VaryT {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        delta: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AssignmentArg {
    Single,
    Star,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .map_err(|e| Failure::validation(format!("thread pool: {e}")))?;
    let text = match &cli.command {
        Command::Invariants(args) => json(&cmd_invariants(args)?)?,
        Command::Tower(args) => json(&cmd_tower(args)?)?,
        Command::Verify => {
            let (text, ok) = cmd_verify()?;
            emit(&cli.output, &text)?;
            return if ok { Ok(()) } else { Err(Failure { code: 1, message: "pinned examples failed".into() }) };
        }
        Command::Stats(s) => cmd_stats(s, cli.format.unwrap_or(Format::Csv))?,
    };
    emit(&cli.output, &text)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::validation(format!("writing {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::validation(format!("writing stdout: {e}")))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::validation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Loads graph and voltage, then gauges the voltage onto the BFS tree.
fn load(args: &TowerArgs) -> Result<(Multigraph, VoltageAssignment), Failure> {
    if args.graph.as_os_str() == "-" && args.voltage.as_os_str() == "-" {
        return Err(Failure::validation("only one of --graph and --voltage can read stdin"));
    }
    let g = input::parse_graph(&input::read_source(&args.graph)?)?;
    let v = input::parse_voltage(&input::read_source(&args.voltage)?, &g)?;
    let tree = g.bfs_tree()?;
    let v = gauge_to_tree(&g, &v, &tree)?;
    if !is_admissible(&g, &v, &tree)? {
        return Err(Error::Inadmissible { ell: v.ell().get() }.into());
    }
    Ok((g, v))
}

fn tower_levels(g: &Multigraph, v: &VoltageAssignment, levels: u32) -> Result<Vec<iwagraph::tower::KappaLevel>, Failure> {
    let cap = resource_cap();
    let top = max_level_within(g, v.ell(), levels, cap).ok_or(Error::ResourceCap {
        vertices: g.vertex_count() as u128,
        cap,
    })?;
    Ok(kappa_sequence(g, v, top, cap)?)
}

#[derive(Serialize)]
struct InvariantsOutput {
    mu: u32,
    lambda: u32,
    nu: Option<i64>,
    n0: Option<u32>,
    certificate: String,
    series_prefix: Vec<String>,
    levels_checked: u32,
}

fn cmd_invariants(args: &TowerArgs) -> Result<InvariantsOutput, Failure> {
    let (g, v) = load(args)?;
    let (ml, prefix) = if v.is_exact() {
        let cs = char_poly_exact(&g, &v)?;
        let d = args.degree_cap.unwrap_or(cs.default_degree_cap());
        (mu_lambda(&cs.cleared_series())?, cs.series_to(d).coefficients().to_vec())
    } else {
        let d = args.degree_cap.unwrap_or(16);
        let precision = v.values().iter().map(|a| a.precision()).min().unwrap_or(iwagraph::Precision::Exact);
        let s = char_series_truncated(&g, &v, d, precision)?;
        (mu_lambda(&s)?, s.coefficients().to_vec())
    };
    if ml.provisional && !args.cross_validate {
        return Err(Error::UncertifiedMu.into());
    }
    let levels = tower_levels(&g, &v, args.levels)?;
    let ords: Vec<u64> = levels.iter().map(|l| l.ord).collect();
    let inv = IwasawaInvariants::assemble(ml, v.ell(), Some(&ords))?;
    Ok(InvariantsOutput {
        mu: inv.mu,
        lambda: inv.lambda,
        nu: inv.nu,
        n0: inv.n0,
        certificate: inv.certificate.to_string(),
        series_prefix: prefix.iter().map(BigInt::to_string).collect(),
        levels_checked: levels.len() as u32 - 1,
    })
}

#[derive(Serialize)]
struct TowerLevel {
    n: u32,
    kappa: String,
    ord_ell: u64,
}

fn cmd_tower(args: &TowerArgs) -> Result<Vec<TowerLevel>, Failure> {
    let (g, v) = load(args)?;
    let levels = tower_levels(&g, &v, args.levels)?;
    Ok(levels.into_iter().map(|l| TowerLevel { n: l.n, kappa: l.kappa.to_string(), ord_ell: l.ord }).collect())
}

fn cmd_verify() -> Result<(String, bool), Failure> {
    let mut out = String::new();
    let mut ok = true;
    for ex in pinned_examples() {
        for c in verify_example(&ex, resource_cap())? {
            ok &= c.passed;
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}: {} ({})\n", c.example, c.what, c.detail));
        }
    }
    Ok((out, ok))
}

fn cmd_stats(cmd: &StatsCommand, format: Format) -> Result<String, Failure> {
    let report = match cmd {
        StatsCommand::Bouquet { ell, t, sampling } => {
            let ell = OddPrime::new(*ell)?;
            match sampling.mode {
                Mode::Enumerate => bouquet_enumerate(ell, *t, sampling.depth.unwrap_or(3), DEFAULT_ENUMERATION_CAP)?,
                Mode::Mc => {
                    let space = VoltageSpace::bouquet(*t)?;
                    monte_carlo(&space, ell, sampling.depth.unwrap_or(1), sampling.samples, sampling.seed)?
                }
            }
        }
        StatsCommand::TwoVertex { ell, p, q, r, e, sampling } => {
            let ell = OddPrime::new(*ell)?;
            let g = r.checked_sub(*e).ok_or_else(|| Failure::validation("e cannot exceed r"))?;
            let shape = TwoVertexShape::new(*p, *q, *r, *e, g)?;
            match sampling.mode {
                Mode::Enumerate => two_vertex_enumerate(&shape, ell, sampling.depth.unwrap_or(1), DEFAULT_ENUMERATION_CAP)?,
                Mode::Mc => {
                    monte_carlo(&VoltageSpace::two_vertex(&shape), ell, sampling.depth.unwrap_or(1), sampling.samples, sampling.seed)?
                }
            }
        }
        StatsCommand::Complete { ell, assignment, a, mu, lambda, max_u } => {
            let ell = OddPrime::new(*ell)?;
            if a.rem_euclid(ell.get() as i64) == 0 {
                return Err(Failure::validation(format!("a = {a} must be a unit mod {ell}")));
            }
            let kind = match assignment {
                AssignmentArg::Single => Assignment::Single,
                AssignmentArg::Star => Assignment::Star,
            };
            let d = complete_density(ell, *mu, *lambda, kind, *max_u)?;
            if format == Format::Json {
                return json(&d);
            }
            let name = match kind {
                Assignment::Single => "single",
                Assignment::Star => "star",
            };
            StatReport {
                family: "complete".into(),
                ell: ell.get(),
                params: format!("assignment={name};a={a};max_u={max_u}"),
                depth: 0,
                total: (*max_u).into(),
                seed: None,
                rows: vec![StatRow {
                    event: Event::Exact { mu: *mu, lambda: *lambda },
                    resolution: Resolution::Certain,
                    count: d.count.into(),
                    empirical: d.empirical,
                    theoretical: Some(d.theoretical),
                    bound: None,
                    wilson: None,
                }],
            }
        }
        StatsCommand::VaryT { ell, x, delta } => {
            let ell = OddPrime::new(*ell)?;
            let r = vary_t_density(ell, *x, *delta)?;
            if format == Format::Json {
                return json(&r);
            }
            StatReport {
                family: "vary-t".into(),
                ell: ell.get(),
                params: format!("x={x};delta={delta};t_max={}", r.t_max),
                depth: 1,
                total: r.admissible.clone(),
                seed: None,
                rows: vec![StatRow {
                    event: Event::Exact { mu: 0, lambda: 1 },
                    resolution: Resolution::Certain,
                    count: r.favourable,
                    empirical: r.ratio,
                    theoretical: Some(r.target),
                    bound: None,
                    wilson: None,
                }],
            }
        }
    };
    match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Failure::validation(e.to_string()))
        }
    }
}
