use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use prime_patterns::apps::{self, CensusOptions, TupleCensus};
use prime_patterns::apsieve::{BoundRule, EarlyAbort};
use prime_patterns::checkpoint::Checkpoint;
use prime_patterns::primality::{compute_pseudosquares, PrimeTester, PseudosquareTable};
use prime_patterns::search::{smallest_chain, Hit, RunControl};
use prime_patterns::{ChainKind, Pattern, Search, SearchConfig, WideInt};

/// Exit status of a run stopped by `--halt-after` with its checkpoint written.
const EXIT_HALTED: u8 = 3;

#[derive(Parser)]
#[command(name = "prime-patterns", version, about = "Search for primes in linear patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every x <= n with all forms prime, one `x f_1 ... f_k` line each.
    Search(SearchArgs),
    /// Count twin pairs (p, p+2) with p < X and sum their reciprocals.
    Twins(CensusArgs),
    /// Count prime quadruplets with largest member < X and sum their reciprocals.
    Quads(CensusArgs),
    /// Cunningham chains of a given kind and length.
    Chains(ChainArgs),
    /// Write the table of pseudosquares up to a limit.
    Pseudosquares(PsqArgs),
}

#[derive(Args)]
struct Tuning {
    /// Sieve bound B.
    #[arg(long, conflicts_with = "space_exp")]
    sieve_bound: Option<u64>,
    /// Choose B = 2^floor(log2(n)/c).
    #[arg(long)]
    space_exp: Option<f64>,
    /// Largest wheel modulus (default n/B).
    #[arg(long)]
    wheel_limit: Option<WideInt>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Pseudosquare table file (`PSQ v1`) replacing the built-in one.
    #[arg(long)]
    pseudosquares: Option<PathBuf>,
}

#[derive(Args)]
struct Resume {
    /// Checkpoint file; an existing file is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Seconds between checkpoints.
    #[arg(long, default_value_t = 900.0)]
    checkpoint_interval: f64,
    /// Stop after this many residues per worker, writing the checkpoint.
    #[arg(long, requires = "checkpoint")]
    halt_after: Option<u128>,
}

#[derive(Args)]
struct SearchArgs {
    /// Comma-separated forms, e.g. "x,x+2,x+6,x+8" or "6x+1,12x+1,18x+1".
    #[arg(long)]
    pattern: Pattern,
    #[arg(long)]
    n: WideInt,
    /// May be repeated.
    #[arg(long = "exclude-wheel-prime")]
    exclude_wheel_prime: Vec<u64>,
    /// Abandon sieving a segment once it is sparse enough.
    #[arg(long)]
    early_abort: bool,
    /// Print tuples as they are found instead of sorted at the end.
    #[arg(long)]
    unsorted: bool,
    /// Write tuples here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    resume: Resume,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    x: WideInt,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    resume: Resume,
}

#[derive(Args)]
struct ChainArgs {
    /// first (p -> 2p+1) or second (p -> 2p-1).
    #[arg(long)]
    kind: ChainKind,
    #[arg(long)]
    length: usize,
    /// Largest chain start considered.
    #[arg(long)]
    cap: WideInt,
    /// Stop at the smallest chain instead of listing all up to the cap.
    #[arg(long)]
    first: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct PsqArgs {
    #[arg(long)]
    limit: WideInt,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Search(a) => search(a),
        Command::Twins(a) => census(a, apps::twins),
        Command::Quads(a) => census(a, apps::quads),
        Command::Chains(a) => chains(a),
        Command::Pseudosquares(a) => pseudosquares(a),
    }
}

fn bound_rule(t: &Tuning) -> Option<BoundRule> {
    match (t.sieve_bound, t.space_exp) {
        (Some(b), _) => Some(BoundRule::Explicit(b)),
        (None, Some(c)) => Some(BoundRule::SpaceExponent(c)),
        (None, None) => None,
    }
}

fn tester(t: &Tuning) -> anyhow::Result<PrimeTester> {
    Ok(match &t.pseudosquares {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let table: PseudosquareTable = text.parse()?;
            PrimeTester::new(Arc::new(table), true)
        }
        None => PrimeTester::default(),
    })
}

fn interval(r: &Resume) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(r.checkpoint_interval).context("invalid --checkpoint-interval")
}

fn load_checkpoint(r: &Resume) -> anyhow::Result<Option<Checkpoint>> {
    match &r.checkpoint {
        Some(p) if p.exists() => {
            log::info!("resuming from {}", p.display());
            Ok(Some(Checkpoint::load(p).with_context(|| format!("loading {}", p.display()))?))
        }
        _ => Ok(None),
    }
}

fn halted_exit(path: &Option<PathBuf>) -> ExitCode {
    if let Some(p) = path {
        eprintln!("halted; rerun the same command to resume from {}", p.display());
    }
    ExitCode::from(EXIT_HALTED)
}

fn search(a: SearchArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = SearchConfig::new(a.pattern, a.n).workers(a.tuning.workers);
    if let Some(rule) = bound_rule(&a.tuning) {
        cfg = cfg.bound(rule);
    }
    if let Some(w) = a.tuning.wheel_limit {
        cfg = cfg.wheel_limit(w);
    }
    for p in a.exclude_wheel_prime {
        cfg = cfg.exclude_wheel_prime(p);
    }
    if a.early_abort {
        cfg = cfg.early_abort(Some(EarlyAbort::default()));
    }
    cfg.checkpoint_interval = interval(&a.resume)?;
    cfg = cfg.tester(tester(&a.tuning)?).collect_hits(!a.unsorted);
    let search = Search::new(cfg)?;

    let sink: Box<dyn Write + Send> = match &a.out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    let sink = Mutex::new(BufWriter::new(sink));
    let stream = |h: &Hit| {
        let _ = writeln!(sink.lock().expect("output lock"), "{h}");
    };
    let ctl = RunControl {
        checkpoint: a.resume.checkpoint.clone(),
        halt_after: a.resume.halt_after,
        on_hit: a.unsorted.then_some(&stream as &(dyn Fn(&Hit) + Sync)),
    };
    let report = search.run(load_checkpoint(&a.resume)?, &ctl)?;
    let mut out = sink.into_inner().expect("output lock");
    if !report.complete {
        out.flush()?;
        return Ok(halted_exit(&a.resume.checkpoint));
    }
    for h in &report.hits {
        writeln!(out, "{h}")?;
    }
    out.flush()?;
    drop(out);
    println!("count={}", report.count);
    Ok(ExitCode::SUCCESS)
}

fn census(
    a: CensusArgs,
    f: fn(WideInt, &CensusOptions) -> prime_patterns::Result<TupleCensus>,
) -> anyhow::Result<ExitCode> {
    let opts = CensusOptions {
        workers: a.tuning.workers,
        bound: bound_rule(&a.tuning),
        wheel_limit: a.tuning.wheel_limit,
        checkpoint: a.resume.checkpoint.clone(),
        checkpoint_interval: interval(&a.resume)?,
        resume: true,
        halt_after: a.resume.halt_after,
        tester: tester(&a.tuning)?,
    };
    let c = f(a.x, &opts)?;
    if !c.complete {
        return Ok(halted_exit(&a.resume.checkpoint));
    }
    println!("count={}", c.count);
    println!("sum={}", sig17(c.recip_sum));
    Ok(ExitCode::SUCCESS)
}

fn chains(a: ChainArgs) -> anyhow::Result<ExitCode> {
    let pattern = Pattern::chain(a.kind, a.length)?;
    let show = |x: i128| -> anyhow::Result<()> {
        let values = pattern.values(x).context("chain member overflows")?;
        let hit = Hit {
            x,
            values: values.into_iter().map(|v| v as u128).collect(),
        };
        println!("{hit}");
        Ok(())
    };
    if a.first {
        match smallest_chain(a.kind, a.length, a.cap)? {
            Some(x) => {
                show(x)?;
                println!("smallest={x}");
            }
            None => println!("smallest=none"),
        }
        return Ok(ExitCode::SUCCESS);
    }
    let report = apps::chain_search(a.kind, a.length, a.cap, a.workers)?;
    for &x in &report.starts {
        show(x)?;
    }
    println!("count={}", report.starts.len());
    Ok(ExitCode::SUCCESS)
}

fn pseudosquares(a: PsqArgs) -> anyhow::Result<ExitCode> {
    if a.limit.get() > u64::MAX as u128 {
        bail!("limit must fit in 64 bits");
    }
    let text = compute_pseudosquares(a.limit.get()).to_text();
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// `v` with 17 significant digits, in positional notation.
fn sig17(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}
