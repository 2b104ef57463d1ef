use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use efr::audit::{run_audit, AuditOptions, Status};
use efr::games::{GameKind, GameSpec, PointOrder};
use efr::RmVariant;
use efr_harness::{
    counterexample, parse_key_values, run, summarize, write_csv, write_plots, write_summary, ConfigValues,
    ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "efr", version, about = "EFR experiments, audits and counterexamples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament and write results.csv, summary.csv and learning curves.
    Run(RunArgs),
    /// Check the brute-force audit properties on a small game.
    Audit(AuditArgs),
    /// Play the alternating adversary against a regret-matching variant.
    Counterexample(CounterexampleArgs),
    /// Write a game tree in the text format.
    Export(ExportArgs),
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    game: Option<GameKind>,
    /// Goofspiel card count.
    #[arg(long)]
    ranks: Option<usize>,
    /// Goofspiel point card order: asc, desc or random.
    #[arg(long)]
    order: Option<PointOrder>,
    #[arg(long)]
    players: Option<usize>,
}

impl GameArgs {
    fn spec(&self, default: GameKind) -> Result<GameSpec> {
        Ok(GameSpec::from_parts(self.game.unwrap_or(default), self.ranks, self.order, self.players)?)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    game: GameArgs,
    /// Comma-separated deviation type tokens to evaluate.
    #[arg(long)]
    devtype: Option<String>,
    /// Comma-separated opponent tokens.
    #[arg(long)]
    opponents: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    /// fixed or simultaneous.
    #[arg(long)]
    regime: Option<String>,
    /// rm or rm_plus.
    #[arg(long)]
    rm: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Add the EX+IN variants to the default roster.
    #[arg(long)]
    exin: bool,
    /// Fill elapsed_ns; output is then no longer byte-reproducible.
    #[arg(long)]
    record_time: bool,
}

impl RunArgs {
    fn values(&self) -> ConfigValues {
        let mut v = ConfigValues::new();
        let mut put = |k: &str, x: Option<String>| {
            if let Some(x) = x {
                v.insert(k.to_string(), x);
            }
        };
        put("game", self.game.game.map(|g| g.to_string()));
        put("ranks", self.game.ranks.map(|x| x.to_string()));
        put("order", self.game.order.map(|x| x.to_string()));
        put("players", self.game.players.map(|x| x.to_string()));
        put("devtype", self.devtype.clone());
        put("opponents", self.opponents.clone());
        put("rounds", self.rounds.map(|x| x.to_string()));
        put("regime", self.regime.clone());
        put("rm", self.rm.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("threads", self.threads.map(|x| x.to_string()));
        put("exin", self.exin.then(|| "true".into()));
        put("record_time", self.record_time.then(|| "true".into()));
        v
    }
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Self-play rounds for the regret-bound checks.
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
    /// Random (deviation, profile) pairs for the decomposition check.
    #[arg(long, default_value_t = 50)]
    pairs: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, default_value = "rm_pp")]
    learner: RmVariant,
    #[arg(long, default_value_t = 10_000)]
    rounds: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_command(args: &RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => parse_key_values(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => ConfigValues::new(),
    };
    let cfg = ExperimentConfig::from_values(&[&file, &args.values()])?;
    let rows = run(&cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    write_csv(&cfg.out.join("results.csv"), &rows)?;
    let summary = summarize(&rows);
    write_summary(&cfg.out.join("summary.csv"), &summary)?;
    fs::write(cfg.out.join("config.txt"), cfg.to_key_values())?;
    write_plots(&cfg.out, &rows)?;
    let (scale, unit) = cfg.game.report_unit();
    println!("{} {} regime, {} rounds ({unit})", cfg.game, cfg.regime, cfg.rounds);
    for s in &summary {
        println!("{:>10}  {:.4}", s.variant.token(), s.mean_payoff * scale);
    }
    Ok(())
}

fn audit_command(args: &AuditArgs) -> Result<ExitCode> {
    let spec = args.game.spec(GameKind::Kuhn)?;
    match spec {
        GameSpec::Kuhn => {}
        GameSpec::Goofspiel { ranks, players: 2, .. } if ranks <= 3 => {}
        other => bail!("{other} is too large to audit by enumeration; use kuhn or goofspiel with at most 3 ranks"),
    }
    let game = spec.build()?;
    let options = AuditOptions { seed: args.seed, pairs: args.pairs, rounds: args.rounds, ..AuditOptions::default() };
    let checks = run_audit(&game, &options)?;
    let width = checks.iter().map(|c| c.property.len()).max().unwrap_or(0);
    for c in &checks {
        println!("{}  {:<width$}  {}", c.status, c.property, c.detail);
    }
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn counterexample_command(args: &CounterexampleArgs) {
    let r = counterexample(args.learner, args.rounds);
    let t = r.rounds();
    println!("{} vs the alternating adversary, {t} rounds", r.variant);
    println!("Q^T = {}  T/4 = {}", r.trace.q(), t as f64 / 4.0);
    println!("max cumulative regret = {:.4}", r.trace.regret.last().copied().unwrap_or(0.0));
    match r.first_below_quarter {
        None => println!("Q^t >= t/4 at every round"),
        Some(s) => println!("Q^t < t/4 first at round {s}"),
    }
    match r.first_above_bound {
        None => println!("regret <= 2 sqrt(2t) at every round"),
        Some(s) => println!("regret > 2 sqrt(2t) first at round {s}"),
    }
}

fn export_command(args: &ExportArgs) -> Result<()> {
    let game = args.game.spec(GameKind::Kuhn)?.build()?;
    let text = efr::game::text::to_text(&game);
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(args) => run_command(args)?,
        Command::Audit(args) => return audit_command(args),
        Command::Counterexample(args) => counterexample_command(args),
        Command::Export(args) => export_command(args)?,
    }
    Ok(ExitCode::SUCCESS)
}
