use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use litsel::calculus::Rule;
use litsel::clause::{display_literals, normalize_variables, ClauseId};
use litsel::harness::{collect_problems, emit_table, run_matrix, BenchConfig, TableFormat};
use litsel::saturation::{
    ratio_to_f64, saturate, OrderingOverrides, Origin, SaturationConfig, SaturationResult,
    SelectionPolicy,
};
use litsel::selection::{ForcedSelection, StrategyId};
use litsel::term::TermBank;
use litsel::tptp::{parse_file, parse_literals};

/// Saturation prover for CNF problems with pluggable literal selection.
#[derive(Parser, Debug)]
#[command(name = "litsel", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    prove: ProveArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a strategy matrix over a problem directory and print a summary table.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct OrderingArgs {
    /// Symbol precedence, greatest first (comma separated).
    #[arg(long, value_delimiter = ',')]
    precedence: Vec<String>,

    /// Symbol weight override as `name=weight`; repeatable.
    #[arg(long = "symbol-weight", value_parser = parse_weight)]
    symbol_weights: Vec<(String, u32)>,

    /// Weight of variables in the term ordering.
    #[arg(long)]
    variable_weight: Option<u32>,
}

impl OrderingArgs {
    fn overrides(&self) -> OrderingOverrides {
        OrderingOverrides {
            precedence: self.precedence.clone(),
            weights: self.symbol_weights.clone(),
            variable_weight: self.variable_weight,
        }
    }
}

#[derive(Args, Debug)]
struct ProveArgs {
    /// TPTP CNF problem file.
    file: Option<PathBuf>,

    /// Literal selection strategy number.
    #[arg(long, default_value = "10", value_parser = parse_strategy)]
    selection: StrategyId,

    /// Time limit in seconds.
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,

    /// Passive clause picks by age and by weight, as `a:w`.
    #[arg(long, default_value = "1:5", value_parser = parse_ratio)]
    age_weight_ratio: (u32, u32),

    /// Read every non-equality predicate with inverted polarity.
    #[arg(long)]
    polarity_flip: bool,

    /// Stop after this many activations.
    #[arg(long)]
    max_activations: Option<u64>,

    /// Print run statistics.
    #[arg(long)]
    stats: bool,

    /// Print the refutation.
    #[arg(long)]
    proof: bool,

    /// Extra directory for resolving includes; repeatable.
    #[arg(long)]
    include_dir: Vec<PathBuf>,

    /// Re-check maximality of positive premises after unification.
    #[arg(long)]
    post_unification_check: bool,

    #[command(flatten)]
    ordering: OrderingArgs,

    /// Fixed selection table with lines `lits => lit`; for testing.
    #[arg(long, hide = true)]
    forced_selection: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory searched recursively for `.p` files.
    #[arg(long)]
    problems: PathBuf,

    /// Comma-separated strategy numbers, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_strategies)]
    strategies: StrategyList,

    /// Time limit per run in seconds.
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,

    /// Activation limit per run.
    #[arg(long)]
    max_activations: Option<u64>,

    /// Worker threads (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,

    /// Table layout.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Run every strategy with predicate polarity inverted.
    #[arg(long)]
    polarity_flip: bool,

    /// Extra directory for resolving includes; repeatable.
    #[arg(long)]
    include_dir: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
struct StrategyList(Vec<StrategyId>);

fn parse_strategy(s: &str) -> Result<StrategyId, String> {
    s.parse::<StrategyId>().map_err(|e| e.to_string())
}

fn parse_strategies(s: &str) -> Result<StrategyList, String> {
    if s.trim() == "all" {
        return Ok(StrategyList(StrategyId::all()));
    }
    s.split(',')
        .map(parse_strategy)
        .collect::<Result<Vec<_>, _>>()
        .map(StrategyList)
}

fn parse_ratio(s: &str) -> Result<(u32, u32), String> {
    let (a, w) = s.split_once(':').ok_or("expected `age:weight`")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("bad age part: {e}"))?;
    let w: u32 = w
        .trim()
        .parse()
        .map_err(|e| format!("bad weight part: {e}"))?;
    if a == 0 && w == 0 {
        return Err("ratio needs a positive component".into());
    }
    Ok((a, w))
}

fn parse_weight(s: &str) -> Result<(String, u32), String> {
    let (n, w) = s.split_once('=').ok_or("expected `name=weight`")?;
    let w: u32 = w.trim().parse().map_err(|e| format!("bad weight: {e}"))?;
    Ok((n.trim().to_string(), w))
}

fn seconds(t: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(t).with_context(|| format!("invalid time limit {t}"))
}

fn load_forced(path: &Path, bank: &mut TermBank) -> Result<ForcedSelection> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut table = ForcedSelection::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let (clause, selected) = line.split_once("=>").with_context(|| {
            format!(
                "{}:{}: expected `literals => literal`",
                path.display(),
                n + 1
            )
        })?;
        let lits = parse_literals(bank, clause)
            .with_context(|| format!("{}:{}", path.display(), n + 1))?;
        let lits = normalize_variables(bank, &lits);
        let sel = parse_literals(bank, selected)
            .with_context(|| format!("{}:{}", path.display(), n + 1))?;
        let [sel] = sel[..] else {
            bail!("{}:{}: select exactly one literal", path.display(), n + 1);
        };
        if !lits.contains(&sel) {
            bail!(
                "{}:{}: selected literal is not in the clause",
                path.display(),
                n + 1
            );
        }
        table.add(lits, sel);
    }
    Ok(table)
}

fn prove(args: &ProveArgs) -> Result<()> {
    let Some(file) = &args.file else {
        bail!("no problem file given (see --help)");
    };
    let mut problem = parse_file(file, &args.include_dir)?;
    let mut config = SaturationConfig::new(args.selection);
    if let Some(path) = &args.forced_selection {
        config.selection = SelectionPolicy::Forced(load_forced(path, &mut problem.bank)?);
    }
    config.time_limit = Some(seconds(args.time_limit)?);
    config.age_weight_ratio = args.age_weight_ratio;
    config.polarity_flip = args.polarity_flip;
    config.max_activations = args.max_activations;
    config.post_unification_check = args.post_unification_check;
    config.ordering = args.ordering.overrides();

    let input = problem.literal_lists();
    if input.is_empty() {
        bail!("{}: no clauses", file.display());
    }
    let run = saturate(&mut problem.bank, &input, &config)?;
    println!(
        "% SZS status {} for {}",
        run.result.szs_status(),
        problem.name
    );
    if args.stats {
        let s = &run.stats;
        println!(
            "activations={} avg_children={:.3} pct_incomp={:.3} selection_time_frac={:.3}",
            s.activations,
            ratio_to_f64(s.avg_children()),
            ratio_to_f64(s.pct_incomp()),
            s.selection_time_fraction()
        );
    }
    if let (true, SaturationResult::Unsatisfiable(proof)) = (args.proof, &run.result) {
        let numbers: HashMap<ClauseId, usize> = proof
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id, i + 1))
            .collect();
        for (i, step) in proof.steps.iter().enumerate() {
            let how = match &step.origin {
                Origin::Input(k) => format!("input {}", problem.clauses[*k].name),
                Origin::Inferred { rule, premises, .. } => {
                    let refs: Vec<String> =
                        premises.iter().map(|p| numbers[p].to_string()).collect();
                    format!("{} {}", rule_label(*rule), refs.join(","))
                }
            };
            println!(
                "{}. {} [{}]",
                i + 1,
                display_literals(&problem.bank, &step.literals),
                how
            );
        }
    }
    Ok(())
}

fn rule_label(r: Rule) -> &'static str {
    r.name()
}

fn bench(args: &BenchArgs) -> Result<()> {
    let problems = collect_problems(&args.problems)
        .with_context(|| format!("scanning {}", args.problems.display()))?;
    let mut config = BenchConfig::new(args.strategies.0.clone());
    config.time_limit = Some(seconds(args.time_limit)?);
    config.max_activations = args.max_activations;
    config.jobs = args.jobs;
    config.polarity_flip = args.polarity_flip;
    config.include_dirs = args.include_dir.clone();
    let result = run_matrix(&problems, Some(&args.problems), &config);
    let format = match args.format {
        Format::Text => TableFormat::Text,
        Format::Csv => TableFormat::Csv,
    };
    let table = emit_table(&result, format);
    match &args.out {
        Some(path) => {
            fs::write(path, table).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Some(Command::Bench(b)) => bench(b),
        None => prove(&cli.prove),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("litsel: {e:#}");
            ExitCode::from(1)
        }
    }
}
