//! `bnm`: generate, run, glue and search Boolean network machines, and
//! regenerate output-length distributions.
//!
//! Exit codes: 0 success, 1 bad input file or data, 2 bad arguments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use bnm_core::experiments::{
    fig3, fig4, hillclimb_vs_recombination, ExperimentReport, Fig3Config, Fig4Config,
    HillClimbConfig, LengthMode,
};
use bnm_core::format::{
    emit_histogram, parse_document, serialize_bag, serialize_bnm, to_pretty_json, Document,
    HistogramFormat,
};
use bnm_core::search::{hill_climb, run_random_search, run_recombination};
use bnm_core::{
    canonicalize, efficiency_ratio, glue, parse_bits, random_slot, sample_bnm, AcceptRule, Bag,
    BagEntry, Bnm, GlueSlot, RngStream,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bnm", version, about = "Boolean network machine toolkit")]
struct Cli {
    /// Worker threads (0 = one per core). Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Suppress summaries on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random machines into a bag file.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a machine to its state cycle and print its output.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        /// Entry index when the file is a bag.
        #[arg(long)]
        machine: Option<usize>,
        /// Report the unreduced cycle-period output instead of the canonical c-string.
        #[arg(long)]
        raw_cycle: bool,
    },
    /// Print the canonical c-string of a bit string.
    Canon {
        #[arg(long)]
        bits: String,
    },
    /// Feed machine A's output into one input port of machine B.
    Glue {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Port to rewire, as NODE:PORT.
        #[arg(long, value_parser = parse_slot, conflicts_with = "seed", required_unless_present = "seed")]
        slot: Option<GlueSlot>,
        /// Draw the port uniformly at random from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for machines with long outputs.
    Search(SearchArgs),
    /// Regenerate output-length distributions.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Recombine,
    Random,
    Hillclimb,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    #[arg(long)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    min_ratio: f64,
    #[arg(long)]
    max_size: Option<usize>,
    /// Initial bag for recombination; without it one is grown by random search at --size.
    #[arg(long)]
    bag: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for HistogramFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => HistogramFormat::Csv,
            Format::Json => HistogramFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Experiment {
    /// Output lengths of random machines, per size.
    Fig3 {
        #[arg(long, value_delimiter = ',', default_value = "3,6,9")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        tail_threshold: u64,
        #[arg(long)]
        raw_cycle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Glued size-6 machines against random size-6 machines.
    Fig4 {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 100_000)]
        seed_bag_budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        tail_threshold: u64,
        #[arg(long)]
        raw_cycle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hill climbing from random starts against equal-budget recombination.
    Hillclimb {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        size: u64,
        #[arg(long, default_value_t = 1_000)]
        starts: u64,
        #[arg(long, default_value_t = 1_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        min_ratio: f64,
        #[arg(long, default_value_t = 100_000)]
        seed_bag_budget: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_slot(s: &str) -> Result<GlueSlot, String> {
    let (node, port) = s
        .split_once(':')
        .ok_or_else(|| format!("expected NODE:PORT, got {s:?}"))?;
    let node = node
        .parse()
        .map_err(|e| format!("bad node in {s:?}: {e}"))?;
    let port: u8 = port
        .parse()
        .map_err(|e| format!("bad port in {s:?}: {e}"))?;
    if port > 1 {
        return Err(format!("port must be 0 or 1, got {port}"));
    }
    Ok(GlueSlot::new(node, port))
}

/// Failure split by exit code.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<bnm_core::Error> for Failure {
    fn from(e: bnm_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Out {
    quiet: bool,
}

impl Out {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let out = Out { quiet: cli.quiet };
    match &cli.command {
        Command::Gen {
            size,
            count,
            seed,
            out: path,
        } => {
            let rule = AcceptRule::new(0.0, None).map_err(usage)?;
            let (bag, _) =
                run_random_search(*size as usize, *count, &rule, *seed).map_err(usage)?;
            write(path, &serialize_bag(&bag))?;
            out.say(format!(
                "{} distinct machines from {count} samples -> {}",
                bag.len(),
                path.display()
            ));
        }
        Command::Run {
            input,
            machine,
            raw_cycle,
        } => {
            let m = load_machine(input, *machine)?;
            let eval = m.evaluate();
            let (bits, len) = if *raw_cycle {
                let s: String = eval
                    .raw_output
                    .iter()
                    .map(|&b| char::from(b'0' + b))
                    .collect();
                (s, eval.cycle.cycle_len)
            } else {
                (eval.output.to_string(), eval.output.len() as u64)
            };
            println!("size: {}", m.size());
            println!("transient: {}", eval.cycle.transient_len);
            println!("cycle: {}", eval.cycle.cycle_len);
            println!("output: {bits}");
            println!("out_len: {len}");
            println!("ratio: {:.6}", efficiency_ratio(m.size(), len));
        }
        Command::Canon { bits } => {
            let raw = parse_bits(bits).map_err(usage)?;
            let c = canonicalize(&raw).map_err(usage)?;
            println!("{c}");
        }
        Command::Glue {
            a,
            b,
            slot,
            seed,
            out: path,
        } => {
            let a = load_machine(a, None)?;
            let b = load_machine(b, None)?;
            let slot = match (slot, seed) {
                (Some(slot), _) => *slot,
                (None, Some(seed)) => random_slot(&b, &mut RngStream::new(*seed)),
                (None, None) => return Err(usage(anyhow!("one of --slot or --seed is required"))),
            };
            let g = glue(&a, &b, slot).map_err(usage)?;
            write(path, &serialize_bnm(&g))?;
            out.say(format!(
                "glued size {} (slot {}:{}) -> {}",
                g.size(),
                slot.node,
                slot.port,
                path.display()
            ));
        }
        Command::Search(args) => search(args, &out)?,
        Command::Experiment(exp) => experiment(exp, &out)?,
    }
    Ok(())
}

fn search(args: &SearchArgs, out: &Out) -> Result<(), Failure> {
    let size = args.size as usize;
    let rule = AcceptRule::new(args.min_ratio, args.max_size).map_err(usage)?;
    let (bag, summary) = match args.mode {
        Mode::Random => {
            let (bag, stats) = run_random_search(size, args.budget, &rule, args.seed)?;
            (
                bag,
                format!(
                    "{} of {} candidates accepted",
                    stats.accepted(),
                    stats.trials()
                ),
            )
        }
        Mode::Recombine => {
            let initial = match &args.bag {
                Some(path) => match parse_document(&read(path)?, true)
                    .with_context(|| format!("reading {}", path.display()))?
                {
                    Document::Bag(bag) => bag,
                    Document::Machine(m) => {
                        let mut bag = Bag::new();
                        bag.insert(BagEntry::evaluate(m, None, 0));
                        bag
                    }
                },
                None => seed_bag_by_rule(size, args.budget, &rule, args.seed)?,
            };
            if initial.is_empty() {
                return Err(Failure::Data(anyhow!(
                    "initial bag is empty; pass --bag or raise --budget / lower --min-ratio"
                )));
            }
            let start = initial.len();
            let (bag, stats) = run_recombination(initial, args.budget, &rule, args.seed)?;
            (
                bag,
                format!(
                    "{} of {} candidates accepted (bag {start} -> {})",
                    stats.accepted(),
                    stats.trials(),
                    stats.accepted() + start
                ),
            )
        }
        Mode::Hillclimb => {
            let mut rng = RngStream::new(args.seed);
            let start = sample_bnm(size, &mut rng).map_err(usage)?;
            let result = hill_climb(&start, args.budget, &mut rng);
            let summary = format!(
                "{} evaluations, trajectory {:?}, {}; best out_len {} ratio {:.6}{}",
                result.evaluations,
                result.trajectory,
                if result.local_optimum {
                    "local optimum"
                } else {
                    "budget exhausted"
                },
                result.best.out_len,
                result.best.ratio,
                if rule.passes(&result.best) {
                    ""
                } else {
                    " (below --min-ratio)"
                }
            );
            let mut bag = Bag::new();
            bag.insert(result.best);
            (bag, summary)
        }
    };
    write(&args.out, &serialize_bag(&bag))?;
    out.say(summary);
    out.say(format!("{} entries -> {}", bag.len(), args.out.display()));
    Ok(())
}

/// Random machines of `size` that pass `rule`, used when no --bag is given.
fn seed_bag_by_rule(
    size: usize,
    budget: u64,
    rule: &AcceptRule,
    seed: u64,
) -> Result<Bag, Failure> {
    let sub = bnm_core::derive_seed(seed, u64::MAX);
    let (bag, _) = run_random_search(size, budget, rule, sub).map_err(usage)?;
    Ok(bag)
}

fn experiment(exp: &Experiment, out: &Out) -> Result<(), Failure> {
    match exp {
        Experiment::Fig3 {
            sizes,
            trials,
            seed,
            tail_threshold,
            raw_cycle,
            format,
            out: dir,
        } => {
            if sizes.iter().any(|&s| s == 0 || s > 40) {
                return Err(usage(anyhow!("sizes must be in 1..=40")));
            }
            let report = fig3(&Fig3Config {
                sizes: sizes.clone(),
                trials: *trials,
                master_seed: *seed,
                tail_threshold: *tail_threshold,
                length_mode: mode(*raw_cycle),
            })
            .map_err(usage)?;
            write_report(dir, &report, (*format).into(), out)?;
        }
        Experiment::Fig4 {
            trials,
            seed_bag_budget,
            seed,
            tail_threshold,
            raw_cycle,
            format,
            out: dir,
        } => {
            let report = fig4(&Fig4Config {
                trials: *trials,
                master_seed: *seed,
                seed_bag_budget: *seed_bag_budget,
                tail_threshold: *tail_threshold,
                length_mode: mode(*raw_cycle),
                ..Default::default()
            })?;
            write_report(dir, &report, (*format).into(), out)?;
        }
        Experiment::Hillclimb {
            size,
            starts,
            budget,
            seed,
            min_ratio,
            seed_bag_budget,
            out: dir,
        } => {
            AcceptRule::new(*min_ratio, None).map_err(usage)?;
            let report = hillclimb_vs_recombination(&HillClimbConfig {
                size: *size as usize,
                starts: *starts,
                budget_per_start: *budget,
                master_seed: *seed,
                min_ratio: *min_ratio,
                seed_bag_budget: *seed_bag_budget,
            })?;
            create_dir(dir)?;
            let path = dir.join("hillclimb_report.json");
            write(&path, &to_pretty_json(&report))?;
            let h = &report.hill_climb;
            let r = &report.recombination;
            out.say(format!(
                "hill climbing: best ratio {:.6} (out_len {}), mean best out_len {:.3}, {} local optima, monotone {}",
                h.best_ratio, h.best_out_len, h.mean_best_out_len, h.local_optima, h.all_monotone
            ));
            out.say(format!(
                "recombination: best ratio {:.6} (out_len {}), mean out_len {:.3}, {} accepted",
                r.best_ratio, r.best_out_len, r.mean_out_len, r.accepted
            ));
            out.say(format!("report -> {}", path.display()));
        }
    }
    Ok(())
}

fn mode(raw_cycle: bool) -> LengthMode {
    if raw_cycle {
        LengthMode::RawCycle
    } else {
        LengthMode::Canonical
    }
}

/// `<experiment>_<histogram>.<ext>` per histogram plus `<experiment>_report.json`.
fn write_report(
    dir: &Path,
    report: &ExperimentReport,
    format: HistogramFormat,
    out: &Out,
) -> anyhow::Result<()> {
    create_dir(dir)?;
    for (name, h) in &report.histograms {
        let path = dir.join(format!(
            "{}_{name}.{}",
            report.experiment,
            format.extension()
        ));
        write(&path, &emit_histogram(h, format))?;
    }
    let path = dir.join(format!("{}_report.json", report.experiment));
    write(&path, &to_pretty_json(report))?;
    let summaries: BTreeMap<_, _> = report.summaries.iter().collect();
    for (name, s) in summaries {
        out.say(format!(
            "{name}: mean {:.4}, tail(>={}) {:.5}, modal {}, slope {}",
            s.mean,
            report.config.tail_threshold,
            s.tail_mass,
            s.modal_length.map_or("-".into(), |l| l.to_string()),
            s.loglog_slope.map_or("-".into(), |v| format!("{v:.4}")),
        ));
    }
    out.say(format!("report -> {}", path.display()));
    Ok(())
}

fn load_machine(path: &Path, index: Option<usize>) -> anyhow::Result<Bnm> {
    let text = read(path)?;
    let doc = parse_document(&text, true).with_context(|| format!("reading {}", path.display()))?;
    match doc {
        Document::Machine(m) => {
            if index.is_some_and(|i| i != 0) {
                bail!("{} holds a single machine", path.display());
            }
            Ok(m)
        }
        Document::Bag(bag) => {
            let i = index.unwrap_or(0);
            bag.get(i).map(|e| e.machine.clone()).ok_or_else(|| {
                anyhow!(
                    "{} has {} entries; no machine {i}",
                    path.display(),
                    bag.len()
                )
            })
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}
