use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use epigrn::ScenarioKind;
use epigrn_cli::attractors::{median_cycle_length, survey, write_survey, SurveySpec};
use epigrn_cli::compare::{cmd_compare, write_comparison};
use epigrn_cli::experiment::{cmd_run, read_summary};
use epigrn_cli::plot::cmd_plot;
use epigrn_cli::{parse_config, ExperimentSpec};

#[derive(Parser)]
#[command(name = "epigrn", version, about = "Evolve Boolean regulatory networks with epigenetic control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write runs.csv and summary.csv
    Run(RunArgs),
    /// Welch-test two run files point by point
    Compare {
        runs_a: PathBuf,
        runs_b: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG charts from a summary.csv
    Plot {
        summary: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// Attractor survey of random classical networks
    Attractors(AttractorArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; omitted keys take their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_parser = parse_kind)]
    kind: Option<ScenarioKind>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    heritable: Option<bool>,
    #[arg(long)]
    reset_states: Option<bool>,
    #[arg(long)]
    heterogeneous: Option<bool>,
    #[arg(long)]
    development: Option<bool>,
    #[arg(long)]
    epigenetics: Option<bool>,
    #[arg(long = "r")]
    r_nodes: Option<usize>,
    #[arg(long = "n")]
    n_traits: Option<usize>,
    #[arg(long = "b", value_delimiter = ',')]
    b_list: Option<Vec<usize>>,
    #[arg(long = "k", value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    #[arg(long = "c", value_delimiter = ',')]
    c_list: Option<Vec<usize>>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    landscapes: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttractorArgs {
    #[arg(long = "b", value_delimiter = ',', default_value = "1,2,3,4,5")]
    b_list: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    genomes: usize,
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    #[arg(long = "r", default_value_t = 100)]
    r_nodes: usize,
    #[arg(long = "n", default_value_t = 10)]
    n_traits: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ScenarioKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown scenario kind {s:?} (static_single, switching, multicell)"))
}

fn build_spec(args: &RunArgs) -> anyhow::Result<ExperimentSpec> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text)?
        }
        None => ExperimentSpec::default(),
    };
    let (sc, ev, pr) = (&mut spec.scenario, &mut spec.evolution, &mut spec.protocol);
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src.clone() {
                $dst = v;
            }
        };
    }
    set!(sc.kind, args.kind);
    set!(sc.cycles, args.cycles);
    if args.heritable.is_some() {
        sc.heritable = args.heritable;
    }
    set!(sc.reset_states, args.reset_states);
    set!(sc.heterogeneous, args.heterogeneous);
    set!(sc.development, args.development);
    set!(ev.epigenetics, args.epigenetics);
    set!(ev.r_nodes, args.r_nodes);
    set!(ev.n_traits, args.n_traits);
    set!(ev.b_list, args.b_list);
    set!(ev.k_list, args.k_list);
    if args.c_list.is_some() {
        ev.c_list = args.c_list.clone();
    }
    set!(ev.generations, args.generations);
    set!(ev.seed, args.seed);
    set!(pr.landscapes_per_point, args.landscapes);
    set!(pr.runs_per_landscape, args.runs);
    set!(spec.output.dir, args.out);
    spec.validate()?;
    Ok(spec)
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let spec = build_spec(&args)?;
            let out = cmd_run(&spec, args.threads)?;
            eprintln!(
                "{} runs written to {} and {}",
                out.results.len(),
                out.runs_csv.display(),
                out.summary_csv.display()
            );
        }
        Command::Compare { runs_a, runs_b, out } => {
            let rows = cmd_compare(&runs_a, &runs_b)?;
            write_comparison(output(&out)?, &rows)?;
        }
        Command::Plot { summary, out } => {
            let rows = read_summary(&summary)?;
            for path in cmd_plot(&rows, &out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Attractors(a) => {
            if a.b_list.is_empty() {
                bail!("--b needs at least one connectivity");
            }
            let spec = SurveySpec {
                r_nodes: a.r_nodes,
                n_traits: a.n_traits,
                b_list: a.b_list.clone(),
                genomes: a.genomes,
                horizon: a.horizon,
                seed: a.seed,
            };
            let rows = survey(&spec)?;
            write_survey(output(&a.out)?, &rows)?;
            for &b in &a.b_list {
                eprintln!("B={b}: median cycle length {:?}", median_cycle_length(&rows, b));
            }
        }
    }
    Ok(())
}
