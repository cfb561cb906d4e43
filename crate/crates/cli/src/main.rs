use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use corrnet::experiments::{
    run_pipeline, synth_market, ExperimentConfig, PipelineInputs, SynthConfig,
};
use corrnet::filters::{build_pd, build_pmfg, pmfg_edge_count};
use corrnet::infotheory::similarity_matrix_with;
use corrnet::ingest::{load_price_table, log_returns, Binning, PriceFormat, SectorTable};

#[derive(Parser)]
#[command(
    name = "corrnet",
    version,
    about = "Stock-correlation networks from normalized mutual information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    Pd,
    Pmfg,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    /// Clique homogeneity on the full data and random subsets.
    Cliques,
    /// Louvain agreement with sectors over random vertex orders.
    Louvain,
    /// Spectral clustering sweeps over k, full data and subsets.
    Nsc,
    /// Spectral clustering after random edge removal.
    Robustness,
}

impl Analysis {
    fn studies(self) -> &'static [&'static str] {
        match self {
            Self::Cliques => &["subset_homogeneity"],
            Self::Louvain => &["louvain_ari"],
            Self::Nsc => &["nsc_ari_sweep", "subset_ari"],
            Self::Robustness => &["edge_removal"],
        }
    }
}

#[derive(clap::Args)]
struct Inputs {
    /// Price table.
    #[arg(long)]
    input: PathBuf,
    /// `wide` (day,STOCK1,...) or `long` (day,stock,close).
    #[arg(long, default_value = "wide", value_parser = parse::<PriceFormat>)]
    format: PriceFormat,
    /// Sector table with header `stock,sector`.
    #[arg(long)]
    sectors: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build the similarity matrix and filtered networks.
    Build {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "both")]
        filter: Filter,
        /// Bins per return series.
        #[arg(long, default_value_t = 20)]
        q: usize,
        #[arg(long, default_value = "quantile", value_parser = parse::<Binning>)]
        binning: Binning,
        /// PD edge count (default 3n - 6).
        #[arg(long)]
        edges: Option<usize>,
    },
    /// Run one study family.
    Analyze {
        #[arg(value_enum)]
        analysis: Analysis,
        #[command(flatten)]
        inputs: Inputs,
        /// TOML key-value experiment settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every study enabled in the config.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a synthetic market with planted sectors.
    Synth {
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        sectors: usize,
        #[arg(long, default_value_t = 1000)]
        days: usize,
        #[arg(long, default_value_t = 1.0)]
        intra: f64,
        #[arg(long, default_value_t = 0.3)]
        inter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for prices.csv and sectors.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse<T: std::str::FromStr<Err = corrnet::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: corrnet::Error| e.to_string())
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn pipeline_inputs(inputs: &Inputs) -> PipelineInputs {
    PipelineInputs {
        prices: inputs.input.clone(),
        format: inputs.format,
        sectors: inputs.sectors.clone(),
    }
}

fn build(
    inputs: &Inputs,
    filter: Filter,
    q: usize,
    binning: Binning,
    edges: Option<usize>,
) -> Result<()> {
    let load = load_price_table(&inputs.input, inputs.format)?;
    let sim = similarity_matrix_with(&log_returns(&load.prices), q, binning)?;
    let sectors = match &inputs.sectors {
        Some(path) => Some(SectorTable::load(path)?.labels_for(sim.stocks())?),
        None => None,
    };
    let out = &inputs.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    sim.write_csv(&out.join("similarity.csv"))?;

    let mut networks = Vec::new();
    if matches!(filter, Filter::Pd | Filter::Both) {
        let m = edges.unwrap_or_else(|| pmfg_edge_count(sim.n()));
        let pd = build_pd(&sim, m)?;
        if pd.report.shortfall > 0 {
            log::warn!(
                "PD reached {} of {} edges",
                pd.report.realized_edges,
                pd.report.target_edges
            );
        }
        networks.push(("pd", pd.network));
    }
    if matches!(filter, Filter::Pmfg | Filter::Both) {
        networks.push(("pmfg", build_pmfg(&sim)?));
    }
    for (name, mut net) in networks {
        if let Some(labels) = &sectors {
            net.set_sectors(labels.clone())?;
        }
        net.write_vertices(&out.join("vertices.csv"))?;
        net.write_edges(&out.join(format!("network_{name}.csv")))?;
        println!("{name}: {} vertices, {} edges", net.n(), net.edge_count());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            inputs,
            filter,
            q,
            binning,
            edges,
        } => build(&inputs, filter, q, binning, edges),
        Command::Analyze {
            analysis,
            inputs,
            config,
            seed,
        } => {
            let mut cfg = load_config(config.as_deref(), seed)?;
            cfg.studies = analysis.studies().iter().map(|s| s.to_string()).collect();
            run_pipeline(&cfg, &pipeline_inputs(&inputs), &inputs.out)?;
            println!("wrote {}", inputs.out.display());
            Ok(())
        }
        Command::Run {
            inputs,
            config,
            seed,
        } => {
            let cfg = load_config(config.as_deref(), seed)?;
            run_pipeline(&cfg, &pipeline_inputs(&inputs), &inputs.out)?;
            println!("wrote {}", inputs.out.display());
            Ok(())
        }
        Command::Synth {
            n,
            sectors,
            days,
            intra,
            inter,
            seed,
            out,
        } => {
            let market = synth_market(&SynthConfig {
                n,
                sectors,
                days,
                intra,
                inter,
                seed,
                ..SynthConfig::default()
            })?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            market.prices.write_wide(&out.join("prices.csv"))?;
            market.sectors.write(&out.join("sectors.csv"))?;
            println!("wrote {n} stocks x {days} days to {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let validation = err
                .downcast_ref::<corrnet::Error>()
                .is_some_and(corrnet::Error::is_validation);
            ExitCode::from(if validation { 2 } else { 1 })
        }
    }
}
