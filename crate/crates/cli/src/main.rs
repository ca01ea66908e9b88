use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use retina_cc::pipeline::{
    cmd_evaluate, cmd_generate, cmd_run, cmd_sweep_gamma, default_models, expand_models, RunConfig,
    DEFAULT_GAMMAS,
};
use retina_cc::scenesim::SceneKind;
use retina_cc::spatialfilter::{FilterPath, SIGMA_CENTER, SIGMA_SURROUND};
use retina_cc::Error;

const CONFIG_HELP: &str = "\
Config file (--config) is `key = value` text. Top-level keys:
  scene       cartons | red-patches | green-patches
  seed        unsigned integer
  out         output directory
  gammas      comma list of log-encoder gammas (default 0,3,6,9)
  sigma1      center sigma (default 1.057)
  sigma2      surround sigma (default 17.964)
  filter      direct | hdc
  exposures   long,mid,short multipliers (default 1,0.25,0.0625)
  saturation  capture value treated as saturated (default 255)
Each [model.<name>] section adds a model with keys kind (log|nr|linear|gw),
gamma, sigma1, sigma2 and filter. Command-line flags override the file.";

#[derive(Parser)]
#[command(name = "retina-cc", version, about = "Retinex color constancy experiments", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the scene under all 17 illumination conditions
    Generate(Common),
    /// Run the color constancy models over a generated dataset
    Run(Common),
    /// Compute Fisher criteria and histograms from the sample table
    Evaluate(Common),
    /// Fisher criteria of log retinex across a range of gammas
    SweepGamma(Common),
}

#[derive(Args)]
struct Common {
    /// Config file, see --help
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scene: Option<SceneKind>,
    /// Model: log:<gamma>, log (one per --gamma), linear, nr, gw; repeatable
    #[arg(long = "model")]
    models: Vec<String>,
    /// Log-encoder gammas; repeatable or comma separated
    #[arg(long = "gamma", value_delimiter = ',', allow_negative_numbers = true)]
    gammas: Vec<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// direct or hdc
    #[arg(long)]
    filter: Option<FilterPath>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset and output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Saturation threshold of the HDR merge
    #[arg(long, value_parser = clap::value_parser!(u8).range(250..=255))]
    saturation: Option<u8>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(scene) = self.scene {
            cfg.scene = scene;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(s) = self.saturation {
            cfg.saturation = s;
        }
        let touched = !self.models.is_empty()
            || !self.gammas.is_empty()
            || self.sigma1.is_some()
            || self.sigma2.is_some()
            || self.filter.is_some();
        if touched {
            let base = cfg.models.first().copied();
            let sigma1 = self
                .sigma1
                .or(base.map(|m| m.sigma1))
                .unwrap_or(SIGMA_CENTER);
            let sigma2 = self
                .sigma2
                .or(base.map(|m| m.sigma2))
                .unwrap_or(SIGMA_SURROUND);
            let filter = self.filter.or(base.map(|m| m.filter)).unwrap_or_default();
            let gammas = self.gammas();
            cfg.models = if self.models.is_empty() {
                default_models(&gammas, sigma1, sigma2, filter)?
            } else {
                expand_models(&self.models, &gammas, sigma1, sigma2, filter)?
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn gammas(&self) -> Vec<f64> {
        if self.gammas.is_empty() {
            DEFAULT_GAMMAS.to_vec()
        } else {
            self.gammas.clone()
        }
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    let (common, stage) = match &cli.command {
        Command::Generate(c) => (c, "generate"),
        Command::Run(c) => (c, "run"),
        Command::Evaluate(c) => (c, "evaluate"),
        Command::SweepGamma(c) => (c, "sweep-gamma"),
    };
    let cfg = common.resolve().map_err(|e| e.in_stage("config"))?;
    let out = cfg.out.display().to_string();
    match cli.command {
        Command::Generate(_) => {
            let data = cmd_generate(&cfg)?;
            Ok(format!(
                "{stage}: {} conditions written to {out}",
                data.images.len()
            ))
        }
        Command::Run(_) => {
            let samples = cmd_run(&cfg)?;
            Ok(format!(
                "{stage}: {} samples written to {out}/samples.csv",
                samples.len()
            ))
        }
        Command::Evaluate(_) => {
            let eval = cmd_evaluate(&cfg)?;
            Ok(format!(
                "{stage}: {} Fisher values written to {out}/fisher.csv",
                eval.report.rows.len()
            ))
        }
        Command::SweepGamma(ref c) => {
            let csv = cmd_sweep_gamma(&cfg, &c.gammas())?;
            Ok(format!(
                "{stage}: {} rows written to {out}/gamma_sweep.csv",
                csv.lines().count() - 1
            ))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
