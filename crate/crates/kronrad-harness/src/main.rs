//! `kronrad` — scenario-driven radar detection experiments.
//!
//! Subcommands: `roc` (synthetic Monte Carlo vs. theory), `heatmap` and
//! `oip` (full simulation chain), `theory` (analytical curves only), and
//! `validate-special-cases` (chain-vs-closed-form reductions).
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kronrad::theory::Detector;
use kronrad_harness::config::{load_scenario, ScenarioConfig};
use kronrad_harness::{emit, realistic, roc, special, HarnessError, Result};

#[derive(Parser)]
#[command(name = "kronrad", version, about = "MIMO-FMCW radar detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Detectors to evaluate (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "clairvoyant,rs,lcmv,gs")]
    detectors: Vec<String>,
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig> {
        let mut cfg = load_scenario(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn detector_list(&self) -> Result<Vec<Detector>> {
        let mut out = Vec::new();
        for name in &self.detectors {
            let det: Detector = name
                .parse()
                .map_err(|e: kronrad::Error| HarnessError::Config(e.to_string()))?;
            if !out.contains(&det) {
                out.push(det);
            }
        }
        if out.is_empty() {
            return Err(HarnessError::Config("no detectors requested".into()));
        }
        Ok(out)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo ROC sweep against theory (synthetic mode).
    Roc(Common),
    /// Range-angle detection heatmaps from the full chain (realistic mode).
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// Doppler bin to probe; defaults to the cell under test.
        #[arg(long)]
        doppler_bin: Option<usize>,
    },
    /// Output-interference-power sweep over random interferer draws
    /// (realistic mode).
    Oip(Common),
    /// Analytical detection curves only, no simulation.
    Theory(Common),
    /// Chain-versus-closed-form checks for the coherent, phased-array, and
    /// TDM limits.
    ValidateSpecialCases {
        /// CPI lengths to sweep (comma-separated).
        #[arg(long, value_delimiter = ',', default_values_t = special::DEFAULT_CPI_LENGTHS)]
        cpi: Vec<usize>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Roc(common) => {
            let cfg = common.scenario()?;
            let detectors = common.detector_list()?;
            let summary = roc::run_roc(&cfg, &detectors)?;
            for c in &summary.curves {
                println!(
                    "{:>12}: lambda = {:.4}, {} trials, {} grid points",
                    c.detector.to_string(),
                    c.lambda,
                    c.trials,
                    c.points.len()
                );
            }
            if summary.rejected_covariances > 0 {
                println!(
                    "note: {} evaluations rejected a perturbed covariance",
                    summary.rejected_covariances
                );
            }
            let path = match common.format {
                Format::Csv => {
                    emit::write_file(&common.out, "roc.csv", &emit::roc_csv(&summary.curves))?
                }
                Format::Svg => {
                    emit::write_file(&common.out, "roc.svg", &emit::roc_svg(&summary.curves))?
                }
            };
            println!("wrote {}", path.display());
        }
        Command::Heatmap { common, doppler_bin } => {
            let cfg = common.scenario()?;
            let detectors = common.detector_list()?;
            let grids = realistic::run_heatmap(&cfg, &detectors, doppler_bin)?;
            for g in &grids {
                let name = format!(
                    "heatmap_{}.{}",
                    g.detector,
                    if common.format == Format::Csv { "csv" } else { "svg" }
                );
                let body = match common.format {
                    Format::Csv => emit::heatmap_csv(g),
                    Format::Svg => emit::heatmap_svg(g),
                };
                let path = emit::write_file(&common.out, &name, &body)?;
                println!(
                    "{:>12}: {} range bins x {} angles -> {}",
                    g.detector,
                    g.rows.len(),
                    g.angles_deg.len(),
                    path.display()
                );
            }
        }
        Command::Oip(common) => {
            let cfg = common.scenario()?;
            let detectors = common.detector_list()?;
            let runs = realistic::run_oip(&cfg, &detectors)?;
            let cdfs = realistic::oip_cdfs(&runs);
            for c in &cdfs {
                println!(
                    "{:>12}: median OIP {:.2} dB, 80th percentile {:.2} dB",
                    c.detector,
                    realistic::percentile(&c.oip_db, 0.5),
                    realistic::percentile(&c.oip_db, 0.8)
                );
            }
            match common.format {
                Format::Csv => {
                    let p1 = emit::write_file(&common.out, "oip.csv", &emit::oip_csv(&runs))?;
                    let p2 =
                        emit::write_file(&common.out, "oip_cdf.csv", &emit::oip_cdf_csv(&cdfs))?;
                    println!("wrote {} and {}", p1.display(), p2.display());
                }
                Format::Svg => {
                    let p = emit::write_file(&common.out, "oip_cdf.svg", &emit::oip_cdf_svg(&cdfs))?;
                    println!("wrote {}", p.display());
                }
            }
        }
        Command::Theory(common) => {
            let cfg = common.scenario()?;
            let detectors = common.detector_list()?;
            let curves = roc::theory_curves(&cfg, &detectors)?;
            for c in &curves {
                println!("{:>12}: lambda = {:.4}", c.detector.to_string(), c.lambda);
            }
            let path = match common.format {
                Format::Csv => {
                    emit::write_file(&common.out, "theory.csv", &emit::theory_csv(&curves))?
                }
                Format::Svg => {
                    emit::write_file(&common.out, "theory.svg", &emit::theory_svg(&curves))?
                }
            };
            println!("wrote {}", path.display());
        }
        Command::ValidateSpecialCases { cpi } => {
            let outcomes = special::run_special_cases(&cpi)?;
            let mut failures = 0usize;
            for o in &outcomes {
                println!(
                    "{} K = {:>4} {}: {}",
                    if o.report.pass { "PASS" } else { "FAIL" },
                    o.pulses,
                    o.mode,
                    o.report
                );
                if !o.report.pass {
                    failures += 1;
                }
            }
            if failures > 0 {
                return Err(HarnessError::Numerical(format!(
                    "{failures} special-case reductions failed"
                )));
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
