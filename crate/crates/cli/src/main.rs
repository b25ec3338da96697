use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use lisbt::experiments::{draw_scene, run_realization};
use lisbt_cli::{apply_overrides, checks, load_scenario, run, RunConfig, Scale};

#[derive(Parser)]
#[command(name = "lisbt", version, about = "LISBT channel-estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV and manifest.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long, value_enum)]
        scale: Option<Scale>,
    },
    /// Estimate one realization of a scenario and print the estimates.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Realization index within the seed stream.
        #[arg(long, default_value_t = 0)]
        realization: usize,
        #[arg(long, value_enum)]
        scale: Option<Scale>,
    },
    /// Run the fast self-check suite.
    Validate,
}

fn estimate(config: PathBuf, seed: Option<u64>, index: usize, scale: Option<Scale>) -> anyhow::Result<()> {
    let (_, scn) = load_scenario(&config)?;
    let scn = apply_overrides(scn, scale, seed, None)?;
    let point = scn.at(scn.sweep.values[0])?;
    let (scene, _) = draw_scene(&point, index)?;
    let (a1, a2) = (scene.geom.alpha1(), scene.geom.alpha2());
    println!(
        "user: d0 = {:.3} m, theta = {:.6}, phi = {:.6}, alpha = ({a1:.6}, {a2:.6})",
        scene.geom.d0, scene.geom.theta, scene.geom.phi
    );
    let out = run_realization(&point, index)?;
    println!("optimal rate: {:.6} bit/s/Hz", out.optimal_rate);
    for (kind, rec) in &out.records {
        match rec {
            Ok(r) => println!(
                "{kind:>12}: alpha_hat = ({:.6}, {:.6}), rate = {:.6} bit/s/Hz, pilots = {}",
                a1 + r.error.0,
                a2 + r.error.1,
                r.rate,
                r.pilots
            ),
            Err(e) => println!("{kind:>12}: failed: {e}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep {
            config,
            out,
            seed,
            realizations,
            scale,
        } => run(&RunConfig {
            config,
            out,
            seed,
            realizations,
            scale,
        })
        .map(|o| println!("wrote {} rows to {} ({})", o.rows, o.csv.display(), o.manifest.display())),
        Command::Estimate {
            config,
            seed,
            realization,
            scale,
        } => estimate(config, seed, realization, scale).context("estimate"),
        Command::Validate => {
            let results = checks::run_checks();
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if results.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(anyhow::anyhow!("self-checks failed"))
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
