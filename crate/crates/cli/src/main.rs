mod config;
mod engines;
mod presets;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "tatspin", version, about = "Spin squeezing in long-range XY magnets with a transverse field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a named preset.
    Preset {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List the presets with a description and expected runtime.
    ListPresets,
    /// Check a configuration file without running it.
    Validate {
        config: PathBuf,
        /// Allow dTWA lattices up to L = 90.
        #[arg(long)]
        large: bool,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Allow dTWA lattices up to L = 90.
    #[arg(long)]
    large: bool,
}

fn read_config(path: &Path, large: bool) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExperimentConfig::parse(&text, large).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Writes through a temporary file in the same directory so a crash never
/// leaves a half-written output.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(dir.join(name)).with_context(|| format!("writing {name}"))?;
    Ok(())
}

fn execute(mut config: ExperimentConfig, preset: Option<&str>, opts: &RunOpts) -> Result<()> {
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(n) = opts.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    std::fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;

    let started = SystemTime::now();
    let clock = Instant::now();
    let outcome = engines::run(&config)?;
    let runtime = clock.elapsed().as_secs_f64();

    for (name, contents) in &outcome.files {
        write_atomic(&opts.out, name, contents)?;
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let manifest = json!({
        "name": config.name,
        "preset": preset,
        "config": config,
        "config_toml": config.to_toml(),
        "seed": config.seed,
        "threads": rayon::current_num_threads(),
        "version": env!("CARGO_PKG_VERSION"),
        "build": option_env!("TATSPIN_BUILD_ID").unwrap_or(concat!("tatspin-", env!("CARGO_PKG_VERSION"))),
        "started": humantime::format_rfc3339_seconds(started).to_string(),
        "finished": humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        "runtime_seconds": runtime,
        "warnings": outcome.warnings,
        "files": outcome.files.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "details": outcome.details,
    });
    write_atomic(&opts.out, "manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    eprintln!("wrote {} files to {} in {runtime:.1} s", outcome.files.len() + 1, opts.out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, opts } => execute(read_config(&config, opts.large)?, None, &opts),
        Command::Preset { name, opts } => {
            let preset = presets::find(&name).ok_or_else(|| {
                anyhow!("unknown preset `{name}`; available: {}", presets::names().join(", "))
            })?;
            let config = ExperimentConfig::parse(preset.config, opts.large).map_err(|e| anyhow!("preset {name}: {e}"))?;
            execute(config, Some(preset.name), &opts)
        }
        Command::ListPresets => {
            for p in presets::PRESETS {
                println!("{:<6}  {:<16}  {}", p.name, p.runtime, p.description);
            }
            Ok(())
        }
        Command::Validate { config, large } => {
            let c = read_config(&config, large)?;
            println!("{}: ok ({} engine, {} fields x {} sizes)", config.display(), c.engine.name(), c.fields.len(), c.sizes.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
