use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::{error, info};
use rayon::prelude::*;

use dnac_core::experiments::{
    compare, plot_rows, run_scenario, write_plot, write_trace_file, ControllerKind, MetricsReport, ScenarioConfig,
};
use dnac_core::Error;

const EXIT_CRASH: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "dnac", version, about = "Quadrotor attitude-control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write report.json, trace.csv and plot.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's controller (pid, mrac, dmrac, dnac).
        #[arg(long)]
        controller: Option<String>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tabulate metrics and percent decreases across saved reports.
    Compare {
        #[arg(long, num_args = 2.., required = true)]
        reports: Vec<PathBuf>,
        /// Also write the comparison as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a scenario for every controller and seed in parallel.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "pid,mrac,dmrac,dnac", value_delimiter = ',')]
        controllers: Vec<String>,
        /// Inclusive range `a..b`, a single seed, or a comma list.
        #[arg(long, default_value = "0..4")]
        seeds: String,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write the per-run trace CSV.
        #[arg(long)]
        traces: bool,
    },
}

/// Failure carrying the process exit code.
struct Exit(u8, anyhow::Error);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        let code = match e.downcast_ref::<Error>() {
            Some(err) => err.exit_code() as u8,
            None => 1,
        };
        Exit(code, e)
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Exit(e.exit_code() as u8, e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DNAC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            controller,
            duration,
            out,
        } => cmd_run(&config, seed, controller.as_deref(), duration, &out),
        Command::Compare { reports, csv } => cmd_compare(&reports, csv.as_deref()),
        Command::Sweep {
            config,
            controllers,
            seeds,
            duration,
            out,
            traces,
        } => cmd_sweep(&config, &controllers, &seeds, duration, &out, traces),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path, seed: Option<u64>, controller: Option<&str>, duration: Option<f64>) -> Result<ScenarioConfig, Exit> {
    let mut cfg = ScenarioConfig::from_file(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(c) = controller {
        cfg.controller = c.parse()?;
    }
    if let Some(d) = duration {
        cfg.duration = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_outputs(dir: &Path, out: &dnac_core::experiments::RunOutput, cfg: &ScenarioConfig, trace: bool) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("report.json"), out.report.to_json()?)?;
    let plot = plot_rows(&out.trace, cfg.warmup, cfg.rms_window);
    write_plot(&plot, fs::File::create(dir.join("plot.csv"))?)?;
    if trace {
        write_trace_file(&out.trace, dir.join("trace.csv"))?;
    }
    if let Some(cp) = out.dnac_checkpoint() {
        fs::write(dir.join("checkpoint.json"), serde_json::to_string(&cp)?)?;
    }
    Ok(())
}

fn summary(r: &MetricsReport) -> String {
    let status = match &r.failure {
        Some(f) => format!("FAILED at {:.3} s: {}", f.time, f.reason),
        None => "ok".into(),
    };
    format!(
        "{:<10} seed {:>3}  attitude {:>7.3} deg  position {:>7.2} cm  velocity {:>7.2} cm/s  passes {:>4}  {status}",
        r.controller, r.seed, r.attitude_l2_deg, r.position_l2_cm, r.velocity_l2_cm_s, r.training.passes
    )
}

fn cmd_run(path: &Path, seed: Option<u64>, controller: Option<&str>, duration: Option<f64>, out: &Path) -> Result<u8, Exit> {
    let cfg = load(path, seed, controller, duration)?;
    let run = run_scenario(&cfg)?;
    write_outputs(out, &run, &cfg, true)?;
    println!("{}", summary(&run.report));
    info!("outputs written to {}", out.display());
    Ok(if run.report.failed() { EXIT_CRASH } else { 0 })
}

fn cmd_compare(paths: &[PathBuf], csv: Option<&Path>) -> Result<u8, Exit> {
    let mut reports = Vec::new();
    for p in paths {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        reports.push(MetricsReport::from_json(&text)?);
    }
    let table = compare(&reports)?;
    print!("{}", table.to_text());
    if let Some(path) = csv {
        fs::write(path, table.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

/// `a..b` (inclusive), `n`, or `a,b,c`.
fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty seed range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<u64>().map_err(anyhow::Error::from))
        .collect()
}

fn cmd_sweep(
    path: &Path,
    controllers: &[String],
    seeds: &str,
    duration: Option<f64>,
    out: &Path,
    traces: bool,
) -> Result<u8, Exit> {
    let base = load(path, None, None, duration)?;
    let seeds = parse_seeds(seeds).map_err(|e| Exit(EXIT_CONFIG, e.context("bad --seeds")))?;
    let kinds = controllers
        .iter()
        .map(|c| c.parse::<ControllerKind>())
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<ScenarioConfig> = seeds
        .iter()
        .flat_map(|&seed| {
            kinds.iter().map(move |&k| (seed, k))
        })
        .map(|(seed, k)| {
            let mut c = base.clone();
            c.seed = seed;
            c.controller = k;
            c
        })
        .collect();
    for c in &jobs {
        c.validate()?;
    }

    let results: Vec<Result<MetricsReport, Exit>> = jobs
        .par_iter()
        .map(|cfg| {
            let run = run_scenario(cfg)?;
            let dir = out.join(format!("{}_seed{}", cfg.controller.name().replace('+', "_"), cfg.seed));
            write_outputs(&dir, &run, cfg, traces)?;
            Ok(run.report)
        })
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }

    for r in &reports {
        println!("{}", summary(r));
    }
    for seed_reports in reports.chunks(kinds.len()) {
        if seed_reports.len() >= 2 {
            let table = compare(seed_reports)?;
            println!("\nseed {}\n{}", seed_reports[0].seed, table.to_text());
            fs::write(out.join(format!("compare_seed{}.csv", seed_reports[0].seed)), table.to_csv()?)
                .context("writing comparison")?;
        }
    }
    Ok(if reports.iter().any(|r| r.failed()) { EXIT_CRASH } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges_are_inclusive() {
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1, 5,9").unwrap(), vec![1, 5, 9]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("a..b").is_err());
    }
}
