use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::error;
use pslet_cli::config::RunConfig;
use pslet_cli::error::{CliError, Result};
use pslet_cli::presets;
use pslet_cli::report::{render, Format, Rendering};
use pslet_cli::run::{failures, run_config, RunFlags};
use pslet_cli::tables::{render_table, run_table, TableOptions};

#[derive(Parser)]
#[command(name = "pslet", version, about = "Shifted-l expansion energies for Dirac and Klein-Gordon radial problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy series, partial sums and Padé values for every configured state.
    Solve(Common),
    /// Reproduce one of the built-in tables next to the printed values.
    Table(Common),
    /// Series against the shooting oracle and any closed form.
    Compare(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration (solve, compare).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Table preset 1..6 (table).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    table: Option<u8>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Number of corrections N.
    #[arg(long)]
    order: Option<usize>,
    /// Padé approximant "i,j"; repeatable.
    #[arg(long, value_parser = parse_pade)]
    pade: Vec<[usize; 2]>,
    /// Also run the shooting oracle.
    #[arg(long)]
    oracle: bool,
    /// Exit with status 3 when a comparison is out of tolerance.
    #[arg(long)]
    check: bool,
    /// Working precision in decimal digits.
    #[arg(long)]
    precision: Option<u32>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Print run metadata to stderr.
    #[arg(long)]
    meta: bool,
}

fn parse_pade(s: &str) -> std::result::Result<[usize; 2], String> {
    let (i, j) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok([p(i)?, p(j)?])
}

fn load(c: &Common) -> Result<RunConfig> {
    let path = c
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("--config is required".into()))?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(n) = c.order {
        cfg.order = n;
    }
    if let Some(d) = c.precision {
        cfg.precision_digits = d;
    }
    if !c.pade.is_empty() {
        cfg.pade = Some(c.pade.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn solve(c: &Common, compare: bool) -> Result<String> {
    let cfg = load(c)?;
    let flags = RunFlags { oracle: c.oracle || compare, jobs: c.jobs };
    let outcomes = run_config(&cfg, flags)?;
    let rd = Rendering { mass: cfg.report_mass, digits: cfg.precision_digits as usize };
    let out = render(&outcomes, c.format, &rd, compare)?;
    print!("{out}");
    if let Some(f) = failures(&outcomes) {
        return Err(CliError::Solver(f));
    }
    if c.check && compare {
        let mut bad = Vec::new();
        for o in &outcomes {
            let Ok(r) = &o.result else { continue };
            let (Some(p), Some(or)) = (r.partial.last(), &r.oracle) else { continue };
            let p = p.to_f64();
            // E can vanish; the mass sets the scale then
            let scale = p.abs().max(cfg.mass()?.to_f64().abs());
            if (p - or.e_num).abs() / scale > cfg.check_tolerance {
                bad.push(format!("(k={}, l={}) pslet {p} vs oracle {}", o.state.k, o.state.ell, or.e_num));
            }
        }
        if !bad.is_empty() {
            return Err(CliError::Check(bad.join("; ")));
        }
    }
    Ok(out)
}

fn table(c: &Common) -> Result<String> {
    let id = c
        .table
        .ok_or_else(|| CliError::Validation("--table is required".into()))?;
    let preset = presets::table(id).expect("id range checked by clap");
    let mut opts = TableOptions {
        flags: RunFlags { oracle: c.oracle, jobs: c.jobs },
        order: c.order,
        precision: c.precision,
        ..TableOptions::default()
    };
    if let Some(cfg) = &preset.config {
        opts.oracle_config = cfg.oracle_config();
    }
    let report = run_table(&preset, &opts)?;
    let out = render_table(&report, c.format)?;
    print!("{out}");
    if !report.errors.is_empty() {
        return Err(CliError::Solver(report.errors.join("; ")));
    }
    if c.check {
        let bad = report.failed_checks();
        if !bad.is_empty() {
            let list: Vec<String> = bad.iter().map(|r| format!("{} {}", r.state, r.quantity)).collect();
            return Err(CliError::Check(format!("out of tolerance: {}", list.join(", "))));
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let started = Instant::now();
    let (name, common, result) = match &cli.command {
        Command::Solve(c) => ("solve", c, solve(c, false)),
        Command::Compare(c) => ("compare", c, solve(c, true)),
        Command::Table(c) => ("table", c, table(c)),
    };
    if common.meta {
        eprintln!(
            "# pslet {} {name}: elapsed {:.3}s, jobs {}, unix time {}",
            env!("CARGO_PKG_VERSION"),
            started.elapsed().as_secs_f64(),
            common.jobs.map_or_else(|| "auto".into(), |j| j.to_string()),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        );
    }
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
