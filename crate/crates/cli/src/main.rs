use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use cvtelefi::error::{CliError, CliResult};
use cvtelefi::eval::{compare, evaluate, sweep, EvalConfig, PathChoice};
use cvtelefi::figure::{figure, Panel};
use cvtelefi::grid::{parse_lam_grid, parse_pair, parse_r_grid, DEFAULT_LAM_GRID, DEFAULT_R_GRID};
use cvtelefi::output::{gnuplot_stub, write_rows, Format};
use cvtelefi::selfcheck;
use cvtelefi_core::closed::bracket_table_export;
use cvtelefi_core::fock::ORACLE_TAIL_EPS;

/// Teleportation fidelity and non-Gaussianity of photon-subtracted
/// two-mode squeezed vacua.
#[derive(Debug, Parser)]
#[command(name = "cvtelefi", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Print the closed-form coefficient table as JSON and exit.
    #[arg(long)]
    export_brackets: bool,

    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<String>,

    /// csv or json. Single-point commands default to json, tables to csv.
    #[arg(long, global = true)]
    format: Option<Format>,

    /// Discarded Fock-tail bound for the oracle path.
    #[arg(long, global = true, default_value_t = ORACLE_TAIL_EPS)]
    tail_eps: f64,

    /// Gauss-Laguerre order of the oracle quadrature.
    #[arg(long, global = true)]
    radial_nodes: Option<usize>,

    /// Angular grid size of the oracle quadrature.
    #[arg(long, global = true)]
    angular_nodes: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CVTELEFI_JOBS")]
    jobs: Option<usize>,

    /// Also write a gnuplot script next to the --out file.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity at one point.
    Fidelity(Point),
    /// Non-Gaussianity (and fidelity) at one point.
    Ng(Point),
    /// Fidelity curves for chosen (m, n) pairs.
    Sweep {
        /// Pairs written m,n.
        #[arg(long, num_args = 1.., required = true)]
        pairs: Vec<String>,
        /// start:stop:count in lam.
        #[arg(long, default_value = DEFAULT_LAM_GRID)]
        lam: String,
        #[arg(long)]
        with_ng: bool,
        #[arg(long, default_value = "auto")]
        path: PathChoice,
    },
    /// Every split of a fixed photon budget, with the best split per lam.
    Compare {
        /// Total number of subtracted photons.
        #[arg(long)]
        total: u32,
        #[arg(long, default_value = DEFAULT_LAM_GRID)]
        lam: String,
        #[arg(long, default_value = "auto")]
        path: PathChoice,
    },
    /// Curve families of one figure panel.
    Figure {
        /// 1a-1d, 2a-2d, 3, 4a-4d.
        which: Panel,
        #[arg(long, default_value = DEFAULT_LAM_GRID)]
        lam: String,
        /// start:stop:count in r, used by the 4x panels.
        #[arg(long, default_value = DEFAULT_R_GRID)]
        r: String,
        /// Comma-separated n values for the 1x panels.
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<u32>>,
        #[arg(long, default_value = "auto")]
        path: PathChoice,
    },
    /// Cross-check the three fidelity paths and the invariant suite.
    Selfcheck {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    lam: f64,
    #[arg(long, default_value = "auto")]
    path: PathChoice,
}

fn open_out(out: &Option<String>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_gnuplot(g: &Global, pairs: &[(u32, u32)], x_col: usize, y_col: usize, x: &str, y: &str) -> CliResult<()> {
    if !g.gnuplot {
        return Ok(());
    }
    let out = g.out.as_ref().ok_or_else(|| CliError::Usage("--gnuplot needs --out".into()))?;
    std::fs::write(format!("{out}.gp"), gnuplot_stub(out, pairs, x_col, y_col, x, y))?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    }
    if !(g.tail_eps > 0.0) {
        return Err(CliError::Usage("--tail-eps must be positive".into()));
    }
    let cfg = EvalConfig { tail_eps: g.tail_eps, radial_nodes: g.radial_nodes, angular_nodes: g.angular_nodes, inject_fault: false };

    if cli.export_brackets {
        let mut w = open_out(&g.out)?;
        serde_json::to_writer_pretty(&mut w, &bracket_table_export())?;
        writeln!(w)?;
        w.flush()?;
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no subcommand given; see --help".into()));
    };

    match command {
        Command::Fidelity(p) | Command::Ng(p) if !p.lam.is_finite() => {
            Err(CliError::Usage(format!("lam must be finite, got {}", p.lam)))
        }
        Command::Fidelity(p) => {
            let rec = evaluate(p.m, p.n, p.lam, p.path, false, &cfg)?;
            let mut w = open_out(&g.out)?;
            single(&mut w, &rec, g.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ng(p) => {
            let rec = evaluate(p.m, p.n, p.lam, p.path, true, &cfg)?;
            let mut w = open_out(&g.out)?;
            single(&mut w, &rec, g.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { pairs, lam, with_ng, path } => {
            let pairs = pairs.iter().map(|p| parse_pair(p)).collect::<CliResult<Vec<_>>>()?;
            let grid = parse_lam_grid(&lam)?;
            let rows = sweep(&pairs, &grid, path, with_ng, &cfg)?;
            write_rows(open_out(&g.out)?, &rows, g.format.unwrap_or(Format::Csv))?;
            write_gnuplot(g, &pairs, 3, 5, "lambda", "F")?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { total, lam, path } => {
            let grid = parse_lam_grid(&lam)?;
            let rows = compare(total, &grid, path, &cfg)?;
            write_rows(open_out(&g.out)?, &rows, g.format.unwrap_or(Format::Csv))?;
            let pairs: Vec<(u32, u32)> = (0..=total / 2).map(|m| (m, total - m)).collect();
            write_gnuplot(g, &pairs, 3, 5, "lambda", "F")?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { which, lam, r, family, path } => {
            let lam_grid = if which.uses_r() { Vec::new() } else { parse_lam_grid(&lam)? };
            let r_grid = if which.uses_r() { parse_r_grid(&r)? } else { Vec::new() };
            let rows = figure(which, &lam_grid, &r_grid, family.as_deref(), path, &cfg)?;
            write_rows(open_out(&g.out)?, &rows, g.format.unwrap_or(Format::Csv))?;
            let pairs = which.pairs(family.as_deref());
            match which {
                Panel::Ng('d') => write_gnuplot(g, &pairs, 6, 5, "nG", "F")?,
                Panel::Ng(_) => write_gnuplot(g, &pairs, 4, 6, "r", "nG")?,
                _ => write_gnuplot(g, &pairs, 3, 5, "lambda", "F")?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selfcheck { inject_fault } => {
            let report = selfcheck::run(&EvalConfig { inject_fault, ..cfg });
            let mut w = open_out(&g.out)?;
            if g.format == Some(Format::Json) {
                serde_json::to_writer_pretty(&mut w, &report)?;
                writeln!(w)?;
            } else {
                for cell in &report.cells {
                    writeln!(w, "{cell}")?;
                }
                let failed = report.cells.iter().filter(|c| c.status == selfcheck::Status::Fail).count();
                writeln!(w, "selfcheck: {} cells, {failed} failed", report.cells.len())?;
            }
            w.flush()?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn single(w: &mut dyn Write, rec: &cvtelefi::SweepRecord, format: Option<Format>) -> CliResult<()> {
    match format.unwrap_or(Format::Json) {
        Format::Json => writeln!(w, "{}", serde_json::to_string(rec)?)?,
        Format::Csv => write_rows(&mut *w, std::slice::from_ref(rec), Format::Csv)?,
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let message = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            eprintln!("{}", CliError::Usage(message.trim_start_matches("error: ").to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
