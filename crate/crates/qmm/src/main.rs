use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use qmm::config::{Config, Mode};
use qmm::output::fmt_f64;
use qmm::{scenario, Result};

#[derive(Parser)]
#[command(
    name = "qmm",
    version,
    about = "Time-domain simulator for a qubit-dressed transmission line"
)]
struct Cli {
    /// TOML parameter file; scenario defaults fill anything omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Probe coupling mode: "frozen" or "live". Overrides run.mode.
    #[arg(long, global = true, value_name = "MODE")]
    mode: Option<String>,
    /// Accepted for interface stability; runs are deterministic regardless.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a periodic excitation pattern with two counter-propagating pulses.
    Prime,
    /// Scatter a weak probe off a primed register and report transmission.
    Probe,
    /// Bloch bands and gap widths of a periodic susceptibility profile.
    Bands,
    /// Compare driven qubit populations against the flopping formula.
    RabiCheck,
    /// Charge-basis spectrum and cosine matrix elements.
    QubitSpectrum,
    /// Repeat the priming run over a list of parameter values.
    Sweep,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let mode = cli.mode.as_deref().map(Mode::from_str).transpose()?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Prime => {
            let s = scenario::run_prime(&cfg, out)?;
            match &s.period {
                Some(p) => println!(
                    "pattern period {:.4} +- {:.4} sites over {} peaks (spectral cross-check {:.2})",
                    p.period, p.uncertainty, p.n_peaks, p.fft_period
                ),
                None => println!("no period extracted"),
            }
            println!(
                "max excited population {:.6}, worst norm deviation {:.3e}",
                s.max_population, s.norm_deviation
            );
        }
        Command::Probe => {
            let s = scenario::run_probe(&cfg, mode, out)?;
            if let Some(g) = &s.gap {
                println!("fitted first gap [{:.6}, {:.6}]", g.lo, g.hi);
            }
            for r in &s.runs {
                println!(
                    "omega {:.6} [{}]: T = {:.6}, R = {:.6}, loss = {:.6}",
                    r.omega, s.params.mode, r.transmitted, r.reflected, r.loss
                );
            }
        }
        Command::Bands => {
            let s = scenario::run_bands(&cfg, out)?;
            println!(
                "first gap: hill {:.6e}, perturbative {:.6e} (validity {:.1})",
                s.first_gap.hill, s.first_gap.primary, s.first_gap.validity_ratio
            );
            for g in &s.gaps {
                println!("gap {} at omega {:.6}: width {:.6e}", g.index, g.center, g.width);
            }
        }
        Command::RabiCheck => {
            let s = scenario::run_rabi_check(&cfg, out)?;
            println!(
                "max |c1| error {:.6} over {} sample times; node residue {:.3e}",
                s.max_abs_error,
                s.samples.len(),
                s.node_max
            );
        }
        Command::QubitSpectrum => {
            let s = scenario::run_qubit_spectrum(&cfg, out)?;
            println!(
                "splitting/plasma quantum = {}, d00 = {}, |d01| = {:.3e}, d11 = {}",
                fmt_f64(s.spectrum.epsilon_over_omega_j),
                fmt_f64(s.spectrum.d00),
                s.spectrum.d01.abs(),
                fmt_f64(s.spectrum.d11)
            );
        }
        Command::Sweep => {
            let s = scenario::run_sweep(&cfg, out)?;
            for r in &s.rows {
                println!(
                    "value {}: period {}, max population {:.6}",
                    fmt_f64(r.value),
                    fmt_f64(r.period),
                    r.max_population
                );
            }
        }
    }
    println!("artifacts in {}", cli.out.display());
    Ok(())
}
