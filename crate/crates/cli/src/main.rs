use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fermi_rpa::config::RunConfig;
use fermi_rpa::error_budget::{
    closed_form_lines, epsilon_bounds, ln_crossover, optimal_kernel_magnitudes, BoundLines,
    ErrorBudget,
};
use fermi_rpa::fock::{
    verify_almost_ccr, verify_c_commutator, verify_quadratic_interaction, ModeSet,
    VerificationReport,
};
use fermi_rpa::hf::hf_energy_with;
use fermi_rpa::lattice::{build_fermi_ball, lune_count, nk_asymptotic};
use fermi_rpa::report::{energy_report, format_float, EnergyReport};
use fermi_rpa::rpa_delocalized::{coefficients_for, minimum_energy, second_order_delocalized};
use fermi_rpa::rpa_optimal::{gmb_correlation, second_order_optimal, second_order_ratio};
use fermi_rpa::{Backend, Error, Momentum, Potential};

const THREADS_ENV: &str = "FERMI_RPA_THREADS";

#[derive(Parser)]
#[command(name = "fermi-rpa", version, about = "Delocalized RPA correlation energy of the lattice Fermi gas")]
struct Cli {
    /// Run configuration (JSON); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    DelocalizedExact,
    DelocalizedAsym,
    Optimal,
    SoDeloc,
    SoOpt,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Asymptotic,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-shell Fermi ball summary.
    Ball {
        #[arg(long)]
        n: u64,
    },
    /// Exact and asymptotic n_k as CSV.
    Nk {
        #[arg(long)]
        n: u64,
        /// Potential document; its nonzero support selects the momenta.
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Momenta 0 < |k|² ≤ this when no potential is given.
        #[arg(long, default_value_t = 3)]
        k_max_sq: i64,
    },
    /// Hartree–Fock energy.
    Hf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// Correlation energy by one method.
    Corr {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Full energy report per particle number, CSV on stdout.
    Compare {
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Comma-separated closed-shell sizes; defaults to the configured shell grid.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
        /// Also write the reports as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Log-space error budget.
    Errors {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "asymptotic")]
        backend: BackendArg,
    },
    /// Brute-force operator checks on a truncated mode set.
    Oracle {
        #[arg(long, default_value_t = 7)]
        holes_n: u64,
        #[arg(long, default_value_t = 2)]
        lambda_sq: i64,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, value_parser = parse_momentum, default_value = "1,0,0")]
        k: Momentum,
        #[arg(long, value_parser = parse_momentum)]
        l: Option<Momentum>,
        /// Potential for the quadratic-interaction check; defaults to V = 1 at ±k.
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// Ratio of the delocalized to the optimal second-order coefficient.
    Ratio,
}

fn parse_momentum(s: &str) -> std::result::Result<Momentum, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut c = [0i64; 3];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(Momentum::new(c[0], c[1], c[2]))
}

fn load_potential(path: Option<&Path>) -> Result<Potential> {
    match path {
        None => Ok(Potential::zero(0)),
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Potential::from_json(&bytes)?)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(RunConfig::from_json(&bytes)?)
        }
    }
}

fn print_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn warn_origin(v: &Potential) {
    if v.get(&Momentum::ZERO) != 0.0 {
        eprintln!("warning: V(0) ≠ 0 is excluded from the correlation sums");
    }
}

#[derive(Serialize)]
struct BallSummary {
    n: u64,
    shell_radius_sq: i64,
    hbar: f64,
    kf_continuum: f64,
    kf_lattice: f64,
}

#[derive(Serialize)]
struct ErrorsOutput {
    budget: ErrorBudget,
    /// Closed forms in A₁…A₅ (a bound on each line for V̂ ≥ 0 and the asymptotic kernel).
    closed_form: BoundLines,
    minimum_energy: f64,
    ln_n0: f64,
}

const COMPARE_HEADER: [&str; 13] = [
    "n",
    "hbar",
    "hf_total",
    "corr_delocalized_exact",
    "corr_delocalized_asymptotic",
    "corr_optimal",
    "so_delocalized",
    "so_delocalized_exact",
    "so_optimal",
    "so_ratio",
    "ln_error_total",
    "ln_error_total_times_n",
    "certified",
];

fn compare_row(r: &EnergyReport) -> Vec<String> {
    vec![
        r.n.to_string(),
        format_float(r.hbar),
        format_float(r.hf.total),
        format_float(r.corr_delocalized_exact),
        format_float(r.corr_delocalized_asymptotic),
        format_float(r.corr_optimal),
        format_float(r.so_delocalized),
        format_float(r.so_delocalized_exact),
        format_float(r.so_optimal),
        r.so_ratio.map(format_float).unwrap_or_default(),
        format_float(r.error_budget.ln_total),
        format_float(r.error_budget.ln_total_times_n),
        r.error_budget.certified.to_string(),
    ]
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Ball { n } => {
            let ball = build_fermi_ball(n)?;
            let summary = BallSummary {
                n,
                shell_radius_sq: ball.shell_radius_sq(),
                hbar: ball.params().hbar(),
                kf_continuum: ball.kf_continuum(),
                kf_lattice: (ball.shell_radius_sq() as f64).sqrt(),
            };
            print_json(out, &summary)?;
        }
        Command::Nk { n, potential, k_max_sq } => {
            let ball = build_fermi_ball(n)?;
            let v = load_potential(potential.as_deref())?;
            let ks: Vec<Momentum> = if potential.is_some() {
                v.nonzero_modes().map(|(k, _)| k).collect()
            } else {
                Momentum::ball(k_max_sq).into_iter().filter(|k| !k.is_zero()).collect()
            };
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["k", "n_exact", "n_asym", "rel_err"])?;
            for k in ks {
                let exact = lune_count(&ball, k, false).nk();
                let asym = nk_asymptotic(&ball.params(), k)?;
                w.write_record([
                    k.to_string(),
                    format_float(exact),
                    format_float(asym),
                    format_float((exact - asym).abs() / asym),
                ])?;
            }
            w.flush()?;
        }
        Command::Hf { n, potential } => {
            let ball = build_fermi_ball(n)?;
            let v = load_potential(potential.as_deref())?;
            print_json(out, &hf_energy_with(&ball, &v, &ball.params(), cfg.hf_half_prefactor)?)?;
        }
        Command::Corr { n, potential, method, tol } => {
            let ball = build_fermi_ball(n)?;
            let params = ball.params();
            let v = load_potential(potential.as_deref())?;
            warn_origin(&v);
            let tol = tol.unwrap_or(cfg.tol);
            let value = match method {
                Method::DelocalizedExact => {
                    minimum_energy(&coefficients_for(Backend::Exact(&ball), &v)?)?
                }
                Method::DelocalizedAsym => {
                    minimum_energy(&coefficients_for(Backend::Asymptotic(params), &v)?)?
                }
                Method::Optimal => gmb_correlation(&v, &params, tol)?.total,
                Method::SoDeloc => second_order_delocalized(Backend::Asymptotic(params), &v)?,
                Method::SoOpt => second_order_optimal(&v, &params),
            };
            writeln!(out, "{}", format_float(value))?;
        }
        Command::Compare { potential, n_list, json_out } => {
            let v = load_potential(potential.as_deref())?;
            warn_origin(&v);
            let ns: Vec<u64> = if n_list.is_empty() {
                cfg.shell_grid
                    .iter()
                    .map(|&r| Momentum::ball(r).len() as u64)
                    .collect()
            } else {
                n_list
            };
            let reports = ns
                .iter()
                .map(|&n| energy_report(n, &v, &cfg))
                .collect::<fermi_rpa::Result<Vec<_>>>()?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(COMPARE_HEADER)?;
            for r in &reports {
                w.write_record(compare_row(r))?;
            }
            w.flush()?;
            if let Some(path) = json_out {
                let mut s = serde_json::to_string_pretty(&reports)?;
                s.push('\n');
                fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Errors { n, potential, backend } => {
            let ball = build_fermi_ball(n)?;
            let v = load_potential(potential.as_deref())?;
            let b = match backend {
                BackendArg::Exact => Backend::Exact(&ball),
                BackendArg::Asymptotic => Backend::Asymptotic(ball.params()),
            };
            let xi = optimal_kernel_magnitudes(&v, b)?;
            let budget = epsilon_bounds(b, &v, &xi)?;
            let minimum = minimum_energy(&coefficients_for(b, &v)?)?;
            let output = ErrorsOutput {
                closed_form: closed_form_lines(&budget.constants, n),
                ln_n0: ln_crossover(&budget, minimum),
                minimum_energy: minimum,
                budget,
            };
            print_json(out, &output)?;
        }
        Command::Oracle { holes_n, lambda_sq, pairs, seed, trials, k, l, potential } => {
            let modes = ModeSet::new(holes_n, lambda_sq)?;
            let pairs = pairs.unwrap_or(cfg.max_pairs);
            let seed = seed.unwrap_or(cfg.seed);
            let trials = trials.unwrap_or(cfg.trials);
            let l = l.unwrap_or(k);
            let v = match potential {
                Some(p) => load_potential(Some(&p))?,
                None => Potential::from_entries(k.norm_sq(), [(k, 1.0)])?,
            };
            let reports: Vec<VerificationReport> = vec![
                verify_almost_ccr(&modes, k, l, trials, seed, pairs)?,
                verify_c_commutator(&modes, k, l, trials, seed, pairs)?,
                verify_quadratic_interaction(&modes, &v, pairs)?.report,
            ];
            print_json(out, &reports)?;
            out.flush()?;
            for r in &reports {
                r.ensure()?;
            }
        }
        Command::Ratio => {
            writeln!(out, "{}", format_float(second_order_ratio()))?;
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_numerical() => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(s) = std::env::var(THREADS_ENV) {
        let n: usize = s
            .parse()
            .map_err(|_| anyhow!("{THREADS_ENV} must be a positive integer, got {s:?}"))?;
        if n == 0 {
            bail!("{THREADS_ENV} must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
