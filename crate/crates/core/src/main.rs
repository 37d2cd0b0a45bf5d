use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hmscheme::harness::{
    run_block_powers, run_convergence, run_heat1d, run_hm_error, run_policy_bounds, run_powers,
    run_stability_report, run_sweep_mu, ConvergenceMode, ConvergenceTable, CsvTable, ExperimentConfig,
    LinePlot, PowersResult, ProblemKind, Series,
};
use hmscheme::Error;

#[derive(Parser, Debug)]
#[command(name = "hmscheme", version, about = "Hyperbolic-model scheme experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Block entries and eigenvalues over a range of mu = tau*lambda.
    SweepMu(CommonArgs),
    /// Approximation error of the hyperbolic model and its bound over time.
    HmError(CommonArgs),
    /// Local or global convergence study over halved step sizes.
    Converge {
        #[arg(long, value_enum, default_value_t = Mode::Global)]
        mode: Mode,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Norms of amplification-matrix powers for halved step sizes.
    Powers(CommonArgs),
    /// Norms of 2x2 block powers over mu and the power p.
    BlockPowers(CommonArgs),
    /// Power norms and global convergence for the 1D heat equation.
    Heat1d(CommonArgs),
    /// Eigenvalue-based stability data per mode.
    StabilityReport(CommonArgs),
    /// Largest stable step under different eps policies.
    PolicyBounds(CommonArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Local,
    Global,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
enum Problem {
    #[default]
    Scalar,
    Heat1d,
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Problem::Scalar)]
    problem: Problem,
    #[arg(long, default_value_t = 1e3)]
    lambda: f64,
    #[arg(long, default_value_t = 2e-4)]
    eps: f64,
    #[arg(long, default_value_t = 3e-5)]
    tau: f64,
    #[arg(long = "T", default_value_t = 3e-3)]
    t_final: f64,
    #[arg(long, default_value_t = 100)]
    nx: usize,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    mu_min: Option<f64>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    mu_points: usize,
    #[arg(long, default_value_t = 3)]
    halvings: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot next to each CSV (needs --out).
    #[arg(long)]
    svg: bool,
}

impl CommonArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            problem: match self.problem {
                Problem::Scalar => ProblemKind::Scalar,
                Problem::Heat1d => ProblemKind::Heat1d,
            },
            lambda: self.lambda,
            eps: self.eps,
            tau: self.tau,
            t_final: self.t_final,
            nx: self.nx,
            n_max: self.nmax,
            mu_min: self.mu_min,
            mu_max: self.mu_max,
            mu_points: self.mu_points,
            halvings: self.halvings,
            out: self.out.clone(),
            emit_svg: self.svg,
        }
    }
}

/// `dir/name.csv` -> `dir/name_<suffix>.<ext>`
fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = if suffix.is_empty() {
        format!("{stem}.{ext}")
    } else {
        format!("{stem}_{suffix}.{ext}")
    };
    path.with_file_name(name)
}

struct Output<'a> {
    cfg: &'a ExperimentConfig,
    first: bool,
}

impl Output<'_> {
    fn emit(&mut self, suffix: &str, table: &CsvTable, plot: Option<LinePlot>) -> hmscheme::Result<()> {
        match &self.cfg.out {
            Some(path) => {
                let csv_path = sibling(path, suffix, "csv");
                table.write_path(&csv_path)?;
                eprintln!("wrote {}", csv_path.display());
                if let (true, Some(plot)) = (self.cfg.emit_svg, plot) {
                    let svg_path = sibling(path, suffix, "svg");
                    plot.write_path(&svg_path)?;
                    eprintln!("wrote {}", svg_path.display());
                }
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                if !self.first {
                    writeln!(lock)?;
                }
                table.write_to(&mut lock)?;
            }
        }
        self.first = false;
        Ok(())
    }
}

fn xy(table: &CsvTable, x: &str, y: &str) -> Vec<(f64, f64)> {
    table.column(x).into_iter().zip(table.column(y)).collect()
}

fn convergence_plot(title: &str, table: &ConvergenceTable) -> LinePlot {
    LinePlot {
        title: title.into(),
        x_label: "tau".into(),
        y_label: "relative error".into(),
        log_x: true,
        log_y: true,
        series: vec![Series::new(
            "error",
            table.rows.iter().map(|r| (r.tau, r.error)).collect(),
        )],
    }
}

fn powers_plot(title: &str, res: &PowersResult) -> LinePlot {
    LinePlot {
        title: title.into(),
        x_label: "t".into(),
        y_label: "||S^n||".into(),
        log_x: false,
        log_y: false,
        series: res
            .curves
            .iter()
            .map(|c| {
                Series::new(
                    format!("tau = {:e}", c.tau),
                    c.norms
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| ((i + 1) as f64 * c.tau, v))
                        .collect(),
                )
            })
            .collect(),
    }
}

fn run(cli: Cli) -> hmscheme::Result<()> {
    let common = match &cli.command {
        Command::Converge { common, .. } => common,
        Command::SweepMu(c)
        | Command::HmError(c)
        | Command::Powers(c)
        | Command::BlockPowers(c)
        | Command::Heat1d(c)
        | Command::StabilityReport(c)
        | Command::PolicyBounds(c) => c,
    };
    let cfg = common.config();
    cfg.validate()?;
    let mut out = Output { cfg: &cfg, first: true };

    match cli.command {
        Command::SweepMu(_) => {
            let t = run_sweep_mu(&cfg)?;
            let plot = LinePlot {
                title: format!("block entries, eps_tilde = {:e}", cfg.eps_tilde()),
                x_label: "mu".into(),
                y_label: "value".into(),
                series: ["S11", "S12", "Re_xi1", "Re_xi2", "exp_neg_mu", "implicit_euler"]
                    .iter()
                    .map(|c| Series::new(*c, xy(&t, "mu", c)))
                    .collect(),
                ..Default::default()
            };
            out.emit("", &t, Some(plot))?;
        }
        Command::HmError(_) => {
            let t = run_hm_error(&cfg)?;
            let plot = LinePlot {
                title: "hyperbolic-model error".into(),
                x_label: "t".into(),
                y_label: "error".into(),
                series: ["measured_error", "bound", "eps_y2"]
                    .iter()
                    .map(|c| Series::new(*c, xy(&t, "t", c)))
                    .collect(),
                ..Default::default()
            };
            out.emit("", &t, Some(plot))?;
        }
        Command::Converge { mode, .. } => {
            let mode = match mode {
                Mode::Local => ConvergenceMode::Local,
                Mode::Global => ConvergenceMode::Global,
            };
            let table = run_convergence(&cfg, mode)?;
            let plot = convergence_plot(&format!("{mode:?} error"), &table);
            out.emit("", &table.to_csv(), Some(plot))?;
            eprintln!("fitted order: {:.4}", table.fitted_order()?);
        }
        Command::Powers(_) => {
            let res = run_powers(&cfg)?;
            out.emit("", &res.to_csv(), Some(powers_plot("||S^n||", &res)))?;
            out.emit("summary", &res.summary_csv(), None)?;
        }
        Command::BlockPowers(_) => {
            let t = run_block_powers(&cfg)?;
            let n_max = cfg.steps_for(cfg.tau)? as u64;
            let mut series = Vec::new();
            let mut p = 1u64;
            while p <= n_max {
                let pts = t
                    .rows
                    .iter()
                    .filter(|r| r[1].as_f64() == Some(p as f64))
                    .filter_map(|r| Some((r[0].as_f64()?, r[2].as_f64()?)))
                    .collect();
                series.push(Series::new(format!("p = {p}"), pts));
                p *= 10;
            }
            let plot = LinePlot {
                title: "||S_j^p|| over mu".into(),
                x_label: "mu".into(),
                y_label: "norm".into(),
                log_y: true,
                series,
                ..Default::default()
            };
            out.emit("", &t, Some(plot))?;
        }
        Command::Heat1d(_) => {
            let res = run_heat1d(&cfg)?;
            eprintln!(
                "lambda_max = {:e}, tau_bound = {:e}, stable = {}",
                res.lambda_max, res.samarskii.tau_bound, res.samarskii.stable
            );
            out.emit("powers", &res.powers.to_csv(), Some(powers_plot("heat ||S^n||", &res.powers)))?;
            out.emit("powers_summary", &res.powers.summary_csv(), None)?;
            out.emit(
                "convergence",
                &res.convergence.to_csv(),
                Some(convergence_plot("heat global error", &res.convergence)),
            )?;
        }
        Command::StabilityReport(_) => {
            let (report, t) = run_stability_report(&cfg)?;
            eprintln!(
                "tau_bound = {:e}, stable = {}, spectral_radius = {:e}, max_power_norm = {:e}",
                report.tau_bound, report.stable, report.spectral_radius, report.max_power_norm
            );
            out.emit("", &t, None)?;
        }
        Command::PolicyBounds(_) => {
            out.emit("", &run_policy_bounds(&cfg)?, None)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match &err {
                e if e.is_validation() => 2,
                e if e.is_numerical() => 3,
                Error::Io(_) | Error::Csv(_) => 1,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
