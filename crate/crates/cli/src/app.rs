//! Argument parsing, config merging and dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use snyder_core::{Backend, Component, GridVariant, SnyderParams};

use crate::config::{parse_values, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output;
use crate::sweep::{write_sweep, SweepPlan, Workflow};
use crate::workflows::{self, FockSettings, FourierSettings, GridSettings, SimulateSettings};

const DEFAULT_OUTPUT: &str = "snyder-output";
const DEFAULT_HARMONICS: usize = 9;

#[derive(Debug, Parser)]
#[command(
    name = "snyder",
    version,
    about = "Classical and quantum harmonic oscillator in one-dimensional Snyder space"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Deformation length l (>= 0).
    #[arg(long = "l", global = true, allow_negative_numbers = true)]
    pub l: Option<f64>,
    /// Angular frequency omega (> 0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Mass, quantum workflows only (default 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// TOML run configuration; flags take precedence over its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and evaluate the closed-form trajectory from (q, p) = (1, 0).
    Simulate(SimulateArgs),
    /// Harmonic content of q or p against the perturbation series.
    Fourier(FourierArgs),
    /// Truncated number-basis Hamiltonian and its lowest levels.
    Fock(FockArgs),
    /// Finite-difference spectrum in the auxiliary representation.
    Grid(GridArgs),
    /// Run one workflow over a grid of (l, omega) values.
    Sweep(SweepArgs),
}

#[derive(Debug, Default, Args)]
pub struct SimulateArgs {
    /// Duration in periods [default: 2].
    #[arg(long)]
    pub periods: Option<f64>,
    /// RK4 steps per period [default: 1000].
    #[arg(long)]
    pub steps_per_period: Option<usize>,
    /// End time; overrides --periods.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step; overrides --steps-per-period.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Require the closed-form solution (fails in the cutoff regime).
    #[arg(long)]
    pub closed_form: bool,
    /// Also write a gnuplot script for the plot files.
    #[arg(long)]
    pub plot_script: bool,
}

#[derive(Debug, Default, Args)]
pub struct FourierArgs {
    /// Whole effective periods to integrate (required here or in the config).
    #[arg(long)]
    pub periods: Option<usize>,
    /// Highest harmonic to project on [default: 9].
    #[arg(long)]
    pub harmonics: Option<usize>,
    /// q or p [default: q].
    #[arg(long)]
    pub component: Option<Component>,
    /// RK4 steps per period [default: 1024].
    #[arg(long)]
    pub steps_per_period: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct FockArgs {
    /// Truncation dimension [default: 64].
    #[arg(long)]
    pub dim: Option<usize>,
    /// paper, normal, tilde or tilde-rebased [default: normal].
    #[arg(long)]
    pub backend: Option<Backend>,
    /// Number of levels to report [default: 10].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Also write the matrix as (i, j, value) triples.
    #[arg(long)]
    pub dump_matrix: bool,
}

#[derive(Debug, Default, Args)]
pub struct GridArgs {
    /// Half-width of the auxiliary domain [default: chosen from l].
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Node count including both ends, odd, >= 101.
    #[arg(long)]
    pub points: Option<usize>,
    /// plain or tilde [default: tilde].
    #[arg(long)]
    pub variant: Option<GridVariant>,
    /// Number of levels to report [default: 6].
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// simulate, closed-form, fourier, fock or grid.
    #[arg(long)]
    pub workflow: Option<String>,
    /// Values of l: "a,b,c" or "start:stop:count".
    #[arg(long)]
    pub l_values: Option<String>,
    /// Values of omega: "a,b,c" or "start:stop:count".
    #[arg(long)]
    pub omega_values: Option<String>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Periods for the simulate and fourier workflows.
    #[arg(long)]
    pub periods: Option<f64>,
    /// Levels for the fock and grid workflows.
    #[arg(long)]
    pub levels: Option<usize>,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Parses `args` (program name first) and runs the command, as the binary
/// does.
pub fn run_from<I, T>(args: I, out: &mut impl Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli, out)
}

pub fn run(cli: Cli, out: &mut impl Write) -> CliResult<()> {
    let config = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let dir = cli
        .common
        .output
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    match &cli.command {
        Command::Sweep(args) => run_sweep(&cli.common, args, &config, &dir, out),
        command => {
            let params = resolve_params(&cli.common, &config)?;
            match command {
                Command::Simulate(args) => run_simulate(&params, args, &config, &dir, out),
                Command::Fourier(args) => run_fourier(&params, args, &config, &dir, out),
                Command::Fock(args) => run_fock(&params, args, &config, &dir, out),
                Command::Grid(args) => run_grid(&params, args, &config, &dir, out),
                Command::Sweep(_) => unreachable!(),
            }
        }
    }
}

fn resolve_params(common: &CommonArgs, config: &RunConfig) -> CliResult<SnyderParams> {
    let required = |flag: Option<f64>, key: Option<f64>, name: &str| {
        flag.or(key).ok_or_else(|| {
            CliError::Usage(format!(
                "missing --{name} (or [params] {name} in the config)"
            ))
        })
    };
    let l = required(common.l, config.params.l, "l")?;
    let omega = required(common.omega, config.params.omega, "omega")?;
    let mass = common.mass.or(config.params.mass).unwrap_or(1.0);
    Ok(SnyderParams::new(l, omega, mass)?)
}

fn parse_key<T: std::str::FromStr<Err = String>>(value: Option<&String>) -> CliResult<Option<T>> {
    value
        .map(|s| s.parse().map_err(CliError::Usage))
        .transpose()
}

fn simulate_settings(args: &SimulateArgs, config: &RunConfig) -> SimulateSettings {
    let c = &config.simulate;
    let d = SimulateSettings::default();
    SimulateSettings {
        periods: args.periods.or(c.periods).unwrap_or(d.periods),
        steps_per_period: args
            .steps_per_period
            .or(c.steps_per_period)
            .unwrap_or(d.steps_per_period),
        t_end: args.t_end.or(c.t_end),
        dt: args.dt.or(c.dt),
        closed_form: args.closed_form || c.closed_form.unwrap_or(false),
    }
}

fn fourier_settings(args: &FourierArgs, config: &RunConfig) -> CliResult<FourierSettings> {
    let c = &config.fourier;
    let periods = args.periods.or(c.periods).ok_or_else(|| {
        CliError::Usage("fourier needs --periods (or [fourier] periods in the config)".into())
    })?;
    let component = match args.component {
        Some(component) => component,
        None => parse_key(c.component.as_ref())?.unwrap_or(Component::Q),
    };
    Ok(FourierSettings {
        periods,
        harmonics: args.harmonics.or(c.harmonics).unwrap_or(DEFAULT_HARMONICS),
        component,
        steps_per_period: args
            .steps_per_period
            .or(c.steps_per_period)
            .unwrap_or(snyder_core::harmonics::COMPARE_STEPS_PER_PERIOD),
    })
}

fn fock_settings(args: &FockArgs, config: &RunConfig) -> CliResult<FockSettings> {
    let c = &config.fock;
    let d = FockSettings::default();
    let backend = match args.backend {
        Some(backend) => backend,
        None => parse_key(c.backend.as_ref())?.unwrap_or(d.backend),
    };
    Ok(FockSettings {
        dim: args.dim.or(c.dim).unwrap_or(d.dim),
        backend,
        levels: args.levels.or(c.levels).unwrap_or(d.levels),
    })
}

fn grid_settings(args: &GridArgs, config: &RunConfig) -> CliResult<GridSettings> {
    let c = &config.grid;
    let d = GridSettings::default();
    let variant = match args.variant {
        Some(variant) => variant,
        None => parse_key(c.variant.as_ref())?.unwrap_or(d.variant),
    };
    Ok(GridSettings {
        rho_max: args.rho_max.or(c.rho_max),
        points: args.points.or(c.points),
        variant,
        levels: args.levels.or(c.levels).unwrap_or(d.levels),
    })
}

fn list_written(out: &mut impl Write, paths: &[PathBuf]) -> CliResult<()> {
    for path in paths {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

fn optional(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.12e}"))
}

fn run_simulate(
    params: &SnyderParams,
    args: &SimulateArgs,
    config: &RunConfig,
    dir: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let settings = simulate_settings(args, config);
    let result = workflows::simulate(params, &settings)?;
    let plot_script = args.plot_script || config.simulate.plot_script.unwrap_or(false);
    let written = output::write_simulate(dir, params, &result, plot_script)?;
    writeln!(
        out,
        "regime={} max_drift={:.3e} effective_period={} measured_period={} max_discrepancy={}",
        params.regime(),
        result.max_drift,
        optional(result.effective_period),
        optional(result.measured_period),
        result
            .max_discrepancy
            .map_or_else(|| "n/a".to_string(), |d| format!("{d:.3e}")),
    )?;
    list_written(out, &written)
}

fn run_fourier(
    params: &SnyderParams,
    args: &FourierArgs,
    config: &RunConfig,
    dir: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let settings = fourier_settings(args, config)?;
    let result = workflows::fourier(params, &settings)?;
    let written = output::write_fourier(dir, &result)?;
    writeln!(
        out,
        "component={} fundamental={:.12e} c1={:.12e} c3={:.12e} c3/c1={:.6e} (l^2 omega^2 / 12 = {:.6e}) residual={:.3e}",
        settings.component,
        result.spectrum.fundamental,
        result.coefficient(1),
        result.coefficient(3),
        result.third_to_first(),
        params.deformation() / 12.0,
        result.spectrum.residual,
    )?;
    list_written(out, &written)
}

fn run_fock(
    params: &SnyderParams,
    args: &FockArgs,
    config: &RunConfig,
    dir: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let settings = fock_settings(args, config)?;
    let result = workflows::fock(params, &settings)?;
    let dump = args.dump_matrix || config.fock.dump_matrix.unwrap_or(false);
    let written = output::write_fock(dir, &result, dump)?;
    writeln!(
        out,
        "backend={} dim={} converged={}/{} paper_vs_normal_max_difference={:.6e}",
        settings.backend.name(),
        settings.dim,
        result.spectrum.count_converged(),
        result.spectrum.len(),
        result.backend_difference,
    )?;
    list_written(out, &written)
}

fn run_grid(
    params: &SnyderParams,
    args: &GridArgs,
    config: &RunConfig,
    dir: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let settings = grid_settings(args, config)?;
    let result = workflows::grid(params, &settings)?;
    let written = output::write_grid(dir, &result)?;
    let worst = result.deviations().into_iter().fold(0.0, f64::max);
    writeln!(
        out,
        "variant={} rho_max={} points={} bound_states={} converged={}/{} max_deviation={:.6e}",
        settings.variant,
        result.spec.rho_max(),
        result.spec.points(),
        result.bound_states,
        result.spectrum.count_converged(),
        result.spectrum.len(),
        worst,
    )?;
    list_written(out, &written)
}

fn run_sweep(
    common: &CommonArgs,
    args: &SweepArgs,
    config: &RunConfig,
    dir: &Path,
    out: &mut impl Write,
) -> CliResult<()> {
    let c = &config.sweep;
    let values = |flag: &Option<String>,
                  key: &Option<crate::config::Values>,
                  single: Option<f64>,
                  name: &str| {
        match (flag, key, single) {
            (Some(spec), _, _) => parse_values(spec),
            (None, Some(values), _) => values.resolve(),
            (None, None, Some(v)) => Ok(vec![v]),
            (None, None, None) => Err(CliError::Usage(format!(
                "sweep needs --{name}-values (or [sweep] {name} in the config)"
            ))),
        }
    };
    let l = values(&args.l_values, &c.l, common.l.or(config.params.l), "l")?;
    let omega = values(
        &args.omega_values,
        &c.omega,
        common.omega.or(config.params.omega),
        "omega",
    )?;
    let mass = common.mass.or(config.params.mass).unwrap_or(1.0);

    let name = args
        .workflow
        .clone()
        .or_else(|| c.workflow.clone())
        .ok_or_else(|| CliError::Usage("sweep needs --workflow (or [sweep] workflow)".into()))?;
    let workflow = match name.as_str() {
        "simulate" | "closed-form" => {
            let mut settings = simulate_settings(&SimulateArgs::default(), config);
            settings.closed_form |= name == "closed-form";
            if let Some(p) = args.periods {
                settings.periods = p;
            }
            Workflow::Simulate(settings)
        }
        "fourier" => {
            let periods = args.periods.map(whole_periods).transpose()?;
            let fourier_args = FourierArgs {
                periods,
                ..FourierArgs::default()
            };
            Workflow::Fourier(fourier_settings(&fourier_args, config)?)
        }
        "fock" => {
            let mut settings = fock_settings(&FockArgs::default(), config)?;
            if let Some(levels) = args.levels {
                settings.levels = levels;
            }
            Workflow::Fock(settings)
        }
        "grid" => {
            let mut settings = grid_settings(&GridArgs::default(), config)?;
            if let Some(levels) = args.levels {
                settings.levels = levels;
            }
            Workflow::Grid(settings)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown workflow `{other}` (expected simulate, closed-form, fourier, fock or grid)"
            )))
        }
    };
    let plan = SweepPlan {
        workflow,
        l,
        omega,
        mass,
        jobs: args.jobs.or(c.jobs),
    };
    let results = plan.run()?;
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    let path = write_sweep(dir, &plan, &results)?;
    writeln!(
        out,
        "workflow={} cells={} failed={}",
        plan.workflow.name(),
        results.len(),
        failed
    )?;
    list_written(out, &[path])
}

fn whole_periods(p: f64) -> CliResult<usize> {
    if p >= 1.0 && p.fract() == 0.0 {
        Ok(p as usize)
    } else {
        Err(CliError::Usage(format!(
            "fourier needs a whole number of periods, got {p}"
        )))
    }
}
