//! Command-line surface.
//!
//! Subcommands: `rates`, `sweep`, `evolve`, `oracle`, `compare`,
//! `resonances`. Data goes to `--out` (default standard output); all
//! diagnostics go to standard error. Exit codes: 0 success, 1 validation
//! error, 2 numerical failure, 3 I/O error.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use omcool_core::config::parse_config_into;
use omcool_core::dynamics::{evolve_populations_sampled, PhononDistribution};
use omcool_core::numfmt::sig12;
use omcool_core::oracle::{
    self, EvolveOptions, OperatorSet, QuantumState, SteadyStateOptions, Truncation,
};
use omcool_core::rates::{
    excitation_probability, sideband_rates, thermal_rates, transition_rates, RateError, RateSet,
    ThermalEnv,
};
use omcool_core::sweep::{
    resonance_curves, run_sweep, write_resonance_csv, write_sweep_csv, AxisSpec, Branch,
    SweepGrid,
};
use omcool_core::{OracleError, Pump, SystemParams};

#[derive(Parser, Debug)]
#[command(
    name = "omcool",
    about = "Scattering rates, phonon dynamics, and master-equation checks for an optomechanical cavity coupled to a single two-level emitter (all quantities in units of the mechanical frequency)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Flat key-value parameter file (key = value per line)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Atom-cavity coupling g
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Half the cavity energy loss rate
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Atomic spontaneous decay rate
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Single-photon optomechanical coupling
    #[arg(long, global = true)]
    chi: Option<f64>,
    /// Pump rate / Rabi frequency
    #[arg(long = "omega_drive", global = true)]
    omega_drive: Option<f64>,
    /// Laser-cavity detuning
    #[arg(long = "delta_cav", global = true, allow_hyphen_values = true)]
    delta_cav: Option<f64>,
    /// Laser-atom detuning
    #[arg(long = "delta_atom", global = true, allow_hyphen_values = true)]
    delta_atom: Option<f64>,
    /// Pump scheme: cavity | atom
    #[arg(long, global = true)]
    pump: Option<String>,
}

#[derive(Args, Debug)]
struct IoArgs {
    /// Output destination; `-` writes to standard output
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Worker threads for grid evaluation (0 = automatic); output is
    /// byte-identical for any value
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Accepted for interface stability; every computation here is
    /// deterministic, so the seed is unused
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form transition rates at one parameter point (key = value block)
    Rates(RatesArgs),
    /// Rate maps over a (delta_cav, delta_atom) grid (CSV)
    Sweep(SweepArgs),
    /// Integrate the vibrational rate equation (CSV trajectory)
    Evolve(EvolveArgs),
    /// Master-equation run on the truncated Fock space (CSV + `#` summary)
    Oracle(OracleArgs),
    /// Analytic rates vs the master equation at one point (key = value report)
    Compare(CompareArgs),
    /// Dressed-state resonance curves omega(delta_cav, delta_atom) = target (CSV)
    Resonances(ResonancesArgs),
}

#[derive(Args, Debug)]
struct RatesArgs {
    /// Mechanical bath occupation; together with --gamma_th enables the
    /// thermal block
    #[arg(long = "m_th")]
    m_th: Option<f64>,
    /// Mechanical damping rate
    #[arg(long = "gamma_th")]
    gamma_th: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "delta_cav_min", default_value_t = -5.0, allow_hyphen_values = true)]
    delta_cav_min: f64,
    #[arg(long = "delta_cav_max", default_value_t = 5.0, allow_hyphen_values = true)]
    delta_cav_max: f64,
    #[arg(long = "delta_cav_count", default_value_t = 101)]
    delta_cav_count: usize,
    #[arg(long = "delta_atom_min", default_value_t = -5.0, allow_hyphen_values = true)]
    delta_atom_min: f64,
    #[arg(long = "delta_atom_max", default_value_t = 5.0, allow_hyphen_values = true)]
    delta_atom_max: f64,
    #[arg(long = "delta_atom_count", default_value_t = 101)]
    delta_atom_count: usize,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Initial mechanical Fock level
    #[arg(long, default_value_t = 1)]
    m0: usize,
    /// Ladder truncation M
    #[arg(long, default_value_t = 30)]
    truncation: usize,
    #[arg(long = "t_final", default_value_t = 20.0)]
    t_final: f64,
    /// Integrator step; defaults to a stability-safe value
    #[arg(long)]
    dt: Option<f64>,
    /// Number of sampled rows after the initial one
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long = "n_cav_max", default_value_t = 2)]
    n_cav_max: usize,
    #[arg(long = "n_mech_max", default_value_t = 14)]
    n_mech_max: usize,
    /// Initial mechanical Fock level (atom in |g>, cavity empty)
    #[arg(long, default_value_t = 0)]
    m0: usize,
    #[arg(long = "t_final", default_value_t = 50.0)]
    t_final: f64,
    /// Integrator step for the rk4 method
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Propagation method: rk4 | spectral
    #[arg(long, default_value = "rk4")]
    method: String,
    /// Also locate the stationary state and append its summary
    #[arg(long)]
    steady: bool,
    /// Stationary-state driver: time | linsolve
    #[arg(long = "steady_method", default_value = "time")]
    steady_method: String,
    #[arg(long = "m_th")]
    m_th: Option<f64>,
    #[arg(long = "gamma_th")]
    gamma_th: Option<f64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long = "n_cav_max", default_value_t = 1)]
    n_cav_max: usize,
    #[arg(long = "n_mech_max", default_value_t = 9)]
    n_mech_max: usize,
    /// Initial mechanical Fock level for the relaxation run
    #[arg(long, default_value_t = 3)]
    m0: usize,
    /// How many analytic e-foldings the sampled window spans
    #[arg(long, default_value_t = 3.5)]
    efolds: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long = "m_th")]
    m_th: Option<f64>,
    #[arg(long = "gamma_th")]
    gamma_th: Option<f64>,
}

#[derive(Args, Debug)]
struct ResonancesArgs {
    /// Resonance target for omega_branch(delta_cav, delta_atom)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    target: f64,
    /// plus | minus
    #[arg(long, default_value = "plus")]
    branch: String,
    #[arg(long = "delta_cav_min", default_value_t = -5.0, allow_hyphen_values = true)]
    delta_cav_min: f64,
    #[arg(long = "delta_cav_max", default_value_t = 5.0, allow_hyphen_values = true)]
    delta_cav_max: f64,
    #[arg(long = "delta_cav_count", default_value_t = 201)]
    delta_cav_count: usize,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DimensionLimit { .. }
            | OracleError::BadTruncation
            | OracleError::BadBasisState { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Entry point taking full argv (program name first); returns the exit code.
pub fn cli_main<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap sends --help/--version to stdout and usage errors to
            // stderr on its own; only the exit code needs remapping.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn resolve_params(args: &ParamArgs) -> Result<SystemParams, CliError> {
    let mut params = SystemParams::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        parse_config_into(&mut params, &text).map_err(|e| CliError::Validation(e.to_string()))?;
    }
    if let Some(v) = args.g {
        params.g = v;
    }
    if let Some(v) = args.kappa {
        params.kappa = v;
    }
    if let Some(v) = args.gamma {
        params.gamma = v;
    }
    if let Some(v) = args.chi {
        params.chi = v;
    }
    if let Some(v) = args.omega_drive {
        params.omega_drive = v;
    }
    if let Some(v) = args.delta_cav {
        params.delta_cav = v;
    }
    if let Some(v) = args.delta_atom {
        params.delta_atom = v;
    }
    if let Some(v) = &args.pump {
        params.pump = v.parse::<Pump>().map_err(CliError::Validation)?;
    }
    match params.validate() {
        Err(e) => return Err(CliError::Validation(e.to_string())),
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(params)
}

fn thermal_env(m_th: Option<f64>, gamma_th: Option<f64>) -> Result<Option<ThermalEnv>, CliError> {
    if m_th.is_none() && gamma_th.is_none() {
        return Ok(None);
    }
    let env = ThermalEnv { m_th: m_th.unwrap_or(0.0), gamma_th: gamma_th.unwrap_or(0.0) };
    env.validate().map_err(CliError::Validation)?;
    Ok(Some(env))
}

fn open_output(spec: &str) -> Result<Box<dyn Write>, CliError> {
    if spec == "-" {
        Ok(Box::new(BufWriter::new(io::stdout())))
    } else {
        let file = File::create(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let params = resolve_params(&cli.params)?;
    let mut out = open_output(&cli.io.out)?;
    match &cli.command {
        Command::Rates(args) => cmd_rates(&params, args, &mut out),
        Command::Sweep(args) => cmd_sweep(&params, args, cli.io.threads, &mut out),
        Command::Evolve(args) => cmd_evolve(&params, args, &mut out),
        Command::Oracle(args) => cmd_oracle(&params, args, &mut out),
        Command::Compare(args) => cmd_compare(&params, args, &mut out),
        Command::Resonances(args) => cmd_resonances(&params, args, &mut out),
    }?;
    out.flush()?;
    Ok(())
}

fn write_rate_block(rs: &RateSet, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "s2 = {}", sig12(rs.s2))?;
    writeln!(out, "a2_kappa_plus = {}", sig12(rs.a2_kappa_plus))?;
    writeln!(out, "a2_kappa_minus = {}", sig12(rs.a2_kappa_minus))?;
    writeln!(out, "a2_gamma_plus = {}", sig12(rs.a2_gamma_plus))?;
    writeln!(out, "a2_gamma_minus = {}", sig12(rs.a2_gamma_minus))?;
    writeln!(out, "a_kappa_plus = {}", sig12(rs.a_kappa_plus))?;
    writeln!(out, "a_kappa_minus = {}", sig12(rs.a_kappa_minus))?;
    writeln!(out, "a_gamma_plus = {}", sig12(rs.a_gamma_plus))?;
    writeln!(out, "a_gamma_minus = {}", sig12(rs.a_gamma_minus))?;
    writeln!(out, "a_plus = {}", sig12(rs.a_plus))?;
    writeln!(out, "a_minus = {}", sig12(rs.a_minus))?;
    writeln!(out, "gamma_cool = {}", sig12(rs.gamma_cool))?;
    writeln!(out, "stationary = {}", rs.m_inf.is_some())?;
    if let Some(m_inf) = rs.m_inf {
        writeln!(out, "m_inf = {}", sig12(m_inf))?;
        let sb = sideband_rates(rs, m_inf);
        writeln!(out, "r_kappa_plus = {}", sig12(sb.r_kappa_plus))?;
        writeln!(out, "r_kappa_minus = {}", sig12(sb.r_kappa_minus))?;
        writeln!(out, "r_gamma_plus = {}", sig12(sb.r_gamma_plus))?;
        writeln!(out, "r_gamma_minus = {}", sig12(sb.r_gamma_minus))?;
        writeln!(out, "r_plus = {}", sig12(sb.r_plus))?;
        writeln!(out, "r_minus = {}", sig12(sb.r_minus))?;
    }
    Ok(())
}

fn cmd_rates(params: &SystemParams, args: &RatesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rs = transition_rates(params)?;
    write_rate_block(&rs, out)?;
    if let Some(env) = thermal_env(args.m_th, args.gamma_th)? {
        let th = thermal_rates(&rs, &env);
        writeln!(out, "a_plus_prime = {}", sig12(th.a_plus_prime))?;
        writeln!(out, "a_minus_prime = {}", sig12(th.a_minus_prime))?;
        writeln!(out, "gamma_prime = {}", sig12(th.gamma_prime))?;
        writeln!(out, "stationary_prime = {}", th.m_inf_prime.is_some())?;
        if let Some(m) = th.m_inf_prime {
            writeln!(out, "m_inf_prime = {}", sig12(m))?;
        }
    }
    Ok(())
}

fn cmd_sweep(
    params: &SystemParams,
    args: &SweepArgs,
    threads: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let grid = SweepGrid {
        delta_cav_axis: AxisSpec::new(args.delta_cav_min, args.delta_cav_max, args.delta_cav_count)
            .map_err(|e| CliError::Validation(e.to_string()))?,
        delta_atom_axis: AxisSpec::new(
            args.delta_atom_min,
            args.delta_atom_max,
            args.delta_atom_count,
        )
        .map_err(|e| CliError::Validation(e.to_string()))?,
        base: *params,
    };
    let records = if threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        pool.install(|| run_sweep(&grid))
    } else {
        run_sweep(&grid)
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    write_sweep_csv(&grid, &records, out)?;
    Ok(())
}

fn cmd_evolve(
    params: &SystemParams,
    args: &EvolveArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let rs = transition_rates(params)?;
    let initial = PhononDistribution::fock(args.m0, args.truncation)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let dt = args.dt.unwrap_or_else(|| {
        let scale = args.truncation as f64 * (rs.a_plus + rs.a_minus);
        (0.09 / scale.max(1e-12)).min(args.t_final / args.samples.max(1) as f64).min(0.1)
    });
    let trajectory = evolve_populations_sampled(&rs, &initial, args.t_final, dt, args.samples)
        .map_err(|e| match e {
            omcool_core::DynamicsError::UnstableStep { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        })?;
    let last = trajectory.states.last().unwrap();
    if !last.truncation_adequate() {
        eprintln!(
            "warning: top-level population {} exceeds the adequacy bound; increase --truncation",
            last.top_level_mass()
        );
    }
    trajectory.write_csv(out)?;
    Ok(())
}

fn cmd_oracle(
    params: &SystemParams,
    args: &OracleArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let trunc = Truncation::new(args.n_cav_max, args.n_mech_max)?;
    let env = thermal_env(args.m_th, args.gamma_th)?;
    let rho0 = QuantumState::basis_state(trunc, 0, 0, args.m0)?;
    let ops = OperatorSet::new(trunc);

    match args.method.as_str() {
        "rk4" => {
            let opts = EvolveOptions {
                dt: args.dt,
                samples: args.samples,
                ..EvolveOptions::new(args.t_final)
            };
            let run = oracle::evolve(params, env.as_ref(), trunc, &rho0, &opts)?;
            run.series.write_csv(out)?;
            writeln!(out, "# method = rk4")?;
            writeln!(out, "# dt_used = {}", sig12(run.dt_used))?;
            writeln!(out, "# trace_drift = {}", sig12(run.trace_drift))?;
            write_state_summary("final", &run.final_state, &ops, out)?;
        }
        "spectral" => {
            let samples = args.samples.max(1);
            let times: Vec<f64> =
                (0..=samples).map(|k| args.t_final * k as f64 / samples as f64).collect();
            let run = oracle::evolve_spectral(params, env.as_ref(), trunc, &rho0, &times)?;
            run.series.write_csv(out)?;
            writeln!(out, "# method = spectral")?;
            writeln!(out, "# reconstruction_residual = {}", sig12(run.reconstruction_residual))?;
            if let Some(rate) = run.slow_rate {
                writeln!(out, "# slow_rate = {}", sig12(rate))?;
            }
            write_state_summary("final", &run.final_state, &ops, out)?;
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown method `{other}`; use rk4 or spectral"
            )));
        }
    }

    if args.steady {
        let steady = match args.steady_method.as_str() {
            "time" => oracle::steady_state_evolution(
                params,
                env.as_ref(),
                trunc,
                &rho0,
                &SteadyStateOptions::default(),
            )?,
            "linsolve" => oracle::steady_state_linsolve(params, env.as_ref(), trunc)?,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown steady_method `{other}`; use time or linsolve"
                )));
            }
        };
        write_state_summary("steady", &steady, &ops, out)?;
    }
    Ok(())
}

fn write_state_summary(
    label: &str,
    state: &QuantumState,
    ops: &OperatorSet,
    out: &mut dyn Write,
) -> io::Result<()> {
    writeln!(out, "# {label}_n_cav = {}", sig12(state.expectation(&ops.n_cav).re))?;
    writeln!(out, "# {label}_n_mech = {}", sig12(state.expectation(&ops.n_mech).re))?;
    writeln!(out, "# {label}_p_excited = {}", sig12(state.expectation(&ops.sigma_ee).re))?;
    Ok(())
}

fn cmd_compare(
    params: &SystemParams,
    args: &CompareArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let trunc = Truncation::new(args.n_cav_max, args.n_mech_max)?;
    let env = thermal_env(args.m_th, args.gamma_th)?;
    let rs = transition_rates(params)?;
    let (gamma_ref, m_ref) = match &env {
        Some(env) => {
            let th = thermal_rates(&rs, env);
            (th.gamma_prime, th.m_inf_prime)
        }
        None => (rs.gamma_cool, rs.m_inf),
    };
    if gamma_ref == 0.0 {
        return Err(CliError::Numerical(
            "analytic relaxation rate is zero; nothing to compare against".into(),
        ));
    }

    // Sampling window: a few e-foldings when cooling; when heating, stop
    // once the expected occupation approaches the truncation. The analytic
    // rate only picks the window, never the measured value.
    let t_final = if gamma_ref > 0.0 {
        args.efolds / gamma_ref
    } else {
        let m_tilde = rs.a_plus / -gamma_ref;
        let ceiling = 0.6 * args.n_mech_max as f64;
        let growth = ((ceiling + m_tilde) / (args.m0 as f64 + m_tilde)).max(1.2);
        growth.ln() / -gamma_ref
    };
    let samples = args.samples.max(8);
    let times: Vec<f64> = (0..=samples).map(|k| t_final * k as f64 / samples as f64).collect();

    let rho0 = QuantumState::basis_state(trunc, 0, 0, args.m0)?;
    let run = oracle::evolve_spectral(params, env.as_ref(), trunc, &rho0, &times)?;
    let fit = oracle::fit_cooling_rate(&run.series.times, &run.series.n_mech)
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    writeln!(out, "gamma_analytic = {}", sig12(gamma_ref))?;
    writeln!(out, "gamma_fit = {}", sig12(fit.gamma))?;
    writeln!(out, "sign_match = {}", (fit.gamma > 0.0) == (gamma_ref > 0.0))?;
    writeln!(out, "rel_err_gamma = {}", sig12((fit.gamma - gamma_ref).abs() / gamma_ref.abs()))?;
    writeln!(out, "fit_residual = {}", sig12(fit.residual))?;
    writeln!(out, "fit_flagged = {}", fit.flagged)?;
    if let Some(m_analytic) = m_ref {
        let ops = OperatorSet::new(trunc);
        let m_oracle = run.steady_state.expectation(&ops.n_mech).re;
        writeln!(out, "m_inf_analytic = {}", sig12(m_analytic))?;
        writeln!(out, "m_inf_oracle = {}", sig12(m_oracle))?;
        writeln!(
            out,
            "rel_err_m_inf = {}",
            sig12((m_oracle - m_analytic).abs() / m_analytic.abs().max(1e-300))
        )?;
    }
    writeln!(out, "s2_analytic = {}", sig12(excitation_probability(params)?))?;
    if let Some(rate) = run.slow_rate {
        writeln!(out, "slow_mode_rate = {}", sig12(rate))?;
    }
    writeln!(out, "t_window = {}", sig12(t_final))?;
    Ok(())
}

fn cmd_resonances(
    params: &SystemParams,
    args: &ResonancesArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let branch: Branch = args.branch.parse().map_err(CliError::Validation)?;
    let axis = AxisSpec::new(args.delta_cav_min, args.delta_cav_max, args.delta_cav_count)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let curve = resonance_curves(params, args.target, branch, &axis);
    write_resonance_csv(branch, args.target, &curve, out)?;
    Ok(())
}
