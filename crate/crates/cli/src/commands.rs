//! Command-line definitions and command implementations.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dilatio::channel::{verify_cptp, CPTP_TOL};
use dilatio::control::{
    build_control_dilation_with, evolve_control, reachable_set, verify_control_dilation,
    ControlSequence, CONTROL_MAX_DIM,
};
use dilatio::cyclic::{
    build_cyclic_dilation_with, detect_cycle, evolve_cyclic, verify_cyclic_dilation, CyclePeriod,
    CYCLE_TOL,
};
use dilatio::semigroup::{
    build_semigroup_dilation_with, evolve, verify_dilation, BuildOptions, SEMIGROUP_MAX_DIM,
};
use dilatio::{KrausChannel, Residual, VerificationReport};
use serde::Serialize;

use crate::error::{CliError, CliResult, Exit};
use crate::fixtures::write_fixtures;
use crate::format::{
    digest_files, emit, read_json, to_json, write_atomic, Bundle, BundleFile, ChannelFile, Mode,
    ReachableEntry, ReportFile, StateFile,
};

/// Environment variable overriding the dilation size guards.
pub const MAX_DIM_ENV: &str = "DILATIO_MAX_DIM";
/// Default tolerance for dilation identities.
pub const DILATION_TOL: f64 = 1e-9;
/// Default number of steps checked for cyclic bundles.
pub const CYCLIC_VERIFY_STEPS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "dilatio",
    version,
    about = "Unitary dilations of quantum-dynamical semigroups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify that a channel file is completely positive and trace preserving.
    Check {
        channel: PathBuf,
        #[arg(long, default_value_t = CPTP_TOL)]
        tol: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a dilation bundle.
    Dilate {
        channel: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Horizon N (semigroup and control modes).
        #[arg(long, allow_negative_numbers = true)]
        steps: Option<i64>,
        /// Second channel (control mode).
        #[arg(long)]
        second: Option<PathBuf>,
        /// Largest period searched in cyclic mode.
        #[arg(long, default_value_t = 16)]
        m_max: usize,
        /// Use this period in cyclic mode instead of detecting one.
        #[arg(long)]
        period: Option<usize>,
        /// Size guard for the dilation unitary; overrides DILATIO_MAX_DIM.
        #[arg(long)]
        max_dim: Option<usize>,
        /// Skip CPTP certification when loading channels.
        #[arg(long)]
        no_verify: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a bundle against its source channel(s).
    Verify {
        bundle: PathBuf,
        channel: PathBuf,
        /// Second channel (control bundles).
        second: Option<PathBuf>,
        #[arg(long, default_value_t = DILATION_TOL)]
        tol: f64,
        /// Number of steps checked for cyclic bundles.
        #[arg(long, allow_negative_numbers = true)]
        steps: Option<i64>,
        #[arg(long)]
        no_verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a state through a bundle.
    Evolve {
        bundle: PathBuf,
        state: PathBuf,
        /// Number of steps (semigroup and cyclic bundles).
        #[arg(long, allow_negative_numbers = true)]
        steps: Option<i64>,
        /// Control word over {T, S} (control bundles).
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the states reachable in N steps under a commuting pair.
    Reachable {
        t: PathBuf,
        s: PathBuf,
        state: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        steps: i64,
        #[arg(long)]
        no_verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the fixture corpus.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

fn steps_arg(steps: Option<i64>, what: &str) -> CliResult<usize> {
    match steps {
        None => Err(CliError::input(format!("--steps is required {what}"))),
        Some(n) if n < 0 => Err(CliError::input(format!(
            "--steps must be nonnegative, got {n}"
        ))),
        Some(n) => Ok(n as usize),
    }
}

fn load_channel(path: &Path, verify: bool) -> CliResult<KrausChannel> {
    let ch = read_json::<ChannelFile>(path)?
        .to_channel()
        .map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))?;
    if verify {
        let report = verify_cptp(&ch, CPTP_TOL)?;
        if !report.accepted() {
            return Err(CliError::precondition(format!(
                "{}: channel rejected (cp={}, tp_or_unital={}, max violation {:.3e})",
                path.display(),
                report.cp,
                report.tp_or_unital,
                report.max_violation
            )));
        }
    }
    Ok(ch)
}

fn load_state(path: &Path) -> CliResult<dilatio::DensityMatrix> {
    read_json::<StateFile>(path)?
        .to_state()
        .map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))
}

fn load_bundle(path: &Path) -> CliResult<Bundle> {
    Bundle::from_file(&read_json::<BundleFile>(path)?).map_err(|e| CliError {
        exit: e.exit,
        message: format!("{}: {}", path.display(), e.message),
    })
}

/// Size limit from the flag, then the environment, if either is set.
fn max_dim_override(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(MAX_DIM_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::input(format!(
                "{MAX_DIM_ENV}: expected a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn report_exit(pass: bool) -> Exit {
    if pass {
        Exit::Pass
    } else {
        Exit::Verification
    }
}

/// Runs a parsed command; the returned code is `Pass` or `Verification`.
pub fn run(cli: Cli) -> CliResult<Exit> {
    match cli.command {
        Command::Check { channel, tol, out } => cmd_check(&channel, tol, out.as_deref()),
        Command::Dilate {
            channel,
            mode,
            steps,
            second,
            m_max,
            period,
            max_dim,
            no_verify,
            out,
        } => cmd_dilate(DilateArgs {
            channel: &channel,
            mode,
            steps,
            second: second.as_deref(),
            m_max,
            period,
            max_dim,
            verify: !no_verify,
            out: &out,
        }),
        Command::Verify {
            bundle,
            channel,
            second,
            tol,
            steps,
            no_verify,
            out,
        } => cmd_verify(
            &bundle,
            &channel,
            second.as_deref(),
            tol,
            steps,
            !no_verify,
            out.as_deref(),
        ),
        Command::Evolve {
            bundle,
            state,
            steps,
            sequence,
            out,
        } => cmd_evolve(&bundle, &state, steps, sequence.as_deref(), out.as_deref()),
        Command::Reachable {
            t,
            s,
            state,
            steps,
            no_verify,
            out,
        } => cmd_reachable(&t, &s, &state, steps, !no_verify, out.as_deref()),
        Command::Fixtures { out } => {
            let manifest = write_fixtures(&out)?;
            eprintln!("wrote {} fixtures to {}", manifest.len(), out.display());
            Ok(Exit::Pass)
        }
    }
}

fn cmd_check(path: &Path, tol: f64, out: Option<&Path>) -> CliResult<Exit> {
    let ch = load_channel(path, false)?;
    let cert = verify_cptp(&ch, tol)?;
    let residuals = vec![
        Residual {
            label: "choi_negativity".into(),
            index: vec![],
            value: (-cert.min_choi_eigenvalue).max(0.0),
        },
        Residual {
            label: "kraus_sum_deviation".into(),
            index: vec![],
            value: cert.kraus_sum_deviation,
        },
    ];
    let report = VerificationReport::new(tol, residuals);
    let mut file = ReportFile::from_report("check", digest_files(&[path])?, &report, None);
    file.cp = Some(cert.cp);
    file.tp_or_unital = Some(cert.tp_or_unital);
    emit(out, &to_json(&file))?;
    Ok(report_exit(cert.accepted()))
}

struct DilateArgs<'a> {
    channel: &'a Path,
    mode: Mode,
    steps: Option<i64>,
    second: Option<&'a Path>,
    m_max: usize,
    period: Option<usize>,
    max_dim: Option<usize>,
    verify: bool,
    out: &'a Path,
}

#[derive(Serialize)]
struct DilateSummary<'a> {
    command: &'static str,
    mode: Mode,
    shape: &'a [usize],
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    out: String,
}

fn cmd_dilate(a: DilateArgs<'_>) -> CliResult<Exit> {
    let t = load_channel(a.channel, a.verify)?;
    let limit = max_dim_override(a.max_dim)?;
    let bundle = match a.mode {
        Mode::Semigroup => {
            let n = steps_arg(a.steps, "in semigroup mode")?;
            let options = BuildOptions {
                max_dim: limit.unwrap_or(SEMIGROUP_MAX_DIM),
            };
            Bundle::Semigroup(build_semigroup_dilation_with(&t, n, options)?)
        }
        Mode::Cyclic => {
            let period = match a.period {
                Some(m) => CyclePeriod::new(m)?,
                None => detect_cycle(&t, a.m_max, CYCLE_TOL)?.ok_or_else(|| {
                    CliError::precondition(format!(
                        "channel is not cyclic with any period up to --m-max {}",
                        a.m_max
                    ))
                })?,
            };
            let options = BuildOptions {
                max_dim: limit.unwrap_or(SEMIGROUP_MAX_DIM),
            };
            Bundle::Cyclic(build_cyclic_dilation_with(&t, period, options)?)
        }
        Mode::Control => {
            let n = steps_arg(a.steps, "in control mode")?;
            let second = a
                .second
                .ok_or_else(|| CliError::input("--second is required in control mode"))?;
            let s = load_channel(second, a.verify)?;
            Bundle::Control(build_control_dilation_with(
                &t,
                &s,
                n,
                limit.unwrap_or(CONTROL_MAX_DIM),
            )?)
        }
    };
    let file = bundle.to_file();
    write_atomic(a.out, to_json(&file).as_bytes())?;
    let summary = DilateSummary {
        command: "dilate",
        mode: a.mode,
        shape: bundle.shape(),
        dimension: bundle.shape().iter().product(),
        horizon: bundle.horizon(),
        period: file.period,
        out: a.out.display().to_string(),
    };
    print!("{}", to_json(&summary));
    Ok(Exit::Pass)
}

fn cmd_verify(
    bundle_path: &Path,
    channel: &Path,
    second: Option<&Path>,
    tol: f64,
    steps: Option<i64>,
    verify: bool,
    out: Option<&Path>,
) -> CliResult<Exit> {
    let bundle = load_bundle(bundle_path)?;
    let t = load_channel(channel, verify)?;
    let mut inputs = vec![bundle_path, channel];
    let report = match &bundle {
        Bundle::Semigroup(b) => verify_dilation(b, &t, tol)?,
        Bundle::Cyclic(b) => {
            let n = match steps {
                None => CYCLIC_VERIFY_STEPS,
                s => steps_arg(s, "")?,
            };
            verify_cyclic_dilation(b, &t, n, tol)?
        }
        Bundle::Control(b) => {
            let second =
                second.ok_or_else(|| CliError::input("control bundles need a second channel"))?;
            inputs.push(second);
            let s = load_channel(second, verify)?;
            verify_control_dilation(b, &t, &s, tol)?
        }
    };
    let file = ReportFile::from_report("verify", digest_files(&inputs)?, &report, bundle.horizon());
    emit(out, &to_json(&file))?;
    for r in report.failures() {
        eprintln!(
            "residual {} = {:.3e} exceeds tolerance {:.1e}",
            r.label, r.value, tol
        );
    }
    Ok(report_exit(report.pass()))
}

fn cmd_evolve(
    bundle_path: &Path,
    state: &Path,
    steps: Option<i64>,
    sequence: Option<&str>,
    out: Option<&Path>,
) -> CliResult<Exit> {
    let bundle = load_bundle(bundle_path)?;
    let rho = load_state(state)?;
    let result = match &bundle {
        Bundle::Semigroup(b) => evolve(b, &rho, steps_arg(steps, "for semigroup bundles")?)?,
        Bundle::Cyclic(b) => evolve_cyclic(b, &rho, steps_arg(steps, "for cyclic bundles")?)?,
        Bundle::Control(b) => {
            let word = sequence
                .ok_or_else(|| CliError::input("--sequence is required for control bundles"))?;
            let seq: ControlSequence = word.parse()?;
            evolve_control(b, &rho, &seq)?
        }
    };
    emit(out, &to_json(&StateFile::from_state(&result)))?;
    Ok(Exit::Pass)
}

fn cmd_reachable(
    t: &Path,
    s: &Path,
    state: &Path,
    steps: i64,
    verify: bool,
    out: Option<&Path>,
) -> CliResult<Exit> {
    let n = steps_arg(Some(steps), "")?;
    let tc = load_channel(t, verify)?;
    let sc = load_channel(s, verify)?;
    let rho = load_state(state)?;
    let entries: Vec<ReachableEntry> = reachable_set(&tc, &sc, &rho, n)?
        .into_iter()
        .map(|r| {
            let f = StateFile::from_state(&r.state);
            ReachableEntry {
                ks: r.ks,
                dim: f.dim,
                matrix: f.matrix,
            }
        })
        .collect();
    emit(out, &to_json(&entries))?;
    Ok(Exit::Pass)
}
