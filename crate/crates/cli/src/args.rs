//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lhz_core::phasediag::SGrid;
use lhz_core::{ControlPoint, CouplingModel, ScheduleFamily, Temperature};
use serde::Deserialize;

use crate::error::CliError;
use crate::output::{Format, Value};

pub const DEFAULT_J: f64 = 0.5;
pub const DEFAULT_S_MIN: f64 = 0.01;
pub const DEFAULT_S_MAX: f64 = 0.99;
pub const DEFAULT_S_STEP: f64 = 0.002;
pub const DEFAULT_M_POINTS: usize = 2001;
pub const DEFAULT_SIZES: [i64; 6] = [8, 16, 32, 64, 128, 256];

#[derive(Parser, Debug)]
#[command(
    name = "lhz",
    version,
    about = "Mean-field phase diagrams and symmetric-sector spectra of the LHZ annealing Hamiltonian"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Free energy f(m) on an m grid (needs --s, --tau)
    FreeEnergy(Flags),
    /// Stationary points of f(m) with the global minimum marked (needs --s, --tau)
    SolveM(Flags),
    /// First-order transition line tau*(s) over an s grid
    PhaseLine(Flags),
    /// Endpoint of the transition line where the jump vanishes
    CriticalPoint(Flags),
    /// Magnetization jump along the transition line
    JumpProfile(Flags),
    /// Whether tau = s^r crosses, touches or avoids the transition line (needs --r)
    ScheduleCheck(Flags),
    /// Two lowest symmetric-sector levels at one point (needs --N, --s, --tau)
    Gap(Flags),
    /// Minimum gap along tau = s^r for several sizes, with scaling fits (needs --r)
    GapScaling(Flags),
    /// Physical-qubit and constraint counts (needs --Nl)
    LhzCounts(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FreeEnergy,
    SolveM,
    PhaseLine,
    CriticalPoint,
    JumpProfile,
    ScheduleCheck,
    Gap,
    GapScaling,
    LhzCounts,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FreeEnergy => "free-energy",
            Command::SolveM => "solve-m",
            Command::PhaseLine => "phase-line",
            Command::CriticalPoint => "critical-point",
            Command::JumpProfile => "jump-profile",
            Command::ScheduleCheck => "schedule-check",
            Command::Gap => "gap",
            Command::GapScaling => "gap-scaling",
            Command::LhzCounts => "lhz-counts",
        }
    }

    /// Physics keys the command reads, in meta order. Output keys (`out`,
    /// `format`, `threads`, `config`) are accepted everywhere.
    fn keys(self) -> &'static [Key] {
        use Key::*;
        match self {
            Command::FreeEnergy => &[J, Epsilon, Beta, S, Tau, MPoints],
            Command::SolveM => &[J, Epsilon, Beta, S, Tau],
            Command::PhaseLine | Command::CriticalPoint | Command::JumpProfile => {
                &[J, Epsilon, Beta, SMin, SMax, SStep]
            }
            Command::ScheduleCheck => &[R, J, Epsilon, Beta, SMin, SMax, SStep],
            Command::Gap => &[N, J, S, Tau],
            Command::GapScaling => &[R, J, N, FitOut],
            Command::LhzCounts => &[Nl],
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::CriticalPoint | Command::ScheduleCheck | Command::LhzCounts => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    J,
    Epsilon,
    Beta,
    R,
    S,
    Tau,
    N,
    Nl,
    SMin,
    SMax,
    SStep,
    MPoints,
    FitOut,
}

impl Key {
    fn name(self) -> &'static str {
        match self {
            Key::J => "J",
            Key::Epsilon => "epsilon",
            Key::Beta => "beta",
            Key::R => "r",
            Key::S => "s",
            Key::Tau => "tau",
            Key::N => "N",
            Key::Nl => "Nl",
            Key::SMin => "s-min",
            Key::SMax => "s-max",
            Key::SStep => "s-step",
            Key::MPoints => "m-points",
            Key::FitOut => "fit-out",
        }
    }

    const ALL: [Key; 13] = [
        Key::J,
        Key::Epsilon,
        Key::Beta,
        Key::R,
        Key::S,
        Key::Tau,
        Key::N,
        Key::Nl,
        Key::SMin,
        Key::SMax,
        Key::SStep,
        Key::MPoints,
        Key::FitOut,
    ];
}

/// `"inf"` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaArg {
    Inf,
    Finite(f64),
}

impl fmt::Display for BetaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaArg::Inf => f.write_str("inf"),
            BetaArg::Finite(b) => write!(f, "{b}"),
        }
    }
}

fn parse_beta(s: &str) -> Result<BetaArg, String> {
    let b: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("expected a number or \"inf\", got {s:?}"))?;
    Ok(if b == f64::INFINITY {
        BetaArg::Inf
    } else {
        BetaArg::Finite(b)
    })
}

impl<'de> Deserialize<'de> for BetaArg {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(b) => Ok(BetaArg::Finite(b)),
            Raw::Text(s) => parse_beta(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Comma-separated list of system sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<i64>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| format!("expected comma-separated integers, got {s:?}"))
        })
        .collect::<Result<_, _>>()
        .map(Sizes)
}

impl<'de> Deserialize<'de> for Sizes {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(i64),
            Many(Vec<i64>),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::One(n) => Ok(Sizes(vec![n])),
            Raw::Many(ns) => Ok(Sizes(ns)),
            Raw::Text(s) => parse_sizes(&s).map_err(serde::de::Error::custom),
        }
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("expected csv or json, got {s:?}")),
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        parse_format(&s).map_err(serde::de::Error::custom)
    }
}

/// Every flag, all optional. A config file uses the same keys as the long
/// flag names.
#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Coupling strength J > 0 [default: 0.5]
    #[arg(long = "J", allow_negative_numbers = true)]
    #[serde(rename = "J")]
    pub j: Option<f64>,
    /// Weight of +J in the bimodal distribution, in [0, 1]; omit for uniform couplings
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Inverse temperature > 0, or "inf" for zero temperature [default: inf]
    #[arg(long, value_parser = parse_beta, allow_negative_numbers = true)]
    pub beta: Option<BetaArg>,
    /// Schedule exponent r > 0 of tau = s^r
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Control parameter s in [0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Control parameter tau in [0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// System size(s), comma separated [gap-scaling default: 8,16,32,64,128,256]
    #[arg(long = "N", value_parser = parse_sizes, allow_negative_numbers = true)]
    #[serde(rename = "N")]
    pub n: Option<Sizes>,
    /// Number of logical qubits
    #[arg(long = "Nl", allow_negative_numbers = true)]
    #[serde(rename = "Nl")]
    pub nl: Option<i64>,
    /// First s of the grid [default: 0.01]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "s-min")]
    pub s_min: Option<f64>,
    /// Last s of the grid [default: 0.99]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "s-max")]
    pub s_max: Option<f64>,
    /// Spacing of the s grid [default: 0.002]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "s-step")]
    pub s_step: Option<f64>,
    /// Number of m samples over [-1, 1] [default: 2001]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "m-points")]
    pub m_points: Option<i64>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit sidecar for gap-scaling [default: <out stem>.fit.json]
    #[arg(long)]
    #[serde(rename = "fit-out")]
    pub fit_out: Option<PathBuf>,
    /// csv or json
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Worker threads [default: all available]
    #[arg(long, allow_negative_numbers = true)]
    pub threads: Option<i64>,
    /// JSON file with the same keys as the flags; flags win
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fill every unset field from `other`.
    fn or(self, other: Flags) -> Flags {
        Flags {
            j: self.j.or(other.j),
            epsilon: self.epsilon.or(other.epsilon),
            beta: self.beta.or(other.beta),
            r: self.r.or(other.r),
            s: self.s.or(other.s),
            tau: self.tau.or(other.tau),
            n: self.n.or(other.n),
            nl: self.nl.or(other.nl),
            s_min: self.s_min.or(other.s_min),
            s_max: self.s_max.or(other.s_max),
            s_step: self.s_step.or(other.s_step),
            m_points: self.m_points.or(other.m_points),
            out: self.out.or(other.out),
            fit_out: self.fit_out.or(other.fit_out),
            format: self.format.or(other.format),
            threads: self.threads.or(other.threads),
            config: self.config,
        }
    }

    fn is_set(&self, key: Key) -> bool {
        match key {
            Key::J => self.j.is_some(),
            Key::Epsilon => self.epsilon.is_some(),
            Key::Beta => self.beta.is_some(),
            Key::R => self.r.is_some(),
            Key::S => self.s.is_some(),
            Key::Tau => self.tau.is_some(),
            Key::N => self.n.is_some(),
            Key::Nl => self.nl.is_some(),
            Key::SMin => self.s_min.is_some(),
            Key::SMax => self.s_max.is_some(),
            Key::SStep => self.s_step.is_some(),
            Key::MPoints => self.m_points.is_some(),
            Key::FitOut => self.fit_out.is_some(),
        }
    }
}

/// Coupling distribution and temperature of a mean-field run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub couplings: CouplingModel,
    pub temperature: Temperature,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    FreeEnergy {
        physics: Physics,
        control: ControlPoint,
        m_points: usize,
    },
    SolveM {
        physics: Physics,
        control: ControlPoint,
    },
    PhaseLine {
        physics: Physics,
        grid: SGrid,
    },
    CriticalPoint {
        physics: Physics,
        grid: SGrid,
    },
    JumpProfile {
        physics: Physics,
        grid: SGrid,
    },
    ScheduleCheck {
        physics: Physics,
        grid: SGrid,
        family: ScheduleFamily,
    },
    Gap {
        n: usize,
        control: ControlPoint,
        j: f64,
    },
    GapScaling {
        ns: Vec<usize>,
        family: ScheduleFamily,
        j: f64,
    },
    LhzCounts {
        nl: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub job: Job,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub fit_out: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Resolved parameters echoed into JSON outputs.
    pub meta: Value,
}

/// Parse `argv` (including the program name) into a validated config.
///
/// Malformed input (unknown command or flag, unparsable value, unreadable
/// config) is a [`CliError::Usage`]; well-formed values outside their valid
/// range are a [`CliError::Domain`].
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Info(e.render().to_string())
        }
        _ => CliError::Usage(e.render().to_string().trim_end().to_string()),
    })?;
    let (command, flags) = match cli.command {
        Cmd::FreeEnergy(f) => (Command::FreeEnergy, f),
        Cmd::SolveM(f) => (Command::SolveM, f),
        Cmd::PhaseLine(f) => (Command::PhaseLine, f),
        Cmd::CriticalPoint(f) => (Command::CriticalPoint, f),
        Cmd::JumpProfile(f) => (Command::JumpProfile, f),
        Cmd::ScheduleCheck(f) => (Command::ScheduleCheck, f),
        Cmd::Gap(f) => (Command::Gap, f),
        Cmd::GapScaling(f) => (Command::GapScaling, f),
        Cmd::LhzCounts(f) => (Command::LhzCounts, f),
    };
    let flags = match &flags.config {
        Some(path) => {
            let file = load_config(path)?;
            flags.or(file)
        }
        None => flags,
    };
    resolve(command, flags)
}

fn load_config(path: &PathBuf) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

fn domain(flag: &str, e: impl fmt::Display) -> CliError {
    CliError::Domain(format!("invalid --{flag}: {e}"))
}

fn required<T: Clone>(command: Command, key: Key, v: &Option<T>) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::Usage(format!("{} requires --{}", command.name(), key.name())))
}

fn resolve(command: Command, flags: Flags) -> Result<RunConfig, CliError> {
    let keys = command.keys();
    if let Some(k) = Key::ALL
        .iter()
        .find(|k| flags.is_set(**k) && !keys.contains(k))
    {
        return Err(CliError::Usage(format!(
            "--{} is not accepted by {}",
            k.name(),
            command.name()
        )));
    }

    let threads = match flags.threads {
        Some(t) if t < 1 => return Err(domain("threads", format!("must be >= 1, got {t}"))),
        Some(t) => Some(t as usize),
        None => None,
    };

    let j = flags.j.unwrap_or(DEFAULT_J);
    let beta = flags.beta.unwrap_or(BetaArg::Inf);
    let s_min = flags.s_min.unwrap_or(DEFAULT_S_MIN);
    let s_max = flags.s_max.unwrap_or(DEFAULT_S_MAX);
    let s_step = flags.s_step.unwrap_or(DEFAULT_S_STEP);

    let mut meta: Vec<(String, Value)> = vec![("command".into(), Value::str(command.name()))];
    for key in keys {
        let v = match key {
            Key::J => j.into(),
            Key::Epsilon => Value::opt_float(flags.epsilon),
            Key::Beta => match beta {
                BetaArg::Inf => Value::str("inf"),
                BetaArg::Finite(b) => b.into(),
            },
            Key::R => Value::opt_float(flags.r),
            Key::S => Value::opt_float(flags.s),
            Key::Tau => Value::opt_float(flags.tau),
            Key::N => {
                let ns = match &flags.n {
                    Some(Sizes(ns)) => ns.clone(),
                    None if command == Command::GapScaling => DEFAULT_SIZES.to_vec(),
                    None => vec![],
                };
                let ns = ns.into_iter().map(Value::Int).collect();
                Value::List(ns)
            }
            Key::Nl => flags.nl.map_or(Value::Null, Value::Int),
            Key::SMin => s_min.into(),
            Key::SMax => s_max.into(),
            Key::SStep => s_step.into(),
            Key::MPoints => Value::Int(flags.m_points.unwrap_or(DEFAULT_M_POINTS as i64)),
            // output locations do not belong in meta
            Key::FitOut => continue,
        };
        meta.push((key.name().into(), v));
    }
    let format = flags.format.unwrap_or(command.default_format());
    meta.push(("format".into(), Value::str(format.name())));

    let physics = || -> Result<Physics, CliError> {
        let couplings = match flags.epsilon {
            None => CouplingModel::uniform(j).map_err(|e| domain("J", e))?,
            Some(eps) => {
                CouplingModel::uniform(j).map_err(|e| domain("J", e))?;
                CouplingModel::bimodal(j, eps).map_err(|e| domain("epsilon", e))?
            }
        };
        let temperature = match beta {
            BetaArg::Inf => Temperature::Zero,
            BetaArg::Finite(b) => Temperature::finite(b).map_err(|e| domain("beta", e))?,
        };
        Ok(Physics {
            couplings,
            temperature,
        })
    };
    let control = || -> Result<ControlPoint, CliError> {
        let s = required(command, Key::S, &flags.s)?;
        let tau = required(command, Key::Tau, &flags.tau)?;
        ControlPoint::new(s, tau).map_err(|e| {
            let flag = if (0.0..=1.0).contains(&s) { "tau" } else { "s" };
            domain(flag, e)
        })
    };
    let grid = || SGrid::new(s_min, s_max, s_step).map_err(|e| domain("s-min/--s-max/--s-step", e));
    let family = || -> Result<ScheduleFamily, CliError> {
        let r = required(command, Key::R, &flags.r)?;
        ScheduleFamily::new(r).map_err(|e| domain("r", e))
    };
    let positive_j = || -> Result<f64, CliError> {
        CouplingModel::uniform(j).map_err(|e| domain("J", e))?;
        Ok(j)
    };

    let job = match command {
        Command::FreeEnergy => {
            let m_points = flags.m_points.unwrap_or(DEFAULT_M_POINTS as i64);
            if m_points < 2 {
                return Err(domain("m-points", format!("must be >= 2, got {m_points}")));
            }
            Job::FreeEnergy {
                physics: physics()?,
                control: control()?,
                m_points: m_points as usize,
            }
        }
        Command::SolveM => Job::SolveM {
            physics: physics()?,
            control: control()?,
        },
        Command::PhaseLine => Job::PhaseLine {
            physics: physics()?,
            grid: grid()?,
        },
        Command::CriticalPoint => Job::CriticalPoint {
            physics: physics()?,
            grid: grid()?,
        },
        Command::JumpProfile => Job::JumpProfile {
            physics: physics()?,
            grid: grid()?,
        },
        Command::ScheduleCheck => Job::ScheduleCheck {
            family: family()?,
            physics: physics()?,
            grid: grid()?,
        },
        Command::Gap => {
            let Sizes(ns) = required(command, Key::N, &flags.n)?;
            let n = match ns[..] {
                [n] if n >= 1 => n as usize,
                [n] => return Err(domain("N", format!("must be >= 1, got {n}"))),
                _ => return Err(CliError::Usage("gap takes a single --N".into())),
            };
            Job::Gap {
                n,
                j: positive_j()?,
                control: control()?,
            }
        }
        Command::GapScaling => {
            let family = family()?;
            let ns = flags
                .n
                .clone()
                .map_or(DEFAULT_SIZES.to_vec(), |Sizes(ns)| ns);
            if ns.len() < 4 {
                return Err(domain(
                    "N",
                    format!("need at least 4 sizes, got {}", ns.len()),
                ));
            }
            if ns[0] < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(domain(
                    "N",
                    "sizes must be strictly ascending and each >= 2",
                ));
            }
            Job::GapScaling {
                ns: ns.into_iter().map(|n| n as usize).collect(),
                family,
                j: positive_j()?,
            }
        }
        Command::LhzCounts => {
            let nl = required(command, Key::Nl, &flags.nl)?;
            if nl < 2 {
                return Err(domain("Nl", format!("N_l must be >= 2, got {nl}")));
            }
            lhz_core::model::lhz_counts(nl as u64).map_err(|e| domain("Nl", e))?;
            Job::LhzCounts { nl: nl as u64 }
        }
    };

    Ok(RunConfig {
        command,
        job,
        format,
        out: flags.out,
        fit_out: flags.fit_out,
        threads,
        meta: Value::Object(meta),
    })
}
