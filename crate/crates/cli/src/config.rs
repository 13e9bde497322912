//! Argument parsing and resolution for the `rsp` binary.
//!
//! Every subcommand accepts its options either as flags or through a
//! `--config` file holding `key=value` lines (flags win). Resolution turns
//! the raw options into validated channel, target and run parameters;
//! anything inconsistent is a [`CliError::Config`], which the binary maps to
//! exit code 2.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsp_core::nalgebra::DMatrix;
use rsp_core::num_complex::Complex64;
use rsp_core::{random_target, stream_rng, ChannelState, ProtocolKind, TargetState};

/// Stream id reserved for drawing random targets; protocol runs use the
/// low stream ids, so the two never collide.
pub const TARGET_STREAM: u64 = 1 << 62;

const DEFAULT_SHOTS: u64 = 1000;
const DEFAULT_POINTS: usize = 101;
/// Largest register dimension the trace command will print.
const TRACE_DIM_CAP: usize = 8;

/// Deterministic simulator for remote state preparation over entangled
/// d-level channels.
#[derive(Debug, Parser)]
#[command(name = "rsp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the deterministic protocol repeatedly and report statistics.
    RunDrsp(RunArgs),
    /// Run the probabilistic filter-based qubit protocol repeatedly.
    RunConventional(RunArgs),
    /// Sweep channel angles over [0, pi/4] and tabulate both protocols.
    SweepTheta(SweepArgs),
    /// Run both protocols on one configuration and emit a side-by-side table.
    Compare(RunArgs),
    /// Run one protocol instance and dump every intermediate state.
    Trace(TraceArgs),
}

impl Cli {
    /// Where the active subcommand wants its output written, if anywhere.
    pub fn out_path(&self) -> Option<&Path> {
        match &self.command {
            Command::RunDrsp(a) | Command::RunConventional(a) | Command::Compare(a) => {
                a.out.as_deref()
            }
            Command::SweepTheta(a) => a.out.as_deref(),
            Command::Trace(a) => a.out.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolChoice {
    Drsp,
    Conventional,
}

impl ProtocolChoice {
    pub fn kind(self) -> ProtocolKind {
        match self {
            ProtocolChoice::Drsp => ProtocolKind::OptimalDeterministic,
            ProtocolChoice::Conventional => ProtocolKind::Conventional,
        }
    }
}

/// Options shared by `run-drsp`, `run-conventional` and `compare`.
#[derive(Debug, Clone, Args, Default)]
pub struct RunArgs {
    /// Register dimension; inferred from the channel when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    /// Channel angle in [0, pi/4]; shorthand for a diagonal qubit channel
    /// with coefficients (sin theta, cos theta).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Diagonal channel coefficients as comma-separated complex numbers.
    #[arg(long)]
    pub channel_diag: Option<String>,
    /// File holding a full d x d complex coefficient matrix.
    #[arg(long)]
    pub channel_matrix_file: Option<PathBuf>,
    /// Target amplitudes as comma-separated complex numbers.
    #[arg(long)]
    pub target: Option<String>,
    /// Draw a random target from the seeded target stream instead.
    #[arg(long)]
    pub random_target: bool,
    /// Number of protocol runs.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Base seed; every run derives its own randomness from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// key=value file supplying any of the other options; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SweepArgs {
    /// Number of equally spaced angles across [0, pi/4].
    #[arg(long)]
    pub points: Option<usize>,
    /// Conventional runs per angle; the deterministic protocol samples at
    /// most 1000 of them per angle.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// key=value file supplying any of the other options; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct TraceArgs {
    /// Which protocol to trace.
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolChoice>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub channel_diag: Option<String>,
    #[arg(long)]
    pub channel_matrix_file: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub random_target: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// key=value file supplying any of the other options; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Errors surfaced to the user; the binary maps the variants to exit codes
/// 2 (configuration) and 3 (numerical invariant violation).
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags, config file, channel or target specification.
    Config(String),
    /// A run that must deliver the target exactly fell measurably short,
    /// which signals an implementation or numerics bug, not bad input.
    Fidelity { fidelity: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Fidelity { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Fidelity { fidelity } => {
                write!(f, "delivered fidelity {fidelity} violates the 1e-8 guarantee")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<rsp_core::Error> for CliError {
    fn from(err: rsp_core::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

/// Fully validated inputs for the run and compare commands.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub d: usize,
    pub channel: ChannelState,
    pub target: TargetState,
    pub shots: u64,
    pub seed: u64,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy)]
pub struct ResolvedSweep {
    pub points: usize,
    pub shots: u64,
    pub seed: u64,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct ResolvedTrace {
    pub kind: ProtocolKind,
    pub d: usize,
    pub channel: ChannelState,
    pub target: TargetState,
    pub seed: u64,
    pub format: OutputFormat,
}

/// Parses one complex number: `1.5`, `-2e-3`, `0.5i`, `1+2i`, `1.5e-3-4i`,
/// bare `i` / `-i`. Whitespace is ignored.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Config(format!("invalid complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }

    // Split at the last +/- that starts the imaginary term; exponent signs
    // are preceded by e/E and a leading sign belongs to the first term.
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }

    let parse_imag = |part: &str| -> Result<f64, CliError> {
        let coeff = part
            .strip_suffix(['i', 'I'])
            .ok_or_else(bad)?;
        match coeff {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other.parse::<f64>().map_err(|_| bad()),
        }
    };

    match split {
        Some(i) => {
            let (re_part, im_part) = (&s[..i], &s[i..]);
            let re = re_part.parse::<f64>().map_err(|_| bad())?;
            let im = parse_imag(im_part)?;
            Ok(Complex64::new(re, im))
        }
        None if s.ends_with(['i', 'I']) => Ok(Complex64::new(0.0, parse_imag(&s)?)),
        None => Ok(Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0)),
    }
}

/// Parses a comma-separated list of complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, CliError> {
    let entries: Vec<&str> = text.split(',').collect();
    if entries.iter().any(|e| e.trim().is_empty()) {
        return Err(CliError::Config(format!(
            "empty entry in complex list '{text}'"
        )));
    }
    entries.iter().map(|e| parse_complex(e)).collect()
}

/// Parses a square complex matrix from text: one row per line, entries
/// separated by commas or whitespace, `#` lines and blank lines skipped.
pub fn parse_matrix(text: &str) -> Result<DMatrix<Complex64>, CliError> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<Complex64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|e| !e.trim().is_empty())
            .map(parse_complex)
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Config("matrix file has no rows".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!(
            "matrix must be square; got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Splits a config file into (key, value) pairs; `#` lines and blank lines
/// are skipped.
fn parse_config_pairs(text: &str, path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                idx + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))?;
    parse_config_pairs(&text, path)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(CliError::Config(format!(
            "invalid value '{other}' for {key}; use true or false"
        ))),
    }
}

fn parse_format(value: &str) -> Result<OutputFormat, CliError> {
    match value {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Config(format!(
            "invalid format '{other}'; use csv or json"
        ))),
    }
}

fn parse_protocol(value: &str) -> Result<ProtocolChoice, CliError> {
    match value {
        "drsp" => Ok(ProtocolChoice::Drsp),
        "conventional" => Ok(ProtocolChoice::Conventional),
        other => Err(CliError::Config(format!(
            "invalid protocol '{other}'; use drsp or conventional"
        ))),
    }
}

/// Channel options shared by every resolution path.
struct ChannelSpec<'a> {
    d: Option<usize>,
    theta: Option<f64>,
    diag: Option<&'a str>,
    matrix_file: Option<&'a Path>,
}

impl ChannelSpec<'_> {
    fn resolve(self) -> Result<(usize, ChannelState), CliError> {
        let given =
            self.theta.is_some() as u8 + self.diag.is_some() as u8 + self.matrix_file.is_some() as u8;
        if given != 1 {
            return Err(CliError::Config(
                "specify exactly one of --theta, --channel-diag, --channel-matrix-file".into(),
            ));
        }

        let (d, channel) = if let Some(theta) = self.theta {
            if !theta.is_finite() || !(0.0..=FRAC_PI_4 + 1e-12).contains(&theta) {
                return Err(CliError::Config(format!(
                    "theta must lie in [0, pi/4]; got {theta}"
                )));
            }
            let diag = [
                Complex64::new(theta.sin(), 0.0),
                Complex64::new(theta.cos(), 0.0),
            ];
            (2, ChannelState::from_diagonal(&diag)?)
        } else if let Some(list) = self.diag {
            let entries = parse_complex_list(list)?;
            (entries.len(), ChannelState::from_diagonal(&entries)?)
        } else {
            let path = self.matrix_file.expect("one spec present");
            let text = std::fs::read_to_string(path).map_err(|err| {
                CliError::Config(format!("cannot read {}: {err}", path.display()))
            })?;
            let matrix = parse_matrix(&text)?;
            (matrix.nrows(), ChannelState::new(matrix)?)
        };

        if let Some(flag_d) = self.d {
            if flag_d != d {
                return Err(CliError::Config(format!(
                    "--d {flag_d} disagrees with the channel dimension {d}"
                )));
            }
        }
        Ok((d, channel))
    }
}

fn resolve_target(
    spec: Option<&str>,
    random: bool,
    d: usize,
    seed: u64,
) -> Result<TargetState, CliError> {
    match (spec, random) {
        (Some(_), true) => Err(CliError::Config(
            "--target and --random-target are mutually exclusive".into(),
        )),
        (Some(list), false) => {
            let amps = parse_complex_list(list)?;
            if amps.len() != d {
                return Err(CliError::Config(format!(
                    "target has {} amplitudes but the channel dimension is {d}",
                    amps.len()
                )));
            }
            Ok(TargetState::new(amps)?)
        }
        (None, true) => {
            let mut rng = stream_rng(seed, TARGET_STREAM);
            Ok(random_target(d, &mut rng)?)
        }
        (None, false) => Err(CliError::Config(
            "specify a target with --target or --random-target".into(),
        )),
    }
}

fn check_shots(shots: u64) -> Result<u64, CliError> {
    if shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    Ok(shots)
}

impl RunArgs {
    fn merged(&self) -> Result<Self, CliError> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            for (key, value) in read_config(path)? {
                match key.as_str() {
                    "d" if merged.d.is_none() => merged.d = Some(parse_num("d", &value)?),
                    "theta" if merged.theta.is_none() => {
                        merged.theta = Some(parse_num("theta", &value)?)
                    }
                    "channel-diag" if merged.channel_diag.is_none() => {
                        merged.channel_diag = Some(value)
                    }
                    "channel-matrix-file" if merged.channel_matrix_file.is_none() => {
                        merged.channel_matrix_file = Some(PathBuf::from(value))
                    }
                    "target" if merged.target.is_none() => merged.target = Some(value),
                    "random-target" if !merged.random_target => {
                        merged.random_target = parse_bool("random-target", &value)?
                    }
                    "shots" if merged.shots.is_none() => {
                        merged.shots = Some(parse_num("shots", &value)?)
                    }
                    "seed" if merged.seed.is_none() => {
                        merged.seed = Some(parse_num("seed", &value)?)
                    }
                    "out" if merged.out.is_none() => merged.out = Some(PathBuf::from(value)),
                    "format" if merged.format.is_none() => {
                        merged.format = Some(parse_format(&value)?)
                    }
                    "d" | "theta" | "channel-diag" | "channel-matrix-file" | "target"
                    | "random-target" | "shots" | "seed" | "out" | "format" => {}
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown config key '{other}'"
                        )))
                    }
                }
            }
        }
        Ok(merged)
    }

    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let merged = self.merged()?;
        let seed = merged.seed.unwrap_or(0);
        let (d, channel) = ChannelSpec {
            d: merged.d,
            theta: merged.theta,
            diag: merged.channel_diag.as_deref(),
            matrix_file: merged.channel_matrix_file.as_deref(),
        }
        .resolve()?;
        let target = resolve_target(merged.target.as_deref(), merged.random_target, d, seed)?;
        Ok(ResolvedRun {
            d,
            channel,
            target,
            shots: check_shots(merged.shots.unwrap_or(DEFAULT_SHOTS))?,
            seed,
            format: merged.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

impl SweepArgs {
    fn merged(&self) -> Result<Self, CliError> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            for (key, value) in read_config(path)? {
                match key.as_str() {
                    "points" if merged.points.is_none() => {
                        merged.points = Some(parse_num("points", &value)?)
                    }
                    "shots" if merged.shots.is_none() => {
                        merged.shots = Some(parse_num("shots", &value)?)
                    }
                    "seed" if merged.seed.is_none() => {
                        merged.seed = Some(parse_num("seed", &value)?)
                    }
                    "out" if merged.out.is_none() => merged.out = Some(PathBuf::from(value)),
                    "format" if merged.format.is_none() => {
                        merged.format = Some(parse_format(&value)?)
                    }
                    "points" | "shots" | "seed" | "out" | "format" => {}
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown config key '{other}'"
                        )))
                    }
                }
            }
        }
        Ok(merged)
    }

    pub fn resolve(&self) -> Result<ResolvedSweep, CliError> {
        let merged = self.merged()?;
        let points = merged.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(CliError::Config(format!(
                "a sweep needs at least 2 points; got {points}"
            )));
        }
        Ok(ResolvedSweep {
            points,
            shots: check_shots(merged.shots.unwrap_or(DEFAULT_SHOTS))?,
            seed: merged.seed.unwrap_or(0),
            format: merged.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

impl TraceArgs {
    fn merged(&self) -> Result<Self, CliError> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            for (key, value) in read_config(path)? {
                match key.as_str() {
                    "protocol" if merged.protocol.is_none() => {
                        merged.protocol = Some(parse_protocol(&value)?)
                    }
                    "d" if merged.d.is_none() => merged.d = Some(parse_num("d", &value)?),
                    "theta" if merged.theta.is_none() => {
                        merged.theta = Some(parse_num("theta", &value)?)
                    }
                    "channel-diag" if merged.channel_diag.is_none() => {
                        merged.channel_diag = Some(value)
                    }
                    "channel-matrix-file" if merged.channel_matrix_file.is_none() => {
                        merged.channel_matrix_file = Some(PathBuf::from(value))
                    }
                    "target" if merged.target.is_none() => merged.target = Some(value),
                    "random-target" if !merged.random_target => {
                        merged.random_target = parse_bool("random-target", &value)?
                    }
                    "seed" if merged.seed.is_none() => {
                        merged.seed = Some(parse_num("seed", &value)?)
                    }
                    "out" if merged.out.is_none() => merged.out = Some(PathBuf::from(value)),
                    "format" if merged.format.is_none() => {
                        merged.format = Some(parse_format(&value)?)
                    }
                    "protocol" | "d" | "theta" | "channel-diag" | "channel-matrix-file"
                    | "target" | "random-target" | "seed" | "out" | "format" => {}
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown config key '{other}'"
                        )))
                    }
                }
            }
        }
        Ok(merged)
    }

    pub fn resolve(&self) -> Result<ResolvedTrace, CliError> {
        let merged = self.merged()?;
        let seed = merged.seed.unwrap_or(0);
        let (d, channel) = ChannelSpec {
            d: merged.d,
            theta: merged.theta,
            diag: merged.channel_diag.as_deref(),
            matrix_file: merged.channel_matrix_file.as_deref(),
        }
        .resolve()?;
        if d > TRACE_DIM_CAP {
            return Err(CliError::Config(format!(
                "trace prints full registers and is capped at d = {TRACE_DIM_CAP}; got {d}"
            )));
        }
        let kind = merged.protocol.unwrap_or(ProtocolChoice::Drsp).kind();
        if kind == ProtocolKind::Conventional && d != 2 {
            return Err(CliError::Config(format!(
                "the conventional protocol is defined for qubits only; got d = {d}"
            )));
        }
        let target = resolve_target(merged.target.as_deref(), merged.random_target, d, seed)?;
        Ok(ResolvedTrace {
            kind,
            d,
            channel,
            target,
            seed,
            format: merged.format.unwrap_or(OutputFormat::Csv),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parser_handles_common_shapes() {
        let cases = [
            ("1.5", Complex64::new(1.5, 0.0)),
            ("-2e-3", Complex64::new(-2e-3, 0.0)),
            ("0.5i", Complex64::new(0.0, 0.5)),
            ("i", Complex64::new(0.0, 1.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("1+2i", Complex64::new(1.0, 2.0)),
            ("1.5e-3-4i", Complex64::new(1.5e-3, -4.0)),
            ("-0.6 + 0.8i", Complex64::new(-0.6, 0.8)),
            ("2.5E-1+1.5E-1I", Complex64::new(0.25, 0.15)),
        ];
        for (text, want) in cases {
            let got = parse_complex(text).unwrap();
            assert_eq!(got, want, "{text}");
        }
    }

    #[test]
    fn complex_parser_rejects_garbage() {
        for text in ["", "abc", "1+2", "1++2i", "2i+1", "1.2.3", "i2"] {
            assert!(parse_complex(text).is_err(), "{text}");
        }
    }

    #[test]
    fn matrix_parser_accepts_comments_and_mixed_separators() {
        let text = "# rotated bell pair\n0.5, 0.5\n0.5\t-0.5\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m[(1, 1)], Complex64::new(-0.5, 0.0));
        assert!(parse_matrix("1 0 0\n0 1 0\n").is_err());
        assert!(parse_matrix("\n# empty\n").is_err());
    }

    #[test]
    fn run_resolution_requires_one_channel_and_one_target() {
        let mut args = RunArgs {
            theta: Some(0.5),
            channel_diag: Some("0.6,0.8".into()),
            target: Some("1,0".into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
        args.channel_diag = None;
        assert!(args.resolve().is_ok());
        args.random_target = true;
        assert!(args.resolve().is_err());
        args.target = None;
        assert!(args.resolve().is_ok());
        args.random_target = false;
        assert!(args.resolve().is_err());
    }

    #[test]
    fn theta_bounds_are_enforced() {
        for theta in [-0.1, FRAC_PI_4 + 0.01, f64::NAN] {
            let args = RunArgs {
                theta: Some(theta),
                target: Some("1,0".into()),
                ..Default::default()
            };
            assert!(args.resolve().is_err(), "{theta}");
        }
        let args = RunArgs {
            theta: Some(FRAC_PI_4),
            target: Some("1,0".into()),
            ..Default::default()
        };
        let resolved = args.resolve().unwrap();
        assert_eq!(resolved.d, 2);
        assert_eq!(resolved.shots, DEFAULT_SHOTS);
        assert_eq!(resolved.format, OutputFormat::Csv);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let args = RunArgs {
            d: Some(3),
            channel_diag: Some("0.6,0.8".into()),
            target: Some("1,0".into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
        let args = RunArgs {
            channel_diag: Some("0.6,0.8".into()),
            target: Some("1,0,0".into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn trace_caps_dimension_and_conventional_is_qubit_only() {
        let diag: Vec<String> = (0..9).map(|i| if i == 0 { "1".into() } else { "0".into() }).collect();
        let args = TraceArgs {
            channel_diag: Some(diag.join(",")),
            random_target: true,
            ..Default::default()
        };
        assert!(args.resolve().is_err());
        let args = TraceArgs {
            protocol: Some(ProtocolChoice::Conventional),
            channel_diag: Some("1,0,0".into()),
            random_target: true,
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn random_targets_are_seeded_and_normalized() {
        let args = RunArgs {
            theta: Some(0.5),
            random_target: true,
            seed: Some(9),
            ..Default::default()
        };
        let a = args.resolve().unwrap();
        let b = args.resolve().unwrap();
        assert_eq!(a.target.amplitudes(), b.target.amplitudes());
        let norm: f64 = a.target.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
