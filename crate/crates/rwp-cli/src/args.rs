//! Command-line schema: subcommands, shared flag groups, and the
//! `const:`/`uniform:`/`power:` law parsers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwp_core::harness::HarnessError;
use rwp_core::models::{MobilityParams, PauseLaw, VelocityLaw, Window};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rwp",
    version,
    about = "Random-waypoint mobility on the plane: traces, closed-form analytics, \
             and handover/sojourn Monte-Carlo for hexagonal and Poisson-Voronoi networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Emit a movement trace as CSV (or JSON records).
    Trace(TraceArgs),
    /// Compare transition-length and switch-rate CCDFs across the three
    /// mobility models.
    Stats(StatsArgs),
    /// Hexagonal-network handover or sojourn analytics with Monte-Carlo.
    Hex(HexArgs),
    /// Poisson-Voronoi handover or sojourn analytics with Monte-Carlo.
    Pvt(PvtArgs),
    /// Ingest a real deployment CSV and run the handover Monte-Carlo on it.
    Deploy(DeployArgs),
    /// Sweep the base-station intensity and report the scaling slope.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Mobility flags shared by every subcommand.
#[derive(Args)]
pub struct MobilityArgs {
    /// Waypoint intensity (1/area).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Velocity law: const:<v> or uniform:<lo>:<hi>.
    #[arg(long, default_value = "const:1")]
    pub velocity: String,
    /// Pause law: none, const:<s>, or power:<beta>:<smin>:<smax>.
    #[arg(long, default_value = "none")]
    pub pause: String,
}

impl MobilityArgs {
    pub fn velocity(&self) -> Result<VelocityLaw, HarnessError> {
        parse_velocity(&self.velocity).map_err(crate::invalid)
    }

    pub fn pause(&self) -> Result<PauseLaw, HarnessError> {
        parse_pause(&self.pause).map_err(crate::invalid)
    }

    pub fn build(&self) -> Result<MobilityParams, HarnessError> {
        Ok(MobilityParams::new(self.lambda, self.velocity()?, self.pause()?)?)
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Monte-Carlo replications.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Master seed; every output is a pure function of the scenario and seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for the replication loop (all cores when omitted).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of movement periods.
    #[arg(long, default_value_t = 1000)]
    pub periods: usize,
    /// Reflecting window WxH (e.g. 1000x1000); infinite plane when omitted.
    #[arg(long)]
    pub window: Option<String>,
}

impl TraceArgs {
    pub fn window(&self) -> Result<Window, HarnessError> {
        parse_window(self.window.as_deref(), Window::Infinite)
    }
}

#[derive(Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Levy transition-length tail exponent in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Levy pause tail exponent in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lmin: f64,
    /// Levy truncation upper point; defaults to half the window diagonal.
    #[arg(long)]
    pub lmax: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub smin: f64,
    #[arg(long, default_value_t = 10.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 100_000)]
    pub periods: usize,
    /// Simulation window WxH; defaults to 1000x1000.
    #[arg(long)]
    pub window: Option<String>,
}

impl StatsArgs {
    pub fn window(&self) -> Result<Window, HarnessError> {
        parse_window(
            self.window.as_deref(),
            Window::Reflect {
                width: 1000.0,
                height: 1000.0,
            },
        )
    }

    pub fn lmax(&self) -> Result<f64, HarnessError> {
        if let Some(lmax) = self.lmax {
            return Ok(lmax);
        }
        Ok(match self.window()? {
            Window::Reflect { width, height } => 0.5 * (width * width + height * height).sqrt(),
            Window::Infinite => 100.0,
        })
    }
}

#[derive(Args)]
pub struct HexArgs {
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Hexagon side length.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Report sojourn-time analytics instead of handover counts.
    #[arg(long)]
    pub sojourn: bool,
    /// Grid resolution for distribution tables.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
}

#[derive(Args)]
pub struct PvtArgs {
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Base-station intensity (1/area).
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Report the sojourn-time distribution instead of handover counts.
    #[arg(long)]
    pub sojourn: bool,
    /// Grid resolution for distribution tables.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
}

#[derive(Args)]
pub struct DeployArgs {
    /// CSV file of x,y site coordinates.
    pub file: PathBuf,
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SweepNetwork {
    Pvt,
    Hex,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub mobility: MobilityArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated intensity values, e.g. 1,4,16,64.
    #[arg(long, default_value = "1,4,16,64")]
    pub mu: String,
    #[arg(long, value_enum, default_value_t = SweepNetwork::Pvt)]
    pub network: SweepNetwork,
}

impl SweepArgs {
    pub fn mu_values(&self) -> Result<Vec<f64>, HarnessError> {
        let mus: Result<Vec<f64>, _> = self
            .mu
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect();
        let mus = mus.map_err(|_| crate::invalid(format!("cannot parse --mu list {:?}", self.mu)))?;
        if mus.is_empty() || mus.iter().any(|&m| m.is_nan() || m <= 0.0) {
            return Err(crate::invalid("--mu needs positive values".into()));
        }
        Ok(mus)
    }
}

fn parse_velocity(s: &str) -> Result<VelocityLaw, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["const", v] => v
            .parse()
            .map(VelocityLaw::Constant)
            .map_err(|_| format!("cannot parse velocity {s:?}")),
        ["uniform", lo, hi] => {
            let min = lo.parse().map_err(|_| format!("cannot parse velocity {s:?}"))?;
            let max = hi.parse().map_err(|_| format!("cannot parse velocity {s:?}"))?;
            Ok(VelocityLaw::UniformRange { min, max })
        }
        _ => Err(format!(
            "velocity must be const:<v> or uniform:<lo>:<hi>, got {s:?}"
        )),
    }
}

fn parse_pause(s: &str) -> Result<PauseLaw, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["none"] => Ok(PauseLaw::NoPause),
        ["const", v] => v
            .parse()
            .map(PauseLaw::Constant)
            .map_err(|_| format!("cannot parse pause {s:?}")),
        ["power", beta, smin, smax] => {
            let parse = |x: &str| x.parse::<f64>().map_err(|_| format!("cannot parse pause {s:?}"));
            Ok(PauseLaw::TruncatedPowerLaw {
                beta: parse(beta)?,
                s_min: parse(smin)?,
                s_max: parse(smax)?,
            })
        }
        _ => Err(format!(
            "pause must be none, const:<s> or power:<beta>:<smin>:<smax>, got {s:?}"
        )),
    }
}

fn parse_window(s: Option<&str>, default: Window) -> Result<Window, HarnessError> {
    let Some(s) = s else {
        return Ok(default);
    };
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| crate::invalid(format!("window must be WxH, got {s:?}")))?;
    let width = w
        .trim()
        .parse()
        .map_err(|_| crate::invalid(format!("cannot parse window width {w:?}")))?;
    let height = h
        .trim()
        .parse()
        .map_err(|_| crate::invalid(format!("cannot parse window height {h:?}")))?;
    Ok(Window::Reflect { width, height })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_forms() {
        assert_eq!(parse_velocity("const:2.5"), Ok(VelocityLaw::Constant(2.5)));
        assert_eq!(
            parse_velocity("uniform:1:2"),
            Ok(VelocityLaw::UniformRange { min: 1.0, max: 2.0 })
        );
        assert!(parse_velocity("fast").is_err());
    }

    #[test]
    fn pause_forms() {
        assert_eq!(parse_pause("none"), Ok(PauseLaw::NoPause));
        assert_eq!(parse_pause("const:0.5"), Ok(PauseLaw::Constant(0.5)));
        assert_eq!(
            parse_pause("power:1:0.1:10"),
            Ok(PauseLaw::TruncatedPowerLaw {
                beta: 1.0,
                s_min: 0.1,
                s_max: 10.0
            })
        );
        assert!(parse_pause("power:1").is_err());
    }
}
