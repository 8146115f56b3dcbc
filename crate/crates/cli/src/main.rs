mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use ads3::{GroupLabel, Mat2, PointAdS};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ads3", version, about = "Orbits of cohomogeneity-one isometry groups of adS3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Opts {
    /// Group label, e.g. AxA, GFN, AffxAff
    #[arg(long, global = true)]
    group: Option<String>,
    /// Point as p11,p12,p21,p22
    #[arg(long, global = true, allow_hyphen_values = true)]
    point: Option<String>,
    /// Second point for same-orbit
    #[arg(long, global = true, allow_hyphen_values = true)]
    other: Option<String>,
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "ADS3_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for survey and verify (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Orbit record for a point, cross-checked against the tangent Gram form
    Classify,
    /// Orbit identifier of a point
    OrbitId,
    /// Whether --point and --other share an orbit, with a transporter
    SameOrbit,
    /// Census of orbit ids over samples and the special points
    Survey,
    /// Properness reason or non-properness certificate
    Properness,
    /// Orbit-space verdict, finite topologies and closure relations
    Topology,
    /// Classification summary for every group
    Tables,
    /// The full verification suite
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::OrbitId => "orbit-id",
            Command::SameOrbit => "same-orbit",
            Command::Survey => "survey",
            Command::Properness => "properness",
            Command::Topology => "topology",
            Command::Tables => "tables",
            Command::Verify => "verify",
        }
    }
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub group: Option<GroupLabel>,
    pub point: Option<PointAdS>,
    pub other: Option<PointAdS>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn group(&self) -> Result<GroupLabel, String> {
        self.group.ok_or_else(|| format!("{} needs --group", self.command.name()))
    }

    pub fn point(&self) -> Result<PointAdS, String> {
        self.point.ok_or_else(|| format!("{} needs --point", self.command.name()))
    }
}

pub fn parse_point(text: &str, tol: f64, warnings: &mut Vec<String>) -> Result<PointAdS, String> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?} in point")))
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = vals[..] else {
        return Err(format!("a point has 4 entries, got {}", vals.len()));
    };
    let m = Mat2::new(a, b, c, d);
    if !m.is_finite() {
        return Err("point has non-finite entries".into());
    }
    let det = m.det();
    let gap = (det - 1.0).abs();
    if gap <= 10.0 * tol {
        Ok(PointAdS::new_unchecked(m))
    } else if gap <= 0.1 && det > 0.0 {
        warnings.push(format!("det = {det} is not 1; point projected onto adS3"));
        Ok(PointAdS::new_unchecked(m.scale(1.0 / det.sqrt())))
    } else {
        Err(format!("det = {det} is too far from 1"))
    }
}

fn validate(command: Command, o: &Opts) -> Result<RunConfig, String> {
    if o.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    if !(o.tol > 0.0 && o.tol.is_finite()) {
        return Err("--tol must be positive".into());
    }
    let group = o.group.as_deref().map(|g| g.parse::<GroupLabel>().map_err(|e| e.to_string())).transpose()?;
    let mut warnings = Vec::new();
    let point = o.point.as_deref().map(|p| parse_point(p, o.tol, &mut warnings)).transpose()?;
    let other = o.other.as_deref().map(|p| parse_point(p, o.tol, &mut warnings)).transpose()?;
    Ok(RunConfig { command, group, point, other, samples: o.samples, seed: o.seed, tol: o.tol, format: o.format, warnings })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let cfg = match validate(cli.command, &cli.opts) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let report = match ads3::par::with_workers(cli.opts.workers, || commands::run(&cfg)) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = match cfg.format {
        Format::Json => report.to_json(),
        Format::Md => report.to_markdown(),
    };
    match &cli.opts.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if report.failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_and_project() {
        let mut w = Vec::new();
        assert!(parse_point("1,0,0,1", 1e-9, &mut w).is_ok() && w.is_empty());
        let p = parse_point("1.01,0,0,1", 1e-9, &mut w).unwrap();
        assert_eq!(w.len(), 1);
        assert!((p.m().det() - 1.0).abs() < 1e-12);
        assert!(parse_point("2,0,0,1", 1e-9, &mut w).is_err());
        assert!(parse_point("1,0,0", 1e-9, &mut w).is_err());
        assert!(parse_point("1,x,0,1", 1e-9, &mut w).is_err());
        assert!(parse_point("-1,0,0,-1", 1e-9, &mut w).is_ok());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
