//! Flag surface: subcommands, shared run flags, and their translation
//! into library configuration.

use crate::{CliError, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use greenfn::pipeline::{ModelChoice, Pipeline, PipelineConfig};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "greenfn",
    version,
    about = "Lattice functions from torus symbols: decomposition, decay reports, oracles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the dimension constants and the model's h(0)
    Constants(RunArgs),
    /// Evaluate f(x) = I1 + I2 at lattice points or along an axis sweep
    Green(PointArgs),
    /// Axis sweep with decay fit, symbol norms, and bound ratio
    Asymptote(RunArgs),
    /// Series and Monte Carlo reference values at small points
    Oracle(PointArgs),
    /// Run the acceptance suite; one pass/fail line per criterion
    Verify(VerifyArgs),
}

/// Flags shared by every computing subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Lattice dimension
    #[arg(long, default_value_t = 3)]
    pub dim: usize,

    /// Step model: "srw", "spread-out-R" (R a positive integer), or a
    /// path to a model-spec JSON file
    #[arg(long, default_value = "srw")]
    pub model: String,

    /// Base quadrature nodes per axis (even; default depends on dim)
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,

    /// Inner plateau radius of the momentum cutoff, radians
    #[arg(long = "bump-inner")]
    pub bump_inner: Option<f64>,

    /// Support radius of the momentum cutoff, radians
    #[arg(long = "bump-outer")]
    pub bump_outer: Option<f64>,

    /// Inner-cut fraction for outer-integral diagnostics
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Axis sweep start: evaluates at x = L e_1
    #[arg(long = "L-min")]
    pub l_min: Option<i64>,

    /// Axis sweep end, inclusive
    #[arg(long = "L-max")]
    pub l_max: Option<i64>,

    /// Axis sweep stride
    #[arg(long = "L-step", default_value_t = 1)]
    pub l_step: i64,

    /// Output file for data rows (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Seed for the Monte Carlo oracle
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A computing subcommand that also takes explicit lattice points.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Lattice points as comma-separated integers, e.g. 2,1,0; put
    /// points with a negative first coordinate after a "--" separator
    #[arg(value_name = "X")]
    pub points: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Output file for the pass/fail lines (stdout when absent)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl RunArgs {
    /// Resolves `--model`: built-in names first, then a file path.
    pub fn model_choice(&self) -> Result<ModelChoice> {
        if self.model == "srw" {
            return Ok(ModelChoice::Srw);
        }
        if let Some(range) = self.model.strip_prefix("spread-out-") {
            let range: i64 = range.parse().map_err(|_| {
                CliError::Usage(format!(
                    "model {:?}: spread-out range must be a positive integer",
                    self.model
                ))
            })?;
            return Ok(ModelChoice::SpreadOut(range));
        }
        let text = std::fs::read_to_string(&self.model).map_err(|e| {
            CliError::Usage(format!(
                "model {:?}: not a built-in name and not a readable file ({e})",
                self.model
            ))
        })?;
        Ok(ModelChoice::JsonText(text))
    }

    /// Library configuration with per-dimension defaults filled in.
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::defaults(self.dim)?;
        cfg.model = self.model_choice()?;
        if let Some(n) = self.grid_n {
            cfg.grid_n = n;
        }
        if let Some(r) = self.bump_inner {
            cfg.bump_inner = r;
        }
        if let Some(r) = self.bump_outer {
            cfg.bump_outer = r;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        Ok(cfg)
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        Ok(Pipeline::new(self.pipeline_config()?)?)
    }

    /// The validated sweep range, when both endpoints were given.
    pub fn sweep_range(&self) -> Result<Option<(i64, i64, i64)>> {
        match (self.l_min, self.l_max) {
            (None, None) => Ok(None),
            (Some(lo), Some(hi)) => Ok(Some((lo, hi, self.l_step))),
            _ => Err(CliError::Usage(
                "--L-min and --L-max must be given together".into(),
            )),
        }
    }

    /// One-line echo of the effective configuration, embedded in CSV
    /// output so a data file pins down the run that produced it.
    pub fn config_echo(&self, cfg: &PipelineConfig) -> String {
        let fmt_opt = |v: Option<i64>| v.map_or("none".to_string(), |v| v.to_string());
        format!(
            "dim={} model={} grid-n={} bump-inner={} bump-outer={} epsilon={} \
             L-min={} L-max={} L-step={} seed={}",
            cfg.dim,
            self.model,
            cfg.grid_n,
            crate::output::sig12(cfg.bump_inner),
            crate::output::sig12(cfg.bump_outer),
            crate::output::sig12(cfg.epsilon),
            fmt_opt(self.l_min),
            fmt_opt(self.l_max),
            self.l_step,
            self.seed,
        )
    }
}

/// Parses "2,1,0" into a lattice point of the expected dimension.
pub fn parse_point(text: &str, dim: usize) -> Result<Vec<i64>> {
    let coords: std::result::Result<Vec<i64>, _> =
        text.split(',').map(|c| c.trim().parse::<i64>()).collect();
    let coords = coords.map_err(|_| {
        CliError::Usage(format!(
            "point {text:?}: expected comma-separated integers, e.g. 2,1,0"
        ))
    })?;
    if coords.len() != dim {
        return Err(CliError::Usage(format!(
            "point {text:?} has {} coordinates; --dim is {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

/// Parses all positional points and orders them by |x| (then
/// lexicographically), the order every output table uses.
pub fn parse_points(texts: &[String], dim: usize) -> Result<Vec<Vec<i64>>> {
    let mut points = texts
        .iter()
        .map(|t| parse_point(t, dim))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| {
        let ra: i64 = a.iter().map(|v| v * v).sum();
        let rb: i64 = b.iter().map(|v| v * v).sum();
        ra.cmp(&rb).then_with(|| a.cmp(b))
    });
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_and_sort_by_radius() {
        let texts = vec!["3,0,0".to_string(), "1,1,0".to_string(), "0,0,1".to_string()];
        let pts = parse_points(&texts, 3).unwrap();
        assert_eq!(pts, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);

        assert!(parse_point("1,2", 3).is_err());
        assert!(parse_point("1,x,0", 3).is_err());
    }

    #[test]
    fn model_names_resolve() {
        let mut args = Cli::parse_from(["greenfn", "constants"]);
        let Command::Constants(run) = &mut args.command else {
            panic!("expected constants");
        };
        assert!(matches!(run.model_choice().unwrap(), ModelChoice::Srw));

        run.model = "spread-out-2".into();
        assert!(matches!(
            run.model_choice().unwrap(),
            ModelChoice::SpreadOut(2)
        ));

        run.model = "spread-out-x".into();
        assert!(run.model_choice().is_err());

        run.model = "/no/such/file.json".into();
        assert!(run.model_choice().is_err());
    }

    #[test]
    fn sweep_range_needs_both_endpoints() {
        let args = Cli::parse_from(["greenfn", "green", "--L-min", "4"]);
        let Command::Green(pt) = &args.command else {
            panic!("expected green");
        };
        assert!(pt.run.sweep_range().is_err());

        let args = Cli::parse_from(["greenfn", "green", "--L-min", "4", "--L-max", "8"]);
        let Command::Green(pt) = &args.command else {
            panic!("expected green");
        };
        assert_eq!(pt.run.sweep_range().unwrap(), Some((4, 8, 1)));
    }
}
