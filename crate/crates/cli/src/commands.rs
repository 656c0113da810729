//! Subcommand bodies. Every command computes first, validates that each
//! result carries a usable (finite) error estimate, and only then emits:
//! a run exits 0 exactly when everything it printed is vouched for.

use crate::args::{Format, PointArgs, RunArgs, VerifyArgs};
use crate::output::{emit, json_text, point_cell, round12, sig12, Csv, JSON_SCHEMA_VERSION};
use crate::{accept, CliError, Result};
use greenfn::asymptotics::AsymptoticsReport;
use greenfn::lattice::{green_mc_oracle, green_series_many};
use greenfn::pipeline::PipelineConfig;
use greenfn::symbols::{constants, h_at_zero};
use serde_json::json;

/// Walks per point for the Monte Carlo oracle.
const MC_WALKS: u64 = 200_000;

/// Series-oracle evolution cap and tail tolerance. The evolution stops
/// early once its fitted tail drops below the tolerance, so small points
/// finish in well under a second.
const SERIES_N_MAX: usize = 2000;
const SERIES_TAIL_TOL: f64 = 1e-9;

/// Shared JSON view of the effective configuration.
fn config_json(args: &RunArgs, cfg: &PipelineConfig) -> serde_json::Value {
    json!({
        "dim": cfg.dim,
        "model": args.model,
        "grid_n": cfg.grid_n,
        "bump_inner": round12(cfg.bump_inner),
        "bump_outer": round12(cfg.bump_outer),
        "epsilon": round12(cfg.epsilon),
        "l_min": args.l_min,
        "l_max": args.l_max,
        "l_step": args.l_step,
        "seed": args.seed,
        "format": args.format.name(),
    })
}

fn finite(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Estimate(format!("{what} is {v}")))
    }
}

/// `constants`: dimension constants and the model's `h(0)`.
pub fn cmd_constants(args: &RunArgs) -> Result<()> {
    let c = constants(args.dim)?;
    let (dist, model_id) = args.model_choice()?.build(args.dim)?;
    let h0 = h_at_zero(&dist)?;
    let cfg = args.pipeline_config()?;

    let data = match args.format {
        Format::Csv => {
            let mut csv = Csv::new(&args.config_echo(&cfg), "name,value");
            csv.row(&["a".into(), sig12(c.a)]);
            csv.row(&["n".into(), c.n.to_string()]);
            csv.row(&["p".into(), sig12(c.p)]);
            csv.row(&["q".into(), sig12(c.q)]);
            csv.row(&["h0".into(), sig12(h0)]);
            csv.finish()
        }
        Format::Json => json_text(&json!({
            "schema_version": JSON_SCHEMA_VERSION,
            "command": "constants",
            "config": config_json(args, &cfg),
            "model_id": model_id,
            "a": round12(c.a),
            "n": c.n,
            "p": round12(c.p),
            "q": round12(c.q),
            "h0": round12(h0),
        })),
    };
    emit(args.output.as_deref(), &data)
}

/// The points a pointwise command acts on: explicit positionals, or the
/// axis sweep `x = L e_1` when an L-range was given instead.
fn effective_points(args: &PointArgs) -> Result<Vec<Vec<i64>>> {
    let explicit = crate::args::parse_points(&args.points, args.run.dim)?;
    match (explicit.is_empty(), args.run.sweep_range()?) {
        (false, None) => Ok(explicit),
        (false, Some(_)) => Err(CliError::Usage(
            "give positional points or an --L-min/--L-max sweep, not both".into(),
        )),
        (true, None) => Ok(Vec::new()),
        (true, Some((lo, hi, step))) => {
            if !(1 <= lo && lo <= hi && step >= 1) {
                return Err(CliError::Usage(format!(
                    "sweep range {lo}..={hi} step {step}: need 1 <= L-min <= L-max and step >= 1"
                )));
            }
            Ok((lo..=hi)
                .step_by(step as usize)
                .map(|l| {
                    let mut x = vec![0i64; args.run.dim];
                    x[0] = l;
                    x
                })
                .collect())
        }
    }
}

/// `green`: `f(x) = I1 + I2` rows at the requested points.
pub fn cmd_green(args: &PointArgs) -> Result<()> {
    let pipe = args.run.pipeline()?;
    let points = effective_points(args)?;

    // The dense-grid mental model behind `--grid-n` needs the box to
    // separate every point from its periodic images; past that the
    // aliasing estimate for the run is unbounded.
    let n = pipe.config().grid_n;
    for x in &points {
        let reach = x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as usize;
        if 2 * reach >= n {
            return Err(CliError::Usage(format!(
                "grid-n {n} cannot separate x = {} from its periodic images \
                 (|x|_inf = {reach} needs grid-n > {}); the aliasing estimate \
                 is unbounded here -- raise --grid-n",
                point_cell(x),
                2 * reach
            )));
        }
    }

    let rows = points
        .iter()
        .map(|x| pipe.decompose_at(x))
        .collect::<greenfn::Result<Vec<_>>>()?;
    for row in &rows {
        finite(
            &format!("error estimate at x = {}", point_cell(&row.x)),
            row.error_estimate,
        )?;
        finite(&format!("f at x = {}", point_cell(&row.x)), row.f_total.re)?;
    }

    let data = match args.run.format {
        Format::Csv => {
            let mut csv = Csv::new(
                &args.run.config_echo(pipe.config()),
                "x,i1,i2,total,error_estimate,method_tag",
            );
            for row in &rows {
                csv.row(&[
                    point_cell(&row.x),
                    sig12(row.i1.re),
                    sig12(row.i2.re),
                    sig12(row.f_total.re),
                    sig12(row.error_estimate),
                    row.method_tag.clone(),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|row| {
                    json!({
                        "x": row.x,
                        "i1": round12(row.i1.re),
                        "i2": round12(row.i2.re),
                        "total": round12(row.f_total.re),
                        "error_estimate": round12(row.error_estimate),
                        "method_tag": row.method_tag,
                    })
                })
                .collect();
            json_text(&json!({
                "schema_version": JSON_SCHEMA_VERSION,
                "command": "green",
                "config": config_json(&args.run, pipe.config()),
                "model_id": pipe.model_id(),
                "rows": rows,
            }))
        }
    };
    emit(args.run.output.as_deref(), &data)
}

/// `asymptote`: the full decay report over an axis sweep.
pub fn cmd_asymptote(args: &RunArgs) -> Result<()> {
    let (lo, hi, step) = args.sweep_range()?.ok_or_else(|| {
        CliError::Usage("asymptote needs --L-min and --L-max".into())
    })?;
    let pipe = args.pipeline()?;
    let report = pipe.report(lo, hi, step)?;

    finite("fitted exponent", report.fitted_exponent)?;
    finite("bound ratio", report.bound_ratio)?;
    for row in &report.rows {
        finite(
            &format!("error estimate at x = {}", point_cell(&row.x)),
            row.error_estimate,
        )?;
    }

    let data = match args.format {
        Format::Csv => {
            let mut csv = Csv::new(
                &args.config_echo(pipe.config()),
                "L,x,f,scaled,remainder,log_L,log_f",
            );
            for row in &report.rows {
                let l = row.x[0];
                csv.row(&[
                    l.to_string(),
                    point_cell(&row.x),
                    sig12(row.f),
                    sig12(row.scaled),
                    sig12(row.remainder),
                    sig12((l as f64).ln()),
                    sig12(row.f.abs().ln()),
                ]);
            }
            csv.finish()
        }
        Format::Json => json_text(&json!({
            "schema_version": JSON_SCHEMA_VERSION,
            "command": "asymptote",
            "config": config_json(args, pipe.config()),
            "report": rounded_report(report),
        })),
    };
    emit(args.output.as_deref(), &data)
}

/// The report with every float rounded through 12 significant digits, so
/// the JSON form matches what the CSV columns would show.
fn rounded_report(mut r: AsymptoticsReport) -> AsymptoticsReport {
    for row in &mut r.rows {
        row.f = round12(row.f);
        row.scaled = round12(row.scaled);
        row.remainder = round12(row.remainder);
        row.error_estimate = round12(row.error_estimate);
    }
    r.fitted_exponent = round12(r.fitted_exponent);
    r.fit_r2 = round12(r.fit_r2);
    r.h0 = round12(r.h0);
    r.norm_f = round12(r.norm_f);
    r.norm_h = round12(r.norm_h);
    r.bound_ratio = round12(r.bound_ratio);
    r
}

/// `oracle`: series and Monte Carlo reference values per point.
pub fn cmd_oracle(args: &PointArgs) -> Result<()> {
    let (dist, model_id) = args.run.model_choice()?.build(args.run.dim)?;
    let cfg = args.run.pipeline_config()?;
    let points = effective_points(args)?;

    let series = if points.is_empty() {
        Vec::new()
    } else {
        green_series_many(&dist, &points, SERIES_N_MAX, SERIES_TAIL_TOL)?
    };

    let mc_enabled = dist.is_nonnegative();
    if !mc_enabled && !points.is_empty() {
        eprintln!(
            "notice: model has signed weights; walks are undefined, \
             Monte Carlo columns disabled"
        );
    }
    let mut mc = Vec::with_capacity(points.len());
    for (idx, x) in points.iter().enumerate() {
        if mc_enabled {
            let est = green_mc_oracle(&dist, x, MC_WALKS, args.run.seed + idx as u64)?;
            finite(&format!("MC stderr at x = {}", point_cell(x)), est.stderr)?;
            mc.push(Some(est));
        } else {
            mc.push(None);
        }
    }
    for (x, est) in points.iter().zip(&series) {
        finite(
            &format!("series tail at x = {}", point_cell(x)),
            est.tail_estimate,
        )?;
    }

    let data = match args.run.format {
        Format::Csv => {
            let mut csv = Csv::new(
                &args.run.config_echo(&cfg),
                "x,series_value,series_tail,mc_mean,mc_stderr",
            );
            for ((x, est), mc) in points.iter().zip(&series).zip(&mc) {
                let (mean, stderr) = match mc {
                    Some(m) => (sig12(m.mean), sig12(m.stderr)),
                    None => (String::new(), String::new()),
                };
                csv.row(&[
                    point_cell(x),
                    sig12(est.value),
                    sig12(est.tail_estimate),
                    mean,
                    stderr,
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .zip(&series)
                .zip(&mc)
                .map(|((x, est), mc)| {
                    json!({
                        "x": x,
                        "series_value": round12(est.value),
                        "series_tail": round12(est.tail_estimate),
                        "mc_mean": mc.as_ref().map(|m| round12(m.mean)),
                        "mc_stderr": mc.as_ref().map(|m| round12(m.stderr)),
                    })
                })
                .collect();
            json_text(&json!({
                "schema_version": JSON_SCHEMA_VERSION,
                "command": "oracle",
                "config": config_json(&args.run, &cfg),
                "model_id": model_id,
                "mc_walks": if mc_enabled { Some(MC_WALKS) } else { None },
                "rows": rows,
            }))
        }
    };
    emit(args.run.output.as_deref(), &data)
}

/// `verify`: the acceptance suite. Returns whether every criterion
/// passed; progress streams to stderr, the final table to the data sink.
pub fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let bin = std::env::current_exe()?;
    let mut lines = Vec::with_capacity(accept::CRITERIA.len());
    let mut all = true;
    for id in 1..=accept::CRITERIA.len() {
        let outcome = accept::run_criterion(id, &bin);
        eprintln!("{outcome}");
        all &= outcome.passed;
        lines.push(outcome.to_string());
    }
    emit(args.output.as_deref(), &(lines.join("\n") + "\n"))?;
    Ok(all)
}
