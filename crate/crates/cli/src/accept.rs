//! The acceptance suite: twelve end-to-end checks with tolerances pinned
//! in code. Each criterion reports one line, `ACCEPT cNN PASS/FAIL`, with
//! the measured numbers in the detail so a failure is diagnosable from
//! the line alone.
//!
//! The suite is deterministic: fixed points, fixed grids, fixed seeds.
//! Criteria that need the same expensive sweep share it through a
//! process-wide cache. The full run fits in a few minutes on one core.

use crate::output::point_cell;
use crate::{CliError, Result};
use greenfn::asymptotics::{fit_decay_exponent, sobolev_norm, u_decay_check, NormRegion};
use greenfn::lattice::{green_mc_oracle, green_series_many, StepDistribution};
use greenfn::pipeline::{ModelChoice, Pipeline, PipelineConfig};
use greenfn::riesz::{i1_riesz, j2_tail, s_mass};
use greenfn::smoothing::{make_bump, BumpFunction};
use greenfn::symbols::{green_symbol, h_at_zero, h_symbol, Symbol};
use greenfn::transform::{
    aliasing_estimate, i1_subtraction, inverse_ft_grid, DecompositionResult, QuadratureGrid,
};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

/// Criterion names, indexed by id minus one.
pub const CRITERIA: [&str; 12] = [
    "leading constant on the d=3 axis",
    "leading constant on the d=5 axis",
    "pipeline against series and walk oracles",
    "decomposition against the dense-grid route",
    "subtraction I1 against convolution I1",
    "k-side and y-side I1 within stated errors",
    "decay-exponent fits at d=3 and d=5",
    "u-field decay and the family bound",
    "weighted outer integral shrinks with |x|",
    "bound-ratio stability",
    "mass identity of the smoothed field",
    "byte-identical reruns",
];

pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "ACCEPT c{:02} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Runs one criterion by id (1-based). `bin` is the CLI binary used by
/// the rerun-determinism check; the numeric criteria ignore it.
pub fn run_criterion(id: usize, bin: &Path) -> CriterionOutcome {
    let name = CRITERIA.get(id - 1).copied().unwrap_or("unknown criterion");
    let started = Instant::now();
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| match id {
        1 => c01_leading_constant_d3(),
        2 => c02_leading_constant_d5(),
        3 => c03_oracle_agreement(),
        4 => c04_dense_grid_agreement(),
        5 => c05_i1_route_agreement(),
        6 => c06_i1_error_budgets(),
        7 => c07_decay_exponents(),
        8 => c08_u_decay_and_family(),
        9 => c09_outer_integral_shrinks(),
        10 => c10_bound_ratio_stability(),
        11 => c11_mass_identity(),
        12 => c12_byte_identical_reruns(bin),
        _ => Err(CliError::Usage(format!("no criterion with id {id}"))),
    }));
    let elapsed = started.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(Ok((passed, detail))) => (passed, detail),
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(panic) => (false, format!("panicked: {}", panic_text(panic.as_ref()))),
    };
    CriterionOutcome {
        id,
        name,
        passed,
        detail: format!("{detail} [{elapsed:.1}s]"),
    }
}

fn panic_text(panic: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = panic.downcast_ref::<String>() {
        s.clone()
    } else {
        "opaque panic payload".to_string()
    }
}

type Check = Result<(bool, String)>;

fn srw_pipeline(dim: usize, grid_n: Option<usize>) -> Result<Pipeline> {
    let mut cfg = PipelineConfig::defaults(dim)?;
    if let Some(n) = grid_n {
        cfg.grid_n = n;
    }
    Ok(Pipeline::new(cfg)?)
}

/// Symbol and default cutoff for a distribution, as the pipeline builds
/// them.
fn h_and_bump(dist: &StepDistribution) -> Result<(Symbol, BumpFunction)> {
    let f = green_symbol(dist)?;
    let h = h_symbol(&f, h_at_zero(dist)?);
    let chi = make_bump(dist.dim(), PI / 4.0, PI / 2.0)?;
    Ok((h, chi))
}

/// The d=5 axis sweep shared by the leading-constant and exponent-fit
/// criteria; by far the most expensive fixture, so computed once.
fn d5_sweep() -> Result<&'static [DecompositionResult]> {
    static SWEEP: OnceLock<std::result::Result<Vec<DecompositionResult>, String>> =
        OnceLock::new();
    let cached = SWEEP.get_or_init(|| {
        let run = || -> Result<Vec<DecompositionResult>> {
            let pipe = srw_pipeline(5, None)?;
            Ok(pipe.axis_sweep(10, 40, 2)?)
        };
        run().map_err(|e| e.to_string())
    });
    match cached {
        Ok(rows) => Ok(rows.as_slice()),
        Err(e) => Err(CliError::Usage(format!("d=5 sweep fixture failed: {e}"))),
    }
}

/// c01: `L * f(L e_1)` reaches `3/(2 pi)` within 2% by L = 60, the
/// deviation shrinks from L = 20 on, and the sweep (which resolves the
/// phase with ~480 effective nodes per axis) stays under five minutes.
fn c01_leading_constant_d3() -> Check {
    const REL_AT_60: f64 = 0.02;
    const BUDGET_SECS: f64 = 300.0;
    let target = 3.0 / (2.0 * PI);
    let started = Instant::now();
    let pipe = srw_pipeline(3, None)?;
    let rows = pipe.axis_sweep(20, 60, 10)?;
    let elapsed = started.elapsed().as_secs_f64();

    let devs: Vec<f64> = rows
        .iter()
        .map(|r| {
            let l = r.x[0] as f64;
            ((l * r.f_total.re - target) / target).abs()
        })
        .collect();
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let last = *devs.last().unwrap();
    let pass = last <= REL_AT_60 && decreasing && elapsed < BUDGET_SECS;
    Ok((
        pass,
        format!(
            "rel dev {:.2e} at L=20 -> {:.2e} at L=60 (tol {REL_AT_60:.0e}), \
             decreasing={decreasing}, sweep {elapsed:.1}s",
            devs[0], last
        ),
    ))
}

/// c02: `L^3 f(L e_1)` is within 5% of `5/(4 pi^2)` at L = 30 for the
/// d=5 walk.
fn c02_leading_constant_d5() -> Check {
    const REL_AT_30: f64 = 0.05;
    let target = 5.0 / (4.0 * PI * PI);
    let rows = d5_sweep()?;
    let row = rows
        .iter()
        .find(|r| r.x[0] == 30)
        .expect("sweep 10..=40 step 2 contains L=30");
    let dev = ((30.0f64.powi(3) * row.f_total.re - target) / target).abs();
    Ok((
        dev <= REL_AT_30,
        format!("rel dev {dev:.2e} at L=30 (tol {REL_AT_30:.0e})"),
    ))
}

/// c03: the decomposition matches the series oracle to 1e-3 relative at
/// every point with `1 <= |x|_inf <= 5` (one representative per
/// coordinate-symmetry class), and the walk estimate at (1,0,0) lands
/// within three standard errors of the series value.
fn c03_oracle_agreement() -> Check {
    const REL_TOL: f64 = 1e-3;
    const MC_WALKS: u64 = 1_000_000;
    const MC_SEED: u64 = 2024;

    // Sorted representatives cover the box by symmetry of the walk.
    let mut classes: Vec<Vec<i64>> = Vec::new();
    for a in 0..=5i64 {
        for b in a..=5 {
            for c in b..=5 {
                if c > 0 {
                    classes.push(vec![a, b, c]);
                }
            }
        }
    }
    assert_eq!(classes.len(), 55);

    let pipe = srw_pipeline(3, None)?;
    let series = green_series_many(pipe.distribution(), &classes, 4000, 1e-9)?;

    let mut worst = (0.0f64, String::new());
    for (x, s) in classes.iter().zip(&series) {
        let row = pipe.decompose_at(x)?;
        let rel = ((row.f_total.re - s.value) / s.value).abs();
        if rel > worst.0 {
            worst = (rel, point_cell(x));
        }
    }

    let unit = classes.iter().position(|c| c == &vec![0, 0, 1]).unwrap();
    let mc = green_mc_oracle(pipe.distribution(), &[0, 0, 1], MC_WALKS, MC_SEED)?;
    let mc_gap = (mc.mean - series[unit].value).abs();
    let mc_ok = mc_gap <= 3.0 * mc.stderr;

    let pass = worst.0 <= REL_TOL && mc_ok;
    Ok((
        pass,
        format!(
            "worst rel {:.2e} at x = {} over 55 classes (tol {REL_TOL:.0e}); \
             walk gap {mc_gap:.2e} vs 3*stderr {:.2e}",
            worst.0,
            worst.1,
            3.0 * mc.stderr
        ),
    ))
}

/// c04: `I1 + I2` agrees with the dense-grid transform within the sum of
/// the two routes' own error estimates, at ten fixed points per
/// dimension.
fn c04_dense_grid_agreement() -> Check {
    // (pipeline grid, dense-transform nodes per axis) chosen so the
    // dense route stays inside the dense-grid point cap per dimension.
    let setups: [(usize, usize, usize); 3] = [(3, 128, 64), (4, 128, 32), (5, 64, 16)];
    let points = |d: usize| -> Vec<Vec<i64>> {
        match d {
            3 => vec![
                vec![1, 0, 0],
                vec![1, 1, 0],
                vec![1, 1, 1],
                vec![2, 1, 0],
                vec![3, 0, 0],
                vec![3, 2, 1],
                vec![4, 4, 2],
                vec![5, 0, 0],
                vec![6, 3, 1],
                vec![8, 1, 1],
            ],
            4 => vec![
                vec![1, 0, 0, 0],
                vec![1, 1, 0, 0],
                vec![1, 1, 1, 1],
                vec![2, 1, 0, 0],
                vec![2, 2, 1, 0],
                vec![3, 0, 0, 0],
                vec![3, 2, 1, 0],
                vec![4, 1, 1, 0],
                vec![4, 3, 0, 0],
                vec![5, 2, 1, 1],
            ],
            _ => vec![
                vec![1, 0, 0, 0, 0],
                vec![1, 1, 0, 0, 0],
                vec![1, 1, 1, 0, 0],
                vec![1, 1, 1, 1, 1],
                vec![2, 0, 0, 0, 0],
                vec![2, 1, 1, 0, 0],
                vec![2, 2, 1, 0, 0],
                vec![3, 0, 0, 0, 0],
                vec![3, 1, 1, 1, 0],
                vec![3, 2, 0, 0, 0],
            ],
        }
    };

    let mut worst = (0.0f64, String::new());
    for (d, grid_n, dense_n) in setups {
        let pipe = srw_pipeline(d, Some(grid_n))?;
        let dense = inverse_ft_grid(pipe.green(), &QuadratureGrid::new(d, dense_n)?)?;
        for x in points(d) {
            let row = pipe.decompose_at(&x)?;
            let budget = row.error_estimate + aliasing_estimate(d, pipe.h0(), dense_n, &x)?;
            let gap = (row.f_total.re - dense.get(&x).re).abs();
            let used = gap / budget;
            if used > worst.0 {
                worst = (used, format!("d={d} x = {}", point_cell(&x)));
            }
        }
    }
    Ok((
        worst.0 <= 1.0,
        format!(
            "worst |gap|/budget {:.2e} at {} over 30 points (needs <= 1)",
            worst.0, worst.1
        ),
    ))
}

/// c05: the k-side subtraction route and the y-side convolution route
/// give the same I1 to 1e-3 relative at |x| = 10, 20, 40 on the axis.
fn c05_i1_route_agreement() -> Check {
    const REL_TOL: f64 = 1e-3;
    let dist = StepDistribution::srw(3)?;
    let (h, chi) = h_and_bump(&dist)?;
    let conv_grid = QuadratureGrid::new(3, 64)?;

    let mut worst = (0.0f64, 0i64);
    for l in [10i64, 20, 40] {
        let x = [l, 0, 0];
        // The k-side fold must resolve the phase (~8 nodes per unit of
        // |x|) and still sit above the floor where the subtracted term
        // beats quadrature noise. The y-side error is dominated by the
        // domain tail, so the domain runs well past its 2|x| minimum.
        let sub_grid = QuadratureGrid::new(3, (8 * l as usize).max(128))?;
        let domain = (2.5 * l as f64).max(100.0);
        let sub = i1_subtraction(&h, &chi, &x, &sub_grid)?;
        let conv = i1_riesz(&h, &chi, &x, domain, &conv_grid)?;
        let rel = ((sub.value - conv.value) / conv.value).abs();
        if rel > worst.0 {
            worst = (rel, l);
        }
    }
    Ok((
        worst.0 <= REL_TOL,
        format!(
            "worst rel {:.2e} at L={} (tol {REL_TOL:.0e})",
            worst.0, worst.1
        ),
    ))
}

/// c06: at three off-axis points the two I1 routes agree within the sum
/// of their own reported error estimates.
fn c06_i1_error_budgets() -> Check {
    let dist = StepDistribution::srw(3)?;
    let (h, chi) = h_and_bump(&dist)?;
    let sub_grid = QuadratureGrid::new(3, 64)?;
    let conv_grid = QuadratureGrid::new(3, 64)?;

    let mut worst = (0.0f64, String::new());
    for x in [[6i64, 0, 0], [4, 2, 0], [3, 3, 3]] {
        let sub = i1_subtraction(&h, &chi, &x, &sub_grid)?;
        let conv = i1_riesz(&h, &chi, &x, 64.0, &conv_grid)?;
        let gap = (sub.value - conv.value).abs();
        let budget = sub.error + conv.error;
        let used = gap / budget;
        if used > worst.0 {
            worst = (used, point_cell(&x));
        }
    }
    Ok((
        worst.0 <= 1.0,
        format!(
            "worst |gap|/(combined errors) {:.2e} at x = {} (needs <= 1)",
            worst.0, worst.1
        ),
    ))
}

/// c07: log-log fits of `f` along the axis, L = 10..40, recover the
/// decay exponent `-(d-2)` within 0.05 for d = 3 and d = 5.
fn c07_decay_exponents() -> Check {
    const SLOPE_TOL: f64 = 0.05;

    let pipe3 = srw_pipeline(3, None)?;
    let rows3: Vec<(f64, f64)> = pipe3
        .axis_sweep(10, 40, 2)?
        .iter()
        .map(|r| (r.x[0] as f64, r.f_total.re))
        .collect();
    let (slope3, _, _) = fit_decay_exponent(&rows3)?;

    let rows5: Vec<(f64, f64)> = d5_sweep()?
        .iter()
        .map(|r| (r.x[0] as f64, r.f_total.re))
        .collect();
    let (slope5, _, _) = fit_decay_exponent(&rows5)?;

    let dev3 = (slope3 + 1.0).abs();
    let dev5 = (slope5 + 3.0).abs();
    Ok((
        dev3 <= SLOPE_TOL && dev5 <= SLOPE_TOL,
        format!(
            "slopes {slope3:.4} (want -1) and {slope5:.4} (want -3), tol {SLOPE_TOL}"
        ),
    ))
}

/// c08: the weighted field `u(y) = |y|^{d-1} s(y)` at d=3 at least
/// halves its shell sup between radius 10 and radius 80; and across the
/// short-range family R = 1, 2, 3 the sup stays below a single multiple
/// of the window norm of the symbol.
fn c08_u_decay_and_family() -> Check {
    const FAMILY_SPREAD: f64 = 10.0;
    let grid = QuadratureGrid::new(3, 64)?;
    let norm_grid = QuadratureGrid::new(3, 32)?;

    let dist = StepDistribution::srw(3)?;
    let (h, chi) = h_and_bump(&dist)?;
    let sups = u_decay_check(&h, &chi, &[10.0, 80.0], &grid)?;
    let halves = sups[1].1 <= 0.5 * sups[0].1;

    let c = greenfn::symbols::constants(3)?;
    let mut ratios = Vec::new();
    for r in 1..=3i64 {
        let dist = StepDistribution::spread_out(3, r)?;
        let (h, chi) = h_and_bump(&dist)?;
        let sup = u_decay_check(&h, &chi, &[10.0, 20.0], &grid)?
            .into_iter()
            .map(|(_, s)| s)
            .fold(0.0f64, f64::max);
        let norm_h = sobolev_norm(&h, NormRegion::OuterBall, c.n, c.p, &norm_grid, &chi)?;
        if !(sup.is_finite() && norm_h.is_finite() && norm_h > 0.0) {
            return Ok((false, format!("range {r}: sup {sup}, norm {norm_h}")));
        }
        ratios.push(sup / norm_h);
    }
    let spread = ratios.iter().fold(0.0f64, |m, r| m.max(*r))
        / ratios.iter().fold(f64::INFINITY, |m, r| m.min(*r));
    let pass = halves && spread <= FAMILY_SPREAD;
    Ok((
        pass,
        format!(
            "sup {:.3e} at rho=10 -> {:.3e} at rho=80 (halves={halves}); \
             family sup/norm ratios spread x{spread:.2} (tol x{FAMILY_SPREAD})",
            sups[0].1, sups[1].1
        ),
    ))
}

/// c09: the weighted outer integral `|x|^{d-2} J2(x)` at cut fraction
/// 1/2 shrinks monotonically over L = 10, 20, 40.
fn c09_outer_integral_shrinks() -> Check {
    let dist = StepDistribution::srw(3)?;
    let (h, chi) = h_and_bump(&dist)?;
    let grid = QuadratureGrid::new(3, 64)?;
    let mut vals = Vec::new();
    for l in [10i64, 20, 40] {
        let x = [l, 0, 0];
        vals.push(j2_tail(&h, &chi, &x, 0.5, &grid)?.value);
    }
    // "Decreases toward zero" for a sign-oscillating quantity: the
    // modulus shrinks at every step.
    let pass = vals[0].abs() > vals[1].abs() && vals[1].abs() > vals[2].abs();
    Ok((
        pass,
        format!(
            "|x|^(d-2) J2: {:+.3e} -> {:+.3e} -> {:+.3e} over L=10,20,40",
            vals[0], vals[1], vals[2]
        ),
    ))
}

/// c10: the remainder-to-norms ratio of the report is finite, moves by
/// at most 20% when the sweep range doubles, and stays within one order
/// of magnitude across the model family.
fn c10_bound_ratio_stability() -> Check {
    const RANGE_DRIFT: f64 = 0.20;
    const FAMILY_SPREAD: f64 = 10.0;

    let report_for = |model: ModelChoice, norm_grid_n: usize, l_max: i64| -> Result<f64> {
        let mut cfg = PipelineConfig::defaults(3)?;
        cfg.model = model;
        cfg.grid_n = 128;
        cfg.norm_grid_n = norm_grid_n;
        let report = Pipeline::new(cfg)?.report(10, l_max, 2)?;
        if !(report.bound_ratio.is_finite() && report.bound_ratio > 0.0) {
            return Err(CliError::Estimate(format!(
                "bound ratio {} not finite and positive",
                report.bound_ratio
            )));
        }
        Ok(report.bound_ratio)
    };

    let base = report_for(ModelChoice::Srw, 64, 30)?;
    let doubled = report_for(ModelChoice::Srw, 64, 60)?;
    let drift = (doubled / base - 1.0).abs();

    let mut family = vec![report_for(ModelChoice::Srw, 32, 30)?];
    for r in 1..=2i64 {
        family.push(report_for(ModelChoice::SpreadOut(r), 32, 30)?);
    }
    let spread = family.iter().fold(0.0f64, |m, v| m.max(*v))
        / family.iter().fold(f64::INFINITY, |m, v| m.min(*v));

    let pass = drift <= RANGE_DRIFT && spread <= FAMILY_SPREAD;
    Ok((
        pass,
        format!(
            "ratio {base:.3e}, drift {:.1}% on doubled range (tol 20%), \
             family spread x{spread:.2} (tol x{FAMILY_SPREAD})",
            100.0 * drift
        ),
    ))
}

/// c11: the field integrates back to `h(0)`: `|sum_y s(y) - h(0)|`
/// within 1e-6 for the d=3 walk over a radius-256 ball with a fitted
/// tail.
fn c11_mass_identity() -> Check {
    const TOL: f64 = 1e-6;
    let dist = StepDistribution::srw(3)?;
    let (h, chi) = h_and_bump(&dist)?;
    let grid = QuadratureGrid::new(3, 64)?;
    let mass = s_mass(&h, &chi, 256.0, &grid)?;
    let gap = (mass.value - 6.0).abs();
    Ok((
        gap <= TOL,
        format!("|mass - h(0)| = {gap:.2e} (tol {TOL:.0e})"),
    ))
}

/// c12: rerunning the binary with identical flags gives byte-identical
/// data output, on stdout and through `--output`.
fn c12_byte_identical_reruns(bin: &Path) -> Check {
    let cases: [&[&str]; 5] = [
        &["constants", "--dim", "4"],
        &["green", "--dim", "3", "--grid-n", "64", "2,1,0", "1,0,0", "--", "-3,2,1"],
        &["green", "--dim", "3", "--grid-n", "64", "--format", "json", "2,1,0"],
        &["oracle", "--dim", "3", "--seed", "7", "0,0,0", "1,0,0"],
        &[
            "asymptote", "--dim", "3", "--grid-n", "64", "--L-min", "2", "--L-max", "8",
            "--L-step", "2",
        ],
    ];
    for args in cases {
        let first = run_binary(bin, args, None)?;
        let second = run_binary(bin, args, None)?;
        if first != second {
            return Ok((false, format!("stdout differs across reruns of {args:?}")));
        }
    }

    // Same through a file sink.
    let tmp = std::env::temp_dir();
    let pid = std::process::id();
    let path_a = tmp.join(format!("greenfn-verify-{pid}-a.csv"));
    let path_b = tmp.join(format!("greenfn-verify-{pid}-b.csv"));
    let args = ["green", "--dim", "3", "--grid-n", "64", "3,1,0"];
    let out_a = run_binary(bin, &args, Some(&path_a))?;
    let out_b = run_binary(bin, &args, Some(&path_b))?;
    let file_a = std::fs::read(&path_a)?;
    let file_b = std::fs::read(&path_b)?;
    let _ = std::fs::remove_file(&path_a);
    let _ = std::fs::remove_file(&path_b);
    if !(out_a.is_empty() && out_b.is_empty()) {
        return Ok((false, "data leaked to stdout despite --output".into()));
    }
    if file_a != file_b {
        return Ok((false, "file output differs across reruns".into()));
    }
    Ok((true, "5 stdout cases and 1 file case byte-identical".into()))
}

/// Runs the CLI binary, asserting success; returns captured stdout.
fn run_binary(bin: &Path, args: &[&str], output: Option<&Path>) -> Result<Vec<u8>> {
    let mut cmd = Command::new(bin);
    cmd.args(args);
    if let Some(path) = output {
        cmd.arg("--output").arg(path);
    }
    let out = cmd.output()?;
    if !out.status.success() {
        return Err(CliError::Usage(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        )));
    }
    Ok(out.stdout)
}
