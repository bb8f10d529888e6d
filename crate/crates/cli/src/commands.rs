use anyhow::{bail, Result};
use gabortile::{
    build_h, density_from_tiling, detect_periodic_form, difference_zero_set_check, flc_check,
    liu_wang_conditions, nonnegative_structure, tiling_sum, uniform_density, verify_h_tiling,
    verify_onb, Atom, GaborSystem, Grid, LiuWangConfig, OnbConfig, PairReport, PeriodicForm,
    ShiftSet, SpectralDensity, TilingReport,
};
use serde_json::json;

use crate::input::{Input, Which};
use crate::report::Report;
use crate::{Common, GridArgs, Side};

fn positive(name: &str, value: f64) -> Result<f64> {
    if !(value > 0.0 && value.is_finite()) {
        bail!("--{name} must be positive and finite, got {value}");
    }
    Ok(value)
}

fn pick(name: &str, given: Option<f64>, default: f64) -> Result<f64> {
    positive(name, given.unwrap_or(default))
}

/// The exact periodic form of a set, or one detected from its points.
fn periodic(set: &ShiftSet<f64>) -> Result<Option<PeriodicForm<f64>>> {
    if let Some(form) = set.periodic_form() {
        return Ok(Some(form));
    }
    let (lo, hi) = set.valid_window().unwrap_or((-40.0, 40.0));
    let pts = set.enumerate(lo, hi)?;
    if pts.len() < 4 {
        return Ok(None);
    }
    Ok(detect_periodic_form(&pts, (hi - lo) / 4.0, 1e-9)?)
}

fn grid(args: &GridArgs, common: &Common, period: f64) -> Result<Grid<f64>> {
    let step = pick("grid-step", common.grid_step, 1.0 / 128.0)?;
    let lo = args.grid_lo.unwrap_or(0.0);
    let hi = args.grid_hi.unwrap_or(lo + period);
    Ok(Grid::half_open(lo, hi, step)?)
}

fn atom(a: Atom<f64>) -> String {
    format!("(t={}, s={})", a.t, a.s)
}

fn tiling_lines(report: Report, rep: &TilingReport<f64>) -> Report {
    report
        .line(format!(
            "level {}: max deviation {:e} at {}, truncation tail {:e}, combined {:e} (tol {:e})",
            rep.level_target,
            rep.max_abs_deviation,
            rep.worst_abscissa,
            rep.truncation_tail_bound,
            rep.combined_error,
            rep.tolerance
        ))
        .line(format!(
            "{} grid points, {} shifts within truncation {}",
            rep.grid.count, rep.shifts_used, rep.truncation
        ))
}

fn pair_line(name: &str, rep: &PairReport<f64>) -> String {
    let mut line = format!(
        "{name}: {} (violation {:e}, tol {:e})",
        if rep.verdict { "holds" } else { "fails" },
        rep.max_violation,
        rep.tolerance
    );
    for c in &rep.checks {
        line.push_str(&format!(
            "\n  {}: {} (violation {:e}, tol {:e})",
            c.name,
            if c.verdict { "holds" } else { "fails" },
            c.violation,
            c.tolerance
        ));
    }
    for w in rep.witnesses.iter().take(5) {
        line.push_str(&format!("\n  witness at {}: {:e}", w.at, w.value));
    }
    line
}

pub fn verify_onb_cmd(input: &Input, common: &Common) -> Result<Report> {
    let trunc_time = pick("trunc-time", common.trunc_time, 6.0)?;
    let trunc_freq = pick("trunc-freq", common.trunc_freq, 6.0)?;
    let config = OnbConfig {
        gram_tol: pick("tol", common.tol, 1e-10)?,
        ..OnbConfig::default()
    };
    let sys = GaborSystem::new(
        input.window()?,
        input.shift_set(Which::T)?,
        input.shift_set(Which::S)?,
        trunc_time,
        trunc_freq,
    )?;
    let rep = verify_onb(&sys, &config)?;
    let g = &rep.gram;
    let mut report = Report::new("verify-onb", &input.label, rep.verdict, &rep)?
        .param("trunc_time", trunc_time)?
        .param("trunc_freq", trunc_freq)?
        .param("gram_tol", config.gram_tol)?
        .param("defect_tol", config.defect_tol)?
        .param("max_trunc_freq", config.max_trunc_freq)?
        .line(format!(
            "gram: max off-diagonal {:e}, max diagonal deviation {:e} ({} pairs checked, {} skipped by support)",
            g.max_off_diagonal, g.max_diagonal_deviation, g.pairs_checked, g.pairs_skipped
        ));
    if let Some(w) = &g.worst_pair {
        report = report.line(format!(
            "worst pair: {} vs {}, |<.,.>| = {:e}",
            atom(w.first),
            atom(w.second),
            w.magnitude
        ));
    }
    Ok(report.line(format!(
        "parseval: {} test functions, worst defect {:e}, {}",
        rep.parseval.len(),
        rep.worst_defect,
        if rep.parseval_passes {
            "all within tail bounds"
        } else {
            "defects exceed tail bounds"
        }
    )))
}

pub fn tiling_cmd(
    input: &Input,
    common: &Common,
    side: Side,
    level: Option<f64>,
    args: &GridArgs,
) -> Result<Report> {
    let g = input.window()?;
    let (which, trunc_name, trunc, tol) = match side {
        Side::Time => (
            "T",
            "trunc_time",
            pick("trunc-time", common.trunc_time, 10.0)?,
            pick("tol", common.tol, 1e-12)?,
        ),
        Side::Freq => (
            "S",
            "trunc_freq",
            pick("trunc-freq", common.trunc_freq, 60.0)?,
            pick("tol", common.tol, 0.02)?,
        ),
    };
    let set = input.shift_set(if side == Side::Time {
        Which::T
    } else {
        Which::S
    })?;
    let form = periodic(&set)?;
    let level = match (level, &form) {
        (Some(l), _) => positive("level", l)?,
        (None, Some(f)) => f.density(),
        (None, None) => uniform_density(&set, &[50.0, 100.0, 200.0], 64)?.estimate,
    };
    let grid = grid(args, common, form.as_ref().map_or(1.0, |f| f.period))?;
    let rep = match side {
        Side::Time => tiling_sum(&g.square_modulus(), &set, &grid, trunc, level, tol)?,
        Side::Freq => tiling_sum(&SpectralDensity::new(g), &set, &grid, trunc, level, tol)?,
    };
    let mut report = Report::new("tiling", &input.label, rep.verdict, &rep)?
        .param("side", which)?
        .param(trunc_name, trunc)?
        .param("tol", tol)?
        .param("level", level)?
        .param("grid_start", grid.start)?
        .param("grid_step", grid.step)?
        .param("grid_count", grid.count)?;
    report.grid_csv = Some(rep.to_csv());
    Ok(tiling_lines(report, &rep))
}

pub fn density_cmd(
    input: &Input,
    common: &Common,
    radii: &[f64],
    samples: usize,
) -> Result<Report> {
    let tol = pick("tol", common.tol, 0.02)?;
    for &r in radii {
        positive("radii", r)?;
    }
    let mut report_lines = Vec::new();
    let mut result = serde_json::Map::new();
    let mut estimates = Vec::new();
    for (name, which) in [("T", Which::T), ("S", Which::S)] {
        let sys = input.system()?;
        let present = match which {
            Which::T => sys.time_set.is_some(),
            Which::S => sys.freq_set.is_some(),
        };
        if !present {
            continue;
        }
        let est = uniform_density(&input.shift_set(which)?, radii, samples)?;
        report_lines.push(format!(
            "D({name}) = {} ± {:e} (max gap {})",
            est.estimate, est.error_band, est.max_gap
        ));
        estimates.push(est.estimate);
        result.insert(name.to_string(), serde_json::to_value(&est)?);
    }
    if estimates.is_empty() {
        bail!(
            "{}: input has neither a \"T\" nor an \"S\" shift set",
            input.label
        );
    }
    let verdict = if let [dt, ds] = estimates[..] {
        let product = dt * ds;
        report_lines.push(format!("D(T)·D(S) = {product} (tol {tol:e})"));
        result.insert("product".into(), json!(product));
        (product - 1.0).abs() <= tol
    } else {
        true
    };
    let mut report = Report::new("density", &input.label, verdict, &result)?
        .param("radii", radii)?
        .param("samples", samples)?
        .param("tol", tol)?;
    for line in report_lines {
        report = report.line(line);
    }
    Ok(report)
}

pub fn detect_period_cmd(
    input: &Input,
    common: &Common,
    which: Which,
    lo: f64,
    hi: f64,
    a_max: Option<f64>,
) -> Result<Report> {
    let tol = pick("tol", common.tol, 1e-9)?;
    let pts = input.points(which, lo, hi)?;
    let (Some(&first), Some(&last)) = (pts.first(), pts.last()) else {
        bail!("{}: no points to analyse", input.label);
    };
    let a_max = pick("a-max", a_max, (last - first) / 4.0)?;
    let form = detect_periodic_form(&pts, a_max, tol)?;
    let line = match &form {
        Some(f) => format!(
            "a={}, offsets=[{}]",
            f.period,
            f.offsets
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        ),
        None => format!("no periodic form with period at most {a_max}"),
    };
    Ok(Report::new(
        "detect-period",
        &input.label,
        form.is_some(),
        &json!({ "points": pts.len(), "form": form }),
    )?
    .param("a_max", a_max)?
    .param("tol", tol)?
    .line(line))
}

pub fn flc_cmd(
    input: &Input,
    common: &Common,
    which: Which,
    lo: Option<f64>,
    hi: Option<f64>,
    max_distinct: usize,
) -> Result<Report> {
    let tol = pick("tol", common.tol, 1e-9)?;
    let set = input.set_or_points(which)?;
    let window = set.valid_window().unwrap_or((-40.0, 40.0));
    let (lo, hi) = (lo.unwrap_or(window.0), hi.unwrap_or(window.1));
    let rep = flc_check(&set, lo, hi, tol, max_distinct)?;
    Ok(Report::new("flc", &input.label, rep.verdict, &rep)?
        .param("lo", lo)?
        .param("hi", hi)?
        .param("gap_tol", tol)?
        .param("max_distinct", max_distinct)?
        .line(format!(
            "{} gaps, {} distinct values (max {}): [{}]",
            rep.gap_count,
            rep.gap_values.len(),
            max_distinct,
            rep.gap_values
                .iter()
                .take(max_distinct + 1)
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        )))
}

pub fn h_function_cmd(input: &Input, common: &Common, args: &GridArgs) -> Result<Report> {
    let trunc = pick("trunc-freq", common.trunc_freq, 60.0)?;
    let tol = pick("tol", common.tol, 0.02)?;
    let f = input.analysis_function()?;
    let freq_set = input.shift_set(Which::S)?;
    let h = build_h(&f, &input.window()?, &input.shift_set(Which::T)?)?;
    let period = periodic(&freq_set)?.map_or(1.0, |p| p.period);
    let grid = grid(args, common, period)?;
    let rep = verify_h_tiling(&h, &freq_set, &grid, trunc, tol)?;
    let integral = h.plancherel_integral();
    let density = density_from_tiling(&h, 1.0)?;
    let result = json!({
        "integral": integral,
        "density_from_tiling": density,
        "tiling": rep,
    });
    let mut report = Report::new("h-function", &input.label, rep.verdict, &result)?
        .param("trunc_freq", trunc)?
        .param("tol", tol)?
        .param("grid_start", grid.start)?
        .param("grid_step", grid.step)?
        .param("grid_count", grid.count)?
        .line(format!("integral of H: {integral}"))
        .line(format!(
            "density from tiling: {} ± {:e}",
            density.density, density.error_bound
        ));
    report.grid_csv = Some(rep.to_csv());
    Ok(tiling_lines(report, &rep))
}

pub fn liu_wang_cmd(input: &Input, common: &Common, structure: bool) -> Result<Report> {
    let mut config = LiuWangConfig::default();
    config.trunc_time = pick("trunc-time", common.trunc_time, config.trunc_time)?;
    config.spectral.trunc = pick("trunc-freq", common.trunc_freq, config.spectral.trunc)?;
    config.grid_step = pick("grid-step", common.grid_step, config.grid_step)?;
    let tol = pick("tol", common.tol, config.modulus_tol)?;
    config.modulus_tol = tol;
    config.spectral.orthogonality_tol = tol;

    let (g, t, s) = (
        input.window()?,
        input.shift_set(Which::T)?,
        input.shift_set(Which::S)?,
    );
    let rep = liu_wang_conditions(&g, &t, &s, &config)?;
    let mut verdict = rep.verdict;
    let mut lines = vec![
        format!(
            "|g| = {} on the support (measure {}): {} (violation {:e})",
            rep.modulus.target,
            rep.measure,
            if rep.modulus.verdict {
                "holds"
            } else {
                "fails"
            },
            rep.modulus.max_violation
        ),
        pair_line("(support, T) tiling pair", &rep.tiling),
        pair_line("(support, S) spectral pair", &rep.spectral),
    ];
    let nonneg = if structure {
        let nn = nonnegative_structure(&g, &t, &s, &config)?;
        verdict &= nn.verdict;
        lines.push(format!(
            "nonnegative structure: translates disjoint {}, value check {} (violation {:e}), D(T)·mes = {} {}",
            nn.disjoint,
            nn.value_holds,
            nn.value_violation,
            nn.density_product,
            if nn.product_holds { "holds" } else { "fails" }
        ));
        for w in nn.overlaps.iter().take(5) {
            lines.push(format!("  overlap at shift {}: {:?}", w.delta, w.overlap));
        }
        Some(nn)
    } else {
        None
    };
    let result = json!({ "conditions": rep, "nonnegative_structure": nonneg });
    let mut report = Report::new("liu-wang", &input.label, verdict, &result)?
        .param("trunc_time", config.trunc_time)?
        .param("trunc_freq", config.spectral.trunc)?
        .param("grid_step", config.grid_step)?
        .param("tol", tol)?
        .param("structure", structure)?;
    for line in lines {
        report = report.line(line);
    }
    Ok(report)
}

pub fn zero_set_cmd(input: &Input, common: &Common) -> Result<Report> {
    let trunc = pick("trunc-freq", common.trunc_freq, 6.0)?;
    let tol = pick("tol", common.tol, 1e-10)?;
    let rep = difference_zero_set_check(&input.window()?, &input.shift_set(Which::S)?, trunc, tol)?;
    Ok(Report::new("zero-set", &input.label, rep.verdict, &rep)?
        .param("trunc_freq", trunc)?
        .param("tol", tol)?
        .line(pair_line(
            "(S - S) in the zero set of the transform of |g|^2",
            &rep,
        )))
}
