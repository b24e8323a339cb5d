use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use serde_json::json;

use salhi_core::analytic::{self, DetectionScheme};
use salhi_core::moments::{self, OutputChannel};
use salhi_core::optimizer::{optimize_g2, run_sweep, Grid, Objective, SweepObjective, SweepResult, SweepSpec, Swept};
use salhi_core::verify::{run_verification, VerifyOptions};
use salhi_core::{Config, GainFactor, SeedKind, SeedSpec};

use crate::config::{Format, RunConfig};
use crate::output::{g12, render_svg, sweep_csv, write_atomic, Plot, Series};

/// Resolved command context: configuration plus output choices.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub grid_size: Option<usize>,
}

impl Ctx {
    fn wants(&self, f: Format, default: &[Format]) -> bool {
        if self.formats.is_empty() {
            default.contains(&f)
        } else {
            self.formats.contains(&f)
        }
    }

    fn emit(&self, name: &str, contents: &str) -> Result<()> {
        let path = write_atomic(&self.out, name, contents)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn emit_json(&self, name: &str, mut body: serde_json::Value) -> Result<()> {
        body["config"] = serde_json::to_value(&self.cfg)?;
        self.emit(&format!("{name}.json"), &serde_json::to_string_pretty(&body)?)
    }
}

fn with_kind(c: &Config, kind: SeedKind) -> Config {
    c.with_seed(SeedSpec { kind, ..c.seed })
}

fn line(label: &str, value: f64) {
    println!("{label:<34} {}", g12(value));
}

pub fn visibility(ctx: &Ctx) -> Result<()> {
    let c = ctx.cfg.interferometer()?;
    let v_opt = analytic::visibility_su(&with_kind(&c, SeedKind::Optical)).value;
    let v_atom = analytic::visibility_su(&with_kind(&c, SeedKind::Atomic)).value;
    let v_mz = analytic::visibility_mz(&c.losses).value;
    let v_exact = moments::exact_visibility(&c, OutputChannel::Optical).value;
    let r_opt = analytic::condition_residual(&with_kind(&c, SeedKind::Optical), DetectionScheme::Id);
    let r_atom = analytic::condition_residual(&with_kind(&c, SeedKind::Atomic), DetectionScheme::Id);
    let r_bhd = analytic::condition_residual(&c, DetectionScheme::Bhd);
    line("V_SU (optical seed)", v_opt);
    line("V_SU (atomic seed)", v_atom);
    line("V_MZ", v_mz);
    line("V_SU exact moments (config seed)", v_exact);
    line("ID residual (optical seed)", r_opt);
    line("ID residual (atomic seed)", r_atom);
    line("BHD residual", r_bhd);
    if ctx.wants(Format::Json, &[]) {
        ctx.emit_json(
            "visibility",
            json!({
                "visibility_su_optical": v_opt,
                "visibility_su_atomic": v_atom,
                "visibility_mz": v_mz,
                "visibility_su_exact": v_exact,
                "condition_residual_id_optical": r_opt,
                "condition_residual_id_atomic": r_atom,
                "condition_residual_bhd": r_bhd,
            }),
        )?;
    }
    Ok(())
}

pub fn snr(ctx: &Ctx) -> Result<()> {
    let c = ctx.cfg.interferometer()?;
    let id = analytic::snr_su_id(&c);
    let bhd = analytic::snr_su_bhd(&c);
    let id_exact = moments::snr_numeric(&c, DetectionScheme::Id, OutputChannel::Optical);
    let bhd_exact = moments::snr_numeric(&c, DetectionScheme::Bhd, OutputChannel::Optical);
    let mz = analytic::snr_mz(&c.losses, &c.stage1, &c.probe, c.seed.mean_photon_number);
    for (label, o) in [
        ("SNR_SU ID (closed form)", id),
        ("SNR_SU ID (exact moments)", id_exact),
        ("SNR_SU BHD (closed form)", bhd),
        ("SNR_SU BHD (exact moments)", bhd_exact),
        ("SNR_MZ", mz),
    ] {
        if o.is_ok() {
            line(label, o.value);
        } else {
            println!("{label:<34} {:?}", o.status);
        }
    }
    if ctx.wants(Format::Json, &[]) {
        ctx.emit_json(
            "snr",
            json!({
                "snr_su_id": id, "snr_su_id_exact": id_exact,
                "snr_su_bhd": bhd, "snr_su_bhd_exact": bhd_exact,
                "snr_mz": mz,
            }),
        )?;
    }
    Ok(())
}

/// Tolerance on `|G₂*_V − G₂*_SNR|` below which the optima are reported as
/// coinciding.
const COINCIDENCE_TOL: f64 = 1e-3;

pub fn optimize(ctx: &Ctx) -> Result<()> {
    let c = ctx.cfg.interferometer()?;
    let bounds = ctx.cfg.bounds();
    let v = optimize_g2(&c, Objective::Visibility, DetectionScheme::Id, bounds);
    println!("{:<6} {:<11} {:>14} {:>14} {:>6}", "scheme", "objective", "G2*", "value", "exact");
    let row = |scheme: &str, objective: &str, g: f64, value: f64, exact: bool| {
        println!("{scheme:<6} {objective:<11} {:>14} {:>14} {:>6}", g12(g), g12(value), u8::from(exact));
    };
    row("-", "visibility", v.gain.amplitude(), v.value, v.exact);
    let mut body = json!({
        "visibility": { "g2": v.gain.amplitude(), "value": v.value, "exact": v.exact, "flat": v.flat },
    });
    for (name, scheme) in [("id", DetectionScheme::Id), ("bhd", DetectionScheme::Bhd)] {
        let s = optimize_g2(&c, Objective::Snr, scheme, bounds);
        row(name, "snr", s.gain.amplitude(), s.value, s.exact);
        let diff = (s.gain.amplitude() - v.gain.amplitude()).abs();
        body[name] = json!({
            "g2": s.gain.amplitude(), "value": s.value, "exact": s.exact, "flat": s.flat,
            "difference_from_visibility_optimum": diff,
        });
        let verdict = if diff <= COINCIDENCE_TOL { "coincide" } else { "diverge" };
        println!("  {name} SNR optimum and visibility optimum {verdict} (|dG2| = {})", g12(diff));
    }
    if let Some(l_b) = analytic::loss_balance_point(&c.stage1, &c.stage2, c.losses.eta, c.seed.kind) {
        line("l_B for the configured gains", l_b);
        body["l_b"] = json!(l_b);
    }
    if ctx.wants(Format::Json, &[]) {
        ctx.emit_json("optimize", body)?;
    }
    Ok(())
}

fn write_sweep(ctx: &Ctx, name: &str, result: &SweepResult<f64>, plot: Vec<Plot>, defaults: &[Format]) -> Result<()> {
    if ctx.wants(Format::Csv, defaults) {
        let rows: Vec<_> = result.rows.iter().map(|r| (Vec::new(), r)).collect();
        ctx.emit(&format!("{name}.csv"), &sweep_csv(&[], &rows))?;
    }
    if ctx.wants(Format::Json, defaults) {
        ctx.emit_json(name, json!({ "result": result }))?;
    }
    if ctx.wants(Format::Svg, defaults) {
        ctx.emit(&format!("{name}.svg"), &render_svg(&plot, plot.len().min(2)))?;
    }
    Ok(())
}

fn column(result: &SweepResult<f64>, f: impl Fn(&salhi_core::optimizer::SweepRow<f64>) -> Option<f64>) -> Vec<(f64, f64)> {
    result.rows.iter().filter_map(|r| f(r).map(|y| (r.swept_value, y))).collect()
}

fn swept_label(s: Swept) -> &'static str {
    match s {
        Swept::LossL => "loss rate l",
        Swept::LossEta => "dephasing rate eta",
        Swept::G2 => "G2",
        Swept::Phi => "phase phi (rad)",
    }
}

pub fn sweep(ctx: &Ctx) -> Result<()> {
    let spec = ctx.cfg.sweep_spec(ctx.grid_size)?;
    let result = run_sweep(&spec).map_err(|r| anyhow::anyhow!("invalid sweep: {r}"))?;
    let x = swept_label(spec.swept);
    let mut v = vec![
        Series::new("V_SU", column(&result, |r| Some(r.visibility_su))),
        Series::new("V_MZ", column(&result, |r| Some(r.visibility_mz))).dashed(),
    ];
    let mut s = vec![
        Series::new("log10 SNR_SU", column(&result, |r| Some(r.snr_su.log10()))),
        Series::new("log10 SNR_MZ", column(&result, |r| Some(r.snr_mz.log10()))).dashed(),
    ];
    if spec.objective.is_some() {
        v.push(Series::new("V_SU optimized", column(&result, |r| r.visibility_su_opt)));
        s.push(Series::new("log10 SNR_SU optimized", column(&result, |r| r.snr_su_opt.map(f64::log10))));
    }
    let plots = vec![
        Plot { title: "Visibility".into(), x_label: x.into(), y_label: "visibility".into(), series: v },
        Plot { title: "SNR".into(), x_label: x.into(), y_label: "log10 SNR".into(), series: s },
    ];
    write_sweep(ctx, "sweep", &result, plots, &[Format::Csv])?;
    println!("{} rows", result.rows.len());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureName {
    Fig2b,
    Fig3,
    Fig4a,
}

const FIGURE_DEFAULTS: [Format; 2] = [Format::Csv, Format::Svg];

/// Illustrative parameter sets for the three loss-sweep panels.
pub const FIG3_PANELS: [(f64, f64); 3] = [(2.0, 0.2), (3.0, 0.4), (4.0, 0.6)];

fn loss_spec(base: Config, ctx: &Ctx, min: f64, max: f64, points: usize, objective: Option<SweepObjective>) -> SweepSpec<f64> {
    SweepSpec {
        swept: Swept::LossL,
        grid: Grid { min, max, points: ctx.grid_size.unwrap_or(points) },
        base,
        scheme: ctx.cfg.scheme,
        objective,
        bounds: ctx.cfg.bounds(),
    }
}

fn sweep_or_fail(spec: &SweepSpec<f64>) -> Result<SweepResult<f64>> {
    run_sweep(spec).map_err(|r| anyhow::anyhow!("invalid sweep: {r}"))
}

pub fn figure(ctx: &Ctx, name: FigureName) -> Result<()> {
    let base = ctx.cfg.interferometer()?;
    match name {
        FigureName::Fig2b => {
            let result = sweep_or_fail(&loss_spec(base, ctx, 0.6, 0.96, 37, None))?;
            let plot = Plot {
                title: "Visibility versus internal loss".into(),
                x_label: "loss rate l".into(),
                y_label: "visibility V".into(),
                series: vec![
                    Series::new("V_SU theory", column(&result, |r| Some(r.visibility_su))),
                    Series::new("V_MZ theory", column(&result, |r| Some(r.visibility_mz))).dashed(),
                ],
            };
            write_sweep(ctx, "fig2b", &result, vec![plot], &FIGURE_DEFAULTS)
        }
        FigureName::Fig4a => {
            let result = sweep_or_fail(&loss_spec(base, ctx, 0.0, 0.99, 100, Some(SweepObjective::Visibility)))?;
            let plot = Plot {
                title: "Optimized visibility versus loss".into(),
                x_label: "loss rate l".into(),
                y_label: "visibility V".into(),
                series: vec![
                    Series::new("V_opt (G2 optimized)", column(&result, |r| r.visibility_su_opt)),
                    Series::new("V_SU (configured G2)", column(&result, |r| Some(r.visibility_su))).dashed(),
                ],
            };
            write_sweep(ctx, "fig4a", &result, vec![plot], &FIGURE_DEFAULTS)
        }
        FigureName::Fig3 => fig3(ctx, base),
    }
}

fn fig3(ctx: &Ctx, base: Config) -> Result<()> {
    let mut results = Vec::new();
    for &(g1, eta) in &FIG3_PANELS {
        let mut cfg = base.with_stage1(GainFactor::from_amplitude(g1)?);
        cfg.losses.eta = eta;
        let result = sweep_or_fail(&loss_spec(cfg, ctx, 0.0, 0.99, 50, Some(SweepObjective::Both)))?;
        results.push((g1, eta, result));
    }
    if ctx.wants(Format::Csv, &FIGURE_DEFAULTS) {
        let rows: Vec<_> = results
            .iter()
            .enumerate()
            .flat_map(|(i, (g1, eta, res))| res.rows.iter().map(move |r| (vec![i.to_string(), g12(*g1), g12(*eta)], r)))
            .collect();
        ctx.emit("fig3.csv", &sweep_csv(&["panel", "g1", "eta"], &rows))?;
    }
    if ctx.wants(Format::Json, &FIGURE_DEFAULTS) {
        let panels: Vec<_> = results.iter().map(|(g1, eta, res)| json!({ "g1": g1, "eta": eta, "result": res })).collect();
        ctx.emit_json("fig3", json!({ "illustrative_panels": true, "panels": panels }))?;
    }
    if ctx.wants(Format::Svg, &FIGURE_DEFAULTS) {
        let mut plots = Vec::new();
        let title = |what: &str, g1: f64, eta: f64| format!("{what} (illustrative G1={g1}, eta={eta})");
        for (g1, eta, res) in &results {
            plots.push(Plot {
                title: title("V", *g1, *eta),
                x_label: "loss rate l".into(),
                y_label: "visibility".into(),
                series: vec![
                    Series::new("before optimization", column(res, |r| Some(r.visibility_su))).dashed(),
                    Series::new("after optimization", column(res, |r| r.visibility_su_opt)),
                ],
            });
        }
        for (g1, eta, res) in &results {
            plots.push(Plot {
                title: title("SNR", *g1, *eta),
                x_label: "loss rate l".into(),
                y_label: "log10 SNR_SU".into(),
                series: vec![
                    Series::new("before optimization", column(res, |r| Some(r.snr_su.log10()))).dashed(),
                    Series::new("after optimization", column(res, |r| r.snr_su_opt.map(f64::log10))),
                ],
            });
        }
        for (g1, eta, res) in &results {
            plots.push(Plot {
                title: title("G2/G1", *g1, *eta),
                x_label: "loss rate l".into(),
                y_label: "G2*/G1".into(),
                series: vec![
                    Series::new("max V", column(res, |r| r.optimal_g2_for_v.map(|g| g / g1))),
                    Series::new("max SNR", column(res, |r| r.optimal_g2_for_snr.map(|g| g / g1))).dashed(),
                ],
            });
        }
        ctx.emit("fig3.svg", &render_svg(&plots, 3))?;
    }
    Ok(())
}

/// Runs the cross-check suite; returns whether every check passed.
pub fn verify(ctx: &Ctx, inject_fault: bool) -> Result<bool> {
    let opts = VerifyOptions {
        grid_size: ctx.grid_size.unwrap_or(VerifyOptions::default().grid_size),
        seed: ctx.cfg.random_seed,
        inject_fault,
        ..Default::default()
    };
    let start = Instant::now();
    let report = run_verification(&opts);
    for c in &report.checks {
        println!(
            "{} {:<32} worst {:>12}  tol {:>7}  n = {:<4} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            g12(c.worst),
            g12(c.tolerance),
            c.samples,
            c.detail
        );
    }
    println!("{} checks in {:.2} s", report.checks.len(), start.elapsed().as_secs_f64());
    if ctx.wants(Format::Json, &[]) {
        ctx.emit_json("verify", json!({ "passed": report.passed(), "checks": report.checks }))?;
    }
    let failed: Vec<_> = report.failures().map(|c| c.name).collect();
    if !failed.is_empty() {
        eprintln!("verification failed: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}

pub fn out_dir(cli: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    cli.map(Path::to_path_buf).or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}
