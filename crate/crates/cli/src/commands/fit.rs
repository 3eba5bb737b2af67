use std::collections::BTreeMap;
use std::path::Path;

use nitrq_core::dynamics::TimeTrace;
use nitrq_core::fit::{fit_trace, FitOptions, FitResult, Model, ModelKind};
use nitrq_core::junction::{
    analyze_iv_with, jc_cycles_fit, ra_product_fit, AnalysisOptions, IVExtract, IVTrace, JunctionGeometry,
};
use serde_json::Value;

use super::{note, Ctx};
use crate::args::{FitCmd, FitIvArgs, FitTableArgs, FitTraceArgs};
use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, is_chevron, read_chevron, read_iv_csv, read_json, read_table, read_trace, write_text_rows, WaferEntry};
use crate::report::{fit_report, num, object, to_value, value_with_error, write_json};
use crate::svg::{line_plot, Series};

pub fn run(ctx: &mut Ctx, cmd: FitCmd) -> CliResult<()> {
    match cmd {
        FitCmd::T1(a) => trace_fit(ctx, ModelKind::ExpDecay, &a, "fit_t1"),
        FitCmd::Ramsey(a) => trace_fit(ctx, ModelKind::DecayingCosine, &a, "fit_ramsey"),
        FitCmd::Rabi(a) => {
            if is_chevron(&a.input)? {
                chevron_fit(ctx, &a.input)
            } else {
                trace_fit(ctx, ModelKind::Rabi, &a, "fit_rabi")
            }
        }
        FitCmd::JcCycles(a) => jc_cycles(ctx, &a),
        FitCmd::Ra(a) => ra(ctx, &a),
        FitCmd::Iv(a) => match &a.batch {
            Some(b) => iv_batch(ctx, &a, b),
            None => iv_single(ctx, &a),
        },
    }
}

fn converged_or(r: &FitResult, what: &str) -> CliResult<()> {
    if r.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!("{what} stopped after {} iterations", r.n_iter)))
    }
}

fn plot_fit(ctx: &Ctx, name: &str, tr: &TimeTrace, kind: ModelKind, r: &FitResult) -> CliResult<()> {
    ctx.plot(name, || {
        let model: Vec<(f64, f64)> = tr.t_s.iter().map(|&t| (t, kind.eval(t, &r.params))).collect();
        line_plot("time (s)", "signal", &[Series::from_xy(&tr.t_s, &tr.y), Series::new(model)])
    })
}

fn trace_fit(ctx: &mut Ctx, kind: ModelKind, a: &FitTraceArgs, stem: &str) -> CliResult<()> {
    let opts = ctx.fit_options()?;
    let tr = read_trace(&a.input)?;
    let r = fit_trace(kind, &tr, &opts)?;
    let p = ctx.path(&format!("{stem}.json"));
    write_json(&p, &fit_report(&r))?;
    note(&p);
    plot_fit(ctx, &format!("{stem}.svg"), &tr, kind, &r)?;
    for (name, (v, s)) in r.param_names.iter().zip(r.params.iter().zip(&r.std_errs)) {
        println!("{name} = {} +- {}", crate::report::g6(*v), crate::report::g6(*s));
    }
    converged_or(&r, kind.name())
}

/// Per-detuning Rabi rates, then Omega_R from Omega^2 = Omega_R^2 + Delta^2.
fn chevron_fit(ctx: &mut Ctx, path: &Path) -> CliResult<()> {
    let opts: FitOptions = ctx.fit_options()?;
    let g = read_chevron(path)?;
    let t_s: Vec<f64> = g.durations_ns.iter().map(|t| t * 1e-9).collect();
    let mut columns = vec![];
    let mut estimates = vec![];
    let (mut rss, mut n_iter, mut converged) = (0.0, 0, true);
    for (i, &d_mhz) in g.detunings_mhz.iter().enumerate() {
        let tr = TimeTrace::new(t_s.clone(), g.column(i).to_vec())?;
        let r = fit_trace(ModelKind::Rabi, &tr, &opts)?;
        let (omega, se) = r.param("omega_hz").unwrap();
        rss += r.rss;
        n_iter += r.n_iter;
        converged &= r.converged;
        let d_hz = d_mhz * 1e6;
        estimates.push(omega * omega - d_hz * d_hz);
        columns.push(object([
            ("detuning_hz", num(d_hz)),
            ("omega_hz", value_with_error(omega, se)),
            ("converged", Value::Bool(r.converged)),
        ]));
    }
    let n = estimates.len() as f64;
    let mean_sq = estimates.iter().sum::<f64>() / n;
    if !(mean_sq > 0.0) {
        return Err(CliError::input("chevron rates are inconsistent with a positive Rabi frequency"));
    }
    let omega_r = mean_sq.sqrt();
    let se_sq = if estimates.len() > 1 {
        (estimates.iter().map(|e| (e - mean_sq).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let report = object([
        ("model", Value::String("rabi-chevron".into())),
        ("params", object([("omega_r_hz", value_with_error(omega_r, se_sq / (2.0 * omega_r)))])),
        ("rss", num(rss)),
        ("converged", Value::Bool(converged)),
        ("n_iter", Value::from(n_iter)),
        ("columns", Value::Array(columns)),
    ]);
    let p = ctx.path("fit_rabi.json");
    write_json(&p, &report)?;
    note(&p);
    println!("omega_r_hz = {}", crate::report::g6(omega_r));
    if converged {
        Ok(())
    } else {
        Err(CliError::NotConverged("a chevron column fit did not converge".into()))
    }
}

fn filtered_pairs(a: &FitTableArgs, x: &str, y: &[&str]) -> CliResult<Vec<(f64, f64)>> {
    let t = read_table(&a.input)?;
    let ycol = y.iter().find(|c| t.column(c).is_some()).copied().unwrap_or(y[0]);
    let mut need = vec![x, ycol];
    if a.cycles.is_some() {
        need.push("cycles");
    }
    let cols = t.require(&need)?;
    let mut out = vec![];
    for row in &t.rows {
        if let Some(c) = a.cycles {
            if t.f64_at(row, cols[2])? != c as f64 {
                continue;
            }
        }
        out.push((t.f64_at(row, cols[0])?, t.f64_at(row, cols[1])?));
    }
    Ok(out)
}

fn closed_form_report(model: &str, params: Vec<(&str, Value)>, rss: f64) -> Value {
    object([
        ("model", Value::String(model.into())),
        ("params", object(params)),
        ("rss", num(rss)),
        ("converged", Value::Bool(true)),
        ("n_iter", Value::from(0)),
    ])
}

fn jc_cycles(ctx: &mut Ctx, a: &FitTableArgs) -> CliResult<()> {
    if a.cycles.is_some() {
        return Err(CliError::input("--cycles filter does not apply to a Jc-cycles fit"));
    }
    let pts = filtered_pairs(a, "cycles", &["jc_a_cm2"])?;
    let f = jc_cycles_fit(&pts)?;
    let rss: f64 = pts.iter().map(|(c, j)| (j.log10() - f.jc_at(*c).log10()).powi(2)).sum();
    let report = closed_form_report(
        ModelKind::LogLinear.name(),
        vec![
            ("log10_prefactor", value_with_error(f.log10_prefactor, f.prefactor_std_err)),
            ("slope", value_with_error(f.slope_per_cycle, f.slope_std_err)),
        ],
        rss,
    );
    let p = ctx.path("fit_jc_cycles.json");
    write_json(&p, &report)?;
    note(&p);
    println!("slope = {} +- {} per cycle", crate::report::g6(f.slope_per_cycle), crate::report::g6(f.slope_std_err));
    ctx.plot("fit_jc_cycles.svg", || {
        let data: Vec<(f64, f64)> = pts.iter().map(|(c, j)| (*c, j.log10())).collect();
        let line: Vec<(f64, f64)> = pts.iter().map(|(c, _)| (*c, f.jc_at(*c).log10())).collect();
        line_plot("ALD cycles", "log10 Jc (A/cm^2)", &[Series::new(data), Series::new(line)])
    })
}

fn ra(ctx: &mut Ctx, a: &FitTableArgs) -> CliResult<()> {
    let pts = filtered_pairs(a, "diameter_um", &["rn_ohm", "resistance_ohm"])?;
    let f = ra_product_fit(&pts)?;
    let report = closed_form_report(
        ModelKind::InverseArea.name(),
        vec![("ra_kohm_um2", value_with_error(f.ra_kohm_um2, f.std_err))],
        f.rss,
    );
    let p = ctx.path("fit_ra.json");
    write_json(&p, &report)?;
    note(&p);
    println!("RA = {} +- {} kOhm um^2", crate::report::g6(f.ra_kohm_um2), crate::report::g6(f.std_err));
    ctx.plot("fit_ra.svg", || {
        let inv = |d: f64| 4.0 / (std::f64::consts::PI * d * d);
        let data: Vec<(f64, f64)> = pts.iter().map(|(d, r)| (inv(*d), *r)).collect();
        let line: Vec<(f64, f64)> = pts.iter().map(|(d, _)| (inv(*d), f.ra_kohm_um2 * 1e3 * inv(*d))).collect();
        line_plot("1/area (1/um^2)", "resistance (ohm)", &[Series::new(data), Series::new(line)])
    })
}

fn analysis_options(ctx: &mut Ctx) -> CliResult<AnalysisOptions> {
    let mut o = AnalysisOptions::default();
    if let Some(v) = ctx.overrides.take("switch_threshold_v") {
        o.switch_threshold_v = v;
    }
    if let Some(v) = ctx.overrides.take("rsg_probe_v") {
        o.rsg_probe_v = v;
    }
    Ok(o)
}

fn extract_value(x: &IVExtract) -> Value {
    let mut v = to_value(x);
    if let Value::Object(m) = &mut v {
        m.insert("quality_ratio".into(), num(x.quality_ratio()));
        m.insert("consistent".into(), Value::Bool(x.is_consistent()));
    }
    v
}

fn plot_iv(ctx: &Ctx, name: &str, f: &IVTrace, r: &IVTrace) -> CliResult<()> {
    ctx.plot(name, || {
        line_plot(
            "bias current (A)",
            "voltage (V)",
            &[Series::from_xy(&f.bias_a, &f.voltage_v), Series::from_xy(&r.bias_a, &r.voltage_v)],
        )
    })
}

fn iv_single(ctx: &mut Ctx, a: &FitIvArgs) -> CliResult<()> {
    let opts = analysis_options(ctx)?;
    let path = a.input.as_ref().expect("clap requires --in or --batch");
    let (f, r) = read_iv_csv(path, a.bias_mode, a.series_ohm)?;
    let geom = match a.diameter_um {
        Some(d) => Some(JunctionGeometry::new(d, a.cycles.unwrap_or(21))?),
        None => None,
    };
    let x = analyze_iv_with(&f, &r, geom.as_ref(), &opts)?;
    let p = ctx.path("fit_iv.json");
    write_json(&p, &extract_value(&x))?;
    note(&p);
    println!(
        "Rn = {} ohm, Rsg = {} ohm, Rsg/Rn = {}, Vg = {} V, Ic = {} A",
        crate::report::g6(x.rn_ohm),
        crate::report::g6(x.rsg_ohm),
        crate::report::g6(x.quality_ratio()),
        crate::report::g6(x.vg_v),
        crate::report::g6(x.ic_a)
    );
    plot_iv(ctx, "fit_iv.svg", &f, &r)
}

const JUNCTION_COLUMNS: [&str; 10] = [
    "junction_id",
    "diameter_um",
    "cycles",
    "isw_a",
    "ig_a",
    "ic_a",
    "vg_v",
    "rn_ohm",
    "rsg_ohm",
    "jc_a_cm2",
];

fn iv_batch(ctx: &mut Ctx, a: &FitIvArgs, batch: &Path) -> CliResult<()> {
    let opts = analysis_options(ctx)?;
    let entries: Vec<WaferEntry> = read_json(batch)?;
    if entries.is_empty() {
        return Err(CliError::input(format!("{}: empty batch", batch.display())));
    }
    let base = batch.parent().unwrap_or(Path::new("."));
    let mut rows = vec![];
    let mut reports = vec![];
    let mut by_cycles: BTreeMap<Option<u32>, Vec<(f64, f64)>> = BTreeMap::new();
    let mut jc_points = vec![];
    for e in &entries {
        let (f, r) = read_iv_csv(&base.join(&e.csv_path), a.bias_mode, a.series_ohm)?;
        let geom = JunctionGeometry::new(e.diameter_um, e.cycles.unwrap_or(21))?;
        let x = analyze_iv_with(&f, &r, Some(&geom), &opts)
            .map_err(|err| CliError::input(format!("junction {}: {err}", e.junction_id)))?;
        let jc = x.jc_a_cm2.expect("geometry given");
        rows.push(vec![
            e.junction_id.clone(),
            fmt_f64(e.diameter_um),
            e.cycles.map_or(String::new(), |c| c.to_string()),
            fmt_f64(x.isw_a),
            fmt_f64(x.ig_a),
            fmt_f64(x.ic_a),
            fmt_f64(x.vg_v),
            fmt_f64(x.rn_ohm),
            fmt_f64(x.rsg_ohm),
            fmt_f64(jc),
        ]);
        by_cycles.entry(e.cycles).or_default().push((e.diameter_um, x.rn_ohm));
        if let Some(c) = e.cycles {
            jc_points.push((c as f64, jc));
        }
        let mut v = extract_value(&x);
        if let Value::Object(m) = &mut v {
            m.insert("junction_id".into(), Value::String(e.junction_id.clone()));
            m.insert("diameter_um".into(), num(e.diameter_um));
            m.insert("cycles".into(), e.cycles.map_or(Value::Null, Value::from));
        }
        reports.push(v);
    }
    let p = ctx.path("junctions.csv");
    write_text_rows(&p, &JUNCTION_COLUMNS, rows)?;
    note(&p);

    let ra_fits = by_cycles
        .iter()
        .filter_map(|(c, pts)| {
            ra_product_fit(pts).ok().map(|f| {
                let key = c.map_or("unspecified".to_string(), |c| c.to_string());
                (key, value_with_error(f.ra_kohm_um2, f.std_err))
            })
        })
        .collect::<Vec<_>>();
    let jc_fit = jc_cycles_fit(&jc_points).ok().map_or(Value::Null, |f| {
        object([
            ("log10_prefactor", value_with_error(f.log10_prefactor, f.prefactor_std_err)),
            ("slope", value_with_error(f.slope_per_cycle, f.slope_std_err)),
        ])
    });
    let report = object([
        ("junctions", Value::Array(reports)),
        ("ra_kohm_um2_by_cycles", object(ra_fits)),
        ("jc_cycles", jc_fit),
    ]);
    let p = ctx.path("wafer_report.json");
    write_json(&p, &report)?;
    note(&p);
    Ok(())
}
