use nitrq_core::dynamics::{linspace, pi_pulse_duration, rabi_chevron_damped, RamseyModel, T1Model};
use nitrq_core::junction::{synthesize_iv, GapRiseShape, JunctionGeometry, JunctionModel, SweepGrid, DEFAULT_NM_PER_CYCLE};
use nitrq_core::noise::gaussian;
use nitrq_core::thermal::{ThermalModelKind, ThermalModelSpec};
use serde_json::Value;

use super::{note, Ctx};
use crate::args::{ShapeArg, SimChevronArgs, SimIvArgs, SimRamseyArgs, SimT1Args, SimT1TempArgs, SimulateCmd, ThermalArg};
use crate::error::{CliError, CliResult};
use crate::io::{fmt_f64, write_chevron, write_iv_csv, write_text_rows, write_trace, WaferEntry};
use crate::report::{num, object, render, to_value, write_json};
use crate::svg::{line_plot, Series};

pub fn run(ctx: &mut Ctx, cmd: SimulateCmd) -> CliResult<()> {
    match cmd {
        SimulateCmd::Iv(a) if a.wafer => wafer(ctx, &a),
        SimulateCmd::Iv(a) => iv(ctx, &a),
        SimulateCmd::Chevron(a) => chevron(ctx, &a),
        SimulateCmd::T1(a) => t1(ctx, &a),
        SimulateCmd::Ramsey(a) => ramsey(ctx, &a),
        SimulateCmd::T1VsTemp(a) => t1_vs_temp(ctx, &a),
    }
}

fn shape(s: ShapeArg) -> GapRiseShape {
    match s {
        ShapeArg::Saturating => GapRiseShape::Saturating,
        ShapeArg::Linear => GapRiseShape::Linear,
    }
}

fn synth_to_file(ctx: &Ctx, a: &SimIvArgs, m: &JunctionModel, seed: u64, name: &str) -> CliResult<()> {
    let mut grid = SweepGrid::covering(m);
    grid.points = a.points;
    let (f, r) = synthesize_iv(m, &grid, a.noise_v, seed)?;
    let p = ctx.path(name);
    write_iv_csv(&p, &[&f, &r], a.bias_mode, a.series_ohm)?;
    note(&p);
    ctx.plot(&name.replace(".csv", ".svg"), || {
        line_plot(
            "bias current (A)",
            "voltage (V)",
            &[Series::from_xy(&f.bias_a, &f.voltage_v), Series::from_xy(&r.bias_a, &r.voltage_v)],
        )
    })
}

fn iv(ctx: &mut Ctx, a: &SimIvArgs) -> CliResult<()> {
    let geom = JunctionGeometry::new(a.diameter_um, 21)?;
    let ic = a.ic_a.unwrap_or(a.jc_a_cm2 * geom.area_cm2());
    let m = JunctionModel::new(ic, a.rn_ohm, a.rsg_ohm, a.vg_v, a.isw_a)?.with_shape(shape(a.shape));
    synth_to_file(ctx, a, &m, ctx.seed, "iv.csv")?;
    let meta = object([
        ("model", to_value(&m)),
        ("ig_a", num(m.ig_a())),
        ("diameter_um", num(a.diameter_um)),
        ("jc_a_cm2", num(ic / geom.area_cm2())),
        ("noise_v", num(a.noise_v)),
        ("seed", Value::from(ctx.seed)),
    ]);
    let p = ctx.path("iv_model.json");
    write_json(&p, &meta)?;
    note(&p);
    Ok(())
}

fn wafer(ctx: &mut Ctx, a: &SimIvArgs) -> CliResult<()> {
    if a.diameters.is_empty() || a.cycles.is_empty() {
        return Err(CliError::input("--diameters and --cycles must be non-empty"));
    }
    let mut entries = vec![];
    let mut k = 0u64;
    for &c in &a.cycles {
        let jc = a.jc_a_cm2 * 10f64.powf(a.jc_slope * (c as f64 - a.cycles_ref as f64));
        for &d in &a.diameters {
            let area = JunctionGeometry::new(d, c)?.area_cm2();
            let ic = jc * area;
            let rn = a.icrn_v / ic;
            let m = JunctionModel::new(ic, rn, a.quality_ratio * rn, a.vg_v, a.isw_fraction * ic)?
                .with_shape(shape(a.shape));
            let id = format!("d{}_c{c}", fmt_f64(d));
            let file = format!("iv_{id}.csv");
            synth_to_file(ctx, a, &m, ctx.seed.wrapping_add(k), &file)?;
            entries.push(WaferEntry {
                junction_id: id,
                diameter_um: d,
                csv_path: file.into(),
                cycles: Some(c),
            });
            k += 1;
        }
    }
    let p = ctx.path("wafer.json");
    std::fs::write(&p, render(&serde_json::to_value(&entries).expect("entries serialise")))
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?;
    note(&p);
    println!(
        "{} junctions; barrier {:.3} nm per cycle",
        entries.len(),
        DEFAULT_NM_PER_CYCLE
    );
    Ok(())
}

fn chevron(ctx: &mut Ctx, a: &SimChevronArgs) -> CliResult<()> {
    if a.detuning_points < 1 || a.duration_points < 2 {
        return Err(CliError::input("need >= 1 detuning and >= 2 duration points"));
    }
    let omega_mhz = a.omega_r * 1e-6;
    let det = if a.detuning_points == 1 {
        vec![0.0]
    } else {
        linspace(-a.detuning_span * 1e-6, a.detuning_span * 1e-6, a.detuning_points)
    };
    let dur = linspace(0.0, a.duration_max * 1e9, a.duration_points);
    let mut g = rabi_chevron_damped(omega_mhz, &det, &dur, a.t2_drive.map(|t| t * 1e9))?;
    if a.noise > 0.0 {
        let n = gaussian(ctx.seed, det.len() * dur.len(), a.noise);
        for (row, chunk) in g.pe.iter_mut().zip(n.chunks(dur.len())) {
            for (p, e) in row.iter_mut().zip(chunk) {
                *p += e;
            }
        }
    }
    let p = ctx.path("chevron.csv");
    write_chevron(&p, &g)?;
    note(&p);
    let pi_ns = pi_pulse_duration(omega_mhz, 0.0)?;
    let zero = g.detunings_mhz.iter().position(|d| *d == 0.0);
    let peak = zero.map(|i| {
        let col = g.column(i);
        let k = (0..col.len()).fold(0, |b, k| if col[k] > col[b] { k } else { b });
        g.durations_ns[k]
    });
    let summary = object([
        ("omega_r_hz", num(a.omega_r)),
        ("pi_time_ns", num(pi_ns)),
        ("resonant_peak_duration_ns", peak.map_or(Value::Null, num)),
    ]);
    let p = ctx.path("chevron.json");
    write_json(&p, &summary)?;
    note(&p);
    if let Some(i) = zero {
        ctx.plot("chevron.svg", || {
            line_plot("pulse duration (ns)", "P_e at zero detuning", &[Series::from_xy(&g.durations_ns, g.column(i))])
        })?;
    }
    Ok(())
}

fn grid(t_max: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(t_max > 0.0) || points < 2 {
        return Err(CliError::input("need t_max > 0 and >= 2 points"));
    }
    Ok(linspace(0.0, t_max, points))
}

fn t1(ctx: &mut Ctx, a: &SimT1Args) -> CliResult<()> {
    let m = T1Model::new(a.amplitude, a.t1, a.offset)?;
    let tr = m.trace(&grid(a.t_max, a.points)?, a.noise, ctx.seed)?;
    let p = ctx.path("t1.csv");
    write_trace(&p, &tr)?;
    note(&p);
    ctx.plot("t1.svg", || line_plot("delay (s)", "signal", &[Series::from_xy(&tr.t_s, &tr.y)]))
}

fn ramsey(ctx: &mut Ctx, a: &SimRamseyArgs) -> CliResult<()> {
    let m = RamseyModel::new(a.a0, a.amplitude, a.t2star, a.detuning, a.phi0)?;
    let tr = m.trace(&grid(a.t_max, a.points)?, a.noise, ctx.seed)?;
    let p = ctx.path("ramsey.csv");
    write_trace(&p, &tr)?;
    note(&p);
    ctx.plot("ramsey.svg", || line_plot("delay (s)", "signal", &[Series::from_xy(&tr.t_s, &tr.y)]))
}

fn t1_vs_temp(ctx: &mut Ctx, a: &SimT1TempArgs) -> CliResult<()> {
    if !(a.t_max > a.t_min) || a.points < 2 {
        return Err(CliError::input("need t_max > t_min and >= 2 points"));
    }
    let kinds: &[ThermalModelKind] = match a.model {
        ThermalArg::SpinBoson => &[ThermalModelKind::SpinBoson],
        ThermalArg::Quasiparticle => &[ThermalModelKind::Quasiparticle],
        ThermalArg::Both => &[ThermalModelKind::SpinBoson, ThermalModelKind::Quasiparticle],
    };
    let temps = linspace(a.t_min, a.t_max, a.points);
    let mut rows = vec![];
    let mut series = vec![];
    for &k in kinds {
        let spec = ThermalModelSpec::new(k, a.fq_ghz, a.t1_ref, a.t_ref)?.with_delta_uev(a.delta_uev)?;
        let mut pts = vec![];
        for &t in &temps {
            let t1 = spec.t1(t)?;
            rows.push(vec![fmt_f64(t), fmt_f64(t1), k.tag().to_string()]);
            pts.push((t, t1));
        }
        series.push(Series::new(pts));
    }
    let p = ctx.path("t1_vs_temp.csv");
    write_text_rows(&p, &["temperature_k", "t1_s", "model"], rows)?;
    note(&p);
    ctx.plot("t1_vs_temp.svg", || line_plot("temperature (K)", "T1 (s)", &series))
}
