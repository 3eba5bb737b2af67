use nitrq_core::devices::{reference_device, reference_devices, DeviceRecord};
use nitrq_core::transmon::{
    charge_dispersion, diagonalize_transmon, dispersive_shift, ic_from_ej, min_mode_splitting, TRANSMON_REGIME_RATIO,
};
use serde_json::Value;

use super::{note, Ctx};
use crate::args::{DeviceCmd, DeviceSel};
use crate::error::{CliError, CliResult};
use crate::io::read_json;
use crate::report::{num, object, opt_num, render, to_value, write_json};

pub fn run(ctx: &mut Ctx, cmd: DeviceCmd) -> CliResult<()> {
    match cmd {
        DeviceCmd::Export { reference } => export(ctx, &reference),
        DeviceCmd::Params(sel) => params(ctx, &sel),
        DeviceCmd::Spectrum { sel, levels, ng } => spectrum(ctx, &sel, levels, ng),
        DeviceCmd::Dispersive(sel) => dispersive(ctx, &sel),
    }
}

fn reference(name: &str) -> CliResult<DeviceRecord> {
    reference_device(name).ok_or_else(|| {
        let names: Vec<String> = reference_devices().into_iter().filter_map(|d| d.name).collect();
        CliError::input(format!("unknown reference device {name:?} (known: {})", names.join(", ")))
    })
}

fn field<'a>(d: &'a mut DeviceRecord, key: &str) -> Option<&'a mut Option<f64>> {
    Some(match key {
        "fq_ghz" => &mut d.fq_ghz,
        "ej_ghz" => &mut d.ej_ghz,
        "ec_ghz" => &mut d.ec_ghz,
        "g_mhz" => &mut d.g_mhz,
        "delta_fc_mhz" => &mut d.delta_fc_mhz,
        "fc_ghz" => &mut d.fc_ghz,
        "q_ci" => &mut d.q_ci,
        "t1_us" => &mut d.t1_us,
        "t2star_us" => &mut d.t2star_us,
        "d_j_um" => &mut d.d_j_um,
        "p_j" => &mut d.p_j,
        _ => return None,
    })
}

pub const FIELDS: [&str; 11] = [
    "fq_ghz", "ej_ghz", "ec_ghz", "g_mhz", "delta_fc_mhz", "fc_ghz", "q_ci", "t1_us", "t2star_us", "d_j_um", "p_j",
];

/// Loads the selected device and applies `--set` overrides of its fields.
pub fn load(ctx: &mut Ctx, path: Option<&std::path::Path>, name: Option<&str>) -> CliResult<DeviceRecord> {
    let mut d = match (path, name) {
        (Some(p), _) => read_json(p)?,
        (None, Some(n)) => reference(n)?,
        (None, None) => return Err(CliError::input("select a device with --device or --reference")),
    };
    for key in FIELDS {
        if let Some(v) = ctx.overrides.take(key) {
            *field(&mut d, key).expect("listed field") = Some(v);
        }
    }
    Ok(d)
}

fn load_sel(ctx: &mut Ctx, sel: &DeviceSel) -> CliResult<DeviceRecord> {
    load(ctx, sel.device.as_deref(), sel.reference.as_deref())
}

fn export(ctx: &mut Ctx, name: &str) -> CliResult<()> {
    let d = load(ctx, None, Some(name))?;
    let p = ctx.path(&format!("{}.json", name.to_ascii_lowercase()));
    std::fs::write(&p, render(&to_value(&d))).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?;
    note(&p);
    Ok(())
}

fn params(ctx: &mut Ctx, sel: &DeviceSel) -> CliResult<()> {
    let d = load_sel(ctx, sel)?;
    let ej_ec = match (d.ej_ghz, d.ec_ghz) {
        (Some(j), Some(c)) if c > 0.0 => Some(j / c),
        _ => None,
    };
    let derived = object([
        ("ej_over_ec", opt_num(ej_ec)),
        ("ic_a", opt_num(d.ej_ghz.and_then(|e| ic_from_ej(e).ok()))),
        ("c_sigma_f", opt_num(d.c_sigma_f().ok())),
        ("c_j_f", opt_num(d.c_j_f().ok())),
        ("q_measured", opt_num(d.q_measured().ok())),
    ]);
    let report = object([("device", to_value(&d)), ("derived", derived)]);
    let p = ctx.path("device_params.json");
    write_json(&p, &report)?;
    note(&p);
    Ok(())
}

fn spectrum(ctx: &mut Ctx, sel: &DeviceSel, levels: usize, ng: f64) -> CliResult<()> {
    let d = load_sel(ctx, sel)?;
    let tp = d.transmon()?.with_ng(ng)?;
    let s = diagonalize_transmon(&tp, levels)?;
    let report = object([
        ("device", Value::String(d.label().into())),
        ("ng", num(ng)),
        ("levels_ghz", Value::Array(s.levels_ghz.iter().map(|v| num(*v)).collect())),
        ("fq_ghz", num(s.fq_ghz)),
        ("f12_ghz", num(s.f12_ghz())),
        ("alpha_ghz", num(s.alpha_ghz)),
        ("charge_dispersion_ghz", num(charge_dispersion(&tp)?)),
        ("ej_over_ec", num(tp.ej_over_ec())),
        ("transmon_regime", Value::Bool(tp.ej_over_ec() >= TRANSMON_REGIME_RATIO)),
        ("measured_fq_ghz", opt_num(d.fq_ghz)),
    ]);
    let p = ctx.path("device_spectrum.json");
    write_json(&p, &report)?;
    note(&p);
    println!("fq = {} GHz, alpha = {} MHz", crate::report::g6(s.fq_ghz), crate::report::g6(s.alpha_ghz * 1e3));
    Ok(())
}

fn dispersive(ctx: &mut Ctx, sel: &DeviceSel) -> CliResult<()> {
    let d = load_sel(ctx, sel)?;
    let cp = d.coupled()?;
    let shift = dispersive_shift(&cp)?;
    let crossing = min_mode_splitting(&cp)?;
    let report = object([
        ("device", Value::String(d.label().into())),
        ("shift", to_value(&shift)),
        ("measured_delta_fc_mhz", opt_num(d.delta_fc_mhz)),
        ("fc_bare_ghz", num(cp.fc_bare_ghz)),
        ("min_splitting", to_value(&crossing)),
    ]);
    let p = ctx.path("device_dispersive.json");
    write_json(&p, &report)?;
    note(&p);
    println!(
        "cavity pull {} MHz (leading order {} MHz)",
        crate::report::g6(shift.coupled_mhz),
        crate::report::g6(shift.leading_order_mhz)
    );
    Ok(())
}
