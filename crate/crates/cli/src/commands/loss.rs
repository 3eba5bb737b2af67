use std::collections::BTreeMap;
use std::fmt::Write;

use nitrq_core::devices::{resolve_channels, ChannelSpec};
use nitrq_core::loss::{combine_budget, Residual};
use serde_json::Value;

use super::{device, note, Ctx};
use crate::args::LossBudgetArgs;
use crate::error::{CliError, CliResult};
use crate::io::read_json;
use crate::report::{g6, num, object, opt_num, write_json};

const TEMPLATE: &str = r#"{
  "gold": { "formula": "gold", "r_au_ohm": 1.9e-4 },
  "piezo": { "formula": "piezo", "e33": 0.141, "e31": -0.055 },
  "subgap": { "formula": "subgap", "rsg_ohm": 2.6e8 }
}
"#;

pub fn run(ctx: &mut Ctx, a: LossBudgetArgs) -> CliResult<()> {
    if a.template {
        let p = ctx.path("channels.json");
        std::fs::write(&p, TEMPLATE).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?;
        note(&p);
        return Ok(());
    }
    let d = device::load(ctx, a.device.as_deref(), a.reference.as_deref())?;
    let specs: BTreeMap<String, ChannelSpec> = read_json(a.channels.as_deref().expect("clap requires --channels"))?;
    let qs = resolve_channels(&d, &specs)?;
    let fq = d.fq_ghz.ok_or_else(|| CliError::input("device has no fq_ghz"))?;
    let b = combine_budget(&qs, fq, d.t1_s())?;

    let total_loss = 1.0 / b.q_total;
    let ranked = b.ranked();
    let channels: Vec<Value> = ranked
        .iter()
        .map(|(name, q)| {
            object([
                ("name", Value::String(name.to_string())),
                ("q", num(*q)),
                ("share_of_budget", num((1.0 / q) / total_loss)),
            ])
        })
        .collect();
    let residual = match b.residual {
        None => Value::Null,
        Some(Residual::Other { q_other }) => object([
            ("status", Value::String("other".into())),
            ("q_other", num(q_other)),
        ]),
        Some(Residual::Inconsistent { excess_loss }) => object([
            ("status", Value::String("inconsistent".into())),
            ("excess_loss", num(excess_loss)),
        ]),
    };
    let report = object([
        ("device", Value::String(d.label().into())),
        ("fq_ghz", num(fq)),
        ("channels", Value::Array(channels)),
        ("q_total", num(b.q_total)),
        ("q_measured", opt_num(b.q_measured)),
        ("residual", residual),
    ]);
    let p = ctx.path("loss_budget.json");
    write_json(&p, &report)?;
    note(&p);

    let mut table = String::new();
    let _ = writeln!(table, "{:<16} {:>12} {:>8}", "channel", "Q", "share");
    for (name, q) in &ranked {
        let q_text = if q.is_finite() { g6(*q) } else { "no limit".into() };
        let _ = writeln!(table, "{:<16} {:>12} {:>7.1}%", name, q_text, 100.0 * (1.0 / q) / total_loss);
    }
    let _ = writeln!(table, "{:<16} {:>12}", "total", g6(b.q_total));
    if let Some(qm) = b.q_measured {
        let _ = writeln!(table, "{:<16} {:>12}", "measured", g6(qm));
    }
    match b.residual {
        Some(Residual::Other { q_other }) => {
            let _ = writeln!(table, "{:<16} {:>12}", "other", g6(q_other));
        }
        Some(Residual::Inconsistent { excess_loss }) => {
            let _ = writeln!(table, "budget exceeds measured loss by 1/Q = {}", g6(excess_loss));
        }
        None => {}
    }
    print!("{table}");
    let p = ctx.path("loss_budget.txt");
    std::fs::write(&p, &table).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?;
    note(&p);
    Ok(())
}
