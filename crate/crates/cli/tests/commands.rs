use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nitrq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nitrq"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = nitrq(dir, args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn param(v: &Value, name: &str) -> f64 {
    v["params"][name]["value"].as_f64().unwrap()
}

#[test]
fn help_and_usage_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nitrq(d.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(nitrq(d.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(nitrq(d.path(), &["fit", "t1", "--in", "missing.csv"]).status.code(), Some(1));
}

#[test]
fn t1_fit_recovers_simulated_lifetime() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "t1"]);
    ok(d.path(), &["--svg", "fit", "t1", "--in", "t1.csv"]);
    let r = json(d.path().join("fit_t1.json"));
    assert_eq!(r["converged"], Value::Bool(true));
    let t1 = param(&r, "t1_s");
    assert!((t1 - 3e-6).abs() < 0.1e-6, "{t1}");
    let svg = std::fs::read_to_string(d.path().join("fit_t1.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn iteration_cap_exits_with_nonconvergence_code() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "ramsey"]);
    let o = nitrq(d.path(), &["--set", "max_iter=1", "fit", "ramsey", "--in", "ramsey.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(d.path().join("fit_ramsey.json"))["converged"], Value::Bool(false));
}

#[test]
fn unknown_override_rejected_before_writing() {
    let d = tempfile::tempdir().unwrap();
    let o = nitrq(d.path(), &["--out", "run", "--set", "bogus=1", "simulate", "t1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert!(!d.path().join("run").exists());
}

#[test]
fn outputs_are_deterministic_for_a_seed() {
    let d = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        ok(d.path(), &["--out", out, "--seed", "7", "simulate", "ramsey"]);
        ok(d.path(), &["--out", out, "fit", "ramsey", "--in", &format!("{out}/ramsey.csv")]);
    }
    for f in ["ramsey.csv", "fit_ramsey.json"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        let b = std::fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    ok(d.path(), &["--out", "c", "--seed", "8", "simulate", "ramsey"]);
    assert_ne!(
        std::fs::read(d.path().join("a/ramsey.csv")).unwrap(),
        std::fs::read(d.path().join("c/ramsey.csv")).unwrap()
    );
}

#[test]
fn iv_round_trip_in_both_bias_modes() {
    let d = tempfile::tempdir().unwrap();
    for mode in ["current", "source-voltage"] {
        ok(d.path(), &["--out", mode, "simulate", "iv", "--bias-mode", mode]);
        ok(
            d.path(),
            &["--out", mode, "fit", "iv", "--in", &format!("{mode}/iv.csv"), "--bias-mode", mode, "--diameter-um", "2"],
        );
        let r = json(d.path().join(mode).join("fit_iv.json"));
        let rn = r["rn_ohm"].as_f64().unwrap();
        let rsg = r["rsg_ohm"].as_f64().unwrap();
        let vg = r["vg_v"].as_f64().unwrap();
        assert!((rn / 14.6e3 - 1.0).abs() < 0.01, "{mode} rn {rn}");
        assert!((rsg / 0.8e6 - 1.0).abs() < 0.02, "{mode} rsg {rsg}");
        assert!((vg / 4.3e-3 - 1.0).abs() < 0.01, "{mode} vg {vg}");
    }
    let header = std::fs::read_to_string(d.path().join("source-voltage/iv.csv")).unwrap();
    assert!(header.starts_with("source_v,voltage_v,direction"));
}

#[test]
fn iv_missing_column_is_named() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "iv"]);
    let text = std::fs::read_to_string(d.path().join("iv.csv")).unwrap().replacen("voltage_v", "v", 1);
    std::fs::write(d.path().join("bad.csv"), text).unwrap();
    let o = nitrq(d.path(), &["fit", "iv", "--in", "bad.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("voltage_v"));
}

#[test]
fn wafer_batch_feeds_area_and_cycle_fits() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["--out", "w", "simulate", "iv", "--wafer", "--noise-v", "2e-6"]);
    ok(d.path(), &["--out", "w", "fit", "iv", "--batch", "w/wafer.json"]);
    ok(d.path(), &["--out", "w", "fit", "ra", "--in", "w/junctions.csv", "--cycles", "21"]);
    ok(d.path(), &["--out", "w", "fit", "jc-cycles", "--in", "w/junctions.csv"]);
    let jc = json(d.path().join("w/fit_jc_cycles.json"));
    let slope = param(&jc, "slope");
    assert!((slope + 0.34).abs() < 0.01, "{slope}");
    let ra = param(&json(d.path().join("w/fit_ra.json")), "ra_kohm_um2");
    // Rn = IcRn / (Jc A) gives RA = IcRn / Jc at the reference cycle count.
    let expected = 2.75e-3 / (6.0 * 1e-8) * 1e-3;
    assert!((ra / expected - 1.0).abs() < 0.02, "{ra} vs {expected}");
    let o = nitrq(d.path(), &["fit", "jc-cycles", "--in", "w/junctions.csv", "--cycles", "21"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn chevron_peak_and_rabi_rate() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "chevron"]);
    let c = json(d.path().join("chevron.json"));
    assert!((c["resonant_peak_duration_ns"].as_f64().unwrap() - 27.8).abs() < 0.15);
    ok(d.path(), &["fit", "rabi", "--in", "chevron.csv"]);
    let r = json(d.path().join("fit_rabi.json"));
    assert!((param(&r, "omega_r_hz") / 18e6 - 1.0).abs() < 1e-3);
}

#[test]
fn lifetime_falls_with_temperature() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "t1-vs-temp", "--model", "both"]);
    let text = std::fs::read_to_string(d.path().join("t1_vs_temp.csv")).unwrap();
    for model in ["spin-boson", "quasiparticle"] {
        let t1: Vec<f64> = text
            .lines()
            .skip(1)
            .filter(|l| l.ends_with(model))
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(t1.len() > 2, "{model}");
        assert!(t1.windows(2).all(|w| w[1] <= w[0]), "{model}");
    }
}

#[test]
fn loss_budget_total_below_every_channel() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["loss-budget", "--template"]);
    let o = ok(d.path(), &["loss-budget", "--reference", "A1", "--channels", "channels.json"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("total"));
    let b = json(d.path().join("loss_budget.json"));
    let q_total = b["q_total"].as_f64().unwrap();
    let chans = b["channels"].as_array().unwrap();
    assert_eq!(chans.len(), 3);
    for c in chans {
        assert!(q_total <= c["q"].as_f64().unwrap());
    }
    let shares: f64 = chans.iter().map(|c| c["share_of_budget"].as_f64().unwrap()).sum();
    assert!((shares - 1.0).abs() < 1e-4);
}

#[test]
fn device_export_reloads_with_overrides() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["device", "export", "--reference", "B2"]);
    let exported = json(d.path().join("b2.json"));
    ok(d.path(), &["device", "params", "--device", "b2.json"]);
    let p = json(d.path().join("device_params.json"));
    assert_eq!(p["device"], exported);
    ok(d.path(), &["--set", "t1_us=9", "device", "params", "--device", "b2.json"]);
    let p = json(d.path().join("device_params.json"));
    assert_eq!(p["device"]["t1_us"].as_f64(), Some(9.0));
    ok(d.path(), &["device", "spectrum", "--reference", "A1"]);
    let s = json(d.path().join("device_spectrum.json"));
    assert!((s["fq_ghz"].as_f64().unwrap() - 5.063).abs() < 0.05);
    ok(d.path(), &["device", "dispersive", "--reference", "A1"]);
    assert_eq!(nitrq(d.path(), &["device", "params", "--reference", "Z9"]).status.code(), Some(1));
}
