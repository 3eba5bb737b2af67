//! Deterministic JSON reports: sorted keys, six significant digits.

use std::path::Path;

use nitrq_core::fit::FitResult;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// C-style `%.6g`.
pub fn g6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..6).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A number rounded to six significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = g6(x).parse().unwrap();
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Builds an object from (key, value) pairs; keys come out sorted.
pub fn object<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect::<Map<_, _>>())
}

pub fn value_with_error(value: f64, std_err: f64) -> Value {
    object([("value", num(value)), ("std_err", num(std_err))])
}

/// Rounds every number inside an arbitrary serialised value.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) => n.as_f64().map_or(Value::Number(n), num),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    rounded(serde_json::to_value(x).expect("report types serialise"))
}

pub fn fit_report(r: &FitResult) -> Value {
    let params = r
        .param_names
        .iter()
        .zip(r.params.iter().zip(&r.std_errs))
        .map(|(n, (v, s))| (n.clone(), value_with_error(*v, *s)));
    object([
        ("model", Value::String(r.model.clone())),
        ("params", object(params)),
        ("rss", num(r.rss)),
        ("converged", Value::Bool(r.converged)),
        ("n_iter", Value::from(r.n_iter)),
    ])
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    std::fs::write(path, render(v)).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}
