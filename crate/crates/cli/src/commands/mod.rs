mod device;
mod fit;
mod loss;
mod simulate;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::args::{Cli, Command, FitCmd};
use crate::error::{CliError, CliResult};

/// `--set` values; each command takes the keys it understands and the rest
/// are reported as unknown.
pub struct Overrides(BTreeMap<String, f64>);

impl Overrides {
    pub fn new(pairs: &[(String, f64)]) -> CliResult<Self> {
        let mut m = BTreeMap::new();
        for (k, v) in pairs {
            if m.insert(k.clone(), *v).is_some() {
                return Err(CliError::input(format!("--set {k} given more than once")));
            }
        }
        Ok(Self(m))
    }

    /// Rejects keys outside `allowed` before any work is done.
    pub fn check(&self, allowed: &[&str]) -> CliResult<()> {
        let unknown: Vec<&str> = self.0.keys().map(String::as_str).filter(|k| !allowed.contains(k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(format!(
                "unknown --set key(s) for this command: {} (accepted: {})",
                unknown.join(", "),
                if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
            )))
        }
    }

    pub fn take(&mut self, key: &str) -> Option<f64> {
        self.0.remove(key)
    }

    pub fn finish(self) -> CliResult<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.0.keys().map(String::as_str).collect();
            Err(CliError::input(format!("unknown --set key(s) for this command: {}", keys.join(", "))))
        }
    }
}

pub struct Ctx {
    pub out: PathBuf,
    pub seed: u64,
    pub svg: bool,
    pub overrides: Overrides,
}

impl Ctx {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn plot(&self, name: &str, render: impl FnOnce() -> String) -> CliResult<()> {
        if !self.svg {
            return Ok(());
        }
        let p = self.path(name);
        std::fs::write(&p, render()).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))
    }

    pub fn fit_options(&mut self) -> CliResult<nitrq_core::fit::FitOptions> {
        let mut o = nitrq_core::fit::FitOptions::default();
        if let Some(v) = self.overrides.take("max_iter") {
            if !(v >= 0.0 && v.fract() == 0.0) {
                return Err(CliError::input("max_iter must be a non-negative integer"));
            }
            o.max_iter = v as usize;
        }
        for (key, slot) in [("ftol", &mut o.ftol), ("gtol", &mut o.gtol), ("lambda0", &mut o.lambda0)] {
            if let Some(v) = self.overrides.take(key) {
                if !(v > 0.0) {
                    return Err(CliError::input(format!("{key} must be > 0")));
                }
                *slot = v;
            }
        }
        Ok(o)
    }
}

pub fn note(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let out = cli.global.out.clone();
    let mut ctx = Ctx {
        out,
        seed: cli.global.seed,
        svg: cli.global.svg,
        overrides: Overrides::new(&cli.global.overrides)?,
    };
    ctx.overrides.check(allowed_keys(&cli.command))?;
    std::fs::create_dir_all(&ctx.out).map_err(|e| CliError::input(format!("cannot create {}: {e}", ctx.out.display())))?;
    match cli.command {
        Command::Simulate(c) => simulate::run(&mut ctx, c)?,
        Command::Fit(c) => fit::run(&mut ctx, c)?,
        Command::Device(c) => device::run(&mut ctx, c)?,
        Command::LossBudget(a) => loss::run(&mut ctx, a)?,
    }
    ctx.overrides.finish()
}

const FIT_KEYS: &[&str] = &["max_iter", "ftol", "gtol", "lambda0"];
const IV_KEYS: &[&str] = &["switch_threshold_v", "rsg_probe_v"];

fn allowed_keys(cmd: &Command) -> &'static [&'static str] {
    match cmd {
        Command::Simulate(_) => &[],
        Command::Fit(FitCmd::T1(_) | FitCmd::Ramsey(_) | FitCmd::Rabi(_)) => FIT_KEYS,
        Command::Fit(FitCmd::Iv(_)) => IV_KEYS,
        Command::Fit(_) => &[],
        Command::Device(_) | Command::LossBudget(_) => &device::FIELDS,
    }
}
