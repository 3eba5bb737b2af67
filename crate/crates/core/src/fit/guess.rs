//! Starting points for the time-domain models.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dynamics::TimeTrace;
use crate::error::{Error, Result};

/// Shortest trace the guessers accept.
pub const MIN_GUESS_POINTS: usize = 16;

fn check(trace: &TimeTrace) -> Result<()> {
    trace.validate()?;
    if trace.len() < MIN_GUESS_POINTS {
        return Err(Error::invalid(
            "trace",
            format!("{} points, need at least {MIN_GUESS_POINTS}", trace.len()),
        ));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn peak_to_peak(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

fn is_flat(y: &[f64]) -> bool {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    peak_to_peak(y) <= 1e-12 * scale
}

/// Samples on a uniform grid spanning the trace, linearly interpolated when
/// the input spacing is irregular. Returns (dt, samples).
fn uniform_samples(trace: &TimeTrace) -> (f64, Vec<f64>) {
    let t = &trace.t_s;
    let n = t.len();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let uniform = t
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
    if uniform {
        return (dt, trace.y.clone());
    }
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let ti = t[0] + i as f64 * dt;
        while k + 2 < n && t[k + 1] < ti {
            k += 1;
        }
        let f = ((ti - t[k]) / (t[k + 1] - t[k])).clamp(0.0, 1.0);
        out.push(trace.y[k] + f * (trace.y[k + 1] - trace.y[k]));
    }
    (dt, out)
}

/// Dominant non-zero frequency [Hz] of the mean-removed samples. The lower
/// bin wins ties; the peak is refined by a parabola through its neighbours.
pub fn dominant_frequency(dt: f64, samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    let m = mean(samples);
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|v| Complex::new(v - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf.iter().take(n / 2 + 1).map(|c| c.norm()).collect();
    let mut best = 1;
    // Near-equal bins (to rounding) count as ties.
    for k in 2..mag.len() {
        if mag[k] > mag[best] * (1.0 + 1e-9) {
            best = k;
        }
    }
    let scale = mag.iter().fold(0.0f64, |a, b| a.max(*b));
    if !(mag[best] > 0.0) || mag[best] <= 1e-12 * scale.max(f64::MIN_POSITIVE) * n as f64 {
        return Err(Error::NoOscillation);
    }
    let mut k = best as f64;
    if best + 1 < mag.len() {
        let (a, b, c) = (mag[best - 1], mag[best], mag[best + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            k += (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok(k / (n as f64 * dt))
}

/// [a, t1_s, offset] for a * exp(-t / t1) + offset.
pub fn initial_guess_t1(trace: &TimeTrace) -> Result<Vec<f64>> {
    check(trace)?;
    let y = &trace.y;
    if is_flat(y) {
        return Err(Error::invalid("trace", "constant trace has no decay"));
    }
    let n = y.len();
    let tail = (n / 10).max(2);
    let offset = mean(&y[n - tail..]);
    let head = 3.min(n);
    let a = mean(&y[..head]) - offset;
    let span = trace.t_s[n - 1] - trace.t_s[0];
    // First 1/e crossing of the offset-removed signal.
    let target = a / std::f64::consts::E;
    let mut t1 = span / 3.0;
    for i in 1..n {
        let (p, q) = (y[i - 1] - offset, y[i] - offset);
        if (p - target) * (q - target) <= 0.0 && p != q {
            let f = (p - target) / (p - q);
            let tc = trace.t_s[i - 1] + f * (trace.t_s[i] - trace.t_s[i - 1]);
            t1 = (tc - trace.t_s[0]).max(span / n as f64);
            break;
        }
    }
    Ok(vec![a, t1, offset])
}

/// [a0, a, t2star_s, delta_d_hz, phi0] for the decaying cosine.
pub fn initial_guess_ramsey(trace: &TimeTrace) -> Result<Vec<f64>> {
    check(trace)?;
    if is_flat(&trace.y) {
        return Err(Error::NoOscillation);
    }
    let (dt, samples) = uniform_samples(trace);
    let freq = dominant_frequency(dt, &samples)?;
    let a0 = mean(&trace.y);
    let mut a = peak_to_peak(&trace.y) / 2.0;
    if trace.y[0] < a0 {
        a = -a;
    }
    let span = dt * (samples.len() - 1) as f64;
    let t2 = envelope_decay_time(dt, &samples, freq).unwrap_or(span).clamp(dt, 10.0 * span);
    Ok(vec![a0, a, t2, freq, 0.0])
}

/// Decay time from a straight-line fit of log(half peak-to-peak) over
/// period-long chunks.
fn envelope_decay_time(dt: f64, samples: &[f64], freq: f64) -> Option<f64> {
    let per = ((1.0 / (freq * dt)).round() as usize).max(3);
    let pts: Vec<(f64, f64)> = samples
        .chunks_exact(per)
        .enumerate()
        .filter_map(|(i, c)| {
            let amp = peak_to_peak(c) / 2.0;
            (amp > 0.0).then(|| ((i as f64 + 0.5) * per as f64 * dt, amp.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope < 0.0).then(|| -1.0 / slope)
}

/// [offset, amplitude, omega_hz] for offset + amplitude sin^2(pi omega t).
pub fn initial_guess_rabi(trace: &TimeTrace) -> Result<Vec<f64>> {
    check(trace)?;
    if is_flat(&trace.y) {
        return Err(Error::NoOscillation);
    }
    let (dt, samples) = uniform_samples(trace);
    let freq = dominant_frequency(dt, &samples)?;
    let lo = trace.y.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(vec![lo, peak_to_peak(&trace.y), freq])
}
