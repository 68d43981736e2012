//! Trapezoid rules on one period.

/// Periodic trapezoid rule on `[0, 1)` with `n` nodes.
///
/// Spectrally accurate for smooth periodic integrands.
pub fn periodic_trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = 1.0 / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Doubles `n` from `start` until successive values differ by less than
/// `tol` or `n` reaches `cap`. Returns the value and the final node count.
pub fn adaptive_periodic_trapezoid(
    f: impl Fn(f64) -> f64,
    start: usize,
    tol: f64,
    cap: usize,
) -> (f64, usize) {
    let mut n = start.max(1);
    let mut prev = periodic_trapezoid(&f, n);
    while n < cap {
        let next = periodic_trapezoid(&f, 2 * n);
        n *= 2;
        let done = (next - prev).abs() < tol;
        prev = next;
        if done {
            break;
        }
    }
    (prev, n)
}

/// Running composite-trapezoid integral of uniformly spaced samples.
///
/// `out[i]` approximates the integral from the first sample to sample `i`.
pub fn cumulative_trapezoid(samples: &[f64], spacing: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (i, &y) in samples.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * spacing * (samples[i - 1] + y);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn constant_and_trig() {
        assert!((periodic_trapezoid(|_| 3.0, 7) - 3.0).abs() < 1e-15);
        assert!(periodic_trapezoid(|x| (TAU * x).sin(), 16).abs() < 1e-15);
    }

    #[test]
    fn spectral_accuracy_on_smooth_integrand() {
        // ∫₀¹ 1/(1 + 0.5 cos 2πx) dx = 1/sqrt(1 - 0.25)
        let exact = 1.0 / (0.75f64).sqrt();
        let v = periodic_trapezoid(|x| 1.0 / (1.0 + 0.5 * (TAU * x).cos()), 64);
        assert!((v - exact).abs() < 1e-13);
        let (v, n) = adaptive_periodic_trapezoid(|x| 1.0 / (1.0 + 0.5 * (TAU * x).cos()), 8, 1e-12, 1 << 16);
        assert!((v - exact).abs() < 1e-12);
        assert!(n <= 128);
    }

    #[test]
    fn cumulative_matches_polynomial() {
        let n = 1000;
        let h = 1.0 / n as f64;
        let ys: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 * h).collect();
        let c = cumulative_trapezoid(&ys, h);
        assert_eq!(c[0], 0.0);
        assert!((c[n] - 1.0).abs() < 1e-12);
        assert!((c[n / 2] - 0.25).abs() < 1e-12);
    }
}
