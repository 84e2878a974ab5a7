//! Time quadrature over uniformly spaced samples.

/// Running integrals `∫_{t_0}^{t_j} f` for every sample `j`, fourth order.
///
/// Even `j` use composite Simpson. Odd `j >= 3` use Simpson up to `j - 3`
/// followed by the 3/8 rule; `j = 1` integrates the quadratic through the
/// first three samples over the first interval.
pub fn cumulative_simpson(h: f64, f: &[f64]) -> Vec<f64> {
    let len = f.len();
    let mut out = vec![0.0; len];
    if len < 2 {
        return out;
    }
    // even prefix sums
    let mut even = vec![0.0; len];
    let mut j = 2;
    while j < len {
        even[j] = even[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
        j += 2;
    }
    for j in 1..len {
        out[j] = if j % 2 == 0 {
            even[j]
        } else if j >= 3 {
            even[j - 3] + 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j])
        } else if len >= 3 {
            h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
        } else {
            0.5 * h * (f[0] + f[1])
        };
    }
    out
}

/// `∫ f` over all samples (composite Simpson for odd counts).
pub fn simpson(h: f64, f: &[f64]) -> f64 {
    cumulative_simpson(h, f).last().copied().unwrap_or(0.0)
}

/// Uniform spacing of `times`, `None` unless every gap agrees to 1e-9 relative.
pub fn uniform_spacing(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300))
        .then_some(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..11)
            .map(|i| {
                let t = i as f64 * h;
                1.0 + 2.0 * t - t * t + 0.5 * t * t * t
            })
            .collect();
        let cum = cumulative_simpson(h, &f);
        for (j, v) in cum.iter().enumerate() {
            let t = j as f64 * h;
            let exact = t + t * t - t * t * t / 3.0 + 0.125 * t.powi(4);
            // j = 1 uses a quadratic interpolant
            let tol = if j == 1 { 1e-4 } else { 1e-14 };
            assert!((v - exact).abs() < tol, "j={j}: {v} vs {exact}");
        }
    }

    #[test]
    fn fourth_order_on_exponential() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
            (simpson(h, &f) - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(8) / err(16);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn degenerate_lengths() {
        assert_eq!(simpson(0.1, &[]), 0.0);
        assert_eq!(simpson(0.1, &[3.0]), 0.0);
        assert!((simpson(0.5, &[1.0, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(
            uniform_spacing(&[0.0, 0.1, 0.2]).map(|h| (h * 10.0).round()),
            Some(1.0)
        );
        assert_eq!(uniform_spacing(&[0.0, 0.1, 0.3]), None);
    }
}
