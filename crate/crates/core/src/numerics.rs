//! Extrapolated limits and small fitting helpers.

use num_complex::Complex64;

use crate::error::Result;

/// Stop refining once the tableau diagonal drifts this many times the best
/// error seen so far.
const SAFE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limit {
    pub value: Complex64,
    pub error: f64,
    pub levels: usize,
}

/// Limit as `h -> 0` of samples taken at `h_k = h_0 / 2^k`, assuming an error
/// expansion in integer powers of `h`.
///
/// Builds the Neville tableau one row at a time and keeps the entry with the
/// smallest local error estimate; quits once rounding noise takes over.
pub fn richardson<F>(max_levels: usize, mut sample: F) -> Result<Limit>
where
    F: FnMut(usize) -> Result<Complex64>,
{
    let mut prev: Vec<Complex64> = Vec::new();
    let mut best = Limit { value: Complex64::new(f64::NAN, 0.0), error: f64::INFINITY, levels: 0 };
    for i in 0..max_levels.max(1) {
        let mut row = Vec::with_capacity(i + 1);
        row.push(sample(i)?);
        if i == 0 {
            best = Limit { value: row[0], error: f64::INFINITY, levels: 1 };
        }
        let mut fac = 1.0;
        for j in 1..=i {
            fac *= 2.0;
            let t = row[j - 1] + (row[j - 1] - prev[j - 1]) / (fac - 1.0);
            let err = (t - row[j - 1]).norm().max((t - prev[j - 1]).norm());
            if err <= best.error {
                best = Limit { value: t, error: err, levels: i + 1 };
            }
            row.push(t);
        }
        if i >= 1 && (row[i] - prev[i - 1]).norm() >= SAFE * best.error {
            break;
        }
        prev = row;
    }
    Ok(best)
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_derivative_of_exp() {
        // (e^h - 1)/h -> 1
        let lim = richardson(20, |k| {
            let h = 0.1 / 2f64.powi(k as i32);
            Ok(Complex64::new((h.exp() - 1.0) / h, 0.0))
        })
        .unwrap();
        assert!((lim.value.re - 1.0).abs() < 1e-12, "{lim:?}");
        assert!(lim.error < 1e-10);
    }

    #[test]
    fn exact_on_polynomials() {
        let lim = richardson(6, |k| {
            let h = 0.5f64.powi(k as i32);
            Ok(Complex64::new(3.0 + 2.0 * h - h * h, h))
        })
        .unwrap();
        assert!((lim.value - Complex64::new(3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn flags_divergence_with_large_error() {
        // 1/h has no limit
        let lim = richardson(18, |k| Ok(Complex64::new(2f64.powi(k as i32), 0.0))).unwrap();
        assert!(lim.error > 1.0);
    }

    #[test]
    fn fit_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(2f64.powi(-12), 2f64.powi(12), 49);
        assert_eq!(g[0], 2f64.powi(-12));
        assert_eq!(g[48], 4096.0);
        assert!((g[24] - 1.0).abs() < 1e-14);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
