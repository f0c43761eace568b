//! Cumulative quadrature on arbitrary ascending nodes.

/// Running integral `∫_{x_0}^{x_k} f` for every node, using the trapezoid
/// rule with the Euler–Maclaurin end correction `-h²/12 (f'_{k+1} - f'_k)`
/// on each panel. Fourth order when `df` is the exact derivative.
pub fn cumulative_corrected_trapezoid(x: &[f64], f: &[f64], df: &[f64]) -> Vec<f64> {
    debug_assert!(x.len() == f.len() && f.len() == df.len());
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 0..x.len().saturating_sub(1) {
        acc += panel(x[k], x[k + 1], f[k], f[k + 1], df[k], df[k + 1]);
        out.push(acc);
    }
    out
}

/// Running integral `∫_{x_k}^{x_last} f`, accumulated from the right end.
pub fn reverse_cumulative_corrected_trapezoid(x: &[f64], f: &[f64], df: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n.saturating_sub(1)).rev() {
        acc += panel(x[k], x[k + 1], f[k], f[k + 1], df[k], df[k + 1]);
        out[k] = acc;
    }
    out
}

#[inline]
fn panel(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let h = x1 - x0;
    0.5 * h * (f0 + f1) - h * h / 12.0 * (d1 - d0)
}
