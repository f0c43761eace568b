//! Closed-form existence and nonexistence tests, plus a relaxation solver
//! that works inside the strip between a lower function and zero.
//!
//! Two explicit lower functions are available:
//!
//! ```text
//! Dirichlet:  α(t) = -48 t (1 - √(2t)),   α'' = 72 / √(2t)
//! Navier:     α(t) = -6 t (2 - √(2t)),    α'' =  9 / √(2t)
//! ```
//!
//! With `s = √(2t)` the slack `α'' - α²/(8t²) - λ/2` factorizes as
//!
//! ```text
//! Dirichlet:  72/s (1 - s)(1 - 2s)² + 72 - λ/2
//! Navier:     9/(2s) (2 - s)(1 - s)² + 9/2 - λ/2
//! ```
//!
//! so the lower-function inequality holds exactly for `λ ≤ 144` and `λ ≤ 9`
//! respectively.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rhs_unchecked, BoundaryKind, ProblemSpec, Sample, SeriesLaunch, Trajectory, T_END};

/// Verdict tolerance on the slack of a lower function.
pub const SLACK_TOL: f64 = 1e-9;
/// Verdict tolerance on `max f(λ, ·) - 1`.
pub const F_TOL: f64 = 1e-9;
/// Intervals of the quadratically clustered slack grid (even, so that
/// `t = 1/8` is a node).
pub const SLACK_GRID_N: usize = 20_000;
/// Uniform grid size for maximizing `f(λ, ·)` before golden-section polish.
pub const F_GRID_N: usize = 100_000;
/// Largest λ for which the fixed-point map has a real fixed point.
pub const FIXED_POINT_LAMBDA_MAX: f64 = 384.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertificateKind {
    LowerDirichlet,
    LowerNavier,
    NonexistDirichlet,
    NonexistNavier,
    Universal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Existence,
    Nonexistence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub lambda: f64,
    pub verdict: Verdict,
    pub witness: BTreeMap<String, f64>,
}

impl Certificate {
    fn new(kind: CertificateKind, lambda: f64, verdict: Verdict, witness: &[(&str, f64)]) -> Self {
        Self {
            kind,
            lambda,
            verdict,
            witness: witness.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("lambda must be finite and >= 0, got {lambda}")))
    }
}

/// The explicit lower function for `kind`.
pub fn alpha(kind: BoundaryKind, t: f64) -> f64 {
    let s = (2.0 * t).sqrt();
    match kind {
        BoundaryKind::Dirichlet => -48.0 * t * (1.0 - s),
        BoundaryKind::Navier => -6.0 * t * (2.0 - s),
    }
}

pub fn alpha_prime(kind: BoundaryKind, t: f64) -> f64 {
    let s = (2.0 * t).sqrt();
    match kind {
        BoundaryKind::Dirichlet => -48.0 + 72.0 * s,
        BoundaryKind::Navier => -12.0 + 9.0 * s,
    }
}

pub fn alpha_second(kind: BoundaryKind, t: f64) -> f64 {
    let s = (2.0 * t).sqrt();
    match kind {
        BoundaryKind::Dirichlet => 72.0 / s,
        BoundaryKind::Navier => 9.0 / s,
    }
}

/// `α'' - α²/(8t²) - λ/2` evaluated term by term.
pub fn slack_direct(kind: BoundaryKind, lambda: f64, t: f64) -> f64 {
    alpha_second(kind, t) - rhs_unchecked(t, alpha(kind, t), lambda)
}

/// The same slack from its factorized closed form.
pub fn slack_factorized(kind: BoundaryKind, lambda: f64, t: f64) -> f64 {
    let s = (2.0 * t).sqrt();
    match kind {
        BoundaryKind::Dirichlet => {
            72.0 / s * (1.0 - s) * (1.0 - 2.0 * s).powi(2) + 72.0 - 0.5 * lambda
        }
        BoundaryKind::Navier => 4.5 / s * (2.0 - s) * (1.0 - s).powi(2) + 4.5 - 0.5 * lambda,
    }
}

/// `t_k = (k/N)² / 2` for `k = 1..=N`.
fn slack_grid(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| {
        let x = k as f64 / n as f64;
        0.5 * x * x
    })
}

fn min_slack(kind: BoundaryKind, lambda: f64) -> (f64, f64) {
    slack_grid(SLACK_GRID_N)
        .map(|t| (slack_factorized(kind, lambda, t), t))
        .fold((f64::INFINITY, f64::NAN), |best, cur| if cur.0 < best.0 { cur } else { best })
}

/// Existence certificate from the Dirichlet lower function.
pub fn lower_function_dirichlet(lambda: f64) -> Result<Certificate> {
    check_lambda(lambda)?;
    let (min, argmin) = min_slack(BoundaryKind::Dirichlet, lambda);
    let verdict = if min >= -SLACK_TOL {
        Verdict::Existence
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(
        CertificateKind::LowerDirichlet,
        lambda,
        verdict,
        &[
            ("min_slack", min),
            ("argmin_t", argmin),
            ("alpha_end", alpha(BoundaryKind::Dirichlet, T_END)),
        ],
    ))
}

/// Existence certificate from the Navier lower function, which must also
/// satisfy `α(1/2) ≥ α'(1/2)` at the outer edge.
pub fn lower_function_navier(lambda: f64) -> Result<Certificate> {
    check_lambda(lambda)?;
    let (min, argmin) = min_slack(BoundaryKind::Navier, lambda);
    let a_end = alpha(BoundaryKind::Navier, T_END);
    let da_end = alpha_prime(BoundaryKind::Navier, T_END);
    let endpoint_gap = a_end - da_end;
    let verdict = if min >= -SLACK_TOL && endpoint_gap >= -SLACK_TOL {
        Verdict::Existence
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(
        CertificateKind::LowerNavier,
        lambda,
        verdict,
        &[
            ("min_slack", min),
            ("argmin_t", argmin),
            ("alpha_end", a_end),
            ("dalpha_end", da_end),
            ("endpoint_gap", endpoint_gap),
        ],
    ))
}

/// Closed form of the fixed point, `192 (1 - √(1 - λ/384))`, written
/// without the cancellation at small λ.
pub fn c0_closed_form(lambda: f64) -> f64 {
    0.5 * lambda / (1.0 + (1.0 - lambda / FIXED_POINT_LAMBDA_MAX).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub c0: f64,
    /// Iterations of the map `c ↦ c²/384 + λ/4` started from `c₁ = λ/4`.
    pub iterations: usize,
    /// Newton steps used after the plain iteration stalled.
    pub polish_steps: usize,
    /// Whether every iterate was non-decreasing and at most 192.
    pub monotone: bool,
}

const FIXED_POINT_MAX_ITER: usize = 1_000_000;
const FIXED_POINT_STEP_TOL: f64 = 1e-14;

/// Limit of `c₁ = λ/4`, `c_{n+1} = c_n²/384 + λ/4`.
///
/// For `λ ≥ 192` the map is iterated in terms of the deficit `d = 192 - c`,
/// where it reads `d ↦ d - d²/384 + 96 - λ/4`. Near `λ = 384` the plain
/// iteration converges only like `1/n`, so the result is finished with
/// Newton's method on `d² = 384 (96 - λ/4)`, which approaches from above
/// and keeps the sequence monotone.
pub fn fixed_point_c0(lambda: f64) -> Result<FixedPoint> {
    if !(lambda.is_finite() && (0.0..=FIXED_POINT_LAMBDA_MAX).contains(&lambda)) {
        return Err(Error::FixedPointDomain { lambda });
    }
    let q = 0.25 * lambda;
    // a few ulps of 192 absorb rounding in the final steps
    let slop = 8.0 * f64::EPSILON * 192.0;
    let mut monotone = true;
    let mut iterations = 1;

    if lambda < 192.0 {
        let mut c = q;
        while iterations < FIXED_POINT_MAX_ITER {
            let next = c * c / 384.0 + q;
            iterations += 1;
            monotone &= next >= c - slop && next <= 192.0;
            let step = (next - c).abs();
            c = next;
            if step < FIXED_POINT_STEP_TOL {
                break;
            }
        }
        return Ok(FixedPoint {
            c0: c,
            iterations,
            polish_steps: 0,
            monotone,
        });
    }

    let kappa = 96.0 - q;
    let mut d = 192.0 - q;
    while iterations < FIXED_POINT_MAX_ITER {
        let next = d - d * d / 384.0 + kappa;
        iterations += 1;
        monotone &= next <= d + slop && next >= -slop;
        let step = (next - d).abs();
        d = next;
        if step < FIXED_POINT_STEP_TOL {
            break;
        }
    }
    let mut polish_steps = 0;
    while d > 0.0 && polish_steps < 2000 {
        let next = 0.5 * (d + 384.0 * kappa / d);
        polish_steps += 1;
        monotone &= next <= d + slop;
        let step = (next - d).abs();
        d = next;
        if step < FIXED_POINT_STEP_TOL {
            break;
        }
    }
    Ok(FixedPoint {
        c0: 192.0 - d.max(0.0),
        iterations,
        polish_steps,
        monotone,
    })
}

/// `f(λ, t) = (1/2 - t)² t / 8 · [c² (1/2 - t)³ / 4 + λ]` with `c = c₀(λ)`.
pub fn f_value(lambda: f64, c: f64, t: f64) -> f64 {
    let w = 0.5 - t;
    w * w * t / 8.0 * (c * c * w.powi(3) / 4.0 + lambda)
}

/// Nonexistence test for the Dirichlet problem.
///
/// Beyond λ = 384 no solution can exist because the fixed-point map has no
/// real fixed point. Otherwise `f(λ, ·)` is maximized over `(0, 1/2]` and a
/// maximum above one rules solutions out.
pub fn nonexistence_dirichlet(lambda: f64) -> Result<Certificate> {
    check_lambda(lambda)?;
    if lambda > FIXED_POINT_LAMBDA_MAX {
        return Ok(Certificate::new(
            CertificateKind::NonexistDirichlet,
            lambda,
            Verdict::Nonexistence,
            &[("lambda_gate", FIXED_POINT_LAMBDA_MAX)],
        ));
    }
    let c = c0_closed_form(lambda);
    let f = |t: f64| f_value(lambda, c, t);
    let h = T_END / F_GRID_N as f64;
    let (mut k_best, mut f_best) = (1, f(h));
    for k in 2..=F_GRID_N {
        let v = f(k as f64 * h);
        if v > f_best {
            k_best = k;
            f_best = v;
        }
    }
    let lo = (k_best - 1) as f64 * h;
    let hi = ((k_best + 1) as f64 * h).min(T_END);
    let (t_star, f_star) = golden_max(f, lo, hi);
    let (f_max, argmax) = if f_star > f_best {
        (f_star, t_star)
    } else {
        (f_best, k_best as f64 * h)
    };
    let verdict = if f_max > 1.0 + F_TOL {
        Verdict::Nonexistence
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(
        CertificateKind::NonexistDirichlet,
        lambda,
        verdict,
        &[("c0", c), ("f_max", f_max), ("f_argmax", argmax)],
    ))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if b - a < 1e-15 {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nonexistence test for the Navier problem: the quadratic
/// `(11/128) x² - x + λ/4` must have a real root for a solution to exist,
/// which fails exactly when `λ > 128/11`.
pub fn nonexistence_navier(lambda: f64) -> Result<Certificate> {
    check_lambda(lambda)?;
    let discriminant = 1.0 - 11.0 * lambda / 128.0;
    // compared against 128/11 directly so that the equality case is exact
    let verdict = if lambda > 128.0 / 11.0 {
        Verdict::Nonexistence
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(
        CertificateKind::NonexistNavier,
        lambda,
        verdict,
        &[("discriminant", discriminant), ("lambda_bound", 128.0 / 11.0)],
    ))
}

/// `64π²`: no solution of either problem exists above this λ.
pub fn universal_bound() -> f64 {
    64.0 * std::f64::consts::PI * std::f64::consts::PI
}

pub fn universal_certificate(lambda: f64) -> Result<Certificate> {
    check_lambda(lambda)?;
    let bound = universal_bound();
    let verdict = if lambda > bound {
        Verdict::Nonexistence
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(
        CertificateKind::Universal,
        lambda,
        verdict,
        &[("bound", bound)],
    ))
}

/// Every certificate that applies to `kind` at `lambda`.
pub fn certify_all(lambda: f64, kind: BoundaryKind) -> Result<Vec<Certificate>> {
    Ok(match kind {
        BoundaryKind::Dirichlet => vec![
            lower_function_dirichlet(lambda)?,
            nonexistence_dirichlet(lambda)?,
            universal_certificate(lambda)?,
        ],
        BoundaryKind::Navier => vec![
            lower_function_navier(lambda)?,
            nonexistence_navier(lambda)?,
            universal_certificate(lambda)?,
        ],
    })
}

/// Settings of [`truncated_monotone_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneOptions {
    /// Intervals of the uniform grid on each truncated domain.
    pub nodes: usize,
    pub max_newton: usize,
    /// Newton stops once the full update is below this in sup norm.
    pub update_tol: f64,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        Self {
            nodes: 20_000,
            max_newton: 60,
            update_tol: 1e-12,
        }
    }
}

pub fn truncated_monotone_solve(spec: &ProblemSpec, alpha_kind: CertificateKind) -> Result<Trajectory> {
    truncated_monotone_solve_with(spec, alpha_kind, &MonotoneOptions::default())
}

/// Solve on `[t_n, 1/2]` with `u(t_n) = 0` for `t_n = 1/4, 1/8, …` down to
/// `spec.eps`, keeping every iterate in the strip `α ≤ u ≤ 0`.
///
/// Each level is a damped Newton iteration on the fourth-order Numerov
/// discretization, started from the previous level's solution extended by
/// zero (the coarsest level starts from the upper function `u ≡ 0`). The
/// solution of the last level is returned, sampled at the grid nodes.
pub fn truncated_monotone_solve_with(
    spec: &ProblemSpec,
    alpha_kind: CertificateKind,
    opts: &MonotoneOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    let (kind, cert) = match alpha_kind {
        CertificateKind::LowerDirichlet => (BoundaryKind::Dirichlet, lower_function_dirichlet(spec.lambda)?),
        CertificateKind::LowerNavier => (BoundaryKind::Navier, lower_function_navier(spec.lambda)?),
        other => {
            return Err(Error::Precondition(format!("{other:?} is not a lower-function certificate")))
        }
    };
    if kind != spec.kind {
        return Err(Error::Precondition(format!(
            "{alpha_kind:?} does not match a {} problem",
            spec.kind
        )));
    }
    if cert.verdict != Verdict::Existence {
        return Err(Error::Precondition(format!(
            "lower function is not valid at lambda = {} (min slack {})",
            spec.lambda, cert.witness["min_slack"]
        )));
    }
    if opts.nodes < 4 {
        return Err(Error::Precondition("at least 4 grid intervals are required".into()));
    }

    let mut left: f64 = 0.25;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    loop {
        let left_now = left.max(spec.eps);
        let ts = uniform(left_now, opts.nodes);
        let guess: Vec<f64> = match &previous {
            None => vec![0.0; ts.len()],
            Some((pt, pu)) => ts.iter().map(|&t| interp_or_zero(pt, pu, t)).collect(),
        };
        let u = relax(spec, kind, &ts, guess, opts)?;
        if left_now <= spec.eps {
            return Ok(assemble(spec, &ts, &u));
        }
        previous = Some((ts, u));
        left *= 0.5;
    }
}

fn uniform(left: f64, n: usize) -> Vec<f64> {
    let h = (T_END - left) / n as f64;
    let mut ts: Vec<f64> = (0..n).map(|i| left + i as f64 * h).collect();
    ts.push(T_END);
    ts
}

fn interp_or_zero(ts: &[f64], us: &[f64], t: f64) -> f64 {
    if t <= ts[0] {
        return 0.0;
    }
    let k = ts.partition_point(|&s| s <= t).min(ts.len() - 1);
    let (t0, t1) = (ts[k - 1], ts[k]);
    let x = (t - t0) / (t1 - t0);
    us[k - 1] + x * (us[k] - us[k - 1])
}

struct Discretization<'a> {
    ts: &'a [f64],
    h: f64,
    lambda: f64,
    kind: BoundaryKind,
}

impl Discretization<'_> {
    fn f(&self, i: usize, u: f64) -> f64 {
        rhs_unchecked(self.ts[i], u, self.lambda)
    }

    fn df(&self, i: usize, u: f64) -> f64 {
        u / (4.0 * self.ts[i] * self.ts[i])
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len() - 1;
        let h2 = self.h * self.h;
        let f: Vec<f64> = (0..=n).map(|i| self.f(i, u[i])).collect();
        let mut r = vec![0.0; n + 1];
        r[0] = u[0];
        for i in 1..n {
            r[i] = u[i + 1] - 2.0 * u[i] + u[i - 1] - h2 / 12.0 * (f[i + 1] + 10.0 * f[i] + f[i - 1]);
        }
        r[n] = match self.kind {
            BoundaryKind::Dirichlet => u[n],
            // h (u_N - u'_N) with the one-sided third-order derivative
            BoundaryKind::Navier => {
                self.h * u[n] - (u[n] - u[n - 1]) - h2 * (2.0 * f[n] + f[n - 1]) / 6.0
            }
        };
        r
    }

    /// Sub-, main and super-diagonal of the Jacobian.
    fn jacobian(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = u.len() - 1;
        let h2 = self.h * self.h;
        let mut lower = vec![0.0; n + 1];
        let mut diag = vec![0.0; n + 1];
        let mut upper = vec![0.0; n + 1];
        diag[0] = 1.0;
        for i in 1..n {
            lower[i] = 1.0 - h2 / 12.0 * self.df(i - 1, u[i - 1]);
            diag[i] = -2.0 - 10.0 * h2 / 12.0 * self.df(i, u[i]);
            upper[i] = 1.0 - h2 / 12.0 * self.df(i + 1, u[i + 1]);
        }
        match self.kind {
            BoundaryKind::Dirichlet => diag[n] = 1.0,
            BoundaryKind::Navier => {
                diag[n] = self.h - 1.0 - h2 / 3.0 * self.df(n, u[n]);
                lower[n] = 1.0 - h2 / 6.0 * self.df(n - 1, u[n - 1]);
            }
        }
        (lower, diag, upper)
    }
}

/// Thomas algorithm; `lower[0]` and `upper[n]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn relax(
    spec: &ProblemSpec,
    kind: BoundaryKind,
    ts: &[f64],
    mut u: Vec<f64>,
    opts: &MonotoneOptions,
) -> Result<Vec<f64>> {
    let disc = Discretization {
        ts,
        h: ts[1] - ts[0],
        lambda: spec.lambda,
        kind,
    };
    let floor: Vec<f64> = ts.iter().map(|&t| alpha(kind, t)).collect();
    let clip = |u: &mut Vec<f64>| {
        for (x, lo) in u.iter_mut().zip(&floor) {
            *x = x.clamp(*lo, 0.0);
        }
    };
    clip(&mut u);
    let mut r = disc.residual(&u);
    let mut norm = sup(&r);
    let mut trace = vec![norm];
    for _ in 0..opts.max_newton {
        let (lo, di, up) = disc.jacobian(&u);
        let neg: Vec<f64> = r.iter().map(|x| -x).collect();
        let delta = solve_tridiagonal(&lo, &di, &up, &neg);
        let size = sup(&delta);
        if size < opts.update_tol {
            return Ok(u);
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial: Vec<f64> = u.iter().zip(&delta).map(|(x, d)| x + step * d).collect();
            clip(&mut trial);
            let r_trial = disc.residual(&trial);
            let n_trial = sup(&r_trial);
            if n_trial < norm {
                u = trial;
                r = r_trial;
                norm = n_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        trace.push(norm);
        if !accepted {
            // no decrease possible: accept only at the rounding level of the rows
            if norm <= 1e3 * f64::EPSILON * (1.0 + sup(&u)) {
                return Ok(u);
            }
            break;
        }
    }
    Err(Error::RelaxationFailed {
        t_left: ts[0],
        iterations: trace.len() - 1,
        trace,
    })
}

fn assemble(spec: &ProblemSpec, ts: &[f64], u: &[f64]) -> Trajectory {
    let n = u.len() - 1;
    let h = ts[1] - ts[0];
    let f: Vec<f64> = (0..=n).map(|i| rhs_unchecked(ts[i], u[i], spec.lambda)).collect();
    let du: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 {
                (u[1] - u[0]) / h - h * (2.0 * f[0] + f[1]) / 6.0
            } else if i == n {
                (u[n] - u[n - 1]) / h + h * (2.0 * f[n] + f[n - 1]) / 6.0
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * h) - h * (f[i + 1] - f[i - 1]) / 12.0
            }
        })
        .collect();
    let samples = (0..=n)
        .map(|i| Sample {
            t: ts[i],
            u: u[i],
            du: du[i],
        })
        .collect();
    Trajectory {
        lambda: spec.lambda,
        kind: spec.kind,
        launch: SeriesLaunch::new(du[0], spec.lambda),
        samples,
        diverged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_slack_examples() {
        let c = lower_function_dirichlet(144.0).unwrap();
        assert_eq!(c.verdict, Verdict::Existence);
        assert!(c.witness["min_slack"].abs() < 1e-12);
        let at = |t: f64| slack_factorized(BoundaryKind::Dirichlet, 144.0, t);
        assert!(at(0.125).abs() < 1e-12);
        assert!(at(0.5).abs() < 1e-12);

        let c = lower_function_dirichlet(0.0).unwrap();
        assert_eq!(c.verdict, Verdict::Existence);
        assert!((c.witness["min_slack"] - 72.0).abs() < 1e-9);

        let c = lower_function_dirichlet(150.0).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!((slack_factorized(BoundaryKind::Dirichlet, 150.0, 0.125) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn navier_slack_examples() {
        let c = lower_function_navier(9.0).unwrap();
        assert_eq!(c.verdict, Verdict::Existence);
        assert!(c.witness["min_slack"].abs() < 1e-12);
        assert_eq!(c.witness["argmin_t"], 0.5);
        assert_eq!(c.witness["alpha_end"], -3.0);
        assert_eq!(c.witness["dalpha_end"], -3.0);
        assert_eq!(lower_function_navier(0.0).unwrap().verdict, Verdict::Existence);
        let c = lower_function_navier(10.0).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!((c.witness["min_slack"] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_alpha_violates_navier_endpoint() {
        assert_eq!(alpha(BoundaryKind::Dirichlet, 0.5), 0.0);
        assert_eq!(alpha_prime(BoundaryKind::Dirichlet, 0.5), 24.0);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_point_c0(0.0).unwrap().c0, 0.0);
        let top = fixed_point_c0(384.0).unwrap();
        assert!((top.c0 - 192.0).abs() < 1e-9, "{top:?}");
        assert!(top.monotone);
        let l = 128.0 / 11.0;
        let c = fixed_point_c0(l).unwrap();
        let expect = 192.0 * (1.0 - (32.0f64 / 33.0).sqrt());
        assert!((c.c0 - expect).abs() < 1e-12 * expect);
        assert!((c.c0 - 2.93).abs() < 0.01);
        assert!(matches!(fixed_point_c0(384.5), Err(Error::FixedPointDomain { .. })));
        assert!(fixed_point_c0(-1.0).is_err());
    }

    #[test]
    fn nonexistence_examples() {
        let c = nonexistence_dirichlet(307.0).unwrap();
        assert_eq!(c.verdict, Verdict::Nonexistence);
        assert!(c.witness["f_max"] > 1.0);
        assert_eq!(nonexistence_dirichlet(0.0).unwrap().witness["f_max"], 0.0);
        assert_eq!(nonexistence_dirichlet(0.0).unwrap().verdict, Verdict::Inconclusive);
        let c = nonexistence_dirichlet(400.0).unwrap();
        assert_eq!(c.verdict, Verdict::Nonexistence);
        assert!(c.witness.contains_key("lambda_gate"));

        assert_eq!(nonexistence_navier(12.0).unwrap().verdict, Verdict::Nonexistence);
        assert_eq!(nonexistence_navier(128.0 / 11.0).unwrap().verdict, Verdict::Inconclusive);
        let c = nonexistence_navier(0.0).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.witness["discriminant"], 1.0);
    }

    #[test]
    fn bound_ordering() {
        let b = universal_bound();
        assert!((b - 631.654).abs() < 1e-3);
        assert!(b > 307.0 && 307.0 > 128.0 / 11.0);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lower = [0.0, 1.0, -2.0, 0.5];
        let diag = [4.0, 5.0, 6.0, 3.0];
        let upper = [1.0, 2.0, 1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let b: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i] * x[i - 1];
                }
                if i < 3 {
                    s += upper[i] * x[i + 1];
                }
                s
            })
            .collect();
        let got = solve_tridiagonal(&lower, &diag, &upper, &b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rate_relaxes_to_zero() {
        let spec = ProblemSpec::new(0.0, BoundaryKind::Dirichlet);
        let opts = MonotoneOptions {
            nodes: 200,
            ..Default::default()
        };
        let traj = truncated_monotone_solve_with(&spec, CertificateKind::LowerDirichlet, &opts).unwrap();
        assert!(traj.samples.iter().all(|s| s.u == 0.0));
        assert_eq!(traj.first().t, spec.eps);
        assert_eq!(traj.last().t, 0.5);
    }

    #[test]
    fn monotone_solver_preconditions() {
        let spec = ProblemSpec::new(150.0, BoundaryKind::Dirichlet);
        assert!(matches!(
            truncated_monotone_solve(&spec, CertificateKind::LowerDirichlet),
            Err(Error::Precondition(_))
        ));
        let spec = ProblemSpec::new(1.0, BoundaryKind::Dirichlet);
        assert!(truncated_monotone_solve(&spec, CertificateKind::LowerNavier).is_err());
        assert!(truncated_monotone_solve(&spec, CertificateKind::Universal).is_err());
    }
}
