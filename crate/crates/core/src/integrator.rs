//! Initial-value integration from the singular endpoint and the integral
//! identities every solution must satisfy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rhs_unchecked, ProblemSpec, Sample, SeriesLaunch, Tolerances, Trajectory, T_END};
use crate::quadrature::{cumulative_corrected_trapezoid, reverse_cumulative_corrected_trapezoid};
use crate::shooting::boundary_residual;

type State = [f64; 2];

/// `(u(eps), u'(eps))` from the two-term series `a t + β t²`, `β = a²/16 + λ/4`.
pub fn launch_state(a: f64, lambda: f64, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < T_END) {
        return Err(Error::InvalidSpec(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let launch = SeriesLaunch::new(a, lambda);
    Ok((launch.u(eps), launch.du(eps)))
}

#[inline]
fn field(t: f64, y: &State, lambda: f64) -> State {
    [y[1], rhs_unchecked(t, y[0], lambda)]
}

#[inline]
fn combo(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// `grid_n` uniformly spaced times starting at `eps`, followed by `1/2`.
pub fn sample_times(eps: f64, grid_n: usize) -> Vec<f64> {
    let dt = (T_END - eps) / grid_n as f64;
    let mut times: Vec<f64> = (0..grid_n).map(|k| eps + k as f64 * dt).collect();
    times.push(T_END);
    times
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

/// Adaptive Dormand–Prince 5(4) integration of the launched shot from `eps`
/// to `1/2`, sampled by dense output on [`sample_times`].
///
/// Steps are controlled by error per unit step: a step of length `h` is
/// accepted when its local error estimate is below
/// `h · step_tol · (1 + |y|)`. Every step therefore meets `step_tol`, and
/// the global error falls faster than linearly as `step_tol` shrinks.
///
/// A shot whose `|u|` leaves `spec.blowup` stops early with `diverged = true`.
pub fn integrate(spec: &ProblemSpec, a: f64) -> Result<Trajectory> {
    spec.validate()?;
    if !(a.is_finite() && a <= 0.0) {
        return Err(Error::Precondition(format!("shooting slope must be finite and <= 0, got {a}")));
    }
    let lambda = spec.lambda;
    let launch = SeriesLaunch::new(a, lambda);
    let times = sample_times(spec.eps, spec.grid_n);
    let atol = spec.step_tol;
    let rtol = spec.step_tol;

    let mut t = spec.eps;
    let mut y: State = [launch.u(t), launch.du(t)];
    let mut k1 = field(t, &y, lambda);
    let mut h = 1e-4_f64.min(T_END - t);
    let mut samples = Vec::with_capacity(times.len());
    samples.push(Sample { t, u: y[0], du: y[1] });
    let mut next = 1;
    let mut diverged = false;
    let mut steps = 0;

    while t < T_END {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::TooManySteps { t, steps: MAX_STEPS });
        }
        let last = t + h >= T_END || T_END - (t + h) < 1e-12 * h;
        if last {
            h = T_END - t;
        }

        let k2 = field(t + C2 * h, &combo(&y, h, &[(A21, &k1)]), lambda);
        let k3 = field(t + C3 * h, &combo(&y, h, &[(A31, &k1), (A32, &k2)]), lambda);
        let k4 = field(
            t + C4 * h,
            &combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            lambda,
        );
        let k5 = field(
            t + C5 * h,
            &combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            lambda,
        );
        let k6 = field(
            t + h,
            &combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            lambda,
        );
        let y_new = combo(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { T_END } else { t + h };
        let k7 = field(t_new, &y_new, lambda);

        let mut err = 0.0;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = h * (atol + rtol * y[i].abs().max(y_new[i].abs()));
            err += (e / sc).powi(2);
        }
        let err = (err / 2.0).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };

        if err <= 1.0 {
            // dense output on [t, t_new]
            let mut r = [[0.0; 2]; 5];
            for i in 0..2 {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * k7[i] - bspl;
                r[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            while next < times.len() && times[next] <= t_new {
                let s = times[next];
                let (u, du) = if s == t_new {
                    (y_new[0], y_new[1])
                } else {
                    let th = (s - t) / h;
                    let th1 = 1.0 - th;
                    let v = |i: usize| {
                        r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
                    };
                    (v(0), v(1))
                };
                samples.push(Sample { t: s, u, du });
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if !y[0].is_finite() || y[0].abs() > spec.blowup {
                diverged = true;
                break;
            }
            h *= (0.9 * err.powf(-0.25)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.25)).max(0.2);
        }
        if h < 4.0 * f64::EPSILON * t {
            return Err(Error::StepUnderflow { t, h });
        }
    }

    if samples.last().map(|s| !s.u.is_finite()).unwrap_or(false) {
        diverged = true;
    }
    samples.retain(|s| s.u.is_finite() && s.du.is_finite());
    Ok(Trajectory {
        lambda,
        kind: spec.kind,
        launch,
        samples,
        diverged,
    })
}

/// Classical fixed-step RK4 with `steps` steps, kept as an independent
/// reference for the adaptive integrator. `steps` must be a multiple of
/// `spec.grid_n`; samples land on the same times as [`integrate`].
pub fn integrate_rk4(spec: &ProblemSpec, a: f64, steps: usize) -> Result<Trajectory> {
    spec.validate()?;
    if !(a.is_finite() && a <= 0.0) {
        return Err(Error::Precondition(format!("shooting slope must be finite and <= 0, got {a}")));
    }
    if steps == 0 || !steps.is_multiple_of(spec.grid_n) {
        return Err(Error::Precondition(format!(
            "steps ({steps}) must be a positive multiple of grid_n ({})",
            spec.grid_n
        )));
    }
    let lambda = spec.lambda;
    let launch = SeriesLaunch::new(a, lambda);
    let stride = steps / spec.grid_n;
    let h = (T_END - spec.eps) / steps as f64;
    let mut y: State = [launch.u(spec.eps), launch.du(spec.eps)];
    let mut samples = vec![Sample {
        t: spec.eps,
        u: y[0],
        du: y[1],
    }];
    let mut diverged = false;
    for j in 0..steps {
        let t = spec.eps + j as f64 * h;
        let k1 = field(t, &y, lambda);
        let k2 = field(t + 0.5 * h, &[y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]], lambda);
        let k3 = field(t + 0.5 * h, &[y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]], lambda);
        let k4 = field(t + h, &[y[0] + h * k3[0], y[1] + h * k3[1]], lambda);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !y[0].is_finite() || y[0].abs() > spec.blowup {
            diverged = true;
            break;
        }
        if (j + 1) % stride == 0 {
            let t_s = if j + 1 == steps {
                T_END
            } else {
                spec.eps + (j + 1) as f64 * h
            };
            samples.push(Sample { t: t_s, u: y[0], du: y[1] });
        }
    }
    Ok(Trajectory {
        lambda,
        kind: spec.kind,
        launch,
        samples,
        diverged,
    })
}

/// Residuals of one candidate solution against the solution identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub first_integral_resid: f64,
    pub representation_resid: f64,
    /// Largest `u` over the samples; a solution has `u ≤ 0`.
    pub sign_violation: f64,
    pub boundary_resid: f64,
}

impl ValidationReport {
    pub fn accepted(&self, tol: &Tolerances) -> bool {
        self.first_integral_resid < tol.first_integral
            && self.representation_resid < tol.representation
            && self.sign_violation <= tol.sign
            && self.boundary_resid < tol.boundary
    }
}

/// `∫_0^eps u²/(8s) ds` from the launch series.
fn first_integral_tail(launch: &SeriesLaunch, eps: f64) -> f64 {
    let (a, b) = (launch.a, launch.beta);
    a * a * eps * eps / 16.0 + a * b * eps.powi(3) / 12.0 + b * b * eps.powi(4) / 32.0
}

/// `∫_0^t u²(s)/(8s) ds` at every sample time.
fn running_first_integral(traj: &Trajectory) -> Vec<f64> {
    let ts: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let g: Vec<f64> = traj.samples.iter().map(|s| s.u * s.u / (8.0 * s.t)).collect();
    let dg: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| (2.0 * s.u * s.du * s.t - s.u * s.u) / (8.0 * s.t * s.t))
        .collect();
    let tail = first_integral_tail(&traj.launch, ts[0]);
    cumulative_corrected_trapezoid(&ts, &g, &dg)
        .into_iter()
        .map(|q| q + tail)
        .collect()
}

/// Max over samples of `|t u' - u - ∫_0^t u²/(8s) ds - λt²/4|`.
pub fn first_integral_residual(traj: &Trajectory) -> f64 {
    let q = running_first_integral(traj);
    traj.samples
        .iter()
        .zip(&q)
        .map(|(s, q)| (s.t * s.du - s.u - q - 0.25 * traj.lambda * s.t * s.t).abs())
        .fold(0.0, f64::max)
}

/// Max over samples of the defect of the Green's-function representation
///
/// ```text
/// u(t) = -[(1/2 - t) ∫_0^t u²/(4s) + t ∫_t^{1/2} u²(1/2 - s)/(4s²) + λ t (1/2 - t)/4 - 2t u(1/2)]
/// ```
///
/// Infinite for a trajectory that never reached `t = 1/2`.
pub fn representation_residual(traj: &Trajectory) -> f64 {
    if !traj.reached_end() {
        return f64::INFINITY;
    }
    let inner: Vec<f64> = running_first_integral(traj).into_iter().map(|q| 2.0 * q).collect();
    let ts: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let weight = |s: f64| (0.5 - s) / (s * s);
    let dweight = |s: f64| 1.0 / (s * s) - 1.0 / (s * s * s);
    let g: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| s.u * s.u * weight(s.t) / 4.0)
        .collect();
    let dg: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| (2.0 * s.u * s.du * weight(s.t) + s.u * s.u * dweight(s.t)) / 4.0)
        .collect();
    let outer = reverse_cumulative_corrected_trapezoid(&ts, &g, &dg);
    let u_end = traj.last().u;
    let lambda = traj.lambda;
    traj.samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let t = s.t;
            let bracket =
                (0.5 - t) * inner[k] + t * outer[k] + 0.25 * lambda * t * (0.5 - t) - 2.0 * t * u_end;
            (s.u + bracket).abs()
        })
        .fold(0.0, f64::max)
}

pub fn validate(traj: &Trajectory) -> ValidationReport {
    ValidationReport {
        first_integral_resid: first_integral_residual(traj),
        representation_resid: representation_residual(traj),
        sign_violation: traj.max_u(),
        boundary_resid: boundary_residual(traj, traj.kind).abs(),
    }
}

/// A trajectory that passed every validator; the only input accepted by
/// [`crate::model::reconstruct_phi`].
#[derive(Debug, Clone)]
pub struct AcceptedTrajectory {
    traj: Trajectory,
    report: ValidationReport,
}

impl AcceptedTrajectory {
    pub fn new(traj: Trajectory, tol: &Tolerances) -> Result<Self> {
        let report = validate(&traj);
        if traj.diverged || !report.accepted(tol) {
            return Err(Error::NotAccepted(Box::new(report)));
        }
        Ok(Self { traj, report })
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn into_inner(self) -> Trajectory {
        self.traj
    }
}
