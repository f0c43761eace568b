//! Problem definition for the radial stationary growth equation.
//!
//! In the radial frame the unknown is `w(r) = r φ'(r)` on `(0, 1]`. The
//! substitution `t = r²/2`, `u(t) = w(r)` turns the problem into
//!
//! ```text
//! u'' = u² / (8 t²) + λ / 2,   t ∈ (0, 1/2]
//! ```
//!
//! with `u(t)/t` bounded as `t → 0⁺` and either `u(1/2) = 0` (Dirichlet)
//! or `u(1/2) = u'(1/2)` (Navier) at the outer edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::AcceptedTrajectory;

/// Right end of the transformed interval.
pub const T_END: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// `u(1/2) = 0`.
    Dirichlet,
    /// `u(1/2) = u'(1/2)`.
    Navier,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Navier => "navier",
        }
    }
}

impl std::fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryKind::Dirichlet),
            "navier" => Ok(BoundaryKind::Navier),
            other => Err(Error::Parse(format!("unknown boundary kind '{other}'"))),
        }
    }
}

/// Acceptance thresholds applied by the solution validators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub boundary: f64,
    pub first_integral: f64,
    pub representation: f64,
    pub sign: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-8,
            first_integral: 1e-6,
            representation: 1e-5,
            sign: 1e-8,
        }
    }
}

/// Everything that defines one solve: the deposition rate, the outer
/// boundary condition and the numerical knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub lambda: f64,
    pub kind: BoundaryKind,
    /// Launch point of the series expansion.
    pub eps: f64,
    /// Local error tolerance of the adaptive integrator.
    pub step_tol: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    /// Number of uniform output intervals on `[eps, 1/2]`.
    pub grid_n: usize,
    /// Number of slopes probed by the root scan.
    pub scan_n: usize,
    pub root_tol: f64,
    pub cluster_tol: f64,
    /// `|u|` above this marks a shot as diverged.
    pub blowup: f64,
    pub tolerances: Tolerances,
}

impl ProblemSpec {
    pub fn new(lambda: f64, kind: BoundaryKind) -> Self {
        Self {
            lambda,
            kind,
            eps: 1e-8,
            step_tol: 1e-10,
            slope_min: -500.0,
            slope_max: 0.0,
            grid_n: 2000,
            scan_n: 2000,
            root_tol: 1e-10,
            cluster_tol: 1e-6,
            blowup: 1e6,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.eps > 0.0 && self.eps < T_END) {
            return bad(format!("eps must lie in (0, 1/2), got {}", self.eps));
        }
        if !(self.step_tol > 0.0 && self.step_tol.is_finite()) {
            return bad(format!("step_tol must be positive, got {}", self.step_tol));
        }
        if !(self.slope_min.is_finite() && self.slope_min <= self.slope_max && self.slope_max <= 0.0)
        {
            return bad(format!(
                "slope window must satisfy slope_min <= slope_max <= 0, got [{}, {}]",
                self.slope_min, self.slope_max
            ));
        }
        if self.grid_n == 0 {
            return bad("grid_n must be positive".into());
        }
        if self.scan_n < 2 {
            return bad("scan_n must be at least 2".into());
        }
        if !(self.root_tol > 0.0 && self.cluster_tol > 0.0 && self.blowup > 0.0) {
            return bad("root_tol, cluster_tol and blowup must be positive".into());
        }
        Ok(())
    }
}

/// Two-term expansion `u(t) ≈ a t + β t²` about the singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesLaunch {
    /// Shooting slope, the limit of `u(t)/t` at `0⁺`.
    pub a: f64,
    pub beta: f64,
}

impl SeriesLaunch {
    pub fn new(a: f64, lambda: f64) -> Self {
        Self {
            a,
            beta: a * a / 16.0 + lambda / 4.0,
        }
    }

    pub fn u(&self, t: f64) -> f64 {
        self.a * t + self.beta * t * t
    }

    pub fn du(&self, t: f64) -> f64 {
        self.a + 2.0 * self.beta * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub du: f64,
}

/// A sampled solution candidate on `[eps, 1/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub lambda: f64,
    pub kind: BoundaryKind,
    pub launch: SeriesLaunch,
    pub samples: Vec<Sample>,
    /// Set when the shot left the blow-up bound before reaching `t = 1/2`.
    pub diverged: bool,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn reached_end(&self) -> bool {
        !self.diverged && self.last().t == T_END
    }

    pub fn max_u(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.u)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piecewise cubic Hermite evaluation of `(u, u')`, using `u''` from the
    /// equation at the nodes for the derivative component.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let s = &self.samples;
        if t <= s[0].t {
            return (s[0].u, s[0].du);
        }
        if t >= self.last().t {
            let l = self.last();
            return (l.u, l.du);
        }
        let k = s.partition_point(|p| p.t <= t) - 1;
        let (p, q) = (&s[k], &s[k + 1]);
        let h = q.t - p.t;
        let x = (t - p.t) / h;
        let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        let h10 = x * (1.0 - x) * (1.0 - x);
        let h01 = x * x * (3.0 - 2.0 * x);
        let h11 = x * x * (x - 1.0);
        let ddp = rhs_unchecked(p.t, p.u, self.lambda);
        let ddq = rhs_unchecked(q.t, q.u, self.lambda);
        let u = h00 * p.u + h10 * h * p.du + h01 * q.u + h11 * h * q.du;
        let du = h00 * p.du + h10 * h * ddp + h01 * q.du + h11 * h * ddq;
        (u, du)
    }

    /// Largest `|u_self(t) - u_other(t)|` over this trajectory's sample times.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.u - other.eval(s.t).0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    pub w: f64,
    pub phi: f64,
}

/// `w(r)` and the height `φ(r)` in the physical radial frame, ascending in `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub samples: Vec<ProfileSample>,
}

pub fn to_u_frame(r: f64, w: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::RadiusOutOfDomain { r });
    }
    Ok((r * r / 2.0, w))
}

pub fn from_u_frame(t: f64, u: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t <= T_END) {
        return Err(Error::TimeOutOfDomain { t });
    }
    Ok(((2.0 * t).sqrt(), u))
}

/// `u²/(8t²) + λ/2`.
pub fn rhs(t: f64, u: f64, lambda: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Singularity { t });
    }
    Ok(rhs_unchecked(t, u, lambda))
}

#[inline]
pub(crate) fn rhs_unchecked(t: f64, u: f64, lambda: f64) -> f64 {
    u * u / (8.0 * t * t) + 0.5 * lambda
}

/// Rebuild `w(r)` and `φ(r) = -∫_r^1 w(s)/s ds` from an accepted trajectory.
///
/// The integral runs over the trajectory's own nodes mapped to `r = √(2t)`
/// (composite trapezoid), anchored at `φ(1) = 0` for both boundary kinds.
pub fn reconstruct_phi(traj: &AcceptedTrajectory) -> RadialProfile {
    let traj = traj.trajectory();
    let n = traj.samples.len();
    let mut samples: Vec<ProfileSample> = traj
        .samples
        .iter()
        .map(|s| ProfileSample {
            r: (2.0 * s.t).sqrt(),
            w: s.u,
            phi: 0.0,
        })
        .collect();
    // the last node is t = 1/2 exactly, so r = 1
    samples[n - 1].r = 1.0;

    let integrand = |p: &ProfileSample| p.w / p.r;
    let mut acc = 0.0;
    for k in (0..n - 1).rev() {
        let (lo, hi) = (&samples[k], &samples[k + 1]);
        acc += 0.5 * (hi.r - lo.r) * (integrand(lo) + integrand(hi));
        samples[k].phi = -acc;
    }
    RadialProfile { samples }
}
