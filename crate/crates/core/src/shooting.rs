//! Root finding over the shooting slope `a = lim u(t)/t`.
//!
//! The residual `a ↦ boundary_residual(integrate(a))` is scanned on a uniform
//! grid of slopes. Sign changes are refined by bisection followed by an
//! Illinois-safeguarded secant. Local extrema of the residual that stay on
//! one side of zero are refined by golden-section search, which uncovers
//! root pairs closer together than the scan spacing and double roots at the
//! fold itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Edge, Error, Result};
use crate::integrator::{integrate, AcceptedTrajectory};
use crate::model::{BoundaryKind, ProblemSpec, Trajectory};

/// `u(1/2)` (Dirichlet) or `u(1/2) - u'(1/2)` (Navier); `+∞` for a shot
/// that did not reach `t = 1/2`.
pub fn boundary_residual(traj: &Trajectory, kind: BoundaryKind) -> f64 {
    if !traj.reached_end() {
        return f64::INFINITY;
    }
    let end = traj.last();
    match kind {
        BoundaryKind::Dirichlet => end.u,
        BoundaryKind::Navier => end.u - end.du,
    }
}

/// Residual of a single shot.
pub fn shot_residual(spec: &ProblemSpec, a: f64) -> Result<f64> {
    Ok(boundary_residual(&integrate(spec, a)?, spec.kind))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub a: f64,
    /// Sign of the residual's slope at the root: `-1`, `+1`, or `0` for a
    /// tangential (double) root.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub lambda: f64,
    pub kind: BoundaryKind,
    /// Ascending in `a`; every entry passed the solution validators.
    pub roots: Vec<Root>,
    pub window: (f64, f64),
    /// Refined roots whose trajectories failed validation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<f64>,
}

impl RootSet {
    pub fn slopes(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.a).collect()
    }

    /// Roots other than the zero solution (which only exists at `λ = 0`).
    pub fn nontrivial(&self) -> Vec<f64> {
        self.roots
            .iter()
            .map(|r| r.a)
            .filter(|&a| !(self.lambda == 0.0 && a == 0.0))
            .collect()
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_REFINE: usize = 200;

/// Locate every slope in `[slope_min, slope_max]` whose shot satisfies the
/// outer boundary condition.
pub fn find_shooting_roots(spec: &ProblemSpec) -> Result<RootSet> {
    spec.validate()?;
    let (lo, hi) = (spec.slope_min, spec.slope_max);
    let n = spec.scan_n;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&a| shot_residual(spec, a))
        .collect::<Result<_>>()?;

    let btol = spec.tolerances.boundary;
    let trivial_at = |a: f64| spec.lambda == 0.0 && a == 0.0;
    if values[0].abs() <= btol && !trivial_at(grid[0]) {
        return Err(Error::WindowTooSmall {
            edge: Edge::Lower,
            a: grid[0],
        });
    }
    if values[n - 1].abs() <= btol && !trivial_at(grid[n - 1]) {
        return Err(Error::WindowTooSmall {
            edge: Edge::Upper,
            a: grid[n - 1],
        });
    }

    let mut found: Vec<Candidate> = Vec::new();
    let mut brackets: Vec<Bracket> = Vec::new();
    for k in 0..n {
        if values[k] == 0.0 {
            found.push(Candidate {
                a: grid[k],
                residual: 0.0,
                sign: 0,
            });
        }
    }
    for k in 0..n - 1 {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa != 0.0 && fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            brackets.push(Bracket {
                lo: grid[k],
                hi: grid[k + 1],
                f_lo: fa,
                f_hi: fb,
            });
        }
    }

    // one-sided extrema: possible hidden root pairs or a tangency
    let extrema: Vec<usize> = (1..n - 1)
        .filter(|&k| {
            let (p, c, q) = (values[k - 1], values[k], values[k + 1]);
            p.is_finite()
                && c.is_finite()
                && q.is_finite()
                && (p > 0.0) == (c > 0.0)
                && (c > 0.0) == (q > 0.0)
                && c != 0.0
                && if c > 0.0 { c <= p && c <= q } else { c >= p && c >= q }
        })
        .collect();
    let probes: Vec<ExtremumProbe> = extrema
        .par_iter()
        .map(|&k| probe_extremum(spec, grid[k - 1], grid[k + 1], values[k] > 0.0))
        .collect::<Result<_>>()?;
    for (probe, &k) in probes.iter().zip(&extrema) {
        let crosses = (probe.value > 0.0) != (values[k] > 0.0) && probe.value != 0.0;
        if crosses {
            brackets.push(Bracket {
                lo: grid[k - 1],
                hi: probe.a,
                f_lo: values[k - 1],
                f_hi: probe.value,
            });
            brackets.push(Bracket {
                lo: probe.a,
                hi: grid[k + 1],
                f_lo: probe.value,
                f_hi: values[k + 1],
            });
        } else if probe.value.abs() <= btol {
            found.push(Candidate {
                a: probe.a,
                residual: probe.value,
                sign: 0,
            });
        }
    }

    let refined: Vec<Candidate> = brackets
        .par_iter()
        .map(|b| refine_bracket(spec, *b))
        .collect::<Result<_>>()?;
    found.extend(refined);
    found.sort_by(|x, y| x.a.total_cmp(&y.a));
    let merged = merge_clusters(found, spec.cluster_tol);

    let checked: Vec<(Candidate, bool)> = merged
        .into_par_iter()
        .map(|c| {
            let traj = integrate(spec, c.a)?;
            Ok((c, AcceptedTrajectory::new(traj, &spec.tolerances).is_ok()))
        })
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    let mut rejected = Vec::new();
    for (c, ok) in checked {
        if ok {
            roots.push(Root { a: c.a, sign: c.sign });
        } else {
            rejected.push(c.a);
        }
    }

    Ok(RootSet {
        lambda: spec.lambda,
        kind: spec.kind,
        roots,
        window: (lo, hi),
        rejected,
    })
}

/// Integrate at `a` and require the result to pass validation.
pub fn solve_at(spec: &ProblemSpec, a: f64) -> Result<AcceptedTrajectory> {
    AcceptedTrajectory::new(integrate(spec, a)?, &spec.tolerances)
}

#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    a: f64,
    residual: f64,
    sign: i8,
}

#[derive(Debug, Clone, Copy)]
struct ExtremumProbe {
    a: f64,
    value: f64,
}

fn refine_bracket(spec: &ProblemSpec, b: Bracket) -> Result<Candidate> {
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = b;
    let sign: i8 = if f_hi > f_lo { 1 } else { -1 };
    let mut best = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    // which end was retained twice in a row (Illinois)
    let mut side = 0i8;
    for _ in 0..MAX_REFINE {
        if hi - lo <= spec.root_tol {
            break;
        }
        let x = if f_lo.is_finite() && f_hi.is_finite() {
            let s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if s > lo && s < hi {
                s
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let fx = shot_residual(spec, x)?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            break;
        }
        if (fx > 0.0) == (f_lo > 0.0) {
            lo = x;
            f_lo = fx;
            if side == -1 && f_hi.is_finite() {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 && f_lo.is_finite() {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Candidate {
        a: best.0,
        residual: best.1,
        sign,
    })
}

/// Golden-section search for the extremum of the residual on `[lo, hi]`:
/// a minimum when `positive`, a maximum otherwise.
fn probe_extremum(spec: &ProblemSpec, lo: f64, hi: f64, positive: bool) -> Result<ExtremumProbe> {
    let orient = if positive { 1.0 } else { -1.0 };
    let g = |a: f64| -> Result<f64> { Ok(orient * shot_residual(spec, a)?) };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut g1 = g(x1)?;
    let mut g2 = g(x2)?;
    let mut best = if g1 <= g2 { (x1, g1) } else { (x2, g2) };
    for _ in 0..MAX_REFINE {
        if b - a <= spec.root_tol.max(1e-9 * (1.0 + a.abs())) || best.1 <= 0.0 {
            break;
        }
        if g1 <= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - GOLDEN * (b - a);
            g1 = g(x1)?;
            if g1 < best.1 {
                best = (x1, g1);
            }
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + GOLDEN * (b - a);
            g2 = g(x2)?;
            if g2 < best.1 {
                best = (x2, g2);
            }
        }
    }
    Ok(ExtremumProbe {
        a: best.0,
        value: orient * best.1,
    })
}

fn merge_clusters(sorted: Vec<Candidate>, cluster_tol: f64) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::with_capacity(sorted.len());
    for c in sorted {
        match out.last_mut() {
            Some(prev) if c.a - prev.a < cluster_tol => {
                let sign = if prev.sign == c.sign { c.sign } else { 0 };
                if c.residual.abs() < prev.residual.abs() {
                    *prev = c;
                }
                prev.sign = sign;
            }
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sample;
    use crate::model::SeriesLaunch;

    fn endpoint(u: f64, du: f64) -> Trajectory {
        Trajectory {
            lambda: 1.0,
            kind: BoundaryKind::Navier,
            launch: SeriesLaunch::new(0.0, 1.0),
            samples: vec![
                Sample { t: 0.1, u: 0.0, du: 0.0 },
                Sample { t: 0.5, u, du },
            ],
            diverged: false,
        }
    }

    #[test]
    fn residual_examples() {
        let zero = endpoint(0.0, 0.0);
        assert_eq!(boundary_residual(&zero, BoundaryKind::Dirichlet), 0.0);
        assert_eq!(boundary_residual(&endpoint(-3.0, -3.0), BoundaryKind::Navier), 0.0);
        assert_eq!(boundary_residual(&endpoint(-1.0, 0.0), BoundaryKind::Navier), -1.0);
        let mut short = endpoint(-1.0, 0.0);
        short.diverged = true;
        assert_eq!(boundary_residual(&short, BoundaryKind::Navier), f64::INFINITY);
    }

    #[test]
    fn clusters_merge_to_tangent_root() {
        let c = |a: f64, r: f64, sign: i8| Candidate { a, residual: r, sign };
        let merged = merge_clusters(
            vec![c(-1.0, 1e-9, -1), c(-1.0 + 1e-8, 1e-10, 1), c(-0.5, 0.0, 1)],
            1e-6,
        );
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].sign, 0);
        assert_eq!(merged[0].a, -1.0 + 1e-8);
    }

    #[test]
    fn edge_root_is_reported() {
        // the λ = 100 upper-branch root sits near a = -16.26
        let mut spec = ProblemSpec::new(100.0, BoundaryKind::Dirichlet);
        spec.scan_n = 50;
        spec.slope_max = -16.263563065461664;
        spec.tolerances.boundary = 1e-6;
        match find_shooting_roots(&spec) {
            Err(Error::WindowTooSmall { edge, .. }) => assert_eq!(edge, Edge::Upper),
            other => panic!("expected window error, got {other:?}"),
        }
    }
}
