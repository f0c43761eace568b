//! λ sweeps, branch labelling and fold location.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Edge, Error, Result};
use crate::model::{BoundaryKind, ProblemSpec};
use crate::shooting::{find_shooting_roots, RootSet};

/// Smallest fold bracket width worth asking for. Below this the two merging
/// roots sit closer than the clustering tolerance and the count predicate
/// stops meaning anything.
pub const FOLD_TOL_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The more negative slope of a root pair.
    Lower,
    Upper,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lower" => Ok(Branch::Lower),
            "upper" => Ok(Branch::Upper),
            other => Err(Error::Parse(format!("unknown branch '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub lambda: f64,
    pub a: f64,
    pub branch: Branch,
}

/// `lo` is solvable, `hi` is not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldBracket {
    pub lo: f64,
    pub hi: f64,
    pub kind: BoundaryKind,
}

impl FoldBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub kind: BoundaryKind,
    pub points: Vec<DiagramPoint>,
    /// Number of validated nontrivial roots at each swept λ.
    pub counts: Vec<(f64, usize)>,
    /// Last solvable and first unsolvable swept λ, when the sweep crosses
    /// the fold.
    pub fold: Option<FoldBracket>,
}

impl BifurcationDiagram {
    /// Narrow the sweep's fold bracket to `fold_tol` by bisection.
    pub fn refine_fold(&mut self, base: &ProblemSpec, fold_tol: f64) -> Result<Option<FoldBracket>> {
        if let Some(coarse) = self.fold {
            self.fold = Some(locate_fold_with(base, (coarse.lo, coarse.hi), fold_tol)?);
        }
        Ok(self.fold)
    }

    pub fn branch(&self, branch: Branch) -> Vec<DiagramPoint> {
        self.points.iter().copied().filter(|p| p.branch == branch).collect()
    }
}

/// Run the root finder at every λ and label the roots by branch.
///
/// `base` supplies every numerical setting; its `lambda` and `kind` are
/// overridden.
pub fn sweep(kind: BoundaryKind, lambdas: &[f64], base: &ProblemSpec) -> Result<BifurcationDiagram> {
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::Precondition("sweep lambdas must be finite and >= 0".into()));
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("sweep lambdas must be strictly ascending".into()));
    }
    let sets: Vec<RootSet> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut spec = *base;
            spec.lambda = lambda;
            spec.kind = kind;
            find_shooting_roots(&spec)
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut counts = Vec::with_capacity(sets.len());
    let mut previous: Vec<DiagramPoint> = Vec::new();
    for set in &sets {
        let labelled = label(set, &previous);
        if !labelled.is_empty() {
            previous = labelled.clone();
        }
        points.extend(labelled);
        counts.push((set.lambda, set.nontrivial().len()));
    }

    let fold = counts.windows(2).find_map(|w| {
        (w[0].1 > 0 && w[1].1 == 0).then_some(FoldBracket {
            lo: w[0].0,
            hi: w[1].0,
            kind,
        })
    });

    Ok(BifurcationDiagram {
        kind,
        points,
        counts,
        fold,
    })
}

fn label(set: &RootSet, previous: &[DiagramPoint]) -> Vec<DiagramPoint> {
    let point = |a: f64, branch: Branch| DiagramPoint {
        lambda: set.lambda,
        a,
        branch,
    };
    let slopes = set.slopes();
    match slopes.as_slice() {
        [] => Vec::new(),
        [lo, hi] => vec![point(*lo, Branch::Lower), point(*hi, Branch::Upper)],
        _ => slopes
            .iter()
            .map(|&a| {
                let branch = previous
                    .iter()
                    .min_by(|p, q| (p.a - a).abs().total_cmp(&(q.a - a).abs()))
                    .map(|p| p.branch)
                    .unwrap_or(Branch::Upper);
                point(a, branch)
            })
            .collect(),
    }
}

/// [`locate_fold_with`] using the default numerical settings.
pub fn locate_fold(kind: BoundaryKind, bracket: (f64, f64), fold_tol: f64) -> Result<FoldBracket> {
    locate_fold_with(&ProblemSpec::new(bracket.0, kind), bracket, fold_tol)
}

/// Bisect on λ with "has a nontrivial root" as the predicate until the
/// bracket is no wider than `fold_tol` (floored at [`FOLD_TOL_FLOOR`]).
pub fn locate_fold_with(base: &ProblemSpec, bracket: (f64, f64), fold_tol: f64) -> Result<FoldBracket> {
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::Precondition(format!(
            "fold bracket must satisfy 0 <= lo < hi, got ({lo}, {hi})"
        )));
    }
    if !(fold_tol > 0.0) {
        return Err(Error::Precondition(format!("fold_tol must be positive, got {fold_tol}")));
    }
    let tol = fold_tol.max(FOLD_TOL_FLOOR);
    let count = |lambda: f64| -> Result<usize> {
        let mut spec = *base;
        spec.lambda = lambda;
        Ok(find_shooting_roots(&spec)?.nontrivial().len())
    };

    let (n_lo, n_hi) = rayon::join(|| count(lo), || count(hi));
    let (n_lo, n_hi) = (n_lo?, n_hi?);
    if n_lo == 0 {
        return Err(Error::FoldBracket {
            edge: Edge::Lower,
            lambda: lo,
            roots: n_lo,
        });
    }
    if n_hi != 0 {
        return Err(Error::FoldBracket {
            edge: Edge::Upper,
            lambda: hi,
            roots: n_hi,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count(mid)? > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(FoldBracket {
        lo,
        hi,
        kind: base.kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shooting::Root;

    fn set(lambda: f64, slopes: &[f64]) -> RootSet {
        RootSet {
            lambda,
            kind: BoundaryKind::Dirichlet,
            roots: slopes.iter().map(|&a| Root { a, sign: -1 }).collect(),
            window: (-500.0, 0.0),
            rejected: vec![],
        }
    }

    #[test]
    fn pairs_split_by_slope() {
        let pts = label(&set(10.0, &[-150.0, -2.0]), &[]);
        assert_eq!(pts[0].branch, Branch::Lower);
        assert_eq!(pts[1].branch, Branch::Upper);
    }

    #[test]
    fn single_root_follows_nearest_branch() {
        let prev = label(&set(10.0, &[-60.0, -40.0]), &[]);
        let pts = label(&set(11.0, &[-57.0]), &prev);
        assert_eq!(pts[0].branch, Branch::Lower);
        let pts = label(&set(11.0, &[-45.0]), &prev);
        assert_eq!(pts[0].branch, Branch::Upper);
    }

    #[test]
    fn rejects_unsorted_lambdas() {
        let base = ProblemSpec::new(0.0, BoundaryKind::Dirichlet);
        assert!(matches!(
            sweep(BoundaryKind::Dirichlet, &[5.0, 1.0], &base),
            Err(Error::Precondition(_))
        ));
        assert!(sweep(BoundaryKind::Dirichlet, &[-1.0], &base).is_err());
    }

    #[test]
    fn bad_bracket_names_failing_end() {
        match locate_fold(BoundaryKind::Navier, (12.0, 13.0), 0.05) {
            Err(Error::FoldBracket { edge, roots, .. }) => {
                assert_eq!(edge, Edge::Lower);
                assert_eq!(roots, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        match locate_fold(BoundaryKind::Navier, (5.0, 10.0), 0.05) {
            Err(Error::FoldBracket { edge, roots, .. }) => {
                assert_eq!(edge, Edge::Upper);
                assert_eq!(roots, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn navier_sweep_counts() {
        let base = ProblemSpec::new(0.0, BoundaryKind::Navier);
        let d = sweep(BoundaryKind::Navier, &[0.0, 5.0, 10.0, 12.0], &base).unwrap();
        let counts: Vec<usize> = d.counts.iter().map(|c| c.1).collect();
        // the zero solution at λ = 0 is not counted as nontrivial
        assert_eq!(counts, vec![1, 2, 2, 0]);
        assert_eq!(d.points.iter().filter(|p| p.lambda == 0.0).count(), 2);
        let fold = d.fold.unwrap();
        assert_eq!((fold.lo, fold.hi), (10.0, 12.0));
    }
}
