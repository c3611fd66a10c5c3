//! Picard iteration with Sibley-distance convergence, cycle detection on
//! finite spaces, and orbit checks for periodic points and Cauchy
//! subsequences.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::combinatorics::IndexSet;
use crate::contraction::check_mk_b;
use crate::ddf::Ddf;
use crate::error::{ContractionError, SolverError};
use crate::pm_space::{orbit, ProbMetric, SelfMap};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Iteration budget when the space does not bound it.
pub const DEFAULT_LAZY_BUDGET: usize = 10_000;

/// `10·|S|` for a finite working set, otherwise [`DEFAULT_LAZY_BUDGET`].
pub fn default_max_iter(working_set: Option<usize>) -> usize {
    working_set.map_or(DEFAULT_LAZY_BUDGET, |n| (10 * n).max(1))
}

/// `d_S(F, ε₀)`.
pub fn distance_to_zero(f: &Ddf) -> f64 {
    f.sibley(&Ddf::epsilon0())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// `points[index]` is the fixed-point candidate.
    Converged { index: usize },
    /// `points[offset] = points[offset + length]`.
    Cycle { offset: usize, length: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace<P> {
    pub points: Vec<P>,
    /// `step_dists[n] = d_S(F_{xₙ,xₙ₊₁}, ε₀)`.
    pub step_dists: Vec<f64>,
    pub outcome: Outcome,
    /// `d_S(F_{r,f(r)}, ε₀)` for the converged candidate `r`.
    pub verified_dist: Option<f64>,
}

impl<P> OrbitTrace<P> {
    pub fn fixed_point(&self) -> Option<&P> {
        match self.outcome {
            Outcome::Converged { index } => self.points.get(index),
            _ => None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.step_dists.len()
    }
}

/// Iterates `xₙ₊₁ = f(xₙ)` from `p0`.
///
/// Once `d_S(F_{xₙ,xₙ₊₁}, ε₀) ≤ tol`, the candidate `r = xₙ₊₁` is accepted
/// only if `d_S(F_{r,f(r)}, ε₀) ≤ tol` as well; otherwise iteration goes on.
/// Spaces with point identifiers report exact revisits as cycles.
pub fn picard_solve<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    p0: &S::Point,
    tol: f64,
    max_iter: usize,
) -> Result<OrbitTrace<S::Point>, SolverError> {
    if !(tol > 0.0) {
        return Err(SolverError::InvalidTolerance(tol));
    }
    if max_iter == 0 {
        return Err(SolverError::ZeroBudget);
    }
    let mut points = alloc::vec![p0.clone()];
    let mut step_dists = Vec::new();
    let mut seen = BTreeMap::new();
    if let Some(id) = space.point_id(p0) {
        seen.insert(id, 0);
    }
    for n in 0..max_iter {
        let next = f.apply(&points[n]);
        let d = distance_to_zero(&space.ddf(&points[n], &next));
        step_dists.push(d);
        points.push(next);
        let r = &points[n + 1];
        if d <= tol {
            let check = distance_to_zero(&space.ddf(r, &f.apply(r)));
            if check <= tol {
                log::debug!("converged after {} steps", n + 1);
                return Ok(OrbitTrace {
                    points,
                    step_dists,
                    outcome: Outcome::Converged { index: n + 1 },
                    verified_dist: Some(check),
                });
            }
        }
        if let Some(id) = space.point_id(r) {
            if let Some(&offset) = seen.get(&id) {
                return Ok(OrbitTrace {
                    points,
                    step_dists,
                    outcome: Outcome::Cycle {
                        offset,
                        length: n + 1 - offset,
                    },
                    verified_dist: None,
                });
            }
            seen.insert(id, n + 1);
        }
    }
    Ok(OrbitTrace {
        points,
        step_dists,
        outcome: Outcome::BudgetExhausted,
        verified_dist: None,
    })
}

/// For a periodic point `fⁿp = p` of a scaling contraction, reports whether
/// `p` is fixed. `false` falsifies the periodic-point collapse property.
///
/// Both preconditions are verified: the `(m, k)` scaling condition on all
/// pairs of the orbit `{p, …, fⁿ⁻¹p}` and the periodicity itself.
pub fn cycle_collapse_check<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
    p: &S::Point,
    n: usize,
) -> Result<bool, SolverError> {
    if n == 0 {
        return Err(SolverError::ZeroPeriod);
    }
    let cycle = orbit(f, p, n);
    if !space.same_point(&cycle[n], p) {
        return Err(SolverError::NotPeriodic(n));
    }
    let report = check_mk_b(space, &cycle[..n], f, m, k)?;
    if let Some(c) = report.failures().next() {
        return Err(ContractionError::NotContractive(c.p, c.q).into());
    }
    Ok(space.same_point(&cycle[1], p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReport {
    pub tail: usize,
    /// `max d_S(F_{fⁱp,fʲp}, ε₀)` over members `i < j` of `I` with `i ≥ tail`.
    pub max_dist: f64,
    pub passed: bool,
    /// `(c, max over members i < j with i ≥ c)` for each member `c ≥ tail`
    /// that still has a later member.
    pub profile: Vec<(usize, f64)>,
}

impl CauchyReport {
    pub fn profile_nonincreasing(&self) -> bool {
        self.profile.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Spread of the orbit subsequence indexed by `I` past `tail`.
pub fn cauchy_subsequence_check<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    p: &S::Point,
    set: &IndexSet,
    tail: usize,
    tol: f64,
) -> Result<CauchyReport, SolverError> {
    if !(tol > 0.0) {
        return Err(SolverError::InvalidTolerance(tol));
    }
    let members: Vec<usize> = set.members().iter().copied().filter(|&i| i >= tail).collect();
    if members.len() < 2 {
        return Err(SolverError::TooFewMembers(members.len()));
    }
    let points = orbit(f, p, *members.last().unwrap());
    // suffix maxima over pairs whose smaller index is at or past a member
    let mut profile = Vec::with_capacity(members.len() - 1);
    let mut running = 0.0_f64;
    for a in (0..members.len() - 1).rev() {
        for &j in &members[a + 1..] {
            let d = distance_to_zero(&space.ddf(&points[members[a]], &points[j]));
            running = running.max(d);
        }
        profile.push((members[a], running));
    }
    profile.reverse();
    Ok(CauchyReport {
        tail,
        max_dist: running,
        passed: running <= tol,
        profile,
    })
}
