//! Checkers for scaling (B) and threshold (C) contractions with `m` iterates,
//! and the index sets along orbits on which they act.

use alloc::vec::Vec;

use crate::combinatorics::IndexSet;
use crate::ddf::Ddf;
use crate::error::ContractionError;
use crate::espace::ky_fan;
use crate::pm_space::{orbit, ProbMetric, SelfMap};
use crate::pow_int;

/// Default window length for orbit index sets.
pub const DEFAULT_WINDOW: usize = 60;

pub(crate) fn validate_mk(m: usize, k: f64) -> Result<(), ContractionError> {
    if m == 0 {
        return Err(ContractionError::ZeroM);
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(ContractionError::InvalidK(k));
    }
    Ok(())
}

/// `x ↦ F(c·x)`, with breakpoints divided by `c` (correctly rounded).
pub(crate) fn compress(f: &Ddf, c: f64) -> Ddf {
    Ddf::from_steps(
        f.breakpoints()
            .iter()
            .zip(f.values())
            .map(|(&b, &v)| (b / c, v)),
    )
}

/// Scaling condition `Fᵢ(kᵢ·t) ≥ F₀(t)` for all `t > 0`.
///
/// Returns a point `t` where it fails.
pub fn b_condition(f0: &Ddf, fi: &Ddf, ki: f64) -> Option<f64> {
    f0.exceedance_witness(&compress(fi, ki))
}

/// Threshold condition `F₀(t) > 1 − t ⇒ Fᵢ(kᵢ·t) > 1 − kᵢ·t` for all `t > 0`.
///
/// Both antecedent and consequent sets are open rays `(a, ∞)` and `(b/kᵢ, ∞)`
/// with `a`, `b` the Ky Fan values, so the implication holds iff
/// `kᵢ·a ≥ b`. On failure `t = b/kᵢ` is returned: it lies in the first ray
/// and `Fᵢ(b) ≤ 1 − b` because the complement of a ray is closed at `b`.
pub fn c_condition(f0: &Ddf, fi: &Ddf, ki: f64) -> Option<f64> {
    let a = ky_fan(f0);
    let b = ky_fan(fi);
    if ki * a >= b {
        None
    } else {
        Some(b / ki)
    }
}

/// The threshold condition decided by direct evaluation at every candidate
/// where either side can change, and in every cell between candidates.
pub fn c_condition_dense(f0: &Ddf, fi: &Ddf, ki: f64) -> Option<f64> {
    let mut cuts: Vec<f64> = Vec::new();
    for (&b, &v) in f0.breakpoints().iter().zip(f0.values()) {
        cuts.push(b);
        cuts.push(1.0 - v);
    }
    for (&c, &w) in fi.breakpoints().iter().zip(fi.values()) {
        cuts.push(c / ki);
        cuts.push((1.0 - w) / ki);
    }
    cuts.push(1.0);
    cuts.push(1.0 / ki);
    cuts.push(ky_fan(f0));
    cuts.push(ky_fan(fi) / ki);
    cuts.retain(|&t| t > 0.0 && t.is_finite());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let fails = |t: f64| {
        let kt = ki * t;
        f0.value(t) > 1.0 - t && !(fi.value(kt) > 1.0 - kt)
    };
    let mut prev = 0.0;
    for &c in &cuts {
        for t in [0.5 * (prev + c), c, c.next_up()] {
            if fails(t) {
                return Some(t);
            }
        }
        prev = c;
    }
    let last = prev + 1.0;
    fails(last).then_some(last)
}

/// Outcome of a contraction check on one unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck {
    pub p: usize,
    pub q: usize,
    /// Smallest iterate `i ∈ [1, m]` at which the condition holds.
    pub witness: Option<usize>,
    /// A point `t` at which the condition fails for `i = 1`.
    pub counter: Option<f64>,
    /// The exact reduction agreed with dense evaluation at every `i`
    /// (always true for the scaling check, which needs no reduction).
    pub dense_agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub m: usize,
    pub k: f64,
    pub pairs: Vec<PairCheck>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|c| c.witness.is_some())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|c| c.witness.is_none())
    }

    pub fn dense_agrees(&self) -> bool {
        self.pairs.iter().all(|c| c.dense_agrees)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    B,
    C,
}

fn check_pairs<S: ProbMetric>(
    space: &S,
    points: &[S::Point],
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
    kind: Kind,
) -> Result<ContractionReport, ContractionError> {
    validate_mk(m, k)?;
    let orbits: Vec<Vec<S::Point>> = points.iter().map(|p| orbit(f, p, m)).collect();
    let mut pairs = Vec::new();
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let mut check = PairCheck {
                p: a,
                q: b,
                witness: None,
                counter: None,
                dense_agrees: true,
            };
            let f0 = space.ddf(&orbits[a][0], &orbits[b][0]);
            for i in 1..=m {
                let fi = space.ddf(&orbits[a][i], &orbits[b][i]);
                let ki = pow_int(k, i);
                let fail = match kind {
                    Kind::B => b_condition(&f0, &fi, ki),
                    Kind::C => {
                        let fail = c_condition(&f0, &fi, ki);
                        if fail.is_some() != c_condition_dense(&f0, &fi, ki).is_some() {
                            check.dense_agrees = false;
                        }
                        fail
                    }
                };
                if i == 1 {
                    check.counter = fail;
                }
                if fail.is_none() && check.witness.is_none() {
                    check.witness = Some(i);
                    if kind == Kind::B {
                        break;
                    }
                }
            }
            pairs.push(check);
        }
    }
    Ok(ContractionReport { m, k, pairs })
}

/// Checks `∃ i ∈ [1, m] : F_{fⁱp,fⁱq}(kⁱt) ≥ F_{p,q}(t) ∀t > 0` on every
/// unordered pair of `points`.
pub fn check_mk_b<S: ProbMetric>(
    space: &S,
    points: &[S::Point],
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
) -> Result<ContractionReport, ContractionError> {
    check_pairs(space, points, f, m, k, Kind::B)
}

/// Checks `∃ i ∈ [1, m] : (F_{p,q}(t) > 1 − t ⇒ F_{fⁱp,fⁱq}(kⁱt) > 1 − kⁱt) ∀t > 0`
/// on every unordered pair of `points`, cross-checking the exact reduction
/// against dense evaluation.
pub fn check_mk_c<S: ProbMetric>(
    space: &S,
    points: &[S::Point],
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
) -> Result<ContractionReport, ContractionError> {
    check_pairs(space, points, f, m, k, Kind::C)
}

/// Verifies the scaling condition for orbit pairs `(fᵃx, fᵇy)`, each pair
/// taken from `pairs`, given `orbit_x`, `orbit_y` long enough for `m` more
/// steps.
fn require_b_on<S: ProbMetric>(
    space: &S,
    orbit_x: &[S::Point],
    orbit_y: &[S::Point],
    m: usize,
    k: f64,
    pairs: impl Iterator<Item = (usize, usize)>,
) -> Result<(), ContractionError> {
    for (a, b) in pairs {
        let f0 = space.ddf(&orbit_x[a], &orbit_y[b]);
        let ok = (1..=m).any(|i| {
            let fi = space.ddf(&orbit_x[a + i], &orbit_y[b + i]);
            b_condition(&f0, &fi, pow_int(k, i)).is_none()
        });
        if !ok {
            return Err(ContractionError::NotContractive(a, b));
        }
    }
    Ok(())
}

/// `I = {i : F_{fⁱp,fⁱq}(t) ≥ F_{p,q}(t/kⁱ) ∀t > 0}` on `[0, n)`.
///
/// The scaling contraction is re-verified on the orbit pairs
/// `(fʲp, fʲq)`, `j < n`; a failure is reported as
/// [`ContractionError::NotContractive`]. Always contains 0.
pub fn contraction_index_set<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
    p: &S::Point,
    q: &S::Point,
    n: usize,
) -> Result<IndexSet, ContractionError> {
    validate_mk(m, k)?;
    if n == 0 {
        return Err(ContractionError::EmptyWindow);
    }
    let op = orbit(f, p, n - 1 + m);
    let oq = orbit(f, q, n - 1 + m);
    require_b_on(space, &op, &oq, m, k, (0..n).map(|j| (j, j)))?;
    let f0 = space.ddf(p, q);
    let members = (0..n)
        .filter(|&i| b_condition(&f0, &space.ddf(&op[i], &oq[i]), pow_int(k, i)).is_none())
        .collect();
    Ok(IndexSet::new(n, members).expect("members lie in the window"))
}

/// Displacement profile of `p`: the function `F` with
/// `F(t/(1−k)) = min_{1≤i≤m} F_{fⁱp,p}(t)` and the index set
/// `I = {i : F_{fⁱp,p} ≥ F}` on `[0, n)`.
///
/// The scaling contraction is re-verified on all orbit pairs
/// `(fᵃp, fᵇp)`, `a < b < n`. `I` always contains 0 and `1..=m`.
pub fn displacement_profile<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    m: usize,
    k: f64,
    p: &S::Point,
    n: usize,
) -> Result<(Ddf, IndexSet), ContractionError> {
    validate_mk(m, k)?;
    if n == 0 {
        return Err(ContractionError::EmptyWindow);
    }
    let op = orbit(f, p, n.max(m + 1) - 1 + m);
    require_b_on(
        space,
        &op,
        &op,
        m,
        k,
        (0..n).flat_map(|b| (0..b).map(move |a| (a, b))),
    )?;
    let profile = displacement_ddf(space, &op, m, k);
    let members = (0..n)
        .filter(|&i| profile.le_with(&space.ddf(&op[i], p), crate::ddf::Slack::EXACT))
        .collect();
    Ok((profile, IndexSet::new(n, members).expect("members lie in the window")))
}

pub(crate) fn displacement_ddf<S: ProbMetric>(
    space: &S,
    orbit: &[S::Point],
    m: usize,
    k: f64,
) -> Ddf {
    let min = (1..=m)
        .map(|i| space.ddf(&orbit[i], &orbit[0]))
        .reduce(|a, b| a.min(&b))
        .expect("m >= 1");
    compress(&min, 1.0 - k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::espace::{AffineMap, EPoint, ESpace, Euclidean, ProbSpace};
    use crate::pm_space::{FinitePmSpace, TableMap};
    use alloc::string::String;
    use alloc::vec;

    fn line(points: Vec<Vec<f64>>) -> ESpace<Euclidean> {
        let n = points[0].len();
        ESpace::new(
            ProbSpace::uniform(n).unwrap(),
            Euclidean::new(1).unwrap(),
            points
                .into_iter()
                .map(|c| EPoint::new(c.into_iter().map(|x| vec![x]).collect()))
                .collect(),
        )
        .unwrap()
    }

    fn half() -> AffineMap {
        AffineMap::scale(0.5, vec![0.0]).unwrap()
    }

    #[test]
    fn parameter_validation() {
        let s = line(vec![vec![0.0, 0.0]]);
        let pts = s.points().to_vec();
        assert_eq!(check_mk_b(&s, &pts, &half(), 0, 0.5), Err(ContractionError::ZeroM));
        assert_eq!(
            check_mk_c(&s, &pts, &half(), 1, 1.0),
            Err(ContractionError::InvalidK(1.0))
        );
    }

    #[test]
    fn constant_map_passes_both_checks() {
        let s = line(vec![vec![0.0, 0.0], vec![1.0, 3.0], vec![-2.0, 0.5]]);
        let pts = s.points().to_vec();
        let c = |_: &EPoint<Vec<f64>>| EPoint::new(vec![vec![7.0]; 2]);
        for m in 1..=3 {
            assert!(check_mk_b(&s, &pts, &c, m, 0.3).unwrap().passed());
            let r = check_mk_c(&s, &pts, &c, m, 0.3).unwrap();
            assert!(r.passed() && r.dense_agrees());
        }
    }

    #[test]
    fn identity_is_not_a_scaling_contraction() {
        let s = line(vec![vec![0.0, 0.0], vec![1.0, 3.0]]);
        let pts = s.points().to_vec();
        let id = |p: &EPoint<Vec<f64>>| p.clone();
        let r = check_mk_b(&s, &pts, &id, 1, 0.5).unwrap();
        assert!(!r.passed());
        let f = Ddf::new(vec![1.0, 3.0], vec![0.5, 1.0]).unwrap();
        let t = r.pairs[0].counter.unwrap();
        assert!(f.value(0.5 * t) < f.value(t));
        assert!(f.value(3.0) < f.value(6.0));
        assert_eq!(b_condition(&f, &f, 0.5), Some(t));
    }

    #[test]
    fn halving_is_an_exact_scaling_contraction() {
        let s = line(vec![vec![0.0, 0.0], vec![1.0, 3.0], vec![0.25, -1.5]]);
        let pts = s.points().to_vec();
        let r = check_mk_b(&s, &pts, &half(), 1, 0.5).unwrap();
        assert!(r.passed());
        assert!(r.pairs.iter().all(|c| c.witness == Some(1)));
        // equality: the condition also holds in the reverse direction
        let f = s.ddf(&pts[0], &pts[1]);
        let g = s.ddf(&half().apply(&pts[0]), &half().apply(&pts[1]));
        assert_eq!(compress(&g, 0.5), f);
    }

    #[test]
    fn halving_threshold_example() {
        let f = Ddf::new(vec![1.0, 3.0], vec![0.5, 1.0]).unwrap();
        let g = f.scale_arg(0.5).unwrap();
        assert_eq!(c_condition(&f, &g, 0.5), None);
        assert_eq!(c_condition_dense(&f, &g, 0.5), None);
        for t in [1.001, 1.5, 2.0, 3.0, 10.0] {
            assert!(f.value(t) > 1.0 - t);
            assert!(f.value(t) > 1.0 - t / 2.0);
        }
        assert!(!(f.value(1.0) > 0.0));
    }

    #[test]
    fn scaling_does_not_imply_threshold() {
        let f = Ddf::new(vec![0.2, 0.9], vec![0.5, 1.0]).unwrap();
        let g = f.scale_arg(0.5).unwrap();
        assert_eq!(b_condition(&f, &g, 0.5), None);
        let t = c_condition(&f, &g, 0.5).expect("threshold condition fails");
        assert!(f.value(t) > 1.0 - t);
        assert!(!(g.value(0.5 * t) > 1.0 - 0.5 * t));
        assert!(c_condition_dense(&f, &g, 0.5).is_some());
    }

    #[test]
    fn threshold_with_two_iterates() {
        // fails at i = 1, holds at i = 2
        let f = Ddf::step(0.8).unwrap();
        let f1 = Ddf::step(0.7).unwrap();
        let f2 = Ddf::step(0.1).unwrap();
        assert!(c_condition(&f, &f1, 0.5).is_some());
        assert_eq!(c_condition(&f, &f2, 0.25), None);
        assert_eq!(c_condition_dense(&f, &f2, 0.25), None);
    }

    #[test]
    fn table_map_on_finite_space() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| String::from(*s)).collect();
        let space = FinitePmSpace::from_fn(labels, |i, j| {
            Ddf::step((i + j) as f64).unwrap()
        })
        .unwrap();
        let f = TableMap::new(vec![0, 0, 0]).unwrap();
        let pts = [0, 1, 2];
        assert!(check_mk_b(&space, &pts, &f, 1, 0.5).unwrap().passed());
        let swap = TableMap::new(vec![1, 0, 2]).unwrap();
        assert!(!check_mk_b(&space, &pts, &swap, 2, 0.5).unwrap().passed());
    }

    #[test]
    fn halving_index_sets_are_full() {
        let s = line(vec![vec![0.0, 0.0], vec![1.0, 3.0]]);
        let (p, q) = (&s.points()[1], &s.points()[0]);
        let i = contraction_index_set(&s, &half(), 1, 0.5, p, q, 20).unwrap();
        assert_eq!(i.members(), (0..20).collect::<Vec<_>>().as_slice());
        let (profile, i) = displacement_profile(&s, &half(), 1, 0.5, p, 30).unwrap();
        assert_eq!(profile, Ddf::new(vec![1.0, 3.0], vec![0.5, 1.0]).unwrap());
        assert_eq!(i.len(), 30);
        let (_, at_fixed) = displacement_profile(&s, &half(), 2, 0.5, q, 10).unwrap();
        assert_eq!(at_fixed.len(), 10);
    }

    #[test]
    fn index_sets_recheck_the_precondition() {
        let s = line(vec![vec![0.0, 0.0], vec![1.0, 3.0]]);
        let id = |p: &EPoint<Vec<f64>>| p.clone();
        let (p, q) = (&s.points()[1], &s.points()[0]);
        assert_eq!(
            contraction_index_set(&s, &id, 2, 0.5, p, q, 5),
            Err(ContractionError::NotContractive(0, 0))
        );
        assert_eq!(
            displacement_profile(&s, &half(), 1, 0.5, p, 0).map(|_| ()),
            Err(ContractionError::EmptyWindow)
        );
    }

    #[test]
    fn alternating_contraction_has_two_syndetic_index_set() {
        // in the plane: (x, y) ↦ (y, x/4) contracts by 1/4 every second step
        let s = ESpace::new(
            ProbSpace::uniform(2).unwrap(),
            Euclidean::new(2).unwrap(),
            vec![
                EPoint::new(vec![vec![0.0, 1.0], vec![0.0, 0.5]]),
                EPoint::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]),
            ],
        )
        .unwrap();
        let f = AffineMap::linear(vec![vec![0.0, 1.0], vec![0.25, 0.0]]).unwrap();
        let (p, q) = (&s.points()[0], &s.points()[1]);
        assert!(!check_mk_b(&s, s.points(), &f, 1, 0.5).unwrap().passed());
        assert!(check_mk_b(&s, s.points(), &f, 2, 0.5).unwrap().passed());
        let i = contraction_index_set(&s, &f, 2, 0.5, p, q, 20).unwrap();
        assert!(i.members().iter().all(|&x| x % 2 == 0));
        assert_eq!(i.len(), 10);
        assert!(crate::combinatorics::is_m_syndetic(&i, 2).unwrap());
        let (_, d) = displacement_profile(&s, &f, 2, 0.5, p, 60).unwrap();
        assert!(crate::combinatorics::is_m_syndetic(&d, 2).unwrap());
    }
}
