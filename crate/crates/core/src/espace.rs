//! E-spaces: random points over a finite probability space with values in a
//! metric space, and the Ky Fan distance they induce.

use alloc::format;
use alloc::vec::Vec;

use crate::contraction::{c_condition, c_condition_dense};
use crate::ddf::Ddf;
use crate::error::{ContractionError, ESpaceError, SpaceError};
use crate::pm_space::{FinitePmSpace, ProbMetric, SelfMap};
use crate::pow_int;

/// Largest accepted deviation of the outcome probabilities' sum from 1.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Finite probability space: outcome `i` has probability `probs[i] > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSpace {
    probs: Vec<f64>,
}

impl ProbSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self, ESpaceError> {
        if probs.is_empty() {
            return Err(ESpaceError::NoOutcomes);
        }
        if let Some(index) = probs.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(ESpaceError::NonPositiveProbability { index });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(ESpaceError::ProbabilitySum(sum));
        }
        Ok(ProbSpace { probs })
    }

    /// `n` equally likely outcomes.
    pub fn uniform(n: usize) -> Result<Self, ESpaceError> {
        Self::new(alloc::vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `F(u) = P{ω : d(ω) < u}` for per-outcome distances `d`.
    ///
    /// Outcomes are accumulated in order of distance, ties broken by outcome
    /// index, so two distance vectors with the same ordering produce
    /// bit-identical values. The final value is exactly 1.
    pub fn distribution_of(&self, distances: &[f64]) -> Ddf {
        debug_assert_eq!(distances.len(), self.probs.len());
        let mut order: Vec<usize> = (0..distances.len()).collect();
        order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]));
        let mut steps = Vec::with_capacity(order.len());
        let mut acc = 0.0;
        for (pos, &w) in order.iter().enumerate() {
            acc += self.probs[w];
            let last_of_tie = order
                .get(pos + 1)
                .is_none_or(|&next| distances[next] != distances[w]);
            if last_of_tie {
                let value = if pos + 1 == order.len() { 1.0 } else { acc.min(1.0) };
                steps.push((distances[w], value));
            }
        }
        Ddf::from_steps(steps)
    }
}

/// The metric space in which random points take their values.
pub trait BaseMetric {
    type Elem: Clone + PartialEq + core::fmt::Debug;

    fn validate(&self, e: &Self::Elem) -> Result<(), ESpaceError>;

    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
}

/// `ℝᵈ` with the Euclidean metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self, ESpaceError> {
        if dim == 0 {
            return Err(ESpaceError::ZeroDimension);
        }
        Ok(Euclidean { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl BaseMetric for Euclidean {
    type Elem = Vec<f64>;

    fn validate(&self, e: &Vec<f64>) -> Result<(), ESpaceError> {
        if e.len() != self.dim {
            return Err(ESpaceError::Dimension {
                expected: self.dim,
                found: e.len(),
            });
        }
        if e.iter().any(|x| !x.is_finite()) {
            return Err(ESpaceError::NonFiniteCoordinate);
        }
        Ok(())
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        euclidean_norm(a.iter().zip(b).map(|(x, y)| x - y))
    }
}

pub(crate) fn euclidean_norm(diffs: impl Iterator<Item = f64>) -> f64 {
    let mut it = diffs.peekable();
    let first = it.next().unwrap_or(0.0);
    if it.peek().is_none() {
        return first.abs();
    }
    let sq: f64 = it.fold(first * first, |s, d| s + d * d);
    libm::sqrt(sq)
}

/// A finite metric space given by its distance matrix; elements are indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    dist: Vec<Vec<f64>>,
}

impl MetricTable {
    /// Validates squareness, non-negativity, symmetry and a zero diagonal.
    /// The triangle inequality is not required.
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self, ESpaceError> {
        let n = dist.len();
        if dist.iter().any(|row| row.len() != n) {
            return Err(ESpaceError::TableNotSquare);
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(ESpaceError::TableDiagonal(i));
            }
            for j in 0..n {
                let d = dist[i][j];
                if !(d.is_finite() && d >= 0.0) {
                    return Err(ESpaceError::TableEntry(i, j));
                }
                if d != dist[j][i] {
                    return Err(ESpaceError::TableAsymmetric(i, j));
                }
            }
        }
        Ok(MetricTable { dist })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.dist
    }
}

impl BaseMetric for MetricTable {
    type Elem = usize;

    fn validate(&self, e: &usize) -> Result<(), ESpaceError> {
        if *e >= self.dist.len() {
            return Err(ESpaceError::ElementOutOfRange {
                index: *e,
                len: self.dist.len(),
            });
        }
        Ok(())
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.dist[*a][*b]
    }
}

/// A random point: one base element per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct EPoint<E> {
    pub coords: Vec<E>,
}

impl<E> EPoint<E> {
    pub fn new(coords: Vec<E>) -> Self {
        EPoint { coords }
    }
}

/// An E-space instance with a working set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct ESpace<B: BaseMetric> {
    prob: ProbSpace,
    base: B,
    points: Vec<EPoint<B::Elem>>,
}

impl<B: BaseMetric> ESpace<B> {
    pub fn new(prob: ProbSpace, base: B, points: Vec<EPoint<B::Elem>>) -> Result<Self, ESpaceError> {
        let mut space = ESpace {
            prob,
            base,
            points: Vec::with_capacity(points.len()),
        };
        for p in points {
            space.push(p)?;
        }
        Ok(space)
    }

    pub fn prob(&self) -> &ProbSpace {
        &self.prob
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn points(&self) -> &[EPoint<B::Elem>] {
        &self.points
    }

    /// Adds a point to the working set and returns its index.
    pub fn push(&mut self, p: EPoint<B::Elem>) -> Result<usize, ESpaceError> {
        self.validate(&p)?;
        self.points.push(p);
        Ok(self.points.len() - 1)
    }

    pub fn validate(&self, p: &EPoint<B::Elem>) -> Result<(), ESpaceError> {
        if p.coords.len() != self.prob.len() {
            return Err(ESpaceError::OutcomeCount {
                expected: self.prob.len(),
                found: p.coords.len(),
            });
        }
        p.coords.iter().try_for_each(|e| self.base.validate(e))
    }

    /// `F_{p,q}(u) = P{ω : d(p(ω), q(ω)) < u}`.
    pub fn espace_ddf(&self, p: &EPoint<B::Elem>, q: &EPoint<B::Elem>) -> Result<Ddf, ESpaceError> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(self.ddf_unchecked(p, q))
    }

    fn ddf_unchecked(&self, p: &EPoint<B::Elem>, q: &EPoint<B::Elem>) -> Ddf {
        let distances: Vec<f64> = p
            .coords
            .iter()
            .zip(&q.coords)
            .map(|(a, b)| self.base.distance(a, b))
            .collect();
        self.prob.distribution_of(&distances)
    }

    /// The finite space over the working set. Points at distance `ε₀` from an
    /// earlier point are identified with it; `representative[i]` is the index
    /// in the returned space of working-set point `i`.
    pub fn to_pm_space(&self) -> Result<Collapsed, SpaceError> {
        let mut kept: Vec<usize> = Vec::new();
        let mut representative = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            match kept
                .iter()
                .position(|&j| self.ddf_unchecked(&self.points[j], p).is_epsilon0())
            {
                Some(pos) => representative.push(pos),
                None => {
                    representative.push(kept.len());
                    kept.push(i);
                }
            }
        }
        let labels = kept.iter().map(|i| format!("x{i}")).collect();
        let space = FinitePmSpace::from_fn(labels, |a, b| {
            self.ddf_unchecked(&self.points[kept[a]], &self.points[kept[b]])
        })?;
        Ok(Collapsed {
            space,
            representative,
        })
    }

    /// Checks, for each pair of working-set indices, that a Ky Fan
    /// contraction `d(fⁱp, fⁱq) ≤ kⁱ·d(p, q)` at some `i ≤ m` yields the
    /// threshold contraction condition at that `i`.
    pub fn bridge_check(
        &self,
        f: &impl SelfMap<EPoint<B::Elem>>,
        m: usize,
        k: f64,
        pairs: &[(usize, usize)],
    ) -> Result<BridgeReport, ContractionError> {
        crate::contraction::validate_mk(m, k)?;
        let mut entries = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (mut p, mut q) = (self.points[a].clone(), self.points[b].clone());
            let f0 = self.ddf_unchecked(&p, &q);
            let d0 = ky_fan(&f0);
            let mut entry = BridgeEntry {
                p: a,
                q: b,
                ky_witness: None,
                c_witness: None,
                implication_holds: true,
            };
            for i in 1..=m {
                p = f.apply(&p);
                q = f.apply(&q);
                let fi = self.ddf_unchecked(&p, &q);
                let ki = pow_int(k, i);
                let c_holds = c_condition(&f0, &fi, ki).is_none();
                debug_assert_eq!(c_holds, c_condition_dense(&f0, &fi, ki).is_none());
                if c_holds && entry.c_witness.is_none() {
                    entry.c_witness = Some(i);
                }
                if entry.ky_witness.is_none() && ky_fan(&fi) <= ki * d0 {
                    entry.ky_witness = Some(i);
                    entry.implication_holds = c_holds;
                }
            }
            entries.push(entry);
        }
        Ok(BridgeReport { entries })
    }
}

impl<B: BaseMetric> ProbMetric for ESpace<B> {
    type Point = EPoint<B::Elem>;

    fn ddf(&self, p: &Self::Point, q: &Self::Point) -> Ddf {
        debug_assert!(self.validate(p).is_ok() && self.validate(q).is_ok());
        self.ddf_unchecked(p, q)
    }
}

/// Result of [`ESpace::to_pm_space`].
#[derive(Debug, Clone, PartialEq)]
pub struct Collapsed {
    pub space: FinitePmSpace,
    pub representative: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeEntry {
    pub p: usize,
    pub q: usize,
    /// Smallest `i ≤ m` with `d(fⁱp, fⁱq) ≤ kⁱ·d(p, q)`.
    pub ky_witness: Option<usize>,
    /// Smallest `i ≤ m` at which the threshold contraction condition holds.
    pub c_witness: Option<usize>,
    /// The condition holds at `ky_witness` (vacuously true without one).
    pub implication_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    pub entries: Vec<BridgeEntry>,
}

impl BridgeReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.implication_holds)
    }
}

/// Ky Fan value `sup{u ≥ 0 : F(u) < 1 − u}`; 0 for `ε₀`.
pub fn ky_fan(f: &Ddf) -> f64 {
    f.threshold_boundary(1.0)
}

/// `x ↦ A·x + b` applied to every outcome of a point in `ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    // row-major
    matrix: Vec<f64>,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self, ESpaceError> {
        let dim = offset.len();
        if dim == 0 || matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(ESpaceError::MapShape { dim });
        }
        let flat: Vec<f64> = matrix.into_iter().flatten().collect();
        if flat.iter().chain(&offset).any(|x| !x.is_finite()) {
            return Err(ESpaceError::NonFiniteCoordinate);
        }
        Ok(AffineMap {
            dim,
            matrix: flat,
            offset,
        })
    }

    /// `x ↦ s·x + b`.
    pub fn scale(s: f64, offset: Vec<f64>) -> Result<Self, ESpaceError> {
        let dim = offset.len();
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { s } else { 0.0 }).collect())
            .collect();
        Self::new(matrix, offset)
    }

    pub fn linear(matrix: Vec<Vec<f64>>) -> Result<Self, ESpaceError> {
        let dim = matrix.len();
        Self::new(matrix, alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks(self.dim)
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn is_linear(&self) -> bool {
        self.offset.iter().all(|&b| b == 0.0)
    }

    /// The map applied to a single element of `ℝᵈ`.
    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        self.matrix_rows()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(x).fold(0.0, |s, (a, x)| s + a * x) + b)
            .collect()
    }
}

impl SelfMap<EPoint<Vec<f64>>> for AffineMap {
    fn apply(&self, p: &EPoint<Vec<f64>>) -> EPoint<Vec<f64>> {
        EPoint::new(p.coords.iter().map(|x| self.apply_vec(x)).collect())
    }
}
