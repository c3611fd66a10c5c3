//! Finite probabilistic (semi-)metric spaces and Menger-axiom verification.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ddf::{Ddf, Slack};
use crate::error::SpaceError;
use crate::tnorm::TNorm;

/// A set of points with a distance distribution function for every pair.
///
/// Implemented by finite tables ([`FinitePmSpace`]) and by E-spaces, whose
/// points are produced on demand while iterating a map.
pub trait ProbMetric {
    type Point: Clone;

    /// `F_{p,q}`.
    fn ddf(&self, p: &Self::Point, q: &Self::Point) -> Ddf;

    /// A finite identifier for exact revisit detection, when the space has one.
    fn point_id(&self, _p: &Self::Point) -> Option<usize> {
        None
    }

    /// Points are identified when their distance is `ε₀` (PM1).
    fn same_point(&self, p: &Self::Point, q: &Self::Point) -> bool {
        match (self.point_id(p), self.point_id(q)) {
            (Some(a), Some(b)) => a == b,
            _ => self.ddf(p, q).is_epsilon0(),
        }
    }
}

/// A self-map `f : S → S`.
pub trait SelfMap<P> {
    fn apply(&self, p: &P) -> P;
}

impl<P, F: Fn(&P) -> P> SelfMap<P> for F {
    fn apply(&self, p: &P) -> P {
        self(p)
    }
}

/// `[p, f(p), …, fⁿ(p)]`.
pub fn orbit<P: Clone>(f: &impl SelfMap<P>, p: &P, n: usize) -> Vec<P> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.clone());
    for i in 0..n {
        let next = f.apply(&out[i]);
        out.push(next);
    }
    out
}

/// Self-map of a finite space given by its table of images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    image: Vec<usize>,
}

impl TableMap {
    pub fn new(image: Vec<usize>) -> Result<Self, SpaceError> {
        let n = image.len();
        if let Some((point, &image)) = image.iter().enumerate().find(|(_, &j)| j >= n) {
            return Err(SpaceError::MapOutOfRange { point, image });
        }
        Ok(TableMap { image })
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }
}

impl SelfMap<usize> for TableMap {
    fn apply(&self, p: &usize) -> usize {
        self.image[*p]
    }
}

/// Finite point set with a symmetric table of distance distribution functions.
///
/// The diagonal is `ε₀` implicitly and the table is stored once per unordered
/// pair, so PM2 and the forward half of PM1 hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmSpace {
    labels: Vec<String>,
    // upper triangle, row-major
    table: Vec<Ddf>,
    epsilon0: Ddf,
}

/// One failing instance of `F_{p,r} ≥ τ_T(F_{p,q}, F_{q,r})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MengerViolation {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// A point `x` with `F_{p,r}(x) < τ_T(F_{p,q}, F_{q,r})(x)`.
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MengerReport {
    pub triples_checked: usize,
    pub violations: Vec<MengerViolation>,
}

impl MengerReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FinitePmSpace {
    /// Builds a space from labelled pair entries; each unordered pair must
    /// appear (in either orientation).
    pub fn build<I>(labels: Vec<String>, entries: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = (String, String, Ddf)>,
    {
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(SpaceError::DuplicatePoint(label.clone()));
            }
        }
        let n = labels.len();
        let mut slots: Vec<Option<Ddf>> = alloc::vec![None; n * n.saturating_sub(1) / 2];
        let find = |label: &str| {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
        };
        for (a, b, ddf) in entries {
            let (i, j) = (find(&a)?, find(&b)?);
            if i == j {
                return Err(SpaceError::SelfPair(a));
            }
            let slot = &mut slots[tri_index(n, i.min(j), i.max(j))];
            match slot {
                Some(existing) if *existing != ddf => {
                    return Err(SpaceError::ConflictingEntry(a, b));
                }
                _ => *slot = Some(ddf),
            }
        }
        let mut table = Vec::with_capacity(slots.len());
        for i in 0..n {
            for j in i + 1..n {
                match slots[tri_index(n, i, j)].take() {
                    Some(d) => table.push(d),
                    None => {
                        return Err(SpaceError::MissingPair(
                            labels[i].clone(),
                            labels[j].clone(),
                        ))
                    }
                }
            }
        }
        Self::from_table(labels, table)
    }

    /// Builds a space from a function giving `F_{i,j}` for `i < j`.
    pub fn from_fn(
        labels: Vec<String>,
        mut ddf: impl FnMut(usize, usize) -> Ddf,
    ) -> Result<Self, SpaceError> {
        let n = labels.len();
        let mut table = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                table.push(ddf(i, j));
            }
        }
        Self::from_table(labels, table)
    }

    fn from_table(labels: Vec<String>, table: Vec<Ddf>) -> Result<Self, SpaceError> {
        let n = labels.len();
        for i in 0..n {
            for j in i + 1..n {
                if table[tri_index(n, i, j)].is_epsilon0() {
                    return Err(SpaceError::Pm1Violation(
                        labels[i].clone(),
                        labels[j].clone(),
                    ));
                }
            }
        }
        Ok(FinitePmSpace {
            labels,
            table,
            epsilon0: Ddf::epsilon0(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `F_{i,j}`; the diagonal is `ε₀`. Panics on out-of-range indices.
    pub fn get(&self, i: usize, j: usize) -> &Ddf {
        let n = self.len();
        assert!(i < n && j < n, "point index out of range");
        match i.cmp(&j) {
            core::cmp::Ordering::Equal => &self.epsilon0,
            core::cmp::Ordering::Less => &self.table[tri_index(n, i, j)],
            core::cmp::Ordering::Greater => &self.table[tri_index(n, j, i)],
        }
    }

    /// Verifies PM3 for `τ_T` on every ordered triple of distinct points.
    ///
    /// Uses the default [`Slack`] so that values produced by different
    /// summation orders are not reported; see [`Self::check_menger_with`].
    pub fn check_menger(&self, t: TNorm) -> MengerReport {
        self.check_menger_with(t, Slack::default())
    }

    pub fn check_menger_with(&self, t: TNorm, slack: Slack) -> MengerReport {
        let n = self.len();
        let mut report = MengerReport::default();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if p == q || q == r || p == r {
                        continue;
                    }
                    report.triples_checked += 1;
                    let bound = t.convolve(self.get(p, q), self.get(q, r));
                    if let Some(witness) = bound.exceedance_with(self.get(p, r), slack) {
                        report.violations.push(MengerViolation { p, q, r, witness });
                    }
                }
            }
        }
        report
    }

    /// Strong neighborhood `N_p(t) = {q : F_{p,q}(t) > 1 − t}`.
    pub fn strong_neighborhood(&self, p: usize, t: f64) -> Result<Vec<usize>, SpaceError> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(SpaceError::InvalidRadius(t));
        }
        if p >= self.len() {
            return Err(SpaceError::IndexOutOfRange(p));
        }
        Ok((0..self.len())
            .filter(|&q| self.get(p, q).value(t) > 1.0 - t)
            .collect())
    }
}

impl ProbMetric for FinitePmSpace {
    type Point = usize;

    fn ddf(&self, p: &usize, q: &usize) -> Ddf {
        self.get(*p, *q).clone()
    }

    fn point_id(&self, p: &usize) -> Option<usize> {
        Some(*p)
    }
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}
