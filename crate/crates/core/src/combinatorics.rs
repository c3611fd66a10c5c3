//! Index sets of naturals on finite windows: syndeticity, upper Banach density,
//! and a finite search for dense sets with pairwise common witnesses in a
//! relation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::contraction::{b_condition, validate_mk};
use crate::ddf::Ddf;
use crate::error::CombinatoricsError;
use crate::pm_space::{orbit, ProbMetric, SelfMap};
use crate::pow_int;

/// A non-negative rational `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Upper Banach density: exact for periodic sets, estimated otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Exact(Ratio),
    /// `lower` is the density of the whole window and `upper` the truncated
    /// inf–sup (see [`upper_banach_density`]). Both estimate the density of
    /// the infinite set; neither is a guaranteed bound.
    Estimate { lower: f64, upper: f64 },
}

impl Density {
    /// The exact value, or the upper estimate.
    pub fn upper(&self) -> f64 {
        match *self {
            Density::Exact(r) => r.to_f64(),
            Density::Estimate { upper, .. } => upper,
        }
    }
}

/// Eventually periodic description of a subset of `ℕ`: below `start` the set
/// is `pre`; from `start` on, `i` is a member iff `i mod period ∈ residues`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Periodic {
    pre: Vec<usize>,
    period: usize,
    residues: Vec<usize>,
    start: usize,
}

impl Periodic {
    /// `start` defaults to one past the largest pre-period member, or 0.
    pub fn new(
        mut pre: Vec<usize>,
        period: usize,
        mut residues: Vec<usize>,
        start: Option<usize>,
    ) -> Result<Self, CombinatoricsError> {
        if period == 0 {
            return Err(CombinatoricsError::ZeroPeriod);
        }
        pre.sort_unstable();
        pre.dedup();
        residues.sort_unstable();
        residues.dedup();
        if let Some(&residue) = residues.iter().find(|&&r| r >= period) {
            return Err(CombinatoricsError::ResidueOutOfRange { residue, period });
        }
        let start = start.unwrap_or_else(|| pre.last().map_or(0, |&x| x + 1));
        if let Some(&member) = pre.iter().find(|&&x| x >= start) {
            return Err(CombinatoricsError::PreperiodOutOfRange { member, start });
        }
        Ok(Periodic {
            pre,
            period,
            residues,
            start,
        })
    }

    pub fn pre(&self) -> &[usize] {
        &self.pre
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn residues(&self) -> &[usize] {
        &self.residues
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        if i < self.start {
            self.pre.binary_search(&i).is_ok()
        } else {
            self.residues.binary_search(&(i % self.period)).is_ok()
        }
    }

    /// `d* = |residues| / period`; the pre-period does not matter.
    pub fn density(&self) -> Ratio {
        Ratio::new(self.residues.len() as u64, self.period as u64)
    }
}

/// A subset of `ℕ` seen through the window `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    window: usize,
    members: Vec<usize>,
    periodic: Option<Periodic>,
}

impl IndexSet {
    /// Members are sorted and deduplicated.
    pub fn new(window: usize, mut members: Vec<usize>) -> Result<Self, CombinatoricsError> {
        if window == 0 {
            return Err(CombinatoricsError::EmptyWindow);
        }
        members.sort_unstable();
        members.dedup();
        if let Some(&member) = members.last().filter(|&&x| x >= window) {
            return Err(CombinatoricsError::MemberOutOfRange { member, window });
        }
        Ok(IndexSet {
            window,
            members,
            periodic: None,
        })
    }

    pub fn full(window: usize) -> Result<Self, CombinatoricsError> {
        Self::new(window, (0..window).collect())
    }

    /// The window view of a periodic set.
    pub fn from_periodic(window: usize, periodic: Periodic) -> Result<Self, CombinatoricsError> {
        let members = (0..window).filter(|&i| periodic.contains(i)).collect();
        let mut set = Self::new(window, members)?;
        set.periodic = Some(periodic);
        Ok(set)
    }

    /// Explicit members together with a periodic description they must match.
    pub fn with_periodic(
        window: usize,
        members: Vec<usize>,
        periodic: Periodic,
    ) -> Result<Self, CombinatoricsError> {
        let mut set = Self::new(window, members)?;
        if let Some(i) = (0..window).find(|&i| set.contains(i) != periodic.contains(i)) {
            return Err(CombinatoricsError::PeriodicMismatch(i));
        }
        set.periodic = Some(periodic);
        Ok(set)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn periodic(&self) -> Option<&Periodic> {
        self.periodic.as_ref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Union on the common window; the periodic description is dropped.
    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let window = self.window.min(other.window);
        let members = self
            .members
            .iter()
            .chain(&other.members)
            .copied()
            .filter(|&i| i < window)
            .collect();
        IndexSet::new(window, members).expect("window is positive")
    }

    fn indicator(&self) -> Vec<bool> {
        let mut ind = vec![false; self.window];
        for &i in &self.members {
            ind[i] = true;
        }
        ind
    }
}

/// `I` meets every window `[k, k+m) ⊆ [0, n)`.
pub fn is_m_syndetic(set: &IndexSet, m: usize) -> Result<bool, CombinatoricsError> {
    if m == 0 {
        return Err(CombinatoricsError::ZeroM);
    }
    if m > set.window {
        return Err(CombinatoricsError::WindowTooShort {
            m,
            window: set.window,
        });
    }
    let mut prev: isize = -1;
    for &i in set.members.iter().chain(core::iter::once(&set.window)) {
        if i as isize - prev > m as isize {
            return Ok(false);
        }
        prev = i as isize;
    }
    Ok(true)
}

/// Largest number of members in a window of length `len` inside `[0, n)`.
fn max_window_count(prefix: &[usize], len: usize) -> usize {
    (0..prefix.len() - len)
        .map(|k| prefix[k + len] - prefix[k])
        .max()
        .unwrap_or(0)
}

/// Truncated inf–sup `min_L max_k |I ∩ [k, k+L)| / L` over window lengths
/// `1 ≤ L ≤ max(1, n/2)`, so that every length is seen at least `n/2 + 1`
/// times.
pub fn window_upper_density(set: &IndexSet) -> f64 {
    let mut prefix = Vec::with_capacity(set.window + 1);
    prefix.push(0);
    for b in set.indicator() {
        prefix.push(prefix.last().unwrap() + b as usize);
    }
    (1..=(set.window / 2).max(1))
        .map(|len| max_window_count(&prefix, len) as f64 / len as f64)
        .fold(f64::INFINITY, f64::min)
}

/// `d*(I) = inf_L sup_k |I ∩ [k, k+L)| / L`.
///
/// Exact when the set carries a periodic description, otherwise estimated
/// from the window.
pub fn upper_banach_density(set: &IndexSet) -> Density {
    match &set.periodic {
        Some(p) => Density::Exact(p.density()),
        None => Density::Estimate {
            lower: set.len() as f64 / set.window as f64,
            upper: window_upper_density(set),
        },
    }
}

/// A relation on `[0, n) × [0, n)` stored as row and column bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRelation {
    window: usize,
    words: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
}

impl FiniteRelation {
    pub fn empty(window: usize) -> Result<Self, CombinatoricsError> {
        if window == 0 {
            return Err(CombinatoricsError::EmptyWindow);
        }
        let words = window.div_ceil(64);
        Ok(FiniteRelation {
            window,
            words,
            rows: vec![0; window * words],
            cols: vec![0; window * words],
        })
    }

    pub fn from_pairs(
        window: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CombinatoricsError> {
        let mut r = Self::empty(window)?;
        for (i, j) in pairs {
            r.insert(i, j)?;
        }
        Ok(r)
    }

    pub fn full(window: usize) -> Result<Self, CombinatoricsError> {
        Self::from_pairs(window, (0..window).flat_map(|i| (0..window).map(move |j| (i, j))))
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<(), CombinatoricsError> {
        if i >= self.window || j >= self.window {
            return Err(CombinatoricsError::PairOutOfRange {
                i,
                j,
                window: self.window,
            });
        }
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.cols[j * self.words + i / 64] |= 1 << (i % 64);
        Ok(())
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.window && j < self.window && self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.window).flat_map(move |i| {
            (0..self.window)
                .filter(move |&j| self.contains(i, j))
                .map(move |j| (i, j))
        })
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    /// `{i : (i, j) ∈ R}`.
    pub fn column(&self, j: usize) -> IndexSet {
        IndexSet::new(self.window, (0..self.window).filter(|&i| self.contains(i, j)).collect())
            .expect("window is positive")
    }

    /// `{j : (i, j) ∈ R}`.
    pub fn row(&self, i: usize) -> IndexSet {
        IndexSet::new(self.window, (0..self.window).filter(|&j| self.contains(i, j)).collect())
            .expect("window is positive")
    }

    fn col_bits(&self, j: usize) -> &[u64] {
        &self.cols[j * self.words..(j + 1) * self.words]
    }

    /// Smallest `k` with `(k, i) ∈ R` and `(k, j) ∈ R`.
    pub fn common_witness(&self, i: usize, j: usize) -> Option<usize> {
        self.col_bits(i)
            .iter()
            .zip(self.col_bits(j))
            .enumerate()
            .find_map(|(w, (a, b))| {
                let both = a & b;
                (both != 0).then(|| w * 64 + both.trailing_zeros() as usize)
            })
    }

    fn compatible(&self, i: usize, j: usize) -> bool {
        self.col_bits(i)
            .iter()
            .zip(self.col_bits(j))
            .any(|(a, b)| a & b != 0)
    }

    /// Hypotheses of the search: (i) the column `{i : (i, 0) ∈ R}` is
    /// `m`-syndetic, and (ii) for every `(i, j) ∈ R` the diagonal set
    /// `{k : (i+k, j+k) ∈ R}` is `m`-syndetic on the part of the window
    /// it can see. Diagonal views shorter than `m` are not constrained.
    pub fn check_hypotheses(&self, m: usize) -> Result<(), CombinatoricsError> {
        if m == 0 {
            return Err(CombinatoricsError::ZeroM);
        }
        if !is_m_syndetic(&self.column(0), m)? {
            return Err(CombinatoricsError::ColumnNotSyndetic);
        }
        let n = self.window;
        // diagonals j − i = d, cells (s, s + d) or (s − d, s)
        for d in -(n as isize - 1)..n as isize {
            let (i0, j0) = if d >= 0 { (0, d as usize) } else { ((-d) as usize, 0) };
            let len = n - i0.max(j0);
            let on: Vec<bool> = (0..len).map(|s| self.contains(i0 + s, j0 + s)).collect();
            if len < m {
                continue;
            }
            // covered[k]: the window [k, k+m) of the diagonal meets R
            let mut count = on[..m].iter().filter(|&&b| b).count();
            let mut covered = Vec::with_capacity(len - m + 1);
            covered.push(count > 0);
            for k in 1..=len - m {
                count = count + on[k + m - 1] as usize - on[k - 1] as usize;
                covered.push(count > 0);
            }
            // every window starting at or after s is covered
            let mut suffix_ok = true;
            for s in (0..len).rev() {
                if s + m <= len {
                    suffix_ok &= covered[s];
                }
                if on[s] && !suffix_ok {
                    return Err(CombinatoricsError::DiagonalNotSyndetic(i0 + s, j0 + s));
                }
            }
        }
        Ok(())
    }
}

/// `R = {(i, j) : F_{fⁱp,fʲp}(t) ≥ F(t/kʲ) ∀t > 0}` on `[0, n)`.
pub fn build_relation_r<S: ProbMetric>(
    space: &S,
    f: &impl SelfMap<S::Point>,
    p: &S::Point,
    profile: &Ddf,
    k: f64,
    n: usize,
) -> Result<FiniteRelation, CombinatoricsError> {
    validate_mk(1, k)?;
    let mut rel = FiniteRelation::empty(n)?;
    let points = orbit(f, p, n - 1);
    let powers: Vec<f64> = (0..n).map(|j| pow_int(k, j)).collect();
    for i in 0..n {
        for j in i..n {
            let d = space.ddf(&points[i], &points[j]);
            if b_condition(profile, &d, powers[j]).is_none() {
                rel.insert(i, j)?;
            }
            if i != j && b_condition(profile, &d, powers[i]).is_none() {
                rel.insert(j, i)?;
            }
        }
    }
    Ok(rel)
}

/// Output of [`dense_witness_search`]: the set, one common witness per pair
/// `i ≤ j` of members, and the set's window density estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseWitnessSet {
    pub set: IndexSet,
    pub witnesses: BTreeMap<(usize, usize), usize>,
    pub density: f64,
}

/// Result of [`verify_dense_witness_set`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub witnesses_ok: bool,
    pub density: f64,
    pub needed: f64,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.witnesses_ok && self.density >= self.needed
    }
}

/// Largest window size at which the exhaustive clique search is used.
pub const EXHAUSTIVE_WINDOW: usize = 24;

/// Finds `I ⊆ [0, n)` such that every `i, j ∈ I` have a common `k` with
/// `(k, i), (k, j) ∈ R`, with window density at least `1/(2m²)`.
///
/// Candidates are the sets `I_j = {i : L_{ij} ≠ ∅}`, `L_{ij} = {l : (l+j, i) ∈ R}`
/// for `j < 2m`, greedily thinned to pairwise compatible members, and the rows
/// of `R`, which are compatible through their own index. Windows up to
/// [`EXHAUSTIVE_WINDOW`] also try every maximal compatible set. Ties go to
/// the smallest index.
pub fn dense_witness_search(rel: &FiniteRelation, m: usize) -> Result<DenseWitnessSet, CombinatoricsError> {
    rel.check_hypotheses(m)?;
    let n = rel.window;
    let needed = 1.0 / (2 * m * m) as f64;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let consider = |best: &mut Option<(f64, Vec<usize>)>, members: Vec<usize>| {
        if members.is_empty() {
            return;
        }
        let d = window_upper_density(&IndexSet::new(n, members.clone()).expect("in window"));
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            *best = Some((d, members));
        }
    };
    for j in 0..(2 * m).min(n) {
        let ij: Vec<usize> = (0..n)
            .filter(|&i| (0..n - j).any(|l| rel.contains(l + j, i)))
            .collect();
        consider(&mut best, greedy_compatible(rel, &ij));
    }
    for l in 0..n {
        consider(&mut best, rel.row(l).members().to_vec());
    }
    if best.as_ref().is_none_or(|(d, _)| *d < needed) && n <= EXHAUSTIVE_WINDOW {
        for clique in maximal_cliques(rel) {
            consider(&mut best, clique);
        }
    }
    let (density, members) = best.unwrap_or((0.0, Vec::new()));
    if density < needed {
        return Err(CombinatoricsError::DensityShortfall {
            best: density,
            needed,
        });
    }
    let mut witnesses = BTreeMap::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a..] {
            let k = rel.common_witness(i, j).expect("members are pairwise compatible");
            witnesses.insert((i, j), k);
        }
    }
    Ok(DenseWitnessSet {
        set: IndexSet::new(n, members).expect("in window"),
        witnesses,
        density,
    })
}

fn greedy_compatible(rel: &FiniteRelation, candidates: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for &i in candidates {
        if rel.compatible(i, i) && chosen.iter().all(|&c| rel.compatible(c, i)) {
            chosen.push(i);
        }
    }
    chosen
}

/// Maximal sets of pairwise compatible indices (Bron–Kerbosch with pivot).
fn maximal_cliques(rel: &FiniteRelation) -> Vec<Vec<usize>> {
    let n = rel.window;
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && rel.compatible(i, j)).collect())
        .collect();
    let vertices: Vec<usize> = (0..n).filter(|&i| rel.compatible(i, i)).collect();
    let mut out = Vec::new();
    bron_kerbosch(&adj, Vec::new(), vertices, Vec::new(), &mut out);
    out
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        r2.sort_unstable();
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Independent check of a search result: every pair `i ≤ j` of members has a
/// recorded witness `k` with `(k, i), (k, j) ∈ R`, and the window density is
/// at least `1/(2m²)`.
pub fn verify_dense_witness_set(rel: &FiniteRelation, result: &DenseWitnessSet, m: usize) -> Verdict {
    let members = result.set.members();
    let mut witnesses_ok = result.set.window() == rel.window();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a..] {
            witnesses_ok &= match result.witnesses.get(&(i, j)) {
                Some(&k) => rel.contains(k, i) && rel.contains(k, j),
                None => false,
            };
        }
    }
    Verdict {
        witnesses_ok,
        density: window_upper_density(&result.set),
        needed: 1.0 / (2 * m.max(1) * m.max(1)) as f64,
    }
}
