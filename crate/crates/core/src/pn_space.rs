//! Probabilistic normed spaces of random vectors: the norm, axiom checks,
//! threshold contractions of vectors, and iteration and continuity probes.

use alloc::vec::Vec;

use crate::contraction::compress;
use crate::ddf::{Ddf, Slack};
use crate::error::{ESpaceError, PnError};
use crate::espace::{euclidean_norm, ky_fan, AffineMap, EPoint, ProbSpace};
use crate::pm_space::{orbit, ProbMetric, SelfMap};
use crate::tnorm::TNorm;

/// A random vector: one point of `ℝᵈ` per outcome.
pub type Vector = EPoint<Vec<f64>>;

/// E-normed space over a finite probability space:
/// `ν_p(t) = P{ω : ‖p(ω)‖ < t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePnSpace {
    prob: ProbSpace,
    dim: usize,
    tau: TNorm,
    tau_star: TNorm,
}

impl FinitePnSpace {
    pub fn new(prob: ProbSpace, dim: usize, tau: TNorm, tau_star: TNorm) -> Result<Self, PnError> {
        if dim == 0 {
            return Err(ESpaceError::ZeroDimension.into());
        }
        Ok(FinitePnSpace {
            prob,
            dim,
            tau,
            tau_star,
        })
    }

    /// `τ = W`, `τ* = M`.
    pub fn with_defaults(prob: ProbSpace, dim: usize) -> Result<Self, PnError> {
        Self::new(prob, dim, TNorm::W, TNorm::M)
    }

    pub fn prob(&self) -> &ProbSpace {
        &self.prob
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> TNorm {
        self.tau
    }

    pub fn tau_star(&self) -> TNorm {
        self.tau_star
    }

    pub fn theta(&self) -> Vector {
        EPoint::new(alloc::vec![alloc::vec![0.0; self.dim]; self.prob.len()])
    }

    pub fn validate(&self, p: &Vector) -> Result<(), ESpaceError> {
        if p.coords.len() != self.prob.len() {
            return Err(ESpaceError::OutcomeCount {
                expected: self.prob.len(),
                found: p.coords.len(),
            });
        }
        for x in &p.coords {
            if x.len() != self.dim {
                return Err(ESpaceError::Dimension {
                    expected: self.dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(ESpaceError::NonFiniteCoordinate);
            }
        }
        Ok(())
    }

    /// `ν_p`.
    pub fn pn_norm(&self, p: &Vector) -> Result<Ddf, PnError> {
        self.validate(p)?;
        Ok(self.norm_unchecked(p))
    }

    fn norm_unchecked(&self, p: &Vector) -> Ddf {
        let norms: Vec<f64> = p
            .coords
            .iter()
            .map(|x| euclidean_norm(x.iter().copied()))
            .collect();
        self.prob.distribution_of(&norms)
    }

    pub fn is_theta(&self, p: &Vector) -> bool {
        p.coords.iter().all(|x| x.iter().all(|&c| c == 0.0))
    }
}

/// `ν_{p−q}`, so the space is also a probabilistic metric space.
impl ProbMetric for FinitePnSpace {
    type Point = Vector;

    fn ddf(&self, p: &Vector, q: &Vector) -> Ddf {
        self.norm_unchecked(&sub(p, q))
    }
}

pub fn add(p: &Vector, q: &Vector) -> Vector {
    zip_with(p, q, |a, b| a + b)
}

pub fn sub(p: &Vector, q: &Vector) -> Vector {
    zip_with(p, q, |a, b| a - b)
}

pub fn scale(lambda: f64, p: &Vector) -> Vector {
    EPoint::new(
        p.coords
            .iter()
            .map(|x| x.iter().map(|c| lambda * c).collect())
            .collect(),
    )
}

fn zip_with(p: &Vector, q: &Vector, op: impl Fn(f64, f64) -> f64) -> Vector {
    EPoint::new(
        p.coords
            .iter()
            .zip(&q.coords)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| op(*a, *b)).collect())
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `ν_p = ε₀ ⇔ p = θ`.
    N1,
    /// `ν_{−p} = ν_p`.
    N2,
    /// `ν_{p+q} ≥ τ(ν_p, ν_q)`.
    N3,
    /// `ν_p ≤ τ*(ν_{λp}, ν_{(1−λ)p})`.
    N4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub sample: usize,
    /// Second sample for N3.
    pub other: Option<usize>,
    /// `λ` for N4.
    pub lambda: Option<f64>,
    /// A point `t` where the inequality fails (N3, N4).
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub checks: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default `λ` grid for N4.
pub const LAMBDA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Checks N1–N4 for the space's own norm on `samples`.
pub fn pn_axiom_check(
    space: &FinitePnSpace,
    samples: &[Vector],
    lambdas: &[f64],
) -> Result<AxiomReport, PnError> {
    for s in samples {
        space.validate(s)?;
    }
    pn_axiom_check_with(space, samples, lambdas, |p| space.norm_unchecked(p))
}

/// Checks N1–N4 for an arbitrary norm. N3 and N4 compare values reached
/// through different float paths and accept the default [`Slack`].
pub fn pn_axiom_check_with(
    space: &FinitePnSpace,
    samples: &[Vector],
    lambdas: &[f64],
    norm: impl Fn(&Vector) -> Ddf,
) -> Result<AxiomReport, PnError> {
    if samples.is_empty() {
        return Err(PnError::NoSamples);
    }
    if let Some(&l) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(PnError::InvalidLambda(l));
    }
    let slack = Slack::default();
    let mut report = AxiomReport::default();
    let mut violation = |axiom, sample, other, lambda, witness| {
        report.violations.push(AxiomViolation {
            axiom,
            sample,
            other,
            lambda,
            witness,
        })
    };
    let mut checks = 0;
    let norms: Vec<Ddf> = samples.iter().map(&norm).collect();
    for (i, p) in samples.iter().enumerate() {
        checks += 2;
        if norms[i].is_epsilon0() != space.is_theta(p) {
            violation(Axiom::N1, i, None, None, None);
        }
        if norm(&scale(-1.0, p)) != norms[i] {
            violation(Axiom::N2, i, None, None, None);
        }
        for j in i..samples.len() {
            checks += 1;
            let bound = space.tau.convolve(&norms[i], &norms[j]);
            if let Some(t) = bound.exceedance_with(&norm(&add(p, &samples[j])), slack) {
                violation(Axiom::N3, i, Some(j), None, Some(t));
            }
        }
        for &l in lambdas {
            checks += 1;
            let bound = space
                .tau_star
                .convolve(&norm(&scale(l, p)), &norm(&scale(1.0 - l, p)));
            if let Some(t) = norms[i].exceedance_with(&bound, slack) {
                violation(Axiom::N4, i, None, Some(l), Some(t));
            }
        }
    }
    report.checks = checks;
    Ok(report)
}

/// Consequent of the vector threshold contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `ν_p(t) > 1 − t ⇒ ν_{fp}(kt) > 1 − t`.
    Unscaled,
    /// `ν_p(t) > 1 − t ⇒ ν_{fp}(kt) > 1 − kt`.
    Strict,
}

/// Decides the implication for one vector; returns a failing `t`.
///
/// The antecedent holds exactly on `(a, ∞)`, `a = ky_fan(ν_p)`. The
/// consequent `ν_{fp}(kt) > 1 − s·t` (`s = 1` or `k`) holds exactly on
/// `(b, ∞)` with `b` the boundary of `G(t) = ν_{fp}(kt)` against slope `s`.
/// Norms of images come out of a different float path than `k‖p‖`, so the
/// default [`Slack`] is applied to `a`.
pub fn threshold_implication(nu_p: &Ddf, nu_fp: &Ddf, k: f64, mode: Mode) -> Option<f64> {
    threshold_implication_with(nu_p, nu_fp, k, mode, Slack::default())
}

/// [`threshold_implication`] failing only when `b > a·(1 + arg_rel) + value`.
pub fn threshold_implication_with(
    nu_p: &Ddf,
    nu_fp: &Ddf,
    k: f64,
    mode: Mode,
    slack: Slack,
) -> Option<f64> {
    let a = ky_fan(nu_p);
    let b = compress(nu_fp, k).threshold_boundary(mode_slope(mode, k));
    (b > relax(a, slack)).then_some(b)
}

fn mode_slope(mode: Mode, k: f64) -> f64 {
    match mode {
        Mode::Unscaled => 1.0,
        Mode::Strict => k,
    }
}

fn relax(t: f64, slack: Slack) -> f64 {
    t * (1.0 + slack.arg_rel) + slack.value
}

/// The same implication decided by evaluation at every breakpoint and
/// crossing and in every cell between them, with the default [`Slack`].
pub fn threshold_implication_dense(nu_p: &Ddf, nu_fp: &Ddf, k: f64, mode: Mode) -> Option<f64> {
    threshold_implication_dense_with(nu_p, nu_fp, k, mode, Slack::default())
}

/// Dense evaluation of `ν_p(t) > 1 − t ⇒ ν_{fp}(k·u) > 1 − s·u` at
/// `u = t·(1 + arg_rel) + value`.
pub fn threshold_implication_dense_with(
    nu_p: &Ddf,
    nu_fp: &Ddf,
    k: f64,
    mode: Mode,
    slack: Slack,
) -> Option<f64> {
    let slope = mode_slope(mode, k);
    let unrelax = |u: f64| (u - slack.value) / (1.0 + slack.arg_rel);
    let mut cuts = alloc::vec![1.0, unrelax(1.0 / slope)];
    for (&b, &v) in nu_p.breakpoints().iter().zip(nu_p.values()) {
        cuts.push(b);
        cuts.push(1.0 - v);
    }
    for (&c, &w) in nu_fp.breakpoints().iter().zip(nu_fp.values()) {
        cuts.push(unrelax(c / k));
        cuts.push(unrelax((1.0 - w) / slope));
    }
    cuts.retain(|&t| t > 0.0 && t.is_finite());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let fails = |t: f64| {
        let u = relax(t, slack);
        nu_p.value(t) > 1.0 - t && !(nu_fp.value(k * u) > 1.0 - slope * u)
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
    fails(prev + 1.0).then_some(prev + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleContraction {
    pub sample: usize,
    /// Failing `t` in unscaled mode, if any.
    pub unscaled: Option<f64>,
    /// Failing `t` in strict mode, if any.
    pub strict: Option<f64>,
    /// Exact decisions matched dense evaluation in both modes.
    pub dense_agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnContractionReport {
    pub k: f64,
    pub samples: Vec<SampleContraction>,
}

impl PnContractionReport {
    pub fn passed(&self, mode: Mode) -> bool {
        self.samples.iter().all(|s| match mode {
            Mode::Unscaled => s.unscaled.is_none(),
            Mode::Strict => s.strict.is_none(),
        })
    }

    pub fn first_failure(&self, mode: Mode) -> Option<usize> {
        self.samples
            .iter()
            .find(|s| match mode {
                Mode::Unscaled => s.unscaled.is_some(),
                Mode::Strict => s.strict.is_some(),
            })
            .map(|s| s.sample)
    }

    pub fn dense_agrees(&self) -> bool {
        self.samples.iter().all(|s| s.dense_agrees)
    }
}

fn validate_k(k: f64) -> Result<(), PnError> {
    if !(k > 0.0 && k < 1.0) {
        return Err(PnError::InvalidK(k));
    }
    Ok(())
}

fn validate_eps(eps: f64) -> Result<(), PnError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(PnError::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Checks the threshold contraction on every sample in both modes.
pub fn pn_c_contraction_check(
    space: &FinitePnSpace,
    f: &impl SelfMap<Vector>,
    k: f64,
    samples: &[Vector],
) -> Result<PnContractionReport, PnError> {
    validate_k(k)?;
    if samples.is_empty() {
        return Err(PnError::NoSamples);
    }
    let mut out = Vec::with_capacity(samples.len());
    for (i, p) in samples.iter().enumerate() {
        let nu_p = space.pn_norm(p)?;
        let nu_fp = space.pn_norm(&f.apply(p))?;
        let unscaled = threshold_implication(&nu_p, &nu_fp, k, Mode::Unscaled);
        let strict = threshold_implication(&nu_p, &nu_fp, k, Mode::Strict);
        let dense_agrees = unscaled.is_some()
            == threshold_implication_dense(&nu_p, &nu_fp, k, Mode::Unscaled).is_some()
            && strict.is_some()
                == threshold_implication_dense(&nu_p, &nu_fp, k, Mode::Strict).is_some();
        out.push(SampleContraction {
            sample: i,
            unscaled,
            strict,
            dense_agrees,
        });
    }
    Ok(PnContractionReport { k, samples: out })
}

/// Smallest `n ≥ 1` with `kⁿ(1 + ε) ≤ ε`, by repeated multiplication.
pub fn n0_of_epsilon(eps: f64, k: f64) -> Result<usize, PnError> {
    validate_eps(eps)?;
    validate_k(k)?;
    let mut n = 1;
    let mut kn = k;
    while kn * (1.0 + eps) > eps {
        kn *= k;
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullReport {
    pub n0: usize,
    /// Iterates `n ∈ (n₀, n₀ + horizon]` with `ν_{fⁿp}(ε) ≤ 1 − ε`.
    pub failures: Vec<usize>,
    /// First `n ≥ 0` with `ν_{fⁿp}(ε) > 1 − ε`, within `n₀ + horizon`.
    pub first_achieving: Option<usize>,
    /// The strict condition holds for every `fⁿp`, `n < n₀ + horizon`.
    pub orbit_strict: bool,
}

impl NullReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Follows `fⁿp` and checks `ν_{fⁿp}(ε) > 1 − ε` past `n₀(ε)`.
///
/// Requires the strict threshold condition at `p`.
pub fn iterate_to_null(
    space: &FinitePnSpace,
    f: &impl SelfMap<Vector>,
    p: &Vector,
    k: f64,
    eps: f64,
    horizon: usize,
) -> Result<NullReport, PnError> {
    let n0 = n0_of_epsilon(eps, k)?;
    let nu_p = space.pn_norm(p)?;
    if threshold_implication(&nu_p, &space.pn_norm(&f.apply(p))?, k, Mode::Strict).is_some() {
        return Err(PnError::StrictConditionFails);
    }
    let last = n0 + horizon;
    let norms: Vec<Ddf> = orbit(f, p, last)
        .iter()
        .map(|x| space.pn_norm(x))
        .collect::<Result<_, _>>()?;
    let inside = |n: usize| norms[n].value(eps) > 1.0 - eps;
    let orbit_strict = norms
        .windows(2)
        .all(|w| threshold_implication(&w[0], &w[1], k, Mode::Strict).is_none());
    Ok(NullReport {
        n0,
        failures: (n0 + 1..=last).filter(|&n| !inside(n)).collect(),
        first_achieving: (0..=last).find(|&n| inside(n)),
        orbit_strict,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedPointReport {
    /// Samples with `f(p) = p` exactly.
    pub fixed: Vec<usize>,
    /// Fixed samples whose norm is not `ε₀`.
    pub violations: Vec<usize>,
}

/// Every exact fixed point among the samples must be `θ`.
///
/// Requires the unscaled-mode threshold condition on all samples.
pub fn uniqueness_and_theta_check(
    space: &FinitePnSpace,
    f: &impl SelfMap<Vector>,
    k: f64,
    samples: &[Vector],
) -> Result<FixedPointReport, PnError> {
    let pre = pn_c_contraction_check(space, f, k, samples)?;
    if let Some(i) = pre.first_failure(Mode::Unscaled) {
        return Err(PnError::NotContraction(i));
    }
    let mut report = FixedPointReport::default();
    for (i, p) in samples.iter().enumerate() {
        if f.apply(p) == *p {
            report.fixed.push(i);
            if !space.pn_norm(p)?.is_epsilon0() {
                report.violations.push(i);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityViolation {
    pub eps: f64,
    pub delta: f64,
    pub p: usize,
    /// `None` for the probe at `θ`.
    pub q: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContinuityReport {
    /// Pairs (or vectors) found inside the `δ`-neighborhood.
    pub inside: usize,
    pub violations: Vec<ContinuityViolation>,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `δ(ε)` for the uniform continuity probe: `min(ε/(2k), 1)` for `k ≤ 1/2`,
/// `ε/(k+1)` above.
pub fn uniform_delta(eps: f64, k: f64) -> f64 {
    if k <= 0.5 {
        (eps / (2.0 * k)).min(1.0)
    } else {
        eps / (k + 1.0)
    }
}

/// `δ(ε) = min(ε/(2k), 1)` for the probe at `θ`.
pub fn theta_delta(eps: f64, k: f64) -> f64 {
    (eps / (2.0 * k)).min(1.0)
}

fn in_neighborhood(nu: &Ddf, t: f64) -> bool {
    nu.value(t) > 1.0 - t
}

fn probe_preconditions(
    space: &FinitePnSpace,
    f: &impl SelfMap<Vector>,
    k: f64,
    eps_grid: &[f64],
    samples: &[Vector],
) -> Result<(), PnError> {
    validate_k(k)?;
    if let Some(&e) = eps_grid.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(PnError::InvalidEpsilon(e));
    }
    let pre = pn_c_contraction_check(space, f, k, samples)?;
    match pre.first_failure(Mode::Unscaled) {
        Some(i) => Err(PnError::NotContraction(i)),
        None => Ok(()),
    }
}

/// For every `ε`, checks `p − q ∈ N_θ(δ) ⇒ fp − fq ∈ N_θ(ε)` on all ordered
/// sample pairs, for a linear `f`.
pub fn uniform_continuity_probe(
    space: &FinitePnSpace,
    f: &AffineMap,
    k: f64,
    eps_grid: &[f64],
    samples: &[Vector],
) -> Result<ContinuityReport, PnError> {
    if !f.is_linear() {
        return Err(PnError::NotLinear);
    }
    probe_preconditions(space, f, k, eps_grid, samples)?;
    let images: Vec<Vector> = samples.iter().map(|p| f.apply(p)).collect();
    let mut report = ContinuityReport::default();
    for &eps in eps_grid {
        let delta = uniform_delta(eps, k);
        for (i, p) in samples.iter().enumerate() {
            for (j, q) in samples.iter().enumerate() {
                if !in_neighborhood(&space.ddf(p, q), delta) {
                    continue;
                }
                report.inside += 1;
                if !in_neighborhood(&space.ddf(&images[i], &images[j]), eps) {
                    report.violations.push(ContinuityViolation {
                        eps,
                        delta,
                        p: i,
                        q: Some(j),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// For every `ε`, checks `p ∈ N_θ(δ) ⇒ f(p) ∈ N_θ(ε)` on the samples.
pub fn continuity_at_theta_probe(
    space: &FinitePnSpace,
    f: &impl SelfMap<Vector>,
    k: f64,
    eps_grid: &[f64],
    samples: &[Vector],
) -> Result<ContinuityReport, PnError> {
    probe_preconditions(space, f, k, eps_grid, samples)?;
    let mut report = ContinuityReport::default();
    for &eps in eps_grid {
        let delta = theta_delta(eps, k);
        for (i, p) in samples.iter().enumerate() {
            if !in_neighborhood(&space.pn_norm(p)?, delta) {
                continue;
            }
            report.inside += 1;
            if !in_neighborhood(&space.pn_norm(&f.apply(p))?, eps) {
                report.violations.push(ContinuityViolation {
                    eps,
                    delta,
                    p: i,
                    q: None,
                });
            }
        }
    }
    Ok(report)
}
