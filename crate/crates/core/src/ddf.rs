//! Distance distribution functions as exact left-continuous step functions.
//!
//! A [`Ddf`] stores breakpoints `b₁ < … < bₙ` and values `v₁ ≤ … ≤ vₙ` and
//! denotes the function
//!
//! ```text
//! F(x) = 0    for 0 ≤ x ≤ b₁
//! F(x) = vᵢ   for x ∈ (bᵢ, bᵢ₊₁]
//! F(x) = vₙ   for x > bₙ
//! F(+∞) = 1
//! ```
//!
//! Every value is kept in canonical form (no zero-height steps, no leading
//! zero steps), so structural equality coincides with pointwise equality and
//! all comparisons can be decided on the merged breakpoint partition.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::DdfError;

/// Width of the final bisection bracket used by [`Ddf::sibley`] is below this.
pub const SIBLEY_TOLERANCE: f64 = 1e-9;

/// Left-continuous nondecreasing step function on `[0, +∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ddf {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Selects the pointwise minimum or maximum in [`Ddf::pointwise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// Slack accepted by [`Ddf::le_with`] when two functions come out of
/// different floating-point paths.
///
/// `F ≤ G` with slack `s` means `F(x) ≤ G(x·(1 + s.arg_rel)) + s.value` for all
/// `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub value: f64,
    pub arg_rel: f64,
}

impl Slack {
    /// No slack at all: plain pointwise order.
    pub const EXACT: Slack = Slack {
        value: 0.0,
        arg_rel: 0.0,
    };
}

impl Default for Slack {
    fn default() -> Self {
        Slack {
            value: 1e-12,
            arg_rel: 1e-12,
        }
    }
}

impl Ddf {
    /// Validates and canonicalizes a step function.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, DdfError> {
        if breakpoints.len() != values.len() {
            return Err(DdfError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.is_empty() {
            return Err(DdfError::Empty);
        }
        for (index, &b) in breakpoints.iter().enumerate() {
            if !b.is_finite() {
                return Err(DdfError::NonFiniteBreakpoint { index });
            }
            if b < 0.0 {
                return Err(DdfError::NegativeBreakpoint { index });
            }
            if index > 0 && b <= breakpoints[index - 1] {
                return Err(DdfError::UnsortedBreakpoints { index });
            }
        }
        for (index, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(DdfError::ValueOutOfRange { index });
            }
            if index > 0 && v < values[index - 1] {
                return Err(DdfError::DecreasingValues { index });
            }
        }
        Ok(Self::from_steps(breakpoints.into_iter().zip(values)))
    }

    /// The maximal element `ε₀`: 0 at 0, 1 for every `x > 0`.
    pub fn epsilon0() -> Self {
        Ddf {
            breakpoints: alloc::vec![0.0],
            values: alloc::vec![1.0],
        }
    }

    /// The function that is 0 on `[0, ∞)`.
    pub fn zero() -> Self {
        Ddf {
            breakpoints: alloc::vec![0.0],
            values: alloc::vec![0.0],
        }
    }

    /// Unit step jumping to 1 right after `at`.
    pub fn step(at: f64) -> Result<Self, DdfError> {
        Self::new(alloc::vec![at], alloc::vec![1.0])
    }

    /// Builds the canonical form of a sequence of `(breakpoint, value)` steps.
    ///
    /// Breakpoints must be nondecreasing and non-negative. A step whose value
    /// does not exceed the running value is dropped, and repeated breakpoints
    /// keep their largest value, so running maxima may be fed directly.
    pub(crate) fn from_steps(steps: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (b, v) in steps {
            // normalizes -0.0
            let b = b + 0.0;
            let v = v.min(1.0);
            let floor = values.last().copied().unwrap_or(0.0);
            if v <= floor {
                continue;
            }
            match breakpoints.last() {
                Some(&last) if last == b => *values.last_mut().unwrap() = v,
                _ => {
                    breakpoints.push(b);
                    values.push(v);
                }
            }
        }
        if breakpoints.is_empty() {
            return Self::zero();
        }
        Ddf {
            breakpoints,
            values,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value approached as `x → ∞` (not the conventional `F(+∞) = 1`).
    pub fn tail(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Membership in `D⁺`: the tail limit is 1.
    pub fn in_d_plus(&self) -> bool {
        self.tail() == 1.0
    }

    pub fn is_epsilon0(&self) -> bool {
        self.breakpoints == [0.0] && self.values == [1.0]
    }

    /// Evaluates `F(x)` on the extended half-line, rejecting negative `x`.
    pub fn eval(&self, x: f64) -> Result<f64, DdfError> {
        if x.is_nan() || x < 0.0 {
            return Err(DdfError::NegativeArgument(x));
        }
        Ok(self.value(x))
    }

    /// `F(x)` extended to the whole real line by `F(x) = 0` for `x ≤ 0`.
    pub fn value(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        let idx = self.breakpoints.partition_point(|&b| b < x);
        if idx == 0 {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// `F(x+)`, the value on the constancy interval just right of `x`.
    pub fn right_limit(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        if idx == 0 {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// Constancy intervals `(lo, hi]` with their value; the last has `hi = ∞`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let first = self.breakpoints[0];
        let head = (first > 0.0).then_some((0.0, first, 0.0));
        let n = self.breakpoints.len();
        head.into_iter().chain((0..n).map(move |i| {
            let hi = if i + 1 < n {
                self.breakpoints[i + 1]
            } else {
                f64::INFINITY
            };
            (self.breakpoints[i], hi, self.values[i])
        }))
    }

    /// `G(x) = F(x / c)`: every breakpoint is multiplied by `c`.
    pub fn scale_arg(&self, c: f64) -> Result<Self, DdfError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(DdfError::InvalidScale(c));
        }
        Ok(Self::from_steps(
            self.breakpoints
                .iter()
                .zip(&self.values)
                .map(|(&b, &v)| (b * c, v)),
        ))
    }

    /// Exact pointwise minimum or maximum.
    pub fn pointwise(&self, other: &Ddf, mode: Extremum) -> Self {
        Self::from_steps(joint_right_limits(self, other).map(|(x, a, b)| {
            let v = match mode {
                Extremum::Min => a.min(b),
                Extremum::Max => a.max(b),
            };
            (x, v)
        }))
    }

    pub fn min(&self, other: &Ddf) -> Self {
        self.pointwise(other, Extremum::Min)
    }

    pub fn max(&self, other: &Ddf) -> Self {
        self.pointwise(other, Extremum::Max)
    }

    /// `F ≤ G` up to `slack`; see [`Slack`].
    pub fn le_with(&self, other: &Ddf, slack: Slack) -> bool {
        self.exceedance_with(other, slack).is_none()
    }

    /// A point `x > 0` with `F(x) > G(x)`, if the pointwise order fails.
    pub fn exceedance_witness(&self, other: &Ddf) -> Option<f64> {
        self.exceedance_with(other, Slack::EXACT)
    }

    /// A point `x > 0` at which `F(x) > G(x·(1 + arg_rel)) + value`.
    pub fn exceedance_with(&self, other: &Ddf, slack: Slack) -> Option<f64> {
        let relaxed;
        let other = if slack.arg_rel > 0.0 {
            relaxed = other
                .scale_arg(1.0 / (1.0 + slack.arg_rel))
                .expect("positive scale");
            &relaxed
        } else {
            other
        };
        let cuts: Vec<(f64, f64, f64)> = joint_right_limits(self, other).collect();
        for (k, &(x, a, b)) in cuts.iter().enumerate() {
            if a > b + slack.value {
                // the value on (x, next] is attained at next itself
                let witness = match cuts.get(k + 1) {
                    Some(&(next, _, _)) => next,
                    None => x + 1.0,
                };
                return Some(witness);
            }
        }
        None
    }

    /// Sibley distance `d_S(F, G)`, computed by bisection on `h ∈ (0, 1]`.
    ///
    /// The two-sided condition `F(x+h) ≥ G(x) − h` and `G(x+h) ≥ F(x) − h` on
    /// `x ∈ (0, 1/h)` is evaluated exactly on the constancy cells of both step
    /// functions. It is monotone in `h` and always holds at `h = 1`. The result
    /// is within [`SIBLEY_TOLERANCE`] of the infimum and is exactly symmetric.
    pub fn sibley(&self, other: &Ddf) -> f64 {
        if self == other {
            return 0.0;
        }
        let holds = |h: f64| shifted_dominates(self, other, h) && shifted_dominates(other, self, h);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > SIBLEY_TOLERANCE / 8.0 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Boundary `a` of the up-set `{t > 0 : F(t) > 1 − slope·t} = (a, ∞)`.
    ///
    /// The complement `{t > 0 : F(t) ≤ 1 − slope·t}` is a down-set made of
    /// right-closed pieces, so its supremum is attained and the up-set is
    /// always open at `a`. With `slope = 1` this is the Ky Fan value.
    pub fn threshold_boundary(&self, slope: f64) -> f64 {
        debug_assert!(slope > 0.0);
        let mut sup = 0.0;
        for (lo, hi, v) in self.pieces() {
            let cross = (1.0 - v) / slope;
            if cross <= lo {
                break;
            }
            sup = cross.min(hi);
            if hi >= cross {
                break;
            }
        }
        sup
    }
}

impl PartialOrd for Ddf {
    /// Pointwise order on `(0, ∞)`; `None` when neither function dominates.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (mut le, mut ge) = (true, true);
        for (_, a, b) in joint_right_limits(self, other) {
            if a > b {
                le = false;
            } else if a < b {
                ge = false;
            }
            if !le && !ge {
                return None;
            }
        }
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

/// Walks the merged breakpoints of `f` and `g`, yielding `(x, f(x+), g(x+))`.
///
/// Both functions are constant on `(x, next]` for consecutive yielded points,
/// and both vanish left of the first one.
fn joint_right_limits<'a>(
    f: &'a Ddf,
    g: &'a Ddf,
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let (mut i, mut j) = (0usize, 0usize);
    core::iter::from_fn(move || {
        let x = match (f.breakpoints.get(i), g.breakpoints.get(j)) {
            (None, None) => return None,
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (Some(&a), Some(&b)) => a.min(b),
        };
        while f.breakpoints.get(i).is_some_and(|&b| b <= x) {
            i += 1;
        }
        while g.breakpoints.get(j).is_some_and(|&b| b <= x) {
            j += 1;
        }
        let fv = if i == 0 { 0.0 } else { f.values[i - 1] };
        let gv = if j == 0 { 0.0 } else { g.values[j - 1] };
        Some((x, fv, gv))
    })
}

/// Sibley's one-sided condition `[F, G; h]`: `F(x+h) ≥ G(x) − h` on `(0, 1/h)`.
fn shifted_dominates(f: &Ddf, g: &Ddf, h: f64) -> bool {
    let end = 1.0 / h;
    let mut cuts: Vec<f64> = f
        .breakpoints
        .iter()
        .map(|&b| b - h)
        .chain(g.breakpoints.iter().copied())
        .filter(|&c| c > 0.0 && c < end)
        .collect();
    cuts.push(0.0);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup();
    cuts.iter().all(|&lo| {
        // F(x + h) for x just right of lo, using the same shifted breakpoints
        let idx = f.breakpoints.partition_point(|&b| b - h <= lo);
        let shifted = if idx == 0 { 0.0 } else { f.values[idx - 1] };
        shifted >= g.right_limit(lo) - h
    })
}
