//! The t-norms W, Prod and M and their sup-convolution triangle functions.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::ddf::Ddf;
use crate::error::TNormError;

/// One of the three classical t-norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TNorm {
    /// Łukasiewicz: `max(a + b − 1, 0)`.
    W,
    /// Product: `a·b`.
    Prod,
    /// Minimum: `min(a, b)`.
    M,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::W, TNorm::Prod, TNorm::M];

    /// Evaluates the t-norm, rejecting arguments outside `[0, 1]`.
    pub fn eval(self, a: f64, b: f64) -> Result<f64, TNormError> {
        for x in [a, b] {
            if !(0.0..=1.0).contains(&x) {
                return Err(TNormError::ArgumentOutOfRange(x));
            }
        }
        Ok(self.apply(a, b))
    }

    #[inline]
    pub(crate) fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::W => {
                // Written as lo - (1 - hi) so that W(a, 1) = a holds exactly.
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                (lo - (1.0 - hi)).max(0.0)
            }
            TNorm::Prod => a * b,
            TNorm::M => a.min(b),
        }
    }

    /// The triangle function `τ_T(F, G)(x) = sup_{u+v=x} T(F(u), G(v))`.
    ///
    /// For step functions the supremum is a maximum over breakpoint pairs:
    /// `τ(x) = max{T(vᵢ, wⱼ) : bᵢ + cⱼ < x}`, so the result is again a step
    /// function whose breakpoints are pairwise sums. The strict inequality
    /// gives left-continuity.
    pub fn convolve(self, f: &Ddf, g: &Ddf) -> Ddf {
        let mut sums: Vec<(f64, f64)> = Vec::with_capacity(f.breakpoints().len() * g.breakpoints().len());
        for (&b, &v) in f.breakpoints().iter().zip(f.values()) {
            for (&c, &w) in g.breakpoints().iter().zip(g.values()) {
                sums.push((b + c, self.apply(v, w)));
            }
        }
        sums.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
        let mut running = 0.0_f64;
        Ddf::from_steps(sums.into_iter().map(|(s, t)| {
            running = running.max(t);
            (s, running)
        }))
    }

    pub fn name(self) -> &'static str {
        match self {
            TNorm::W => "W",
            TNorm::Prod => "Prod",
            TNorm::M => "M",
        }
    }
}

/// `τ_T(F, G)`; see [`TNorm::convolve`].
pub fn tau_conv(t: TNorm, f: &Ddf, g: &Ddf) -> Ddf {
    t.convolve(f, g)
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TNorm {
    type Err = TNormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "W" => Ok(TNorm::W),
            "Prod" => Ok(TNorm::Prod),
            "M" => Ok(TNorm::M),
            other => Err(TNormError::UnknownName(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> impl Iterator<Item = f64> + Clone {
        (0..=20).map(|i| i as f64 / 20.0)
    }

    #[test]
    fn formula_examples() {
        assert!((TNorm::W.eval(0.5, 0.7).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(TNorm::M.eval(0.3, 0.8), Ok(0.3));
        for x in grid() {
            assert_eq!(TNorm::Prod.eval(1.0, x), Ok(x));
        }
        assert_eq!(TNorm::W.eval(0.2, 0.3), Ok(0.0));
        assert_eq!(
            TNorm::M.eval(1.2, 0.3),
            Err(TNormError::ArgumentOutOfRange(1.2))
        );
        assert!(TNorm::Prod.eval(0.3, -0.1).is_err());
    }

    #[test]
    fn t_norm_axioms_on_a_grid() {
        for t in TNorm::ALL {
            for a in grid() {
                assert_eq!(t.apply(a, 1.0), a);
                for b in grid() {
                    assert_eq!(t.apply(a, b), t.apply(b, a));
                    for c in grid() {
                        let l = t.apply(t.apply(a, b), c);
                        let r = t.apply(a, t.apply(b, c));
                        assert!((l - r).abs() < 1e-12, "{t}: {a} {b} {c}");
                        if b <= c {
                            assert!(t.apply(a, b) <= t.apply(a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn t_norms_are_ordered() {
        for a in grid() {
            for b in grid() {
                assert!(TNorm::W.apply(a, b) <= TNorm::Prod.apply(a, b) + 1e-15);
                assert!(TNorm::Prod.apply(a, b) <= TNorm::M.apply(a, b));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for t in TNorm::ALL {
            assert_eq!(t.name().parse::<TNorm>(), Ok(t));
        }
        assert!("min".parse::<TNorm>().is_err());
    }

    #[test]
    fn convolution_examples() {
        let g = Ddf::new(alloc::vec![1.0, 3.0], alloc::vec![0.5, 1.0]).unwrap();
        assert_eq!(TNorm::M.convolve(&Ddf::epsilon0(), &g), g);
        let a = Ddf::step(0.4).unwrap();
        let b = Ddf::step(0.6).unwrap();
        assert_eq!(TNorm::W.convolve(&a, &b), Ddf::step(1.0).unwrap());
        let f = Ddf::new(alloc::vec![1.0, 2.0], alloc::vec![0.5, 1.0]).unwrap();
        let ff = TNorm::Prod.convolve(&f, &f);
        assert_eq!(ff.breakpoints(), &[2.0, 3.0, 4.0]);
        assert_eq!(ff.values(), &[0.25, 0.5, 1.0]);
    }

    #[test]
    fn epsilon0_is_the_identity() {
        let g = Ddf::new(alloc::vec![0.5, 1.25, 2.0], alloc::vec![0.2, 0.6, 0.9]).unwrap();
        for t in TNorm::ALL {
            assert_eq!(t.convolve(&Ddf::epsilon0(), &g), g);
            assert_eq!(t.convolve(&g, &Ddf::epsilon0()), g);
        }
    }
}
