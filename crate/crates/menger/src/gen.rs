//! Seeded instance generators. Identical parameters and seed give identical
//! instances on every platform (ChaCha8 stream, dyadic coordinates).

use menger_core::contraction::{check_mk_b, check_mk_c};
use menger_core::espace::{AffineMap, EPoint, ESpace, Euclidean, ProbSpace};
use menger_core::pn_space::{FinitePnSpace, Vector};
use menger_core::{ESpaceError, TNorm};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// Attempts before a fixture generator gives up.
pub const CERTIFY_ATTEMPTS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("{0} must be at least {1}")]
    TooSmall(&'static str, usize),
    #[error("contraction constant {0} lies outside (0, 1)")]
    InvalidK(f64),
    #[error("no certified fixture after {0} attempts")]
    NotCertified(usize),
    #[error(transparent)]
    Space(#[from] ESpaceError),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the probability simplex: normalized standard
/// exponentials. The sum is 1 to within a few ulps.
pub fn dirichlet_probs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE)).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

/// Multiple of `1/denom` in `[-bound, bound]`.
fn dyadic(rng: &mut impl Rng, bound: f64, denom: f64) -> f64 {
    let steps = (bound * denom) as i64;
    rng.random_range(-steps..=steps) as f64 / denom
}

fn dyadic_vec(rng: &mut impl Rng, dim: usize, bound: f64, denom: f64) -> Vec<f64> {
    (0..dim).map(|_| dyadic(rng, bound, denom)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SpaceShape {
    pub points: usize,
    pub outcomes: usize,
    pub dim: usize,
}

impl SpaceShape {
    fn validate(&self) -> Result<(), GenError> {
        if self.outcomes == 0 {
            return Err(GenError::TooSmall("outcomes", 1));
        }
        if self.dim == 0 {
            return Err(GenError::TooSmall("dim", 1));
        }
        Ok(())
    }
}

/// Random points with independent coordinates, multiples of 1/8 in `[-4, 4]`.
pub fn gen_espace(seed: u64, shape: SpaceShape) -> Result<ESpace<Euclidean>, GenError> {
    shape.validate()?;
    let mut rng = rng(seed);
    let prob = ProbSpace::new(dirichlet_probs(&mut rng, shape.outcomes))?;
    let points = (0..shape.points)
        .map(|_| {
            EPoint::new(
                (0..shape.outcomes)
                    .map(|_| dyadic_vec(&mut rng, shape.dim, 4.0, 8.0))
                    .collect(),
            )
        })
        .collect();
    Ok(ESpace::new(prob, Euclidean::new(shape.dim)?, points)?)
}

/// A normed-space instance with sample vectors; with `k`, also the linear map
/// `k·Q` for a random signed permutation `Q`.
#[derive(Debug, Clone)]
pub struct PnInstance {
    pub space: FinitePnSpace,
    pub vectors: Vec<Vector>,
    pub map: Option<AffineMap>,
}

pub fn gen_pnspace(seed: u64, shape: SpaceShape, k: Option<f64>) -> Result<PnInstance, GenError> {
    shape.validate()?;
    if let Some(k) = k {
        if !(k > 0.0 && k < 1.0) {
            return Err(GenError::InvalidK(k));
        }
    }
    let mut rng = rng(seed);
    let prob = ProbSpace::new(dirichlet_probs(&mut rng, shape.outcomes))?;
    let space = FinitePnSpace::new(prob, shape.dim, TNorm::W, TNorm::M).map_err(|_| GenError::TooSmall("dim", 1))?;
    let vectors = (0..shape.points)
        .map(|_| {
            EPoint::new(
                (0..shape.outcomes)
                    .map(|_| dyadic_vec(&mut rng, shape.dim, 4.0, 8.0))
                    .collect(),
            )
        })
        .collect();
    let map = k
        .map(|k| AffineMap::linear(scaled_signed_permutation(&mut rng, shape.dim, k)))
        .transpose()?;
    Ok(PnInstance { space, vectors, map })
}

fn scaled_signed_permutation(rng: &mut impl Rng, dim: usize, k: f64) -> Vec<Vec<f64>> {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let mut rows = vec![vec![0.0; dim]; dim];
    for (i, &j) in perm.iter().enumerate() {
        rows[i][j] = if rng.random_bool(0.5) { k } else { -k };
    }
    rows
}

#[derive(Debug, Clone, Copy)]
pub struct FixtureShape {
    pub m: usize,
    pub k: f64,
    pub points: usize,
    pub outcomes: usize,
    /// Fixed point of the map away from the origin.
    pub offset: bool,
}

/// A certified contraction instance.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub m: usize,
    pub k: f64,
    pub space: ESpace<Euclidean>,
    pub map: AffineMap,
}

/// `A` on `ℝᵈ` with `Aᵐ = ±kᵐ·I`: for `m ≥ 2` the cyclic shift
/// `e₀ → e₁ → … → eₘ₋₁ → ±kᵐ·e₀` on `d = m`; for `m = 1` the planar
/// rotation by a right angle scaled by `k`.
fn fixture_matrix(rng: &mut impl Rng, m: usize, k: f64) -> Vec<Vec<f64>> {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    if m == 1 {
        return vec![vec![0.0, -sign * k], vec![sign * k, 0.0]];
    }
    let mut rows = vec![vec![0.0; m]; m];
    for j in 0..m - 1 {
        rows[j + 1][j] = 1.0;
    }
    rows[0][m - 1] = sign * k.powi(m as i32);
    rows
}

/// Points `p(ω) = s(ω)·xₚ + z` sharing one random scale `s` and a center
/// `z`, with `f(x) = A·x + (z − A·z)`. The `xₚ` are dyadic with coordinates
/// in `[−2, 2]`, a range that shrinks on later attempts.
///
/// The family `{s·y + z}` is mapped into itself, distances within it are
/// `s(ω)·|y − y'|`, and it is therefore Menger under `M`. Each candidate is
/// accepted only after passing the `(m, k)` scaling and threshold checks on
/// its points and the `M` triangle inequality; otherwise a new candidate is
/// drawn from the same stream.
pub fn gen_fixture(seed: u64, shape: FixtureShape) -> Result<Fixture, GenError> {
    if shape.m == 0 {
        return Err(GenError::TooSmall("m", 1));
    }
    if shape.outcomes == 0 {
        return Err(GenError::TooSmall("outcomes", 1));
    }
    if shape.points < 2 {
        return Err(GenError::TooSmall("points", 2));
    }
    if !(shape.k > 0.0 && shape.k < 1.0) {
        return Err(GenError::InvalidK(shape.k));
    }
    let mut rng = rng(seed);
    let dim = shape.m.max(2);
    for attempt in 0..CERTIFY_ATTEMPTS {
        let prob = ProbSpace::new(dirichlet_probs(&mut rng, shape.outcomes))?;
        let scales: Vec<f64> = (0..shape.outcomes)
            .map(|_| rng.random_range(1..=4) as f64 / 4.0)
            .collect();
        let center = if shape.offset {
            dyadic_vec(&mut rng, dim, 2.0, 4.0)
        } else {
            vec![0.0; dim]
        };
        // distances above 1 rarely satisfy the threshold condition, so the
        // coordinate range halves every 16 failed attempts
        let bound = 2.0 / (1u32 << (attempt / 16)) as f64;
        let points = (0..shape.points)
            .map(|_| {
                let x = dyadic_vec(&mut rng, dim, bound, 16.0 / bound);
                EPoint::new(
                    scales
                        .iter()
                        .map(|s| x.iter().zip(&center).map(|(xi, zi)| s * xi + zi).collect())
                        .collect(),
                )
            })
            .collect();
        let matrix = fixture_matrix(&mut rng, shape.m, shape.k);
        let linear = AffineMap::linear(matrix.clone())?;
        let az = linear.apply_vec(&center);
        let offset: Vec<f64> = center.iter().zip(&az).map(|(z, a)| z - a).collect();
        let map = AffineMap::new(matrix, offset)?;
        let space = ESpace::new(prob, Euclidean::new(dim)?, points)?;
        if certify(&space, &map, shape.m, shape.k) {
            log::debug!("fixture certified after {} attempts", attempt + 1);
            return Ok(Fixture {
                m: shape.m,
                k: shape.k,
                space,
                map,
            });
        }
    }
    Err(GenError::NotCertified(CERTIFY_ATTEMPTS))
}

/// Scaling and threshold `(m, k)` checks on all pairs and the `M` triangle
/// inequality on the working set.
pub fn certify(space: &ESpace<Euclidean>, map: &AffineMap, m: usize, k: f64) -> bool {
    let pts = space.points();
    let b = check_mk_b(space, pts, map, m, k).is_ok_and(|r| r.passed());
    let c = b && check_mk_c(space, pts, map, m, k).is_ok_and(|r| r.passed());
    c && space
        .to_pm_space()
        .is_ok_and(|c| c.space.check_menger(TNorm::M).passed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use menger_core::pm_space::SelfMap;

    #[test]
    fn probabilities_sum_to_one() {
        let mut r = rng(3);
        for n in 1..10 {
            let p = dirichlet_probs(&mut r, n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(p.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let shape = SpaceShape {
            points: 4,
            outcomes: 3,
            dim: 2,
        };
        assert_eq!(gen_espace(1, shape).unwrap(), gen_espace(1, shape).unwrap());
        assert_ne!(gen_espace(1, shape).unwrap(), gen_espace(2, shape).unwrap());
    }

    #[test]
    fn coordinates_are_dyadic_and_bounded() {
        let s = gen_espace(5, SpaceShape { points: 6, outcomes: 4, dim: 3 }).unwrap();
        for p in s.points() {
            for x in p.coords.iter().flatten() {
                assert!(x.abs() <= 4.0 && (x * 8.0).fract() == 0.0);
            }
        }
    }

    #[test]
    fn fixture_matrix_power_scales_norms() {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = rng(0);
        for m in 1..=4 {
            let a = AffineMap::linear(fixture_matrix(&mut r, m, 0.5)).unwrap();
            let x: Vec<f64> = (0..a.dim()).map(|i| i as f64 + 1.0).collect();
            let mut y = x.clone();
            for _ in 0..m {
                y = a.apply_vec(&y);
            }
            let km = 0.5f64.powi(m as i32);
            assert!((norm(&y) - km * norm(&x)).abs() <= 1e-12, "m = {m}");
            if m >= 2 {
                let ratio: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a / b).collect();
                assert!(ratio.iter().all(|&q| q == ratio[0] && q.abs() == km), "{ratio:?}");
            }
        }
    }

    #[test]
    fn fixtures_are_certified_and_fix_their_center() {
        for m in 1..=3 {
            let shape = FixtureShape {
                m,
                k: 0.5,
                points: 4,
                outcomes: 3,
                offset: true,
            };
            let f = gen_fixture(7, shape).unwrap();
            assert!(certify(&f.space, &f.map, m, 0.5));
            let mut z = f.space.points()[0].clone();
            for _ in 0..200 {
                z = f.map.apply(&z);
            }
            let fz = f.map.apply(&z);
            for (a, b) in z.coords.iter().flatten().zip(fz.coords.iter().flatten()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let shape = FixtureShape {
            m: 2,
            k: 1.0,
            points: 3,
            outcomes: 2,
            offset: false,
        };
        assert!(matches!(gen_fixture(0, shape), Err(GenError::InvalidK(_))));
        let shape = FixtureShape { m: 0, k: 0.5, ..shape };
        assert!(matches!(gen_fixture(0, shape), Err(GenError::TooSmall("m", 1))));
    }
}
