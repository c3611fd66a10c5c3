#![allow(dead_code)]

use menger_core::espace::{EPoint, ESpace, MetricTable, ProbSpace};
use menger_core::{Ddf, FinitePmSpace};
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

/// Dyadic step functions: breakpoints on the 1/8 grid, values on the 1/16 grid.
/// Every operation the crate performs on these is exact in floating point.
pub fn ddf() -> impl Strategy<Value = Ddf> {
    (btree_set(0u32..48, 1..6), vec(0u32..=16, 6)).prop_map(|(bs, mut vs)| {
        vs.truncate(bs.len());
        vs.sort_unstable();
        Ddf::new(
            bs.into_iter().map(|b| b as f64 / 8.0).collect(),
            vs.into_iter().map(|v| v as f64 / 16.0).collect(),
        )
        .unwrap()
    })
}

/// Like [`ddf`] but with `F(∞) = 1`.
pub fn ddf_plus() -> impl Strategy<Value = Ddf> {
    ddf().prop_map(|f| {
        let mut bs = f.breakpoints().to_vec();
        let mut vs = f.values().to_vec();
        if f.tail() < 1.0 {
            bs.push(bs.last().unwrap() + 0.5);
            vs.push(1.0);
        }
        Ddf::new(bs, vs).unwrap()
    })
}

/// Probabilities that are multiples of 1/16 summing to 1.
pub fn dyadic_probs(max_outcomes: usize) -> impl Strategy<Value = ProbSpace> {
    vec(1u32..8, 1..=max_outcomes).prop_map(|w| {
        let mut cuts: Vec<u32> = w.iter().scan(0, |s, &x| {
            *s += x;
            Some(*s)
        }).collect();
        let total = *cuts.last().unwrap();
        // rescale the partition onto 16 equal parts, dropping empty cells
        for c in &mut cuts {
            *c = (*c * 16).div_ceil(total);
        }
        cuts.dedup();
        let mut prev = 0;
        let probs = cuts
            .into_iter()
            .map(|c| {
                let p = (c - prev) as f64 / 16.0;
                prev = c;
                p
            })
            .collect();
        ProbSpace::new(probs).unwrap()
    })
}

/// A random-point space over a finite metric made of points on a line with
/// dyadic positions.
pub fn line_espace(max_points: usize) -> impl Strategy<Value = ESpace<MetricTable>> {
    (dyadic_probs(4), vec(0u32..32, 2..6), 2..=max_points).prop_flat_map(|(prob, pos, npts)| {
        let n = prob.len();
        let m = pos.len();
        vec(vec(0..m, n), npts).prop_map(move |pts| {
            let table = MetricTable::new(
                pos.iter()
                    .map(|&a| pos.iter().map(|&b| (a as f64 - b as f64).abs() / 4.0).collect())
                    .collect(),
            )
            .unwrap();
            ESpace::new(prob.clone(), table, pts.into_iter().map(EPoint::new).collect()).unwrap()
        })
    })
}

/// Finite space with independent random entries.
pub fn pm_space(max_points: usize) -> impl Strategy<Value = FinitePmSpace> {
    (2..=max_points).prop_flat_map(|n| {
        vec(ddf_plus().prop_filter("distinct points", |f| !f.is_epsilon0()), n * (n - 1) / 2).prop_map(move |ds| {
            let mut it = ds.into_iter();
            let mut table = vec![vec![None; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    table[i][j] = it.next();
                }
            }
            FinitePmSpace::from_fn((0..n).map(|i| format!("p{i}")).collect(), |i, j| {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                table[a][b].clone().unwrap()
            })
            .unwrap()
        })
    })
}

/// Every point where two dyadic step functions may change, with midpoints
/// and a point past the end.
pub fn probe_points(fs: &[&Ddf], scales: &[f64]) -> Vec<f64> {
    let mut cuts = vec![];
    for f in fs {
        for &b in f.breakpoints() {
            for &s in scales {
                cuts.push(b / s);
            }
        }
    }
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = vec![];
    for w in cuts.windows(2) {
        out.push(0.5 * (w[0] + w[1]));
        out.push(w[1]);
    }
    out.push(cuts.last().unwrap() + 1.0);
    out.retain(|&t| t > 0.0);
    out
}
