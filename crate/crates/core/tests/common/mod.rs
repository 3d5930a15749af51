//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::Path;

use rand::Rng;
use vsal_core::selection::SimilarityMatrix;
use vsal_core::synthetic::{generate, write_dataset, DatasetPaths, SyntheticSpec};

/// Random symmetric matrix with unit diagonal. When `coarse` is set the
/// off-diagonal entries come from a small grid so that objective ties occur.
#[allow(clippy::needless_range_loop)]
pub fn random_rows(rng: &mut impl Rng, m: usize, coarse: bool) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = if coarse {
                [0.0, 0.25, 0.5, 0.75, 1.0][rng.random_range(0..5)]
            } else {
                rng.random::<f64>()
            };
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    rows
}

pub fn matrix(rows: &[Vec<f64>]) -> SimilarityMatrix {
    SimilarityMatrix::from_rows(rows).unwrap()
}

/// Objective recomputed from first principles on plain index sets.
pub fn reference_objective(rows: &[Vec<f64>], chosen: &[usize], lambda_d: f64, eps: f64) -> f64 {
    let m = rows.len();
    let picked = |i: usize| chosen.contains(&i);
    let mut coverage = 0.0;
    let mut left_out = 0usize;
    for i in (0..m).filter(|&i| !picked(i)) {
        left_out += 1;
        let best = chosen
            .iter()
            .map(|&j| rows[i][j])
            .fold(f64::NEG_INFINITY, f64::max);
        coverage += if best.is_finite() { best } else { 0.0 };
    }
    let mut spread = 0.0;
    let mut pairs = 0usize;
    for &i in chosen {
        for &j in chosen {
            if i != j {
                spread += 1.0 - rows[i][j];
                pairs += 1;
            }
        }
    }
    coverage / (left_out as f64 + eps) + lambda_d * spread / (pairs as f64 + eps)
}

/// Every non-empty subset, best first: highest objective, then (within
/// 1e-12) fewest members, then lexicographically smallest index list.
pub fn brute_force_select(rows: &[Vec<f64>], lambda_d: f64, eps: f64) -> Vec<usize> {
    let m = rows.len();
    let subsets: Vec<(Vec<usize>, f64)> = (1u32..(1 << m))
        .map(|bits| {
            let s: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
            let v = reference_objective(rows, &s, lambda_d, eps);
            (s, v)
        })
        .collect();
    let top = subsets
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    subsets
        .into_iter()
        .filter(|(_, v)| top - v <= 1e-12)
        .map(|(s, _)| s)
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .unwrap()
}

pub fn synthetic_dataset(dir: &Path) -> DatasetPaths {
    write_dataset(&generate(&SyntheticSpec::default()).unwrap(), dir).unwrap()
}
