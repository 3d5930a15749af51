//! Predictor ("path") subset selection.
//!
//! Pairwise similarities are averaged histogram intersections of the
//! predictors' maps. A binary mask is scored by representativeness (how well
//! the unselected predictors are covered by their closest selected one) plus
//! `lambda_d` times diversity (mean pairwise dissimilarity of the selected
//! ones), and maximized either exhaustively or by add/remove local search.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{normalize_sum, resize, SaliencyMap};

/// Objectives closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Largest path count the exhaustive solver accepts.
pub const MAX_EXHAUSTIVE_PATHS: usize = 20;

pub const DEFAULT_LAMBDA_D: f64 = 0.2;
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Symmetric matrix of pairwise predictor similarities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates symmetry, unit diagonal and range, all within 1e-9.
    pub fn new(labels: Vec<String>, entries: Vec<f64>) -> Result<Self> {
        let m = labels.len();
        if m == 0 {
            return Err(Error::InvalidArgument("similarity matrix is empty".into()));
        }
        if entries.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "similarity matrix needs {} entries, got {}",
                m * m,
                entries.len()
            )));
        }
        const TOL: f64 = 1e-9;
        for i in 0..m {
            for j in 0..m {
                let v = entries[i * m + j];
                if !v.is_finite() || !(-TOL..=1.0 + TOL).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "Sim[{i}][{j}] = {v} outside [0, 1]"
                    )));
                }
                if (v - entries[j * m + i]).abs() > TOL {
                    return Err(Error::InvalidArgument(format!(
                        "Sim is not symmetric at ({i}, {j})"
                    )));
                }
            }
            if (entries[i * m + i] - 1.0).abs() > TOL {
                return Err(Error::InvalidArgument(format!("Sim[{i}][{i}] must be 1")));
            }
        }
        Ok(Self { labels, entries })
    }

    /// Unlabelled matrix from rows; labels default to `p1..pM`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, rows.iter().flatten().copied().collect())
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m() + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Relabels paths: new index `k` holds old path `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.m();
        let mut seen = vec![false; m];
        if perm.len() != m
            || perm
                .iter()
                .any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let mut entries = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                entries[a * m + b] = self.get(perm[a], perm[b]);
            }
        }
        Ok(Self { labels, entries })
    }

    /// Reads the CSV form: a header of M names, then M rows of M reals.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let labels: Vec<String> = rdr
            .headers()
            .map_err(|_| Error::MissingHeader("predictor names".into()))?
            .iter()
            .map(str::to_string)
            .collect();
        if labels.is_empty() || labels.iter().any(String::is_empty) {
            return Err(Error::MissingHeader("predictor names".into()));
        }
        let mut entries = Vec::with_capacity(labels.len() * labels.len());
        for (row, rec) in rdr.records().enumerate() {
            let line = row + 2;
            let rec = rec.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            if rec.len() != labels.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} values, got {}", labels.len(), rec.len()),
                });
            }
            for field in rec.iter() {
                entries.push(field.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("`{field}`: {e}"),
                })?);
            }
        }
        if entries.len() != labels.len() * labels.len() {
            return Err(Error::Parse {
                line: entries.len() / labels.len() + 2,
                message: format!("expected {} rows", labels.len()),
            });
        }
        Self::new(labels, entries)
    }

    /// Writes the CSV form with round-trip exact reals.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        wtr.write_record(&self.labels).map_err(csv_err)?;
        for row in self.entries.chunks_exact(self.m()) {
            wtr.write_record(row.iter().map(|v| v.to_string()))
                .map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Averaged histogram intersection of sum-normalized maps.
///
/// `frames[k][i]` is predictor `i`'s map on frame `k`. Maps are resized to
/// the target resolution before normalization.
pub fn similarity_matrix(
    labels: Vec<String>,
    frames: &[Vec<SaliencyMap>],
    target_w: usize,
    target_h: usize,
) -> Result<SimilarityMatrix> {
    let m = labels.len();
    if frames.is_empty() {
        return Err(Error::EmptySequence);
    }
    if m == 0 {
        return Err(Error::EmptyPredictorList);
    }
    if let Some(row) = frames.iter().find(|row| row.len() != m) {
        return Err(Error::InvalidArgument(format!(
            "every frame needs {m} predictor maps, found {}",
            row.len()
        )));
    }
    let per_frame: Vec<Vec<f64>> = frames
        .par_iter()
        .map(|row| {
            let dists = row
                .iter()
                .map(|map| normalize_sum(&resize(map, target_w, target_h)?))
                .collect::<Result<Vec<_>>>()?;
            let mut inter = vec![0.0; m * m];
            for i in 0..m {
                for j in i..m {
                    let s = histogram_intersection(dists[i].values(), dists[j].values());
                    inter[i * m + j] = s;
                    inter[j * m + i] = s;
                }
            }
            Ok(inter)
        })
        .collect::<Result<Vec<_>>>()?;

    let k = per_frame.len() as f64;
    let mut entries = vec![0.0; m * m];
    for inter in &per_frame {
        for (e, v) in entries.iter_mut().zip(inter) {
            *e += v;
        }
    }
    for e in &mut entries {
        *e = (*e / k).clamp(0.0, 1.0);
    }
    SimilarityMatrix::new(labels, entries)
}

pub(crate) fn histogram_intersection(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a.min(*b)).sum()
}

/// Which predictors are kept. At least one is always selected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectionMask {
    alpha: Vec<bool>,
}

impl SelectionMask {
    pub fn new(alpha: Vec<bool>) -> Result<Self> {
        if !alpha.iter().any(|&a| a) {
            return Err(Error::InvalidArgument(
                "selection mask selects nothing".into(),
            ));
        }
        Ok(Self { alpha })
    }

    /// Mask of length `m` selecting the given zero-based indices.
    pub fn from_indices(m: usize, selected: &[usize]) -> Result<Self> {
        let mut alpha = vec![false; m];
        for &i in selected {
            if i >= m {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for {m} paths"
                )));
            }
            alpha[i] = true;
        }
        Self::new(alpha)
    }

    pub fn all(m: usize) -> Self {
        assert!(m > 0);
        Self {
            alpha: vec![true; m],
        }
    }

    /// Bit `i` of `bits` selects path `i`.
    pub(crate) fn from_bits(m: usize, bits: u32) -> Self {
        debug_assert!(bits != 0);
        Self {
            alpha: (0..m).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[bool] {
        &self.alpha
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.alpha[i]
    }

    pub fn count(&self) -> usize {
        self.alpha.iter().filter(|&&a| a).count()
    }

    /// Zero-based indices of the selected paths, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.alpha.len()).filter(|&i| self.alpha[i]).collect()
    }

    fn flipped(&self, i: usize) -> Option<Self> {
        let mut alpha = self.alpha.clone();
        alpha[i] = !alpha[i];
        Self::new(alpha).ok()
    }

    /// Tie-break order: fewer paths first, then the smaller index list.
    fn tie_key(&self) -> (usize, Vec<usize>) {
        (self.count(), self.selected())
    }
}

impl fmt::Display for SelectionMask {
    /// One-based set notation, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .selected()
            .iter()
            .map(|i| (i + 1).to_string())
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub lambda_d: f64,
    pub epsilon: f64,
}

impl SelectionParams {
    pub fn new(lambda_d: f64, epsilon: f64) -> Result<Self> {
        if !(lambda_d >= 0.0 && lambda_d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda_d must be >= 0, got {lambda_d}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        Ok(Self { lambda_d, epsilon })
    }
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            lambda_d: DEFAULT_LAMBDA_D,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

fn check_len(alpha: &SelectionMask, sim: &SimilarityMatrix) {
    assert_eq!(
        alpha.len(),
        sim.m(),
        "mask length must match the similarity matrix"
    );
}

/// Coverage of unselected paths by their most similar selected path.
pub fn representativeness(alpha: &SelectionMask, sim: &SimilarityMatrix, epsilon: f64) -> f64 {
    check_len(alpha, sim);
    let m = sim.m();
    let mut num = 0.0;
    let mut unselected = 0usize;
    for i in (0..m).filter(|&i| !alpha.is_selected(i)) {
        unselected += 1;
        num += (0..m)
            .filter(|&j| j != i && alpha.is_selected(j))
            .map(|j| sim.get(i, j))
            .fold(0.0, f64::max);
    }
    num / (unselected as f64 + epsilon)
}

/// Mean pairwise dissimilarity among selected paths.
pub fn diversity(alpha: &SelectionMask, sim: &SimilarityMatrix, epsilon: f64) -> f64 {
    check_len(alpha, sim);
    let chosen = alpha.selected();
    let mut num = 0.0;
    let mut pairs = 0usize;
    for &i in &chosen {
        for &j in &chosen {
            if i != j {
                num += 1.0 - sim.get(i, j);
                pairs += 1;
            }
        }
    }
    num / (pairs as f64 + epsilon)
}

/// Representativeness plus `lambda_d` times diversity.
pub fn objective(alpha: &SelectionMask, sim: &SimilarityMatrix, params: &SelectionParams) -> f64 {
    representativeness(alpha, sim, params.epsilon)
        + params.lambda_d * diversity(alpha, sim, params.epsilon)
}

/// True when `a` (scoring `fa`) should replace `b` (scoring `fb`).
fn beats(a: &SelectionMask, fa: f64, b: &SelectionMask, fb: f64) -> bool {
    if fa > fb + TIE_TOLERANCE {
        true
    } else if fb > fa + TIE_TOLERANCE {
        false
    } else {
        a.tie_key() < b.tie_key()
    }
}

/// Global maximizer over all non-empty masks.
///
/// Masks within [`TIE_TOLERANCE`] of the best score tie; among them the one
/// with fewer paths wins, then the lexicographically smallest index list.
pub fn select_exhaustive(
    sim: &SimilarityMatrix,
    params: &SelectionParams,
) -> Result<SelectionMask> {
    let m = sim.m();
    if m > MAX_EXHAUSTIVE_PATHS {
        return Err(Error::TooManyPaths(m));
    }
    let scored: Vec<(u32, f64)> = (1u32..(1 << m))
        .into_par_iter()
        .map(|bits| {
            (
                bits,
                objective(&SelectionMask::from_bits(m, bits), sim, params),
            )
        })
        .collect();
    let best = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let winner = scored
        .iter()
        .filter(|s| s.1 >= best - TIE_TOLERANCE)
        .map(|s| SelectionMask::from_bits(m, s.0))
        .min_by_key(SelectionMask::tie_key)
        .expect("at least one mask exists");
    Ok(winner)
}

/// Add/remove local search from the best singleton.
///
/// Each step applies the single flip that improves the objective the most
/// (by more than [`TIE_TOLERANCE`]); stops at a local optimum.
pub fn select_greedy(sim: &SimilarityMatrix, params: &SelectionParams) -> SelectionMask {
    let m = sim.m();
    let mut current = SelectionMask::from_indices(m, &[0]).expect("m >= 1");
    let mut score = objective(&current, sim, params);
    for i in 1..m {
        let cand = SelectionMask::from_indices(m, &[i]).expect("index in range");
        let f = objective(&cand, sim, params);
        if beats(&cand, f, &current, score) {
            current = cand;
            score = f;
        }
    }
    loop {
        let mut best: Option<(SelectionMask, f64)> = None;
        for i in 0..m {
            let Some(cand) = current.flipped(i) else {
                continue;
            };
            let f = objective(&cand, sim, params);
            if f <= score + TIE_TOLERANCE {
                continue;
            }
            match &best {
                Some((b, fb)) if !beats(&cand, f, b, *fb) => {}
                _ => best = Some((cand, f)),
            }
        }
        match best {
            Some((mask, f)) => {
                current = mask;
                score = f;
            }
            None => return current,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Exhaustive,
    Greedy,
}

impl Solver {
    pub fn solve(self, sim: &SimilarityMatrix, params: &SelectionParams) -> Result<SelectionMask> {
        match self {
            Solver::Exhaustive => select_exhaustive(sim, params),
            Solver::Greedy => Ok(select_greedy(sim, params)),
        }
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Solver::Exhaustive),
            "greedy" => Ok(Solver::Greedy),
            _ => Err(Error::InvalidArgument(format!("unknown solver `{s}`"))),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Exhaustive => "exhaustive",
            Solver::Greedy => "greedy",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> SimilarityMatrix {
        SimilarityMatrix::from_rows(&[
            vec![1.0, 0.9, 0.1],
            vec![0.9, 1.0, 0.1],
            vec![0.1, 0.1, 1.0],
        ])
        .unwrap()
    }

    fn mask(m: usize, one_based: &[usize]) -> SelectionMask {
        let idx: Vec<usize> = one_based.iter().map(|i| i - 1).collect();
        SelectionMask::from_indices(m, &idx).unwrap()
    }

    #[test]
    fn representativeness_examples() {
        let sim = worked();
        assert_eq!(representativeness(&SelectionMask::all(3), &sim, 1e-8), 0.0);
        let two = SimilarityMatrix::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
        assert!(
            (representativeness(&mask(2, &[1]), &two, 1e-8) - 0.9 / (1.0 + 1e-8)).abs() < 1e-15
        );
        assert!((representativeness(&mask(3, &[1, 3]), &sim, 1e-8) - 0.9).abs() < 1e-7);
    }

    #[test]
    fn diversity_examples() {
        let sim = worked();
        assert_eq!(diversity(&mask(3, &[2]), &sim, 1e-8), 0.0);
        let same = SimilarityMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(diversity(&SelectionMask::all(2), &same, 1e-8), 0.0);
        let far = SimilarityMatrix::from_rows(&[vec![1.0, 0.1], vec![0.1, 1.0]]).unwrap();
        assert!((diversity(&SelectionMask::all(2), &far, 1e-8) - 0.9).abs() < 1e-7);
    }

    #[test]
    fn objective_examples() {
        let sim = worked();
        let p = SelectionParams::default();
        assert!((objective(&mask(3, &[1, 3]), &sim, &p) - 1.08).abs() < 1e-6);
        assert!((objective(&mask(3, &[1, 2, 3]), &sim, &p) - 0.126_666_666).abs() < 1e-6);
        assert!((objective(&mask(3, &[1]), &sim, &p) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn exhaustive_examples() {
        let p = SelectionParams::default();
        assert_eq!(select_exhaustive(&worked(), &p).unwrap(), mask(3, &[1, 3]));
        let one = SimilarityMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(select_exhaustive(&one, &p).unwrap(), mask(1, &[1]));
        let ident = SimilarityMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(
            select_exhaustive(&ident, &p).unwrap(),
            SelectionMask::all(3)
        );
    }

    #[test]
    fn exhaustive_guard() {
        let n = 21;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.5 }).collect())
            .collect();
        let sim = SimilarityMatrix::from_rows(&rows).unwrap();
        assert!(matches!(
            select_exhaustive(&sim, &SelectionParams::default()),
            Err(Error::TooManyPaths(21))
        ));
        // greedy still works at this size
        assert!(select_greedy(&sim, &SelectionParams::default()).count() >= 1);
    }

    #[test]
    fn greedy_examples() {
        let p = SelectionParams::default();
        assert_eq!(select_greedy(&worked(), &p), mask(3, &[1, 3]));
        let one = SimilarityMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(select_greedy(&one, &p), mask(1, &[1]));
    }

    #[test]
    fn matrix_validation() {
        assert!(SimilarityMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(SimilarityMatrix::from_rows(&[vec![0.9, 0.5], vec![0.5, 1.0]]).is_err());
        assert!(SimilarityMatrix::from_rows(&[vec![1.0, 1.5], vec![1.5, 1.0]]).is_err());
        assert!(SelectionMask::new(vec![false, false]).is_err());
        assert!(SelectionParams::new(-0.1, 1e-8).is_err());
        assert!(SelectionParams::new(0.2, 0.0).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sim = SimilarityMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                1.0,
                0.123_456_789_012_345_6,
                0.3,
                0.123_456_789_012_345_6,
                1.0,
                1.0 / 3.0,
                0.3,
                1.0 / 3.0,
                1.0,
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        sim.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("a,b,c\n"));
        assert_eq!(SimilarityMatrix::read_csv(buf.as_slice()).unwrap(), sim);
    }

    #[test]
    fn csv_errors_carry_lines() {
        let bad = "a,b\n1,0.5\n0.5,x\n";
        assert!(matches!(
            SimilarityMatrix::read_csv(bad.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let short = "a,b\n1,0.5\n";
        assert!(matches!(
            SimilarityMatrix::read_csv(short.as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    fn point_map(w: usize, h: usize, at: (usize, usize)) -> SaliencyMap {
        SaliencyMap::from_fn(w, h, |x, y| if (x, y) == at { 1.0 } else { 0.0 })
    }

    #[test]
    fn similarity_examples() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let m = SaliencyMap::from_fn(6, 4, |x, y| (x + 2 * y) as f64 + 1.0);
        let same = similarity_matrix(labels.clone(), &[vec![m.clone(), m.clone()]], 6, 4).unwrap();
        assert!((same.get(0, 1) - 1.0).abs() < 1e-12);

        let disjoint = similarity_matrix(
            labels.clone(),
            &[vec![point_map(2, 2, (0, 0)), point_map(2, 2, (1, 1))]],
            2,
            2,
        )
        .unwrap();
        assert_eq!(disjoint.get(0, 1), 0.0);

        let uniform = SaliencyMap::new(2, 2, vec![1.0; 4]).unwrap();
        let quarter = similarity_matrix(
            labels.clone(),
            &[vec![uniform, point_map(2, 2, (1, 0))]],
            2,
            2,
        )
        .unwrap();
        assert!((quarter.get(0, 1) - 0.25).abs() < 1e-15);

        assert!(matches!(
            similarity_matrix(
                labels,
                &[vec![SaliencyMap::zeros(2, 2), point_map(2, 2, (0, 0))]],
                2,
                2
            ),
            Err(Error::AllZeroMap)
        ));
    }
}
