//! Class-gap, connectivity and metricity estimates on a training matrix.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Class, DissimilarityMatrix, LabeledDataset};

type Triple = (usize, usize, usize);

/// Absolute slack before a triangle-inequality failure is counted.
pub const TRIANGLE_TOL: f64 = 1e-12;

/// At most this many violating triples are listed in a [`MetricityReport`].
pub const MAX_REPORTED_TRIPLES: usize = 100;

/// Smallest cross-class dissimilarity, over ordered pairs in both directions.
///
/// A zero value contradicts non-overlapping classes and is an error.
pub fn estimate_gap(d: &LabeledDataset) -> Result<f64> {
    let m = d.matrix();
    let mut best = f64::INFINITY;
    let mut at = (0, 0);
    for i in 0..d.len() {
        let ci = d.class_of(i);
        for (j, &v) in m.row(i).iter().enumerate() {
            if d.class_of(j) != ci && v < best {
                best = v;
                at = (i, j);
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::NeedTwoClasses);
    }
    if best == 0.0 {
        return Err(Error::ZeroCrossClass {
            row: at.0,
            col: at.1,
        });
    }
    Ok(best)
}

/// Bottleneck (largest edge) of a minimum spanning tree over one class,
/// using `min(D(i,j), D(j,i))` as the edge weight. Zero for a singleton.
///
/// This is the smallest radius at which the class's proximity graph is a
/// single connected component.
pub fn estimate_connectivity(d: &LabeledDataset, class: Class) -> f64 {
    let members = d.members(class);
    mst_bottleneck(d.matrix(), &members)
}

/// Same as [`estimate_connectivity`] but resolving the class by its token.
pub fn estimate_connectivity_for(d: &LabeledDataset, token: &str) -> Result<f64> {
    Ok(estimate_connectivity(d, d.class_for(token)?))
}

// Dense Prim, O(k^2) for k members.
fn mst_bottleneck(m: &DissimilarityMatrix, members: &[usize]) -> f64 {
    let k = members.len();
    if k <= 1 {
        return 0.0;
    }
    let mut in_tree = vec![false; k];
    let mut link = vec![f64::INFINITY; k];
    let mut bottleneck = 0.0_f64;
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..k {
        let ci = members[current];
        let mut next = usize::MAX;
        let mut next_w = f64::INFINITY;
        for t in 0..k {
            if in_tree[t] {
                continue;
            }
            let w = m.sym_min(ci, members[t]);
            if w < link[t] {
                link[t] = w;
            }
            if link[t] < next_w || next == usize::MAX {
                next_w = link[t];
                next = t;
            }
        }
        in_tree[next] = true;
        bottleneck = bottleneck.max(next_w);
        current = next;
    }
    bottleneck
}

/// Symmetry and triangle-inequality census of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricityReport {
    pub symmetry_max_abs_diff: f64,
    /// Ordered triples `(i, j, k)`, pairwise distinct, with
    /// `D(i,k) > D(i,j) + D(j,k) + TRIANGLE_TOL`.
    pub triangle_violation_count: u64,
    /// First violating triples in lexicographic order, capped.
    pub violating_triples: Vec<(usize, usize, usize)>,
}

pub fn metricity_report(m: &DissimilarityMatrix) -> Result<MetricityReport> {
    if m.n_rows() != m.n_cols() {
        return Err(Error::Shape(format!(
            "metricity needs a square matrix, got {}x{}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    let n = m.n_rows();

    let mut symmetry_max_abs_diff = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            symmetry_max_abs_diff = symmetry_max_abs_diff.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }

    let per_row: Vec<(u64, Vec<Triple>)> =
        (0..n).into_par_iter().map(|i| triangle_row(m, i)).collect();

    let mut triangle_violation_count = 0;
    let mut violating_triples = Vec::new();
    for (count, triples) in per_row {
        triangle_violation_count += count;
        let room = MAX_REPORTED_TRIPLES - violating_triples.len();
        violating_triples.extend(triples.into_iter().take(room));
    }
    Ok(MetricityReport {
        symmetry_max_abs_diff,
        triangle_violation_count,
        violating_triples,
    })
}

fn violates(dik: f64, dij: f64, djk: f64) -> bool {
    dik > dij + djk + TRIANGLE_TOL
}

fn triangle_row(m: &DissimilarityMatrix, i: usize) -> (u64, Vec<Triple>) {
    let row_i = m.row(i);
    let mut count = 0u64;
    let mut triples = Vec::new();
    for j in 0..m.n_rows() {
        if j == i {
            continue;
        }
        let dij = row_i[j];
        let row_j = m.row(j);
        let mut c = row_i
            .iter()
            .zip(row_j)
            .filter(|&(&dik, &djk)| violates(dik, dij, djk))
            .count() as u64;
        // k == i or k == j are not triples
        c -= violates(row_i[i], dij, row_j[i]) as u64;
        c -= violates(row_i[j], dij, row_j[j]) as u64;
        if c > 0 && triples.len() < MAX_REPORTED_TRIPLES {
            triples.extend(
                (0..row_i.len())
                    .filter(|&k| k != i && k != j && violates(row_i[k], dij, row_j[k]))
                    .map(|k| (i, j, k))
                    .take(MAX_REPORTED_TRIPLES - triples.len()),
            );
        }
        count += c;
    }
    (count, triples)
}

/// Neighbourhood-basis membership: `D(center, other) < eps`, strictly.
pub fn neighbourhood_contains(
    m: &DissimilarityMatrix,
    center_row: usize,
    other_col: usize,
    eps: f64,
) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    if center_row >= m.n_rows() {
        return Err(Error::IndexOutOfRange {
            index: center_row,
            len: m.n_rows(),
        });
    }
    if other_col >= m.n_cols() {
        return Err(Error::IndexOutOfRange {
            index: other_col,
            len: m.n_cols(),
        });
    }
    Ok(m.get(center_row, other_col) < eps)
}

/// Off-diagonal entries that are exactly zero (duplicate objects).
pub fn zero_offdiag_count(m: &DissimilarityMatrix) -> usize {
    (0..m.n_rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, &v)| j != i && v == 0.0)
                .count()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    pub delta_hat: f64,
    pub eps_conn_a: f64,
    pub eps_conn_b: f64,
    /// `delta_hat > max(eps_conn_a, eps_conn_b)`.
    pub separable: bool,
    pub symmetry_max_abs_diff: f64,
    pub triangle_violation_count: u64,
    pub zero_offdiag_count: usize,
    pub violating_triples: Vec<(usize, usize, usize)>,
}

pub fn analyze(d: &LabeledDataset) -> Result<SeparabilityReport> {
    let delta_hat = estimate_gap(d)?;
    let eps_conn_a = estimate_connectivity(d, Class::A);
    let eps_conn_b = estimate_connectivity(d, Class::B);
    let metric = metricity_report(d.matrix())?;
    Ok(SeparabilityReport {
        delta_hat,
        eps_conn_a,
        eps_conn_b,
        separable: delta_hat > eps_conn_a.max(eps_conn_b),
        symmetry_max_abs_diff: metric.symmetry_max_abs_diff,
        triangle_violation_count: metric.triangle_violation_count,
        zero_offdiag_count: zero_offdiag_count(d.matrix()),
        violating_triples: metric.violating_triples,
    })
}
