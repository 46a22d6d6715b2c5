//! Community detection by k-means on the balance embedding, anomaly detection
//! by hard thresholding of `Ŝ = ÂÂᵀ`, and the evaluation metrics used to
//! score both against a known truth.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{latent_matrix, EmbeddingState};
use crate::synthgen::GroundTruth;

pub const DEFAULT_RESTARTS: usize = 50;
const MAX_LLOYD_ITERS: usize = 300;
/// Largest community count handled by exhaustive permutation search.
pub const EXHAUSTIVE_MAX_M: usize = 8;

/// Hard partition of the nodes into `m` communities.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAssignment {
    /// Community of each node, `1..=m`.
    pub labels: Vec<usize>,
    /// `m × K` cluster centers.
    pub centers: DMatrix<f64>,
    pub within_ss: f64,
    /// Number of clusters left without members.
    pub empty_clusters: usize,
}

impl CommunityAssignment {
    pub fn m(&self) -> usize {
        self.centers.nrows()
    }
}

/// k-means++ seeding plus Lloyd iterations, best of `restarts` runs by
/// within-cluster sum of squares. Restart `r` uses seed `seed + r`, so the
/// result does not depend on how restarts are scheduled.
pub fn kmeans_embed(points: &DMatrix<f64>, m: usize, restarts: usize, seed: u64) -> Result<CommunityAssignment> {
    let n = points.nrows();
    if m == 0 || m > n {
        return Err(Error::InvalidConfig(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let k = points.ncols();
    let rows: Vec<f64> = (0..n).flat_map(|i| (0..k).map(move |c| points[(i, c)])).collect();
    let runs: Vec<(f64, Vec<usize>, Vec<f64>)> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| lloyd_run(&rows, n, k, m, seed.wrapping_add(r)))
        .collect();
    let (wss, assign, centers) = runs
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");

    let mut sizes = vec![0usize; m];
    for &c in &assign {
        sizes[c] += 1;
    }
    Ok(CommunityAssignment {
        labels: assign.iter().map(|&c| c + 1).collect(),
        centers: DMatrix::from_row_slice(m, k, &centers),
        within_ss: wss,
        empty_clusters: sizes.iter().filter(|&&s| s == 0).count(),
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center, ties to the lowest index.
fn nearest(p: &[f64], centers: &[f64], k: usize, m: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..m {
        let d = sq_dist(p, &centers[c * k..(c + 1) * k]);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd_run(rows: &[f64], n: usize, k: usize, m: usize, seed: u64) -> (f64, Vec<usize>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |i: usize| &rows[i * k..(i + 1) * k];

    // k-means++ seeding
    let mut centers = Vec::with_capacity(m * k);
    let first = rng.gen_range(0..n);
    centers.extend_from_slice(point(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(point(i), point(first))).collect();
    for _ in 1..m {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.extend_from_slice(point(pick));
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(point(i), point(pick)));
        }
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        let mut dist = vec![0.0; n];
        for i in 0..n {
            let (c, d) = nearest(point(i), &centers, k, m);
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
            dist[i] = d;
        }
        let mut sums = vec![0.0; m * k];
        let mut counts = vec![0usize; m];
        for i in 0..n {
            let c = assign[i];
            counts[c] += 1;
            for (s, v) in sums[c * k..(c + 1) * k].iter_mut().zip(point(i)) {
                *s += v;
            }
        }
        for c in 0..m {
            if counts[c] > 0 {
                for t in 0..k {
                    centers[c * k + t] = sums[c * k + t] / counts[c] as f64;
                }
            } else {
                // re-seed from the point farthest from its center
                let far = (0..n).max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
                if let Some(far) = far.filter(|&f| dist[f] > 0.0) {
                    centers[c * k..(c + 1) * k].copy_from_slice(point(far));
                    dist[far] = 0.0;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let wss = (0..n)
        .map(|i| sq_dist(point(i), &centers[assign[i] * k..(assign[i] + 1) * k]))
        .sum();
    (wss, assign, centers)
}

/// Permutation-minimized mis-clustering proportions `(overall, worst_case)`.
///
/// `overall = min_p (1/n) Σ_l |N_l \ N̂_{p_l}|` and
/// `worst_case = min_p max_l |N_l \ N̂_{p_l}| / |N_l|`, each minimized over
/// its own permutation. Exhaustive for `m ≤ 8`, assignment-based above.
pub fn community_error(truth: &[usize], est: &[usize], m: usize) -> Result<(f64, f64)> {
    let overlap = overlap_matrix(truth, est, m)?;
    if m <= EXHAUSTIVE_MAX_M {
        Ok(errors_exhaustive(&overlap, truth.len()))
    } else {
        Ok(errors_assignment(&overlap, truth.len()))
    }
}

/// [`community_error`] by enumerating all `m!` permutations.
pub fn community_error_exhaustive(truth: &[usize], est: &[usize], m: usize) -> Result<(f64, f64)> {
    let overlap = overlap_matrix(truth, est, m)?;
    Ok(errors_exhaustive(&overlap, truth.len()))
}

/// [`community_error`] through optimal assignment: Hungarian for the overall
/// error, bottleneck matching for the worst case.
pub fn community_error_assignment(truth: &[usize], est: &[usize], m: usize) -> Result<(f64, f64)> {
    let overlap = overlap_matrix(truth, est, m)?;
    Ok(errors_assignment(&overlap, truth.len()))
}

/// `overlap[l][k] = |N_l ∩ N̂_k|`, zero-based.
fn overlap_matrix(truth: &[usize], est: &[usize], m: usize) -> Result<Vec<Vec<usize>>> {
    if truth.len() != est.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            truth.len(),
            est.len()
        )));
    }
    let mut overlap = vec![vec![0usize; m]; m];
    for (&t, &e) in truth.iter().zip(est) {
        for label in [t, e] {
            if label == 0 || label > m {
                return Err(Error::LabelOutOfRange { label, m });
            }
        }
        overlap[t - 1][e - 1] += 1;
    }
    Ok(overlap)
}

fn misses(overlap: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let sizes: Vec<usize> = overlap.iter().map(|r| r.iter().sum()).collect();
    let ratios = overlap
        .iter()
        .zip(&sizes)
        .map(|(row, &size)| {
            row.iter()
                .map(|&o| if size == 0 { 0.0 } else { (size - o) as f64 / size as f64 })
                .collect()
        })
        .collect();
    (sizes, ratios)
}

fn errors_exhaustive(overlap: &[Vec<usize>], n: usize) -> (f64, f64) {
    let m = overlap.len();
    let (sizes, ratios) = misses(overlap);
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best_missed = usize::MAX;
    let mut best_worst = f64::INFINITY;
    loop {
        let missed: usize = (0..m).map(|l| sizes[l] - overlap[l][perm[l]]).sum();
        let worst = (0..m).map(|l| ratios[l][perm[l]]).fold(0.0, f64::max);
        best_missed = best_missed.min(missed);
        best_worst = best_worst.min(worst);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    (best_missed as f64 / n.max(1) as f64, if m == 0 { 0.0 } else { best_worst })
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn errors_assignment(overlap: &[Vec<usize>], n: usize) -> (f64, f64) {
    let m = overlap.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let (sizes, ratios) = misses(overlap);
    let weights = Matrix::from_fn(m, m, |(l, k)| overlap[l][k] as i64);
    let (matched, _) = kuhn_munkres(&weights);
    let total: usize = sizes.iter().sum();
    let overall = (total as i64 - matched) as f64 / n.max(1) as f64;

    // bottleneck: smallest threshold admitting a perfect matching
    let mut candidates: Vec<f64> = ratios.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |tau: f64| {
        let allowed = Matrix::from_fn(m, m, |(l, k)| i64::from(ratios[l][k] <= tau));
        kuhn_munkres(&allowed).0 == m as i64
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (overall, candidates[lo])
}

/// `Ŝ = ÂÂᵀ`.
pub fn anomaly_scores(a_hat: &DMatrix<f64>) -> DMatrix<f64> {
    a_hat * a_hat.transpose()
}

/// Pairs flagged as anomalous by hard thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyReport {
    pub s_hat: DMatrix<f64>,
    pub eta: f64,
    /// `(i, j)` with `i < j` and `|ŝ_ij| > eta`, in lexicographic order.
    pub flagged: Vec<(usize, usize)>,
}

pub fn threshold_anomalies(s_hat: &DMatrix<f64>, eta: f64) -> Result<AnomalyReport> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidConfig(format!("eta must be nonnegative, got {eta}")));
    }
    let n = s_hat.nrows();
    let mut flagged = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if s_hat[(i, j)].abs() > eta {
                flagged.push((i, j));
            }
        }
    }
    Ok(AnomalyReport {
        s_hat: s_hat.clone(),
        eta,
        flagged,
    })
}

/// Lower median of `|ŝ_ij|` over `i < j`.
pub fn default_eta(s_hat: &DMatrix<f64>) -> f64 {
    let n = s_hat.nrows();
    let mut vals: Vec<f64> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            vals.push(s_hat[(i, j)].abs());
        }
    }
    lower_median(&mut vals)
}

/// `fraction · max |ŝ_ij|` over `i < j`.
pub fn relative_eta(s_hat: &DMatrix<f64>, fraction: f64) -> f64 {
    let n = s_hat.nrows();
    let mut top = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            top = top.max(s_hat[(i, j)].abs());
        }
    }
    fraction * top
}

/// Element of rank `⌊(len - 1)/2⌋`; 0 for an empty slice. Reorders `vals`.
pub fn lower_median(vals: &mut [f64]) -> f64 {
    if vals.is_empty() {
        return 0.0;
    }
    let idx = (vals.len() - 1) / 2;
    let (_, median, _) = vals.select_nth_unstable_by(idx, f64::total_cmp);
    *median
}

/// `|flagged \ truth| / max(|flagged|, 1)`.
pub fn false_discovery_proportion(flagged: &[(usize, usize)], truth: &BTreeSet<(usize, usize)>) -> f64 {
    let norm = |&(i, j): &(usize, usize)| if i <= j { (i, j) } else { (j, i) };
    let distinct: BTreeSet<(usize, usize)> = flagged.iter().map(norm).collect();
    let false_hits = distinct.iter().filter(|p| !truth.contains(p)).count();
    false_hits as f64 / distinct.len().max(1) as f64
}

/// Scores of one fit against a known truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub community_error: f64,
    pub worst_case_error: f64,
    pub fdp: f64,
    pub flagged: usize,
    /// `‖M̂ - M*‖_F / n`
    pub m_error: f64,
    /// `‖L̂ - L*‖_F / n`
    pub l_error: f64,
    /// `‖Ŝ - S*‖_F / n`
    pub s_error: f64,
}

/// Runs community and anomaly detection on a fitted state and scores both.
pub fn evaluate(
    state: &EmbeddingState,
    truth: &GroundTruth,
    m: usize,
    eta: f64,
    restarts: usize,
    seed: u64,
) -> Result<MetricsReport> {
    let n = state.n();
    if truth.labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "truth has {} nodes, fit has {n}",
            truth.labels.len()
        )));
    }
    let communities = kmeans_embed(&state.b, m, restarts, seed)?;
    let (overall, worst) = community_error(&truth.labels, &communities.labels, m.max(max_label(&truth.labels)))?;
    let dec = latent_matrix(state)?;
    let report = threshold_anomalies(&dec.s, eta)?;
    let fdp = false_discovery_proportion(&report.flagged, &truth.support);

    let true_s = anomaly_scores(&truth.a_star);
    let true_l = &truth.m_star - &true_s;
    let nf = n as f64;
    Ok(MetricsReport {
        community_error: overall,
        worst_case_error: worst,
        fdp,
        flagged: report.flagged.len(),
        m_error: (&dec.m - &truth.m_star).norm() / nf,
        l_error: (&dec.l - &true_l).norm() / nf,
        s_error: (&dec.s - &true_s).norm() / nf,
    })
}

fn max_label(labels: &[usize]) -> usize {
    labels.iter().copied().max().unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn separated_points_are_recovered_exactly() {
        let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
        let mut data = Vec::new();
        let mut truth = Vec::new();
        for _ in 0..5 {
            for (c, p) in centers.iter().enumerate() {
                data.extend_from_slice(p);
                truth.push(c + 1);
            }
        }
        let pts = DMatrix::from_row_slice(15, 2, &data);
        let fit = kmeans_embed(&pts, 3, 10, 1).unwrap();
        assert_eq!(fit.within_ss, 0.0);
        assert_eq!(fit.empty_clusters, 0);
        assert_eq!(community_error(&truth, &fit.labels, 3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn single_cluster_uses_column_mean() {
        let pts = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 3.0, 2.0, 5.0, -1.0, -1.0, 1.0]);
        let fit = kmeans_embed(&pts, 1, 3, 0).unwrap();
        assert!(fit.labels.iter().all(|&l| l == 1));
        assert_abs_diff_eq!(fit.centers[(0, 0)], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.centers[(0, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn too_many_clusters_for_distinct_rows_flags_empties() {
        let pts = DMatrix::from_row_slice(4, 1, &[1.0, 1.0, 2.0, 2.0]);
        let fit = kmeans_embed(&pts, 3, 5, 0).unwrap();
        assert_eq!(fit.empty_clusters, 1);
        assert_eq!(fit.within_ss, 0.0);
        assert!(kmeans_embed(&pts, 5, 1, 0).is_err());
        assert!(kmeans_embed(&pts, 0, 1, 0).is_err());
    }

    #[test]
    fn kmeans_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = DMatrix::from_fn(40, 2, |_, _| rng.gen::<f64>());
        assert_eq!(kmeans_embed(&pts, 4, 7, 99).unwrap(), kmeans_embed(&pts, 4, 7, 99).unwrap());
    }

    /// Best within-cluster sum of squares over every labeling of the points.
    fn brute_force_partition(pts: &[[f64; 2]], m: usize) -> (f64, Vec<usize>) {
        let n = pts.len();
        let mut best = (f64::INFINITY, Vec::new());
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut labels = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                labels.push(c % m);
                c /= m;
            }
            let mut wss = 0.0;
            for k in 0..m {
                let members: Vec<&[f64; 2]> = (0..n).filter(|&i| labels[i] == k).map(|i| &pts[i]).collect();
                if members.is_empty() {
                    continue;
                }
                let cx = members.iter().map(|p| p[0]).sum::<f64>() / members.len() as f64;
                let cy = members.iter().map(|p| p[1]).sum::<f64>() / members.len() as f64;
                wss += members.iter().map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sum::<f64>();
            }
            if wss < best.0 {
                best = (wss, labels);
            }
        }
        best
    }

    #[test]
    fn gaussian_blobs_match_exhaustive_partition_on_subsample() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let means = [[0.0, 0.0], [5.0, 5.0], [-5.0, 4.0]];
        let mut pts = Vec::new();
        for i in 0..30 {
            let c = means[i % 3];
            pts.push([c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
        }
        let flat: Vec<f64> = pts.iter().flatten().copied().collect();
        let fit = kmeans_embed(&DMatrix::from_row_slice(30, 2, &flat), 3, 10, 5).unwrap();

        let sub: Vec<usize> = vec![0, 1, 2, 3, 4, 5, 9, 13, 17];
        let sub_pts: Vec<[f64; 2]> = sub.iter().map(|&i| pts[i]).collect();
        let (_, oracle) = brute_force_partition(&sub_pts, 3);
        let oracle: Vec<usize> = oracle.iter().map(|&l| l + 1).collect();
        let ours: Vec<usize> = sub.iter().map(|&i| fit.labels[i]).collect();
        assert_eq!(community_error(&oracle, &ours, 3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn community_error_identity_and_permutation() {
        let truth = vec![1, 1, 2, 2, 3, 3, 3];
        assert_eq!(community_error(&truth, &truth, 3).unwrap(), (0.0, 0.0));
        let relabeled: Vec<usize> = truth.iter().map(|&l| [0, 3, 1, 2][l]).collect();
        assert_eq!(community_error(&truth, &relabeled, 3).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn community_error_known_value() {
        // one node of community 1 lands in community 2
        let truth = vec![1, 1, 1, 1, 2, 2];
        let est = vec![1, 1, 1, 2, 2, 2];
        let (overall, worst) = community_error(&truth, &est, 2).unwrap();
        assert_abs_diff_eq!(overall, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(worst, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn assignment_agrees_with_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in 2..=6 {
            for _ in 0..20 {
                let truth: Vec<usize> = (0..25).map(|_| rng.gen_range(1..=m)).collect();
                let est: Vec<usize> = (0..25).map(|_| rng.gen_range(1..=m)).collect();
                let a = community_error_exhaustive(&truth, &est, m).unwrap();
                let b = community_error_assignment(&truth, &est, m).unwrap();
                assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-15);
                assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn large_m_uses_assignment() {
        let truth: Vec<usize> = (0..40).map(|i| i % 10 + 1).collect();
        let est: Vec<usize> = (0..40).map(|i| (i + 3) % 10 + 1).collect();
        assert_eq!(community_error(&truth, &est, 10).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn community_error_rejects_bad_labels() {
        assert!(matches!(
            community_error(&[1, 2], &[1, 4], 3),
            Err(Error::LabelOutOfRange { label: 4, m: 3 })
        ));
        assert!(community_error(&[0, 1], &[1, 1], 2).is_err());
        assert!(community_error(&[1, 1], &[1], 2).is_err());
    }

    #[test]
    fn anomaly_score_cases() {
        assert!(anomaly_scores(&DMatrix::zeros(4, 2)).iter().all(|&v| v == 0.0));
        let a = DMatrix::from_column_slice(3, 1, &[1.0, -2.0, 0.5]);
        let s = anomaly_scores(&a);
        assert_eq!(s[(0, 1)], -2.0);
        assert_eq!(s[(2, 2)], 0.25);
        assert_eq!(s.rank(1e-12), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DMatrix::from_fn(6, 3, |_, _| rng.gen::<f64>() - 0.5);
        let s = anomaly_scores(&a);
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = (0..3).map(|k| a[(i, k)] * a[(j, k)]).sum();
                assert_abs_diff_eq!(s[(i, j)], dot, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn thresholding_is_strict() {
        let a = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, -1.0, 0.5]);
        let s = anomaly_scores(&a);
        let max = (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
            .map(|(i, j)| s[(i, j)].abs())
            .fold(0.0, f64::max);
        assert!(threshold_anomalies(&s, max).unwrap().flagged.is_empty());
        assert_eq!(threshold_anomalies(&s, 0.0).unwrap().flagged.len(), 6);
        assert!(threshold_anomalies(&s, -1.0).is_err());
    }

    #[test]
    fn median_threshold_flags_about_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = DMatrix::from_fn(41, 2, |_, _| rng.gen::<f64>() - 0.5);
        let s = anomaly_scores(&a);
        let eta = default_eta(&s);
        let flagged = threshold_anomalies(&s, eta).unwrap().flagged.len();
        let pairs = 41 * 40 / 2;
        // strict inequality on the lower median leaves exactly the upper half
        assert_eq!(flagged, pairs / 2);
    }

    #[test]
    fn default_eta_medians() {
        assert_eq!(default_eta(&DMatrix::zeros(5, 5)), 0.0);
        // three off-diagonal pairs with |values| {1, 2, 3}
        let s = DMatrix::from_row_slice(3, 3, &[9.0, 1.0, -3.0, 1.0, 9.0, 2.0, -3.0, 2.0, 9.0]);
        assert_eq!(default_eta(&s), 2.0);
        // sort oracle for an even count: {1, 2, 3, 4, 5, 6}, lower median is 3
        let s = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 2.0, -3.0, 1.0, 0.0, 4.0, 5.0, 2.0, 4.0, 0.0, -6.0, -3.0, 5.0, -6.0, 0.0],
        );
        let mut sorted = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        sorted.sort_by(f64::total_cmp);
        assert_eq!(default_eta(&s), sorted[(sorted.len() - 1) / 2]);
        assert_eq!(default_eta(&s), 3.0);
    }

    #[test]
    fn lower_median_even_count() {
        let mut vals = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(lower_median(&mut vals), 2.0);
        assert_eq!(lower_median(&mut []), 0.0);
    }

    #[test]
    fn fdp_cases() {
        let truth: BTreeSet<(usize, usize)> = [(0, 1)].into_iter().collect();
        assert_eq!(false_discovery_proportion(&[], &truth), 0.0);
        assert_eq!(false_discovery_proportion(&[(0, 1)], &truth), 0.0);
        assert_eq!(false_discovery_proportion(&[(1, 0)], &truth), 0.0);
        assert_eq!(false_discovery_proportion(&[(0, 1), (2, 3)], &truth), 0.5);
    }

    #[test]
    fn relative_threshold_uses_off_diagonal_maximum() {
        let s = DMatrix::from_row_slice(3, 3, &[9.0, -2.0, 0.5, -2.0, 9.0, 1.0, 0.5, 1.0, 9.0]);
        assert_eq!(relative_eta(&s, 0.5), 1.0);
        let rep = threshold_anomalies(&s, relative_eta(&s, 0.5)).unwrap();
        assert_eq!(rep.flagged, vec![(0, 1)]);
        assert_eq!(relative_eta(&DMatrix::zeros(4, 4), 0.5), 0.0);
    }
}
