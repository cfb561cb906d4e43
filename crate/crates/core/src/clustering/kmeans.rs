//! Seeded k-means with k-means++ initialization and restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lloyd iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once no centroid moves by more than this (Euclidean).
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster index per point, in `0..k` (some may be unused).
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid (lowest index on ties) and its squared distance.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// D²-weighted seeding: the first centre is uniform, each further centre is
/// drawn with probability proportional to its squared distance from the
/// nearest centre chosen so far.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, cfg: &KMeansConfig) -> KMeansResult {
    let k = centroids.len();
    let dim = points[0].len();
    let mut labels = vec![0; points.len()];
    for _ in 0..cfg.max_iter {
        for (l, p) in labels.iter_mut().zip(points) {
            *l = nearest(p, &centroids).0;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&l, p) in labels.iter().zip(points) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            let next = if counts[c] == 0 {
                // re-seed an empty cluster at the worst-served point
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, dist2(p, &centroids[labels[i]])))
                    .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a })
                    .0;
                points[far].clone()
            } else {
                sums[c].iter().map(|s| s / counts[c] as f64).collect()
            };
            shift = shift.max(dist2(&next, &centroids[c]).sqrt());
            centroids[c] = next;
        }
        if shift <= cfg.tol {
            break;
        }
    }
    let mut inertia = 0.0;
    for (l, p) in labels.iter_mut().zip(points) {
        let (c, d) = nearest(p, &centroids);
        *l = c;
        inertia += d;
    }
    KMeansResult {
        labels,
        centroids,
        inertia,
    }
}

/// Best of `cfg.restarts` seeded k-means runs by inertia (first wins ties).
///
/// Panics if `points` is empty or `k` is zero.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, cfg: &KMeansConfig) -> KMeansResult {
    assert!(
        !points.is_empty() && k > 0,
        "k-means needs points and k > 0"
    );
    let k = k.min(points.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..cfg.restarts.max(1) {
        let run = lloyd(points, seed_centroids(points, k, &mut rng), cfg);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_blobs() {
        let mut points = Vec::new();
        for i in 0..20 {
            let t = i as f64 * 0.01;
            points.push(vec![t, 0.0]);
            points.push(vec![10.0 + t, 10.0]);
            points.push(vec![-10.0, 5.0 + t]);
        }
        let r = kmeans(&points, 3, 1, &KMeansConfig::default());
        for i in 0..20 {
            for j in 0..3 {
                assert_eq!(r.labels[3 * i + j], r.labels[j]);
            }
        }
        assert_ne!(r.labels[0], r.labels[1]);
        assert_ne!(r.labels[1], r.labels[2]);
        assert_ne!(r.labels[0], r.labels[2]);
    }

    #[test]
    fn deterministic_and_handles_duplicates() {
        let points = vec![vec![1.0]; 5];
        let a = kmeans(&points, 3, 7, &KMeansConfig::default());
        assert_eq!(a, kmeans(&points, 3, 7, &KMeansConfig::default()));
        assert_eq!(a.inertia, 0.0);
        let r = kmeans(&[vec![0.0], vec![1.0]], 5, 0, &KMeansConfig::default());
        assert_eq!(r.centroids.len(), 2);
    }
}
