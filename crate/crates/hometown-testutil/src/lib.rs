//! Brute-force oracles and deterministic data generators for the hometown
//! test suites. Everything here is deliberately naive and structurally
//! different from the main implementations, so agreement is evidence.

use hometown_core::geo::{haversine_km, GeoPoint};
use hometown_core::mst::ClusterSet;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A uniform double in `[0, 1)` from the top 53 bits of one `next_u64`.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` seeded points with latitude in `[-85, 85]` (clear of the poles so
/// brute-force constructions stay well-conditioned) and longitude in
/// `(-180, 180]`.
pub fn random_points(seed: u64, n: usize) -> Vec<GeoPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let lat = -85.0 + 170.0 * unit(&mut rng);
            let lon = 180.0 - 360.0 * unit(&mut rng);
            GeoPoint::new(lat, lon).expect("generated coordinates are in range")
        })
        .collect()
}

/// Exact (untruncated) Pareto samples via inverse-CDF over the survival
/// function, using std's `powf` rather than the core crate's libm path.
pub fn exact_pareto_samples(seed: u64, n: usize, alpha: f64, x_min: f64) -> Vec<f64> {
    assert!(alpha > 1.0 && x_min > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u = unit(&mut rng);
            x_min * (1.0 - u).powf(-1.0 / (alpha - 1.0))
        })
        .collect()
}

/// Total MST weight by Prim's algorithm, O(n^2) with a dense best-edge
/// array; an independent cross-check for Kruskal.
pub fn prim_mst_weight(points: &[GeoPoint]) -> f64 {
    let n = points.len();
    if n <= 1 {
        return 0.0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                let d = haversine_km(points[u], points[v]);
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    total
}

/// Minimum spanning-tree weight by exhaustive enumeration of all n^(n-2)
/// labelled trees via Prüfer sequences. Only sane for n <= 7.
pub fn exhaustive_min_spanning_weight(points: &[GeoPoint]) -> f64 {
    let n = points.len();
    assert!(n <= 7, "exhaustive enumeration explodes past n = 7");
    if n <= 1 {
        return 0.0;
    }
    if n == 2 {
        return haversine_km(points[0], points[1]);
    }
    let mut best = f64::INFINITY;
    let seq_len = n - 2;
    let total: usize = n.pow(seq_len as u32);
    let mut prufer = vec![0usize; seq_len];
    for code in 0..total {
        let mut c = code;
        for slot in prufer.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let weight: f64 = prufer_edges(&prufer, n)
            .into_iter()
            .map(|(a, b)| haversine_km(points[a], points[b]))
            .sum();
        if weight < best {
            best = weight;
        }
    }
    best
}

/// Decodes a Prüfer sequence over `0..n` into the n-1 edges of its tree.
fn prufer_edges(prufer: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in prufer {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut used = vec![false; n];
    for &v in prufer {
        let leaf = (0..n)
            .find(|&u| degree[u] == 1 && !used[u])
            .expect("a valid Prüfer sequence always has a leaf");
        edges.push((leaf.min(v), leaf.max(v)));
        used[leaf] = true;
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let mut last = (0..n).filter(|&u| degree[u] == 1 && !used[u]);
    let a = last.next().expect("two vertices remain");
    let b = last.next().expect("two vertices remain");
    edges.push((a.min(b), a.max(b)));
    edges
}

/// Naive agglomerative single-linkage clustering stopped at every cluster
/// count, returned as `partitions[k - 1]` = canonical partition into `k`
/// clusters.
///
/// Each round scans all cluster pairs for the smallest connecting edge,
/// breaking ties by the `(weight, i, j)` total order, which mirrors the
/// deterministic edge order of the MST cut. No union-find, no sorting of a
/// global edge list — structurally unlike Kruskal on purpose.
pub fn single_linkage_partitions(points: &[GeoPoint]) -> Vec<Vec<Vec<usize>>> {
    let n = points.len();
    assert!(n >= 1);
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| haversine_km(points[i], points[j])).collect())
        .collect();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut partitions = vec![Vec::new(); n];
    partitions[n - 1] = canonicalize(clusters.clone());
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                for &p in &clusters[a] {
                    for &q in &clusters[b] {
                        let (i, j) = (p.min(q), p.max(q));
                        let w = dist[i][j];
                        let candidate = (w, i, j, a, b);
                        let better = match best {
                            None => true,
                            Some((bw, bi, bj, _, _)) => {
                                match w.total_cmp(&bw) {
                                    std::cmp::Ordering::Less => true,
                                    std::cmp::Ordering::Greater => false,
                                    std::cmp::Ordering::Equal => (i, j) < (bi, bj),
                                }
                            }
                        };
                        if better {
                            best = Some(candidate);
                        }
                    }
                }
            }
        }
        let (_, _, _, a, b) = best.expect("at least two clusters remain");
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        partitions[clusters.len() - 1] = canonicalize(clusters.clone());
    }
    partitions
}

/// Canonical form of a partition: members ascending inside each cluster,
/// clusters ordered by their smallest member.
pub fn canonicalize(mut partition: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for cluster in partition.iter_mut() {
        cluster.sort_unstable();
    }
    partition.sort_by_key(|c| c[0]);
    partition
}

/// The canonical partition encoded by a [`ClusterSet`].
pub fn cluster_set_partition(set: &ClusterSet) -> Vec<Vec<usize>> {
    canonicalize(set.clusters.iter().map(|c| c.member_indices.clone()).collect())
}

/// Right-continuous empirical CDF by linear scan: fraction of `values <= x`.
pub fn cdf_oracle(values: &[f64], x: f64) -> f64 {
    values.iter().filter(|&&v| v <= x).count() as f64 / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prufer_decodes_known_tree() {
        // Sequence [3, 3] over n=4: edges (0,3), (1,3), (2,3) — a star.
        let edges = prufer_edges(&[3, 3], 4);
        assert_eq!(edges, vec![(0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn exhaustive_matches_prim_on_small_instances() {
        for seed in 0..10 {
            let points = random_points(seed, 6);
            let exhaustive = exhaustive_min_spanning_weight(&points);
            let prim = prim_mst_weight(&points);
            assert!(
                (exhaustive - prim).abs() <= 1e-9 * exhaustive.max(1.0),
                "seed {seed}: {exhaustive} vs {prim}"
            );
        }
    }

    #[test]
    fn single_linkage_endpoints_are_trivial() {
        let points = random_points(3, 8);
        let partitions = single_linkage_partitions(&points);
        assert_eq!(partitions[7].len(), 8);
        assert_eq!(partitions[0].len(), 1);
        assert_eq!(partitions[0][0], (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn pareto_samples_respect_lower_bound() {
        let samples = exact_pareto_samples(5, 1000, 2.38, 1.0);
        assert!(samples.iter().all(|&s| s >= 1.0));
        // Median of Pareto(α): x_min * 2^(1/(α-1)) ≈ 1.652 for α = 2.38.
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[500];
        assert!(median > 1.4 && median < 1.9, "{median}");
    }
}
