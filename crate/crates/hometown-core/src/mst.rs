//! Kruskal's algorithm over the complete geodesic graph of a point set, and
//! cluster extraction by cutting the resulting tree.
//!
//! Cutting the `k - 1` heaviest MST edges yields the same partition as
//! single-linkage agglomerative clustering stopped at `k` clusters; the test
//! suite checks that equivalence against a naive oracle.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::geo::{haversine_km, spherical_centroid, GeoError, GeoPoint};

/// Largest point count accepted by default; the complete graph on `n` points
/// has `n(n-1)/2` edges, so unbounded inputs would allocate blindly.
pub const DEFAULT_POINT_CAP: usize = 50_000;

/// An undirected weighted edge between point indices, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight_km: f64,
}

impl Edge {
    /// Canonicalizes the endpoint order so `i < j`.
    pub fn new(a: usize, b: usize, weight_km: f64) -> Self {
        debug_assert!(a != b, "self-loops are not valid edges");
        debug_assert!(weight_km >= 0.0);
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Edge { i, j, weight_km }
    }
}

/// Total order on edges: by weight, then `(i, j)`. Weights from
/// [`haversine_km`] are never NaN, and `total_cmp` keeps the order total
/// regardless.
fn cmp_edges(a: &Edge, b: &Edge) -> Ordering {
    a.weight_km
        .total_cmp(&b.weight_km)
        .then(a.i.cmp(&b.i))
        .then(a.j.cmp(&b.j))
}

/// Union-find with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<usize>,
}

impl DisjointSet {
    /// `n` singleton sets `0..n`.
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: alloc::vec![0; n],
        }
    }

    /// Number of elements (not sets).
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x`'s set. Two passes: walk to the root, then repoint the
    /// path at it.
    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut node = x;
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Merges the sets holding `a` and `b`; returns false if they already
    /// shared one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Whether `a` and `b` are in the same set.
    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Per-cluster statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Member count; this is the "density" the predictor maximizes.
    pub size: usize,
    /// Point indices, ascending.
    pub member_indices: Vec<usize>,
    /// Spherical centroid of the members.
    pub centroid: GeoPoint,
    /// Maximum intra-cluster pairwise distance; 0 iff all members coincide.
    pub diameter_km: f64,
}

/// A total partition of point indices, produced by cutting MST edges.
///
/// Cluster ids are contiguous `0..clusters.len()`, ordered by descending
/// size, then ascending centroid latitude and longitude, then smallest
/// member index, so the labelling is fully deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    /// `assignment[p]` is the cluster id of point `p`.
    pub assignment: Vec<usize>,
    pub clusters: Vec<ClusterStats>,
    /// The removed MST edges, heaviest first.
    pub cut_edges: Vec<Edge>,
}

/// Errors from edge-list construction and cluster extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MstError {
    /// More points than the configured cap.
    InputTooLarge { points: usize, cap: usize },
    /// `k` outside `[1, n]`.
    InvalidK { k: usize, n: usize },
    /// Threshold not positive and finite.
    InvalidThreshold(f64),
    /// Degenerate geometry while computing cluster centroids.
    Geo(GeoError),
}

impl fmt::Display for MstError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MstError::InputTooLarge { points, cap } => {
                write!(f, "{points} points exceed the configured cap of {cap}")
            }
            MstError::InvalidK { k, n } => {
                write!(f, "cluster count {k} outside valid range [1, {n}]")
            }
            MstError::InvalidThreshold(t) => {
                write!(f, "cut threshold {t} km must be positive and finite")
            }
            MstError::Geo(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MstError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            MstError::Geo(e) => Some(e),
            _ => None,
        }
    }
}

impl From<GeoError> for MstError {
    fn from(e: GeoError) -> Self {
        MstError::Geo(e)
    }
}

/// All `n(n-1)/2` pairwise edges, sorted ascending by `(weight_km, i, j)`.
pub fn build_complete_edge_list(points: &[GeoPoint]) -> Result<Vec<Edge>, MstError> {
    build_complete_edge_list_with_cap(points, DEFAULT_POINT_CAP)
}

/// [`build_complete_edge_list`] with an explicit point cap.
pub fn build_complete_edge_list_with_cap(
    points: &[GeoPoint],
    cap: usize,
) -> Result<Vec<Edge>, MstError> {
    let n = points.len();
    if n > cap {
        return Err(MstError::InputTooLarge { points: n, cap });
    }
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(Edge {
                i,
                j,
                weight_km: haversine_km(points[i], points[j]),
            });
        }
    }
    edges.sort_unstable_by(cmp_edges);
    Ok(edges)
}

/// Minimum spanning tree of the complete geodesic graph: `n - 1` edges in
/// the order Kruskal accepted them (ascending weight).
///
/// With the deterministic edge order, the output is unique and reproducible
/// even when weights tie.
pub fn kruskal_mst(points: &[GeoPoint]) -> Result<Vec<Edge>, MstError> {
    kruskal_mst_with_cap(points, DEFAULT_POINT_CAP)
}

/// [`kruskal_mst`] with an explicit point cap.
pub fn kruskal_mst_with_cap(points: &[GeoPoint], cap: usize) -> Result<Vec<Edge>, MstError> {
    let edges = build_complete_edge_list_with_cap(points, cap)?;
    let n = points.len();
    let mut sets = DisjointSet::new(n);
    let mut mst = Vec::with_capacity(n.saturating_sub(1));
    for edge in edges {
        if sets.union(edge.i, edge.j) {
            mst.push(edge);
            if mst.len() + 1 == n {
                break;
            }
        }
    }
    Ok(mst)
}

/// Partition into exactly `k` clusters by deleting the `k - 1` heaviest MST
/// edges (ties broken by the deterministic edge order, heaviest first).
pub fn cut_into_k_clusters(
    points: &[GeoPoint],
    mst: &[Edge],
    k: usize,
) -> Result<ClusterSet, MstError> {
    let n = points.len();
    if k < 1 || k > n {
        return Err(MstError::InvalidK { k, n });
    }
    let mut by_weight_desc: Vec<Edge> = mst.to_vec();
    by_weight_desc.sort_unstable_by(|a, b| cmp_edges(b, a));
    let cut = by_weight_desc[..k - 1].to_vec();
    let kept = &by_weight_desc[k - 1..];
    assemble_clusters(points, kept, cut)
}

/// Partition by deleting every MST edge strictly heavier than `d_max_km`;
/// equivalent to single-linkage clustering at that distance threshold.
pub fn cut_by_threshold(
    points: &[GeoPoint],
    mst: &[Edge],
    d_max_km: f64,
) -> Result<ClusterSet, MstError> {
    if !d_max_km.is_finite() || d_max_km <= 0.0 {
        return Err(MstError::InvalidThreshold(d_max_km));
    }
    let mut cut: Vec<Edge> = mst
        .iter()
        .filter(|e| e.weight_km > d_max_km)
        .copied()
        .collect();
    cut.sort_unstable_by(|a, b| cmp_edges(b, a));
    let kept: Vec<Edge> = mst
        .iter()
        .filter(|e| e.weight_km <= d_max_km)
        .copied()
        .collect();
    assemble_clusters(points, &kept, cut)
}

fn assemble_clusters(
    points: &[GeoPoint],
    kept: &[Edge],
    cut: Vec<Edge>,
) -> Result<ClusterSet, MstError> {
    let n = points.len();
    let mut sets = DisjointSet::new(n);
    for edge in kept {
        sets.union(edge.i, edge.j);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in 0..n {
        groups.entry(sets.find(p)).or_default().push(p);
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for members in groups.into_values() {
        clusters.push(cluster_stats(points, members)?);
    }
    clusters.sort_by(|a, b| {
        b.size
            .cmp(&a.size)
            .then(a.centroid.lat_deg().total_cmp(&b.centroid.lat_deg()))
            .then(a.centroid.lon_deg().total_cmp(&b.centroid.lon_deg()))
            .then(a.member_indices[0].cmp(&b.member_indices[0]))
    });
    let mut assignment = alloc::vec![0usize; n];
    for (id, cluster) in clusters.iter().enumerate() {
        for &member in &cluster.member_indices {
            assignment[member] = id;
        }
    }
    Ok(ClusterSet {
        assignment,
        clusters,
        cut_edges: cut,
    })
}

fn cluster_stats(points: &[GeoPoint], member_indices: Vec<usize>) -> Result<ClusterStats, MstError> {
    let members: Vec<GeoPoint> = member_indices.iter().map(|&m| points[m]).collect();
    let centroid = spherical_centroid(&members)?;
    let mut diameter_km = 0.0;
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let d = haversine_km(members[a], members[b]);
            if d > diameter_km {
                diameter_km = d;
            }
        }
    }
    Ok(ClusterStats {
        size: member_indices.len(),
        member_indices,
        centroid,
        diameter_km,
    })
}
