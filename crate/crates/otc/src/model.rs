//! Core data types: dynamic networks, covers, assignment/cover matrices and
//! the factored iterates used by the solver.

use std::collections::BTreeMap;

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("community {index} is empty")]
    EmptyCommunity { index: usize },
    #[error("member {member} out of range for n={n}")]
    MemberOutOfRange { member: u32, n: usize },
    #[error("snapshot {t} has {found} nodes, expected {expected}")]
    MismatchedNodeCount {
        t: usize,
        found: usize,
        expected: usize,
    },
    #[error("a dynamic network needs at least one snapshot")]
    NoSnapshots,
    #[error("factor matrices must share one shape, factor {t} is {found:?} not {expected:?}")]
    MismatchedFactorShape {
        t: usize,
        found: (usize, usize),
        expected: (usize, usize),
    },
}

/// One undirected, unweighted snapshot stored as sorted adjacency lists.
///
/// Self-loops are never stored; consumers that need the `A_ii = 1`
/// convention apply it themselves (see [`Snapshot::dense_with_unit_diagonal`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    neighbors: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Snapshot {
    /// Builds a snapshot from unordered node pairs. Duplicate pairs collapse,
    /// self-loops are ignored, and the adjacency is symmetrized.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                continue;
            }
            debug_assert!((u as usize) < n && (v as usize) < n);
            neighbors[u as usize].push(v);
            neighbors[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Snapshot {
            neighbors,
            edge_count: edge_count / 2,
        }
    }

    pub fn empty(n: usize) -> Self {
        Snapshot {
            neighbors: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of stored (off-diagonal) edges, the paper's `M`.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Off-diagonal degree of node `i`, the paper's `k_i`.
    pub fn degree(&self, i: u32) -> usize {
        self.neighbors[i as usize].len()
    }

    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.neighbors[i as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors[u as usize].binary_search(&v).is_ok()
    }

    /// Iterates each stored edge once as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Dense adjacency with the `A_ii = 1` convention applied.
    pub fn dense_with_unit_diagonal(&self) -> Array2<f64> {
        let n = self.n();
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = 1.0;
        }
        for (u, v) in self.edges() {
            a[(u as usize, v as usize)] = 1.0;
            a[(v as usize, u as usize)] = 1.0;
        }
        a
    }

    /// Bytes held by the adjacency lists.
    pub fn heap_bytes(&self) -> usize {
        self.neighbors
            .iter()
            .map(|l| l.capacity() * std::mem::size_of::<u32>())
            .sum::<usize>()
            + self.neighbors.capacity() * std::mem::size_of::<Vec<u32>>()
    }
}

/// An ordered sequence of snapshots over one fixed node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicNetwork {
    n: usize,
    snapshots: Vec<Snapshot>,
}

impl DynamicNetwork {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self, ModelError> {
        let first = snapshots.first().ok_or(ModelError::NoSnapshots)?;
        let n = first.n();
        for (t, s) in snapshots.iter().enumerate() {
            if s.n() != n {
                return Err(ModelError::MismatchedNodeCount {
                    t,
                    found: s.n(),
                    expected: n,
                });
            }
        }
        Ok(DynamicNetwork { n, snapshots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of snapshots, the paper's `T`.
    pub fn num_snapshots(&self) -> usize {
        self.snapshots.len()
    }

    pub fn snapshot(&self, t: usize) -> &Snapshot {
        &self.snapshots[t]
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Total stored edges across snapshots, the paper's `E`.
    pub fn total_edges(&self) -> usize {
        self.snapshots.iter().map(Snapshot::edge_count).sum()
    }
}

/// A cover with outliers: a multiset of possibly overlapping nonempty node
/// subsets. Nodes in no community are outliers.
///
/// Construction canonicalizes: members sorted and deduplicated, communities
/// ordered by (min member, size, members). Duplicate communities are kept;
/// they are meaningful (the cover matrix counts multiplicity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    n: usize,
    communities: Vec<Vec<u32>>,
}

impl Cover {
    pub fn new(n: usize, communities: Vec<Vec<u32>>) -> Result<Self, ModelError> {
        let mut canon = Vec::with_capacity(communities.len());
        for (index, mut members) in communities.into_iter().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(ModelError::EmptyCommunity { index });
            }
            if let Some(&last) = members.last() {
                if last as usize >= n {
                    return Err(ModelError::MemberOutOfRange { member: last, n });
                }
            }
            canon.push(members);
        }
        canon.sort_by(|a, b| (a[0], a.len(), a).cmp(&(b[0], b.len(), b)));
        Ok(Cover {
            n,
            communities: canon,
        })
    }

    pub fn empty(n: usize) -> Self {
        Cover {
            n,
            communities: Vec::new(),
        }
    }

    /// Inverse of the membership view: groups nodes by label. Nodes with no
    /// label become outliers. Label order (ascending) fixes community order
    /// before canonicalization.
    pub fn from_memberships<L: Ord>(
        n: usize,
        memberships: impl IntoIterator<Item = (u32, L)>,
    ) -> Result<Self, ModelError> {
        let mut groups: BTreeMap<L, Vec<u32>> = BTreeMap::new();
        for (node, label) in memberships {
            if node as usize >= n {
                return Err(ModelError::MemberOutOfRange { member: node, n });
            }
            groups.entry(label).or_default().push(node);
        }
        Cover::new(n, groups.into_values().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_communities(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[Vec<u32>] {
        &self.communities
    }

    pub fn community(&self, k: usize) -> &[u32] {
        &self.communities[k]
    }

    /// Community indices containing each node; empty entries are outliers.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (k, members) in self.communities.iter().enumerate() {
            for &i in members {
                out[i as usize].push(k);
            }
        }
        out
    }

    /// Number of communities containing each node (the diagonal of Y).
    pub fn membership_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for members in &self.communities {
            for &i in members {
                counts[i as usize] += 1;
            }
        }
        counts
    }
}

/// 0/1 node-by-community membership matrix U.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix(pub Array2<u8>);

impl AssignmentMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_communities(&self) -> usize {
        self.0.ncols()
    }

    pub fn to_real(&self) -> Array2<f64> {
        self.0.mapv(f64::from)
    }
}

/// Symmetric integer matrix with `Y_ij` = number of communities containing
/// both `i` and `j`; always `U Uᵀ` for the cover's assignment matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMatrix(pub Array2<u32>);

impl CoverMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n()).map(|i| u64::from(self.0[(i, i)])).sum()
    }

    pub fn to_real(&self) -> Array2<f64> {
        self.0.mapv(f64::from)
    }

    /// Entrywise ℓ1 distance over all ordered pairs including the diagonal.
    pub fn l1_distance(&self, other: &CoverMatrix) -> u64 {
        debug_assert_eq!(self.n(), other.n());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| u64::from(a.abs_diff(b)))
            .sum()
    }
}

/// Membership matrix of a cover: `U_ik = 1` iff node `i` is in community `k`,
/// columns in the cover's canonical community order.
pub fn assignment_of(cover: &Cover) -> AssignmentMatrix {
    let mut u = Array2::zeros((cover.n(), cover.num_communities()));
    for (k, members) in cover.communities().iter().enumerate() {
        for &i in members {
            u[(i as usize, k)] = 1;
        }
    }
    AssignmentMatrix(u)
}

/// Cover matrix `Y = U Uᵀ` counting shared communities per pair.
pub fn cover_matrix_of(cover: &Cover) -> CoverMatrix {
    let n = cover.n();
    let mut y = Array2::zeros((n, n));
    for members in cover.communities() {
        for &i in members {
            for &j in members {
                y[(i as usize, j as usize)] += 1;
            }
        }
    }
    CoverMatrix(y)
}

/// Trace norm of the cover matrix. For PSD cover matrices this equals the
/// trace, which equals the total membership count Σ_k |C_k|; it equals `n`
/// exactly when the cover is a partition of all nodes.
pub fn trace_norm_of_cover(cover: &Cover) -> u64 {
    cover
        .communities()
        .iter()
        .map(|members| members.len() as u64)
        .sum()
}

/// Per-snapshot labelled covers; labels tie communities across snapshots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverTimeline {
    n: usize,
    covers: Vec<Cover>,
    labels: Vec<Vec<u64>>,
}

impl CoverTimeline {
    /// `labels[t][k]` labels community `k` of snapshot `t`'s cover.
    pub fn new(covers: Vec<Cover>, labels: Vec<Vec<u64>>) -> Result<Self, ModelError> {
        let first = covers.first().ok_or(ModelError::NoSnapshots)?;
        let n = first.n();
        for (t, c) in covers.iter().enumerate() {
            if c.n() != n {
                return Err(ModelError::MismatchedNodeCount {
                    t,
                    found: c.n(),
                    expected: n,
                });
            }
        }
        assert_eq!(covers.len(), labels.len());
        for (t, c) in covers.iter().enumerate() {
            assert_eq!(
                c.num_communities(),
                labels[t].len(),
                "label count mismatch at snapshot {t}"
            );
        }
        Ok(CoverTimeline { n, covers, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_snapshots(&self) -> usize {
        self.covers.len()
    }

    pub fn cover(&self, t: usize) -> &Cover {
        &self.covers[t]
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn labels(&self, t: usize) -> &[u64] {
        &self.labels[t]
    }

    pub fn cover_matrices(&self) -> Vec<CoverMatrix> {
        self.covers.iter().map(cover_matrix_of).collect()
    }
}

/// Dense real factors `U^t`, one per snapshot; the implicit solver iterate is
/// `Y^t = U^t U^tᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    factors: Vec<Array2<f64>>,
}

impl FactorSet {
    pub fn new(factors: Vec<Array2<f64>>) -> Result<Self, ModelError> {
        let first = factors.first().ok_or(ModelError::NoSnapshots)?;
        let expected = (first.nrows(), first.ncols());
        for (t, f) in factors.iter().enumerate() {
            let found = (f.nrows(), f.ncols());
            if found != expected {
                return Err(ModelError::MismatchedFactorShape { t, found, expected });
            }
        }
        Ok(FactorSet { factors })
    }

    pub fn n(&self) -> usize {
        self.factors[0].nrows()
    }

    pub fn rank(&self) -> usize {
        self.factors[0].ncols()
    }

    pub fn num_snapshots(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, t: usize) -> &Array2<f64> {
        &self.factors[t]
    }

    pub fn factor_mut(&mut self, t: usize) -> &mut Array2<f64> {
        &mut self.factors[t]
    }

    pub fn factors(&self) -> &[Array2<f64>] {
        &self.factors
    }

    /// The implicit iterate `Y^t = U^t U^tᵀ`.
    pub fn gram(&self, t: usize) -> Array2<f64> {
        let u = &self.factors[t];
        u.dot(&u.t())
    }

    pub fn frobenius_sq(&self, t: usize) -> f64 {
        self.factors[t].iter().map(|x| x * x).sum()
    }
}
