//! Snapshot quality, temporal distance, penalty weights and their
//! subgradients in both Y-space and factored U-space.
//!
//! The snapshot quality is the negated weighted ℓ1 mismatch
//! `f_A(Y) = −Σ_ij |C_ij (Y_ij − A_ij)|` with modularity-style weights
//! `C_ij = |A_ij − k_i k_j / (2M)|`. The temporal distance is the ℓ1 change
//! in Y restricted to edges present in both snapshots:
//! `d = Σ_ij A'_ij A_ij |Y'_ij − Y_ij|`. Both sums run over ordered pairs;
//! the diagonal is excluded unless `include_diagonal` is set.
//!
//! All factored operations differentiate through `Y = U Uᵀ`, picking
//! `sign(0) := 0` so every returned matrix is a valid subgradient choice.

use ndarray::{Array1, Array2, ArrayView2};
use thiserror::Error;

use crate::model::{DynamicNetwork, FactorSet, Snapshot};

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("degenerate snapshot: no edges, modularity weights undefined")]
    DegenerateSnapshot,
    #[error("snapshot {t} is degenerate: no edges, modularity weights undefined")]
    DegenerateSnapshotAt { t: usize },
    #[error("factor set has {factors} snapshots, network has {network}")]
    SnapshotCountMismatch { factors: usize, network: usize },
}

/// Tunables shared by the objective and the solver.
#[derive(Debug, Clone)]
pub struct ObjectiveConfig {
    /// Smoothness multiplier γ; 0 decouples snapshots entirely.
    pub gamma: f64,
    /// When false, pairwise similarities above 1 are penalized (non-overlap
    /// mode).
    pub overlap_allowed: bool,
    /// Hinge weight for non-overlap mode; `None` means 10 × max C_ij.
    pub cap_penalty_weight: Option<f64>,
    /// Include the diagonal (with the A_ii = 1 convention) in f and d.
    pub include_diagonal: bool,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            gamma: 1.0,
            overlap_allowed: true,
            cap_penalty_weight: None,
            include_diagonal: false,
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Lazy view of the penalty weights `C_ij = |A_ij − k_i k_j / (2M)|`.
///
/// Nothing is materialized: entries are evaluated from the degrees and edge
/// count on demand, keeping memory at O(E).
#[derive(Debug, Clone, Copy)]
pub struct WeightMatrix<'a> {
    snapshot: &'a Snapshot,
    inv_two_m: f64,
    adjacency_fallback: bool,
}

impl<'a> WeightMatrix<'a> {
    /// The paper's modularity-style weights. Errors when the snapshot has no
    /// edges (M = 0 leaves the null term undefined).
    pub fn modularity(snapshot: &'a Snapshot) -> Result<Self, ObjectiveError> {
        if snapshot.edge_count() == 0 {
            return Err(ObjectiveError::DegenerateSnapshot);
        }
        Ok(WeightMatrix {
            snapshot,
            inv_two_m: 1.0 / (2.0 * snapshot.edge_count() as f64),
            adjacency_fallback: false,
        })
    }

    /// Opt-in degenerate fallback `C ≡ A` for edgeless snapshots.
    pub fn adjacency_fallback(snapshot: &'a Snapshot) -> Self {
        WeightMatrix {
            snapshot,
            inv_two_m: 0.0,
            adjacency_fallback: true,
        }
    }

    pub fn snapshot(&self) -> &'a Snapshot {
        self.snapshot
    }

    /// Weight given the adjacency value and the two degrees; the hot loops
    /// call this with values they already track.
    #[inline]
    pub fn weight_with(&self, a: f64, ki: f64, kj: f64) -> f64 {
        if self.adjacency_fallback {
            a
        } else {
            (a - ki * kj * self.inv_two_m).abs()
        }
    }

    /// `C_ij`; the diagonal uses the `A_ii = 1` convention.
    pub fn weight(&self, i: u32, j: u32) -> f64 {
        let a = if i == j || self.snapshot.has_edge(i, j) {
            1.0
        } else {
            0.0
        };
        self.weight_with(
            a,
            self.snapshot.degree(i) as f64,
            self.snapshot.degree(j) as f64,
        )
    }

    /// Exact maximum of `C_ij` over off-diagonal pairs.
    pub fn max_weight(&self) -> f64 {
        let n = self.snapshot.n();
        let mut best: f64 = 0.0;
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                best = best.max(self.weight(i, j));
            }
        }
        best
    }
}

/// Builds the lazy weight view for one snapshot; errors on M = 0.
pub fn modularity_weights(snapshot: &Snapshot) -> Result<WeightMatrix<'_>, ObjectiveError> {
    WeightMatrix::modularity(snapshot)
}

/// `f_A(Y)` for a dense (real) Y; always ≤ 0, and 0 iff `C ∘ (Y − A) = 0`.
pub fn snapshot_quality(
    y: ArrayView2<f64>,
    weights: &WeightMatrix<'_>,
    include_diagonal: bool,
) -> f64 {
    let snap = weights.snapshot();
    let n = snap.n();
    debug_assert_eq!(y.nrows(), n);
    let mut total = 0.0;
    for i in 0..n {
        let ki = snap.degree(i as u32) as f64;
        let mut neigh = snap.neighbors(i as u32).iter().peekable();
        for j in 0..n {
            if j == i {
                if include_diagonal {
                    let c = weights.weight_with(1.0, ki, ki);
                    total -= c * (y[(i, i)] - 1.0).abs();
                }
                continue;
            }
            let a = if neigh.peek() == Some(&&(j as u32)) {
                neigh.next();
                1.0
            } else {
                0.0
            };
            let c = weights.weight_with(a, ki, snap.degree(j as u32) as f64);
            total -= c * (y[(i, j)] - a).abs();
        }
    }
    total
}

/// Quality value and its factored subgradient `2 (∇_Y f) U` in one row sweep;
/// `(∇_Y f)_ij = −C_ij · sign(Y_ij − A_ij)`.
pub fn quality_value_and_subgradient(
    u: &Array2<f64>,
    weights: &WeightMatrix<'_>,
    include_diagonal: bool,
) -> (f64, Array2<f64>) {
    let snap = weights.snapshot();
    let n = snap.n();
    let r = u.ncols();
    debug_assert_eq!(u.nrows(), n);
    let mut grad = Array2::zeros((n, r));
    let mut coef = Array1::zeros(n);
    let mut total = 0.0;
    for i in 0..n {
        let y_row = u.dot(&u.row(i));
        let ki = snap.degree(i as u32) as f64;
        let mut neigh = snap.neighbors(i as u32).iter().peekable();
        for j in 0..n {
            if j == i {
                if include_diagonal {
                    let c = weights.weight_with(1.0, ki, ki);
                    let resid = y_row[i] - 1.0;
                    total -= c * resid.abs();
                    coef[i] = -c * sgn(resid);
                } else {
                    coef[i] = 0.0;
                }
                continue;
            }
            let a = if neigh.peek() == Some(&&(j as u32)) {
                neigh.next();
                1.0
            } else {
                0.0
            };
            let c = weights.weight_with(a, ki, snap.degree(j as u32) as f64);
            let resid = y_row[j] - a;
            total -= c * resid.abs();
            coef[j] = -c * sgn(resid);
        }
        let g_row = u.t().dot(&coef);
        grad.row_mut(i).assign(&(2.0 * &g_row));
    }
    (total, grad)
}

/// Factored subgradient of the snapshot quality.
pub fn quality_subgradient_factored(
    u: &Array2<f64>,
    weights: &WeightMatrix<'_>,
    include_diagonal: bool,
) -> Array2<f64> {
    quality_value_and_subgradient(u, weights, include_diagonal).1
}

fn persisting_edges<'a>(
    a_next: &'a Snapshot,
    a_prev: &'a Snapshot,
) -> impl Iterator<Item = (u32, u32)> + 'a {
    a_next.edges().filter(|&(i, j)| a_prev.has_edge(i, j))
}

/// `d(Y_next, Y_prev)` for dense (real) matrices: ℓ1 change over pairs with
/// an edge in both snapshots.
pub fn temporal_distance(
    y_next: ArrayView2<f64>,
    y_prev: ArrayView2<f64>,
    a_next: &Snapshot,
    a_prev: &Snapshot,
    include_diagonal: bool,
) -> f64 {
    let mut total = 0.0;
    for (i, j) in persisting_edges(a_next, a_prev) {
        let (i, j) = (i as usize, j as usize);
        total += 2.0 * (y_next[(i, j)] - y_prev[(i, j)]).abs();
    }
    if include_diagonal {
        for i in 0..a_next.n() {
            total += (y_next[(i, i)] - y_prev[(i, i)]).abs();
        }
    }
    total
}

/// Distance between the implicit iterates of two factors.
pub fn temporal_distance_factored(
    u_next: &Array2<f64>,
    u_prev: &Array2<f64>,
    a_next: &Snapshot,
    a_prev: &Snapshot,
    include_diagonal: bool,
) -> f64 {
    let mut total = 0.0;
    for (i, j) in persisting_edges(a_next, a_prev) {
        let (i, j) = (i as usize, j as usize);
        let delta = u_next.row(i).dot(&u_next.row(j)) - u_prev.row(i).dot(&u_prev.row(j));
        total += 2.0 * delta.abs();
    }
    if include_diagonal {
        for i in 0..a_next.n() {
            let delta = u_next.row(i).dot(&u_next.row(i)) - u_prev.row(i).dot(&u_prev.row(i));
            total += delta.abs();
        }
    }
    total
}

/// Distance value and the factored subgradients with respect to both sides:
/// `(d, 2 (mask ∘ S) U_next, −2 (mask ∘ S) U_prev)` where
/// `S_ij = sign(Y_next,ij − Y_prev,ij)` and `mask = A_next ∘ A_prev`.
pub fn distance_value_and_subgradients(
    u_next: &Array2<f64>,
    u_prev: &Array2<f64>,
    a_next: &Snapshot,
    a_prev: &Snapshot,
    include_diagonal: bool,
) -> (f64, Array2<f64>, Array2<f64>) {
    let (n, r) = (u_next.nrows(), u_next.ncols());
    debug_assert_eq!(u_prev.nrows(), n);
    let mut grad_next = Array2::zeros((n, r));
    let mut grad_prev = Array2::zeros((n, r));
    let mut total = 0.0;
    for (i, j) in persisting_edges(a_next, a_prev) {
        let (i, j) = (i as usize, j as usize);
        let delta = u_next.row(i).dot(&u_next.row(j)) - u_prev.row(i).dot(&u_prev.row(j));
        total += 2.0 * delta.abs();
        let s = sgn(delta);
        if s != 0.0 {
            // symmetric entries (i,j) and (j,i) both carry the sign
            let gn = 2.0 * s;
            let gp = -2.0 * s;
            {
                let (row_j, row_i) = (u_next.row(j).to_owned(), u_next.row(i).to_owned());
                grad_next.row_mut(i).scaled_add(gn, &row_j);
                grad_next.row_mut(j).scaled_add(gn, &row_i);
            }
            {
                let (row_j, row_i) = (u_prev.row(j).to_owned(), u_prev.row(i).to_owned());
                grad_prev.row_mut(i).scaled_add(gp, &row_j);
                grad_prev.row_mut(j).scaled_add(gp, &row_i);
            }
        }
    }
    if include_diagonal {
        for i in 0..n {
            let delta = u_next.row(i).dot(&u_next.row(i)) - u_prev.row(i).dot(&u_prev.row(i));
            total += delta.abs();
            let s = sgn(delta);
            if s != 0.0 {
                let row_n = u_next.row(i).to_owned();
                grad_next.row_mut(i).scaled_add(2.0 * s, &row_n);
                let row_p = u_prev.row(i).to_owned();
                grad_prev.row_mut(i).scaled_add(-2.0 * s, &row_p);
            }
        }
    }
    (total, grad_next, grad_prev)
}

/// Factored subgradient of `d` with respect to the first argument (`u_self`);
/// pass the two factors in either temporal order, differentiation is always
/// with respect to the first.
pub fn distance_subgradient_factored(
    u_self: &Array2<f64>,
    u_other: &Array2<f64>,
    a_self: &Snapshot,
    a_other: &Snapshot,
    include_diagonal: bool,
) -> Array2<f64> {
    distance_value_and_subgradients(u_self, u_other, a_self, a_other, include_diagonal).1
}

/// Hinge penalty for non-overlap mode: `Σ_{i≠j} max(Y_ij − 1, 0)` and its
/// factored subgradient `2 H U` with `H_ij = 1{Y_ij > 1}`.
pub fn overlap_cap_penalty(u: &Array2<f64>) -> (f64, Array2<f64>) {
    let (n, r) = (u.nrows(), u.ncols());
    let mut grad = Array2::zeros((n, r));
    let mut coef = Array1::zeros(n);
    let mut total = 0.0;
    for i in 0..n {
        let y_row = u.dot(&u.row(i));
        let mut any = false;
        for j in 0..n {
            let over = if j != i { y_row[j] - 1.0 } else { 0.0 };
            if over > 0.0 {
                total += over;
                coef[j] = 1.0;
                any = true;
            } else {
                coef[j] = 0.0;
            }
        }
        if any {
            let g_row = u.t().dot(&coef);
            grad.row_mut(i).assign(&(2.0 * &g_row));
        }
    }
    (total, grad)
}

/// Effective cap weight: the configured value or 10 × max C_ij across all
/// snapshots.
pub fn effective_cap_weight(
    net: &DynamicNetwork,
    cfg: &ObjectiveConfig,
) -> Result<f64, ObjectiveError> {
    if let Some(w) = cfg.cap_penalty_weight {
        return Ok(w);
    }
    let mut max_c: f64 = 0.0;
    for (t, snap) in net.snapshots().iter().enumerate() {
        let w = WeightMatrix::modularity(snap)
            .map_err(|_| ObjectiveError::DegenerateSnapshotAt { t })?;
        max_c = max_c.max(w.max_weight());
    }
    Ok(10.0 * max_c)
}

/// The maximization objective of the factored program:
/// `Σ_t f(U^t U^tᵀ | A^t) − γ Σ_t d(Y^{t+1}, Y^t)`, minus the weighted cap
/// penalty when overlap is disallowed.
pub fn total_objective(
    factors: &FactorSet,
    net: &DynamicNetwork,
    cfg: &ObjectiveConfig,
) -> Result<f64, ObjectiveError> {
    if factors.num_snapshots() != net.num_snapshots() {
        return Err(ObjectiveError::SnapshotCountMismatch {
            factors: factors.num_snapshots(),
            network: net.num_snapshots(),
        });
    }
    let cap_weight = if cfg.overlap_allowed {
        0.0
    } else {
        effective_cap_weight(net, cfg)?
    };
    let mut total = 0.0;
    for (t, snap) in net.snapshots().iter().enumerate() {
        let weights = WeightMatrix::modularity(snap)
            .map_err(|_| ObjectiveError::DegenerateSnapshotAt { t })?;
        let y = factors.gram(t);
        total += snapshot_quality(y.view(), &weights, cfg.include_diagonal);
        if !cfg.overlap_allowed {
            total -= cap_weight * overlap_cap_penalty(factors.factor(t)).0;
        }
    }
    for t in 0..net.num_snapshots().saturating_sub(1) {
        total -= cfg.gamma
            * temporal_distance_factored(
                factors.factor(t + 1),
                factors.factor(t),
                net.snapshot(t + 1),
                net.snapshot(t),
                cfg.include_diagonal,
            );
    }
    Ok(total)
}
