//! Path-based dynamics: the least height one must climb from a minimum to
//! reach any vertex that comes before it in the total order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VertexId};
use crate::scalar::Scalar;

/// Largest field on which [`exhaustive_dynamics`] enumerates paths.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// A non-empty walk on the grid; consecutive vertices are adjacent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretePath(Vec<VertexId>);

impl DiscretePath {
    pub fn new<T: Scalar>(field: &ScalarField<T>, vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::usage("a path needs at least one vertex"));
        }
        for &v in &vertices {
            field.check_vertex(v)?;
        }
        if let Some(w) = vertices.windows(2).find(|w| !field.are_adjacent(w[0], w[1])) {
            return Err(Error::usage(format!(
                "path steps from {} to non-adjacent {}",
                w[0], w[1]
            )));
        }
        Ok(DiscretePath(vertices))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Concatenate two paths sharing the end/start vertex.
    pub fn join(&self, other: &DiscretePath) -> Result<DiscretePath> {
        if self.0.last() != other.0.first() {
            return Err(Error::usage("joined paths must share an endpoint"));
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Ok(DiscretePath(v))
    }
}

/// Largest value minus smallest value along the path.
pub fn effort<T: Scalar>(field: &ScalarField<T>, path: &DiscretePath) -> T {
    let (lo, hi) = path.0.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
        let x = field.value(v);
        (lo.min(x), hi.max(x))
    });
    hi - lo
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleDynamics<T> {
    /// Dynamics of the minimum, `+inf` for the least vertex of the field.
    pub value: T,
    /// Highest vertex of an optimal descending path.
    pub witness: Option<VertexId>,
}

fn require_minimum<T: Scalar>(field: &ScalarField<T>, m: VertexId) -> Result<()> {
    field.check_vertex(m)?;
    if !field.is_local_minimum(m) {
        return Err(Error::usage(format!("vertex {m} is not a local minimum")));
    }
    Ok(())
}

/// Minimax search from `m`: vertices are settled in increasing order of the
/// highest vertex on their best path from `m` (heights compared by the total
/// order), and the search stops at the first settled vertex below `m`.
pub fn dynamics_oracle<T: Scalar>(field: &ScalarField<T>, m: VertexId) -> Result<OracleDynamics<T>> {
    require_minimum(field, m)?;
    let m_rank = field.rank(m);
    if m_rank == 0 {
        return Ok(OracleDynamics {
            value: T::infinity(),
            witness: None,
        });
    }

    // Best bottleneck rank found so far for each vertex.
    let mut best = vec![usize::MAX; field.len()];
    let mut settled = vec![false; field.len()];
    let mut heap = BinaryHeap::new();
    best[m.0] = m_rank;
    heap.push(Reverse((m_rank, m.0)));

    while let Some(Reverse((bottleneck, v))) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        if field.rank(VertexId(v)) < m_rank {
            let witness = field.sorted_vertices()[bottleneck];
            return Ok(OracleDynamics {
                value: field.value(witness) - field.value(m),
                witness: Some(witness),
            });
        }
        field.for_each_neighbor(VertexId(v), |u| {
            let through = bottleneck.max(field.rank(u));
            if !settled[u.0] && through < best[u.0] {
                best[u.0] = through;
                heap.push(Reverse((through, u.0)));
            }
        });
    }
    unreachable!("grid fields are connected and m is not the least vertex")
}

/// Dynamics of `m` by enumerating every simple path that starts at `m` and
/// ends at its first vertex below `m`. Only for fields of at most
/// [`EXHAUSTIVE_LIMIT`] vertices.
pub fn exhaustive_dynamics<T: Scalar>(field: &ScalarField<T>, m: VertexId) -> Result<T> {
    if field.len() > EXHAUSTIVE_LIMIT {
        return Err(Error::usage(format!(
            "exhaustive enumeration is limited to {EXHAUSTIVE_LIMIT} vertices, field has {}",
            field.len()
        )));
    }
    require_minimum(field, m)?;
    let mut on_path = vec![false; field.len()];
    on_path[m.0] = true;
    let mut best = T::infinity();
    walk(field, m, m, field.value(m), &mut on_path, &mut best);
    Ok(best - field.value(m))
}

fn walk<T: Scalar>(
    field: &ScalarField<T>,
    start: VertexId,
    at: VertexId,
    peak: T,
    on_path: &mut [bool],
    best: &mut T,
) {
    let mut next = Vec::new();
    field.for_each_neighbor(at, |u| next.push(u));
    for u in next {
        if on_path[u.0] {
            continue;
        }
        let peak = peak.max(field.value(u));
        if field.rank(u) < field.rank(start) {
            if peak < *best {
                *best = peak;
            }
            continue;
        }
        on_path[u.0] = true;
        walk(field, start, u, peak, on_path, best);
        on_path[u.0] = false;
    }
}
