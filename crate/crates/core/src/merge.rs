//! Sublevel filtration, merge tree and the persistence pairing of minima.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::field::{ScalarField, VertexId};
use crate::scalar::Scalar;
use crate::union_find::UnionFind;

/// Two sublevel components meeting at `saddle`. The component whose minimum
/// comes first in the total order survives; the other one dies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeEvent<T> {
    pub saddle: VertexId,
    pub survivor_min: VertexId,
    pub dying_min: VertexId,
    pub level: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeTree<T> {
    /// Merge events in filtration order of their saddles. A vertex joining
    /// `k` components contributes `k - 1` consecutive events.
    pub events: Vec<MergeEvent<T>>,
    /// Local minima in filtration order.
    pub minima: Vec<VertexId>,
}

/// A local minimum and the saddle it dies at. The least minimum of the
/// field never dies: it has no saddle, no death and an infinite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePair<T> {
    pub min_vertex: VertexId,
    pub saddle_vertex: Option<VertexId>,
    pub birth: T,
    pub death: Option<T>,
    /// `death - birth`, or `+inf` for the essential pair.
    pub value: T,
}

impl<T: Scalar> PersistencePair<T> {
    pub fn finite(min_vertex: VertexId, saddle_vertex: VertexId, birth: T, death: T) -> Self {
        PersistencePair {
            min_vertex,
            saddle_vertex: Some(saddle_vertex),
            birth,
            death: Some(death),
            value: death - birth,
        }
    }

    pub fn essential(min_vertex: VertexId, birth: T) -> Self {
        PersistencePair {
            min_vertex,
            saddle_vertex: None,
            birth,
            death: None,
            value: T::infinity(),
        }
    }

    pub fn is_essential(&self) -> bool {
        self.saddle_vertex.is_none()
    }
}

/// Vertices in ascending total order: the `k`-th prefix is the sublevel set
/// after `k` insertions.
pub fn sublevel_filtration<T: Scalar>(field: &ScalarField<T>) -> Vec<VertexId> {
    field.sorted_vertices().to_vec()
}

pub fn build_merge_tree<T: Scalar>(field: &ScalarField<T>) -> MergeTree<T> {
    let n = field.len();
    let mut uf = UnionFind::new(n);
    let mut inserted = vec![false; n];
    let mut events = Vec::new();
    let mut minima = Vec::new();
    // (root, component minimum) of the components touching the new vertex.
    let mut touching: Vec<(usize, VertexId)> = Vec::with_capacity(8);

    for &v in field.sorted_vertices() {
        touching.clear();
        field.for_each_neighbor(v, |u| {
            if inserted[u.0] {
                let root = uf.find(u.0);
                if !touching.iter().any(|&(r, _)| r == root) {
                    touching.push((root, VertexId(uf.representative(root))));
                }
            }
        });
        inserted[v.0] = true;

        if touching.is_empty() {
            minima.push(v);
            continue;
        }
        touching.sort_unstable_by_key(|&(_, m)| field.rank(m));
        let (survivor_root, survivor_min) = touching[0];
        for &(_, dying_min) in touching[1..].iter().rev() {
            events.push(MergeEvent {
                saddle: v,
                survivor_min,
                dying_min,
                level: field.value(v),
            });
        }
        for &(root, _) in &touching[1..] {
            uf.union(survivor_root, root, survivor_min.0);
        }
        uf.union(survivor_root, v.0, survivor_min.0);
    }

    MergeTree { events, minima }
}

/// Pair every dying minimum with the saddle where its component merges
/// into an older one. Sorted by ascending value, essential pair last.
pub fn pair_by_persistence<T: Scalar>(field: &ScalarField<T>) -> Vec<PersistencePair<T>> {
    let tree = build_merge_tree(field);
    pairs_from_tree(field, &tree)
}

pub fn pairs_from_tree<T: Scalar>(
    field: &ScalarField<T>,
    tree: &MergeTree<T>,
) -> Vec<PersistencePair<T>> {
    let mut pairs: Vec<_> = tree
        .events
        .iter()
        .map(|e| PersistencePair::finite(e.dying_min, e.saddle, field.value(e.dying_min), e.level))
        .collect();
    let root = field.global_minimum();
    pairs.push(PersistencePair::essential(root, field.value(root)));
    sort_pairs(field, &mut pairs);
    pairs
}

/// Canonical pair order: ascending value, then the total order of minima.
pub fn sort_pairs<T: Scalar>(field: &ScalarField<T>, pairs: &mut [PersistencePair<T>]) {
    pairs.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| field.cmp_vertices(a.min_vertex, b.min_vertex))
    });
}

/// `(birth, death)` points of the finite pairs. With `essential_death`
/// set, the essential pair is emitted with that death value as well.
pub fn persistence_diagram<T: Scalar>(
    pairs: &[PersistencePair<T>],
    essential_death: Option<T>,
) -> Vec<(T, T)> {
    pairs
        .iter()
        .filter_map(|p| match (p.death, essential_death) {
            (Some(d), _) => Some((p.birth, d)),
            (None, Some(d)) => Some((p.birth, d)),
            (None, None) => None,
        })
        .collect()
}

pub fn pair_to_json<T: Scalar>(pair: &PersistencePair<T>) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("min_index".into(), json!(pair.min_vertex.0));
    if let Some(s) = pair.saddle_vertex {
        obj.insert("saddle_index".into(), json!(s.0));
    }
    obj.insert("birth".into(), json!(pair.birth.as_f64()));
    if let Some(d) = pair.death {
        obj.insert("death".into(), json!(d.as_f64()));
    }
    let value = if pair.value.is_infinite() {
        json!("inf")
    } else {
        json!(pair.value.as_f64())
    };
    obj.insert("value".into(), value);
    Value::Object(obj)
}

pub fn pairs_to_json<T: Scalar>(pairs: &[PersistencePair<T>]) -> Value {
    Value::Array(pairs.iter().map(pair_to_json).collect())
}
