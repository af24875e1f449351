//! Dynamics-based simplification, watershed basins, the granulometric curve
//! and contour saliency.

use std::collections::VecDeque;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VertexId};
use crate::merge::{pair_by_persistence, PersistencePair};
use crate::scalar::Scalar;
use crate::union_find::UnionFind;

/// Cancel every minimum whose dynamics is below `t`.
///
/// Pairs are cancelled by ascending value; each cancellation raises the
/// connected component of the pair's minimum in `[f < death]` (on the field
/// as modified so far) to the death level. `t` may not coincide with the
/// value of a pair.
pub fn filter_dynamics<T: Scalar>(field: &ScalarField<T>, t: T) -> Result<ScalarField<T>> {
    let pairs = pair_by_persistence(field);
    filter_with_pairs(field, &pairs, t)
}

fn filter_with_pairs<T: Scalar>(
    field: &ScalarField<T>,
    pairs: &[PersistencePair<T>],
    t: T,
) -> Result<ScalarField<T>> {
    if !(t.is_finite() && t > T::zero()) {
        return Err(Error::domain(format!("threshold {t} must be positive and finite")));
    }
    if let Some(p) = pairs.iter().find(|p| p.value == t) {
        return Err(Error::domain(format!(
            "threshold {t} equals the dynamics of minimum {}; pick a value between pair values",
            p.min_vertex
        )));
    }

    let mut values = field.values().to_vec();
    let mut seen = vec![false; field.len()];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for pair in pairs.iter().take_while(|p| p.value < t) {
        let death = pair.death.expect("finite pairs have a death level");
        queue.push_back(pair.min_vertex);
        seen[pair.min_vertex.0] = true;
        touched.push(pair.min_vertex);
        while let Some(v) = queue.pop_front() {
            values[v.0] = death;
            field.for_each_neighbor(v, |u| {
                if !seen[u.0] && values[u.0] < death {
                    seen[u.0] = true;
                    touched.push(u);
                    queue.push_back(u);
                }
            });
        }
        for v in touched.drain(..) {
            seen[v.0] = false;
        }
    }
    field.with_values(values)
}

/// Basin label of every vertex: the minimum the vertex drains to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WatershedLabels {
    pub labels: Vec<VertexId>,
}

impl WatershedLabels {
    pub fn label(&self, v: VertexId) -> VertexId {
        self.labels[v.0]
    }

    pub fn region_count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(v, l)| l.0 == v)
            .count()
    }

    /// Grid edges whose endpoints carry different labels.
    pub fn boundary_edges<T: Scalar>(&self, field: &ScalarField<T>) -> Vec<(VertexId, VertexId)> {
        field
            .edges()
            .into_iter()
            .filter(|&(u, v)| self.labels[u.0] != self.labels[v.0])
            .collect()
    }
}

/// Flooding watershed. Vertices are visited in filtration order and a
/// minimum opens its own basin; any other vertex takes the label of the
/// first of its already labelled neighbors in [`elder_order`].
pub fn watershed<T: Scalar>(field: &ScalarField<T>) -> WatershedLabels {
    const UNSET: usize = usize::MAX;
    let position = elder_order(field);
    let mut labels = vec![UNSET; field.len()];
    for &v in field.sorted_vertices() {
        let mut via: Option<VertexId> = None;
        field.for_each_neighbor(v, |u| {
            if labels[u.0] != UNSET && via.is_none_or(|w| position[u.0] < position[w.0]) {
                via = Some(u);
            }
        });
        labels[v.0] = via.map_or(v.0, |u| labels[u.0]);
    }
    WatershedLabels {
        labels: labels.into_iter().map(VertexId).collect(),
    }
}

/// Position of every vertex in the elder-first preorder of the merge tree.
///
/// Of two vertices, the earlier one is found by raising the level until
/// both lie in one sublevel component: just below that level, the earlier
/// vertex is in the component with the elder minimum, or the later vertex
/// is not in the sublevel set yet. Among the lower neighbors of a saddle this
/// picks the surviving component, and elsewhere the branch closest to the
/// elder minimum. The order only depends on how components merge, so raising
/// a cancelled basin to its saddle level does not change it outside the basin.
pub fn elder_order<T: Scalar>(field: &ScalarField<T>) -> Vec<usize> {
    let n = field.len();
    let mut uf = UnionFind::new(n);
    let mut inserted = vec![false; n];
    // Per branch (keyed by its minimum): (rank, kind, tie, id); kind 0 is a
    // child branch hanging at the saddle of that rank, kind 1 a vertex.
    let mut items: Vec<Vec<(usize, u8, usize, usize)>> = vec![Vec::new(); n];
    let mut touching: Vec<usize> = Vec::with_capacity(8);

    for &v in field.sorted_vertices() {
        touching.clear();
        field.for_each_neighbor(v, |u| {
            if inserted[u.0] {
                let m = uf.representative(u.0);
                if !touching.contains(&m) {
                    touching.push(m);
                }
            }
        });
        inserted[v.0] = true;
        let rv = field.rank(v);
        let Some(&survivor) = touching.iter().min_by_key(|&&m| field.rank(VertexId(m))) else {
            items[v.0].push((rv, 1, 0, v.0));
            continue;
        };
        for &m in &touching {
            if m != survivor {
                items[survivor].push((rv, 0, field.rank(VertexId(m)), m));
            }
            uf.union(survivor, m, survivor);
        }
        uf.union(survivor, v.0, survivor);
        items[survivor].push((rv, 1, 0, v.0));
    }

    let mut position = vec![0; n];
    let mut next = 0;
    let mut stack = vec![(field.global_minimum().0, 0)];
    for list in &mut items {
        list.sort_unstable();
    }
    while let Some((branch, k)) = stack.pop() {
        let Some(&(_, kind, _, id)) = items[branch].get(k) else {
            continue;
        };
        stack.push((branch, k + 1));
        if kind == 0 {
            stack.push((id, 0));
        } else {
            position[id] = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, n);
    position
}

/// Number of minima whose dynamics is at least `t`, as a step function of `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GranulometricCurve<T> {
    /// Distinct finite pair values, ascending.
    pub breakpoints: Vec<T>,
    /// `counts[k]` holds for `breakpoints[k-1] < t <= breakpoints[k]`
    /// (with open ends), so `counts.len() == breakpoints.len() + 1`.
    pub counts: Vec<usize>,
}

impl<T: Scalar> GranulometricCurve<T> {
    pub fn count_at(&self, t: T) -> usize {
        let k = self.breakpoints.partition_point(|&b| b < t);
        self.counts[k]
    }
}

pub fn granulometric_curve<T: Scalar>(pairs: &[PersistencePair<T>]) -> GranulometricCurve<T> {
    let mut finite: Vec<T> = pairs
        .iter()
        .filter(|p| !p.is_essential())
        .map(|p| p.value)
        .collect();
    finite.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut breakpoints: Vec<T> = Vec::new();
    let mut counts = vec![pairs.len()];
    for (i, &v) in finite.iter().enumerate() {
        if breakpoints.last() == Some(&v) {
            *counts.last_mut().unwrap() -= 1;
        } else {
            breakpoints.push(v);
            counts.push(pairs.len() - i - 1);
        }
    }
    GranulometricCurve {
        breakpoints,
        counts,
    }
}

/// Per-edge contour strength.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap<T> {
    pub shape: Vec<usize>,
    /// Every grid edge `(u, v, strength)` with `u < v`, sorted.
    pub edges: Vec<(VertexId, VertexId, T)>,
}

impl<T: Scalar> SaliencyMap<T> {
    /// Edges with strength at least `t`.
    pub fn threshold(&self, t: T) -> Vec<(VertexId, VertexId)> {
        self.edges
            .iter()
            .filter(|e| e.2 > T::zero() && e.2 >= t)
            .map(|e| (e.0, e.1))
            .collect()
    }

    /// `{"[u,v]": strength}` over the non-zero edges.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for &(u, v, s) in &self.edges {
            if s > T::zero() {
                let value = if s.is_infinite() {
                    Value::from("inf")
                } else {
                    Value::from(s.as_f64())
                };
                map.insert(format!("[{u},{v}]"), value);
            }
        }
        Value::Object(map)
    }

    /// Interleaved grid of extent `2e - 1` per axis: vertices at even
    /// coordinates hold 0, an edge sits at the sum of its endpoint
    /// coordinates. Diagonal edges crossing at the same cell keep the maximum.
    pub fn to_interleaved_field(&self) -> Result<ScalarField<T>> {
        let doubled: Vec<usize> = self.shape.iter().map(|&e| 2 * e - 1).collect();
        let mut strides = vec![1; doubled.len()];
        for axis in (0..doubled.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * doubled[axis + 1];
        }
        let mut src_strides = vec![1; self.shape.len()];
        for axis in (0..self.shape.len().saturating_sub(1)).rev() {
            src_strides[axis] = src_strides[axis + 1] * self.shape[axis + 1];
        }
        let coords = |v: VertexId| -> Vec<usize> {
            self.shape
                .iter()
                .zip(&src_strides)
                .map(|(&e, &s)| (v.0 / s) % e)
                .collect()
        };
        let mut values = vec![T::zero(); doubled.iter().product()];
        for &(u, v, s) in &self.edges {
            let (cu, cv) = (coords(u), coords(v));
            let at: usize = cu
                .iter()
                .zip(&cv)
                .zip(&strides)
                .map(|((a, b), st)| (a + b) * st)
                .sum();
            values[at] = values[at].max(s);
        }
        ScalarField::new(doubled, values, Default::default())
    }
}

/// Contour saliency in closed form.
///
/// Minima are cancelled by ascending dynamics; a cancelled basin joins the
/// merged basin that holds its saddle. The strength of an edge between two
/// watershed basins is the dynamics at which they end up in the same merged
/// basin, and 0 inside a basin.
pub fn saliency<T: Scalar>(field: &ScalarField<T>) -> SaliencyMap<T> {
    let labels = watershed(field);
    let pairs = pair_by_persistence(field);

    let n = field.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut time = vec![T::infinity(); n];
    let mut merged = UnionFind::new(n);
    for pair in pairs.iter().filter(|p| !p.is_essential()) {
        let a = pair.min_vertex.0;
        let saddle = pair.saddle_vertex.expect("finite pair");
        let absorber = merged.representative(labels.label(saddle).0);
        debug_assert_ne!(absorber, a, "a saddle is labelled from the surviving side");
        parent[a] = Some(absorber);
        time[a] = pair.value;
        merged.union(a, absorber, absorber);
    }

    let join_time = |mut p: usize, mut q: usize| -> T {
        let mut t = T::zero();
        while p != q {
            let step = if time[p] <= time[q] { &mut p } else { &mut q };
            t = t.max(time[*step]);
            *step = parent[*step].expect("all basins share the essential root");
        }
        t
    };

    let edges = field
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (labels.label(u).0, labels.label(v).0);
            let s = if a == b { T::zero() } else { join_time(a, b) };
            (u, v, s)
        })
        .collect();
    SaliencyMap {
        shape: field.shape().to_vec(),
        edges,
    }
}

/// Output of the simplification pipeline.
#[derive(Clone, Debug)]
pub struct Segmentation<T> {
    pub filtered: ScalarField<T>,
    pub labels: WatershedLabels,
    pub pairs: Vec<PersistencePair<T>>,
    pub curve: GranulometricCurve<T>,
}

impl<T> Segmentation<T> {
    pub fn region_count(&self) -> usize {
        self.labels.region_count()
    }
}

/// Simplify at `t`, then label basins and recompute pairs and curve on the
/// simplified field.
pub fn segment_pipeline<T: Scalar>(field: &ScalarField<T>, t: T) -> Result<Segmentation<T>> {
    let filtered = filter_dynamics(field, t)?;
    let labels = watershed(&filtered);
    let pairs = pair_by_persistence(&filtered);
    let curve = granulometric_curve(&pairs);
    Ok(Segmentation {
        filtered,
        labels,
        pairs,
        curve,
    })
}
