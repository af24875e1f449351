//! Scalar fields on regular n-D grids and the strict total order on their vertices.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Linear (row-major) index of a grid vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

/// Grid adjacency.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    /// `2n` neighbors: vertices differing by one along a single axis.
    #[default]
    Axis,
    /// `3^n - 1` neighbors: every vertex of the surrounding unit cube.
    Full,
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axis" => Ok(Connectivity::Axis),
            "full" => Ok(Connectivity::Full),
            other => Err(Error::usage(format!("unknown connectivity `{other}`"))),
        }
    }
}

/// Finite real values sampled on a regular grid, together with the strict
/// total order used by every filtration in this crate.
///
/// The order compares vertices by value first. Vertices of equal value are
/// compared by their geodesic distance, inside their plateau, to the
/// plateau's lower border (the plateau vertices that touch a strictly lower
/// neighbor); a plateau without lower border is measured from its
/// index-least vertex. Remaining ties fall back to the linear index. On a
/// field without repeated values between neighbors this is plain
/// `(value, index)` order, and on any field every plateau contains at most
/// one local minimum.
#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    shape: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<T>,
    connectivity: Connectivity,
    /// Full-connectivity neighbor offsets, one entry per axis in {-1, 0, 1}.
    offsets: Vec<Vec<i8>>,
    /// Position of each vertex in the sublevel filtration.
    rank: Vec<usize>,
    /// Vertices in ascending order; inverse of `rank`.
    order: Vec<VertexId>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(shape: Vec<usize>, values: Vec<T>, connectivity: Connectivity) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::usage("a field needs at least one axis"));
        }
        if let Some(axis) = shape.iter().position(|&e| e == 0) {
            return Err(Error::usage(format!("axis {axis} has zero extent")));
        }
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .ok_or_else(|| Error::usage("field shape overflows"))?;
        if len != values.len() {
            return Err(Error::usage(format!(
                "shape {shape:?} holds {len} values but {} were given",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::usage(format!("value at index {i} is not finite")));
        }

        let mut strides = vec![1; shape.len()];
        for axis in (0..shape.len() - 1).rev() {
            strides[axis] = strides[axis + 1] * shape[axis + 1];
        }
        let offsets = match connectivity {
            Connectivity::Axis => Vec::new(),
            Connectivity::Full => cube_offsets(shape.len()),
        };

        let mut field = ScalarField {
            shape,
            strides,
            values,
            connectivity,
            offsets,
            rank: Vec::new(),
            order: Vec::new(),
        };
        field.compute_order();
        Ok(field)
    }

    /// One-dimensional field with axis connectivity.
    pub fn from_1d(values: Vec<T>) -> Result<Self> {
        let n = values.len();
        Self::new(vec![n], values, Connectivity::Axis)
    }

    /// Same values and shape, different adjacency.
    pub fn with_connectivity(&self, connectivity: Connectivity) -> Self {
        Self::new(self.shape.clone(), self.values.clone(), connectivity)
            .expect("values were validated at construction")
    }

    /// Same shape and connectivity, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.shape.clone(), values, self.connectivity)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    #[inline]
    pub fn value(&self, v: VertexId) -> T {
        self.values[v.0]
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.values.len()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "vertex {v} out of range for a field of {} vertices",
                self.len()
            )))
        }
    }

    pub fn multi_index(&self, v: VertexId) -> Vec<usize> {
        self.shape
            .iter()
            .zip(&self.strides)
            .map(|(&extent, &stride)| (v.0 / stride) % extent)
            .collect()
    }

    pub fn linear_index(&self, coords: &[usize]) -> Option<VertexId> {
        if coords.len() != self.shape.len() || coords.iter().zip(&self.shape).any(|(c, e)| c >= e) {
            return None;
        }
        Some(VertexId(
            coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum(),
        ))
    }

    /// Calls `visit` for every grid neighbor of `v`, in no particular order.
    #[inline]
    pub fn for_each_neighbor(&self, v: VertexId, mut visit: impl FnMut(VertexId)) {
        match self.connectivity {
            Connectivity::Axis => {
                for (&extent, &stride) in self.shape.iter().zip(&self.strides) {
                    let c = (v.0 / stride) % extent;
                    if c > 0 {
                        visit(VertexId(v.0 - stride));
                    }
                    if c + 1 < extent {
                        visit(VertexId(v.0 + stride));
                    }
                }
            }
            Connectivity::Full => {
                'offsets: for offset in &self.offsets {
                    let mut target = v.0 as isize;
                    for ((&d, &extent), &stride) in offset.iter().zip(&self.shape).zip(&self.strides) {
                        let c = ((v.0 / stride) % extent) as isize + d as isize;
                        if c < 0 || c >= extent as isize {
                            continue 'offsets;
                        }
                        target += d as isize * stride as isize;
                    }
                    visit(VertexId(target as usize));
                }
            }
        }
    }

    /// Grid neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(v)?;
        let mut out = Vec::with_capacity(2 * self.ndim());
        self.for_each_neighbor(v, |u| out.push(u));
        out.sort_unstable();
        Ok(out)
    }

    pub fn are_adjacent(&self, a: VertexId, b: VertexId) -> bool {
        let mut found = false;
        self.for_each_neighbor(a, |u| found |= u == b);
        found
    }

    /// Every edge `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut edges = Vec::new();
        for v in 0..self.len() {
            self.for_each_neighbor(VertexId(v), |u| {
                if u.0 > v {
                    edges.push((VertexId(v), u));
                }
            });
        }
        edges.sort_unstable();
        edges
    }

    /// Position of `v` in the sublevel filtration.
    #[inline]
    pub fn rank(&self, v: VertexId) -> usize {
        self.rank[v.0]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    #[inline]
    pub fn cmp_vertices(&self, a: VertexId, b: VertexId) -> Ordering {
        self.rank[a.0].cmp(&self.rank[b.0])
    }

    /// Strict total order: `a` comes before `b`.
    pub fn precedes(&self, a: VertexId, b: VertexId) -> Result<bool> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(Error::usage(format!(
                "vertex {a} compared with itself under a strict order"
            )));
        }
        Ok(self.rank[a.0] < self.rank[b.0])
    }

    /// All vertices sorted ascending by the total order.
    pub fn sorted_vertices(&self) -> &[VertexId] {
        &self.order
    }

    /// The least vertex of the field; the minimum that never dies.
    pub fn global_minimum(&self) -> VertexId {
        self.order[0]
    }

    #[inline]
    pub fn is_local_minimum(&self, v: VertexId) -> bool {
        let r = self.rank[v.0];
        let mut minimal = true;
        self.for_each_neighbor(v, |u| minimal &= self.rank[u.0] > r);
        minimal
    }

    /// Vertices preceding all their neighbors, sorted by the total order.
    pub fn local_minima(&self) -> Vec<VertexId> {
        self.order
            .iter()
            .copied()
            .filter(|&v| self.is_local_minimum(v))
            .collect()
    }

    fn compute_order(&mut self) {
        let n = self.values.len();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        let mut has_ties = false;
        for v in 0..n {
            let fv = self.values[v];
            let mut lower = false;
            self.for_each_neighbor(VertexId(v), |u| {
                let fu = self.values[u.0];
                lower |= fu < fv;
                has_ties |= fu == fv;
            });
            if lower {
                dist[v] = 0;
                queue.push_back(v);
            }
        }

        if has_ties {
            self.plateau_bfs(&mut dist, &mut queue);
            for seed in 0..n {
                if dist[seed] == u32::MAX {
                    dist[seed] = 0;
                    queue.push_back(seed);
                    self.plateau_bfs(&mut dist, &mut queue);
                }
            }
        } else {
            dist.iter_mut().for_each(|d| *d = 0);
        }

        let values = &self.values;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .expect("finite values")
                .then(dist[a].cmp(&dist[b]))
                .then(a.cmp(&b))
        });
        let mut rank = vec![0; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        self.rank = rank;
        self.order = order.into_iter().map(VertexId).collect();
    }

    fn plateau_bfs(&self, dist: &mut [u32], queue: &mut VecDeque<usize>) {
        while let Some(v) = queue.pop_front() {
            let fv = self.values[v];
            let next = dist[v] + 1;
            self.for_each_neighbor(VertexId(v), |u| {
                if dist[u.0] == u32::MAX && self.values[u.0] == fv {
                    dist[u.0] = next;
                    queue.push_back(u.0);
                }
            });
        }
    }
}

fn cube_offsets(ndim: usize) -> Vec<Vec<i8>> {
    let total = 3usize.pow(ndim as u32);
    (0..total)
        .filter_map(|mut code| {
            let mut offset = vec![0i8; ndim];
            for slot in offset.iter_mut().rev() {
                *slot = (code % 3) as i8 - 1;
                code /= 3;
            }
            offset.iter().any(|&d| d != 0).then_some(offset)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(v: &[usize]) -> Vec<VertexId> {
        v.iter().copied().map(VertexId).collect()
    }

    #[test]
    fn neighbors_in_1d() {
        let f = ScalarField::from_1d(vec![5.0, 1.0, 4.0, 0.0, 6.0]).unwrap();
        assert_eq!(f.neighbors(VertexId(0)).unwrap(), ids(&[1]));
        assert_eq!(f.neighbors(VertexId(2)).unwrap(), ids(&[1, 3]));
        assert!(matches!(f.neighbors(VertexId(5)), Err(Error::Usage(_))));
    }

    #[test]
    fn neighbors_in_2d() {
        let f = ScalarField::new(vec![3, 3], vec![0.0; 9], Connectivity::Axis).unwrap();
        assert_eq!(f.neighbors(VertexId(4)).unwrap(), ids(&[1, 3, 5, 7]));
        let g = f.with_connectivity(Connectivity::Full);
        assert_eq!(g.neighbors(VertexId(4)).unwrap(), ids(&[0, 1, 2, 3, 5, 6, 7, 8]));
        assert_eq!(g.neighbors(VertexId(0)).unwrap(), ids(&[1, 3, 4]));
    }

    #[test]
    fn precedes_uses_value_then_index() {
        let f = ScalarField::from_1d(vec![2.0, 1.0]).unwrap();
        assert!(f.precedes(VertexId(1), VertexId(0)).unwrap());
        let g = ScalarField::from_1d(vec![3.0, 3.0]).unwrap();
        assert!(g.precedes(VertexId(0), VertexId(1)).unwrap());
        assert!(g.precedes(VertexId(0), VertexId(0)).is_err());
    }

    #[test]
    fn sorted_order_of_small_signal() {
        let f = ScalarField::from_1d(vec![5.0, 1.0, 4.0, 0.0, 6.0]).unwrap();
        assert_eq!(f.sorted_vertices(), &ids(&[3, 1, 2, 0, 4])[..]);
        let c = ScalarField::from_1d(vec![7.0, 7.0, 7.0]).unwrap();
        assert_eq!(c.sorted_vertices(), &ids(&[0, 1, 2])[..]);
    }

    #[test]
    fn local_minima_examples() {
        let f = ScalarField::from_1d(vec![5.0, 1.0, 4.0, 0.0, 6.0]).unwrap();
        assert_eq!(f.local_minima(), ids(&[3, 1]));
        let single = ScalarField::from_1d(vec![42.0]).unwrap();
        assert_eq!(single.local_minima(), ids(&[0]));
        let ramp = ScalarField::from_1d(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ramp.local_minima(), ids(&[0]));
    }

    #[test]
    fn raised_plateau_is_not_a_minimum() {
        // Vertex 1 ties with vertex 2 and is reached from the lower border at 2.
        let f = ScalarField::from_1d(vec![5.0, 4.0, 4.0, 0.0, 6.0]).unwrap();
        assert_eq!(f.local_minima(), ids(&[3]));
        assert!(f.precedes(VertexId(2), VertexId(1)).unwrap());
    }

    #[test]
    fn flat_basin_has_one_minimum() {
        // U-shaped plateau of zeros inside a wall of ones.
        #[rustfmt::skip]
        let values = vec![
            0.0, 1.0, 0.0,
            0.0, 1.0, 0.0,
            0.0, 0.0, 0.0,
        ];
        let f = ScalarField::new(vec![3, 3], values, Connectivity::Axis).unwrap();
        assert_eq!(f.local_minima(), ids(&[0]));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(ScalarField::<f64>::new(vec![], vec![], Connectivity::Axis).is_err());
        assert!(ScalarField::new(vec![2, 0], Vec::<f64>::new(), Connectivity::Axis).is_err());
        assert!(ScalarField::new(vec![2], vec![1.0], Connectivity::Axis).is_err());
        assert!(ScalarField::from_1d(vec![1.0, f64::NAN]).is_err());
        assert!(ScalarField::from_1d(vec![f32::INFINITY]).is_err());
    }

    #[test]
    fn multi_index_round_trip() {
        let f = ScalarField::new(vec![2, 3, 4], vec![0.0f32; 24], Connectivity::Axis).unwrap();
        for v in 0..24 {
            let c = f.multi_index(VertexId(v));
            assert_eq!(f.linear_index(&c), Some(VertexId(v)));
        }
        assert_eq!(f.multi_index(VertexId(5)), vec![0, 1, 1]);
    }

    fn shape_and_values() -> impl Strategy<Value = (Vec<usize>, Vec<i32>, bool)> {
        prop::collection::vec(1usize..5, 1..4).prop_flat_map(|shape| {
            let n = shape.iter().product::<usize>();
            (Just(shape), prop::collection::vec(-3i32..4, n), any::<bool>())
        })
    }

    proptest! {
        #[test]
        fn neighbor_symmetry_and_self_exclusion((shape, values, full) in shape_and_values()) {
            let conn = if full { Connectivity::Full } else { Connectivity::Axis };
            let values = values.into_iter().map(f64::from).collect();
            let f = ScalarField::new(shape.clone(), values, conn).unwrap();
            let expected_max = match conn {
                Connectivity::Axis => 2 * shape.len(),
                Connectivity::Full => 3usize.pow(shape.len() as u32) - 1,
            };
            for v in 0..f.len() {
                let nb = f.neighbors(VertexId(v)).unwrap();
                prop_assert!(!nb.contains(&VertexId(v)));
                prop_assert!(nb.len() <= expected_max);
                let mut dedup = nb.clone();
                dedup.dedup();
                prop_assert_eq!(dedup.len(), nb.len());
                for u in nb {
                    prop_assert!(f.neighbors(u).unwrap().contains(&VertexId(v)));
                }
            }
        }

        #[test]
        fn order_is_a_value_monotone_permutation((shape, values, full) in shape_and_values()) {
            let conn = if full { Connectivity::Full } else { Connectivity::Axis };
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let f = ScalarField::new(shape, values, conn).unwrap();
            let mut seen = vec![false; f.len()];
            for w in f.sorted_vertices().windows(2) {
                prop_assert!(f.value(w[0]) <= f.value(w[1]));
            }
            for &v in f.sorted_vertices() {
                prop_assert!(!seen[v.0]);
                seen[v.0] = true;
            }
        }

        #[test]
        fn at_most_one_minimum_per_plateau((shape, values, full) in shape_and_values()) {
            let conn = if full { Connectivity::Full } else { Connectivity::Axis };
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let f = ScalarField::new(shape, values, conn).unwrap();
            let minima = f.local_minima();
            // Minima are exactly the vertices with no preceding neighbor.
            for v in 0..f.len() {
                let v = VertexId(v);
                let mut preceded = false;
                f.for_each_neighbor(v, |u| preceded |= f.rank(u) < f.rank(v));
                prop_assert_eq!(!preceded, minima.contains(&v));
            }
            // No two minima are joined by an equal-valued path.
            for (i, &a) in minima.iter().enumerate() {
                for &b in &minima[i + 1..] {
                    if f.value(a) == f.value(b) {
                        prop_assert!(!same_plateau(&f, a, b));
                    }
                }
            }
        }

        #[test]
        fn distinct_values_minima_are_strict((n, seed) in (1usize..40, any::<u64>())) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut values: Vec<f64> = (0..n).map(|i| i as f64).collect();
            values.shuffle(&mut rng);
            let f = ScalarField::from_1d(values).unwrap();
            for v in 0..n {
                let v = VertexId(v);
                let mut strict = true;
                f.for_each_neighbor(v, |u| strict &= f.value(u) > f.value(v));
                prop_assert_eq!(strict, f.is_local_minimum(v));
            }
        }
    }

    fn same_plateau(f: &ScalarField<f64>, a: VertexId, b: VertexId) -> bool {
        let level = f.value(a);
        let mut seen = vec![false; f.len()];
        let mut stack = vec![a];
        seen[a.0] = true;
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            f.for_each_neighbor(v, |u| {
                if !seen[u.0] && f.value(u) == level {
                    seen[u.0] = true;
                    stack.push(u);
                }
            });
        }
        false
    }
}
