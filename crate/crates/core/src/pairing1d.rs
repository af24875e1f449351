//! The one-dimensional pairing of a local maximum with a local minimum by
//! persistence: find the closed interval of the sublevel component through
//! the maximum, take the deepest point on each side of it, and keep the
//! shallower of the two.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VertexId};
use crate::scalar::Scalar;

/// One side of the sublevel interval around a maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// The side holds vertices other than the maximum; `rep` is the least of them.
    Bounded { rep: VertexId },
    /// The maximum sits on the grid border on this side.
    Open,
}

/// Minimum paired with the 1-D local maximum `xmax`, or `None` when `xmax`
/// lies on the grid border and so separates nothing.
///
/// The grid exterior acts as an infinitely high wall, so the sublevel
/// interval is always bounded by the data and both representatives exist
/// for every interior maximum.
pub fn pair_1d_algorithm1<T: Scalar>(
    field: &ScalarField<T>,
    xmax: VertexId,
) -> Result<Option<VertexId>> {
    if field.ndim() != 1 {
        return Err(Error::usage("the 1-D pairing needs a one-dimensional field"));
    }
    field.check_vertex(xmax)?;
    let n = field.len();
    let x = xmax.0;
    let r = field.rank(xmax);
    let precedes = |i: usize| field.rank(VertexId(i)) < r;
    let is_max = (x == 0 || precedes(x - 1)) && (x + 1 == n || precedes(x + 1));
    if !is_max {
        return Err(Error::usage(format!("vertex {xmax} is not a local maximum")));
    }

    // Closed interval [lo, hi] of the component of xmax in {v <= xmax}.
    let mut lo = x;
    while lo > 0 && precedes(lo - 1) {
        lo -= 1;
    }
    let mut hi = x;
    while hi + 1 < n && precedes(hi + 1) {
        hi += 1;
    }

    let least = |range: std::ops::Range<usize>| {
        range
            .map(VertexId)
            .min_by_key(|&v| field.rank(v))
            .expect("non-empty side")
    };
    let left = if lo < x {
        Side::Bounded { rep: least(lo..x) }
    } else {
        Side::Open
    };
    let right = if x < hi {
        Side::Bounded { rep: least(x + 1..hi + 1) }
    } else {
        Side::Open
    };

    Ok(match (left, right) {
        (Side::Bounded { rep: a }, Side::Bounded { rep: b }) => {
            Some(if field.rank(a) > field.rank(b) { a } else { b })
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(values: &[f64]) -> ScalarField<f64> {
        ScalarField::from_1d(values.to_vec()).unwrap()
    }

    #[test]
    fn interior_maximum_between_two_minima() {
        assert_eq!(
            pair_1d_algorithm1(&f(&[5.0, 1.0, 4.0, 0.0, 6.0]), VertexId(2)).unwrap(),
            Some(VertexId(1))
        );
    }

    #[test]
    fn component_reaching_both_borders() {
        assert_eq!(
            pair_1d_algorithm1(&f(&[0.0, 3.0, 1.0]), VertexId(1)).unwrap(),
            Some(VertexId(2))
        );
    }

    #[test]
    fn border_maxima_pair_nothing() {
        let g = f(&[1.0, 0.0, 1.0]);
        assert_eq!(pair_1d_algorithm1(&g, VertexId(0)).unwrap(), None);
        assert_eq!(pair_1d_algorithm1(&g, VertexId(2)).unwrap(), None);
        assert_eq!(pair_1d_algorithm1(&f(&[3.0]), VertexId(0)).unwrap(), None);
    }

    #[test]
    fn rejects_non_maxima() {
        let g = f(&[5.0, 1.0, 4.0, 0.0, 6.0]);
        assert!(pair_1d_algorithm1(&g, VertexId(1)).is_err());
        assert!(pair_1d_algorithm1(&g, VertexId(4)).is_ok());
        assert!(pair_1d_algorithm1(&g, VertexId(9)).is_err());
        let grid = ScalarField::new(vec![1, 2], vec![0.0, 1.0], Default::default()).unwrap();
        assert!(pair_1d_algorithm1(&grid, VertexId(1)).is_err());
    }
}
