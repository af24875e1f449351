//! Pairing of local minima with saddles on n-D scalar grids, computed two
//! ways: by morphological dynamics (flooding, and a minimax path search) and
//! by 0-dimensional sublevel persistence (union-find with the elder rule).
//! The two pairings coincide; [`equivalence`] checks that on generated
//! fields. On top of the pairing sit the dynamics filter, watershed,
//! granulometric curve and saliency map in [`morphology`].
//!
//! Everything is generic over the value type ([`Scalar`]: `f32` or `f64`);
//! the aliases below fix it to `f64`.
//!
//! ```
//! use dynpers::{pair_by_dynamics, pair_by_persistence, Field};
//!
//! let f = Field::from_1d(vec![5.0, 1.0, 4.0, 0.0, 6.0]).unwrap();
//! let pairs = pair_by_persistence(&f);
//! assert_eq!(pairs, pair_by_dynamics(&f));
//! assert_eq!(pairs[0].value, 3.0);
//! assert!(pairs[1].value.is_infinite());
//! ```

pub mod equivalence;
pub mod error;
pub mod field;
pub mod flooding;
pub mod io;
pub mod merge;
pub mod morphology;
pub mod pairing1d;
pub mod path;
pub mod scalar;
mod union_find;

pub use equivalence::{
    generate, sweep, verify_equivalence, Counterexample, EquivalenceReport, GeneratorKind,
    GeneratorSpec, Verifier,
};
pub use error::{Error, Result};
pub use field::{Connectivity, ScalarField, VertexId};
pub use flooding::pair_by_dynamics;
pub use io::{format_field, parse_field, read_field, write_field, FieldFormat};
pub use merge::{
    build_merge_tree, pair_by_persistence, pairs_to_json, persistence_diagram,
    sublevel_filtration, MergeEvent, MergeTree, PersistencePair,
};
pub use morphology::{
    filter_dynamics, granulometric_curve, saliency, segment_pipeline, watershed,
    GranulometricCurve, SaliencyMap, Segmentation, WatershedLabels,
};
pub use pairing1d::pair_1d_algorithm1;
pub use path::{dynamics_oracle, effort, exhaustive_dynamics, DiscretePath, OracleDynamics};
pub use scalar::Scalar;

pub type Field = ScalarField<f64>;
pub type Field32 = ScalarField<f32>;
pub type Pair = PersistencePair<f64>;
pub type Pair32 = PersistencePair<f32>;
pub type Tree = MergeTree<f64>;
pub type Curve = GranulometricCurve<f64>;
pub type Saliency = SaliencyMap<f64>;
