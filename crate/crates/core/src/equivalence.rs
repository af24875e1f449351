//! Seeded test-field generators and the machine check that the dynamics and
//! persistence pairings agree.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Connectivity, ScalarField, VertexId};
use crate::flooding::pair_by_dynamics;
use crate::merge::{pair_by_persistence, PersistencePair};
use crate::path::dynamics_oracle;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    GaussianMixture,
    PolySine1d,
    UniformRandom,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_mixture" => Ok(GeneratorKind::GaussianMixture),
            "poly_sine_1d" => Ok(GeneratorKind::PolySine1d),
            "uniform_random" => Ok(GeneratorKind::UniformRandom),
            other => Err(Error::usage(format!("unknown generator kind `{other}`"))),
        }
    }
}

/// Everything needed to reproduce a generated field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub shape: Vec<usize>,
    /// Gaussian bumps, or sinusoids for `poly_sine_1d`.
    pub bumps: usize,
    pub seed: u64,
    /// Gaussian amplitudes and uniform values are drawn from this range;
    /// for `poly_sine_1d` its upper end scales the quartic ramp.
    pub amplitude: (f64, f64),
    pub connectivity: Connectivity,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, shape: Vec<usize>, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            shape,
            bumps: 8,
            seed,
            amplitude: (-1.0, 1.0),
            connectivity: Connectivity::Axis,
        }
    }

    pub fn with_bumps(mut self, bumps: usize) -> Self {
        self.bumps = bumps;
        self
    }

    pub fn with_amplitude(mut self, lo: f64, hi: f64) -> Self {
        self.amplitude = (lo, hi);
        self
    }

    pub fn with_connectivity(mut self, connectivity: Connectivity) -> Self {
        self.connectivity = connectivity;
        self
    }
}

pub fn generate<T: Scalar>(spec: &GeneratorSpec) -> Result<ScalarField<T>> {
    if spec.shape.is_empty() || spec.shape.contains(&0) {
        return Err(Error::usage(format!("invalid shape {:?}", spec.shape)));
    }
    if spec.bumps == 0 {
        return Err(Error::usage("at least one bump is required"));
    }
    let (lo, hi) = spec.amplitude;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::usage(format!("invalid amplitude range ({lo}, {hi})")));
    }
    let n: usize = spec.shape.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.gen_range(lo..hi) };

    let values: Vec<f64> = match spec.kind {
        GeneratorKind::UniformRandom => (0..n).map(|_| draw(&mut rng)).collect(),
        GeneratorKind::GaussianMixture => {
            let mean_extent =
                spec.shape.iter().sum::<usize>() as f64 / spec.shape.len() as f64;
            let bumps: Vec<(Vec<f64>, f64, f64)> = (0..spec.bumps)
                .map(|_| {
                    let center = spec
                        .shape
                        .iter()
                        .map(|&e| rng.gen_range(0.0..e as f64) - 0.5)
                        .collect();
                    let sigma = mean_extent * rng.gen_range(0.04..0.2) + 0.5;
                    (center, sigma, draw(&mut rng))
                })
                .collect();
            let mut strides = vec![1; spec.shape.len()];
            for axis in (0..spec.shape.len() - 1).rev() {
                strides[axis] = strides[axis + 1] * spec.shape[axis + 1];
            }
            (0..n)
                .map(|v| {
                    bumps
                        .iter()
                        .map(|(center, sigma, amp)| {
                            let d2: f64 = center
                                .iter()
                                .zip(spec.shape.iter().zip(&strides))
                                .map(|(c, (&e, &s))| {
                                    let x = ((v / s) % e) as f64 - c;
                                    x * x
                                })
                                .sum();
                            amp * (-d2 / (2.0 * sigma * sigma)).exp()
                        })
                        .sum()
                })
                .collect()
        }
        GeneratorKind::PolySine1d => {
            if spec.shape.len() != 1 {
                return Err(Error::usage("poly_sine_1d generates 1-D fields only"));
            }
            let ramp = hi.abs().max(f64::MIN_POSITIVE);
            let cubic: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.25..0.25) * ramp);
            let waves: Vec<(f64, f64, f64)> = (0..spec.bumps)
                .map(|_| {
                    (
                        rng.gen_range(0.0..1.0),
                        rng.gen_range(1.0..20.0),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                })
                .collect();
            (0..n)
                .map(|i| {
                    let x = if n == 1 { 0.0 } else { 2.0 * i as f64 / (n - 1) as f64 - 1.0 };
                    let poly = ramp * x.powi(4)
                        + cubic[0] * x.powi(3)
                        + cubic[1] * x * x
                        + cubic[2] * x;
                    let wave: f64 = waves.iter().map(|(a, w, p)| a * (w * x + p).sin()).sum();
                    poly + wave
                })
                .collect()
        }
    };
    let values = values.into_iter().map(T::from_f64_lossy).collect();
    ScalarField::new(spec.shape.clone(), values, spec.connectivity)
}

/// A divergence between the two pairings (or the path oracle).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub spec: Option<GeneratorSpec>,
    /// Shape after shrinking.
    pub shape: Vec<usize>,
    pub min_vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub fields_tested: usize,
    pub pairings_identical: bool,
    pub first_counterexample: Option<Counterexample>,
    pub max_value_discrepancy: f64,
}

impl EquivalenceReport {
    fn empty() -> Self {
        EquivalenceReport {
            fields_tested: 0,
            pairings_identical: true,
            first_counterexample: None,
            max_value_discrepancy: 0.0,
        }
    }

    fn absorb(&mut self, other: EquivalenceReport) {
        self.fields_tested += other.fields_tested;
        self.pairings_identical &= other.pairings_identical;
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
        }
        self.max_value_discrepancy = self.max_value_discrepancy.max(other.max_value_discrepancy);
    }
}

pub type Pairing<T> = fn(&ScalarField<T>) -> Vec<PersistencePair<T>>;

/// Runs both pairings and the path oracle on fields and compares them.
/// The pairings are swappable so tests can inject a faulty one.
#[derive(Clone, Copy)]
pub struct Verifier<T> {
    pub persistence: Pairing<T>,
    pub dynamics: Pairing<T>,
    pub check_oracle: bool,
    pub fail_fast: bool,
    pub parallel: bool,
}

impl<T: Scalar> Default for Verifier<T> {
    fn default() -> Self {
        Verifier {
            persistence: pair_by_persistence,
            dynamics: pair_by_dynamics,
            check_oracle: true,
            fail_fast: false,
            parallel: true,
        }
    }
}

type PairKey = (Option<VertexId>, u64);

fn keyed<T: Scalar>(pairs: &[PersistencePair<T>]) -> BTreeMap<VertexId, PairKey> {
    pairs
        .iter()
        .map(|p| (p.min_vertex, (p.saddle_vertex, p.value.as_f64().to_bits())))
        .collect()
}

fn discrepancy(a: f64, b: f64) -> f64 {
    if a.to_bits() == b.to_bits() {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        (a - b).abs()
    }
}

impl<T: Scalar> Verifier<T> {
    /// First minimum on which the two pairings (or the oracle) disagree,
    /// and the largest value gap seen.
    fn divergence(&self, field: &ScalarField<T>) -> (Option<VertexId>, f64) {
        let by_persistence = keyed(&(self.persistence)(field));
        let by_dynamics = keyed(&(self.dynamics)(field));
        let mut first = None;
        let mut gap: f64 = 0.0;
        let flag = |v: VertexId, first: &mut Option<VertexId>| {
            if first.is_none() {
                *first = Some(v);
            }
        };

        for (&m, &(saddle, bits)) in &by_persistence {
            match by_dynamics.get(&m) {
                Some(&(other_saddle, other_bits)) => {
                    gap = gap.max(discrepancy(f64::from_bits(bits), f64::from_bits(other_bits)));
                    if saddle != other_saddle || bits != other_bits {
                        flag(m, &mut first);
                    }
                }
                None => {
                    gap = f64::INFINITY;
                    flag(m, &mut first);
                }
            }
            if self.check_oracle {
                match dynamics_oracle(field, m) {
                    Ok(o) => {
                        let obits = o.value.as_f64().to_bits();
                        gap = gap.max(discrepancy(f64::from_bits(bits), f64::from_bits(obits)));
                        if o.witness != saddle || obits != bits {
                            flag(m, &mut first);
                        }
                    }
                    Err(_) => flag(m, &mut first),
                }
            }
        }
        if let Some((&m, _)) = by_dynamics.iter().find(|(m, _)| !by_persistence.contains_key(m)) {
            gap = f64::INFINITY;
            flag(m, &mut first);
        }
        (first, gap)
    }

    pub fn verify_field(&self, field: &ScalarField<T>) -> EquivalenceReport {
        self.verify_with_spec(field, None)
    }

    fn verify_with_spec(&self, field: &ScalarField<T>, spec: Option<&GeneratorSpec>) -> EquivalenceReport {
        let (first, gap) = self.divergence(field);
        let first_counterexample = first.map(|m| {
            let (shape, m) = self.shrink(field, m);
            Counterexample {
                spec: spec.cloned(),
                shape,
                min_vertex: m,
            }
        });
        EquivalenceReport {
            fields_tested: 1,
            pairings_identical: first_counterexample.is_none(),
            first_counterexample,
            max_value_discrepancy: gap,
        }
    }

    /// Drop trailing slices along the first axis while the divergence persists.
    fn shrink(&self, field: &ScalarField<T>, mut culprit: VertexId) -> (Vec<usize>, VertexId) {
        let mut current = field.clone();
        while current.shape()[0] > 1 {
            let mut shape = current.shape().to_vec();
            shape[0] -= 1;
            let keep: usize = shape.iter().product();
            let smaller = ScalarField::new(
                shape,
                current.values()[..keep].to_vec(),
                current.connectivity(),
            )
            .expect("prefix of a valid field");
            match self.divergence(&smaller).0 {
                Some(m) => {
                    culprit = m;
                    current = smaller;
                }
                None => break,
            }
        }
        (current.shape().to_vec(), culprit)
    }

    pub fn sweep(&self, specs: &[GeneratorSpec]) -> Result<EquivalenceReport> {
        let mut total = EquivalenceReport::empty();
        if self.fail_fast || !self.parallel {
            for spec in specs {
                let field = generate::<T>(spec)?;
                let report = self.verify_with_spec(&field, Some(spec));
                let failed = !report.pairings_identical;
                total.absorb(report);
                if failed && self.fail_fast {
                    break;
                }
            }
        } else {
            let reports = specs
                .par_iter()
                .map(|spec| Ok(self.verify_with_spec(&generate::<T>(spec)?, Some(spec))))
                .collect::<Result<Vec<_>>>()?;
            for report in reports {
                total.absorb(report);
            }
        }
        Ok(total)
    }
}

/// Check one field with the default pairings and the path oracle.
pub fn verify_equivalence<T: Scalar>(field: &ScalarField<T>) -> EquivalenceReport {
    Verifier::default().verify_field(field)
}

/// Check every generated field; the first counterexample follows list order.
pub fn sweep<T: Scalar>(specs: &[GeneratorSpec], fail_fast: bool) -> Result<EquivalenceReport> {
    Verifier::<T> {
        fail_fast,
        ..Verifier::default()
    }
    .sweep(specs)
}
