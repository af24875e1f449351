#![allow(dead_code)]

use std::collections::BTreeSet;
use std::time::Instant;

use dynpers::{
    filter_dynamics, generate, pair_by_persistence, watershed, Connectivity, Field, GeneratorKind,
    GeneratorSpec, Pair, VertexId,
};
use itertools::Itertools;

pub fn signal() -> Field {
    Field::from_1d(vec![5.0, 1.0, 4.0, 0.0, 6.0]).unwrap()
}

pub fn grid3() -> Field {
    let values = vec![9.0, 8.0, 10.0, 2.0, 7.0, 3.0, 11.0, 12.0, 13.0];
    Field::new(vec![3, 3], values, Connectivity::Axis).unwrap()
}

/// Every permutation of `1..=n` as a 1-D signal.
pub fn permutations(n: usize) -> impl Iterator<Item = Field> {
    (1..=n)
        .permutations(n)
        .map(|p| Field::from_1d(p.into_iter().map(|x| x as f64).collect()).unwrap())
}

pub fn random_1d(len: usize, seed: u64) -> Field {
    generate(&GeneratorSpec::new(GeneratorKind::UniformRandom, vec![len], seed)).unwrap()
}

pub fn random_2d(kind: GeneratorKind, side: usize, seed: u64, conn: Connectivity) -> Field {
    generate(&GeneratorSpec::new(kind, vec![side, side], seed).with_connectivity(conn)).unwrap()
}

/// `(min, saddle, value bits)` for every pair, keyed for set comparison.
pub fn pair_set(pairs: &[Pair]) -> BTreeSet<(VertexId, Option<VertexId>, u64)> {
    pairs
        .iter()
        .map(|p| (p.min_vertex, p.saddle_vertex, p.value.to_bits()))
        .collect()
}

/// Thresholds strictly inside each gap between consecutive distinct pair
/// values, plus one below the smallest and one above the largest.
pub fn interval_thresholds(pairs: &[Pair]) -> Vec<f64> {
    let mut values: Vec<f64> = pairs.iter().filter(|p| !p.is_essential()).map(|p| p.value).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    let mut out = Vec::new();
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => {
            out.push(lo / 2.0);
            out.extend(values.windows(2).map(|w| (w[0] + w[1]) / 2.0));
            out.push(hi + 1.0);
        }
        _ => out.push(1.0),
    }
    out
}

/// Boundary edges of the watershed of the filtered field: the literal
/// "stack" level set at threshold `t`.
pub fn stacked_boundary(field: &Field, t: f64) -> Vec<(VertexId, VertexId)> {
    let filtered = filter_dynamics(field, t).unwrap();
    watershed(&filtered).boundary_edges(&filtered)
}

/// Components of the vertices strictly before `level` in the total order,
/// by breadth-first search. `comp[v] == usize::MAX` outside the set.
pub fn components_below(field: &Field, level: VertexId) -> Vec<usize> {
    let cut = field.rank(level);
    let mut comp = vec![usize::MAX; field.len()];
    let mut next = 0;
    for start in 0..field.len() {
        if comp[start] != usize::MAX || field.rank(VertexId(start)) >= cut {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![VertexId(start)];
        while let Some(v) = stack.pop() {
            field.for_each_neighbor(v, |u| {
                if comp[u.0] == usize::MAX && field.rank(u) < cut {
                    comp[u.0] = next;
                    stack.push(u);
                }
            });
        }
        next += 1;
    }
    comp
}

/// Dynamics of every minimum from the persistence pairing.
pub fn dynamics_by_min(field: &Field) -> Vec<(VertexId, f64)> {
    pair_by_persistence(field).iter().map(|p| (p.min_vertex, p.value)).collect()
}

pub struct Criterion {
    name: &'static str,
    started: Instant,
    limit_secs: Option<f64>,
}

impl Criterion {
    pub fn start(name: &'static str, limit_secs: Option<f64>) -> Self {
        Criterion { name, started: Instant::now(), limit_secs }
    }

    /// Print one pass/fail line and fail the test on a violated check or a
    /// blown time budget.
    pub fn finish(self, failures: &[String]) {
        let elapsed = self.started.elapsed().as_secs_f64();
        let slow = self.limit_secs.is_some_and(|l| elapsed > l);
        let ok = failures.is_empty() && !slow;
        let budget = self.limit_secs.map(|l| format!(" (budget {l:.0}s)")).unwrap_or_default();
        println!(
            "[{}] {} in {elapsed:.2}s{budget}",
            if ok { "PASS" } else { "FAIL" },
            self.name
        );
        for f in failures.iter().take(10) {
            println!("    {f}");
        }
        assert!(failures.is_empty(), "{}: {} violations", self.name, failures.len());
        assert!(!slow, "{}: exceeded time budget", self.name);
    }
}
