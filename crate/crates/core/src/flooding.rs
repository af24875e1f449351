//! Dynamics pairing by flooding: lakes grow from every minimum as the water
//! level rises; when lakes meet, the shallower ones are absorbed and their
//! minima receive the current level minus their depth as dynamics.
//!
//! This traversal keeps explicit lake membership lists instead of a
//! union-find so that it shares no code with the persistence pairing.

use crate::field::{ScalarField, VertexId};
use crate::merge::{sort_pairs, PersistencePair};
use crate::scalar::Scalar;

const DRY: u32 = u32::MAX;

struct Lake {
    bottom: VertexId,
    members: Vec<VertexId>,
}

pub fn pair_by_dynamics<T: Scalar>(field: &ScalarField<T>) -> Vec<PersistencePair<T>> {
    let mut lake_of = vec![DRY; field.len()];
    let mut lakes: Vec<Lake> = Vec::new();
    let mut pairs = Vec::new();
    let mut meeting: Vec<u32> = Vec::new();

    for &v in field.sorted_vertices() {
        meeting.clear();
        field.for_each_neighbor(v, |u| {
            let id = lake_of[u.0];
            if id != DRY && !meeting.contains(&id) {
                meeting.push(id);
            }
        });

        let Some(&first) = meeting.first() else {
            lake_of[v.0] = lakes.len() as u32;
            lakes.push(Lake {
                bottom: v,
                members: vec![v],
            });
            continue;
        };

        let level = field.value(v);
        let deepest = meeting
            .iter()
            .copied()
            .min_by_key(|&id| field.rank(lakes[id as usize].bottom))
            .unwrap_or(first);
        let mut target = deepest;
        for &id in &meeting {
            if id == deepest {
                continue;
            }
            let bottom = lakes[id as usize].bottom;
            pairs.push(PersistencePair::finite(bottom, v, field.value(bottom), level));
            target = pour(&mut lakes, &mut lake_of, id, target);
        }
        lake_of[v.0] = target;
        lakes[target as usize].members.push(v);
    }

    let deepest = lakes
        .iter()
        .filter(|l| !l.members.is_empty())
        .map(|l| l.bottom)
        .min_by_key(|&b| field.rank(b))
        .expect("a field has at least one vertex");
    pairs.push(PersistencePair::essential(deepest, field.value(deepest)));
    sort_pairs(field, &mut pairs);
    pairs
}

/// Merge lake `from` into lake `into`, keeping the bottom of `into`.
/// Returns the slot now holding the merged lake.
fn pour(lakes: &mut [Lake], lake_of: &mut [u32], from: u32, into: u32) -> u32 {
    let bottom = lakes[into as usize].bottom;
    let (small, large) = if lakes[from as usize].members.len() <= lakes[into as usize].members.len() {
        (from, into)
    } else {
        (into, from)
    };
    let moved = std::mem::take(&mut lakes[small as usize].members);
    for &m in &moved {
        lake_of[m.0] = large;
    }
    let large_lake = &mut lakes[large as usize];
    large_lake.members.extend(moved);
    large_lake.bottom = bottom;
    large
}
