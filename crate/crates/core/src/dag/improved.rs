use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{Dag, Edge, EdgeKind, Variant, Vertex, VertexRole};
use crate::instance::SegmentMap;

/// Copies the real part of a refined DAG so that no path retrieves an item
/// twice within one segment.
///
/// A copy of a vertex is keyed by the set of items it has already retrieved
/// among those that occur again later in the same segment. Occurrence edges
/// of a carried item become weight-0 pass-through edges. The key resets
/// whenever a path leaves a segment, and the penalty chain is shared.
pub fn build_improved_dag(g: &Dag, segments: &SegmentMap) -> Dag {
    let occ = &g.occurrences;
    let seg_of: Vec<Option<usize>> = occ.iter().map(|o| segments.segment_of(o.slot)).collect();

    // Slots of each item's occurrences, per segment.
    let mut slots: BTreeMap<(Option<usize>, usize), Vec<usize>> = BTreeMap::new();
    for (q, o) in occ.iter().enumerate() {
        slots.entry((seg_of[q], o.item)).or_default().push(o.slot);
    }
    let tracked = |q: usize, item: usize| slots.get(&(seg_of[q], item)).is_some_and(|s| s.len() > 1);
    let recurs_after = |q: usize, item: usize, slot: usize| {
        slots
            .get(&(seg_of[q], item))
            .is_some_and(|s| s.iter().any(|&t| t > slot))
    };

    let target_key = |e: &Edge, carried: &[usize]| -> Vec<usize> {
        match (e.kind, g.vertices[e.head].role) {
            (EdgeKind::Occurrence, VertexRole::Head(q)) => {
                let o = occ[q];
                let mut set: BTreeSet<usize> = carried.iter().copied().collect();
                if tracked(q, o.item) {
                    set.insert(o.item);
                }
                set.into_iter()
                    .filter(|&i| recurs_after(q, i, o.slot))
                    .collect()
            }
            (_, VertexRole::Tail(q)) => {
                let same_segment = match g.vertices[e.tail].role {
                    VertexRole::Head(p) => seg_of[p] == seg_of[q] && seg_of[q].is_some(),
                    _ => false,
                };
                if !same_segment {
                    return Vec::new();
                }
                let o = occ[q];
                carried
                    .iter()
                    .copied()
                    .filter(|&i| i == o.item || recurs_after(q, i, o.slot))
                    .collect()
            }
            _ => Vec::new(),
        }
    };

    // Reachable copies, discovered in topological order of the original.
    let mut copies: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); g.num_vertices()];
    copies[g.source].insert(Vec::new());
    for v in 0..g.num_vertices() {
        let keys: Vec<Vec<usize>> = copies[v].iter().cloned().collect();
        for key in keys {
            for &id in g.out_edges(v) {
                let e = &g.edges[id];
                let k = target_key(e, &key);
                copies[e.head].insert(k);
            }
        }
    }

    let mut index: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    for (v, keys) in copies.iter().enumerate() {
        for key in keys {
            index.insert((v, key.clone()), vertices.len());
            vertices.push(Vertex {
                role: g.vertices[v].role,
                carried: key.clone(),
            });
        }
    }

    let mut edges = Vec::new();
    for (v, keys) in copies.iter().enumerate() {
        for key in keys {
            let tail = index[&(v, key.clone())];
            for &id in g.out_edges(v) {
                let e = &g.edges[id];
                let k = target_key(e, key);
                let mut copy = e.clone();
                copy.id = edges.len();
                copy.tail = tail;
                copy.head = index[&(e.head, k)];
                copy.segment = match (g.vertices[e.tail].role, g.vertices[e.head].role) {
                    (VertexRole::Tail(a) | VertexRole::Head(a), VertexRole::Tail(b) | VertexRole::Head(b))
                        if seg_of[a] == seg_of[b] =>
                    {
                        seg_of[a]
                    }
                    _ => None,
                };
                if e.kind == EdgeKind::Occurrence {
                    let item = e.item.expect("occurrence edges are labelled");
                    if key.contains(&item) {
                        copy.kind = EdgeKind::PassThrough;
                        copy.item = None;
                        copy.weight = Zero::zero();
                    }
                }
                edges.push(copy);
            }
        }
    }

    let out = Dag::new(
        Variant::Improved,
        vertices,
        edges,
        g.occurrences.clone(),
        segments.clone(),
        g.num_items,
    );
    debug_assert!(out.check_topological().is_ok());
    out
}
