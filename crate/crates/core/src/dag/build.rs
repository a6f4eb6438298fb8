use num_traits::{One, Zero};

use super::{Dag, Edge, EdgeKind, Variant, Vertex, VertexRole};
use crate::instance::{conflict_free, segment_map, Instance, SegmentMap};
use crate::Rational;

struct Builder<'a> {
    inst: &'a Instance,
    segments: SegmentMap,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance) -> Self {
        let mut vertices = vec![Vertex {
            role: VertexRole::Source,
            carried: Vec::new(),
        }];
        for q in 0..inst.occurrences().len() {
            for role in [VertexRole::Tail(q), VertexRole::Head(q)] {
                vertices.push(Vertex {
                    role,
                    carried: Vec::new(),
                });
            }
        }
        Self {
            inst,
            segments: segment_map(inst),
            vertices,
            edges: Vec::new(),
        }
    }

    fn tail(q: usize) -> usize {
        1 + 2 * q
    }

    fn head(q: usize) -> usize {
        2 + 2 * q
    }

    fn push_vertex(&mut self, role: VertexRole) -> usize {
        self.vertices.push(Vertex {
            role,
            carried: Vec::new(),
        });
        self.vertices.len() - 1
    }

    fn push(&mut self, tail: usize, head: usize, kind: EdgeKind) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            tail,
            head,
            weight: Rational::zero(),
            cost: Rational::zero(),
            item: None,
            kind,
            occurrence: None,
            segment: None,
        });
        id
    }

    fn push_occurrence(&mut self, q: usize) {
        let o = self.inst.occurrences()[q];
        let id = self.push(Self::tail(q), Self::head(q), EdgeKind::Occurrence);
        let e = &mut self.edges[id];
        e.weight = self.inst.weight(o.item);
        e.item = Some(o.item);
        e.occurrence = Some(q);
        e.segment = self.segments.segment_of(o.slot);
    }

    fn push_link(&mut self, from: usize, to: usize) {
        let occ = self.inst.occurrences();
        let id = self.push(Self::head(from), Self::tail(to), EdgeKind::Link);
        let a = self.segments.segment_of(occ[from].slot);
        if a == self.segments.segment_of(occ[to].slot) {
            self.edges[id].segment = a;
        }
    }

    fn finish(self, variant: Variant) -> Dag {
        Dag::new(
            variant,
            self.vertices,
            self.edges,
            self.inst.occurrences().to_vec(),
            self.segments,
            self.inst.num_items(),
        )
    }
}

/// One tail/head pair per occurrence, a link for every conflict-free pair,
/// and source/sink edges at every occurrence.
pub fn build_basic_dag(inst: &Instance) -> Dag {
    let occ = inst.occurrences();
    let mut b = Builder::new(inst);
    let sink = b.push_vertex(VertexRole::Sink);
    for (q, a) in occ.iter().enumerate() {
        b.push(0, Builder::tail(q), EdgeKind::Source);
        b.push_occurrence(q);
        for (r, c) in occ.iter().enumerate().skip(q + 1) {
            if conflict_free(a, c) {
                b.push_link(q, r);
            }
        }
        b.push(Builder::head(q), sink, EdgeKind::Sink);
    }
    let g = b.finish(Variant::Basic);
    debug_assert!(g.check_topological().is_ok());
    g
}

/// Sparse DAG linking each head only to the nearest conflict-free
/// occurrence per channel, followed by the penalty chain.
///
/// The chain runs junction → stage 1 → … → stage n → sink. Stage i holds a
/// penalty edge (cost 1, weight w_i, labelled i) and `m` parallel free
/// edges, so up to `m` units pass every stage.
pub fn build_refined_dag(inst: &Instance) -> Dag {
    let occ = inst.occurrences();
    let m = inst.channels();
    let mut b = Builder::new(inst);

    let mut by_channel: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for (q, o) in occ.iter().enumerate() {
        by_channel[o.channel].push(q);
    }
    let junction = b.push_vertex(VertexRole::Junction);
    let n = inst.num_items();
    let chain: Vec<usize> = std::iter::once(junction)
        .chain((1..n).map(|i| b.push_vertex(VertexRole::Chain(i))))
        .collect();
    let sink = b.push_vertex(VertexRole::Sink);

    for (q, o) in occ.iter().enumerate() {
        let list = &by_channel[o.channel];
        if list.first() == Some(&q) {
            b.push(0, Builder::tail(q), EdgeKind::Source);
        }
        b.push_occurrence(q);
        let mut targets: Vec<usize> = (1..=m)
            .filter_map(|c| {
                let min_slot = if c == o.channel { o.slot + 1 } else { o.slot + 2 };
                by_channel[c].iter().copied().find(|&r| occ[r].slot >= min_slot)
            })
            .collect();
        targets.sort_unstable();
        for r in targets {
            b.push_link(q, r);
        }
        if list.last() == Some(&q) {
            b.push(Builder::head(q), junction, EdgeKind::Sink);
        }
    }

    if n == 0 {
        for _ in 0..m {
            b.push(junction, sink, EdgeKind::VirtualFree);
        }
    }
    for i in 1..=n {
        let from = chain[i - 1];
        let to = if i == n { sink } else { chain[i] };
        let id = b.push(from, to, EdgeKind::VirtualPenalty);
        let e = &mut b.edges[id];
        e.cost = Rational::one();
        e.weight = inst.weight(i);
        e.item = Some(i);
        for _ in 0..m {
            b.push(from, to, EdgeKind::VirtualFree);
        }
    }
    let g = b.finish(Variant::Refined);
    debug_assert!(g.check_topological().is_ok());
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::EdgeKind;
    use crate::instance::Occurrence;

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    fn links(g: &Dag) -> Vec<(usize, usize)> {
        g.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Link)
            .map(|e| (e.tail, e.head))
            .collect()
    }

    #[test]
    fn basic_single_occurrence() {
        let inst = Instance::new(vec![r(3)], 1, 1, 1, [Occurrence::new(1, 1, 1)]).unwrap();
        let g = build_basic_dag(&inst);
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.edges[1].weight, r(3));
    }

    #[test]
    fn basic_links_follow_conflicts() {
        let same = Instance::new(
            vec![r(1), r(1)],
            2,
            2,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 1, 2)],
        )
        .unwrap();
        assert_eq!(links(&build_basic_dag(&same)).len(), 1);
        let cross = Instance::new(
            vec![r(1), r(1)],
            2,
            2,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 2)],
        )
        .unwrap();
        assert!(links(&build_basic_dag(&cross)).is_empty());
    }

    #[test]
    fn refined_single_occurrence() {
        let inst = Instance::new(vec![r(5)], 1, 1, 1, [Occurrence::new(1, 1, 1)]).unwrap();
        let g = build_refined_dag(&inst);
        // s, v, w, p, t
        assert_eq!(g.num_vertices(), 5);
        let kinds: Vec<EdgeKind> = g.edges.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EdgeKind::Source,
                EdgeKind::Occurrence,
                EdgeKind::Sink,
                EdgeKind::VirtualPenalty,
                EdgeKind::VirtualFree
            ]
        );
    }

    #[test]
    fn refined_links_nearest_per_channel() {
        let occ: Vec<Occurrence> = (1..=4).map(|s| Occurrence::new(s, 1, s)).collect();
        let inst = Instance::new(vec![r(1); 4], 2, 4, 1, occ).unwrap();
        let g = build_refined_dag(&inst);
        for q in 0..3 {
            let out: Vec<_> = g
                .out_edges(2 + 2 * q)
                .iter()
                .filter(|&&e| g.edges[e].kind == EdgeKind::Link)
                .collect();
            assert_eq!(out.len(), 1);
            assert_eq!(g.edges[*out[0]].head, 1 + 2 * (q + 1));
        }
    }
}
