use std::collections::BTreeMap;

use num_traits::Zero;

use super::RoundingError;
use crate::dag::{Dag, EdgeKind, VertexRole};
use crate::Rational;

/// One path of flow inside a segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subflow {
    /// Intra-segment edge ids in path order.
    pub edges: Vec<usize>,
    /// Occurrence indices retrieved along the path.
    pub occurrences: Vec<usize>,
    /// Every (slot, channel) the path tunes to, pass-throughs included.
    pub cells: Vec<(usize, usize)>,
    pub value: Rational,
}

impl Subflow {
    /// No shared edge and no shared cell.
    pub fn disjoint(&self, other: &Subflow) -> bool {
        self.edges.iter().all(|e| !other.edges.contains(e)) && self.cells.iter().all(|c| !other.cells.contains(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentFlows {
    pub subflows: Vec<Subflow>,
    /// Antenna capacity left unused in the segment: δ minus the inflow.
    pub idle: Rational,
    /// Arcs of the segment graph: intra-segment edges plus one entry arc per
    /// vertex with outside in-edges and one exit arc per vertex with outside
    /// out-edges.
    pub arcs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowDecomposition {
    pub delta: usize,
    pub segments: Vec<SegmentFlows>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Arc {
    Edge(usize),
    Entry(usize),
    Exit(usize),
}

/// Splits the flow inside every segment into weighted paths.
///
/// Each segment graph holds the edges tagged with that segment. Flow arriving
/// from outside the segment enters through a synthetic entry arc at its
/// vertex and flow leaving exits through a synthetic exit arc. Paths are
/// peeled through a minimum-residual arc (ties by edge id, synthetic arcs
/// after real ones) and extended backwards and forwards along the
/// largest-residual neighbour (same tie rule) until they reach an entry and
/// an exit arc. The peeled value is subtracted exactly.
pub fn decompose_flow(g: &Dag, values: &[Rational], delta: usize) -> Result<FlowDecomposition, RoundingError> {
    if values.len() != g.num_edges() {
        return Err(RoundingError::Mismatch(format!(
            "{} values for {} edges",
            values.len(),
            g.num_edges()
        )));
    }
    let seg_count = g.segments.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); seg_count];
    for (v, vert) in g.vertices.iter().enumerate() {
        if let VertexRole::Tail(q) | VertexRole::Head(q) = vert.role {
            if let Some(h) = g.segments.segment_of(g.occurrences[q].slot) {
                members[h].push(v);
            }
        }
    }
    let inside = |id: usize, h: usize| g.edges[id].segment == Some(h);
    let delta_q = Rational::from_integer(delta as i128);

    let mut segments = Vec::with_capacity(seg_count);
    for (h, verts) in members.iter().enumerate() {
        let mut residual: BTreeMap<Arc, Rational> = BTreeMap::new();
        let mut arcs = 0;
        let mut inflow = Rational::zero();
        for &v in verts {
            let (mut entry, mut exit) = (Rational::zero(), Rational::zero());
            let (mut has_entry, mut has_exit) = (false, false);
            let mut balance = Rational::zero();
            for &id in g.in_edges(v) {
                balance += values[id];
                if !inside(id, h) {
                    entry += values[id];
                    has_entry = true;
                }
            }
            for &id in g.out_edges(v) {
                balance -= values[id];
                if inside(id, h) {
                    arcs += 1;
                    residual.insert(Arc::Edge(id), values[id]);
                } else {
                    exit += values[id];
                    has_exit = true;
                }
            }
            if !balance.is_zero() {
                return Err(RoundingError::NonConserving { vertex: v });
            }
            arcs += has_entry as usize + has_exit as usize;
            inflow += entry;
            residual.insert(Arc::Entry(v), entry);
            residual.insert(Arc::Exit(v), exit);
        }
        if inflow > delta_q {
            return Err(RoundingError::ExcessFlow { segment: h });
        }

        let mut subflows = Vec::new();
        while let Some((start, y)) = residual
            .iter()
            .filter(|(_, r)| **r > Rational::zero())
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(a, r)| (*a, *r))
        {
            let mut path = vec![start];
            // Backwards to an entry arc.
            loop {
                let v = match path[0] {
                    Arc::Entry(_) => break,
                    Arc::Edge(id) => g.edges[id].tail,
                    Arc::Exit(v) => v,
                };
                let mut options = vec![Arc::Entry(v)];
                options.extend(g.in_edges(v).iter().filter(|&&id| inside(id, h)).map(|&id| Arc::Edge(id)));
                let next = best(&residual, &options).ok_or(RoundingError::NonConserving { vertex: v })?;
                path.insert(0, next);
            }
            // Forwards to an exit arc.
            loop {
                let v = match *path.last().expect("path is non-empty") {
                    Arc::Exit(_) => break,
                    Arc::Edge(id) => g.edges[id].head,
                    Arc::Entry(v) => v,
                };
                let mut options: Vec<Arc> = g
                    .out_edges(v)
                    .iter()
                    .filter(|&&id| inside(id, h))
                    .map(|&id| Arc::Edge(id))
                    .collect();
                options.push(Arc::Exit(v));
                let next = best(&residual, &options).ok_or(RoundingError::NonConserving { vertex: v })?;
                path.push(next);
            }
            for a in &path {
                *residual.get_mut(a).expect("arc is tracked") -= y;
            }
            subflows.push(subflow(g, &path, y));
        }
        segments.push(SegmentFlows {
            subflows,
            idle: delta_q - inflow,
            arcs,
        });
    }
    Ok(FlowDecomposition { delta, segments })
}

/// Largest positive residual among `options`, ties by arc order.
fn best(residual: &BTreeMap<Arc, Rational>, options: &[Arc]) -> Option<Arc> {
    options
        .iter()
        .filter_map(|a| residual.get(a).filter(|r| **r > Rational::zero()).map(|r| (*a, *r)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(a, _)| a)
}

fn subflow(g: &Dag, path: &[Arc], value: Rational) -> Subflow {
    let mut s = Subflow {
        edges: Vec::new(),
        occurrences: Vec::new(),
        cells: Vec::new(),
        value,
    };
    for a in path {
        if let Arc::Edge(id) = *a {
            let e = &g.edges[id];
            s.edges.push(id);
            if let (EdgeKind::Occurrence | EdgeKind::PassThrough, Some(q)) = (e.kind, e.occurrence) {
                s.cells.push(g.occurrences[q].cell());
                if e.kind == EdgeKind::Occurrence {
                    s.occurrences.push(q);
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::build_basic_dag;
    use crate::instance::{Instance, Occurrence};

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    /// Flow values putting `amount` on one s-t path through the listed occurrences.
    fn route(g: &Dag, occs: &[usize], amount: Rational, x: &mut [Rational]) {
        let find = |t: usize, h: usize| {
            g.edges
                .iter()
                .find(|e| e.tail == t && e.head == h)
                .expect("edge exists")
                .id
        };
        let mut at = g.source;
        for &o in occs {
            x[find(at, 1 + 2 * o)] += amount;
            x[find(1 + 2 * o, 2 + 2 * o)] += amount;
            at = 2 + 2 * o;
        }
        x[find(at, g.sink)] += amount;
    }

    #[test]
    fn single_integral_path() {
        let inst = Instance::new(
            vec![q(1, 1), q(2, 1)],
            1,
            2,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 1, 2)],
        )
        .unwrap();
        let g = build_basic_dag(&inst);
        let mut x = vec![Rational::zero(); g.num_edges()];
        route(&g, &[0, 1], q(1, 1), &mut x);
        let d = decompose_flow(&g, &x, 1).unwrap();
        assert_eq!(d.segments.len(), 1);
        let s = &d.segments[0];
        assert_eq!(s.subflows.len(), 1);
        assert_eq!(s.subflows[0].value, q(1, 1));
        assert_eq!(s.subflows[0].occurrences, vec![0, 1]);
        assert!(s.idle.is_zero());
    }

    #[test]
    fn two_halves() {
        let inst = Instance::new(
            vec![q(1, 1), q(1, 1)],
            2,
            1,
            1,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 1)],
        )
        .unwrap();
        let g = build_basic_dag(&inst);
        let mut x = vec![Rational::zero(); g.num_edges()];
        route(&g, &[0], q(1, 2), &mut x);
        route(&g, &[1], q(1, 2), &mut x);
        let d = decompose_flow(&g, &x, 1).unwrap();
        let values: Vec<_> = d.segments[0].subflows.iter().map(|s| s.value).collect();
        assert_eq!(values, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn rejects_broken_flow() {
        let inst = Instance::new(vec![q(1, 1)], 1, 1, 1, [Occurrence::new(1, 1, 1)]).unwrap();
        let g = build_basic_dag(&inst);
        let mut x = vec![Rational::zero(); g.num_edges()];
        x[0] = q(1, 1);
        assert!(matches!(decompose_flow(&g, &x, 1), Err(RoundingError::NonConserving { .. })));
    }
}
