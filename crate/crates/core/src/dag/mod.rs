//! Auxiliary layered DAGs whose s–t paths are antenna retrieval sequences.

mod build;
mod improved;

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::instance::{conflict_free, Occurrence, SegmentMap};
use crate::schedule::Schedule;
use crate::Rational;

pub use build::{build_basic_dag, build_refined_dag};
pub use improved::build_improved_dag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Basic,
    Refined,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexRole {
    Source,
    /// Entry vertex of an occurrence (index into [`Dag::occurrences`]).
    Tail(usize),
    /// Exit vertex of an occurrence.
    Head(usize),
    /// Joins the real part to the penalty chain.
    Junction,
    /// Penalty-chain vertex after stage `i` (1-based, `< n`).
    Chain(usize),
    Sink,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub role: VertexRole,
    /// Items already retrieved on every path reaching this copy (improved DAG only).
    pub carried: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Occurrence,
    /// Traverses an occurrence whose item this copy already carries; retrieves nothing.
    PassThrough,
    Link,
    Source,
    Sink,
    VirtualPenalty,
    VirtualFree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub weight: Rational,
    pub cost: Rational,
    pub item: Option<usize>,
    pub kind: EdgeKind,
    /// Occurrence traversed by an occurrence or pass-through edge.
    pub occurrence: Option<usize>,
    /// Segment of a real edge whose endpoints lie in one segment.
    pub segment: Option<usize>,
}

impl Edge {
    /// Real occurrence edge that retrieves its item.
    pub fn retrieves(&self) -> bool {
        self.kind == EdgeKind::Occurrence
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DagError {
    #[error("edge {edge} does not continue the path at vertex {vertex}")]
    Disconnected { edge: usize, vertex: usize },
    #[error("path must start at the source and end at the junction or sink")]
    Endpoints,
    #[error("edge {edge} is used by more than one path")]
    NotDisjoint { edge: usize },
    #[error("unknown edge {edge}")]
    UnknownEdge { edge: usize },
    #[error("retrieval of {second:?} after {first:?} conflicts")]
    Conflict { first: Occurrence, second: Occurrence },
    #[error("edge {edge} runs against the topological order")]
    NotTopological { edge: usize },
}

#[derive(Debug, Clone)]
pub struct Dag {
    pub variant: Variant,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub source: usize,
    pub sink: usize,
    pub junction: Option<usize>,
    /// Occurrences of the underlying instance in (slot, channel) order.
    pub occurrences: Vec<Occurrence>,
    pub segments: SegmentMap,
    pub num_items: usize,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Dag {
    pub(crate) fn new(
        variant: Variant,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        occurrences: Vec<Occurrence>,
        segments: SegmentMap,
        num_items: usize,
    ) -> Self {
        let find = |role: VertexRole| vertices.iter().position(|v| v.role == role);
        let source = find(VertexRole::Source).expect("dag has a source");
        let sink = find(VertexRole::Sink).expect("dag has a sink");
        let junction = find(VertexRole::Junction);
        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for e in &edges {
            out_edges[e.tail].push(e.id);
            in_edges[e.head].push(e.id);
        }
        Self {
            variant,
            vertices,
            edges,
            source,
            sink,
            junction,
            occurrences,
            segments,
            num_items,
            out_edges,
            in_edges,
        }
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Slot of a real vertex.
    pub fn vertex_slot(&self, v: usize) -> Option<usize> {
        match self.vertices[v].role {
            VertexRole::Tail(q) | VertexRole::Head(q) => Some(self.occurrences[q].slot),
            _ => None,
        }
    }

    /// Edges carrying an item label that retrieve it, grouped by item (index `item - 1`).
    pub fn retrieving_edges(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_items];
        for e in self.edges.iter().filter(|e| e.retrieves()) {
            groups[e.item.expect("occurrence edges are labelled") - 1].push(e.id);
        }
        groups
    }

    /// Penalty edge of each item in the virtual chain, if the variant has one.
    pub fn penalty_edges(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.num_items];
        for e in self.edges.iter().filter(|e| e.kind == EdgeKind::VirtualPenalty) {
            out[e.item.expect("penalty edges are labelled") - 1] = Some(e.id);
        }
        out
    }

    /// Vertex ids are a topological order and real edges never go back in time.
    pub fn check_topological(&self) -> Result<(), DagError> {
        for e in &self.edges {
            let backwards = match (self.vertex_slot(e.tail), self.vertex_slot(e.head)) {
                (Some(a), Some(b)) => b < a,
                _ => false,
            };
            if e.tail >= e.head || backwards {
                return Err(DagError::NotTopological { edge: e.id });
            }
        }
        Ok(())
    }

    /// All s–t paths as edge lists; exponential, for small graphs only.
    pub fn enumerate_paths(&self, to: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn walk(
            g: &Dag,
            v: usize,
            to: usize,
            stack: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
            limit: usize,
        ) -> bool {
            if v == to {
                out.push(stack.clone());
                return out.len() <= limit;
            }
            for &e in g.out_edges(v) {
                stack.push(e);
                let ok = walk(g, g.edges[e].head, to, stack, out, limit);
                stack.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        walk(self, self.source, to, &mut stack, &mut out, limit).then_some(out)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph alwdr {\n  rankdir=LR;\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let mut label = match v.role {
                VertexRole::Source => "s".to_string(),
                VertexRole::Sink => "t".to_string(),
                VertexRole::Junction => "p".to_string(),
                VertexRole::Chain(k) => format!("c{k}"),
                VertexRole::Tail(q) => {
                    let o = self.occurrences[q];
                    format!("v({},{},{})", o.item, o.channel, o.slot)
                }
                VertexRole::Head(q) => {
                    let o = self.occurrences[q];
                    format!("w({},{},{})", o.item, o.channel, o.slot)
                }
            };
            if !v.carried.is_empty() {
                let _ = write!(label, " {:?}", v.carried);
            }
            let _ = writeln!(out, "  n{i} [label=\"{label}\"];");
        }
        for e in &self.edges {
            let label = match (e.kind, e.item) {
                (EdgeKind::Occurrence, Some(i)) => format!("d{i} w={}", e.weight),
                (EdgeKind::VirtualPenalty, Some(i)) => format!("pen d{i} w={}", e.weight),
                (EdgeKind::PassThrough, _) => "pass".to_string(),
                _ => String::new(),
            };
            let style = match e.kind {
                EdgeKind::Occurrence | EdgeKind::VirtualPenalty => ", style=bold",
                EdgeKind::PassThrough | EdgeKind::VirtualFree => ", style=dashed",
                _ => "",
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{label}\"{style}];",
                e.tail, e.head
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Turns edge-disjoint paths from the source into one antenna sequence each.
///
/// Paths may end at the junction or the sink. Only retrieving edges enter the
/// schedule; a cell already taken by an earlier antenna is skipped.
pub fn path_to_schedule(g: &Dag, paths: &[Vec<usize>]) -> Result<Schedule, DagError> {
    let mut used = HashSet::new();
    let mut taken = HashSet::new();
    let mut antennas = Vec::with_capacity(paths.len());
    for path in paths {
        let mut at = g.source;
        let mut seq: Vec<Occurrence> = Vec::new();
        for &id in path {
            let e = g.edges.get(id).ok_or(DagError::UnknownEdge { edge: id })?;
            if e.tail != at {
                return Err(DagError::Disconnected { edge: id, vertex: at });
            }
            if !used.insert(id) {
                return Err(DagError::NotDisjoint { edge: id });
            }
            at = e.head;
            if e.retrieves() {
                let o = g.occurrences[e.occurrence.expect("occurrence edge")];
                if let Some(prev) = seq.last() {
                    if !conflict_free(prev, &o) {
                        return Err(DagError::Conflict {
                            first: *prev,
                            second: o,
                        });
                    }
                }
                seq.push(o);
            }
        }
        if !path.is_empty() && at != g.sink && Some(at) != g.junction {
            return Err(DagError::Endpoints);
        }
        seq.retain(|o| taken.insert(o.cell()));
        antennas.push(seq);
    }
    Ok(Schedule { antennas })
}

/// Weight of the retrieving edges on a path, counted per edge.
pub fn path_weight(g: &Dag, path: &[usize]) -> Rational {
    path.iter()
        .map(|&e| &g.edges[e])
        .filter(|e| e.retrieves())
        .fold(Rational::zero(), |acc, e| acc + e.weight)
}
