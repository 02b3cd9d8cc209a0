//! Labelled multigraphs: the dual graph at a point.
//!
//! A [`LabelledGraph`] is plain data and may be built in an invalid state;
//! [`LabelledGraph::validate`] lists what is wrong with it. All other
//! operations assume a graph whose edge endpoints are declared vertices,
//! and panic otherwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{MonoidElement, MonoidError, PrimeAlphabet};
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [String; 2],
    pub label: MonoidElement,
}

impl Edge {
    pub fn new(
        id: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        label: MonoidElement,
    ) -> Self {
        Self {
            id: id.into(),
            ends: [a.into(), b.into()],
            label,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn touches(&self, vertex: &str) -> bool {
        self.ends.iter().any(|v| v == vertex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledGraph {
    alphabet: Arc<PrimeAlphabet>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphIssue {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("empty id")]
    EmptyId,
    #[error("edge `{edge}` has unknown endpoint `{vertex}`")]
    UnknownEndpoint { edge: String, vertex: String },
    #[error("edge `{0}` label is a unit")]
    UnitLabel(String),
    #[error("edge `{0}` label is over a different alphabet")]
    ForeignLabel(String),
    #[error("disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown edge `{0}`")]
    MissingEdge(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cycle budget exceeded: more than {cap} cycles")]
pub struct CycleBudgetExceeded {
    pub cap: usize,
}

/// A simple cycle: `vertices[i]` and `vertices[i + 1]` are the ends of
/// `edges[i]`, and `vertices` starts and ends at the same vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    pub edges: Vec<String>,
    pub vertices: Vec<String>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The least rotation/reversal, ordered by edge ids then vertex ids.
    pub fn canonical(&self) -> Cycle {
        fn key<'a>(seq: &'a [&'a String], k: usize) -> impl Iterator<Item = &'a String> + 'a {
            (0..seq.len()).map(move |i| seq[(i + k) % seq.len()])
        }
        let n = self.edges.len();
        let mut best: Option<(Vec<&String>, Vec<&String>, usize)> = None;
        for reversed in [false, true] {
            let (edges, ring): (Vec<&String>, Vec<&String>) = if reversed {
                (
                    self.edges.iter().rev().collect(),
                    self.vertices[..n].iter().rev().collect(),
                )
            } else {
                (
                    self.edges.iter().collect(),
                    self.vertices[..n].iter().collect(),
                )
            };
            // starts[i] is the vertex edges[i] is entered from
            let starts: Vec<&String> = if reversed {
                (0..n).map(|i| ring[(i + n - 1) % n]).collect()
            } else {
                ring
            };
            for k in 0..n {
                let better = match &best {
                    None => true,
                    Some((be, bs, bk)) => key(&edges, k)
                        .cmp(key(be, *bk))
                        .then_with(|| key(&starts, k).cmp(key(bs, *bk)))
                        .is_lt(),
                };
                if better {
                    best = Some((edges.clone(), starts.clone(), k));
                }
            }
        }
        let Some((edges, starts, k)) = best else {
            return self.clone();
        };
        let mut vertices: Vec<String> = (0..n).map(|i| starts[(i + k) % n].clone()).collect();
        vertices.push(vertices[0].clone());
        Cycle {
            edges: (0..n).map(|i| edges[(i + k) % n].clone()).collect(),
            vertices,
        }
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.edges.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Disconnecting,
    NonDisconnecting,
}

/// Result of [`LabelledGraph::contract`]. `merge` maps every old vertex to
/// the vertex of the contracted graph it was identified with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub graph: LabelledGraph,
    pub merge: BTreeMap<String, String>,
}

impl LabelledGraph {
    pub fn new(alphabet: Arc<PrimeAlphabet>, vertices: Vec<String>, edges: Vec<Edge>) -> Self {
        Self {
            alphabet,
            vertices,
            edges,
        }
    }

    pub fn alphabet(&self) -> &Arc<PrimeAlphabet> {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.iter().any(|v| v == id)
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn betti_number(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn validate(&self) -> ValidationReport<GraphIssue> {
        let mut report = ValidationReport::default();
        if self.vertices.is_empty() {
            report.push(GraphIssue::NoVertices);
        }
        let mut seen = BTreeSet::new();
        let mut endpoints_ok = true;
        for v in &self.vertices {
            if v.is_empty() {
                report.push(GraphIssue::EmptyId);
            }
            if !seen.insert(v.as_str()) {
                endpoints_ok = false;
                report.push(GraphIssue::DuplicateVertex(v.clone()));
            }
        }
        let mut seen_edges = BTreeSet::new();
        for e in &self.edges {
            if e.id.is_empty() {
                report.push(GraphIssue::EmptyId);
            }
            if !seen_edges.insert(e.id.as_str()) {
                report.push(GraphIssue::DuplicateEdge(e.id.clone()));
            }
            let mut ends: Vec<&String> = e.ends.iter().collect();
            ends.dedup();
            for v in ends {
                if !seen.contains(v.as_str()) {
                    endpoints_ok = false;
                    report.push(GraphIssue::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
            if e.label.alphabet() != &self.alphabet {
                report.push(GraphIssue::ForeignLabel(e.id.clone()));
            } else if e.label.is_identity() {
                report.push(GraphIssue::UnitLabel(e.id.clone()));
            }
        }
        if endpoints_ok && !self.vertices.is_empty() && !self.is_connected_skipping(None) {
            report.push(GraphIssue::Disconnected);
        }
        report
    }

    fn vertex_index(&self) -> HashMap<&str, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect()
    }

    fn endpoint_indices(&self) -> Vec<(usize, usize)> {
        let index = self.vertex_index();
        self.edges
            .iter()
            .map(|e| {
                let at = |v: &String| {
                    *index
                        .get(v.as_str())
                        .unwrap_or_else(|| panic!("edge `{}` has unknown endpoint `{v}`", e.id))
                };
                (at(&e.ends[0]), at(&e.ends[1]))
            })
            .collect()
    }

    /// Connectivity of the graph with edge `skip` removed.
    fn is_connected_skipping(&self, skip: Option<usize>) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let ends = self.endpoint_indices();
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in ends.iter().enumerate() {
            if Some(i) != skip {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Calls `visit` once per simple cycle (up to rotation and reversal),
    /// each passed in canonical form, until it breaks. Loops come first.
    ///
    /// Backtracking search: exponential in the worst case.
    pub fn visit_cycles<F>(&self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(Cycle) -> ControlFlow<()>,
    {
        let ends = self.endpoint_indices();
        let n = self.vertices.len();
        for (i, &(a, b)) in ends.iter().enumerate() {
            if a == b {
                let v = self.vertices[a].clone();
                visit(Cycle {
                    edges: vec![self.edges[i].id.clone()],
                    vertices: vec![v.clone(), v],
                })?;
            }
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(a, b)) in ends.iter().enumerate() {
            if a != b {
                adj[a].push((i, b));
                adj[b].push((i, a));
            }
        }

        struct Search<'a, F> {
            graph: &'a LabelledGraph,
            adj: &'a [Vec<(usize, usize)>],
            on_path: Vec<bool>,
            path_vertices: Vec<usize>,
            path_edges: Vec<usize>,
            visit: F,
        }

        impl<F: FnMut(Cycle) -> ControlFlow<()>> Search<'_, F> {
            fn extend(&mut self, start: usize, current: usize) -> ControlFlow<()> {
                let came_by = self.path_edges.last().copied();
                for k in 0..self.adj[current].len() {
                    let (e, w) = self.adj[current][k];
                    if Some(e) == came_by {
                        continue;
                    }
                    if w == start {
                        // each cycle is met in both directions; keep one
                        if self.path_edges[0] < e {
                            let mut edges: Vec<String> = self
                                .path_edges
                                .iter()
                                .map(|&i| self.graph.edges[i].id.clone())
                                .collect();
                            edges.push(self.graph.edges[e].id.clone());
                            let mut vertices: Vec<String> = self
                                .path_vertices
                                .iter()
                                .map(|&i| self.graph.vertices[i].clone())
                                .collect();
                            vertices.push(self.graph.vertices[start].clone());
                            (self.visit)(Cycle { edges, vertices }.canonical())?;
                        }
                    } else if w > start && !self.on_path[w] {
                        self.on_path[w] = true;
                        self.path_vertices.push(w);
                        self.path_edges.push(e);
                        let flow = self.extend(start, w);
                        self.path_edges.pop();
                        self.path_vertices.pop();
                        self.on_path[w] = false;
                        flow?;
                    }
                }
                ControlFlow::Continue(())
            }
        }

        let mut search = Search {
            graph: self,
            adj: &adj,
            on_path: vec![false; n],
            path_vertices: Vec::new(),
            path_edges: Vec::new(),
            visit: &mut visit,
        };
        for (start, neighbours) in adj.iter().enumerate() {
            search.on_path[start] = true;
            search.path_vertices.push(start);
            for &(e, w) in neighbours {
                if w > start {
                    search.on_path[w] = true;
                    search.path_vertices.push(w);
                    search.path_edges.push(e);
                    let flow = search.extend(start, w);
                    search.path_edges.pop();
                    search.path_vertices.pop();
                    search.on_path[w] = false;
                    flow?;
                }
            }
            search.path_vertices.pop();
            search.on_path[start] = false;
        }
        ControlFlow::Continue(())
    }

    /// All simple cycles in canonical form, sorted. Fails if there are more
    /// than `cap`.
    pub fn cycles(&self, cap: usize) -> Result<Vec<Cycle>, CycleBudgetExceeded> {
        let mut out = Vec::new();
        let flow = self.visit_cycles(|c| {
            if out.len() == cap {
                return ControlFlow::Break(());
            }
            out.push(c);
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return Err(CycleBudgetExceeded { cap });
        }
        out.sort();
        Ok(out)
    }

    /// Bridge detection by DFS low-points; parallel edges are told apart by
    /// edge index, so a doubled edge is never a bridge.
    pub fn classify_edges(&self) -> BTreeMap<String, EdgeKind> {
        let ends = self.endpoint_indices();
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(a, b)) in ends.iter().enumerate() {
            if a != b {
                adj[a].push((i, b));
                adj[b].push((i, a));
            }
        }
        let mut bridge = vec![false; self.edges.len()];
        let mut order = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut clock = 0;
        for root in 0..n {
            if order[root] != usize::MAX {
                continue;
            }
            // (vertex, edge used to enter it, next adjacency slot)
            let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
            order[root] = clock;
            low[root] = clock;
            clock += 1;
            while let Some(&mut (v, parent_edge, ref mut slot)) = stack.last_mut() {
                if let Some(&(e, w)) = adj[v].get(*slot) {
                    *slot += 1;
                    if Some(e) == parent_edge {
                        continue;
                    }
                    if order[w] == usize::MAX {
                        order[w] = clock;
                        low[w] = clock;
                        clock += 1;
                        stack.push((w, Some(e), 0));
                    } else {
                        low[v] = low[v].min(order[w]);
                    }
                } else {
                    stack.pop();
                    if let (Some(e), Some(&(parent, _, _))) = (parent_edge, stack.last()) {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > order[parent] {
                            bridge[e] = true;
                        }
                    }
                }
            }
        }
        self.edges
            .iter()
            .zip(bridge)
            .map(|(e, is_bridge)| {
                let kind = if is_bridge {
                    EdgeKind::Disconnecting
                } else {
                    EdgeKind::NonDisconnecting
                };
                (e.id.clone(), kind)
            })
            .collect()
    }

    /// Sum of the arithmetic complexities of the edge labels.
    pub fn total_complexity(&self) -> Result<u64, MonoidError> {
        self.edges.iter().try_fold(0u64, |acc, e| {
            acc.checked_add(e.label.complexity()?)
                .ok_or(MonoidError::Overflow)
        })
    }

    /// Identifies the endpoints of every edge in `to_contract` and drops
    /// those edges. Each merged class is named after its member that comes
    /// first in vertex order, and vertex order is otherwise preserved.
    pub fn contract<'a, I>(&self, to_contract: I) -> Result<Contraction, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut drop = vec![false; self.edges.len()];
        for id in to_contract {
            let i = self
                .edges
                .iter()
                .position(|e| e.id == id)
                .ok_or_else(|| GraphError::MissingEdge(id.to_owned()))?;
            drop[i] = true;
        }
        let ends = self.endpoint_indices();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, &(a, b)) in ends.iter().enumerate() {
            if drop[i] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                // the smaller index wins, so representatives are first in order
                let (keep, other) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[other] = keep;
            }
        }
        let reps: Vec<usize> = (0..self.vertices.len())
            .map(|v| find(&mut parent, v))
            .collect();
        let merge = self
            .vertices
            .iter()
            .zip(&reps)
            .map(|(v, &r)| (v.clone(), self.vertices[r].clone()))
            .collect();
        let vertices = (0..self.vertices.len())
            .filter(|&v| reps[v] == v)
            .map(|v| self.vertices[v].clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .zip(&ends)
            .zip(&drop)
            .filter(|(_, &d)| !d)
            .map(|((e, &(a, b)), _)| Edge {
                id: e.id.clone(),
                ends: [
                    self.vertices[reps[a]].clone(),
                    self.vertices[reps[b]].clone(),
                ],
                label: e.label.clone(),
            })
            .collect();
        Ok(Contraction {
            graph: LabelledGraph::new(Arc::clone(&self.alphabet), vertices, edges),
            merge,
        })
    }
}
