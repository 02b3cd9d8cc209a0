//! Refinements of labelled graphs.
//!
//! A basic refinement splits one edge labelled `T·T'` into a chain
//! `C --T'-- E --T-- D` through a fresh vertex `E`, where `T` is the type and
//! `C` the endpoint the type is measured from. For a loop at `L` the chain
//! closes up into the 2-cycle `L --T'-- E --T-- L`.
//!
//! Witnesses record the maps `E' -> E` and `V' -> E ⊔ V` explicitly;
//! [`verify_refinement`] checks them against both graphs without looking at
//! how they were produced.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, GraphIssue, LabelledGraph};
use crate::monoid::{MonoidElement, MonoidError};

/// Where a vertex of the fine graph comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preimage {
    Vertex(String),
    Edge(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementWitness {
    #[serde(rename = "edgeMap")]
    pub edge_map: BTreeMap<String, String>,
    #[serde(rename = "vertexMap")]
    pub vertex_map: BTreeMap<String, Preimage>,
}

impl RefinementWitness {
    /// The trivial refinement of `g` by itself.
    pub fn identity(g: &LabelledGraph) -> Self {
        Self {
            edge_map: g
                .edges()
                .iter()
                .map(|e| (e.id.clone(), e.id.clone()))
                .collect(),
            vertex_map: g
                .vertices()
                .iter()
                .map(|v| (v.clone(), Preimage::Vertex(v.clone())))
                .collect(),
        }
    }
}

/// One blow-up: split `edge` with the given type, measured from the
/// endpoint `oriented_from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicRefinementSpec {
    pub edge: String,
    pub oriented_from: String,
    pub section_type: MonoidElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("unknown edge `{0}`")]
    MissingEdge(String),
    #[error("`{section_type}` is not a type of edge `{edge}` labelled `{label}`")]
    InvalidType {
        edge: String,
        section_type: String,
        label: String,
    },
    #[error("`{vertex}` is not an endpoint of edge `{edge}`")]
    NotAnEndpoint { edge: String, vertex: String },
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Output of [`basic_refinement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicRefinement {
    pub graph: LabelledGraph,
    pub witness: RefinementWitness,
    /// The exceptional vertex `E`.
    pub new_vertex: String,
    /// `[C--E labelled T', E--D labelled T]`.
    pub new_edges: [String; 2],
}

fn fresh(taken: &BTreeSet<&str>, count: usize, make: impl Fn(usize) -> String) -> Vec<String> {
    (1..)
        .map(make)
        .filter(|id| !taken.contains(id.as_str()))
        .take(count)
        .collect()
}

pub fn basic_refinement(
    g: &LabelledGraph,
    spec: &BasicRefinementSpec,
) -> Result<BasicRefinement, RefineError> {
    let position = g
        .edges()
        .iter()
        .position(|e| e.id == spec.edge)
        .ok_or_else(|| RefineError::MissingEdge(spec.edge.clone()))?;
    let edge = &g.edges()[position];
    let invalid_type = || RefineError::InvalidType {
        edge: edge.id.clone(),
        section_type: spec.section_type.to_string(),
        label: edge.label.to_string(),
    };
    let complement = spec
        .section_type
        .divides(&edge.label)?
        .ok_or_else(invalid_type)?;
    if spec.section_type.is_identity() || complement.is_identity() {
        return Err(invalid_type());
    }
    let (from, to) = if edge.ends[0] == spec.oriented_from {
        (&edge.ends[0], &edge.ends[1])
    } else if edge.ends[1] == spec.oriented_from {
        (&edge.ends[1], &edge.ends[0])
    } else {
        return Err(RefineError::NotAnEndpoint {
            edge: edge.id.clone(),
            vertex: spec.oriented_from.clone(),
        });
    };

    let taken_edges: BTreeSet<&str> = g.edges().iter().map(|e| e.id.as_str()).collect();
    let taken_vertices: BTreeSet<&str> = g.vertices().iter().map(String::as_str).collect();
    let ids = fresh(&taken_edges, 2, |k| format!("{}.{k}", edge.id));
    let middle = fresh(&taken_vertices, 1, |k| format!("{}.x{k}", edge.id)).remove(0);
    let near = Edge::new(ids[0].clone(), from.clone(), middle.clone(), complement);
    let far = Edge::new(
        ids[1].clone(),
        middle.clone(),
        to.clone(),
        spec.section_type.clone(),
    );

    let mut edges = Vec::with_capacity(g.edges().len() + 1);
    edges.extend_from_slice(&g.edges()[..position]);
    edges.push(near);
    edges.push(far);
    edges.extend_from_slice(&g.edges()[position + 1..]);
    let mut vertices = g.vertices().to_vec();
    vertices.push(middle.clone());

    let mut witness = RefinementWitness::identity(g);
    witness.edge_map.remove(&edge.id);
    for id in &ids {
        witness.edge_map.insert(id.clone(), edge.id.clone());
    }
    witness
        .vertex_map
        .insert(middle.clone(), Preimage::Edge(edge.id.clone()));

    Ok(BasicRefinement {
        graph: LabelledGraph::new(Arc::clone(g.alphabet()), vertices, edges),
        witness,
        new_vertex: middle,
        new_edges: [ids[0].clone(), ids[1].clone()],
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessIssue {
    #[error("coarse graph: {0}")]
    CoarseGraph(GraphIssue),
    #[error("fine graph: {0}")]
    FineGraph(GraphIssue),
    #[error("graphs are labelled over different alphabets")]
    AlphabetMismatch,
    #[error("fine edge `{0}` is not mapped")]
    UnmappedEdge(String),
    #[error("fine vertex `{0}` is not mapped")]
    UnmappedVertex(String),
    #[error("edge map has a key `{0}` that is not a fine edge")]
    StrayEdgeKey(String),
    #[error("vertex map has a key `{0}` that is not a fine vertex")]
    StrayVertexKey(String),
    #[error("fine edge `{fine}` maps to unknown coarse edge `{coarse}`")]
    UnknownEdgeImage { fine: String, coarse: String },
    #[error("fine vertex `{fine}` maps to unknown coarse {target}")]
    UnknownVertexImage { fine: String, target: String },
    #[error("coarse vertex `{vertex}` has {count} preimages")]
    VertexPreimages { vertex: String, count: usize },
    #[error("coarse edge `{0}` has an empty fiber")]
    EmptyChain(String),
    #[error("fiber of coarse edge `{edge}` is not a chain: {detail}")]
    NotAChain { edge: String, detail: String },
    #[error("label product mismatch on `{edge}`: expected {expected}, found {found}")]
    LabelProductMismatch {
        edge: String,
        expected: String,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementReport {
    pub issues: Vec<WitnessIssue>,
    /// Whether the edge map fails to be a bijection.
    pub strict: bool,
}

impl RefinementReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.issues.iter().map(ToString::to_string).collect()
    }
}

/// Checks that `witness` exhibits `fine` as a refinement of `coarse`.
pub fn verify_refinement(
    coarse: &LabelledGraph,
    fine: &LabelledGraph,
    witness: &RefinementWitness,
) -> RefinementReport {
    let mut issues = Vec::new();
    let coarse_report = coarse.validate();
    let fine_report = fine.validate();
    let structural = |i: &GraphIssue| {
        matches!(
            i,
            GraphIssue::UnknownEndpoint { .. }
                | GraphIssue::DuplicateEdge(_)
                | GraphIssue::DuplicateVertex(_)
        )
    };
    let broken =
        coarse_report.issues.iter().any(structural) || fine_report.issues.iter().any(structural);
    issues.extend(
        coarse_report
            .issues
            .into_iter()
            .map(WitnessIssue::CoarseGraph),
    );
    issues.extend(fine_report.issues.into_iter().map(WitnessIssue::FineGraph));
    if coarse.alphabet() != fine.alphabet() {
        issues.push(WitnessIssue::AlphabetMismatch);
    }

    let coarse_edges: BTreeMap<&str, &Edge> =
        coarse.edges().iter().map(|e| (e.id.as_str(), e)).collect();
    let coarse_vertices: BTreeSet<&str> = coarse.vertices().iter().map(String::as_str).collect();
    let fine_edges: BTreeSet<&str> = fine.edges().iter().map(|e| e.id.as_str()).collect();
    let fine_vertices: BTreeSet<&str> = fine.vertices().iter().map(String::as_str).collect();

    let images: BTreeSet<&str> = witness.edge_map.values().map(String::as_str).collect();
    let strict = !(witness.edge_map.len() == coarse.edges().len()
        && images.len() == coarse.edges().len()
        && fine.edges().len() == coarse.edges().len());

    for key in witness.edge_map.keys() {
        if !fine_edges.contains(key.as_str()) {
            issues.push(WitnessIssue::StrayEdgeKey(key.clone()));
        }
    }
    for key in witness.vertex_map.keys() {
        if !fine_vertices.contains(key.as_str()) {
            issues.push(WitnessIssue::StrayVertexKey(key.clone()));
        }
    }
    for e in fine.edges() {
        match witness.edge_map.get(&e.id) {
            None => issues.push(WitnessIssue::UnmappedEdge(e.id.clone())),
            Some(c) if !coarse_edges.contains_key(c.as_str()) => {
                issues.push(WitnessIssue::UnknownEdgeImage {
                    fine: e.id.clone(),
                    coarse: c.clone(),
                })
            }
            Some(_) => {}
        }
    }
    let mut vertex_preimages: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut edge_interiors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for v in fine.vertices() {
        match witness.vertex_map.get(v) {
            None => issues.push(WitnessIssue::UnmappedVertex(v.clone())),
            Some(Preimage::Vertex(c)) => {
                if coarse_vertices.contains(c.as_str()) {
                    vertex_preimages.entry(c).or_default().push(v);
                } else {
                    issues.push(WitnessIssue::UnknownVertexImage {
                        fine: v.clone(),
                        target: format!("vertex `{c}`"),
                    });
                }
            }
            Some(Preimage::Edge(c)) => {
                if coarse_edges.contains_key(c.as_str()) {
                    edge_interiors.entry(c).or_default().insert(v);
                } else {
                    issues.push(WitnessIssue::UnknownVertexImage {
                        fine: v.clone(),
                        target: format!("edge `{c}`"),
                    });
                }
            }
        }
    }
    let mut lift: BTreeMap<&str, &str> = BTreeMap::new();
    for v in coarse.vertices() {
        match vertex_preimages.get(v.as_str()).map(Vec::as_slice) {
            Some([single]) => {
                lift.insert(v, single);
            }
            other => issues.push(WitnessIssue::VertexPreimages {
                vertex: v.clone(),
                count: other.map_or(0, <[&str]>::len),
            }),
        }
    }
    if broken {
        return RefinementReport { issues, strict };
    }

    let empty = BTreeSet::new();
    for e in coarse.edges() {
        let (Some(&start), Some(&end)) =
            (lift.get(e.ends[0].as_str()), lift.get(e.ends[1].as_str()))
        else {
            continue;
        };
        let fiber: Vec<&Edge> = fine
            .edges()
            .iter()
            .filter(|f| witness.edge_map.get(&f.id) == Some(&e.id))
            .collect();
        if fiber.is_empty() {
            issues.push(WitnessIssue::EmptyChain(e.id.clone()));
            continue;
        }
        let interior = edge_interiors.get(e.id.as_str()).unwrap_or(&empty);
        let not_a_chain = |detail: String| WitnessIssue::NotAChain {
            edge: e.id.clone(),
            detail,
        };

        let mut used = vec![false; fiber.len()];
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        let mut current = start;
        let mut product = MonoidElement::identity(fine.alphabet());
        let mut failure = None;
        let mut arrived = false;
        while let Some(k) = (0..fiber.len()).find(|&k| !used[k] && fiber[k].touches(current)) {
            used[k] = true;
            let step = fiber[k];
            match product.mul(&step.label) {
                Ok(p) => product = p,
                Err(err) => {
                    failure = Some(err.to_string());
                    break;
                }
            }
            let next = if step.ends[0] == current {
                step.ends[1].as_str()
            } else {
                step.ends[0].as_str()
            };
            if next == end {
                arrived = true;
                break;
            }
            if !interior.contains(next) {
                failure = Some(format!(
                    "step along `{}` leaves the fiber at `{next}`",
                    step.id
                ));
                break;
            }
            if !visited.insert(next) {
                failure = Some(format!("vertex `{next}` is visited twice"));
                break;
            }
            current = next;
        }
        let issue = if let Some(detail) = failure {
            Some(detail)
        } else if !arrived {
            Some(format!("no path from `{start}` to `{end}`"))
        } else if used.iter().any(|u| !u) {
            Some("fiber has edges off the chain".to_owned())
        } else if visited.len() != interior.len() {
            Some("fiber has vertices off the chain".to_owned())
        } else {
            None
        };
        if let Some(detail) = issue {
            issues.push(not_a_chain(detail));
        } else if product != e.label {
            issues.push(WitnessIssue::LabelProductMismatch {
                edge: e.id.clone(),
                expected: e.label.to_string(),
                found: product.to_string(),
            });
        }
    }
    RefinementReport { issues, strict }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("inner witness maps to edge `{0}`, unknown to the outer witness")]
    UnknownEdge(String),
    #[error("inner witness maps to vertex `{0}`, unknown to the outer witness")]
    UnknownVertex(String),
}

/// Given `outer: g' ⪯ g` and `inner: g'' ⪯ g'`, returns `g'' ⪯ g`.
pub fn compose_witnesses(
    outer: &RefinementWitness,
    inner: &RefinementWitness,
) -> Result<RefinementWitness, CompositionError> {
    let through_edge = |e: &String| {
        outer
            .edge_map
            .get(e)
            .cloned()
            .ok_or_else(|| CompositionError::UnknownEdge(e.clone()))
    };
    let edge_map = inner
        .edge_map
        .iter()
        .map(|(fine, mid)| Ok((fine.clone(), through_edge(mid)?)))
        .collect::<Result<_, CompositionError>>()?;
    let vertex_map = inner
        .vertex_map
        .iter()
        .map(|(fine, pre)| {
            let composed = match pre {
                Preimage::Vertex(v) => outer
                    .vertex_map
                    .get(v)
                    .cloned()
                    .ok_or_else(|| CompositionError::UnknownVertex(v.clone()))?,
                Preimage::Edge(e) => Preimage::Edge(through_edge(e)?),
            };
            Ok((fine.clone(), composed))
        })
        .collect::<Result<_, CompositionError>>()?;
    Ok(RefinementWitness {
        edge_map,
        vertex_map,
    })
}

/// Output of [`resolve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub graph: LabelledGraph,
    pub witness: RefinementWitness,
    pub steps: Vec<BasicRefinementSpec>,
}

/// Refines `g` until every label is prime.
///
/// Each step takes the non-prime edge with the least id, splits off the
/// first prime of its label in alphabet order as the type, and orients it
/// from the lexicographically least endpoint. Step count equals the total
/// complexity of `g`.
pub fn resolve(g: &LabelledGraph) -> Result<Resolution, RefineError> {
    let mut graph = g.clone();
    let mut witness = RefinementWitness::identity(g);
    let mut steps = Vec::new();
    while let Some(edge) = graph
        .edges()
        .iter()
        .filter(|e| !e.label.is_prime() && !e.label.is_identity())
        .min_by(|a, b| a.id.cmp(&b.id))
    {
        let (symbol, _) = edge
            .label
            .support()
            .next()
            .expect("non-identity label has a prime factor");
        let spec = BasicRefinementSpec {
            edge: edge.id.clone(),
            oriented_from: edge.ends.iter().min().expect("two ends").clone(),
            section_type: MonoidElement::prime(graph.alphabet(), symbol)?,
        };
        let step = basic_refinement(&graph, &spec)?;
        witness = compose_witnesses(&witness, &step.witness)
            .expect("consecutive basic refinements compose");
        graph = step.graph;
        steps.push(spec);
    }
    Ok(Resolution {
        graph,
        witness,
        steps,
    })
}
