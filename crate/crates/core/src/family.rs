//! Families of dual graphs over a finite poset of points.
//!
//! A cover `s -> ξ` says that `ξ` is a generization of `s`. Along it, labels
//! are pushed through a monoid homomorphism; edges whose label becomes a
//! unit are contracted. The family stores, per cover, a correspondence
//! identifying the graph derived this way with the graph stored at `ξ`. A
//! missing correspondence means the identity on ids.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::align::{is_strictly_aligned, AlignmentReport};
use crate::graph::{CycleBudgetExceeded, GraphError, LabelledGraph};
use crate::monoid::{MonoidError, MonoidHom};
use crate::refine::{basic_refinement, BasicRefinement, BasicRefinementSpec, RefineError};
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub from: String,
    pub to: String,
    pub hom: MonoidHom,
}

/// Maps ids of the derived graph to ids of the stored graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Correspondence {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

impl Correspondence {
    pub fn identity(g: &LabelledGraph) -> Self {
        Self {
            vertices: g
                .vertices()
                .iter()
                .map(|v| (v.clone(), v.clone()))
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.id.clone(), e.id.clone()))
                .collect(),
        }
    }
}

/// Two chains of covers with common endpoints whose composite homs the
/// family asserts to be equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutingDeclaration {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphFamily {
    pub points: Vec<String>,
    pub covers: Vec<Cover>,
    pub graphs: BTreeMap<String, LabelledGraph>,
    pub correspondences: BTreeMap<(String, String), Correspondence>,
    pub commuting: Vec<CommutingDeclaration>,
}

impl GraphFamily {
    pub fn single(point: impl Into<String>, graph: LabelledGraph) -> Self {
        let point = point.into();
        GraphFamily {
            points: vec![point.clone()],
            graphs: BTreeMap::from([(point, graph)]),
            ..Default::default()
        }
    }

    pub fn cover(&self, from: &str, to: &str) -> Option<&Cover> {
        self.covers.iter().find(|c| c.from == from && c.to == to)
    }

    /// Points in an order compatible with the covers, or `None` if the
    /// covers contain a cycle. Covers to unknown points are ignored.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let index: BTreeMap<&str, usize> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.points.len()];
        let mut out_edges = vec![Vec::new(); self.points.len()];
        for c in &self.covers {
            if let (Some(&a), Some(&b)) = (index.get(c.from.as_str()), index.get(c.to.as_str())) {
                out_edges[a].push(b);
                indegree[b] += 1;
            }
        }
        let mut ready: VecDeque<usize> = (0..self.points.len())
            .filter(|&i| indegree[i] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.points.len());
        while let Some(i) = ready.pop_front() {
            order.push(self.points[i].clone());
            for &j in &out_edges[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push_back(j);
                }
            }
        }
        (order.len() == self.points.len()).then_some(order)
    }
}

/// Output of [`specialize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    pub graph: LabelledGraph,
    pub contracted: Vec<String>,
    pub merge: BTreeMap<String, String>,
}

/// Pushes every label through `h` and contracts the edges whose image is
/// the identity.
pub fn specialize(g: &LabelledGraph, h: &MonoidHom) -> Result<Specialization, MonoidError> {
    if h.source() != g.alphabet() {
        return Err(MonoidError::AlphabetMismatch {
            left: g.alphabet().symbols().join(","),
            right: h.source().symbols().join(","),
        });
    }
    let mut edges = Vec::with_capacity(g.edges().len());
    let mut contracted = Vec::new();
    for e in g.edges() {
        let mut image = e.clone();
        image.label = h.apply(&e.label)?;
        if image.label.is_identity() {
            contracted.push(e.id.clone());
        }
        edges.push(image);
    }
    let pushed = LabelledGraph::new(h.target().clone(), g.vertices().to_vec(), edges);
    let contraction = pushed
        .contract(contracted.iter().map(String::as_str))
        .map_err(|e| match e {
            GraphError::Monoid(m) => m,
            GraphError::MissingEdge(_) => unreachable!("contracted edges come from the graph"),
        })?;
    Ok(Specialization {
        graph: contraction.graph,
        contracted,
        merge: contraction.merge,
    })
}

/// Checks that `corr` is an isomorphism of labelled graphs `derived -> stored`.
fn check_correspondence(
    derived: &LabelledGraph,
    stored: &LabelledGraph,
    corr: &Correspondence,
) -> Result<(), String> {
    fn bijection(
        map: &BTreeMap<String, String>,
        domain: BTreeSet<&str>,
        codomain: BTreeSet<&str>,
        what: &str,
    ) -> Result<(), String> {
        let keys: BTreeSet<&str> = map.keys().map(String::as_str).collect();
        if keys != domain {
            return Err(format!(
                "{what} correspondence is not defined exactly on the derived {what}s"
            ));
        }
        let values: BTreeSet<&str> = map.values().map(String::as_str).collect();
        if values.len() != map.len() || values != codomain {
            return Err(format!(
                "{what} correspondence is not a bijection onto the stored {what}s"
            ));
        }
        Ok(())
    }
    if derived.alphabet() != stored.alphabet() {
        return Err("derived and stored alphabets differ".to_owned());
    }
    bijection(
        &corr.vertices,
        derived.vertices().iter().map(String::as_str).collect(),
        stored.vertices().iter().map(String::as_str).collect(),
        "vertex",
    )?;
    bijection(
        &corr.edges,
        derived.edges().iter().map(|e| e.id.as_str()).collect(),
        stored.edges().iter().map(|e| e.id.as_str()).collect(),
        "edge",
    )?;
    for e in derived.edges() {
        let target = stored
            .edge(&corr.edges[&e.id])
            .expect("bijection onto stored edges");
        let mut mapped = [
            corr.vertices[&e.ends[0]].as_str(),
            corr.vertices[&e.ends[1]].as_str(),
        ];
        let mut actual = [target.ends[0].as_str(), target.ends[1].as_str()];
        mapped.sort_unstable();
        actual.sort_unstable();
        if mapped != actual {
            return Err(format!(
                "edge `{}` has ends {{{}, {}}} but stored `{}` has {{{}, {}}}",
                e.id, mapped[0], mapped[1], target.id, actual[0], actual[1]
            ));
        }
        if e.label != target.label {
            return Err(format!(
                "edge `{}` derives label {} but stored `{}` has {}",
                e.id, e.label, target.id, target.label
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyIssue {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("no graph at point `{0}`")]
    MissingGraph(String),
    #[error("graph given for undeclared point `{0}`")]
    StrayGraph(String),
    #[error("graph at `{point}`: {issue}")]
    InvalidGraph { point: String, issue: String },
    #[error("cover {from}->{to} refers to an unknown point")]
    UnknownPoint { from: String, to: String },
    #[error("cover {0}->{0} is reflexive")]
    ReflexiveCover(String),
    #[error("duplicate cover {from}->{to}")]
    DuplicateCover { from: String, to: String },
    #[error("covering relations contain a cycle")]
    CyclicOrder,
    #[error("hom of cover {from}->{to} has the wrong {side} alphabet")]
    HomAlphabet {
        from: String,
        to: String,
        side: &'static str,
    },
    #[error("specialization mismatch at ({from},{to}): {detail}")]
    SpecializationMismatch {
        from: String,
        to: String,
        detail: String,
    },
    #[error("correspondence {from}->{to} does not belong to a cover")]
    StrayCorrespondence { from: String, to: String },
    #[error("commuting declaration {left:?} / {right:?}: {detail}")]
    NonCommuting {
        left: Vec<String>,
        right: Vec<String>,
        detail: String,
    },
}

fn chain_hom(f: &GraphFamily, chain: &[String]) -> Result<MonoidHom, String> {
    let first = chain.first().ok_or("empty chain")?;
    let g = f
        .graphs
        .get(first)
        .ok_or_else(|| format!("no graph at `{first}`"))?;
    let mut hom = MonoidHom::identity(g.alphabet());
    for pair in chain.windows(2) {
        let cover = f
            .cover(&pair[0], &pair[1])
            .ok_or_else(|| format!("{}->{} is not a cover", pair[0], pair[1]))?;
        hom = hom.then(&cover.hom).map_err(|e| e.to_string())?;
    }
    Ok(hom)
}

pub fn validate_family(f: &GraphFamily) -> ValidationReport<FamilyIssue> {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for p in &f.points {
        if !seen.insert(p.as_str()) {
            report.push(FamilyIssue::DuplicatePoint(p.clone()));
        }
        match f.graphs.get(p) {
            None => report.push(FamilyIssue::MissingGraph(p.clone())),
            Some(g) => {
                for issue in g.validate().messages() {
                    report.push(FamilyIssue::InvalidGraph {
                        point: p.clone(),
                        issue,
                    });
                }
            }
        }
    }
    for p in f.graphs.keys() {
        if !seen.contains(p.as_str()) {
            report.push(FamilyIssue::StrayGraph(p.clone()));
        }
    }
    let mut covers = BTreeSet::new();
    for c in &f.covers {
        if !seen.contains(c.from.as_str()) || !seen.contains(c.to.as_str()) {
            report.push(FamilyIssue::UnknownPoint {
                from: c.from.clone(),
                to: c.to.clone(),
            });
        }
        if c.from == c.to {
            report.push(FamilyIssue::ReflexiveCover(c.from.clone()));
        }
        if !covers.insert((c.from.as_str(), c.to.as_str())) {
            report.push(FamilyIssue::DuplicateCover {
                from: c.from.clone(),
                to: c.to.clone(),
            });
        }
    }
    if f.topological_order().is_none() {
        report.push(FamilyIssue::CyclicOrder);
    }
    for key in f.correspondences.keys() {
        if !covers.contains(&(key.0.as_str(), key.1.as_str())) {
            report.push(FamilyIssue::StrayCorrespondence {
                from: key.0.clone(),
                to: key.1.clone(),
            });
        }
    }

    for c in &f.covers {
        let (Some(source), Some(target)) = (f.graphs.get(&c.from), f.graphs.get(&c.to)) else {
            continue;
        };
        let mut alphabets_ok = true;
        if c.hom.source() != source.alphabet() {
            alphabets_ok = false;
            report.push(FamilyIssue::HomAlphabet {
                from: c.from.clone(),
                to: c.to.clone(),
                side: "source",
            });
        }
        if c.hom.target() != target.alphabet() {
            alphabets_ok = false;
            report.push(FamilyIssue::HomAlphabet {
                from: c.from.clone(),
                to: c.to.clone(),
                side: "target",
            });
        }
        let graphs_ok = source.validate().is_valid() && target.validate().is_valid();
        if !alphabets_ok || !graphs_ok {
            continue;
        }
        let mismatch = |detail: String| FamilyIssue::SpecializationMismatch {
            from: c.from.clone(),
            to: c.to.clone(),
            detail,
        };
        match specialize(source, &c.hom) {
            Err(e) => report.push(mismatch(e.to_string())),
            Ok(derived) => {
                let corr = f
                    .correspondences
                    .get(&(c.from.clone(), c.to.clone()))
                    .cloned()
                    .unwrap_or_else(|| Correspondence::identity(&derived.graph));
                if let Err(detail) = check_correspondence(&derived.graph, target, &corr) {
                    report.push(mismatch(detail));
                }
            }
        }
    }

    for decl in &f.commuting {
        let issue = |detail: String| FamilyIssue::NonCommuting {
            left: decl.left.clone(),
            right: decl.right.clone(),
            detail,
        };
        if decl.left.first() != decl.right.first() || decl.left.last() != decl.right.last() {
            report.push(issue("chains do not share their endpoints".to_owned()));
            continue;
        }
        match (chain_hom(f, &decl.left), chain_hom(f, &decl.right)) {
            (Ok(l), Ok(r)) => {
                for ((symbol, a), b) in l.source().symbols().iter().zip(l.images()).zip(r.images())
                {
                    if a != b {
                        report.push(issue(format!(
                            "`{symbol}` maps to {a} along one chain and {b} along the other"
                        )));
                    }
                }
            }
            (Err(d), _) | (_, Err(d)) => report.push(issue(d)),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("family is not usable for transport: {0}")]
    InvalidFamily(String),
    #[error("refinement at `{point}`: {source}")]
    Refine {
        point: String,
        #[source]
        source: RefineError,
    },
    #[error(
        "`{point}` is not minimal: its specialization `{specialization}` also carries the edge"
    )]
    TransportDirection {
        point: String,
        specialization: String,
    },
    #[error("covers into `{0}` demand incompatible refinements")]
    Incoherent(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

#[derive(Debug, Clone)]
enum Demand {
    /// The source point was not refined at all.
    Untouched,
    /// The refinement became trivial or the edge was contracted.
    Trivial,
    Refine(BasicRefinementSpec),
}

fn correspondence_for(f: &GraphFamily, cover: &Cover, derived: &LabelledGraph) -> Correspondence {
    f.correspondences
        .get(&(cover.from.clone(), cover.to.clone()))
        .cloned()
        .unwrap_or_else(|| Correspondence::identity(derived))
}

/// Orientation-independent key of a refinement, for comparing demands.
fn refinement_key(
    g: &LabelledGraph,
    spec: &BasicRefinementSpec,
) -> Option<(String, String, Vec<u64>)> {
    let edge = g.edge(&spec.edge)?;
    let complement = spec.section_type.divides(&edge.label).ok()??;
    let flipped_from = if edge.ends[0] == spec.oriented_from {
        edge.ends[1].clone()
    } else {
        edge.ends[0].clone()
    };
    let direct = (
        spec.oriented_from.clone(),
        spec.section_type.exponents().to_vec(),
    );
    let reverse = (flipped_from, complement.exponents().to_vec());
    let (from, t) = direct.min(reverse);
    Some((spec.edge.clone(), from, t))
}

/// Applies a basic refinement at `point` and carries it to every
/// generization reachable through covers. Along a cover with hom `h`, a
/// refinement of type `T` on an edge labelled `m` becomes: nothing if
/// `h(m)` is the identity (the edge is contracted); nothing if `h(T)` is the
/// identity or `h(m)`; otherwise the basic refinement of type `h(T)` on the
/// corresponding edge.
pub fn transport_basic_refinement(
    f: &GraphFamily,
    point: &str,
    spec: &BasicRefinementSpec,
) -> Result<GraphFamily, TransportError> {
    let base = f
        .graphs
        .get(point)
        .ok_or_else(|| TransportError::UnknownPoint(point.to_owned()))?;
    let order = f.topological_order().ok_or_else(|| {
        TransportError::InvalidFamily("covering relations contain a cycle".into())
    })?;
    let graph_at = |p: &str| {
        f.graphs
            .get(p)
            .ok_or_else(|| TransportError::InvalidFamily(format!("no graph at `{p}`")))
    };

    for cover in f.covers.iter().filter(|c| c.to == point) {
        let derived = specialize(graph_at(&cover.from)?, &cover.hom)?;
        let corr = correspondence_for(f, cover, &derived.graph);
        if corr.edges.values().any(|e| *e == spec.edge) {
            return Err(TransportError::TransportDirection {
                point: point.to_owned(),
                specialization: cover.from.clone(),
            });
        }
    }

    let refine_at = |p: &str, g: &LabelledGraph, s: &BasicRefinementSpec| {
        basic_refinement(g, s).map_err(|source| TransportError::Refine {
            point: p.to_owned(),
            source,
        })
    };
    let mut applied: BTreeMap<String, (BasicRefinementSpec, BasicRefinement)> = BTreeMap::new();
    applied.insert(
        point.to_owned(),
        (spec.clone(), refine_at(point, base, spec)?),
    );

    for p in order.iter().filter(|p| p.as_str() != point) {
        let target = graph_at(p)?;
        let mut demands = Vec::new();
        for cover in f.covers.iter().filter(|c| &c.to == p) {
            let demand = match applied.get(&cover.from) {
                None => Demand::Untouched,
                Some((s, _)) => {
                    let source = graph_at(&cover.from)?;
                    let label = &source.edge(&s.edge).expect("refined edge exists").label;
                    let label_image = cover.hom.apply(label)?;
                    let type_image = cover.hom.apply(&s.section_type)?;
                    if label_image.is_identity()
                        || type_image.is_identity()
                        || type_image == label_image
                    {
                        Demand::Trivial
                    } else {
                        let derived = specialize(source, &cover.hom)?;
                        let corr = correspondence_for(f, cover, &derived.graph);
                        let incoherent = || TransportError::Incoherent(p.clone());
                        let edge = corr.edges.get(&s.edge).ok_or_else(incoherent)?.clone();
                        let from = corr
                            .vertices
                            .get(&derived.merge[&s.oriented_from])
                            .ok_or_else(incoherent)?
                            .clone();
                        Demand::Refine(BasicRefinementSpec {
                            edge,
                            oriented_from: from,
                            section_type: type_image,
                        })
                    }
                }
            };
            demands.push((cover.from.clone(), demand));
        }
        let Some(chosen) = demands.iter().find_map(|(_, d)| match d {
            Demand::Refine(s) => Some(s.clone()),
            _ => None,
        }) else {
            continue;
        };
        let key = refinement_key(target, &chosen);
        for (from, demand) in &demands {
            match demand {
                Demand::Untouched => {
                    return Err(TransportError::TransportDirection {
                        point: point.to_owned(),
                        specialization: from.clone(),
                    })
                }
                Demand::Trivial => return Err(TransportError::Incoherent(p.clone())),
                Demand::Refine(s) => {
                    if refinement_key(target, s) != key {
                        return Err(TransportError::Incoherent(p.clone()));
                    }
                }
            }
        }
        let result = refine_at(p, target, &chosen)?;
        applied.insert(p.clone(), (chosen, result));
    }

    let mut out = f.clone();
    for cover in f.covers.iter().filter(|c| applied.contains_key(&c.from)) {
        let (spec_q, refined_q) = &applied[&cover.from];
        let old_derived = specialize(graph_at(&cover.from)?, &cover.hom)?;
        let old = correspondence_for(f, cover, &old_derived.graph);
        let new_derived = specialize(&refined_q.graph, &cover.hom)?;
        let incoherent = || TransportError::Incoherent(cover.to.clone());
        let mut corr = Correspondence::default();
        for v in new_derived.graph.vertices() {
            let image = if *v == refined_q.new_vertex {
                let (_, refined_p) = applied.get(&cover.to).ok_or_else(incoherent)?;
                refined_p.new_vertex.clone()
            } else {
                old.vertices.get(v).ok_or_else(incoherent)?.clone()
            };
            corr.vertices.insert(v.clone(), image);
        }
        let stored = match applied.get(&cover.to) {
            Some((_, refined_p)) => &refined_p.graph,
            None => graph_at(&cover.to)?,
        };
        let fresh: Vec<&String> = refined_q
            .new_edges
            .iter()
            .filter(|e| new_derived.graph.edge(e).is_some())
            .collect();
        for e in new_derived.graph.edges() {
            if !fresh.contains(&&e.id) {
                corr.edges.insert(
                    e.id.clone(),
                    old.edges.get(&e.id).ok_or_else(incoherent)?.clone(),
                );
            }
        }
        match applied.get(&cover.to) {
            Some((_, refined_p)) => {
                let [a, b] = &refined_p.new_edges;
                let direct = [(&refined_q.new_edges[0], a), (&refined_q.new_edges[1], b)];
                let swapped = [(&refined_q.new_edges[0], b), (&refined_q.new_edges[1], a)];
                let attempt = |pairs: [(&String, &String); 2]| {
                    let mut c = corr.clone();
                    for (from, to) in pairs {
                        c.edges.insert(from.clone(), to.clone());
                    }
                    check_correspondence(&new_derived.graph, stored, &c)
                        .ok()
                        .map(|_| c)
                };
                corr = attempt(direct)
                    .or_else(|| attempt(swapped))
                    .ok_or_else(incoherent)?;
            }
            None => {
                for e in fresh {
                    corr.edges.insert(
                        e.clone(),
                        old.edges.get(&spec_q.edge).ok_or_else(incoherent)?.clone(),
                    );
                }
                check_correspondence(&new_derived.graph, stored, &corr)
                    .map_err(|_| incoherent())?;
            }
        }
        out.correspondences
            .insert((cover.from.clone(), cover.to.clone()), corr);
    }
    for (p, (_, refined)) in applied {
        out.graphs.insert(p, refined.graph);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub points: Vec<(String, AlignmentReport)>,
    /// Strictly aligned at every point.
    pub separated: bool,
}

pub fn family_verdict(f: &GraphFamily, cap: usize) -> Result<FamilyVerdict, CycleBudgetExceeded> {
    let points = f
        .points
        .iter()
        .filter_map(|p| f.graphs.get(p).map(|g| (p, g)))
        .map(|(p, g)| Ok((p.clone(), is_strictly_aligned(g, cap)?)))
        .collect::<Result<Vec<_>, CycleBudgetExceeded>>()?;
    let separated = points.iter().all(|(_, r)| r.strictly_aligned);
    Ok(FamilyVerdict { points, separated })
}
