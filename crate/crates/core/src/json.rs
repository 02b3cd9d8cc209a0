//! JSON interchange formats.
//!
//! Each contract has a document type mirroring the wire shape exactly, plus
//! conversions to and from the domain types. Labels serialize as objects
//! mapping symbol to exponent in alphabet order; the identity is `{}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::align::AlignmentReport;
use crate::family::{CommutingDeclaration, Correspondence, Cover, FamilyVerdict, GraphFamily};
use crate::graph::{Edge, LabelledGraph};
use crate::monoid::{MonoidElement, MonoidError, MonoidHom, PrimeAlphabet};
use crate::refine::{BasicRefinementSpec, RefinementWitness};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Monoid {
        context: String,
        #[source]
        source: MonoidError,
    },
    #[error("{0}")]
    Family(String),
}

fn monoid_err(context: impl Into<String>) -> impl FnOnce(MonoidError) -> FormatError {
    let context = context.into();
    move |source| FormatError::Monoid { context, source }
}

/// A label as `(symbol, exponent)` pairs in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelDoc(pub Vec<(String, u64)>);

impl Serialize for LabelDoc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LabelDoc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LabelVisitor;
        impl<'de> Visitor<'de> for LabelVisitor {
            type Value = LabelDoc;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping prime symbols to positive exponents")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<LabelDoc, A::Error> {
                let mut pairs: Vec<(String, u64)> = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, u64>()? {
                    if pairs.iter().any(|(s, _)| *s == k) {
                        return Err(serde::de::Error::custom(format!("duplicate symbol `{k}`")));
                    }
                    pairs.push((k, v));
                }
                Ok(LabelDoc(pairs))
            }
        }
        deserializer.deserialize_map(LabelVisitor)
    }
}

impl LabelDoc {
    pub fn from_element(m: &MonoidElement) -> Self {
        LabelDoc(m.support().map(|(s, e)| (s.to_owned(), e)).collect())
    }

    pub fn to_element(&self, alphabet: &Arc<PrimeAlphabet>) -> Result<MonoidElement, MonoidError> {
        MonoidElement::from_pairs(alphabet, self.0.iter().map(|(s, e)| (s.as_str(), *e)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    pub label: LabelDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub alphabet: Vec<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &LabelledGraph) -> Self {
        GraphDoc {
            alphabet: g.alphabet().symbols().to_vec(),
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    ends: e.ends.clone(),
                    label: LabelDoc::from_element(&e.label),
                })
                .collect(),
        }
    }

    /// Structural problems (unknown endpoints, units, connectivity) are left
    /// for [`LabelledGraph::validate`]; only labels that cannot be
    /// represented over the alphabet are rejected here.
    pub fn to_graph(&self) -> Result<LabelledGraph, FormatError> {
        let alphabet =
            PrimeAlphabet::new(self.alphabet.iter().cloned()).map_err(monoid_err("alphabet"))?;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let label = e
                    .label
                    .to_element(&alphabet)
                    .map_err(monoid_err(format!("label of edge `{}`", e.id)))?;
                Ok(Edge {
                    id: e.id.clone(),
                    ends: e.ends.clone(),
                    label,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(LabelledGraph::new(alphabet, self.vertices.clone(), edges))
    }
}

pub fn parse_graph(text: &str) -> Result<LabelledGraph, FormatError> {
    serde_json::from_str::<GraphDoc>(text)?.to_graph()
}

pub fn graph_to_json(g: &LabelledGraph) -> String {
    to_pretty(&GraphDoc::from_graph(g))
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents always serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub edge: String,
    pub from: String,
    #[serde(rename = "type")]
    pub section_type: LabelDoc,
}

impl SpecDoc {
    pub fn from_spec(spec: &BasicRefinementSpec) -> Self {
        SpecDoc {
            edge: spec.edge.clone(),
            from: spec.oriented_from.clone(),
            section_type: LabelDoc::from_element(&spec.section_type),
        }
    }

    pub fn to_spec(
        &self,
        alphabet: &Arc<PrimeAlphabet>,
    ) -> Result<BasicRefinementSpec, FormatError> {
        Ok(BasicRefinementSpec {
            edge: self.edge.clone(),
            oriented_from: self.from.clone(),
            section_type: self
                .section_type
                .to_element(alphabet)
                .map_err(monoid_err(format!("type for edge `{}`", self.edge)))?,
        })
    }
}

pub fn parse_specs(
    text: &str,
    alphabet: &Arc<PrimeAlphabet>,
) -> Result<Vec<BasicRefinementSpec>, FormatError> {
    serde_json::from_str::<Vec<SpecDoc>>(text)?
        .iter()
        .map(|d| d.to_spec(alphabet))
        .collect()
}

pub fn specs_to_json(specs: &[BasicRefinementSpec]) -> String {
    to_pretty(&specs.iter().map(SpecDoc::from_spec).collect::<Vec<_>>())
}

/// Image assignment `{srcPrime: {tgtPrime: exp}}`, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImageDoc(pub Vec<(String, LabelDoc)>);

impl Serialize for ImageDoc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ImageDoc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ImageVisitor;
        impl<'de> Visitor<'de> for ImageVisitor {
            type Value = ImageDoc;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping source primes to labels")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<ImageDoc, A::Error> {
                let mut pairs: Vec<(String, LabelDoc)> = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, LabelDoc>()? {
                    if pairs.iter().any(|(s, _)| *s == k) {
                        return Err(serde::de::Error::custom(format!("duplicate prime `{k}`")));
                    }
                    pairs.push((k, v));
                }
                Ok(ImageDoc(pairs))
            }
        }
        deserializer.deserialize_map(ImageVisitor)
    }
}

impl ImageDoc {
    pub fn from_hom(h: &MonoidHom) -> Self {
        ImageDoc(
            h.source()
                .symbols()
                .iter()
                .zip(h.images())
                .map(|(s, m)| (s.clone(), LabelDoc::from_element(m)))
                .collect(),
        )
    }

    pub fn to_hom(
        &self,
        source: &Arc<PrimeAlphabet>,
        target: &Arc<PrimeAlphabet>,
    ) -> Result<MonoidHom, MonoidError> {
        let images = self
            .0
            .iter()
            .map(|(s, l)| Ok((s.as_str(), l.to_element(target)?)))
            .collect::<Result<Vec<_>, MonoidError>>()?;
        MonoidHom::from_assignment(source, target, images)
    }
}

/// A standalone homomorphism with both alphabets spelled out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub image: ImageDoc,
}

impl HomDoc {
    pub fn from_hom(h: &MonoidHom) -> Self {
        HomDoc {
            source: h.source().symbols().to_vec(),
            target: h.target().symbols().to_vec(),
            image: ImageDoc::from_hom(h),
        }
    }

    pub fn to_hom(&self) -> Result<MonoidHom, FormatError> {
        let source = PrimeAlphabet::new(self.source.iter().cloned())
            .map_err(monoid_err("source alphabet"))?;
        let target = PrimeAlphabet::new(self.target.iter().cloned())
            .map_err(monoid_err("target alphabet"))?;
        self.image
            .to_hom(&source, &target)
            .map_err(monoid_err("homomorphism"))
    }
}

pub fn parse_hom(text: &str) -> Result<MonoidHom, FormatError> {
    serde_json::from_str::<HomDoc>(text)?.to_hom()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleDoc {
    pub cycle: Vec<String>,
    pub labels: Vec<LabelDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub aligned: bool,
    pub strictly_aligned: bool,
    pub separated: bool,
    pub counterexample: Option<CounterexampleDoc>,
    pub cycles_inspected: usize,
    pub capped: bool,
}

impl ReportDoc {
    /// `g` is the graph the report was computed on; counterexample labels are
    /// those of the cycle's edges, in cycle order.
    pub fn from_report(report: &AlignmentReport, g: &LabelledGraph) -> Self {
        let counterexample = report.counterexample().map(|(cycle, _)| CounterexampleDoc {
            cycle: cycle.edges.clone(),
            labels: cycle
                .edges
                .iter()
                .map(|id| LabelDoc::from_element(&g.edge(id).expect("cycle edge in graph").label))
                .collect(),
        });
        ReportDoc {
            aligned: report.aligned,
            strictly_aligned: report.strictly_aligned,
            separated: report.separated(),
            counterexample,
            cycles_inspected: report.cycles_inspected,
            capped: report.capped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub from: String,
    pub to: String,
    pub hom: ImageDoc,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceDoc {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutingDoc {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

/// Correspondences are keyed `"<from>-><to>"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub points: Vec<String>,
    pub covers: Vec<CoverDoc>,
    pub graphs: BTreeMap<String, GraphDoc>,
    #[serde(default)]
    pub correspondences: BTreeMap<String, CorrespondenceDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub commuting: Vec<CommutingDoc>,
}

pub fn cover_key(from: &str, to: &str) -> String {
    format!("{from}->{to}")
}

impl FamilyDoc {
    pub fn from_family(f: &GraphFamily) -> Self {
        FamilyDoc {
            points: f.points.clone(),
            covers: f
                .covers
                .iter()
                .map(|c| CoverDoc {
                    from: c.from.clone(),
                    to: c.to.clone(),
                    hom: ImageDoc::from_hom(&c.hom),
                })
                .collect(),
            graphs: f
                .graphs
                .iter()
                .map(|(p, g)| (p.clone(), GraphDoc::from_graph(g)))
                .collect(),
            correspondences: f
                .correspondences
                .iter()
                .map(|((from, to), c)| {
                    (
                        cover_key(from, to),
                        CorrespondenceDoc {
                            vertices: c.vertices.clone(),
                            edges: c.edges.clone(),
                        },
                    )
                })
                .collect(),
            commuting: f
                .commuting
                .iter()
                .map(|c| CommutingDoc {
                    left: c.left.clone(),
                    right: c.right.clone(),
                })
                .collect(),
        }
    }

    pub fn to_family(&self) -> Result<GraphFamily, FormatError> {
        let graphs: BTreeMap<String, LabelledGraph> = self
            .graphs
            .iter()
            .map(|(p, d)| Ok((p.clone(), d.to_graph()?)))
            .collect::<Result<_, FormatError>>()?;
        let covers = self
            .covers
            .iter()
            .map(|c| {
                let alphabet = |p: &str| {
                    graphs
                        .get(p)
                        .map(|g| Arc::clone(g.alphabet()))
                        .ok_or_else(|| {
                            FormatError::Family(format!(
                                "cover {} refers to point `{p}` without a graph",
                                cover_key(&c.from, &c.to)
                            ))
                        })
                };
                let hom = c
                    .hom
                    .to_hom(&alphabet(&c.from)?, &alphabet(&c.to)?)
                    .map_err(monoid_err(format!(
                        "hom of cover {}",
                        cover_key(&c.from, &c.to)
                    )))?;
                Ok(Cover {
                    from: c.from.clone(),
                    to: c.to.clone(),
                    hom,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        let mut correspondences = BTreeMap::new();
        for (key, c) in &self.correspondences {
            let Some((from, to)) = key.split_once("->") else {
                return Err(FormatError::Family(format!(
                    "correspondence key `{key}` is not of the form `from->to`"
                )));
            };
            correspondences.insert(
                (from.to_owned(), to.to_owned()),
                Correspondence {
                    vertices: c.vertices.clone(),
                    edges: c.edges.clone(),
                },
            );
        }
        Ok(GraphFamily {
            points: self.points.clone(),
            covers,
            graphs,
            correspondences,
            commuting: self
                .commuting
                .iter()
                .map(|c| CommutingDeclaration {
                    left: c.left.clone(),
                    right: c.right.clone(),
                })
                .collect(),
        })
    }
}

pub fn parse_family(text: &str) -> Result<GraphFamily, FormatError> {
    serde_json::from_str::<FamilyDoc>(text)?.to_family()
}

pub fn family_to_json(f: &GraphFamily) -> String {
    to_pretty(&FamilyDoc::from_family(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyVerdictDoc {
    pub points: BTreeMap<String, ReportDoc>,
    pub separated: bool,
}

impl FamilyVerdictDoc {
    pub fn from_verdict(v: &FamilyVerdict, f: &GraphFamily) -> Self {
        FamilyVerdictDoc {
            points: v
                .points
                .iter()
                .map(|(p, r)| (p.clone(), ReportDoc::from_report(r, &f.graphs[p])))
                .collect(),
            separated: v.separated,
        }
    }
}

pub fn parse_witness(text: &str) -> Result<RefinementWitness, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn witness_to_json(w: &RefinementWitness) -> String {
    to_pretty(w)
}
