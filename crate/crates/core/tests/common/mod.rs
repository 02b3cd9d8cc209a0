#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use dualgraph::random::random_label;
use dualgraph::{
    gen_random, BasicRefinementSpec, Edge, LabelledGraph, MonoidElement, MonoidHom, PrimeAlphabet,
    RandomSpec,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn alphabet(symbols: &[&str]) -> Arc<PrimeAlphabet> {
    PrimeAlphabet::new(symbols.iter().copied()).unwrap()
}

pub fn el(a: &Arc<PrimeAlphabet>, text: &str) -> MonoidElement {
    MonoidElement::parse_text(a, text).unwrap()
}

pub fn graph(
    a: &Arc<PrimeAlphabet>,
    vertices: &[&str],
    edges: &[(&str, &str, &str, &str)],
) -> LabelledGraph {
    LabelledGraph::new(
        a.clone(),
        vertices.iter().map(|v| v.to_string()).collect(),
        edges
            .iter()
            .map(|(id, x, y, l)| Edge::new(*id, *x, *y, el(a, l)))
            .collect(),
    )
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// At most 8 edges, alphabet of at most 4 symbols, exponents at most 3.
pub fn corpus_spec(seed: u64) -> RandomSpec {
    let mut r = rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let vertex_count = r.gen_range(1..=6);
    let edge_count = r.gen_range((vertex_count - 1)..=8);
    let alphabet_size = r.gen_range(1..=4);
    RandomSpec {
        seed,
        vertex_count,
        edge_count,
        alphabet_size,
        max_exponent: r.gen_range(1..=3),
        max_support: r.gen_range(1..=alphabet_size),
    }
}

pub fn corpus_graph(seed: u64) -> LabelledGraph {
    gen_random(&corpus_spec(seed)).unwrap()
}

/// A random basic refinement of `g`, if some label is not prime.
pub fn random_spec<R: Rng>(r: &mut R, g: &LabelledGraph) -> Option<BasicRefinementSpec> {
    let candidates: Vec<&Edge> = g
        .edges()
        .iter()
        .filter(|e| e.label.complexity().unwrap() > 0)
        .collect();
    let edge = candidates.choose(r)?;
    let types = edge.label.enumerate_types().unwrap();
    Some(BasicRefinementSpec {
        edge: edge.id.clone(),
        oriented_from: edge.ends[r.gen_range(0..2)].clone(),
        section_type: types.choose(r).unwrap().clone(),
    })
}

/// Each prime goes to the identity with probability about 1/3, otherwise to
/// a random element with exponents at most 2.
pub fn random_hom<R: Rng>(
    r: &mut R,
    source: &Arc<PrimeAlphabet>,
    target: &Arc<PrimeAlphabet>,
) -> MonoidHom {
    let images = source
        .symbols()
        .iter()
        .map(|_| {
            if r.gen_ratio(1, 3) {
                MonoidElement::identity(target)
            } else {
                let support = r.gen_range(1..=target.len().min(2));
                random_label(r, target, support, 2)
            }
        })
        .collect();
    MonoidHom::new(source, target, images).unwrap()
}

/// Edge sets of simple cycles: nonempty connected edge subsets in which every
/// touched vertex has degree two.
pub fn subset_cycles(g: &LabelledGraph) -> BTreeSet<BTreeSet<String>> {
    let edges = g.edges();
    assert!(edges.len() <= 16, "oracle is exponential");
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << edges.len()) {
        let chosen: Vec<&Edge> = (0..edges.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &edges[i])
            .collect();
        let mut degree: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &chosen {
            *degree.entry(&e.ends[0]).or_default() += 1;
            *degree.entry(&e.ends[1]).or_default() += 1;
        }
        if degree.values().any(|&d| d != 2) {
            continue;
        }
        let mut reached: BTreeSet<&str> = BTreeSet::from([chosen[0].ends[0].as_str()]);
        loop {
            let before = reached.len();
            for e in &chosen {
                if reached.contains(e.ends[0].as_str()) || reached.contains(e.ends[1].as_str()) {
                    reached.insert(&e.ends[0]);
                    reached.insert(&e.ends[1]);
                }
            }
            if reached.len() == before {
                break;
            }
        }
        if reached.len() == degree.len() {
            out.insert(chosen.iter().map(|e| e.id.clone()).collect());
        }
    }
    out
}

/// Whether `x = b^n` for some `n >= 1`, by repeated division.
pub fn is_positive_power(x: &MonoidElement, b: &MonoidElement) -> bool {
    if b.is_identity() {
        return false;
    }
    let mut rest = x.clone();
    while !rest.is_identity() {
        match b.divides(&rest).unwrap() {
            Some(q) => rest = q,
            None => return false,
        }
    }
    !x.is_identity()
}

/// All divisors of `m`, by an exponent odometer.
pub fn divisors(m: &MonoidElement) -> Vec<MonoidElement> {
    let bounds = m.exponents().to_vec();
    let mut current = vec![0u64; bounds.len()];
    let mut out = Vec::new();
    loop {
        out.push(MonoidElement::from_exponents(m.alphabet(), current.clone()).unwrap());
        let mut i = 0;
        loop {
            if i == bounds.len() {
                return out;
            }
            if current[i] < bounds[i] {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// `(aligned, strictly aligned)` by searching the divisor lattice for a
/// common base on every cycle.
pub fn brute_alignment(g: &LabelledGraph) -> (bool, bool) {
    let mut aligned = true;
    let mut strict = true;
    for cycle in subset_cycles(g) {
        let labels: Vec<&MonoidElement> =
            cycle.iter().map(|id| &g.edge(id).unwrap().label).collect();
        let bases: Vec<MonoidElement> = divisors(labels[0])
            .into_iter()
            .filter(|b| labels.iter().all(|l| is_positive_power(l, b)))
            .collect();
        aligned &= !bases.is_empty();
        strict &= bases.iter().any(|b| b.degree().unwrap() == 1);
    }
    (aligned, strict)
}

/// Product of the labels of the fine edges mapped onto each coarse edge.
pub fn label_products(
    fine: &LabelledGraph,
    edge_map: &BTreeMap<String, String>,
) -> BTreeMap<String, MonoidElement> {
    let mut out: BTreeMap<String, MonoidElement> = BTreeMap::new();
    for e in fine.edges() {
        let coarse = edge_map[&e.id].clone();
        let product = match out.get(&coarse) {
            Some(p) => p.mul(&e.label).unwrap(),
            None => e.label.clone(),
        };
        out.insert(coarse, product);
    }
    out
}

/// Connected multigraphs on vertices `0..n` using every vertex, with
/// `edges` edges, up to isomorphism. Edges are sorted pairs `(i, j)`.
pub fn shapes(edges: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = BTreeSet::new();
    for n in 1..=edges + 1 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let mut chosen = Vec::new();
        multisets(&pairs, 0, edges, &mut chosen, &mut |m| {
            if connected_spanning(n, m) {
                out.insert((n, canonical(n, m)));
            }
        });
    }
    out.into_iter().collect()
}

type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn multisets(
    pairs: &[(usize, usize)],
    from: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut Visit,
) {
    if left == 0 {
        visit(chosen);
        return;
    }
    for i in from..pairs.len() {
        chosen.push(pairs[i]);
        multisets(pairs, i, left - 1, chosen, visit);
        chosen.pop();
    }
}

fn connected_spanning(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if reached[a] != reached[b] {
                reached[a] = true;
                reached[b] = true;
                changed = true;
            }
        }
    }
    reached.iter().all(|&r| r)
}

fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    permutations(&mut perm, 0, &mut |p| {
        let mut image: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
            .collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    });
    best.unwrap()
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

pub fn shape_graph(
    a: &Arc<PrimeAlphabet>,
    n: usize,
    edges: &[(usize, usize)],
    labels: &[MonoidElement],
) -> LabelledGraph {
    LabelledGraph::new(
        a.clone(),
        (0..n).map(|i| format!("n{i}")).collect(),
        edges
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&(x, y), l))| {
                Edge::new(format!("e{i}"), format!("n{x}"), format!("n{y}"), l.clone())
            })
            .collect(),
    )
}

pub type Shape = (Vec<String>, Vec<(String, [String; 2], String)>);

/// Vertex list and `(id, unordered ends, label)` per edge, in order.
pub fn shape_of(g: &LabelledGraph) -> Shape {
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let mut ends = e.ends.clone();
            ends.sort();
            (e.id.clone(), ends, e.label.to_string())
        })
        .collect();
    (g.vertices().to_vec(), edges)
}

/// What specializing along `h` should do to a basic refinement of `g`:
/// nothing if the edge is contracted or the image type is trivial, else the
/// basic refinement of image type on the specialized graph.
pub fn expected_specialized_refinement(
    g: &LabelledGraph,
    h: &MonoidHom,
    spec: &BasicRefinementSpec,
) -> Shape {
    let edge = g.edge(&spec.edge).unwrap();
    let label_image = h.apply(&edge.label).unwrap();
    let type_image = h.apply(&spec.section_type).unwrap();
    let base = dualgraph::specialize(g, h).unwrap();
    if label_image.is_identity() {
        return shape_of(&base.graph);
    }
    if type_image.is_identity() || type_image == label_image {
        // the surviving half of the chain is named after its side
        let survivor = if type_image.is_identity() { "1" } else { "2" };
        let (vertices, mut edges) = shape_of(&base.graph);
        for e in &mut edges {
            if e.0 == spec.edge {
                e.0 = format!("{}.{survivor}", spec.edge);
            }
        }
        return (vertices, edges);
    }
    let transported = BasicRefinementSpec {
        edge: spec.edge.clone(),
        oriented_from: base.merge[&spec.oriented_from].clone(),
        section_type: type_image,
    };
    shape_of(
        &dualgraph::basic_refinement(&base.graph, &transported)
            .unwrap()
            .graph,
    )
}

/// Random graph, hom into an alphabet of one to three symbols, and basic
/// refinement spec.
pub fn commutation_instance(seed: u64) -> Option<(LabelledGraph, MonoidHom, BasicRefinementSpec)> {
    let g = corpus_graph(seed);
    let mut r = rng(seed ^ 0x5eed);
    let spec = random_spec(&mut r, &g)?;
    let target = dualgraph::random::default_alphabet(r.gen_range(1..=3));
    let h = random_hom(&mut r, g.alphabet(), &target);
    Some((g, h, spec))
}

pub fn two_point_family(g: &LabelledGraph, h: &MonoidHom) -> dualgraph::GraphFamily {
    let derived = dualgraph::specialize(g, h).unwrap().graph;
    dualgraph::GraphFamily {
        points: vec!["s".into(), "t".into()],
        covers: vec![dualgraph::Cover {
            from: "s".into(),
            to: "t".into(),
            hom: h.clone(),
        }],
        graphs: BTreeMap::from([("s".into(), g.clone()), ("t".into(), derived)]),
        ..Default::default()
    }
}

/// `parse(serialize(x)) == x`, and serializing again is byte-identical.
pub fn round_trip<T: PartialEq + std::fmt::Debug>(
    x: &T,
    serialize: impl Fn(&T) -> String,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<(), String> {
    let text = serialize(x);
    let back = parse(&text)?;
    if &back != x {
        return Err(format!("parsed value differs from {x:?}"));
    }
    if serialize(&back) != text {
        return Err(format!("second serialization differs:\n{text}"));
    }
    Ok(())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Round-trips every fixture according to its file name; returns how many
/// were checked.
pub fn round_trip_fixtures() -> Result<usize, String> {
    use dualgraph::json::{self, HomDoc};
    let uv = alphabet(&["u", "v"]);
    let mut checked = 0;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .map_err(err)?
        .map(|e| e.map(|e| e.path()).map_err(err))
        .collect::<Result<_, _>>()?;
    paths.sort();
    for path in paths {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).map_err(err)?;
        let context = |e: String| format!("{name}: {e}");
        if name.starts_with("malformed") {
            if json::parse_graph(&text).is_ok() {
                return Err(format!("{name} parsed"));
            }
            continue;
        }
        if name.ends_with(".hom.json") {
            let h = json::parse_hom(&text).map_err(err).map_err(context)?;
            round_trip(
                &h,
                |h| json::to_pretty(&HomDoc::from_hom(h)),
                |t| json::parse_hom(t).map_err(err),
            )
            .map_err(context)?;
        } else if name.ends_with(".specs.json") {
            let specs = json::parse_specs(&text, &uv)
                .map_err(err)
                .map_err(context)?;
            round_trip(
                &specs,
                |s| json::specs_to_json(s),
                |t| json::parse_specs(t, &uv).map_err(err),
            )
            .map_err(context)?;
        } else if name.contains("family") {
            let f = json::parse_family(&text).map_err(err).map_err(context)?;
            round_trip(&f, json::family_to_json, |t| {
                json::parse_family(t).map_err(err)
            })
            .map_err(context)?;
        } else {
            let g = json::parse_graph(&text).map_err(err).map_err(context)?;
            round_trip(&g, json::graph_to_json, |t| {
                json::parse_graph(t).map_err(err)
            })
            .map_err(context)?;
        }
        checked += 1;
    }
    Ok(checked)
}

/// One random instance of each contract: graph, witness, spec list, report,
/// hom, family and family verdict.
pub fn round_trip_random(seed: u64) -> Result<(), String> {
    use dualgraph::json::{self, FamilyVerdictDoc, HomDoc, ReportDoc};
    let g = corpus_graph(seed);
    round_trip(&g, json::graph_to_json, |t| {
        json::parse_graph(t).map_err(err)
    })?;

    let r = dualgraph::resolve(&g).map_err(err)?;
    round_trip(&r.witness, json::witness_to_json, |t| {
        json::parse_witness(t).map_err(err)
    })?;
    round_trip(
        &r.steps,
        |s| json::specs_to_json(s),
        |t| json::parse_specs(t, g.alphabet()).map_err(err),
    )?;

    let report = dualgraph::is_aligned(&g, 1 << 20).map_err(err)?;
    let doc = ReportDoc::from_report(&report, &g);
    round_trip(&doc, json::to_pretty, |t| {
        serde_json::from_str(t).map_err(err)
    })?;

    let mut r = rng(seed);
    let target = dualgraph::random::default_alphabet(r.gen_range(1..=3));
    let h = random_hom(&mut r, g.alphabet(), &target);
    round_trip(
        &h,
        |h| json::to_pretty(&HomDoc::from_hom(h)),
        |t| json::parse_hom(t).map_err(err),
    )?;

    let mut f = two_point_family(&g, &h);
    if let Some(spec) = random_spec(&mut r, &g) {
        // transport materializes explicit correspondences
        f = dualgraph::transport_basic_refinement(&f, "s", &spec).map_err(err)?;
    }
    round_trip(&f, json::family_to_json, |t| {
        json::parse_family(t).map_err(err)
    })?;

    let verdict = dualgraph::family_verdict(&f, 1 << 20).map_err(err)?;
    let doc = FamilyVerdictDoc::from_verdict(&verdict, &f);
    round_trip(&doc, json::to_pretty, |t| {
        serde_json::from_str(t).map_err(err)
    })
}
