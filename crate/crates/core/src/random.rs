//! Seeded random labelled graphs.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, LabelledGraph};
use crate::monoid::{MonoidElement, PrimeAlphabet};

const SYMBOLS: [&str; 6] = ["u", "v", "w", "x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub alphabet_size: usize,
    pub max_exponent: u64,
    pub max_support: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("vertex count must be positive")]
    NoVertices,
    #[error("{edges} edges cannot connect {vertices} vertices")]
    TooFewEdges { vertices: usize, edges: usize },
    #[error("alphabet size must be positive")]
    EmptyAlphabet,
    #[error("max exponent must be positive")]
    ZeroExponent,
    #[error("max support must be between 1 and the alphabet size {alphabet}, got {support}")]
    Support { support: usize, alphabet: usize },
}

impl RandomSpec {
    pub fn check(&self) -> Result<(), SpecError> {
        if self.vertex_count == 0 {
            return Err(SpecError::NoVertices);
        }
        if self.edge_count + 1 < self.vertex_count {
            return Err(SpecError::TooFewEdges {
                vertices: self.vertex_count,
                edges: self.edge_count,
            });
        }
        if self.alphabet_size == 0 {
            return Err(SpecError::EmptyAlphabet);
        }
        if self.max_exponent == 0 {
            return Err(SpecError::ZeroExponent);
        }
        if self.max_support == 0 || self.max_support > self.alphabet_size {
            return Err(SpecError::Support {
                support: self.max_support,
                alphabet: self.alphabet_size,
            });
        }
        Ok(())
    }
}

/// Symbols `u, v, w, x, y, z`, then `p6, p7, ...`.
pub fn default_alphabet(size: usize) -> Arc<PrimeAlphabet> {
    let symbols = (0..size).map(|i| match SYMBOLS.get(i) {
        Some(s) => (*s).to_owned(),
        None => format!("p{i}"),
    });
    PrimeAlphabet::new(symbols).expect("generated symbols are distinct")
}

pub fn random_label<R: Rng>(
    rng: &mut R,
    alphabet: &Arc<PrimeAlphabet>,
    max_support: usize,
    max_exponent: u64,
) -> MonoidElement {
    let support = rng.gen_range(1..=max_support.min(alphabet.len()));
    let mut exponents = vec![0; alphabet.len()];
    for i in sample(rng, alphabet.len(), support) {
        exponents[i] = rng.gen_range(1..=max_exponent);
    }
    MonoidElement::from_exponents(alphabet, exponents).expect("arity matches")
}

/// Random connected graph: a spanning tree on `v0, v1, ...` first, then the
/// remaining edges between arbitrary vertices.
pub fn gen_random(spec: &RandomSpec) -> Result<LabelledGraph, SpecError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let alphabet = default_alphabet(spec.alphabet_size);
    let vertices: Vec<String> = (0..spec.vertex_count).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(spec.edge_count);
    for i in 0..spec.edge_count {
        let (a, b) = if i + 1 < spec.vertex_count {
            (rng.gen_range(0..=i), i + 1)
        } else {
            (
                rng.gen_range(0..spec.vertex_count),
                rng.gen_range(0..spec.vertex_count),
            )
        };
        let label = random_label(&mut rng, &alphabet, spec.max_support, spec.max_exponent);
        edges.push(Edge::new(
            format!("e{i}"),
            &vertices[a],
            &vertices[b],
            label,
        ));
    }
    Ok(LabelledGraph::new(alphabet, vertices, edges))
}
