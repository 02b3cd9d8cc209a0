//! Alignment and strict alignment of labelled graphs.
//!
//! A graph is aligned when, on every cycle, all labels are positive powers
//! of one element; strictly aligned when that element can be taken prime.
//! Strict alignment of the dual graph at every point is equivalent to
//! separatedness of the Néron model of the Jacobian.
//!
//! Two labels are powers of a common element exactly when their primitive
//! roots agree, so each cycle is decided by comparing roots.

use std::ops::ControlFlow;

use crate::graph::{Cycle, CycleBudgetExceeded, LabelledGraph};
use crate::monoid::MonoidElement;

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Verdict on one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleVerdict {
    /// Every label is a power of `root`; `prime` is set when `root` is prime.
    Aligned {
        root: MonoidElement,
        prime: Option<String>,
    },
    /// Two edges whose labels have different primitive roots.
    Misaligned { edges: [String; 2] },
}

impl CycleVerdict {
    pub fn is_aligned(&self) -> bool {
        matches!(self, CycleVerdict::Aligned { .. })
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, CycleVerdict::Aligned { prime: Some(_), .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentReport {
    pub aligned: bool,
    pub strictly_aligned: bool,
    /// Inspected cycles with their verdicts, in canonical cycle order.
    pub cycles: Vec<(Cycle, CycleVerdict)>,
    pub cycles_inspected: usize,
    /// The cap was hit after a misaligned cycle had already settled both
    /// verdicts; `cycles` is then a prefix of all cycles.
    pub capped: bool,
}

impl AlignmentReport {
    /// Outcome under the separatedness criterion.
    pub fn separated(&self) -> bool {
        self.strictly_aligned
    }

    /// First cycle refuting alignment, or failing that strict alignment.
    pub fn counterexample(&self) -> Option<&(Cycle, CycleVerdict)> {
        self.cycles
            .iter()
            .find(|(_, v)| !v.is_aligned())
            .or_else(|| self.cycles.iter().find(|(_, v)| !v.is_strict()))
    }

    pub fn summary(&self) -> String {
        format!(
            "Néron model of the Jacobian separated: {} at this point",
            if self.separated() { "yes" } else { "no" }
        )
    }
}

pub fn cycle_verdict(g: &LabelledGraph, cycle: &Cycle) -> CycleVerdict {
    let mut common: Option<(&String, MonoidElement)> = None;
    for id in &cycle.edges {
        let edge = g.edge(id).expect("cycle edges belong to the graph");
        let (root, _) = edge
            .label
            .primitive_root()
            .expect("labels of a valid graph are not units");
        match &common {
            None => common = Some((id, root)),
            Some((first, r)) if *r != root => {
                return CycleVerdict::Misaligned {
                    edges: [(*first).clone(), id.clone()],
                }
            }
            Some(_) => {}
        }
    }
    let (_, root) = common.expect("cycles have at least one edge");
    let prime = root
        .is_prime()
        .then(|| root.support().next().map(|(s, _)| s.to_owned()))
        .flatten();
    CycleVerdict::Aligned { root, prime }
}

fn inspect(g: &LabelledGraph, cap: usize) -> Result<AlignmentReport, CycleBudgetExceeded> {
    let mut cycles = Vec::new();
    let flow = g.visit_cycles(|c| {
        if cycles.len() == cap {
            return ControlFlow::Break(());
        }
        cycles.push(c);
        ControlFlow::Continue(())
    });
    cycles.sort();
    let judged: Vec<(Cycle, CycleVerdict)> = cycles
        .into_iter()
        .map(|c| {
            let v = cycle_verdict(g, &c);
            (c, v)
        })
        .collect();
    let aligned = judged.iter().all(|(_, v)| v.is_aligned());
    let capped = flow.is_break();
    if capped && aligned {
        return Err(CycleBudgetExceeded { cap });
    }
    Ok(AlignmentReport {
        aligned,
        strictly_aligned: judged.iter().all(|(_, v)| v.is_strict()),
        cycles_inspected: judged.len(),
        cycles: judged,
        capped,
    })
}

/// Full report; `aligned` is the predicate decided here.
pub fn is_aligned(g: &LabelledGraph, cap: usize) -> Result<AlignmentReport, CycleBudgetExceeded> {
    inspect(g, cap)
}

/// Full report; `strictly_aligned` is the predicate decided here.
pub fn is_strictly_aligned(
    g: &LabelledGraph,
    cap: usize,
) -> Result<AlignmentReport, CycleBudgetExceeded> {
    inspect(g, cap)
}

/// Whether the Néron model of the Jacobian is separated at the point whose
/// dual graph is `g`.
pub fn neron_separated_verdict(
    g: &LabelledGraph,
    cap: usize,
) -> Result<(bool, AlignmentReport), CycleBudgetExceeded> {
    let report = is_strictly_aligned(g, cap)?;
    Ok((report.separated(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::monoid::PrimeAlphabet;

    fn graph(vertices: &[&str], edges: &[(&str, &str, &str, &str)]) -> LabelledGraph {
        let a = PrimeAlphabet::new(["u", "v"]).unwrap();
        LabelledGraph::new(
            a.clone(),
            vertices.iter().map(|v| v.to_string()).collect(),
            edges
                .iter()
                .map(|(id, x, y, l)| {
                    Edge::new(*id, *x, *y, MonoidElement::parse_text(&a, l).unwrap())
                })
                .collect(),
        )
    }

    #[test]
    fn first_example_is_not_aligned() {
        let g = graph(
            &["A", "B"],
            &[("e1", "A", "B", "u*v^2"), ("e2", "B", "A", "u^2*v^2")],
        );
        let r = is_aligned(&g, 10).unwrap();
        assert!(!r.aligned);
        assert!(!r.strictly_aligned);
        let (cycle, verdict) = r.counterexample().unwrap();
        assert_eq!(cycle.edges, ["e1", "e2"]);
        assert_eq!(
            verdict,
            &CycleVerdict::Misaligned {
                edges: ["e1".into(), "e2".into()]
            }
        );
    }

    #[test]
    fn second_example_is_aligned_but_not_strictly() {
        let g = graph(&["A"], &[("e", "A", "A", "u*v")]);
        let r = is_strictly_aligned(&g, 10).unwrap();
        assert!(r.aligned);
        assert!(!r.strictly_aligned);
        assert!(r.counterexample().is_some());
        let (separated, report) = neron_separated_verdict(&g, 10).unwrap();
        assert!(!separated);
        assert_eq!(
            report.summary(),
            "Néron model of the Jacobian separated: no at this point"
        );
    }

    #[test]
    fn third_example_is_strictly_aligned() {
        let g = graph(
            &["A", "B"],
            &[
                ("e1", "A", "B", "u^2"),
                ("e2", "B", "A", "u^3"),
                ("l", "A", "A", "v^3"),
            ],
        );
        let r = is_strictly_aligned(&g, 10).unwrap();
        assert!(r.aligned && r.strictly_aligned);
        assert_eq!(r.cycles_inspected, 2);
        assert!(r.counterexample().is_none());
        let primes: Vec<_> = r
            .cycles
            .iter()
            .map(|(_, v)| match v {
                CycleVerdict::Aligned { prime, .. } => prime.clone().unwrap(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(primes, ["u", "v"]);
        assert!(neron_separated_verdict(&g, 10).unwrap().0);
    }

    #[test]
    fn trees_are_vacuously_strict() {
        let g = graph(
            &["A", "B", "C"],
            &[("a", "A", "B", "u*v"), ("b", "B", "C", "u^2*v")],
        );
        let r = is_strictly_aligned(&g, 1).unwrap();
        assert!(r.strictly_aligned);
        assert_eq!(r.cycles_inspected, 0);
    }

    #[test]
    fn prime_banana_is_separated() {
        let g = graph(&["A", "B"], &[("a", "A", "B", "u"), ("b", "A", "B", "u")]);
        assert!(neron_separated_verdict(&g, 10).unwrap().0);
    }

    #[test]
    fn cap_behaviour() {
        let aligned = graph(
            &["A", "B"],
            &[
                ("a", "A", "B", "u"),
                ("b", "A", "B", "u"),
                ("c", "A", "B", "u"),
            ],
        );
        assert_eq!(is_aligned(&aligned, 2), Err(CycleBudgetExceeded { cap: 2 }));

        let broken = graph(
            &["A", "B"],
            &[
                ("a", "A", "B", "u"),
                ("b", "A", "B", "v"),
                ("c", "A", "B", "u"),
            ],
        );
        let r = is_aligned(&broken, 1).unwrap();
        assert!(r.capped);
        assert!(!r.aligned);
        assert_eq!(r.cycles_inspected, 1);
    }
}
