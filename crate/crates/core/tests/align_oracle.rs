mod common;

use common::*;
use dualgraph::{basic_refinement, is_aligned, is_strictly_aligned, neron_separated_verdict};
use proptest::prelude::*;

proptest! {
    #[test]
    fn root_check_agrees_with_base_search(seed in any::<u64>()) {
        let g = corpus_graph(seed);
        let report = is_aligned(&g, 1 << 20).unwrap();
        let (aligned, strict) = brute_alignment(&g);
        prop_assert_eq!(report.aligned, aligned);
        prop_assert_eq!(report.strictly_aligned, strict);
        prop_assert!(!report.capped);
        prop_assert_eq!(report.cycles_inspected, subset_cycles(&g).len());
        prop_assert_eq!(report.counterexample().is_none(), strict);
    }

    #[test]
    fn strict_alignment_survives_refinement(seed in any::<u64>(), steps in 1usize..5) {
        let mut g = corpus_graph(seed);
        let before = is_strictly_aligned(&g, 1 << 20).unwrap().strictly_aligned;
        let mut r = rng(seed);
        for _ in 0..steps {
            let Some(spec) = random_spec(&mut r, &g) else { break };
            g = basic_refinement(&g, &spec).unwrap().graph;
        }
        prop_assert_eq!(is_strictly_aligned(&g, 1 << 20).unwrap().strictly_aligned, before);
    }

    #[test]
    fn verdict_is_strict_alignment(seed in any::<u64>()) {
        let g = corpus_graph(seed);
        let (separated, report) = neron_separated_verdict(&g, 1 << 20).unwrap();
        prop_assert_eq!(separated, report.strictly_aligned);
    }
}

#[test]
fn every_cycle_label_multiset_up_to_three_edges() {
    let a = alphabet(&["u", "v"]);
    let labels: Vec<_> = (0..=3u64)
        .flat_map(|i| (0..=3u64).map(move |j| (i, j)))
        .filter(|&(i, j)| i + j > 0)
        .map(|(i, j)| dualgraph::MonoidElement::from_exponents(&a, vec![i, j]).unwrap())
        .collect();
    for k in 1..=3usize {
        let mut idx = vec![0usize; k];
        loop {
            let n = k;
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let chosen: Vec<_> = idx.iter().map(|&i| labels[i].clone()).collect();
            let g = shape_graph(&a, n, &edges, &chosen);
            let r = is_aligned(&g, 10).unwrap();
            assert_eq!(
                (r.aligned, r.strictly_aligned),
                brute_alignment(&g),
                "{chosen:?}"
            );
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                idx[i] += 1;
                if idx[i] < labels.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
}
