mod common;

use std::collections::BTreeMap;

use common::*;
use dualgraph::{
    basic_refinement, family_verdict, specialize, transport_basic_refinement, validate_family,
    Cover, GraphFamily, TransportError,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn specialization_commutes_with_refinement(seed in any::<u64>()) {
        let Some((g, h, spec)) = commutation_instance(seed) else { return Ok(()) };
        let refined = basic_refinement(&g, &spec).unwrap();
        let lhs = shape_of(&specialize(&refined.graph, &h).unwrap().graph);
        prop_assert_eq!(lhs, expected_specialized_refinement(&g, &h, &spec));
    }

    #[test]
    fn transport_agrees_with_case_analysis(seed in any::<u64>()) {
        let Some((g, h, spec)) = commutation_instance(seed) else { return Ok(()) };
        let f = two_point_family(&g, &h);
        prop_assert!(validate_family(&f).is_valid());
        let out = transport_basic_refinement(&f, "s", &spec).unwrap();
        let report = validate_family(&out);
        prop_assert!(report.is_valid(), "{:?}", report.messages());
        let label = &g.edge(&spec.edge).unwrap().label;
        let (m, t) = (h.apply(label).unwrap(), h.apply(&spec.section_type).unwrap());
        if m.is_identity() || t.is_identity() || t == m {
            // the generization keeps its graph; only the correspondence moves
            prop_assert_eq!(&out.graphs["t"], &f.graphs["t"]);
        } else {
            prop_assert_eq!(shape_of(&out.graphs["t"]), expected_specialized_refinement(&g, &h, &spec));
        }
    }

    #[test]
    fn specialization_is_functorial(seed in any::<u64>()) {
        let g = corpus_graph(seed);
        let mut r = rng(seed);
        let mid = dualgraph::random::default_alphabet(r.gen_range(1..=3));
        let end = dualgraph::random::default_alphabet(r.gen_range(1..=3));
        let h1 = random_hom(&mut r, g.alphabet(), &mid);
        let h2 = random_hom(&mut r, &mid, &end);
        let step = specialize(&specialize(&g, &h1).unwrap().graph, &h2).unwrap();
        let direct = specialize(&g, &h1.then(&h2).unwrap()).unwrap();
        prop_assert_eq!(&step.graph, &direct.graph);
        prop_assert!(direct.graph.validate().is_valid());
    }

    #[test]
    fn chains_of_points_validate_and_transport(seed in any::<u64>()) {
        let Some((g, h1, spec)) = commutation_instance(seed) else { return Ok(()) };
        let mut r = rng(seed.rotate_left(7));
        let end = dualgraph::random::default_alphabet(r.gen_range(1..=3));
        let h2 = random_hom(&mut r, h1.target(), &end);
        let mid = specialize(&g, &h1).unwrap().graph;
        let last = specialize(&mid, &h2).unwrap().graph;
        let mut f = GraphFamily {
            points: vec!["a".into(), "b".into(), "c".into()],
            covers: vec![
                Cover { from: "a".into(), to: "b".into(), hom: h1.clone() },
                Cover { from: "b".into(), to: "c".into(), hom: h2.clone() },
            ],
            graphs: BTreeMap::from([("a".into(), g.clone()), ("b".into(), mid), ("c".into(), last)]),
            ..Default::default()
        };
        prop_assert!(validate_family(&f).is_valid());
        let out = transport_basic_refinement(&f, "a", &spec).unwrap();
        prop_assert!(validate_family(&out).is_valid(), "{:?}", validate_family(&out).messages());
        let direct = specialize(&specialize(&out.graphs["a"], &h1).unwrap().graph, &h2).unwrap().graph;
        prop_assert_eq!(direct.edges().len(), out.graphs["c"].edges().len());
        prop_assert_eq!(direct.vertices().len(), out.graphs["c"].vertices().len());

        // a shortcut cover a -> c with the composite hom keeps everything coherent
        f.covers.push(Cover { from: "a".into(), to: "c".into(), hom: h1.then(&h2).unwrap() });
        prop_assert!(validate_family(&f).is_valid());
        let out = transport_basic_refinement(&f, "a", &spec).unwrap();
        prop_assert!(validate_family(&out).is_valid(), "{:?}", validate_family(&out).messages());
        let v = family_verdict(&out, 1 << 20).unwrap();
        let before = family_verdict(&f, 1 << 20).unwrap();
        prop_assert_eq!(v.separated, before.separated);
    }
}

#[test]
fn transport_rejects_non_minimal_points() {
    for seed in 0..50 {
        let Some((g, h, _)) = commutation_instance(seed) else {
            continue;
        };
        let f = two_point_family(&g, &h);
        let mut r = rng(seed);
        let Some(spec) = random_spec(&mut r, &f.graphs["t"]) else {
            continue;
        };
        assert!(matches!(
            transport_basic_refinement(&f, "t", &spec),
            Err(TransportError::TransportDirection { .. })
        ));
    }
}
