use braess_spectral::delocalization::conc::{conc_exact_1d, BernoulliSumSpec};
use braess_spectral::delocalization::{profile, Threshold};
use braess_spectral::error::Error;
use braess_spectral::graph::{sample_gnp, GnpSpec, Graph};
use braess_spectral::paradox::{estimate_add, exact_gap_change, PerturbationKind};
use braess_spectral::spectral::{normalized_laplacian, spectral_gap};
use braess_spectral::typicality::{full_report, TypicalityConfig, DEFINITION_PROPERTIES};
use proptest::prelude::*;

#[test]
fn fixture_round_trip_through_text() {
    let g = sample_gnp(&GnpSpec::new(40, 0.2, 5)).unwrap();
    let text = g.to_fixture_json();
    assert_eq!(Graph::from_fixture_json(&text).unwrap(), g);
    assert!(matches!(Graph::from_fixture_bytes(b"{\"n\": 2}"), Err(Error::Parse(_))));
    assert!(matches!(Graph::from_fixture_bytes(&[0xff, 0xfe]), Err(Error::Parse(_))));
}

#[test]
fn closing_a_path_into_a_triangle() {
    // closing P3 gives the triangle, gap 3/2
    let v = exact_gap_change(&Graph::path(3), 0, 2, PerturbationKind::Addition).unwrap();
    assert!((v.gap_before - 1.0).abs() < 1e-12);
    assert!((v.gap_after - 1.5).abs() < 1e-12);
    assert!(matches!(
        exact_gap_change(&Graph::path(3), 0, 1, PerturbationKind::Removal),
        Err(Error::IsolatedVertex { .. })
    ));
}

#[test]
fn estimate_on_sampled_graph() {
    let g = sample_gnp(&GnpSpec::new(120, 0.4, 3)).unwrap();
    let run = estimate_add(&g, 300, 3).unwrap();
    let e = &run.estimate;
    assert_eq!(e.decreases + e.increases + e.zeros, 300);
    assert_eq!(e.lemma_failures, 0);
    assert!((e.gap_before - spectral_gap(&g).unwrap()).abs() < 1e-12);
    assert!(run.verdicts.windows(2).all(|w| w[0].pair < w[1].pair));
}

#[test]
fn typicality_report_shape() {
    let g = sample_gnp(&GnpSpec::new(300, 0.5, 1)).unwrap();
    let r = full_report(&g, 0.5, 1, &TypicalityConfig::default()).unwrap();
    for name in DEFINITION_PROPERTIES {
        assert!(r.property(name).is_some(), "{name}");
    }
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"schema_version\":1"));
}

#[test]
fn conc_and_profile_examples() {
    let e = conc_exact_1d(&BernoulliSumSpec::ones(100, 0.5).unwrap(), 1.0).unwrap();
    assert!((e.value - 0.2356).abs() < 1e-4);
    let n = 64;
    let flat = vec![1.0 / (n as f64).sqrt(); n];
    assert_eq!(profile(&flat, 3.0).unwrap().fraction_above, 1.0);
    assert!((Threshold::Scaled(0.1).value(100) - 0.01).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn add_then_remove_is_identity(n in 3usize..30, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = sample_gnp(&GnpSpec::new(n, p, seed)).unwrap();
        if let Some((u, v)) = g.non_edges_iter().next() {
            let back = g.add_edge(u, v).unwrap().remove_edge(u, v).unwrap();
            prop_assert_eq!(&back, &g);
        }
        prop_assert_eq!(Graph::from_fixture_json(&g.to_fixture_json()).unwrap(), g);
    }

    #[test]
    fn normalized_laplacian_is_symmetric_psd_on_trial_vectors(n in 3usize..25, seed in any::<u64>(), x in prop::collection::vec(-1.0f64..1.0, 25)) {
        let g = sample_gnp(&GnpSpec::new(n, 0.6, seed)).unwrap();
        prop_assume!(g.isolated_vertex().is_none());
        let l = normalized_laplacian(&g).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(l.get(i, j), l.get(j, i));
            }
        }
        prop_assert!(l.quadratic_form(&x[..n]) >= -1e-12);
    }
}
