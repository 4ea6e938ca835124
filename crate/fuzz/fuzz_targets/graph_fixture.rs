#![no_main]

use braess_spectral::graph::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = Graph::from_fixture_bytes(data) {
        let again = Graph::from_fixture_json(&g.to_fixture_json()).expect("serialized fixture parses");
        assert_eq!(g, again);
        assert_eq!(g.degree_sum(), 2 * g.edge_count());
    }
});
