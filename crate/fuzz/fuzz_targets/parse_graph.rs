//! Fuzzes the instance-file parser: arbitrary input must either be rejected
//! with an error or produce a graph that survives a serialize/parse
//! round-trip and satisfies the adjacency invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = ddmwis::parse_graph(text) {
        for u in 0..g.n() {
            assert!(!g.has_edge(u, u), "self-loop survived parsing");
            for v in g.neighbors(u).iter() {
                assert!(g.has_edge(v, u), "asymmetric adjacency");
            }
        }
        assert!(g.weights().iter().all(|&w| w >= 1));
        let round = ddmwis::serialize_graph(&g);
        let back = ddmwis::parse_graph(&round).expect("canonical form must parse");
        assert_eq!(g, back, "serialize/parse round-trip changed the graph");
    }
});
