#![no_main]

use libfuzzer_sys::fuzz_target;
use tumax::graphical::{network_matrix, parse_graph, ArcGraph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(text) {
        assert_eq!(parse_graph(&g.to_text()).as_ref(), Ok(&g));
        let _ = g.bipartition();
        // Any parsed graph is either rejected as a tree or yields a network matrix.
        if g.vertices <= 64 {
            let loops = ArcGraph { vertices: g.vertices, arcs: g.arcs.iter().map(|&(s, _)| (s, s)).collect() };
            if let Ok(m) = network_matrix(&g, &loops) {
                assert!(m.entries().iter().all(|&x| x == 0));
            }
        }
    }
});
