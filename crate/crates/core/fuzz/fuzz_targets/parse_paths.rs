#![no_main]

use libfuzzer_sys::fuzz_target;
use tumax::graphical::{parse_paths, verify_pattern_bounds, ArcGraph};

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let vertices = usize::from(n % 16) + 1;
    if let Ok(paths) = parse_paths(text, vertices) {
        assert!(paths.iter().all(|&(s, t)| s < vertices && t < vertices));
        let star = ArcGraph { vertices, arcs: (1..vertices).map(|v| (0, v)).collect() };
        if let Ok(r) = verify_pattern_bounds(&star, &paths) {
            assert!(r.bound_ok && r.odd_bound_ok);
        }
    }
});
