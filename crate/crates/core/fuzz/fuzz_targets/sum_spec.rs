#![no_main]

use libfuzzer_sys::fuzz_target;
use tumax::compose::{compose, SumSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<SumSpec>(data) else { return };
    let small = |m: &tumax::IntMatrix| m.rows() <= 6 && m.cols() <= 6;
    if small(&spec.a) && small(&spec.b) {
        if let Ok(r) = compose(&spec) {
            assert!(tumax::certify_tu(&r.matrix).map(|v| v.is_tu).unwrap_or(true));
        }
    }
});
