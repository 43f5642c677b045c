#![no_main]

use libfuzzer_sys::fuzz_target;
use tumax::parse_matrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        // Printing and re-parsing is the identity.
        assert_eq!(parse_matrix(&m.to_text()).as_ref(), Ok(&m));
        if m.rows() + m.cols() <= 8 {
            let _ = tumax::certify_tu(&m);
        }
    }
});
