//! Utility documents: parse, build and evaluate without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use possalloc::config::parse_utility;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_utility(text) else {
        return;
    };
    let Ok(utility) = doc.build() else {
        return;
    };
    let (lo, hi) = utility.domain();
    assert!(lo < hi);
    for w in [0.1, 1.0, 7.3, 250.0, -4.0] {
        if !utility.contains(w) {
            assert!(utility.derivatives(w, 4).is_err());
            continue;
        }
        // evaluations may be non-finite for extreme exponents but must
        // not panic; indicator errors are fine
        let _ = utility.derivatives(w, 4);
        let _ = utility.indicators(w);
        let _ = utility.indicator_ratios(w);
    }
});
