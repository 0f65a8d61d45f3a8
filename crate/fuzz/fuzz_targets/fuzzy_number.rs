//! Fuzzy-number documents: parsing and construction must never panic,
//! and every successfully built number must honor its level-set
//! invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;
use possalloc::config::parse_fuzzy_number;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_fuzzy_number(text) else {
        return;
    };
    let Ok(number) = doc.build() else {
        return;
    };
    // valid numbers must answer level queries with nested intervals
    let mut previous = number.level_set(0.0).unwrap();
    for i in 1..=8 {
        let level = i as f64 / 8.0;
        let current = number.level_set(level).unwrap();
        assert!(current.lower >= previous.lower - 1e-9);
        assert!(current.upper <= previous.upper + 1e-9);
        assert!(current.lower <= current.upper);
        previous = current;
    }
    assert!(number.level_set(1.5).is_err());
    let shifted = number.shift(1.0);
    let before = number.level_set(0.5).unwrap();
    let after = shifted.level_set(0.5).unwrap();
    assert!((after.lower - before.lower - 1.0).abs() < 1e-9);
});
