//! Whole model documents: the full parse -> validate -> build -> evaluate
//! pipeline on untrusted input. Errors are expected, panics are not.

#![no_main]

use libfuzzer_sys::fuzz_target;
use possalloc::config::parse_model_document;
use possalloc::oracle::{solve_foc, FocSolverConfig};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_model_document(text) else {
        return;
    };
    let _ = doc.weighting_function();
    let Ok(model) = doc.build(None, None) else {
        return;
    };
    let _ = model.operator().central_moments(model.risk());
    let _ = model.allocation_order2();
    let _ = model.allocation_order3();
    let _ = model.factor_terms();
    // keep the solver cheap on hostile inputs
    let cfg = FocSolverConfig {
        max_expansions: 16,
        max_iterations: 64,
        root_tolerance: 1e-6,
        ..FocSolverConfig::default()
    };
    let _ = solve_foc(&model, &cfg);
});
