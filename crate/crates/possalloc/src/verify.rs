//! Model-level verification battery.
//!
//! Runs the operator axioms, the derivative-exchange residuals, weighting
//! validation, the concavity certificate and the two-route allocation
//! consistency check on one configured model, reporting a measured value
//! against a threshold per check. Used by the CLI `verify` command and by
//! integration tests.

use serde::Serialize;

use crate::allocation::PortfolioModel;
use crate::fuzzy::{FuzzyNumber, WeightingFunction, WEIGHTING_INTEGRAL_TOL};
use crate::operators::{expected_value, EuOperator};
use crate::oracle::{concavity_certificate, solve_foc, FocSolverConfig};

/// One verification check: name, measured value, threshold, direction.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Measured residual or certificate value.
    pub measured: f64,
    /// The check passes when `measured <= threshold`.
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn bounded(name: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            threshold,
            passed: measured.is_finite() && measured <= threshold,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured: f64::NAN,
            threshold: 0.0,
            passed: false,
            detail: detail.into(),
        }
    }
}

/// Deterministic low-discrepancy stream for randomized checks; keeps
/// verification output byte-stable without pulling in an RNG.
struct GoldenStream {
    state: f64,
}

impl GoldenStream {
    fn new() -> Self {
        Self { state: 0.5 }
    }

    /// Next value in [lo, hi).
    fn next(&mut self, lo: f64, hi: f64) -> f64 {
        // golden-ratio rotation mod 1
        self.state = (self.state + 0.618_033_988_749_894_9).fract();
        lo + (hi - lo) * self.state
    }
}

type ParamFn = fn(f64, f64) -> f64;

/// Axiom residuals for one operator on one fuzzy number.
fn axiom_checks(op: &EuOperator, a: &FuzzyNumber, out: &mut Vec<CheckResult>) {
    let label = format!("{}", op.kind());

    // identity maps to the weighted expected value
    let direct = expected_value(op.weighting(), a);
    match op.geu(a, |x| x) {
        Ok(via_geu) => out.push(CheckResult::bounded(
            &format!("axiom-a-identity[{label}]"),
            (via_geu - direct).abs(),
            1e-9,
            format!("T(A, id) = {via_geu:.12e}, E_f(A) = {direct:.12e}"),
        )),
        Err(e) => out.push(CheckResult::failed(
            &format!("axiom-a-identity[{label}]"),
            e.to_string(),
        )),
    }

    // constants are preserved
    let mut worst = 0.0f64;
    for c in [-3.0, 0.0, 7.0] {
        match op.geu(a, |_| c) {
            Ok(v) => worst = worst.max((v - c).abs()),
            Err(e) => {
                out.push(CheckResult::failed(
                    &format!("axiom-b-constant[{label}]"),
                    e.to_string(),
                ));
                return;
            }
        }
    }
    out.push(CheckResult::bounded(
        &format!("axiom-b-constant[{label}]"),
        worst,
        1e-12,
        "max |T(A, c) - c| over c in {-3, 0, 7}",
    ));

    // linearity over a deterministic battery of polynomial pairs
    let mut stream = GoldenStream::new();
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let (s, t) = (stream.next(-2.0, 2.0), stream.next(-2.0, 2.0));
        let (c1, c2) = (stream.next(-1.0, 1.0), stream.next(-1.0, 1.0));
        let g = |x: f64| x * x + c1 * x;
        let h = |x: f64| x * x * x + c2;
        let combo = op.geu(a, |x| s * g(x) + t * h(x));
        let parts = op
            .geu(a, g)
            .and_then(|vg| op.geu(a, h).map(|vh| s * vg + t * vh));
        match (combo, parts) {
            (Ok(lhs), Ok(rhs)) => worst = worst.max((lhs - rhs).abs()),
            _ => {
                out.push(CheckResult::failed(
                    &format!("axiom-c-linearity[{label}]"),
                    "evaluation failed",
                ));
                return;
            }
        }
    }
    out.push(CheckResult::bounded(
        &format!("axiom-c-linearity[{label}]"),
        worst,
        1e-9,
        "max |T(A, sg+th) - sT(A,g) - tT(A,h)| over 8 polynomial pairs",
    ));

    // monotonicity: g <= h pointwise implies T(A,g) <= T(A,h)
    let g = |x: f64| x.sin();
    let h = |x: f64| x.sin() + 0.25 * x * x + 0.1;
    match (op.geu(a, g), op.geu(a, h)) {
        (Ok(vg), Ok(vh)) => out.push(CheckResult::bounded(
            &format!("axiom-d-monotone[{label}]"),
            vg - vh,
            1e-12,
            format!("T(A,g) - T(A,h) = {:.3e} must be <= slack", vg - vh),
        )),
        _ => out.push(CheckResult::failed(
            &format!("axiom-d-monotone[{label}]"),
            "evaluation failed",
        )),
    }

    // derivative exchange on a battery of smooth parametric families
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let families: [(&str, ParamFn, ParamFn); 3] = [
        ("exp", |x, l| (l * x).exp(), |x, l| x * (l * x).exp()),
        ("sin", |x, l| (l * x).sin(), |x, l| x * (l * x).cos()),
        (
            "shifted-square",
            |x, l| (l + x) * (l + x),
            |x, l| 2.0 * (l + x),
        ),
    ];
    for (name, g, dg) in families {
        match op.check_d_property(a, g, dg, 0.3, 1e-5) {
            Ok(res) => {
                if res > worst {
                    worst = res;
                    detail = format!("worst family: {name}");
                }
            }
            Err(e) => {
                out.push(CheckResult::failed(
                    &format!("derivative-exchange[{label}]"),
                    e.to_string(),
                ));
                return;
            }
        }
    }
    out.push(CheckResult::bounded(
        &format!("derivative-exchange[{label}]"),
        worst,
        1e-6,
        detail,
    ));
}

/// Weighting validation as check results.
pub fn weighting_checks(weighting: &WeightingFunction, out: &mut Vec<CheckResult>) {
    match weighting.validate(1001) {
        Ok(report) => {
            let worst_negative = report
                .negative
                .iter()
                .map(|(_, v)| -v)
                .fold(0.0f64, f64::max);
            out.push(CheckResult::bounded(
                "weighting-non-negative",
                worst_negative,
                0.0,
                format!("{} negative samples", report.negative.len()),
            ));
            let worst_drop = report
                .decreasing
                .iter()
                .map(|(_, d)| -d)
                .fold(0.0f64, f64::max);
            out.push(CheckResult::bounded(
                "weighting-monotone",
                worst_drop,
                1e-12,
                format!("{} decreasing steps", report.decreasing.len()),
            ));
            out.push(CheckResult::bounded(
                "weighting-unit-integral",
                (report.integral - 1.0).abs(),
                WEIGHTING_INTEGRAL_TOL,
                format!("integral = {:.12}", report.integral),
            ));
        }
        Err(e) => out.push(CheckResult::failed("weighting-valid", e.to_string())),
    }
}

/// The full battery on a constructed model.
pub fn run_model_checks(m: &PortfolioModel) -> Vec<CheckResult> {
    let mut out = Vec::new();
    weighting_checks(m.operator().weighting(), &mut out);

    let centered = expected_value(m.operator().weighting(), m.risk());
    out.push(CheckResult::bounded(
        "risk-centering",
        centered.abs(),
        1e-8,
        format!("E_f(A) = {centered:.3e}"),
    ));

    axiom_checks(m.operator(), m.risk(), &mut out);

    // closed-form cross-check where available
    if let Some((peak, left, right)) = m.risk().as_triangular() {
        if let Ok(closed) = m.operator().triangular_closed_moments(peak, left, right) {
            match m.operator().central_moments(m.risk()) {
                Ok(quadrature) => out.push(CheckResult::bounded(
                    "closed-vs-quadrature-moments",
                    quadrature.max_abs_diff(&closed),
                    1e-8,
                    "triangular closed forms against quadrature",
                )),
                Err(e) => out.push(CheckResult::failed(
                    "closed-vs-quadrature-moments",
                    e.to_string(),
                )),
            }
        }
    }

    // concavity certificate over the solve range
    let reach = match m.allocation_order2() {
        Ok(a2) if a2.abs() > 1.0 => 1.2 * a2.abs(),
        _ => 1.0,
    };
    match concavity_certificate(m, -0.2 * reach, reach, 33) {
        Ok(cert) => out.push(CheckResult::bounded(
            "concavity-certificate",
            cert,
            1e-9,
            format!("min sampled V'' over [{:.3}, {:.3}]", -0.2 * reach, reach),
        )),
        Err(e) => out.push(CheckResult::failed("concavity-certificate", e.to_string())),
    }

    // the two order-3 assembly routes must agree
    match (m.allocation_order3(), m.allocation_order3_factored()) {
        (Ok(chain), Ok(factored)) => out.push(CheckResult::bounded(
            "order3-two-route-agreement",
            (chain - factored).abs(),
            1e-9,
            format!("chain {chain:.12e} vs factored {factored:.12e}"),
        )),
        (chain, factored) => {
            let msg = match (&chain, &factored) {
                (Err(e), _) => e.to_string(),
                (_, Err(e)) => e.to_string(),
                _ => unreachable!(),
            };
            out.push(CheckResult::failed("order3-two-route-agreement", msg));
        }
    }

    // the exact solver must succeed and meet its residual contract
    if m.k() > 0.0 {
        match solve_foc(m, &FocSolverConfig::default()) {
            Ok(res) => {
                out.push(CheckResult::bounded(
                    "oracle-residual",
                    res.foc_residual.abs(),
                    FocSolverConfig::default().root_tolerance,
                    format!("alpha* = {:.9}", res.alpha_star),
                ));
                out.push(CheckResult::bounded(
                    "oracle-concavity",
                    res.concavity_certificate,
                    1e-9,
                    "min sampled V'' along the solve path",
                ));
            }
            Err(e) => out.push(CheckResult::failed("oracle-residual", e.to_string())),
        }
    }

    out
}

/// Convenience: all checks passed.
pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Runs weighting checks standalone (used when model construction itself
/// fails but the weighting should still be reported).
pub fn run_weighting_only(weighting: &WeightingFunction) -> Vec<CheckResult> {
    let mut out = Vec::new();
    weighting_checks(weighting, &mut out);
    out
}
