//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured quantity (run with `--nocapture` to see every
//! line). Tolerances are pinned here, not configurable.

use std::time::Instant;

use possalloc::allocation::PortfolioModel;
use possalloc::fuzzy::{FuzzyNumber, WeightingFunction};
use possalloc::operators::{expected_value, EuOperator};
use possalloc::oracle::{concavity_certificate, solve_foc, FocSolverConfig};
use possalloc::utility::UtilityModel;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn centered_triangular(left: f64, right: f64) -> FuzzyNumber {
    FuzzyNumber::triangular((left - right) / 6.0, left, right).unwrap()
}

fn t1() -> EuOperator {
    EuOperator::t1(WeightingFunction::default_2gamma())
}

fn t2() -> EuOperator {
    EuOperator::t2(WeightingFunction::default_2gamma())
}

fn report(criterion: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
}

fn random_fuzzy(rng: &mut StdRng) -> FuzzyNumber {
    if rng.random_bool(0.5) {
        FuzzyNumber::triangular(
            rng.random_range(-2.0..2.0),
            rng.random_range(0.1..3.0),
            rng.random_range(0.1..3.0),
        )
        .unwrap()
    } else {
        let c = rng.random_range(-1.5..1.5);
        let l = rng.random_range(0.2..2.5);
        let r = rng.random_range(0.2..2.5);
        let bend = rng.random_range(1.2..2.5);
        FuzzyNumber::from_endpoint_fns(
            move |g| {
                let t = 1.0 - g;
                (c - l * t.powf(bend), c + r * t)
            },
            129,
        )
        .unwrap()
    }
}

/// The fixed 10-model benchmark used by criteria 6 and 7.
fn benchmark_models() -> Vec<(&'static str, PortfolioModel)> {
    let crra = |a: f64, w: f64, mu: f64, l: f64, r: f64, op: EuOperator| {
        PortfolioModel::new(
            w,
            0.0,
            0.1,
            mu,
            centered_triangular(l, r),
            UtilityModel::crra(a).unwrap(),
            op,
        )
        .unwrap()
    };
    vec![
        (
            "hara-t1",
            PortfolioModel::new(
                90.0,
                0.1,
                0.1,
                1.0,
                centered_triangular(2.0, 3.0),
                UtilityModel::hara(1.0, 2.0, 0.5).unwrap(),
                t1(),
            )
            .unwrap(),
        ),
        (
            "hara-t2",
            PortfolioModel::new(
                100.0,
                0.0,
                0.1,
                0.7,
                centered_triangular(4.0, 2.0),
                UtilityModel::hara(-1.5, 1.0, 3.0).unwrap(),
                t2(),
            )
            .unwrap(),
        ),
        ("crra-t2", crra(0.2, 60.0, 1.0, 6.0, 6.0, t2())),
        ("crra-sym", crra(0.5, 100.0, 1.0, 3.0, 3.0, t1())),
        ("crra-asym1", crra(0.5, 100.0, 1.0, 2.0, 4.0, t1())),
        ("crra-asym2", crra(0.3, 80.0, 0.8, 3.0, 1.5, t1())),
        ("crra-asym3", crra(0.6, 150.0, 1.0, 2.5, 5.0, t1())),
        ("crra-asym4", crra(0.4, 90.0, 1.2, 4.0, 2.0, t1())),
        ("crra-neg-a", crra(-1.0, 70.0, 1.0, 3.0, 4.5, t1())),
        ("crra-sym2", crra(0.2, 60.0, 1.5, 5.0, 5.0, t1())),
    ]
}

/// Criterion 1: triangular closed forms against quadrature, 100 random
/// centered shapes, absolute 1e-8, under five seconds.
#[test]
fn criterion_1_closed_form_quadrature_agreement() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1001);
    let op = t1();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let left = rng.random_range(0.1..10.0);
        let right = rng.random_range(0.1..10.0);
        let peak = (left - right) / 6.0;
        let a = FuzzyNumber::triangular(peak, left, right).unwrap();
        let quadrature = op.central_moments(&a).unwrap();
        let closed = op.triangular_closed_moments(peak, left, right).unwrap();
        worst = worst.max(quadrature.max_abs_diff(&closed));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst < 1e-8 && elapsed < 5.0;
    report(
        "criterion 1 (closed forms vs quadrature)",
        passed,
        &format!("max |diff| = {worst:.3e} over 100 shapes in {elapsed:.2}s"),
    );
    assert!(passed);
}

/// Criterion 2: the four operator axioms for both rules over randomized
/// fuzzy numbers and polynomial integrands; residuals below 1e-9 with
/// 1e-12 monotonicity slack.
#[test]
fn criterion_2_operator_axiom_suite() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2002);
    let ops = [t1(), t2()];
    let weighting = WeightingFunction::default_2gamma();
    let mut worst_identity = 0.0f64;
    let mut worst_constant = 0.0f64;
    let mut worst_linear = 0.0f64;
    let mut worst_monotone = f64::NEG_INFINITY;
    for _ in 0..20 {
        let a = random_fuzzy(&mut rng);
        for op in &ops {
            let direct = expected_value(&weighting, &a);
            worst_identity = worst_identity.max((op.geu(&a, |x| x).unwrap() - direct).abs());

            let c = rng.random_range(-10.0..10.0);
            worst_constant = worst_constant.max((op.geu(&a, |_| c).unwrap() - c).abs());

            for _ in 0..3 {
                let (s, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let c1 = rng.random_range(-1.0..1.0);
                let g = move |x: f64| x * x + c1 * x;
                let h = move |x: f64| x * x * x - x;
                let combined = op.geu(&a, |x| s * g(x) + t * h(x)).unwrap();
                let separate = s * op.geu(&a, g).unwrap() + t * op.geu(&a, h).unwrap();
                worst_linear = worst_linear.max((combined - separate).abs());
            }

            let bump = rng.random_range(0.0..2.0);
            let g = |x: f64| x + 0.3 * x * x;
            let h = move |x: f64| x + 0.3 * x * x + bump + 0.05 * x.cos().powi(2);
            let vg = op.geu(&a, g).unwrap();
            let vh = op.geu(&a, h).unwrap();
            worst_monotone = worst_monotone.max(vg - vh);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst_identity < 1e-9
        && worst_constant < 1e-9
        && worst_linear < 1e-9
        && worst_monotone <= 1e-12
        && elapsed < 5.0;
    report(
        "criterion 2 (operator axioms)",
        passed,
        &format!(
            "identity {worst_identity:.2e}, constant {worst_constant:.2e}, linear {worst_linear:.2e}, monotone excess {worst_monotone:.2e}, {elapsed:.2}s"
        ),
    );
    assert!(passed);
}

/// Criterion 3: derivative-exchange residuals below 1e-6 for a battery
/// of smooth parametric integrands, both operators.
#[test]
fn criterion_3_derivative_exchange() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3003);
    let ops = [t1(), t2()];
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = random_fuzzy(&mut rng);
        let lambda0 = rng.random_range(-0.4..0.4);
        for op in &ops {
            type ParamFn = fn(f64, f64) -> f64;
            let families: [(ParamFn, ParamFn); 4] = [
                (|x, l| (l * x).exp(), |x, l| x * (l * x).exp()),
                (|x, l| (l * x).sin(), |x, l| x * (l * x).cos()),
                (|x, l| (l + x) * (l + x), |x, l| 2.0 * (l + x)),
                (|x, l| l * l * x * x * x, |x, l| 2.0 * l * x * x * x),
            ];
            for (g, dg) in families {
                worst = worst.max(op.check_d_property(&a, g, dg, lambda0, 1e-5).unwrap());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst < 1e-6 && elapsed < 5.0;
    report(
        "criterion 3 (derivative exchange)",
        passed,
        &format!("max residual {worst:.3e} in {elapsed:.2}s"),
    );
    assert!(passed);
}

/// Criterion 4: the symmetric reference model. The second-order value is
/// 30 by closed-form arithmetic; the exact optimum is compared against it
/// at k = 0.1 (2% demanded) and k = 0.01 (0.1% demanded).
///
/// The k = 0.1 leg asserts the stated 2% even though the second-order
/// truncation of this model is intrinsically larger: the third Taylor
/// coefficient is -6750, so order2 misses the optimum by
/// |a3| k^3 / 6 = 1.125 out of ~28.9 (3.8%), and no implementation can
/// tighten that. The assert documents the gap rather than hiding it.
#[test]
fn criterion_4_reference_example_reproduction() {
    let model = PortfolioModel::new(
        100.0,
        0.0,
        0.1,
        1.0,
        FuzzyNumber::triangular(0.0, 2.0, 2.0).unwrap(),
        UtilityModel::crra(0.5).unwrap(),
        t1(),
    )
    .unwrap();
    let cfg = FocSolverConfig::default();

    let order2 = model.allocation_order2().unwrap();
    let exact_check = (order2 - 30.0).abs() < 1e-10;

    let star_01 = solve_foc(&model, &cfg).unwrap().alpha_star;
    let rel_01 = (order2 - star_01).abs() / star_01;
    let pass_01 = rel_01 < 0.02;

    let model_001 = model.with_k(0.01).unwrap();
    let order2_001 = model_001.allocation_order2().unwrap();
    let star_001 = solve_foc(&model_001, &cfg).unwrap().alpha_star;
    let rel_001 = (order2_001 - star_001).abs() / star_001;
    let pass_001 = rel_001 < 0.001;

    let passed = exact_check && pass_01 && pass_001;
    report(
        "criterion 4 (reference example)",
        passed,
        &format!(
            "order2 = {order2:.12} (want 30 exactly: {exact_check}); \
             k=0.1: oracle {star_01:.6}, rel {rel_01:.4} vs 0.02 ({pass_01}); \
             k=0.01: oracle {star_001:.8}, rel {rel_001:.6} vs 0.001 ({pass_001})"
        ),
    );
    if !pass_01 {
        println!(
            "       note: order3 = {:.6} lands at rel {:.5}; the 3.8% order-2 gap at k=0.1 \
             is the intrinsic |a3| k^3/6 = 1.125 truncation of this model, not solver error",
            model.allocation_order3().unwrap(),
            (model.allocation_order3().unwrap() - star_01).abs() / star_01,
        );
    }
    assert!(passed);
}

/// Criterion 5: the factor-term assembly and the coefficient-chain
/// assembly agree to 1e-9 on 200 random models.
#[test]
fn criterion_5_two_route_consistency() {
    let mut rng = StdRng::seed_from_u64(5005);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let left = rng.random_range(1.0..4.0);
        let right = rng.random_range(1.0..4.0);
        let risk = centered_triangular(left, right);
        let w0 = rng.random_range(20.0..120.0);
        let k = rng.random_range(0.01..0.2);
        let mu = rng.random_range(0.5..2.0);
        let op = if i % 2 == 0 { t1() } else { t2() };
        let utility = if i % 3 == 0 {
            let gamma_h = if rng.random_bool(0.5) {
                rng.random_range(0.4..0.9)
            } else {
                rng.random_range(1.5..4.0)
            };
            let zeta = if gamma_h < 1.0 { 1.0 } else { -1.0 };
            UtilityModel::hara(zeta, rng.random_range(0.5..3.0), gamma_h).unwrap()
        } else {
            UtilityModel::crra(rng.random_range(0.2..0.8)).unwrap()
        };
        let m = PortfolioModel::new(w0, 0.0, k, mu, risk, utility, op).unwrap();
        let chain = m.allocation_order3().unwrap();
        let factored = m.allocation_order3_factored().unwrap();
        worst = worst.max((chain - factored).abs());
    }
    let passed = worst < 1e-9;
    report(
        "criterion 5 (two-route order-3 consistency)",
        passed,
        &format!("max |chain - factored| = {worst:.3e} over 200 models"),
    );
    assert!(passed);
}

/// Criterion 6: error decay orders. Across the benchmark suite,
/// err2/k^3 and err3/k^4 stay bounded: the ratio between successive
/// k-halvings lies in [0.2, 8].
#[test]
fn criterion_6_convergence_orders() {
    let cfg = FocSolverConfig::default();
    let ks = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let mut worst_ratio_low = f64::INFINITY;
    let mut worst_ratio_high = 0.0f64;
    let mut passed = true;
    for (name, model) in benchmark_models() {
        let mut q2 = Vec::new();
        let mut q3 = Vec::new();
        for &k in &ks {
            let mk = model.with_k(k).unwrap();
            let star = solve_foc(&mk, &cfg).unwrap().alpha_star;
            q2.push((mk.allocation_order2().unwrap() - star).abs() / k.powi(3));
            q3.push((mk.allocation_order3().unwrap() - star).abs() / k.powi(4));
        }
        for (label, series) in [("order2/k^3", &q2), ("order3/k^4", &q3)] {
            for pair in series.windows(2) {
                let ratio = pair[0] / pair[1];
                worst_ratio_low = worst_ratio_low.min(ratio);
                worst_ratio_high = worst_ratio_high.max(ratio);
                if !(0.2..=8.0).contains(&ratio) {
                    passed = false;
                    println!("       {name} {label}: halving ratio {ratio:.3} outside [0.2, 8]");
                }
            }
        }
    }
    report(
        "criterion 6 (convergence orders)",
        passed,
        &format!(
            "halving ratios span [{worst_ratio_low:.3}, {worst_ratio_high:.3}] within [0.2, 8]"
        ),
    );
    assert!(passed);
}

/// Criterion 7: the sampled second derivative of total utility stays
/// below 1e-9 across alpha grids for every concave benchmark model.
#[test]
fn criterion_7_concavity_certificates() {
    let mut worst = f64::NEG_INFINITY;
    let mut passed = true;
    for (name, model) in benchmark_models() {
        let reach = 1.2 * model.allocation_order2().unwrap().abs().max(1.0);
        let cert = concavity_certificate(&model, -0.2 * reach, reach, 33).unwrap();
        worst = worst.max(cert);
        if cert > 1e-9 {
            passed = false;
            println!("       {name}: certificate {cert:.3e}");
        }
    }
    report(
        "criterion 7 (concavity certificates)",
        passed,
        &format!("max sampled V'' = {worst:.3e} (threshold 1e-9)"),
    );
    assert!(passed);
}

/// Criterion 8: the generic-indicator second-order allocation reproduces
/// the hyperbolic-utility closed form to 1e-10 for randomized in-domain
/// parameters.
#[test]
fn criterion_8_hara_closed_form_path() {
    let mut rng = StdRng::seed_from_u64(8008);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let gamma_h = if rng.random_bool(0.5) {
            rng.random_range(0.3..0.9)
        } else {
            rng.random_range(1.5..4.0)
        };
        let zeta = if gamma_h < 1.0 {
            rng.random_range(0.5..2.0)
        } else {
            -rng.random_range(0.5..2.0)
        };
        let delta = rng.random_range(0.5..3.0);
        let w = rng.random_range(5.0..80.0);
        let mu = rng.random_range(0.5..1.5);
        let k = rng.random_range(0.02..0.2);
        let left = rng.random_range(1.0..3.0);
        let right = rng.random_range(1.0..3.0);
        let utility = UtilityModel::hara(zeta, delta, gamma_h).unwrap();
        if !utility.contains(w) {
            continue;
        }
        let m = PortfolioModel::new(
            w,
            0.0,
            k,
            mu,
            centered_triangular(left, right),
            utility,
            t1(),
        )
        .unwrap();
        let generic = m.allocation_order2().unwrap();
        // closed form: k mu (delta + w/gamma) / Var
        //            + (k mu)^2/2 * (gamma+1)/gamma * (delta + w/gamma) * Sk / Var^3
        let ms = m.operator().central_moments(m.risk()).unwrap();
        let x = delta + w / gamma_h;
        let km = k * mu;
        let closed = km * x / ms.variance
            + 0.5 * km * km * (gamma_h + 1.0) / gamma_h * x * ms.skewness / ms.variance.powi(3);
        worst = worst.max((generic - closed).abs());
    }
    let passed = worst < 1e-10;
    report(
        "criterion 8 (hyperbolic closed-form path)",
        passed,
        &format!("max |generic - closed| = {worst:.3e} over randomized parameters"),
    );
    assert!(passed);
}
