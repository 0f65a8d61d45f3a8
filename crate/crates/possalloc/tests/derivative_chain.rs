//! Finite-difference arbitration of the Taylor coefficient chain against
//! the exact solver, plus the symbolic identities tying the chain to the
//! factor-term assembly.

use possalloc::allocation::PortfolioModel;
use possalloc::fuzzy::{FuzzyNumber, WeightingFunction};
use possalloc::operators::EuOperator;
use possalloc::oracle::{solve_foc, total_utility, total_utility_deriv, FocSolverConfig};
use possalloc::utility::UtilityModel;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn oracle_alpha(m: &PortfolioModel, k: f64) -> f64 {
    solve_foc(&m.with_k(k).unwrap(), &FocSolverConfig::default())
        .unwrap()
        .alpha_star
}

fn centered_triangular(left: f64, right: f64) -> FuzzyNumber {
    FuzzyNumber::triangular((left - right) / 6.0, left, right).unwrap()
}

fn crra_model(a: f64, w: f64, mu: f64, left: f64, right: f64) -> PortfolioModel {
    PortfolioModel::new(
        w,
        0.0,
        0.1,
        mu,
        centered_triangular(left, right),
        UtilityModel::crra(a).unwrap(),
        EuOperator::t1(WeightingFunction::default_2gamma()),
    )
    .unwrap()
}

/// Seeded model family with enough skew for the second-difference check
/// to have a well-conditioned target.
fn random_models(count: usize, seed: u64) -> Vec<PortfolioModel> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.random_range(0.25..0.65);
            let w = rng.random_range(60.0..140.0);
            let mu = rng.random_range(0.7..1.3);
            let left = rng.random_range(1.0..2.0);
            let right = left * rng.random_range(1.8..2.6);
            crra_model(a, w, mu, left, right)
        })
        .collect()
}

#[test]
fn slope_matches_oracle_finite_difference() {
    let h = 1e-3;
    for (i, m) in random_models(5, 11).iter().enumerate() {
        let chain = m.alpha_deriv1().unwrap();
        let fd = oracle_alpha(m, h) / h;
        let rel = ((fd - chain) / chain).abs();
        assert!(
            rel < 0.02,
            "model {i}: slope {chain} vs fd {fd} (rel {rel})"
        );
    }
}

#[test]
fn curvature_matches_oracle_second_difference() {
    let h = 1e-3;
    for (i, m) in random_models(5, 23).iter().enumerate() {
        let chain = m.alpha_deriv2().unwrap();
        let fd = (oracle_alpha(m, 2.0 * h) - 2.0 * oracle_alpha(m, h)) / (h * h);
        let rel = ((fd - chain) / chain).abs();
        assert!(rel < 0.05, "model {i}: a2 {chain} vs fd {fd} (rel {rel})");
    }
}

#[test]
fn third_coefficient_matches_oracle_third_difference() {
    // one-sided second-order stencil anchored at alpha(0) = 0
    let h = 5e-3;
    for (i, m) in random_models(5, 37).iter().enumerate() {
        let chain = m.alpha_deriv3().unwrap();
        let f: Vec<f64> = (1..=4).map(|j| oracle_alpha(m, j as f64 * h)).collect();
        let fd = (9.0 * f[0] - 12.0 * f[1] + 7.0 * f[2] - 1.5 * f[3]) / (h * h * h);
        let rel = ((fd - chain) / chain).abs();
        assert!(rel < 0.10, "model {i}: a3 {chain} vs fd {fd} (rel {rel})");
    }
}

#[test]
fn cubic_term_expands_into_the_four_proof_terms() {
    // (k^3/6) a3 must equal the closed combination of moments and
    // indicator ratios produced by expanding the dependence relation
    for m in [
        crra_model(0.5, 100.0, 1.0, 2.0, 2.0),
        crra_model(0.35, 80.0, 1.2, 1.0, 3.0),
        crra_model(0.6, 120.0, 0.8, 2.5, 1.0),
    ] {
        let k = m.k();
        let mu = m.mu();
        let w = m.wealth();
        let r = m.utility().risk_aversion(w).unwrap();
        let p = m.utility().prudence(w).unwrap();
        let d = m.utility().derivatives(w, 4).unwrap();
        let m2 = m.operator().moment(m.risk(), 2).unwrap();
        let m3 = m.operator().moment(m.risk(), 3).unwrap();
        let m4 = m.operator().moment(m.risk(), 4).unwrap();
        let km = k * mu;
        let term1 = -km.powi(3) / (r * m2 * m2);
        let term2 = 0.5 * km.powi(3) * (p * p) / r.powi(3) * m3 * m3 / m2.powi(5);
        let term3 = 1.5 * km.powi(3) * p / (r * r) / (m2 * m2);
        let term4 = -km.powi(3) / 6.0 * (d[4] / d[2]) / r.powi(3) * m4 / m2.powi(4);
        let assembled = term1 + term2 + term3 + term4;
        let direct = k.powi(3) / 6.0 * m.alpha_deriv3().unwrap();
        assert!(
            (assembled - direct).abs() < 1e-9 * direct.abs().max(1.0),
            "{assembled} vs {direct}"
        );
    }
}

#[test]
fn order3_beats_order2_below_the_crossover() {
    let grid = [0.2, 0.15, 0.1, 0.075, 0.05, 0.025, 0.0125];
    for (i, m) in random_models(4, 53).iter().enumerate() {
        let mut crossover: Option<f64> = None;
        for &k in &grid {
            let mk = m.with_k(k).unwrap();
            let star = solve_foc(&mk, &FocSolverConfig::default())
                .unwrap()
                .alpha_star;
            let e2 = (mk.allocation_order2().unwrap() - star).abs();
            let e3 = (mk.allocation_order3().unwrap() - star).abs();
            if e3 <= e2 {
                crossover.get_or_insert(k);
            } else {
                assert!(
                    crossover.is_none(),
                    "model {i}: order3 fell behind again below k = {k}"
                );
            }
        }
        let k_star = crossover.expect("order3 never beat order2 on the grid");
        println!("model {i}: order3 at least as accurate as order2 for k <= {k_star}");
        assert!(k_star >= grid[grid.len() - 1]);
    }
}

#[test]
fn polynomial_condition_orders_rank_by_accuracy() {
    use possalloc::oracle::polynomial_foc;
    let m = crra_model(0.5, 100.0, 1.0, 1.0, 2.0);
    // at a coarse risk scale the quadratic truncation of this skewed
    // model loses its real roots entirely; that is reported, not an error
    let coarse = polynomial_foc(&m, 2, 0.1).unwrap();
    assert!(coarse.roots.is_empty());
    assert!(coarse.principal.is_none());
    // at finer scales the higher truncations track the exact optimum
    // strictly better: e3 <= e2 <= e1
    for k in [0.05, 0.025] {
        let star = oracle_alpha(&m, k);
        let errs: Vec<f64> = (1..=3u32)
            .map(|n| {
                let root = polynomial_foc(&m, n, k)
                    .unwrap()
                    .principal_root()
                    .expect("real principal root");
                (root - star).abs()
            })
            .collect();
        assert!(errs[2] <= errs[1] && errs[1] <= errs[0], "k {k}: {errs:?}");
    }
}

#[test]
fn derivative_of_total_utility_matches_quadrature_exchange() {
    // the solver-level expression of the derivative-exchange property:
    // d/dalpha of the total utility equals the evaluated derivative
    let m = crra_model(0.5, 100.0, 1.0, 2.0, 3.0);
    let h = 1e-5;
    for alpha in [0.0, 0.5, 2.0, 8.0, 20.0] {
        let fd = (total_utility(&m, alpha + h).unwrap() - total_utility(&m, alpha - h).unwrap())
            / (2.0 * h);
        let direct = total_utility_deriv(&m, alpha).unwrap();
        assert!(
            (fd - direct).abs() < 1e-6,
            "alpha {alpha}: fd {fd} vs {direct}"
        );
    }
}

#[test]
fn hara_and_t2_models_pass_the_same_arbitration() {
    let models = [
        PortfolioModel::new(
            90.0,
            0.1,
            0.1,
            1.0,
            centered_triangular(2.0, 3.0),
            UtilityModel::hara(1.0, 2.0, 0.5).unwrap(),
            EuOperator::t1(WeightingFunction::default_2gamma()),
        )
        .unwrap(),
        PortfolioModel::new(
            100.0,
            0.0,
            0.1,
            0.7,
            centered_triangular(4.0, 2.0),
            UtilityModel::hara(-1.5, 1.0, 3.0).unwrap(),
            EuOperator::t2(WeightingFunction::default_2gamma()),
        )
        .unwrap(),
    ];
    let h = 1e-3;
    for (i, m) in models.iter().enumerate() {
        let a1 = m.alpha_deriv1().unwrap();
        let fd1 = oracle_alpha(m, h) / h;
        assert!(((fd1 - a1) / a1).abs() < 0.02, "model {i} slope");
        let a2 = m.alpha_deriv2().unwrap();
        let fd2 = (oracle_alpha(m, 2.0 * h) - 2.0 * oracle_alpha(m, h)) / (h * h);
        assert!(((fd2 - a2) / a2).abs() < 0.05, "model {i} curvature");
    }
}
