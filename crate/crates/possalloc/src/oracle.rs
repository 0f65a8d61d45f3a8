//! Ground-truth solver for the portfolio problem.
//!
//! The total utility of holding `alpha` in the risky asset is evaluated
//! with the exact marginal utility (no Taylor truncation), its first-order
//! condition is solved by bracketing plus bisection, and the polynomial
//! form of the condition is available for any truncation order up to
//! three. Everything here is deliberately independent of the
//! approximation formulas it arbitrates.

use serde::Serialize;

use crate::allocation::PortfolioModel;
use crate::error::{Error, Result};

/// Bracketing/bisection parameters for the first-order condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocSolverConfig {
    /// First trial width of the bracket, > 0.
    pub bracket_init: f64,
    /// Geometric growth factor of the bracket, > 1.
    pub bracket_growth: f64,
    /// Expansion attempts before giving up.
    pub max_expansions: usize,
    /// Residual bound on the derivative at the reported optimum.
    pub root_tolerance: f64,
    /// Bisection iteration cap.
    pub max_iterations: usize,
}

impl Default for FocSolverConfig {
    fn default() -> Self {
        Self {
            bracket_init: 1.0,
            bracket_growth: 2.0,
            max_expansions: 60,
            root_tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

impl FocSolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.bracket_init > 0.0 && self.bracket_init.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bracket_init must be positive, got {}",
                self.bracket_init
            )));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bracket_growth must exceed 1, got {}",
                self.bracket_growth
            )));
        }
        if self.root_tolerance.is_nan() || self.root_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "root_tolerance must be positive, got {}",
                self.root_tolerance
            )));
        }
        Ok(())
    }
}

/// Solved optimum with its audit quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub alpha_star: f64,
    /// Derivative of the total utility at the optimum.
    pub foc_residual: f64,
    /// Total utility at the optimum.
    pub v_at_star: f64,
    /// Minimum of the sampled second derivative over the solve range;
    /// non-positive certifies concavity along the path.
    pub concavity_certificate: f64,
}

/// Checks that the wealth reached at `alpha` stays inside the utility
/// domain for every value on the closed support hull of the risk.
fn check_alpha_domain(m: &PortfolioModel, alpha: f64) -> Result<()> {
    let w = m.wealth();
    let km = m.k() * m.mu();
    let (xlo, xhi) = m.risk().support();
    let domain = m.utility().domain();
    for x in [xlo, xhi] {
        let reached = w + alpha * (km + x);
        if !(reached > domain.0 && reached < domain.1) {
            return Err(Error::domain(
                reached,
                domain,
                format!("alpha {alpha}, support endpoint x = {x}"),
            ));
        }
    }
    Ok(())
}

/// Total utility `V(alpha) = T(A, u(w + alpha (k mu + x)))`.
pub fn total_utility(m: &PortfolioModel, alpha: f64) -> Result<f64> {
    check_alpha_domain(m, alpha)?;
    let w = m.wealth();
    let km = m.k() * m.mu();
    let u = m.utility();
    m.operator().geu(m.risk(), |x| u.eval(w + alpha * (km + x)))
}

/// `V'(alpha) = T(A, (k mu + x) u'(w + alpha (k mu + x)))`, with the exact
/// marginal utility.
pub fn total_utility_deriv(m: &PortfolioModel, alpha: f64) -> Result<f64> {
    check_alpha_domain(m, alpha)?;
    let w = m.wealth();
    let km = m.k() * m.mu();
    let u = m.utility();
    m.operator().geu(m.risk(), |x| {
        let s = km + x;
        s * u.derivative(w + alpha * s, 1)
    })
}

/// `V''(alpha) = T(A, (k mu + x)^2 u''(w + alpha (k mu + x)))`.
pub fn total_utility_second_deriv(m: &PortfolioModel, alpha: f64) -> Result<f64> {
    check_alpha_domain(m, alpha)?;
    let w = m.wealth();
    let km = m.k() * m.mu();
    let u = m.utility();
    m.operator().geu(m.risk(), |x| {
        let s = km + x;
        s * s * u.derivative(w + alpha * s, 2)
    })
}

/// Largest feasible |alpha| in the given direction (+1 or -1) before the
/// support hull leaves the utility domain. Infinite when unconstrained.
fn feasible_limit(m: &PortfolioModel, direction: f64) -> f64 {
    let w = m.wealth();
    let km = m.k() * m.mu();
    let (xlo, xhi) = m.risk().support();
    let (dlo, dhi) = m.utility().domain();
    let mut limit = f64::INFINITY;
    for x in [xlo, xhi] {
        let slope = direction * (km + x);
        // wealth moves as w + |alpha| * slope in this direction
        if slope < 0.0 && dlo.is_finite() {
            limit = limit.min((w - dlo) / -slope);
        }
        if slope > 0.0 && dhi.is_finite() {
            limit = limit.min((dhi - w) / slope);
        }
    }
    limit
}

/// Minimum sampled `V''` over `sample_count` points spanning
/// `[alpha_lo, alpha_hi]` (clipped to the feasible range).
pub fn concavity_certificate(
    m: &PortfolioModel,
    alpha_lo: f64,
    alpha_hi: f64,
    sample_count: usize,
) -> Result<f64> {
    let margin = 1.0 - 1e-9;
    let lo = alpha_lo.max(-feasible_limit(m, -1.0) * margin);
    let hi = alpha_hi.min(feasible_limit(m, 1.0) * margin);
    if sample_count == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "empty certificate range [{alpha_lo}, {alpha_hi}] after domain clipping"
        )));
    }
    let n = sample_count.max(2);
    let mut cert = f64::INFINITY;
    for i in 0..n {
        let alpha = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        cert = cert.min(total_utility_second_deriv(m, alpha)?);
    }
    Ok(cert)
}

/// Solves the first-order condition `V'(alpha) = 0` by expanding a bracket
/// geometrically from zero and bisecting. At `k = 0` the optimum is zero
/// by construction. Negative optima are admitted: if the derivative at
/// zero is negative the bracket grows to the left.
pub fn solve_foc(m: &PortfolioModel, cfg: &FocSolverConfig) -> Result<OracleResult> {
    cfg.validate()?;
    if m.k() == 0.0 {
        let residual = total_utility_deriv(m, 0.0)?;
        let reach = feasible_limit(m, 1.0).clamp(1e-6, 1.0) * 0.5;
        return Ok(OracleResult {
            alpha_star: 0.0,
            foc_residual: residual,
            v_at_star: total_utility(m, 0.0)?,
            concavity_certificate: concavity_certificate(m, 0.0, reach, 9)?,
        });
    }

    let v0 = total_utility_deriv(m, 0.0)?;
    if v0.abs() <= cfg.root_tolerance {
        return Ok(OracleResult {
            alpha_star: 0.0,
            foc_residual: v0,
            v_at_star: total_utility(m, 0.0)?,
            concavity_certificate: total_utility_second_deriv(m, 0.0)?,
        });
    }
    let direction = if v0 > 0.0 { 1.0 } else { -1.0 };
    let margin = 1.0 - 1e-9;
    let limit = feasible_limit(m, direction) * margin;
    if limit <= 0.0 {
        return Err(Error::NoInteriorOptimum(format!(
            "no feasible range in the search direction; V'(0) = {v0:e}"
        )));
    }

    // expand until the derivative changes sign
    let mut hi = direction * cfg.bracket_init.min(limit);
    let mut f_hi = total_utility_deriv(m, hi)?;
    let mut expansions = 0usize;
    while v0 * f_hi > 0.0 {
        expansions += 1;
        if expansions > cfg.max_expansions {
            return Err(Error::NoInteriorOptimum(format!(
                "derivative kept the sign of V'(0) = {v0:e} after {} expansions; last point {hi} with V' = {f_hi:e}",
                cfg.max_expansions
            )));
        }
        let next = hi * cfg.bracket_growth;
        let clipped = if next.abs() > limit {
            direction * limit
        } else {
            next
        };
        if clipped == hi {
            // already at the domain boundary and still no sign change
            return Err(Error::NoInteriorOptimum(format!(
                "derivative still {f_hi:e} at the domain boundary alpha = {hi}"
            )));
        }
        hi = clipped;
        f_hi = total_utility_deriv(m, hi)?;
    }

    // bisect on [0, hi] (orientation handled through the sign of V'(0))
    let mut lo = 0.0f64;
    let mut f_lo = v0;
    let mut iterations = 0usize;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-14 * mid.abs().max(1.0) {
            break;
        }
        let f_mid = total_utility_deriv(m, mid)?;
        if f_lo * f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let alpha_star = 0.5 * (lo + hi);
    let residual = total_utility_deriv(m, alpha_star)?;
    if residual.abs() > cfg.root_tolerance {
        return Err(Error::SolverFailure(format!(
            "residual {residual:e} above tolerance {:e} after {iterations} bisections",
            cfg.root_tolerance
        )));
    }
    let cert_lo = (1.1 * alpha_star).min(0.0);
    let cert_hi = (1.1 * alpha_star).max(0.0);
    let certificate = concavity_certificate(m, cert_lo, cert_hi, 17)?;
    Ok(OracleResult {
        alpha_star,
        foc_residual: residual,
        v_at_star: total_utility(m, alpha_star)?,
        concavity_certificate: certificate,
    })
}

/// Shifted raw moment `T(A, (k mu + x)^p)` by binomial expansion into the
/// plain moments of the centered risk.
pub fn shifted_moment(m: &PortfolioModel, p: u32, k: f64) -> Result<f64> {
    let km = k * m.mu();
    let mut moments = vec![1.0]; // order 0
    for i in 1..=p {
        moments.push(m.operator().moment(m.risk(), i)?);
    }
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for i in 0..=p {
        // binom = C(p, i)
        if i > 0 {
            binom *= (p - i + 1) as f64 / i as f64;
        }
        acc += binom * km.powi((p - i) as i32) * moments[i as usize];
    }
    Ok(acc)
}

/// The same shifted moment by direct quadrature, kept around to verify
/// the binomial route.
pub fn shifted_moment_direct(m: &PortfolioModel, p: u32, k: f64) -> Result<f64> {
    let km = k * m.mu();
    m.operator().geu(m.risk(), |x| (km + x).powi(p as i32))
}

/// Real roots of the order-`n` polynomial form of the first-order
/// condition at risk scale `k`, with the root closest to the exact
/// optimum tagged as principal (when the exact solve succeeds).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialFoc {
    /// Coefficients `c_j` of `sum c_j alpha^j`, ascending order.
    pub coefficients: Vec<f64>,
    /// All real roots, ascending.
    pub roots: Vec<f64>,
    /// Index into `roots` of the root nearest the exact optimum.
    pub principal: Option<usize>,
}

impl PolynomialFoc {
    pub fn principal_root(&self) -> Option<f64> {
        self.principal.map(|i| self.roots[i])
    }
}

/// Builds and solves the order-`n` polynomial first-order condition,
/// `1 <= n <= 3`: coefficients `c_j = u^(j+1)(w)/j! * T(A, (k mu + x)^(j+1))`.
pub fn polynomial_foc(m: &PortfolioModel, n: u32, k: f64) -> Result<PolynomialFoc> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "polynomial condition order must be 1..=3, got {n}"
        )));
    }
    let w = m.wealth();
    let derivs = m.utility().derivatives(w, n + 1)?;
    let mut coefficients = Vec::with_capacity(n as usize + 1);
    let mut factorial = 1.0f64;
    for j in 0..=n {
        if j > 0 {
            factorial *= j as f64;
        }
        coefficients.push(derivs[(j + 1) as usize] / factorial * shifted_moment(m, j + 1, k)?);
    }
    let roots = real_roots(&coefficients);
    let principal = match m
        .with_k(k)
        .and_then(|mk| solve_foc(&mk, &FocSolverConfig::default()))
    {
        Ok(exact) => roots
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - exact.alpha_star)
                    .abs()
                    .total_cmp(&(*b - exact.alpha_star).abs())
            })
            .map(|(i, _)| i),
        Err(_) => None,
    };
    Ok(PolynomialFoc {
        coefficients,
        roots,
        principal,
    })
}

/// Real roots of a polynomial of degree at most three, given ascending
/// coefficients. Near-zero leading coefficients are trimmed relative to
/// the largest magnitude.
pub fn real_roots(coefficients: &[f64]) -> Vec<f64> {
    let max_abs = coefficients.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    if max_abs == 0.0 {
        return Vec::new();
    }
    let mut coeffs: Vec<f64> = coefficients.to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= 1e-14 * max_abs {
        coeffs.pop();
    }
    let mut roots = match coeffs.len() {
        0 | 1 => Vec::new(),
        2 => vec![-coeffs[0] / coeffs[1]],
        3 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        4 => cubic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3]),
        _ => unreachable!("degree is at most 3"),
    };
    // Newton polish against the full input polynomial
    for root in &mut roots {
        for _ in 0..3 {
            let (p, dp) = horner(coefficients, *root);
            if dp != 0.0 && p != 0.0 {
                let step = p / dp;
                if step.is_finite() && step.abs() < 1.0 + root.abs() {
                    *root -= step;
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    roots
}

fn horner(coefficients: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coefficients.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Roots of `c + b x + a x^2`, numerically stable split.
fn quadratic_roots(c: f64, b: f64, a: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        // b == 0 and disc == 0 (or c == 0)
        if a != 0.0 {
            let r = (-c / a).max(0.0).sqrt();
            return vec![-r, r];
        }
        return vec![0.0];
    }
    let mut roots = vec![q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real roots of `d + c x + b x^2 + a x^3` via the depressed cubic.
fn cubic_roots(d: f64, c: f64, b: f64, a: f64) -> Vec<f64> {
    let b = b / a;
    let c = c / a;
    let d = d / a;
    // x = t - b/3 removes the quadratic term
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let mut roots = Vec::new();
    if disc > 0.0 {
        // one real root (Cardano, cancellation-safe branch)
        let sq = disc.sqrt();
        let u = (-half_q + sq).cbrt();
        let v = (-half_q - sq).cbrt();
        roots.push(u + v - shift);
    } else if disc == 0.0 {
        if q == 0.0 {
            roots.push(-shift);
        } else {
            let u = (-half_q).cbrt();
            roots.push(2.0 * u - shift);
            roots.push(-u - shift);
        }
    } else {
        // three real roots
        let rho = (-third_p).sqrt();
        let theta = (-half_q / (rho * rho * rho)).clamp(-1.0, 1.0).acos();
        for i in 0..3 {
            let angle = (theta + 2.0 * std::f64::consts::PI * i as f64) / 3.0;
            roots.push(2.0 * rho * angle.cos() - shift);
        }
    }
    roots
}
