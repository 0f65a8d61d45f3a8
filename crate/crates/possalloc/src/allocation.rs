//! The portfolio model and its approximate optimal allocations.
//!
//! One model instance bundles initial wealth, the risk-free return, the
//! risk scale `k`, the drift `mu`, a centered fuzzy risk component, a
//! utility and an operator. The optimal amount invested in the risky
//! asset, as a function of `k`, admits a Taylor expansion at `k = 0`; this
//! module computes the first three coefficients and assembles the
//! second- and third-order approximations, both directly from the
//! coefficient chain and through the six composite factor terms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::operators::{expected_value, EuOperator, MomentSet};
use crate::utility::{IndicatorRatios, RiskIndicators, UtilityModel};

/// How close to zero the expected value of the risk component must be.
pub const CENTERING_TOL: f64 = 1e-8;

/// One instance of the standard possibilistic portfolio choice problem.
#[derive(Debug, Clone)]
pub struct PortfolioModel {
    w0: f64,
    r: f64,
    k: f64,
    mu: f64,
    risk: FuzzyNumber,
    utility: UtilityModel,
    operator: EuOperator,
}

impl PortfolioModel {
    /// Validates and builds a model. The risk component must be centered
    /// (zero expected value under the operator's weighting), `mu` positive,
    /// `k` non-negative, and the risk-free wealth `w0 (1 + r)` must lie in
    /// the utility domain.
    pub fn new(
        w0: f64,
        r: f64,
        k: f64,
        mu: f64,
        risk: FuzzyNumber,
        utility: UtilityModel,
        operator: EuOperator,
    ) -> Result<Self> {
        if !(w0.is_finite() && r.is_finite() && k.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidParameter(
                "model parameters must be finite".into(),
            ));
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drift mu must be positive, got {mu}"
            )));
        }
        if k < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "risk scale k must be non-negative, got {k}"
            )));
        }
        let mean = expected_value(operator.weighting(), &risk);
        if mean.abs() >= CENTERING_TOL {
            return Err(Error::DegenerateModel(format!(
                "risk component is not centered: expected value {mean:e}"
            )));
        }
        let wealth = w0 * (1.0 + r);
        if !utility.contains(wealth) {
            return Err(Error::domain(
                wealth,
                utility.domain(),
                "risk-free wealth w0 (1 + r)",
            ));
        }
        Ok(Self {
            w0,
            r,
            k,
            mu,
            risk,
            utility,
            operator,
        })
    }

    /// Builds a model from a raw risky return instead of a pre-centered
    /// component: the excess return over `r` is centered by its expected
    /// value `E`, and the `(k, mu)` split is fixed to `(E, 1)` unless an
    /// explicit split with the same product is supplied.
    pub fn from_raw_return(
        w0: f64,
        r: f64,
        raw_return: FuzzyNumber,
        utility: UtilityModel,
        operator: EuOperator,
        split: Option<(f64, f64)>,
    ) -> Result<Self> {
        let excess = raw_return.shift(-r);
        let mean_excess = expected_value(operator.weighting(), &excess);
        let (k, mu) = match split {
            Some((k, mu)) => {
                if (k * mu - mean_excess).abs() > CENTERING_TOL * mean_excess.abs().max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "split k*mu = {} does not match the mean excess return {}",
                        k * mu,
                        mean_excess
                    )));
                }
                (k, mu)
            }
            None => {
                if mean_excess < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mean excess return {mean_excess} is negative; supply an explicit (k, mu) split"
                    )));
                }
                (mean_excess, 1.0)
            }
        };
        let centered = excess.shift(-k * mu);
        Self::new(w0, r, k, mu, centered, utility, operator)
    }

    /// Same model at a different risk scale.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "risk scale k must be non-negative, got {k}"
            )));
        }
        let mut m = self.clone();
        m.k = k;
        Ok(m)
    }

    pub fn initial_wealth(&self) -> f64 {
        self.w0
    }

    pub fn risk_free_return(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn risk(&self) -> &FuzzyNumber {
        &self.risk
    }

    pub fn utility(&self) -> &UtilityModel {
        &self.utility
    }

    pub fn operator(&self) -> &EuOperator {
        &self.operator
    }

    /// Wealth after the risk-free strategy, `w0 (1 + r)`; every indicator
    /// is evaluated here.
    pub fn wealth(&self) -> f64 {
        self.w0 * (1.0 + self.r)
    }

    fn second_moment_checked(&self) -> Result<f64> {
        let m2 = self.operator.moment(&self.risk, 2)?;
        if m2 <= 0.0 {
            return Err(Error::DegenerateModel(format!(
                "risk component has non-positive second moment {m2}"
            )));
        }
        Ok(m2)
    }

    fn risk_aversion_checked(&self) -> Result<f64> {
        let r = self.utility.risk_aversion(self.wealth())?;
        if r <= 0.0 {
            return Err(Error::DegenerateModel(format!(
                "risk aversion must be positive at w = {}, got {r}",
                self.wealth()
            )));
        }
        Ok(r)
    }

    /// First Taylor coefficient of the optimal allocation:
    /// `mu / (T(A, x^2) r(w))`.
    pub fn alpha_deriv1(&self) -> Result<f64> {
        let m2 = self.second_moment_checked()?;
        let r = self.risk_aversion_checked()?;
        Ok(self.mu / (m2 * r))
    }

    /// Second Taylor coefficient:
    /// `mu^2 (P/r^2) T(A, x^3) / T(A, x^2)^3`.
    pub fn alpha_deriv2(&self) -> Result<f64> {
        let m2 = self.second_moment_checked()?;
        let r = self.risk_aversion_checked()?;
        let p = self.utility.prudence(self.wealth())?;
        let m3 = self.operator.moment(&self.risk, 3)?;
        Ok(self.mu * self.mu * (p / (r * r)) * m3 / (m2 * m2 * m2))
    }

    /// Third Taylor coefficient, solved from the dependence relation
    ///
    /// `a3 m2 + 6 a1 mu^2 - 3P [a1 a2 m3 + 3 mu a1^2 m2]
    ///      + (u''''/u'') a1^3 m4 = 0`
    ///
    /// which is the third derivative of the first-order condition at
    /// `k = 0`. Note the fourth-moment coefficient `u''''/u''`: it equals
    /// the product of temperance and prudence, not their quotient.
    pub fn alpha_deriv3(&self) -> Result<f64> {
        let m2 = self.second_moment_checked()?;
        let _ = self.risk_aversion_checked()?;
        let w = self.wealth();
        let a1 = self.alpha_deriv1()?;
        let a2 = self.alpha_deriv2()?;
        let p = self.utility.prudence(w)?;
        let d = self.utility.derivatives(w, 4)?;
        let fourth_over_second = d[4] / d[2];
        let m3 = self.operator.moment(&self.risk, 3)?;
        let m4 = self.operator.moment(&self.risk, 4)?;
        let mu = self.mu;
        let numerator = -6.0 * a1 * mu * mu + 3.0 * p * (a1 * a2 * m3 + 3.0 * mu * a1 * a1 * m2)
            - fourth_over_second * a1.powi(3) * m4;
        Ok(numerator / m2)
    }

    /// Second-order approximate optimal allocation,
    /// `k a1 + k^2 a2 / 2`.
    pub fn allocation_order2(&self) -> Result<f64> {
        let k = self.k;
        Ok(k * self.alpha_deriv1()? + 0.5 * k * k * self.alpha_deriv2()?)
    }

    /// Third-order approximate optimal allocation,
    /// `k a1 + k^2 a2 / 2 + k^3 a3 / 6`.
    pub fn allocation_order3(&self) -> Result<f64> {
        let k = self.k;
        Ok(self.allocation_order2()? + k * k * k / 6.0 * self.alpha_deriv3()?)
    }

    /// The six composite factor terms built from indicator ratios and
    /// central moments.
    pub fn factor_terms(&self) -> Result<FactorTerms> {
        let ms = self.operator.central_moments(&self.risk)?;
        let ratios = self.utility.indicator_ratios(self.wealth())?;
        let var = ms.variance;
        if var <= 0.0 {
            return Err(Error::DegenerateModel(format!(
                "risk component has non-positive variance {var}"
            )));
        }
        let var2 = var * var;
        let var3 = var2 * var;
        Ok(FactorTerms {
            f1: ratios.inv_risk_aversion / var,
            f2: ratios.prudence_over_ra2 * ms.skewness / var3,
            f3: ratios.inv_risk_aversion / var2,
            f4: ratios.prudence_sq_over_ra3 * ms.skewness * ms.skewness / (var3 * var2),
            f5: ratios.prudence_over_ra2 / var2,
            f6: ratios.temperance_composite * ms.kurtosis / (var2 * var2),
        })
    }

    /// Third-order allocation assembled from the factor terms:
    /// `km F1 + (km)^2 F2 / 2 - (km)^3 [F3 - F4/2 - 3 F5/2 + F6/6]`.
    ///
    /// Algebraically identical to `allocation_order3`, computed through a
    /// separate path; the agreement of the two is a consistency check.
    pub fn allocation_order3_factored(&self) -> Result<f64> {
        let f = self.factor_terms()?;
        let km = self.k * self.mu;
        Ok(km * f.f1 + 0.5 * km * km * f.f2
            - km.powi(3) * (f.f3 - 0.5 * f.f4 - 1.5 * f.f5 + f.f6 / 6.0))
    }

    /// Full allocation report: both approximations, the coefficient chain,
    /// the factor terms and a diagnostics snapshot.
    pub fn evaluate(&self) -> Result<AllocationResult> {
        let alpha_deriv1 = self.alpha_deriv1()?;
        let alpha_deriv2 = self.alpha_deriv2()?;
        let alpha_deriv3 = self.alpha_deriv3()?;
        let k = self.k;
        let alpha_order2 = k * alpha_deriv1 + 0.5 * k * k * alpha_deriv2;
        let alpha_order3 = alpha_order2 + k * k * k / 6.0 * alpha_deriv3;
        let factors = self.factor_terms()?;
        let moments = self.operator.central_moments(&self.risk)?;
        let ratios = self.utility.indicator_ratios(self.wealth())?;
        let indicators = self.utility.indicators(self.wealth()).ok();
        Ok(AllocationResult {
            alpha_order2,
            alpha_order3,
            alpha_deriv1,
            alpha_deriv2,
            alpha_deriv3,
            factors,
            moments,
            indicators,
            ratios,
            wealth: self.wealth(),
            k,
            mu: self.mu,
        })
    }
}

/// The six composite terms of the cubic assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorTerms {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
    pub f6: f64,
}

/// Approximations plus every intermediate quantity, for audit output.
#[derive(Debug, Clone, Serialize)]
pub struct AllocationResult {
    pub alpha_order2: f64,
    pub alpha_order3: f64,
    pub alpha_deriv1: f64,
    pub alpha_deriv2: f64,
    pub alpha_deriv3: f64,
    pub factors: FactorTerms,
    pub moments: MomentSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indicators: Option<RiskIndicators>,
    pub ratios: IndicatorRatios,
    pub wealth: f64,
    pub k: f64,
    pub mu: f64,
}
