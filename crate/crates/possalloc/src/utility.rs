//! Utility families with closed-form derivatives to order four, and the
//! risk-attitude indicators built from them.
//!
//! Two analytic families are provided: constant relative risk aversion
//! `u(w) = w^a / a` on `w > 0`, and the hyperbolic family
//! `u(w) = zeta (delta + w/gamma)^(1-gamma)` on `delta + w/gamma > 0`.
//! Custom evaluators can be supplied for anything else. Every constructor
//! insists on an increasing, concave function; `custom_unchecked` is the
//! documented escape hatch for deliberately broken inputs in verification
//! runs.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Points sampled by the construction guard on custom evaluators.
const GUARD_SAMPLES: usize = 33;
/// Slack allowed on `u'' <= 0` at sampled points.
const CONCAVITY_SLACK: f64 = 1e-12;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Externally supplied utility: value plus four derivative evaluators on
/// an open domain.
#[derive(Clone)]
pub struct CustomUtility {
    evals: [Eval; 5],
    domain: (f64, f64),
}

/// A utility function with derivatives available to order four.
#[derive(Clone)]
pub enum UtilityModel {
    /// `u(w) = w^a / a`, `a != 0`, `a < 1` so the function is increasing
    /// and concave on `w > 0`.
    Crra {
        a: f64,
    },
    /// `u(w) = zeta (delta + w/gamma_h)^(1 - gamma_h)` wherever
    /// `delta + w/gamma_h > 0`.
    Hara {
        zeta: f64,
        delta: f64,
        gamma_h: f64,
    },
    Custom(CustomUtility),
}

impl std::fmt::Debug for UtilityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Crra { a } => write!(f, "Crra {{ a: {a} }}"),
            Self::Hara {
                zeta,
                delta,
                gamma_h,
            } => write!(
                f,
                "Hara {{ zeta: {zeta}, delta: {delta}, gamma_h: {gamma_h} }}"
            ),
            Self::Custom(c) => write!(f, "Custom {{ domain: {:?} }}", c.domain),
        }
    }
}

/// Arrow-Pratt absolute risk aversion, prudence and temperance at a
/// wealth point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskIndicators {
    /// `-u''/u'`
    pub risk_aversion: f64,
    /// `-u'''/u''`
    pub prudence: f64,
    /// `-u''''/u'''`
    pub temperance: f64,
}

/// The composite ratios the cubic allocation terms are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorRatios {
    /// `1 / r`
    pub inv_risk_aversion: f64,
    /// `P / r^2`
    pub prudence_over_ra2: f64,
    /// `P^2 / r^3`
    pub prudence_sq_over_ra3: f64,
    /// `T P / r^3`, equal to `(u''''/u'') / r^3`. This is the coefficient
    /// the fourth-moment term actually carries; see `alpha_deriv3`.
    pub temperance_composite: f64,
}

impl UtilityModel {
    /// Power utility `w^a / a`. Requires `a != 0` and `a < 1` (increasing
    /// and concave on `w > 0`; the log boundary `a = 1` is excluded along
    /// with everything convex).
    pub fn crra(a: f64) -> Result<Self> {
        if !a.is_finite() || a == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "crra exponent must be finite and nonzero, got {a}"
            )));
        }
        if a >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "crra exponent must be < 1 for an increasing concave utility, got {a}"
            )));
        }
        Ok(Self::Crra { a })
    }

    /// Hyperbolic utility. Increasing and concave exactly when
    /// `zeta (1 - gamma_h) / gamma_h > 0`, which the constructor enforces;
    /// `zeta` cancels from every indicator.
    pub fn hara(zeta: f64, delta: f64, gamma_h: f64) -> Result<Self> {
        if !(zeta.is_finite() && delta.is_finite() && gamma_h.is_finite()) || gamma_h == 0.0 {
            return Err(Error::InvalidParameter(
                "hara parameters must be finite with nonzero gamma".into(),
            ));
        }
        if zeta * (1.0 - gamma_h) / gamma_h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "hara(zeta={zeta}, gamma={gamma_h}) is not increasing: zeta(1-gamma)/gamma must be positive"
            )));
        }
        Ok(Self::Hara {
            zeta,
            delta,
            gamma_h,
        })
    }

    /// Custom utility from evaluators `[u, u', u'', u''', u'''']` on an
    /// open domain. Construction samples the domain and rejects evaluators
    /// that are not increasing and concave there.
    pub fn custom(evals: [Eval; 5], domain: (f64, f64)) -> Result<Self> {
        let model = Self::custom_unchecked(evals, domain)?;
        let (lo, hi) = model.guard_range();
        for i in 1..=GUARD_SAMPLES {
            let w = lo + (hi - lo) * i as f64 / (GUARD_SAMPLES + 1) as f64;
            let d1 = model.derivative(w, 1);
            let d2 = model.derivative(w, 2);
            if !(d1.is_finite() && d2.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "custom utility derivative at {w}"
                )));
            }
            if d1 <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "custom utility is not increasing at w = {w} (u' = {d1})"
                )));
            }
            if d2 > CONCAVITY_SLACK {
                return Err(Error::InvalidParameter(format!(
                    "custom utility is not concave at w = {w} (u'' = {d2})"
                )));
            }
        }
        Ok(model)
    }

    /// Custom utility without the increasing/concave guard. Intended for
    /// injecting deliberately invalid models into verification runs.
    pub fn custom_unchecked(evals: [Eval; 5], domain: (f64, f64)) -> Result<Self> {
        if domain.0.is_nan() || domain.1.is_nan() || domain.0 >= domain.1 {
            return Err(Error::InvalidParameter(format!(
                "custom utility domain must be a nonempty open interval, got {domain:?}"
            )));
        }
        Ok(Self::Custom(CustomUtility { evals, domain }))
    }

    /// Convenience: a custom power utility `w^a / a` with no concavity
    /// guard, any nonzero exponent.
    pub fn power_unchecked(a: f64) -> Result<Self> {
        if !a.is_finite() || a == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be finite and nonzero, got {a}"
            )));
        }
        let d = move |order: i32| {
            move |w: f64| {
                let mut coeff = 1.0 / a;
                for j in 0..order {
                    coeff *= a - j as f64;
                }
                coeff * w.powf(a - order as f64)
            }
        };
        Self::custom_unchecked(
            [
                Arc::new(d(0)),
                Arc::new(d(1)),
                Arc::new(d(2)),
                Arc::new(d(3)),
                Arc::new(d(4)),
            ],
            (0.0, f64::INFINITY),
        )
    }

    /// The open interval of valid wealth.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Crra { .. } => (0.0, f64::INFINITY),
            Self::Hara { delta, gamma_h, .. } => {
                // delta + w/gamma > 0
                let boundary = -delta * gamma_h;
                if *gamma_h > 0.0 {
                    (boundary, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, boundary)
                }
            }
            Self::Custom(c) => c.domain,
        }
    }

    pub fn contains(&self, w: f64) -> bool {
        let (lo, hi) = self.domain();
        w > lo && w < hi
    }

    fn check_domain(&self, w: f64) -> Result<()> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(Error::domain(w, self.domain(), "utility evaluation"))
        }
    }

    /// A finite range inside the domain used by sampling guards.
    fn guard_range(&self) -> (f64, f64) {
        let (lo, hi) = self.domain();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi),
            (true, false) => (lo, lo + 2e6),
            (false, true) => (hi - 2e6, hi),
            (false, false) => (-1e6, 1e6),
        }
    }

    /// `order`-th derivative (0 = the function itself), no domain check.
    pub(crate) fn derivative(&self, w: f64, order: u32) -> f64 {
        debug_assert!(order <= 4);
        match self {
            Self::Crra { a } => {
                // u = w^a / a; u^(j) = (a-1)...(a-j+1) w^(a-j) for j >= 1
                if order == 0 {
                    w.powf(*a) / a
                } else {
                    let mut coeff = 1.0;
                    for j in 1..order {
                        coeff *= a - j as f64;
                    }
                    coeff * w.powf(a - order as f64)
                }
            }
            Self::Hara {
                zeta,
                delta,
                gamma_h,
            } => {
                let x = delta + w / gamma_h;
                let mut coeff = *zeta;
                for j in 0..order {
                    coeff *= (1.0 - gamma_h - j as f64) / gamma_h;
                }
                coeff * x.powf(1.0 - gamma_h - order as f64)
            }
            Self::Custom(c) => (c.evals[order as usize])(w),
        }
    }

    /// `[u(w), u'(w), ..., u^(order)(w)]` for `order <= 4`.
    pub fn derivatives(&self, w: f64, order: u32) -> Result<Vec<f64>> {
        if order > 4 {
            return Err(Error::InvalidParameter(format!(
                "derivatives are available to order 4, requested {order}"
            )));
        }
        self.check_domain(w)?;
        Ok((0..=order).map(|j| self.derivative(w, j)).collect())
    }

    pub(crate) fn eval(&self, w: f64) -> f64 {
        self.derivative(w, 0)
    }

    /// `-u''/u'`; errors when `u'` vanishes.
    pub fn risk_aversion(&self, w: f64) -> Result<f64> {
        self.check_domain(w)?;
        let d1 = self.derivative(w, 1);
        if d1 == 0.0 {
            return Err(Error::IndicatorUndefined(format!(
                "risk aversion needs u'(w) != 0 at w = {w}"
            )));
        }
        Ok(-self.derivative(w, 2) / d1)
    }

    /// `-u'''/u''`; errors when `u''` vanishes.
    pub fn prudence(&self, w: f64) -> Result<f64> {
        self.check_domain(w)?;
        let d2 = self.derivative(w, 2);
        if d2 == 0.0 {
            return Err(Error::IndicatorUndefined(format!(
                "prudence needs u''(w) != 0 at w = {w}"
            )));
        }
        Ok(-self.derivative(w, 3) / d2)
    }

    /// `-u''''/u'''`; errors when `u'''` vanishes.
    pub fn temperance(&self, w: f64) -> Result<f64> {
        self.check_domain(w)?;
        let d3 = self.derivative(w, 3);
        if d3 == 0.0 {
            return Err(Error::IndicatorUndefined(format!(
                "temperance needs u'''(w) != 0 at w = {w}"
            )));
        }
        Ok(-self.derivative(w, 4) / d3)
    }

    /// All three indicators at once.
    pub fn indicators(&self, w: f64) -> Result<RiskIndicators> {
        Ok(RiskIndicators {
            risk_aversion: self.risk_aversion(w)?,
            prudence: self.prudence(w)?,
            temperance: self.temperance(w)?,
        })
    }

    /// The composite ratios `1/r`, `P/r^2`, `P^2/r^3` and `T P / r^3`.
    ///
    /// The last one is computed as `(u''''/u'') / r^3`, which only needs
    /// `u'' != 0` and agrees with `temperance * prudence / r^3` whenever
    /// both are defined.
    pub fn indicator_ratios(&self, w: f64) -> Result<IndicatorRatios> {
        self.check_domain(w)?;
        let r = self.risk_aversion(w)?;
        if r == 0.0 {
            return Err(Error::IndicatorUndefined(format!(
                "indicator ratios need r(w) != 0 at w = {w}"
            )));
        }
        let p = self.prudence(w)?;
        let d2 = self.derivative(w, 2);
        let fourth_over_second = self.derivative(w, 4) / d2;
        let r3 = r * r * r;
        Ok(IndicatorRatios {
            inv_risk_aversion: 1.0 / r,
            prudence_over_ra2: p / (r * r),
            prudence_sq_over_ra3: p * p / r3,
            temperance_composite: fourth_over_second / r3,
        })
    }
}
