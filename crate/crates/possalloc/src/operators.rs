//! Expected-utility operators over fuzzy numbers.
//!
//! An operator evaluates `T(A, g)` for a fuzzy number `A` and a continuous
//! `g`. Two members are provided:
//!
//! * `T1` averages `g` at the two level-set endpoints,
//!   `T1(A, g) = 1/2 int_0^1 [g(a1(g)) + g(a2(g))] f(g) dg`;
//! * `T2` replaces the endpoint average with the mean of `g` over the
//!   whole level interval.
//!
//! Both satisfy: identity maps to the weighted expected value, constants
//! are preserved, the map is linear and monotone in `g`, and evaluation
//! commutes with differentiation in a parameter of `g` (checked by
//! `check_d_property`). Moments of every order come from `g(x) = x^k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyNumber, WeightingFunction, DEGENERATE_WIDTH};
use crate::quad::{self, GaussLegendre};

/// Which evaluation rule an operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Endpoint average.
    T1,
    /// Level-interval mean (nested quadrature).
    T2,
}

impl std::fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorKind::T1 => write!(f, "t1"),
            OperatorKind::T2 => write!(f, "t2"),
        }
    }
}

/// Minimum node counts accepted for the two quadrature layers.
pub const MIN_NODES: usize = 8;
/// Upper bound on node counts; keeps untrusted configs from requesting
/// unbounded work.
pub const MAX_NODES: usize = 4096;
/// Default outer (level) node count.
pub const DEFAULT_OUTER_NODES: usize = 64;
/// Default inner (value) node count, used by `T2` only.
pub const DEFAULT_INNER_NODES: usize = 32;

/// A concrete expected-utility evaluator: rule kind, weighting and
/// quadrature resolution. Immutable after construction, cheap to clone.
#[derive(Debug, Clone)]
pub struct EuOperator {
    kind: OperatorKind,
    weighting: WeightingFunction,
    outer: GaussLegendre,
    inner: GaussLegendre,
}

impl EuOperator {
    pub fn new(
        kind: OperatorKind,
        weighting: WeightingFunction,
        outer_nodes: usize,
        inner_nodes: usize,
    ) -> Result<Self> {
        if outer_nodes < MIN_NODES || inner_nodes < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "quadrature node counts must be at least {MIN_NODES}, got outer {outer_nodes}, inner {inner_nodes}"
            )));
        }
        if outer_nodes > MAX_NODES || inner_nodes > MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "quadrature node counts must be at most {MAX_NODES}, got outer {outer_nodes}, inner {inner_nodes}"
            )));
        }
        Ok(Self {
            kind,
            weighting,
            outer: GaussLegendre::new(outer_nodes),
            inner: GaussLegendre::new(inner_nodes),
        })
    }

    /// Endpoint-average operator with default resolution.
    pub fn t1(weighting: WeightingFunction) -> Self {
        Self::new(
            OperatorKind::T1,
            weighting,
            DEFAULT_OUTER_NODES,
            DEFAULT_INNER_NODES,
        )
        .expect("default node counts are valid")
    }

    /// Interval-mean operator with default resolution.
    pub fn t2(weighting: WeightingFunction) -> Self {
        Self::new(
            OperatorKind::T2,
            weighting,
            DEFAULT_OUTER_NODES,
            DEFAULT_INNER_NODES,
        )
        .expect("default node counts are valid")
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn weighting(&self) -> &WeightingFunction {
        &self.weighting
    }

    pub fn outer_nodes(&self) -> usize {
        self.outer.order()
    }

    pub fn inner_nodes(&self) -> usize {
        self.inner.order()
    }

    /// Generalized expected utility `T(A, g)`.
    ///
    /// Non-finite values of `g` on the support abort with an error instead
    /// of silently polluting the sum.
    pub fn geu<G: Fn(f64) -> f64>(&self, a: &FuzzyNumber, g: G) -> Result<f64> {
        let mut acc = 0.0;
        for (level, w) in self.outer.mapped(0.0, 1.0) {
            let (lo, hi) = a.endpoints_at(level);
            let kernel = match self.kind {
                OperatorKind::T1 => {
                    let gl = g(lo);
                    let gh = g(hi);
                    if !(gl.is_finite() && gh.is_finite()) {
                        return Err(Error::NonFinite(format!(
                            "integrand at level {level} on [{lo}, {hi}]"
                        )));
                    }
                    0.5 * (gl + gh)
                }
                OperatorKind::T2 => {
                    let width = hi - lo;
                    let mean = if width < DEGENERATE_WIDTH {
                        // continuous limit of the interval mean
                        g(lo)
                    } else {
                        self.inner.integrate(lo, hi, &g) / width
                    };
                    if !mean.is_finite() {
                        return Err(Error::NonFinite(format!(
                            "interval mean at level {level} on [{lo}, {hi}]"
                        )));
                    }
                    mean
                }
            };
            acc += w * kernel * self.weighting.eval(level);
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite("operator quadrature sum".into()));
        }
        Ok(acc)
    }

    /// Raw moment `T(A, x^k)`, `k >= 1`.
    pub fn moment(&self, a: &FuzzyNumber, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "moment order must be at least 1".into(),
            ));
        }
        self.geu(a, |x| x.powi(k as i32))
    }

    /// Expected value plus raw and central moments up to order four.
    pub fn central_moments(&self, a: &FuzzyNumber) -> Result<MomentSet> {
        let expected = self.geu(a, |x| x)?;
        let m2 = self.geu(a, |x| x * x)?;
        let m3 = self.geu(a, |x| x * x * x)?;
        let m4 = self.geu(a, |x| x * x * x * x)?;
        let variance = self.geu(a, |x| (x - expected).powi(2))?;
        let skewness = self.geu(a, |x| (x - expected).powi(3))?;
        let kurtosis = self.geu(a, |x| (x - expected).powi(4))?;
        Ok(MomentSet {
            expected_value: expected,
            variance,
            skewness,
            kurtosis,
            m2,
            m3,
            m4,
        })
    }

    /// Closed-form moments of a triangular fuzzy number. Only available
    /// for the endpoint-average rule under the `2g` weighting, which is
    /// where the closed forms hold.
    pub fn triangular_closed_moments(&self, peak: f64, left: f64, right: f64) -> Result<MomentSet> {
        if self.kind != OperatorKind::T1 {
            return Err(Error::UnsupportedConfiguration(format!(
                "triangular closed forms hold for the endpoint-average rule only, not {}",
                self.kind
            )));
        }
        if !self.weighting.is_default_2gamma() {
            return Err(Error::UnsupportedConfiguration(
                "triangular closed forms hold for the 2g weighting only".into(),
            ));
        }
        if left < 0.0 || right < 0.0 {
            return Err(Error::InvalidParameter(
                "triangular spreads must be non-negative".into(),
            ));
        }
        Ok(triangular_moments_t1(peak, left, right))
    }

    /// Residual of the derivative-exchange property at `lambda0`:
    /// `|T(A, dg/dl) - d/dl T(A, g(., l))|`, the derivative on the right
    /// estimated by a centered difference with step `h`.
    pub fn check_d_property<G, D>(
        &self,
        a: &FuzzyNumber,
        g: G,
        dg_dlambda: D,
        lambda0: f64,
        h: f64,
    ) -> Result<f64>
    where
        G: Fn(f64, f64) -> f64,
        D: Fn(f64, f64) -> f64,
    {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let lhs = self.geu(a, |x| dg_dlambda(x, lambda0))?;
        let plus = self.geu(a, |x| g(x, lambda0 + h))?;
        let minus = self.geu(a, |x| g(x, lambda0 - h))?;
        let rhs = (plus - minus) / (2.0 * h);
        Ok((lhs - rhs).abs())
    }
}

/// Weighted expected value: the midpoint of each level set, weighted over
/// levels. Shared by both operator kinds.
pub fn expected_value(weighting: &WeightingFunction, a: &FuzzyNumber) -> f64 {
    quad::default_rule().integrate(0.0, 1.0, |level| {
        let (lo, hi) = a.endpoints_at(level);
        0.5 * (lo + hi) * weighting.eval(level)
    })
}

/// Expected value plus second-to-fourth moments, raw and central.
///
/// Serializes flat for report output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub expected_value: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl MomentSet {
    /// Largest absolute difference across all seven entries.
    pub fn max_abs_diff(&self, other: &MomentSet) -> f64 {
        [
            self.expected_value - other.expected_value,
            self.variance - other.variance,
            self.skewness - other.skewness,
            self.kurtosis - other.kurtosis,
            self.m2 - other.m2,
            self.m3 - other.m3,
            self.m4 - other.m4,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

/// Closed forms for a triangular number under the endpoint-average rule
/// with the 2g weighting. Central moments depend on the spreads only;
/// raw moments follow by binomial shift with the expected value.
fn triangular_moments_t1(peak: f64, left: f64, right: f64) -> MomentSet {
    let (al, be) = (left, right);
    let expected = peak + (be - al) / 6.0;
    let variance = (al * al + be * be + al * be) / 18.0;
    // third central moment; cubic in the spreads
    let skewness = 19.0 * (be.powi(3) - al.powi(3)) / 1080.0 + al * be * (be - al) / 72.0;
    let kurtosis = be * be * al * al / 72.0
        + 5.0 * (al.powi(4) + be.powi(4)) / 432.0
        + 2.0 * al * be * (al * al + be * be) / 135.0;
    let e = expected;
    MomentSet {
        expected_value: expected,
        variance,
        skewness,
        kurtosis,
        m2: variance + e * e,
        m3: skewness + 3.0 * e * variance + e.powi(3),
        m4: kurtosis + 4.0 * e * skewness + 6.0 * e * e * variance + e.powi(4),
    }
}
