//! Fuzzy numbers as level-set families, plus weighting functions.
//!
//! A fuzzy number is handled entirely through its level sets
//! `[a1(g), a2(g)]` for membership levels `g` in [0, 1]: triangular
//! numbers in closed form, everything else tabulated on a level grid with
//! linear interpolation between nodes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

/// Width below which a level interval is treated as a single point.
pub const DEGENERATE_WIDTH: f64 = 1e-12;

/// Default grid size when sampling endpoint functions.
pub const DEFAULT_GRID: usize = 257;

/// One level set `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelInterval {
    pub lower: f64,
    pub upper: f64,
}

impl LevelInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "level interval endpoints must be finite, got [{lower}, {upper}]"
            )));
        }
        if lower > upper {
            return Err(Error::InvalidParameter(format!(
                "level interval lower {lower} exceeds upper {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, other: &LevelInterval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// Endpoints tabulated on an increasing level grid over [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    levels: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Tabulated {
    fn endpoints(&self, level: f64) -> (f64, f64) {
        // binary search for the bracketing grid cell, then interpolate
        let n = self.levels.len();
        if level <= self.levels[0] {
            return (self.lower[0], self.upper[0]);
        }
        if level >= self.levels[n - 1] {
            return (self.lower[n - 1], self.upper[n - 1]);
        }
        let mut hi = match self
            .levels
            .binary_search_by(|probe| probe.partial_cmp(&level).expect("finite levels"))
        {
            Ok(i) => return (self.lower[i], self.upper[i]),
            Err(i) => i,
        };
        if hi == 0 {
            hi = 1;
        }
        let lo = hi - 1;
        let t = (level - self.levels[lo]) / (self.levels[hi] - self.levels[lo]);
        (
            self.lower[lo] + t * (self.lower[hi] - self.lower[lo]),
            self.upper[lo] + t * (self.upper[hi] - self.upper[lo]),
        )
    }
}

/// A fuzzy number, represented by its level-set endpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum FuzzyNumber {
    /// Peak `a` with left spread `alpha` and right spread `beta`:
    /// `a1(g) = a - (1-g) alpha`, `a2(g) = a + (1-g) beta`.
    Triangular { peak: f64, left: f64, right: f64 },
    /// Tabulated endpoints with linear interpolation.
    Tabulated(Tabulated),
}

impl FuzzyNumber {
    /// Triangular fuzzy number with the given peak and non-negative spreads.
    pub fn triangular(peak: f64, left: f64, right: f64) -> Result<Self> {
        if !(peak.is_finite() && left.is_finite() && right.is_finite()) {
            return Err(Error::InvalidParameter(
                "triangular parameters must be finite".into(),
            ));
        }
        if left < 0.0 || right < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "triangular spreads must be non-negative, got left {left}, right {right}"
            )));
        }
        Ok(Self::Triangular { peak, left, right })
    }

    /// A crisp value: both spreads zero.
    pub fn crisp(value: f64) -> Result<Self> {
        Self::triangular(value, 0.0, 0.0)
    }

    /// Builds a tabulated fuzzy number from parallel arrays of levels and
    /// endpoints. The grid must start at 0, end at 1, increase strictly,
    /// and describe nested intervals.
    pub fn tabulated(levels: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = levels.len();
        if n < 2 || lower.len() != n || upper.len() != n {
            return Err(Error::InvalidParameter(format!(
                "tabulated arrays need equal length >= 2, got {} / {} / {}",
                n,
                lower.len(),
                upper.len()
            )));
        }
        for (&g, (&lo, &hi)) in levels.iter().zip(lower.iter().zip(upper.iter())) {
            if !(g.is_finite() && lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidParameter(
                    "tabulated entries must be finite".into(),
                ));
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "tabulated interval at level {g} has lower {lo} > upper {hi}"
                )));
            }
        }
        if levels[0] != 0.0 || levels[n - 1] != 1.0 {
            return Err(Error::InvalidParameter(
                "tabulated levels must start at 0 and end at 1".into(),
            ));
        }
        for i in 1..n {
            if levels[i] <= levels[i - 1] {
                return Err(Error::InvalidParameter(
                    "tabulated levels must increase strictly".into(),
                ));
            }
            // nesting: lower non-decreasing, upper non-increasing
            if lower[i] < lower[i - 1] - 1e-12 || upper[i] > upper[i - 1] + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "tabulated level sets are not nested at level {}",
                    levels[i]
                )));
            }
        }
        Ok(Self::Tabulated(Tabulated {
            levels,
            lower,
            upper,
        }))
    }

    /// Samples endpoint functions on a uniform grid of the given size.
    pub fn from_endpoint_fns<F>(endpoints: F, grid_size: usize) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64),
    {
        if grid_size < 2 {
            return Err(Error::InvalidParameter(
                "endpoint sampling needs a grid of at least 2".into(),
            ));
        }
        let mut levels = Vec::with_capacity(grid_size);
        let mut lower = Vec::with_capacity(grid_size);
        let mut upper = Vec::with_capacity(grid_size);
        for i in 0..grid_size {
            let g = i as f64 / (grid_size - 1) as f64;
            let (lo, hi) = endpoints(g);
            levels.push(g);
            lower.push(lo);
            upper.push(hi);
        }
        // exact grid ends
        levels[0] = 0.0;
        levels[grid_size - 1] = 1.0;
        Self::tabulated(levels, lower, upper)
    }

    /// Level-set endpoints without the range check; `level` must already
    /// lie in [0, 1]. Quadrature loops use this.
    pub(crate) fn endpoints_at(&self, level: f64) -> (f64, f64) {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&level));
        match self {
            Self::Triangular { peak, left, right } => {
                let t = 1.0 - level;
                (peak - t * left, peak + t * right)
            }
            Self::Tabulated(tab) => tab.endpoints(level),
        }
    }

    /// The level set at the given membership level.
    pub fn level_set(&self, level: f64) -> Result<LevelInterval> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::LevelOutOfRange(level));
        }
        let (lower, upper) = self.endpoints_at(level);
        Ok(LevelInterval { lower, upper })
    }

    /// Support endpoints (the level-0 interval).
    pub fn support(&self) -> (f64, f64) {
        self.endpoints_at(0.0)
    }

    /// Translates every level set by `c`; triangular kind is preserved.
    pub fn shift(&self, c: f64) -> Self {
        match self {
            Self::Triangular { peak, left, right } => Self::Triangular {
                peak: peak + c,
                left: *left,
                right: *right,
            },
            Self::Tabulated(tab) => Self::Tabulated(Tabulated {
                levels: tab.levels.clone(),
                lower: tab.lower.iter().map(|v| v + c).collect(),
                upper: tab.upper.iter().map(|v| v + c).collect(),
            }),
        }
    }

    /// Scales every level set by a positive factor.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {c}"
            )));
        }
        Ok(match self {
            Self::Triangular { peak, left, right } => Self::Triangular {
                peak: peak * c,
                left: left * c,
                right: right * c,
            },
            Self::Tabulated(tab) => Self::Tabulated(Tabulated {
                levels: tab.levels.clone(),
                lower: tab.lower.iter().map(|v| v * c).collect(),
                upper: tab.upper.iter().map(|v| v * c).collect(),
            }),
        })
    }

    /// Triangular parameters `(peak, left, right)` when applicable.
    pub fn as_triangular(&self) -> Option<(f64, f64, f64)> {
        match self {
            Self::Triangular { peak, left, right } => Some((*peak, *left, *right)),
            Self::Tabulated(_) => None,
        }
    }
}

/// How a weighting function was built; drives closed-form gating and
/// serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightingDescriptor {
    /// f(g) = 2g, the default in every worked setting here.
    Default2Gamma,
    /// f(g) = 1.
    Uniform,
    /// f(g) = slope * g. Only slope 2 has unit integral.
    Linear {
        slope: f64,
    },
    /// f(g) = (exponent + 1) * g^exponent, normalized by construction.
    Power {
        exponent: f64,
    },
    Custom,
}

/// Non-negative increasing weight over membership levels, expected to
/// integrate to 1.
#[derive(Clone)]
pub struct WeightingFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    descriptor: WeightingDescriptor,
}

impl std::fmt::Debug for WeightingFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightingFunction")
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl Default for WeightingFunction {
    fn default() -> Self {
        Self::default_2gamma()
    }
}

impl WeightingFunction {
    pub fn default_2gamma() -> Self {
        Self {
            eval: Arc::new(|g| 2.0 * g),
            descriptor: WeightingDescriptor::Default2Gamma,
        }
    }

    pub fn uniform() -> Self {
        Self {
            eval: Arc::new(|_| 1.0),
            descriptor: WeightingDescriptor::Uniform,
        }
    }

    /// f(g) = slope * g. Not validated here; `validate` reports whether the
    /// slope yields a unit integral.
    pub fn linear(slope: f64) -> Self {
        Self {
            eval: Arc::new(move |g| slope * g),
            descriptor: WeightingDescriptor::Linear { slope },
        }
    }

    /// Normalized power weighting f(g) = (q+1) g^q for q >= 0.
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "power weighting exponent must be >= 0, got {exponent}"
            )));
        }
        Ok(Self {
            eval: Arc::new(move |g| (exponent + 1.0) * g.powf(exponent)),
            descriptor: WeightingDescriptor::Power { exponent },
        })
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            descriptor: WeightingDescriptor::Custom,
        }
    }

    pub fn eval(&self, level: f64) -> f64 {
        (self.eval)(level)
    }

    pub fn descriptor(&self) -> &WeightingDescriptor {
        &self.descriptor
    }

    /// True for the f(g) = 2g weighting (by descriptor or by slope).
    pub fn is_default_2gamma(&self) -> bool {
        match self.descriptor {
            WeightingDescriptor::Default2Gamma => true,
            WeightingDescriptor::Linear { slope } => slope == 2.0,
            WeightingDescriptor::Power { exponent } => exponent == 1.0,
            _ => false,
        }
    }

    /// Checks non-negativity and monotonicity on a uniform grid and the
    /// unit integral by quadrature. Failures land in the report rather
    /// than an error.
    pub fn validate(&self, grid_size: usize) -> Result<WeightingReport> {
        if grid_size < 2 {
            return Err(Error::InvalidParameter(
                "weighting validation needs a grid of at least 2".into(),
            ));
        }
        let mut negative = Vec::new();
        let mut decreasing = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..grid_size {
            let g = i as f64 / (grid_size - 1) as f64;
            let v = self.eval(g);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("weighting at level {g} is {v}")));
            }
            if v < 0.0 {
                negative.push((g, v));
            }
            // ignore sub-noise decreases
            if v < prev - 1e-12 {
                decreasing.push((g, v - prev));
            }
            prev = v;
        }
        let integral = quad::default_rule().integrate(0.0, 1.0, |g| self.eval(g));
        Ok(WeightingReport {
            grid_size,
            negative,
            decreasing,
            integral,
        })
    }
}

/// Tolerance on the unit-integral check.
pub const WEIGHTING_INTEGRAL_TOL: f64 = 1e-8;

/// Outcome of `WeightingFunction::validate`.
#[derive(Debug, Clone)]
pub struct WeightingReport {
    pub grid_size: usize,
    /// (level, value) pairs where the weighting is negative.
    pub negative: Vec<(f64, f64)>,
    /// (level, drop) pairs where the weighting decreases beyond noise.
    pub decreasing: Vec<(f64, f64)>,
    /// Quadrature value of the integral over [0, 1].
    pub integral: f64,
}

impl WeightingReport {
    pub fn integral_ok(&self) -> bool {
        (self.integral - 1.0).abs() <= WEIGHTING_INTEGRAL_TOL
    }

    pub fn is_valid(&self) -> bool {
        self.negative.is_empty() && self.decreasing.is_empty() && self.integral_ok()
    }
}
