//! JSON document schemas for fuzzy numbers, utilities, weightings and
//! whole portfolio models, plus the parse entry points the CLI and the
//! fuzz targets go through.
//!
//! Schemas:
//!
//! ```json
//! {"kind": "triangular", "a": 2.0, "alpha": 1.0, "beta": 4.0}
//! {"kind": "tabulated", "gamma": [0.0, 0.5, 1.0], "a1": [-2, -1, 0], "a2": [2, 1, 0]}
//! {"family": "crra", "a": 0.5}
//! {"family": "hara", "zeta": 1.0, "delta": 1.0, "gamma": 0.5}
//! ```
//!
//! A model document bundles everything one run needs:
//!
//! ```json
//! {
//!   "w0": 100.0, "r": 0.0, "k": 0.1, "mu": 1.0,
//!   "risk": {"kind": "triangular", "a": 0.0, "alpha": 2.0, "beta": 2.0},
//!   "utility": {"family": "crra", "a": 0.5},
//!   "operator": {"kind": "t1", "outer_nodes": 64, "inner_nodes": 32},
//!   "weighting": {"kind": "default_2gamma"}
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::allocation::PortfolioModel;
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyNumber, WeightingFunction};
use crate::operators::{EuOperator, OperatorKind, DEFAULT_INNER_NODES, DEFAULT_OUTER_NODES};
use crate::utility::UtilityModel;

/// Document form of a fuzzy number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FuzzyNumberDoc {
    Triangular {
        a: f64,
        alpha: f64,
        beta: f64,
    },
    Tabulated {
        gamma: Vec<f64>,
        a1: Vec<f64>,
        a2: Vec<f64>,
    },
}

impl FuzzyNumberDoc {
    pub fn build(&self) -> Result<FuzzyNumber> {
        match self {
            Self::Triangular { a, alpha, beta } => FuzzyNumber::triangular(*a, *alpha, *beta),
            Self::Tabulated { gamma, a1, a2 } => {
                FuzzyNumber::tabulated(gamma.clone(), a1.clone(), a2.clone())
            }
        }
    }

    pub fn from_fuzzy(a: &FuzzyNumber) -> Self {
        match a.as_triangular() {
            Some((peak, left, right)) => Self::Triangular {
                a: peak,
                alpha: left,
                beta: right,
            },
            None => {
                // reserialize through a dense sample of the level sets
                let n = 65;
                let mut gamma = Vec::with_capacity(n);
                let mut a1 = Vec::with_capacity(n);
                let mut a2 = Vec::with_capacity(n);
                for i in 0..n {
                    let g = i as f64 / (n - 1) as f64;
                    let ls = a.level_set(g).expect("level in range");
                    gamma.push(g);
                    a1.push(ls.lower);
                    a2.push(ls.upper);
                }
                Self::Tabulated { gamma, a1, a2 }
            }
        }
    }
}

/// Document form of a utility family. `custom_power` builds an unchecked
/// power utility and exists so verification runs can inject convex
/// functions on purpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilityDoc {
    Crra { a: f64 },
    Hara { zeta: f64, delta: f64, gamma: f64 },
    CustomPower { a: f64 },
}

impl UtilityDoc {
    pub fn build(&self) -> Result<UtilityModel> {
        match self {
            Self::Crra { a } => UtilityModel::crra(*a),
            Self::Hara { zeta, delta, gamma } => UtilityModel::hara(*zeta, *delta, *gamma),
            Self::CustomPower { a } => UtilityModel::power_unchecked(*a),
        }
    }
}

/// Document form of a weighting function.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightingDoc {
    #[default]
    #[serde(rename = "default_2gamma")]
    Default2Gamma,
    Uniform,
    Linear {
        slope: f64,
    },
    Power {
        exponent: f64,
    },
}

impl WeightingDoc {
    pub fn build(&self) -> Result<WeightingFunction> {
        Ok(match self {
            Self::Default2Gamma => WeightingFunction::default_2gamma(),
            Self::Uniform => WeightingFunction::uniform(),
            Self::Linear { slope } => {
                if !slope.is_finite() {
                    return Err(Error::Config("weighting slope must be finite".into()));
                }
                WeightingFunction::linear(*slope)
            }
            Self::Power { exponent } => WeightingFunction::power(*exponent)?,
        })
    }
}

/// Document form of an operator choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    #[serde(default = "OperatorDoc::default_kind")]
    pub kind: OperatorKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKindDoc {
    T1,
    T2,
}

impl Default for OperatorDoc {
    fn default() -> Self {
        Self {
            kind: OperatorKindDoc::T1,
            outer_nodes: None,
            inner_nodes: None,
        }
    }
}

impl OperatorDoc {
    fn default_kind() -> OperatorKindDoc {
        OperatorKindDoc::T1
    }

    pub fn build(
        &self,
        weighting: WeightingFunction,
        node_override: Option<usize>,
    ) -> Result<EuOperator> {
        let kind = match self.kind {
            OperatorKindDoc::T1 => OperatorKind::T1,
            OperatorKindDoc::T2 => OperatorKind::T2,
        };
        let outer = node_override
            .or(self.outer_nodes)
            .unwrap_or(DEFAULT_OUTER_NODES);
        let inner = node_override
            .or(self.inner_nodes)
            .unwrap_or(DEFAULT_INNER_NODES);
        EuOperator::new(kind, weighting, outer, inner)
    }
}

/// A full model document: portfolio parameters, risk, utility, operator
/// and weighting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub w0: f64,
    #[serde(default)]
    pub r: f64,
    pub k: f64,
    #[serde(default = "ModelDoc::default_mu")]
    pub mu: f64,
    pub risk: FuzzyNumberDoc,
    pub utility: UtilityDoc,
    #[serde(default)]
    pub operator: OperatorDoc,
    #[serde(default)]
    pub weighting: WeightingDoc,
}

impl ModelDoc {
    fn default_mu() -> f64 {
        1.0
    }

    /// Builds the model; `k_override` and `node_override` implement the
    /// flags-over-file precedence.
    pub fn build(
        &self,
        k_override: Option<f64>,
        node_override: Option<usize>,
    ) -> Result<PortfolioModel> {
        let weighting = self.weighting.build()?;
        let operator = self.operator.build(weighting, node_override)?;
        PortfolioModel::new(
            self.w0,
            self.r,
            k_override.unwrap_or(self.k),
            self.mu,
            self.risk.build()?,
            self.utility.build()?,
            operator,
        )
    }

    /// The weighting alone, for reporting when model construction fails.
    pub fn weighting_function(&self) -> Result<WeightingFunction> {
        self.weighting.build()
    }
}

fn config_error(what: &str, err: serde_json::Error) -> Error {
    Error::Config(format!(
        "{what}: {err} (line {}, column {})",
        err.line(),
        err.column()
    ))
}

/// Parses a fuzzy-number document.
pub fn parse_fuzzy_number(text: &str) -> Result<FuzzyNumberDoc> {
    serde_json::from_str(text).map_err(|e| config_error("fuzzy number document", e))
}

/// Parses a utility document.
pub fn parse_utility(text: &str) -> Result<UtilityDoc> {
    serde_json::from_str(text).map_err(|e| config_error("utility document", e))
}

/// Parses a weighting document.
pub fn parse_weighting(text: &str) -> Result<WeightingDoc> {
    serde_json::from_str(text).map_err(|e| config_error("weighting document", e))
}

/// Parses a full model document.
pub fn parse_model_document(text: &str) -> Result<ModelDoc> {
    serde_json::from_str(text).map_err(|e| config_error("model document", e))
}
