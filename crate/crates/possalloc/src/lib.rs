//! Possibilistic standard portfolio choice.
//!
//! Risk is a fuzzy number handled through its level sets; expected
//! utilities are taken with an operator that is linear, monotone and
//! exchanges with parameter differentiation. On top of that the crate
//! computes generalized moments, risk-attitude indicators, the second-
//! and third-order approximations of the optimal risky allocation, and an
//! exact numerical solver that arbitrates the approximations.
//!
//! The pieces:
//!
//! * [`fuzzy`] — level-set fuzzy numbers, triangular closed forms,
//!   weighting functions and their validation;
//! * [`operators`] — the two evaluation rules, generalized moments,
//!   triangular closed-form moments, derivative-exchange checks;
//! * [`utility`] — CRRA / HARA / custom utilities with derivatives to
//!   order four, risk aversion, prudence, temperance and composite ratios;
//! * [`allocation`] — the portfolio model, the Taylor coefficient chain
//!   and the factor-term assembly;
//! * [`oracle`] — total utility, its derivatives, the bracketing
//!   first-order-condition solver and the polynomial condition;
//! * [`verify`] — a pass/fail battery over all of the above;
//! * [`config`] — JSON document schemas and parse entry points.
//!
//! ```
//! use possalloc::{EuOperator, FuzzyNumber, PortfolioModel, UtilityModel, WeightingFunction};
//! use possalloc::{solve_foc, FocSolverConfig};
//!
//! // symmetric centered risk, power utility, endpoint-average operator
//! let model = PortfolioModel::new(
//!     100.0,
//!     0.0,
//!     0.1,
//!     1.0,
//!     FuzzyNumber::triangular(0.0, 2.0, 2.0)?,
//!     UtilityModel::crra(0.5)?,
//!     EuOperator::t1(WeightingFunction::default_2gamma()),
//! )?;
//!
//! let order2 = model.allocation_order2()?;
//! assert!((order2 - 30.0).abs() < 1e-10);
//!
//! let exact = solve_foc(&model, &FocSolverConfig::default())?;
//! let order3 = model.allocation_order3()?;
//! assert!((order3 - exact.alpha_star).abs() < (order2 - exact.alpha_star).abs());
//! # Ok::<(), possalloc::Error>(())
//! ```

pub mod allocation;
pub mod config;
pub mod error;
pub mod fuzzy;
pub mod operators;
pub mod oracle;
pub mod quad;
pub mod utility;
pub mod verify;

pub use allocation::{AllocationResult, FactorTerms, PortfolioModel};
pub use error::{Error, Result};
pub use fuzzy::{FuzzyNumber, LevelInterval, WeightingFunction};
pub use operators::{expected_value, EuOperator, MomentSet, OperatorKind};
pub use oracle::{solve_foc, FocSolverConfig, OracleResult};
pub use utility::{IndicatorRatios, RiskIndicators, UtilityModel};
