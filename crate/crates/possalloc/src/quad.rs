//! Gauss-Legendre quadrature.
//!
//! Nodes and weights are computed by Newton iteration on the Legendre
//! three-term recurrence. Interior nodes never touch the interval
//! endpoints, which matters when integrands are only defined on the open
//! interval.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// A fixed-order Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre P_n(x) and its derivative via the recurrence
/// (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let mut prev = 1.0;
    let mut cur = x;
    for j in 2..=n {
        let next = ((2 * j - 1) as f64 * x * cur - (j - 1) as f64 * prev) / j as f64;
        prev = cur;
        cur = next;
    }
    let deriv = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

impl GaussLegendre {
    /// Builds the rule of the given order (number of nodes, at least 1).
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        if order == 1 {
            return Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            };
        }
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let half = order.div_ceil(2);
        for i in 0..half {
            // Tricomi initial guess, then Newton.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..60 {
                let (p, d) = legendre(order, x);
                deriv = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            // Guesses start at the right end; store symmetric pairs.
            nodes[order - 1 - i] = x;
            nodes[i] = -x;
            weights[order - 1 - i] = w;
            weights[i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let scale = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(scale * x + mid);
        }
        scale * acc
    }

    /// Node/weight pairs mapped onto [a, b]; weights already carry the
    /// interval scale.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (scale * x + mid, scale * w))
    }
}

/// Shared 64-node rule for one-off integrals on [0, 1].
pub(crate) fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}
