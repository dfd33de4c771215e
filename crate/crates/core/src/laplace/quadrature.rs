//! Adaptive Gauss-Legendre quadrature on finite intervals at working precision.

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::precision::WorkingPrecision;

/// High-order rule on each panel; the half-order rule supplies the error estimate.
pub const HIGH_ORDER: usize = 20;
pub const LOW_ORDER: usize = HIGH_ORDER / 2;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the classical cosine guesses.
    pub fn new(n: usize, prec: WorkingPrecision) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be >= 1");
        let eps = prec.epsilon() * 10u32;
        let pi = prec.float(Constant::Pi);
        let mut nodes = vec![prec.zero(); n];
        let mut weights = vec![prec.zero(); n];
        for i in 0..n.div_ceil(2) {
            let guess = prec.float(&pi * (4 * i as u64 + 3)) / (4 * n as u64 + 2);
            let mut x = guess.cos();
            let mut deriv = prec.zero();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, &x, prec);
                let step = p / &d;
                x -= &step;
                deriv = d;
                if step.abs() < eps {
                    let (_, d) = legendre_with_derivative(n, &x, prec);
                    deriv = d;
                    break;
                }
            }
            // w = 2 / ((1 - x^2) P_n'(x)^2)
            let one_minus = 1u32 - prec.float(x.square_ref());
            let w = prec.float(2) / (one_minus * deriv.square());
            nodes[i] = x.clone();
            nodes[n - 1 - i] = -x;
            weights[i] = w.clone();
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Float] {
        &self.weights
    }

    /// `int_a^b f` with this rule.
    pub fn apply<F>(&self, f: &F, a: &Float, b: &Float, prec: WorkingPrecision) -> Result<Float>
    where
        F: Fn(&Float) -> Result<Float> + ?Sized,
    {
        let half = prec.float(b - a) / 2u32;
        let mid = prec.float(a + b) / 2u32;
        let mut acc = prec.zero();
        let mut x = prec.zero();
        for (node, weight) in self.nodes.iter().zip(&self.weights) {
            x.assign(node * &half);
            x += &mid;
            acc += f(&x)? * weight;
        }
        Ok(acc * half)
    }
}

fn legendre_with_derivative(n: usize, x: &Float, prec: WorkingPrecision) -> (Float, Float) {
    let mut p_prev = prec.one();
    let mut p = prec.float(x);
    for k in 2..=n as u64 {
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let next = (prec.float(x * &p) * (2 * k - 1) - prec.float(&p_prev * (k - 1))) / k;
        p_prev = std::mem::replace(&mut p, next);
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let denom = prec.float(x.square_ref()) - 1u32;
    let d = (prec.float(x * &p) - &p_prev) * n as u64 / denom;
    (p, d)
}

#[derive(Debug, Clone)]
pub(crate) struct Panel {
    pub a: Float,
    pub b: Float,
    pub value: Float,
    pub error: Float,
}

/// A pair of rules sharing one evaluation budget.
pub(crate) struct PanelRule {
    high: GaussLegendre,
    low: GaussLegendre,
}

impl PanelRule {
    pub fn new(prec: WorkingPrecision) -> Self {
        PanelRule {
            high: GaussLegendre::new(HIGH_ORDER, prec),
            low: GaussLegendre::new(LOW_ORDER, prec),
        }
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.high.order() + self.low.order()
    }

    pub fn panel<F>(&self, f: &F, a: Float, b: Float, prec: WorkingPrecision) -> Result<Panel>
    where
        F: Fn(&Float) -> Result<Float> + ?Sized,
    {
        let value = self.high.apply(f, &a, &b, prec)?;
        let coarse = self.low.apply(f, &a, &b, prec)?;
        let error = prec.float(&value - &coarse).abs();
        Ok(Panel { a, b, value, error })
    }

    /// Evaluates panels in parallel; output order matches input order.
    pub fn panels<F>(&self, f: &F, bounds: Vec<(Float, Float)>, prec: WorkingPrecision) -> Result<Vec<Panel>>
    where
        F: Fn(&Float) -> Result<Float> + Sync + ?Sized,
    {
        bounds
            .into_par_iter()
            .map(|(a, b)| self.panel(f, a, b, prec))
            .collect()
    }
}

/// Panels covering an interval, kept sorted by left endpoint.
pub(crate) struct PanelSet {
    pub panels: Vec<Panel>,
    pub nodes_used: usize,
}

impl PanelSet {
    pub fn new() -> Self {
        PanelSet { panels: Vec::new(), nodes_used: 0 }
    }

    /// Sum of panel values in left-to-right order.
    pub fn value(&self, prec: WorkingPrecision) -> Float {
        let mut acc = prec.zero();
        for p in &self.panels {
            acc += &p.value;
        }
        acc
    }

    pub fn error(&self, prec: WorkingPrecision) -> Float {
        let mut acc = prec.zero();
        for p in &self.panels {
            acc += &p.error;
        }
        acc
    }

    /// Appends `[a, b]` cut into `pieces` equal panels.
    pub fn extend<F>(
        &mut self,
        rule: &PanelRule,
        f: &F,
        a: &Float,
        b: &Float,
        pieces: usize,
        prec: WorkingPrecision,
    ) -> Result<()>
    where
        F: Fn(&Float) -> Result<Float> + Sync + ?Sized,
    {
        let width = prec.float(b - a) / pieces as u64;
        let bounds = (0..pieces)
            .map(|i| {
                let lo = prec.float(&width * i as u64) + a;
                let hi = if i + 1 == pieces { prec.float(b) } else { prec.float(&width * (i as u64 + 1)) + a };
                (lo, hi)
            })
            .collect();
        self.panels.extend(rule.panels(f, bounds, prec)?);
        self.nodes_used += pieces * rule.nodes_per_panel();
        Ok(())
    }

    /// Bisects panels until the summed error is at most `target(value)`.
    pub fn refine<F, T>(
        &mut self,
        rule: &PanelRule,
        f: &F,
        target: T,
        node_budget: usize,
        prec: WorkingPrecision,
    ) -> Result<()>
    where
        F: Fn(&Float) -> Result<Float> + Sync + ?Sized,
        T: Fn(&Float) -> Float,
    {
        loop {
            let goal = target(&self.value(prec));
            if self.error(prec) <= goal {
                return Ok(());
            }
            let share = goal / self.panels.len() as u64;
            let mut bounds = Vec::new();
            let mut kept = Vec::with_capacity(self.panels.len());
            for p in self.panels.drain(..) {
                if p.error > share {
                    let mid = prec.float(&p.a + &p.b) / 2u32;
                    bounds.push((p.a, mid.clone()));
                    bounds.push((mid, p.b));
                } else {
                    kept.push(p);
                }
            }
            self.nodes_used += bounds.len() * rule.nodes_per_panel();
            if self.nodes_used > node_budget {
                return Err(Error::numeric(
                    "laplace_transform",
                    format!("node budget {node_budget} exhausted before reaching tolerance"),
                ));
            }
            kept.extend(rule.panels(f, bounds, prec)?);
            kept.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite endpoints"));
            self.panels = kept;
        }
    }
}
