//! Closed-form expected revenue of every strategy family.
//!
//! A buyer with total perceived influence `M` accepts an offer of price
//! `(1 - p) M` with probability `p`, so the expected payment is
//! `p (1 - p) M`. All strategies here are described by such pricing
//! probabilities `p in [1/2, 1]`; `p = 1` gives the product away.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::netmodel::SocialNetwork;
use crate::numeric::stable_sum;

/// Tolerance for `sum q_k = 1`.
pub const SIMPLEX_TOL: f64 = 1e-9;

fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(validation(format!("{what} {p} outside [1/2, 1]")));
    }
    Ok(())
}

fn check_exploit_probability(p: f64) -> Result<()> {
    if !(0.5..1.0).contains(&p) {
        return Err(validation(format!(
            "exploit pricing probability {p} outside [1/2, 1)"
        )));
    }
    Ok(())
}

fn check_dimension(g: &SocialNetwork, got: usize) -> Result<()> {
    if got != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got,
        });
    }
    Ok(())
}

/// Approach order plus per-buyer pricing probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketingStrategy {
    /// Buyers in the order they are approached.
    pub order: Vec<usize>,
    /// Pricing probability of each buyer, indexed by buyer.
    pub prices: Vec<f64>,
}

impl MarketingStrategy {
    pub fn new(order: Vec<usize>, prices: Vec<f64>) -> Result<Self> {
        let s = MarketingStrategy { order, prices };
        s.validate()?;
        Ok(s)
    }

    /// Buyers approached in index order.
    pub fn in_index_order(prices: Vec<f64>) -> Result<Self> {
        Self::new((0..prices.len()).collect(), prices)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.prices.len();
        if self.order.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.order.len(),
            });
        }
        let mut seen = vec![false; n];
        for &b in &self.order {
            if b >= n || std::mem::replace(&mut seen[b], true) {
                return Err(validation(format!("order is not a permutation of 0..{n}")));
            }
        }
        for &p in &self.prices {
            check_probability(p, "pricing probability")?;
        }
        Ok(())
    }

    /// `position[b]` is the step at which buyer `b` is approached.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (k, &b) in self.order.iter().enumerate() {
            pos[b] = k;
        }
        pos
    }
}

/// Influence-and-exploit: the influence set gets the product for free, the
/// rest are approached in random order at pricing probability `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IeStrategy {
    pub influence_set: Vec<usize>,
    pub p: f64,
}

impl IeStrategy {
    pub fn new(mut influence_set: Vec<usize>, p: f64) -> Result<Self> {
        check_exploit_probability(p)?;
        influence_set.sort_unstable();
        influence_set.dedup();
        Ok(IeStrategy { influence_set, p })
    }

    pub fn from_mask(mask: &[bool], p: f64) -> Result<Self> {
        Self::new(
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| i)
                .collect(),
            p,
        )
    }

    pub fn mask(&self, n: usize) -> Result<Vec<bool>> {
        let mut m = vec![false; n];
        for &i in &self.influence_set {
            if i >= n {
                return Err(validation(format!(
                    "influence-set buyer {i} out of range for n = {n}"
                )));
            }
            m[i] = true;
        }
        Ok(m)
    }
}

/// Generalized IE with `K` pricing classes. Class `k` (0-based) has pricing
/// probability `1 - k / (2 (K - 1))`; each buyer joins class `k`
/// independently with probability `q[k]` and classes are approached in
/// order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedIeStrategy {
    #[serde(rename = "K")]
    pub classes: usize,
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl GeneralizedIeStrategy {
    pub fn new(q: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        let s = GeneralizedIeStrategy {
            classes: q.len(),
            q,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(validation(format!(
                "need at least 2 pricing classes, got {}",
                self.classes
            )));
        }
        if self.q.len() != self.classes {
            return Err(Error::Dimension {
                expected: self.classes,
                got: self.q.len(),
            });
        }
        if self.q.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(validation("assignment probabilities must be non-negative"));
        }
        let total: f64 = self.q.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(validation(format!(
                "assignment probabilities sum to {total}, not 1"
            )));
        }
        Ok(())
    }

    pub fn prices(&self) -> Vec<f64> {
        class_prices(self.classes)
    }
}

/// Pricing probability of each of `k` classes: `1, ..., 1/2` evenly spaced.
pub fn class_prices(k: usize) -> Vec<f64> {
    assert!(k >= 2, "need at least two classes");
    (0..k)
        .map(|c| 1.0 - c as f64 / (2.0 * (k - 1) as f64))
        .collect()
}

/// Any strategy family, as read from a JSON strategy file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strategy {
    Marketing(MarketingStrategy),
    Ie(IeStrategy),
    Generalized(GeneralizedIeStrategy),
}

impl Strategy {
    pub fn family(&self) -> &'static str {
        match self {
            Strategy::Marketing(_) => "marketing",
            Strategy::Ie(_) => "ie",
            Strategy::Generalized(_) => "generalized_ie",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Strategy::Marketing(s) => s.validate(),
            Strategy::Ie(s) => check_exploit_probability(s.p),
            Strategy::Generalized(s) => s.validate(),
        }
    }

    /// Exact expected revenue of the strategy on `g`.
    pub fn expected_revenue(&self, g: &SocialNetwork) -> Result<f64> {
        match self {
            Strategy::Marketing(s) => strategy_revenue(g, s),
            Strategy::Ie(s) => ie_revenue(g, s),
            Strategy::Generalized(s) => generalized_ie_revenue(g, s),
        }
    }
}

/// Expected revenue of `(order, prices)`:
/// `sum_i p_i (1 - p_i) (w_ii + sum_{j before i} p_j w_ji)`.
pub fn strategy_revenue(g: &SocialNetwork, s: &MarketingStrategy) -> Result<f64> {
    check_dimension(g, s.prices.len())?;
    s.validate()?;
    let pos = s.positions();
    let p = &s.prices;
    let mut terms = Vec::with_capacity(g.n() + 2 * g.edges().len());
    for (i, &w) in g.self_weights().iter().enumerate() {
        terms.push(p[i] * (1.0 - p[i]) * w);
    }
    g.for_each_influence(|j, i, w| {
        if pos[j] < pos[i] {
            terms.push(p[i] * (1.0 - p[i]) * p[j] * w);
        }
    });
    Ok(stable_sum(&terms))
}

/// Expected revenue of `IE(A, p)` over the random exploit order.
pub fn ie_revenue(g: &SocialNetwork, s: &IeStrategy) -> Result<f64> {
    check_exploit_probability(s.p)?;
    let in_a = s.mask(g.n())?;
    Ok(ie_revenue_mask(g, &in_a, s.p))
}

/// [`ie_revenue`] on a membership mask; no validation.
pub(crate) fn ie_revenue_mask(g: &SocialNetwork, in_a: &[bool], p: f64) -> f64 {
    let c = p * (1.0 - p);
    let mut terms = Vec::with_capacity(g.n() + 2 * g.edges().len());
    for (i, &w) in g.self_weights().iter().enumerate() {
        if !in_a[i] {
            terms.push(c * w);
        }
    }
    g.for_each_influence(|j, i, w| {
        if !in_a[i] {
            terms.push(if in_a[j] { c * w } else { c * p * w / 2.0 });
        }
    });
    stable_sum(&terms)
}

/// Expected revenue of `IE(A, p)` when each buyer `i` joins `A`
/// independently with probability `inclusion[i]`.
pub fn expected_ie_revenue(g: &SocialNetwork, inclusion: &[f64], p: f64) -> Result<f64> {
    check_dimension(g, inclusion.len())?;
    check_exploit_probability(p)?;
    if inclusion.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(validation("inclusion probabilities must lie in [0, 1]"));
    }
    let c = p * (1.0 - p);
    let mut terms = Vec::with_capacity(g.n() + 2 * g.edges().len());
    for (i, &w) in g.self_weights().iter().enumerate() {
        terms.push(c * (1.0 - inclusion[i]) * w);
    }
    g.for_each_influence(|j, i, w| {
        let (ij, ei, ej) = (inclusion[j], 1.0 - inclusion[i], 1.0 - inclusion[j]);
        terms.push(c * w * (ij * ei + 0.5 * p * ej * ei));
    });
    Ok(stable_sum(&terms))
}

/// Expected revenue of `IE(q, p)`: every buyer joins the influence set
/// independently with probability `q`.
pub fn random_ie_revenue(g: &SocialNetwork, q: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(validation(format!(
            "inclusion probability {q} outside [0, 1]"
        )));
    }
    check_exploit_probability(p)?;
    let (w, n) = (g.total_edge_weight(), g.total_self_weight());
    let c = (1.0 - q) * p * (1.0 - p);
    let edge_factor = if g.is_directed() {
        q + p * (1.0 - q) / 2.0
    } else {
        2.0 * q + p * (1.0 - q)
    };
    Ok(c * (n + edge_factor * w))
}

/// Per-unit coefficients of generalized IE: expected revenue is
/// `self_coef * N + edge_coef * W`.
pub fn generalized_coefficients(q: &[f64], directed: bool) -> (f64, f64) {
    let prices = class_prices(q.len());
    let mut self_coef = 0.0;
    let mut edge_coef = 0.0;
    let mut earlier = 0.0; // sum over earlier classes of q_l p_l
    for (&qk, &pk) in q.iter().zip(&prices) {
        let base = qk * pk * (1.0 - pk);
        self_coef += base;
        edge_coef += if directed {
            base * (qk * pk / 2.0 + earlier)
        } else {
            base * (qk * pk + 2.0 * earlier)
        };
        earlier += qk * pk;
    }
    (self_coef, edge_coef)
}

pub fn generalized_ie_revenue(g: &SocialNetwork, s: &GeneralizedIeStrategy) -> Result<f64> {
    s.validate()?;
    let (self_coef, edge_coef) = generalized_coefficients(&s.q, g.is_directed());
    Ok(self_coef * g.total_self_weight() + edge_coef * g.total_edge_weight())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevenueBounds {
    /// `R* = (W + N) / 4`.
    pub upper: f64,
    /// Revenue of myopic pricing in any order (undirected) or in random
    /// order (directed).
    pub myopic_lower: f64,
}

pub fn revenue_bounds(g: &SocialNetwork) -> RevenueBounds {
    let (w, n) = (g.total_edge_weight(), g.total_self_weight());
    let myopic_lower = if g.is_directed() {
        (w + 4.0 * n) / 16.0
    } else {
        (w + 2.0 * n) / 8.0
    };
    RevenueBounds {
        upper: (w + n) / 4.0,
        myopic_lower,
    }
}

/// Revenue-maximizing order for fixed prices on an undirected network:
/// non-increasing pricing probability, ties by buyer index.
pub fn best_ordering_for_prices(g: &SocialNetwork, prices: &[f64]) -> Result<MarketingStrategy> {
    if g.is_directed() {
        return Err(Error::Unsupported(
            "optimal ordering for directed networks is a maximum acyclic subgraph problem".into(),
        ));
    }
    check_dimension(g, prices.len())?;
    let mut order: Vec<usize> = (0..prices.len()).collect();
    order.sort_by(|&a, &b| prices[b].total_cmp(&prices[a]));
    MarketingStrategy::new(order, prices.to_vec())
}

/// Revenue of `prices` under the best ordering of an undirected network:
/// each edge `{i, j}` yields `w_ij p_i p_j (1 - min(p_i, p_j))`.
pub fn sorted_order_revenue(g: &SocialNetwork, prices: &[f64]) -> f64 {
    debug_assert!(!g.is_directed());
    let self_part: f64 = g
        .self_weights()
        .iter()
        .zip(prices)
        .map(|(&w, &p)| w * p * (1.0 - p))
        .sum();
    let edge_part: f64 = g
        .edges()
        .iter()
        .map(|e| {
            let (pi, pj) = (prices[e.from], prices[e.to]);
            e.weight * pi * pj * (1.0 - pi.min(pj))
        })
        .sum();
    self_part + edge_part
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MyopicOffer {
    pub price: f64,
    pub acceptance_probability: f64,
    pub expected_revenue: f64,
}

/// The revenue-maximizing stand-alone offer to a buyer with influence `m`.
pub fn myopic_price(m: f64) -> Result<MyopicOffer> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(validation(format!(
            "total influence {m} must be non-negative"
        )));
    }
    Ok(MyopicOffer {
        price: m / 2.0,
        acceptance_probability: 0.5,
        expected_revenue: m / 4.0,
    })
}

/// Price accepted with probability `p` by a buyer with influence `m`.
pub fn price_for_probability(m: f64, p: f64) -> Result<MyopicOffer> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(validation(format!(
            "total influence {m} must be non-negative"
        )));
    }
    check_probability(p, "pricing probability")?;
    Ok(MyopicOffer {
        price: (1.0 - p) * m,
        acceptance_probability: p,
        expected_revenue: p * (1.0 - p) * m,
    })
}
