//! Constructors for concrete strategies: IE baselines, tuned random IE,
//! bipartite IE, randomized rounding of pricing vectors and generalized IE.

mod generalized;
mod rounding;

pub use generalized::{
    eq10_value, eq11_value, generalized_ie, optimize_q, ratio_objective, sample_classes, GieMode,
    OptimizeOptions, PAPER_Q,
};
pub use rounding::{
    round_to_ie, round_to_ie_with, AlphaSchedule, RoundingOutcome, RoundingSchedule,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::netmodel::SocialNetwork;
use crate::revenue::{random_ie_revenue, IeStrategy};
use crate::rng;

/// `IE(empty, 2/3)`.
pub fn ie_baseline(_g: &SocialNetwork) -> IeStrategy {
    IeStrategy {
        influence_set: Vec::new(),
        p: 2.0 / 3.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunedIe {
    /// Inclusion probability of each buyer in the influence set.
    pub q: f64,
    pub p: f64,
    /// Closed-form revenue averaged over the random influence set.
    pub expected_revenue: f64,
    /// One influence set drawn with probability `q` per buyer.
    pub sample: IeStrategy,
    pub seed: u64,
}

/// Random IE with the inclusion and pricing probabilities that maximize
/// the closed-form ratio to `(W + N) / 4`.
pub fn ie_tuned(g: &SocialNetwork, seed: u64) -> Result<TunedIe> {
    let p_star = 2.0 - std::f64::consts::SQRT_2;
    let (q, p) = if g.total_edge_weight() == 0.0 {
        (0.0, 0.5)
    } else if g.is_directed() {
        (1.0 - std::f64::consts::SQRT_2 / 2.0, p_star)
    } else {
        let lambda = g.lambda().expect("W > 0");
        (
            (1.0 - std::f64::consts::SQRT_2 * (2.0 + lambda) / 4.0).max(0.0),
            p_star,
        )
    };
    let mut rng = rng::seeded(seed);
    let influence_set: Vec<usize> = (0..g.n())
        .filter(|_| q > 0.0 && rng.random_bool(q))
        .collect();
    Ok(TunedIe {
        q,
        p,
        expected_revenue: random_ie_revenue(g, q, p)?,
        sample: IeStrategy::new(influence_set, p)?,
        seed,
    })
}

/// `IE(A, 1/2)` for an undirected loop-free network whose buyers split into
/// the independent sets `A` and `V \ A`.
pub fn ie_bipartite(g: &SocialNetwork, side_a: &[usize]) -> Result<IeStrategy> {
    if g.is_directed() {
        return Err(Error::Unsupported(
            "bipartite IE needs an undirected network".into(),
        ));
    }
    if let Some(i) = g.self_weights().iter().position(|&w| w > 0.0) {
        return Err(validation(format!(
            "buyer {i} has a self-weight; bipartite IE needs none"
        )));
    }
    let s = IeStrategy::new(side_a.to_vec(), 0.5)?;
    let in_a = s.mask(g.n())?;
    if let Some(e) = g.edges().iter().find(|e| in_a[e.from] == in_a[e.to]) {
        return Err(validation(format!(
            "edge ({}, {}) has both endpoints on the same side of the partition",
            e.from, e.to
        )));
    }
    Ok(s)
}
