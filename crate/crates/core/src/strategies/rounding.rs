//! Randomized rounding of a pricing vector to an IE strategy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::netmodel::SocialNetwork;
use crate::revenue::{expected_ie_revenue, IeStrategy};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AlphaSchedule {
    Constant {
        alpha: f64,
    },
    /// Four linear pieces with breakpoints 0.7, 0.8, 0.9.
    Piecewise,
}

impl AlphaSchedule {
    pub fn alpha(&self, p: f64) -> f64 {
        match *self {
            AlphaSchedule::Constant { alpha } => alpha,
            AlphaSchedule::Piecewise => {
                if p <= 0.7 {
                    5.0 * (p - 0.5)
                } else if p <= 0.8 {
                    1.0 + 3.3 * (p - 0.7)
                } else if p <= 0.9 {
                    1.33 + 3.0 * (p - 0.8)
                } else {
                    1.63 + 3.7 * (p - 0.9)
                }
            }
        }
    }
}

/// Exploit pricing probability plus the rule mapping each buyer's pricing
/// probability to its chance of joining the influence set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingSchedule {
    pub p_hat: f64,
    pub alpha: AlphaSchedule,
}

impl RoundingSchedule {
    pub fn undirected() -> Self {
        RoundingSchedule {
            p_hat: 0.586,
            alpha: AlphaSchedule::Piecewise,
        }
    }

    /// The single-slope schedule `alpha = 1.43`.
    pub fn undirected_simple() -> Self {
        RoundingSchedule {
            p_hat: 0.586,
            alpha: AlphaSchedule::Constant { alpha: 1.43 },
        }
    }

    pub fn directed() -> Self {
        RoundingSchedule {
            p_hat: 2.0 / 3.0,
            alpha: AlphaSchedule::Constant { alpha: 1.0 },
        }
    }

    pub fn for_network(g: &SocialNetwork) -> Self {
        if g.is_directed() {
            Self::directed()
        } else {
            Self::undirected()
        }
    }

    /// `I(p) = alpha(p) (p - 1/2)`.
    pub fn inclusion(&self, p: f64) -> f64 {
        (self.alpha.alpha(p) * (p - 0.5)).clamp(0.0, 1.0)
    }

    /// `E(p) = 1 - I(p)`.
    pub fn exclusion(&self, p: f64) -> f64 {
        1.0 - self.inclusion(p)
    }

    fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.p_hat) {
            return Err(validation(format!(
                "exploit pricing probability {} outside [1/2, 1)",
                self.p_hat
            )));
        }
        if let AlphaSchedule::Constant { alpha } = self.alpha {
            if !(0.0..=2.0).contains(&alpha) {
                return Err(validation(format!(
                    "rounding coefficient {alpha} outside [0, 2]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    /// One sampled strategy.
    pub strategy: IeStrategy,
    /// Exact revenue averaged over the rounding randomness.
    pub expected_revenue: f64,
    pub inclusion_probabilities: Vec<f64>,
    pub schedule: RoundingSchedule,
}

/// Rounds `prices` with the default schedule for the network's directedness.
pub fn round_to_ie(g: &SocialNetwork, prices: &[f64], seed: u64) -> Result<RoundingOutcome> {
    round_to_ie_with(
        g,
        prices,
        RoundingSchedule::for_network(g),
        &mut rng::seeded(seed),
    )
}

pub fn round_to_ie_with<R: Rng + ?Sized>(
    g: &SocialNetwork,
    prices: &[f64],
    schedule: RoundingSchedule,
    rng: &mut R,
) -> Result<RoundingOutcome> {
    schedule.validate()?;
    if prices.len() != g.n() {
        return Err(crate::Error::Dimension {
            expected: g.n(),
            got: prices.len(),
        });
    }
    if let Some(&p) = prices.iter().find(|p| !(0.5..=1.0).contains(*p)) {
        return Err(validation(format!(
            "pricing probability {p} outside [1/2, 1]"
        )));
    }
    let inclusion: Vec<f64> = prices.iter().map(|&p| schedule.inclusion(p)).collect();
    let influence_set = inclusion
        .iter()
        .enumerate()
        .filter(|(_, &q)| rng.random::<f64>() < q)
        .map(|(i, _)| i)
        .collect();
    Ok(RoundingOutcome {
        strategy: IeStrategy::new(influence_set, schedule.p_hat)?,
        expected_revenue: expected_ie_revenue(g, &inclusion, schedule.p_hat)?,
        inclusion_probabilities: inclusion,
        schedule,
    })
}
