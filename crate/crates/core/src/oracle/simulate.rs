//! Monte Carlo simulation of the sequential offer process.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::revenue::{IeStrategy, Strategy};
use crate::rng;
use crate::strategies::sample_classes;
use crate::SocialNetwork;

const CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub mean_revenue: f64,
    pub standard_error: f64,
    /// Number of trials in which each buyer accepted.
    pub acceptance_counts: Vec<u64>,
}

struct Tally {
    sum: f64,
    sum_sq: f64,
    accepted: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            sum: 0.0,
            sum_sq: 0.0,
            accepted: vec![0; n],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (a, b) in self.accepted.iter_mut().zip(other.accepted) {
            *a += b;
        }
        self
    }
}

/// Runs `trials` independent offer sequences. `plan` fills the order and
/// pricing probabilities of one trial from its random stream.
fn run<F>(g: &SocialNetwork, trials: u64, seed: u64, plan: F) -> Result<SimulationReport>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Vec<usize>, &mut Vec<f64>) + Sync,
{
    if trials == 0 {
        return Err(validation("need at least one trial"));
    }
    let n = g.n();
    let tally = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(n);
            let (mut order, mut prices) = (Vec::with_capacity(n), vec![0.0; n]);
            let mut bought = vec![false; n];
            for trial in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut r = rng::stream(seed, trial);
                plan(&mut r, &mut order, &mut prices);
                bought.iter_mut().for_each(|b| *b = false);
                let mut revenue = 0.0;
                for &i in order.iter() {
                    let m = g.self_weight(i)
                        + g.incoming(i)
                            .iter()
                            .filter(|&&(j, _)| bought[j])
                            .map(|&(_, w)| w)
                            .sum::<f64>();
                    let price = (1.0 - prices[i]) * m;
                    // Valuation m * u beats the price exactly when u >= 1 - p, also for m = 0.
                    if r.random::<f64>() >= 1.0 - prices[i] {
                        bought[i] = true;
                        t.accepted[i] += 1;
                        revenue += price;
                    }
                }
                t.sum += revenue;
                t.sum_sq += revenue * revenue;
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(n), Tally::merge);
    let k = trials as f64;
    let mean = tally.sum / k;
    let var = if trials > 1 {
        ((tally.sum_sq - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimulationReport {
        trials,
        mean_revenue: mean,
        standard_error: (var / k).sqrt(),
        acceptance_counts: tally.accepted,
    })
}

fn ie_plan(
    n: usize,
    s: &IeStrategy,
) -> Result<impl Fn(&mut rand_chacha::ChaCha8Rng, &mut Vec<usize>, &mut Vec<f64>) + Sync> {
    let mask = s.mask(n)?;
    let p = s.p;
    Ok(
        move |r: &mut rand_chacha::ChaCha8Rng, order: &mut Vec<usize>, prices: &mut Vec<f64>| {
            order.clear();
            order.extend((0..n).filter(|&i| mask[i]));
            let start = order.len();
            order.extend((0..n).filter(|&i| !mask[i]));
            order[start..].shuffle(r);
            for i in 0..n {
                prices[i] = if mask[i] { 1.0 } else { p };
            }
        },
    )
}

/// Simulates `strategy` on `g`; random orders and class assignments are
/// redrawn in every trial.
pub fn simulate(
    g: &SocialNetwork,
    strategy: &Strategy,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    strategy.validate()?;
    let n = g.n();
    match strategy {
        Strategy::Marketing(s) => {
            if s.prices.len() != n {
                return Err(crate::Error::Dimension {
                    expected: n,
                    got: s.prices.len(),
                });
            }
            run(g, trials, seed, |_, order, prices| {
                order.clone_from(&s.order);
                prices.copy_from_slice(&s.prices);
            })
        }
        Strategy::Ie(s) => run(g, trials, seed, ie_plan(n, s)?),
        Strategy::Generalized(s) => {
            let class_price = s.prices();
            run(g, trials, seed, |r, order, prices| {
                let classes = sample_classes(&s.q, n, r);
                order.clear();
                order.extend(0..n);
                order.shuffle(r);
                order.sort_by_key(|&i| classes[i]);
                for i in 0..n {
                    prices[i] = class_price[classes[i]];
                }
            })
        }
    }
}

/// Simulates `IE(q, p)`: each buyer joins the influence set independently
/// with probability `q` in every trial.
pub fn simulate_random_ie(
    g: &SocialNetwork,
    q: f64,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    IeStrategy::new(Vec::new(), p)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(validation(format!(
            "inclusion probability {q} outside [0, 1]"
        )));
    }
    let n = g.n();
    run(g, trials, seed, |r, order, prices| {
        for x in prices.iter_mut() {
            *x = if r.random::<f64>() < q { 1.0 } else { p };
        }
        order.clear();
        order.extend(0..n);
        order.shuffle(r);
        order.sort_by_key(|&i| prices[i] != 1.0);
    })
}
