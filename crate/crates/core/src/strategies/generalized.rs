//! Generalized IE: choice of class-assignment probabilities.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::netmodel::SocialNetwork;
use crate::numeric::project_simplex;
use crate::revenue::{class_prices, generalized_coefficients, GeneralizedIeStrategy};
use crate::rng;

/// Assignment probabilities for six classes with certified ratio 0.7032.
pub const PAPER_Q: [f64; 6] = [0.183, 0.075, 0.075, 0.175, 0.261, 0.231];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GieMode {
    PaperQ,
    Optimize,
}

/// Ratio lower bound on undirected networks: the smaller of the self-weight
/// and edge coefficients, each relative to the myopic bound `1/4`.
pub fn eq10_value(q: &[f64]) -> f64 {
    let (s, e) = generalized_coefficients(q, false);
    (4.0 * s).min(4.0 * e)
}

/// Ratio lower bound on directed networks.
pub fn eq11_value(q: &[f64]) -> f64 {
    4.0 * generalized_coefficients(q, true).1
}

pub fn ratio_objective(q: &[f64], directed: bool) -> f64 {
    if directed {
        eq11_value(q)
    } else {
        eq10_value(q)
    }
}

/// Gradient of whichever term attains the minimum.
fn objective_gradient(q: &[f64], directed: bool) -> Vec<f64> {
    let p = class_prices(q.len());
    let c: Vec<f64> = p.iter().map(|&pk| pk * (1.0 - pk)).collect();
    let (s, e) = generalized_coefficients(q, directed);
    if !directed && s <= e {
        return c.iter().map(|&ck| 4.0 * ck).collect();
    }
    // Edge coefficient: sum_k q_k c_k (h q_k p_k + m S_k), S_k = sum_{l<k} q_l p_l.
    let (h, m) = if directed { (0.5, 1.0) } else { (1.0, 2.0) };
    let k = q.len();
    let mut earlier = vec![0.0; k];
    for i in 1..k {
        earlier[i] = earlier[i - 1] + q[i - 1] * p[i - 1];
    }
    let mut later = vec![0.0; k]; // sum_{j>i} q_j c_j
    for i in (0..k - 1).rev() {
        later[i] = later[i + 1] + q[i + 1] * c[i + 1];
    }
    (0..k)
        .map(|i| 4.0 * (c[i] * (2.0 * h * q[i] * p[i] + m * earlier[i]) + m * p[i] * later[i]))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub iterations: usize,
    /// Initial step; iteration `t` uses `step / sqrt(t)`.
    pub step: f64,
    /// Finest transfer size of the coordinate polish.
    pub polish_resolution: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 32,
            iterations: 10_000,
            step: 0.1,
            polish_resolution: 1e-6,
            seed: rng::DEFAULT_SEED,
        }
    }
}

fn ascend(mut q: Vec<f64>, directed: bool, opts: &OptimizeOptions) -> (Vec<f64>, f64) {
    let mut best = (q.clone(), ratio_objective(&q, directed));
    for t in 1..=opts.iterations {
        let g = objective_gradient(&q, directed);
        let step = opts.step / (t as f64).sqrt();
        let moved: Vec<f64> = q.iter().zip(&g).map(|(x, d)| x + step * d).collect();
        q = project_simplex(&moved);
        let v = ratio_objective(&q, directed);
        if v > best.1 {
            best = (q.clone(), v);
        }
    }
    best
}

fn polish(mut q: Vec<f64>, directed: bool, resolution: f64) -> (Vec<f64>, f64) {
    let k = q.len();
    let mut value = ratio_objective(&q, directed);
    let mut size = 1e-2;
    while size >= resolution * (1.0 - 1e-9) {
        for _ in 0..100_000 {
            let mut improved = false;
            for a in 0..k {
                for b in 0..k {
                    let delta = size.min(q[a]);
                    if a == b || delta <= 0.0 {
                        continue;
                    }
                    let mut trial = q.clone();
                    trial[a] -= delta;
                    trial[b] += delta;
                    let v = ratio_objective(&trial, directed);
                    if v > value + 1e-15 {
                        q = trial;
                        value = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        size /= 10.0;
    }
    (q, value)
}

/// Maximizes the certified ratio over the simplex by multistart projected
/// gradient ascent followed by a pairwise-transfer polish.
pub fn optimize_q(k: usize, directed: bool, opts: &OptimizeOptions) -> Result<(Vec<f64>, f64)> {
    if k < 2 {
        return Err(validation(format!(
            "need at least 2 pricing classes, got {k}"
        )));
    }
    if opts.starts == 0 {
        return Err(validation("need at least one start"));
    }
    let starts: Vec<Vec<f64>> = (0..opts.starts)
        .map(|s| match s {
            0 => vec![1.0 / k as f64; k],
            1 if k == PAPER_Q.len() => PAPER_Q.to_vec(),
            _ => {
                let mut r = rng::stream(opts.seed, s as u64);
                let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut r)).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|x: f64| x / total).collect()
            }
        })
        .collect();
    let results: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|q0| {
            let (q, _) = ascend(q0, directed, opts);
            polish(q, directed, opts.polish_resolution)
        })
        .collect();
    let best = results
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one start");
    Ok(best)
}

pub fn generalized_ie(
    g: &SocialNetwork,
    k: usize,
    mode: GieMode,
    seed: u64,
) -> Result<GeneralizedIeStrategy> {
    let q = match mode {
        GieMode::PaperQ => {
            if k != PAPER_Q.len() {
                return Err(validation(format!(
                    "paper_q is defined for K = 6 only, got K = {k}"
                )));
            }
            PAPER_Q.to_vec()
        }
        GieMode::Optimize => {
            let opts = OptimizeOptions {
                seed,
                ..Default::default()
            };
            optimize_q(k, g.is_directed(), &opts)?.0
        }
    };
    GeneralizedIeStrategy::new(q, Some(seed))
}

/// Draws a pricing class for every buyer.
pub fn sample_classes<R: Rng + ?Sized>(q: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (k, &qk) in q.iter().enumerate() {
                acc += qk;
                if u < acc {
                    return k;
                }
            }
            q.iter().rposition(|&x| x > 0.0).unwrap_or(q.len() - 1)
        })
        .collect()
}
