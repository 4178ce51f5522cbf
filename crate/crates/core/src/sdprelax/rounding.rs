//! Rotation plus random-hyperplane rounding of a relaxation solution.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::build_sdp;
use super::rotation::{angle_from_cos, rotate, rotated_pair_angle_clamped};
use super::solver::{solve_sdp, SdpSolution, SolverOptions};
use crate::error::{validation, Error, Result};
use crate::netmodel::{Directedness, SocialNetwork};
use crate::revenue::{ie_revenue_mask, IeStrategy};
use crate::rng;

/// Vectors rotated towards or away from `v_0` in the plane of `v_0, v_i`.
#[derive(Clone, Debug)]
pub struct RotatedVectors {
    pub reference: Vec<f64>,
    pub buyers: Vec<Vec<f64>>,
}

impl RotatedVectors {
    pub fn new(sol: &SdpSolution, gamma: f64) -> Self {
        let v0 = sol.vectors[0].clone();
        let buyers = sol.vectors[1..]
            .iter()
            .map(|vi| {
                let c: f64 = vi.iter().zip(&v0).map(|(a, b)| a * b).sum();
                let theta = angle_from_cos(c);
                let s = theta.sin();
                if s < 1e-12 {
                    return vi.clone();
                }
                let f = rotate(theta, gamma);
                // u = (v_i - cos(theta) v_0) / sin(theta) is the unit direction orthogonal to v_0.
                vi.iter()
                    .zip(&v0)
                    .map(|(x, r)| f.cos() * r + f.sin() * (x - c * r) / s)
                    .collect()
            })
            .collect();
        RotatedVectors {
            reference: v0,
            buyers,
        }
    }

    /// Influence-set membership for one uniformly random hyperplane.
    pub fn round<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let d = self.reference.len();
        let r: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let sign = |v: &[f64]| v.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() >= 0.0;
        let s0 = sign(&self.reference);
        self.buyers.iter().map(|v| sign(v) == s0).collect()
    }
}

/// One hyperplane rounding of `sol` after rotation by `gamma`.
pub fn round_hyperplane(sol: &SdpSolution, gamma: f64, seed: u64) -> Vec<usize> {
    let mask = RotatedVectors::new(sol, gamma).round(&mut rng::seeded(seed));
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| i)
        .collect()
}

/// Closed-form expected IE revenue of one rotated hyperplane rounding.
pub fn rounding_expectation(
    g: &SocialNetwork,
    sol: &SdpSolution,
    p: f64,
    gamma: f64,
) -> Result<f64> {
    if sol.n() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: sol.n(),
        });
    }
    let theta: Vec<f64> = (1..=g.n())
        .map(|i| angle_from_cos(sol.inner(0, i)))
        .collect();
    let rotated: Vec<f64> = theta.iter().map(|&t| rotate(t, gamma)).collect();
    let pair = |i: usize, j: usize| {
        let tij = angle_from_cos(sol.inner(i + 1, j + 1));
        rotated_pair_angle_clamped(tij, theta[i], theta[j], gamma)
    };
    let base = p * (1.0 - p);
    let mut total: f64 = g
        .self_weights()
        .iter()
        .zip(&rotated)
        .map(|(&w, &t)| w * base * t / PI)
        .sum();
    match g.directedness() {
        Directedness::Directed => {
            for e in g.edges() {
                let (ti, tj, tij) = (rotated[e.from], rotated[e.to], pair(e.from, e.to));
                total += e.weight
                    * base
                    * ((1.0 - p / 2.0) * tij - (1.0 - p / 2.0) * ti + (1.0 + p / 2.0) * tj)
                    / (2.0 * PI);
            }
        }
        Directedness::Undirected => {
            for e in g.edges() {
                let (ti, tj, tij) = (rotated[e.from], rotated[e.to], pair(e.from, e.to));
                total += e.weight * base * ((2.0 - p) * tij + p * ti + p * tj) / (2.0 * PI);
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpIeParams {
    pub p: f64,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SdpIeParams {
    /// `(2/3, 0.722)` for directed and `(0.586, 0.209)` for undirected networks.
    pub fn defaults(directedness: Directedness) -> Self {
        let (p, gamma) = match directedness {
            Directedness::Directed => (2.0 / 3.0, 0.722),
            Directedness::Undirected => (0.586, 0.209),
        };
        SdpIeParams {
            p,
            gamma,
            trials: 1000,
            seed: rng::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpIeOutcome {
    pub strategy: IeStrategy,
    /// Revenue of the best rounding.
    pub revenue: f64,
    /// Closed-form revenue of a single rounding.
    pub expected_revenue: f64,
    pub sdp_objective: f64,
    pub solver_converged: bool,
    pub solver_iterations: usize,
    pub max_violation: f64,
    pub params: SdpIeParams,
}

/// Best-of-`trials` rounding of `sol`; ties go to the earliest trial.
pub fn best_rounding(
    g: &SocialNetwork,
    sol: &SdpSolution,
    params: &SdpIeParams,
) -> (Vec<bool>, f64) {
    let rotated = RotatedVectors::new(sol, params.gamma);
    (0..params.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mask = rotated.round(&mut rng::stream(params.seed, t));
            let value = ie_revenue_mask(g, &mask, params.p);
            (t, mask, value)
        })
        .reduce_with(|a, b| {
            if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .map(|(_, mask, value)| (mask, value))
        .unwrap_or_else(|| {
            (
                vec![false; g.n()],
                ie_revenue_mask(g, &vec![false; g.n()], params.p),
            )
        })
}

/// Solves the relaxation at `params.p` and keeps the best rotated
/// hyperplane rounding.
pub fn sdp_ie(
    g: &SocialNetwork,
    params: &SdpIeParams,
    solver: &SolverOptions,
) -> Result<SdpIeOutcome> {
    if params.trials == 0 {
        return Err(validation("need at least one rounding trial"));
    }
    if !(0.0..=1.0).contains(&params.gamma) {
        return Err(validation(format!(
            "rotation parameter {} outside [0, 1]",
            params.gamma
        )));
    }
    let prob = build_sdp(g, params.p)?;
    let sol = solve_sdp(&prob, solver);
    let expected_revenue = rounding_expectation(g, &sol, params.p, params.gamma)?;
    let (mask, revenue) = best_rounding(g, &sol, params);
    Ok(SdpIeOutcome {
        strategy: IeStrategy::from_mask(&mask, params.p)?,
        revenue,
        expected_revenue,
        sdp_objective: sol.objective_value,
        solver_converged: sol.converged,
        solver_iterations: sol.iterations,
        max_violation: sol.max_violation,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::parse_edge_list;

    fn solution(vectors: Vec<Vec<f64>>) -> SdpSolution {
        SdpSolution {
            vectors,
            objective_value: 0.0,
            max_violation: 0.0,
            iterations: 0,
            converged: true,
            active_constraints: 0,
        }
    }

    #[test]
    fn aligned_and_antipodal_buyers() {
        let sol = solution(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]]);
        for seed in 0..200 {
            assert_eq!(round_hyperplane(&sol, 0.3, seed), vec![0]);
        }
        let g = parse_edge_list("directed 2\n0 1 1").unwrap();
        let e = rounding_expectation(&g, &sol, 2.0 / 3.0, 0.3).unwrap();
        assert!((e - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_vectors_have_rotated_angles() {
        let t: f64 = 1.1;
        let sol = solution(vec![
            vec![1.0, 0.0, 0.0],
            vec![t.cos(), t.sin() * 0.6, t.sin() * 0.8],
        ]);
        let rv = RotatedVectors::new(&sol, 0.5);
        let c: f64 = rv.buyers[0]
            .iter()
            .zip(&rv.reference)
            .map(|(a, b)| a * b)
            .sum();
        assert!((angle_from_cos(c) - rotate(t, 0.5)).abs() < 1e-12);
        let norm: f64 = rv.buyers[0].iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_sampled_roundings() {
        use crate::netmodel::{generate, GeneratorKind, GeneratorParams};
        for (directed, p, gamma) in [(false, 0.586, 0.209), (true, 2.0 / 3.0, 0.722)] {
            let mut params = GeneratorParams::unit(7, directed);
            params.density = 0.5;
            params.weight_max = 2.0;
            params.seed = 21;
            let plain = generate(GeneratorKind::Random, &params).unwrap();
            let mut b = SocialNetwork::builder(plain.directedness(), 7);
            for e in plain.edges() {
                b.add_edge(e.from, e.to, e.weight).unwrap();
            }
            b.add_self_weight(3, 1.5).unwrap();
            let g = b.build().unwrap();
            let sol = solve_sdp(&build_sdp(&g, p).unwrap(), &SolverOptions::default());
            let exact = rounding_expectation(&g, &sol, p, gamma).unwrap();
            let rotated = RotatedVectors::new(&sol, gamma);
            let trials = 200_000;
            let samples: Vec<f64> = (0..trials)
                .map(|t| ie_revenue_mask(&g, &rotated.round(&mut rng::stream(4, t)), p))
                .collect();
            let mean = samples.iter().sum::<f64>() / trials as f64;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            let se = (var / trials as f64).sqrt();
            assert!(
                (mean - exact).abs() <= 4.0 * se,
                "directed {directed}: {mean} vs {exact} (se {se})"
            );
        }
    }

    #[test]
    fn single_edge_gives_one_sided_cut() {
        let g = parse_edge_list("undirected 2\n0 1 2").unwrap();
        let params = SdpIeParams {
            p: 0.5,
            gamma: 0.209,
            trials: 50,
            seed: 1,
        };
        let out = sdp_ie(&g, &params, &SolverOptions::default()).unwrap();
        assert_eq!(out.strategy.influence_set.len(), 1);
        assert!((out.revenue - 0.5).abs() < 1e-12);
    }
}
