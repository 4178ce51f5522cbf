//! Low-rank augmented-Lagrangian solver for the vector relaxation.
//!
//! The Gram matrix is factored as `V V^T` with unit rows, so the diagonal
//! constraints hold by construction. A pairwise row contributes to the
//! augmented Lagrangian only once it is violated or carries a positive
//! multiplier. The inner problem is solved by Riemannian L-BFGS on the
//! product of spheres with Armijo backtracking.

use std::collections::VecDeque;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::problem::{SdpProblem, CONSTRAINT_SIGNS};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Factorization rank; defaults to `min(n + 1, ceil(sqrt(2 n)) + 2)`.
    pub rank: Option<usize>,
    pub feas_tol: f64,
    pub obj_tol: f64,
    /// Cap on the total number of inner steps.
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rank: None,
            feas_tol: 1e-4,
            obj_tol: 1e-4,
            max_iter: 50_000,
            seed: rng::DEFAULT_SEED,
        }
    }
}

pub fn default_rank(n: usize) -> usize {
    let r = (2.0 * n as f64).sqrt().ceil() as usize + 2;
    r.min(n + 1).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    /// `n + 1` unit vectors; row 0 is the reference vector.
    pub vectors: Vec<Vec<f64>>,
    pub objective_value: f64,
    pub max_violation: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Pairwise rows with a positive multiplier at termination.
    pub active_constraints: usize,
}

impl SdpSolution {
    pub fn n(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn inner(&self, a: usize, b: usize) -> f64 {
        dot(&self.vectors[a], &self.vectors[b])
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Row-major `m x d` factor with unit rows.
#[derive(Clone)]
struct Factor {
    m: usize,
    d: usize,
    data: Vec<f64>,
}

impl Factor {
    fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.d..(a + 1) * self.d]
    }

    fn normalize(&mut self) {
        for a in 0..self.m {
            let r = &mut self.data[a * self.d..(a + 1) * self.d];
            let norm = dot(r, r).sqrt();
            if norm > 0.0 {
                r.iter_mut().for_each(|x| *x /= norm);
            } else {
                r[0] = 1.0;
            }
        }
    }

    /// Upper triangle of `V V^T`, row-major `m x m`.
    fn gram(&self) -> Vec<f64> {
        let m = self.m;
        let mut g = vec![0.0; m * m];
        for a in 0..m {
            for b in a..m {
                g[a * m + b] = dot(self.row(a), self.row(b));
            }
        }
        g
    }

    /// Removes the radial component of each row of `g`.
    fn project(&self, g: &mut [f64]) {
        let d = self.d;
        for a in 0..self.m {
            let row = self.row(a);
            let ga = &mut g[a * d..(a + 1) * d];
            let radial = dot(ga, row);
            ga.iter_mut().zip(row).for_each(|(x, r)| *x -= radial * r);
        }
    }

    fn retract(&self, dir: &[f64], t: f64) -> Factor {
        let mut out = self.clone();
        out.data.iter_mut().zip(dir).for_each(|(x, d)| *x += t * d);
        out.normalize();
        out
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Visits buyer pairs `i < j` (as vector indices `1..=n`) with a running
/// pair index.
fn for_each_pair(n: usize, mut f: impl FnMut(usize, usize, usize)) {
    let mut idx = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            f(idx, i, j);
            idx += 1;
        }
    }
}

struct Lagrangian<'a> {
    n: usize,
    terms: &'a [(usize, usize, f64)],
    mu: &'a [f64],
    sigma: f64,
}

struct Evaluation {
    /// Augmented Lagrangian, to be maximized.
    value: f64,
    /// Riemannian gradient.
    grad: Vec<f64>,
}

impl Lagrangian<'_> {
    fn evaluate(&self, v: &Factor, want_grad: bool) -> Evaluation {
        let m = v.m;
        let g = v.gram();
        let mut w = vec![0.0; m * m];
        let mut value = 0.0;
        for &(a, b, c) in self.terms {
            value += c * g[a * m + b];
            w[a * m + b] += c;
        }
        let mut penalty = 0.0;
        for_each_pair(self.n, |pair, i, j| {
            let (x, y, z) = (g[i * m + j], g[i], g[j]);
            for (k, s) in CONSTRAINT_SIGNS.iter().enumerate() {
                let mu = self.mu[4 * pair + k];
                let row = 1.0 + s[0] * x + s[1] * y + s[2] * z;
                let lam = (mu - self.sigma * row).max(0.0);
                if lam == 0.0 && mu == 0.0 {
                    continue;
                }
                penalty += lam * lam - mu * mu;
                w[i * m + j] += lam * s[0];
                w[i] += lam * s[1];
                w[j] += lam * s[2];
            }
        });
        value -= penalty / (2.0 * self.sigma);
        if !want_grad {
            return Evaluation {
                value,
                grad: Vec::new(),
            };
        }
        let d = v.d;
        let mut grad = vec![0.0; m * d];
        for a in 0..m {
            for b in a + 1..m {
                let c = w[a * m + b];
                if c == 0.0 {
                    continue;
                }
                for k in 0..d {
                    grad[a * d + k] += c * v.data[b * d + k];
                    grad[b * d + k] += c * v.data[a * d + k];
                }
            }
        }
        v.project(&mut grad);
        Evaluation { value, grad }
    }
}

/// Riemannian L-BFGS ascent on the augmented Lagrangian; returns the
/// number of steps taken.
fn inner_ascent(lag: &Lagrangian, v: &mut Factor, tol: f64, max_steps: usize) -> usize {
    const MEMORY: usize = 10;
    let rms = (v.m as f64).sqrt();
    let mut eval = lag.evaluate(v, true);
    // Curvature pairs (s, y, 1 / s.y) of the negated objective.
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut steps = 0;
    while steps < max_steps {
        let gnorm2 = dot(&eval.grad, &eval.grad);
        if gnorm2.sqrt() / rms < tol {
            break;
        }
        steps += 1;

        let mut dir = eval.grad.clone();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(s, &dir);
            dir.iter_mut().zip(y).for_each(|(q, yi)| *q -= a * yi);
            alphas.push(a);
        }
        let scale = memory
            .back()
            .map_or(1.0 / gnorm2.sqrt().max(1.0), |(s, y, _)| {
                dot(s, y) / dot(y, y)
            });
        dir.iter_mut().for_each(|x| *x *= scale);
        for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &dir);
            dir.iter_mut().zip(s).for_each(|(q, si)| *q += (a - b) * si);
        }
        v.project(&mut dir);
        let mut slope = dot(&dir, &eval.grad);
        let mut steepest = false;
        if slope.is_nan() || slope <= 0.0 {
            memory.clear();
            dir = eval
                .grad
                .iter()
                .map(|g| g / gnorm2.sqrt().max(1.0))
                .collect();
            slope = dot(&dir, &eval.grad);
            steepest = true;
        }

        let mut t = 1.0;
        let next = loop {
            let cand = v.retract(&dir, t);
            if lag.evaluate(&cand, false).value >= eval.value + 1e-4 * t * slope {
                break Some(cand);
            }
            t *= 0.5;
            if t < 1e-12 {
                break None;
            }
        };
        let Some(cand) = next else {
            if steepest {
                break;
            }
            memory.clear();
            continue;
        };
        let new_eval = lag.evaluate(&cand, true);
        let mut s: Vec<f64> = cand.data.iter().zip(&v.data).map(|(a, b)| a - b).collect();
        cand.project(&mut s);
        let mut old = eval.grad;
        cand.project(&mut old);
        let y: Vec<f64> = old.iter().zip(&new_eval.grad).map(|(o, n)| o - n).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * (dot(&s, &s) * dot(&y, &y)).sqrt() {
            memory.push_back((s, y, 1.0 / sy));
            if memory.len() > MEMORY {
                memory.pop_front();
            }
        }
        *v = cand;
        eval = new_eval;
    }
    steps
}

/// Largest violation and the value of every pairwise row.
fn row_values(n: usize, v: &Factor) -> (f64, Vec<f64>) {
    let m = v.m;
    let g = v.gram();
    let mut rows = vec![0.0; 4 * pair_count(n)];
    let mut worst: f64 = 0.0;
    for_each_pair(n, |pair, i, j| {
        let (x, y, z) = (g[i * m + j], g[i], g[j]);
        for (k, s) in CONSTRAINT_SIGNS.iter().enumerate() {
            let row = 1.0 + s[0] * x + s[1] * y + s[2] * z;
            rows[4 * pair + k] = row;
            worst = worst.max(-row);
        }
    });
    (worst, rows)
}

/// Solves the relaxation; the last iterate is returned with
/// `converged = false` if the iteration cap is reached first.
pub fn solve_sdp(prob: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let n = prob.n;
    let m = n + 1;
    let d = opts.rank.unwrap_or_else(|| default_rank(n)).clamp(1, m);
    let mut rng = rng::seeded(opts.seed);
    // Buyers orthogonal to v_0 satisfy every pairwise row.
    let mut v = Factor {
        m,
        d,
        data: (0..m * d)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect(),
    };
    if d > 1 {
        v.data[..d]
            .iter_mut()
            .enumerate()
            .for_each(|(k, x)| *x = if k == 0 { 1.0 } else { 0.0 });
        for a in 1..m {
            v.data[a * d] = 0.0;
        }
    }
    v.normalize();

    let scale = prob.terms.iter().map(|t| t.coef.abs()).fold(0.0, f64::max);
    if n == 0 || scale == 0.0 {
        return finish(prob, &v, 0, true, 0);
    }
    let terms: Vec<(usize, usize, f64)> = prob
        .terms
        .iter()
        .map(|t| (t.a, t.b, t.coef / scale))
        .collect();

    let mut mu = vec![0.0; 4 * pair_count(n)];
    let mut sigma = 10.0;
    let mut inner_tol: f64 = 1e-2;
    let mut total = 0;
    let mut prev_obj = f64::NAN;
    let mut prev_violation = f64::INFINITY;
    let mut converged = false;

    while total < opts.max_iter {
        let lag = Lagrangian {
            n,
            terms: &terms,
            mu: &mu,
            sigma,
        };
        total += inner_ascent(&lag, &mut v, inner_tol, opts.max_iter - total);
        let obj = prob.objective_from(|a, b| dot(v.row(a), v.row(b)));
        let (violation, rows) = row_values(n, &v);
        for (mu_k, row) in mu.iter_mut().zip(&rows) {
            *mu_k = (*mu_k - sigma * row).max(0.0);
        }
        log::debug!("sigma {sigma:.1e} violation {violation:.2e} objective {obj:.6} steps {total} tol {inner_tol:.1e}");

        let stable = (obj - prev_obj).abs() <= opts.obj_tol * obj.abs().max(1.0);
        if violation <= opts.feas_tol && stable && inner_tol <= 1e-4 {
            converged = true;
            break;
        }
        if violation > opts.feas_tol && violation > 0.25 * prev_violation {
            sigma = (sigma * 5.0).min(1e7);
        }
        prev_violation = violation;
        prev_obj = obj;
        inner_tol = (inner_tol * 0.3).max(1e-6);
    }
    let active = mu.iter().filter(|&&x| x > 0.0).count();
    finish(prob, &v, total, converged, active)
}

fn finish(
    prob: &SdpProblem,
    v: &Factor,
    iterations: usize,
    converged: bool,
    active: usize,
) -> SdpSolution {
    SdpSolution {
        vectors: (0..v.m).map(|a| v.row(a).to_vec()).collect(),
        objective_value: prob.objective_from(|a, b| dot(v.row(a), v.row(b))),
        max_violation: row_values(prob.n, v).0,
        iterations,
        converged,
        active_constraints: active,
    }
}
