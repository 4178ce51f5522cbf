//! Heuristic search for the revenue-maximizing marketing strategy.

use rand::Rng;
use rayon::prelude::*;

use super::{OracleReport, SearchMethod};
use crate::error::{validation, Error, Result};
use crate::revenue::{best_ordering_for_prices, sorted_order_revenue, MarketingStrategy, Strategy};
use crate::rng;
use crate::SocialNetwork;

pub const UNDIRECTED_SEARCH_LIMIT: usize = 50;
pub const DIRECTED_SEARCH_LIMIT: usize = 8;
/// Spacing of the grid that seeds the multistart search.
pub const SEED_RESOLUTION: f64 = 1.0 / 16.0;
const RANDOM_STARTS: u64 = 256;
const CORNER_START_LIMIT: usize = 10;
const MAX_SWEEPS: usize = 10_000;
const IMPROVEMENT_TOL: f64 = 1e-15;

/// Maximizer of `a x (1 - x) + b x` on `[lo, hi]`.
fn quadratic_argmax(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    if a > 0.0 {
        ((a + b) / (2.0 * a)).clamp(lo, hi)
    } else if b > 0.0 {
        hi
    } else {
        lo
    }
}

/// Exact coordinate ascent on the sorted-order revenue of an undirected
/// network; coordinates with `fixed[i]` keep their value.
pub(crate) fn undirected_ascent(
    g: &SocialNetwork,
    mut x: Vec<f64>,
    fixed: &[bool],
) -> (Vec<f64>, f64) {
    let mut value = sorted_order_revenue(g, &x);
    let mut breaks: Vec<f64> = Vec::new();
    for _ in 0..MAX_SWEEPS {
        let before = value;
        for i in 0..g.n() {
            if fixed[i] {
                continue;
            }
            // Along coordinate i the revenue is a x (1 - x) + b x on each
            // interval between neighbouring prices.
            breaks.clear();
            breaks.extend([0.5, 1.0]);
            breaks.extend(g.incoming(i).iter().map(|&(j, _)| x[j]));
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let local = |t: f64| {
                let mut a = g.self_weight(i);
                let mut b = 0.0;
                for &(j, w) in g.incoming(i) {
                    let q = x[j];
                    if t <= q {
                        a += w * q;
                    } else {
                        b += w * q * (1.0 - q);
                    }
                }
                (a, b)
            };
            let eval = |t: f64, (a, b): (f64, f64)| a * t * (1.0 - t) + b * t;
            let mut best = (x[i], eval(x[i], local(x[i])));
            for win in breaks.windows(2) {
                let (lo, hi) = (win[0], win[1]);
                let coef = local(0.5 * (lo + hi));
                let t = quadratic_argmax(coef.0, coef.1, lo, hi);
                let v = eval(t, local(t));
                if v > best.1 {
                    best = (t, v);
                }
            }
            x[i] = best.0;
        }
        value = sorted_order_revenue(g, &x);
        if value <= before + IMPROVEMENT_TOL {
            break;
        }
    }
    (x, value)
}

/// Exact coordinate ascent on the revenue of a fixed order.
fn ordered_ascent(
    n: usize,
    self_w: &[f64],
    incoming: &[Vec<(usize, f64)>],
    outgoing: &[Vec<(usize, f64)>],
    pos: &[usize],
    mut x: Vec<f64>,
) -> (Vec<f64>, f64) {
    let revenue = |x: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let m: f64 = self_w[i]
                    + incoming[i]
                        .iter()
                        .filter(|&&(j, _)| pos[j] < pos[i])
                        .map(|&(j, w)| x[j] * w)
                        .sum::<f64>();
                x[i] * (1.0 - x[i]) * m
            })
            .sum()
    };
    let mut value = revenue(&x);
    for _ in 0..MAX_SWEEPS {
        for i in 0..n {
            let m: f64 = self_w[i]
                + incoming[i]
                    .iter()
                    .filter(|&&(j, _)| pos[j] < pos[i])
                    .map(|&(j, w)| x[j] * w)
                    .sum::<f64>();
            let c: f64 = outgoing[i]
                .iter()
                .filter(|&&(k, _)| pos[k] > pos[i])
                .map(|&(k, w)| x[k] * (1.0 - x[k]) * w)
                .sum();
            x[i] = quadratic_argmax(m, c, 0.5, 1.0);
        }
        let next = revenue(&x);
        let done = next <= value + IMPROVEMENT_TOL;
        value = next.max(value);
        if done {
            break;
        }
    }
    (x, value)
}

struct Adjacency {
    self_w: Vec<f64>,
    incoming: Vec<Vec<(usize, f64)>>,
    outgoing: Vec<Vec<(usize, f64)>>,
}

impl Adjacency {
    fn new(g: &SocialNetwork) -> Self {
        let n = g.n();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        g.for_each_influence(|j, i, w| {
            incoming[i].push((j, w));
            outgoing[j].push((i, w));
        });
        Adjacency {
            self_w: g.self_weights().to_vec(),
            incoming,
            outgoing,
        }
    }

    fn ascend(&self, pos: &[usize], starts: &[f64]) -> (Vec<f64>, f64) {
        let n = self.self_w.len();
        starts
            .iter()
            .map(|&s| {
                ordered_ascent(
                    n,
                    &self.self_w,
                    &self.incoming,
                    &self.outgoing,
                    pos,
                    vec![s; n],
                )
            })
            .fold((vec![0.5; n], f64::NEG_INFINITY), |a, b| {
                if b.1 > a.1 {
                    b
                } else {
                    a
                }
            })
    }
}

/// Best pricing probabilities for a fixed order, by coordinate ascent from
/// a few uniform starts.
pub fn optimize_prices_for_order(
    g: &SocialNetwork,
    order: &[usize],
) -> Result<(MarketingStrategy, f64)> {
    let probe = MarketingStrategy::new(order.to_vec(), vec![0.5; order.len()])?;
    if order.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: order.len(),
        });
    }
    let pos = probe.positions();
    let (x, v) = Adjacency::new(g).ascend(&pos, &[0.5, 2.0 / 3.0, 0.75, 1.0]);
    Ok((MarketingStrategy::new(order.to_vec(), x)?, v))
}

/// `index`-th permutation of `0..n` in lexicographic order.
fn nth_permutation(n: usize, mut index: u64) -> Vec<usize> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let f: u64 = (1..k as u64).product();
        out.push(items.remove((index / f) as usize));
        index %= f;
    }
    out
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn positions_of(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (k, &b) in order.iter().enumerate() {
        pos[b] = k;
    }
    pos
}

/// Revenue-maximizing order for fixed prices: the sorted order on
/// undirected networks, exhaustive over permutations on directed ones.
pub fn best_permutation(g: &SocialNetwork, prices: &[f64]) -> Result<(MarketingStrategy, f64)> {
    if !g.is_directed() {
        let s = best_ordering_for_prices(g, prices)?;
        return Ok((s, sorted_order_revenue(g, prices)));
    }
    let n = g.n();
    if n > DIRECTED_SEARCH_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DIRECTED_SEARCH_LIMIT,
            what: "permutation search",
        });
    }
    MarketingStrategy::new((0..n).collect(), prices.to_vec())?;
    let edges = g.edges();
    let base: f64 = g
        .self_weights()
        .iter()
        .zip(prices)
        .map(|(w, p)| w * p * (1.0 - p))
        .sum();
    let (idx, value) = (0..factorial(n))
        .into_par_iter()
        .map(|k| {
            let pos = positions_of(&nth_permutation(n, k));
            let v: f64 = edges
                .iter()
                .filter(|e| pos[e.from] < pos[e.to])
                .map(|e| prices[e.to] * (1.0 - prices[e.to]) * prices[e.from] * e.weight)
                .sum();
            (k, base + v)
        })
        .reduce(
            || (u64::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    Ok((
        MarketingStrategy::new(nth_permutation(n, idx), prices.to_vec())?,
        value,
    ))
}

fn undirected_starts(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let levels = (0.5 / SEED_RESOLUTION).round() as u32;
    let mut starts: Vec<Vec<f64>> = (0..=levels)
        .map(|k| vec![0.5 + k as f64 * SEED_RESOLUTION; n])
        .collect();
    if n <= CORNER_START_LIMIT {
        for bits in 0u32..1 << n {
            starts.push(
                (0..n)
                    .map(|i| if bits >> i & 1 == 1 { 1.0 } else { 0.5 })
                    .collect(),
            );
        }
    }
    for s in 0..RANDOM_STARTS {
        let mut r = rng::stream(seed, s);
        starts.push(
            (0..n)
                .map(|_| 0.5 + r.random_range(0..=levels) as f64 * SEED_RESOLUTION)
                .collect(),
        );
    }
    starts
}

/// Best marketing strategy found by multistart coordinate ascent; a
/// heuristic lower bound on the optimum.
pub fn best_strategy_search(g: &SocialNetwork) -> Result<OracleReport> {
    let n = g.n();
    if n == 0 {
        return Err(validation("network has no buyers"));
    }
    if g.is_directed() {
        if n > DIRECTED_SEARCH_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: DIRECTED_SEARCH_LIMIT,
                what: "directed strategy search",
            });
        }
        let adj = Adjacency::new(g);
        let starts = [0.5, 2.0 / 3.0, 1.0];
        let (idx, x, value) = (0..factorial(n))
            .into_par_iter()
            .map(|k| {
                let pos = positions_of(&nth_permutation(n, k));
                let (x, v) = adj.ascend(&pos, &starts);
                (k, x, v)
            })
            .reduce(
                || (u64::MAX, Vec::new(), f64::NEG_INFINITY),
                |a, b| {
                    if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
        let witness = MarketingStrategy::new(nth_permutation(n, idx), x)?;
        return Ok(OracleReport {
            best_value: value,
            best_witness: Strategy::Marketing(witness),
            tied_witnesses: Vec::new(),
            search_space_size: factorial(n) * starts.len() as u64,
            method: SearchMethod::Multistart,
            resolution: None,
        });
    }
    if n > UNDIRECTED_SEARCH_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: UNDIRECTED_SEARCH_LIMIT,
            what: "undirected strategy search",
        });
    }
    let (x, value, count) = undirected_multistart(g, &vec![None; n], rng::DEFAULT_SEED);
    let witness = best_ordering_for_prices(g, &x)?;
    Ok(OracleReport {
        best_value: value,
        best_witness: Strategy::Marketing(witness),
        tied_witnesses: Vec::new(),
        search_space_size: count,
        method: SearchMethod::Multistart,
        resolution: Some(SEED_RESOLUTION),
    })
}

/// Multistart ascent with some coordinates pinned; returns the best prices,
/// their revenue and the number of starts.
pub(crate) fn undirected_multistart(
    g: &SocialNetwork,
    pinned: &[Option<f64>],
    seed: u64,
) -> (Vec<f64>, f64, u64) {
    let fixed: Vec<bool> = pinned.iter().map(Option::is_some).collect();
    let starts: Vec<Vec<f64>> = undirected_starts(g.n(), seed)
        .into_iter()
        .map(|mut s| {
            for (x, p) in s.iter_mut().zip(pinned) {
                if let Some(p) = p {
                    *x = *p;
                }
            }
            s
        })
        .collect();
    let count = starts.len() as u64;
    let (_, x, v) = starts
        .into_par_iter()
        .enumerate()
        .map(|(k, s)| {
            let (x, v) = undirected_ascent(g, s, &fixed);
            (k, x, v)
        })
        .reduce(
            || (usize::MAX, Vec::new(), f64::NEG_INFINITY),
            |a, b| {
                if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    (x, v, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{gadget, generate, GadgetKind, GeneratorKind, GeneratorParams};
    use crate::oracle::best_ie_exhaustive;
    use crate::revenue::{revenue_bounds, strategy_revenue};
    use approx::assert_abs_diff_eq;

    fn random(n: usize, directed: bool, density: f64, seed: u64) -> SocialNetwork {
        let mut p = GeneratorParams::unit(n, directed);
        p.density = density;
        p.weight_min = 0.2;
        p.weight_max = 2.0;
        p.seed = seed;
        generate(GeneratorKind::Random, &p).unwrap()
    }

    fn check_witness(g: &SocialNetwork, r: &OracleReport) {
        match &r.best_witness {
            Strategy::Marketing(s) => assert_abs_diff_eq!(
                strategy_revenue(g, s).unwrap(),
                r.best_value,
                epsilon = 1e-12
            ),
            _ => panic!("expected a marketing strategy"),
        }
    }

    #[test]
    fn gadget_optima() {
        let t = gadget(GadgetKind::ExtendedTriangle).unwrap();
        let r = best_strategy_search(&t).unwrap();
        assert_abs_diff_eq!(r.best_value, 177.0 / 128.0, epsilon = 1e-9);
        check_witness(&t, &r);
        let p = gadget(GadgetKind::ThreePath).unwrap();
        let r = best_strategy_search(&p).unwrap();
        assert_abs_diff_eq!(r.best_value, 0.75, epsilon = 1e-9);
    }

    #[test]
    fn complete_dag_reaches_fixture() {
        let g = generate(GeneratorKind::CompleteDag, &GeneratorParams::unit(4, true)).unwrap();
        let r = best_strategy_search(&g).unwrap();
        assert!(r.best_value >= 1.1964 - 5e-5);
        check_witness(&g, &r);
    }

    #[test]
    fn four_cycle_identity_order() {
        let g = generate(GeneratorKind::Cycle, &GeneratorParams::unit(4, false)).unwrap();
        let (s, v) = optimize_prices_for_order(&g, &[0, 1, 2, 3]).unwrap();
        assert_abs_diff_eq!(strategy_revenue(&g, &s).unwrap(), v, epsilon = 1e-12);
        // Independent check on a fine grid of the three non-trivial prices.
        let mut grid = f64::NEG_INFINITY;
        for a in 0..=100 {
            for b in 0..=100 {
                for c in 0..=100 {
                    let x = [
                        1.0,
                        0.5 + a as f64 / 200.0,
                        0.5 + b as f64 / 200.0,
                        0.5 + c as f64 / 200.0,
                    ];
                    let m = MarketingStrategy::in_index_order(x.to_vec()).unwrap();
                    grid = grid.max(strategy_revenue(&g, &m).unwrap());
                }
            }
        }
        assert!(v >= grid - 1e-12 && v <= grid + 1e-3, "{v} vs {grid}");
        assert_abs_diff_eq!(v, 0.79105, epsilon = 5e-5);
    }

    #[test]
    fn search_dominates_best_ie_and_respects_bounds() {
        for seed in 0..6 {
            for directed in [false, true] {
                let g = random(7, directed, 0.45, seed);
                let r = best_strategy_search(&g).unwrap();
                check_witness(&g, &r);
                let ie = best_ie_exhaustive(&g, None).unwrap();
                assert!(
                    r.best_value >= ie.best_value - 1e-9,
                    "seed {seed}: {} < {}",
                    r.best_value,
                    ie.best_value
                );
                let b = revenue_bounds(&g);
                assert!(r.best_value <= b.upper + 1e-12);
                if !directed {
                    assert!(r.best_value >= b.myopic_lower - 1e-12);
                }
            }
        }
    }

    #[test]
    fn best_permutation_is_exhaustive() {
        let g = random(6, true, 0.5, 9);
        let prices = vec![0.9, 0.55, 0.7, 1.0, 0.6, 0.5];
        let (s, v) = best_permutation(&g, &prices).unwrap();
        assert_abs_diff_eq!(strategy_revenue(&g, &s).unwrap(), v, epsilon = 1e-12);
        for k in 0..factorial(6) {
            let m = MarketingStrategy::new(nth_permutation(6, k), prices.clone()).unwrap();
            assert!(strategy_revenue(&g, &m).unwrap() <= v + 1e-12);
        }
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(nth_permutation(3, 0), vec![0, 1, 2]);
        assert_eq!(nth_permutation(3, 1), vec![0, 2, 1]);
        assert_eq!(nth_permutation(3, 5), vec![2, 1, 0]);
    }

    #[test]
    fn size_limits() {
        assert!(best_strategy_search(&random(9, true, 0.3, 1)).is_err());
        assert!(best_strategy_search(&random(51, false, 0.05, 1)).is_err());
    }
}
