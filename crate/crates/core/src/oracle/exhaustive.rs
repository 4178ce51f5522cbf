//! Best IE strategy by enumeration of all influence sets.

use rayon::prelude::*;

use super::{OracleReport, SearchMethod};
use crate::error::{Error, Result};
use crate::revenue::{IeStrategy, Strategy};
use crate::SocialNetwork;

pub const EXHAUSTIVE_LIMIT: usize = 22;
const MAX_TIED_WITNESSES: usize = 64;
const TIE_TOL: f64 = 1e-12;

/// Revenue of `IE(A, p)` is `p (1 - p) (a + b p)`; returns `(a, b)` for `A`
/// given as a bit mask.
fn cubic_coefficients(g: &SocialNetwork, mask: u64) -> (f64, f64) {
    let in_a = |i: usize| mask >> i & 1 == 1;
    let mut a = 0.0;
    let mut b = 0.0;
    for (i, &w) in g.self_weights().iter().enumerate() {
        if !in_a(i) {
            a += w;
        }
    }
    g.for_each_influence(|j, i, w| {
        if !in_a(i) {
            if in_a(j) {
                a += w;
            } else {
                b += w / 2.0;
            }
        }
    });
    (a, b)
}

/// Maximizer of `p (1 - p) (a + b p)` over `[1/2, 1)` for `a, b >= 0`.
pub fn best_ie_price(a: f64, b: f64) -> (f64, f64) {
    let h = |p: f64| p * (1.0 - p) * (a + b * p);
    let mut best = (0.5, h(0.5));
    if b > 0.0 {
        // Stationary points of h solve 3 b p^2 + 2 (a - b) p - a = 0.
        let (qa, qb, qc) = (3.0 * b, 2.0 * (a - b), -a);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            for p in [(-qb + s) / (2.0 * qa), (-qb - s) / (2.0 * qa)] {
                if (0.5..1.0).contains(&p) && h(p) > best.1 {
                    best = (p, h(p));
                }
            }
        }
    }
    best
}

/// Exact best `IE(A, p)` over all `2^n` influence sets, at a fixed `p` or
/// jointly optimizing `p` in `[1/2, 1)`.
pub fn best_ie_exhaustive(g: &SocialNetwork, p: Option<f64>) -> Result<OracleReport> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
            what: "exhaustive best-IE search",
        });
    }
    if let Some(p) = p {
        IeStrategy::new(Vec::new(), p)?;
    }
    let evaluate = |mask: u64| {
        let (a, b) = cubic_coefficients(g, mask);
        match p {
            Some(p) => (p, p * (1.0 - p) * (a + b * p)),
            None => best_ie_price(a, b),
        }
    };
    let size = 1u64 << n;
    let chunk = 1u64 << n.saturating_sub(8).min(14);
    let merge = |mut x: (f64, Vec<(u64, f64)>), y: (f64, Vec<(u64, f64)>)| {
        let top = x.0.max(y.0);
        let tol = TIE_TOL * top.abs().max(1.0);
        x.1.retain(|w| w.1 >= top - tol);
        x.1.extend(y.1.into_iter().filter(|w| w.1 >= top - tol));
        x.1.sort_by_key(|w| w.0);
        x.1.truncate(MAX_TIED_WITNESSES + 1);
        (top, x.1)
    };
    let (best_value, witnesses) = (0..size.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc: (f64, Vec<(u64, f64)>) = (f64::NEG_INFINITY, Vec::new());
            for mask in c * chunk..((c + 1) * chunk).min(size) {
                let v = evaluate(mask).1;
                let tol = TIE_TOL * acc.0.abs().max(1.0);
                if v > acc.0 + tol {
                    acc = (v, vec![(mask, v)]);
                } else if v >= acc.0 - tol && acc.1.len() <= MAX_TIED_WITNESSES {
                    acc.0 = acc.0.max(v);
                    acc.1.push((mask, v));
                }
            }
            acc
        })
        .reduce(|| (f64::NEG_INFINITY, Vec::new()), merge);
    let strategies: Vec<Strategy> = witnesses
        .iter()
        .map(|&(mask, _)| {
            let set = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            IeStrategy::new(set, evaluate(mask).0).map(Strategy::Ie)
        })
        .collect::<Result<_>>()?;
    let mut it = strategies.into_iter();
    let best_witness = it.next().expect("at least one subset");
    Ok(OracleReport {
        best_value,
        best_witness,
        tied_witnesses: it.take(MAX_TIED_WITNESSES - 1).collect(),
        search_space_size: size,
        method: SearchMethod::Exhaustive,
        resolution: None,
    })
}
