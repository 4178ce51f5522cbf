//! Vector relaxation of best-IE selection.
//!
//! Vector `0` is the reference `v_0`; buyer `i` owns vector `i + 1`. An
//! integral solution puts `v_i = v_0` for influence-set buyers and
//! `v_i = -v_0` for the rest, and then the objective equals the IE revenue.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::netmodel::{Directedness, SocialNetwork};

/// Coefficient of the inner product `v_a . v_b`, with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub a: usize,
    pub b: usize,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub n: usize,
    pub p: f64,
    pub directedness: Directedness,
    pub constant: f64,
    /// Sorted by `(a, b)`, one entry per pair.
    pub terms: Vec<PairTerm>,
    /// Every buyer pair `(i, j)` with `i < j` carries the four rows
    /// `1 + s_x (v_i.v_j) + s_y (v_0.v_i) + s_z (v_0.v_j) >= 0`.
    pub constraint_signs: [[f64; 3]; 4],
}

/// Sign patterns `(s_x, s_y, s_z)` of the four pairwise inequalities.
pub const CONSTRAINT_SIGNS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [-1.0, 1.0, -1.0],
];

impl SdpProblem {
    /// Number of vectors, `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Objective at the given Gram entries.
    pub fn objective_from(&self, inner: impl Fn(usize, usize) -> f64) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|t| t.coef * inner(t.a, t.b))
                .sum::<f64>()
    }

    /// Objective at the integral point described by an influence-set mask.
    pub fn integral_objective(&self, in_a: &[bool]) -> f64 {
        let y = |a: usize| if a == 0 || in_a[a - 1] { 1.0 } else { -1.0 };
        self.objective_from(|a, b| y(a) * y(b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }
}

/// Relaxation of the best `IE(., p)` selection problem on `g`.
pub fn build_sdp(g: &SocialNetwork, p: f64) -> Result<SdpProblem> {
    if !(0.5..1.0).contains(&p) {
        return Err(validation(format!(
            "pricing probability {p} outside [1/2, 1)"
        )));
    }
    let mut constant = 0.0;
    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    let base = p * (1.0 - p);
    for (i, &w) in g.self_weights().iter().enumerate() {
        if w > 0.0 {
            let c = base / 2.0 * w;
            constant += c;
            raw.push((0, i + 1, -c));
        }
    }
    if g.is_directed() {
        for e in g.edges() {
            let c = base / 4.0 * e.weight;
            let (i, j) = (e.from + 1, e.to + 1);
            constant += c * (1.0 + p / 2.0);
            raw.push((0, i, c * (1.0 - p / 2.0)));
            raw.push((0, j, -c * (1.0 + p / 2.0)));
            raw.push((i, j, -c * (1.0 - p / 2.0)));
        }
    } else {
        for e in g.edges() {
            let c = base / 4.0 * e.weight;
            let (i, j) = (e.from + 1, e.to + 1);
            constant += c * (2.0 + p);
            raw.push((0, i, -c * p));
            raw.push((0, j, -c * p));
            raw.push((i, j, -c * (2.0 - p)));
        }
    }
    for t in raw.iter_mut() {
        if t.0 > t.1 {
            std::mem::swap(&mut t.0, &mut t.1);
        }
    }
    raw.sort_by_key(|x| (x.0, x.1));
    let mut terms: Vec<PairTerm> = Vec::with_capacity(raw.len());
    for (a, b, coef) in raw {
        match terms.last_mut() {
            Some(t) if t.a == a && t.b == b => t.coef += coef,
            _ => terms.push(PairTerm { a, b, coef }),
        }
    }
    terms.retain(|t| t.coef != 0.0);
    Ok(SdpProblem {
        n: g.n(),
        p,
        directedness: g.directedness(),
        constant,
        terms,
        constraint_signs: CONSTRAINT_SIGNS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{generate, parse_edge_list, GeneratorKind, GeneratorParams};
    use crate::revenue::ie_revenue_mask;
    use approx::assert_abs_diff_eq;

    #[test]
    fn directed_single_edge_patterns() {
        let g = parse_edge_list("directed 2\n0 1 1").unwrap();
        let prob = build_sdp(&g, 2.0 / 3.0).unwrap();
        assert_abs_diff_eq!(
            prob.integral_objective(&[true, false]),
            2.0 / 9.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            prob.integral_objective(&[false, false]),
            2.0 / 27.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            prob.integral_objective(&[false, true]),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(prob.integral_objective(&[true, true]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn undirected_self_weight() {
        let g = parse_edge_list("undirected 1\n0 0 1").unwrap();
        let prob = build_sdp(&g, 0.586).unwrap();
        assert_abs_diff_eq!(
            prob.integral_objective(&[false]),
            0.586 * 0.414,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(prob.integral_objective(&[true]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn integral_points_reproduce_ie_revenue() {
        for (seed, directed) in [(1, false), (2, true), (3, false), (4, true)] {
            let mut params = GeneratorParams::unit(7, directed);
            params.density = 0.6;
            params.weight_max = 2.5;
            params.seed = seed;
            let plain = generate(GeneratorKind::Random, &params).unwrap();
            let mut b = SocialNetwork::builder(plain.directedness(), 7);
            for e in plain.edges() {
                b.add_edge(e.from, e.to, e.weight).unwrap();
            }
            b.add_self_weight(2, 0.8).unwrap();
            let g = b.build().unwrap();
            for p in [0.5, 0.586, 2.0 / 3.0] {
                let prob = build_sdp(&g, p).unwrap();
                for bits in 0u32..128 {
                    let mask: Vec<bool> = (0..7).map(|i| bits >> i & 1 == 1).collect();
                    assert_abs_diff_eq!(
                        prob.integral_objective(&mask),
                        ie_revenue_mask(&g, &mask, p),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn integral_points_satisfy_constraints_with_slack_minus_one_or_three() {
        for yi in [-1.0f64, 1.0] {
            for yj in [-1.0f64, 1.0] {
                let (x, y, z) = (yi * yj, yi, yj);
                for s in CONSTRAINT_SIGNS {
                    let lhs = s[0] * x + s[1] * y + s[2] * z;
                    assert!(lhs == -1.0 || lhs == 3.0);
                }
            }
        }
    }

    #[test]
    fn rejects_free_pricing() {
        let g = parse_edge_list("directed 2\n0 1 1").unwrap();
        assert!(build_sdp(&g, 1.0).is_err());
        assert!(build_sdp(&g, 0.4).is_err());
    }
}
