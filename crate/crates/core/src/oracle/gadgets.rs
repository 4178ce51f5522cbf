//! Conditional revenue optima of the reduction gadgets.

use serde::{Deserialize, Serialize};

use super::exhaustive::best_ie_exhaustive;
use super::search::undirected_multistart;
use crate::error::{validation, Result};
use crate::netmodel::{gadget, GadgetKind};
use crate::revenue::{best_ordering_for_prices, Strategy};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetRow {
    /// Pinned selection-node prices, or the exploit price for set gadgets.
    pub pattern: Vec<f64>,
    pub value: f64,
    pub witness: Strategy,
}

/// Best revenue of a gadget for each selection-node pricing pattern.
///
/// Selection gadgets take one pricing probability in `[1/2, 1]` per
/// selection node and maximize over the remaining prices; without a
/// pattern, every pattern in `{1/2, 1}^s` is listed. Set gadgets take a
/// single exploit price `p` and maximize over influence sets.
pub fn gadget_revenue_table(kind: GadgetKind, pattern: Option<&[f64]>) -> Result<Vec<GadgetRow>> {
    let g = gadget(kind)?;
    let selection = kind.selection_nodes();
    if selection.is_empty() {
        let p = match (kind, pattern) {
            (GadgetKind::SetEdge { p }, None) => p,
            (GadgetKind::SetEdge { p }, Some(&[q])) if q == p => p,
            (GadgetKind::SetTriangle, Some(&[p])) => p,
            _ => return Err(validation("set gadgets take exactly one exploit price")),
        };
        let r = best_ie_exhaustive(&g, Some(p))?;
        return Ok(vec![GadgetRow {
            pattern: vec![p],
            value: r.best_value,
            witness: r.best_witness,
        }]);
    }
    let patterns: Vec<Vec<f64>> = match pattern {
        Some(pat) => {
            if pat.len() != selection.len() {
                return Err(validation(format!(
                    "pattern has {} entries, gadget has {} selection nodes",
                    pat.len(),
                    selection.len()
                )));
            }
            if pat.iter().any(|x| !(0.5..=1.0).contains(x)) {
                return Err(validation("pattern prices must lie in [1/2, 1]"));
            }
            vec![pat.to_vec()]
        }
        None => (0u32..1 << selection.len())
            .map(|bits| {
                (0..selection.len())
                    .map(|k| if bits >> k & 1 == 1 { 1.0 } else { 0.5 })
                    .collect()
            })
            .collect(),
    };
    patterns
        .into_iter()
        .map(|pat| {
            let mut pinned = vec![None; g.n()];
            for (&node, &p) in selection.iter().zip(&pat) {
                pinned[node] = Some(p);
            }
            let (x, value, _) = undirected_multistart(&g, &pinned, rng::DEFAULT_SEED);
            let witness = Strategy::Marketing(best_ordering_for_prices(&g, &x)?);
            Ok(GadgetRow {
                pattern: pat,
                value,
                witness,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn prices(row: &GadgetRow) -> Vec<f64> {
        match &row.witness {
            Strategy::Marketing(s) => s.prices.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn extended_triangle_patterns() {
        let rows = gadget_revenue_table(GadgetKind::ExtendedTriangle, None).unwrap();
        assert_eq!(rows.len(), 8);
        let value = |pat: [f64; 3]| rows.iter().find(|r| r.pattern == pat).unwrap().value;
        assert_abs_diff_eq!(value([0.5, 0.5, 1.0]), 21.0 / 16.0, epsilon = 1e-9);
        assert_abs_diff_eq!(value([0.5, 1.0, 1.0]), 177.0 / 128.0, epsilon = 1e-9);
        assert_abs_diff_eq!(value([1.0, 1.0, 1.0]), 1.196435, epsilon = 1e-6);
        assert_abs_diff_eq!(value([0.5, 0.5, 0.5]), 1.196435, epsilon = 1e-6);
        let best = rows
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(best, 177.0 / 128.0, epsilon = 1e-9);
        let row = rows.iter().find(|r| r.pattern == [0.5, 1.0, 1.0]).unwrap();
        let mut set_prices = prices(row)[..3].to_vec();
        set_prices.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(set_prices[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(set_prices[1], 9.0 / 16.0, epsilon = 1e-9);
        assert_abs_diff_eq!(set_prices[2], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn three_path_patterns() {
        let one = gadget_revenue_table(GadgetKind::ThreePath, Some(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(one[0].value, 41.0 / 64.0, epsilon = 1e-9);
        let mixed = gadget_revenue_table(GadgetKind::ThreePath, Some(&[0.5, 1.0])).unwrap();
        assert_abs_diff_eq!(mixed[0].value, 0.75, epsilon = 1e-9);
    }

    #[test]
    fn set_gadgets() {
        for p in [0.5, 0.75] {
            let closed = p * (1.0 - p) * (2.0 + p);
            let t = gadget_revenue_table(GadgetKind::SetTriangle, Some(&[p])).unwrap();
            assert_abs_diff_eq!(t[0].value, closed, epsilon = 1e-12);
            let e = gadget_revenue_table(GadgetKind::SetEdge { p }, None).unwrap();
            assert_abs_diff_eq!(e[0].value, closed, epsilon = 1e-12);
            match &t[0].witness {
                Strategy::Ie(s) => assert_eq!(s.influence_set.len(), 1),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn invalid_patterns() {
        assert!(gadget_revenue_table(GadgetKind::ThreePath, Some(&[1.0])).is_err());
        assert!(gadget_revenue_table(GadgetKind::ThreePath, Some(&[0.4, 1.0])).is_err());
        assert!(gadget_revenue_table(GadgetKind::SetTriangle, None).is_err());
    }
}
