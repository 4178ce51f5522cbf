//! Numeric certificates for approximation-ratio expressions.
//!
//! Each certificate minimizes (or, for the random-IE family, maximizes) a
//! closed-form ratio over its domain by an exhaustive grid followed by a
//! pattern-search refinement of the best grid cells.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::revenue::generalized_coefficients;
use crate::sdprelax::{rotate, rotated_pair_angle_clamped};
use crate::strategies::{RoundingSchedule, PAPER_Q};

/// Default grid step over `[0, pi]^3`.
pub const ANGLE_GRID_STEP: f64 = PI / 256.0;
/// Default grid step over probability intervals.
pub const PROB_GRID_STEP: f64 = 1e-3;
/// Pattern-search refinement stops below this step.
pub const REFINE_TOL: f64 = 1e-8;
/// Grid cells refined per certificate.
const CANDIDATES: usize = 12;
/// Ratios with a smaller denominator are treated as undefined.
const MIN_DENOMINATOR: f64 = 1e-9;
const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    RhoDirected,
    Rho1,
    Rho2,
    Thm4Terms,
    Thm5Term,
    Eq3,
    Eq10,
}

impl std::str::FromStr for CertificateKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| validation(format!("unknown certificate kind `{s}`")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<RoundingSchedule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimum,
    Maximum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub name: String,
    pub value: f64,
    pub argmin: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub kind: CertificateKind,
    /// Parameters after defaults are applied.
    pub params: CertificateParams,
    /// The certified extreme value (a maximum when `sense` says so).
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub grid_step: f64,
    pub sense: Sense,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermValue>,
}

/// Whether `(cos x, cos y, cos z)` satisfies the four pairwise rows.
fn cosines_feasible(x: f64, y: f64, z: f64) -> bool {
    let (cx, cy, cz) = (x.cos(), y.cos(), z.cos());
    cx + cy + cz >= -1.0 - CONSTRAINT_TOL
        && cx - cy - cz >= -1.0 - CONSTRAINT_TOL
        && -cx - cy + cz >= -1.0 - CONSTRAINT_TOL
        && -cx + cy - cz >= -1.0 - CONSTRAINT_TOL
}

/// Per-edge ratio of rounded to relaxed revenue on directed networks, without
/// the leading `2 / pi`.
pub fn rho_directed_ratio(p: f64, gamma: f64, x: f64, y: f64, z: f64) -> Option<f64> {
    if !cosines_feasible(x, y, z) {
        return None;
    }
    let (a, b) = (1.0 - p / 2.0, 1.0 + p / 2.0);
    let den = b + a * y.cos() - b * z.cos() - a * x.cos();
    if den <= MIN_DENOMINATOR {
        return None;
    }
    let g = rotated_pair_angle_clamped(x, y, z, gamma);
    Some((a * g - a * rotate(y, gamma) + b * rotate(z, gamma)) / den)
}

/// Per-edge ratio on undirected networks, without the leading `2 / pi`.
pub fn rho2_ratio(p: f64, gamma: f64, x: f64, y: f64, z: f64) -> Option<f64> {
    if !cosines_feasible(x, y, z) {
        return None;
    }
    let den = 2.0 + p - p * y.cos() - p * z.cos() - (2.0 - p) * x.cos();
    if den <= MIN_DENOMINATOR {
        return None;
    }
    let g = rotated_pair_angle_clamped(x, y, z, gamma);
    Some(((2.0 - p) * g + p * rotate(y, gamma) + p * rotate(z, gamma)) / den)
}

/// Per-loop ratio, without the leading `2 / pi`.
pub fn rho1_ratio(gamma: f64, x: f64) -> Option<f64> {
    let den = 1.0 - x.cos();
    (den > MIN_DENOMINATOR).then(|| rotate(x, gamma) / den)
}

/// Loop term of the rounding guarantee for undirected networks.
pub fn thm4_left(s: &RoundingSchedule, x: f64) -> Option<f64> {
    let den = x * (1.0 - x);
    let c = s.p_hat * (1.0 - s.p_hat);
    (den > MIN_DENOMINATOR).then(|| c * s.exclusion(x) / den)
}

/// Edge term of the rounding guarantee for undirected networks, `y <= x`.
pub fn thm4_right(s: &RoundingSchedule, x: f64, y: f64) -> Option<f64> {
    if y > x {
        return None;
    }
    let den = x * y * (1.0 - y);
    if den <= MIN_DENOMINATOR {
        return None;
    }
    let (ix, iy, ex, ey) = (
        s.inclusion(x),
        s.inclusion(y),
        s.exclusion(x),
        s.exclusion(y),
    );
    let c = s.p_hat * (1.0 - s.p_hat);
    Some(c * (ix * ey + ex * iy + s.p_hat * ex * ey) / den)
}

/// Edge term of the rounding guarantee for directed networks.
pub fn directed_rounding_ratio(s: &RoundingSchedule, x: f64, y: f64) -> Option<f64> {
    let den = x * y * (1.0 - y);
    if den <= MIN_DENOMINATOR {
        return None;
    }
    let c = s.p_hat * (1.0 - s.p_hat);
    Some(
        c * (s.inclusion(x) * s.exclusion(y) + 0.5 * s.p_hat * s.exclusion(x) * s.exclusion(y))
            / den,
    )
}

/// `2 (3 - 2 y) / (27 y (1 - y))`.
pub fn thm5_ratio(y: f64) -> Option<f64> {
    let den = 27.0 * y * (1.0 - y);
    (den > MIN_DENOMINATOR).then(|| 2.0 * (3.0 - 2.0 * y) / den)
}

/// Ratio of random `IE(q, p)` revenue to `(W + N) / 4` at loop ratio `lambda`.
pub fn eq3_ratio(q: f64, p: f64, lambda: f64, directed: bool) -> f64 {
    let base = 4.0 * (1.0 - q) * p * (1.0 - p);
    if directed {
        base * (q + p * (1.0 - q) / 2.0)
    } else {
        base * (lambda + 2.0 * q + p * (1.0 - q)) / (1.0 + lambda)
    }
}

/// Grid search plus local refinement of `f` over the box `[lo, hi]`.
/// Returns the minimum, its location and the grid step actually used.
pub fn minimize_box<F>(f: &F, lo: &[f64], hi: &[f64], step: f64) -> Option<(f64, Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let dim = lo.len();
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| ((h - l) / step).ceil().max(1.0) as usize + 1)
        .collect();
    let steps: Vec<f64> = (0..dim)
        .map(|k| (hi[k] - lo[k]) / (counts[k] - 1) as f64)
        .collect();
    let inner: usize = counts[1..].iter().product();
    let mut slices: Vec<(f64, Vec<f64>)> = (0..counts[0])
        .into_par_iter()
        .filter_map(|i0| {
            let mut point = vec![0.0; dim];
            let mut best: Option<(f64, Vec<f64>)> = None;
            for flat in 0..inner {
                point[0] = lo[0] + i0 as f64 * steps[0];
                let mut rest = flat;
                for k in (1..dim).rev() {
                    point[k] = lo[k] + (rest % counts[k]) as f64 * steps[k];
                    rest /= counts[k];
                }
                if let Some(v) = f(&point) {
                    if best.as_ref().is_none_or(|b| v < b.0) {
                        best = Some((v, point.clone()));
                    }
                }
            }
            best
        })
        .collect();
    slices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let h0 = steps.iter().copied().fold(0.0, f64::max);
    let grid_step = h0;
    slices
        .into_iter()
        .take(CANDIDATES)
        .map(|(v, x)| pattern_search(f, x, v, lo, hi, h0))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(v, x)| (v, x, grid_step))
}

/// Compass search over all `3^d - 1` directions with step halving.
fn pattern_search<F>(
    f: &F,
    mut x: Vec<f64>,
    mut fx: f64,
    lo: &[f64],
    hi: &[f64],
    h0: f64,
) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let dim = x.len();
    let directions: Vec<Vec<f64>> = (0..3usize.pow(dim as u32))
        .map(|code| {
            let mut c = code;
            (0..dim)
                .map(|_| {
                    let s = (c % 3) as f64 - 1.0;
                    c /= 3;
                    s
                })
                .collect::<Vec<f64>>()
        })
        .filter(|d| d.iter().any(|&s| s != 0.0))
        .collect();
    let mut h = h0;
    let mut evals = 0;
    while h > REFINE_TOL && evals < 200_000 {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for d in &directions {
            let cand: Vec<f64> = (0..dim)
                .map(|k| (x[k] + h * d[k]).clamp(lo[k], hi[k]))
                .collect();
            evals += 1;
            if let Some(v) = f(&cand) {
                if v < fx && best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, cand));
                }
            }
        }
        match best {
            Some((v, c)) => {
                fx = v;
                x = c;
            }
            None => h /= 2.0,
        }
    }
    (fx, x)
}

fn check_unit(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&v) {
        return Err(validation(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn term(name: &str, value: f64, argmin: Vec<f64>) -> TermValue {
    TermValue {
        name: name.to_string(),
        value,
        argmin,
    }
}

fn no_feasible_point() -> crate::Error {
    crate::Error::Domain("no grid point inside the domain".into())
}

/// Certifies the ratio expression named by `kind`.
pub fn ratio_certificate(
    kind: CertificateKind,
    params: &CertificateParams,
) -> Result<CertificateReport> {
    let mut resolved = params.clone();
    let report = |min_value: f64,
                  argmin: Vec<f64>,
                  grid_step: f64,
                  sense: Sense,
                  terms: Vec<TermValue>,
                  resolved: CertificateParams| {
        Ok(CertificateReport {
            kind,
            params: resolved,
            min_value,
            argmin,
            grid_step,
            sense,
            terms,
        })
    };
    match kind {
        CertificateKind::RhoDirected | CertificateKind::Rho2 => {
            let directed = kind == CertificateKind::RhoDirected;
            let (dp, dg) = if directed {
                (2.0 / 3.0, 0.722)
            } else {
                (0.586, 0.209)
            };
            let p = *resolved.p.get_or_insert(dp);
            let gamma = *resolved.gamma.get_or_insert(dg);
            let step = *resolved.grid_step.get_or_insert(ANGLE_GRID_STEP);
            check_unit("p", p, 0.5, 1.0)?;
            check_unit("gamma", gamma, 0.0, 1.0)?;
            let f = |v: &[f64]| {
                if directed {
                    rho_directed_ratio(p, gamma, v[0], v[1], v[2])
                } else {
                    rho2_ratio(p, gamma, v[0], v[1], v[2])
                }
            };
            let (v, x, h) =
                minimize_box(&f, &[0.0; 3], &[PI; 3], step).ok_or_else(no_feasible_point)?;
            report(2.0 / PI * v, x, h, Sense::Minimum, Vec::new(), resolved)
        }
        CertificateKind::Rho1 => {
            let gamma = *resolved.gamma.get_or_insert(0.209);
            let step = *resolved.grid_step.get_or_insert(PROB_GRID_STEP);
            check_unit("gamma", gamma, 0.0, 1.0)?;
            let f = |v: &[f64]| rho1_ratio(gamma, v[0]);
            let (v, x, h) = minimize_box(&f, &[0.0], &[PI], step).ok_or_else(no_feasible_point)?;
            report(2.0 / PI * v, x, h, Sense::Minimum, Vec::new(), resolved)
        }
        CertificateKind::Thm4Terms => {
            let s = *resolved
                .schedule
                .get_or_insert(RoundingSchedule::undirected());
            let step = *resolved.grid_step.get_or_insert(PROB_GRID_STEP);
            let left = |v: &[f64]| thm4_left(&s, v[0]);
            let right = |v: &[f64]| thm4_right(&s, v[0], v[1]);
            let (lv, lx, h) =
                minimize_box(&left, &[0.5], &[1.0], step).ok_or_else(no_feasible_point)?;
            let (rv, rx, _) = minimize_box(&right, &[0.5, 0.5], &[1.0, 1.0], step)
                .ok_or_else(no_feasible_point)?;
            let terms = vec![term("loop", lv, lx.clone()), term("edge", rv, rx.clone())];
            let (v, x) = if lv <= rv { (lv, lx) } else { (rv, rx) };
            report(v, x, h, Sense::Minimum, terms, resolved)
        }
        CertificateKind::Thm5Term => {
            let step = *resolved.grid_step.get_or_insert(PROB_GRID_STEP);
            let f = |v: &[f64]| thm5_ratio(v[0]);
            let (v, x, h) = minimize_box(&f, &[0.5], &[1.0], step).ok_or_else(no_feasible_point)?;
            report(v, x, h, Sense::Minimum, Vec::new(), resolved)
        }
        CertificateKind::Eq3 => {
            let directed = *resolved.directed.get_or_insert(false);
            let lambda = *resolved.lambda.get_or_insert(0.0);
            let step = *resolved.grid_step.get_or_insert(PROB_GRID_STEP);
            if !(lambda >= 0.0 && lambda.is_finite()) {
                return Err(validation(format!(
                    "lambda = {lambda} must be non-negative"
                )));
            }
            let f = |v: &[f64]| Some(-eq3_ratio(v[0], v[1], lambda, directed));
            let (v, x, h) =
                minimize_box(&f, &[0.0, 0.5], &[1.0, 1.0], step).ok_or_else(no_feasible_point)?;
            report(-v, x, h, Sense::Maximum, Vec::new(), resolved)
        }
        CertificateKind::Eq10 => {
            let directed = *resolved.directed.get_or_insert(false);
            let q = resolved.q.get_or_insert_with(|| PAPER_Q.to_vec()).clone();
            crate::revenue::GeneralizedIeStrategy::new(q.clone(), None)?;
            let (s, e) = generalized_coefficients(&q, directed);
            let terms = if directed {
                vec![term("edge", 4.0 * e, Vec::new())]
            } else {
                vec![
                    term("loop", 4.0 * s, Vec::new()),
                    term("edge", 4.0 * e, Vec::new()),
                ]
            };
            let v = terms.iter().map(|t| t.value).fold(f64::INFINITY, f64::min);
            report(v, q, 0.0, Sense::Minimum, terms, resolved)
        }
    }
}
