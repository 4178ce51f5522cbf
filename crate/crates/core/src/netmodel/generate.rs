//! Deterministic and seeded network generators, plus the gadget networks
//! from the hardness constructions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Directedness, NetworkBuilder, SocialNetwork};
use crate::error::{validation, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Cycle,
    Path,
    CompleteDag,
    Bipartite,
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub directed: bool,
    /// Edge weights are drawn uniformly from `[weight_min, weight_max]`;
    /// equal bounds give constant weights.
    pub weight_min: f64,
    pub weight_max: f64,
    /// Edge probability for `random` and `bipartite`.
    pub density: f64,
    pub seed: u64,
    /// Size of the first side for `bipartite` (default `n / 2`).
    pub left: Option<usize>,
    /// For directed `random`: only edges `i -> j` with `i < j`.
    pub acyclic: bool,
}

impl GeneratorParams {
    pub fn unit(n: usize, directed: bool) -> Self {
        GeneratorParams {
            n,
            directed,
            weight_min: 1.0,
            weight_max: 1.0,
            density: 1.0,
            seed: rng::DEFAULT_SEED,
            left: None,
            acyclic: false,
        }
    }

    fn directedness(&self) -> Directedness {
        if self.directed {
            Directedness::Directed
        } else {
            Directedness::Undirected
        }
    }
}

pub fn generate(kind: GeneratorKind, params: &GeneratorParams) -> Result<SocialNetwork> {
    let n = params.n;
    if n < 1 {
        return Err(validation("generator needs n >= 1"));
    }
    let (lo, hi) = (params.weight_min, params.weight_max);
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
        return Err(validation(format!("invalid weight range [{lo}, {hi}]")));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(validation(format!(
            "density {} outside [0, 1]",
            params.density
        )));
    }
    let mut rng = rng::seeded(params.seed);
    let mut weight = move || {
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..=hi)
        }
    };
    // Edge-existence draws use their own stream so weights and topology vary independently.
    let mut coin = rng::stream(params.seed, 1);
    let mut b = NetworkBuilder::new(params.directedness(), n);

    match kind {
        GeneratorKind::Cycle => {
            if n < 3 {
                return Err(validation("cycle needs n >= 3"));
            }
            for i in 0..n {
                b.add_edge(i, (i + 1) % n, weight())?;
            }
        }
        GeneratorKind::Path => {
            for i in 1..n {
                b.add_edge(i - 1, i, weight())?;
            }
        }
        GeneratorKind::CompleteDag => {
            let mut b2 = NetworkBuilder::new(Directedness::Directed, n);
            for i in 0..n {
                for j in i + 1..n {
                    b2.add_edge(i, j, weight())?;
                }
            }
            return b2.build();
        }
        GeneratorKind::Bipartite => {
            let left = params.left.unwrap_or(n / 2);
            if left == 0 || left >= n {
                return Err(validation(format!(
                    "bipartite side size {left} must be in 1..{n}"
                )));
            }
            for i in 0..left {
                for j in left..n {
                    if coin.random_bool(params.density) {
                        b.add_edge(i, j, weight())?;
                    }
                }
            }
        }
        GeneratorKind::Random => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let wanted = if params.directed {
                        !params.acyclic || i < j
                    } else {
                        i < j
                    };
                    if wanted && coin.random_bool(params.density) {
                        b.add_edge(i, j, weight())?;
                    }
                }
            }
        }
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GadgetKind {
    /// Unit triangle on set nodes 0, 1, 2 with pendant selection nodes
    /// 3, 4, 5 attached to 0, 1, 2 respectively.
    ExtendedTriangle,
    /// Set nodes 0 - 1 joined by an edge, selection node 2 on 0 and 3 on 1.
    ThreePath,
    /// Unit triangle on 0, 1, 2.
    SetTriangle,
    /// A single edge of weight `2 + p`.
    SetEdge { p: f64 },
}

impl GadgetKind {
    /// Indices of the selection nodes (empty for the set gadgets).
    pub fn selection_nodes(&self) -> &'static [usize] {
        match self {
            GadgetKind::ExtendedTriangle => &[3, 4, 5],
            GadgetKind::ThreePath => &[2, 3],
            GadgetKind::SetTriangle | GadgetKind::SetEdge { .. } => &[],
        }
    }
}

pub fn gadget(kind: GadgetKind) -> Result<SocialNetwork> {
    let edges: Vec<(usize, usize, f64)> = match kind {
        GadgetKind::ExtendedTriangle => {
            vec![
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (1, 4, 1.0),
                (2, 5, 1.0),
            ]
        }
        GadgetKind::ThreePath => vec![(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0)],
        GadgetKind::SetTriangle => vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
        GadgetKind::SetEdge { p } => {
            if !(0.5..1.0).contains(&p) {
                return Err(validation(format!(
                    "set-edge pricing probability {p} outside [1/2, 1)"
                )));
            }
            vec![(0, 1, 2.0 + p)]
        }
    };
    let n = edges
        .iter()
        .map(|&(i, j, _)| i.max(j) + 1)
        .max()
        .unwrap_or(0);
    let mut b = NetworkBuilder::new(Directedness::Undirected, n);
    for (i, j, w) in edges {
        b.add_edge(i, j, w)?;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle() {
        let g = generate(GeneratorKind::Cycle, &GeneratorParams::unit(4, false)).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.total_edge_weight(), 4.0);
        for i in 0..4 {
            assert_eq!(g.weight(i, (i + 1) % 4), 1.0);
            assert_eq!(g.weight(i, (i + 2) % 4), 0.0);
        }
    }

    #[test]
    fn complete_dag_has_forward_edges_only() {
        let g = generate(GeneratorKind::CompleteDag, &GeneratorParams::unit(4, true)).unwrap();
        assert!(g.is_directed());
        assert_eq!(g.edges().len(), 6);
        assert!(g.edges().iter().all(|e| e.from < e.to));
    }

    #[test]
    fn zero_buyers_rejected() {
        for kind in [
            GeneratorKind::Random,
            GeneratorKind::Cycle,
            GeneratorKind::Path,
        ] {
            assert!(generate(kind, &GeneratorParams::unit(0, false)).is_err());
        }
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let mut p = GeneratorParams::unit(12, false);
        p.density = 0.3;
        p.weight_min = 0.5;
        p.weight_max = 2.0;
        let a = generate(GeneratorKind::Random, &p).unwrap();
        let b = generate(GeneratorKind::Random, &p).unwrap();
        assert_eq!(a.edges(), b.edges());
        p.seed += 1;
        let c = generate(GeneratorKind::Random, &p).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn acyclic_random_digraph() {
        let mut p = GeneratorParams::unit(9, true);
        p.density = 0.5;
        p.acyclic = true;
        let g = generate(GeneratorKind::Random, &p).unwrap();
        assert!(g.edges().iter().all(|e| e.from < e.to));
    }

    #[test]
    fn gadget_shapes() {
        let t = gadget(GadgetKind::ExtendedTriangle).unwrap();
        assert_eq!(
            (
                t.n(),
                t.edges().len(),
                t.total_edge_weight(),
                t.total_self_weight()
            ),
            (6, 6, 6.0, 0.0)
        );
        let p = gadget(GadgetKind::ThreePath).unwrap();
        assert_eq!((p.n(), p.edges().len(), p.total_edge_weight()), (4, 3, 3.0));
        let s = gadget(GadgetKind::SetTriangle).unwrap();
        assert_eq!((s.n(), s.edges().len()), (3, 3));
        let e = gadget(GadgetKind::SetEdge { p: 0.5 }).unwrap();
        assert_eq!(e.edges().len(), 1);
        assert_eq!(e.weight(0, 1), 2.5);
        assert!(gadget(GadgetKind::SetEdge { p: 1.0 }).is_err());
        assert!(gadget(GadgetKind::SetEdge { p: 0.4 }).is_err());
    }
}
