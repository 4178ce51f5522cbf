//! Social-network data model.
//!
//! A [`SocialNetwork`] is an immutable weighted graph on buyers `0..n`.
//! `w_ji` is the influence of buyer `j` on buyer `i`; `w_ii` is the
//! stand-alone value of buyer `i`. Undirected networks store each unordered
//! pair once and answer `weight(i, j) == weight(j, i)`.

mod generate;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

pub use generate::{gadget, generate, GadgetKind, GeneratorKind, GeneratorParams};
pub use io::{load_network, parse_edge_list, save_network, to_edge_list};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directedness {
    Directed,
    Undirected,
}

impl Directedness {
    pub fn is_directed(self) -> bool {
        matches!(self, Directedness::Directed)
    }
}

impl fmt::Display for Directedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Directedness::Directed => "directed",
            Directedness::Undirected => "undirected",
        })
    }
}

/// A weighted edge. For undirected networks `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct SocialNetwork {
    directedness: Directedness,
    edges: Vec<Edge>,
    self_weights: Vec<f64>,
    labels: Vec<u64>,
    /// `incoming[i]` lists `(j, w_ji)`; for undirected networks every
    /// neighbour of `i`.
    incoming: Vec<Vec<(usize, f64)>>,
    total_edge_weight: f64,
    total_self_weight: f64,
}

impl SocialNetwork {
    pub fn builder(directedness: Directedness, n: usize) -> NetworkBuilder {
        NetworkBuilder::new(directedness, n)
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness.is_directed()
    }

    /// Number of buyers.
    pub fn n(&self) -> usize {
        self.self_weights.len()
    }

    /// Canonical edge list, sorted by `(from, to)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn self_weights(&self) -> &[f64] {
        &self.self_weights
    }

    pub fn self_weight(&self, i: usize) -> f64 {
        self.self_weights[i]
    }

    /// External label of each buyer (identity unless the source file used
    /// sparse labels).
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// `(j, w_ji)` for every buyer `j` that influences `i`.
    pub fn incoming(&self, i: usize) -> &[(usize, f64)] {
        &self.incoming[i]
    }

    /// Influence `w_ji` of `j` on `i`; for `i == j` the self-weight.
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        if i == j {
            return self.self_weights[i];
        }
        let key = if self.is_directed() {
            (j, i)
        } else {
            (j.min(i), j.max(i))
        };
        self.edges
            .binary_search_by(|e| (e.from, e.to).cmp(&key))
            .map(|k| self.edges[k].weight)
            .unwrap_or(0.0)
    }

    /// `W`: total edge weight, each undirected pair counted once.
    pub fn total_edge_weight(&self) -> f64 {
        self.total_edge_weight
    }

    /// `N`: total self-weight.
    pub fn total_self_weight(&self) -> f64 {
        self.total_self_weight
    }

    /// `lambda = N / W`, undefined when there are no edges.
    pub fn lambda(&self) -> Option<f64> {
        (self.total_edge_weight > 0.0).then(|| self.total_self_weight / self.total_edge_weight)
    }

    /// Visits every ordered influence pair `(j, i, w_ji)` with `j != i`;
    /// undirected edges are visited in both directions.
    pub fn for_each_influence(&self, mut f: impl FnMut(usize, usize, f64)) {
        for e in &self.edges {
            f(e.from, e.to, e.weight);
            if !self.is_directed() {
                f(e.to, e.from, e.weight);
            }
        }
    }

    /// Replaces every self-weight `w_ii > 0` of a directed network by a
    /// fresh buyer `i'` with a single edge `(i', i)` of weight `w_ii`.
    /// New buyers are appended in order of `i`. Undirected networks are
    /// returned unchanged.
    pub fn eliminate_selfloops(&self) -> SocialNetwork {
        if !self.is_directed() || self.self_weights.iter().all(|&w| w == 0.0) {
            return self.clone();
        }
        let extra: Vec<(usize, f64)> = self
            .self_weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        let n = self.n();
        let next_label = self.labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut b = NetworkBuilder::new(Directedness::Directed, n + extra.len());
        let mut labels = self.labels.clone();
        for e in &self.edges {
            b.push(e.from, e.to, e.weight);
        }
        for (k, &(i, w)) in extra.iter().enumerate() {
            b.push(n + k, i, w);
            labels.push(next_label + k as u64);
        }
        b.labels = Some(labels);
        b.build().expect("self-loop elimination preserves validity")
    }

    /// Copy with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<SocialNetwork> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(validation(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        let mut b = NetworkBuilder::new(self.directedness, self.n());
        for e in &self.edges {
            b.push(e.from, e.to, e.weight * factor);
        }
        for (i, &w) in self.self_weights.iter().enumerate() {
            b.self_weights[i] = w * factor;
        }
        b.labels = Some(self.labels.clone());
        b.build()
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            directedness: self.directedness,
            n: self.n(),
            edges: self.edges.clone(),
            self_weights: self.self_weights.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<SocialNetwork> {
        let mut b = NetworkBuilder::new(doc.directedness, doc.n);
        for e in &doc.edges {
            b.add_edge(e.from, e.to, e.weight)?;
        }
        if !doc.self_weights.is_empty() {
            if doc.self_weights.len() != doc.n {
                return Err(crate::Error::Dimension {
                    expected: doc.n,
                    got: doc.self_weights.len(),
                });
            }
            for (i, &w) in doc.self_weights.iter().enumerate() {
                if w != 0.0 {
                    b.add_self_weight(i, w)?;
                }
            }
        }
        if !doc.labels.is_empty() {
            b = b.with_labels(doc.labels.clone())?;
        }
        b.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("network document serializes")
    }

    pub fn from_json(text: &str) -> Result<SocialNetwork> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        SocialNetwork::from_document(&doc)
    }
}

/// Serialized form of a network (JSON export).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub directedness: Directedness,
    pub n: usize,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub self_weights: Vec<f64>,
    #[serde(default)]
    pub labels: Vec<u64>,
}

/// Accumulates edges and self-weights, then validates into a
/// [`SocialNetwork`]. Duplicate edges are summed.
#[derive(Clone, Debug)]
pub struct NetworkBuilder {
    directedness: Directedness,
    n: usize,
    edges: BTreeMap<(usize, usize), f64>,
    self_weights: Vec<f64>,
    labels: Option<Vec<u64>>,
    duplicates: usize,
}

impl NetworkBuilder {
    pub fn new(directedness: Directedness, n: usize) -> Self {
        NetworkBuilder {
            directedness,
            n,
            edges: BTreeMap::new(),
            self_weights: vec![0.0; n],
            labels: None,
            duplicates: 0,
        }
    }

    fn check_weight(w: f64) -> Result<()> {
        if !w.is_finite() {
            return Err(validation(format!("weight must be finite, got {w}")));
        }
        if w < 0.0 {
            return Err(validation(format!("negative weight {w}")));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(validation(format!(
                "buyer index {i} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    fn push(&mut self, from: usize, to: usize, w: f64) {
        let key = match self.directedness {
            Directedness::Directed => (from, to),
            Directedness::Undirected => (from.min(to), from.max(to)),
        };
        let slot = self.edges.entry(key).or_insert(0.0);
        if *slot != 0.0 {
            self.duplicates += 1;
        }
        *slot += w;
    }

    /// Adds `w` to the edge `(from, to)`. For undirected networks `from ==
    /// to` adds to the self-weight; for directed networks a self-loop is
    /// rejected (use [`NetworkBuilder::add_self_weight`] and
    /// [`SocialNetwork::eliminate_selfloops`]).
    pub fn add_edge(&mut self, from: usize, to: usize, w: f64) -> Result<&mut Self> {
        self.check_index(from)?;
        self.check_index(to)?;
        Self::check_weight(w)?;
        if from == to {
            if self.directedness.is_directed() {
                return Err(validation(format!(
                    "self-loop ({from}, {from}) in a directed network; store it as a self-weight and apply eliminate_selfloops"
                )));
            }
            if self.self_weights[from] != 0.0 {
                self.duplicates += 1;
            }
            self.self_weights[from] += w;
        } else {
            self.push(from, to, w);
        }
        Ok(self)
    }

    /// Adds `w` to the self-weight `w_ii`. Allowed for directed networks as
    /// a pre-normalization state.
    pub fn add_self_weight(&mut self, i: usize, w: f64) -> Result<&mut Self> {
        self.check_index(i)?;
        Self::check_weight(w)?;
        self.self_weights[i] += w;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(crate::Error::Dimension {
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Number of duplicate edge (or self-weight) entries merged so far.
    pub fn duplicates_merged(&self) -> usize {
        self.duplicates
    }

    pub fn build(self) -> Result<SocialNetwork> {
        let n = self.n;
        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((from, to), weight)| Edge { from, to, weight })
            .collect();
        let mut incoming = vec![Vec::new(); n];
        for e in &edges {
            incoming[e.to].push((e.from, e.weight));
            if !self.directedness.is_directed() {
                incoming[e.from].push((e.to, e.weight));
            }
        }
        for list in &mut incoming {
            list.sort_by_key(|&(j, _)| j);
        }
        let weights: Vec<f64> = edges.iter().map(|e| e.weight).collect();
        let total_edge_weight = crate::numeric::stable_sum(&weights);
        let total_self_weight = crate::numeric::stable_sum(&self.self_weights);
        Ok(SocialNetwork {
            directedness: self.directedness,
            edges,
            labels: self.labels.unwrap_or_else(|| (0..n as u64).collect()),
            self_weights: self.self_weights,
            incoming,
            total_edge_weight,
            total_self_weight,
        })
    }
}
