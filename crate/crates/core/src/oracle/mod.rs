//! Ground truth: exhaustive best-IE search, heuristic strategy search,
//! gadget revenue tables and a Monte Carlo simulator of the offer process.

mod exhaustive;
mod gadgets;
mod search;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::revenue::Strategy;

pub use exhaustive::{best_ie_exhaustive, best_ie_price, EXHAUSTIVE_LIMIT};
pub use gadgets::{gadget_revenue_table, GadgetRow};
pub use search::{
    best_permutation, best_strategy_search, optimize_prices_for_order, DIRECTED_SEARCH_LIMIT,
    SEED_RESOLUTION, UNDIRECTED_SEARCH_LIMIT,
};
pub use simulate::{simulate, simulate_random_ie, SimulationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    Grid,
    Multistart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub best_value: f64,
    pub best_witness: Strategy,
    /// Other witnesses attaining `best_value`, in enumeration order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tied_witnesses: Vec<Strategy>,
    pub search_space_size: u64,
    pub method: SearchMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}
