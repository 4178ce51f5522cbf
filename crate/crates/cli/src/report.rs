//! Report types and JSON rendering.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use netrev::revenue::revenue_bounds;
use netrev::SocialNetwork;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub name: String,
    pub n: usize,
    pub directed: bool,
    pub edges: usize,
    pub total_edge_weight: f64,
    pub total_self_weight: f64,
}

impl InstanceDescriptor {
    pub fn new(name: impl Into<String>, g: &SocialNetwork) -> Self {
        InstanceDescriptor {
            name: name.into(),
            n: g.n(),
            directed: g.is_directed(),
            edges: g.edges().len(),
            total_edge_weight: g.total_edge_weight(),
            total_self_weight: g.total_self_weight(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub method: String,
    pub value: f64,
    /// `revenue / value`, or 1 when both are zero.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub instance: InstanceDescriptor,
    pub family: String,
    pub parameters: Value,
    pub revenue: f64,
    /// `R* = (W + N) / 4`.
    pub upper_bound: f64,
    /// `revenue / upper_bound`, or 0 when the bound is 0.
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_s: f64,
}

pub fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        1.0
    } else {
        0.0
    }
}

impl ExperimentReport {
    pub fn new(
        instance: InstanceDescriptor,
        g: &SocialNetwork,
        family: &str,
        parameters: Value,
        revenue: f64,
        seed: Option<u64>,
    ) -> Self {
        let upper_bound = revenue_bounds(g).upper;
        ExperimentReport {
            instance,
            family: family.to_string(),
            parameters,
            revenue,
            upper_bound,
            ratio: if upper_bound > 0.0 {
                revenue / upper_bound
            } else {
                0.0
            },
            oracle: None,
            seed,
            wall_time_s: 0.0,
        }
    }

    pub fn with_oracle(mut self, method: &str, value: f64) -> Self {
        let r = ratio(self.revenue, value);
        self.oracle = Some(OracleComparison {
            method: method.to_string(),
            value,
            ratio: r,
        });
        self
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    serde_json::to_string_pretty(&v).expect("value serializes")
}

/// Removes every `wall_time_s` field, for comparing runs.
pub fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip_wall_time);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}
