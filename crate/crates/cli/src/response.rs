use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Dist {
    Hops(u32),
    Real(f64),
}

/// Query output shared by the CLI and the HTTP service. Node ids are the
/// labels from the input edge list. `path` is omitted unless requested and
/// `null` when the pair was not resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryResponse {
    pub distance: Option<Dist>,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Option<Vec<u64>>>,
    pub probes: u32,
    pub micros: f64,
}

impl QueryResponse {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}
