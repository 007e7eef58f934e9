use serde::{Deserialize, Serialize};

use super::{Branch, Network, NetworkError, Node, NodeKind};

/// Node and branch ids may be written as JSON strings or numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Id {
    Text(String),
    Number(serde_json::Number),
}

impl Id {
    fn into_string(self) -> String {
        match self {
            Id::Text(s) => s,
            Id::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDocument {
    #[serde(rename = "base_power_kVA")]
    base_power_kva: f64,
    #[serde(rename = "base_voltage_kV")]
    base_voltage_kv: f64,
    nodes: Vec<NodeRecord>,
    branches: Vec<BranchRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: Id,
    kind: NodeKind,
    #[serde(default)]
    p_pu: f64,
    #[serde(default)]
    q_pu: f64,
    v_min: f64,
    v_max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchRecord {
    id: Id,
    from: Id,
    to: Id,
    r_pu: f64,
    x_pu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    i_max_pu: Option<f64>,
    #[serde(default)]
    initially_open: bool,
}

/// Parses a JSON network document. The branches flagged `initially_open`
/// define the starting configuration and must number exactly `A`.
pub fn parse_network(text: &str) -> Result<Network, NetworkError> {
    let doc: NetworkDocument =
        serde_json::from_str(text).map_err(|e| NetworkError::Malformed(e.to_string()))?;
    let nodes: Vec<Node> = doc
        .nodes
        .into_iter()
        .map(|r| Node {
            id: r.id.into_string(),
            kind: r.kind,
            p_load: r.p_pu,
            q_load: r.q_pu,
            v_min: r.v_min,
            v_max: r.v_max,
        })
        .collect();
    let lookup: std::collections::HashMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();

    let mut branches = Vec::with_capacity(doc.branches.len());
    let mut open = Vec::new();
    for (b, record) in doc.branches.into_iter().enumerate() {
        let id = record.id.into_string();
        let end = |node: Id| {
            let node = node.into_string();
            lookup.get(node.as_str()).copied().ok_or(NetworkError::UnknownNode {
                branch: id.clone(),
                node,
            })
        };
        let from = end(record.from)?;
        let to = end(record.to)?;
        branches.push(Branch {
            id,
            from,
            to,
            resistance: record.r_pu,
            reactance: record.x_pu,
            i_max: record.i_max_pu,
        });
        if record.initially_open {
            open.push(b);
        }
    }
    Network::new(doc.base_power_kva, doc.base_voltage_kv, nodes, branches, &open)
}

impl Network {
    /// Serializes to the JSON document format read by [`parse_network`],
    /// marking `open` (or the initial configuration) as initially open.
    pub fn to_json(&self, open: Option<&super::RadialConfiguration>) -> String {
        let open = open.unwrap_or_else(|| self.initial_configuration());
        let doc = NetworkDocument {
            base_power_kva: self.base_power_kva(),
            base_voltage_kv: self.base_voltage_kv(),
            nodes: self
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: Id::Text(n.id.clone()),
                    kind: n.kind,
                    p_pu: n.p_load,
                    q_pu: n.q_load,
                    v_min: n.v_min,
                    v_max: n.v_max,
                })
                .collect(),
            branches: self
                .branches()
                .iter()
                .enumerate()
                .map(|(b, br)| BranchRecord {
                    id: Id::Text(br.id.clone()),
                    from: Id::Text(self.nodes()[br.from].id.clone()),
                    to: Id::Text(self.nodes()[br.to].id.clone()),
                    r_pu: br.resistance,
                    x_pu: br.reactance,
                    i_max_pu: br.i_max,
                    initially_open: open.is_open(b),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("network document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RING: &str = r#"{
        "base_power_kVA": 100, "base_voltage_kV": 12.66,
        "nodes": [
            {"id": 0, "kind": "supply", "p_pu": 0, "q_pu": 0, "v_min": 1.0, "v_max": 1.0},
            {"id": 1, "kind": "load", "p_pu": 0.1, "q_pu": 0.05, "v_min": 0.95, "v_max": 1.05},
            {"id": 2, "kind": "load", "p_pu": 0.1, "q_pu": 0.05, "v_min": 0.95, "v_max": 1.05},
            {"id": "3", "kind": "load", "p_pu": 0.1, "q_pu": 0.05, "v_min": 0.95, "v_max": 1.05}
        ],
        "branches": [
            {"id": "b1", "from": 0, "to": 1, "r_pu": 0.01, "x_pu": 0.02, "initially_open": false},
            {"id": "b2", "from": 1, "to": 2, "r_pu": 0.01, "x_pu": 0.02, "initially_open": false},
            {"id": "b3", "from": 2, "to": "3", "r_pu": 0.01, "x_pu": 0.02, "i_max_pu": 2.0, "initially_open": false},
            {"id": "b4", "from": 3, "to": 0, "r_pu": 0.01, "x_pu": 0.02, "initially_open": true}
        ]
    }"#;

    #[test]
    fn parses_a_four_node_ring() {
        let net = parse_network(RING).unwrap();
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.branch_count(), 4);
        assert_eq!(net.open_count(), 1);
        assert_eq!(net.initial_configuration().open_ids(&net), vec!["b4"]);
        assert_eq!(net.branches()[2].i_max, Some(2.0));
    }

    #[test]
    fn round_trips_through_json() {
        let net = parse_network(RING).unwrap();
        let again = parse_network(&net.to_json(None)).unwrap();
        assert_eq!(again.nodes(), net.nodes());
        assert_eq!(again.branches(), net.branches());
        assert_eq!(again.initial_configuration(), net.initial_configuration());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_network("{"), Err(NetworkError::Malformed(_))));
        let two_open = RING.replace(
            r#""id": "b1", "from": 0, "to": 1, "r_pu": 0.01, "x_pu": 0.02, "initially_open": false"#,
            r#""id": "b1", "from": 0, "to": 1, "r_pu": 0.01, "x_pu": 0.02, "initially_open": true"#,
        );
        assert!(matches!(
            parse_network(&two_open),
            Err(NetworkError::OpenCount { expected: 1, found: 2 })
        ));
        let dangling = RING.replace(r#""to": "3""#, r#""to": "9""#);
        assert!(matches!(parse_network(&dangling), Err(NetworkError::UnknownNode { .. })));
        let loaded_supply = RING.replace(
            r#""kind": "supply", "p_pu": 0"#,
            r#""kind": "supply", "p_pu": 0.5"#,
        );
        assert!(matches!(parse_network(&loaded_supply), Err(NetworkError::InvalidNode { .. })));
    }
}
