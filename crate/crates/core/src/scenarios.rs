//! Ready-made single-rack and single-pod scenarios modelled on the usual
//! composable-rack layouts: traditional servers, physical rack-scale pools,
//! logically disaggregated servers, a hybrid rack and a pod-scale pool spread
//! over three racks.
//!
//! Homogeneous nodes hold 12 units of their kind, so capacity never decides
//! whether the reference workload fits; scope does.

use crate::topology::{
    DataCenter, DisaggregationConfig, Node, Pod, Rack, ResourceComponent, ResourceKind, Scenario,
    Scope,
};

pub const HOMOGENEOUS_UNITS: u32 = 12;
/// Per-kind units of the hybrid rack's heterogeneous node.
pub const HYBRID_MIXED_UNITS: u32 = 2;
/// Per-kind units of each traditional / logically disaggregated server.
pub const SERVER_UNITS: u32 = 4;

fn homogeneous(id: &str, kind: ResourceKind) -> Node {
    Node::new(id, vec![ResourceComponent::new(kind, HOMOGENEOUS_UNITS)])
}

fn server(id: &str, units: u32) -> Node {
    Node::new(
        id,
        ResourceKind::ALL
            .iter()
            .map(|&k| ResourceComponent::new(k, units))
            .collect(),
    )
}

fn pools() -> Vec<Node> {
    vec![
        homogeneous("cpu-pool", ResourceKind::Cpu),
        homogeneous("ram-pool", ResourceKind::Ram),
        homogeneous("storage-pool", ResourceKind::Storage),
    ]
}

fn servers() -> Vec<Node> {
    (1..=4)
        .map(|i| server(&format!("server-{i}"), SERVER_UNITS))
        .collect()
}

fn single_pod(racks: Vec<Rack>) -> DataCenter {
    DataCenter {
        pods: vec![Pod {
            id: "pod-1".into(),
            racks,
        }],
    }
}

fn rack(id: &str, nodes: Vec<Node>) -> Rack {
    Rack {
        id: id.into(),
        nodes,
    }
}

pub fn rack_traditional() -> Scenario {
    Scenario {
        dc: single_pod(vec![rack("rack-1", servers())]),
        disaggregation: DisaggregationConfig::traditional(),
    }
}

pub fn rack_physical() -> Scenario {
    Scenario {
        dc: single_pod(vec![rack("rack-2", pools())]),
        disaggregation: DisaggregationConfig::physical(Scope::Rack),
    }
}

pub fn rack_logical() -> Scenario {
    Scenario {
        dc: single_pod(vec![rack("rack-3", servers())]),
        disaggregation: DisaggregationConfig::logical(),
    }
}

pub fn rack_hybrid() -> Scenario {
    let mut nodes = pools();
    nodes.push(server("mixed", HYBRID_MIXED_UNITS));
    Scenario {
        dc: single_pod(vec![rack("rack-4", nodes)]),
        disaggregation: DisaggregationConfig::hybrid(Scope::Rack),
    }
}

pub fn pod_physical() -> Scenario {
    Scenario {
        dc: single_pod(vec![
            rack("rack-5", vec![homogeneous("cpu-pool", ResourceKind::Cpu)]),
            rack("rack-6", vec![homogeneous("ram-pool", ResourceKind::Ram)]),
            rack(
                "rack-7",
                vec![homogeneous("storage-pool", ResourceKind::Storage)],
            ),
        ]),
        disaggregation: DisaggregationConfig::physical(Scope::Pod),
    }
}

/// All bundled scenarios with their file names.
pub fn builtin_scenarios() -> Vec<(&'static str, Scenario)> {
    vec![
        ("rack_traditional.json", rack_traditional()),
        ("rack_physical.json", rack_physical()),
        ("rack_logical.json", rack_logical()),
        ("rack_hybrid.json", rack_hybrid()),
        ("pod_physical.json", pod_physical()),
    ]
}
